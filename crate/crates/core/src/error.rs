use thiserror::Error;

/// Errors from polygon construction and planar validation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("polygon needs at least 3 distinct vertices, got {0}")]
    TooFewVertices(usize),
    #[error("non-finite coordinate at vertex {0}")]
    NonFinite(usize),
    #[error("polygon is not simple: edges {0} and {1} intersect")]
    NotSimple(usize, usize),
    #[error("polygon has zero area")]
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpiralError {
    #[error("spiral angle {0} is outside (-pi/2, pi/2)")]
    ThetaOutOfRange(f64),
    #[error("shrink rate must be positive, got {0}")]
    NonPositiveRate(f64),
    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("{0}")]
    BadArgument(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Fold1dError {
    #[error("malformed folding: {0}")]
    Malformed(String),
    #[error("inconsistent stacking between cells {cell} and {next}: pieces {a} and {b} swap order")]
    InconsistentStacking { cell: usize, next: usize, a: usize, b: usize },
    #[error("crease penetration at fold {fold} (x = {at}): piece {piece} lies between the joined layers and extends past the crease")]
    CreasePenetration { fold: usize, at: f64, piece: usize },
    #[error("creases of folds {a} and {b} at image {at} are not nested")]
    NonNested { a: usize, b: usize, at: f64 },
    #[error("material point {x} is a fold point (image {position})")]
    AtFoldPoint { x: f64, position: f64 },
    #[error("material point {0} is outside the segment")]
    OutOfRange(f64),
    #[error("base point {0} lies on a fold")]
    BasePointOnFold(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlatFoldError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("malformed folding: {0}")]
    Malformed(String),
    #[error("chords {0} and {1} cross in the interior")]
    CrossingChords(usize, usize),
    #[error("transversal {from:?} -> {to:?}: {source}")]
    Transversal {
        from: [f64; 2],
        to: [f64; 2],
        #[source]
        source: Fold1dError,
    },
    #[error("rolling needs exactly one chord, found {0}")]
    MultipleChords(usize),
    #[error("center lies in the interior of chord {0} while other chords pass through it")]
    CenterOnChordInterior(usize),
    #[error("frame {frame} failed validation: {reason}")]
    InvalidFrame { frame: usize, reason: String },
    #[error(transparent)]
    Spiral(#[from] SpiralError),
    #[error(transparent)]
    Fold1d(#[from] Fold1dError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmbedError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Flat(#[from] FlatFoldError),
    #[error("chord {0} has a flat dihedral angle")]
    FlatAngle(usize),
    #[error("dihedral angle {angle} of chord {chord} is outside (0, 2pi)")]
    AngleOutOfRange { chord: usize, angle: f64 },
    #[error("{0} dihedral angles for {1} chords")]
    CountMismatch(usize, usize),
    #[error("frame {frame} self-intersects (triangles {a} and {b})")]
    InvalidFrame { frame: usize, a: usize, b: usize },
    #[error("point is not on the domain boundary")]
    NotBoundaryPoint,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopoError {
    #[error("loop needs at least 3 vertices")]
    TooFewVertices,
    #[error("loop vertex {0} repeats its predecessor")]
    RepeatedVertex(usize),
    #[error("loop edges {0} and {1} meet")]
    LoopSelfIntersects(usize, usize),
    #[error("loop {0} passes through the surface (distance {1})")]
    LoopPiercesSurface(usize, f64),
    #[error("loops touch (distance {0})")]
    LoopsTouch(f64),
    #[error("no generic projection found")]
    NoGenericProjection,
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("configuration self-intersects (triangles {0} and {1})")]
    SelfIntersecting(usize, usize),
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IoError {
    #[error("unsupported format version {0}")]
    Version(String),
    #[error("{0}")]
    Json(String),
}
