pub mod error;
pub mod embed;
pub mod flatfold;
pub mod fold1d;
pub mod geom;
pub mod io;
pub mod shapes;
mod shrink;
pub mod spiral;
pub mod topo;

pub use error::*;
