mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Failure, Outcome};

#[derive(Parser, Debug)]
#[command(name = "unfolder", version, about = "Recognize spiral-shaped domains and unfold folded surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Kernel of a polygon as a convex region.
    Kernel { polygon: PathBuf },
    /// Search for a spiral shrinking motion of a polygon.
    Spiral {
        polygon: PathBuf,
        #[arg(long, default_value_t = unfolder_core::spiral::DEFAULT_ANGLE_SAMPLES, value_parser = positive)]
        samples: usize,
        /// Write the margin curve (theta, margin, feasible) as CSV.
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Simulate a spiral motion and check that it keeps shrinking into the polygon.
    VerifyShrink {
        polygon: PathBuf,
        params: PathBuf,
        #[arg(long, default_value_t = 64, value_parser = positive)]
        samples: usize,
        /// Simulated time; defaults to 5 / rate.
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// Check a one-dimensional flat folding.
    Fold1dValidate { folding: PathBuf },
    /// Unfold a one-dimensional flat folding.
    Fold1dUnfold {
        folding: PathBuf,
        #[arg(long, default_value_t = 64, value_parser = positive)]
        steps: usize,
        /// Fixed material point; defaults to the middle of the longest piece.
        #[arg(long)]
        base: Option<f64>,
    },
    /// Check a flat folding of a polygon along chords.
    FlatfoldValidate {
        folding: PathBuf,
        #[arg(long, env = "UNFOLDER_SEED", default_value_t = 0)]
        seed: u64,
        /// Random transversals per crease.
        #[arg(long, default_value_t = 2)]
        per_class: usize,
        /// Write the folded layers as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Unfold a flat folding of a polygon; spiral parameters are searched for when not given.
    FlatfoldUnfold {
        folding: PathBuf,
        params: Option<PathBuf>,
        #[arg(long, default_value_t = 64, value_parser = positive)]
        steps: usize,
        #[arg(long, env = "UNFOLDER_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Place the faces of a folded polygon in space.
    EmbedBuild {
        embedding: PathBuf,
        #[arg(long)]
        obj: Option<PathBuf>,
    },
    /// Test a polygonal embedding for self-intersection.
    EmbedCheck {
        embedding: PathBuf,
        #[arg(long, default_value_t = 0)]
        subdivisions: usize,
    },
    /// Unfold a polygonal embedding and export the frames as OBJ files.
    EmbedUnfold {
        embedding: PathBuf,
        params: Option<PathBuf>,
        #[arg(long, default_value_t = 64, value_parser = positive)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Linking number of two closed polygons.
    Linking {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, env = "UNFOLDER_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Build the rolled square with interlocked loops and measure it.
    LockedExample {
        #[arg(long, default_value_t = 2)]
        turns: usize,
        #[arg(long, default_value_t = 16)]
        chords: usize,
        #[arg(long = "loop", default_value_t = 0.05)]
        loop_length: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn diagnostic(level: &str, code: u8, message: &str) {
    eprintln!("{}", serde_json::json!({ "level": level, "code": code, "message": message }));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            diagnostic("error", 2, e.to_string().trim());
            return ExitCode::from(2);
        }
    };
    match commands::run(cli.command) {
        Ok(Outcome { stdout, negative }) => {
            println!("{stdout}");
            match negative {
                None => ExitCode::SUCCESS,
                Some(why) => {
                    diagnostic("info", 1, &why);
                    ExitCode::from(1)
                }
            }
        }
        Err(Failure::Input(m)) => {
            diagnostic("error", 2, &m);
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            diagnostic("error", 3, &m);
            ExitCode::from(3)
        }
    }
}
