//! `cat0lab`: command-line front end for the cat0lab library.

mod commands;
mod exit;
mod spec;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cat0lab::geodesy::{VertexPolicy, DEFAULT_BUDGET};

#[derive(Parser, Debug)]
#[command(
    name = "cat0lab",
    version,
    about = "Links, geodesics and ideal boundaries of piecewise-Euclidean 2-complexes"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Emit structured JSON instead of the human report.
    #[arg(long, global = true)]
    pub json: bool,
    /// Treat every angle as a floating-point value.
    #[arg(long, global = true)]
    pub approx: bool,
    /// Node budget for each distance search.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    /// Tolerance override for convergence and quantization checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Continuation rule when a ray meets a vertex: `fail` or the index of a
    /// direction at link distance π.
    #[arg(long, global = true, default_value = "0", value_parser = parse_policy)]
    pub policy: VertexPolicy,
}

fn parse_policy(s: &str) -> Result<VertexPolicy, String> {
    match s {
        "fail" => Ok(VertexPolicy::FailAtVertex),
        n => n
            .parse()
            .map(VertexPolicy::Choose)
            .map_err(|_| format!("expected `fail` or an index, got `{n}`")),
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and validate a complex file.
    Validate { file: String },
    /// Certify the link condition at every vertex.
    CheckCat0 { file: String },
    /// Show the link of a vertex.
    Link { file: String, vertex: String },
    /// The constants ε₁ and ε₂.
    Epsilons { file: String },
    /// Geodesic distance between two points.
    Distance { file: String, p: String, q: String },
    /// Trace a straight ray.
    Trace {
        file: String,
        point: String,
        dir: String,
        len: f64,
    },
    /// Estimate the Tits angle between two rays with a common start.
    TitsAngle {
        file: String,
        ray1: String,
        ray2: String,
        /// Number of radii, doubling up to the ray length.
        #[arg(long, default_value_t = 8)]
        steps: usize,
    },
    /// Tits distance between the ends of a fan's rays from its deficiencies.
    TitsDistance {
        file: String,
        fan: String,
        #[arg(long)]
        cap: f64,
        #[arg(long, default_value_t = 0)]
        via: usize,
    },
    /// Ideal-boundary length of a planar fan from its interior angles.
    PolygonLength {
        #[arg(required = true, allow_hyphen_values = true)]
        angles: Vec<String>,
    },
    /// Grow a fan to the cap and test whether it is flat.
    FlatSector {
        file: String,
        fan: String,
        #[arg(long)]
        cap: f64,
        #[arg(long, default_value_t = 0)]
        via: usize,
    },
    /// Test whether a ray runs along three or more flat half-planes.
    Branch {
        file: String,
        ray: String,
        #[arg(long)]
        cap: f64,
    },
    /// Angle modulus of the complex, optionally checking a value against it.
    Quantize {
        file: String,
        #[arg(long, allow_hyphen_values = true)]
        value: Option<String>,
    },
    /// Angle class of an R-geodesic.
    Alpha {
        file: String,
        trace: String,
        #[arg(long)]
        m: Option<i64>,
    },
    /// Lower bound on the angle between perpendicular R-geodesics.
    PerpBound { a1: String, a2: String, m: i64 },
    /// Sampled ping-pong check of two axis windows.
    Pingpong {
        file: String,
        axis1: String,
        axis2: String,
        t: f64,
        /// Grid points per cell side.
        #[arg(long, default_value_t = 2)]
        samples: usize,
        #[arg(long)]
        m: Option<i64>,
    },
}

fn threads() -> Result<usize, exit::Failure> {
    match std::env::var("CAT0LAB_THREADS") {
        Err(_) => Ok(1),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(exit::Failure::input(format!(
                "CAT0LAB_THREADS must be a positive integer, got `{s}`"
            ))),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::INPUT } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = threads().and_then(|t| commands::run(&cli, t));
    match result {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
