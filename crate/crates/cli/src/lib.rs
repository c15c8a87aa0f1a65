//! Command-line front end: metric files, the built-in catalog, command
//! dispatch and report rendering.

pub mod catalog;
pub mod commands;
pub mod invariants;
pub mod json;
pub mod metric_file;

use cgeom_core::einstein::{DecideError, DEFAULT_TOLERANCE};
use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use commands::run;
pub use metric_file::{load_metric, parse_metric, LoadError, MetricFile};

/// Environment variable holding the worker thread count.
pub const WORKERS_VAR: &str = "CGEOM_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "cgeom", version, about = "Curvature, conformal invariants and the conformal Einstein test for 4-d metrics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test whether a metric is locally conformal to an Einstein metric at
    /// sample points.
    CheckEinstein {
        /// `catalog:NAME` or a metric file path.
        metric: String,
        /// Points as "x0,x1,x2,x3;..." (defaults to the file's points).
        #[arg(long, allow_hyphen_values = true)]
        points: Option<String>,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
        /// Rescale by Θ² first: a factor name from the file or an expression.
        #[arg(long)]
        conformal: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print curvature quantities at one point.
    Tensors {
        metric: String,
        /// The point as "x0,x1,x2,x3".
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Comma-separated quantities.
        #[arg(long, value_enum, value_delimiter = ',', required = true)]
        show: Vec<Quantity>,
        #[arg(long)]
        conformal: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Evaluate the built-in identity checks and report their residuals.
    VerifyInvariants {
        metric: String,
        #[arg(long, allow_hyphen_values = true)]
        points: Option<String>,
        /// Factor used by the conformal checks (defaults to the first one
        /// in the file).
        #[arg(long)]
        conformal: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// List the built-in metrics, or print one of their files.
    Catalog {
        /// Print the file of this entry.
        #[arg(long)]
        show: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Quantity {
    Metric,
    InverseMetric,
    Christoffel,
    Riemann,
    Ricci,
    RicciScalar,
    Schouten,
    Weyl,
    WeylScalar,
    Kretschmann,
    Lambda,
    CRicci,
    Bach,
    E,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Metric => "metric",
            Quantity::InverseMetric => "inverse-metric",
            Quantity::Christoffel => "christoffel",
            Quantity::Riemann => "riemann",
            Quantity::Ricci => "ricci",
            Quantity::RicciScalar => "ricci-scalar",
            Quantity::Schouten => "schouten",
            Quantity::Weyl => "weyl",
            Quantity::WeylScalar => "weyl-scalar",
            Quantity::Kretschmann => "kretschmann",
            Quantity::Lambda => "lambda",
            Quantity::CRicci => "c-ricci",
            Quantity::Bach => "bach",
            Quantity::E => "e",
        }
    }
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    NotConformallyEinstein,
    Inconclusive,
    InputError,
    InvariantViolation,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::NotConformallyEinstein => 1,
            Status::Inconclusive => 2,
            Status::InputError => 3,
            Status::InvariantViolation => 4,
        }
    }
}

/// Rendered output of a command together with its exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub status: Status,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("invalid points: {0}")]
    Points(String),
    #[error("{0}")]
    Argument(String),
    #[error(transparent)]
    Decide(#[from] DecideError),
    #[error("cannot evaluate at {point:?}: {message}")]
    Evaluation { point: [f64; 4], message: String },
    #[error("{0}")]
    Degenerate(String),
    #[error("could not serialize output: {0}")]
    Serialize(#[from] serde_json::Error),
}

impl CliError {
    pub fn status(&self) -> Status {
        match self {
            CliError::Degenerate(_) => Status::Inconclusive,
            CliError::Serialize(_) => Status::InvariantViolation,
            _ => Status::InputError,
        }
    }
}

/// Worker count from the value of [`WORKERS_VAR`], if set.
pub fn parse_workers(value: Option<&str>) -> Result<Option<usize>, CliError> {
    match value.map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => match v.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Argument(format!("{WORKERS_VAR} must be a positive integer, got `{v}`"))),
        },
    }
}
