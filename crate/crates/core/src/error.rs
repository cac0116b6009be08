use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A state left the admissible set of its equation (for Euler: ρ ≤ 0 or p ≤ 0).
    #[error("inadmissible state: {quantity} = {value:e}{}", location(*.cell, *.time))]
    Admissibility {
        quantity: &'static str,
        value: f64,
        cell: Option<usize>,
        time: Option<f64>,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("system is not hyperbolic: {0}")]
    Hyperbolicity(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("degenerate wave speed: lambda_max = {0:e}")]
    DegenerateSpeed(f64),

    #[error("non-finite value in solution at step {step}, t = {time}")]
    NonFinite { step: usize, time: f64 },

    #[error("eigensolver did not converge (matrix written to {})", path.display())]
    EigenNonConvergence { path: PathBuf },

    #[error("step {step} (t = {time}): {source}")]
    Step {
        step: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn location(cell: Option<usize>, time: Option<f64>) -> String {
    match (cell, time) {
        (Some(c), Some(t)) => format!(" in cell {c} at t = {t}"),
        (Some(c), None) => format!(" in cell {c}"),
        (None, Some(t)) => format!(" at t = {t}"),
        (None, None) => String::new(),
    }
}

impl Error {
    /// Attach a cell index and time to an admissibility error; other variants pass through.
    pub fn at(self, cell_index: usize, t: f64) -> Self {
        match self {
            Error::Admissibility {
                quantity, value, ..
            } => Error::Admissibility {
                quantity,
                value,
                cell: Some(cell_index),
                time: Some(t),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
