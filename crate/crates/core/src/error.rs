use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("{what} needs {n} qubits, above the supported maximum of {max}")]
    Capacity {
        what: &'static str,
        n: usize,
        max: usize,
    },

    #[error("invalid Pauli label {0:?}")]
    PauliLabel(String),

    #[error("invalid observable: {0}")]
    Observable(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("bond length {r} A outside the table range [{min}, {max}] A")]
    OutOfRange { r: f64, min: f64, max: f64 },

    #[error("VQE did not converge after {iterations} iterations (energy gap {energy_gap:.3e} Ha)")]
    NotConverged {
        theta: Vec<f64>,
        energy: f64,
        energy_gap: f64,
        iterations: usize,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
