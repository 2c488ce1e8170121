use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    /// `x1^2 - 3 x2` is negative, so the cubic has a complex pair.
    #[error("cubic has complex roots (x1^2 - 3 x2 = {discriminant:e})")]
    DegenerateCubic { discriminant: f64 },

    #[error("roots of block ({n1}, {n2}) coincide (min separation {separation:e})")]
    DegenerateRoots {
        n1: usize,
        n2: usize,
        separation: f64,
    },

    #[error(
        "coherent truncation at n_max = {n_max} leaves tail mass {deficit:e} (tolerance {tol:e})"
    )]
    Truncation {
        n_max: usize,
        deficit: f64,
        tol: f64,
    },

    #[error("Mandel Q undefined: mean photon number {mean:e} below floor")]
    QUndefined { mean: f64 },

    #[error("CSI parameter undefined: |<n1 n2>| = {value:e} below floor")]
    CsiUndefined { value: f64 },

    #[error("phase mesh of {m_pts} points is below the Nyquist bound {min}")]
    Resolution { m_pts: usize, min: usize },

    #[error("integrator step error: {0}")]
    StepSize(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("oracle verification failed: {0}")]
    Verification(String),

    #[error("at tau = {tau}: {source}")]
    AtTime {
        tau: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io(_) => 4,
            Error::Csv(e) if matches!(e.kind(), csv::ErrorKind::Io(_)) => 4,
            Error::AtTime { source, .. } => source.exit_code(),
            _ => 3,
        }
    }

    pub(crate) fn at_time(self, tau: f64) -> Self {
        Error::AtTime {
            tau,
            source: Box::new(self),
        }
    }
}
