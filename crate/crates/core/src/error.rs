use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A point failed the strict-interior admission test.
    #[error("point ({re}, {im}) is not inside the unit disk with margin {margin:e}")]
    OutsideDisk { re: f64, im: f64, margin: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Evaluation point sits on a singularity of the requested quantity.
    #[error("singular input: {0}")]
    Singular(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A winding-number node landed (almost) on the image curve.
    #[error("target point lies within {distance:e} of the image of the ball boundary")]
    BoundaryProximity { distance: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// True for failures of a numerical routine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Numerical(_) | Error::BoundaryProximity { .. } | Error::Singular(_)
        )
    }
}
