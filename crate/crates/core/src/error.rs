//! Error type shared across the pipeline.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument value (counts, ranges, unknown names).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Structurally inconsistent data (mismatched list lengths, shapes).
    #[error("structural error: {0}")]
    Structure(String),

    /// Malformed tensor file; `offset` is the byte position of the defect.
    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    /// Bad input handed to the renderer (non-finite values, shape mismatch).
    #[error("render input error: {0}")]
    RenderInput(String),

    /// A strobe intensity triple quantized to all-zero pulses.
    #[error("quantization error at triple {index}: {message}")]
    Quantization { index: usize, message: String },

    /// Zero or near-dependent color mixture.
    #[error("degenerate color: {0}")]
    DegenerateColor(String),

    /// Calibration input rejected (saturation, missing tiles).
    #[error("calibration error: {0}")]
    Calibration(String),

    /// Ill-conditioned linear system.
    #[error("conditioning error: {0}")]
    Conditioning(String),

    /// Optimizer hit a non-finite loss; names the first offending group.
    #[error("non-finite loss at iteration {iteration}: first offending parameter group is `{group}`")]
    NonFiniteLoss { iteration: usize, group: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }

    pub fn format(offset: u64, msg: impl Into<String>) -> Self {
        Error::Format {
            offset,
            message: msg.into(),
        }
    }
}
