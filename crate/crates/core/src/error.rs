use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("image parse error at byte {offset}: {message}")]
    ImageParse { offset: usize, message: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    /// An operation was called with inputs outside its contract
    /// (wrong pixel format, empty buffer, out-of-range row, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("rule parse error in clause {clause}: {message}")]
    RuleParse { clause: usize, message: String },

    #[error("signature file error on line {line}: {message}")]
    SignatureParse { line: usize, message: String },

    #[error("track file error on line {line}: {message}")]
    TrackParse { line: usize, message: String },

    #[error("unsaturated region: no pixel in the selection carries hue information")]
    UnsaturatedRegion,

    #[error("configuration error: {0}")]
    Config(String),
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
