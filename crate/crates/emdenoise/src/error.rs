use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] emdenoise_core::Error),
    #[error("input file not found: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: unsupported channel count {channels}, expected mono", path.display())]
    UnsupportedChannels { path: PathBuf, channels: u16 },
    #[error("{}: unsupported encoding ({detail}), expected 16-bit integer PCM", path.display())]
    UnsupportedEncoding { path: PathBuf, detail: String },
    #[error("{}: malformed WAV: {detail}", path.display())]
    MalformedWav { path: PathBuf, detail: String },
    #[error("sample {index} = {value} lies outside [-1, 1]")]
    SampleRange { index: usize, value: f64 },
    #[error("{}: not a model file (magic {found:?})", path.display())]
    ModelMagic { path: PathBuf, found: String },
    #[error("{}: model schema version {found} is not supported (expected {expected})", path.display())]
    ModelVersion { path: PathBuf, found: u32, expected: u32 },
    #[error("{}: corrupt file: {detail}", path.display())]
    Corrupt { path: PathBuf, detail: String },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile(path)
        } else {
            Error::Io { path, source }
        }
    }

    /// Process exit code for this error: 2 for a missing input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::MissingFile(_) => 2,
            _ => 1,
        }
    }
}
