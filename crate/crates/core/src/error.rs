use std::path::PathBuf;

/// Errors produced by envelope estimation, filter design and audio I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("invalid bunch size")]
    InvalidBunchSize,
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("invalid sample rate: {0}")]
    InvalidSampleRate(f64),

    #[error("cutoff above Nyquist: {cutoff_hz} Hz >= {nyquist_hz} Hz")]
    CutoffAboveNyquist { cutoff_hz: f64, nyquist_hz: f64 },
    #[error("invalid filter spec: {0}")]
    InvalidFilterSpec(String),
    #[error("frequency out of band: {0} Hz")]
    FrequencyOutOfBand(f64),

    #[error("state dimension mismatch: expected {expected}, got {actual}")]
    StateDimensionMismatch { expected: usize, actual: usize },
    #[error("signal shorter than filter transient pad: {len} samples, pad {pad}")]
    SignalTooShort { len: usize, pad: usize },
    #[error("chunk not bunch-aligned: length {len} is not a positive multiple of {bunch}")]
    ChunkNotBunchAligned { len: usize, bunch: usize },
    #[error("inconsistent sample rate: {expected} Hz vs {actual} Hz")]
    InconsistentSampleRate { expected: f64, actual: f64 },

    #[error("invalid window")]
    InvalidWindow,
    #[error("invalid synthetic spec: {0}")]
    InvalidSynthSpec(String),
    #[error("no methods configured")]
    NoMethods,
    #[error("signal length mismatch: {expected} vs {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("not a WAV file")]
    NotWav,
    #[error("unsupported codec: format tag {0:#06x}")]
    UnsupportedCodec(u16),
    #[error("unsupported bit depth: {0}")]
    UnsupportedBitDepth(u16),
    #[error("truncated file")]
    TruncatedFile,
    #[error("malformed WAV: {0}")]
    MalformedWav(String),
    #[error("malformed CSV: {0}")]
    MalformedCsv(String),
    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),
    #[error("channel index {index} out of range ({channels} channels)")]
    ChannelOutOfRange { index: usize, channels: usize },

    #[error("{}: {source}", path.display())]
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

    /// True for failures of the file system or of the file contents
    /// (as opposed to invalid parameters).
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::NotWav
                | Error::UnsupportedCodec(_)
                | Error::UnsupportedBitDepth(_)
                | Error::TruncatedFile
                | Error::MalformedWav(_)
                | Error::MalformedCsv(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
