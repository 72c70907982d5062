use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub enum Error {
    /// A stream file is missing or truncated.
    CorruptSession,
    /// A depth pixel exceeded the 11-bit range.
    InvalidDepthSample { frame: usize, value: u16 },
    /// Stream sizes disagree with the manifest.
    ManifestMismatch(&'static str),
    RoiOutOfRange,
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// A parameter is outside its documented range.
    InvalidParameter(&'static str),
    /// Audio ended before the given frame slot was complete.
    AudioUnderrun { chunk: usize },
    EmptyInput(&'static str),
    /// An event span does not fit inside the session.
    SpanOutOfRange { start: usize, end: usize },
    InvalidTimeline(alloc::string::String),
    UnknownPreset(alloc::string::String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::CorruptSession => f.write_str("corrupt session"),
            Error::InvalidDepthSample { frame, value } => {
                write!(f, "invalid depth sample {value} in frame {frame}")
            }
            Error::ManifestMismatch(what) => write!(f, "manifest mismatch: {what}"),
            Error::RoiOutOfRange => f.write_str("roi out of range"),
            Error::DimensionMismatch { expected, found } => write!(
                f,
                "dimension mismatch: expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Error::InvalidParameter(what) => f.write_str(what),
            Error::AudioUnderrun { chunk } => write!(f, "audio underrun at chunk {chunk}"),
            Error::EmptyInput(what) => write!(f, "empty input: {what}"),
            Error::SpanOutOfRange { start, end } => {
                write!(f, "event span {start}..={end} outside session")
            }
            Error::InvalidTimeline(why) => write!(f, "invalid timeline: {why}"),
            Error::UnknownPreset(name) => write!(
                f,
                "unknown preset '{name}' (valid presets: posture_test, trouble_sleeping, successful_sleeping)"
            ),
        }
    }
}

impl core::error::Error for Error {}
