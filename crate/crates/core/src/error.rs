use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Where in the input a bad record was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub path: PathBuf,
    /// 1-based line number, when the problem is tied to one record.
    pub line: Option<usize>,
}

impl Location {
    pub fn file(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into(), line: None }
    }

    pub fn line(path: impl Into<PathBuf>, line: usize) -> Self {
        Self { path: path.into(), line: Some(line) }
    }
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{}", self.path.display(), line),
            None => write!(f, "{}", self.path.display()),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{location}: i/o error: {source}")]
    Io {
        location: Location,
        #[source]
        source: std::io::Error,
    },

    #[error("{location}: malformed record: {message}")]
    Parse { location: Location, message: String },

    #[error("{location}: unknown part \"{part}\"")]
    UnknownPart { location: Location, part: String },

    #[error("{location}: epitome references missing stroke id {stroke_id}")]
    MissingStroke { location: Location, stroke_id: u32 },

    #[error("{location}: point ({x}, {y}) lies outside the {width}x{height} canvas")]
    OutOfCanvas {
        location: Location,
        x: f64,
        y: f64,
        width: u32,
        height: u32,
    },

    #[error("{location}: {message}")]
    Invalid { location: Location, message: String },

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("degenerate contour: {0}")]
    DegenerateContour(String),

    #[error("empty dataset for category \"{0}\"")]
    EmptyDataset(String),

    #[error("word \"{word}\" does not fit on the {width}x{height} canvas at {font_size:.2}pt")]
    WordDoesNotFit {
        word: String,
        font_size: f64,
        width: f64,
        height: f64,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { location: Location::file(path), source }
    }

    pub(crate) fn parse(location: Location, message: impl Into<String>) -> Self {
        Error::Parse { location, message: message.into() }
    }

    pub(crate) fn invalid(location: Location, message: impl Into<String>) -> Self {
        Error::Invalid { location, message: message.into() }
    }
}
