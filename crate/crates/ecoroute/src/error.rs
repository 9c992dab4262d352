use thiserror::Error;

#[derive(Debug, Error)]
pub enum TntpError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("missing metadata tag <{0}>")]
    MissingTag(&'static str),
    #[error("metadata tag <{tag}> has unreadable value {value:?}")]
    BadTag { tag: &'static str, value: String },
    #[error("metadata declares {declared} {what}, file contains {found}")]
    CountMismatch {
        what: &'static str,
        declared: usize,
        found: usize,
    },
    #[error("zone count mismatch: network file has {network} zones, trips file has {trips}")]
    ZoneCountMismatch { network: u32, trips: u32 },
    #[error("units config line {line}: {msg}")]
    Units { line: usize, msg: String },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Tntp(#[from] TntpError),
    #[error("{path}: {source}")]
    TntpFile {
        path: String,
        #[source]
        source: TntpError,
    },
    #[error(transparent)]
    Solver(#[from] ecoroute_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
