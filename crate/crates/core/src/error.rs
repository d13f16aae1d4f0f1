use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::crawl::CrawlError;
use crate::eval::EvalError;
use crate::features::FeatureError;
use crate::ontology::OntologyError;
use crate::topics::TopicError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used to pick a process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Network,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}:{line}: {source}")]
    Json {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },

    #[error("missing artifact {0}")]
    MissingArtifact(PathBuf),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Crawl(#[from] CrawlError),

    #[error(transparent)]
    Features(#[from] FeatureError),

    #[error(transparent)]
    Topics(#[from] TopicError),

    #[error(transparent)]
    Ontology(#[from] OntologyError),

    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) => ErrorKind::Usage,
            Error::Crawl(e) if e.is_network() => ErrorKind::Network,
            Error::Crawl(_) => ErrorKind::Usage,
            _ => ErrorKind::Data,
        }
    }
}
