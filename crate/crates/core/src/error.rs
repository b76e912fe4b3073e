use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },
    #[error("line {line}: column `{column}` is numeric but holds `{token}`")]
    Type {
        line: u64,
        column: String,
        token: String,
    },
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("rule binding error: {0}")]
    Binding(String),
    #[error("rule cycle: {0}")]
    Cycle(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("injection impossible: {0}")]
    InjectionImpossible(String),
    #[error("column `{0}` is entirely missing; cannot impute")]
    ImputationImpossible(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("type error: {0}")]
    FeatureType(String),
    #[error("impurity undefined for an empty node")]
    UndefinedNode,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("divergence: {0}")]
    Divergence(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("fold {fold}: {source}")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_fold(self, fold: usize) -> Self {
        Error::Fold {
            fold,
            source: Box::new(self),
        }
    }
}
