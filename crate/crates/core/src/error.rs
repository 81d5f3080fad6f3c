use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid segment: {0}")]
    InvalidSegment(String),

    #[error("propagation diverged at t = {time}s (non-finite derivative)")]
    PropagationDiverged { time: f64 },

    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("grid too fine: {count} cells exceeds the ceiling of {ceiling}")]
    GridTooFine { count: u128, ceiling: usize },

    #[error("invalid problem definition: {0}")]
    Problem(String),

    #[error("invalid planner configuration: {0}")]
    Config(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
