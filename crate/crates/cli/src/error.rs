use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config invalid: {0}")]
    ConfigInvalid(String),

    #[error("numerical failure in {module}: {source}")]
    Numerical {
        module: &'static str,
        #[source]
        source: relaxproj::Error,
    },

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ConfigInvalid(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io(_) => 1,
        }
    }
}

pub(crate) fn numerical(module: &'static str) -> impl Fn(relaxproj::Error) -> CliError {
    move |source| CliError::Numerical { module, source }
}

pub(crate) fn invalid<E: std::fmt::Display>(context: &str) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::ConfigInvalid(format!("{context}: {e}"))
}

pub type Result<T> = std::result::Result<T, CliError>;
