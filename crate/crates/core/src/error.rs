use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular parameters: {0}")]
    SingularParameters(String),

    /// The human population N = S+E+I+A+R is zero (or negative) where a
    /// force-of-infection term has to be evaluated.
    #[error("total population is not positive (N = {population}){}", fmt_location(*.location))]
    ZeroPopulation {
        population: f64,
        location: Option<usize>,
    },

    #[error("non-finite value in {what}{}", fmt_location(*.location))]
    NonFinite {
        what: &'static str,
        location: Option<usize>,
    },

    #[error("numeric blow-up at sweep iteration {iteration}: {source}")]
    NumericBlowUp {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("initial {0} compartment is zero; efficacy is undefined")]
    ZeroInitialCompartment(&'static str),

    #[error("solution grids do not match: {0}")]
    GridMismatch(String),

    #[error("invalid configuration: {field}: {message}")]
    Config { field: String, message: String },

    #[error("cost-effectiveness input: {0}")]
    Cea(String),

    #[error("{path}:{line}: {message}")]
    Records {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn fmt_location(location: Option<usize>) -> String {
    match location {
        Some(i) => format!(" at grid index {i}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Attach a grid index to errors that carry a location.
    pub(crate) fn at(self, index: usize) -> Self {
        match self {
            Error::ZeroPopulation { population, .. } => Error::ZeroPopulation {
                population,
                location: Some(index),
            },
            Error::NonFinite { what, .. } => Error::NonFinite {
                what,
                location: Some(index),
            },
            other => other,
        }
    }
}
