use thiserror::Error;

use crate::data::DataError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("feature {feature} code {code} outside domain 0..{domain}")]
    OutOfDomain { feature: usize, code: u8, domain: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("training failed at beta={beta}, tau={tau}: {source}")]
    Calibration {
        beta: f64,
        tau: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("missing {what} for household {id}")]
    MissingField { what: &'static str, id: u64 },
    #[error("no irradiance for tract {tract} on {date}")]
    MissingIrradiance { tract: String, date: chrono::NaiveDate },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
