use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("admission proportions sum to {sum}, expected 1")]
    AdmissionMixNotNormalized { sum: f64 },
    #[error("{name} = {value} is not a probability in [0, 1]")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },
    #[error("{name} = {value} must be nonnegative")]
    NegativeValue { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("unknown flag `{0}`")]
    UnknownFlag(String),
    #[error("invalid value `{value}` for --{flag}: {reason}")]
    InvalidValue {
        flag: String,
        value: String,
        reason: String,
    },
    #[error("--{0} and --{1} cannot be used together")]
    ConflictingFlags(String, String),
    #[error("unknown experiment {0}; expected 1, 2 or 3")]
    UnknownExperiment(u32),
    #[error("two replicas in the plan share seed {seed} ({first} and {second})")]
    SeedCollision {
        seed: u64,
        first: String,
        second: String,
    },
    #[error(transparent)]
    Param(#[from] ParamError),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("replica {replica} of combo {combo_id} (seed {seed}) failed: {source}")]
    Replica {
        combo_id: String,
        replica: u32,
        seed: u64,
        #[source]
        source: ParamError,
    },
    #[error("summary requested for an empty group")]
    EmptyGroup,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("config file {path}: {message}")]
    ConfigFile { path: PathBuf, message: String },
    #[error("{text}")]
    Usage { text: String, success: bool },
    #[error("malformed results row {row}: {message}")]
    MalformedRow { row: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
