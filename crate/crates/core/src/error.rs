use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no self-consistent Gaussian mode: cavity is {0}")]
    NoSelfConsistentMode(&'static str),

    #[error("non-physical mode: Im(1/q) = {im_inv_q} must be negative")]
    NonPhysicalMode { im_inv_q: f64 },

    #[error("axial position {z} m outside [0, {z_max}] m")]
    PositionOutOfRange { z: f64, z_max: f64 },

    #[error("lossless cavity divergence (r1*r2 = {0})")]
    LosslessCavity(f64),

    #[error("intracavity solver did not converge after {iterations} iterations (last P4 = {last_p4} W, eta = {last_eta})")]
    NonConvergence {
        iterations: usize,
        last_p4: f64,
        last_eta: f64,
    },

    #[error("inconsistent circuit state: {0}")]
    InconsistentCircuit(String),

    #[error("wavelength {0} m outside the supported band")]
    WavelengthOutOfBand(f64),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("invalid sweep: {0}")]
    Sweep(String),

    #[error("nothing to emit: row set is empty")]
    EmptyRows,

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// True for input/configuration problems, false for numerical failures.
    pub fn is_config_error(&self) -> bool {
        match self {
            Error::InvalidParameter { .. }
            | Error::Config { .. }
            | Error::Sweep(_)
            | Error::WavelengthOutOfBand(_) => true,
            Error::Stage { source, .. } => source.is_config_error(),
            _ => false,
        }
    }
}

pub(crate) fn check_fraction(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must lie in (0, 1]",
        })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

pub(crate) fn check_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be non-negative and finite",
        })
    }
}
