use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A named input failed validation.
    #[error("{field}: {reason}")]
    Invalid { field: String, reason: String },

    /// The requested frequency lies at or above the surface-plasmon asymptote.
    #[error(
        "frequency: no bound surface mode (Re eps_m = {re_eps_metal} is not below -{eps1}){}",
        match asymptote_omega {
            Some(w) => format!("; surface-plasmon asymptote at {w:e} rad/s"),
            None => String::new(),
        }
    )]
    NoBoundMode {
        re_eps_metal: f64,
        eps1: f64,
        asymptote_omega: Option<f64>,
    },

    #[error("{field}: undefined limit: {reason}")]
    UndefinedLimit { field: String, reason: String },

    #[error("{kind}: unknown name '{name}' (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("fdtd: not converged: {0}")]
    NotConverged(String),

    #[error("fdtd: instability at step {step}: {detail}")]
    Unstable { step: u64, detail: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Input-validation failures (exit code 2 in the CLI) as opposed to
    /// numerical or I/O failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Invalid { .. }
                | Error::NoBoundMode { .. }
                | Error::UndefinedLimit { .. }
                | Error::UnknownStrategy { .. }
                | Error::Config(_)
        )
    }
}

/// Rejects non-finite or non-positive values.
pub(crate) fn require_positive(field: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(field, format!("must be positive and finite, got {value}")))
    }
}

pub(crate) fn require_finite(field: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(field, format!("must be finite, got {value}")))
    }
}
