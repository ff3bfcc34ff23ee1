//! Subcommands of the `containment` binary, as library functions returning
//! structured reports.

pub mod analyze;
pub mod generate;
pub mod region;
pub mod verify;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] containment::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
    /// A computed value left its proven range; the payload describes it.
    #[error("violation: {0}")]
    Violation(String),
}

impl CliError {
    /// 1 for violations, 2 for everything the caller can fix.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Violation(_) => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Decimal rendering with 15 significant digits.
pub fn sig15(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (14 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::sig15;

    #[test]
    fn significant_digits() {
        assert_eq!(sig15(2.0 / 3.0), "0.666666666666667");
        assert_eq!(sig15(1.5), "1.50000000000000");
        assert_eq!(sig15(0.0), "0");
        assert_eq!(sig15(123.0), "123.000000000000");
    }
}
