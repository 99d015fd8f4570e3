use thiserror::Error;

/// Errors shared by the torus, tile and inequality modules.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("frequency overflow: n = {n} must be < N/2 = {half_n}")]
    FrequencyOverflow { n: u64, half_n: u64 },

    #[error("gauge error: {0}")]
    Gauge(String),

    #[error("classification coverage violated: {uncovered} of {total} tiles carry no label")]
    CoverageGap { uncovered: usize, total: usize },

    #[error("tile multiplicity {found} exceeds the bound 14")]
    MultiplicityExceeded { found: usize },
}

impl CoreError {
    pub fn config(msg: impl Into<String>) -> Self {
        CoreError::Config(msg.into())
    }
}
