use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid value {value} for `{field}`")]
    InvalidParameter { field: String, value: f64 },
    #[error("invalid gain table: {0}")]
    GainTable(String),
    #[error("instance has frequency-selective gains; a flat channel is required")]
    NotFlat,
    #[error("PSD band [{start}, {end}] straddles a gain-table boundary")]
    BandMisaligned { start: f64, end: f64 },
    #[error("invalid PSD: {0}")]
    InvalidPsd(String),
    #[error("user {user} uses power {used} above its budget {budget}")]
    PowerExceeded { user: usize, used: f64, budget: f64 },
}

/// Failure to reconstruct an overlap point from the balance equations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquationError {
    #[error("singular point: {0}")]
    Singular(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("unsupported instance: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("enumeration of {estimated} allocations exceeds the budget of {budget}")]
    BudgetExceeded { estimated: u128, budget: u128 },
    #[error("invalid resolution: {0}")]
    Resolution(String),
    #[error("gain table boundary at {boundary} does not fall on a channel edge for {channels} channels")]
    Misaligned { boundary: f64, channels: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}
