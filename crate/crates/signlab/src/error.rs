use thiserror::Error;

/// Progress snapshot attached to a budget overrun so the caller can
/// decide whether to retry with a larger budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetProgress {
    /// Candidates examined before the budget ran out.
    pub examined: u64,
    /// Best partial quantity reached, rendered as a short decimal.
    pub reached: String,
}

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    #[error("domain: {0}")]
    Domain(String),

    /// A precondition of the underlying theorem does not hold for the
    /// given parameters.
    #[error("hypothesis: {0}")]
    Hypothesis(String),

    /// A constructed object failed its own verification step.
    #[error("construction: {0}")]
    Construction(String),

    /// A scan or search exhausted its budget before finishing.
    #[error("budget exhausted after {} candidates (reached {})", .0.examined, .0.reached)]
    Budget(BudgetProgress),

    /// Arithmetic overflow in a fixed-width fast path.
    #[error("overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
