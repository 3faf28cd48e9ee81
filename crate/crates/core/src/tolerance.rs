/// Numerical tolerances shared by the finite-measure code paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Equality checks between independently computed quantities.
    pub eq: f64,
    /// Slack below zero that is still treated as zero (clipping).
    pub nonneg: f64,
    /// Negative probability mass beyond which a zero pattern is rejected.
    pub inconsistency: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eq: 1e-10,
            nonneg: 1e-12,
            inconsistency: 1e-9,
        }
    }
}
