use thiserror::Error;

/// Errors reported by constructors and estimators in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical quantity was negative or not finite.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Second moments must satisfy the Cauchy-Schwarz bound <I^2> >= <I>^2.
    #[error("inconsistent intensity moments: {0}")]
    InvalidMoments(String),

    /// Visibility is undefined when every moment vanishes.
    #[error("visibility undefined: all intensity moments are zero")]
    DegenerateMoments,

    /// The trial ensemble was empty or contained invalid entries.
    #[error("invalid trial ensemble: {0}")]
    InvalidEnsemble(String),

    /// A scan curve did not provide enough baseline points beyond the
    /// coherence exclusion zone to anchor the dip estimate.
    #[error("insufficient baseline: need at least {needed} points beyond the exclusion zone, found {found}")]
    InsufficientBaseline { needed: usize, found: usize },

    /// A scan curve was too short or too narrow to estimate visibility.
    #[error("scan unsuitable for visibility estimation: {0}")]
    UnsuitableScan(String),
}

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<(), Error> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {value}")))
    }
}

pub(crate) fn ensure_nonnegative(name: &str, value: f64) -> Result<(), Error> {
    ensure_finite(name, value)?;
    if value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be >= 0, got {value}")))
    }
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<(), Error> {
    ensure_finite(name, value)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be > 0, got {value}")))
    }
}
