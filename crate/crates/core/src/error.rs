use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument was outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A Table-1 style bound was requested below the (possibly perturbed) mean.
    #[error("threshold u = {u} is below the mean {mean}; the bound is not valid there")]
    BelowMean { u: f64, mean: f64 },

    /// The requested perturbation exceeds the maximal admissible value.
    #[error("perturbation {eta} exceeds the maximal admissible value {max}")]
    PerturbationTooLarge { eta: f64, max: f64 },

    /// The perturbation region has mass where it is not allowed.
    #[error("perturbation region has mass at index {index} where f = {f} <= u = {u}")]
    InvalidSupport { index: usize, f: f64, u: f64 },

    /// No support point has a value above the threshold.
    #[error("no support point has f above u = {u}; no valid perturbation plan exists")]
    NoValidPlan { u: f64 },

    /// Brute-force enumeration was requested on a support too large to enumerate.
    #[error("brute-force oracle refuses support size {size} (max {max})")]
    SupportTooLarge { size: usize, max: usize },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = core::result::Result<T, Error>;
