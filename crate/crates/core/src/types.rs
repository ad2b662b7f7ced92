use serde::Serialize;

use crate::{Error, Result};

/// A probability value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::domain(format!(
                "probability {value} is outside [0, 1]"
            )));
        }
        Ok(Probability(value))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// A log-probability: a value in `[-inf, 0]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct LogProb(f64);

impl LogProb {
    pub const ZERO: LogProb = LogProb(0.0);
    pub const NEG_INFINITY: LogProb = LogProb(f64::NEG_INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value > 0.0 {
            return Err(Error::domain(format!(
                "log-probability {value} is outside [-inf, 0]"
            )));
        }
        Ok(LogProb(value))
    }

    /// Wraps a value known non-positive by construction; tiny positive
    /// rounding noise is clamped to zero.
    pub(crate) fn from_nonpos(value: f64) -> Self {
        debug_assert!(value <= 1e-9, "expected a non-positive value, got {value}");
        LogProb(value.min(0.0))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_neg_infinity(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

/// Shape parameters `(a, b)` of a Beta distribution, both strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaParams {
    a: f64,
    b: f64,
}

impl BetaParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
            return Err(Error::domain(format!(
                "Beta parameters must be positive finite reals, got a = {a}, b = {b}"
            )));
        }
        Ok(BetaParams { a, b })
    }

    #[inline]
    pub fn a(self) -> f64 {
        self.a
    }

    #[inline]
    pub fn b(self) -> f64 {
        self.b
    }

    /// The mean `a / (a + b)`.
    #[inline]
    pub fn mean(self) -> f64 {
        self.a / (self.a + self.b)
    }

    /// Parameters with the roles of `a` and `b` swapped.
    #[inline]
    pub fn swapped(self) -> Self {
        BetaParams {
            a: self.b,
            b: self.a,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probability_rejects_out_of_range() {
        assert!(Probability::new(-0.1).is_err());
        assert!(Probability::new(1.1).is_err());
        assert!(Probability::new(f64::NAN).is_err());
        assert!(Probability::new(0.0).is_ok());
        assert!(Probability::new(1.0).is_ok());
    }

    #[test]
    fn log_prob_accepts_neg_infinity() {
        assert!(LogProb::new(f64::NEG_INFINITY).is_ok());
        assert!(LogProb::new(0.0).is_ok());
        assert!(LogProb::new(1e-9).is_err());
        assert!(LogProb::new(f64::NAN).is_err());
    }

    #[test]
    fn beta_params_validated() {
        assert!(BetaParams::new(0.0, 1.0).is_err());
        assert!(BetaParams::new(1.0, -2.0).is_err());
        assert!(BetaParams::new(f64::INFINITY, 1.0).is_err());
        let p = BetaParams::new(2.0, 3.0).unwrap();
        assert_eq!(p.mean(), 0.4);
        assert_eq!(p.swapped().a(), 3.0);
    }
}
