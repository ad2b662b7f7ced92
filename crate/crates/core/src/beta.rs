//! Exponential upper bounds on `log P(X >= u)` for `X ~ Beta(a, b)`.
//!
//! Four bound families are provided, valid for `u` at or above the mean
//! `a / (a + b)`:
//!
//! ```text
//! Hoeffding   -2 (a + b + 1) (u - a/(a+b))^2
//! Bernstein   -((a+b)u - a)^2 / (2ab/(a+b+1) + 4((a+b)u - a)(b-a)^+ / (3(a+b+2)))
//! KL          -(a + b) kl(a/(a+b), u)
//! perturbed   -(a + b - eta) kl((a - eta)/(a + b - eta), u)
//! ```
//!
//! The perturbed bound improves monotonically in `eta`, and the largest
//! admissible perturbation is [`s_value`]: the unique non-negative root of
//! the residual
//!
//! ```text
//! R(eta, u) = (u b - (1 - u)(a - eta)) / b * u^(-eta) - 1,
//! ```
//!
//! which has a closed form through the Lambert W principal branch for
//! `a > 1`, `u` interior, and degenerates to `eta = a` for `a <= 1` or
//! `u = 0` and to `a - b (a - 1) / (b + 1)` at `u = 1`. The classical choice
//! `eta = 1 + (a - 1)/(b + 1)` is the last member of the explicit
//! lower-bound chain [`s_lower_bounds`], so the maximal bound is never worse.

use serde::Serialize;

use crate::special::{binary_kl, lambert_w0, log_beta_tail_exact};
use crate::{BetaParams, Error, LogProb, Probability, Result};

/// Slack accepted when checking `eta <= S` so that `eta = s_value(..)`
/// round-trips through the check.
const ETA_BUDGET_SLACK: f64 = 1e-9;

/// How a reported bound value should be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    /// The bound's preconditions hold; the value upper-bounds the log tail.
    Ok,
    /// The threshold is below the mean: the raw value is reported for
    /// plotting but is not a bound.
    BelowMean,
    /// The premise `u > (a - eta)/(a + b - eta)` fails; 0 is reported
    /// (a correct but vacuous bound).
    Vacuous,
    /// `u = 1`: the continuous Beta tail is exactly zero and the bound is
    /// `-inf`.
    ExactZero,
    /// The raw value is not even well defined (Bernstein denominator <= 0
    /// below the mean).
    Undefined,
}

/// A single named bound inside a [`BoundReport`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundEntry {
    /// Log-scale value. May be `-inf`; `NaN` when `status` is `Undefined`.
    pub log_bound: f64,
    pub status: BoundStatus,
}

impl BoundEntry {
    /// True when `log_bound` is a mathematically guaranteed upper bound on
    /// the log tail (vacuous zero and exact-zero count as guaranteed).
    pub fn is_valid(&self) -> bool {
        matches!(
            self.status,
            BoundStatus::Ok | BoundStatus::Vacuous | BoundStatus::ExactZero
        )
    }
}

/// Perturbation policy for the perturbed-KL row of a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaPolicy {
    /// No perturbation; reduces to the plain KL bound.
    None,
    /// Caller-chosen perturbation, validated against `S(a, b, u)`.
    Fixed(f64),
    /// The constant `min(a, 1 + (a - 1)/(b + 1))`, independent of `u`.
    Classic,
    /// The maximal admissible perturbation `S(a, b, u)`.
    Maximal,
}

/// All bounds for one `(a, b, u)` triple, with validity flags and the exact
/// tail attached for reference.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub a: f64,
    pub b: f64,
    pub u: f64,
    /// The perturbation actually used in the perturbed-KL row.
    pub eta: f64,
    pub hoeffding: BoundEntry,
    pub bernstein: BoundEntry,
    pub kl: BoundEntry,
    pub perturbed_kl: BoundEntry,
    /// Maximal admissible perturbation `S(a, b, u)`.
    pub s_value: f64,
    /// Explicit lower-bound chain on `S` (only defined for `a > 1` and
    /// interior `u`), ordered strongest first.
    pub s_lower_bounds: Option<[f64; 3]>,
    /// `log P(X >= u)` computed exactly.
    pub exact_log_tail: f64,
}

/// Hoeffding bound from Table 1; requires `u >= a / (a + b)`.
pub fn hoeffding_bound(params: BetaParams, u: Probability) -> Result<LogProb> {
    require_at_least_mean(params, u)?;
    Ok(LogProb::from_nonpos(hoeffding_raw(params, u.value())))
}

/// The Hoeffding expression without the validity check (diagnostics only).
pub fn hoeffding_raw(params: BetaParams, u: f64) -> f64 {
    let (a, b) = (params.a(), params.b());
    let dev = u - params.mean();
    -2.0 * (a + b + 1.0) * dev * dev
}

/// Bernstein bound from Table 1; requires `u >= a / (a + b)`.
pub fn bernstein_bound(params: BetaParams, u: Probability) -> Result<LogProb> {
    require_at_least_mean(params, u)?;
    Ok(LogProb::from_nonpos(bernstein_raw(params, u.value())))
}

/// The Bernstein expression without the validity check. Below the mean the
/// denominator can reach zero or turn negative; `NaN` is returned there.
pub fn bernstein_raw(params: BetaParams, u: f64) -> f64 {
    let (a, b) = (params.a(), params.b());
    let n = a + b;
    let num = n * u - a;
    let denom = 2.0 * a * b / (n + 1.0) + 4.0 * num * (b - a).max(0.0) / (3.0 * (n + 2.0));
    if denom <= 0.0 {
        return f64::NAN;
    }
    -(num * num) / denom
}

/// KL bound from Table 1; requires `u >= a / (a + b)`.
pub fn kl_bound(params: BetaParams, u: Probability) -> Result<LogProb> {
    require_at_least_mean(params, u)?;
    Ok(LogProb::from_nonpos(kl_raw(params, u.value())))
}

/// The KL expression without the validity check.
pub fn kl_raw(params: BetaParams, u: f64) -> f64 {
    let n = params.a() + params.b();
    let mean = Probability::new(params.mean()).expect("mean is a probability");
    let u = Probability::new(u).expect("u checked by caller");
    -n * binary_kl(mean, u)
}

fn require_at_least_mean(params: BetaParams, u: Probability) -> Result<()> {
    let mean = params.mean();
    if u.value() < mean {
        return Err(Error::BelowMean { u: u.value(), mean });
    }
    Ok(())
}

/// The residual `R(eta, u) = (u b - (1 - u)(a - eta)) / b * u^(-eta) - 1`.
///
/// `R <= 0` exactly when the key inequality behind the perturbed bound holds
/// at this `eta`; its unique non-negative root is `S(a, b, u)`.
pub fn perturbation_residual(params: BetaParams, eta: f64, u: Probability) -> Result<f64> {
    let (a, b) = (params.a(), params.b());
    let u = u.value();
    if a <= 1.0 {
        return Err(Error::domain(format!(
            "perturbation_residual requires a > 1, got a = {a}"
        )));
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::domain(format!(
            "perturbation_residual requires u in (0, 1), got {u}"
        )));
    }
    if !(eta >= 0.0) {
        return Err(Error::domain(format!(
            "perturbation_residual requires eta >= 0, got {eta}"
        )));
    }
    Ok((u * b - (1.0 - u) * (a - eta)) / b * u.powf(-eta) - 1.0)
}

/// Maximal admissible perturbation `S(a, b, u)`.
///
/// Case split from the definition: `S = a` when `a <= 1` or `u = 0`;
/// `S = a - b (a - 1) / (b + 1)` when `a > 1, u = 1`; otherwise the Lambert
/// W closed form. When the W argument would overflow, the root of the
/// residual is bracketed in log space instead.
pub fn s_value(params: BetaParams, u: Probability) -> f64 {
    let (a, b) = (params.a(), params.b());
    let u = u.value();
    if a <= 1.0 || u == 0.0 {
        return a;
    }
    if u == 1.0 {
        return a - b * (a - 1.0) / (b + 1.0);
    }

    let ln_inv_u = -u.ln();
    let exponent = a - b * u / (1.0 - u);
    // log of the W argument: b u^exponent log(1/u) / (1 - u)
    let ln_arg = b.ln() + exponent * u.ln() - (-u).ln_1p() + ln_inv_u.ln();
    if ln_arg <= 700.0 {
        let w = lambert_w0(ln_arg.exp()).expect("W argument is non-negative");
        a - b * u / (1.0 - u) + w / ln_inv_u
    } else {
        s_value_bisect(a, b, u)
    }
}

/// Root of the residual by bisection on its log form; used when the Lambert
/// argument `u^(a - b u/(1-u))` overflows (tiny `u`, large `b`).
fn s_value_bisect(a: f64, b: f64, u: f64) -> f64 {
    let ln_inv_u = -u.ln();
    // log residual: ln((u b - (1-u)(a - eta)) / b) + eta ln(1/u); negative
    // numerator means R < 0 outright.
    let residual_nonpositive = |eta: f64| -> bool {
        let num = u * b - (1.0 - u) * (a - eta);
        if num <= 0.0 {
            return true;
        }
        (num / b).ln() + eta * ln_inv_u <= 0.0
    };
    // R(0, u) < 0 always; R(a, u) = u^(1-a) - 1 > 0 for a > 1.
    let (mut lo, mut hi) = (0.0_f64, a);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual_nonpositive(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The three explicit lower bounds on `S(a, b, u)` for `a > 1`, interior
/// `u`, ordered `S >= lb[0] >= lb[1] >= lb[2] = 1 + (a - 1)/(b + 1)`.
pub fn s_lower_bounds(params: BetaParams, u: Probability) -> Result<[f64; 3]> {
    let (a, b) = (params.a(), params.b());
    let u = u.value();
    if a <= 1.0 {
        return Err(Error::domain(format!(
            "s_lower_bounds requires a > 1, got a = {a}"
        )));
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::domain(format!(
            "s_lower_bounds requires u in (0, 1), got {u}"
        )));
    }
    let ln_inv_u = -u.ln();
    let c = 1.0 / u - 1.0;
    let q = b * ln_inv_u + c;
    let inner = 2.0 * c * c * ln_inv_u * (a - 1.0) / (q * q);
    // sqrt(1 + inner) - 1 evaluated without cancellation for tiny inner.
    let sqrt1pm1 = inner / ((1.0 + inner).sqrt() + 1.0);
    let lb1 = a - b * q * sqrt1pm1 / (c * c);
    let lb2 = a - b * (a - 1.0) / (b + c / ln_inv_u);
    let lb3 = a - b * (a - 1.0) / (b + 1.0);
    Ok([lb1, lb2, lb3])
}

/// The classical constant perturbation `min(a, 1 + (a - 1)/(b + 1))`.
pub fn classic_eta(params: BetaParams) -> f64 {
    let (a, b) = (params.a(), params.b());
    (1.0 + (a - 1.0) / (b + 1.0)).min(a)
}

/// Result of [`perturbed_kl_bound`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PerturbedBound {
    pub log_bound: LogProb,
    pub status: BoundStatus,
}

/// The perturbed-KL bound `-(a + b - eta) kl((a - eta)/(a + b - eta), u)`
/// for `0 <= eta <= S(a, b, u)`.
///
/// With `tight` the offset `log P(X >= (a - eta)/(a + b - eta))` from the
/// underlying two-sided comparison is added, which sharpens the bound; it
/// defaults to off in reports so the rows stay Table-1 comparable.
///
/// When `u` does not exceed the perturbed mean the premise of the bound
/// fails and a vacuous zero is returned (flagged), keeping parameter sweeps
/// total.
pub fn perturbed_kl_bound(
    params: BetaParams,
    u: Probability,
    eta: f64,
    tight: bool,
) -> Result<PerturbedBound> {
    let (a, b) = (params.a(), params.b());
    if !(eta >= 0.0) {
        return Err(Error::domain(format!(
            "perturbation must be non-negative, got {eta}"
        )));
    }
    let s = s_value(params, u);
    if eta > s + ETA_BUDGET_SLACK * s.max(1.0) {
        return Err(Error::PerturbationTooLarge { eta, max: s });
    }
    // S <= a, so both stay non-negative (up to the slack just allowed).
    let eta = eta.min(a);
    let t = a + b - eta;
    let x = ((a - eta) / t).clamp(0.0, 1.0);
    let uu = u.value();
    if uu <= x {
        return Ok(PerturbedBound {
            log_bound: LogProb::ZERO,
            status: BoundStatus::Vacuous,
        });
    }
    let x = Probability::new(x).expect("perturbed mean is a probability");
    let mut value = -t * binary_kl(x, u);
    if tight {
        value += log_beta_tail_exact(params, x).value();
    }
    let status = if uu >= 1.0 {
        BoundStatus::ExactZero
    } else {
        BoundStatus::Ok
    };
    Ok(PerturbedBound {
        log_bound: LogProb::from_nonpos(value),
        status,
    })
}

/// Evaluate all four bounds at `(a, b, u)` with the perturbed row driven by
/// `policy`, attaching validity flags, `S`, its lower-bound chain, and the
/// exact log tail.
pub fn bound_report(
    params: BetaParams,
    u: Probability,
    policy: EtaPolicy,
    tight: bool,
) -> Result<BoundReport> {
    let (a, b) = (params.a(), params.b());
    let uu = u.value();
    let above_mean = uu >= params.mean();
    let table_status = if above_mean {
        BoundStatus::Ok
    } else {
        BoundStatus::BelowMean
    };

    let hoeffding = BoundEntry {
        log_bound: hoeffding_raw(params, uu),
        status: table_status,
    };
    let bernstein_value = bernstein_raw(params, uu);
    let bernstein = BoundEntry {
        log_bound: bernstein_value,
        status: if bernstein_value.is_nan() {
            BoundStatus::Undefined
        } else {
            table_status
        },
    };
    let kl = BoundEntry {
        log_bound: kl_raw(params, uu),
        status: table_status,
    };

    let s = s_value(params, u);
    let eta = match policy {
        EtaPolicy::None => 0.0,
        EtaPolicy::Fixed(e) => e,
        EtaPolicy::Classic => classic_eta(params),
        EtaPolicy::Maximal => s,
    };
    let perturbed = perturbed_kl_bound(params, u, eta, tight)?;
    let perturbed_kl = BoundEntry {
        log_bound: perturbed.log_bound.value(),
        status: perturbed.status,
    };

    let s_lbs = if a > 1.0 && uu > 0.0 && uu < 1.0 {
        Some(s_lower_bounds(params, u)?)
    } else {
        None
    };

    Ok(BoundReport {
        a,
        b,
        u: uu,
        eta,
        hoeffding,
        bernstein,
        kl,
        perturbed_kl,
        s_value: s,
        s_lower_bounds: s_lbs,
        exact_log_tail: log_beta_tail_exact(params, u).value(),
    })
}
