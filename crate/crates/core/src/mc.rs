//! Monte Carlo oracles for the tail bounds.
//!
//! Dirichlet vectors are sampled through the Gamma representation
//! `X = G / G(total)`: each coordinate is an independent `Gamma(alpha_i, 1)`
//! draw normalized by the sum. Tail probabilities are estimated with exact
//! binomial (Clopper-Pearson) confidence intervals, and every bound can be
//! checked against the interval with a PASS / INCONCLUSIVE / FAIL verdict.
//!
//! Randomness is fully described by a [`RngStream`]: identical
//! `(seed, stream)` pairs reproduce estimates bit-exactly. Parallel callers
//! should assign distinct stream ids rather than share one generator.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;

use crate::dirichlet::BaseMeasure;
use crate::kinf::{kinf, DiscreteMeasure, ValueVector};
use crate::special::beta_inv_cdf;
use crate::{BetaParams, Error, LogProb, Probability, Result};

/// Tolerance in the PASS / FAIL comparisons of verdicts.
const VERDICT_TOL: f64 = 1e-9;

/// A reproducible randomness source: seed plus stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngStream { seed, stream }
    }

    /// Instantiate the generator for this stream.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// A Monte Carlo tail estimate with its exact binomial confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEstimate {
    pub p_hat: Probability,
    pub successes: u64,
    pub n_samples: u64,
    pub ci_low: Probability,
    pub ci_high: Probability,
    /// Two-sided confidence level of the interval.
    pub level: f64,
    pub seed: u64,
    pub stream: u64,
}

/// Verdict of a bound check against a Monte Carlo interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// The whole confidence interval sits below the bound.
    Pass,
    /// The interval straddles the bound.
    Inconclusive,
    /// Even the lower confidence limit exceeds the bound.
    Fail,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Pass => write!(f, "PASS"),
            Verdict::Inconclusive => write!(f, "INCONCLUSIVE"),
            Verdict::Fail => write!(f, "FAIL"),
        }
    }
}

fn check_positive_weights(alpha_weights: &DiscreteMeasure) -> Result<()> {
    for (i, &w) in alpha_weights.weights().iter().enumerate() {
        if w <= 0.0 {
            return Err(Error::domain(format!(
                "Dirichlet weight at index {i} must be positive, got {w}"
            )));
        }
    }
    Ok(())
}

/// Run `body` on `n` Dirichlet samples drawn from `rng`, one `d`-vector at a
/// time. All estimators below consume samples through this single path so
/// that fixed streams produce identical sample sequences everywhere.
fn for_each_sample<R: Rng, F: FnMut(&[f64])>(
    alpha_weights: &DiscreteMeasure,
    rng: &mut R,
    n: u64,
    mut body: F,
) -> Result<()> {
    check_positive_weights(alpha_weights)?;
    let gammas: Vec<Gamma<f64>> = alpha_weights
        .weights()
        .iter()
        .map(|&w| Gamma::new(w, 1.0).map_err(|e| Error::domain(format!("gamma sampler: {e}"))))
        .collect::<Result<_>>()?;
    let mut x = vec![0.0_f64; alpha_weights.len()];
    for _ in 0..n {
        let mut total = 0.0;
        for (xi, g) in x.iter_mut().zip(&gammas) {
            *xi = g.sample(rng);
            total += *xi;
        }
        for xi in x.iter_mut() {
            *xi /= total;
        }
        body(&x);
    }
    Ok(())
}

/// Draw `n` Dirichlet vectors with the given positive weights.
pub fn sample_dirichlet<R: Rng>(
    alpha_weights: &DiscreteMeasure,
    rng: &mut R,
    n: u64,
) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(n as usize);
    for_each_sample(alpha_weights, rng, n, |x| out.push(x.to_vec()))?;
    Ok(out)
}

/// Exact binomial (Clopper-Pearson) two-sided interval for `k` successes in
/// `n` trials.
pub fn clopper_pearson(k: u64, n: u64, level: f64) -> Result<(Probability, Probability)> {
    if n == 0 {
        return Err(Error::domain("interval requires at least one trial"));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(Error::domain(format!(
            "confidence level must be in (0, 1), got {level}"
        )));
    }
    if k > n {
        return Err(Error::domain(format!("successes {k} exceed trials {n}")));
    }
    let half_alpha = 0.5 * (1.0 - level);
    let lo = if k == 0 {
        Probability::ZERO
    } else {
        beta_inv_cdf(
            Probability::new(half_alpha)?,
            BetaParams::new(k as f64, (n - k + 1) as f64)?,
        )
    };
    let hi = if k == n {
        Probability::ONE
    } else {
        beta_inv_cdf(
            Probability::new(1.0 - half_alpha)?,
            BetaParams::new((k + 1) as f64, (n - k) as f64)?,
        )
    };
    Ok((lo, hi))
}

/// Estimate `P(sum_i X_i f_i >= u)` for `X ~ Dir(alpha_weights)` from `n`
/// samples of the given stream.
pub fn estimate_weighted_tail(
    alpha_weights: &DiscreteMeasure,
    f: &ValueVector,
    u: f64,
    n: u64,
    stream: RngStream,
    level: f64,
) -> Result<TailEstimate> {
    if n == 0 {
        return Err(Error::domain("tail estimation requires n >= 1"));
    }
    if alpha_weights.len() != f.len() {
        return Err(Error::domain(format!(
            "weights have {} points but f has {}",
            alpha_weights.len(),
            f.len()
        )));
    }
    let mut rng = stream.rng();
    let mut successes = 0u64;
    for_each_sample(alpha_weights, &mut rng, n, |x| {
        let dot: f64 = x.iter().zip(f.values()).map(|(&xi, &fi)| xi * fi).sum();
        if dot >= u {
            successes += 1;
        }
    })?;
    let (ci_low, ci_high) = clopper_pearson(successes, n, level)?;
    Ok(TailEstimate {
        p_hat: Probability::new(successes as f64 / n as f64)?,
        successes,
        n_samples: n,
        ci_low,
        ci_high,
        level,
        seed: stream.seed,
        stream: stream.stream,
    })
}

/// Compare a log-scale bound with a Monte Carlo interval.
pub fn verify_bound(estimate: &TailEstimate, bound: LogProb) -> Verdict {
    let b = bound.value();
    if estimate.ci_high.value().ln() <= b + VERDICT_TOL {
        Verdict::Pass
    } else if estimate.ci_low.value().ln() > b {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    }
}

/// Result of a partition inequality check.
#[derive(Debug, Clone, Serialize)]
pub struct PartitionCheck {
    /// Monte Carlo mean of `exp(-alpha K_inf over cells)`.
    pub lhs_mean: f64,
    pub lhs_ci_low: f64,
    pub lhs_ci_high: f64,
    /// `exp(-alpha K_inf(nu0, u, f))`.
    pub rhs: f64,
    /// `rhs - lhs_mean`; non-negative up to Monte Carlo error, and zero for
    /// the singleton partition.
    pub gap: f64,
    pub verdict: Verdict,
    pub n_samples: u64,
    pub level: f64,
    pub seed: u64,
    pub stream: u64,
}

/// Check the partition inequality: the expectation over `X ~ Dir(alpha nu0)`
/// of `exp(-alpha K_inf over the cell-aggregated instance)` never exceeds
/// `exp(-alpha K_inf(nu0, u, f))`.
///
/// Cells aggregate to weight `nu0(A)` and value `integral of f dX over A
/// divided by X(A)`; a numerically massless cell takes the value `f_max`
/// (the convention for empty averages; with positive weights this is a
/// probability-zero event). The trivial one-cell partition makes the left
/// side the plain tail probability, and singleton cells reproduce the right
/// side exactly.
///
/// The interval on the mean of these `[0, 1]` values is a two-sided
/// Hoeffding box, conservative at any level.
pub fn partition_check(
    base: &BaseMeasure,
    u: f64,
    partition: &[Vec<usize>],
    n: u64,
    stream: RngStream,
    level: f64,
) -> Result<PartitionCheck> {
    if n == 0 {
        return Err(Error::domain("partition check requires n >= 1"));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(Error::domain(format!(
            "confidence level must be in (0, 1), got {level}"
        )));
    }
    let d = base.len();
    // The cells must partition 0..d.
    let mut seen = vec![false; d];
    for cell in partition {
        if cell.is_empty() {
            return Err(Error::domain("partition cells must be non-empty"));
        }
        for &i in cell {
            if i >= d {
                return Err(Error::domain(format!(
                    "partition index {i} out of range for d = {d}"
                )));
            }
            if seen[i] {
                return Err(Error::domain(format!(
                    "partition index {i} appears in two cells"
                )));
            }
            seen[i] = true;
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::domain("partition does not cover every index"));
    }

    let alpha = base.alpha();
    let f = base.f();
    let cell_weights: Vec<f64> = partition
        .iter()
        .map(|cell| cell.iter().map(|&i| base.nu0().get(i)).sum())
        .collect();
    let cell_nu = DiscreteMeasure::new(cell_weights)?;

    let rhs_exponent = kinf(base.nu0(), u, f)?.value;
    let rhs = (-alpha * rhs_exponent).exp();

    let mut sum = 0.0_f64;
    let mut cell_values = vec![0.0_f64; partition.len()];
    let mut rng = stream.rng();
    for_each_sample(&base.alpha_weights(), &mut rng, n, |x| {
        for (slot, cell) in cell_values.iter_mut().zip(partition) {
            let mass: f64 = cell.iter().map(|&i| x[i]).sum();
            if mass == 0.0 {
                *slot = f.f_max();
            } else {
                let integral: f64 = cell.iter().map(|&i| x[i] * f.get(i)).sum();
                *slot = integral / mass;
            }
        }
        let cell_f = ValueVector::new(cell_values.clone()).expect("cell averages are finite");
        let exponent = kinf(&cell_nu, u, &cell_f).expect("cell instance is well formed");
        sum += (-alpha * exponent.value).exp();
    })?;

    let lhs_mean = sum / n as f64;
    let delta = 1.0 - level;
    let half_width = ((2.0 / delta).ln() / (2.0 * n as f64)).sqrt();
    let lhs_ci_low = (lhs_mean - half_width).max(0.0);
    let lhs_ci_high = (lhs_mean + half_width).min(1.0);

    let verdict = if lhs_ci_high <= rhs + VERDICT_TOL {
        Verdict::Pass
    } else if lhs_ci_low > rhs + VERDICT_TOL {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };

    Ok(PartitionCheck {
        lhs_mean,
        lhs_ci_low,
        lhs_ci_high,
        rhs,
        gap: rhs - lhs_mean,
        verdict,
        n_samples: n,
        level,
        seed: stream.seed,
        stream: stream.stream,
    })
}

/// Convenience: Monte Carlo estimate of a Beta upper tail via the two-point
/// Dirichlet representation `Beta(a, b) = Dir(a, b) first coordinate`.
pub fn estimate_beta_tail(
    params: BetaParams,
    u: Probability,
    n: u64,
    stream: RngStream,
    level: f64,
) -> Result<TailEstimate> {
    let weights = DiscreteMeasure::new(vec![params.a(), params.b()])?;
    let f = ValueVector::new(vec![1.0, 0.0])?;
    estimate_weighted_tail(&weights, &f, u.value(), n, stream, level)
}
