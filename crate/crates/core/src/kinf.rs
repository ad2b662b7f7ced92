//! The information functional `K_inf` on finite discrete measures.
//!
//! For a probability vector `nu`, a value vector `f` and a threshold `u`,
//!
//! ```text
//! K_inf(nu, u, f) = inf { KL(nu || mu) : mu a probability measure, sum_i mu_i f_i >= u },
//! ```
//!
//! with the infimum of the empty set taken as `+inf`. The variational form
//!
//! ```text
//! K_inf(nu, u, f) = max over lambda in [0, 1/(f_max - u)] of
//!                   sum_i nu_i log(1 - lambda (f_i - u))
//! ```
//!
//! turns the simplex program into a one-dimensional concave maximization,
//! solved here by bisection on the (monotone decreasing) dual derivative.
//! A brute-force simplex-grid minimizer is provided as an independent test
//! oracle for small supports.
//!
//! Zero-weight support points are allowed: they contribute nothing to the
//! objective but do enter `f_max`, because the constraint set ranges over
//! all measures on the full support.

use serde::Serialize;

use crate::special::binary_kl;
use crate::{Error, Probability, Result};

const DUAL_MAX_ITER: usize = 200;
const DUAL_DERIV_TOL: f64 = 1e-12;

/// Non-negative weights over a finite indexed support, with the total mass
/// cached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    weights: Vec<f64>,
    total: f64,
}

impl DiscreteMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::domain("measure must have a non-empty support"));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::domain(format!(
                    "weight {w} at index {i} is not a finite non-negative real"
                )));
            }
        }
        let total = weights.iter().sum();
        Ok(DiscreteMeasure { weights, total })
    }

    /// The zero measure on `d` points.
    pub fn zeros(d: usize) -> Result<Self> {
        Self::new(vec![0.0; d])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.total
    }

    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// True when the total mass is 1 up to 1e-12.
    pub fn is_probability(&self) -> bool {
        (self.total - 1.0).abs() <= 1e-12
    }

    pub(crate) fn require_probability(&self) -> Result<()> {
        if !self.is_probability() {
            return Err(Error::domain(format!(
                "expected a probability measure, total mass is {}",
                self.total
            )));
        }
        Ok(())
    }
}

/// A function on the same finite support as a measure, with cached extremes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueVector {
    values: Vec<f64>,
    f_max: f64,
    f_min: f64,
}

impl ValueVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("value vector must be non-empty"));
        }
        if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("value {bad} is not finite")));
        }
        let f_max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let f_min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(ValueVector {
            values,
            f_max,
            f_min,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    #[inline]
    pub fn f_max(&self) -> f64 {
        self.f_max
    }

    #[inline]
    pub fn f_min(&self) -> f64 {
        self.f_min
    }
}

fn check_lengths(nu: &DiscreteMeasure, f: &ValueVector) -> Result<()> {
    if nu.len() != f.len() {
        return Err(Error::domain(format!(
            "measure has {} support points but the value vector has {}",
            nu.len(),
            f.len()
        )));
    }
    Ok(())
}

/// Outcome of the `K_inf` solve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KinfSolution {
    /// The value of `K_inf`; non-negative, possibly `+inf`.
    pub value: f64,
    /// The maximizing dual variable (0 when the constraint is slack).
    pub lambda: f64,
    /// Dual derivative at `lambda`, the optimality certificate: near zero
    /// at an interior maximizer, and of the pushing sign at a boundary.
    pub dual_derivative: f64,
    /// Set when `u = f_max` was resolved by the limit convention rather
    /// than the variational formula.
    pub fmax_convention: bool,
}

/// Mean of `f` under `nu`.
fn mean_value(nu: &DiscreteMeasure, f: &ValueVector) -> f64 {
    nu.weights()
        .iter()
        .zip(f.values())
        .map(|(&w, &v)| w * v)
        .sum()
}

fn dual_derivative(nu: &DiscreteMeasure, u: f64, f: &ValueVector, lambda: f64) -> f64 {
    let mut d = 0.0;
    for (&w, &v) in nu.weights().iter().zip(f.values()) {
        if w == 0.0 {
            continue;
        }
        let denom = 1.0 - lambda * (v - u);
        if denom <= 0.0 {
            return f64::NEG_INFINITY;
        }
        d += w * (u - v) / denom;
    }
    d
}

fn dual_objective_inner(nu: &DiscreteMeasure, u: f64, f: &ValueVector, lambda: f64) -> f64 {
    let mut obj = 0.0;
    for (&w, &v) in nu.weights().iter().zip(f.values()) {
        if w == 0.0 {
            continue;
        }
        let arg = -lambda * (v - u);
        if arg <= -1.0 {
            return f64::NEG_INFINITY;
        }
        obj += w * arg.ln_1p();
    }
    obj
}

/// `K_inf(nu, u, f)` via the variational formula, with a certified dual
/// maximizer.
///
/// Conventions at the edge of the formula's domain: when `u > f_max` the
/// constraint set is empty and the value is `+inf`; when `u = f_max` the
/// value is 0 if `nu` lives entirely on the maximizers of `f` (the
/// constraint set contains `nu`) and `+inf` otherwise, flagged as a
/// convention. For `u < f_min` the definition still applies and gives 0.
pub fn kinf(nu: &DiscreteMeasure, u: f64, f: &ValueVector) -> Result<KinfSolution> {
    check_lengths(nu, f)?;
    nu.require_probability()?;
    if !u.is_finite() {
        return Err(Error::domain(format!("threshold u = {u} must be finite")));
    }

    let f_max = f.f_max();
    if u > f_max {
        return Ok(KinfSolution {
            value: f64::INFINITY,
            lambda: 0.0,
            dual_derivative: 0.0,
            fmax_convention: false,
        });
    }
    if u == f_max {
        let off_argmax_mass: f64 = nu
            .weights()
            .iter()
            .zip(f.values())
            .filter(|&(_, &v)| v < f_max)
            .map(|(&w, _)| w)
            .sum();
        let value = if off_argmax_mass > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        return Ok(KinfSolution {
            value,
            lambda: 0.0,
            dual_derivative: 0.0,
            fmax_convention: true,
        });
    }

    // Constraint already satisfied by nu itself: lambda* = 0.
    let slack = u - mean_value(nu, f);
    if slack <= 0.0 {
        return Ok(KinfSolution {
            value: 0.0,
            lambda: 0.0,
            dual_derivative: slack,
            fmax_convention: false,
        });
    }

    let lambda_max = 1.0 / (f_max - u);
    let mass_at_max: f64 = nu
        .weights()
        .iter()
        .zip(f.values())
        .filter(|&(_, &v)| v == f_max)
        .map(|(&w, _)| w)
        .sum();

    if mass_at_max == 0.0 {
        // The objective stays finite at the right endpoint; the derivative
        // sign there decides between a boundary and an interior maximum.
        let d_end = dual_derivative(nu, u, f, lambda_max);
        if d_end >= 0.0 {
            return Ok(KinfSolution {
                value: dual_objective_inner(nu, u, f, lambda_max).max(0.0),
                lambda: lambda_max,
                dual_derivative: d_end,
                fmax_convention: false,
            });
        }
    }

    // Interior root of the decreasing derivative: phi'(0) = slack > 0 and
    // phi' is negative near lambda_max (it diverges there when the argmax
    // carries mass). Keep lo on the phi' >= 0 side so the reported value
    // under-approximates the max, which is the safe direction for bounds.
    let (mut lo, mut hi) = (0.0_f64, lambda_max);
    let mut lambda = lo;
    let mut deriv = slack;
    for _ in 0..DUAL_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let d = dual_derivative(nu, u, f, mid);
        if d >= 0.0 {
            lo = mid;
            lambda = mid;
            deriv = d;
        } else {
            hi = mid;
        }
        if d.abs() <= DUAL_DERIV_TOL {
            lambda = mid;
            deriv = d;
            break;
        }
    }

    Ok(KinfSolution {
        value: dual_objective_inner(nu, u, f, lambda).max(0.0),
        lambda,
        dual_derivative: deriv,
        fmax_convention: false,
    })
}

/// The dual objective `sum_i nu_i log(1 - lambda (f_i - u))` at a given
/// `lambda` in the admissible bracket `[0, 1/(f_max - u)]`.
///
/// Returns `-inf` when a positively-weighted term hits a non-positive
/// argument (only possible at the right endpoint).
pub fn kinf_dual_objective(
    nu: &DiscreteMeasure,
    u: f64,
    f: &ValueVector,
    lambda: f64,
) -> Result<f64> {
    check_lengths(nu, f)?;
    nu.require_probability()?;
    if u >= f.f_max() {
        return Err(Error::domain(format!(
            "dual bracket requires u < f_max, got u = {u}, f_max = {}",
            f.f_max()
        )));
    }
    let lambda_max = 1.0 / (f.f_max() - u);
    if !(0.0..=lambda_max).contains(&lambda) {
        return Err(Error::domain(format!(
            "lambda = {lambda} outside the dual bracket [0, {lambda_max}]"
        )));
    }
    Ok(dual_objective_inner(nu, u, f, lambda))
}

/// Thresholds for reducing a two-point `K_inf` to a binary KL.
///
/// `exact` is `(u - w)^+ / (v - u + (u - w)^+)`: the Beta threshold at which
/// `K_inf((p, 1-p), u, (v, w)) = kl(p, exact)`. `budget` is the same
/// transform evaluated at the floors `(v', w')`; it dominates `exact`, so
/// with `S` non-increasing it yields a conservative perturbation budget when
/// only lower bounds on the cell values are known.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BinaryThreshold {
    pub exact: Probability,
    pub budget: Probability,
}

/// Transformed thresholds for the two-point reduction. Requires
/// `v >= v_floor > u` and `w >= w_floor >= 0`.
pub fn binary_kinf_threshold(
    u: f64,
    v: f64,
    w: f64,
    v_floor: f64,
    w_floor: f64,
) -> Result<BinaryThreshold> {
    if !(v > u) {
        return Err(Error::domain(format!(
            "binary threshold requires v > u, got v = {v}, u = {u}"
        )));
    }
    if !(v_floor > u) || v_floor > v {
        return Err(Error::domain(format!(
            "v_floor must satisfy v >= v_floor > u, got v_floor = {v_floor}"
        )));
    }
    if !(w_floor >= 0.0) || w_floor > w {
        return Err(Error::domain(format!(
            "w_floor must satisfy w >= w_floor >= 0, got w_floor = {w_floor}"
        )));
    }
    let transform = |vv: f64, ww: f64| -> Probability {
        let num = (u - ww).max(0.0);
        Probability::new(num / (vv - u + num)).expect("threshold lies in [0, 1)")
    };
    Ok(BinaryThreshold {
        exact: transform(v, w),
        budget: transform(v_floor, w_floor),
    })
}

/// Closed form for the two-point `K_inf`: `kl(nu_1, t)` at the transformed
/// threshold, for `f_1 > u > f_2`.
pub fn binary_kinf(nu1: Probability, u: f64, v: f64, w: f64) -> Result<f64> {
    if !(v > u && u > w) {
        return Err(Error::domain(format!(
            "binary closed form requires v > u > w, got v = {v}, u = {u}, w = {w}"
        )));
    }
    let t = binary_kinf_threshold(u, v, w, v, w)?.exact;
    Ok(binary_kl(nu1, t))
}

/// Maximum support size accepted by the brute-force oracle.
pub const BRUTE_FORCE_MAX_SUPPORT: usize = 4;

/// Brute-force `K_inf` oracle: minimizes `KL(nu || mu)` over the simplex
/// grid `{k / resolution}` restricted to `sum_i mu_i f_i >= u`.
///
/// Enumerating a grid subset of the feasible set makes this an upper bound
/// on the true `K_inf` that converges as the resolution grows; `nu` itself
/// is also tested so feasible instances return exactly zero. Intended as an
/// independent test oracle, it refuses supports larger than
/// [`BRUTE_FORCE_MAX_SUPPORT`].
pub fn kinf_brute_force(
    nu: &DiscreteMeasure,
    u: f64,
    f: &ValueVector,
    resolution: usize,
) -> Result<f64> {
    check_lengths(nu, f)?;
    nu.require_probability()?;
    if nu.len() > BRUTE_FORCE_MAX_SUPPORT {
        return Err(Error::SupportTooLarge {
            size: nu.len(),
            max: BRUTE_FORCE_MAX_SUPPORT,
        });
    }
    if resolution == 0 {
        return Err(Error::domain("grid resolution must be positive"));
    }
    if u > f.f_max() {
        return Ok(f64::INFINITY);
    }
    if mean_value(nu, f) >= u {
        return Ok(0.0);
    }

    let d = nu.len();
    let n = resolution;
    let mut best = f64::INFINITY;
    let mut counts = vec![0usize; d];

    // Enumerate all compositions of n into d parts.
    fn recurse(
        idx: usize,
        remaining: usize,
        counts: &mut [usize],
        n: usize,
        nu: &DiscreteMeasure,
        u: f64,
        f: &ValueVector,
        best: &mut f64,
    ) {
        if idx == counts.len() - 1 {
            counts[idx] = remaining;
            let inv_n = 1.0 / n as f64;
            let mut mean = 0.0;
            for (i, &k) in counts.iter().enumerate() {
                mean += k as f64 * inv_n * f.get(i);
            }
            if mean < u {
                return;
            }
            let mut kl = 0.0;
            for (i, &k) in counts.iter().enumerate() {
                let w = nu.get(i);
                if w == 0.0 {
                    continue;
                }
                let mu = k as f64 * inv_n;
                if mu == 0.0 {
                    return; // KL infinite, cannot beat the incumbent
                }
                kl += w * (w / mu).ln();
            }
            if kl < *best {
                *best = kl;
            }
            return;
        }
        for k in 0..=remaining {
            counts[idx] = k;
            recurse(idx + 1, remaining - k, counts, n, nu, u, f, best);
        }
    }

    recurse(0, n, &mut counts, n, nu, u, f, &mut best);
    Ok(best)
}
