//! Independent numerical oracles for the closed-form implementations.
//!
//! Each oracle takes a route disjoint from the code it checks: the exact
//! Beta tail is integrated by adaptive quadrature of the density, Lambert W
//! and the maximal perturbation are re-derived by sign bisection on their
//! defining equations, and the K_inf dual solver is compared against plain
//! simplex-grid enumeration of the primal.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use tailbound::beta::{perturbation_residual, s_lower_bounds, s_value};
use tailbound::kinf::{binary_kinf, kinf, kinf_brute_force, DiscreteMeasure, ValueVector};
use tailbound::special::{beta_tail_exact, lambert_w0, log_gamma};
use tailbound::{BetaParams, Probability};

fn p(v: f64) -> Probability {
    Probability::new(v).unwrap()
}

fn params(a: f64, b: f64) -> BetaParams {
    BetaParams::new(a, b).unwrap()
}

// ---------------------------------------------------------------------------
// Adaptive Simpson quadrature of the Beta density.

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(f, a, m, fa, flm, fm);
    let right = simpson(f, m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Quadrature oracle for `P(X >= u)`: integrate the Beta density on `[u, 1]`.
/// Valid for `a, b >= 1` (no endpoint singularities).
fn beta_tail_quadrature(a: f64, b: f64, u: f64) -> f64 {
    let log_norm = log_gamma(a + b).unwrap() - log_gamma(a).unwrap() - log_gamma(b).unwrap();
    let density = move |x: f64| {
        let mut logd = log_norm;
        if a != 1.0 {
            logd += (a - 1.0) * x.ln();
        }
        if b != 1.0 {
            logd += (b - 1.0) * (-x).ln_1p();
        }
        logd.exp()
    };
    let fa = density(u);
    let fb = if b > 1.0 { 0.0 } else { density(1.0) };
    let fm = density(0.5 * (u + 1.0));
    let whole = simpson(&density, u, 1.0, fa, fm, fb);
    let tol = 1e-13 * whole.abs().max(1e-300);
    adaptive_simpson(&density, u, 1.0, fa, fm, fb, whole, tol, 48)
}

#[test]
fn quadrature_confirms_exact_tail() {
    // The spec-level reference case plus a sweep of smooth parameters.
    let q = beta_tail_quadrature(3.5, 2.1, 0.8);
    let t = beta_tail_exact(params(3.5, 2.1), p(0.8)).value();
    assert!(
        ((q - t) / q).abs() <= 1e-11,
        "quadrature {q} vs continued fraction {t}"
    );

    for &(a, b) in &[(1.0, 1.0), (2.0, 5.0), (7.3, 1.4), (10.0, 10.0), (1.5, 9.0)] {
        for &u in &[0.05, 0.3, 0.55, 0.8, 0.95] {
            let q = beta_tail_quadrature(a, b, u);
            let t = beta_tail_exact(params(a, b), p(u)).value();
            let rel = ((q - t) / q.max(1e-300)).abs();
            assert!(rel <= 1e-10, "({a}, {b}, {u}): quadrature {q} vs {t}");
        }
    }
}

#[test]
fn quadrature_confirms_perturbed_bound_validity_case() {
    // (a, b, u) = (2, 1, 0.9) with the maximal perturbation: the bound must
    // dominate the independently integrated tail.
    let pr = params(2.0, 1.0);
    let u = p(0.9);
    let s = s_value(pr, u);
    let bound = tailbound::beta::perturbed_kl_bound(pr, u, s, false)
        .unwrap()
        .log_bound
        .value();
    let tail = beta_tail_quadrature(2.0, 1.0, 0.9);
    assert!(bound >= tail.ln());
}

// ---------------------------------------------------------------------------
// Bisection oracles.

/// Solve `w exp(w) = x` by plain sign bisection.
fn lambert_bisect(x: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, x.max(1.0));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mid * mid.exp() > x {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn lambert_matches_bisection() {
    let known = lambert_bisect(2.0);
    assert!((known - 0.8526055020137254).abs() <= 1e-13);
    let mut x = 1e-6;
    while x <= 1e6 {
        let halley = lambert_w0(x).unwrap();
        let bisect = lambert_bisect(x);
        assert!(
            (halley - bisect).abs() <= 1e-11 * bisect.max(1.0),
            "x = {x}: {halley} vs {bisect}"
        );
        x *= 7.3;
    }
}

/// Root of the perturbation residual on `[0, a]` by sign bisection.
fn s_bisect(pr: BetaParams, u: Probability) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, pr.a());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if perturbation_residual(pr, mid, u).unwrap() <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn s_value_matches_residual_bisection() {
    // The documented reference point first.
    let direct = s_bisect(params(2.0, 1.0), p(0.5));
    assert!((direct - 1.6411857445049860).abs() <= 1e-12);

    for &a in &[1.2, 1.8, 2.0, 3.5, 6.0, 12.0] {
        for &b in &[0.4, 1.0, 2.5, 8.0] {
            for &u in &[0.02, 0.2, 0.5, 0.8, 0.97] {
                let pr = params(a, b);
                let closed = s_value(pr, p(u));
                let bisect = s_bisect(pr, p(u));
                assert!(
                    (closed - bisect).abs() <= 1e-9,
                    "(a={a}, b={b}, u={u}): lambert {closed} vs bisection {bisect}"
                );
            }
        }
    }
}

#[test]
fn s_lower_bounds_stay_below_bisected_root() {
    for &a in &[1.5, 2.0, 4.0, 9.0] {
        for &b in &[0.5, 1.0, 3.0] {
            for &u in &[0.1, 0.4, 0.7, 0.95] {
                let pr = params(a, b);
                let s = s_bisect(pr, p(u));
                let [lb1, lb2, lb3] = s_lower_bounds(pr, p(u)).unwrap();
                assert!(s >= lb1 - 1e-9);
                assert!(lb1 >= lb2 - 1e-12);
                assert!(lb2 >= lb3 - 1e-12);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Brute-force K_inf.

#[test]
fn dual_solver_agrees_with_simplex_enumeration() {
    let mut rng = ChaCha12Rng::seed_from_u64(20240817);
    for case in 0..12 {
        let d = 2 + (case % 3);
        let resolution = match d {
            2 => 2000,
            3 => 400,
            _ => 140,
        };
        let mut weights: Vec<f64> = (0..d).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let mut f: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
        // Keep a decent spread so the instance is well conditioned.
        f[0] = rng.random_range(0.8..1.0);
        f[d - 1] = rng.random_range(0.0..0.2);

        let nu = DiscreteMeasure::new(weights).unwrap();
        let fv = ValueVector::new(f).unwrap();
        let mean: f64 = nu
            .weights()
            .iter()
            .zip(fv.values())
            .map(|(&w, &v)| w * v)
            .sum();
        let theta = rng.random_range(0.2..0.7);
        let u = mean + theta * (fv.f_max() - mean);

        let dual = kinf(&nu, u, &fv).unwrap();
        let grid = kinf_brute_force(&nu, u, &fv, resolution).unwrap();
        let tol = (2.0 / resolution as f64).max(1e-3);
        assert!(
            (dual.value - grid).abs() <= tol,
            "d={d}: dual {} vs grid {grid} (tol {tol})",
            dual.value
        );
        // The grid restricts the feasible set, so it can only overshoot.
        assert!(grid >= dual.value - 1e-9);
        assert!(dual.dual_derivative >= -1e-8);
    }
}

#[test]
fn brute_force_reference_three_points() {
    // Uniform nu on (0, 0.5, 1) at u = 0.8; dual reference 0.32260755...
    let nu = DiscreteMeasure::new(vec![1.0 / 3.0; 3]).unwrap();
    let f = ValueVector::new(vec![0.0, 0.5, 1.0]).unwrap();
    let grid = kinf_brute_force(&nu, 0.8, &f, 400).unwrap();
    assert!(
        (grid - 0.3226075528115593).abs() <= 1e-4,
        "grid value {grid}"
    );
}

#[test]
fn binary_closed_form_matches_enumeration() {
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    for _ in 0..10 {
        let p1 = rng.random_range(0.15..0.85);
        let v = rng.random_range(0.7..1.0);
        let w = rng.random_range(0.0..0.3);
        let mean = p1 * v + (1.0 - p1) * w;
        let u = mean + rng.random_range(0.2..0.8) * (v - mean);
        let nu = DiscreteMeasure::new(vec![p1, 1.0 - p1]).unwrap();
        let f = ValueVector::new(vec![v, w]).unwrap();
        let grid = kinf_brute_force(&nu, u, &f, 2000).unwrap();
        let closed = binary_kinf(p(p1), u, v, w).unwrap();
        assert!(
            (grid - closed).abs() <= 2e-3,
            "closed {closed} vs grid {grid}"
        );
    }
}
