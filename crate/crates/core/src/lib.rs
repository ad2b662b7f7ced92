//! Upper-tail probabilities of Beta distributions and Dirichlet-weighted sums.
//!
//! This crate computes the exact upper tail `P(X >= u)` of a `Beta(a, b)`
//! random variable together with the classical exponential upper bounds on
//! its logarithm (Hoeffding, Bernstein, KL) and the perturbed-KL bound
//!
//! ```text
//! log P(X >= u) <= -(a + b - eta) * kl((a - eta) / (a + b - eta), u)
//! ```
//!
//! where the perturbation `eta` may be pushed all the way up to the maximal
//! admissible value `S(a, b, u)`, expressed through the principal branch of
//! the Lambert W function ([`beta::s_value`]). Larger perturbations give
//! strictly tighter bounds, so `S` is the quantity of interest.
//!
//! The same mechanism extends to Dirichlet-weighted sums: for
//! `X ~ Dir(alpha * nu0)` and a value vector `f`, the tail
//! `P(sum_i X_i f_i >= u)` is bounded through the information functional
//! `K_inf` ([`kinf::kinf`]) after perturbing the base measure by a measure
//! `eta` of mass `m` placed greedily on the lowest values of `f` within an
//! allowed region `eta0` ([`dirichlet`]).
//!
//! Every bound produced here can be checked against an exact evaluation or a
//! seeded Monte Carlo estimate with exact binomial confidence intervals
//! ([`mc`]).
//!
//! Lower tails are intentionally not exposed as operations: they follow from
//! the reflection `P(X <= u) = Q(b, a, 1 - u)` with `Q` the upper tail, so
//! callers can swap `(a, b)` and `u <-> 1 - u`.

#![forbid(unsafe_code)]

mod error;
mod types;

pub mod beta;
pub mod dirichlet;
pub mod kinf;
pub mod mc;
pub mod special;

pub use error::{Error, Result};
pub use types::{BetaParams, LogProb, Probability};
