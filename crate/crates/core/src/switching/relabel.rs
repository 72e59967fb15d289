//! Random relabeling of a crown decomposition until every factor is rich in
//! switcher components.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::rng::{random_permutation, rng_from_seed};
use crate::signing::SignMatrix;
use crate::two_factor::TwoFactorization;

use super::switcher_components;

#[derive(Clone, Debug, Serialize)]
pub struct RelabelReport {
    pub per_factor: Vec<usize>,
    /// `eta n / 2`.
    #[serde(with = "rational::as_f64")]
    pub threshold: Rational,
    pub satisfied: bool,
    pub tries: usize,
    /// The accepted x-side permutation `x_a -> x_{pi(a)}`.
    pub permutation: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct RelabelOutcome {
    pub factorization: TwoFactorization,
    pub report: RelabelReport,
}

/// Relabels by `x_a -> x_{pi(a)}` and `y_b -> y_{L(pi(L^-1(b)))}`, where `L`
/// is the leave, so the leave maps to itself. The first try is the identity.
/// When no try puts `eta n / 2` switcher components in every factor, the try
/// with the largest minimum is returned with `satisfied = false`.
pub fn relabel_switcher_rich(
    m: &SignMatrix,
    tf: &TwoFactorization,
    eta: Rational,
    tries: usize,
    seed: u64,
) -> Result<RelabelOutcome> {
    let n = tf.n();
    if m.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.n() });
    }
    if tries == 0 {
        return Err(Error::InvalidArgument("tries must be at least 1".into()));
    }
    let leave = tf
        .leave()
        .ok_or_else(|| Error::InvalidArgument("relabeling needs a leave matching".into()))?;
    let leave_inv = leave.inverse();
    let threshold = eta * Rational::from_integer(n as i128) / 2;
    let mut rng = rng_from_seed(seed);
    let mut best: Option<(usize, TwoFactorization, Vec<usize>, Vec<usize>)> = None;
    let mut used = 0;
    for t in 0..tries {
        used = t + 1;
        let pi: Vec<usize> = if t == 0 { (0..n).collect() } else { random_permutation(n, &mut rng) };
        let ymap: Vec<usize> = (0..n).map(|b| leave.get(pi[leave_inv.get(b)])).collect();
        let cand = tf.relabeled(&pi, &ymap);
        let counts: Vec<usize> = cand.factors().iter().map(|f| switcher_components(m, f).len()).collect();
        let low = counts.iter().copied().min().unwrap_or(usize::MAX);
        if best.as_ref().is_none_or(|b| low > b.0) {
            best = Some((low, cand, counts, pi));
        }
        if Rational::from_integer(low.min(n * n) as i128) >= threshold {
            break;
        }
    }
    let (low, factorization, per_factor, permutation) = best.expect("tries >= 1");
    Ok(RelabelOutcome {
        factorization,
        report: RelabelReport {
            satisfied: Rational::from_integer(low.min(n * n) as i128) >= threshold,
            per_factor,
            threshold,
            tries: used,
            permutation,
        },
    })
}
