//! `C4`-factorizations for even `n` by pair contraction.
//!
//! Random pairings of the x-side and of the y-side contract `K_{n,n}` to
//! `K_{n/2,n/2}`; a contracted edge stands for the `C4` on its two pairs.
//! A 1-factorization of the contracted graph by cyclic shifts of a
//! permutation `pi` lifts to the `C4`-factors
//! `F_k = union_i C4(x-pair i, y-pair pi(i + k))`.

use rand::Rng;
use serde::Serialize;

use crate::census::is_switcher;
use crate::cyclic::{evaluate_candidate, BinaryMatrix};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::rng::{derive_seed, random_permutation, rng_from_seed};
use crate::signing::{PerfectMatching, SignMatrix};
use crate::two_factor::{Cycle, TwoFactor, TwoFactorization};

use super::switcher_components;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionScheme {
    pub x_pairs: Vec<(usize, usize)>,
    pub y_pairs: Vec<(usize, usize)>,
    /// `a[i][j] = 1` iff the `C4` on x-pair `i` and y-pair `j` is a switcher.
    pub a: BinaryMatrix,
}

fn pairs(p: &[usize]) -> Vec<(usize, usize)> {
    p.chunks(2).map(|c| (c[0].min(c[1]), c[0].max(c[1]))).collect()
}

impl ContractionScheme {
    /// Pairs `{p'(2i), p'(2i+1)}` on the x-side and `{p''(2i), p''(2i+1)}` on
    /// the y-side.
    pub fn from_permutations(m: &SignMatrix, px: &[usize], py: &[usize]) -> Result<Self> {
        let n = m.n();
        if n % 2 != 0 {
            return Err(Error::InvalidArgument(format!("contraction needs even n, got {n}")));
        }
        PerfectMatching::new(px.to_vec())?;
        PerfectMatching::new(py.to_vec())?;
        if px.len() != n || py.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: px.len().min(py.len()),
            });
        }
        let x_pairs = pairs(px);
        let y_pairs = pairs(py);
        let a = BinaryMatrix::from_fn(n / 2, |i, j| is_switcher(m, x_pairs[i], y_pairs[j]));
        Ok(ContractionScheme { x_pairs, y_pairs, a })
    }

    pub fn sample<R: Rng + ?Sized>(m: &SignMatrix, rng: &mut R) -> Result<Self> {
        let px = random_permutation(m.n(), rng);
        let py = random_permutation(m.n(), rng);
        Self::from_permutations(m, &px, &py)
    }

    /// Number of switchers with both parts contracted.
    pub fn switchers(&self) -> u64 {
        self.a.total()
    }

    /// The lifted `C4`-factorization for the contracted permutation `pi`.
    pub fn factorization(&self, pi: &PerfectMatching) -> Result<TwoFactorization> {
        let half = self.x_pairs.len();
        if pi.n() != half {
            return Err(Error::DimensionMismatch {
                expected: half,
                found: pi.n(),
            });
        }
        let factors = (0..half)
            .map(|k| {
                let cycles = (0..half)
                    .map(|i| {
                        let (x0, x1) = self.x_pairs[i];
                        let (y0, y1) = self.y_pairs[pi.get((i + k) % half)];
                        Cycle::new(vec![x0, x1], vec![y0, y1])
                    })
                    .collect::<Result<Vec<_>>>()?;
                TwoFactor::new(2 * half, cycles)
            })
            .collect::<Result<Vec<_>>>()?;
        TwoFactorization::new(2 * half, factors, None)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EvenOptions {
    /// Contraction schemes sampled; the one with most contracted switchers wins.
    pub scheme_tries: usize,
    /// Permutations of the contracted graph tried.
    pub perm_tries: usize,
    pub seed: u64,
}

impl Default for EvenOptions {
    fn default() -> Self {
        EvenOptions {
            scheme_tries: 32,
            perm_tries: 100,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct C4Report {
    pub contracted_switchers: u64,
    /// Switcher `C4` components per factor.
    pub per_factor: Vec<usize>,
    /// `eta n`.
    #[serde(with = "rational::as_f64")]
    pub threshold: Rational,
    pub satisfied: bool,
    pub perm_tries: usize,
}

#[derive(Clone, Debug)]
pub struct C4Outcome {
    pub factorization: TwoFactorization,
    pub scheme: ContractionScheme,
    pub pi: PerfectMatching,
    pub report: C4Report,
}

/// Builds a `C4`-factorization and retries the contracted permutation until
/// every factor holds at least `eta n` switcher components. When the tries
/// run out the permutation with the largest minimum is kept and
/// `report.satisfied` is `false`.
pub fn build_c4_factorization_even(m: &SignMatrix, eta: Rational, opts: &EvenOptions) -> Result<C4Outcome> {
    let n = m.n();
    if n % 2 != 0 {
        return Err(Error::InvalidArgument(format!("C4-factorization needs even n, got {n}")));
    }
    if opts.scheme_tries == 0 || opts.perm_tries == 0 {
        return Err(Error::InvalidArgument("tries must be at least 1".into()));
    }
    let mut rng = rng_from_seed(derive_seed(opts.seed, 1));
    let mut scheme = ContractionScheme::sample(m, &mut rng)?;
    for _ in 1..opts.scheme_tries {
        let s = ContractionScheme::sample(m, &mut rng)?;
        if s.switchers() > scheme.switchers() {
            scheme = s;
        }
    }
    let threshold = eta * Rational::from_integer(n as i128);
    let mut rng = rng_from_seed(derive_seed(opts.seed, 2));
    let mut best: Option<(u64, PerfectMatching)> = None;
    let mut tries = 0;
    for t in 1..=opts.perm_tries {
        tries = t;
        let pi = PerfectMatching::new(random_permutation(n / 2, &mut rng))?;
        let cand = evaluate_candidate(&scheme.a, &pi)?;
        let low = cand.h.iter().copied().min().unwrap_or(0);
        if best.as_ref().is_none_or(|(b, _)| low > *b) {
            best = Some((low, pi));
        }
        if Rational::from_integer(low as i128) >= threshold {
            break;
        }
    }
    let (_, pi) = best.expect("perm_tries >= 1");
    let factorization = scheme.factorization(&pi)?;
    let per_factor: Vec<usize> = factorization
        .factors()
        .iter()
        .map(|f| switcher_components(m, f).len())
        .collect();
    let satisfied = per_factor
        .iter()
        .all(|&c| Rational::from_integer(c as i128) >= threshold);
    Ok(C4Outcome {
        report: C4Report {
            contracted_switchers: scheme.switchers(),
            per_factor,
            threshold,
            satisfied,
            perm_tries: tries,
        },
        factorization,
        scheme,
        pi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn all_plus_n4() {
        let out = build_c4_factorization_even(&SignMatrix::all_plus(4), ratio(1, 10), &EvenOptions::default()).unwrap();
        assert_eq!(out.factorization.factors().len(), 2);
        for f in out.factorization.factors() {
            assert_eq!(f.c4_components().count(), 2);
        }
        assert_eq!(out.report.per_factor, vec![0, 0]);
        assert!(!out.report.satisfied);
    }

    #[test]
    fn per_factor_count_equals_h() {
        let mut rng = rng_from_seed(3);
        let m = SignMatrix::from_fn(12, |_, _| rng.gen());
        let out = build_c4_factorization_even(&m, ratio(1, 100), &EvenOptions::default()).unwrap();
        let h = evaluate_candidate(&out.scheme.a, &out.pi).unwrap().h;
        assert_eq!(out.report.per_factor, h.iter().map(|&v| v as usize).collect::<Vec<_>>());
        assert!(build_c4_factorization_even(&SignMatrix::all_plus(3), ratio(1, 2), &EvenOptions::default()).is_err());
    }
}
