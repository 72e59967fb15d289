//! Cyclic factorizer for signings with large overall discrepancy.
//!
//! A base permutation `pi` yields the matchings `M_t = {x_i y_pi(i+t)}`,
//! which always form a 1-factorization. With `a` the indicator of `+1`
//! entries, `h_t = sum_i a[i][pi(i+t)]` counts the positive edges of `M_t`,
//! so `S(M_t) = 2 h_t - n`. A permutation whose `h_t` all sit close to
//! their mean `sum(a)/n` gives matchings whose discrepancies all sit close
//! to `disc(G)`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, ratio, Rational};
use crate::rng::{random_permutation, rng_from_seed};
use crate::signing::{disc_graph, disc_matching, signed_sum, OneFactorization, PerfectMatching, SignMatrix};

/// Square 0/1 matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMatrix {
    n: usize,
    bits: Vec<u8>,
}

impl BinaryMatrix {
    pub fn new(n: usize, bits: Vec<u8>) -> Result<Self> {
        if bits.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: bits.len(),
            });
        }
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidArgument(format!(
                "entry ({}, {}) is {}, expected 0 or 1",
                pos / n,
                pos % n,
                bits[pos]
            )));
        }
        Ok(BinaryMatrix { n, bits })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                bits.push(f(i, j) as u8);
            }
        }
        BinaryMatrix { n, bits }
    }

    /// Indicator of the `+1` entries.
    pub fn positives(m: &SignMatrix) -> Self {
        BinaryMatrix::from_fn(m.n(), |i, j| m.get(i, j) > 0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.bits[i * self.n + j]
    }

    pub fn total(&self) -> u64 {
        self.bits.iter().map(|&b| b as u64).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclicCandidate {
    pub pi: PerfectMatching,
    pub h: Vec<u64>,
    /// `sum(a) / n`, the common expectation of every `h_t`.
    #[serde(with = "rational::as_f64")]
    pub expectation: Rational,
    /// `sum(a) / n^2`.
    #[serde(with = "rational::as_f64")]
    pub p: Rational,
    /// `max_t |h_t - expectation|`.
    #[serde(with = "rational::as_f64")]
    pub max_dev: Rational,
}

pub fn evaluate_candidate(a: &BinaryMatrix, pi: &PerfectMatching) -> Result<CyclicCandidate> {
    let n = a.n();
    if pi.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: pi.n(),
        });
    }
    let map = pi.map();
    let h: Vec<u64> = (0..n)
        .into_par_iter()
        .map(|t| (0..n).map(|i| a.get(i, map[(i + t) % n]) as u64).sum())
        .collect();
    let total = a.total() as i128;
    let nn = n.max(1) as i128;
    let expectation = ratio(total, nn);
    let max_dev = h
        .iter()
        .map(|&ht| rational::abs(&(Rational::from_integer(ht as i128) - expectation)))
        .max()
        .unwrap_or_default();
    Ok(CyclicCandidate {
        pi: pi.clone(),
        h,
        expectation,
        p: ratio(total, nn * nn),
        max_dev,
    })
}

/// `3 n^(3/4)`.
pub fn default_sampler_bound(n: usize) -> f64 {
    3.0 * (n as f64).powf(0.75)
}

/// `6 n^(-1/4)`.
pub fn deviation_bound(n: usize) -> f64 {
    6.0 * (n as f64).powf(-0.25)
}

#[derive(Clone, Debug, Serialize)]
pub struct Sampled {
    pub candidate: CyclicCandidate,
    pub tries: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SamplerExhausted {
    /// Candidate with the smallest `max_dev` seen, earliest on ties.
    pub best: CyclicCandidate,
    pub tries: usize,
}

/// Draws uniform permutations until one has `max_dev <= bound`.
pub fn sample_concentrated_permutation(
    a: &BinaryMatrix,
    bound: f64,
    max_tries: usize,
    seed: u64,
) -> Result<std::result::Result<Sampled, SamplerExhausted>> {
    if !(bound > 0.0) {
        return Err(Error::InvalidArgument(format!("bound must be positive, got {bound}")));
    }
    if max_tries == 0 {
        return Err(Error::InvalidArgument("max_tries must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    sample_with(a, bound, max_tries, &mut rng)
}

pub(crate) fn sample_with<R: Rng + ?Sized>(
    a: &BinaryMatrix,
    bound: f64,
    max_tries: usize,
    rng: &mut R,
) -> Result<std::result::Result<Sampled, SamplerExhausted>> {
    let mut best: Option<CyclicCandidate> = None;
    for tries in 1..=max_tries {
        let pi = PerfectMatching::new(random_permutation(a.n(), rng))?;
        let cand = evaluate_candidate(a, &pi)?;
        if rational::le_f64(&cand.max_dev, bound) {
            return Ok(Ok(Sampled {
                candidate: cand,
                tries,
            }));
        }
        if best.as_ref().is_none_or(|b| cand.max_dev < b.max_dev) {
            best = Some(cand);
        }
    }
    Ok(Err(SamplerExhausted {
        best: best.expect("max_tries >= 1"),
        tries: max_tries,
    }))
}

/// Matchings `map[i] = pi((i + t) mod n)` for `t = 0..n`.
pub fn shifts_of(pi: &PerfectMatching) -> OneFactorization {
    let n = pi.n();
    let rows = (0..n)
        .map(|t| (0..n).map(|i| pi.get((i + t) % n)).collect())
        .collect();
    OneFactorization::from_rows(n, rows).expect("cyclic shifts form a Latin square")
}

#[derive(Clone, Debug, Serialize)]
pub struct MatchingReport {
    pub t: usize,
    pub signed_sum: i64,
    #[serde(with = "rational::as_f64")]
    pub disc: Rational,
    /// `|disc(M_t) - c|`.
    #[serde(with = "rational::as_f64")]
    pub deviation: Rational,
    pub h: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HighDiscReport {
    #[serde(with = "rational::as_f64")]
    pub c: Rational,
    /// Per-matching deviation bound `6 n^(-1/4)`.
    pub bound: f64,
    pub sampler_bound: f64,
    pub sampler_converged: bool,
    pub tries: usize,
    /// Whether the construction ran on `-M` (positive fraction below 1/2).
    pub negated: bool,
    #[serde(with = "rational::as_f64")]
    pub max_dev: Rational,
    pub per_matching: Vec<MatchingReport>,
    pub all_within_bound: bool,
    #[serde(with = "rational::as_f64")]
    pub min_disc: Rational,
}

#[derive(Clone, Debug)]
pub struct HighDiscOutcome {
    pub factorization: OneFactorization,
    pub report: HighDiscReport,
}

#[derive(Clone, Copy, Debug)]
pub struct CyclicOptions {
    pub max_tries: usize,
    /// Overrides `3 n^(3/4)`.
    pub sampler_bound: Option<f64>,
    pub seed: u64,
}

impl Default for CyclicOptions {
    fn default() -> Self {
        CyclicOptions {
            max_tries: 100,
            sampler_bound: None,
            seed: 0,
        }
    }
}

/// Runs the cyclic construction. Sampler exhaustion is not an error: the
/// best candidate is used and `report.sampler_converged` is `false`.
pub fn factorize_high_disc(m: &SignMatrix, opts: &CyclicOptions) -> Result<HighDiscOutcome> {
    let n = m.n();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "cyclic construction needs n >= 2, got {n}"
        )));
    }
    let negated = 2 * m.plus_count() < n * n;
    let a = if negated {
        BinaryMatrix::from_fn(n, |i, j| m.get(i, j) < 0)
    } else {
        BinaryMatrix::positives(m)
    };
    let sampler_bound = opts.sampler_bound.unwrap_or_else(|| default_sampler_bound(n));
    let (cand, tries, converged) =
        match sample_concentrated_permutation(&a, sampler_bound, opts.max_tries, opts.seed)? {
            Ok(s) => (s.candidate, s.tries, true),
            Err(e) => (e.best, e.tries, false),
        };
    let factorization = shifts_of(&cand.pi);
    let c = disc_graph(m);
    let bound = deviation_bound(n);
    let mut per_matching = Vec::with_capacity(n);
    for (t, pm) in factorization.matchings().iter().enumerate() {
        let disc = disc_matching(m, pm)?;
        per_matching.push(MatchingReport {
            t,
            signed_sum: signed_sum(m, pm)?,
            disc,
            deviation: rational::abs(&(disc - c)),
            h: cand.h[t],
        });
    }
    let all_within_bound = per_matching.iter().all(|r| rational::le_f64(&r.deviation, bound));
    let min_disc = per_matching.iter().map(|r| r.disc).min().unwrap_or_default();
    Ok(HighDiscOutcome {
        factorization,
        report: HighDiscReport {
            c,
            bound,
            sampler_bound,
            sampler_converged: converged,
            tries,
            negated,
            max_dev: cand.max_dev,
            per_matching,
            all_within_bound,
            min_disc,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signing::{validate_factorization, Orientation};

    fn random_signing(n: usize, seed: u64, p: f64) -> SignMatrix {
        let mut rng = rng_from_seed(seed);
        SignMatrix::from_fn(n, |_, _| rng.gen_bool(p))
    }

    #[test]
    fn candidate_examples() {
        let id = PerfectMatching::identity(8);
        let zero = BinaryMatrix::from_fn(8, |_, _| false);
        let c = evaluate_candidate(&zero, &id).unwrap();
        assert_eq!(c.h, vec![0; 8]);
        assert_eq!(c.max_dev, Rational::from_integer(0));
        let one = BinaryMatrix::from_fn(8, |_, _| true);
        let c = evaluate_candidate(&one, &id).unwrap();
        assert_eq!(c.h, vec![8; 8]);
        assert_eq!(c.max_dev, Rational::from_integer(0));
        let eye = BinaryMatrix::from_fn(4, |i, j| i == j);
        let c = evaluate_candidate(&eye, &PerfectMatching::identity(4)).unwrap();
        assert_eq!(c.h, vec![4, 0, 0, 0]);
        assert_eq!(c.expectation, Rational::from_integer(1));
        assert_eq!(c.max_dev, Rational::from_integer(3));
        assert!(evaluate_candidate(&eye, &PerfectMatching::identity(3)).is_err());
    }

    #[test]
    fn h_sums_to_positive_count() {
        let mut rng = rng_from_seed(4);
        for n in 1..20 {
            let a = BinaryMatrix::from_fn(n, |_, _| rng.gen());
            let pi = PerfectMatching::new(random_permutation(n, &mut rng)).unwrap();
            let c = evaluate_candidate(&a, &pi).unwrap();
            assert_eq!(c.h.iter().sum::<u64>(), a.total());
            assert!(c.h.iter().all(|&h| h <= n as u64));
            assert_eq!(c.p * Rational::from_integer((n * n) as i128), Rational::from_integer(a.total() as i128));
        }
    }

    #[test]
    fn sampler_examples() {
        let one = BinaryMatrix::from_fn(16, |_, _| true);
        let s = sample_concentrated_permutation(&one, default_sampler_bound(16), 5, 1)
            .unwrap()
            .unwrap();
        assert_eq!(s.tries, 1);

        let mut rng = rng_from_seed(64);
        let a = BinaryMatrix::from_fn(64, |_, _| rng.gen());
        assert!((default_sampler_bound(64) - 67.882).abs() < 1e-3);
        let s = sample_concentrated_permutation(&a, default_sampler_bound(64), 1, 2)
            .unwrap()
            .unwrap();
        assert_eq!(s.tries, 1);

        let exhausted = sample_concentrated_permutation(&a, 1e-9, 3, 2).unwrap().unwrap_err();
        assert_eq!(exhausted.tries, 3);
        assert!(sample_concentrated_permutation(&a, 0.0, 3, 2).is_err());
        assert!(sample_concentrated_permutation(&a, 1.0, 0, 2).is_err());
    }

    #[test]
    fn high_disc_examples() {
        let out = factorize_high_disc(&SignMatrix::all_plus(3), &CyclicOptions::default()).unwrap();
        assert!(out.report.per_matching.iter().all(|r| r.disc == Rational::from_integer(1)));
        assert_eq!(out.report.c, Rational::from_integer(1));

        let z = [1, 1, -1, -1];
        let m = SignMatrix::one_sided(&z, Orientation::XSide).unwrap();
        let out = factorize_high_disc(&m, &CyclicOptions::default()).unwrap();
        assert!(out.report.per_matching.iter().all(|r| r.disc == Rational::from_integer(0)));
        assert!(factorize_high_disc(&SignMatrix::all_plus(1), &CyclicOptions::default()).is_err());
    }

    #[test]
    fn deviation_tracks_h() {
        for seed in 0..10 {
            let n = 5 + seed as usize * 3;
            let m = random_signing(n, seed, 0.3);
            let opts = CyclicOptions {
                seed,
                ..Default::default()
            };
            let out = factorize_high_disc(&m, &opts).unwrap();
            assert!(out.report.negated);
            assert_eq!(
                validate_factorization(n, &out.factorization.rows()),
                crate::signing::ValidationReport::Valid
            );
            let n_r = Rational::from_integer(n as i128);
            let pn = (Rational::from_integer(1) - out.report.c) / 2 * n_r;
            let pn = Rational::from_integer(n as i128) - pn;
            for r in &out.report.per_matching {
                let rhs = rational::abs(&(Rational::from_integer(r.h as i128) - pn)) * 2 / n_r;
                assert!(r.deviation <= rhs);
            }
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let m = random_signing(40, 9, 0.7);
        let opts = CyclicOptions {
            seed: 77,
            ..Default::default()
        };
        let a = factorize_high_disc(&m, &opts).unwrap();
        let b = factorize_high_disc(&m, &opts).unwrap();
        assert_eq!(a.factorization, b.factorization);
    }
}
