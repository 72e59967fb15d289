//! End-to-end factorization for signings with many switchers.

use serde::Serialize;

use crate::census::count_switchers;
use crate::error::{Error, Result};
use crate::rational::{self, ratio, Rational};
use crate::rng::derive_seed;
use crate::signing::{disc_matching, signed_sum, OneFactorization, PerfectMatching, SignMatrix};
use crate::two_factor::TwoFactorization;

use super::crown::{crown_decompose_odd, CrownCache, CrownMode, CrownOptions, CrownSource};
use super::even::{build_c4_factorization_even, C4Report, EvenOptions};
use super::relabel::{relabel_switcher_rich, RelabelReport};
use super::seed::seed_matching;
use super::split::{split_two_factor_unchecked, SplitCase};

#[derive(Clone, Copy, Debug)]
pub struct SwitcherOptions {
    /// Defaults to the measured density `s / n^4`.
    pub eta: Option<Rational>,
    pub seed: u64,
    pub scheme_tries: usize,
    pub perm_tries: usize,
    pub relabel_tries: usize,
    pub crown: CrownOptions,
}

impl Default for SwitcherOptions {
    fn default() -> Self {
        SwitcherOptions {
            eta: None,
            seed: 0,
            scheme_tries: 32,
            perm_tries: 100,
            relabel_tries: 50,
            crown: CrownOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MatchingEntry {
    pub t: usize,
    pub signed_sum: i64,
    #[serde(with = "rational::as_f64")]
    pub disc: Rational,
    pub meets_bound: bool,
    /// `"seed"` or `"factor <j>/<1|2>"`.
    pub origin: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorSplit {
    pub factor: usize,
    pub case: SplitCase,
    pub switcher_components: usize,
    pub applied: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ManySwitchersReport {
    pub n: usize,
    #[serde(with = "rational::as_f64")]
    pub eta: Rational,
    pub s: u64,
    /// `s >= eta n^4`; the construction runs either way.
    pub precondition_met: bool,
    /// `eta / 8 - 3 / n`.
    #[serde(with = "rational::as_f64")]
    pub bound: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c4: Option<C4Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_family: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crown_source: Option<CrownSource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relabel: Option<RelabelReport>,
    pub splits: Vec<FactorSplit>,
    pub per_matching: Vec<MatchingEntry>,
    #[serde(with = "rational::as_f64")]
    pub min_disc: Rational,
    pub all_meet_bound: bool,
}

#[derive(Clone, Debug)]
pub struct ManySwitchersOutcome {
    pub factorization: OneFactorization,
    pub two_factorization: Option<TwoFactorization>,
    pub report: ManySwitchersReport,
}

/// Runs the switcher pipeline. Each 2-factor is split with `alpha = eta / 2`.
/// Stage failures come back as [`Error::Construction`] labelled with the
/// stage; unmet thresholds are reported, not raised.
pub fn factorize_many_switchers(
    m: &SignMatrix,
    opts: &SwitcherOptions,
    cache: &CrownCache,
) -> Result<ManySwitchersOutcome> {
    let n = m.n();
    let census = count_switchers(m);
    let n4 = (n as i128).pow(4);
    let eta = opts.eta.unwrap_or_else(|| ratio(census.s as i128, n4));
    if eta < Rational::from_integer(0) {
        return Err(Error::InvalidArgument("eta must be non-negative".into()));
    }
    let nr = Rational::from_integer(n as i128);
    let bound = eta / 8 - Rational::from_integer(3) / nr;
    let alpha = eta / 2;
    // The split needs a positive alpha; with eta = 0 the bound is negative
    // anyway, so any positive value keeps the procedure well defined.
    let split_alpha = if alpha > Rational::from_integer(0) { alpha } else { ratio(1, 4 * n as i128) };

    let mut report = ManySwitchersReport {
        n,
        eta,
        s: census.s,
        precondition_met: Rational::from_integer(census.s as i128) >= eta * Rational::from_integer(n4),
        bound,
        c4: None,
        seed_family: None,
        crown_source: None,
        relabel: None,
        splits: Vec::new(),
        per_matching: Vec::new(),
        min_disc: Rational::from_integer(0),
        all_meet_bound: false,
    };

    let mut matchings: Vec<(PerfectMatching, String)> = Vec::with_capacity(n);
    let two_factorization = if n == 1 {
        matchings.push((PerfectMatching::identity(1), "seed".into()));
        None
    } else if n % 2 == 0 {
        let even = EvenOptions {
            scheme_tries: opts.scheme_tries,
            perm_tries: opts.perm_tries,
            seed: derive_seed(opts.seed, 10),
        };
        let out = build_c4_factorization_even(m, eta, &even).map_err(|e| stage("c4-factorization", e))?;
        report.c4 = Some(out.report);
        Some(out.factorization)
    } else {
        let seed = seed_matching(m);
        report.seed_family = Some(seed.family.len());
        let crown = crown_decompose_odd(n, &seed.matching, &opts.crown, cache).map_err(|e| stage("crown", e))?;
        report.crown_source = Some(crown.source);
        let relabeled = relabel_switcher_rich(m, &crown.factorization, eta, opts.relabel_tries, derive_seed(opts.seed, 20))
            .map_err(|e| stage("relabel", e))?;
        report.relabel = Some(relabeled.report);
        matchings.push((seed.matching, "seed".into()));
        Some(relabeled.factorization)
    };

    if let Some(tf) = &two_factorization {
        for (j, f) in tf.factors().iter().enumerate() {
            let r = split_two_factor_unchecked(m, f, split_alpha).map_err(|e| stage("split", e))?;
            report.splits.push(FactorSplit {
                factor: j,
                case: r.case_taken,
                switcher_components: r.switcher_components,
                applied: r.applied.len(),
            });
            matchings.push((r.m1, format!("factor {j}/1")));
            matchings.push((r.m2, format!("factor {j}/2")));
        }
    }

    let factorization = OneFactorization::new(matchings.iter().map(|(pm, _)| pm.clone()).collect())
        .map_err(|e| stage("assemble", e))?;
    for (t, (pm, origin)) in matchings.into_iter().enumerate() {
        let disc = disc_matching(m, &pm)?;
        report.per_matching.push(MatchingEntry {
            t,
            signed_sum: signed_sum(m, &pm)?,
            disc,
            meets_bound: disc >= bound,
            origin,
        });
    }
    report.min_disc = report.per_matching.iter().map(|e| e.disc).min().unwrap_or_default();
    report.all_meet_bound = report.per_matching.iter().all(|e| e.meets_bound);
    Ok(ManySwitchersOutcome {
        factorization,
        two_factorization,
        report,
    })
}

fn stage(stage: &'static str, e: Error) -> Error {
    match e {
        Error::Construction { .. } => e,
        other => Error::Construction {
            stage,
            message: other.to_string(),
        },
    }
}

/// Convenience for callers that only pick the crown mode.
pub fn options_with_mode(mode: CrownMode, seed: u64) -> SwitcherOptions {
    SwitcherOptions {
        seed,
        crown: CrownOptions {
            mode,
            ..Default::default()
        },
        ..Default::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use crate::signing::validate_factorization;
    use rand::Rng;

    #[test]
    fn n2_example() {
        let m = SignMatrix::from_fn(2, |i, j| i == j);
        let opts = SwitcherOptions {
            eta: Some(ratio(1, 4)),
            ..Default::default()
        };
        let out = factorize_many_switchers(&m, &opts, &CrownCache::new()).unwrap();
        assert!(out.report.per_matching.iter().all(|e| e.disc == Rational::from_integer(1)));
        assert!(out.report.all_meet_bound);
    }

    #[test]
    fn outputs_are_factorizations() {
        let cache = CrownCache::new();
        for n in 1..=13 {
            let mut rng = rng_from_seed(n as u64);
            let m = SignMatrix::from_fn(n, |_, _| rng.gen());
            let opts = options_with_mode(CrownMode::Exact, 5);
            let out = factorize_many_switchers(&m, &opts, &cache).unwrap();
            assert!(validate_factorization(n, &out.factorization.rows()).is_valid(), "n = {n}");
            assert_eq!(out.report.per_matching.len(), n);
        }
    }
}
