//! The three-way classifier.
//!
//! For a closeness target `epsilon`, every signing either has a
//! 1-factorization whose matchings all have discrepancy at least `c`, or is
//! `epsilon`-close to a balanced one-sided signing. The classifier routes on
//! the measured discrepancy and switcher count in the order of the argument
//! (large discrepancy, then many switchers, then the spectral certificate),
//! verifies what the routed branch produced, and falls back to the other
//! branches when that verification fails. At desk scale the asymptotic
//! thresholds do not guarantee the routed branch succeeds.

use serde::Serialize;

use crate::census::{count_switchers, SwitcherCensus};
use crate::cyclic::{factorize_high_disc, CyclicOptions};
use crate::error::{Error, Result};
use crate::rational::{self, ratio, Rational};
use crate::rng::derive_seed;
use crate::signing::{disc_graph, disc_matching, OneFactorization, PerfectMatching, SignMatrix};
use crate::spectral::{diagnostics, nearest_one_sided, top_singular_pair, CloseCertificate, PowerOptions, SpectralDiagnostics};
use crate::switching::{factorize_many_switchers, CrownCache, SwitcherOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DichotomyParams {
    #[serde(with = "rational::as_f64")]
    pub epsilon: Rational,
    /// `min(epsilon^2 / 16, 1 / 100)`.
    #[serde(with = "rational::as_f64")]
    pub alpha: Rational,
    /// `alpha^2 / 64`.
    #[serde(with = "rational::as_f64")]
    pub eta: Rational,
    /// `min(alpha / 6, eta / 16)`, which is always `eta / 16`.
    #[serde(with = "rational::as_f64")]
    pub c: Rational,
}

impl DichotomyParams {
    pub fn new(epsilon: Rational) -> Result<Self> {
        if epsilon <= Rational::from_integer(0) || epsilon > Rational::from_integer(1) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must lie in (0, 1], got {}",
                rational::to_f64(&epsilon)
            )));
        }
        let alpha = (epsilon * epsilon / 16).min(ratio(1, 100));
        let eta = alpha * alpha / 64;
        let c = (alpha / 6).min(eta / 16);
        Ok(DichotomyParams { epsilon, alpha, eta, c })
    }

    /// `4 sqrt(alpha)`.
    pub fn closeness_bound(&self) -> f64 {
        4.0 * rational::to_f64(&self.alpha).sqrt()
    }

    /// `min(epsilon^4 / 262144, 1 / 10240000)`: the exact value of `c` in
    /// terms of `epsilon`.
    pub fn c_closed_form(epsilon: Rational) -> Rational {
        let e4 = epsilon * epsilon * epsilon * epsilon;
        (e4 / 262_144).min(ratio(1, 10_240_000))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(into = "u8")]
pub enum Branch {
    HighDisc,
    ManySwitchers,
    Close,
}

impl From<Branch> for u8 {
    fn from(b: Branch) -> u8 {
        match b {
            Branch::HighDisc => 1,
            Branch::ManySwitchers => 2,
            Branch::Close => 3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Attempt {
    pub branch: Branch,
    /// Every matching reached `c`, or the certificate was satisfied.
    pub success: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(with = "opt_f64")]
    pub min_disc: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hamming: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

mod opt_f64 {
    use super::{rational, Rational};
    use serde::Serializer;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_f64(rational::to_f64(r)),
            None => s.serialize_none(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationDetails {
    pub rows: Vec<Vec<usize>>,
    pub signed_sums: Vec<i64>,
    #[serde(with = "rational::vec_as_f64")]
    pub discs: Vec<Rational>,
    #[serde(with = "rational::as_f64")]
    pub min_disc: Rational,
    pub all_at_least_c: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Factorization(FactorizationDetails),
    Certificate {
        certificate: CloseCertificate,
        diagnostics: SpectralDiagnostics,
        sigma1: f64,
        converged: bool,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct DichotomyCertificate {
    pub params: DichotomyParams,
    #[serde(with = "rational::as_f64")]
    pub disc_graph: Rational,
    pub census: SwitcherCensus,
    /// Branch chosen by the thresholds.
    pub routed_branch: Branch,
    /// Branch whose output is reported.
    pub branch: Branch,
    pub success: bool,
    pub attempts: Vec<Attempt>,
    pub outcome: Outcome,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ClassifyOptions {
    pub seed: u64,
    pub cyclic_max_tries: Option<usize>,
    pub switcher: Option<SwitcherOptions>,
    pub power: Option<PowerOptions>,
}

pub fn route(params: &DichotomyParams, disc: Rational, census: &SwitcherCensus) -> Branch {
    let n4 = (census.n as i128).pow(4);
    if disc > params.alpha / 3 {
        Branch::HighDisc
    } else if Rational::from_integer(census.s as i128) > params.eta * Rational::from_integer(n4) {
        Branch::ManySwitchers
    } else {
        Branch::Close
    }
}

fn details(m: &SignMatrix, f: &OneFactorization, c: Rational) -> Result<FactorizationDetails> {
    let signed_sums = f.signed_sums(m)?;
    let discs = f
        .matchings()
        .iter()
        .map(|pm| disc_matching(m, pm))
        .collect::<Result<Vec<_>>>()?;
    let min_disc = discs.iter().copied().min().unwrap_or_default();
    Ok(FactorizationDetails {
        rows: f.rows(),
        signed_sums,
        all_at_least_c: discs.iter().all(|d| *d >= c),
        discs,
        min_disc,
    })
}

/// Runs the classifier.
pub fn classify(
    m: &SignMatrix,
    epsilon: Rational,
    opts: &ClassifyOptions,
    cache: &CrownCache,
) -> Result<DichotomyCertificate> {
    let params = DichotomyParams::new(epsilon)?;
    let disc = disc_graph(m);
    let census = count_switchers(m);
    let routed = route(&params, disc, &census);

    let order: [Branch; 3] = match routed {
        Branch::HighDisc => [Branch::HighDisc, Branch::Close, Branch::ManySwitchers],
        Branch::ManySwitchers => [Branch::ManySwitchers, Branch::Close, Branch::HighDisc],
        Branch::Close => [Branch::Close, Branch::HighDisc, Branch::ManySwitchers],
    };
    let mut attempts = Vec::new();
    let mut first: Option<(Branch, Outcome)> = None;
    for branch in order {
        let result = run_branch(m, branch, &params, opts, cache);
        match result {
            Ok((outcome, success)) => {
                attempts.push(attempt(branch, &outcome, success, None));
                if success {
                    return Ok(DichotomyCertificate {
                        params,
                        disc_graph: disc,
                        census,
                        routed_branch: routed,
                        branch,
                        success: true,
                        attempts,
                        outcome,
                    });
                }
                if first.is_none() {
                    first = Some((branch, outcome));
                }
            }
            Err(e) => attempts.push(Attempt {
                branch,
                success: false,
                min_disc: None,
                hamming: None,
                error: Some(e.to_string()),
            }),
        }
    }
    // Nothing verified: report the routed branch if it produced output, else
    // the first that did. The certificate branch always produces output.
    let (branch, outcome) = first.expect("the certificate branch cannot fail");
    Ok(DichotomyCertificate {
        params,
        disc_graph: disc,
        census,
        routed_branch: routed,
        branch,
        success: false,
        attempts,
        outcome,
    })
}

fn attempt(branch: Branch, outcome: &Outcome, success: bool, error: Option<String>) -> Attempt {
    let (min_disc, hamming) = match outcome {
        Outcome::Factorization(d) => (Some(d.min_disc), None),
        Outcome::Certificate { certificate, .. } => (None, Some(certificate.hamming)),
    };
    Attempt {
        branch,
        success,
        min_disc,
        hamming,
        error,
    }
}

fn run_branch(
    m: &SignMatrix,
    branch: Branch,
    params: &DichotomyParams,
    opts: &ClassifyOptions,
    cache: &CrownCache,
) -> Result<(Outcome, bool)> {
    let n = m.n();
    match branch {
        Branch::HighDisc => {
            let f = if n == 1 {
                OneFactorization::new(vec![PerfectMatching::identity(1)])?
            } else {
                let cyc = CyclicOptions {
                    max_tries: opts.cyclic_max_tries.unwrap_or(100),
                    sampler_bound: None,
                    seed: derive_seed(opts.seed, 1),
                };
                factorize_high_disc(m, &cyc)?.factorization
            };
            let d = details(m, &f, params.c)?;
            let ok = d.all_at_least_c;
            Ok((Outcome::Factorization(d), ok))
        }
        Branch::ManySwitchers => {
            let mut sw = opts.switcher.unwrap_or_default();
            sw.eta = Some(params.eta);
            sw.seed = derive_seed(opts.seed, 2);
            let out = factorize_many_switchers(m, &sw, cache)?;
            let d = details(m, &out.factorization, params.c)?;
            let ok = d.all_at_least_c;
            Ok((Outcome::Factorization(d), ok))
        }
        Branch::Close => {
            let mut power = opts.power.unwrap_or_default();
            power.seed = derive_seed(opts.seed, 3);
            let summary = top_singular_pair(m, &power)?;
            let alpha = rational::to_f64(&params.alpha);
            let certificate = nearest_one_sided(m, &summary, alpha)?;
            let ok = certificate.satisfied;
            Ok((
                Outcome::Certificate {
                    certificate,
                    diagnostics: diagnostics(m, &summary, alpha),
                    sigma1: summary.sigma1,
                    converged: summary.converged,
                },
                ok,
            ))
        }
    }
}
