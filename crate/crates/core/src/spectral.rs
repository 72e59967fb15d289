//! Spectral certificate of closeness to a balanced one-sided signing.
//!
//! The top singular pair `(u, v)` of `M` is rounded to sign vectors
//! `x = sgn(u)`, `y = sgn(v)`. When few switchers exist one of them is
//! nearly constant, and the other, once balanced, gives the pattern. The
//! Hamming distance in the certificate is always recounted against `M`, so
//! numerical error can only make the certificate weaker, never wrong.

use rand::Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::census::{count_switchers, trace_fourth};
use crate::error::{Error, Result};
use crate::rational::{self, ratio, Rational};
use crate::rng::{derive_seed, rng_from_seed};
use crate::signing::{is_balanced, Orientation, SignMatrix};

#[derive(Clone, Copy, Debug)]
pub struct PowerOptions {
    /// Convergence threshold on the relative change of the Rayleigh quotient.
    pub tol: f64,
    /// Defaults to `10 n + 1000` when `None`.
    pub max_iter: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            tol: 1e-10,
            max_iter: None,
            restarts: 5,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralSummary {
    pub sigma1: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub x: Vec<i8>,
    pub y: Vec<i8>,
    /// `||M^T M v - sigma1^2 v|| / max(1, sigma1^2)` at the last iterate.
    pub residual: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
}

fn mat_vec(m: &SignMatrix, v: &[f64]) -> Vec<f64> {
    (0..m.n())
        .into_par_iter()
        .map(|i| m.row(i).iter().zip(v).map(|(&a, &b)| a as f64 * b).sum())
        .collect()
}

fn mat_t_vec(m: &SignMatrix, u: &[f64]) -> Vec<f64> {
    let n = m.n();
    (0..n)
        .into_par_iter()
        .map(|j| (0..n).map(|i| m.get(i, j) as f64 * u[i]).sum())
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn sgn(a: f64) -> i8 {
    if a < 0.0 {
        -1
    } else {
        1
    }
}

/// Power iteration on `M^T M`.
pub fn top_singular_pair(m: &SignMatrix, opts: &PowerOptions) -> Result<SpectralSummary> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {}", opts.tol)));
    }
    let n = m.n();
    let max_iter = opts.max_iter.unwrap_or(10 * n + 1000);
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    let mut last = None;
    for restart in 0..=opts.restarts {
        let mut rng = rng_from_seed(derive_seed(opts.seed, restart as u64));
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nv = norm(&v);
        if nv == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|a| *a /= nv);
        let mut lambda = f64::NAN;
        let mut converged = false;
        let mut iterations = 0;
        for it in 1..=max_iter {
            iterations = it;
            let w = mat_t_vec(m, &mat_vec(m, &v));
            let next: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
            let nw = norm(&w);
            if nw == 0.0 {
                break;
            }
            v = w.into_iter().map(|a| a / nw).collect();
            if (next - lambda).abs() < opts.tol * next.max(1.0) {
                converged = true;
                break;
            }
            lambda = next;
        }
        let summary = finish(m, v, iterations, restart, converged);
        if converged {
            return Ok(summary);
        }
        last = Some(summary);
    }
    Ok(last.unwrap_or_else(|| {
        let v = vec![1.0 / (n as f64).sqrt(); n];
        finish(m, v, 0, opts.restarts, false)
    }))
}

fn finish(m: &SignMatrix, v: Vec<f64>, iterations: usize, restarts: usize, converged: bool) -> SpectralSummary {
    let mv = mat_vec(m, &v);
    let sigma1 = norm(&mv);
    let u: Vec<f64> = if sigma1 > 0.0 {
        mv.iter().map(|a| a / sigma1).collect()
    } else {
        mv
    };
    let w = mat_t_vec(m, &mat_vec(m, &v));
    let s2 = sigma1 * sigma1;
    let res: Vec<f64> = w.iter().zip(&v).map(|(a, b)| a - s2 * b).collect();
    SpectralSummary {
        sigma1,
        x: u.iter().map(|&a| sgn(a)).collect(),
        y: v.iter().map(|&a| sgn(a)).collect(),
        u,
        v,
        residual: norm(&res) / s2.max(1.0),
        iterations,
        restarts,
        converged,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FourthMomentReport {
    pub n: usize,
    /// `tr((M M^T)^2)`.
    pub trace: i128,
    pub s2: u64,
    /// `trace == n^4 - 8 s2`.
    pub identity_holds: bool,
    /// `tr(M M^T)`, which equals the sum of squared singular values.
    pub frobenius: i128,
    pub alpha: Option<f64>,
    /// `sqrt(1 - alpha^2 / 8) n`.
    pub sigma1_lower_bound: Option<f64>,
    /// `sqrt(trace) / n`, a lower bound on `sigma1` valid for any `M`.
    pub sigma1_trace_bound: f64,
}

/// Cross-checks the trace identity against the census; a mismatch is an
/// error.
pub fn fourth_moment_check(m: &SignMatrix, alpha: Option<f64>) -> Result<FourthMomentReport> {
    let n = m.n();
    let trace = trace_fourth(m);
    let s2 = count_switchers(m).s2;
    let n4 = (n as i128).pow(4);
    let identity_holds = trace == n4 - 8 * s2 as i128;
    if !identity_holds {
        return Err(Error::Inconsistent(format!(
            "tr((MM^T)^2) = {trace} but n^4 - 8 s2 = {}",
            n4 - 8 * s2 as i128
        )));
    }
    let frobenius: i128 = m.entries().iter().map(|&e| (e as i128) * (e as i128)).sum();
    Ok(FourthMomentReport {
        n,
        trace,
        s2,
        identity_holds,
        frobenius,
        alpha,
        sigma1_lower_bound: alpha.map(|a| (1.0 - a * a / 8.0).sqrt() * n as f64),
        sigma1_trace_bound: (trace as f64).sqrt() / n as f64,
    })
}

fn z_string<S: Serializer>(z: &[i8], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&z.iter().map(|&e| if e > 0 { '+' } else { '-' }).collect::<String>())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CloseCertificate {
    pub orientation: Orientation,
    #[serde(serialize_with = "z_string")]
    pub z: Vec<i8>,
    pub hamming: usize,
    /// `hamming / n^2`.
    #[serde(with = "rational::as_f64")]
    pub normalized: Rational,
    /// `4 sqrt(alpha)`.
    pub bound: f64,
    pub satisfied: bool,
}

impl CloseCertificate {
    /// Builds a certificate by counting disagreements with the pattern.
    pub fn recount(m: &SignMatrix, orientation: Orientation, z: Vec<i8>, alpha: f64) -> Result<Self> {
        let n = m.n();
        if z.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: z.len(),
            });
        }
        if !is_balanced(&z) {
            return Err(Error::InvalidArgument("pattern vector is not balanced".into()));
        }
        let pattern = SignMatrix::one_sided(&z, orientation)?;
        let hamming = m.hamming(&pattern)?;
        let normalized = ratio(hamming as i128, (n * n) as i128);
        let bound = 4.0 * alpha.max(0.0).sqrt();
        Ok(CloseCertificate {
            orientation,
            z,
            hamming,
            normalized,
            bound,
            satisfied: rational::le_f64(&normalized, bound),
        })
    }

    pub fn pattern(&self) -> SignMatrix {
        SignMatrix::one_sided(&self.z, self.orientation).expect("z is a sign vector")
    }
}

fn majority(v: &[i8]) -> (usize, i8) {
    let plus = v.iter().filter(|&&e| e > 0).count();
    let minus = v.len() - plus;
    if plus >= minus {
        (plus, 1)
    } else {
        (minus, -1)
    }
}

/// Flips `floor(excess / 2)` coordinates of the majority sign, those with
/// the smallest `|weight|` first and the lower index on ties.
fn balance(signs: &[i8], weights: &[f64]) -> Vec<i8> {
    let mut z = signs.to_vec();
    let sum: i64 = z.iter().map(|&e| e as i64).sum();
    let flips = (sum.unsigned_abs() / 2) as usize;
    if flips == 0 {
        return z;
    }
    let excess = if sum > 0 { 1 } else { -1 };
    let mut idx: Vec<usize> = (0..z.len()).filter(|&i| z[i] == excess).collect();
    idx.sort_by(|&a, &b| weights[a].abs().total_cmp(&weights[b].abs()).then(a.cmp(&b)));
    for &i in idx.iter().take(flips) {
        z[i] = -excess;
    }
    z
}

/// Rounds the singular pair to the nearest balanced one-sided pattern along
/// the lines of the proof. If `x` is the more lopsided vector, `M` is close
/// to `1 z^T` with `z` a balanced `y`; otherwise to `z 1^T` with `z` a
/// balanced `x`. Equal lopsidedness goes to x-side.
pub fn nearest_one_sided(m: &SignMatrix, summary: &SpectralSummary, alpha: f64) -> Result<CloseCertificate> {
    let n = m.n();
    if summary.x.len() != n || summary.y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: summary.x.len(),
        });
    }
    let (xc, xs) = majority(&summary.x);
    let (yc, ys) = majority(&summary.y);
    let (orientation, z) = if xc > yc {
        let y: Vec<i8> = summary.y.iter().map(|&e| e * xs).collect();
        (Orientation::YSide, balance(&y, &summary.v))
    } else {
        let x: Vec<i8> = summary.x.iter().map(|&e| e * ys).collect();
        (Orientation::XSide, balance(&x, &summary.u))
    };
    CloseCertificate::recount(m, orientation, z, alpha)
}

/// Measured versions of the inequalities in the closeness argument,
/// evaluated on the computed `u`, `v`. Informational only.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralDiagnostics {
    pub alpha: f64,
    /// `sum_i (1/sqrt(n) - |u_i|)^2`, at most `alpha^2 / 4` in theory.
    pub t_sq_u: f64,
    pub t_sq_v: f64,
    pub t_bound: f64,
    /// Fraction of entries where `x y^T` agrees with `M`; at least `1 - 2 alpha`.
    pub agreement: f64,
    pub agreement_bound: f64,
    /// Largest same-sign count in `x` or `y`; at least `(1 - 3 sqrt(alpha)) n`.
    pub lopsided_count: usize,
    pub lopsided_bound: f64,
    /// `|#(+1) - #(-1)|` of the other vector; at most `12 alpha n`.
    pub other_imbalance: usize,
    pub imbalance_bound: f64,
}

pub fn diagnostics(m: &SignMatrix, summary: &SpectralSummary, alpha: f64) -> SpectralDiagnostics {
    let n = m.n();
    let r = 1.0 / (n as f64).sqrt();
    let t_sq = |w: &[f64]| w.iter().map(|a| (r - a.abs()).powi(2)).sum::<f64>();
    let mut agree = 0usize;
    for i in 0..n {
        for j in 0..n {
            if summary.x[i] * summary.y[j] == m.get(i, j) {
                agree += 1;
            }
        }
    }
    let (xc, _) = majority(&summary.x);
    let (yc, _) = majority(&summary.y);
    let other = if xc > yc { &summary.y } else { &summary.x };
    let plus = other.iter().filter(|&&e| e > 0).count();
    SpectralDiagnostics {
        alpha,
        t_sq_u: t_sq(&summary.u),
        t_sq_v: t_sq(&summary.v),
        t_bound: alpha * alpha / 4.0,
        agreement: agree as f64 / (n * n) as f64,
        agreement_bound: 1.0 - 2.0 * alpha,
        lopsided_count: xc.max(yc),
        lopsided_bound: (1.0 - 3.0 * alpha.sqrt()) * n as f64,
        other_imbalance: plus.abs_diff(n - plus),
        imbalance_bound: 12.0 * alpha * n as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random(n: usize, seed: u64) -> SignMatrix {
        let mut rng = rng_from_seed(seed);
        SignMatrix::from_fn(n, |_, _| rng.gen())
    }

    #[test]
    fn rank_one_examples() {
        let m = SignMatrix::one_sided(&[1, -1, 1, -1], Orientation::YSide).unwrap();
        let s = top_singular_pair(&m, &PowerOptions::default()).unwrap();
        assert!(s.converged);
        assert!((s.sigma1 - 4.0).abs() < 1e-9);
        let s = top_singular_pair(&SignMatrix::all_plus(8), &PowerOptions::default()).unwrap();
        assert!((s.sigma1 - 8.0).abs() < 1e-9);
        let unif = 1.0 / 8f64.sqrt();
        assert!(s.v.iter().all(|a| (a.abs() - unif).abs() < 1e-6));
    }

    #[test]
    fn singular_pair_invariants() {
        for seed in 0..10 {
            let m = random(12, seed);
            let s = top_singular_pair(&m, &PowerOptions { seed, ..Default::default() }).unwrap();
            assert!((norm(&s.u) - 1.0).abs() < 1e-9);
            assert!((norm(&s.v) - 1.0).abs() < 1e-9);
            assert!(s.sigma1 <= 12.0 + 1e-9);
            let mv = mat_vec(&m, &s.v);
            let umv: f64 = s.u.iter().zip(&mv).map(|(a, b)| a * b).sum();
            assert!((umv - s.sigma1).abs() < 1e-9);
        }
        assert!(top_singular_pair(&random(3, 1), &PowerOptions { tol: 0.0, ..Default::default() }).is_err());
    }

    #[test]
    fn fourth_moment_examples() {
        let r = fourth_moment_check(&SignMatrix::all_plus(5), Some(0.01)).unwrap();
        assert_eq!(r.trace, 625);
        assert!((r.sigma1_trace_bound - 5.0).abs() < 1e-12);
        let m = SignMatrix::from_fn(2, |i, j| !(i == 1 && j == 1));
        let r = fourth_moment_check(&m, None).unwrap();
        assert_eq!((r.trace, r.s2), (8, 1));
        assert_eq!(r.frobenius, 4);
    }

    #[test]
    fn nearest_examples() {
        let z = [1, 1, -1, -1, 1, -1];
        let m = SignMatrix::one_sided(&z, Orientation::XSide).unwrap();
        let s = top_singular_pair(&m, &PowerOptions::default()).unwrap();
        let c = nearest_one_sided(&m, &s, 0.01).unwrap();
        assert_eq!(c.orientation, Orientation::XSide);
        assert_eq!(c.hamming, 0);
        assert!(c.satisfied);

        let all = SignMatrix::all_plus(4);
        let s = top_singular_pair(&all, &PowerOptions::default()).unwrap();
        let c = nearest_one_sided(&all, &s, 0.01).unwrap();
        assert_eq!(c.hamming, 8);
        assert!(!c.satisfied);
        assert!(is_balanced(&c.z));
    }

    #[test]
    fn balancing_prefers_small_weights() {
        let z = balance(&[1, 1, 1, 1, -1], &[0.5, 0.1, 0.9, 0.1, 0.3]);
        assert_eq!(z, vec![1, -1, 1, 1, -1]);
        let z = balance(&[1, 1, 1, 1], &[0.5, 0.1, 0.9, 0.1]);
        assert_eq!(z, vec![1, -1, 1, -1]);
        assert_eq!(balance(&[1, -1, 1], &[0.0; 3]), vec![1, -1, 1]);
    }

    #[test]
    fn certificate_json_shape() {
        let m = SignMatrix::one_sided(&[1, 1, -1, -1], Orientation::YSide).unwrap();
        let c = CloseCertificate::recount(&m, Orientation::YSide, vec![1, 1, -1, -1], 0.01).unwrap();
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["z"], "++--");
        assert_eq!(v["orientation"], "y-side");
        assert_eq!(v["hamming"], 0);
        assert!(CloseCertificate::recount(&m, Orientation::YSide, vec![1, 1, 1, -1], 0.01).is_err());
    }
}
