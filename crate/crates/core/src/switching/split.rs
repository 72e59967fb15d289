//! Splitting a switcher-rich 2-factor into two high-discrepancy matchings.
//!
//! Start from the two alternating matchings `M1`, `M2` of the factor.
//! Swapping the halves of a switcher component `Q` between them changes
//! `S(M1)` by some `delta_Q` in `{+-2, +-4}` and `S(M2)` by `-delta_Q`. Using
//! only switchers whose `delta_Q` share a sign, the shift `h` grows by 2 or
//! 4 per application, which is fine enough to land near `alpha n / 2`.

use serde::Serialize;

use crate::census::SwitcherRecord;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::signing::{disc_matching, signed_sum, PerfectMatching, SignMatrix};
use crate::two_factor::TwoFactor;

use super::switcher_components;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitCase {
    /// Both alternating matchings already had `disc >= alpha / 4`.
    Trivial,
    /// `disc(M2) < 3 alpha / 4`: at least `ceil(alpha n / 2)` switchers applied.
    One,
    /// Switchers applied with total shift in the target window.
    Two,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Application {
    pub switcher: SwitcherRecord,
    /// Change of `S(M1)`; `S(M2)` changes by `-delta`.
    pub delta: i64,
    pub before: (i64, i64),
    pub after: (i64, i64),
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitResult {
    pub m1: PerfectMatching,
    pub m2: PerfectMatching,
    pub applied: Vec<Application>,
    pub case_taken: SplitCase,
    #[serde(with = "rational::as_f64")]
    pub disc1: Rational,
    #[serde(with = "rational::as_f64")]
    pub disc2: Rational,
    pub switcher_components: usize,
    /// Size of the sign class the switchers were drawn from.
    pub class_size: usize,
    /// `ceil(alpha n / 2)`.
    pub target: i64,
    /// `alpha / 4 - 3 / n`.
    #[serde(with = "rational::as_f64")]
    pub guarantee: Rational,
}

impl SplitResult {
    pub fn min_disc(&self) -> Rational {
        self.disc1.min(self.disc2)
    }
}

/// Splits `f` as in the local switching argument. Refuses with
/// [`Error::TooFewSwitchers`] when `f` has fewer than `alpha n` switcher
/// components and the alternating matchings do not already suffice.
pub fn split_two_factor(m: &SignMatrix, f: &TwoFactor, alpha: Rational) -> Result<SplitResult> {
    split(m, f, alpha, true)
}

/// Same procedure without the precondition; applies as many switchers as
/// the sign class holds.
pub fn split_two_factor_unchecked(m: &SignMatrix, f: &TwoFactor, alpha: Rational) -> Result<SplitResult> {
    split(m, f, alpha, false)
}

fn split(m: &SignMatrix, f: &TwoFactor, alpha: Rational, checked: bool) -> Result<SplitResult> {
    let n = f.n();
    if m.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.n() });
    }
    if alpha <= Rational::from_integer(0) {
        return Err(Error::InvalidArgument("alpha must be positive".into()));
    }
    let nr = Rational::from_integer(n as i128);
    let (a, b) = f.alternating_matchings();
    let comps = switcher_components(m, f);
    let quarter = alpha / 4;
    let target = (alpha * nr / 2).ceil().to_integer() as i64;
    let guarantee = quarter - Rational::from_integer(3) / nr;
    let (da, db) = (disc_matching(m, &a)?, disc_matching(m, &b)?);
    let base = |m1: PerfectMatching, m2: PerfectMatching, d1, d2, case, applied, class_size| SplitResult {
        m1,
        m2,
        applied,
        case_taken: case,
        disc1: d1,
        disc2: d2,
        switcher_components: comps.len(),
        class_size,
        target,
        guarantee,
    };
    if da.min(db) >= quarter {
        return Ok(base(a, b, da, db, SplitCase::Trivial, Vec::new(), 0));
    }
    if checked && Rational::from_integer(comps.len() as i128) < alpha * nr {
        return Err(Error::TooFewSwitchers {
            found: comps.len(),
            required: rational::to_f64(&(alpha * nr)),
        });
    }
    let (m1, m2, d2) = if da <= db { (a, b, db) } else { (b, a, da) };
    let mut map1 = m1.into_map();
    let mut map2 = m2.into_map();
    let delta_of = |map1: &[usize], q: &SwitcherRecord| -> i64 {
        let (i, j) = q.rows;
        let now = (m.get(i, map1[i]) + m.get(j, map1[j])) as i64;
        let other = q.psi1_sum + q.psi2_sum - now;
        other - now
    };
    let (pos, neg): (Vec<&SwitcherRecord>, Vec<&SwitcherRecord>) =
        comps.iter().partition(|q| delta_of(&map1, q) > 0);
    let (larger, smaller) = if pos.len() >= neg.len() { (pos, neg) } else { (neg, pos) };
    let case = if d2 < alpha * 3 / 4 { SplitCase::One } else { SplitCase::Two };
    let s1 = signed_sum(m, &PerfectMatching::new(map1.clone())?)?;
    let s2 = signed_sum(m, &PerfectMatching::new(map2.clone())?)?;
    let plan = |class: &[&SwitcherRecord]| {
        let deltas: Vec<i64> = class.iter().map(|q| delta_of(&map1, q)).collect();
        // The literal stopping rule fixes a prefix of the class.
        let mut h = 0i64;
        let mut prefix = 0;
        for d in &deltas {
            match case {
                SplitCase::One if prefix as i64 >= target => break,
                SplitCase::Two if (target - 2..=target + 2).contains(&h) => break,
                _ => {}
            }
            h += d.abs();
            prefix += 1;
        }
        let (chosen, score) = better_family(&deltas, prefix, case, target, s1, s2);
        (deltas, chosen, score)
    };
    // Either sign class with at least alpha n / 2 members supports the
    // argument; the smaller one is used only when strictly better.
    let (mut class, (mut deltas, mut chosen, score)) = (larger.clone(), plan(&larger));
    if Rational::from_integer(2 * smaller.len() as i128) >= alpha * nr && !smaller.is_empty() {
        let alt = plan(&smaller);
        if alt.2 > score {
            (class, deltas, chosen) = (smaller, alt.0, alt.1);
        }
    }

    let mut applied = Vec::new();
    let (mut t1, mut t2) = (s1, s2);
    for (q, &delta) in class.iter().zip(&deltas).enumerate().filter(|(k, _)| chosen[*k]).map(|(_, x)| x) {
        let before = (t1, t2);
        for x in [q.rows.0, q.rows.1] {
            std::mem::swap(&mut map1[x], &mut map2[x]);
        }
        t1 += delta;
        t2 -= delta;
        applied.push(Application {
            switcher: **q,
            delta,
            before,
            after: (t1, t2),
        });
    }
    let m1 = PerfectMatching::new(map1)?;
    let m2 = PerfectMatching::new(map2)?;
    let (d1, d2) = (disc_matching(m, &m1)?, disc_matching(m, &m2)?);
    let class_size = class.len();
    Ok(base(m1, m2, d1, d2, case, applied, class_size))
}

/// Which switchers of the class to apply. Any subfamily whose size (case
/// one) or total shift (case two) meets the stopping rule carries the same
/// guarantee, so the literal prefix is replaced only by one of those with a
/// strictly larger `min(|S(M1)|, |S(M2)|)`. Within a class every `delta`
/// has the same sign, so a family is determined by how many `2`s and `4`s
/// it takes, drawn in class order.
fn better_family(deltas: &[i64], prefix: usize, case: SplitCase, target: i64, s1: i64, s2: i64) -> (Vec<bool>, i64) {
    let mut chosen: Vec<bool> = (0..deltas.len()).map(|k| k < prefix).collect();
    let Some(sign) = deltas.first().map(|d| d.signum()) else {
        return (chosen, s1.abs().min(s2.abs()));
    };
    let score = |h: i64| (s1 + sign * h).abs().min((s2 - sign * h).abs());
    let literal_h: i64 = deltas[..prefix].iter().map(|d| d.abs()).sum();
    let twos = deltas.iter().filter(|d| d.abs() == 2).count();
    let fours = deltas.len() - twos;
    let mut best = (score(literal_h), None);
    for i in 0..=twos {
        for j in 0..=fours {
            let h = 2 * i as i64 + 4 * j as i64;
            let valid = match case {
                SplitCase::One => (i + j) as i64 >= target,
                _ => (target - 2..=target + 2).contains(&h),
            };
            if valid && score(h) > best.0 {
                best = (score(h), Some((i, j)));
            }
        }
    }
    if let Some((i, j)) = best.1 {
        let (mut i, mut j) = (i, j);
        for (k, d) in deltas.iter().enumerate() {
            let take = if d.abs() == 2 { &mut i } else { &mut j };
            chosen[k] = *take > 0;
            if *take > 0 {
                *take -= 1;
            }
        }
    }
    (chosen, best.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::two_factor::Cycle;

    #[test]
    fn single_c4_examples() {
        let m = SignMatrix::from_fn(2, |i, j| i == j);
        let f = TwoFactor::new(2, vec![Cycle::new(vec![0, 1], vec![0, 1]).unwrap()]).unwrap();
        let r = split_two_factor(&m, &f, ratio(1, 2)).unwrap();
        assert_eq!(r.case_taken, SplitCase::Trivial);
        assert!(r.applied.is_empty());
        assert_eq!((r.disc1, r.disc2), (Rational::from_integer(1), Rational::from_integer(1)));
    }

    #[test]
    fn refuses_without_switchers() {
        // Constant rows: no block is a switcher and both halves sum to 0.
        let m = SignMatrix::from_fn(4, |i, _| i % 2 == 0);
        let f = TwoFactor::new(4, vec![
            Cycle::new(vec![0, 1], vec![0, 1]).unwrap(),
            Cycle::new(vec![2, 3], vec![2, 3]).unwrap(),
        ])
        .unwrap();
        let r = split_two_factor(&m, &f, ratio(1, 2));
        assert!(matches!(r, Err(Error::TooFewSwitchers { found: 0, .. })), "{r:?}");
        let r = split_two_factor_unchecked(&m, &f, ratio(1, 2)).unwrap();
        assert!(r.applied.is_empty());
    }

    #[test]
    fn applications_conserve_edges() {
        // n = 4: two C4 blocks, both switchers with sums that cancel.
        let m = SignMatrix::new(4, vec![1, -1, 1, -1, -1, -1, -1, 1, 1, 1, 1, 1, 1, 1, 1, -1]).unwrap();
        let f = TwoFactor::new(4, vec![
            Cycle::new(vec![0, 1], vec![0, 1]).unwrap(),
            Cycle::new(vec![2, 3], vec![2, 3]).unwrap(),
        ])
        .unwrap();
        let r = split_two_factor_unchecked(&m, &f, ratio(1, 1)).unwrap();
        let mut edges: Vec<(usize, usize)> = r.m1.edges().chain(r.m2.edges()).collect();
        edges.sort();
        let mut want: Vec<(usize, usize)> = f.edges().collect();
        want.sort();
        assert_eq!(edges, want);
        for app in &r.applied {
            assert!(matches!(app.delta.abs(), 2 | 4));
            assert_eq!(app.after.0 - app.before.0, app.delta);
            assert_eq!(app.after.1 - app.before.1, -app.delta);
        }
    }
}
