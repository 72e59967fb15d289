//! Seed matching from a maximal family of disjoint switchers.

use serde::Serialize;

use crate::census::{max_disjoint_switchers, SwitcherRecord};
use crate::rational::{self, Rational};
use crate::signing::{disc_matching, signed_sum, PerfectMatching, SignMatrix};

#[derive(Clone, Debug, Serialize)]
pub struct SeedResult {
    pub matching: PerfectMatching,
    pub signed_sum: i64,
    #[serde(with = "rational::as_f64")]
    pub disc: Rational,
    pub family: Vec<SwitcherRecord>,
    /// Whether the higher-sum half of every switcher was taken.
    pub plus: bool,
}

/// Takes `Q+` (the higher-sum matching) or `Q-` from every switcher of the
/// family, matches the leftover rows to the leftover columns in sorted order,
/// and keeps whichever of `M+`, `M-` has the larger `|S|` (`M+` on ties).
pub fn seed_matching(m: &SignMatrix) -> SeedResult {
    let n = m.n();
    let family = max_disjoint_switchers(m);
    let mut plus = vec![usize::MAX; n];
    let mut minus = vec![usize::MAX; n];
    let mut col_used = vec![false; n];
    for q in &family {
        let (hi, lo) = if q.psi1_sum > q.psi2_sum {
            (q.psi1(), q.psi2())
        } else {
            (q.psi2(), q.psi1())
        };
        for (x, y) in hi {
            plus[x] = y;
            col_used[y] = true;
        }
        for (x, y) in lo {
            minus[x] = y;
        }
    }
    let free_cols = (0..n).filter(|&y| !col_used[y]);
    let free_rows: Vec<usize> = (0..n).filter(|&x| plus[x] == usize::MAX).collect();
    for (x, y) in free_rows.into_iter().zip(free_cols) {
        plus[x] = y;
        minus[x] = y;
    }
    let plus = PerfectMatching::new(plus).expect("disjoint switchers plus a leftover matching");
    let minus = PerfectMatching::new(minus).expect("disjoint switchers plus a leftover matching");
    let sp = signed_sum(m, &plus).expect("same n");
    let sm = signed_sum(m, &minus).expect("same n");
    let (matching, s, is_plus) = if sp.abs() >= sm.abs() {
        (plus, sp, true)
    } else {
        (minus, sm, false)
    };
    SeedResult {
        disc: disc_matching(m, &matching).expect("same n"),
        matching,
        signed_sum: s,
        family,
        plus: is_plus,
    }
}
