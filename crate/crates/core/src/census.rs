//! Switcher census.
//!
//! A switcher is a 4-cycle `x_i y_k x_j y_l` whose two perfect matchings
//! `psi1 = {x_i y_k, x_j y_l}` and `psi2 = {x_i y_l, x_j y_k}` have different
//! signed sums. It is Type-2 when the product of its four signs is `-1`
//! (rank-2 submatrix) and Type-1 otherwise.
//!
//! For a fixed row pair `{i, j}` write `d_k = m[i][k] - m[j][k]`, which is
//! `0` for columns of type `(+,+)` and `(-,-)`, `+2` for `(+,-)` and `-2`
//! for `(-,+)`. Since `S(psi1) - S(psi2) = d_k - d_l`, the column pair
//! `{k, l}` is a switcher iff `d_k != d_l`. With `a, b, c, d` counting the
//! column types `(+,+), (+,-), (-,+), (-,-)`, the row pair therefore holds
//! `b*c` Type-1 and `(b+c)(a+d)` Type-2 switchers.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::signing::SignMatrix;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct SwitcherCensus {
    pub n: usize,
    pub s: u64,
    pub s1: u64,
    pub s2: u64,
}

impl SwitcherCensus {
    /// `s / n^4`.
    pub fn density(&self) -> f64 {
        self.s as f64 / (self.n as f64).powi(4)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SwitcherType {
    One,
    Two,
}

impl Serialize for SwitcherType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(match self {
            SwitcherType::One => 1,
            SwitcherType::Two => 2,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SwitcherRecord {
    /// `(i, j)` with `i < j`.
    pub rows: (usize, usize),
    /// `(k, l)` with `k < l`.
    pub cols: (usize, usize),
    #[serde(rename = "type")]
    pub kind: SwitcherType,
    /// `S({x_i y_k, x_j y_l})`.
    pub psi1_sum: i64,
    /// `S({x_i y_l, x_j y_k})`.
    pub psi2_sum: i64,
}

impl SwitcherRecord {
    /// Returns the record if the 4-cycle on `rows` x `cols` is a switcher.
    pub fn classify(m: &SignMatrix, rows: (usize, usize), cols: (usize, usize)) -> Option<Self> {
        let (i, j) = (rows.0.min(rows.1), rows.0.max(rows.1));
        let (k, l) = (cols.0.min(cols.1), cols.0.max(cols.1));
        if i == j || k == l {
            return None;
        }
        let (ik, il, jk, jl) = (m.get(i, k), m.get(i, l), m.get(j, k), m.get(j, l));
        let psi1_sum = (ik + jl) as i64;
        let psi2_sum = (il + jk) as i64;
        if psi1_sum == psi2_sum {
            return None;
        }
        let kind = if ik * il * jk * jl < 0 {
            SwitcherType::Two
        } else {
            SwitcherType::One
        };
        Some(SwitcherRecord {
            rows: (i, j),
            cols: (k, l),
            kind,
            psi1_sum,
            psi2_sum,
        })
    }

    pub fn psi1(&self) -> [(usize, usize); 2] {
        [(self.rows.0, self.cols.0), (self.rows.1, self.cols.1)]
    }

    pub fn psi2(&self) -> [(usize, usize); 2] {
        [(self.rows.0, self.cols.1), (self.rows.1, self.cols.0)]
    }

    /// `S(psi1) - S(psi2)`, always one of `+-2, +-4`.
    pub fn delta(&self) -> i64 {
        self.psi1_sum - self.psi2_sum
    }

    pub fn is_disjoint_from(&self, other: &SwitcherRecord) -> bool {
        let (a, b) = (self.rows, other.rows);
        let (c, d) = (self.cols, other.cols);
        a.0 != b.0 && a.0 != b.1 && a.1 != b.0 && a.1 != b.1
            && c.0 != d.0 && c.0 != d.1 && c.1 != d.0 && c.1 != d.1
    }
}

pub fn is_switcher(m: &SignMatrix, rows: (usize, usize), cols: (usize, usize)) -> bool {
    SwitcherRecord::classify(m, rows, cols).is_some()
}

/// Column-type counts `(a, b, c, d)` for the row pair `(i, j)`.
fn column_types(m: &SignMatrix, i: usize, j: usize) -> [u64; 4] {
    let mut counts = [0u64; 4];
    for (&p, &q) in m.row(i).iter().zip(m.row(j)) {
        let idx = match (p > 0, q > 0) {
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (false, false) => 3,
        };
        counts[idx] += 1;
    }
    counts
}

/// Exact census in `O(n^3)` time.
pub fn count_switchers(m: &SignMatrix) -> SwitcherCensus {
    let n = m.n();
    let (s1, s2) = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = (0u64, 0u64);
            for j in i + 1..n {
                let [a, b, c, d] = column_types(m, i, j);
                acc.0 += b * c;
                acc.1 += (b + c) * (a + d);
            }
            acc
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    SwitcherCensus {
        n,
        s: s1 + s2,
        s1,
        s2,
    }
}

/// `tr((M M^T)^2) = sum_{i,j} <R_i, R_j>^2`, in exact integers.
pub fn trace_fourth(m: &SignMatrix) -> i128 {
    let n = m.n();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let ri = m.row(i);
            (0..n)
                .map(|j| {
                    let dot: i64 = ri.iter().zip(m.row(j)).map(|(&a, &b)| (a * b) as i64).sum();
                    (dot as i128) * (dot as i128)
                })
                .sum::<i128>()
        })
        .sum()
}

/// `s2 = (n^4 - tr((M M^T)^2)) / 8`.
pub fn s2_via_trace(m: &SignMatrix) -> Result<u64> {
    let n = m.n() as i128;
    let diff = n.pow(4) - trace_fourth(m);
    if diff < 0 || diff % 8 != 0 {
        return Err(Error::Inconsistent(format!(
            "n^4 - tr((MM^T)^2) = {diff} is not a non-negative multiple of 8"
        )));
    }
    Ok((diff / 8) as u64)
}

/// All switchers in lexicographic `(i, j, k, l)` order, truncated at `limit`.
pub fn enumerate_switchers(m: &SignMatrix, limit: Option<usize>) -> Vec<SwitcherRecord> {
    let n = m.n();
    let cap = limit.unwrap_or(usize::MAX);
    let mut out = Vec::new();
    if cap == 0 {
        return out;
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                for l in k + 1..n {
                    if let Some(rec) = SwitcherRecord::classify(m, (i, j), (k, l)) {
                        out.push(rec);
                        if out.len() == cap {
                            return out;
                        }
                    }
                }
            }
        }
    }
    out
}

/// Greedy first-fit over the lexicographic enumeration: a maximal family of
/// pairwise vertex-disjoint switchers.
///
/// For a row pair with both rows free, the first switcher in lexicographic
/// order among free columns uses the first free column `k` and the first
/// later free column whose `d`-value differs from `d_k`; if there is none,
/// every remaining free column pair has equal `d` and the row pair holds no
/// free switcher. This keeps the scan at `O(n^3)`.
pub fn max_disjoint_switchers(m: &SignMatrix) -> Vec<SwitcherRecord> {
    let n = m.n();
    let mut row_used = vec![false; n];
    let mut col_used = vec![false; n];
    let mut family = Vec::new();
    for i in 0..n {
        if row_used[i] {
            continue;
        }
        for j in i + 1..n {
            if row_used[j] {
                continue;
            }
            let Some(k) = (0..n).find(|&k| !col_used[k]) else {
                return family;
            };
            let dk = m.get(i, k) - m.get(j, k);
            let l = (k + 1..n).find(|&l| !col_used[l] && m.get(i, l) - m.get(j, l) != dk);
            if let Some(l) = l {
                let rec = SwitcherRecord::classify(m, (i, j), (k, l)).expect("d_k != d_l");
                row_used[i] = true;
                row_used[j] = true;
                col_used[k] = true;
                col_used[l] = true;
                family.push(rec);
                break;
            }
        }
    }
    family
}
