//! Sign matrices, perfect matchings and 1-factorizations of `K_{n,n}`.
//!
//! Vertices are `x_0..x_{n-1}` and `y_0..y_{n-1}`; entry `(i, j)` of a
//! [`SignMatrix`] is the sign of the edge `x_i y_j`. A [`PerfectMatching`]
//! maps `x_i` to `y_{map[i]}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{ratio, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignMatrix {
    n: usize,
    entries: Vec<i8>,
}

/// Which side of the bipartition a one-sided signing depends on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// `z 1^T`: every row is constant, the sign is decided by `x_i`.
    XSide,
    /// `1 z^T`: every column is constant, the sign is decided by `y_j`.
    YSide,
}

impl SignMatrix {
    /// Builds a matrix from row-major entries, each of which must be `-1` or `+1`.
    pub fn new(n: usize, entries: Vec<i8>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        if let Some(pos) = entries.iter().position(|&e| e != 1 && e != -1) {
            return Err(Error::InvalidEntry {
                row: pos / n,
                col: pos % n,
                value: entries[pos] as i64,
            });
        }
        Ok(SignMatrix { n, entries })
    }

    /// `f(i, j)` returns whether entry `(i, j)` is `+1`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        assert!(n >= 1, "sign matrix needs n >= 1");
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(if f(i, j) { 1 } else { -1 });
            }
        }
        SignMatrix { n, entries }
    }

    pub fn all_plus(n: usize) -> Self {
        Self::from_fn(n, |_, _| true)
    }

    /// The one-sided pattern `z 1^T` (x-side) or `1 z^T` (y-side).
    pub fn one_sided(z: &[i8], orientation: Orientation) -> Result<Self> {
        let n = z.len();
        if let Some(pos) = z.iter().position(|&e| e != 1 && e != -1) {
            return Err(Error::InvalidEntry {
                row: pos,
                col: 0,
                value: z[pos] as i64,
            });
        }
        Ok(match orientation {
            Orientation::XSide => Self::from_fn(n, |i, _| z[i] > 0),
            Orientation::YSide => Self::from_fn(n, |_, j| z[j] > 0),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[i8] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn negated(&self) -> Self {
        SignMatrix {
            n: self.n,
            entries: self.entries.iter().map(|&e| -e).collect(),
        }
    }

    /// Flips the sign of entry `(i, j)` in place.
    pub fn flip(&mut self, i: usize, j: usize) {
        let idx = i * self.n + j;
        self.entries[idx] = -self.entries[idx];
    }

    pub fn total_sum(&self) -> i64 {
        self.entries.iter().map(|&e| e as i64).sum()
    }

    pub fn plus_count(&self) -> usize {
        self.entries.iter().filter(|&&e| e > 0).count()
    }

    /// Entry `(i, j)` of the result is `self[rows[i]][cols[j]]`.
    pub fn permuted(&self, rows: &[usize], cols: &[usize]) -> Self {
        assert_eq!(rows.len(), self.n);
        assert_eq!(cols.len(), self.n);
        Self::from_fn(self.n, |i, j| self.get(rows[i], cols[j]) > 0)
    }

    /// Number of positions where the two matrices differ.
    pub fn hamming(&self, other: &SignMatrix) -> Result<usize> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .filter(|(a, b)| a != b)
            .count())
    }
}

/// A sign vector is balanced when its `+1` and `-1` counts differ by at most one.
pub fn is_balanced(z: &[i8]) -> bool {
    let s: i64 = z.iter().map(|&e| e as i64).sum();
    s.abs() <= 1
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PerfectMatching {
    map: Vec<usize>,
}

impl PerfectMatching {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for (i, &y) in map.iter().enumerate() {
            if y >= n {
                return Err(Error::NotPermutation(format!(
                    "x_{i} is matched to y_{y}, out of range for n = {n}"
                )));
            }
            if std::mem::replace(&mut seen[y], true) {
                return Err(Error::NotPermutation(format!("y_{y} is matched twice")));
            }
        }
        Ok(PerfectMatching { map })
    }

    pub fn identity(n: usize) -> Self {
        PerfectMatching {
            map: (0..n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    /// The y-index matched to `x_i`.
    #[inline]
    pub fn get(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn into_map(self) -> Vec<usize> {
        self.map
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.map.iter().copied().enumerate()
    }

    pub fn inverse(&self) -> PerfectMatching {
        let mut inv = vec![0; self.map.len()];
        for (i, &y) in self.map.iter().enumerate() {
            inv[y] = i;
        }
        PerfectMatching { map: inv }
    }

    /// Applies `x_i -> x_{xs[i]}`, `y_j -> y_{ys[j]}` to every edge.
    pub fn relabeled(&self, xs: &[usize], ys: &[usize]) -> PerfectMatching {
        let mut map = vec![0; self.map.len()];
        for (i, &y) in self.map.iter().enumerate() {
            map[xs[i]] = ys[y];
        }
        PerfectMatching { map }
    }
}

/// `S(pm) = sum_i m[i, pm(i)]`.
pub fn signed_sum(m: &SignMatrix, pm: &PerfectMatching) -> Result<i64> {
    if pm.n() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            found: pm.n(),
        });
    }
    Ok(pm.edges().map(|(i, j)| m.get(i, j) as i64).sum())
}

/// `|S(pm)| / n`.
pub fn disc_matching(m: &SignMatrix, pm: &PerfectMatching) -> Result<Rational> {
    let s = signed_sum(m, pm)?;
    Ok(ratio(s.abs() as i128, m.n() as i128))
}

/// Overall discrepancy `|sum of all entries| / n^2`.
pub fn disc_graph(m: &SignMatrix) -> Rational {
    let n = m.n() as i128;
    ratio(m.total_sum().abs() as i128, n * n)
}

/// `n` pairwise edge-disjoint perfect matchings covering `K_{n,n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OneFactorization {
    matchings: Vec<PerfectMatching>,
}

impl OneFactorization {
    pub fn new(matchings: Vec<PerfectMatching>) -> Result<Self> {
        let rows: Vec<Vec<usize>> = matchings.iter().map(|m| m.map().to_vec()).collect();
        let n = rows.first().map_or(0, Vec::len);
        match validate_factorization(n, &rows) {
            ValidationReport::Valid => Ok(OneFactorization { matchings }),
            ValidationReport::Invalid(v) => Err(Error::InvalidStructure(v.to_string())),
        }
    }

    /// Validates raw rows, e.g. straight from a factorization file.
    pub fn from_rows(n: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        match validate_factorization(n, &rows) {
            ValidationReport::Valid => Ok(OneFactorization {
                matchings: rows.into_iter().map(|map| PerfectMatching { map }).collect(),
            }),
            ValidationReport::Invalid(v) => Err(Error::InvalidStructure(v.to_string())),
        }
    }

    pub fn n(&self) -> usize {
        self.matchings.len()
    }

    pub fn matchings(&self) -> &[PerfectMatching] {
        &self.matchings
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.matchings.iter().map(|m| m.map().to_vec()).collect()
    }

    /// Per-matching signed sums, in order.
    pub fn signed_sums(&self, m: &SignMatrix) -> Result<Vec<i64>> {
        self.matchings.iter().map(|pm| signed_sum(m, pm)).collect()
    }

    /// Smallest discrepancy over the matchings.
    pub fn min_disc(&self, m: &SignMatrix) -> Result<Rational> {
        let n = m.n() as i128;
        let sums = self.signed_sums(m)?;
        let min = sums.iter().map(|s| s.abs()).min().unwrap_or(0);
        Ok(ratio(min as i128, n))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "violation", rename_all = "kebab-case")]
pub enum ValidationReport {
    Valid,
    Invalid(Violation),
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        matches!(self, ValidationReport::Valid)
    }
}

/// First problem found in a candidate 1-factorization. `matching` indexes the
/// list, `x` is the position within the matching and `y` the value there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    WrongMatchingCount { expected: usize, found: usize },
    WrongLength { matching: usize, expected: usize, found: usize },
    OutOfRange { matching: usize, x: usize, y: usize },
    NonBijection { matching: usize, x: usize, y: usize, first_x: usize },
    DuplicateEdge { matching: usize, other: usize, x: usize, y: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Violation::WrongMatchingCount { expected, found } => {
                write!(f, "expected {expected} matchings, found {found}")
            }
            Violation::WrongLength {
                matching,
                expected,
                found,
            } => write!(f, "matching {matching} has {found} entries, expected {expected}"),
            Violation::OutOfRange { matching, x, y } => {
                write!(f, "matching {matching}: x_{x} -> y_{y} is out of range")
            }
            Violation::NonBijection {
                matching,
                x,
                y,
                first_x,
            } => write!(
                f,
                "matching {matching} is not a bijection: y_{y} used by x_{first_x} and x_{x}"
            ),
            Violation::DuplicateEdge {
                matching,
                other,
                x,
                y,
            } => write!(
                f,
                "edge x_{x} y_{y} appears in matchings {other} and {matching}"
            ),
        }
    }
}

/// Checks that `rows` are `n` permutations of `0..n` forming a Latin square.
pub fn validate_factorization(n: usize, rows: &[Vec<usize>]) -> ValidationReport {
    use ValidationReport::Invalid;
    if rows.len() != n {
        return Invalid(Violation::WrongMatchingCount {
            expected: n,
            found: rows.len(),
        });
    }
    // owner[x * n + y] = index of the matching that uses edge x_x y_y
    let mut owner = vec![usize::MAX; n * n];
    for (t, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Invalid(Violation::WrongLength {
                matching: t,
                expected: n,
                found: row.len(),
            });
        }
        let mut used_by = vec![usize::MAX; n];
        for (x, &y) in row.iter().enumerate() {
            if y >= n {
                return Invalid(Violation::OutOfRange { matching: t, x, y });
            }
            if used_by[y] != usize::MAX {
                return Invalid(Violation::NonBijection {
                    matching: t,
                    x,
                    y,
                    first_x: used_by[y],
                });
            }
            used_by[y] = x;
        }
        for (x, &y) in row.iter().enumerate() {
            let slot = &mut owner[x * n + y];
            if *slot != usize::MAX {
                return Invalid(Violation::DuplicateEdge {
                    matching: t,
                    other: *slot,
                    x,
                    y,
                });
            }
            *slot = t;
        }
    }
    ValidationReport::Valid
}

/// The cyclic Latin square `map[t][i] = (i + t) mod n`.
pub fn cyclic_factorization(n: usize) -> OneFactorization {
    OneFactorization {
        matchings: (0..n)
            .map(|t| PerfectMatching {
                map: (0..n).map(|i| (i + t) % n).collect(),
            })
            .collect(),
    }
}
