//! Brute-force reference implementations.
//!
//! Everything here is exhaustive and deliberately simple. These functions
//! exist to check the fast paths on small inputs.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::census::SwitcherCensus;
use crate::error::{Error, Result};
use crate::io::CompleteFactorization;
use crate::rational::{ratio, Rational};
use crate::signing::{OneFactorization, Orientation, SignMatrix};
use crate::spectral::CloseCertificate;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_n_factorizations: usize,
    pub max_n_enumeration: usize,
    pub max_n_nearest: usize,
    pub timeout: Duration,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_n_factorizations: 5,
            max_n_enumeration: 10,
            max_n_nearest: 14,
            timeout: Duration::from_secs(60),
        }
    }
}

impl OracleBudget {
    pub fn validate(&self) -> Result<()> {
        if self.max_n_factorizations == 0
            || self.max_n_enumeration == 0
            || self.max_n_nearest == 0
            || self.timeout.is_zero()
        {
            return Err(Error::InvalidArgument("oracle budgets must be positive".into()));
        }
        Ok(())
    }
}

/// Calls `f` once for every 1-factorization of `K_{n,n}`.
///
/// A factorization is an unordered set of matchings, so each is visited once
/// in the normal form where matching `t` sends `x_0` to `y_t` (exactly one
/// matching of any factorization contains the edge `x_0 y_t`). `f` receives
/// the rows of the Latin square and returns `false` to stop.
pub fn for_each_factorization(n: usize, mut f: impl FnMut(&[Vec<usize>]) -> bool) {
    if n == 0 {
        return;
    }
    let mut rows = vec![vec![usize::MAX; n]; n];
    // used[x] = bitmask of y already matched to x by an earlier matching
    let mut used = vec![0u64; n];
    let mut col_taken = 0u64;
    fill(n, 0, 0, &mut rows, &mut used, &mut col_taken, &mut f);
}

fn fill(
    n: usize,
    t: usize,
    x: usize,
    rows: &mut Vec<Vec<usize>>,
    used: &mut Vec<u64>,
    col_taken: &mut u64,
    f: &mut impl FnMut(&[Vec<usize>]) -> bool,
) -> bool {
    if t == n {
        return f(rows);
    }
    if x == n {
        let mut fresh = 0u64;
        return fill(n, t + 1, 0, rows, used, &mut fresh, f);
    }
    let candidates: Vec<usize> = if x == 0 {
        vec![t]
    } else {
        (0..n).filter(|&y| used[x] >> y & 1 == 0 && *col_taken >> y & 1 == 0).collect()
    };
    for y in candidates {
        if used[x] >> y & 1 == 1 || *col_taken >> y & 1 == 1 {
            continue;
        }
        rows[t][x] = y;
        used[x] |= 1 << y;
        *col_taken |= 1 << y;
        let go_on = fill(n, t, x + 1, rows, used, col_taken, f);
        used[x] &= !(1 << y);
        *col_taken &= !(1 << y);
        if !go_on {
            return false;
        }
    }
    true
}

/// A 1-factorization maximizing the minimum matching discrepancy, with that
/// optimum. Ties go to the first factorization in enumeration order.
pub fn best_factorization_bruteforce(
    m: &SignMatrix,
    budget: &OracleBudget,
) -> Result<(OneFactorization, Rational)> {
    let n = m.n();
    if n > budget.max_n_factorizations {
        return Err(Error::OverBudget {
            what: "best_factorization_bruteforce",
            n,
            limit: budget.max_n_factorizations,
        });
    }
    let start = Instant::now();
    let mut best: Option<(i64, Vec<Vec<usize>>)> = None;
    let mut timed_out = false;
    for_each_factorization(n, |rows| {
        let score = rows
            .iter()
            .map(|r| r.iter().enumerate().map(|(i, &j)| m.get(i, j) as i64).sum::<i64>().abs())
            .min()
            .unwrap_or(0);
        if best.as_ref().is_none_or(|(b, _)| score > *b) {
            best = Some((score, rows.to_vec()));
        }
        if start.elapsed() > budget.timeout {
            timed_out = true;
            return false;
        }
        true
    });
    if timed_out {
        return Err(Error::Timeout {
            what: "best_factorization_bruteforce",
            elapsed_ms: start.elapsed().as_millis(),
        });
    }
    let (score, rows) = best.expect("K_{n,n} has a 1-factorization");
    Ok((OneFactorization::from_rows(n, rows)?, ratio(score as i128, n as i128)))
}

/// A Latin square built row by row, each row a perfect matching of columns
/// to unused symbols found by augmenting paths in random order (a Latin
/// rectangle always extends), then scrambled by random row, column and
/// symbol permutations. Not uniform over Latin squares.
pub fn random_latin_square<R: Rng + ?Sized>(n: usize, rng: &mut R) -> OneFactorization {
    let mut used = vec![vec![false; n]; n];
    let mut sq = Vec::with_capacity(n);
    for _ in 0..n {
        let row = random_row(n, &used, rng);
        for (c, &v) in row.iter().enumerate() {
            used[c][v] = true;
        }
        sq.push(row);
    }
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..n).collect();
    let mut syms: Vec<usize> = (0..n).collect();
    rows.shuffle(rng);
    cols.shuffle(rng);
    syms.shuffle(rng);
    let out = (0..n)
        .map(|t| (0..n).map(|i| syms[sq[rows[t]][cols[i]]]).collect())
        .collect();
    OneFactorization::from_rows(n, out).expect("permuted Latin square")
}

fn random_row<R: Rng + ?Sized>(n: usize, used: &[Vec<bool>], rng: &mut R) -> Vec<usize> {
    let mut owner = vec![usize::MAX; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let prefs: Vec<Vec<usize>> = (0..n)
        .map(|c| {
            let mut v: Vec<usize> = (0..n).filter(|&s| !used[c][s]).collect();
            v.shuffle(rng);
            v
        })
        .collect();
    for &c in &order {
        let mut seen = vec![false; n];
        let found = augment(c, &prefs, &mut owner, &mut seen);
        assert!(found, "every Latin rectangle extends by a row");
    }
    let mut row = vec![0; n];
    for (s, &c) in owner.iter().enumerate() {
        row[c] = s;
    }
    row
}

fn augment(c: usize, prefs: &[Vec<usize>], owner: &mut [usize], seen: &mut [bool]) -> bool {
    for &s in &prefs[c] {
        if !seen[s] {
            seen[s] = true;
            if owner[s] == usize::MAX || augment(owner[s], prefs, owner, seen) {
                owner[s] = c;
                return true;
            }
        }
    }
    false
}

/// Direct scan of all `C(n,2)^2` four-cycles.
pub fn switcher_count_bruteforce(m: &SignMatrix, budget: &OracleBudget) -> Result<SwitcherCensus> {
    let n = m.n();
    if n > budget.max_n_enumeration {
        return Err(Error::OverBudget {
            what: "switcher_count_bruteforce",
            n,
            limit: budget.max_n_enumeration,
        });
    }
    let (mut s1, mut s2) = (0u64, 0u64);
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                for l in k + 1..n {
                    let psi1 = m.get(i, k) as i64 + m.get(j, l) as i64;
                    let psi2 = m.get(i, l) as i64 + m.get(j, k) as i64;
                    if psi1 == psi2 {
                        continue;
                    }
                    let product = m.get(i, k) * m.get(i, l) * m.get(j, k) * m.get(j, l);
                    if product == 1 {
                        s1 += 1;
                    } else {
                        s2 += 1;
                    }
                }
            }
        }
    }
    Ok(SwitcherCensus {
        n,
        s: s1 + s2,
        s1,
        s2,
    })
}

/// The closest balanced one-sided signing over all `z` and both
/// orientations. Ties go to x-side, then to the first `z` in order of the
/// bitmask with bit `i` set meaning `z_i = -1`.
pub fn nearest_one_sided_bruteforce(
    m: &SignMatrix,
    alpha: f64,
    budget: &OracleBudget,
) -> Result<CloseCertificate> {
    let n = m.n();
    if n > budget.max_n_nearest {
        return Err(Error::OverBudget {
            what: "nearest_one_sided_bruteforce",
            n,
            limit: budget.max_n_nearest,
        });
    }
    let row_plus: Vec<usize> = (0..n).map(|i| (0..n).filter(|&j| m.get(i, j) > 0).count()).collect();
    let col_plus: Vec<usize> = (0..n).map(|j| (0..n).filter(|&i| m.get(i, j) > 0).count()).collect();
    let mut best: Option<(usize, Orientation, u32)> = None;
    for (orientation, plus) in [(Orientation::XSide, &row_plus), (Orientation::YSide, &col_plus)] {
        for mask in 0u32..(1u32 << n) {
            let minus = mask.count_ones() as usize;
            if n.abs_diff(2 * minus) > 1 {
                continue;
            }
            let hamming: usize = (0..n)
                .map(|i| if mask >> i & 1 == 1 { plus[i] } else { n - plus[i] })
                .sum();
            if best.is_none_or(|(h, _, _)| hamming < h) {
                best = Some((hamming, orientation, mask));
            }
        }
    }
    let (_, orientation, mask) = best.expect("a balanced vector exists");
    let z: Vec<i8> = (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
    CloseCertificate::recount(m, orientation, z, alpha)
}

/// Searches for a 2-factorization of `K_n` (odd `n`) whose factors all have
/// the source cycle type: `(n-3)/4 C4 + C3` for `n = 3 mod 4` and
/// `(n-5)/4 C4 + C5` for `n = 1 mod 4`. `Ok(None)` means the search space
/// was exhausted without a solution.
pub fn crown_factorization_search(
    n: usize,
    timeout: Duration,
) -> Result<Option<CompleteFactorization>> {
    if n % 2 == 0 || !(3..=15).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "crown search needs odd n in 3..=15, got {n}"
        )));
    }
    let types = complete_source_type(n);
    let adj: Vec<u64> = (0..n).map(|v| ((1u64 << n) - 1) & !(1 << v)).collect();
    // Every 2-factor of one type is equivalent under relabeling, so the
    // first factor is fixed to consecutive blocks.
    let mut first = Vec::new();
    let mut next = 0;
    for &len in &types {
        first.push((next..next + len).collect::<Vec<_>>());
        next += len;
    }
    let search = CycleSearch::new(adj, types, (n - 1) / 2, timeout);
    search.run(Some(first))
}

/// `K_n` cycle lengths for odd `n`, ascending.
pub fn complete_source_type(n: usize) -> Vec<usize> {
    let (c4, odd) = if n % 4 == 3 { ((n - 3) / 4, 3) } else { ((n - 5) / 4, 5) };
    let mut t = vec![odd; 1];
    t.extend(std::iter::repeat_n(4, c4));
    t.sort_unstable();
    t
}

/// Searches for a 2-factorization of `K_{n,n}` minus the diagonal whose
/// factors all have cycle lengths `types` (in vertices). Cycles are returned
/// as vertex lists with `x_i = i` and `y_j = n + j`.
pub fn bipartite_crown_search(
    n: usize,
    types: &[usize],
    timeout: Duration,
) -> Result<Option<CompleteFactorization>> {
    if n % 2 == 0 || n < 3 || 2 * n > 64 {
        return Err(Error::InvalidArgument(format!(
            "bipartite crown search needs odd n in 3..=31, got {n}"
        )));
    }
    if types.iter().sum::<usize>() != 2 * n || types.iter().any(|&l| l < 4 || l % 2 == 1) {
        return Err(Error::InvalidArgument(format!(
            "cycle type {types:?} is not a bipartite 2-factor of K_{{{n},{n}}}"
        )));
    }
    let adj: Vec<u64> = (0..2 * n)
        .map(|v| {
            if v < n {
                (((1u64 << n) - 1) << n) & !(1 << (n + v))
            } else {
                ((1u64 << n) - 1) & !(1 << (v - n))
            }
        })
        .collect();
    let mut types = types.to_vec();
    types.sort_unstable();
    CycleSearch::new(adj, types, (n - 1) / 2, timeout).run(None)
}

/// Backtracking decomposition of a regular graph on at most 64 vertices into
/// 2-factors that all share one cycle type.
///
/// Within a factor, each cycle starts at the lowest uncovered vertex and its
/// second vertex is smaller than its last, so every factor is built once.
/// Factors are ordered by requiring each to contain the smallest remaining
/// neighbour of vertex 0. The final factor is whatever remains and is only
/// checked.
struct CycleSearch {
    adj: Vec<u64>,
    types: Vec<usize>,
    factors: usize,
    deadline: Instant,
    started: Instant,
    timed_out: bool,
    found: Vec<Vec<Vec<usize>>>,
}

impl CycleSearch {
    fn new(adj: Vec<u64>, types: Vec<usize>, factors: usize, timeout: Duration) -> Self {
        let started = Instant::now();
        CycleSearch {
            adj,
            types,
            factors,
            deadline: started + timeout,
            started,
            timed_out: false,
            found: Vec::new(),
        }
    }

    fn run(mut self, first: Option<Vec<Vec<usize>>>) -> Result<Option<CompleteFactorization>> {
        if let Some(first) = first {
            for cycle in &first {
                self.remove_cycle(cycle);
            }
            self.found.push(first);
        }
        let ok = self.next_factor();
        if self.timed_out {
            return Err(Error::Timeout {
                what: "crown search",
                elapsed_ms: self.started.elapsed().as_millis(),
            });
        }
        Ok(ok.then_some(self.found))
    }

    fn remove_cycle(&mut self, c: &[usize]) {
        for k in 0..c.len() {
            let (u, v) = (c[k], c[(k + 1) % c.len()]);
            self.adj[u] &= !(1 << v);
            self.adj[v] &= !(1 << u);
        }
    }

    fn restore_cycle(&mut self, c: &[usize]) {
        for k in 0..c.len() {
            let (u, v) = (c[k], c[(k + 1) % c.len()]);
            self.adj[u] |= 1 << v;
            self.adj[v] |= 1 << u;
        }
    }

    fn next_factor(&mut self) -> bool {
        if self.found.len() + 1 == self.factors {
            return self.check_last();
        }
        if self.found.len() == self.factors {
            return self.adj.iter().all(|&a| a == 0);
        }
        let all = if self.adj.len() == 64 { u64::MAX } else { (1u64 << self.adj.len()) - 1 };
        self.found.push(Vec::new());
        let remaining = self.types.clone();
        let ok = self.place(all, &remaining);
        if !ok {
            self.found.pop();
        }
        ok
    }

    /// Reads off the cycles of the remaining 2-regular graph.
    fn check_last(&mut self) -> bool {
        let nv = self.adj.len();
        if self.adj.iter().any(|a| a.count_ones() != 2) {
            return false;
        }
        let mut seen = 0u64;
        let mut cycles = Vec::new();
        for s in 0..nv {
            if seen >> s & 1 == 1 {
                continue;
            }
            let mut cycle = vec![s];
            seen |= 1 << s;
            let mut prev = s;
            let mut cur = self.adj[s].trailing_zeros() as usize;
            while cur != s {
                cycle.push(cur);
                seen |= 1 << cur;
                let nb = self.adj[cur] & !(1 << prev);
                prev = cur;
                cur = nb.trailing_zeros() as usize;
            }
            cycles.push(cycle);
        }
        let mut lens: Vec<usize> = cycles.iter().map(Vec::len).collect();
        lens.sort_unstable();
        if lens != self.types {
            return false;
        }
        self.found.push(cycles);
        true
    }

    fn place(&mut self, uncovered: u64, remaining: &[usize]) -> bool {
        if Instant::now() > self.deadline {
            self.timed_out = true;
            return false;
        }
        if uncovered == 0 {
            let ok = self.next_factor();
            return ok;
        }
        let v = uncovered.trailing_zeros() as usize;
        let first_cycle = v == 0;
        let mut tried = Vec::new();
        for (idx, &len) in remaining.iter().enumerate() {
            if tried.contains(&len) {
                continue;
            }
            tried.push(len);
            let mut rest = remaining.to_vec();
            rest.remove(idx);
            let mut path = vec![v];
            if self.extend(&mut path, len, uncovered & !(1 << v), &rest, first_cycle) {
                return true;
            }
            if self.timed_out {
                return false;
            }
        }
        false
    }

    fn extend(&mut self, path: &mut Vec<usize>, len: usize, free: u64, rest: &[usize], first_cycle: bool) -> bool {
        let start = path[0];
        let last = *path.last().unwrap();
        if path.len() == len {
            if self.adj[last] >> start & 1 == 0 || path[1] > last {
                return false;
            }
            let cycle = path.clone();
            self.remove_cycle(&cycle);
            if self.factor_feasible(free) {
                self.found.last_mut().unwrap().push(cycle.clone());
                if self.place(free, rest) {
                    return true;
                }
                self.found.last_mut().unwrap().pop();
            }
            self.restore_cycle(&cycle);
            return false;
        }
        let mut cand = self.adj[last] & free;
        if path.len() == 1 {
            if first_cycle {
                // The factor must use vertex 0's smallest remaining edge.
                let low = self.adj[start].trailing_zeros();
                cand &= 1 << low;
            }
            // Leave a larger neighbour of the start for the closing edge.
            let top = 63 - self.adj[start].leading_zeros();
            cand &= (1u64 << top) - 1;
        }
        if path.len() + 1 == len {
            cand &= self.adj[start];
        }
        while cand != 0 {
            let u = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            path.push(u);
            if self.extend(path, len, free & !(1 << u), rest, first_cycle) {
                return true;
            }
            path.pop();
            if self.timed_out {
                return false;
            }
        }
        false
    }

    /// Every vertex still to be covered in this factor needs two remaining
    /// edges into the uncovered set.
    fn factor_feasible(&self, free: u64) -> bool {
        let mut f = free;
        while f != 0 {
            let u = f.trailing_zeros() as usize;
            f &= f - 1;
            if (self.adj[u] & free).count_ones() < 2 {
                return false;
            }
        }
        true
    }
}

/// Runs `f` over every signing of `K_{n,n}` (`2^(n^2)` of them).
pub fn for_each_signing(n: usize, f: impl Fn(&SignMatrix) + Sync) {
    assert!(n * n < 32, "exhaustive sweep is limited to n <= 5");
    (0u32..(1u32 << (n * n))).into_par_iter().for_each(|bits| {
        let m = SignMatrix::from_fn(n, |i, j| bits >> (i * n + j) & 1 == 0);
        f(&m);
    });
}
