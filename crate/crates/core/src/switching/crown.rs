//! 2-factorizations of the crown graph `K_{n,n} - I` for odd `n`.
//!
//! Exact mode searches `K_n` for a 2-factorization into `C4`s plus one `C3`
//! or `C5` and lifts it through the canonical double cover. `K_9` has no
//! factorization into `C4 + C5`, so when that search is exhausted the
//! bipartite graph is searched directly for the lifted cycle type.
//!
//! Heuristic mode is an explicit construction for every odd `n != 5`. Pair
//! the first `n - 1` vertices on each side as `P_a = Q_a = {2a, 2a + 1}` and
//! take an idempotent Latin square `L` of order `k = (n - 1) / 2`. Factor `j`
//! is the union of the `C4`s on `P_a` x `Q_{L[j][a]}`, except that the block
//! `P_j` x `Q_j` loses its two diagonal edges and is closed into a `C6`
//! through `x_{n-1}` and `y_{n-1}`. Every factor is `(n-3)/2 C4 + C6`.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{OnceLock, RwLock};
use std::time::Duration;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{parse_crown_cache, write_crown_cache, CompleteFactorization};
use crate::oracle::{bipartite_crown_search, crown_factorization_search};
use crate::signing::PerfectMatching;
use crate::two_factor::{check_complete_two_factorization, lift_two_factorization, Cycle, TwoFactor, TwoFactorization, Vertex};

/// Largest `n` for the exact search.
pub const EXACT_CUTOFF: usize = 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrownMode {
    Exact,
    Heuristic,
    /// Exact up to the cutoff, heuristic beyond it.
    Auto,
}

impl std::str::FromStr for CrownMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(CrownMode::Exact),
            "heuristic" => Ok(CrownMode::Heuristic),
            "auto" => Ok(CrownMode::Auto),
            _ => Err(Error::InvalidArgument(format!("unknown crown mode {s:?}"))),
        }
    }
}

/// How a crown decomposition was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrownSource {
    CompleteLift,
    BipartiteSearch,
    Explicit,
}

#[derive(Clone, Debug)]
enum Entry {
    Complete(CompleteFactorization),
    Bipartite(Vec<Vec<Vec<usize>>>),
}

/// Results of the exact search keyed by `n`. Readers share the lock; a miss
/// computes outside the lock and inserts once. When a directory is set,
/// complete-graph factorizations are also read from and written to
/// `crown-<n>.txt` there.
#[derive(Debug, Default)]
pub struct CrownCache {
    mem: RwLock<HashMap<usize, Entry>>,
    dir: Option<PathBuf>,
}

impl CrownCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_dir(dir: impl Into<PathBuf>) -> Self {
        CrownCache {
            mem: RwLock::default(),
            dir: Some(dir.into()),
        }
    }

    /// Process-wide cache without disk persistence.
    pub fn global() -> &'static CrownCache {
        static CACHE: OnceLock<CrownCache> = OnceLock::new();
        CACHE.get_or_init(CrownCache::new)
    }

    fn path(&self, n: usize) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("crown-{n}.txt")))
    }

    fn get(&self, n: usize) -> Option<Entry> {
        if let Some(e) = self.mem.read().expect("cache lock").get(&n) {
            return Some(e.clone());
        }
        let text = std::fs::read_to_string(self.path(n)?).ok()?;
        let (m, factors) = parse_crown_cache(&text).ok()?;
        if m != n || check_complete_two_factorization(n, &factors).is_err() {
            return None;
        }
        let entry = Entry::Complete(factors);
        self.mem.write().expect("cache lock").insert(n, entry.clone());
        Some(entry)
    }

    fn put(&self, n: usize, entry: Entry) {
        if let (Entry::Complete(f), Some(path)) = (&entry, self.path(n)) {
            // A failed write only loses the cache, never the result.
            let _ = std::fs::write(path, write_crown_cache(n, f));
        }
        self.mem.write().expect("cache lock").entry(n).or_insert(entry);
    }

    /// The cached complete-graph factorization for `n`, if one is known.
    pub fn complete(&self, n: usize) -> Option<CompleteFactorization> {
        match self.get(n)? {
            Entry::Complete(f) => Some(f),
            Entry::Bipartite(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CrownOptions {
    pub mode: CrownMode,
    /// Time limit for each exact search.
    pub timeout: Duration,
}

impl Default for CrownOptions {
    fn default() -> Self {
        CrownOptions {
            mode: CrownMode::Auto,
            timeout: Duration::from_secs(30),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CrownOutcome {
    pub factorization: TwoFactorization,
    pub source: CrownSource,
}

/// Cycle type of the lifted factors, in vertices: `(n-3)/2` fours and a six
/// for `n = 3 mod 4`, `(n-5)/2` fours and a ten for `n = 1 mod 4`.
pub fn lifted_type(n: usize) -> Vec<usize> {
    let (c4, big) = if n % 4 == 3 { ((n - 3) / 2, 6) } else { ((n - 5) / 2, 10) };
    let mut t = vec![4; c4];
    t.push(big);
    t
}

/// Decomposes `K_{n,n} - leave` into `(n - 1) / 2` 2-factors.
pub fn crown_decompose_odd(
    n: usize,
    leave: &PerfectMatching,
    opts: &CrownOptions,
    cache: &CrownCache,
) -> Result<CrownOutcome> {
    if n % 2 == 0 || n < 3 {
        return Err(Error::InvalidArgument(format!("crown decomposition needs odd n >= 3, got {n}")));
    }
    if leave.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: leave.n(),
        });
    }
    let (diagonal, source) = match opts.mode {
        CrownMode::Exact => exact(n, opts.timeout, cache)?,
        CrownMode::Heuristic => (explicit(n)?, CrownSource::Explicit),
        CrownMode::Auto if n <= EXACT_CUTOFF => match exact(n, opts.timeout, cache) {
            Ok(r) => r,
            Err(_) => (explicit(n)?, CrownSource::Explicit),
        },
        CrownMode::Auto => (explicit(n)?, CrownSource::Explicit),
    };
    let xs: Vec<usize> = (0..n).collect();
    Ok(CrownOutcome {
        factorization: diagonal.relabeled(&xs, leave.map()),
        source,
    })
}

/// Exact decomposition with the identity leave.
fn exact(n: usize, timeout: Duration, cache: &CrownCache) -> Result<(TwoFactorization, CrownSource)> {
    if n > EXACT_CUTOFF {
        return Err(Error::OverBudget {
            what: "exact crown search",
            n,
            limit: EXACT_CUTOFF,
        });
    }
    let entry = match cache.get(n) {
        Some(e) => e,
        None => {
            let e = match crown_factorization_search(n, timeout)? {
                Some(f) => Entry::Complete(f),
                None => match bipartite_crown_search(n, &lifted_type(n), timeout)? {
                    Some(f) => Entry::Bipartite(f),
                    None => {
                        return Err(Error::Construction {
                            stage: "crown",
                            message: format!("no crown decomposition of the searched types exists for n = {n}"),
                        })
                    }
                },
            };
            cache.put(n, e.clone());
            e
        }
    };
    match entry {
        Entry::Complete(f) => Ok((lift_two_factorization(n, &f)?, CrownSource::CompleteLift)),
        Entry::Bipartite(f) => Ok((from_bipartite(n, &f)?, CrownSource::BipartiteSearch)),
    }
}

fn from_bipartite(n: usize, factors: &[Vec<Vec<usize>>]) -> Result<TwoFactorization> {
    let factors = factors
        .iter()
        .map(|factor| {
            let cycles = factor
                .iter()
                .map(|c| {
                    let walk: Vec<Vertex> = c
                        .iter()
                        .map(|&v| if v < n { Vertex::X(v) } else { Vertex::Y(v - n) })
                        .collect();
                    Cycle::from_walk(&walk)
                })
                .collect::<Result<Vec<_>>>()?;
            TwoFactor::new(n, cycles)
        })
        .collect::<Result<Vec<_>>>()?;
    TwoFactorization::new(n, factors, Some(PerfectMatching::identity(n)))
}

/// Idempotent Latin square of order `k` (`L[i][i] = i`); none exists for
/// `k = 2`.
pub fn idempotent_latin_square(k: usize) -> Option<Vec<Vec<usize>>> {
    match k {
        0 | 2 => None,
        _ if k % 2 == 1 => {
            let half = (k + 1) / 2;
            Some((0..k).map(|i| (0..k).map(|j| (i + j) * half % k).collect()).collect())
        }
        _ => {
            // Prolongation of the odd square of order q along the transversal
            // (i, i + 1).
            let q = k - 1;
            let base = idempotent_latin_square(q)?;
            let tau = |i: usize| (i + 1) % q;
            let tau_inv = |j: usize| (j + q - 1) % q;
            let mut l = vec![vec![0; k]; k];
            for i in 0..q {
                for j in 0..q {
                    l[i][j] = base[i][j];
                }
                l[i][tau(i)] = q;
                l[i][q] = base[i][tau(i)];
            }
            for j in 0..q {
                l[q][j] = base[tau_inv(j)][j];
            }
            l[q][q] = q;
            Some(l)
        }
    }
}

/// The explicit `(n-3)/2 C4 + C6` construction with the identity leave.
fn explicit(n: usize) -> Result<TwoFactorization> {
    let k = (n - 1) / 2;
    let l = idempotent_latin_square(k).ok_or_else(|| Error::Construction {
        stage: "crown",
        message: format!("the explicit construction does not exist for n = {n}; use exact mode"),
    })?;
    let last = n - 1;
    let mut factors = Vec::with_capacity(k);
    for (j, row) in l.iter().enumerate() {
        let mut cycles = Vec::with_capacity(k);
        for (a, &b) in row.iter().enumerate() {
            let (x0, x1, y0, y1) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
            if a == j {
                // x0 y1 x_last y0 x1 y_last
                cycles.push(Cycle::new(vec![x0, last, x1], vec![y1, y0, last])?);
            } else {
                cycles.push(Cycle::new(vec![x0, x1], vec![y0, y1])?);
            }
        }
        factors.push(TwoFactor::new(n, cycles)?);
    }
    TwoFactorization::new(n, factors, Some(PerfectMatching::identity(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn types(tf: &TwoFactorization) -> Vec<BTreeMap<usize, usize>> {
        tf.factors().iter().map(|f| f.cycle_type()).collect()
    }

    #[test]
    fn idempotent_squares() {
        assert!(idempotent_latin_square(2).is_none());
        for k in [1, 3, 4, 5, 6, 7, 8, 10] {
            let l = idempotent_latin_square(k).unwrap();
            let rows: Vec<Vec<usize>> = l.clone();
            assert!(crate::signing::validate_factorization(k, &rows).is_valid(), "k = {k}");
            assert!((0..k).all(|i| l[i][i] == i), "k = {k}");
        }
    }

    #[test]
    fn explicit_structure() {
        for n in [3usize, 7, 9, 11, 13, 17, 21, 31] {
            let tf = explicit(n).unwrap();
            assert_eq!(tf.factors().len(), (n - 1) / 2);
            let want: BTreeMap<usize, usize> = [(4, (n - 3) / 2), (6, 1)].into_iter().filter(|e| e.1 > 0).collect();
            assert!(types(&tf).iter().all(|t| *t == want), "n = {n}");
        }
        assert!(explicit(5).is_err());
    }

    #[test]
    fn exact_types_and_leave() {
        let cache = CrownCache::new();
        let opts = CrownOptions {
            mode: CrownMode::Exact,
            ..Default::default()
        };
        for n in [3usize, 5, 7, 9, 11, 13, 15] {
            let leave = PerfectMatching::new((0..n).map(|i| (i + 2) % n).collect()).unwrap();
            let out = crown_decompose_odd(n, &leave, &opts, &cache).unwrap();
            assert_eq!(out.factorization.leave(), Some(&leave));
            let mut want = BTreeMap::new();
            for l in lifted_type(n) {
                *want.entry(l).or_insert(0) += 1;
            }
            assert!(types(&out.factorization).iter().all(|t| *t == want), "n = {n}");
            let expect = if n == 9 { CrownSource::BipartiteSearch } else { CrownSource::CompleteLift };
            assert_eq!(out.source, expect, "n = {n}");
        }
        assert!(crown_decompose_odd(17, &PerfectMatching::identity(17), &opts, &cache).is_err());
    }

    #[test]
    fn disk_cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CrownCache::with_dir(dir.path());
        let opts = CrownOptions {
            mode: CrownMode::Exact,
            ..Default::default()
        };
        let a = crown_decompose_odd(7, &PerfectMatching::identity(7), &opts, &cache).unwrap();
        assert!(dir.path().join("crown-7.txt").exists());
        let fresh = CrownCache::with_dir(dir.path());
        assert!(fresh.complete(7).is_some());
        let b = crown_decompose_odd(7, &PerfectMatching::identity(7), &opts, &fresh).unwrap();
        assert_eq!(a.factorization, b.factorization);
    }
}
