//! Even cycles, 2-factors and 2-factorizations of `K_{n,n}`, plus the
//! canonical double cover that turns 2-factorizations of `K_m` into
//! 2-factorizations of the crown graph `K_{m,m} - I`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::signing::PerfectMatching;

/// An even cycle `x_{xs[0]} y_{ys[0]} x_{xs[1]} y_{ys[1]} ... y_{ys[k-1]} x_{xs[0]}`.
///
/// Stored canonically: `xs[0]` is the smallest x-index on the cycle and
/// `ys[0] < ys[k-1]`, i.e. the walk leaves `xs[0]` towards its smaller
/// y-neighbour. Two cycles with the same edge set compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cycle {
    xs: Vec<usize>,
    ys: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Vertex {
    X(usize),
    Y(usize),
}

impl Cycle {
    pub fn new(xs: Vec<usize>, ys: Vec<usize>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::InvalidStructure(format!(
                "a cycle needs k >= 2 x- and y-vertices each, got {} and {}",
                xs.len(),
                ys.len()
            )));
        }
        let mut sx = xs.clone();
        sx.sort_unstable();
        let mut sy = ys.clone();
        sy.sort_unstable();
        if sx.windows(2).any(|w| w[0] == w[1]) || sy.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidStructure("cycle repeats a vertex".into()));
        }
        Ok(Self::canonical(xs, ys))
    }

    /// Builds a cycle from an alternating vertex walk (without repeating the start).
    pub fn from_walk(walk: &[Vertex]) -> Result<Self> {
        if walk.len() % 2 != 0 {
            return Err(Error::InvalidStructure("odd closed walk in a bipartite graph".into()));
        }
        let offset = match walk.first() {
            Some(Vertex::X(_)) => 0,
            Some(Vertex::Y(_)) => 1,
            None => return Err(Error::InvalidStructure("empty walk".into())),
        };
        let len = walk.len();
        let mut xs = Vec::with_capacity(len / 2);
        let mut ys = Vec::with_capacity(len / 2);
        for step in 0..len {
            match (step % 2, walk[(step + offset) % len]) {
                (0, Vertex::X(x)) => xs.push(x),
                (1, Vertex::Y(y)) => ys.push(y),
                _ => return Err(Error::InvalidStructure("walk does not alternate sides".into())),
            }
        }
        Self::new(xs, ys)
    }

    fn canonical(mut xs: Vec<usize>, mut ys: Vec<usize>) -> Self {
        let k = xs.len();
        let start = (0..k).min_by_key(|&a| xs[a]).unwrap();
        xs.rotate_left(start);
        ys.rotate_left(start);
        if ys[k - 1] < ys[0] {
            // walk the other way round from xs[0]
            xs[1..].reverse();
            ys.reverse();
        }
        Cycle { xs, ys }
    }

    /// Number of vertices (= number of edges).
    pub fn len(&self) -> usize {
        2 * self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_c4(&self) -> bool {
        self.xs.len() == 2
    }

    pub fn xs(&self) -> &[usize] {
        &self.xs
    }

    pub fn ys(&self) -> &[usize] {
        &self.ys
    }

    pub fn walk(&self) -> Vec<Vertex> {
        self.xs
            .iter()
            .zip(&self.ys)
            .flat_map(|(&x, &y)| [Vertex::X(x), Vertex::Y(y)])
            .collect()
    }

    /// The two alternating perfect matchings of the cycle as `(x, y)` edges.
    /// The first contains the lexicographically smallest edge.
    pub fn alternating(&self) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
        let k = self.xs.len();
        let first = (0..k).map(|a| (self.xs[a], self.ys[a])).collect();
        let second = (0..k).map(|a| (self.xs[(a + 1) % k], self.ys[a])).collect();
        (first, second)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.xs.len();
        (0..k).flat_map(move |a| [(self.xs[a], self.ys[a]), (self.xs[(a + 1) % k], self.ys[a])])
    }

    /// Applies `x_a -> x_{xmap[a]}`, `y_b -> y_{ymap[b]}`.
    pub fn relabeled(&self, xmap: &[usize], ymap: &[usize]) -> Cycle {
        Self::canonical(
            self.xs.iter().map(|&x| xmap[x]).collect(),
            self.ys.iter().map(|&y| ymap[y]).collect(),
        )
    }
}

/// A spanning 2-regular subgraph of `K_{n,n}`, as vertex-disjoint even cycles.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TwoFactor {
    n: usize,
    cycles: Vec<Cycle>,
}

impl TwoFactor {
    pub fn new(n: usize, mut cycles: Vec<Cycle>) -> Result<Self> {
        let mut seen_x = vec![false; n];
        let mut seen_y = vec![false; n];
        for c in &cycles {
            for (&x, &y) in c.xs.iter().zip(&c.ys) {
                if x >= n || y >= n {
                    return Err(Error::InvalidStructure(format!(
                        "cycle vertex out of range for n = {n}"
                    )));
                }
                if std::mem::replace(&mut seen_x[x], true) || std::mem::replace(&mut seen_y[y], true) {
                    return Err(Error::InvalidStructure("cycles of a 2-factor overlap".into()));
                }
            }
        }
        if !seen_x.iter().chain(&seen_y).all(|&b| b) {
            return Err(Error::InvalidStructure("2-factor does not span every vertex".into()));
        }
        cycles.sort();
        Ok(TwoFactor { n, cycles })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn c4_components(&self) -> impl Iterator<Item = &Cycle> {
        self.cycles.iter().filter(|c| c.is_c4())
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cycles.iter().flat_map(Cycle::edges)
    }

    /// Cycle length -> multiplicity.
    pub fn cycle_type(&self) -> BTreeMap<usize, usize> {
        let mut t = BTreeMap::new();
        for c in &self.cycles {
            *t.entry(c.len()).or_insert(0) += 1;
        }
        t
    }

    /// Splits every cycle into its alternating halves; the halves holding each
    /// cycle's lexicographically first edge form the first matching.
    pub fn alternating_matchings(&self) -> (PerfectMatching, PerfectMatching) {
        let mut a = vec![0; self.n];
        let mut b = vec![0; self.n];
        for c in &self.cycles {
            let (first, second) = c.alternating();
            for (x, y) in first {
                a[x] = y;
            }
            for (x, y) in second {
                b[x] = y;
            }
        }
        (
            PerfectMatching::new(a).expect("alternating half of a 2-factor is a matching"),
            PerfectMatching::new(b).expect("alternating half of a 2-factor is a matching"),
        )
    }

    pub fn relabeled(&self, xmap: &[usize], ymap: &[usize]) -> TwoFactor {
        let mut cycles: Vec<Cycle> = self.cycles.iter().map(|c| c.relabeled(xmap, ymap)).collect();
        cycles.sort();
        TwoFactor { n: self.n, cycles }
    }
}

/// Edge-disjoint 2-factors covering `K_{n,n}`, minus `leave` when `n` is odd.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwoFactorization {
    n: usize,
    factors: Vec<TwoFactor>,
    leave: Option<PerfectMatching>,
}

impl TwoFactorization {
    pub fn new(n: usize, factors: Vec<TwoFactor>, leave: Option<PerfectMatching>) -> Result<Self> {
        let expected = n / 2;
        if leave.is_some() != (n % 2 == 1) {
            return Err(Error::InvalidStructure(
                "a leave matching is required exactly when n is odd".into(),
            ));
        }
        if factors.len() != expected {
            return Err(Error::InvalidStructure(format!(
                "expected {expected} factors for n = {n}, found {}",
                factors.len()
            )));
        }
        let mut used = vec![false; n * n];
        let mut mark = |x: usize, y: usize| -> Result<()> {
            if std::mem::replace(&mut used[x * n + y], true) {
                return Err(Error::InvalidStructure(format!(
                    "edge x_{x} y_{y} is covered twice"
                )));
            }
            Ok(())
        };
        for f in &factors {
            if f.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: f.n(),
                });
            }
            for (x, y) in f.edges() {
                mark(x, y)?;
            }
        }
        if let Some(l) = &leave {
            if l.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: l.n(),
                });
            }
            for (x, y) in l.edges() {
                mark(x, y)?;
            }
        }
        // 2n edges per factor plus n for the leave make n^2 in total, so
        // disjointness already forces the union to be all of E(K_{n,n}).
        Ok(TwoFactorization { n, factors, leave })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> &[TwoFactor] {
        &self.factors
    }

    pub fn leave(&self) -> Option<&PerfectMatching> {
        self.leave.as_ref()
    }

    /// Applies the vertex relabeling to every factor and the leave.
    pub fn relabeled(&self, xmap: &[usize], ymap: &[usize]) -> TwoFactorization {
        TwoFactorization {
            n: self.n,
            factors: self.factors.iter().map(|f| f.relabeled(xmap, ymap)).collect(),
            leave: self.leave.as_ref().map(|l| l.relabeled(xmap, ymap)),
        }
    }
}

/// A vertex `(v, layer)` of the canonical double cover.
pub type CoverVertex = (usize, u8);

/// The canonical double cover `B(G)` of a simple graph `G` on `0..source_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DoubleCover {
    source_n: usize,
    edges: Vec<(CoverVertex, CoverVertex)>,
}

impl DoubleCover {
    /// Each edge `{u, v}` lifts to `(u,0)(v,1)` and `(u,1)(v,0)`.
    pub fn of_graph(source_n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut lifted = Vec::with_capacity(2 * edges.len());
        for &(u, v) in edges {
            if u >= source_n || v >= source_n || u == v {
                return Err(Error::InvalidStructure(format!("bad edge {{{u}, {v}}}")));
            }
            lifted.push(((u, 0), (v, 1)));
            lifted.push(((u, 1), (v, 0)));
        }
        Ok(DoubleCover {
            source_n,
            edges: lifted,
        })
    }

    pub fn source_n(&self) -> usize {
        self.source_n
    }

    pub fn edges(&self) -> &[(CoverVertex, CoverVertex)] {
        &self.edges
    }

    /// Identifies layer 0 with the x-side and layer 1 with the y-side of
    /// `K_{n,n}`; the result never contains a diagonal edge `x_i y_i`.
    pub fn bipartite_edges(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .map(|&(a, b)| if a.1 == 0 { (a.0, b.0) } else { (b.0, a.0) })
            .collect()
    }
}

/// Lifts the cycle `v_1 v_2 ... v_m` (vertices `0..m`) to `B(C_m)` and returns
/// its components as closed walks: one `2m`-cycle for odd `m`, two `m`-cycles
/// for even `m`.
pub fn double_cover_cycle(m_len: usize) -> Result<Vec<Vec<CoverVertex>>> {
    if m_len < 3 {
        return Err(Error::InvalidArgument(format!(
            "a cycle needs at least 3 vertices, got {m_len}"
        )));
    }
    let cycle: Vec<usize> = (0..m_len).collect();
    Ok(lift_cycle_walks(&cycle))
}

fn lift_cycle_walks(cycle: &[usize]) -> Vec<Vec<CoverVertex>> {
    let m = cycle.len();
    let walk_from = |layer: u8, len: usize| -> Vec<CoverVertex> {
        (0..len)
            .map(|step| (cycle[step % m], ((step as u8) + layer) % 2))
            .collect()
    };
    if m % 2 == 1 {
        vec![walk_from(0, 2 * m)]
    } else {
        vec![walk_from(0, m), walk_from(1, m)]
    }
}

/// Lifts one cycle of `K_m` to its cycle(s) in `K_{m,m} - I`.
pub fn lift_cycle(cycle: &[usize]) -> Vec<Cycle> {
    lift_cycle_walks(cycle)
        .into_iter()
        .map(|walk| {
            let walk: Vec<Vertex> = walk
                .into_iter()
                .map(|(v, layer)| if layer == 0 { Vertex::X(v) } else { Vertex::Y(v) })
                .collect();
            Cycle::from_walk(&walk).expect("a lifted cycle alternates sides")
        })
        .collect()
}

/// Checks that `factors` is a 2-factorization of `K_m` (each factor a list of
/// vertex cycles of length at least 3).
pub fn check_complete_two_factorization(m: usize, factors: &[Vec<Vec<usize>>]) -> Result<()> {
    if m < 3 || m % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "K_m has a 2-factorization only for odd m >= 3, got m = {m}"
        )));
    }
    if factors.len() != (m - 1) / 2 {
        return Err(Error::InvalidStructure(format!(
            "K_{m} needs {} 2-factors, found {}",
            (m - 1) / 2,
            factors.len()
        )));
    }
    let mut used = vec![false; m * m];
    for (fi, factor) in factors.iter().enumerate() {
        let mut seen = vec![false; m];
        for cycle in factor {
            if cycle.len() < 3 {
                return Err(Error::InvalidStructure(format!(
                    "factor {fi} has a cycle shorter than 3"
                )));
            }
            for &v in cycle {
                if v >= m || std::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidStructure(format!(
                        "factor {fi} repeats or misplaces vertex {v}"
                    )));
                }
            }
            for a in 0..cycle.len() {
                let (u, v) = (cycle[a], cycle[(a + 1) % cycle.len()]);
                let key = u.min(v) * m + u.max(v);
                if std::mem::replace(&mut used[key], true) {
                    return Err(Error::InvalidStructure(format!(
                        "edge {{{u}, {v}}} is used twice"
                    )));
                }
            }
        }
        if !seen.iter().all(|&b| b) {
            return Err(Error::InvalidStructure(format!("factor {fi} is not spanning")));
        }
    }
    Ok(())
}

/// Lifts a 2-factorization of `K_m` (odd `m`) through the canonical double
/// cover to a 2-factorization of `K_{m,m}` minus the diagonal matching.
pub fn lift_two_factorization(m: usize, factors: &[Vec<Vec<usize>>]) -> Result<TwoFactorization> {
    check_complete_two_factorization(m, factors)?;
    let lifted = factors
        .iter()
        .map(|factor| TwoFactor::new(m, factor.iter().flat_map(|c| lift_cycle(c)).collect()))
        .collect::<Result<Vec<_>>>()?;
    TwoFactorization::new(m, lifted, Some(PerfectMatching::identity(m)))
}
