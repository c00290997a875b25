//! Minor models (plain, rooted, outer-rooted), their verification, and an
//! exhaustive branch-and-bound search.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::{BudgetExceeded, Clock, OracleBudget};
use crate::graph::{int_keys, Graph, Vertex, VertexSet};

/// Branch sets `(B_x | x ∈ V(H))`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorModel {
    #[serde(with = "int_keys")]
    pub branch_sets: BTreeMap<Vertex, VertexSet>,
}

impl MinorModel {
    pub fn support(&self) -> VertexSet {
        self.branch_sets.values().flatten().copied().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rooting {
    None,
    /// Every branch set meets `S`.
    Rooted(VertexSet),
    /// Branch sets of the pattern vertices in `outer` meet `s`.
    OuterRooted { s: VertexSet, outer: VertexSet },
}

impl Rooting {
    fn roots(&self) -> Option<&VertexSet> {
        match self {
            Rooting::None => None,
            Rooting::Rooted(s) | Rooting::OuterRooted { s, .. } => Some(s),
        }
    }

    fn needs_root(&self, x: Vertex) -> bool {
        match self {
            Rooting::None => false,
            Rooting::Rooted(_) => true,
            Rooting::OuterRooted { outer, .. } => outer.contains(&x),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("pattern vertex {0} has no branch set")]
    MissingBranchSet(Vertex),
    #[error("branch set key {0} is not a pattern vertex")]
    UnknownPatternVertex(Vertex),
    #[error("branch set of {0} is empty")]
    EmptyBranchSet(Vertex),
    #[error("branch set of {0} contains non-vertex {1}")]
    OutsideHost(Vertex, Vertex),
    #[error("branch sets of {0} and {1} share vertex {2}")]
    Overlap(Vertex, Vertex, Vertex),
    #[error("branch set of {0} is not connected")]
    Disconnected(Vertex),
    #[error("no host edge between branch sets of {0} and {1}")]
    MissingEdge(Vertex, Vertex),
    #[error("branch set of {0} misses the root set")]
    Unrooted(Vertex),
    #[error("root vertex {0} is not a host vertex")]
    RootOutsideHost(Vertex),
}

/// Checks that `m` is a model of `h` in `g` respecting `rooting`.
pub fn verify_model(g: &Graph, h: &Graph, m: &MinorModel, rooting: &Rooting) -> Result<(), ModelError> {
    if let Some(s) = rooting.roots() {
        if let Some(&v) = s.iter().find(|v| !g.contains(**v)) {
            return Err(ModelError::RootOutsideHost(v));
        }
    }
    if let Some(&x) = m.branch_sets.keys().find(|x| !h.contains(**x)) {
        return Err(ModelError::UnknownPatternVertex(x));
    }
    let mut owner: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    for x in h.vertices() {
        let b = m.branch_sets.get(&x).ok_or(ModelError::MissingBranchSet(x))?;
        if b.is_empty() {
            return Err(ModelError::EmptyBranchSet(x));
        }
        for &v in b {
            if !g.contains(v) {
                return Err(ModelError::OutsideHost(x, v));
            }
            if let Some(&y) = owner.get(&v) {
                return Err(ModelError::Overlap(y, x, v));
            }
            owner.insert(v, x);
        }
        if !g.is_connected_set(b) {
            return Err(ModelError::Disconnected(x));
        }
        if rooting.needs_root(x) && b.is_disjoint(rooting.roots().expect("roots")) {
            return Err(ModelError::Unrooted(x));
        }
    }
    for (x, y) in h.edges() {
        let bx = &m.branch_sets[&x];
        let by = &m.branch_sets[&y];
        if !bx.iter().any(|&u| g.neighbors(u).iter().any(|w| by.contains(w))) {
            return Err(ModelError::MissingEdge(x, y));
        }
    }
    Ok(())
}

/// Exhaustive search for a model of `h` in `g` respecting `rooting`.
/// Returns `Ok(None)` only when no model exists.
pub fn find_rooted_minor(g: &Graph, h: &Graph, rooting: &Rooting, budget: &OracleBudget) -> Result<Option<MinorModel>, BudgetExceeded> {
    budget.check_pattern(h.n())?;
    if h.n() == 0 {
        return Ok(Some(MinorModel::default()));
    }
    let rooting = normalize(g, rooting);
    if let Rooting::Rooted(s) = &rooting {
        if s.len() < h.n() {
            return Ok(None);
        }
    }
    if g.n() < h.n() || g.m() < h.m() {
        return Ok(None);
    }
    let mut clock = budget.clock();
    let found = if rooting == Rooting::None {
        let mut host = g.clone();
        if h.vertices().all(|x| h.degree(x) >= 2) {
            host = strip_low_degree(&host);
        }
        let pieces = if h.n() >= 2 && h.is_connected() && blocks(h).len() == 1 { blocks(&host) } else { vec![host.vertex_set()] };
        let mut found = None;
        for piece in pieces {
            let sub = host.induced(&piece);
            if sub.n() < h.n() || sub.m() < h.m() {
                continue;
            }
            budget.check_vertices(sub.n())?;
            if let Some(m) = Search::new(&sub, h, &rooting).run(&mut clock)? {
                found = Some(m);
                break;
            }
        }
        found
    } else {
        budget.check_vertices(g.n())?;
        Search::new(g, h, &rooting).run(&mut clock)?
    };
    Ok(found.map(|m| minimize(g, h, m, &rooting)))
}

fn normalize(g: &Graph, rooting: &Rooting) -> Rooting {
    match rooting {
        Rooting::Rooted(s) if g.vertices().all(|v| s.contains(&v)) => Rooting::None,
        Rooting::OuterRooted { outer, .. } if outer.is_empty() => Rooting::None,
        Rooting::OuterRooted { s, .. } if g.vertices().all(|v| s.contains(&v)) => Rooting::None,
        Rooting::Rooted(s) => Rooting::Rooted(s.intersection(&g.vertex_set()).copied().collect()),
        other => other.clone(),
    }
}

/// Greedily drops vertices from branch sets while the model stays valid.
fn minimize(g: &Graph, h: &Graph, mut m: MinorModel, rooting: &Rooting) -> MinorModel {
    debug_assert!(verify_model(g, h, &m, rooting).is_ok());
    let keys: Vec<Vertex> = m.branch_sets.keys().copied().collect();
    for x in keys {
        let members: Vec<Vertex> = m.branch_sets[&x].iter().copied().collect();
        for v in members.into_iter().rev() {
            if m.branch_sets[&x].len() == 1 {
                break;
            }
            m.branch_sets.get_mut(&x).expect("key").remove(&v);
            if verify_model(g, h, &m, rooting).is_err() {
                m.branch_sets.get_mut(&x).expect("key").insert(v);
            }
        }
    }
    m
}

/// Repeatedly deletes vertices of degree at most one.
pub fn strip_low_degree(g: &Graph) -> Graph {
    let mut g = g.clone();
    loop {
        let low: VertexSet = g.vertices().filter(|&v| g.degree(v) <= 1).collect();
        if low.is_empty() {
            return g;
        }
        g = g.remove_vertices(&low);
    }
}

/// Vertex sets of the blocks (maximal 2-connected subgraphs, bridges and
/// isolated vertices), in discovery order from ascending roots.
pub fn blocks(g: &Graph) -> Vec<VertexSet> {
    struct State<'a> {
        g: &'a Graph,
        disc: BTreeMap<Vertex, usize>,
        low: BTreeMap<Vertex, usize>,
        stack: Vec<(Vertex, Vertex)>,
        out: Vec<VertexSet>,
    }
    fn dfs(st: &mut State<'_>, v: Vertex, parent: Option<Vertex>) {
        let d = st.disc.len();
        st.disc.insert(v, d);
        st.low.insert(v, d);
        let ns: Vec<Vertex> = st.g.neighbors(v).iter().copied().collect();
        for w in ns {
            if Some(w) == parent {
                continue;
            }
            if let Some(&dw) = st.disc.get(&w) {
                if dw < st.disc[&v] {
                    st.stack.push((v, w));
                    let lv = st.low[&v].min(dw);
                    st.low.insert(v, lv);
                }
            } else {
                st.stack.push((v, w));
                dfs(st, w, Some(v));
                let lv = st.low[&v].min(st.low[&w]);
                st.low.insert(v, lv);
                if st.low[&w] >= st.disc[&v] {
                    let mut block = VertexSet::new();
                    while let Some((a, b)) = st.stack.pop() {
                        block.insert(a);
                        block.insert(b);
                        if (a, b) == (v, w) {
                            break;
                        }
                    }
                    st.out.push(block);
                }
            }
        }
    }
    let mut st = State { g, disc: BTreeMap::new(), low: BTreeMap::new(), stack: Vec::new(), out: Vec::new() };
    for v in g.vertices() {
        if !st.disc.contains_key(&v) {
            if g.degree(v) == 0 {
                st.disc.insert(v, st.disc.len());
                st.out.push(VertexSet::from([v]));
            } else {
                dfs(&mut st, v, None);
            }
        }
    }
    st.out
}

struct Search {
    verts: Vec<Vertex>,
    adj: Vec<u64>,
    all: u64,
    s_mask: u64,
    pattern: Vec<Vertex>,
    hedges: Vec<(usize, usize)>,
    needs_root: Vec<bool>,
    /// Pattern vertices exchangeable by an automorphism swapping just the two.
    twins: Vec<Vec<bool>>,
    sets: Vec<u64>,
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(i)
    })
}

impl Search {
    fn new(g: &Graph, h: &Graph, rooting: &Rooting) -> Search {
        assert!(g.n() <= 64, "bitmask search supports at most 64 vertices");
        let verts: Vec<Vertex> = g.vertices().collect();
        let index = |v: Vertex| verts.binary_search(&v).expect("vertex");
        let adj = verts.iter().map(|&v| g.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << index(w))).collect();
        let all = if verts.len() == 64 { u64::MAX } else { (1u64 << verts.len()) - 1 };
        let s_mask = rooting.roots().map_or(0, |s| s.iter().filter(|v| g.contains(**v)).fold(0u64, |m, &v| m | 1 << index(v)));
        let pattern: Vec<Vertex> = h.vertices().collect();
        let pidx = |x: Vertex| pattern.binary_search(&x).expect("pattern vertex");
        let hedges = h.edges().into_iter().map(|(x, y)| (pidx(x), pidx(y))).collect();
        let needs_root = pattern.iter().map(|&x| rooting.needs_root(x)).collect();
        let twins = pattern
            .iter()
            .map(|&x| {
                pattern
                    .iter()
                    .map(|&y| {
                        let nx: VertexSet = h.neighbors(x).iter().copied().filter(|&z| z != y).collect();
                        let ny: VertexSet = h.neighbors(y).iter().copied().filter(|&z| z != x).collect();
                        x != y && nx == ny && rooting.needs_root(x) == rooting.needs_root(y)
                    })
                    .collect()
            })
            .collect();
        let sets = vec![0; pattern.len()];
        Search { verts, adj, all, s_mask, pattern, hedges, needs_root, twins, sets }
    }

    fn nbhd(&self, m: u64) -> u64 {
        bits(m).fold(0, |acc, i| acc | self.adj[i])
    }

    fn closure(&self, start: u64, within: u64) -> u64 {
        let mut r = start & within;
        let mut frontier = r;
        while frontier != 0 {
            let next = self.nbhd(frontier) & within & !r;
            r |= next;
            frontier = next;
        }
        r
    }

    fn complete(&self) -> bool {
        for (x, &b) in self.sets.iter().enumerate() {
            if b == 0 || (self.needs_root[x] && b & self.s_mask == 0) {
                return false;
            }
            if self.closure(b & b.wrapping_neg(), b) != b {
                return false;
            }
        }
        self.hedges.iter().all(|&(x, y)| self.nbhd(self.sets[x]) & self.sets[y] != 0)
    }

    fn feasible(&self, free: u64) -> bool {
        let mut reach = vec![0u64; self.sets.len()];
        let (mut empty, mut empty_rooted) = (0u32, 0u32);
        for (x, &b) in self.sets.iter().enumerate() {
            if b == 0 {
                empty += 1;
                if self.needs_root[x] {
                    empty_rooted += 1;
                }
                continue;
            }
            let r = self.closure(b & b.wrapping_neg(), b | free);
            if b & !r != 0 || (self.needs_root[x] && r & self.s_mask == 0) {
                return false;
            }
            reach[x] = r;
        }
        if empty > free.count_ones() || empty_rooted > (free & self.s_mask).count_ones() {
            return false;
        }
        self.hedges.iter().all(|&(x, y)| {
            let (rx, ry) = (reach[x], reach[y]);
            rx == 0 || ry == 0 || (rx | self.nbhd(rx)) & ry != 0
        })
    }

    fn run(mut self, clock: &mut Clock) -> Result<Option<MinorModel>, BudgetExceeded> {
        if self.rec(0, clock)? {
            let branch_sets = self
                .pattern
                .iter()
                .zip(&self.sets)
                .map(|(&x, &b)| (x, bits(b).map(|i| self.verts[i]).collect()))
                .collect();
            return Ok(Some(MinorModel { branch_sets }));
        }
        Ok(None)
    }

    fn rec(&mut self, i: usize, clock: &mut Clock) -> Result<bool, BudgetExceeded> {
        clock.tick()?;
        if self.complete() {
            return Ok(true);
        }
        let free = self.all & !((1u64 << i) - 1);
        if i == self.verts.len() || !self.feasible(free) {
            return Ok(false);
        }
        let bit = 1u64 << i;
        for x in 0..self.sets.len() {
            if self.sets[x] == 0 && (0..x).any(|y| self.sets[y] == 0 && self.twins[x][y]) {
                continue;
            }
            self.sets[x] |= bit;
            let found = self.rec(i + 1, clock)?;
            if found {
                return Ok(true);
            }
            self.sets[x] &= !bit;
        }
        self.rec(i + 1, clock)
    }
}
