//! Brute-force reference values: exact pathwidth, treedepth and treewidth of
//! graphs and of pairs `(G, S)`, plus exhaustive graph enumeration.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::budget::{BudgetExceeded, OracleBudget};
use crate::decomp::{verify_focused, FocusedCertificate, FocusedInner, PathDecomposition, TreeDecomposition};
use crate::graph::{Graph, RootedForest, Vertex, VertexSet};

/// Largest graph accepted by the classical subset DPs.
pub const MAX_CLASSICAL: usize = 16;
/// Largest graph accepted by the pair variants.
pub const MAX_PAIR: usize = 10;
/// Largest graph accepted by the naive certificate enumeration.
pub const MAX_NAIVE: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum WidthKind {
    Pw,
    Td,
    Tw,
}

impl WidthKind {
    pub const ALL: [WidthKind; 3] = [WidthKind::Pw, WidthKind::Td, WidthKind::Tw];

    /// Value of the empty graph.
    pub fn empty_value(self) -> i64 {
        match self {
            WidthKind::Td => 0,
            WidthKind::Pw | WidthKind::Tw => -1,
        }
    }
}

/// Dense adjacency masks of a graph on at most 32 vertices.
struct Dense {
    adj: Vec<u32>,
}

impl Dense {
    fn new(g: &Graph) -> (Dense, Vec<Vertex>) {
        let (c, order) = g.compact();
        let adj = (0..c.n() as u32).map(|v| c.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w)).collect();
        (Dense { adj }, order)
    }

    fn n(&self) -> usize {
        self.adj.len()
    }

    fn full(&self) -> u32 {
        ((1u64 << self.n()) - 1) as u32
    }

    /// Vertices reachable from `v` through vertices of `inner`, outside `inner ∪ {v}`.
    fn q(&self, inner: u32, v: usize) -> u32 {
        let mut seen = 1u32 << v;
        let mut frontier = 1u32 << v;
        let mut out = 0u32;
        while frontier != 0 {
            let mut next = 0u32;
            let mut f = frontier;
            while f != 0 {
                let u = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.adj[u];
            }
            next &= !seen;
            seen |= next;
            out |= next & !inner;
            frontier = next & inner;
        }
        out
    }

    fn component_of(&self, set: u32, v: usize) -> u32 {
        let mut comp = 1u32 << v;
        let mut frontier = comp;
        while frontier != 0 {
            let mut next = 0u32;
            let mut f = frontier;
            while f != 0 {
                let u = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.adj[u];
            }
            next &= set & !comp;
            comp |= next;
            frontier = next;
        }
        comp
    }

    fn width(&self, kind: WidthKind) -> i64 {
        if self.n() == 0 {
            return kind.empty_value();
        }
        let size = 1usize << self.n();
        let full = self.full();
        let mut table = vec![0i64; size];
        for s in 1..size as u32 {
            let mut best = i64::MAX;
            let mut rest = s;
            table[s as usize] = match kind {
                WidthKind::Pw => {
                    while rest != 0 {
                        let v = rest.trailing_zeros();
                        rest &= rest - 1;
                        best = best.min(table[(s & !(1 << v)) as usize]);
                    }
                    let boundary = (0..self.n()).filter(|&u| s >> u & 1 == 1 && self.adj[u] & !s & full != 0).count() as i64;
                    best.max(boundary)
                }
                WidthKind::Tw => {
                    while rest != 0 {
                        let v = rest.trailing_zeros() as usize;
                        rest &= rest - 1;
                        let prev = s & !(1 << v);
                        let cost = self.q(prev, v).count_ones() as i64;
                        let sub = if prev == 0 { -1 } else { table[prev as usize] };
                        best = best.min(sub.max(cost));
                    }
                    best
                }
                WidthKind::Td => {
                    let v = s.trailing_zeros() as usize;
                    let comp = self.component_of(s, v);
                    if comp != s {
                        table[comp as usize].max(table[(s & !comp) as usize])
                    } else {
                        while rest != 0 {
                            let v = rest.trailing_zeros();
                            rest &= rest - 1;
                            best = best.min(table[(s & !(1 << v)) as usize]);
                        }
                        best + 1
                    }
                }
            };
        }
        table[full as usize]
    }
}

/// Exact classical pathwidth, treedepth or treewidth; `-1`/`0` on the empty graph.
pub fn exact_width(g: &Graph, kind: WidthKind, budget: &OracleBudget) -> Result<i64, BudgetExceeded> {
    budget.check_vertices(g.n())?;
    if g.n() > MAX_CLASSICAL {
        return Err(BudgetExceeded::Vertices { actual: g.n(), limit: MAX_CLASSICAL });
    }
    Ok(Dense::new(g).0.width(kind))
}

/// Host graph whose classical decompositions are exactly the focused
/// certificates with host `host`: `G[host]` plus a clique on `N(C)` for every
/// component `C` of `G − host`.
pub fn cliquify(g: &Graph, host: &VertexSet) -> Graph {
    let mut h = g.induced(host);
    for c in g.remove_vertices(host).components() {
        let nb: Vec<Vertex> = g.neighborhood(&c).into_iter().collect();
        for (i, &u) in nb.iter().enumerate() {
            for &v in &nb[i + 1..] {
                if !h.has_edge(u, v) {
                    h.add_edge(u, v).expect("host vertices");
                }
            }
        }
    }
    h
}

/// `table[mask]` is the exact focused width of `(g, S)` where `S` is the set
/// of vertices whose position in ascending id order is set in `mask`.
pub fn pair_width_table(g: &Graph, kind: WidthKind, budget: &OracleBudget) -> Result<Vec<i64>, BudgetExceeded> {
    budget.check_vertices(g.n())?;
    if g.n() > MAX_PAIR {
        return Err(BudgetExceeded::Vertices { actual: g.n(), limit: MAX_PAIR });
    }
    let order: Vec<Vertex> = g.vertices().collect();
    let n = order.len();
    let mut table = vec![0i64; 1 << n];
    for (mask, slot) in table.iter_mut().enumerate() {
        let host: VertexSet = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| order[i]).collect();
        *slot = Dense::new(&cliquify(g, &host)).0.width(kind);
    }
    for bit in 0..n {
        for mask in 0..1usize << n {
            if mask >> bit & 1 == 0 {
                table[mask] = table[mask].min(table[mask | 1 << bit]);
            }
        }
    }
    Ok(table)
}

fn mask_of(g: &Graph, s: &VertexSet) -> usize {
    g.vertices().enumerate().filter(|(_, v)| s.contains(v)).fold(0, |m, (i, _)| m | 1 << i)
}

/// Exact `pw(G, S)`, `td(G, S)` or `tw(G, S)`.
pub fn exact_width_pair(g: &Graph, s: &VertexSet, kind: WidthKind, budget: &OracleBudget) -> Result<i64, BudgetExceeded> {
    Ok(pair_width_table(g, kind, budget)?[mask_of(g, s)])
}

/// Focused width computed from the definition: for every host `H ⊇ S`, every
/// antichain of bags (in every order for paths, joined by every labelled tree
/// for trees) or every rooted forest on `H` is checked by `verify_focused`.
pub fn naive_width_pair(g: &Graph, s: &VertexSet, kind: WidthKind) -> Result<i64, BudgetExceeded> {
    Ok(naive_width_table(g, kind)?[mask_of(g, s)])
}

/// All values of [`naive_width_pair`], indexed like [`pair_width_table`].
pub fn naive_width_table(g: &Graph, kind: WidthKind) -> Result<Vec<i64>, BudgetExceeded> {
    if g.n() > MAX_NAIVE {
        return Err(BudgetExceeded::Vertices { actual: g.n(), limit: MAX_NAIVE });
    }
    let order: Vec<Vertex> = g.vertices().collect();
    let n = order.len();
    let mut table: Vec<i64> = (0..1usize << n)
        .map(|mask| {
            let host: VertexSet = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| order[i]).collect();
            naive_host_value(g, &host, kind)
        })
        .collect();
    for bit in 0..n {
        for mask in 0..1usize << n {
            if mask >> bit & 1 == 0 {
                table[mask] = table[mask].min(table[mask | 1 << bit]);
            }
        }
    }
    Ok(table)
}

/// Smallest value of a valid certificate with host exactly `host`.
fn naive_host_value(g: &Graph, host: &VertexSet, kind: WidthKind) -> i64 {
    let valid = |inner: FocusedInner| {
        FocusedCertificate::with_attachments(g, host.clone(), inner).ok().and_then(|c| verify_focused(g, host, &c).ok())
    };
    let hv: Vec<Vertex> = host.iter().copied().collect();
    if kind == WidthKind::Td {
        return rooted_forests(&hv).into_iter().filter_map(|f| valid(FocusedInner::Elimination(f))).min().unwrap_or(i64::MAX);
    }
    if hv.is_empty() {
        let inner = match kind {
            WidthKind::Pw => FocusedInner::Path(PathDecomposition::default()),
            _ => FocusedInner::Tree(TreeDecomposition { tree: RootedForest::new(), bags: BTreeMap::new() }),
        };
        return valid(inner).map_or(i64::MAX, |_| kind.empty_value());
    }
    for w in 0..hv.len() {
        let subsets: Vec<VertexSet> = (1u32..1 << hv.len())
            .map(|m| (0..hv.len()).filter(|i| m >> i & 1 == 1).map(|i| hv[i]).collect::<VertexSet>())
            .filter(|b| b.len() <= w + 1)
            .collect();
        for chain in antichains(&subsets, hv.len()) {
            let covered: VertexSet = chain.iter().flat_map(|b| b.iter().copied()).collect();
            if covered != *host {
                continue;
            }
            let bags: Vec<VertexSet> = chain.into_iter().cloned().collect();
            let found = match kind {
                WidthKind::Pw => permutations(bags.len())
                    .into_iter()
                    .any(|perm| valid(FocusedInner::Path(PathDecomposition::new(perm.iter().map(|&i| bags[i].clone()).collect()))).is_some()),
                _ => labelled_trees(bags.len()).into_iter().any(|tree| {
                    let bag_map = bags.iter().cloned().enumerate().map(|(i, b)| (i as u32, b)).collect();
                    valid(FocusedInner::Tree(TreeDecomposition { tree, bags: bag_map })).is_some()
                }),
            };
            if found {
                return w as i64;
            }
        }
    }
    i64::MAX
}

fn antichains(subsets: &[VertexSet], max_len: usize) -> Vec<Vec<&VertexSet>> {
    fn go<'a>(subsets: &'a [VertexSet], start: usize, max_len: usize, cur: &mut Vec<&'a VertexSet>, out: &mut Vec<Vec<&'a VertexSet>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max_len {
            return;
        }
        for i in start..subsets.len() {
            let b = &subsets[i];
            if cur.iter().all(|c| !c.is_subset(b) && !b.is_subset(c)) {
                cur.push(b);
                go(subsets, i + 1, max_len, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(subsets, 0, max_len, &mut Vec::new(), &mut out);
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every labelled tree on `0..m`, rooted at `0`, via Prüfer sequences.
fn labelled_trees(m: usize) -> Vec<RootedForest> {
    if m == 1 {
        return vec![RootedForest::from_parents(BTreeMap::from([(0, None)])).expect("tree")];
    }
    let mut out = Vec::new();
    let count = m.pow(m.saturating_sub(2) as u32);
    for code in 0..count {
        let seq: Vec<usize> = (0..m - 2).map(|i| code / m.pow(i as u32) % m).collect();
        let mut degree = vec![1usize; m];
        for &x in &seq {
            degree[x] += 1;
        }
        let mut edges = Vec::new();
        for &x in &seq {
            let leaf = (0..m).find(|&v| degree[v] == 1).expect("leaf");
            edges.push((leaf as u32, x as u32));
            degree[leaf] -= 1;
            degree[x] -= 1;
        }
        let rest: Vec<usize> = (0..m).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0] as u32, rest[1] as u32));
        let tree = Graph::from_edges(edges).expect("tree");
        out.push(crate::graph::dfs_tree(&tree, 0).expect("connected"));
    }
    out
}

/// Every rooted forest with node set `vs`.
fn rooted_forests(vs: &[Vertex]) -> Vec<RootedForest> {
    let n = vs.len();
    let mut out = Vec::new();
    let total = (n + 1).pow(n as u32);
    for code in 0..total {
        let parent = vs
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let c = code / (n + 1).pow(i as u32) % (n + 1);
                (v, (c < n).then(|| vs[c]))
            })
            .collect();
        if let Ok(f) = RootedForest::from_parents(parent) {
            out.push(f);
        }
    }
    out
}

/// Canonical code of a graph on `0..n`: the lexicographically smallest upper
/// triangle over relabelings that respect a degree-based vertex invariant.
fn canonical_code(g: &Graph) -> (usize, u64) {
    let n = g.n();
    let vs: Vec<Vertex> = g.vertices().collect();
    let invariant = |v: Vertex| {
        let mut nd: Vec<usize> = g.neighbors(v).iter().map(|&w| g.degree(w)).collect();
        nd.sort_unstable();
        (g.degree(v), nd)
    };
    let mut classes: BTreeMap<_, Vec<Vertex>> = BTreeMap::new();
    for &v in &vs {
        classes.entry(invariant(v)).or_default().push(v);
    }
    let classes: Vec<Vec<Vertex>> = classes.into_values().collect();
    let mut best = u64::MAX;
    let mut order = Vec::with_capacity(n);
    fn run(g: &Graph, classes: &[Vec<Vertex>], ci: usize, order: &mut Vec<Vertex>, best: &mut u64) {
        if ci == classes.len() {
            let mut code = 0u64;
            let mut bit = 0;
            for i in 0..order.len() {
                for j in i + 1..order.len() {
                    if g.has_edge(order[i], order[j]) {
                        code |= 1 << bit;
                    }
                    bit += 1;
                }
            }
            *best = (*best).min(code);
            return;
        }
        for perm in permutations(classes[ci].len()) {
            order.extend(perm.iter().map(|&i| classes[ci][i]));
            run(g, classes, ci + 1, order, best);
            order.truncate(order.len() - perm.len());
        }
    }
    run(g, &classes, 0, &mut order, &mut best);
    (n, best)
}

/// One representative of every isomorphism class of graphs on `0..n`
/// (`n ≤ 10`), in a deterministic order.
pub fn enumerate_graphs(n: u32) -> Vec<Graph> {
    assert!(n <= 10, "graph enumeration is limited to ten vertices");
    let mut level = vec![Graph::new()];
    for k in 0..n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for g in &level {
            for mask in 0u32..1 << k {
                let mut h = g.clone();
                h.add_vertex(k);
                for v in 0..k {
                    if mask >> v & 1 == 1 {
                        h.add_edge(v, k).expect("fresh edge");
                    }
                }
                if seen.insert(canonical_code(&h)) {
                    next.push(h);
                }
            }
        }
        level = next;
    }
    level
}

/// Connected representatives of every isomorphism class on `n` vertices.
pub fn connected_graphs(n: u32) -> Vec<Graph> {
    enumerate_graphs(n).into_iter().filter(Graph::is_connected).collect()
}
