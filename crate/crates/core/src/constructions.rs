//! Extremal and plane-graph constructions: the radius lower-bound family,
//! apexification, cutting a plane graph open along a spanning tree, and
//! disjoint plane copies.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::{BudgetExceeded, OracleBudget};
use crate::graph::{generate, int_keys, Graph, RootedForest, Vertex, VertexSet};
use crate::minors::{find_rooted_minor, verify_model, MinorModel, Rooting};
use crate::oracles::{exact_width, WidthKind, MAX_CLASSICAL};

/// Largest `k` accepted by [`lower_bound_graph`] (the tree has `(3^(k+1)−1)/2` vertices).
pub const MAX_LOWER_BOUND_K: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("ℓ must be at least 2, got {0}")]
    SmallL(usize),
    #[error("k = {0} exceeds the construction limit {MAX_LOWER_BOUND_K}")]
    TooLarge(usize),
    #[error("invalid rotation system: {0}")]
    Rotation(String),
    #[error("rotation system is not plane: the component of {vertex} has V − E + F = {euler}")]
    NotPlane { vertex: Vertex, euler: i64 },
    #[error("invalid outer face: {0}")]
    Outer(String),
    #[error("outer face is empty")]
    EmptyOuter,
    #[error("invalid spanning tree: {0}")]
    Tree(String),
    #[error("apex {0} is not a leaf of the spanning tree")]
    ApexNotLeaf(Vertex),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error("verification failed: {0}")]
    Verify(String),
}

/// The family `G` of `ℓ`-fan-minor-free graphs with large radius and pathwidth,
/// paired with the excluded fan `X`.
#[derive(Clone, Debug)]
pub struct LowerBoundInstance {
    pub graph: Graph,
    /// Fan on `ℓ + 1` vertices (path `1 − … − ℓ` plus universal vertex `0`).
    pub x: Graph,
    pub l: usize,
    pub k: usize,
    /// Root of the ternary tree (vertex `0`).
    pub root: Vertex,
}

/// Smallest `k ≥ ℓr/2`.
pub fn lower_bound_k(l: usize, r: usize) -> usize {
    (l * r).div_ceil(2)
}

/// Builds the instance for `ℓ` and `r` with `k = ⌈ℓr/2⌉`.
pub fn lower_bound_graph(l: usize, r: usize) -> Result<LowerBoundInstance, ConstructionError> {
    lower_bound_instance(l, lower_bound_k(l, r))
}

/// Complete ternary tree of vertex-height `k + 1`; for `ℓ ≥ 4` every vertex at
/// depth `1 + ⌊ℓ/2⌋i` is joined to its descendants at depth `1 + ⌊ℓ/2⌋(i+1)`
/// for each complete band.
pub fn lower_bound_instance(l: usize, k: usize) -> Result<LowerBoundInstance, ConstructionError> {
    if l < 2 {
        return Err(ConstructionError::SmallL(l));
    }
    if k > MAX_LOWER_BOUND_K {
        return Err(ConstructionError::TooLarge(k));
    }
    let mut graph = generate::complete_ternary(k as u32 + 1);
    let h = l / 2;
    if l >= 4 {
        let n = graph.n() as Vertex;
        for i in 0..k / h {
            let top_depth = h * i;
            let first = level_start(top_depth);
            for u in first..level_start(top_depth + 1) {
                let mut frontier = vec![u];
                for _ in 0..h {
                    frontier = frontier.iter().flat_map(|&v| (1..=3).map(move |c| 3 * v + c)).filter(|&c| c < n).collect();
                }
                for v in frontier {
                    graph.add_edge(u, v).expect("distinct tree vertices");
                }
            }
        }
    }
    Ok(LowerBoundInstance { graph, x: generate::fan(l as u32 + 1), l, k, root: 0 })
}

/// First id at 0-based depth `d` of [`generate::complete_ternary`].
fn level_start(d: usize) -> Vertex {
    ((3u64.pow(d as u32) - 1) / 2) as Vertex
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LowerBoundReport {
    pub l: usize,
    pub k: usize,
    /// Radius the instance is required to reach.
    pub r: usize,
    pub n: usize,
    pub radius: usize,
    pub radius_lower_ok: bool,
    /// `radius ≤ k/⌊ℓ/2⌋ + ⌊ℓ/2⌋`.
    pub radius_upper_ok: bool,
    /// The complete ternary tree of vertex-height `k + 1` is a subgraph, so `pw ≥ k`.
    pub contains_ternary_tree: bool,
    pub pw_lower_bound: usize,
    pub pw_oracle: Option<i64>,
    pub td_oracle: Option<i64>,
    pub x_minor_free: bool,
}

impl LowerBoundReport {
    pub fn holds(&self) -> bool {
        let pw_ok = self.pw_oracle.is_none_or(|pw| pw >= self.k as i64);
        let td_ok = match (self.td_oracle, self.pw_oracle) {
            (Some(td), Some(pw)) => td - 1 >= pw,
            _ => true,
        };
        self.radius_lower_ok && self.radius_upper_ok && self.contains_ternary_tree && pw_ok && td_ok && self.x_minor_free
    }
}

/// Checks every claimed property of the instance. With `scaled = Some(k)` the
/// given `k` replaces `⌈ℓr/2⌉` and the radius target becomes `⌊2k/ℓ⌋`.
pub fn check_lower_bound(l: usize, r: usize, scaled: Option<usize>, budget: &OracleBudget) -> Result<LowerBoundReport, ConstructionError> {
    let (k, r) = match scaled {
        Some(k) => (k, 2 * k / l.max(1)),
        None => (lower_bound_k(l, r), r),
    };
    let inst = lower_bound_instance(l, k)?;
    let g = &inst.graph;
    let h = l / 2;
    let radius = g.radius().map_err(|e| ConstructionError::Verify(e.to_string()))?;
    let tree = generate::complete_ternary(k as u32 + 1);
    let contains_ternary_tree = tree.edges().into_iter().all(|(a, b)| g.has_edge(a, b));
    let (pw_oracle, td_oracle) = if g.n() <= MAX_CLASSICAL {
        (Some(exact_width(g, WidthKind::Pw, budget)?), Some(exact_width(g, WidthKind::Td, budget)?))
    } else {
        (None, None)
    };
    let x_minor_free = find_rooted_minor(g, &inst.x, &Rooting::None, budget)?.is_none();
    Ok(LowerBoundReport {
        l,
        k,
        r,
        n: g.n(),
        radius,
        radius_lower_ok: radius >= r,
        radius_upper_ok: radius * h <= k + h * h,
        contains_ternary_tree,
        pw_lower_bound: if contains_ternary_tree { k } else { 0 },
        pw_oracle,
        td_oracle,
        x_minor_free,
    })
}

/// Clockwise cyclic order of the neighbours around every vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct RotationSystem(#[serde(with = "int_keys")] BTreeMap<Vertex, Vec<Vertex>>);

impl RotationSystem {
    /// Validates that the orders describe a simple undirected graph.
    pub fn new(order: BTreeMap<Vertex, Vec<Vertex>>) -> Result<Self, ConstructionError> {
        for (&v, ns) in &order {
            if ns.iter().collect::<BTreeSet<_>>().len() != ns.len() {
                return Err(ConstructionError::Rotation(format!("order around {v} repeats a neighbour")));
            }
            for &w in ns {
                if w == v {
                    return Err(ConstructionError::Rotation(format!("loop at {v}")));
                }
                if !order.get(&w).is_some_and(|o| o.contains(&v)) {
                    return Err(ConstructionError::Rotation(format!("{w} is listed around {v} but not vice versa")));
                }
            }
        }
        Ok(RotationSystem(order))
    }

    pub fn orders(&self) -> &BTreeMap<Vertex, Vec<Vertex>> {
        &self.0
    }

    pub fn order(&self, v: Vertex) -> &[Vertex] {
        self.0.get(&v).map_or(&[], Vec::as_slice)
    }

    pub fn graph(&self) -> Graph {
        let mut g = Graph::with_vertices(self.0.keys().copied());
        for (&v, ns) in &self.0 {
            for &w in ns {
                if v < w {
                    g.add_edge(v, w).expect("validated");
                }
            }
        }
        g
    }

    /// Neighbour following `w` clockwise around `v`.
    pub fn succ(&self, v: Vertex, w: Vertex) -> Vertex {
        let o = self.order(v);
        let i = o.iter().position(|&x| x == w).expect("w is a neighbour of v");
        o[(i + 1) % o.len()]
    }

    /// Face boundary walks; the dart `(a, b)` is followed by `(b, succ(b, a))`.
    pub fn faces(&self) -> Vec<Vec<Vertex>> {
        let mut seen = BTreeSet::new();
        let mut faces = Vec::new();
        for (&v, ns) in &self.0 {
            for &w in ns {
                if seen.contains(&(v, w)) {
                    continue;
                }
                let mut walk = Vec::new();
                let (mut a, mut b) = (v, w);
                while seen.insert((a, b)) {
                    walk.push(a);
                    (a, b) = (b, self.succ(b, a));
                }
                faces.push(walk);
            }
        }
        faces
    }

    /// Euler's formula `V − E + F = 2` on every connected component.
    pub fn check_plane(&self) -> Result<(), ConstructionError> {
        let g = self.graph();
        let faces = self.faces();
        for comp in g.components() {
            let v = comp.len() as i64;
            let e = comp.iter().map(|&x| g.degree(x)).sum::<usize>() as i64 / 2;
            let f = if e == 0 { 1 } else { faces.iter().filter(|w| comp.contains(&w[0])).count() as i64 };
            if v - e + f != 2 {
                return Err(ConstructionError::NotPlane { vertex: *comp.first().expect("nonempty"), euler: v - e + f });
            }
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct RawPlane {
    #[serde(with = "int_keys")]
    rotation: BTreeMap<Vertex, Vec<Vertex>>,
    outer: Vec<Vertex>,
}

impl TryFrom<RawPlane> for PlanePattern {
    type Error = ConstructionError;

    fn try_from(raw: RawPlane) -> Result<Self, Self::Error> {
        PlanePattern::new(RotationSystem::new(raw.rotation)?, raw.outer)
    }
}

/// A plane graph given by its rotation system and the vertices of its outer
/// face, listed along the boundary walk (first occurrences, one block per
/// component).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPlane")]
pub struct PlanePattern {
    rotation: RotationSystem,
    outer: Vec<Vertex>,
}

/// An outer vertex and the vertex preceding it on the outer boundary walk.
type Corner = (Vertex, Option<Vertex>);

impl PlanePattern {
    pub fn new(rotation: RotationSystem, outer: Vec<Vertex>) -> Result<Self, ConstructionError> {
        rotation.check_plane()?;
        let p = PlanePattern { rotation, outer };
        p.outer_corners()?;
        Ok(p)
    }

    pub fn rotation(&self) -> &RotationSystem {
        &self.rotation
    }

    pub fn outer(&self) -> &[Vertex] {
        &self.outer
    }

    pub fn graph(&self) -> Graph {
        self.rotation.graph()
    }

    pub fn path(n: u32) -> Self {
        let order = (0..n).map(|v| (v, [v.checked_sub(1), (v + 1 < n).then_some(v + 1)].into_iter().flatten().collect())).collect();
        PlanePattern::new(RotationSystem::new(order).expect("path"), (0..n).collect()).expect("path is plane")
    }

    pub fn cycle(n: u32) -> Self {
        assert!(n >= 3, "cycles need three vertices");
        let order = (0..n).map(|v| (v, vec![(v + n - 1) % n, (v + 1) % n])).collect();
        PlanePattern::new(RotationSystem::new(order).expect("cycle"), (0..n).collect()).expect("cycle is plane")
    }

    /// `K_4` drawn as the triangle `0 1 2` around the centre `3`.
    pub fn k4() -> Self {
        let order = BTreeMap::from([(0, vec![1, 3, 2]), (1, vec![2, 3, 0]), (2, vec![0, 3, 1]), (3, vec![0, 1, 2])]);
        PlanePattern::new(RotationSystem::new(order).expect("k4"), vec![0, 1, 2]).expect("k4 is plane")
    }

    /// `rows × cols` grid (ids as in [`generate::grid`]) with its boundary as outer face.
    pub fn grid(rows: u32, cols: u32) -> Self {
        let g = generate::grid(rows, cols);
        let order = g
            .vertices()
            .map(|v| {
                let (i, j) = (v / cols, v % cols);
                let around = [(i > 0).then(|| v - cols), (j + 1 < cols).then(|| v + 1), (i + 1 < rows).then(|| v + cols), (j > 0).then(|| v - 1)];
                (v, around.into_iter().flatten().collect())
            })
            .collect();
        PlanePattern::with_longest_face(RotationSystem::new(order).expect("grid")).expect("grid is plane")
    }

    /// Uses the longest face walk of a connected plane rotation system as outer face.
    pub fn with_longest_face(rotation: RotationSystem) -> Result<Self, ConstructionError> {
        let outer = match rotation.faces().into_iter().max_by_key(Vec::len) {
            Some(walk) => {
                let mut seen = VertexSet::new();
                walk.into_iter().filter(|&v| seen.insert(v)).collect()
            }
            None => rotation.orders().keys().copied().collect(),
        };
        PlanePattern::new(rotation, outer)
    }

    /// Drops the edge `vw` from the rotation system, keeping the outer list
    /// unchanged (the caller revalidates).
    pub fn without_edge(&self, v: Vertex, w: Vertex) -> RotationSystem {
        let mut order = self.rotation.0.clone();
        for (a, b) in [(v, w), (w, v)] {
            if let Some(o) = order.get_mut(&a) {
                o.retain(|&x| x != b);
            }
        }
        RotationSystem(order)
    }

    /// Locates the outer face: per component, a face walk and a starting
    /// point whose first occurrences are exactly the listed outer vertices.
    fn outer_corners(&self) -> Result<Vec<Vec<Corner>>, ConstructionError> {
        let g = self.graph();
        if self.outer.iter().collect::<BTreeSet<_>>().len() != self.outer.len() {
            return Err(ConstructionError::Outer("repeated vertex".into()));
        }
        if let Some(v) = self.outer.iter().find(|&&v| !g.contains(v)) {
            return Err(ConstructionError::Outer(format!("unknown vertex {v}")));
        }
        let faces = self.rotation.faces();
        let mut blocks = Vec::new();
        let mut done = VertexSet::new();
        for &start in &self.outer {
            if done.contains(&start) {
                continue;
            }
            let comp = g.reachable_from(start);
            let listed: Vec<Vertex> = self.outer.iter().copied().filter(|v| comp.contains(v)).collect();
            done.extend(comp.iter().copied());
            if comp.len() == 1 {
                blocks.push(vec![(start, None)]);
                continue;
            }
            let block = faces
                .iter()
                .filter(|w| comp.contains(&w[0]))
                .find_map(|walk| match_walk(walk, &listed))
                .ok_or_else(|| ConstructionError::Outer(format!("{listed:?} is not a face boundary")))?;
            blocks.push(block);
        }
        if let Some(comp) = g.components().into_iter().find(|c| c.is_disjoint(&done)) {
            return Err(ConstructionError::Outer(format!("component of {} has no outer vertex", comp.first().expect("nonempty"))));
        }
        Ok(blocks)
    }
}

fn match_walk(walk: &[Vertex], listed: &[Vertex]) -> Option<Vec<Corner>> {
    let len = walk.len();
    (0..len).find_map(|s| {
        let mut seen = VertexSet::new();
        let mut corners = Vec::new();
        for i in 0..len {
            let v = walk[(s + i) % len];
            if seen.insert(v) {
                corners.push((v, Some(walk[(s + i + len - 1) % len])));
            }
        }
        corners.iter().map(|c| c.0).eq(listed.iter().copied()).then_some(corners)
    })
}

/// Adds a vertex in the outer face adjacent to every outer vertex. Returns the
/// new pattern, whose outer face is a face through the apex, and the apex id.
pub fn apexify(h: &PlanePattern) -> Result<(PlanePattern, Vertex), ConstructionError> {
    if h.outer.is_empty() {
        return Err(ConstructionError::EmptyOuter);
    }
    let blocks = h.outer_corners()?;
    let u = h.graph().max_id().map_or(0, |m| m + 1);
    let mut order = h.rotation.0.clone();
    let mut around_u = Vec::new();
    for block in &blocks {
        for &(v, pred) in block {
            let o = order.get_mut(&v).expect("outer vertex");
            match pred.and_then(|p| o.iter().position(|&x| x == p)) {
                Some(i) => o.insert(i + 1, u),
                None => o.push(u),
            }
        }
        around_u.extend(block.iter().rev().map(|c| c.0));
    }
    order.insert(u, around_u);
    let rotation = RotationSystem::new(order)?;
    let face = rotation.faces().into_iter().find(|w| w.contains(&u)).expect("apex has a neighbour");
    let mut outer = Vec::new();
    for v in face {
        if !outer.contains(&v) {
            outer.push(v);
        }
    }
    Ok((PlanePattern::new(rotation, outer)?, u))
}

/// `k` relabelled copies of `h` side by side; copy `i` adds `i·(max id + 1)`.
pub fn disjoint_plane_union(h: &PlanePattern, k: usize) -> PlanePattern {
    let stride = h.graph().max_id().map_or(0, |m| m + 1);
    let mut order = BTreeMap::new();
    let mut outer = Vec::new();
    for i in 0..k as Vertex {
        let off = i * stride;
        for (&v, ns) in &h.rotation.0 {
            order.insert(v + off, ns.iter().map(|w| w + off).collect());
        }
        outer.extend(h.outer.iter().map(|v| v + off));
    }
    PlanePattern { rotation: RotationSystem(order), outer }
}

/// Spanning tree of `g` rooted at `u` in which `u` has exactly one child: a
/// breadth-first tree of `g − u` from the smallest neighbour of `u`.
pub fn spanning_tree_with_leaf(g: &Graph, u: Vertex) -> Result<RootedForest, ConstructionError> {
    let Some(&first) = g.neighbors(u).first() else {
        return Err(ConstructionError::Tree(format!("{u} has no neighbour")));
    };
    let rest = g.remove_vertex(u);
    if !rest.is_connected() {
        return Err(ConstructionError::Tree(format!("graph minus {u} is disconnected")));
    }
    let mut t = RootedForest::new();
    t.add_node(u, None);
    t.add_node(first, Some(u));
    let mut queue = std::collections::VecDeque::from([first]);
    while let Some(v) = queue.pop_front() {
        for &w in rest.neighbors(v) {
            if !t.contains(w) {
                t.add_node(w, Some(v));
                queue.push_back(w);
            }
        }
    }
    Ok(t)
}

/// Result of cutting a plane graph open along a spanning tree.
#[derive(Clone, Debug, Serialize)]
pub struct CutOpen {
    #[serde(skip)]
    pub graph: Graph,
    /// `labels[id] = (v, w)`: the corner of `v` ending at the tree edge `vw`.
    pub labels: Vec<(Vertex, Vertex)>,
    pub rotation: RotationSystem,
    /// Hamiltonian cycle as a vertex sequence (closing edge implied).
    pub cycle: Vec<Vertex>,
    /// Set when the cycle has two vertices and its closing edge is its only edge.
    pub degenerate: bool,
    /// Branch sets `C_v` forming a model of the input graph.
    pub model_back: MinorModel,
}

struct TreeView<'a> {
    rot: &'a RotationSystem,
    adj: BTreeMap<Vertex, VertexSet>,
}

impl TreeView<'_> {
    /// First tree neighbour of `v` strictly after `w` clockwise (wrapping to `w`).
    fn next(&self, v: Vertex, w: Vertex) -> Vertex {
        let o = self.rot.order(v);
        let i = o.iter().position(|&x| x == w).expect("neighbour");
        (1..=o.len()).map(|d| o[(i + d) % o.len()]).find(|x| self.adj[&v].contains(x)).expect("v has a tree neighbour")
    }

    /// Last tree neighbour of `v` strictly before `w` clockwise (wrapping to `w`).
    fn prev(&self, v: Vertex, w: Vertex) -> Vertex {
        let o = self.rot.order(v);
        let i = o.iter().position(|&x| x == w).expect("neighbour");
        (1..=o.len()).map(|d| o[(i + o.len() - d) % o.len()]).find(|x| self.adj[&v].contains(x)).expect("v has a tree neighbour")
    }

    /// Neighbours of `v` strictly between `from` and `to` clockwise.
    fn between(&self, v: Vertex, from: Vertex, to: Vertex) -> Vec<Vertex> {
        let o = self.rot.order(v);
        let i = o.iter().position(|&x| x == from).expect("neighbour");
        (1..o.len()).map(|d| o[(i + d) % o.len()]).take_while(|&x| x != to).collect()
    }
}

/// Replaces every vertex `v` of the plane graph by the cycle of its corners
/// between consecutive edges of the spanning tree `t` (in which `u` is a
/// leaf), doubling the tree edges. The result is plane and Hamiltonian.
pub fn cut_open(hp: &PlanePattern, u: Vertex, t: &RootedForest) -> Result<CutOpen, ConstructionError> {
    let g = hp.graph();
    if g.n() < 2 {
        return Err(ConstructionError::Tree("need at least two vertices".into()));
    }
    if t.nodes() != g.vertex_set() || t.roots().len() != 1 {
        return Err(ConstructionError::Tree("not a spanning tree".into()));
    }
    let mut adj: BTreeMap<Vertex, VertexSet> = g.vertices().map(|v| (v, VertexSet::new())).collect();
    for (&v, &p) in t.parents() {
        if let Some(p) = p {
            if !g.has_edge(v, p) {
                return Err(ConstructionError::Tree(format!("{v}{p} is not an edge")));
            }
            adj.get_mut(&v).expect("vertex").insert(p);
            adj.get_mut(&p).expect("vertex").insert(v);
        }
    }
    if adj.get(&u).map(BTreeSet::len) != Some(1) {
        return Err(ConstructionError::ApexNotLeaf(u));
    }
    let tv = TreeView { rot: &hp.rotation, adj };

    let mut labels = Vec::new();
    let mut id = BTreeMap::new();
    for v in g.vertices() {
        for &w in tv.rot.order(v).iter().filter(|w| tv.adj[&v].contains(w)) {
            id.insert((v, w), labels.len() as Vertex);
            labels.push((v, w));
        }
    }
    let mut order = BTreeMap::new();
    for (&(v, w), &x) in &id {
        let p = tv.prev(v, w);
        let mut around = vec![id[&(p, v)]];
        around.extend(tv.between(v, p, w).into_iter().map(|y| id[&(y, tv.next(y, v))]));
        around.extend([id[&(w, tv.next(w, v))], id[&(v, tv.next(v, w))], id[&(v, p)]]);
        let mut seen = BTreeSet::from([x]);
        around.retain(|y| seen.insert(*y));
        order.insert(x, around);
    }
    let rotation = RotationSystem::new(order)?;
    rotation.check_plane()?;
    let graph = rotation.graph();

    let mut expected = Graph::with_vertices(0..labels.len() as Vertex);
    let mut join = |a: (Vertex, Vertex), b: (Vertex, Vertex)| {
        let (a, b) = (id[&a], id[&b]);
        if a != b && !expected.has_edge(a, b) {
            expected.add_edge(a, b).expect("corner ids");
        }
    };
    for &(v, w) in &labels {
        join((v, w), (v, tv.next(v, w)));
        join((v, w), (w, tv.next(w, v)));
    }
    for (v, w) in g.edges() {
        if !tv.adj[&v].contains(&w) {
            join((v, tv.next(v, w)), (w, tv.next(w, v)));
        }
    }
    if expected != graph {
        return Err(ConstructionError::Verify("rotation system disagrees with the corner graph".into()));
    }

    let u2 = *tv.adj[&u].first().expect("leaf");
    let mut walk = vec![u, u2];
    while walk.len() < labels.len() + 1 {
        let (a, b) = (walk[walk.len() - 2], walk[walk.len() - 1]);
        walk.push(tv.next(b, a));
    }
    let cycle: Vec<Vertex> = walk.windows(2).map(|p| id[&(p[0], p[1])]).collect();
    let degenerate = cycle.len() == 2;
    check_hamiltonian(&graph, &cycle)?;

    let mut model_back = MinorModel::default();
    for (&(v, _), &x) in &id {
        model_back.branch_sets.entry(v).or_default().insert(x);
    }
    verify_model(&graph, &g, &model_back, &Rooting::None).map_err(|e| ConstructionError::Verify(e.to_string()))?;
    Ok(CutOpen { graph, labels, rotation, cycle, degenerate, model_back })
}

/// Checks that `cycle` visits every vertex once along edges, including the
/// closing edge.
pub fn check_hamiltonian(g: &Graph, cycle: &[Vertex]) -> Result<(), ConstructionError> {
    let set: VertexSet = cycle.iter().copied().collect();
    if set.len() != cycle.len() || set != g.vertex_set() {
        return Err(ConstructionError::Verify("cycle does not visit every vertex exactly once".into()));
    }
    let n = cycle.len();
    if n >= 2 && (0..n).any(|i| !g.has_edge(cycle[i], cycle[(i + 1) % n])) {
        return Err(ConstructionError::Verify("consecutive cycle vertices are not adjacent".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree_of(p: &PlanePattern, u: Vertex) -> RootedForest {
        spanning_tree_with_leaf(&p.graph(), u).unwrap()
    }

    #[test]
    fn small_l_plain_tree() {
        for l in [2, 3] {
            let inst = lower_bound_graph(l, 2).unwrap();
            assert!(inst.graph.is_forest());
            assert_eq!(inst.x, generate::fan(l as u32 + 1));
        }
        assert!(matches!(lower_bound_graph(1, 1), Err(ConstructionError::SmallL(1))));
    }

    #[test]
    fn figure_instance() {
        let inst = lower_bound_graph(4, 2).unwrap();
        assert_eq!(inst.k, 4);
        assert_eq!(inst.graph.n(), 121);
        // root to its 9 grandchildren, and each of those to its 9 grandchildren
        assert_eq!(inst.graph.m(), 120 + 9 + 81);
        assert_eq!(inst.graph.radius().unwrap(), 2);
    }

    #[test]
    fn zero_radius_is_a_point() {
        let inst = lower_bound_graph(4, 0).unwrap();
        assert_eq!((inst.k, inst.graph.n()), (0, 1));
    }

    #[test]
    fn truncated_bands_are_dropped() {
        let inst = lower_bound_instance(4, 3).unwrap();
        assert_eq!(inst.graph.n(), 40);
        assert_eq!(inst.graph.m(), 39 + 9);
    }

    #[test]
    fn scaled_check_with_oracle() {
        let report = check_lower_bound(4, 0, Some(2), &OracleBudget::default()).unwrap();
        assert_eq!(report.n, 13);
        assert_eq!(report.pw_oracle, Some(2));
        assert!(report.holds(), "{report:?}");
        let report = check_lower_bound(2, 1, None, &OracleBudget::default()).unwrap();
        assert!(report.holds() && report.x_minor_free);
    }

    #[test]
    fn apexify_examples() {
        let (k2, u) = apexify(&PlanePattern::path(1)).unwrap();
        assert_eq!(u, 1);
        assert_eq!(k2.graph(), generate::path(2));
        let (w4, u) = apexify(&PlanePattern::cycle(4)).unwrap();
        assert_eq!((w4.graph().m(), w4.graph().degree(u)), (8, 4));
        let (f, u) = apexify(&PlanePattern::path(3)).unwrap();
        assert_eq!(f.graph().relabel(|v| (v + 4 - u) % 4), generate::fan(4));
        assert_eq!(apexify(&disjoint_plane_union(&PlanePattern::path(1), 0)), Err(ConstructionError::EmptyOuter));
    }

    #[test]
    fn outer_face_must_be_a_face() {
        let rot = PlanePattern::k4().rotation().clone();
        assert_eq!(rot.faces().len(), 4);
        for face in rot.faces() {
            assert!(PlanePattern::new(rot.clone(), face).is_ok());
        }
        assert!(PlanePattern::new(rot.clone(), vec![0, 1]).is_err());
        let square = PlanePattern::cycle(4).rotation().clone();
        assert!(PlanePattern::new(square.clone(), vec![0, 2, 1, 3]).is_err());
        assert!(PlanePattern::new(square, vec![3, 2, 1, 0]).is_ok());
    }

    #[test]
    fn non_plane_rotation_rejected() {
        let order = BTreeMap::from([(0, vec![1, 2, 3]), (1, vec![0, 2, 3]), (2, vec![0, 1, 3]), (3, vec![0, 1, 2])]);
        let rot = RotationSystem::new(order).unwrap();
        assert!(matches!(rot.check_plane(), Err(ConstructionError::NotPlane { .. })));
    }

    #[test]
    fn cut_open_k2_is_degenerate() {
        let (k2, u) = apexify(&PlanePattern::path(1)).unwrap();
        let c = cut_open(&k2, u, &tree_of(&k2, u)).unwrap();
        assert_eq!(c.graph, generate::path(2));
        assert!(c.degenerate);
        assert_eq!(c.cycle.len(), 2);
    }

    #[test]
    fn cut_open_p3_by_hand() {
        let (hp, u) = apexify(&PlanePattern::path(3)).unwrap();
        let mut t = RootedForest::new();
        t.add_node(u, None);
        t.add_node(1, Some(u));
        t.add_node(0, Some(1));
        t.add_node(2, Some(1));
        let c = cut_open(&hp, u, &t).unwrap();
        // corners (0,1) (1,0) (1,u) (1,2) (2,1) (u,1) get ids 0..6
        assert_eq!(c.labels, vec![(0, 1), (1, 0), (1, u), (1, 2), (2, 1), (u, 1)]);
        let hand = Graph::from_edges([(0, 1), (0, 2), (0, 5), (1, 2), (1, 3), (1, 4), (2, 3), (2, 5), (3, 4), (3, 5), (4, 5)]).unwrap();
        assert_eq!(c.graph, hand);
        assert_eq!(c.model_back.branch_sets[&1], VertexSet::from([1, 2, 3]));
        assert!(!c.degenerate);
        check_hamiltonian(&c.graph, &c.cycle).unwrap();
        c.rotation.check_plane().unwrap();
    }

    #[test]
    fn cut_open_sizes() {
        for h in [PlanePattern::path(3), PlanePattern::cycle(4), PlanePattern::k4(), PlanePattern::cycle(3)] {
            let (hp, u) = apexify(&h).unwrap();
            let c = cut_open(&hp, u, &tree_of(&hp, u)).unwrap();
            assert_eq!(c.graph.n(), 2 * h.graph().n());
            verify_model(&c.graph, &hp.graph(), &c.model_back, &Rooting::None).unwrap();
        }
    }

    #[test]
    fn cut_open_rejects_bad_trees() {
        let (hp, u) = apexify(&PlanePattern::cycle(4)).unwrap();
        let mut star = RootedForest::new();
        star.add_node(u, None);
        for v in 0..4 {
            star.add_node(v, Some(u));
        }
        assert_eq!(cut_open(&hp, u, &star).err(), Some(ConstructionError::ApexNotLeaf(u)));
        let mut partial = RootedForest::new();
        partial.add_node(u, None);
        partial.add_node(0, Some(u));
        assert!(matches!(cut_open(&hp, u, &partial), Err(ConstructionError::Tree(_))));
    }

    #[test]
    fn disjoint_union_examples() {
        let c3 = PlanePattern::cycle(3);
        assert_eq!(disjoint_plane_union(&c3, 1), c3);
        let k1 = disjoint_plane_union(&PlanePattern::path(1), 3);
        assert_eq!((k1.graph().n(), k1.graph().m(), k1.outer().len()), (3, 0, 3));
        let two = disjoint_plane_union(&c3, 2);
        assert_eq!((two.graph().n(), two.graph().m(), two.outer().len()), (6, 6, 6));
        let (hp, _) = apexify(&two).unwrap();
        hp.rotation().check_plane().unwrap();
    }

    #[test]
    fn json_round_trip() {
        let p = PlanePattern::k4();
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.starts_with("{\"rotation\":{\"0\":[1,3,2]"));
        let back: PlanePattern = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<PlanePattern>(r#"{"rotation":{"0":[1],"1":[]},"outer":[0]}"#).is_err());
    }
}
