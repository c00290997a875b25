//! Simple undirected graphs with stable vertex ids, separations, rooted
//! forests and the standard generators.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = u32;
pub type VertexSet = BTreeSet<Vertex>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("edge endpoint {0} is not a vertex")]
    UnknownVertex(Vertex),
    #[error("graph is not connected")]
    Disconnected,
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid separation: {0}")]
    InvalidSeparation(String),
}

/// Simple undirected graph. Vertex iteration is always in ascending id order.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "GraphJson", try_from = "GraphJson")]
pub struct Graph {
    adj: BTreeMap<Vertex, VertexSet>,
}

/// JSON form of a graph: sorted vertex ids and sorted edges `u < v`.
#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<Vertex>,
    edges: Vec<(Vertex, Vertex)>,
}

impl From<Graph> for GraphJson {
    fn from(g: Graph) -> Self {
        GraphJson { vertices: g.vertices().collect(), edges: g.edges() }
    }
}

impl TryFrom<GraphJson> for Graph {
    type Error = GraphError;

    fn try_from(j: GraphJson) -> Result<Self, GraphError> {
        let mut g = Graph::with_vertices(j.vertices);
        for (u, v) in j.edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(V={:?}, E={:?})", self.vertex_set(), self.edges())
    }
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vertices<I: IntoIterator<Item = Vertex>>(vs: I) -> Self {
        let mut g = Graph::new();
        for v in vs {
            g.add_vertex(v);
        }
        g
    }

    /// Builds a graph from an edge list; endpoints are added as vertices.
    /// Duplicate edges are merged, loops rejected.
    pub fn from_edges<I: IntoIterator<Item = (Vertex, Vertex)>>(edges: I) -> Result<Self, GraphError> {
        let mut g = Graph::new();
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            g.add_vertex(u);
            g.add_vertex(v);
            g.insert_edge(u, v);
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: Vertex) {
        self.adj.entry(v).or_default();
    }

    /// Adds an edge between existing vertices. Loops and duplicates are errors.
    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        for w in [u, v] {
            if !self.adj.contains_key(&w) {
                return Err(GraphError::UnknownVertex(w));
            }
        }
        if self.has_edge(u, v) {
            return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
        }
        self.insert_edge(u, v);
        Ok(())
    }

    /// Inserts an edge, silently ignoring duplicates. Both endpoints must exist
    /// and differ.
    pub(crate) fn insert_edge(&mut self, u: Vertex, v: Vertex) {
        debug_assert!(u != v);
        self.adj.get_mut(&u).expect("vertex").insert(v);
        self.adj.get_mut(&v).expect("vertex").insert(u);
    }

    pub fn remove_edge(&mut self, u: Vertex, v: Vertex) {
        if let Some(n) = self.adj.get_mut(&u) {
            n.remove(&v);
        }
        if let Some(n) = self.adj.get_mut(&v) {
            n.remove(&u);
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.adj.values().map(|n| n.len()).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.adj.keys().copied().collect()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj.get(&u).is_some_and(|n| n.contains(&v))
    }

    pub fn neighbors(&self, v: Vertex) -> &VertexSet {
        static EMPTY: VertexSet = BTreeSet::new();
        self.adj.get(&v).unwrap_or(&EMPTY)
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.neighbors(v).len()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.m());
        for (&u, ns) in &self.adj {
            for &v in ns.range(u + 1..) {
                out.push((u, v));
            }
        }
        out
    }

    pub fn max_id(&self) -> Option<Vertex> {
        self.adj.keys().next_back().copied()
    }

    /// Induced subgraph on `set ∩ V(G)`.
    pub fn induced(&self, set: &VertexSet) -> Graph {
        let mut adj = BTreeMap::new();
        for &v in set {
            if let Some(ns) = self.adj.get(&v) {
                adj.insert(v, ns.intersection(set).copied().collect());
            }
        }
        Graph { adj }
    }

    pub fn remove_vertices(&self, set: &VertexSet) -> Graph {
        let keep: VertexSet = self.vertices().filter(|v| !set.contains(v)).collect();
        self.induced(&keep)
    }

    pub fn remove_vertex(&self, v: Vertex) -> Graph {
        self.remove_vertices(&VertexSet::from([v]))
    }

    /// `N(R) = ∪ N(v) − R`.
    pub fn neighborhood(&self, set: &VertexSet) -> VertexSet {
        let mut out = VertexSet::new();
        for &v in set {
            for &w in self.neighbors(v) {
                if !set.contains(&w) {
                    out.insert(w);
                }
            }
        }
        out
    }

    /// Connected components, each as a vertex set, sorted by minimum vertex.
    pub fn components(&self) -> Vec<VertexSet> {
        let mut seen = VertexSet::new();
        let mut out = Vec::new();
        for v in self.vertices() {
            if seen.contains(&v) {
                continue;
            }
            let comp = self.reachable_from(v);
            seen.extend(comp.iter().copied());
            out.push(comp);
        }
        out
    }

    pub fn reachable_from(&self, v: Vertex) -> VertexSet {
        let mut comp = VertexSet::from([v]);
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for &y in self.neighbors(x) {
                if comp.insert(y) {
                    stack.push(y);
                }
            }
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        match self.vertices().next() {
            None => true,
            Some(v) => self.reachable_from(v).len() == self.n(),
        }
    }

    /// Whether `G[set]` is connected (and non-empty).
    pub fn is_connected_set(&self, set: &VertexSet) -> bool {
        let Some(&start) = set.iter().next() else {
            return false;
        };
        let mut comp = VertexSet::from([start]);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &y in self.neighbors(x) {
                if set.contains(&y) && comp.insert(y) {
                    stack.push(y);
                }
            }
        }
        comp.len() == set.len()
    }

    /// Contracts `set` into a single vertex named by the minimum id of `set`.
    /// `set` need not be connected; the caller decides whether the result is a minor.
    pub fn contract(&self, set: &VertexSet) -> (Graph, Vertex) {
        let rep = *set.iter().next().expect("non-empty contraction set");
        let mut g = Graph::new();
        for v in self.vertices() {
            g.add_vertex(if set.contains(&v) { rep } else { v });
        }
        for (u, v) in self.edges() {
            let a = if set.contains(&u) { rep } else { u };
            let b = if set.contains(&v) { rep } else { v };
            if a != b {
                g.insert_edge(a, b);
            }
        }
        (g, rep)
    }

    /// BFS distances from `src` (only reachable vertices appear).
    pub fn bfs_distances(&self, src: Vertex) -> BTreeMap<Vertex, usize> {
        let mut dist = BTreeMap::from([(src, 0usize)]);
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            let d = dist[&x];
            for &y in self.neighbors(x) {
                if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(y) {
                    e.insert(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn eccentricity(&self, v: Vertex) -> Result<usize, GraphError> {
        let d = self.bfs_distances(v);
        if d.len() != self.n() {
            return Err(GraphError::Disconnected);
        }
        Ok(d.values().copied().max().unwrap_or(0))
    }

    pub fn diameter(&self) -> Result<usize, GraphError> {
        let mut best = 0;
        for v in self.vertices() {
            best = best.max(self.eccentricity(v)?);
        }
        Ok(best)
    }

    pub fn radius(&self) -> Result<usize, GraphError> {
        let mut best: Option<usize> = None;
        for v in self.vertices() {
            let e = self.eccentricity(v)?;
            best = Some(best.map_or(e, |b| b.min(e)));
        }
        Ok(best.unwrap_or(0))
    }

    pub fn is_forest(&self) -> bool {
        self.m() + self.components().len() == self.n()
    }

    /// Disjoint union where the vertices of `other` are shifted by `offset`.
    pub fn disjoint_union_shifted(&self, other: &Graph, offset: Vertex) -> Graph {
        let mut g = self.clone();
        for v in other.vertices() {
            assert!(!g.contains(v + offset), "vertex ids overlap in disjoint union");
            g.add_vertex(v + offset);
        }
        for (u, v) in other.edges() {
            g.insert_edge(u + offset, v + offset);
        }
        g
    }

    /// Relabels every vertex through `map` (must be injective on V(G)).
    pub fn relabel(&self, map: impl Fn(Vertex) -> Vertex) -> Graph {
        let mut g = Graph::new();
        for v in self.vertices() {
            g.add_vertex(map(v));
        }
        assert_eq!(g.n(), self.n(), "relabeling is not injective");
        for (u, v) in self.edges() {
            g.insert_edge(map(u), map(v));
        }
        g
    }

    /// Parses the text format: first line `n m`, then `m` lines `u v`.
    /// Vertices are `0..n`.
    pub fn parse(text: &str) -> Result<Graph, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, header) = lines.next().ok_or(GraphError::Parse { line: 1, msg: "missing header".into() })?;
        let nums = parse_numbers(header, ln)?;
        if nums.len() != 2 {
            return Err(GraphError::Parse { line: ln, msg: "header must be `n m`".into() });
        }
        let (n, m) = (nums[0], nums[1]);
        let mut g = Graph::with_vertices(0..n);
        let mut count = 0;
        for (ln, line) in lines {
            let e = parse_numbers(line, ln)?;
            if e.len() != 2 {
                return Err(GraphError::Parse { line: ln, msg: "edge line must be `u v`".into() });
            }
            g.add_edge(e[0], e[1]).map_err(|err| GraphError::Parse { line: ln, msg: err.to_string() })?;
            count += 1;
        }
        if count != m as usize {
            return Err(GraphError::Parse { line: 1, msg: format!("header announces {m} edges, found {count}") });
        }
        Ok(g)
    }

    /// Writes the text format. Vertex ids must be exactly `0..n`.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n(), self.m());
        for (u, v) in self.edges() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    /// Relabels vertices to `0..n` in ascending order; returns the new graph
    /// and the old id of every new vertex.
    pub fn compact(&self) -> (Graph, Vec<Vertex>) {
        let old: Vec<Vertex> = self.vertices().collect();
        let index: BTreeMap<Vertex, Vertex> = old.iter().enumerate().map(|(i, &v)| (v, i as Vertex)).collect();
        (self.relabel(|v| index[&v]), old)
    }
}

fn parse_numbers(line: &str, ln: usize) -> Result<Vec<u32>, GraphError> {
    line.split_whitespace()
        .map(|t| t.parse::<u32>().map_err(|e| GraphError::Parse { line: ln, msg: format!("{t:?}: {e}") }))
        .collect()
}

/// Separation `(A, B)` stored by its vertex sets. The edges are canonical:
/// `A = G[V(A)]` and `B = G[V(B)] − E(G[V(A) ∩ V(B)])`, so every edge inside the
/// boundary belongs to `A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Separation {
    pub a: VertexSet,
    pub b: VertexSet,
}

impl Separation {
    /// Checks `V(A) ∪ V(B) = V(G)` and that no edge joins `A − B` to `B − A`.
    pub fn new(g: &Graph, a: VertexSet, b: VertexSet) -> Result<Self, GraphError> {
        for v in a.iter().chain(b.iter()) {
            if !g.contains(*v) {
                return Err(GraphError::UnknownVertex(*v));
            }
        }
        if let Some(v) = g.vertices().find(|v| !a.contains(v) && !b.contains(v)) {
            return Err(GraphError::InvalidSeparation(format!("vertex {v} on neither side")));
        }
        for (u, v) in g.edges() {
            let ua = a.contains(&u) && !b.contains(&u);
            let ub = b.contains(&u) && !a.contains(&u);
            let va = a.contains(&v) && !b.contains(&v);
            let vb = b.contains(&v) && !a.contains(&v);
            if (ua && vb) || (ub && va) {
                return Err(GraphError::InvalidSeparation(format!("edge {u}-{v} crosses the separation")));
            }
        }
        Ok(Separation { a, b })
    }

    /// `(∅, G)`.
    pub fn trivial(g: &Graph) -> Self {
        Separation { a: VertexSet::new(), b: g.vertex_set() }
    }

    pub fn boundary(&self) -> VertexSet {
        self.a.intersection(&self.b).copied().collect()
    }

    pub fn order(&self) -> usize {
        self.a.intersection(&self.b).count()
    }

    pub fn side_a(&self, g: &Graph) -> Graph {
        g.induced(&self.a)
    }

    pub fn side_b(&self, g: &Graph) -> Graph {
        let mut b = g.induced(&self.b);
        for (u, v) in b.edges() {
            if self.a.contains(&u) && self.a.contains(&v) {
                b.remove_edge(u, v);
            }
        }
        b
    }

    /// `(A, B) ≤ (A', B')`, i.e. `A ⊆ A'` and `B ⊇ B'`.
    pub fn le(&self, other: &Separation) -> bool {
        self.a.is_subset(&other.a) && other.b.is_subset(&self.b)
    }

    /// `other` extends `self`: `self ≤ other` and the order does not grow.
    pub fn is_extended_by(&self, other: &Separation) -> bool {
        self.le(other) && other.order() <= self.order()
    }

    pub fn reversed(&self) -> Separation {
        Separation { a: self.b.clone(), b: self.a.clone() }
    }
}

/// Family of vertex-disjoint `X–Y` paths, each an ordered vertex list from
/// its `X` end to its `Y` end.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Linkage {
    pub paths: Vec<Vec<Vertex>>,
    pub x: VertexSet,
    pub y: VertexSet,
}

impl Linkage {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Checks that every path is an `X–Y` path of `g` and paths are disjoint.
    pub fn validate(&self, g: &Graph) -> Result<(), String> {
        let mut used = VertexSet::new();
        for p in &self.paths {
            let (Some(&first), Some(&last)) = (p.first(), p.last()) else {
                return Err("empty path".into());
            };
            if !self.x.contains(&first) || !self.y.contains(&last) {
                return Err(format!("path {p:?} does not run from X to Y"));
            }
            for w in p.windows(2) {
                if !g.has_edge(w[0], w[1]) {
                    return Err(format!("path {p:?} uses non-edge {}-{}", w[0], w[1]));
                }
            }
            if p.len() > 1 {
                for &v in &p[1..p.len() - 1] {
                    if self.x.contains(&v) || self.y.contains(&v) {
                        return Err(format!("path {p:?} has internal vertex {v} in X ∪ Y"));
                    }
                }
            }
            for &v in p {
                if !used.insert(v) {
                    return Err(format!("vertex {v} used twice"));
                }
            }
        }
        Ok(())
    }
}

/// Rooted forest given by a parent map. Vertices without a parent are roots.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootedForest {
    #[serde(with = "int_keys")]
    parent: BTreeMap<Vertex, Option<Vertex>>,
}

impl RootedForest {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a forest from a parent map; rejects unknown parents and cycles.
    pub fn from_parents(parent: BTreeMap<Vertex, Option<Vertex>>) -> Result<Self, String> {
        for (&v, &p) in &parent {
            if let Some(p) = p {
                if !parent.contains_key(&p) {
                    return Err(format!("parent {p} of {v} is not a node"));
                }
            }
        }
        let f = RootedForest { parent };
        for &v in f.parent.keys() {
            let mut steps = 0;
            let mut cur = v;
            while let Some(p) = f.parent[&cur] {
                cur = p;
                steps += 1;
                if steps > f.parent.len() {
                    return Err(format!("cycle through {v}"));
                }
            }
        }
        Ok(f)
    }

    pub fn add_node(&mut self, v: Vertex, parent: Option<Vertex>) {
        if let Some(p) = parent {
            assert!(self.parent.contains_key(&p), "parent must exist");
        }
        self.parent.insert(v, parent);
    }

    pub fn set_parent(&mut self, v: Vertex, parent: Option<Vertex>) {
        self.parent.insert(v, parent);
    }

    pub fn parents(&self) -> &BTreeMap<Vertex, Option<Vertex>> {
        &self.parent
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn nodes(&self) -> VertexSet {
        self.parent.keys().copied().collect()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.parent.contains_key(&v)
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        self.parent.get(&v).copied().flatten()
    }

    pub fn roots(&self) -> Vec<Vertex> {
        self.parent.iter().filter(|(_, p)| p.is_none()).map(|(&v, _)| v).collect()
    }

    pub fn children(&self, v: Vertex) -> Vec<Vertex> {
        self.parent.iter().filter(|(_, p)| **p == Some(v)).map(|(&c, _)| c).collect()
    }

    pub fn children_map(&self) -> BTreeMap<Vertex, Vec<Vertex>> {
        let mut map: BTreeMap<Vertex, Vec<Vertex>> = self.parent.keys().map(|&v| (v, Vec::new())).collect();
        for (&v, &p) in &self.parent {
            if let Some(p) = p {
                map.get_mut(&p).expect("parent").push(v);
            }
        }
        map
    }

    pub fn leaves(&self) -> Vec<Vertex> {
        let cm = self.children_map();
        cm.into_iter().filter(|(_, c)| c.is_empty()).map(|(v, _)| v).collect()
    }

    /// Number of vertices on the path from `v` to its root.
    pub fn depth(&self, v: Vertex) -> usize {
        let mut d = 1;
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            d += 1;
            cur = p;
        }
        d
    }

    /// Root-to-`v` path, root first.
    pub fn path_from_root(&self, v: Vertex) -> Vec<Vertex> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent(cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Maximum number of vertices on a root-to-leaf path; 0 for the null forest.
    pub fn vertex_height(&self) -> usize {
        self.parent.keys().map(|&v| self.depth(v)).max().unwrap_or(0)
    }

    /// Whether `u` is a descendant of `w` (every vertex is its own descendant).
    pub fn is_descendant(&self, u: Vertex, w: Vertex) -> bool {
        let mut cur = Some(u);
        while let Some(c) = cur {
            if c == w {
                return true;
            }
            cur = self.parent(c);
        }
        false
    }

    /// Whether `u ≠ w` are ancestor-related, i.e. `uw` is an edge of the closure.
    pub fn in_closure(&self, u: Vertex, w: Vertex) -> bool {
        u != w && (self.is_descendant(u, w) || self.is_descendant(w, u))
    }

    /// Root-to-leaf paths, in ascending leaf order.
    pub fn root_to_leaf_paths(&self) -> Vec<Vec<Vertex>> {
        self.leaves().into_iter().map(|l| self.path_from_root(l)).collect()
    }

    /// Vertex set of the subtree rooted at `v`.
    pub fn subtree(&self, v: Vertex) -> VertexSet {
        let cm = self.children_map();
        let mut out = VertexSet::from([v]);
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for &c in &cm[&x] {
                out.insert(c);
                stack.push(c);
            }
        }
        out
    }

    /// Restriction to `keep`: each kept vertex hangs below its nearest kept
    /// proper ancestor. Ancestor relations among kept vertices are preserved.
    pub fn restrict(&self, keep: &VertexSet) -> RootedForest {
        let mut parent = BTreeMap::new();
        for &v in self.parent.keys() {
            if !keep.contains(&v) {
                continue;
            }
            let mut cur = self.parent(v);
            while let Some(c) = cur {
                if keep.contains(&c) {
                    break;
                }
                cur = self.parent(c);
            }
            parent.insert(v, cur);
        }
        RootedForest { parent }
    }

    /// Underlying undirected graph (tree edges).
    pub fn as_graph(&self) -> Graph {
        let mut g = Graph::with_vertices(self.parent.keys().copied());
        for (&v, &p) in &self.parent {
            if let Some(p) = p {
                g.insert_edge(v, p);
            }
        }
        g
    }

    /// Whether the closure of this forest contains every edge of `g` and the
    /// node set equals `V(g)`.
    pub fn is_elimination_forest_of(&self, g: &Graph) -> bool {
        self.nodes() == g.vertex_set() && g.edges().iter().all(|&(u, v)| self.in_closure(u, v))
    }

    /// Disjoint union; panics on overlapping node sets.
    pub fn union(&self, other: &RootedForest) -> RootedForest {
        let mut parent = self.parent.clone();
        for (&v, &p) in &other.parent {
            assert!(parent.insert(v, p).is_none(), "overlapping forests");
        }
        RootedForest { parent }
    }
}

/// Serde adapter for integer-keyed maps inside internally tagged enums, where
/// keys arrive as JSON strings.
pub mod int_keys {
    use std::collections::BTreeMap;
    use std::str::FromStr;

    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<K: Serialize, V: Serialize, S: Serializer>(map: &BTreeMap<K, V>, s: S) -> Result<S::Ok, S::Error> {
        map.serialize(s)
    }

    pub fn deserialize<'de, K, V, D>(d: D) -> Result<BTreeMap<K, V>, D::Error>
    where
        K: FromStr + Ord,
        K::Err: std::fmt::Display,
        V: Deserialize<'de>,
        D: Deserializer<'de>,
    {
        let raw = BTreeMap::<String, V>::deserialize(d)?;
        raw.into_iter().map(|(k, v)| Ok((k.parse::<K>().map_err(D::Error::custom)?, v))).collect()
    }
}

/// Depth-first-search tree of a connected graph, exploring neighbors in
/// ascending id order.
pub fn dfs_tree(g: &Graph, root: Vertex) -> Result<RootedForest, GraphError> {
    if !g.contains(root) {
        return Err(GraphError::UnknownVertex(root));
    }
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let mut forest = RootedForest::new();
    forest.add_node(root, None);
    // explicit stack of (vertex, neighbor iterator position)
    let mut stack: Vec<(Vertex, Vec<Vertex>, usize)> = vec![(root, g.neighbors(root).iter().copied().collect(), 0)];
    while let Some((v, ns, idx)) = stack.last_mut() {
        if *idx >= ns.len() {
            stack.pop();
            continue;
        }
        let w = ns[*idx];
        *idx += 1;
        let v = *v;
        if !forest.contains(w) {
            forest.add_node(w, Some(v));
            stack.push((w, g.neighbors(w).iter().copied().collect(), 0));
        }
    }
    Ok(forest)
}

/// Standard generators.
pub mod generate {
    use super::*;

    /// `k × ℓ` grid with vertex `(i, j)` (0-based) named `i·ℓ + j`.
    pub fn grid(k: u32, l: u32) -> Graph {
        let mut g = Graph::with_vertices(0..k * l);
        for i in 0..k {
            for j in 0..l {
                let v = i * l + j;
                if j + 1 < l {
                    g.insert_edge(v, v + 1);
                }
                if i + 1 < k {
                    g.insert_edge(v, v + l);
                }
            }
        }
        g
    }

    /// Vertex id of grid coordinate `(i, j)` in [`grid`]`(_, l)`.
    pub fn grid_id(l: u32, i: u32, j: u32) -> Vertex {
        i * l + j
    }

    /// Vertices on the outer face of the `k × ℓ` grid.
    pub fn grid_outer_face(k: u32, l: u32) -> VertexSet {
        let mut s = VertexSet::new();
        for i in 0..k {
            for j in 0..l {
                if i == 0 || j == 0 || i + 1 == k || j + 1 == l {
                    s.insert(i * l + j);
                }
            }
        }
        s
    }

    pub fn path(n: u32) -> Graph {
        let mut g = Graph::with_vertices(0..n);
        for v in 1..n {
            g.insert_edge(v - 1, v);
        }
        g
    }

    pub fn cycle(n: u32) -> Graph {
        let mut g = path(n);
        if n >= 3 {
            g.insert_edge(n - 1, 0);
        }
        g
    }

    pub fn clique(n: u32) -> Graph {
        let mut g = Graph::with_vertices(0..n);
        for u in 0..n {
            for v in u + 1..n {
                g.insert_edge(u, v);
            }
        }
        g
    }

    pub fn star(leaves: u32) -> Graph {
        let mut g = Graph::with_vertices(0..=leaves);
        for v in 1..=leaves {
            g.insert_edge(0, v);
        }
        g
    }

    /// Fan on `n` vertices: the path `1 − 2 − … − (n−1)` plus the universal
    /// vertex `0`.
    pub fn fan(n: u32) -> Graph {
        let mut g = Graph::with_vertices(0..n);
        for v in 2..n {
            g.insert_edge(v - 1, v);
        }
        for v in 1..n {
            g.insert_edge(0, v);
        }
        g
    }

    /// Complete ternary tree of the given vertex-height; node `i` has children
    /// `3i+1, 3i+2, 3i+3`, root `0`.
    pub fn complete_ternary(height: u32) -> Graph {
        let mut n: u32 = 0;
        let mut level = 1;
        for _ in 0..height {
            n += level;
            level *= 3;
        }
        let mut g = Graph::with_vertices(0..n);
        for v in 1..n {
            g.insert_edge((v - 1) / 3, v);
        }
        g
    }

    /// Adds an apex vertex (id `max + 1`, or 0 for the null forest) to `forest`,
    /// adjacent to `apex_neighbors`. Returns the graph and the apex id.
    pub fn apex_forest(forest: &Graph, apex_neighbors: &VertexSet) -> Result<(Graph, Vertex), GraphError> {
        if !forest.is_forest() {
            return Err(GraphError::InvalidSeparation("base graph is not a forest".into()));
        }
        let apex = forest.max_id().map_or(0, |m| m + 1);
        let mut g = forest.clone();
        g.add_vertex(apex);
        for &v in apex_neighbors {
            if !forest.contains(v) {
                return Err(GraphError::UnknownVertex(v));
            }
            g.insert_edge(apex, v);
        }
        Ok((g, apex))
    }
}

#[cfg(test)]
mod tests {
    use super::generate::*;
    use super::*;

    #[test]
    fn grid_counts() {
        for k in 0..5 {
            for l in 0..5 {
                let g = grid(k, l);
                assert_eq!(g.n() as u32, k * l);
                if k > 0 && l > 0 {
                    assert_eq!(g.m() as u32, 2 * k * l - k - l);
                }
            }
        }
        let c4 = grid(2, 2);
        assert!(c4.vertices().all(|v| c4.degree(v) == 2));
    }

    #[test]
    fn fan_and_ternary() {
        let f = fan(4);
        assert_eq!((f.n(), f.m()), (4, 5));
        let t = complete_ternary(2);
        assert_eq!((t.n(), t.m()), (4, 3));
        assert_eq!(t.degree(0), 3);
    }

    #[test]
    fn parse_rejects_loops_and_duplicates() {
        assert!(Graph::parse("2 1\n0 0\n").is_err());
        assert!(Graph::parse("2 2\n0 1\n1 0\n").is_err());
        assert!(Graph::parse("2 1\n0 5\n").is_err());
        let g = Graph::parse("3 2\n0 1\n1 2\n").unwrap();
        assert_eq!(g.to_text(), "3 2\n0 1\n1 2\n");
    }

    #[test]
    fn dfs_tree_examples() {
        let t = dfs_tree(&path(3), 0).unwrap();
        assert_eq!(t.vertex_height(), 3);
        let t = dfs_tree(&clique(3), 1).unwrap();
        assert_eq!(t.vertex_height(), 3);
        let c4 = grid(2, 2);
        let t = dfs_tree(&c4, 0).unwrap();
        assert_eq!(t.vertex_height(), 4);
        assert!(t.is_elimination_forest_of(&c4));
        assert_eq!(dfs_tree(&Graph::with_vertices([0, 1]), 0), Err(GraphError::Disconnected));
    }

    #[test]
    fn separation_checks() {
        let g = path(3);
        assert!(Separation::new(&g, VertexSet::from([0, 1]), VertexSet::from([1, 2])).is_ok());
        assert!(Separation::new(&g, VertexSet::from([0]), VertexSet::from([1, 2])).is_err());
        let s = Separation::new(&g, VertexSet::from([0, 1]), VertexSet::from([1, 2])).unwrap();
        assert_eq!(s.order(), 1);
        assert_eq!(s.side_b(&g).m(), 1);
    }

    #[test]
    fn forest_restriction_keeps_ancestry() {
        let f = dfs_tree(&path(5), 0).unwrap();
        let r = f.restrict(&VertexSet::from([0, 2, 4]));
        assert_eq!(r.parent(4), Some(2));
        assert_eq!(r.parent(2), Some(0));
        assert_eq!(r.vertex_height(), 3);
    }

    #[test]
    fn contraction_names_min() {
        let (g, rep) = path(4).contract(&VertexSet::from([1, 2, 3]));
        assert_eq!(rep, 1);
        assert_eq!(g.edges(), vec![(0, 1)]);
    }
}
