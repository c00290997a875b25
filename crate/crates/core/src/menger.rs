//! Vertex-disjoint X–Y paths by unit-vertex-capacity max-flow.

use std::collections::VecDeque;

use crate::graph::{Graph, Linkage, Separation, Vertex, VertexSet};

const INF: u32 = u32::MAX / 4;

struct Network {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u32>,
}

impl Network {
    fn new(nodes: usize) -> Self {
        Network { head: vec![Vec::new(); nodes], to: Vec::new(), cap: Vec::new() }
    }

    fn add(&mut self, u: usize, v: usize, c: u32) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    /// Shortest augmenting path by BFS; returns the edge list if one exists.
    fn augmenting_path(&self, s: usize, t: usize) -> Option<Vec<usize>> {
        let mut pred: Vec<Option<usize>> = vec![None; self.head.len()];
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.head[u] {
                let v = self.to[e];
                if self.cap[e] > 0 && !seen[v] {
                    seen[v] = true;
                    pred[v] = Some(e);
                    if v == t {
                        let mut path = Vec::new();
                        let mut cur = t;
                        while let Some(e) = pred[cur] {
                            path.push(e);
                            cur = self.to[e ^ 1];
                        }
                        path.reverse();
                        return Some(path);
                    }
                    queue.push_back(v);
                }
            }
        }
        None
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &e in &self.head[u] {
                let v = self.to[e];
                if self.cap[e] > 0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}

/// Maximum family of disjoint X–Y paths together with a minimum separation
/// `(A, B)` with `X ⊆ V(A)`, `Y ⊆ V(B)` of the same order. The separation is
/// the one closest to `X`. Paths are trimmed so that their internal vertices
/// avoid `X ∪ Y`.
pub fn menger(g: &Graph, x: &VertexSet, y: &VertexSet) -> (Linkage, Separation) {
    let verts: Vec<Vertex> = g.vertices().collect();
    let idx = |v: Vertex| verts.binary_search(&v).expect("vertex of g");
    let n = verts.len();
    let (source, sink) = (2 * n, 2 * n + 1);
    let mut net = Network::new(2 * n + 2);
    for &v in x {
        net.add(source, 2 * idx(v), INF);
    }
    for (i, &v) in verts.iter().enumerate() {
        net.add(2 * i, 2 * i + 1, 1);
        for &w in g.neighbors(v) {
            net.add(2 * i + 1, 2 * idx(w), INF);
        }
    }
    for &v in y {
        net.add(2 * idx(v) + 1, sink, INF);
    }
    let mut capacity = net.cap.clone();
    while let Some(path) = net.augmenting_path(source, sink) {
        let delta = path.iter().map(|&e| net.cap[e]).min().expect("non-empty path");
        for e in path {
            net.cap[e] -= delta;
            net.cap[e ^ 1] += delta;
        }
    }
    let reach = net.reachable(source);
    let a: VertexSet = (0..n).filter(|&i| reach[2 * i]).map(|i| verts[i]).collect();
    let b: VertexSet = (0..n).filter(|&i| !reach[2 * i + 1]).map(|i| verts[i]).collect();

    // net flow on forward edges
    let mut flow: Vec<u32> = (0..net.to.len()).map(|e| if e % 2 == 0 { capacity[e] - net.cap[e] } else { 0 }).collect();
    capacity.clear();
    let mut paths = Vec::new();
    loop {
        let Some(first) = net.head[source].iter().copied().find(|&e| e % 2 == 0 && flow[e] > 0) else {
            break;
        };
        let mut walk_nodes = vec![source];
        let mut walk_edges: Vec<usize> = Vec::new();
        let mut next = Some(first);
        while let Some(e) = next {
            let v = net.to[e];
            if let Some(pos) = walk_nodes.iter().position(|&u| u == v) {
                // cancel a flow cycle
                for &c in &walk_edges[pos..] {
                    flow[c] -= 1;
                }
                flow[e] -= 1;
                walk_nodes.truncate(pos + 1);
                walk_edges.truncate(pos);
            } else {
                walk_nodes.push(v);
                walk_edges.push(e);
                if v == sink {
                    break;
                }
            }
            let u = *walk_nodes.last().expect("walk");
            next = net.head[u].iter().copied().find(|&e| e % 2 == 0 && flow[e] > 0);
        }
        if walk_nodes.last() != Some(&sink) {
            break;
        }
        for &e in &walk_edges {
            flow[e] -= 1;
        }
        let mut vs: Vec<Vertex> = Vec::new();
        for &node in &walk_nodes[1..walk_nodes.len() - 1] {
            let v = verts[node / 2];
            if vs.last() != Some(&v) {
                vs.push(v);
            }
        }
        paths.push(trim_path(&vs, x, y));
    }
    paths.sort();
    let sep = Separation { a, b };
    debug_assert_eq!(sep.order(), paths.len());
    (Linkage { paths, x: x.clone(), y: y.clone() }, sep)
}

/// Keeps the segment from the last `X` vertex to the first `Y` vertex after it.
fn trim_path(p: &[Vertex], x: &VertexSet, y: &VertexSet) -> Vec<Vertex> {
    let start = p.iter().rposition(|v| x.contains(v)).expect("path starts in X");
    let end = start + p[start..].iter().position(|v| y.contains(v)).expect("path ends in Y");
    p[start..=end].to_vec()
}

/// Given a separation `(A, B)` of `g`, runs Menger inside `G[V(B)]` from the
/// boundary to `y ⊆ V(B)` and lifts the cut to a separation `(P, Q)` of `g`
/// with `(A, B) ≤ (P, Q)`, `y ⊆ V(Q)`, and any separation `(A', B') ≥ (A, B)`
/// with `y ⊆ V(B')` of order at most the linkage size satisfying
/// `(P, Q) ≤ (A', B')` whenever it is X-closest. Paths run from the boundary of
/// `(A, B)` to `y`.
pub fn menger_from_separation(g: &Graph, sep: &Separation, y: &VertexSet) -> (Linkage, Separation) {
    let gb = g.induced(&sep.b);
    let x = sep.boundary();
    let (linkage, inner) = menger(&gb, &x, y);
    let mut p = sep.a.clone();
    p.extend(inner.a.iter().copied());
    (linkage, Separation { a: p, b: inner.b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::*;

    fn set(v: &[Vertex]) -> VertexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn path_graph() {
        let g = path(3);
        let (l, s) = menger(&g, &set(&[0]), &set(&[2]));
        assert_eq!(l.paths, vec![vec![0, 1, 2]]);
        assert_eq!(s.order(), 1);
        l.validate(&g).unwrap();
    }

    #[test]
    fn clique_trivial_paths() {
        let g = clique(4);
        let all = g.vertex_set();
        let (l, s) = menger(&g, &all, &all);
        assert_eq!(l.paths, vec![vec![0], vec![1], vec![2], vec![3]]);
        assert_eq!(s.order(), 4);
    }

    #[test]
    fn grid_rows() {
        let g = grid(3, 3);
        let first: VertexSet = (0..3).map(|i| grid_id(3, i, 0)).collect();
        let third: VertexSet = (0..3).map(|i| grid_id(3, i, 2)).collect();
        let (l, s) = menger(&g, &first, &third);
        assert_eq!(l.len(), 3);
        assert_eq!(s.order(), 3);
        l.validate(&g).unwrap();
        Separation::new(&g, s.a.clone(), s.b.clone()).unwrap();
    }

    #[test]
    fn empty_sets() {
        let g = path(4);
        let (l, s) = menger(&g, &VertexSet::new(), &set(&[3]));
        assert!(l.is_empty());
        assert_eq!(s.order(), 0);
    }

    #[test]
    fn from_separation_lifts_cut() {
        let g = path(6);
        let sep = Separation::new(&g, set(&[0, 1]), set(&[1, 2, 3, 4, 5])).unwrap();
        let (l, ps) = menger_from_separation(&g, &sep, &set(&[5]));
        assert_eq!(l.paths, vec![vec![1, 2, 3, 4, 5]]);
        assert!(sep.le(&ps));
        Separation::new(&g, ps.a.clone(), ps.b.clone()).unwrap();
        assert_eq!(ps.boundary(), set(&[1]));
    }
}
