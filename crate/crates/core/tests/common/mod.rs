#![allow(dead_code)]

use focuswidth::graph::{Graph, Vertex, VertexSet};
use proptest::prelude::*;

/// Random graph on `0..n` with edge probability given by the bit vector.
pub fn graph_strategy(max_n: u32) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = (n * n.saturating_sub(1) / 2) as usize;
        (Just(n), proptest::collection::vec(proptest::bool::weighted(0.3), pairs))
    })
    .prop_map(|(n, bits)| {
        let mut g = Graph::with_vertices(0..n);
        let mut k = 0;
        for u in 0..n {
            for v in u + 1..n {
                if bits[k] {
                    g.add_edge(u, v).unwrap();
                }
                k += 1;
            }
        }
        g
    })
}

/// Subset of `V(g)` of size at most `max`, chosen by a mask.
pub fn subset(g: &Graph, mask: u64, max: usize) -> VertexSet {
    g.vertices().filter(|&v| mask >> (v % 64) & 1 == 1).take(max).collect()
}

/// Forest on `0..k` where vertex `i ≥ 1` hangs below `parent[i]` if that is
/// smaller than `i`, and is a new root otherwise.
pub fn forest_from_choices(k: u32, choices: &[u32]) -> Graph {
    let mut f = Graph::with_vertices(0..k);
    for i in 1..k {
        let c = choices[i as usize % choices.len()] % (i + 1);
        if c < i {
            f.add_edge(c, i).unwrap();
        }
    }
    f
}

pub fn set(v: &[Vertex]) -> VertexSet {
    v.iter().copied().collect()
}
