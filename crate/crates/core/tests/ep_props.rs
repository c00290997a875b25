mod common;

use common::*;
use focuswidth::ep::{pack_or_cover, PackOrCover};
use focuswidth::graph::{generate, Graph, Vertex, VertexSet};
use focuswidth::spw::{decide_spw, SpwOutcome};
use proptest::prelude::*;

/// Connected set grown from the `start`-th vertex of `s`, adding the
/// neighbour chosen by each step value until `size` vertices are reached.
fn grow(g: &Graph, s: &VertexSet, start: usize, steps: &[u32]) -> VertexSet {
    let first = *s.iter().nth(start % s.len()).unwrap();
    let mut set = VertexSet::from([first]);
    for &step in steps {
        let frontier: Vec<Vertex> = g.neighborhood(&set).into_iter().collect();
        if frontier.is_empty() {
            break;
        }
        set.insert(frontier[step as usize % frontier.len()]);
    }
    set
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn packing_is_disjoint_or_cover_hits_all(
        g in graph_strategy(10),
        mask in any::<u64>(),
        k in 1usize..=3,
        members in proptest::collection::vec((any::<usize>(), proptest::collection::vec(any::<u32>(), 0..4)), 1..8),
    ) {
        let s = subset(&g, mask, 6);
        prop_assume!(!s.is_empty());
        let SpwOutcome::Decomposition(cert) = decide_spw(&g, &s, &generate::path(3)).unwrap() else {
            return Ok(());
        };
        let fam: Vec<VertexSet> = members.iter().map(|(start, steps)| grow(&g, &s, *start, steps)).collect();
        match pack_or_cover(&g, &s, &cert, &fam, k).unwrap() {
            PackOrCover::Packing { members } => {
                prop_assert_eq!(members.len(), k);
                for (i, &a) in members.iter().enumerate() {
                    for &b in &members[i + 1..] {
                        prop_assert!(fam[a].is_disjoint(&fam[b]));
                    }
                }
            }
            PackOrCover::Cover { nodes, z } => {
                prop_assert!(nodes.len() < k);
                let width = cert.value() as usize;
                prop_assert!(z.len() <= (k - 1) * (width + 1));
                prop_assert!(fam.iter().all(|f| !f.is_disjoint(&z)));
            }
        }
    }
}
