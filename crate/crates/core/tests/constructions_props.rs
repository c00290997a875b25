use std::time::Instant;

use focuswidth::budget::OracleBudget;
use focuswidth::constructions::{apexify, check_hamiltonian, check_lower_bound, cut_open, lower_bound_graph, PlanePattern};
use focuswidth::graph::{Graph, RootedForest, Vertex};
use focuswidth::minors::{verify_model, Rooting};
use proptest::prelude::*;

/// Random connected plane graph: a grid with some edges removed, outer face
/// the longest face.
fn plane_strategy() -> impl Strategy<Value = PlanePattern> {
    (1u32..4, 2u32..5, proptest::collection::vec(any::<bool>(), 24)).prop_map(|(rows, cols, drop)| {
        let mut p = PlanePattern::grid(rows, cols);
        for ((v, w), d) in p.graph().edges().into_iter().zip(drop) {
            if !d {
                continue;
            }
            let rot = p.without_edge(v, w);
            if rot.graph().is_connected() {
                p = PlanePattern::with_longest_face(rot).expect("subgraph of a plane graph");
            }
        }
        p
    })
}

/// Spanning tree of `g` with `u` a leaf, following a shuffled edge order.
fn random_tree(g: &Graph, u: Vertex, seed: u64) -> RootedForest {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut ns: Vec<Vertex> = g.neighbors(u).iter().copied().collect();
    ns.shuffle(&mut rng);
    let mut t = RootedForest::new();
    t.add_node(u, None);
    t.add_node(ns[0], Some(u));
    let mut frontier = vec![ns[0]];
    while !frontier.is_empty() {
        let i = rand::Rng::gen_range(&mut rng, 0..frontier.len());
        let v = frontier.swap_remove(i);
        let mut nbrs: Vec<Vertex> = g.neighbors(v).iter().copied().filter(|&w| w != u && !t.contains(w)).collect();
        nbrs.shuffle(&mut rng);
        for w in nbrs {
            if !t.contains(w) {
                t.add_node(w, Some(v));
                frontier.push(w);
            }
        }
    }
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cut_open_invariants(h in plane_strategy(), seed in any::<u64>()) {
        let (hp, u) = apexify(&h).unwrap();
        hp.rotation().check_plane().unwrap();
        let g = hp.graph();
        let c = cut_open(&hp, u, &random_tree(&g, u, seed)).unwrap();
        prop_assert_eq!(c.graph.n(), 2 * h.graph().n());
        check_hamiltonian(&c.graph, &c.cycle).unwrap();
        c.rotation.check_plane().unwrap();
        prop_assert!(verify_model(&c.graph, &g, &c.model_back, &Rooting::None).is_ok());
    }

    #[test]
    fn lower_bound_radius_estimates(l in 2usize..7, r in 0usize..3) {
        let inst = lower_bound_graph(l, r).unwrap();
        let h = l / 2;
        let radius = inst.graph.radius().unwrap();
        prop_assert!(radius >= r);
        prop_assert!(radius * h <= inst.k + h * h);
        prop_assert_eq!(inst.graph.eccentricity(inst.root).unwrap(), radius);
    }
}

#[test]
fn desk_scale_lower_bound() {
    let start = Instant::now();
    let report = check_lower_bound(4, 0, Some(3), &OracleBudget::default()).unwrap();
    assert_eq!(report.n, 40);
    assert!(report.holds(), "{report:?}");
    assert!(start.elapsed().as_secs() < 300);
}
