//! Seeded random instances and the invariant checks run over them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::budget::OracleBudget;
use crate::decomp::verify_focused;
use crate::ep::{copies, rooted_tree_ep, EpError, TreeEp};
use crate::graph::{Graph, Vertex, VertexSet};
use crate::minors::{find_rooted_minor, verify_model, Rooting};
use crate::spw::{decide_spw, SpwOutcome};
use crate::tangles::{check_duality, TangleError};
use crate::td::{binom2, decide_std};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Spw,
    Std,
    Duality,
    Ep,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Spw => "spw",
            Profile::Std => "std",
            Profile::Duality => "duality",
            Profile::Ep => "ep",
        }
    }
}

/// Generator stream for instance `index` of run `seed`.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `G(n, p)` on vertices `0..n`.
pub fn random_graph(rng: &mut impl Rng, n: u32, p: f64) -> Graph {
    let mut g = Graph::with_vertices(0..n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v).expect("fresh pair");
            }
        }
    }
    g
}

/// Random recursive tree on `0..n` plus `G(n, p)` extra edges.
pub fn random_connected_graph(rng: &mut impl Rng, n: u32, p: f64) -> Graph {
    let mut g = random_graph(rng, n, p);
    for v in 1..n {
        let u = rng.gen_range(0..v);
        if !g.has_edge(u, v) {
            g.add_edge(u, v).expect("fresh pair");
        }
    }
    g
}

/// Random recursive forest on `0..n`: each vertex joins an earlier one with
/// probability `attach`.
pub fn random_forest(rng: &mut impl Rng, n: u32, attach: f64) -> Graph {
    let mut g = Graph::with_vertices(0..n);
    for v in 1..n {
        if rng.gen_bool(attach) {
            let u = rng.gen_range(0..v);
            g.add_edge(u, v).expect("fresh pair");
        }
    }
    g
}

pub fn random_tree(rng: &mut impl Rng, n: u32) -> Graph {
    random_forest(rng, n, 1.0)
}

/// Random subset of the vertices with at most `max` elements.
pub fn random_subset(rng: &mut impl Rng, g: &Graph, max: usize) -> VertexSet {
    let mut vs: Vec<Vertex> = g.vertices().collect();
    let size = rng.gen_range(0..=max.min(vs.len()));
    let mut out = VertexSet::new();
    for _ in 0..size {
        let i = rng.gen_range(0..vs.len());
        out.insert(vs.swap_remove(i));
    }
    out
}

/// One fuzz instance; `param` is the forest size, path length or `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Instance {
    pub graph: Graph,
    pub roots: VertexSet,
    pub pattern: Option<Graph>,
    pub param: usize,
}

/// Instance `index` of the run `(profile, seed)`.
pub fn instance(profile: Profile, seed: u64, index: u64) -> Instance {
    let mut rng = rng_for(seed, index);
    let p = rng.gen_range(0.1..0.55);
    match profile {
        Profile::Spw => {
            let n = rng.gen_range(1..=12);
            let graph = random_graph(&mut rng, n, p);
            let roots = random_subset(&mut rng, &graph, 6);
            let size = rng.gen_range(1..=4);
            let forest = random_forest(&mut rng, size, 0.7);
            Instance { graph, roots, pattern: Some(forest), param: size as usize }
        }
        Profile::Std => {
            let n = rng.gen_range(1..=12);
            let graph = random_graph(&mut rng, n, p);
            let roots = random_subset(&mut rng, &graph, 12);
            Instance { graph, roots, pattern: None, param: rng.gen_range(1..=4) }
        }
        Profile::Duality => {
            let n = rng.gen_range(1..=6);
            let graph = random_connected_graph(&mut rng, n, p);
            let roots = random_subset(&mut rng, &graph, 6);
            Instance { graph, roots, pattern: None, param: 0 }
        }
        Profile::Ep => {
            let n = rng.gen_range(1..=10);
            let graph = random_graph(&mut rng, n, p);
            let roots = random_subset(&mut rng, &graph, 10);
            let size = rng.gen_range(1..=3);
            let tree = random_tree(&mut rng, size);
            Instance { graph, roots, pattern: Some(tree), param: rng.gen_range(1..=3) }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// Budget refusal; counted separately, never as a pass.
    Skip(String),
    Fail(String),
}

/// Runs the profile's invariant checks on one instance.
pub fn check(profile: Profile, inst: &Instance, budget: &OracleBudget) -> Verdict {
    let (g, s) = (&inst.graph, &inst.roots);
    match profile {
        Profile::Spw => {
            let f = inst.pattern.as_ref().expect("spw instances carry a forest");
            match decide_spw(g, s, f) {
                Err(e) => Verdict::Fail(e.to_string()),
                Ok(SpwOutcome::Decomposition(c)) => match verify_focused(g, s, &c) {
                    Err(e) => Verdict::Fail(e.to_string()),
                    Ok(w) if w > 2 * f.n() as i64 - 2 => Verdict::Fail(format!("width {w} exceeds {}", 2 * f.n() - 2)),
                    Ok(_) => Verdict::Pass,
                },
                Ok(SpwOutcome::Model(m)) => rooted_model_check(g, f, s, &m, budget),
            }
        }
        Profile::Std => {
            let l = inst.param;
            match decide_std(g, s, l) {
                Err(e) => Verdict::Fail(e.to_string()),
                Ok(SpwOutcome::Decomposition(c)) => match verify_focused(g, s, &c) {
                    Err(e) => Verdict::Fail(e.to_string()),
                    Ok(h) if h > binom2(l) as i64 => Verdict::Fail(format!("height {h} exceeds {}", binom2(l))),
                    Ok(_) => Verdict::Pass,
                },
                Ok(SpwOutcome::Model(m)) => rooted_model_check(g, &crate::graph::generate::path(l as u32), s, &m, budget),
            }
        }
        Profile::Duality => match check_duality(g, s, budget) {
            Ok(r) if r.holds() => Verdict::Pass,
            Ok(r) => Verdict::Fail(format!("duality violated: {r:?}")),
            Err(TangleError::Budget(e)) => Verdict::Skip(e.to_string()),
            Err(e) => Verdict::Fail(e.to_string()),
        },
        Profile::Ep => check_ep(inst, budget),
    }
}

fn rooted_model_check(g: &Graph, h: &Graph, s: &VertexSet, m: &crate::minors::MinorModel, budget: &OracleBudget) -> Verdict {
    let rooting = Rooting::Rooted(s.clone());
    if let Err(e) = verify_model(g, h, m, &rooting) {
        return Verdict::Fail(e.to_string());
    }
    match find_rooted_minor(g, h, &rooting, budget) {
        Ok(Some(_)) => Verdict::Pass,
        Ok(None) => Verdict::Fail("model returned but the exhaustive search finds none".into()),
        Err(e) => Verdict::Skip(e.to_string()),
    }
}

fn check_ep(inst: &Instance, budget: &OracleBudget) -> Verdict {
    let (g, s, k) = (&inst.graph, &inst.roots, inst.param);
    let t = inst.pattern.as_ref().expect("ep instances carry a tree");
    let rooting = Rooting::Rooted(s.clone());
    let outcome = match rooted_tree_ep(g, s, t, k, budget) {
        Ok(o) => o,
        Err(EpError::Budget(e)) => return Verdict::Skip(e.to_string()),
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let packable = match find_rooted_minor(g, &copies(t, k).0, &rooting, budget) {
        Ok(found) => found.is_some(),
        Err(e) => return Verdict::Skip(e.to_string()),
    };
    match outcome {
        TreeEp::Packing { models } => {
            if models.len() != k {
                return Verdict::Fail(format!("packing has {} models, expected {k}", models.len()));
            }
            let mut used = VertexSet::new();
            for m in &models {
                if let Err(e) = verify_model(g, t, m, &rooting) {
                    return Verdict::Fail(e.to_string());
                }
                let support = m.support();
                if !used.is_disjoint(&support) {
                    return Verdict::Fail("packing models overlap".into());
                }
                used.extend(support);
            }
            if packable { Verdict::Pass } else { Verdict::Fail("packing returned but the exhaustive search finds none".into()) }
        }
        TreeEp::Cover { z } => {
            let bound = (2 * k * t.n() - 1) * (k - 1);
            if z.len() > bound {
                return Verdict::Fail(format!("cover of size {} exceeds {bound}", z.len()));
            }
            let rest = g.remove_vertices(&z);
            let rest_roots: VertexSet = s.difference(&z).copied().collect();
            match find_rooted_minor(&rest, t, &Rooting::Rooted(rest_roots), budget) {
                Ok(Some(_)) => Verdict::Fail("cover misses a rooted model".into()),
                Ok(None) if packable => Verdict::Fail("cover returned although k disjoint models exist".into()),
                Ok(None) => Verdict::Pass,
                Err(e) => Verdict::Skip(e.to_string()),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub index: u64,
    pub reason: String,
    pub instance: Instance,
    pub reproducer: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FuzzReport {
    pub profile: Profile,
    pub seed: u64,
    pub start: u64,
    pub count: u64,
    pub passed: u64,
    pub failed: u64,
    pub skipped: u64,
    pub first_counterexample: Option<Counterexample>,
}

/// Checks instances `start .. start + count` of the run `(profile, seed)`.
pub fn run(profile: Profile, count: u64, seed: u64, start: u64, budget: &OracleBudget) -> FuzzReport {
    let mut report = FuzzReport { profile, seed, start, count, passed: 0, failed: 0, skipped: 0, first_counterexample: None };
    for index in start..start + count {
        let inst = instance(profile, seed, index);
        match check(profile, &inst, budget) {
            Verdict::Pass => report.passed += 1,
            Verdict::Skip(_) => report.skipped += 1,
            Verdict::Fail(reason) => {
                report.failed += 1;
                if report.first_counterexample.is_none() {
                    let reproducer = format!("focuswidth fuzz {} 1 {seed} --start {index}", profile.name());
                    report.first_counterexample = Some(Counterexample { index, reason, instance: inst, reproducer });
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_deterministic() {
        for profile in [Profile::Spw, Profile::Std, Profile::Duality, Profile::Ep] {
            assert_eq!(instance(profile, 9, 3), instance(profile, 9, 3));
        }
        assert_ne!(instance(Profile::Spw, 9, 3), instance(Profile::Spw, 9, 4));
    }

    #[test]
    fn generators_respect_shapes() {
        let mut rng = rng_for(1, 0);
        for n in 1..8 {
            assert!(random_forest(&mut rng, n, 0.5).is_forest());
            let t = random_tree(&mut rng, n);
            assert!(t.is_forest() && t.is_connected());
            assert!(random_connected_graph(&mut rng, n, 0.2).is_connected());
        }
    }

    #[test]
    fn empty_run_is_vacuous() {
        let r = run(Profile::Duality, 0, 1, 0, &OracleBudget::default());
        assert_eq!((r.passed, r.failed, r.skipped), (0, 0, 0));
        assert!(r.first_counterexample.is_none());
    }

    #[test]
    fn small_runs_pass() {
        let budget = OracleBudget::default();
        for profile in [Profile::Spw, Profile::Std, Profile::Duality, Profile::Ep] {
            let r = run(profile, 20, 42, 0, &budget);
            assert_eq!(r.failed, 0, "{r:?}");
            assert_eq!(r.passed + r.skipped, 20);
        }
    }
}
