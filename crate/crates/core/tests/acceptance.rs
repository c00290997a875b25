//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N: PASS|FAIL` line (written straight to stderr, so it shows
//! without `--nocapture`).

use std::io::Write;
use std::time::{Duration, Instant};

use focuswidth::budget::OracleBudget;
use focuswidth::constructions::{apexify, check_hamiltonian, check_lower_bound, cut_open, lower_bound_instance, spanning_tree_with_leaf, PlanePattern};
use focuswidth::decomp::{verify_focused, verify_layered, FocusedInner};
use focuswidth::ep::{copies, minimal_supports, pack_or_cover, PackOrCover};
use focuswidth::fuzz::{self, Profile};
use focuswidth::graph::{generate, Graph, VertexSet};
use focuswidth::layered::{layered_pw, layered_td, ApexPattern};
use focuswidth::minors::{find_rooted_minor, verify_model, Rooting};
use focuswidth::oracles::{connected_graphs, exact_width, pair_width_table, WidthKind};
use focuswidth::spw::{decide_spw, SpwOutcome};
use focuswidth::tangles::{build_tree_decomposition, check_duality, tangle_number, TreeBuild};
use focuswidth::td::binom2;
use rand::Rng;

const SEED: u64 = 20_240_601;

fn report(n: u32, name: &str, pass: bool, detail: &str, elapsed: Duration) {
    let line = format!("criterion {n} [{name}]: {} ({detail}; {:.1}s)\n", if pass { "PASS" } else { "FAIL" }, elapsed.as_secs_f64());
    let _ = std::io::stderr().write_all(line.as_bytes());
}

/// Records the outcome and fails the test on a violation or a blown time limit.
fn finish(n: u32, name: &str, failures: &[String], detail: &str, start: Instant, limit: Duration) {
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed <= limit;
    let detail = match failures.first() {
        Some(f) => format!("{detail}; {} failures, first: {f}", failures.len()),
        None if elapsed > limit => format!("{detail}; time limit {limit:?} exceeded"),
        None => detail.to_string(),
    };
    report(n, name, pass, &detail, elapsed);
    assert!(pass, "criterion {n}: {detail}");
}

fn fuzz_criterion(n: u32, name: &str, profile: Profile, count: u64, limit: Duration) {
    let start = Instant::now();
    let r = fuzz::run(profile, count, SEED, 0, &OracleBudget::default());
    let mut failures = Vec::new();
    if let Some(c) = &r.first_counterexample {
        failures.push(format!("{} ({})", c.reason, c.reproducer));
    }
    if r.skipped > 0 {
        failures.push(format!("{} instances refused by the budget", r.skipped));
    }
    finish(n, name, &failures, &format!("{}/{count} instances pass", r.passed), start, limit);
}

#[test]
fn criterion_01_spw_dichotomy() {
    fuzz_criterion(1, "rooted forest dichotomy for pw", Profile::Spw, 500, Duration::from_secs(60));
}

#[test]
fn criterion_02_std_dichotomy() {
    fuzz_criterion(2, "rooted path dichotomy for td", Profile::Std, 500, Duration::from_secs(60));
}

fn mask_set(g: &Graph, mask: usize) -> VertexSet {
    g.vertices().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| v).collect()
}

#[test]
fn criterion_03_exhaustive_small_graphs() {
    let start = Instant::now();
    let budget = OracleBudget::default();
    let (p2, p3) = (generate::path(2), generate::path(3));
    let mut failures = Vec::new();
    let (mut pairs, mut p3_free, mut p2_free) = (0usize, 0usize, 0usize);
    for n in 1..=7 {
        for g in connected_graphs(n) {
            let td = pair_width_table(&g, WidthKind::Td, &budget).unwrap();
            let pw = pair_width_table(&g, WidthKind::Pw, &budget).unwrap();
            for mask in 0..1usize << n {
                let s = mask_set(&g, mask);
                pairs += 1;
                let rooting = Rooting::Rooted(s.clone());
                if find_rooted_minor(&g, &p3, &rooting, &budget).unwrap().is_none() {
                    p3_free += 1;
                    if td[mask] > 3 {
                        failures.push(format!("td(G,S) = {} > 3 for {g:?}, S = {s:?}", td[mask]));
                    }
                }
                if find_rooted_minor(&g, &p2, &rooting, &budget).unwrap().is_none() {
                    p2_free += 1;
                    if pw[mask] > 2 {
                        failures.push(format!("pw(G,S) = {} > 2 for {g:?}, S = {s:?}", pw[mask]));
                    }
                }
            }
        }
    }
    let detail = format!("{pairs} pairs, {p3_free} without rooted P3, {p2_free} without rooted P2");
    finish(3, "exhaustive rooted-path bounds", &failures, &detail, start, Duration::from_secs(600));
}

#[test]
fn criterion_04_tangle_duality() {
    let start = Instant::now();
    let budget = OracleBudget::default();
    let mut failures = Vec::new();
    let mut pairs = 0;
    for n in 1..=6 {
        for g in connected_graphs(n) {
            for mask in 0..1usize << n {
                let s = mask_set(&g, mask);
                pairs += 1;
                match check_duality(&g, &s, &budget) {
                    Ok(r) if r.holds() => {}
                    Ok(r) => failures.push(format!("{g:?}, S = {s:?}: {r:?}")),
                    Err(e) => failures.push(format!("{g:?}, S = {s:?}: {e}")),
                }
            }
        }
    }
    finish(4, "tangle / treewidth duality", &failures, &format!("{pairs} pairs"), start, Duration::from_secs(900));
}

/// X-minor-free instances: random trees with `K_3`, lower-bound graphs with
/// their fan, and random connected graphs without a `fan(4)` or `fan(5)` minor.
fn layered_instances() -> Vec<(String, Graph, Graph)> {
    let mut out = Vec::new();
    let mut rng = fuzz::rng_for(SEED, 5);
    for _ in 0..40 {
        let n = rng.gen_range(2..=12);
        out.push((format!("tree n={n}"), fuzz::random_tree(&mut rng, n), generate::clique(3)));
    }
    for l in 2..=6 {
        for k in 1..=2 {
            let inst = lower_bound_instance(l, k).unwrap();
            out.push((format!("lower-bound l={l} k={k}"), inst.graph, inst.x));
        }
    }
    let budget = OracleBudget::default();
    while out.len() < 100 {
        let n = rng.gen_range(3..=10);
        let p = rng.gen_range(0.1..0.4);
        let g = fuzz::random_connected_graph(&mut rng, n, p);
        let x = generate::fan(rng.gen_range(4..=5));
        if find_rooted_minor(&g, &x, &Rooting::None, &budget).unwrap().is_none() {
            out.push((format!("random n={n}"), g, x));
        }
    }
    out
}

/// Minimum over all layerings of the largest layer of `K_n`; every path
/// decomposition or elimination forest of a clique has a bag or root-to-leaf
/// path holding all vertices, so this is both lpw and ltd of the clique.
fn clique_layered_width(n: u32) -> usize {
    let mut best = usize::MAX;
    for code in 0..n.pow(n) {
        let layer: Vec<u32> = (0..n).map(|i| code / n.pow(i) % n).collect();
        let (lo, hi) = (*layer.iter().min().unwrap(), *layer.iter().max().unwrap());
        if hi - lo > 1 {
            continue;
        }
        let widest = (lo..=hi).map(|l| layer.iter().filter(|&&x| x == l).count()).max().unwrap();
        best = best.min(widest);
    }
    best
}

#[test]
fn criterion_05_layered_bounds() {
    let start = Instant::now();
    let budget = OracleBudget::default();
    let mut failures = Vec::new();
    let instances = layered_instances();
    for (name, g, x) in &instances {
        if find_rooted_minor(g, x, &Rooting::None, &budget).unwrap().is_some() {
            failures.push(format!("{name}: contains X"));
            continue;
        }
        let pattern = ApexPattern::detect(x.clone()).unwrap();
        let nx = x.n();
        match layered_pw(g, &pattern).map(|c| verify_layered(g, &c)) {
            Ok(Ok(w)) if w <= 2 * nx - 3 => {}
            other => failures.push(format!("{name}: layered pw {other:?}")),
        }
        match layered_td(g, &pattern).map(|c| verify_layered(g, &c)) {
            Ok(Ok(w)) if w <= binom2(nx - 1) => {}
            other => failures.push(format!("{name}: layered td {other:?}")),
        }
    }
    let clique = clique_layered_width(4);
    if clique != 2 {
        failures.push(format!("lpw(K_4) = ltd(K_4) = {clique}, expected 2"));
    }
    let k4 = generate::clique(4);
    let fan5 = ApexPattern::detect(generate::fan(5)).unwrap();
    for (kind, cert) in [("pw", layered_pw(&k4, &fan5)), ("td", layered_td(&k4, &fan5))] {
        match cert.map(|c| verify_layered(&k4, &c)) {
            Ok(Ok(w)) if w >= 2 => {}
            other => failures.push(format!("K_4 layered {kind}: {other:?}")),
        }
    }
    let detail = format!("{} instances, min-layering width of K_4 = {clique}", instances.len());
    finish(5, "layered pw / td of X-minor-free graphs", &failures, &detail, start, Duration::from_secs(120));
}

#[test]
fn criterion_06_diameter_bounds() {
    let start = Instant::now();
    let budget = OracleBudget::default();
    let mut failures = Vec::new();
    let mut checked = 0;
    for (name, g, x) in layered_instances() {
        if g.n() > 10 || !g.is_connected() {
            continue;
        }
        checked += 1;
        let diam = g.diameter().unwrap();
        let nx = x.n();
        let td = exact_width(&g, WidthKind::Td, &budget).unwrap();
        let pw = exact_width(&g, WidthKind::Pw, &budget).unwrap();
        let td_bound = (binom2(nx - 1) * (diam + 1)) as i64;
        let pw_bound = ((2 * nx - 3) * (diam + 1)) as i64 - 1;
        if td > td_bound || pw > pw_bound {
            failures.push(format!("{name}: td {td} (bound {td_bound}), pw {pw} (bound {pw_bound})"));
        }
    }
    finish(6, "td / pw against the diameter", &failures, &format!("{checked} instances with at most 10 vertices"), start, Duration::from_secs(120));
}

#[test]
fn criterion_07_radius_lower_bound() {
    let start = Instant::now();
    let budget = OracleBudget::default();
    let mut failures = Vec::new();
    let big = check_lower_bound(4, 0, Some(3), &budget).unwrap();
    if !big.holds() || big.pw_lower_bound < 3 {
        failures.push(format!("ℓ=4, k=3: {big:?}"));
    }
    let small = check_lower_bound(4, 0, Some(2), &budget).unwrap();
    if !small.holds() || small.pw_oracle.is_none_or(|pw| pw < 2) {
        failures.push(format!("ℓ=4, k=2: {small:?}"));
    }
    let detail = format!(
        "n={}, radius {} in [{}, {}], pw ≥ {} by the ternary subtree, fan(5)-minor-free: {}; k=2 oracle pw = {:?}",
        big.n,
        big.radius,
        big.r,
        big.k / 2 + 2,
        big.pw_lower_bound,
        big.x_minor_free,
        small.pw_oracle
    );
    finish(7, "radius lower-bound construction", &failures, &detail, start, Duration::from_secs(300));
}

#[test]
fn criterion_08_erdos_posa() {
    let start = Instant::now();
    let budget = OracleBudget::default();
    let mut failures = Vec::new();
    let (mut passed, mut helly) = (0, 0);
    for index in 0..200 {
        let inst = fuzz::instance(Profile::Ep, SEED, index);
        match fuzz::check(Profile::Ep, &inst, &budget) {
            fuzz::Verdict::Pass => passed += 1,
            fuzz::Verdict::Skip(e) => failures.push(format!("instance {index} refused: {e}")),
            fuzz::Verdict::Fail(e) => failures.push(format!("instance {index}: {e}")),
        }
        let (g, s, k) = (&inst.graph, &inst.roots, inst.param);
        let t = inst.pattern.as_ref().unwrap();
        let fam = minimal_supports(g, s, t, &budget).unwrap().0;
        if fam.is_empty() {
            continue;
        }
        let SpwOutcome::Decomposition(cert) = decide_spw(g, s, &copies(t, k).0).unwrap() else {
            continue;
        };
        helly += 1;
        let width = verify_focused(g, s, &cert).unwrap();
        match pack_or_cover(g, s, &cert, &fam, k).unwrap() {
            PackOrCover::Packing { members } => {
                let disjoint = members.iter().enumerate().all(|(i, &a)| members[i + 1..].iter().all(|&b| fam[a].is_disjoint(&fam[b])));
                if members.len() != k || !disjoint {
                    failures.push(format!("instance {index}: bad packing {members:?}"));
                }
            }
            PackOrCover::Cover { nodes, z } => {
                let bound = (k - 1) * (width as usize + 1);
                if nodes.len() >= k || z.len() > bound || fam.iter().any(|f| f.is_disjoint(&z)) {
                    failures.push(format!("instance {index}: bad cover of size {} (bound {bound})", z.len()));
                }
            }
        }
    }
    let detail = format!("{passed}/200 tree dichotomies agree with brute force, {helly} subtree pack-or-cover checks");
    finish(8, "Erdős–Pósa dichotomies", &failures, &detail, start, Duration::from_secs(300));
}

#[test]
fn criterion_09_cut_open() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (name, h) in [("P_3", PlanePattern::path(3)), ("C_4", PlanePattern::cycle(4)), ("K_4", PlanePattern::k4())] {
        let (hp, u) = apexify(&h).unwrap();
        let t = spanning_tree_with_leaf(&hp.graph(), u).unwrap();
        let c = match cut_open(&hp, u, &t) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("{name}: {e}"));
                continue;
            }
        };
        if c.graph.n() != 2 * h.graph().n() {
            failures.push(format!("{name}: |V(H'')| = {}", c.graph.n()));
        }
        if let Err(e) = check_hamiltonian(&c.graph, &c.cycle) {
            failures.push(format!("{name}: {e}"));
        }
        if let Err(e) = c.rotation.check_plane() {
            failures.push(format!("{name}: {e}"));
        }
        if c.rotation.graph() != c.graph {
            failures.push(format!("{name}: rotation system does not match H''"));
        }
        if let Err(e) = verify_model(&c.graph, &hp.graph(), &c.model_back, &Rooting::None) {
            failures.push(format!("{name}: model_back {e}"));
        }
    }
    finish(9, "cutting plane graphs open", &failures, "P_3, C_4, K_4", start, Duration::from_secs(1));
}

#[test]
fn criterion_10_tree_decomposition_from_no_tangle() {
    let start = Instant::now();
    let budget = OracleBudget::default();
    let mut failures = Vec::new();
    let mut rng = fuzz::rng_for(SEED, 10);
    let mut done = 0;
    while done < 50 {
        let k = 2 + done % 2;
        let n = rng.gen_range(1..=8);
        let p = rng.gen_range(0.1..0.6);
        let g = fuzz::random_graph(&mut rng, n, p);
        let s = fuzz::random_subset(&mut rng, &g, 8);
        let r = fuzz::random_subset(&mut rng, &g, 7 * k - 8);
        if tangle_number(&g, &s, &budget).unwrap().0 >= k {
            continue;
        }
        done += 1;
        match build_tree_decomposition(&g, &s, k, &r, &budget) {
            Ok(TreeBuild::Decomposition(cert)) => {
                let width = verify_focused(&g, &s, &cert);
                let FocusedInner::Tree(td) = &cert.inner else {
                    failures.push("not a tree decomposition".into());
                    continue;
                };
                let holds_r = td.bags.values().any(|b| r.is_subset(b));
                if !matches!(width, Ok(w) if w <= 10 * k as i64 - 12) || !holds_r {
                    failures.push(format!("{g:?}, S = {s:?}, R = {r:?}: width {width:?}, R in a bag: {holds_r}"));
                }
            }
            Ok(TreeBuild::Tangle(_)) => failures.push(format!("{g:?}, S = {s:?}: tangle of order {k} despite tn < {k}")),
            Err(e) => failures.push(format!("{g:?}, S = {s:?}: {e}")),
        }
    }
    finish(10, "tree decomposition without a tangle", &failures, "50 instances, k ∈ {2, 3}", start, Duration::from_secs(300));
}
