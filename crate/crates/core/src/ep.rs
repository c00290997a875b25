//! Packing/covering dichotomies: disjoint members of a family of connected
//! subgraphs meeting `S`, or a few bags of a decomposition hitting them all.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::budget::{BudgetExceeded, Clock, OracleBudget};
use crate::decomp::{verify_focused, FocusedCertificate, FocusedInner, TreeDecomposition, VerifyError};
use crate::graph::{Graph, Vertex, VertexSet};
use crate::minors::{find_rooted_minor, verify_model, MinorModel, Rooting};
use crate::spw::{decide_spw, SpwError, SpwOutcome};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EpError {
    #[error("k must be positive")]
    ZeroK,
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("the certificate is not a tree or path decomposition")]
    NotTreeLike,
    #[error("family member {index} is invalid: {reason}")]
    BadMember { index: usize, reason: String },
    #[error("pattern is not a tree")]
    NotTree,
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error(transparent)]
    Spw(#[from] SpwError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum PackOrCover {
    /// Indices of `k` pairwise vertex-disjoint family members.
    Packing { members: Vec<usize> },
    /// At most `k − 1` decomposition nodes whose bags together meet every member.
    Cover { nodes: Vec<u32>, z: VertexSet },
}

fn tree_of(cert: &FocusedCertificate) -> Result<TreeDecomposition, EpError> {
    match &cert.inner {
        FocusedInner::Tree(t) => Ok(t.clone()),
        FocusedInner::Path(p) if p.bags.is_empty() => Ok(TreeDecomposition::single_bag(VertexSet::new())),
        FocusedInner::Path(p) => Ok(p.as_tree()),
        FocusedInner::Elimination(_) => Err(EpError::NotTreeLike),
    }
}

/// `k` disjoint members of `fam`, or at most `k − 1` bags of `cert` whose union
/// meets every member.
pub fn pack_or_cover(g: &Graph, s: &VertexSet, cert: &FocusedCertificate, fam: &[VertexSet], k: usize) -> Result<PackOrCover, EpError> {
    if k == 0 {
        return Err(EpError::ZeroK);
    }
    verify_focused(g, s, cert)?;
    for (index, f) in fam.iter().enumerate() {
        let reason = if f.is_empty() || !f.iter().all(|v| g.contains(*v)) {
            Some("not a nonempty vertex set of the graph")
        } else if !g.is_connected_set(f) {
            Some("not connected")
        } else if f.is_disjoint(s) {
            Some("misses S")
        } else {
            None
        };
        if let Some(reason) = reason {
            return Err(EpError::BadMember { index, reason: reason.into() });
        }
    }
    let td = tree_of(cert)?;
    // topmost node of each member's subtree
    let tops: Vec<(usize, u32)> = fam
        .iter()
        .map(|f| {
            td.bags
                .iter()
                .filter(|(_, b)| !b.is_disjoint(f))
                .map(|(&x, _)| (td.tree.depth(x), x))
                .min()
                .ok_or_else(|| EpError::Internal("member meets no bag".into()))
        })
        .collect::<Result<_, _>>()?;
    let mut order: Vec<usize> = (0..fam.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(tops[i].0), i));
    let mut alive = vec![true; fam.len()];
    let mut picked = Vec::new();
    let mut nodes = Vec::new();
    for i in order {
        if !alive[i] {
            continue;
        }
        let x = tops[i].1;
        picked.push(i);
        nodes.push(x);
        for (j, f) in fam.iter().enumerate() {
            if alive[j] && !td.bags[&x].is_disjoint(f) {
                alive[j] = false;
            }
        }
        if picked.len() == k {
            return Ok(PackOrCover::Packing { members: picked });
        }
    }
    let z = nodes.iter().flat_map(|x| td.bags[x].iter().copied()).collect();
    Ok(PackOrCover::Cover { nodes, z })
}

/// `k` disjoint `S`-rooted models of a tree, or a small vertex set whose
/// removal leaves none.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum TreeEp {
    Packing { models: Vec<MinorModel> },
    Cover { z: VertexSet },
}

/// Disjoint union of `k` copies of `t`; copy `i` adds `i·(max id + 1)`.
pub fn copies(t: &Graph, k: usize) -> (Graph, Vertex) {
    let stride = t.max_id().map_or(1, |m| m + 1);
    let mut out = Graph::new();
    for i in 0..k as Vertex {
        out = out.disjoint_union_shifted(t, i * stride);
    }
    (out, stride)
}

/// Either `k` vertex-disjoint `S`-rooted models of the tree `t` or a set `Z`
/// with `|Z| ≤ (2k|V(t)| − 1)(k − 1)` meeting every such model.
pub fn rooted_tree_ep(g: &Graph, s: &VertexSet, t: &Graph, k: usize, budget: &OracleBudget) -> Result<TreeEp, EpError> {
    if k == 0 {
        return Err(EpError::ZeroK);
    }
    if t.is_empty() || !t.is_connected() || !t.is_forest() {
        return Err(EpError::NotTree);
    }
    let (kt, stride) = copies(t, k);
    let outcome = match decide_spw(g, s, &kt)? {
        SpwOutcome::Model(m) => {
            let models = (0..k as Vertex)
                .map(|i| MinorModel {
                    branch_sets: t.vertices().map(|v| (v, m.branch_sets[&(v + i * stride)].clone())).collect(),
                })
                .collect();
            TreeEp::Packing { models }
        }
        SpwOutcome::Decomposition(cert) => {
            let (supports, models) = minimal_supports(g, s, t, budget)?;
            let packing = max_disjoint(&supports, k, &mut budget.clock())?;
            if packing.len() >= k {
                TreeEp::Packing { models: packing.iter().map(|&i| models[i].clone()).collect() }
            } else {
                match pack_or_cover(g, s, &cert, &supports, k)? {
                    PackOrCover::Cover { z, .. } => TreeEp::Cover { z },
                    PackOrCover::Packing { .. } => return Err(EpError::Internal("greedy packing beat the exact search".into())),
                }
            }
        }
    };
    check_tree_ep(g, s, t, k, &outcome, budget)?;
    Ok(outcome)
}

fn check_tree_ep(g: &Graph, s: &VertexSet, t: &Graph, k: usize, outcome: &TreeEp, budget: &OracleBudget) -> Result<(), EpError> {
    match outcome {
        TreeEp::Packing { models } => {
            let mut used = VertexSet::new();
            for m in models {
                verify_model(g, t, m, &Rooting::Rooted(s.clone())).map_err(|e| EpError::Internal(format!("packed model: {e}")))?;
                let support = m.support();
                if !used.is_disjoint(&support) {
                    return Err(EpError::Internal("packed models overlap".into()));
                }
                used.extend(support);
            }
            if models.len() != k {
                return Err(EpError::Internal("wrong packing size".into()));
            }
        }
        TreeEp::Cover { z } => {
            if z.len() > (2 * k * t.n() - 1) * (k - 1) {
                return Err(EpError::Internal(format!("cover of size {} exceeds the bound", z.len())));
            }
            let rest = g.remove_vertices(z);
            let roots: VertexSet = s.difference(z).copied().collect();
            if find_rooted_minor(&rest, t, &Rooting::Rooted(roots), budget)?.is_some() {
                return Err(EpError::Internal("cover misses a rooted model".into()));
            }
        }
    }
    Ok(())
}

/// Every inclusion-minimal vertex set carrying an `S`-rooted model of `t`,
/// with one model each. Found by re-running the minor search with forbidden
/// vertices: any other minimal support avoids some vertex of a known one.
pub fn minimal_supports(g: &Graph, s: &VertexSet, t: &Graph, budget: &OracleBudget) -> Result<(Vec<VertexSet>, Vec<MinorModel>), EpError> {
    let mut supports: Vec<VertexSet> = Vec::new();
    let mut models = Vec::new();
    let mut visited: BTreeSet<VertexSet> = BTreeSet::new();
    let mut stack = vec![VertexSet::new()];
    let mut clock = budget.clock();
    while let Some(forbidden) = stack.pop() {
        clock.tick()?;
        if !visited.insert(forbidden.clone()) {
            continue;
        }
        // a known support avoiding `forbidden` already answers this branch
        let known = supports.iter().position(|f| f.is_disjoint(&forbidden));
        let support = match known {
            Some(i) => supports[i].clone(),
            None => {
                let allowed = g.remove_vertices(&forbidden);
                let roots: VertexSet = s.difference(&forbidden).copied().collect();
                let Some(m) = find_rooted_minor(&allowed, t, &Rooting::Rooted(roots), budget)? else {
                    continue;
                };
                let m = minimize(g, s, t, m, budget)?;
                let support = m.support();
                supports.push(support.clone());
                models.push(m);
                support
            }
        };
        for &v in support.iter().rev() {
            let mut next = forbidden.clone();
            next.insert(v);
            stack.push(next);
        }
    }
    let mut paired: Vec<(VertexSet, MinorModel)> = supports.into_iter().zip(models).collect();
    paired.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(paired.into_iter().unzip())
}

fn minimize(g: &Graph, s: &VertexSet, t: &Graph, mut m: MinorModel, budget: &OracleBudget) -> Result<MinorModel, EpError> {
    'outer: loop {
        let support = m.support();
        for &v in &support {
            let mut smaller = support.clone();
            smaller.remove(&v);
            let roots: VertexSet = s.intersection(&smaller).copied().collect();
            if let Some(found) = find_rooted_minor(&g.induced(&smaller), t, &Rooting::Rooted(roots), budget)? {
                m = found;
                continue 'outer;
            }
        }
        return Ok(m);
    }
}

/// Up to `limit` pairwise disjoint members, as many as possible.
pub fn max_disjoint(fam: &[VertexSet], limit: usize, clock: &mut Clock) -> Result<Vec<usize>, BudgetExceeded> {
    fn go(fam: &[VertexSet], start: usize, used: &VertexSet, cur: &mut Vec<usize>, best: &mut Vec<usize>, limit: usize, clock: &mut Clock) -> Result<(), BudgetExceeded> {
        clock.tick()?;
        if cur.len() > best.len() {
            *best = cur.clone();
        }
        if best.len() >= limit || cur.len() + (fam.len() - start) <= best.len() {
            return Ok(());
        }
        for i in start..fam.len() {
            if fam[i].is_disjoint(used) {
                let next: VertexSet = used.union(&fam[i]).copied().collect();
                cur.push(i);
                go(fam, i + 1, &next, cur, best, limit, clock)?;
                cur.pop();
                if best.len() >= limit {
                    break;
                }
            }
        }
        Ok(())
    }
    let mut best = Vec::new();
    go(fam, 0, &VertexSet::new(), &mut Vec::new(), &mut best, limit, clock)?;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::PathDecomposition;
    use crate::graph::generate::*;

    fn set(v: &[Vertex]) -> VertexSet {
        v.iter().copied().collect()
    }

    fn b() -> OracleBudget {
        OracleBudget::default()
    }

    fn path_cert(g: &Graph, n: u32) -> FocusedCertificate {
        let bags = (0..n - 1).map(|i| set(&[i, i + 1])).collect();
        FocusedCertificate::with_attachments(g, g.vertex_set(), FocusedInner::Path(PathDecomposition::new(bags))).unwrap()
    }

    #[test]
    fn empty_family_is_covered_by_nothing() {
        let g = path(4);
        let c = path_cert(&g, 4);
        assert_eq!(pack_or_cover(&g, &g.vertex_set(), &c, &[], 3).unwrap(), PackOrCover::Cover { nodes: vec![], z: VertexSet::new() });
    }

    #[test]
    fn disjoint_members_pack() {
        let g = path(2).disjoint_union_shifted(&path(2), 10).disjoint_union_shifted(&path(2), 20);
        let bags = vec![set(&[0, 1]), set(&[10, 11]), set(&[20, 21])];
        let c = FocusedCertificate::with_attachments(&g, g.vertex_set(), FocusedInner::Path(PathDecomposition::new(bags))).unwrap();
        let fam = vec![set(&[0, 1]), set(&[10, 11]), set(&[20, 21])];
        assert!(matches!(pack_or_cover(&g, &g.vertex_set(), &c, &fam, 3).unwrap(), PackOrCover::Packing { .. }));
    }

    #[test]
    fn subpaths_of_p7() {
        let g = path(7);
        let c = path_cert(&g, 7);
        let fam: Vec<VertexSet> = (0..7u32).flat_map(|i| (i + 1..7).map(move |j| (i..=j).collect())).collect();
        assert_eq!(fam.len(), 21);
        match pack_or_cover(&g, &g.vertex_set(), &c, &fam, 2).unwrap() {
            PackOrCover::Packing { members } => assert!(fam[members[0]].is_disjoint(&fam[members[1]])),
            PackOrCover::Cover { .. } => panic!("two disjoint subpaths exist"),
        }
    }

    #[test]
    fn bad_members_are_rejected() {
        let g = path(4);
        let c = path_cert(&g, 4);
        assert!(matches!(pack_or_cover(&g, &set(&[0]), &c, &[set(&[0, 2])], 1), Err(EpError::Verify(_) | EpError::BadMember { .. })));
        assert!(matches!(pack_or_cover(&g, &g.vertex_set(), &c, &[set(&[0, 2])], 1), Err(EpError::BadMember { .. })));
    }

    #[test]
    fn k_one_is_existence() {
        let g = path(3);
        assert!(matches!(rooted_tree_ep(&g, &set(&[0, 2]), &path(2), 1, &b()).unwrap(), TreeEp::Packing { .. }));
        assert_eq!(rooted_tree_ep(&g, &set(&[0]), &path(2), 1, &b()).unwrap(), TreeEp::Cover { z: VertexSet::new() });
        let g = Graph::with_vertices([0, 1]);
        assert_eq!(rooted_tree_ep(&g, &set(&[0]), &path(2), 1, &b()).unwrap(), TreeEp::Cover { z: VertexSet::new() });
    }

    #[test]
    fn star_edges_share_the_center() {
        let g = star(5);
        match rooted_tree_ep(&g, &g.vertex_set(), &path(2), 2, &b()).unwrap() {
            TreeEp::Cover { z } => assert!(z.contains(&0) && z.len() <= 7),
            TreeEp::Packing { .. } => panic!("all edges meet the center"),
        }
    }

    #[test]
    fn two_stars_pack() {
        let g = star(3).disjoint_union_shifted(&star(3), 10);
        let s = set(&[1, 2, 3, 11, 12, 13]);
        match rooted_tree_ep(&g, &s, &star(2), 2, &b()).unwrap() {
            TreeEp::Packing { models } => assert_eq!(models.len(), 2),
            TreeEp::Cover { .. } => panic!("two disjoint cherries exist"),
        }
    }

    #[test]
    fn minimal_supports_of_an_edge() {
        let (sup, _) = minimal_supports(&cycle(4), &set(&[0, 2]), &path(2), &b()).unwrap();
        assert_eq!(sup, vec![set(&[0, 1, 2]), set(&[0, 2, 3])]);
    }
}
