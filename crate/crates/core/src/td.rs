//! Win/win decision for `td(G, S)`: an elimination forest of `(G, S)` of
//! vertex-height at most `ℓ(ℓ−1)/2`, or an `S`-rooted model of `P_ℓ`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::decomp::{verify_focused, FocusedCertificate, FocusedInner};
use crate::graph::{dfs_tree, generate, Graph, GraphError, Linkage, RootedForest, Vertex, VertexSet};
use crate::menger::menger;
use crate::minors::{verify_model, MinorModel, Rooting};
use crate::spw::SpwOutcome;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TdError {
    #[error("path length must be positive")]
    ZeroLength,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("the tree is not a spanning DFS tree of the graph")]
    NotDfsTree,
    #[error("root vertex {0} is not a graph vertex")]
    RootOutsideGraph(Vertex),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Either a certificate or a root-to-leaf path of the DFS tree together with
/// `ℓ` disjoint `V(P)`–`S` paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TdPairOutcome {
    Certificate(FocusedCertificate),
    Linkage { path: Vec<Vertex>, linkage: Linkage },
}

pub fn binom2(l: usize) -> usize {
    l * l.saturating_sub(1) / 2
}

/// Inductive construction on a connected graph with DFS tree `t`.
pub fn td_pair_recursive(g: &Graph, s: &VertexSet, t: &RootedForest, l: usize) -> Result<TdPairOutcome, TdError> {
    if l == 0 {
        return Err(TdError::ZeroLength);
    }
    if !g.is_connected() {
        return Err(GraphError::Disconnected.into());
    }
    if let Some(&v) = s.iter().find(|v| !g.contains(**v)) {
        return Err(TdError::RootOutsideGraph(v));
    }
    if !t.is_elimination_forest_of(g) || t.roots().len() > 1 || !g.edges().iter().all(|&(u, v)| t.in_closure(u, v)) {
        return Err(TdError::NotDfsTree);
    }
    if g.n() > 0 && !t.as_graph().edges().iter().all(|&(u, v)| g.has_edge(u, v)) {
        return Err(TdError::NotDfsTree);
    }
    recurse(g, s, t, l)
}

fn recurse(g: &Graph, s: &VertexSet, t: &RootedForest, l: usize) -> Result<TdPairOutcome, TdError> {
    if s.is_empty() {
        return Ok(TdPairOutcome::Certificate(FocusedCertificate::null(g, FocusedInner::Elimination(RootedForest::new()))));
    }
    let children = t.children_map();
    let root = t.roots()[0];
    // deepest vertex whose subtree contains S
    let mut s0 = root;
    loop {
        let next = children[&s0].iter().copied().find(|&c| {
            let sub = t.subtree(c);
            s.is_subset(&sub)
        });
        match next {
            Some(c) => s0 = c,
            None => break,
        }
    }
    let r: VertexSet = t.path_from_root(s0).into_iter().collect();
    let (link, sep) = menger(g, &r, s);
    if link.len() >= l {
        let mut leaf = s0;
        while let Some(&c) = children[&leaf].first() {
            leaf = c;
        }
        let path = t.path_from_root(leaf);
        let pv: VertexSet = path.iter().copied().collect();
        let (mut full, _) = menger(g, &pv, s);
        full.paths.truncate(l);
        return Ok(TdPairOutcome::Linkage { path, linkage: full });
    }
    let x = sep.boundary();
    let rest = g.remove_vertices(&x);
    let mut sub_results: BTreeMap<Vertex, FocusedCertificate> = BTreeMap::new();
    let mut pieces: Vec<(VertexSet, Vertex)> = Vec::new();
    for comp in rest.components() {
        if comp.is_disjoint(s) {
            continue;
        }
        let v = children[&s0]
            .iter()
            .copied()
            .find(|&c| comp.is_subset(&t.subtree(c)))
            .ok_or_else(|| TdError::Internal("S-component escapes the child subtrees".into()))?;
        pieces.push((comp, v));
        if sub_results.contains_key(&v) {
            continue;
        }
        let tv_set = t.subtree(v);
        let gv = g.induced(&tv_set);
        let tv = t.restrict(&tv_set);
        let sv: VertexSet = s.intersection(&tv_set).copied().collect();
        match recurse(&gv, &sv, &tv, l - 1)? {
            TdPairOutcome::Certificate(c) => {
                sub_results.insert(v, c);
            }
            TdPairOutcome::Linkage { path: sub_path, linkage } => {
                let leaf = *sub_path.last().expect("path");
                let path = t.path_from_root(leaf);
                let w = *s.difference(&tv_set).next().ok_or_else(|| TdError::Internal("S inside one child subtree".into()))?;
                let tree_path = tree_path(t, s0, w);
                let cut = tree_path.iter().position(|v| s.contains(v)).expect("path ends in S");
                let mut paths = linkage.paths;
                paths.push(tree_path[..=cut].to_vec());
                paths.sort();
                let linkage = Linkage { paths, x: path.iter().copied().collect(), y: s.clone() };
                return Ok(TdPairOutcome::Linkage { path, linkage });
            }
        }
    }
    // stack X above the restricted sub-forests
    let mut forest = RootedForest::new();
    let mut prev = None;
    for &xv in &x {
        forest.add_node(xv, prev);
        prev = Some(xv);
    }
    let mut host = x.clone();
    for (comp, v) in &pieces {
        let cert = &sub_results[v];
        let FocusedInner::Elimination(fv) = &cert.inner else {
            return Err(TdError::Internal("sub-certificate is not an elimination forest".into()));
        };
        let keep: VertexSet = cert.host.intersection(comp).copied().collect();
        let restricted = fv.restrict(&keep);
        for (&node, &parent) in restricted.parents() {
            forest.set_parent(node, parent.or(prev));
        }
        host.extend(keep);
    }
    let cert = FocusedCertificate::with_attachments(g, host, FocusedInner::Elimination(forest))
        .map_err(|e| TdError::Internal(format!("stacked forest: {e}")))?;
    Ok(TdPairOutcome::Certificate(cert))
}

/// Vertex sequence of the tree path from `a` to `b`.
fn tree_path(t: &RootedForest, a: Vertex, b: Vertex) -> Vec<Vertex> {
    let pa = t.path_from_root(a);
    let pb = t.path_from_root(b);
    let common = pa.iter().zip(&pb).take_while(|(x, y)| x == y).count();
    let mut out: Vec<Vertex> = pa[common - 1..].iter().rev().copied().collect();
    out.extend(pb[common..].iter().copied());
    out
}

/// Turns a path `P` and `ℓ` disjoint `V(P)`–`S` paths into an `S`-rooted
/// model of `P_ℓ`: `P` is cut into segments, one per attachment point, and
/// each segment is joined with its pendant path.
pub fn linkage_to_path_model(path: &[Vertex], linkage: &Linkage, l: usize) -> MinorModel {
    let mut attach: Vec<(usize, &Vec<Vertex>)> = linkage
        .paths
        .iter()
        .take(l)
        .map(|p| (path.iter().position(|v| *v == p[0]).expect("path starts on P"), p))
        .collect();
    attach.sort();
    let mut branch_sets = BTreeMap::new();
    for (i, &(pos, p)) in attach.iter().enumerate() {
        let start = if i == 0 { 0 } else { pos };
        let end = attach.get(i + 1).map_or(path.len(), |&(next, _)| next);
        let mut b: VertexSet = path[start..end].iter().copied().collect();
        b.extend(p.iter().copied());
        branch_sets.insert(i as Vertex, b);
    }
    MinorModel { branch_sets }
}

/// Either an elimination forest certificate of `(g, s)` with vertex-height at
/// most `ℓ(ℓ−1)/2` or an `s`-rooted model of `P_ℓ`. Verified before return.
pub fn decide_std(g: &Graph, s: &VertexSet, l: usize) -> Result<SpwOutcome, TdError> {
    if l == 0 {
        return Err(TdError::ZeroLength);
    }
    if let Some(&v) = s.iter().find(|v| !g.contains(**v)) {
        return Err(TdError::RootOutsideGraph(v));
    }
    let mut forest = RootedForest::new();
    let mut host = VertexSet::new();
    for comp in g.components() {
        let sc: VertexSet = s.intersection(&comp).copied().collect();
        if sc.is_empty() {
            continue;
        }
        let gc = g.induced(&comp);
        let root = *comp.iter().next().expect("component");
        let t = dfs_tree(&gc, root)?;
        match recurse(&gc, &sc, &t, l)? {
            TdPairOutcome::Certificate(c) => {
                let FocusedInner::Elimination(f) = c.inner else {
                    return Err(TdError::Internal("expected an elimination forest".into()));
                };
                forest = forest.union(&f);
                host.extend(c.host);
            }
            TdPairOutcome::Linkage { path, linkage } => {
                let model = linkage_to_path_model(&path, &linkage, l);
                verify_model(g, &generate::path(l as u32), &model, &Rooting::Rooted(s.clone()))
                    .map_err(|e| TdError::Internal(format!("path model: {e}")))?;
                return Ok(SpwOutcome::Model(model));
            }
        }
    }
    let cert = FocusedCertificate::with_attachments(g, host, FocusedInner::Elimination(forest))
        .map_err(|e| TdError::Internal(format!("combined forest: {e}")))?;
    let height = verify_focused(g, s, &cert).map_err(|e| TdError::Internal(format!("certificate: {e}")))?;
    if height as usize > binom2(l) {
        return Err(TdError::Internal(format!("height {height} exceeds the bound")));
    }
    Ok(SpwOutcome::Decomposition(cert))
}
