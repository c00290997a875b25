//! Layered path decompositions of apex-forest-minor-free graphs and layered
//! elimination forests of fan-minor-free graphs.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::decomp::{verify_layered, FocusedCertificate, FocusedInner, LayeredCertificate, LayeredStructure, Layering, PathDecomposition, VerifyError};
use crate::graph::{Graph, GraphError, RootedForest, Vertex, VertexSet};
use crate::minors::{verify_model, MinorModel, Rooting};
use crate::spw::{decide_spw, SpwError, SpwOutcome};
use crate::td::{binom2, decide_std, TdError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LayeredError {
    #[error("invalid apex pattern: {0}")]
    InvalidPattern(String),
    #[error("the input contains the excluded minor")]
    Model(MinorModel),
    #[error(transparent)]
    Spw(#[from] SpwError),
    #[error(transparent)]
    Td(#[from] TdError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("assembled certificate is invalid: {0}")]
    Verify(#[from] VerifyError),
}

/// A graph `X` with a vertex `apex` such that `X − apex` is a forest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApexPattern {
    pub graph: Graph,
    pub apex: Vertex,
}

impl ApexPattern {
    pub fn new(graph: Graph, apex: Vertex) -> Result<Self, LayeredError> {
        if !graph.contains(apex) {
            return Err(LayeredError::InvalidPattern(format!("apex {apex} is not a vertex")));
        }
        if graph.n() < 2 {
            return Err(LayeredError::InvalidPattern("fewer than two vertices".into()));
        }
        if !graph.remove_vertex(apex).is_forest() {
            return Err(LayeredError::InvalidPattern(format!("removing {apex} leaves a cycle")));
        }
        Ok(ApexPattern { graph, apex })
    }

    /// Uses the smallest vertex whose removal leaves a forest.
    pub fn detect(graph: Graph) -> Result<Self, LayeredError> {
        let apex = graph
            .vertices()
            .find(|&v| graph.remove_vertex(v).is_forest())
            .ok_or_else(|| LayeredError::InvalidPattern("not an apex-forest".into()))?;
        ApexPattern::new(graph, apex)
    }

    /// `X − apex`.
    pub fn forest(&self) -> Graph {
        self.graph.remove_vertex(self.apex)
    }

    /// Vertices of `X − apex` in path order, when it is a path.
    pub fn path_order(&self) -> Option<Vec<Vertex>> {
        let f = self.forest();
        if !f.is_connected() || f.vertices().any(|v| f.degree(v) > 2) {
            return None;
        }
        let start = f.vertices().find(|&v| f.degree(v) <= 1)?;
        let mut order = vec![start];
        let mut prev = None;
        let mut cur = start;
        while let Some(&next) = f.neighbors(cur).iter().find(|&&w| Some(w) != prev) {
            order.push(next);
            prev = Some(cur);
            cur = next;
        }
        Some(order)
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }
}

#[derive(Clone, Copy)]
enum Mode<'a> {
    Pw { x: &'a ApexPattern, forest: &'a Graph },
    Td { x: &'a ApexPattern, order: &'a [Vertex] },
}

enum Inner {
    Path(PathDecomposition),
    Forest(RootedForest),
}

/// Layered path decomposition with width at most `2|V(X)| − 3`.
pub fn layered_pw(g: &Graph, x: &ApexPattern) -> Result<LayeredCertificate, LayeredError> {
    let forest = x.forest();
    let cert = assemble(g, Mode::Pw { x, forest: &forest })?;
    verify_layered(g, &cert)?;
    Ok(cert)
}

/// Layered elimination forest with width at most `C(|V(X)| − 1, 2)` for a fan `X`.
pub fn layered_td(g: &Graph, x: &ApexPattern) -> Result<LayeredCertificate, LayeredError> {
    if x.n() < 3 {
        return Err(LayeredError::InvalidPattern("a fan needs at least three vertices".into()));
    }
    let order = x.path_order().ok_or_else(|| LayeredError::InvalidPattern("removing the apex does not leave a path".into()))?;
    let cert = assemble(g, Mode::Td { x, order: &order })?;
    verify_layered(g, &cert)?;
    Ok(cert)
}

fn assemble(g: &Graph, mode: Mode) -> Result<LayeredCertificate, LayeredError> {
    let mut layers: Vec<VertexSet> = Vec::new();
    let mut bags = Vec::new();
    let mut forest = RootedForest::new();
    for comp in g.components() {
        let u = *comp.iter().next().expect("component");
        let gc = g.induced(&comp);
        let (ls, inner) = technical(&gc, u, mode)?;
        merge_layers(&mut layers, ls, 0);
        match inner {
            Inner::Path(p) if p.bags.is_empty() => bags.push(VertexSet::from([u])),
            Inner::Path(p) => bags.extend(p.bags.into_iter().map(|mut b| {
                b.insert(u);
                b
            })),
            Inner::Forest(f) => {
                let mut f = f;
                for r in f.roots() {
                    f.set_parent(r, Some(u));
                }
                f.add_node(u, None);
                forest = forest.union(&f);
            }
        }
    }
    let structure = match mode {
        Mode::Pw { .. } => LayeredStructure::Path(PathDecomposition::new(bags)),
        Mode::Td { .. } => LayeredStructure::Elimination(forest),
    };
    Ok(LayeredCertificate { layering: Layering { layers }, structure })
}

/// Unions `src[i]` into `dst[i + shift]`.
fn merge_layers(dst: &mut Vec<VertexSet>, src: Vec<VertexSet>, shift: usize) {
    for (i, l) in src.into_iter().enumerate() {
        if dst.len() <= i + shift {
            dst.resize(i + shift + 1, VertexSet::new());
        }
        dst[i + shift].extend(l);
    }
}

/// Layering of connected `g` with `L_0 = {u}` and a structure for `g − u`.
fn technical(g: &Graph, u: Vertex, mode: Mode) -> Result<(Vec<VertexSet>, Inner), LayeredError> {
    if g.n() == 1 {
        let inner = match mode {
            Mode::Pw { .. } => Inner::Path(PathDecomposition::default()),
            Mode::Td { .. } => Inner::Forest(RootedForest::new()),
        };
        return Ok((vec![VertexSet::from([u])], inner));
    }
    let s = g.neighbors(u).clone();
    let gp = g.remove_vertex(u);
    let cert = match focused(&gp, &s, mode)? {
        Ok(c) => c,
        Err(model) => return Err(LayeredError::Model(lift_apex(g, u, model, mode)?)),
    };
    let cert = minimize_host(g, &gp, u, cert)?;

    let outside = gp.remove_vertices(&cert.host).components();
    let mut layers = vec![VertexSet::from([u]), cert.host.clone()];
    let mut pieces: Vec<(u32, Inner)> = Vec::new();
    for c in &outside {
        let rest: VertexSet = g.vertex_set().difference(c).copied().collect();
        let (gc, uc) = g.contract(&rest);
        assert!(gc.n() < g.n(), "contraction must shrink the graph");
        let (lc, inner) = match technical(&gc, uc, mode) {
            Ok(r) => r,
            Err(LayeredError::Model(m)) => return Err(LayeredError::Model(lift_contraction(g, m, uc, &rest, mode)?)),
            Err(e) => return Err(e),
        };
        merge_layers(&mut layers, lc.into_iter().skip(1).collect(), 2);
        let key = *c.iter().next().expect("component");
        let anchor = cert.attachment[&key].expect("outside components of a connected graph have neighbors");
        pieces.push((anchor, inner));
    }

    let inner = match &cert.inner {
        FocusedInner::Path(p) => {
            let mut bags = Vec::new();
            for (k, vk) in p.bags.iter().enumerate() {
                bags.push(vk.clone());
                for (_, inner) in pieces.iter().filter(|(a, _)| *a as usize == k) {
                    let Inner::Path(pc) = inner else { unreachable!() };
                    bags.extend(pc.bags.iter().map(|b| b | vk));
                }
            }
            Inner::Path(PathDecomposition::new(bags))
        }
        FocusedInner::Elimination(f) => {
            let mut out = f.clone();
            for (anchor, inner) in &pieces {
                let Inner::Forest(fc) = inner else { unreachable!() };
                let mut fc = fc.clone();
                for r in fc.roots() {
                    fc.set_parent(r, Some(*anchor));
                }
                out = out.union(&fc);
            }
            Inner::Forest(out)
        }
        FocusedInner::Tree(_) => unreachable!("no tree certificates here"),
    };
    Ok((layers, inner))
}

/// Runs the focused decision on `(g', S)`; a model comes back as `Err`.
fn focused(gp: &Graph, s: &VertexSet, mode: Mode) -> Result<Result<FocusedCertificate, MinorModel>, LayeredError> {
    let outcome = match mode {
        Mode::Pw { forest, .. } => decide_spw(gp, s, forest)?,
        Mode::Td { order, .. } => decide_std(gp, s, order.len())?,
    };
    Ok(match outcome {
        SpwOutcome::Decomposition(c) => Ok(c),
        SpwOutcome::Model(m) => Err(m),
    })
}

/// Extends an `S`-rooted model of `X − apex` in `g − u` by the branch set `{u}`.
fn lift_apex(g: &Graph, u: Vertex, model: MinorModel, mode: Mode) -> Result<MinorModel, LayeredError> {
    let (x, mut branch_sets) = match mode {
        Mode::Pw { x, .. } => (x, model.branch_sets),
        Mode::Td { x, order } => (x, model.branch_sets.into_iter().map(|(i, b)| (order[i as usize], b)).collect::<BTreeMap<_, _>>()),
    };
    branch_sets.insert(x.apex, VertexSet::from([u]));
    let model = MinorModel { branch_sets };
    check_model(g, x, &model)?;
    Ok(model)
}

/// Replaces the contracted vertex `uc` by the connected set it stands for.
fn lift_contraction(g: &Graph, model: MinorModel, uc: Vertex, rest: &VertexSet, mode: Mode) -> Result<MinorModel, LayeredError> {
    let branch_sets = model
        .branch_sets
        .into_iter()
        .map(|(i, mut b)| {
            if b.remove(&uc) {
                b.extend(rest.iter().copied());
            }
            (i, b)
        })
        .collect();
    let model = MinorModel { branch_sets };
    let x = match mode {
        Mode::Pw { x, .. } | Mode::Td { x, .. } => x,
    };
    check_model(g, x, &model)?;
    Ok(model)
}

fn check_model(g: &Graph, x: &ApexPattern, model: &MinorModel) -> Result<(), LayeredError> {
    verify_model(g, &x.graph, model, &Rooting::None).map_err(|e| LayeredError::InvalidPattern(format!("lifted model does not verify: {e}")))
}

/// Shrinks the host until `g − V(C)` is connected for every component `C`
/// of `g' − host`, by dropping components of `g − V(C)` that avoid `u`.
fn minimize_host(g: &Graph, gp: &Graph, u: Vertex, mut cert: FocusedCertificate) -> Result<FocusedCertificate, LayeredError> {
    'outer: loop {
        for c in gp.remove_vertices(&cert.host).components() {
            for c2 in g.remove_vertices(&c).components() {
                if c2.contains(&u) {
                    continue;
                }
                let host: VertexSet = cert.host.difference(&c2).copied().collect();
                let inner = match &cert.inner {
                    FocusedInner::Path(p) => FocusedInner::Path(PathDecomposition::new(p.bags.iter().map(|b| b - &c2).collect())),
                    FocusedInner::Elimination(f) => FocusedInner::Elimination(f.restrict(&host)),
                    FocusedInner::Tree(_) => unreachable!("no tree certificates here"),
                };
                cert = FocusedCertificate::with_attachments(gp, host, inner)?;
                continue 'outer;
            }
        }
        return Ok(cert);
    }
}

/// Bounds on `td(G)` and `pw(G)` in terms of the diameter of connected `G`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DiameterBounds {
    pub diameter: usize,
    pub td_bound: usize,
    pub pw_bound: usize,
}

/// `C(|V(X)|−1, 2)(diam + 1)` and `(2|V(X)|−3)(diam + 1) − 1`.
pub fn diameter_corollaries(g: &Graph, x: &ApexPattern) -> Result<DiameterBounds, LayeredError> {
    let diameter = g.diameter()?;
    let n = x.n();
    Ok(DiameterBounds {
        diameter,
        td_bound: binom2(n - 1) * (diameter + 1),
        pw_bound: ((2 * n - 3) * (diameter + 1)).saturating_sub(1),
    })
}

/// Plain width bound implied by a layered certificate: layered width times the
/// number of layers (minus one for path decompositions).
pub fn unlayered_bound(cert: &LayeredCertificate) -> usize {
    let total = cert.width() * cert.layering.layers.len();
    match cert.structure {
        LayeredStructure::Path(_) => total.saturating_sub(1),
        LayeredStructure::Elimination(_) => total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::*;

    fn k3() -> ApexPattern {
        ApexPattern::new(clique(3), 0).unwrap()
    }

    fn fan_pattern(n: u32) -> ApexPattern {
        ApexPattern::new(fan(n), 0).unwrap()
    }

    #[test]
    fn single_vertex() {
        let g = Graph::with_vertices([7]);
        let c = layered_pw(&g, &k3()).unwrap();
        assert_eq!(c.layering.layers, vec![VertexSet::from([7])]);
        assert_eq!(verify_layered(&g, &c).unwrap(), 1);
        let c = layered_td(&g, &k3()).unwrap();
        assert_eq!(verify_layered(&g, &c).unwrap(), 1);
    }

    #[test]
    fn tree_with_triangle_pattern() {
        let g = complete_ternary(3);
        let c = layered_pw(&g, &k3()).unwrap();
        assert!(verify_layered(&g, &c).unwrap() <= 3);
        assert_eq!(c.layering.layers[0], VertexSet::from([0]));
    }

    #[test]
    fn path_with_triangle_fan() {
        let g = path(9);
        let c = layered_td(&g, &fan_pattern(3)).unwrap();
        assert!(verify_layered(&g, &c).unwrap() <= 1);
    }

    #[test]
    fn ternary_tree_with_fan4() {
        let g = complete_ternary(4);
        let c = layered_td(&g, &fan_pattern(4)).unwrap();
        assert!(verify_layered(&g, &c).unwrap() <= 3);
    }

    #[test]
    fn disconnected_input() {
        let g = path(3).disjoint_union_shifted(&cycle(4), 10);
        let c = layered_pw(&g, &fan_pattern(4)).unwrap();
        assert!(verify_layered(&g, &c).unwrap() <= 5);
    }

    #[test]
    fn excluded_minor_is_reported() {
        let g = clique(4);
        match layered_td(&g, &fan_pattern(3)) {
            Err(LayeredError::Model(m)) => verify_model(&g, &clique(3), &m, &Rooting::None).unwrap(),
            other => panic!("expected a model, got {other:?}"),
        }
        let g = grid(3, 3);
        match layered_pw(&g, &k3()) {
            Err(LayeredError::Model(m)) => verify_model(&g, &clique(3), &m, &Rooting::None).unwrap(),
            other => panic!("expected a model, got {other:?}"),
        }
    }

    #[test]
    fn pattern_validation() {
        assert!(ApexPattern::new(clique(3), 2).is_ok());
        assert!(ApexPattern::new(clique(4), 0).is_err());
        assert!(ApexPattern::detect(clique(4)).is_err());
        assert_eq!(ApexPattern::detect(fan(4)).unwrap().apex, 0);
        assert_eq!(fan_pattern(5).path_order(), Some(vec![1, 2, 3, 4]));
        assert!(layered_td(&path(3), &ApexPattern::new(star(3), 0).unwrap()).is_err());
    }

    #[test]
    fn diameter_bounds() {
        let b = diameter_corollaries(&path(3), &k3()).unwrap();
        assert_eq!((b.diameter, b.td_bound), (2, 3));
        let b = diameter_corollaries(&cycle(4), &fan_pattern(4)).unwrap();
        assert_eq!(b.pw_bound, 14);
        let b = diameter_corollaries(&Graph::with_vertices([0]), &k3()).unwrap();
        assert_eq!((b.diameter, b.td_bound, b.pw_bound), (0, 1, 2));
        assert!(diameter_corollaries(&path(2).disjoint_union_shifted(&path(1), 5), &k3()).is_err());
    }
}
