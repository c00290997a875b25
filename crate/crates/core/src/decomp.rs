//! Path/tree decompositions, elimination forests, layerings and their
//! focused (pair) variants, with verifiers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{int_keys, Graph, RootedForest, Vertex, VertexSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("root vertex {0} is not a vertex of the graph")]
    RootOutsideGraph(Vertex),
    #[error("host vertex {0} is not a vertex of the graph")]
    HostOutsideGraph(Vertex),
    #[error("root vertex {0} is not in the host")]
    RootNotInHost(Vertex),
    #[error("bag {bag} contains {vertex}, which is not a host vertex")]
    BagOutsideHost { bag: u32, vertex: Vertex },
    #[error("vertex {0} is in no bag")]
    UncoveredVertex(Vertex),
    #[error("edge {0}-{1} is in no bag")]
    UncoveredEdge(Vertex, Vertex),
    #[error("bags containing vertex {0} are not contiguous")]
    NotContiguous(Vertex),
    #[error("bags containing vertex {0} do not form a subtree")]
    NotSubtree(Vertex),
    #[error("malformed decomposition tree: {0}")]
    BadTree(String),
    #[error("elimination forest nodes differ from the host at vertex {0}")]
    ForestMismatch(Vertex),
    #[error("edge {0}-{1} is not an ancestor-descendant pair")]
    EdgeNotInClosure(Vertex, Vertex),
    #[error("component with minimum vertex {0} has no attachment")]
    MissingAttachment(Vertex),
    #[error("attachment key {0} is not the minimum of an outside component")]
    UnknownAttachment(Vertex),
    #[error("component {component} attaches to missing target {target}")]
    BadAttachmentTarget { component: Vertex, target: u32 },
    #[error("component {component} attaches to {target}, which misses neighbor {neighbor}")]
    AttachmentMissesNeighbor { component: Vertex, target: u32, neighbor: Vertex },
    #[error("no bag or root-to-leaf path contains the neighbors of component {0}")]
    NoAttachmentPossible(Vertex),
    #[error("vertex {0} lies in two layers")]
    LayerOverlap(Vertex),
    #[error("vertex {0} lies in no layer")]
    LayerMissing(Vertex),
    #[error("layer vertex {0} is not a graph vertex")]
    LayerOutsideGraph(Vertex),
    #[error("edge {0}-{1} spans non-consecutive layers")]
    EdgeSpansLayers(Vertex, Vertex),
    #[error("layering ends with an empty layer")]
    TrailingEmptyLayer,
    #[error("structure does not match the certificate kind")]
    KindMismatch,
}

/// Sequence of bags `W_1, …, W_m`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathDecomposition {
    pub bags: Vec<VertexSet>,
}

impl PathDecomposition {
    pub fn new(bags: Vec<VertexSet>) -> Self {
        PathDecomposition { bags }
    }

    /// `max |W_i| − 1`, or −1 without bags.
    pub fn width(&self) -> i64 {
        self.bags.iter().map(|b| b.len() as i64 - 1).max().unwrap_or(-1)
    }

    /// Checks that this is a path decomposition of `h` and returns its width.
    pub fn verify(&self, h: &Graph) -> Result<i64, VerifyError> {
        let mut first = BTreeMap::new();
        let mut last = BTreeMap::new();
        let mut count: BTreeMap<Vertex, usize> = BTreeMap::new();
        for (i, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if !h.contains(v) {
                    return Err(VerifyError::BagOutsideHost { bag: i as u32, vertex: v });
                }
                first.entry(v).or_insert(i);
                last.insert(v, i);
                *count.entry(v).or_default() += 1;
            }
        }
        for v in h.vertices() {
            let Some(&f) = first.get(&v) else {
                return Err(VerifyError::UncoveredVertex(v));
            };
            if last[&v] - f + 1 != count[&v] {
                return Err(VerifyError::NotContiguous(v));
            }
        }
        for (u, v) in h.edges() {
            if first[&u].max(first[&v]) > last[&u].min(last[&v]) {
                return Err(VerifyError::UncoveredEdge(u, v));
            }
        }
        Ok(self.width())
    }

    pub fn as_tree(&self) -> TreeDecomposition {
        let mut tree = RootedForest::new();
        let mut bags = BTreeMap::new();
        for (i, bag) in self.bags.iter().enumerate() {
            let i = i as u32;
            tree.add_node(i, i.checked_sub(1));
            bags.insert(i, bag.clone());
        }
        TreeDecomposition { tree, bags }
    }
}

/// Tree decomposition; the tree is stored rooted with node ids as keys.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    pub tree: RootedForest,
    #[serde(with = "int_keys")]
    pub bags: BTreeMap<u32, VertexSet>,
}

impl TreeDecomposition {
    pub fn single_bag(bag: VertexSet) -> Self {
        let mut tree = RootedForest::new();
        tree.add_node(0, None);
        TreeDecomposition { tree, bags: BTreeMap::from([(0, bag)]) }
    }

    pub fn width(&self) -> i64 {
        self.bags.values().map(|b| b.len() as i64 - 1).max().unwrap_or(-1)
    }

    pub fn verify(&self, h: &Graph) -> Result<i64, VerifyError> {
        let tree = RootedForest::from_parents(self.tree.parents().clone()).map_err(VerifyError::BadTree)?;
        if tree.nodes() != self.bags.keys().copied().collect::<VertexSet>() {
            return Err(VerifyError::BadTree("tree nodes and bag keys differ".into()));
        }
        if tree.len() > 0 && tree.roots().len() != 1 {
            return Err(VerifyError::BadTree("tree must have exactly one root".into()));
        }
        for (&i, bag) in &self.bags {
            if let Some(&v) = bag.iter().find(|v| !h.contains(**v)) {
                return Err(VerifyError::BagOutsideHost { bag: i, vertex: v });
            }
        }
        for v in h.vertices() {
            let tops = self
                .bags
                .iter()
                .filter(|(i, b)| b.contains(&v) && tree.parent(**i).is_none_or(|p| !self.bags[&p].contains(&v)))
                .count();
            match tops {
                0 => return Err(VerifyError::UncoveredVertex(v)),
                1 => {}
                _ => return Err(VerifyError::NotSubtree(v)),
            }
        }
        for (u, v) in h.edges() {
            if !self.bags.values().any(|b| b.contains(&u) && b.contains(&v)) {
                return Err(VerifyError::UncoveredEdge(u, v));
            }
        }
        Ok(self.width())
    }
}

/// Checks that `f` is an elimination forest of `h`; returns its vertex-height.
pub fn verify_elimination_forest(h: &Graph, f: &RootedForest) -> Result<usize, VerifyError> {
    let f = RootedForest::from_parents(f.parents().clone()).map_err(VerifyError::BadTree)?;
    let nodes = f.nodes();
    if let Some(&v) = nodes.symmetric_difference(&h.vertex_set()).next() {
        return Err(VerifyError::ForestMismatch(v));
    }
    for (u, v) in h.edges() {
        if !f.in_closure(u, v) {
            return Err(VerifyError::EdgeNotInClosure(u, v));
        }
    }
    Ok(f.vertex_height())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FocusedInner {
    Path(PathDecomposition),
    Tree(TreeDecomposition),
    Elimination(RootedForest),
}

/// Decomposition of an induced host `H ⊇ S` plus, for every component `C` of
/// `G − V(H)` (keyed by its minimum vertex), the bag index, tree node or leaf
/// whose bag / root-to-leaf path contains `N(C)`. `None` is allowed only when
/// `N(C) = ∅`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FocusedCertificate {
    pub host: VertexSet,
    pub inner: FocusedInner,
    pub attachment: BTreeMap<Vertex, Option<u32>>,
}

impl FocusedCertificate {
    /// Null-host certificate, valid exactly when `S = ∅`.
    pub fn null(g: &Graph, inner_kind: FocusedInner) -> Self {
        let attachment = g.components().iter().map(|c| (*c.iter().next().expect("component"), None)).collect();
        FocusedCertificate { host: VertexSet::new(), inner: inner_kind, attachment }
    }

    /// Builds a certificate, choosing for each outside component the first
    /// bag (or first leaf in ascending id order) containing its neighborhood.
    pub fn with_attachments(g: &Graph, host: VertexSet, inner: FocusedInner) -> Result<Self, VerifyError> {
        let mut attachment = BTreeMap::new();
        for comp in g.remove_vertices(&host).components() {
            let key = *comp.iter().next().expect("component");
            let nb = g.neighborhood(&comp);
            let target = if nb.is_empty() { None } else { Some(find_target(&inner, &nb).ok_or(VerifyError::NoAttachmentPossible(key))?) };
            attachment.insert(key, target);
        }
        Ok(FocusedCertificate { host, inner, attachment })
    }

    /// Width (path/tree) or vertex-height (elimination), without verifying.
    pub fn value(&self) -> i64 {
        match &self.inner {
            FocusedInner::Path(p) => p.width(),
            FocusedInner::Tree(t) => t.width(),
            FocusedInner::Elimination(f) => f.vertex_height() as i64,
        }
    }
}

fn find_target(inner: &FocusedInner, nb: &VertexSet) -> Option<u32> {
    match inner {
        FocusedInner::Path(p) => p.bags.iter().position(|b| nb.is_subset(b)).map(|i| i as u32),
        FocusedInner::Tree(t) => t.bags.iter().find(|(_, b)| nb.is_subset(b)).map(|(&i, _)| i),
        FocusedInner::Elimination(f) => f.leaves().into_iter().find(|&l| {
            let path: VertexSet = f.path_from_root(l).into_iter().collect();
            nb.is_subset(&path)
        }),
    }
}

/// Verifies a focused certificate for `(g, s)`; returns the width or the
/// vertex-height.
pub fn verify_focused(g: &Graph, s: &VertexSet, cert: &FocusedCertificate) -> Result<i64, VerifyError> {
    if let Some(&v) = s.iter().find(|v| !g.contains(**v)) {
        return Err(VerifyError::RootOutsideGraph(v));
    }
    if let Some(&v) = cert.host.iter().find(|v| !g.contains(**v)) {
        return Err(VerifyError::HostOutsideGraph(v));
    }
    if let Some(&v) = s.iter().find(|v| !cert.host.contains(v)) {
        return Err(VerifyError::RootNotInHost(v));
    }
    let h = g.induced(&cert.host);
    let value = match &cert.inner {
        FocusedInner::Path(p) => p.verify(&h)?,
        FocusedInner::Tree(t) => t.verify(&h)?,
        FocusedInner::Elimination(f) => verify_elimination_forest(&h, f)? as i64,
    };
    let comps = g.remove_vertices(&cert.host).components();
    let keys: VertexSet = comps.iter().map(|c| *c.iter().next().expect("component")).collect();
    if let Some(&k) = cert.attachment.keys().find(|k| !keys.contains(k)) {
        return Err(VerifyError::UnknownAttachment(k));
    }
    for comp in &comps {
        let key = *comp.iter().next().expect("component");
        let Some(target) = cert.attachment.get(&key) else {
            return Err(VerifyError::MissingAttachment(key));
        };
        let nb = g.neighborhood(comp);
        let Some(target) = *target else {
            if !nb.is_empty() {
                return Err(VerifyError::MissingAttachment(key));
            }
            continue;
        };
        let container: VertexSet = match &cert.inner {
            FocusedInner::Path(p) => p.bags.get(target as usize).cloned(),
            FocusedInner::Tree(t) => t.bags.get(&target).cloned(),
            FocusedInner::Elimination(f) => {
                (f.contains(target) && f.children(target).is_empty()).then(|| f.path_from_root(target).into_iter().collect())
            }
        }
        .ok_or(VerifyError::BadAttachmentTarget { component: key, target })?;
        if let Some(&v) = nb.iter().find(|v| !container.contains(v)) {
            return Err(VerifyError::AttachmentMissesNeighbor { component: key, target, neighbor: v });
        }
    }
    Ok(value)
}

/// Sequence of disjoint layers covering the graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layering {
    pub layers: Vec<VertexSet>,
}

impl Layering {
    /// BFS layering from `roots`; the graph must be reachable from them.
    pub fn bfs(g: &Graph, root: Vertex) -> Layering {
        let dist = g.bfs_distances(root);
        let depth = dist.values().copied().max().unwrap_or(0);
        let mut layers = vec![VertexSet::new(); depth + 1];
        for (v, d) in dist {
            layers[d].insert(v);
        }
        Layering { layers }
    }

    pub fn layer_of(&self) -> BTreeMap<Vertex, usize> {
        let mut m = BTreeMap::new();
        for (i, l) in self.layers.iter().enumerate() {
            for &v in l {
                m.insert(v, i);
            }
        }
        m
    }

    pub fn verify(&self, g: &Graph) -> Result<(), VerifyError> {
        if self.layers.last().is_some_and(|l| l.is_empty()) {
            return Err(VerifyError::TrailingEmptyLayer);
        }
        let mut layer_of = BTreeMap::new();
        for (i, l) in self.layers.iter().enumerate() {
            for &v in l {
                if !g.contains(v) {
                    return Err(VerifyError::LayerOutsideGraph(v));
                }
                if layer_of.insert(v, i).is_some() {
                    return Err(VerifyError::LayerOverlap(v));
                }
            }
        }
        if let Some(v) = g.vertices().find(|v| !layer_of.contains_key(v)) {
            return Err(VerifyError::LayerMissing(v));
        }
        for (u, v) in g.edges() {
            if layer_of[&u].abs_diff(layer_of[&v]) > 1 {
                return Err(VerifyError::EdgeSpansLayers(u, v));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LayeredStructure {
    Path(PathDecomposition),
    Elimination(RootedForest),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredCertificate {
    pub layering: Layering,
    pub structure: LayeredStructure,
}

impl LayeredCertificate {
    /// Layered width without verification.
    pub fn width(&self) -> usize {
        let groups: Vec<VertexSet> = match &self.structure {
            LayeredStructure::Path(p) => p.bags.clone(),
            LayeredStructure::Elimination(f) => f.root_to_leaf_paths().into_iter().map(|p| p.into_iter().collect()).collect(),
        };
        groups
            .iter()
            .flat_map(|grp| self.layering.layers.iter().map(move |l| grp.intersection(l).count()))
            .max()
            .unwrap_or(0)
    }
}

/// Verifies the layering and the structure over all of `g`; returns the
/// layered width.
pub fn verify_layered(g: &Graph, cert: &LayeredCertificate) -> Result<usize, VerifyError> {
    cert.layering.verify(g)?;
    match &cert.structure {
        LayeredStructure::Path(p) => {
            p.verify(g)?;
        }
        LayeredStructure::Elimination(f) => {
            verify_elimination_forest(g, f)?;
        }
    }
    Ok(cert.width())
}

/// JSON form of every certificate kind, tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    FocusedPath {
        host: VertexSet,
        bags: Vec<VertexSet>,
        #[serde(with = "int_keys")]
        attachment: BTreeMap<Vertex, Option<u32>>,
    },
    FocusedTree {
        host: VertexSet,
        tree: RootedForest,
        #[serde(with = "int_keys")]
        bags: BTreeMap<u32, VertexSet>,
        #[serde(with = "int_keys")]
        attachment: BTreeMap<Vertex, Option<u32>>,
    },
    FocusedElimination {
        host: VertexSet,
        forest: RootedForest,
        #[serde(with = "int_keys")]
        attachment: BTreeMap<Vertex, Option<u32>>,
    },
    LayeredPath { layers: Vec<VertexSet>, bags: Vec<VertexSet> },
    LayeredElimination { layers: Vec<VertexSet>, forest: RootedForest },
}

impl From<&FocusedCertificate> for Certificate {
    fn from(c: &FocusedCertificate) -> Self {
        let host = c.host.clone();
        let attachment = c.attachment.clone();
        match &c.inner {
            FocusedInner::Path(p) => Certificate::FocusedPath { host, bags: p.bags.clone(), attachment },
            FocusedInner::Tree(t) => Certificate::FocusedTree { host, tree: t.tree.clone(), bags: t.bags.clone(), attachment },
            FocusedInner::Elimination(f) => Certificate::FocusedElimination { host, forest: f.clone(), attachment },
        }
    }
}

impl From<&LayeredCertificate> for Certificate {
    fn from(c: &LayeredCertificate) -> Self {
        let layers = c.layering.layers.clone();
        match &c.structure {
            LayeredStructure::Path(p) => Certificate::LayeredPath { layers, bags: p.bags.clone() },
            LayeredStructure::Elimination(f) => Certificate::LayeredElimination { layers, forest: f.clone() },
        }
    }
}

pub enum AnyCertificate {
    Focused(FocusedCertificate),
    Layered(LayeredCertificate),
}

impl From<Certificate> for AnyCertificate {
    fn from(c: Certificate) -> Self {
        match c {
            Certificate::FocusedPath { host, bags, attachment } => {
                AnyCertificate::Focused(FocusedCertificate { host, inner: FocusedInner::Path(PathDecomposition { bags }), attachment })
            }
            Certificate::FocusedTree { host, tree, bags, attachment } => {
                AnyCertificate::Focused(FocusedCertificate { host, inner: FocusedInner::Tree(TreeDecomposition { tree, bags }), attachment })
            }
            Certificate::FocusedElimination { host, forest, attachment } => {
                AnyCertificate::Focused(FocusedCertificate { host, inner: FocusedInner::Elimination(forest), attachment })
            }
            Certificate::LayeredPath { layers, bags } => AnyCertificate::Layered(LayeredCertificate {
                layering: Layering { layers },
                structure: LayeredStructure::Path(PathDecomposition { bags }),
            }),
            Certificate::LayeredElimination { layers, forest } => AnyCertificate::Layered(LayeredCertificate {
                layering: Layering { layers },
                structure: LayeredStructure::Elimination(forest),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::*;
    use crate::graph::dfs_tree;

    fn set(v: &[Vertex]) -> VertexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn null_certificate_height_zero() {
        let g = grid(2, 3);
        let c = FocusedCertificate::null(&g, FocusedInner::Elimination(RootedForest::new()));
        assert_eq!(verify_focused(&g, &VertexSet::new(), &c), Ok(0));
        let c = FocusedCertificate::null(&g, FocusedInner::Path(PathDecomposition::default()));
        assert_eq!(verify_focused(&g, &VertexSet::new(), &c), Ok(-1));
    }

    #[test]
    fn p4_middle_bag() {
        let g = path(4);
        let s = set(&[1, 2]);
        let inner = FocusedInner::Path(PathDecomposition::new(vec![s.clone()]));
        let c = FocusedCertificate::with_attachments(&g, s.clone(), inner).unwrap();
        assert_eq!(c.attachment, BTreeMap::from([(0, Some(0)), (3, Some(0))]));
        assert_eq!(verify_focused(&g, &s, &c), Ok(1));
    }

    #[test]
    fn rejects_broken_certificates() {
        let g = path(4);
        let s = set(&[1, 2]);
        let mut c = FocusedCertificate {
            host: s.clone(),
            inner: FocusedInner::Path(PathDecomposition::new(vec![set(&[1]), set(&[2])])),
            attachment: BTreeMap::from([(0, Some(0)), (3, Some(1))]),
        };
        assert_eq!(verify_focused(&g, &s, &c), Err(VerifyError::UncoveredEdge(1, 2)));
        c.inner = FocusedInner::Path(PathDecomposition::new(vec![set(&[1, 2])]));
        c.attachment.remove(&3);
        assert_eq!(verify_focused(&g, &s, &c), Err(VerifyError::MissingAttachment(3)));
        c.host = set(&[1]);
        assert_eq!(verify_focused(&g, &s, &c), Err(VerifyError::RootNotInHost(2)));
    }

    #[test]
    fn contiguity_and_subtree() {
        let g = path(3);
        let pd = PathDecomposition::new(vec![set(&[0, 1]), set(&[1, 2]), set(&[0])]);
        assert_eq!(pd.verify(&g), Err(VerifyError::NotContiguous(0)));
        let mut td = pd.as_tree();
        assert_eq!(td.verify(&g), Err(VerifyError::NotSubtree(0)));
        td.bags.insert(2, set(&[2]));
        assert_eq!(td.verify(&g), Ok(1));
    }

    #[test]
    fn widths() {
        assert_eq!(PathDecomposition::new(vec![set(&[0, 1, 2])]).width(), 2);
        assert_eq!(PathDecomposition::default().width(), -1);
        let f = dfs_tree(&path(4), 0).unwrap();
        assert_eq!(verify_elimination_forest(&path(4), &f), Ok(4));
    }

    #[test]
    fn layered_path_bfs() {
        let g = path(5);
        let f = dfs_tree(&g, 0).unwrap();
        let cert = LayeredCertificate { layering: Layering::bfs(&g, 0), structure: LayeredStructure::Elimination(f) };
        assert_eq!(verify_layered(&g, &cert), Ok(1));
    }

    #[test]
    fn layered_single_layer_grid() {
        let g = grid(3, 3);
        let bags = vec![set(&[0, 1, 2, 3]), set(&[1, 2, 3, 4]), set(&[2, 3, 4, 5]), set(&[3, 4, 5, 6]), set(&[4, 5, 6, 7]), set(&[5, 6, 7, 8])];
        let cert = LayeredCertificate {
            layering: Layering { layers: vec![g.vertex_set()] },
            structure: LayeredStructure::Path(PathDecomposition::new(bags)),
        };
        assert_eq!(verify_layered(&g, &cert), Ok(4));
    }

    #[test]
    fn layering_errors() {
        let g = path(3);
        let bad = Layering { layers: vec![set(&[0]), set(&[1]), set(&[2]), VertexSet::new()] };
        assert_eq!(bad.verify(&g), Err(VerifyError::TrailingEmptyLayer));
        let bad = Layering { layers: vec![set(&[0, 2]), VertexSet::new(), set(&[1])] };
        assert_eq!(bad.verify(&g), Err(VerifyError::EdgeSpansLayers(0, 1)));
    }

    #[test]
    fn json_round_trip() {
        let g = path(4);
        let s = set(&[1, 2]);
        let inner = FocusedInner::Path(PathDecomposition::new(vec![s.clone()]));
        let c = FocusedCertificate::with_attachments(&g, s, inner).unwrap();
        let json = serde_json::to_string(&Certificate::from(&c)).unwrap();
        assert_eq!(json, r#"{"kind":"focused-path","host":[1,2],"bags":[[1,2]],"attachment":{"0":0,"3":0}}"#);
        let back: Certificate = serde_json::from_str(&json).unwrap();
        match AnyCertificate::from(back) {
            AnyCertificate::Focused(f) => assert_eq!(f, c),
            AnyCertificate::Layered(_) => panic!("wrong kind"),
        }
    }
}
