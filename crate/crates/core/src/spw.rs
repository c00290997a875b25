//! Win/win decision for `pw(G, S)` against an excluded `S`-rooted forest:
//! either a path decomposition of `(G, S)` of width at most `2|V(F)| − 2` or
//! an `S`-rooted model of `F`.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::decomp::{verify_focused, Certificate, FocusedCertificate, FocusedInner, PathDecomposition};
use crate::graph::{Graph, Linkage, Separation, Vertex, VertexSet};
use crate::menger::menger_from_separation;
use crate::minors::{verify_model, MinorModel, Rooting};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpwError {
    #[error("pattern is not a forest")]
    NotForest,
    #[error("pattern forest has no vertices")]
    EmptyForest,
    #[error("root vertex {0} is not a graph vertex")]
    RootOutsideGraph(Vertex),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// A `(w, S)`-good separation with its witness: a focused path decomposition
/// of `(A, S ∩ V(A))` whose last bag contains the boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodSeparation {
    pub sep: Separation,
    pub witness: FocusedCertificate,
}

impl GoodSeparation {
    /// `(∅, G)` with the empty witness.
    pub fn trivial(g: &Graph) -> Self {
        GoodSeparation {
            sep: Separation::trivial(g),
            witness: FocusedCertificate {
                host: VertexSet::new(),
                inner: FocusedInner::Path(PathDecomposition::default()),
                attachment: BTreeMap::new(),
            },
        }
    }

    pub fn bags(&self) -> &[VertexSet] {
        match &self.witness.inner {
            FocusedInner::Path(p) => &p.bags,
            _ => &[],
        }
    }
}

/// Checks that `good` is `(w, S)`-good for `g`.
pub fn verify_good(g: &Graph, s: &VertexSet, w: usize, good: &GoodSeparation) -> Result<(), SpwError> {
    let sep = Separation::new(g, good.sep.a.clone(), good.sep.b.clone()).map_err(|e| SpwError::Precondition(e.to_string()))?;
    if sep.order() > w {
        return Err(SpwError::Precondition(format!("order {} exceeds {w}", sep.order())));
    }
    if !matches!(good.witness.inner, FocusedInner::Path(_)) {
        return Err(SpwError::Precondition("witness is not a path decomposition".into()));
    }
    let a = g.induced(&sep.a);
    let sa: VertexSet = s.intersection(&sep.a).copied().collect();
    let width = verify_focused(&a, &sa, &good.witness).map_err(|e| SpwError::Precondition(e.to_string()))?;
    if width > 2 * w as i64 - 2 {
        return Err(SpwError::Precondition(format!("witness width {width} exceeds {}", 2 * w as i64 - 2)));
    }
    let boundary = sep.boundary();
    let last_ok = match good.bags().last() {
        Some(last) => boundary.is_subset(last),
        None => boundary.is_empty(),
    };
    if !last_ok {
        return Err(SpwError::Precondition("last bag misses the boundary".into()));
    }
    Ok(())
}

fn witness(g: &Graph, a: &VertexSet, host: VertexSet, bags: Vec<VertexSet>) -> Result<FocusedCertificate, SpwError> {
    FocusedCertificate::with_attachments(&g.induced(a), host, FocusedInner::Path(PathDecomposition::new(bags)))
        .map_err(|e| SpwError::Internal(format!("witness attachment: {e}")))
}

/// Re-anchors each path at its unique vertex in `boundary`.
fn anchor_paths(link: &Linkage, boundary: &VertexSet) -> Result<Linkage, SpwError> {
    let mut paths = Vec::new();
    for p in &link.paths {
        let pos: Vec<usize> = p.iter().enumerate().filter(|(_, v)| boundary.contains(v)).map(|(i, _)| i).collect();
        match pos.as_slice() {
            [i] => paths.push(p[*i..].to_vec()),
            [] => {}
            _ => return Err(SpwError::Internal(format!("path {p:?} meets the cut twice"))),
        }
    }
    Ok(Linkage { paths, x: boundary.clone(), y: link.y.clone() })
}

/// Contracts the linkage paths into the boundary of `(P, Q)`, turning the
/// witness of `(A', B')` into a witness of `(P, Q)` with no larger bags.
/// `linkage` must consist of `|V(P) ∩ V(Q)|` disjoint `V(P)`–`V(B')` paths.
pub fn pull_back_good(g: &Graph, s: &VertexSet, w: usize, good: &GoodSeparation, target: &Separation, linkage: &Linkage) -> Result<GoodSeparation, SpwError> {
    let target = Separation::new(g, target.a.clone(), target.b.clone()).map_err(|e| SpwError::Precondition(e.to_string()))?;
    if !target.le(&good.sep) {
        return Err(SpwError::Precondition("target is not below the good separation".into()));
    }
    let boundary = target.boundary();
    if linkage.paths.len() != boundary.len() {
        return Err(SpwError::Precondition(format!("{} paths for a boundary of size {}", linkage.paths.len(), boundary.len())));
    }
    let mut contracted: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    let check = Linkage { paths: linkage.paths.clone(), x: target.a.clone(), y: good.sep.b.clone() };
    check.validate(g).map_err(SpwError::Precondition)?;
    for p in &linkage.paths {
        let x = p[0];
        if !boundary.contains(&x) {
            return Err(SpwError::Precondition(format!("path {p:?} does not start on the boundary")));
        }
        for &v in p {
            contracted.insert(v, x);
        }
    }
    let bags: Vec<VertexSet> = good
        .bags()
        .iter()
        .map(|bag| {
            bag.iter()
                .filter(|v| target.a.contains(v))
                .copied()
                .chain(bag.iter().filter_map(|v| contracted.get(v).copied()))
                .collect()
        })
        .collect();
    let host: VertexSet = bags.iter().flatten().copied().collect();
    let out = GoodSeparation { witness: witness(g, &target.a, host, bags)?, sep: target };
    verify_good(g, s, w, &out).map_err(|e| SpwError::Internal(format!("pull-back: {e}")))?;
    Ok(out)
}

/// Absorbs boundary vertices without neighbors in `B − A` until none is left.
fn absorb(g: &Graph, mut good: GoodSeparation) -> GoodSeparation {
    loop {
        let outside: VertexSet = good.sep.b.difference(&good.sep.a).copied().collect();
        let Some(u) = good.sep.boundary().into_iter().find(|&u| g.neighbors(u).is_disjoint(&outside)) else {
            return good;
        };
        good.sep.b.remove(&u);
    }
}

/// `(A + v, B)` with the bag `(V(A) ∩ V(B)) ∪ {v}` appended.
fn add_vertex(g: &Graph, good: &GoodSeparation, v: Vertex) -> Result<GoodSeparation, SpwError> {
    let mut bag = good.sep.boundary();
    bag.insert(v);
    let mut bags = good.bags().to_vec();
    bags.push(bag);
    let mut host = good.witness.host.clone();
    host.insert(v);
    let mut a = good.sep.a.clone();
    a.insert(v);
    let sep = Separation { a, b: good.sep.b.clone() };
    Ok(GoodSeparation { witness: witness(g, &sep.a, host, bags)?, sep })
}

/// Menger between `lower` and `upper ≥ lower`, returning the X-closest
/// separation `(P, Q)` in between, the full linkage from the boundary of
/// `lower`, and the same linkage anchored at the boundary of `(P, Q)`.
fn menger_between(g: &Graph, lower: &Separation, upper: &Separation) -> Result<(Linkage, Linkage, Separation), SpwError> {
    let (link, pq) = menger_from_separation(g, lower, &upper.b);
    let anchored = anchor_paths(&link, &pq.boundary())?;
    Ok((link, anchored, pq))
}

fn extension_key(sep: &Separation) -> (std::cmp::Reverse<usize>, usize, Vec<Vertex>) {
    (std::cmp::Reverse(sep.a.len()), sep.order(), sep.a.iter().copied().collect())
}

/// Saturates `start` under the two extension moves: absorbing a boundary
/// vertex with no neighbor in `B − A`, and adding one vertex followed by the
/// Menger pull-back. Every accepted move is a proper extension.
pub fn grow_maximal_good(g: &Graph, s: &VertexSet, w: usize, start: GoodSeparation) -> Result<GoodSeparation, SpwError> {
    let mut cur = absorb(g, start);
    loop {
        let k = cur.sep.order();
        if cur.sep.a.len() == g.n() || k + 1 > 2 * w - 1 {
            return Ok(cur);
        }
        let mut best: Option<GoodSeparation> = None;
        for &v in cur.sep.b.difference(&cur.sep.a) {
            let cand = absorb(g, add_vertex(g, &cur, v)?);
            if cand.sep.order() > w {
                continue;
            }
            let (_, anchored, pq) = menger_between(g, &cur.sep, &cand.sep)?;
            if pq == cur.sep {
                continue;
            }
            let pulled = pull_back_good(g, s, w, &cand, &pq, &anchored)?;
            if best.as_ref().is_none_or(|b| extension_key(&pulled.sep) < extension_key(&b.sep)) {
                best = Some(pulled);
            }
        }
        match best {
            Some(b) => cur = absorb(g, b),
            None => return Ok(cur),
        }
    }
}

type Model = BTreeMap<Vertex, VertexSet>;

fn extend_model(model: &Model, link: &Linkage) -> Model {
    model
        .iter()
        .map(|(&x, b)| {
            let mut nb = b.clone();
            for p in &link.paths {
                if b.contains(&p[0]) {
                    nb.extend(p.iter().copied());
                }
            }
            (x, nb)
        })
        .collect()
}

/// Removal order of a forest by repeatedly deleting the smallest vertex of
/// degree at most one, reversed: every prefix induces a forest in which the
/// last vertex has degree at most one.
fn addition_order(f: &Graph) -> Vec<Vertex> {
    let mut rest = f.clone();
    let mut removed = Vec::new();
    loop {
        let Some(t) = rest.vertices().find(|&t| rest.degree(t) <= 1) else {
            break;
        };
        removed.push(t);
        rest = rest.remove_vertex(t);
    }
    removed.reverse();
    removed
}

struct Level {
    input: GoodSeparation,
    input_model: Model,
    output: GoodSeparation,
    model: Model,
}

/// Outcome of the forest-rooted separation search.
pub enum RootedSeparation {
    /// Good separation of order `|V(F)|` with a boundary-rooted model of `F` in `A`.
    Found(GoodSeparation, MinorModel),
    /// A good separation with `V(A) = V(G)`, i.e. a witness of `pw(G, S) ≤ 2w − 2`.
    Win(FocusedCertificate),
}

/// Builds the separation chain for the forest `f` with `w = |V(f)|`, repairing
/// earlier levels whenever a later step exposes a proper good extension.
pub fn find_rooted_separation(g: &Graph, s: &VertexSet, f: &Graph) -> Result<RootedSeparation, SpwError> {
    Engine::new(g, s, f)?.build_levels()
}

struct Engine<'a> {
    g: &'a Graph,
    s: &'a VertexSet,
    w: usize,
    order: Vec<Vertex>,
    f: &'a Graph,
    levels: Vec<Level>,
}

impl<'a> Engine<'a> {
    fn new(g: &'a Graph, s: &'a VertexSet, f: &'a Graph) -> Result<Self, SpwError> {
        if !f.is_forest() {
            return Err(SpwError::NotForest);
        }
        if f.n() == 0 {
            return Err(SpwError::EmptyForest);
        }
        if let Some(&v) = s.iter().find(|v| !g.contains(**v)) {
            return Err(SpwError::RootOutsideGraph(v));
        }
        Ok(Engine { g, s, w: f.n(), order: addition_order(f), f, levels: Vec::new() })
    }

    fn grow(&self, start: GoodSeparation) -> Result<GoodSeparation, SpwError> {
        grow_maximal_good(self.g, self.s, self.w, start)
    }

    /// Settles level `j` for the given input and candidate extension, cascading
    /// downwards while the Menger step finds a smaller cut.
    fn resolve(&mut self, mut j: usize, mut input: GoodSeparation, mut input_model: Model, mut cand: GoodSeparation) -> Result<(), SpwError> {
        loop {
            let (link, anchored, pq) = menger_between(self.g, &input.sep, &cand.sep)?;
            if link.len() >= j {
                let model = extend_model(&input_model, &link);
                self.levels.push(Level { input, input_model, output: cand, model });
                return Ok(());
            }
            let pulled = pull_back_good(self.g, self.s, self.w, &cand, &pq, &anchored)?;
            let lower = self.levels.pop().ok_or_else(|| SpwError::Internal("cascade below level 0".into()))?;
            if !(lower.output.sep.le(&pq) && pq != lower.output.sep) {
                return Err(SpwError::Internal("cascade target is not a proper extension".into()));
            }
            cand = self.grow(pulled)?;
            j -= 1;
            input = lower.input;
            input_model = lower.input_model;
        }
    }

    fn build_levels(&mut self) -> Result<RootedSeparation, SpwError> {
        if self.levels.is_empty() {
            let start = GoodSeparation::trivial(self.g);
            let cand = self.grow(start.clone())?;
            self.resolve(0, start, Model::new(), cand)?;
        }
        loop {
            let top = self.levels.last().expect("level");
            if top.output.sep.a.len() == self.g.n() {
                return Ok(RootedSeparation::Win(top.output.witness.clone()));
            }
            let j = self.levels.len();
            if j > self.w {
                let model = MinorModel { branch_sets: top.model.clone() };
                return Ok(RootedSeparation::Found(top.output.clone(), model));
            }
            let t = self.order[j - 1];
            let placed: VertexSet = self.order[..j - 1].iter().copied().collect();
            let outside: VertexSet = top.output.sep.b.difference(&top.output.sep.a).copied().collect();
            let v = match self.f.neighbors(t).intersection(&placed).next() {
                Some(&nb) => {
                    let boundary = top.output.sep.boundary();
                    let roots: Vec<Vertex> = top.model[&nb].intersection(&boundary).copied().collect();
                    roots
                        .iter()
                        .find_map(|&u| g_first(self.g.neighbors(u), &outside))
                        .ok_or_else(|| SpwError::Internal("saturated separation has a dead boundary vertex".into()))?
                }
                None => *outside.iter().next().expect("B − A is non-empty"),
            };
            let top = self.levels.pop().expect("level");
            let input = add_vertex(self.g, &top.output, v)?;
            let mut input_model = top.model.clone();
            input_model.insert(t, VertexSet::from([v]));
            self.levels.push(top);
            let cand = self.grow(input.clone())?;
            self.resolve(j, input, input_model, cand)?;
        }
    }

    fn finish(&mut self) -> Result<SpwOutcome, SpwError> {
        loop {
            let top = match self.build_levels()? {
                RootedSeparation::Win(cert) => return Ok(SpwOutcome::Decomposition(cert)),
                RootedSeparation::Found(..) => self.levels.pop().expect("top level"),
            };
            let sep = &top.output.sep;
            let targets: VertexSet = self.s.intersection(&sep.b).copied().collect();
            let (link, pq) = menger_from_separation(self.g, sep, &targets);
            if link.len() >= self.w {
                return Ok(SpwOutcome::Model(MinorModel { branch_sets: extend_model(&top.model, &link) }));
            }
            let mut bag = sep.boundary();
            bag.extend(pq.boundary());
            let mut bags = top.output.bags().to_vec();
            bags.push(bag.clone());
            let mut host = top.output.witness.host.clone();
            host.extend(bag);
            let extended = GoodSeparation { witness: witness(self.g, &pq.a, host, bags)?, sep: pq };
            verify_good(self.g, self.s, self.w, &extended).map_err(|e| SpwError::Internal(format!("final bag: {e}")))?;
            let cand = self.grow(extended)?;
            let j = self.levels.len();
            self.resolve(j, top.input, top.input_model, cand)?;
        }
    }
}

fn g_first(ns: &VertexSet, outside: &VertexSet) -> Option<Vertex> {
    ns.intersection(outside).next().copied()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpwOutcome {
    Decomposition(FocusedCertificate),
    Model(MinorModel),
}

#[derive(Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum OutcomeJson {
    Decomposition { value: i64, certificate: Certificate },
    Model { model: MinorModel },
}

impl SpwOutcome {
    pub fn to_json(&self) -> OutcomeJson {
        match self {
            SpwOutcome::Decomposition(c) => OutcomeJson::Decomposition { value: c.value(), certificate: Certificate::from(c) },
            SpwOutcome::Model(m) => OutcomeJson::Model { model: m.clone() },
        }
    }
}

/// Either a path decomposition of `(g, s)` of width at most `2|V(f)| − 2` or
/// an `s`-rooted model of the forest `f`. The outcome is verified before it is
/// returned.
pub fn decide_spw(g: &Graph, s: &VertexSet, f: &Graph) -> Result<SpwOutcome, SpwError> {
    let mut engine = Engine::new(g, s, f)?;
    if s.is_empty() {
        return Ok(SpwOutcome::Decomposition(FocusedCertificate::null(g, FocusedInner::Path(PathDecomposition::default()))));
    }
    let outcome = engine.finish()?;
    match &outcome {
        SpwOutcome::Decomposition(c) => {
            let width = verify_focused(g, s, c).map_err(|e| SpwError::Internal(format!("decomposition: {e}")))?;
            if width > 2 * f.n() as i64 - 2 {
                return Err(SpwError::Internal(format!("width {width} exceeds the bound")));
            }
        }
        SpwOutcome::Model(m) => {
            verify_model(g, f, m, &Rooting::Rooted(s.clone())).map_err(|e| SpwError::Internal(format!("model: {e}")))?;
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::*;

    fn set(v: &[Vertex]) -> VertexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn empty_roots_give_null_certificate() {
        let g = grid(3, 3);
        match decide_spw(&g, &VertexSet::new(), &path(2)).unwrap() {
            SpwOutcome::Decomposition(c) => assert_eq!(verify_focused(&g, &VertexSet::new(), &c), Ok(-1)),
            SpwOutcome::Model(_) => panic!("no model can meet an empty root set"),
        }
    }

    #[test]
    fn path_endpoints() {
        let g = path(5);
        let s = set(&[0, 4]);
        match decide_spw(&g, &s, &path(3)).unwrap() {
            SpwOutcome::Decomposition(c) => assert!(verify_focused(&g, &s, &c).unwrap() <= 4),
            SpwOutcome::Model(_) => panic!("|S| < |V(F)|"),
        }
        // pw(P_5, ends) = 1 ≤ 2·2 − 2, so either branch is a correct answer
        match decide_spw(&g, &s, &path(2)).unwrap() {
            SpwOutcome::Decomposition(c) => assert!(verify_focused(&g, &s, &c).unwrap() <= 2),
            SpwOutcome::Model(m) => verify_model(&g, &path(2), &m, &Rooting::Rooted(s)).unwrap(),
        }
    }

    #[test]
    fn ternary_tree_leaves_contain_rooted_star() {
        let g = complete_ternary(4);
        let s: VertexSet = g.vertices().filter(|&v| g.degree(v) == 1).collect();
        match decide_spw(&g, &s, &star(3)).unwrap() {
            SpwOutcome::Model(m) => verify_model(&g, &star(3), &m, &Rooting::Rooted(s)).unwrap(),
            SpwOutcome::Decomposition(_) => panic!("expected a model"),
        }
    }

    #[test]
    fn rejects_non_forest() {
        assert_eq!(decide_spw(&path(3), &set(&[0]), &clique(3)), Err(SpwError::NotForest));
    }

    #[test]
    fn pull_back_identity() {
        let g = path(4);
        let s = g.vertex_set();
        let start = GoodSeparation::trivial(&g);
        let good = add_vertex(&g, &start, 0).unwrap();
        let link = Linkage { paths: vec![vec![0]], x: set(&[0]), y: good.sep.b.clone() };
        let back = pull_back_good(&g, &s, 1, &good, &good.sep, &link).unwrap();
        assert_eq!(back, good);
    }

    #[test]
    fn pull_back_on_six_path() {
        let g = path(6);
        let s = g.vertex_set();
        let mut good = GoodSeparation::trivial(&g);
        for v in 0..5 {
            good = absorb(&g, add_vertex(&g, &good, v).unwrap());
        }
        assert_eq!(good.sep.boundary(), set(&[4]));
        let target = Separation::new(&g, set(&[0, 1]), set(&[1, 2, 3, 4, 5])).unwrap();
        let link = Linkage { paths: vec![vec![1, 2, 3, 4]], x: set(&[1]), y: good.sep.b.clone() };
        let back = pull_back_good(&g, &s, 2, &good, &target, &link).unwrap();
        assert_eq!(back.bags().len(), good.bags().len());
        assert!(back.bags().iter().zip(good.bags()).all(|(a, b)| a.len() <= b.len()));
        assert_eq!(back.bags().last(), Some(&set(&[1])));
    }

    #[test]
    fn grow_on_path_reaches_everything() {
        let g = path(5);
        let s = set(&[0, 4]);
        for w in 1..=2 {
            let out = grow_maximal_good(&g, &s, w, GoodSeparation::trivial(&g)).unwrap();
            verify_good(&g, &s, w, &out).unwrap();
        }
    }

    #[test]
    fn grid_forces_model_branch() {
        let g = grid(4, 4);
        let s = g.vertex_set();
        match decide_spw(&g, &s, &path(2)).unwrap() {
            SpwOutcome::Model(m) => verify_model(&g, &path(2), &m, &Rooting::Rooted(s)).unwrap(),
            SpwOutcome::Decomposition(_) => panic!("pw of the 4x4 grid exceeds 2"),
        }
    }
}
