//! Separations, tangles of `(G, S)`, the tangle number and the tree
//! decomposition builder used when no tangle of a given order exists.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::{BudgetExceeded, Clock, OracleBudget};
use crate::decomp::{verify_focused, FocusedCertificate, FocusedInner, TreeDecomposition, VerifyError};
use crate::graph::{Graph, RootedForest, Separation, Vertex, VertexSet};
use crate::oracles::{exact_width_pair, WidthKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TangleError {
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error("order must be at least {0}")]
    OrderTooSmall(usize),
    #[error("set R has {actual} vertices, at most {limit} allowed")]
    RootSetTooLarge { actual: usize, limit: usize },
    #[error("vertex {0} is not a graph vertex")]
    UnknownVertex(Vertex),
    #[error("assembled decomposition is invalid: {0}")]
    Verify(#[from] VerifyError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// A set of oriented separations of order less than `order`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tangle {
    pub order: usize,
    pub oriented: Vec<Separation>,
}

/// First axiom violated by a candidate tangle.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TangleViolation {
    #[error("member is not a separation of order below the tangle order")]
    BadMember(Separation),
    #[error("(T1) separation oriented neither way")]
    Unoriented(Separation),
    #[error("(T2) three small sides cover the graph")]
    Cover(Box<[Separation; 3]>),
    #[error("(T3) small side is the whole vertex set")]
    FullSide(Separation),
    #[error("(T4) small side contains S")]
    ContainsRoots(Separation),
}

/// Bitmask view of a graph on at most 64 vertices.
struct Masks {
    index: BTreeMap<Vertex, usize>,
    full: u64,
    edges: Vec<u64>,
}

impl Masks {
    fn new(g: &Graph) -> Self {
        let order: Vec<Vertex> = g.vertices().collect();
        let index = order.iter().enumerate().map(|(i, &v)| (v, i)).collect::<BTreeMap<_, _>>();
        let full = if order.len() == 64 { u64::MAX } else { (1u64 << order.len()) - 1 };
        let edges = g.edges().iter().map(|(u, v)| (1u64 << index[u]) | (1u64 << index[v])).collect();
        Masks { index, full, edges }
    }

    fn mask(&self, set: &VertexSet) -> u64 {
        set.iter().filter_map(|v| self.index.get(v)).fold(0, |m, &i| m | 1 << i)
    }

    /// Whether `G[a_1] ∪ G[a_2] ∪ G[a_3] = G`.
    fn covers(&self, sides: [u64; 3]) -> bool {
        sides[0] | sides[1] | sides[2] == self.full && self.edges.iter().all(|&e| sides.iter().any(|&s| s & e == e))
    }
}

fn check_size(g: &Graph, budget: &OracleBudget) -> Result<(), TangleError> {
    budget.check_vertices(g.n())?;
    if g.n() > 64 {
        return Err(BudgetExceeded::Vertices { actual: g.n(), limit: 64 }.into());
    }
    Ok(())
}

/// All separations of order at most `max_order`, one per vertex pair
/// `(V(A), V(B))`. Edges inside `V(A) ∩ V(B)` are taken to belong to both sides.
/// Ordered by boundary size, then boundary, then the components placed in `A`.
pub fn enumerate_separations(g: &Graph, max_order: usize, budget: &OracleBudget) -> Result<Vec<Separation>, TangleError> {
    check_size(g, budget)?;
    let mut clock = budget.clock();
    let vs: Vec<Vertex> = g.vertices().collect();
    let mut out = Vec::new();
    for size in 0..=max_order.min(vs.len()) {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let x: VertexSet = combo.iter().map(|&i| vs[i]).collect();
            let comps = g.remove_vertices(&x).components();
            if comps.len() >= 64 {
                return Err(BudgetExceeded::Vertices { actual: comps.len(), limit: 63 }.into());
            }
            for pick in 0u64..1 << comps.len() {
                clock.tick()?;
                let mut a = x.clone();
                let mut b = x.clone();
                for (i, c) in comps.iter().enumerate() {
                    if pick >> i & 1 == 1 { a.extend(c) } else { b.extend(c) }
                }
                out.push(Separation { a, b });
            }
            if !next_combination(&mut combo, vs.len()) {
                break;
            }
        }
    }
    Ok(out)
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Checks (T1)–(T4) for `t` as a tangle of `(g, s)`.
pub fn is_tangle(g: &Graph, s: &VertexSet, t: &Tangle, budget: &OracleBudget) -> Result<Result<(), TangleViolation>, TangleError> {
    let masks = Masks::new(g);
    let mut sides = Vec::new();
    for sep in &t.oriented {
        let valid = Separation::new(g, sep.a.clone(), sep.b.clone()).is_ok();
        if !valid || sep.order() + 1 > t.order {
            return Ok(Err(TangleViolation::BadMember(sep.clone())));
        }
        sides.push(masks.mask(&sep.a));
    }
    let members: std::collections::BTreeSet<(&VertexSet, &VertexSet)> = t.oriented.iter().map(|s| (&s.a, &s.b)).collect();
    for sep in enumerate_separations(g, t.order.saturating_sub(1), budget)? {
        if !members.contains(&(&sep.a, &sep.b)) && !members.contains(&(&sep.b, &sep.a)) {
            return Ok(Err(TangleViolation::Unoriented(sep)));
        }
    }
    let n = sides.len();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                if masks.covers([sides[i], sides[j], sides[k]]) {
                    let w = [t.oriented[i].clone(), t.oriented[j].clone(), t.oriented[k].clone()];
                    return Ok(Err(TangleViolation::Cover(Box::new(w))));
                }
            }
        }
    }
    let sm = masks.mask(s);
    for (sep, &a) in t.oriented.iter().zip(&sides) {
        if a == masks.full {
            return Ok(Err(TangleViolation::FullSide(sep.clone())));
        }
        if sm & a == sm {
            return Ok(Err(TangleViolation::ContainsRoots(sep.clone())));
        }
    }
    Ok(Ok(()))
}

/// Searches for a tangle of `(g, s)` of order exactly `k`.
pub fn find_tangle(g: &Graph, s: &VertexSet, k: usize, budget: &OracleBudget) -> Result<Option<Tangle>, TangleError> {
    if k == 0 {
        return Err(TangleError::OrderTooSmall(1));
    }
    let masks = Masks::new(g);
    let sm = masks.mask(s);
    let mut pairs: Vec<Vec<(u64, Separation)>> = Vec::new();
    for sep in enumerate_separations(g, k - 1, budget)? {
        let (a, b) = (masks.mask(&sep.a), masks.mask(&sep.b));
        if (a, b) > (b, a) {
            continue;
        }
        let mut options = Vec::new();
        for (side, sep) in [(a, sep.clone()), (b, sep.reversed())] {
            let allowed = side != masks.full && sm & side != sm;
            if allowed && !options.iter().any(|(m, _)| *m == side) {
                options.push((side, sep));
            }
        }
        if options.is_empty() {
            return Ok(None);
        }
        options.sort_by_key(|(m, _)| m.count_ones());
        pairs.push(options);
    }
    pairs.sort_by_key(|o| o.len());
    let mut search = TangleSearch { masks: &masks, pairs: &pairs, chosen: Vec::new(), clock: budget.clock() };
    Ok(search.run(0)?.then(|| Tangle { order: k, oriented: search.chosen.iter().map(|&(i, j)| pairs[i][j].1.clone()).collect() }))
}

struct TangleSearch<'a> {
    masks: &'a Masks,
    pairs: &'a [Vec<(u64, Separation)>],
    chosen: Vec<(usize, usize)>,
    clock: Clock,
}

impl TangleSearch<'_> {
    fn side(&self, c: (usize, usize)) -> u64 {
        self.pairs[c.0][c.1].0
    }

    fn run(&mut self, i: usize) -> Result<bool, BudgetExceeded> {
        if i == self.pairs.len() {
            return Ok(true);
        }
        for j in 0..self.pairs[i].len() {
            self.clock.tick()?;
            let m = self.pairs[i][j].0;
            let sides: Vec<u64> = self.chosen.iter().map(|&c| self.side(c)).chain([m]).collect();
            let conflict = sides.iter().enumerate().any(|(p, &a)| sides[p..].iter().any(|&b| self.masks.covers([m, a, b])));
            if conflict {
                continue;
            }
            self.chosen.push((i, j));
            if self.run(i + 1)? {
                return Ok(true);
            }
            self.chosen.pop();
        }
        Ok(false)
    }
}

/// Maximum order of a tangle of `(g, s)`, with a witness; `0` and `None` when
/// there is none.
pub fn tangle_number(g: &Graph, s: &VertexSet, budget: &OracleBudget) -> Result<(usize, Option<Tangle>), TangleError> {
    let mut best = (0, None);
    for k in 1..=g.n() {
        match find_tangle(g, s, k, budget)? {
            Some(t) => best = (k, Some(t)),
            None => break,
        }
    }
    Ok(best)
}

/// Outcome of the tree decomposition builder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeBuild {
    Decomposition(FocusedCertificate),
    Tangle(Tangle),
}

/// Tree decomposition of `(g, s)` of width at most `10k − 12` with a bag
/// containing `r`, or a tangle of `(g, s)` of order `k`.
pub fn build_tree_decomposition(g: &Graph, s: &VertexSet, k: usize, r: &VertexSet, budget: &OracleBudget) -> Result<TreeBuild, TangleError> {
    if k < 2 {
        return Err(TangleError::OrderTooSmall(2));
    }
    if r.len() > 7 * k - 8 {
        return Err(TangleError::RootSetTooLarge { actual: r.len(), limit: 7 * k - 8 });
    }
    if let Some(&v) = s.iter().chain(r).find(|v| !g.contains(**v)) {
        return Err(TangleError::UnknownVertex(v));
    }
    let mut next_id = 0;
    let (host, td) = match build(g, s, k, r, budget, &mut next_id)? {
        Ok(x) => x,
        Err(t) => return Ok(TreeBuild::Tangle(t)),
    };
    let cert = FocusedCertificate::with_attachments(g, host, FocusedInner::Tree(td))?;
    let width = verify_focused(g, s, &cert)?;
    if width > 10 * k as i64 - 12 {
        return Err(TangleError::Internal(format!("width {width} exceeds the bound")));
    }
    Ok(TreeBuild::Decomposition(cert))
}

type Built = Result<(VertexSet, TreeDecomposition), Tangle>;

/// Recursive step; the root bag of the returned decomposition contains `r`.
fn build(g: &Graph, s: &VertexSet, k: usize, r: &VertexSet, budget: &OracleBudget, next_id: &mut u32) -> Result<Built, TangleError> {
    if g.n() <= 10 * k - 11 {
        return Ok(Ok(single(g.vertex_set(), next_id)));
    }
    let mut r = r.clone();
    for v in g.vertices() {
        if r.len() >= 7 * k - 8 {
            break;
        }
        r.insert(v);
    }
    let masks = Masks::new(g);
    let rm = masks.mask(&r);
    let family: Vec<(u64, Separation)> = enumerate_separations(g, k - 1, budget)?
        .into_iter()
        .map(|sep| (masks.mask(&sep.a), sep))
        .filter(|(a, _)| (a & rm).count_ones() as usize <= 4 * k - 5)
        .collect();

    if let Some(triple) = find_cover(&masks, &family) {
        let z: VertexSet = triple.iter().flat_map(|sep| sep.boundary()).collect();
        let mut root_bag: VertexSet = z.union(&r).copied().collect();
        let mut children = Vec::new();
        for c in g.remove_vertices(&z).components() {
            let nc = g.neighborhood(&c);
            let vc: VertexSet = c.union(&nc).copied().collect();
            if vc.len() >= g.n() {
                return Err(TangleError::Internal("piece does not shrink".into()));
            }
            let gc = g.induced(&vc);
            let sc: VertexSet = s.intersection(&vc).copied().collect();
            let rc: VertexSet = nc.union(&c.intersection(&r).copied().collect()).copied().collect();
            match build(&gc, &sc, k, &rc, budget, next_id)? {
                Ok(x) => children.push(x),
                Err(t) => return Ok(Err(t)),
            }
        }
        root_bag.extend(z);
        return Ok(Ok(graft(root_bag, children, next_id)));
    }

    let sm = masks.mask(s);
    if let Some((_, sep)) = family.iter().find(|(a, _)| sm & a == sm) {
        let boundary = sep.boundary();
        let ra: VertexSet = r.intersection(&sep.a).copied().chain(boundary.iter().copied()).collect();
        let ga = g.induced(&sep.a);
        if ga.n() >= g.n() {
            return Err(TangleError::Internal("side does not shrink".into()));
        }
        let child = match build(&ga, s, k, &ra, budget, next_id)? {
            Ok(x) => x,
            Err(t) => return Ok(Err(t)),
        };
        let root_bag: VertexSet = r.union(&boundary).copied().collect();
        return Ok(Ok(graft(root_bag, vec![child], next_id)));
    }

    let tangle = Tangle { order: k, oriented: family.into_iter().map(|(_, sep)| sep).collect() };
    match is_tangle(g, s, &tangle, budget)? {
        Ok(()) => Ok(Err(tangle)),
        Err(v) => Err(TangleError::Internal(format!("candidate family fails an axiom that cannot fail: {v}"))),
    }
}

fn find_cover<'a>(masks: &Masks, family: &'a [(u64, Separation)]) -> Option<[&'a Separation; 3]> {
    let n = family.len();
    for i in 0..n {
        for j in i..n {
            for l in j..n {
                if masks.covers([family[i].0, family[j].0, family[l].0]) {
                    return Some([&family[i].1, &family[j].1, &family[l].1]);
                }
            }
        }
    }
    None
}

fn single(bag: VertexSet, next_id: &mut u32) -> (VertexSet, TreeDecomposition) {
    let id = *next_id;
    *next_id += 1;
    let mut tree = RootedForest::new();
    tree.add_node(id, None);
    (bag.clone(), TreeDecomposition { tree, bags: BTreeMap::from([(id, bag)]) })
}

/// New root bag with the given decompositions hung below it.
fn graft(root_bag: VertexSet, children: Vec<(VertexSet, TreeDecomposition)>, next_id: &mut u32) -> (VertexSet, TreeDecomposition) {
    let (mut host, mut td) = single(root_bag, next_id);
    let root = td.tree.roots()[0];
    for (h, child) in children {
        host.extend(h);
        let child_root = child.tree.roots()[0];
        td.tree = td.tree.union(&child.tree);
        td.tree.set_parent(child_root, Some(root));
        td.bags.extend(child.bags);
    }
    (host, td)
}

/// Whether membership depends only on vertex sets and exactly one orientation
/// of each separation of order below `t.order` is present.
pub fn orientation_is_consistent(g: &Graph, t: &Tangle, budget: &OracleBudget) -> Result<bool, TangleError> {
    let members: std::collections::BTreeSet<(&VertexSet, &VertexSet)> = t.oriented.iter().map(|s| (&s.a, &s.b)).collect();
    for sep in enumerate_separations(g, t.order.saturating_sub(1), budget)? {
        let fwd = members.contains(&(&sep.a, &sep.b));
        let back = members.contains(&(&sep.b, &sep.a));
        if fwd == back {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Both sides of the tangle/treewidth duality for one pair `(G, S)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub tangle_number: usize,
    pub treewidth: i64,
    pub lower_holds: bool,
    pub upper_holds: bool,
    pub orientation_consistent: bool,
}

impl DualityReport {
    pub fn holds(&self) -> bool {
        self.lower_holds && self.upper_holds && self.orientation_consistent
    }
}

/// Checks `tn(G,S) − 1 ≤ tw(G,S) ≤ 10·max{tn(G,S), 2} − 12` with exact values,
/// and that the witness tangle orients each separation exactly once.
pub fn check_duality(g: &Graph, s: &VertexSet, budget: &OracleBudget) -> Result<DualityReport, TangleError> {
    let (tn, witness) = tangle_number(g, s, budget)?;
    let tw = exact_width_pair(g, s, WidthKind::Tw, budget)?;
    let orientation_consistent = match &witness {
        Some(t) => orientation_is_consistent(g, t, budget)?,
        None => true,
    };
    Ok(DualityReport {
        tangle_number: tn,
        treewidth: tw,
        lower_holds: tn as i64 - 1 <= tw,
        upper_holds: tw <= 10 * tn.max(2) as i64 - 12,
        orientation_consistent,
    })
}
