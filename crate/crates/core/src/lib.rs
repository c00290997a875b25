//! Focused width parameters of a graph relative to a vertex set, with
//! certifying win/win algorithms, layered decompositions, tangles and
//! Erdős–Pósa dichotomies.

pub mod graph;
pub mod budget;
pub mod decomp;
pub mod menger;
pub mod minors;
pub mod spw;
pub mod td;
pub mod layered;
pub mod tangles;
pub mod oracles;
pub mod ep;
pub mod constructions;
pub mod fuzz;
pub mod cli;

pub use graph::{Graph, GraphError, Linkage, RootedForest, Separation, Vertex, VertexSet};
