//! Exact maximum weight independent set solver built on weighted data
//! reductions, a clique cover upper bound, and iterated local search.

pub mod bounds;
pub mod cli;
pub mod flow;
pub mod generate;
pub mod graph;
pub mod io;
pub mod local_search;
pub mod oracle;
pub mod reduce;
pub mod solution;
pub mod solver;

pub use graph::{GraphError, Vertex, Weight, WeightedGraph};
pub use solution::{CertificateError, Solution};
