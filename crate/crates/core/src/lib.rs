//! Deterministic approximate counting of edge covers.
//!
//! Graphs may carry dangling edges (one endpoint) and free edges (none) next
//! to ordinary ones. The marginal probability that an edge is left out of a
//! uniformly random edge cover is estimated by a truncated computation tree
//! ([`estimator`]); the cover count is a telescoping product of such marginals
//! ([`counter`]). A brute-force [`oracle`] provides exact counts and rational
//! marginals for checking, and [`cnf`] maps read-twice monotone CNF formulas
//! onto the same machinery.
//!
//! ```
//! use edge_cover::counter::{estimate_count, Accuracy};
//! use edge_cover::graph::Graph;
//!
//! let c4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
//! let approx = estimate_count(&c4, Accuracy::new(0.1).unwrap()).unwrap();
//! assert!((approx.value / 7.0 - 1.0).abs() <= 0.1);
//! ```

pub mod cnf;
pub mod corpus;
pub mod counter;
pub mod estimator;
pub mod graph;
pub mod oracle;
pub mod verify;

pub use counter::{estimate_count, Accuracy, ApproxCount};
pub use estimator::{estimate_marginal, Depth, MarginalEstimate};
pub use graph::{EdgeId, EdgeKind, Graph, VertexId};
pub use oracle::{exact_count, exact_marginal, ExactCount, ExactMarginal};
