//! Mutual planar duality and graph self-duality for biconnected planar
//! multigraphs.
//!
//! The decision procedures go through SPQR-trees: the SPQR-tree of one
//! graph is dualized skeleton by skeleton, and two trees represent the same
//! set of duals exactly when their skeleton graphs are isomorphic. A
//! brute-force embedding enumerator in [`oracle`] serves as ground truth.

pub mod budget;
pub mod cli;
pub mod dual_spqr;
pub mod duality;
pub mod format;
pub mod graph;
pub mod hardness;
pub mod iso;
pub mod oracle;
pub mod planarity;
pub mod spqr;

pub use budget::{Budget, BudgetExceeded};
pub use graph::{Dart, EdgeId, FaceSet, GraphError, Multigraph, RotationSystem, VertexId};
