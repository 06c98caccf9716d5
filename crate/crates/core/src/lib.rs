//! Meteor graphs and their shift equivalence.
//!
//! The crate covers finite directed multigraphs and Williams' state-splitting
//! moves, the graph monoid and the talented monoid, leaf sets and
//! Archimedean classes, and a complete decision procedure for shift
//! equivalence of meteor graphs together with replayable move witnesses.
//! Brute-force matrix searches in [`dynamics`] serve as independent oracles.

pub mod dynamics;
pub mod exec;
pub mod gen;
pub mod graph;
pub mod matrix;
pub mod meteor;
pub mod monoid;
pub mod moves;
pub mod talented;

pub use graph::{Cycle, Edge, EdgeId, Graph, GraphError, VertexId};
pub use matrix::{IntMatrix, MatrixError};
