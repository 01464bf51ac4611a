//! Structural analysis of graph-product von Neumann algebras from graph data
//! and vertex metadata, plus numerical checks on truncated Fock spaces.

pub mod caps;
pub mod classify;
pub mod cli;
pub mod coxeter;
pub mod error;
pub mod fock;
pub mod graph;
pub mod tristate;
pub mod vset;

pub use error::{Error, Result};
pub use graph::SimpleGraph;
pub use tristate::{Truth, Verdict};
pub use vset::VertexSet;

/// Version string embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
