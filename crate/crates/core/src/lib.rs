//! Exact solver, preprocessing and gadget generators for the Robust Green
//! Bridges Placement problem.

pub mod connectivity;
pub mod error;
pub mod habitat_graph;
pub mod io;
mod local;
pub mod model;
pub mod preprocess;
pub mod reductions;
pub mod solver;

pub use error::{Error, ModelError, ParseError, Result};
pub use model::{EdgeId, Graph, Habitat, Instance, Mode, Solution, Status, Vertex};
