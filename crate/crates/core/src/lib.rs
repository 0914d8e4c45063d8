//! Reeb graphs of piecewise-linear functions, Reeb quotient maps, fiber
//! products and limits of zigzag diagrams, and certified upper bounds for the
//! universal edit distance between Reeb graphs.

pub mod category;
pub mod cells;
pub mod complex;
pub mod edit;
pub mod error;
pub mod generate;
pub mod graph;
pub mod io;
pub mod map;
pub mod metrics;
pub mod reeb;
pub mod scalar;

pub use cells::{interval_preimage_components, level_components, CellComplex};
pub use complex::{validate_complex, PLFunction, SimplicialComplex};
pub use error::{Error, Result};
pub use graph::{graph_isomorphic, GraphPoint, Path, ReebGraph};
pub use map::{Certificate, Map, Violation};
pub use reeb::{compute_reeb, reeb_of_cells, reeb_of_graph};
pub use scalar::Scalar;
