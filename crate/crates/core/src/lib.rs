//! Vortex loops in the plane: closed curves decorated with Morse vorticity
//! densities, their orbit invariants under area-preserving flows, the
//! symplectic form and momentum map on the space of embeddings, and a flow
//! harness that checks conservation numerically.

pub mod circle_forms;
pub mod error;
pub mod flow;
pub mod generate;
pub mod loops;
pub mod quadrature;
pub mod schema;
pub mod symplectic;
pub mod trig;

pub use error::{Error, Result};
