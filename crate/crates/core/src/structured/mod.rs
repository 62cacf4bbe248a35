//! Schemes for graphic, laminar, low-density, cographic and transversal matroids.

mod chain;
mod density;
mod laminar;
mod transversal;

pub use chain::*;
pub use density::*;
pub use laminar::*;
pub use transversal::*;
