//! Stable Lyapunov equations A X + X A* = -B B* with low-rank right-hand
//! sides: a dense solver, the singular-value decay of the solution, and the
//! family of decay bounds built from eigenvalues, the numerical range,
//! pseudospectra, Krylov factorizations, and the numerical abscissa.

pub mod bounds;
pub mod densela;
pub mod error;
pub mod lyap;
pub mod models;
mod par;
pub mod spectral;

pub use error::{Error, Result};
