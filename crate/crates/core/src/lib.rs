//! Numerical laboratory for relatively uniformly continuous positive
//! semigroups on finite-dimensional Banach lattices and discretized
//! `L^p` grids.

pub mod error;
pub mod lattice;
pub mod par;
pub mod random;
pub mod ruc;
pub mod schedule;
pub mod uoae;
pub mod uob;
pub mod semigroup;
pub mod spectral;

pub use error::{Error, Result};
