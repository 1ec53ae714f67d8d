//! Magnetic tight-binding operators on Z^2.
//!
//! The crate builds magnetic fields and vector potentials, realizes magnetic
//! translations and Harper Hamiltonians as banded lattice operators, and
//! computes the topological pairings of the constant-field and interface
//! algebras: Chern numbers (Brillouin zone and real space), the Power-Rieffel
//! projection, interface winding numbers and the bulk-interface duality.

pub mod error;
pub mod fields;
pub mod geometry;
pub mod interface;
pub mod lattice;
pub mod linalg;
pub mod nctorus;

pub use error::{Error, Result};
pub use geometry::{Boundary, LatticeDomain, Rect, Site};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
