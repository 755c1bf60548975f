//! Exact integral cohomology of semidirect products `Z^n x| G` for finite
//! `G ⊂ GL_n(Z)`, together with the orbifold invariants of `T^n / G` that
//! follow from it.
//!
//! Two independent routes compute `H^k(Z^n x| G, Z)`:
//!
//! * [`cohomology::e2_assembly`] sums `H^i(G, Λ^j M*)` along anti-diagonals;
//! * [`cohomology::total_complex_cohomology`] builds the cochain complex of
//!   `P ⊗ F` from a certified compatible action on the Koszul resolution `F`.
//!
//! Their agreement is checked by [`cohomology::collapse_verify`].

pub mod cohomology;
pub mod compat;
pub mod error;
pub mod group;
pub mod laurent;
pub mod lattice;
pub mod resolution;
pub mod linalg;
pub mod models;
pub mod orbifold;

pub use error::{Error, Result};
