//! Nodal integral-affine spheres from smooth Fano polytopes.
//!
//! The crate builds the boundary of a smooth reflexive 3-polytope as an
//! integral-affine sphere with nodes (the Gross–Siebert sphere), builds the
//! almost-toric base `A_t` by nodal blow-ups along a time vector, and
//! certifies that the two agree after a sequence of nodal slides.

pub mod atlas;
pub mod catalog;
pub mod certify;
pub mod config;
pub mod error;
pub mod lattice;
pub mod pipeline;
pub mod polygon;
pub mod render;
pub mod surgery;
pub mod toric;

pub use error::{Error, Result};
pub use lattice::Rat;
