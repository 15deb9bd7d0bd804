//! Exact computations with Q-shaped dg categories of complete resolutions.

pub mod complexes;
pub mod error;
pub mod field;
pub mod linalg;
pub mod presentations;
pub mod modules;
pub mod resolutions;
pub mod dg;
pub mod harness;
