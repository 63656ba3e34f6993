//! Exact engine for tropical series on compact convex domains: weighted
//! distance functions, wave (shrinking) operators and their closures,
//! corner-locus subdivisions with mildness checks, the perturbed flow, and
//! avalanche experiments.

pub mod domain;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod lattice;
pub mod perturb;
pub mod render;
pub mod scalar;
pub mod scene;
pub mod series;
pub mod subdivision;

pub use error::{Error, Result};
pub use lattice::{lattice_ball, LatticeVector};
pub use scalar::{Mode, Scalar};
