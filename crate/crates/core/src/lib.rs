//! Relaxed projection methods onto affine subspaces, polyhedra and the
//! epigraph of `exp`, with tools for studying their trajectories.

pub mod batch;
pub mod corpus;
pub mod decomposition;
pub mod error;
pub mod faces;
pub mod geometry;
pub mod iteration;
pub mod projectors;
pub mod scalar_reflect;

pub use error::{Error, Result};
pub use geometry::{AffineSubspace, Halfspace, Polyhedron, Tolerances, Vector};
pub use projectors::{RelaxedProjector, Target};
