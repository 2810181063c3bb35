//! Exact lattice computations of centred, packing and spherical density
//! estimates for the Sierpinski gasket.
//!
//! Points of the discrete approximations `A_k` live on an integer lattice, so
//! every squared distance is an integer and every ball mass is an exact count of
//! `3^-k` units. Only the final power `(2d)^s` is evaluated in floating point.

pub mod approx;
pub mod cache;
pub mod centred;
mod cylinders;
pub mod density;
pub mod error;
pub mod grid;
pub mod lattice;
pub mod measure;
pub mod packing;
pub mod report;
pub mod spherical;
pub mod surd;
pub mod sweep;

pub use approx::{cylinder_subset, generate_approx_set, ApproxSet};
pub use error::{GasketError, Result};
pub use lattice::{
    apply_map, sq_distance, ExactPoint, LatticePoint, SimilarityMap, SqDistance, WeightClass, Word,
};
pub use measure::{Mass, Rounding, Value, DIMENSION};
pub use surd::{RadiusWindow, Surd};
