//! Numerical convex geometry around polar bodies and the Santaló point.
//!
//! The crate evaluates polar-body volumes `|K^x|` by three independent
//! routes, locates the Santaló point, and exposes the Santaló regions
//! `S(K, t) = {x ∈ K : |K||K^x| / v_n² ≤ t}` through membership, radial
//! and volume queries. Around these sit convex floating bodies, Binet
//! ellipsoids, and an affine-surface-area estimator built from region
//! volumes.
//!
//! Dimensions `2 ≤ n ≤ 6` are supported. All bodies are immutable and every
//! randomized computation takes an explicit seed.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asa;
pub mod bodies;
pub mod error;
pub mod floating;
pub mod linalg;
pub mod polar;
pub mod quadrature;
pub mod santalo;
pub mod special;

pub use bodies::{BodySpec, ConvexBody, Direction, Estimate, McConfig, SectionProfile};
pub use error::{GeomError, Result};
pub use quadrature::{LineRule, Sampler, SphereRule};
pub use special::unit_ball_volume;

/// Smallest supported dimension.
pub const MIN_DIM: usize = 2;
/// Largest supported dimension.
pub const MAX_DIM: usize = 6;

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(GeomError::UnsupportedDimension(n))
    }
}
