//! Deterministic quadrature on spheres and intervals, plus seeded sampling.

mod line;
mod sampler;
mod sphere;

pub use line::{
    gauss_gegenbauer, gauss_legendre, integrate_adaptive, integrate_piecewise, AdaptiveResult,
    LineRule,
};
pub use sampler::Sampler;
pub use sphere::{default_level, integrate_sphere, sphere_rule, RuleDescriptor, SphereRule};
