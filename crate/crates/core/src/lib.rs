//! Pareto hull peeling of planar point sets.
//!
//! A point `x` belongs to the Pareto hull of a finite set `A` (with respect to
//! a norm `φ`) when no alternative location is weakly closer to every point of
//! `A`. Repeatedly removing the boundary of the Pareto hull of the surviving
//! points sorts the set into layers; the per-point layer index is the discrete
//! height function studied by this crate.
//!
//! The crate provides:
//!
//! - [`geometry`]: planar primitives (vectors, cones, convex hulls),
//! - [`norm`]: norm models `φ(x) = max(maxᵢ |⟨aᵢ,x⟩|, c‖x‖₂)` with their
//!   facet-cone decomposition and the effective Hamiltonian `H̄_φ`,
//! - [`hull`]: Pareto-hull interior membership via the cone characterization,
//! - [`peel`]: the peeling engines (Pareto, convex, weak ℓ¹) and the discrete
//!   dynamic-programming verifier,
//! - [`sorting`]: nondominated sorting, longest chains, and cone-order
//!   reductions,
//! - [`sampling`]: seeded Poisson point processes on experiment domains,
//! - [`reference`]: closed-form reference solutions, a Lax-Friedrichs sweeping
//!   solver, and grid residual checks.
//!
//! All numeric routines are generic over the scalar type through
//! [`scalar::Real`]; the aliases below fix `f64`, which is what the CLI and
//! the experiment harness use.

pub mod geometry;
pub mod hull;
pub mod norm;
pub mod peel;
pub mod reference;
pub mod rng;
pub mod sampling;
pub mod scalar;
pub mod sorting;

/// Planar vector over `f64`.
pub type Vec2 = geometry::Vec2<f64>;
/// Proper planar cone over `f64`.
pub type Cone2 = geometry::Cone2<f64>;
/// Distinct planar point set over `f64`.
pub type PointCloud = geometry::PointCloud<f64>;
/// Convex hull classification over `f64`.
pub type ConvexHull = geometry::ConvexHull<f64>;
/// Axis-aligned rectangle over `f64`.
pub type Rect = geometry::Rect<f64>;
/// Norm model over `f64`.
pub type NormModel = norm::NormModel<f64>;
/// One facet cone of an `f64` norm model.
pub type FacetCone = norm::FacetCone<f64>;
/// Experiment domain over `f64`.
pub type Domain = sampling::Domain<f64>;
/// Intensity field over `f64`.
pub type IntensityField = sampling::IntensityField<f64>;
/// Rectangular scalar field over `f64`.
pub type GridField = reference::GridField<f64>;

pub use peel::{PeelResult, RemovalReason};
pub use sorting::DepthResult;
