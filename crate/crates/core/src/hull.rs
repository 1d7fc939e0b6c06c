//! Pareto-hull interior membership via the cone characterization.
//!
//! A location `x` is interior to the Pareto hull of `A` iff (i) every flat
//! cone `Q_p` of the norm contains a point of `A` in `x + int(Q_p)`, and (ii)
//! when the unit sphere has round pieces, `x ∈ int(conv(A))`. For polyhedral
//! norms the hull condition is unnecessary; for strictly convex norms the cone
//! conditions are vacuous and the Pareto hull is the convex hull. The infinite
//! halfspace family over the round pieces is replaced by the convex-hull
//! condition exactly; this is the central algorithmic reduction here.

use crate::geometry::{cone_contains, convex_hull_of, PointCloud, Region, Vec2};
use crate::norm::{FacetCone, NormModel};
use crate::scalar::Real;

/// Why a location failed the interior test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureReason {
    /// The flat cone at this facet index contained no point.
    Facet(usize),
    /// The convex-hull condition failed (round pieces only).
    Round,
}

/// Outcome of a membership query. `interior` is true exactly when `failures`
/// is empty; renderers color facet failures blue and round failures red.
#[derive(Clone, Debug)]
pub struct MembershipVerdict {
    pub interior: bool,
    pub failures: Vec<FailureReason>,
}

/// Interior membership of `x` in the Pareto hull of the cloud.
pub fn pareto_membership<T: Real>(
    cloud: &PointCloud<T>,
    x: Vec2<T>,
    model: &NormModel<T>,
) -> MembershipVerdict {
    membership_of_points(cloud.points(), x, model)
}

/// Slice-level membership shared with the peeling and height machinery.
pub fn membership_of_points<T: Real>(
    points: &[Vec2<T>],
    x: Vec2<T>,
    model: &NormModel<T>,
) -> MembershipVerdict {
    let mut failures = Vec::new();
    for (i, fc) in model.facet_cones().iter().enumerate() {
        let cone = fc.flat_cone();
        let hit = points.iter().any(|&a| cone_contains(&cone, a - x, true));
        if !hit {
            failures.push(FailureReason::Facet(i));
        }
    }
    if !model.is_polyhedral() {
        let interior = match convex_hull_of(points) {
            Ok(hull) => hull.classify(x) == Region::Interior,
            Err(_) => false,
        };
        if !interior {
            failures.push(FailureReason::Round);
        }
    }
    MembershipVerdict {
        interior: failures.is_empty(),
        failures,
    }
}

/// Interior membership of `x` in the flattened hull `𝒫_{Q_p}`: requires
/// points of `A` in all four open cones `±int(Q_p)`, `±int(𝒬_p)`.
pub fn flattened_membership<T: Real>(
    cloud: &PointCloud<T>,
    x: Vec2<T>,
    facet: &FacetCone<T>,
) -> bool {
    let flat = facet.flat_cone();
    let facet_cone = facet.facet_cone();
    for cone in [&flat, &flat.negated(), &facet_cone, &facet_cone.negated()] {
        if !cloud
            .points()
            .iter()
            .any(|&a| cone_contains(cone, a - x, true))
        {
            return false;
        }
    }
    true
}

/// What the sampled-definition probe concluded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    /// Some probe location is weakly closer to every point of `A`.
    Refuted,
    /// No probe refuted membership.
    Consistent,
    /// Empty probe budget.
    Inconclusive,
}

/// Samples probe locations `y` (rings plus a grid around `x`, within
/// `radius`) and reports `Refuted` if some `y ≠ x` satisfies
/// `φ(a−y) ≤ φ(a−x)` for every `a ∈ A`. Used to falsify claimed interior
/// verdicts in tests; it can refute membership, never certify it.
pub fn sampled_definition_oracle<T: Real>(
    cloud: &PointCloud<T>,
    x: Vec2<T>,
    model: &NormModel<T>,
    probes: usize,
    radius: T,
) -> OracleOutcome {
    if probes == 0 {
        return OracleOutcome::Inconclusive;
    }
    let beats_x = |y: Vec2<T>| -> bool {
        if (y - x).norm() == T::zero() {
            return false;
        }
        cloud
            .points()
            .iter()
            .all(|&a| model.eval(a - y) <= model.eval(a - x))
    };

    // Ring probes (half the budget).
    let rings = ((probes as f64 / 16.0).sqrt().floor() as usize).max(1);
    let per_ring = (probes / (2 * rings)).max(8);
    for r_idx in 1..=rings {
        let r = radius * T::from_usize(r_idx).unwrap() / T::from_usize(rings).unwrap();
        for k in 0..per_ring {
            let theta = crate::scalar::real::<T>(std::f64::consts::TAU) * T::from_usize(k).unwrap()
                / T::from_usize(per_ring).unwrap();
            let y = x + Vec2::new(theta.cos(), theta.sin()).scale(r);
            if beats_x(y) {
                return OracleOutcome::Refuted;
            }
        }
    }
    // Grid probes (the other half).
    let g = ((probes as f64 / 2.0).sqrt().floor() as usize).max(2);
    for i in 0..g {
        for j in 0..g {
            let fx = T::from_usize(i).unwrap() / T::from_usize(g - 1).unwrap();
            let fy = T::from_usize(j).unwrap() / T::from_usize(g - 1).unwrap();
            let two = T::one() + T::one();
            let y = Vec2::new(
                x.x - radius + two * radius * fx,
                x.y - radius + two * radius * fy,
            );
            if beats_x(y) {
                return OracleOutcome::Refuted;
            }
        }
    }
    OracleOutcome::Consistent
}
