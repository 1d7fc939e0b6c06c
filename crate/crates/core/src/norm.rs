//! Planar norm models and their boundary-facet structure.
//!
//! A norm is represented as `φ(x) = max(maxᵢ |⟨aᵢ, x⟩|, c·‖x‖₂)` with
//! functionals `aᵢ` and Euclidean weight `c ≥ 0`. This family covers ℓ¹, ℓ∞,
//! regular k-gons, and the mixed facet-plus-arc norms used throughout the
//! experiments, while keeping facet extraction a finite half-plane/disk
//! intersection.
//!
//! The unit ball is `B = ∩ᵢ {|⟨aᵢ,x⟩| ≤ 1} ∩ {‖x‖ ≤ 1/c}`. Each functional
//! whose constraint is active along a segment of positive length contributes a
//! boundary facet; the residual circular pieces are recorded as arcs. A facet
//! with dual corner `p` carries the extremal unit directions `(v, w)` of its
//! flat cone `Q_p = {a·w + b·v | a, b ≥ 0}` with `w × v > 0`, the facet cone
//! being `cone{v, −w}`, and the dual basis `(v*, w*)`.
//!
//! The effective Hamiltonian is
//! `H̄_φ(ξ) = max(0, max_p ⟨ξ,v_p⟩⟨ξ,w_p⟩ / |v_p × w_p|)`.

use crate::geometry::{Cone2, Vec2, EPS_GEO};
use crate::scalar::{real, Real};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Minimum facet (and arc) extent; shorter segments count as touching points.
pub const FACET_MIN_LENGTH: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum NormError {
    #[error("unit ball is unbounded: need euclidean weight > 0 or two independent functionals")]
    UnboundedBall,
    #[error("functionals must be finite and nonzero")]
    BadFunctional,
    #[error("euclidean weight must be finite and nonnegative")]
    BadEuclideanWeight,
    #[error("unknown norm preset `{0}`")]
    UnknownPreset(String),
    #[error("k-gon preset requires an even k ≥ 4, got `{0}`")]
    BadKgon(String),
    #[error("invalid norm specification: {0}")]
    Json(#[from] serde_json::Error),
}

/// One corner `p` of the dual sphere together with its facet data.
#[derive(Clone, Debug)]
pub struct FacetCone<T> {
    /// Dual corner, scaled so `φ*(p) = 1`.
    pub dual_corner: Vec2<T>,
    /// Extremal unit directions of the flat cone, `w × v > 0`.
    pub v: Vec2<T>,
    pub w: Vec2<T>,
    /// Dual basis: `⟨v*,v⟩ = ⟨w*,w⟩ = 1`, `⟨v*,w⟩ = ⟨w*,v⟩ = 0`.
    pub v_star: Vec2<T>,
    pub w_star: Vec2<T>,
    /// Facet endpoints on `{φ = 1}`, counterclockwise.
    pub endpoints: [Vec2<T>; 2],
}

impl<T: Real> FacetCone<T> {
    /// The flat cone `Q_p = cone{w, v}`.
    pub fn flat_cone(&self) -> Cone2<T> {
        Cone2::new(self.w, self.v).expect("facet cone stores a proper basis")
    }

    /// The facet cone `𝒬_p = cone{v, −w}` generated by the facet itself.
    pub fn facet_cone(&self) -> Cone2<T> {
        Cone2::new(self.v, -self.w).expect("facet cone stores a proper basis")
    }

    /// Quadratic Hamiltonian term `⟨ξ,v⟩⟨ξ,w⟩ / |v × w|`.
    pub fn hamiltonian_term(&self, xi: Vec2<T>) -> T {
        xi.dot(self.v) * xi.dot(self.w) / self.v.cross(self.w).abs()
    }
}

/// A planar norm with its derived facet structure.
#[derive(Clone, Debug)]
pub struct NormModel<T> {
    functionals: Vec<Vec2<T>>,
    euclidean_weight: T,
    facet_cones: Vec<FacetCone<T>>,
    /// Angle intervals `(start, end)` on the circle of radius `1/c`, with
    /// `start < end ≤ start + 2π`.
    arcs: Vec<(T, T)>,
}

/// JSON form of a norm: `{"functionals": [[a,b],...], "euclidean_weight": c}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormSpec {
    pub functionals: Vec<[f64; 2]>,
    pub euclidean_weight: f64,
}

impl<T: Real> NormModel<T> {
    pub fn functionals(&self) -> &[Vec2<T>] {
        &self.functionals
    }

    pub fn euclidean_weight(&self) -> T {
        self.euclidean_weight
    }

    pub fn facet_cones(&self) -> &[FacetCone<T>] {
        &self.facet_cones
    }

    pub fn arcs(&self) -> &[(T, T)] {
        &self.arcs
    }

    /// Polyhedral means the unit sphere has no round pieces.
    pub fn is_polyhedral(&self) -> bool {
        self.arcs.is_empty()
    }

    /// `φ(x)` by the direct max formula.
    pub fn eval(&self, x: Vec2<T>) -> T {
        let mut m = self.euclidean_weight * x.norm();
        for a in &self.functionals {
            m = m.max(a.dot(x).abs());
        }
        m
    }

    /// `φ*(ξ)`: the support function of the unit ball, evaluated over facet
    /// endpoints, arc endpoints, and the arc-optimal point `ξ/(c‖ξ‖)` when its
    /// angle falls inside an arc.
    pub fn dual_eval(&self, xi: Vec2<T>) -> T {
        let mut m = T::zero();
        for fc in &self.facet_cones {
            m = m.max(xi.dot(fc.endpoints[0]));
            m = m.max(xi.dot(fc.endpoints[1]));
        }
        if !self.arcs.is_empty() {
            let r = T::one() / self.euclidean_weight;
            for &(a0, a1) in &self.arcs {
                m = m.max(xi.dot(Vec2::new(a0.cos(), a0.sin()).scale(r)));
                m = m.max(xi.dot(Vec2::new(a1.cos(), a1.sin()).scale(r)));
            }
            let norm = xi.norm();
            if norm > T::zero() && self.angle_in_arcs(xi.angle()) {
                m = m.max(r * norm);
            }
        }
        m
    }

    fn angle_in_arcs(&self, theta: T) -> bool {
        let two_pi = real::<T>(std::f64::consts::TAU);
        let eps = real::<T>(1e-12);
        for &(a0, a1) in &self.arcs {
            // Intervals may extend past 2π; test θ and θ + 2π.
            let mut t = theta;
            while t < a0 - eps {
                t = t + two_pi;
            }
            if t <= a1 + eps {
                return true;
            }
        }
        false
    }

    /// Effective Hamiltonian `H̄_φ(ξ) = max(0, max_p ⟨ξ,v⟩⟨ξ,w⟩/|v×w|)`.
    pub fn hamiltonian(&self, xi: Vec2<T>) -> T {
        let mut h = T::zero();
        for fc in &self.facet_cones {
            h = h.max(fc.hamiltonian_term(xi));
        }
        h
    }

    /// A direction is degenerate when `H̄_φ(ξ) = 0`; `ξ = 0` counts as
    /// degenerate.
    pub fn degenerate_direction(&self, xi: Vec2<T>) -> bool {
        self.hamiltonian(xi) == T::zero()
    }
}

/// Canonical sign: first nonzero component positive.
fn canonical_sign<T: Real>(a: Vec2<T>) -> Vec2<T> {
    if a.x < T::zero() || (a.x == T::zero() && a.y < T::zero()) {
        -a
    } else {
        a
    }
}

/// Constructs the norm `φ(x) = max(maxᵢ |⟨aᵢ,x⟩|, c‖x‖₂)` and extracts its
/// facet decomposition.
pub fn build_norm<T: Real>(
    functionals: Vec<Vec2<T>>,
    euclidean_weight: T,
) -> Result<NormModel<T>, NormError> {
    let eps = real::<T>(EPS_GEO);
    if !euclidean_weight.is_finite() || euclidean_weight < T::zero() {
        return Err(NormError::BadEuclideanWeight);
    }
    for a in &functionals {
        if !a.is_finite() || a.norm() <= eps {
            return Err(NormError::BadFunctional);
        }
    }

    // Deduplicate modulo sign.
    let mut canon: Vec<Vec2<T>> = Vec::new();
    for a in functionals {
        let a = canonical_sign(a);
        if !canon.iter().any(|b| (*b - a).norm() <= eps) {
            canon.push(a);
        }
    }

    let c = euclidean_weight;
    let bounded = c > eps
        || canon
            .iter()
            .enumerate()
            .any(|(i, a)| canon.iter().skip(i + 1).any(|b| a.cross(*b).abs() > eps));
    if !bounded {
        return Err(NormError::UnboundedBall);
    }

    // All signed constraints ⟨q, x⟩ ≤ 1.
    let signed: Vec<Vec2<T>> = canon.iter().flat_map(|&a| [a, -a]).collect();
    let radius = if c > eps { Some(T::one() / c) } else { None };
    let min_len = real::<T>(FACET_MIN_LENGTH);

    let mut facet_cones: Vec<FacetCone<T>> = Vec::new();
    for (qi, &p) in signed.iter().enumerate() {
        // Segment of {⟨p, x⟩ = 1} inside all other constraints, parametrized
        // as x(t) = p/‖p‖² + t·p̂⊥ (increasing t runs counterclockwise along
        // the boundary).
        let x0 = p.scale(T::one() / p.norm_sq());
        let dir = p.perp().scale(T::one() / p.norm());
        let mut t_lo = T::neg_infinity();
        let mut t_hi = T::infinity();
        for (qj, &q) in signed.iter().enumerate() {
            if qi == qj {
                continue;
            }
            let slope = q.dot(dir);
            let off = q.dot(x0);
            if slope.abs() <= eps {
                if off > T::one() + eps {
                    t_lo = T::infinity();
                    break;
                }
                continue;
            }
            let bound = (T::one() - off) / slope;
            if slope > T::zero() {
                t_hi = t_hi.min(bound);
            } else {
                t_lo = t_lo.max(bound);
            }
        }
        if let Some(r) = radius {
            let slack = r * r - x0.norm_sq();
            if slack < T::zero() {
                continue;
            }
            let half = slack.sqrt();
            t_lo = t_lo.max(-half);
            t_hi = t_hi.min(half);
        }
        if !(t_hi - t_lo).is_finite() || t_hi - t_lo < min_len {
            continue;
        }
        let e_start = x0 + dir.scale(t_lo);
        let e_end = x0 + dir.scale(t_hi);
        let v = e_start.unit();
        let w = -e_end.unit();
        let wxv = w.cross(v);
        let v_star = w.perp().scale(T::one() / wxv);
        let w_star = v.perp().scale(-T::one() / wxv);
        facet_cones.push(FacetCone {
            dual_corner: p,
            v,
            w,
            v_star,
            w_star,
            endpoints: [e_start, e_end],
        });
    }
    facet_cones.sort_by(|a, b| {
        a.dual_corner
            .angle()
            .partial_cmp(&b.dual_corner.angle())
            .unwrap()
    });

    let arcs = if let Some(r) = radius {
        circle_arcs(&signed, r, &facet_cones)
    } else {
        Vec::new()
    };

    Ok(NormModel {
        functionals: canon,
        euclidean_weight,
        facet_cones,
        arcs,
    })
}

/// The subset of the circle of radius `r` satisfying all constraints,
/// as merged angle intervals.
fn circle_arcs<T: Real>(signed: &[Vec2<T>], r: T, facet_cones: &[FacetCone<T>]) -> Vec<(T, T)> {
    let two_pi = real::<T>(std::f64::consts::TAU);
    let min_len = real::<T>(FACET_MIN_LENGTH);
    // Excluded open intervals (θq − β, θq + β) where ⟨q, r·u(θ)⟩ > 1.
    let mut excluded: Vec<(T, T)> = Vec::new();
    for &q in signed {
        let reach = q.norm() * r;
        if reach <= T::one() {
            continue;
        }
        let beta = (T::one() / reach).acos();
        let theta = q.angle();
        let (lo, hi) = (theta - beta, theta + beta);
        // Normalize into [0, 2π), splitting on wrap.
        let mut lo_n = lo % two_pi;
        if lo_n < T::zero() {
            lo_n = lo_n + two_pi;
        }
        let span = hi - lo;
        if lo_n + span <= two_pi {
            excluded.push((lo_n, lo_n + span));
        } else {
            excluded.push((lo_n, two_pi));
            excluded.push((T::zero(), lo_n + span - two_pi));
        }
    }
    if excluded.is_empty() {
        // No functional reaches the circle: the whole circle is boundary.
        debug_assert!(facet_cones.is_empty());
        return vec![(T::zero(), two_pi)];
    }
    excluded.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut merged: Vec<(T, T)> = Vec::new();
    for iv in excluded {
        match merged.last_mut() {
            Some(last) if iv.0 <= last.1 => last.1 = last.1.max(iv.1),
            _ => merged.push(iv),
        }
    }
    let mut arcs: Vec<(T, T)> = Vec::new();
    for k in 0..merged.len() {
        let gap_start = merged[k].1;
        let gap_end = if k + 1 < merged.len() {
            merged[k + 1].0
        } else {
            merged[0].0 + two_pi
        };
        if gap_end - gap_start > min_len {
            arcs.push((gap_start, gap_end));
        }
    }
    arcs
}

/// Parses a norm from its JSON representation.
pub fn norm_from_json<T: Real>(json: &str) -> Result<NormModel<T>, NormError> {
    let spec: NormSpec = serde_json::from_str(json)?;
    norm_from_spec(&spec)
}

/// Builds a norm from a parsed [`NormSpec`].
pub fn norm_from_spec<T: Real>(spec: &NormSpec) -> Result<NormModel<T>, NormError> {
    let functionals = spec
        .functionals
        .iter()
        .map(|&[a, b]| Vec2::new(real::<T>(a), real::<T>(b)))
        .collect();
    build_norm(functionals, real::<T>(spec.euclidean_weight))
}

/// Canonical named presets.
///
/// - `l1`: `|x₁| + |x₂|` as `max(|x₁+x₂|, |x₁−x₂|)`,
/// - `linf`: `max(|x₁|, |x₂|)`,
/// - `kgon:<k>`: regular k-gon ball with vertices on the unit circle (k even),
/// - `mixed-example`: `max(|x₁−x₂|, ‖x‖₂)`,
/// - `counterexample`: `max(√2|x₁|, ‖x‖₂)`,
/// - `euclidean`: `‖x‖₂`.
pub fn norm_preset<T: Real>(name: &str) -> Result<NormModel<T>, NormError> {
    let v2 = |a: f64, b: f64| Vec2::new(real::<T>(a), real::<T>(b));
    match name {
        "l1" => build_norm(vec![v2(1.0, 1.0), v2(1.0, -1.0)], T::zero()),
        "linf" => build_norm(vec![v2(1.0, 0.0), v2(0.0, 1.0)], T::zero()),
        "mixed-example" => build_norm(vec![v2(1.0, -1.0)], T::one()),
        "counterexample" => build_norm(vec![v2(std::f64::consts::SQRT_2, 0.0)], T::one()),
        "euclidean" => build_norm(vec![], T::one()),
        _ => {
            if let Some(kstr) = name.strip_prefix("kgon:") {
                let k: usize = kstr
                    .parse()
                    .map_err(|_| NormError::BadKgon(kstr.to_string()))?;
                if k < 4 || !k.is_multiple_of(2) {
                    return Err(NormError::BadKgon(kstr.to_string()));
                }
                // Edge j joins the unit-circle vertices at angles 2πj/k and
                // 2π(j+1)/k; its outward normal supports the ball at cos(π/k).
                let mut functionals = Vec::with_capacity(k / 2);
                for j in 0..k / 2 {
                    let theta = std::f64::consts::TAU * (j as f64 + 0.5) / k as f64;
                    let scale = 1.0 / (std::f64::consts::PI / k as f64).cos();
                    functionals.push(v2(theta.cos() * scale, theta.sin() * scale));
                }
                build_norm(functionals, T::zero())
            } else {
                Err(NormError::UnknownPreset(name.to_string()))
            }
        }
    }
}
