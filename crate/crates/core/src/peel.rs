//! Peeling engines: Pareto hull peeling with height function and reason tags,
//! weakly-efficient ℓ¹ peeling, convex hull peeling, and the discrete
//! dynamic-programming verifier.
//!
//! Each round removes, from the surviving set, every point that is not in the
//! interior of the Pareto hull of the survivors. The flat-cone tests run in
//! `O(m)` per cone per round after one global sort in `L_Q` coordinates: a
//! point fails cone `Q_p` exactly when no other survivor strictly dominates
//! it in those coordinates, so the failing points are the strictly
//! undominated frontier. The convex-hull condition is recomputed per round
//! from survivors; points on hull edges count as boundary.

use crate::geometry::{PointCloud, Rect, Vec2};
use crate::hull::membership_of_points;
use crate::norm::NormModel;
use crate::scalar::{real, to_f64, Real};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PeelError {
    #[error("the discrete DPP verifier requires a polyhedral norm (no arcs)")]
    NonPolyhedralNorm,
    #[error("peel result does not match the cloud size")]
    SizeMismatch,
}

/// Why a point was removed (first recorded failure; facet failures take
/// priority over the convex-hull failure for reporting).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RemovalReason {
    /// Failed the flat-cone test at this facet index. Weak ℓ¹ peeling reuses
    /// the variant with the rectangle side index (0 x-min, 1 x-max, 2 y-min,
    /// 3 y-max).
    Facet(u32),
    /// Failed the convex-hull interior condition.
    ConvexHull,
    /// Reserved for locations outside the first hull; the peeling engines
    /// never produce it for sample points.
    InitialExterior,
}

impl RemovalReason {
    pub fn label(&self) -> String {
        match self {
            RemovalReason::Facet(i) => format!("facet:{i}"),
            RemovalReason::ConvexHull => "hull".to_string(),
            RemovalReason::InitialExterior => "exterior".to_string(),
        }
    }
}

/// Per-point layer index (the height-function value at each sample point),
/// removal reason, and total layer count.
#[derive(Clone, Debug)]
pub struct PeelResult {
    pub layer: Vec<u32>,
    pub reason: Vec<RemovalReason>,
    pub layers: u32,
}

impl PeelResult {
    pub fn max_layer(&self) -> u32 {
        self.layers.saturating_sub(1)
    }

    /// CSV serialization: `x1,x2,layer,reason`.
    pub fn to_csv<T: Real>(&self, cloud: &PointCloud<T>) -> String {
        let mut out = String::from("x1,x2,layer,reason\n");
        for (i, p) in cloud.points().iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                to_f64(p.x),
                to_f64(p.y),
                self.layer[i],
                self.reason[i].label()
            ));
        }
        out
    }
}

/// Shared round loop: flat-cone frontier tests plus (for norms with round
/// pieces) the convex-hull boundary test.
fn peel_engine<T: Real>(points: &[Vec2<T>], model: Option<&NormModel<T>>) -> PeelResult {
    let n = points.len();
    let mut layer = vec![0u32; n];
    let mut reason = vec![RemovalReason::ConvexHull; n];
    if n == 0 {
        return PeelResult {
            layer,
            reason,
            layers: 0,
        };
    }

    type ConeBasis<T> = (Vec2<T>, Vec2<T>);
    let (cones, use_hull): (Vec<ConeBasis<T>>, bool) = match model {
        Some(m) => (
            m.facet_cones().iter().map(|fc| (fc.w, fc.v)).collect(),
            !m.is_polyhedral(),
        ),
        None => (Vec::new(), true),
    };
    let use_hull = use_hull || cones.is_empty();

    // L_Q coordinates per cone, and survivor orders sorted by (a desc, b desc).
    let mut coords: Vec<Vec<(T, T)>> = Vec::with_capacity(cones.len());
    let mut orders: Vec<Vec<u32>> = Vec::with_capacity(cones.len());
    for &(w, v) in &cones {
        let det = w.cross(v);
        let cs: Vec<(T, T)> = points
            .iter()
            .map(|&z| (z.cross(v) / det, w.cross(z) / det))
            .collect();
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_unstable_by(|&i, &j| {
            let (a, b) = (cs[i as usize], cs[j as usize]);
            b.0.partial_cmp(&a.0)
                .unwrap()
                .then(b.1.partial_cmp(&a.1).unwrap())
        });
        coords.push(cs);
        orders.push(order);
    }
    let mut xsorted: Vec<u32> = Vec::new();
    if use_hull {
        xsorted = (0..n as u32).collect();
        xsorted.sort_unstable_by(|&i, &j| {
            let (a, b) = (points[i as usize], points[j as usize]);
            a.x.partial_cmp(&b.x)
                .unwrap()
                .then(a.y.partial_cmp(&b.y).unwrap())
        });
    }

    let mut mark_round = vec![u32::MAX; n];
    let mut remaining = n;
    let mut round: u32 = 0;
    let mut scratch: Vec<Vec2<T>> = Vec::new();
    while remaining > 0 {
        let mut removed = 0usize;
        // A survivor fails cone p iff no other survivor strictly dominates it
        // in L_{Q_p} coordinates.
        for (ci, order) in orders.iter().enumerate() {
            let cs = &coords[ci];
            let mut best_b = T::neg_infinity();
            let mut k = 0;
            while k < order.len() {
                let a = cs[order[k] as usize].0;
                let mut end = k + 1;
                while end < order.len() && cs[order[end] as usize].0 == a {
                    end += 1;
                }
                let mut group_max = T::neg_infinity();
                for &i in &order[k..end] {
                    let b = cs[i as usize].1;
                    group_max = group_max.max(b);
                    if best_b <= b && mark_round[i as usize] != round {
                        mark_round[i as usize] = round;
                        reason[i as usize] = RemovalReason::Facet(ci as u32);
                        layer[i as usize] = round;
                        removed += 1;
                    }
                }
                best_b = best_b.max(group_max);
                k = end;
            }
        }
        if use_hull {
            scratch.clear();
            scratch.extend(xsorted.iter().map(|&i| points[i as usize]));
            for local in boundary_of_sorted(&scratch) {
                let i = xsorted[local] as usize;
                if mark_round[i] != round {
                    mark_round[i] = round;
                    reason[i] = RemovalReason::ConvexHull;
                    layer[i] = round;
                    removed += 1;
                }
            }
        }

        for order in orders.iter_mut() {
            order.retain(|&i| mark_round[i as usize] != round);
        }
        if use_hull {
            xsorted.retain(|&i| mark_round[i as usize] != round);
        }
        assert!(removed > 0, "peeling round removed no points");
        remaining -= removed;
        round += 1;
    }

    PeelResult {
        layer,
        reason,
        layers: round,
    }
}

/// Local indices (into the sorted slice) of all points on the convex-hull
/// boundary, including points interior to hull edges. Inclusive monotone
/// chain over lexicographically sorted distinct points.
fn boundary_of_sorted<T: Real>(sorted_points: &[Vec2<T>]) -> Vec<usize> {
    let n = sorted_points.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let eps = real::<T>(crate::geometry::EPS_GEO);
    let mut out: Vec<usize> = Vec::new();
    let mut chain: Vec<usize> = Vec::new();
    {
        for i in 0..n {
            while chain.len() >= 2 {
                let o = sorted_points[chain[chain.len() - 2]];
                let a = sorted_points[chain[chain.len() - 1]];
                let p = sorted_points[i];
                if (a - o).cross(p - o) < -eps {
                    chain.pop();
                } else {
                    break;
                }
            }
            chain.push(i);
        }
        out.extend_from_slice(&chain);
    }
    chain.clear();
    for i in (0..n).rev() {
        while chain.len() >= 2 {
            let o = sorted_points[chain[chain.len() - 2]];
            let a = sorted_points[chain[chain.len() - 1]];
            let p = sorted_points[i];
            if (a - o).cross(p - o) < -eps {
                chain.pop();
            } else {
                break;
            }
        }
        chain.push(i);
    }
    out.extend_from_slice(&chain);
    out.sort_unstable();
    out.dedup();
    out
}

/// Pareto hull peeling of the cloud under the given norm.
pub fn peel<T: Real>(cloud: &PointCloud<T>, model: &NormModel<T>) -> PeelResult {
    peel_engine(cloud.points(), Some(model))
}

/// Classical convex-hull onion peeling: each round removes every point on the
/// hull boundary of the survivors.
pub fn convex_peel<T: Real>(cloud: &PointCloud<T>) -> PeelResult {
    peel_engine(cloud.points(), None)
}

/// Weakly-efficient ℓ¹ peeling: each round removes the points on the boundary
/// of the current bounding rectangle (attaining a min or max in either
/// coordinate). Returns the per-round rectangles alongside the layers.
pub fn weak_l1_peel_full<T: Real>(cloud: &PointCloud<T>) -> (PeelResult, Vec<Rect<T>>) {
    let points = cloud.points();
    let n = points.len();
    let mut layer = vec![0u32; n];
    let mut reason = vec![RemovalReason::Facet(0); n];
    let mut rects: Vec<Rect<T>> = Vec::new();
    if n == 0 {
        return (
            PeelResult {
                layer,
                reason,
                layers: 0,
            },
            rects,
        );
    }

    let mut by_x: Vec<u32> = (0..n as u32).collect();
    by_x.sort_unstable_by(|&i, &j| {
        points[i as usize]
            .x
            .partial_cmp(&points[j as usize].x)
            .unwrap()
    });
    let mut by_y: Vec<u32> = (0..n as u32).collect();
    by_y.sort_unstable_by(|&i, &j| {
        points[i as usize]
            .y
            .partial_cmp(&points[j as usize].y)
            .unwrap()
    });

    let mut alive = vec![true; n];
    let (mut xlo, mut xhi) = (0usize, n - 1);
    let (mut ylo, mut yhi) = (0usize, n - 1);
    let mut remaining = n;
    let mut round: u32 = 0;
    while remaining > 0 {
        while !alive[by_x[xlo] as usize] {
            xlo += 1;
        }
        while !alive[by_x[xhi] as usize] {
            xhi -= 1;
        }
        while !alive[by_y[ylo] as usize] {
            ylo += 1;
        }
        while !alive[by_y[yhi] as usize] {
            yhi -= 1;
        }
        let xmin = points[by_x[xlo] as usize].x;
        let xmax = points[by_x[xhi] as usize].x;
        let ymin = points[by_y[ylo] as usize].y;
        let ymax = points[by_y[yhi] as usize].y;
        rects.push(Rect {
            xmin,
            xmax,
            ymin,
            ymax,
        });

        let mut removed = 0usize;
        let mut take = |i: usize, side: u32, alive: &mut [bool]| {
            if alive[i] {
                alive[i] = false;
                layer[i] = round;
                reason[i] = RemovalReason::Facet(side);
                removed += 1;
            }
        };
        let mut k = xlo;
        while k < n && points[by_x[k] as usize].x == xmin {
            take(by_x[k] as usize, 0, &mut alive);
            k += 1;
        }
        let mut k = xhi as i64;
        while k >= 0 && points[by_x[k as usize] as usize].x == xmax {
            take(by_x[k as usize] as usize, 1, &mut alive);
            k -= 1;
        }
        let mut k = ylo;
        while k < n && points[by_y[k] as usize].y == ymin {
            take(by_y[k] as usize, 2, &mut alive);
            k += 1;
        }
        let mut k = yhi as i64;
        while k >= 0 && points[by_y[k as usize] as usize].y == ymax {
            take(by_y[k as usize] as usize, 3, &mut alive);
            k -= 1;
        }
        debug_assert!(removed > 0);
        remaining -= removed;
        round += 1;
    }
    (
        PeelResult {
            layer,
            reason,
            layers: round,
        },
        rects,
    )
}

/// Weakly-efficient ℓ¹ peeling (layers only).
pub fn weak_l1_peel<T: Real>(cloud: &PointCloud<T>) -> PeelResult {
    weak_l1_peel_full(cloud).0
}

/// Height of the weak peeling at an arbitrary location: the number of nested
/// open bounding rectangles containing it.
pub fn weak_height_at<T: Real>(rects: &[Rect<T>], x: Vec2<T>) -> u32 {
    // Rectangles are nested, so binary-search the first that excludes x.
    let mut lo = 0usize;
    let mut hi = rects.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        if rects[mid].contains_interior(x) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo as u32
}

/// Precomputed survivor prefixes for height queries: indices sorted by layer
/// descending, plus the count of points with layer ≥ k for each k.
pub struct HeightProfile {
    sorted_by_layer: Vec<u32>,
    count_ge: Vec<usize>,
    layers: u32,
}

impl HeightProfile {
    pub fn new(pr: &PeelResult) -> Self {
        let n = pr.layer.len();
        let mut sorted: Vec<u32> = (0..n as u32).collect();
        sorted.sort_unstable_by(|&i, &j| pr.layer[j as usize].cmp(&pr.layer[i as usize]));
        let layers = pr.layers;
        let mut count_ge = vec![0usize; layers as usize + 1];
        for &l in &pr.layer {
            count_ge[l as usize] += 1;
        }
        // Suffix sums: count_ge[k] = #{layer ≥ k}.
        for k in (0..layers as usize).rev() {
            count_ge[k] += count_ge[k + 1];
        }
        HeightProfile {
            sorted_by_layer: sorted,
            count_ge,
            layers,
        }
    }

    /// Indices of the survivors entering round `k` (layer ≥ k).
    pub fn survivors(&self, k: u32) -> &[u32] {
        let cnt = if (k as usize) < self.count_ge.len() {
            self.count_ge[k as usize]
        } else {
            0
        };
        &self.sorted_by_layer[..cnt]
    }

    /// Height `u_A(x)`: the number of nested open peel interiors containing
    /// `x`, found by binary search over the nested layers.
    pub fn height_at<T: Real>(
        &self,
        cloud: &PointCloud<T>,
        model: &NormModel<T>,
        x: Vec2<T>,
        scratch: &mut Vec<Vec2<T>>,
    ) -> u32 {
        let mut inside = |k: u32| -> bool {
            // x ∈ int(E_k) ⇔ x interior to the Pareto hull of A_{k−1}.
            scratch.clear();
            scratch.extend(self.survivors(k - 1).iter().map(|&i| cloud.get(i as usize)));
            membership_of_points(scratch, x, model).interior
        };
        if self.layers == 0 || !inside(1) {
            return 0;
        }
        let mut lo = 1u32; // greatest k with inside(k) true
        let mut hi = self.layers;
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if inside(mid) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        lo
    }
}

/// Height of the peeling at an arbitrary location.
pub fn height_at<T: Real>(
    pr: &PeelResult,
    cloud: &PointCloud<T>,
    model: &NormModel<T>,
    x: Vec2<T>,
) -> u32 {
    let profile = HeightProfile::new(pr);
    let mut scratch = Vec::new();
    profile.height_at(cloud, model, x, &mut scratch)
}

/// Verifies the discrete dynamic programming principle for polyhedral norms:
/// for every sample `a`, the layer must equal
/// `min_p [0 if A ∩ (a + int Q_p) = ∅ else 1 + max layer over that set]`.
/// Returns the maximum absolute discrepancy (0 = pass).
pub fn dpp_check<T: Real>(
    pr: &PeelResult,
    cloud: &PointCloud<T>,
    model: &NormModel<T>,
) -> Result<u32, PeelError> {
    if !model.is_polyhedral() {
        return Err(PeelError::NonPolyhedralNorm);
    }
    if pr.layer.len() != cloud.len() {
        return Err(PeelError::SizeMismatch);
    }
    let points = cloud.points();
    let cones: Vec<(Vec2<T>, Vec2<T>)> =
        model.facet_cones().iter().map(|fc| (fc.w, fc.v)).collect();
    let mut worst = 0u32;
    for (i, &a) in points.iter().enumerate() {
        let mut best = u32::MAX;
        for &(w, v) in &cones {
            let mut cone_val = 0u32;
            for (j, &y) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let d = y - a;
                // Strict containment in cone{w, v}; exact comparisons match
                // the strict-dominance semantics of the peeling frontier.
                if w.cross(d) > T::zero() && d.cross(v) > T::zero() {
                    cone_val = cone_val.max(pr.layer[j] + 1);
                }
            }
            best = best.min(cone_val);
        }
        let best = if best == u32::MAX { 0 } else { best };
        worst = worst.max(best.abs_diff(pr.layer[i]));
    }
    Ok(worst)
}
