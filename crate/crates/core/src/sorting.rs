//! Nondominated sorting, longest chains, and cone-order reductions.
//!
//! Chains are strict throughout: `y` precedes `x` when both coordinates are
//! strictly smaller, matching the open-cone semantics of the peeling DPP.
//! Ties are handled by sort keys rather than perturbation.

use crate::geometry::{Cone2, GeometryError, PointCloud, Vec2};
use crate::scalar::{to_f64, Real};

/// Per-point depth of nondominated sorting: `depth(a)` is one plus the length
/// of the longest strict chain ending strictly below `a` (so nondominated
/// points have depth 1).
#[derive(Clone, Debug)]
pub struct DepthResult {
    pub depth: Vec<u32>,
}

impl DepthResult {
    pub fn max_depth(&self) -> u32 {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    /// CSV serialization: `x1,x2,depth`.
    pub fn to_csv<T: Real>(&self, cloud: &PointCloud<T>) -> String {
        let mut out = String::from("x1,x2,depth\n");
        for (i, p) in cloud.points().iter().enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                to_f64(p.x),
                to_f64(p.y),
                self.depth[i]
            ));
        }
        out
    }
}

/// Length of the longest strictly increasing chain under the componentwise
/// order. Sort on `x` (ties broken by descending `y` to enforce strictness),
/// then longest strictly increasing subsequence in `y`.
pub fn longest_chain<T: Real>(cloud: &PointCloud<T>) -> usize {
    let pts = cloud.points();
    let mut order: Vec<u32> = (0..pts.len() as u32).collect();
    order.sort_unstable_by(|&i, &j| {
        let (a, b) = (pts[i as usize], pts[j as usize]);
        a.x.partial_cmp(&b.x)
            .unwrap()
            .then(b.y.partial_cmp(&a.y).unwrap())
    });
    let mut tails: Vec<T> = Vec::new();
    for &i in &order {
        let y = pts[i as usize].y;
        let pos = tails.partition_point(|&t| t < y);
        if pos == tails.len() {
            tails.push(y);
        } else {
            tails[pos] = y;
        }
    }
    tails.len()
}

/// Fenwick tree over ranks holding prefix maxima.
struct PrefixMax {
    tree: Vec<u32>,
}

impl PrefixMax {
    fn new(n: usize) -> Self {
        Self {
            tree: vec![0; n + 1],
        }
    }

    /// Max over ranks `0..rank` (exclusive); 0 when empty.
    fn query(&self, rank: usize) -> u32 {
        let mut i = rank;
        let mut best = 0;
        while i > 0 {
            best = best.max(self.tree[i]);
            i -= i & i.wrapping_neg();
        }
        best
    }

    fn update(&mut self, rank: usize, value: u32) {
        let mut i = rank + 1;
        while i < self.tree.len() {
            self.tree[i] = self.tree[i].max(value);
            i += i & i.wrapping_neg();
        }
    }
}

fn rank_strictly_below<T: Real>(sorted: &[T], y: T) -> usize {
    sorted.partition_point(|&t| t < y)
}

/// Per-point nondominated-sorting depth via a sweep in `x` order with a
/// prefix-maximum structure over `y` ranks. `O(n log n)`.
pub fn nds_depth<T: Real>(cloud: &PointCloud<T>) -> DepthResult {
    let pts = cloud.points();
    let n = pts.len();
    let mut ys: Vec<T> = pts.iter().map(|p| p.y).collect();
    ys.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    ys.dedup();

    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_unstable_by(|&i, &j| {
        let (a, b) = (pts[i as usize], pts[j as usize]);
        a.x.partial_cmp(&b.x)
            .unwrap()
            .then(a.y.partial_cmp(&b.y).unwrap())
    });

    let mut depth = vec![0u32; n];
    let mut fenwick = PrefixMax::new(ys.len());
    let mut k = 0;
    while k < order.len() {
        // Points sharing an x coordinate must not see each other.
        let mut group_end = k + 1;
        let x = pts[order[k] as usize].x;
        while group_end < order.len() && pts[order[group_end] as usize].x == x {
            group_end += 1;
        }
        for &i in &order[k..group_end] {
            let y = pts[i as usize].y;
            depth[i as usize] = 1 + fenwick.query(rank_strictly_below(&ys, y));
        }
        for &i in &order[k..group_end] {
            let y = pts[i as usize].y;
            let rank = ys.partition_point(|&t| t < y);
            fenwick.update(rank, depth[i as usize]);
        }
        k = group_end;
    }
    DepthResult { depth }
}

/// Depth of the sorting at an arbitrary location: the longest strict chain in
/// the open lower-left quadrant of `x` (0 when the quadrant is empty).
pub fn depth_at<T: Real>(cloud: &PointCloud<T>, depths: &DepthResult, x: Vec2<T>) -> u32 {
    cloud
        .points()
        .iter()
        .zip(&depths.depth)
        .filter(|(p, _)| p.x < x.x && p.y < x.y)
        .map(|(_, &d)| d)
        .max()
        .unwrap_or(0)
}

/// Applies the order-isomorphism `L_Q` (the inverse of the basis matrix
/// `[w v]`): `x ≤_Q y ⇔ L_Q(x) ≤ L_Q(y)` componentwise.
pub fn q_transform<T: Real>(
    cloud: &PointCloud<T>,
    cone: &Cone2<T>,
) -> Result<PointCloud<T>, GeometryError> {
    let transformed = cloud.points().iter().map(|&z| q_map(cone, z)).collect();
    PointCloud::new(transformed)
}

/// `L_Q(z)` for a single point: solves `a·w + b·v = z`.
#[inline]
pub fn q_map<T: Real>(cone: &Cone2<T>, z: Vec2<T>) -> Vec2<T> {
    let det = cone.span_cross();
    Vec2::new(z.cross(cone.v()) / det, cone.w().cross(z) / det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    type V = Vec2<f64>;

    fn v(x: f64, y: f64) -> V {
        Vec2::new(x, y)
    }

    fn cloud(pts: Vec<V>) -> PointCloud<f64> {
        PointCloud::new(pts).unwrap()
    }

    fn random_cloud(rng: &mut CounterRng, n: usize) -> PointCloud<f64> {
        cloud(
            (0..n)
                .map(|_| v(rng.next_range(-1.0, 1.0), rng.next_range(-1.0, 1.0)))
                .collect(),
        )
    }

    /// O(n²) pairwise DP over the strict componentwise order.
    fn dp_depths(pts: &[V]) -> Vec<u32> {
        let n = pts.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            pts[i]
                .x
                .partial_cmp(&pts[j].x)
                .unwrap()
                .then(pts[i].y.partial_cmp(&pts[j].y).unwrap())
        });
        let mut depth = vec![1u32; n];
        for (k, &i) in order.iter().enumerate() {
            for &j in &order[..k] {
                if pts[j].x < pts[i].x && pts[j].y < pts[i].y {
                    depth[i] = depth[i].max(depth[j] + 1);
                }
            }
        }
        depth
    }

    #[test]
    fn chain_of_seven() {
        let c = cloud((1..=7).map(|i| v(i as f64, i as f64)).collect());
        assert_eq!(longest_chain(&c), 7);
    }

    #[test]
    fn antichain_of_seven() {
        let c = cloud((1..=7).map(|i| v(i as f64, -(i as f64))).collect());
        assert_eq!(longest_chain(&c), 1);
    }

    #[test]
    fn chain_matches_quadratic_dp() {
        let mut rng = CounterRng::new(61, 0);
        for rep in 0..50 {
            let c = random_cloud(&mut rng, 12);
            let dp = *dp_depths(c.points()).iter().max().unwrap() as usize;
            assert_eq!(longest_chain(&c), dp, "rep {rep}");
        }
    }

    #[test]
    fn chain_handles_ties_strictly() {
        // Equal x or equal y cannot extend a strict chain.
        let c = cloud(vec![v(0.0, 0.0), v(0.0, 1.0), v(1.0, 1.0), v(1.0, 2.0)]);
        assert_eq!(longest_chain(&c), 2);
    }

    #[test]
    fn depth_chain_and_antichain() {
        let c = cloud((1..=5).map(|i| v(i as f64, i as f64)).collect());
        assert_eq!(nds_depth(&c).depth, vec![1, 2, 3, 4, 5]);
        let a = cloud((1..=5).map(|i| v(i as f64, -(i as f64))).collect());
        assert_eq!(nds_depth(&a).depth, vec![1; 5]);
    }

    #[test]
    fn depth_matches_quadratic_dp() {
        let mut rng = CounterRng::new(67, 0);
        for rep in 0..10 {
            let c = random_cloud(&mut rng, 200);
            assert_eq!(nds_depth(&c).depth, dp_depths(c.points()), "rep {rep}");
        }
        // And with heavy ties on a lattice.
        let c = cloud(
            (0..6)
                .flat_map(|i| (0..6).map(move |j| v(i as f64, j as f64)))
                .collect::<Vec<_>>(),
        );
        assert_eq!(nds_depth(&c).depth, dp_depths(c.points()));
    }

    #[test]
    fn max_depth_equals_longest_chain() {
        let mut rng = CounterRng::new(71, 0);
        for _ in 0..20 {
            let c = random_cloud(&mut rng, 300);
            assert_eq!(nds_depth(&c).max_depth() as usize, longest_chain(&c));
        }
    }

    #[test]
    fn depth_at_locations() {
        let c = cloud((1..=5).map(|i| v(i as f64, i as f64)).collect());
        let d = nds_depth(&c);
        assert_eq!(depth_at(&c, &d, v(10.0, 10.0)), 5);
        assert_eq!(depth_at(&c, &d, v(3.5, 3.5)), 3);
        assert_eq!(depth_at(&c, &d, v(1.0, 1.0)), 0); // open quadrant
        assert_eq!(depth_at(&c, &d, v(0.0, 0.0)), 0);
    }

    #[test]
    fn q_transform_standard_quadrant_is_identity() {
        let q = Cone2::new(v(1.0, 0.0), v(0.0, 1.0)).unwrap();
        let c = cloud(vec![v(0.3, -0.7), v(2.0, 5.0)]);
        let t = q_transform(&c, &q).unwrap();
        for (a, b) in c.points().iter().zip(t.points()) {
            assert!((*a - *b).norm() < 1e-15);
        }
    }

    #[test]
    fn q_transform_linf_lower_cone() {
        let s = 1.0 / 2.0_f64.sqrt();
        let q = Cone2::new(v(-s, -s), v(s, -s)).unwrap();
        let mapped = q_map(&q, v(0.0, -1.0));
        assert!((mapped.x - s).abs() < 1e-12);
        assert!((mapped.y - s).abs() < 1e-12);
    }

    #[test]
    fn q_transform_is_order_isomorphism() {
        let mut rng = CounterRng::new(73, 0);
        let mut checked = 0;
        while checked < 1000 {
            let w = v(rng.next_range(-1.0, 1.0), rng.next_range(-1.0, 1.0));
            let u = v(rng.next_range(-1.0, 1.0), rng.next_range(-1.0, 1.0));
            let Ok(cone) = Cone2::new(w, u) else { continue };
            let x = v(rng.next_range(-2.0, 2.0), rng.next_range(-2.0, 2.0));
            let y = v(rng.next_range(-2.0, 2.0), rng.next_range(-2.0, 2.0));
            // x ≤_Q y ⇔ y − x ∈ Q ⇔ L(y) − L(x) ≥ 0 componentwise.
            let d = y - x;
            let in_cone = crate::geometry::cone_contains(&cone, d, false) && d.norm() > 1e-9;
            let (lx, ly) = (q_map(&cone, x), q_map(&cone, y));
            let le = ly.x >= lx.x - 1e-9 && ly.y >= lx.y - 1e-9;
            if in_cone {
                assert!(le);
            }
            let strictly = ly.x > lx.x + 1e-9 && ly.y > lx.y + 1e-9;
            if strictly {
                assert!(crate::geometry::cone_contains(&cone, d, true));
            }
            checked += 1;
        }
    }

    #[test]
    fn q_transform_operator_norm() {
        // ‖L_Q‖ = (1 − |⟨v,w⟩|)^{−1/2}, against the largest singular value.
        let mut rng = CounterRng::new(79, 0);
        let mut checked = 0;
        while checked < 100 {
            let w = v(rng.next_range(-1.0, 1.0), rng.next_range(-1.0, 1.0));
            let u = v(rng.next_range(-1.0, 1.0), rng.next_range(-1.0, 1.0));
            let Ok(cone) = Cone2::new(w, u) else { continue };
            // Rows of L_Q from images of the basis vectors.
            let c1 = q_map(&cone, v(1.0, 0.0));
            let c2 = q_map(&cone, v(0.0, 1.0));
            // Largest singular value of [[c1.x, c2.x], [c1.y, c2.y]].
            let (a, b, c, d) = (c1.x, c2.x, c1.y, c2.y);
            let t = a * a + b * b + c * c + d * d;
            let det = a * d - b * c;
            let s = ((t + (t * t - 4.0 * det * det).max(0.0).sqrt()) / 2.0).sqrt();
            let closed = (1.0 - cone.v().dot(cone.w()).abs()).powf(-0.5);
            assert!((s - closed).abs() < 1e-9 * closed, "{s} vs {closed}");
            checked += 1;
        }
    }
}
