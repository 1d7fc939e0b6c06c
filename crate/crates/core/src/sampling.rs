//! Poisson point processes on experiment domains, with reproducible seeded
//! streams, plus a domain-level Pareto-efficiency diagnostic.
//!
//! Sampling is by thinning: a homogeneous process of intensity `n·max f` on
//! the bounding box is drawn (the count from exponential interarrivals, so it
//! is exactly Poisson), and each candidate is kept with probability
//! `f(x)/max f` when it lies in the domain. The result is a Poisson process
//! of intensity `n·f·1_domain`. Every draw comes from the counter-based
//! generator in [`crate::rng`], so a `(seed)` fully determines the cloud.

use crate::geometry::{
    cone_contains, convex_hull_of, GeometryError, PointCloud, Rect, Region, Vec2,
};
use crate::hull::pareto_membership;
use crate::norm::NormModel;
use crate::rng::CounterRng;
use crate::scalar::{real, to_f64, Real};
use thiserror::Error;

/// Consecutive-rejection budget before sampling reports a degenerate setup.
pub const MAX_CONSECUTIVE_REJECTIONS: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("domain construction failed: {0}")]
    Geometry(#[from] GeometryError),
    #[error("domain must have positive area")]
    ZeroArea,
    #[error("convex polygon domain needs at least 3 counterclockwise vertices")]
    BadPolygon,
    #[error("rectilinear union must be connected through positive-length adjacencies")]
    DisconnectedUnion,
    #[error("intensity must be strictly positive and finite")]
    BadIntensity,
    #[error("exceeded {MAX_CONSECUTIVE_REJECTIONS} consecutive rejections; degenerate domain or intensity")]
    RejectionBudget,
    #[error("intensity scale n must be positive")]
    BadScale,
    #[error("efficiency probe requires resolution ≥ 8")]
    ProbeTooCoarse,
}

/// Experiment domain shapes.
#[derive(Clone, Debug)]
pub enum DomainShape<T> {
    Rectangle(Rect<T>),
    ConvexPolygonShape(Vec<Vec2<T>>),
    RectilinearUnion(Vec<Rect<T>>),
}

/// A bounded open domain with positive area.
#[derive(Clone, Debug)]
pub struct Domain<T> {
    shape: DomainShape<T>,
    bbox: Rect<T>,
}

impl<T: Real> Domain<T> {
    pub fn rectangle(rect: Rect<T>) -> Self {
        Self {
            shape: DomainShape::Rectangle(rect),
            bbox: rect,
        }
    }

    /// Counterclockwise strictly convex vertex list.
    pub fn convex_polygon(vertices: Vec<Vec2<T>>) -> Result<Self, SamplingError> {
        if vertices.len() < 3 {
            return Err(SamplingError::BadPolygon);
        }
        let n = vertices.len();
        for k in 0..n {
            let (o, a, b) = (vertices[k], vertices[(k + 1) % n], vertices[(k + 2) % n]);
            if (a - o).cross(b - o) <= T::zero() {
                return Err(SamplingError::BadPolygon);
            }
        }
        let bbox = bbox_of(&vertices)?;
        Ok(Self {
            shape: DomainShape::ConvexPolygonShape(vertices),
            bbox,
        })
    }

    /// Union of axis-aligned rectangles, connected through shared boundary
    /// pieces of positive length (corner-touching does not connect).
    pub fn rectilinear(rects: Vec<Rect<T>>) -> Result<Self, SamplingError> {
        if rects.is_empty() {
            return Err(SamplingError::ZeroArea);
        }
        let adjacent = |a: &Rect<T>, b: &Rect<T>| -> bool {
            let xo = a.xmax.min(b.xmax) - a.xmin.max(b.xmin);
            let yo = a.ymax.min(b.ymax) - a.ymin.max(b.ymin);
            (xo >= T::zero() && yo > T::zero()) || (xo > T::zero() && yo >= T::zero())
        };
        let mut reached = vec![false; rects.len()];
        let mut stack = vec![0usize];
        reached[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..rects.len() {
                if !reached[j] && adjacent(&rects[i], &rects[j]) {
                    reached[j] = true;
                    stack.push(j);
                }
            }
        }
        if !reached.iter().all(|&r| r) {
            return Err(SamplingError::DisconnectedUnion);
        }
        let corners: Vec<Vec2<T>> = rects
            .iter()
            .flat_map(|r| [Vec2::new(r.xmin, r.ymin), Vec2::new(r.xmax, r.ymax)])
            .collect();
        let bbox = bbox_of(&corners)?;
        Ok(Self {
            shape: DomainShape::RectilinearUnion(rects),
            bbox,
        })
    }

    pub fn bounding_box(&self) -> Rect<T> {
        self.bbox
    }

    pub fn shape(&self) -> &DomainShape<T> {
        &self.shape
    }

    /// Closed containment (with a 1e-12 edge tolerance for polygons, so that
    /// interpolated boundary samples classify as contained).
    pub fn contains(&self, p: Vec2<T>) -> bool {
        let eps = real::<T>(1e-12);
        match &self.shape {
            DomainShape::Rectangle(r) => r.contains(p),
            DomainShape::ConvexPolygonShape(verts) => {
                let n = verts.len();
                (0..n).all(|k| (verts[(k + 1) % n] - verts[k]).cross(p - verts[k]) >= -eps)
            }
            DomainShape::RectilinearUnion(rects) => rects.iter().any(|r| r.contains(p)),
        }
    }

    /// Strict interior containment (for the rectilinear union, via small
    /// diagonal probes, which characterize interiority for axis-aligned sets).
    pub fn contains_interior(&self, p: Vec2<T>) -> bool {
        let eps = real::<T>(1e-12);
        match &self.shape {
            DomainShape::Rectangle(r) => r.contains_interior(p),
            DomainShape::ConvexPolygonShape(verts) => {
                let n = verts.len();
                (0..n).all(|k| (verts[(k + 1) % n] - verts[k]).cross(p - verts[k]) > eps)
            }
            DomainShape::RectilinearUnion(_) => {
                let d = real::<T>(1e-9) * (self.bbox.width().max(self.bbox.height()));
                [(d, d), (d, -d), (-d, d), (-d, -d)]
                    .into_iter()
                    .all(|(dx, dy)| self.contains(Vec2::new(p.x + dx, p.y + dy)))
            }
        }
    }

    /// Area of the domain.
    pub fn area(&self) -> T {
        match &self.shape {
            DomainShape::Rectangle(r) => r.area(),
            DomainShape::ConvexPolygonShape(verts) => {
                let n = verts.len();
                let two = T::one() + T::one();
                let mut acc = T::zero();
                for k in 0..n {
                    acc = acc + verts[k].cross(verts[(k + 1) % n]);
                }
                acc / two
            }
            DomainShape::RectilinearUnion(rects) => {
                // Coordinate-compressed cell cover handles overlaps exactly.
                let mut xs: Vec<T> = rects.iter().flat_map(|r| [r.xmin, r.xmax]).collect();
                let mut ys: Vec<T> = rects.iter().flat_map(|r| [r.ymin, r.ymax]).collect();
                xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
                xs.dedup();
                ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
                ys.dedup();
                let two = T::one() + T::one();
                let mut acc = T::zero();
                for i in 0..xs.len() - 1 {
                    for j in 0..ys.len() - 1 {
                        let cx = (xs[i] + xs[i + 1]) / two;
                        let cy = (ys[j] + ys[j + 1]) / two;
                        if rects.iter().any(|r| r.contains(Vec2::new(cx, cy))) {
                            acc = acc + (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
                        }
                    }
                }
                acc
            }
        }
    }
}

fn bbox_of<T: Real>(points: &[Vec2<T>]) -> Result<Rect<T>, SamplingError> {
    let mut xmin = T::infinity();
    let mut xmax = T::neg_infinity();
    let mut ymin = T::infinity();
    let mut ymax = T::neg_infinity();
    for p in points {
        xmin = xmin.min(p.x);
        xmax = xmax.max(p.x);
        ymin = ymin.min(p.y);
        ymax = ymax.max(p.y);
    }
    Rect::new(xmin, xmax, ymin, ymax).map_err(SamplingError::Geometry)
}

/// Bilinear interpolation grid over a rectangle.
#[derive(Clone, Debug)]
pub struct BilinearGrid<T> {
    pub rect: Rect<T>,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<T>,
}

/// Strictly positive, bounded intensity.
#[derive(Clone, Debug)]
pub enum IntensityField<T> {
    Constant(T),
    BilinearGrid(BilinearGrid<T>),
}

impl<T: Real> IntensityField<T> {
    pub fn constant(v: T) -> Result<Self, SamplingError> {
        if !v.is_finite() || v <= T::zero() {
            return Err(SamplingError::BadIntensity);
        }
        Ok(IntensityField::Constant(v))
    }

    pub fn bilinear(grid: BilinearGrid<T>) -> Result<Self, SamplingError> {
        if grid.nx < 2 || grid.ny < 2 || grid.values.len() != grid.nx * grid.ny {
            return Err(SamplingError::BadIntensity);
        }
        if grid
            .values
            .iter()
            .any(|v| !v.is_finite() || *v <= T::zero())
        {
            return Err(SamplingError::BadIntensity);
        }
        Ok(IntensityField::BilinearGrid(grid))
    }

    pub fn eval(&self, p: Vec2<T>) -> T {
        match self {
            IntensityField::Constant(v) => *v,
            IntensityField::BilinearGrid(g) => {
                let fx = ((p.x - g.rect.xmin) / g.rect.width() * T::from_usize(g.nx - 1).unwrap())
                    .max(T::zero())
                    .min(T::from_usize(g.nx - 1).unwrap());
                let fy = ((p.y - g.rect.ymin) / g.rect.height() * T::from_usize(g.ny - 1).unwrap())
                    .max(T::zero())
                    .min(T::from_usize(g.ny - 1).unwrap());
                let i = fx.floor().to_usize().unwrap().min(g.nx - 2);
                let j = fy.floor().to_usize().unwrap().min(g.ny - 2);
                let tx = fx - T::from_usize(i).unwrap();
                let ty = fy - T::from_usize(j).unwrap();
                let at = |i: usize, j: usize| g.values[j * g.nx + i];
                let one = T::one();
                at(i, j) * (one - tx) * (one - ty)
                    + at(i + 1, j) * tx * (one - ty)
                    + at(i, j + 1) * (one - tx) * ty
                    + at(i + 1, j + 1) * tx * ty
            }
        }
    }

    /// Upper bound of the field (attained at a node for bilinear grids).
    pub fn max_value(&self) -> T {
        match self {
            IntensityField::Constant(v) => *v,
            IntensityField::BilinearGrid(g) => {
                g.values.iter().copied().fold(T::zero(), |a, b| a.max(b))
            }
        }
    }
}

/// Samples a Poisson process of intensity `n·f` restricted to the domain.
/// The cloud is fully determined by `seed`; exact coordinate collisions are
/// resampled to keep points distinct.
pub fn sample_poisson<T: Real>(
    domain: &Domain<T>,
    intensity: &IntensityField<T>,
    n: f64,
    seed: u64,
) -> Result<PointCloud<T>, SamplingError> {
    if n.is_nan() || n <= 0.0 {
        return Err(SamplingError::BadScale);
    }
    let bbox = domain.bounding_box();
    let bbox_area = to_f64(bbox.area());
    let domain_area = to_f64(domain.area());
    if bbox_area <= 0.0 || domain_area <= 0.0 || bbox_area.is_nan() || domain_area.is_nan() {
        return Err(SamplingError::ZeroArea);
    }
    let fmax = intensity.max_value();
    let lambda = n * to_f64(fmax) * bbox_area;
    let mut rng = CounterRng::new(seed, 0);

    // Exponential interarrivals give an exactly Poisson candidate count.
    let mut count = 0u64;
    let mut acc = 0.0f64;
    loop {
        acc += rng.next_exp();
        if acc > lambda {
            break;
        }
        count += 1;
    }

    let (xmin, ymin) = (to_f64(bbox.xmin), to_f64(bbox.ymin));
    let (w, h) = (to_f64(bbox.width()), to_f64(bbox.height()));
    let mut points: Vec<Vec2<T>> = Vec::new();
    let mut consecutive_rejects = 0u64;
    for _ in 0..count {
        let x = real::<T>(xmin + w * rng.next_f64());
        let y = real::<T>(ymin + h * rng.next_f64());
        let u = rng.next_f64();
        let p = Vec2::new(x, y);
        let keep = domain.contains(p) && u < to_f64(intensity.eval(p)) / to_f64(fmax);
        if keep {
            points.push(p);
            consecutive_rejects = 0;
        } else {
            consecutive_rejects += 1;
            if consecutive_rejects > MAX_CONSECUTIVE_REJECTIONS {
                return Err(SamplingError::RejectionBudget);
            }
        }
    }

    // Distinctness: resample exact collisions from the continued stream.
    loop {
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_unstable_by(|&i, &j| {
            let (a, b) = (points[i], points[j]);
            a.x.partial_cmp(&b.x)
                .unwrap()
                .then(a.y.partial_cmp(&b.y).unwrap())
        });
        let dup = order
            .windows(2)
            .find(|w| points[w[0]] == points[w[1]])
            .map(|w| w[1]);
        match dup {
            None => break,
            Some(i) => {
                let x = real::<T>(xmin + w * rng.next_f64());
                let y = real::<T>(ymin + h * rng.next_f64());
                let _ = rng.next_f64();
                points[i] = Vec2::new(x, y);
            }
        }
    }

    PointCloud::new(points).map_err(SamplingError::Geometry)
}

/// One boundary sample of the efficiency probe.
#[derive(Clone, Debug)]
pub struct BoundaryProbe<T> {
    pub point: Vec2<T>,
    /// Some flat cone at this point contains no interior sample.
    pub compatible: bool,
    /// Index of the witnessing flat cone, when one exists.
    pub witness_cone: Option<usize>,
    /// The point is not interior to the Pareto hull of the sampled closure.
    pub efficient: bool,
}

/// Resolution-dependent compatibility/efficiency witnesses along `∂U`.
#[derive(Clone, Debug)]
pub struct ProbeReport<T> {
    pub resolution: usize,
    pub samples: Vec<BoundaryProbe<T>>,
    pub all_pass: bool,
}

/// Discretizes `∂U` and `Ū` and reports, per boundary sample, whether some
/// flat cone keeps the sampled closure out of the domain interior (a
/// compatibility witness) and whether the sample is non-interior with respect
/// to the Pareto hull of the sampled closure (an efficiency witness).
///
/// This is a diagnostic, not a proof: only the flat cones themselves are
/// tested as supporting cones, and the verdicts depend on the resolution.
pub fn domain_efficiency_probe<T: Real>(
    domain: &Domain<T>,
    model: &NormModel<T>,
    resolution: usize,
) -> Result<ProbeReport<T>, SamplingError> {
    if resolution < 8 {
        return Err(SamplingError::ProbeTooCoarse);
    }
    let boundary = sample_boundary(domain, resolution);
    let bbox = domain.bounding_box();
    let mut interior: Vec<Vec2<T>> = Vec::new();
    for i in 0..resolution {
        for j in 0..resolution {
            let fx = T::from_usize(i).unwrap() / T::from_usize(resolution - 1).unwrap();
            let fy = T::from_usize(j).unwrap() / T::from_usize(resolution - 1).unwrap();
            let p = Vec2::new(
                bbox.xmin + bbox.width() * fx,
                bbox.ymin + bbox.height() * fy,
            );
            if domain.contains_interior(p) {
                interior.push(p);
            }
        }
    }
    let mut closure: Vec<Vec2<T>> = interior.clone();
    closure.extend(boundary.iter().copied());
    dedup_points(&mut closure);
    let closure_cloud = PointCloud::new(closure).map_err(SamplingError::Geometry)?;

    let cones: Vec<_> = model
        .facet_cones()
        .iter()
        .map(|fc| fc.flat_cone())
        .collect();
    let mut samples = Vec::with_capacity(boundary.len());
    let mut all_pass = true;
    for &x0 in &boundary {
        let witness_cone = cones
            .iter()
            .position(|c| !interior.iter().any(|&z| cone_contains(c, z - x0, false)));
        let compatible = witness_cone.is_some();
        let efficient = !pareto_membership(&closure_cloud, x0, model).interior;
        all_pass &= compatible && efficient;
        samples.push(BoundaryProbe {
            point: x0,
            compatible,
            witness_cone,
            efficient,
        });
    }
    Ok(ProbeReport {
        resolution,
        samples,
        all_pass,
    })
}

fn dedup_points<T: Real>(points: &mut Vec<Vec2<T>>) {
    points.sort_by(|a, b| {
        a.x.partial_cmp(&b.x)
            .unwrap()
            .then(a.y.partial_cmp(&b.y).unwrap())
    });
    points.dedup();
}

fn sample_boundary<T: Real>(domain: &Domain<T>, resolution: usize) -> Vec<Vec2<T>> {
    let mut out: Vec<Vec2<T>> = Vec::new();
    let mut edge = |a: Vec2<T>, b: Vec2<T>| {
        for k in 0..resolution {
            let t = T::from_usize(k).unwrap() / T::from_usize(resolution).unwrap();
            out.push(a + (b - a).scale(t));
        }
    };
    match domain.shape() {
        DomainShape::Rectangle(r) => {
            let c = [
                Vec2::new(r.xmin, r.ymin),
                Vec2::new(r.xmax, r.ymin),
                Vec2::new(r.xmax, r.ymax),
                Vec2::new(r.xmin, r.ymax),
            ];
            for k in 0..4 {
                edge(c[k], c[(k + 1) % 4]);
            }
        }
        DomainShape::ConvexPolygonShape(verts) => {
            for k in 0..verts.len() {
                edge(verts[k], verts[(k + 1) % verts.len()]);
            }
        }
        DomainShape::RectilinearUnion(rects) => {
            for r in rects.iter() {
                let c = [
                    Vec2::new(r.xmin, r.ymin),
                    Vec2::new(r.xmax, r.ymin),
                    Vec2::new(r.xmax, r.ymax),
                    Vec2::new(r.xmin, r.ymax),
                ];
                for k in 0..4 {
                    edge(c[k], c[(k + 1) % 4]);
                }
            }
        }
    }
    // Keep genuine boundary points of the union (edges of one rectangle may
    // be interior to another) and dedup.
    let mut filtered: Vec<Vec2<T>> = out
        .into_iter()
        .filter(|&p| domain.contains(p) && !domain.contains_interior(p))
        .collect();
    dedup_points(&mut filtered);
    filtered
}

/// Quick hull-interior membership used by probe tests.
pub fn hull_interior<T: Real>(points: &[Vec2<T>], x: Vec2<T>) -> bool {
    match convex_hull_of(points) {
        Ok(h) => h.classify(x) == Region::Interior,
        Err(_) => false,
    }
}
