//! Robust planar primitives shared by the other modules: vectors, cones,
//! orientation tests, convex hulls.
//!
//! Orientation predicates use floating point with the absolute tolerance
//! [`EPS_GEO`] for sign decisions. Poisson inputs are in general position
//! almost surely, so no exact-arithmetic fallback is provided; adversarial
//! near-degenerate inputs may be misclassified within the tolerance.

use crate::scalar::{real, Real};
use thiserror::Error;

/// Absolute tolerance for orientation sign decisions.
pub const EPS_GEO: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("coordinates must be finite")]
    NonFinite,
    #[error("point set contains duplicate points (indices {0} and {1})")]
    DuplicatePoints(usize, usize),
    #[error("cone is degenerate: extremal directions are parallel or wrongly oriented")]
    DegenerateCone,
    #[error("operation requires a nonempty point set")]
    EmptyPointSet,
    #[error("rectangle must have positive width and height")]
    EmptyRectangle,
}

/// Planar vector / point.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Vec2<T> {
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self {
            x: T::zero(),
            y: T::zero(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn dot(&self, other: Vec2<T>) -> T {
        self.x * other.x + self.y * other.y
    }

    /// Cross product `x₁·y₂ − x₂·y₁`.
    #[inline]
    pub fn cross(&self, other: Vec2<T>) -> T {
        self.x * other.y - self.y * other.x
    }

    /// Counterclockwise quarter turn, `(x, y) ↦ (−y, x)`.
    #[inline]
    pub fn perp(&self) -> Self {
        Self {
            x: -self.y,
            y: self.x,
        }
    }

    pub fn norm_sq(&self) -> T {
        self.dot(*self)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            x: self.x * s,
            y: self.y * s,
        }
    }

    pub fn unit(&self) -> Self {
        let n = self.norm();
        Self {
            x: self.x / n,
            y: self.y / n,
        }
    }

    pub fn angle(&self) -> T {
        self.y.atan2(self.x)
    }
}

impl<T: Real> std::ops::Add for Vec2<T> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self {
            x: self.x + rhs.x,
            y: self.y + rhs.y,
        }
    }
}

impl<T: Real> std::ops::Sub for Vec2<T> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self {
            x: self.x - rhs.x,
            y: self.y - rhs.y,
        }
    }
}

impl<T: Real> std::ops::Neg for Vec2<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
        }
    }
}

/// Cross product as a free function, matching the written form `a × b`.
#[inline]
pub fn cross<T: Real>(a: Vec2<T>, b: Vec2<T>) -> T {
    a.cross(b)
}

/// Axis-aligned rectangle `[xmin, xmax] × [ymin, ymax]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect<T> {
    pub xmin: T,
    pub xmax: T,
    pub ymin: T,
    pub ymax: T,
}

impl<T: Real> Rect<T> {
    pub fn new(xmin: T, xmax: T, ymin: T, ymax: T) -> Result<Self, GeometryError> {
        if !(xmin.is_finite() && xmax.is_finite() && ymin.is_finite() && ymax.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if xmax <= xmin || ymax <= ymin {
            return Err(GeometryError::EmptyRectangle);
        }
        Ok(Self {
            xmin,
            xmax,
            ymin,
            ymax,
        })
    }

    pub fn width(&self) -> T {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> T {
        self.ymax - self.ymin
    }

    pub fn area(&self) -> T {
        self.width() * self.height()
    }

    pub fn center(&self) -> Vec2<T> {
        let half = real::<T>(0.5);
        Vec2::new(
            (self.xmin + self.xmax) * half,
            (self.ymin + self.ymax) * half,
        )
    }

    pub fn contains(&self, p: Vec2<T>) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }

    pub fn contains_interior(&self, p: Vec2<T>) -> bool {
        p.x > self.xmin && p.x < self.xmax && p.y > self.ymin && p.y < self.ymax
    }
}

/// Proper pointed cone `{a·w + b·v | a, b ≥ 0}` with unit extremal directions
/// and orientation `w × v > 0`.
#[derive(Clone, Copy, Debug)]
pub struct Cone2<T> {
    w: Vec2<T>,
    v: Vec2<T>,
}

impl<T: Real> Cone2<T> {
    /// Builds the cone spanned by `w` and `v`, normalizing the directions.
    pub fn new(w: Vec2<T>, v: Vec2<T>) -> Result<Self, GeometryError> {
        if !(w.is_finite() && v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let (nw, nv) = (w.norm(), v.norm());
        if nw <= real(EPS_GEO) || nv <= real(EPS_GEO) {
            return Err(GeometryError::DegenerateCone);
        }
        let w = w.unit();
        let v = v.unit();
        if w.cross(v) <= real(EPS_GEO) {
            return Err(GeometryError::DegenerateCone);
        }
        Ok(Self { w, v })
    }

    pub fn w(&self) -> Vec2<T> {
        self.w
    }

    pub fn v(&self) -> Vec2<T> {
        self.v
    }

    /// `w × v`, positive by construction.
    pub fn span_cross(&self) -> T {
        self.w.cross(self.v)
    }

    /// The reflected cone `−Q`.
    pub fn negated(&self) -> Self {
        Self {
            w: -self.w,
            v: -self.v,
        }
    }
}

/// Membership of `x` in the cone: `x = a·w + b·v` with `a, b ≥ 0`
/// (`strict`: `a, b > 0`). Decided by the signs of `w × x` and `x × v`.
#[inline]
pub fn cone_contains<T: Real>(c: &Cone2<T>, x: Vec2<T>, strict: bool) -> bool {
    let eps = real::<T>(EPS_GEO);
    let s1 = c.w.cross(x);
    let s2 = x.cross(c.v);
    if strict {
        s1 > eps && s2 > eps
    } else {
        s1 >= -eps && s2 >= -eps
    }
}

/// Finite list of distinct planar points with stable indices.
#[derive(Clone, Debug)]
pub struct PointCloud<T> {
    points: Vec<Vec2<T>>,
}

impl<T: Real> PointCloud<T> {
    /// Validates finiteness and pairwise distinctness.
    pub fn new(points: Vec<Vec2<T>>) -> Result<Self, GeometryError> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_unstable_by(|&i, &j| {
            let (a, b) = (points[i], points[j]);
            a.x.partial_cmp(&b.x)
                .unwrap()
                .then(a.y.partial_cmp(&b.y).unwrap())
        });
        for pair in order.windows(2) {
            if points[pair[0]] == points[pair[1]] {
                return Err(GeometryError::DuplicatePoints(pair[0], pair[1]));
            }
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec2<T>] {
        &self.points
    }

    pub fn get(&self, i: usize) -> Vec2<T> {
        self.points[i]
    }
}

/// Strictly convex counterclockwise vertex sequence.
#[derive(Clone, Debug)]
pub struct ConvexPolygon<T> {
    pub vertices: Vec<Vec2<T>>,
}

/// Where a query point sits relative to a convex hull.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Interior,
    Boundary,
    Exterior,
}

/// Convex hull of a point set together with a per-point boundary
/// classification. Collinear points interior to a hull edge are excluded from
/// the vertex list but flagged as boundary.
#[derive(Clone, Debug)]
pub struct ConvexHull<T> {
    /// Strict hull vertices, counterclockwise.
    pub polygon: ConvexPolygon<T>,
    /// Indices of the strict hull vertices in the input, counterclockwise.
    pub vertex_indices: Vec<usize>,
    /// Per input point: lies on the hull boundary (vertex or on an edge).
    pub on_boundary: Vec<bool>,
    /// All points collinear: the hull degenerates to a segment (or a point)
    /// and the interior is empty.
    pub degenerate: bool,
}

fn turn<T: Real>(o: Vec2<T>, a: Vec2<T>, b: Vec2<T>) -> T {
    (a - o).cross(b - o)
}

/// Monotone chain over indices sorted lexicographically. With
/// `keep_collinear`, points interior to hull edges stay in the chain.
fn half_chains<T: Real>(
    points: &[Vec2<T>],
    sorted: &[usize],
    keep_collinear: bool,
) -> (Vec<usize>, Vec<usize>) {
    let eps = real::<T>(EPS_GEO);
    let pop_threshold = if keep_collinear { -eps } else { eps };
    let build = |iter: &mut dyn Iterator<Item = usize>| -> Vec<usize> {
        let mut chain: Vec<usize> = Vec::new();
        for i in iter {
            while chain.len() >= 2 {
                let o = points[chain[chain.len() - 2]];
                let a = points[chain[chain.len() - 1]];
                if turn(o, a, points[i]) <= pop_threshold {
                    chain.pop();
                } else {
                    break;
                }
            }
            chain.push(i);
        }
        chain
    };
    let lower = build(&mut sorted.iter().copied());
    let upper = build(&mut sorted.iter().rev().copied());
    (lower, upper)
}

/// Convex hull by monotone chain, with boundary classification.
pub fn convex_hull<T: Real>(cloud: &PointCloud<T>) -> Result<ConvexHull<T>, GeometryError> {
    convex_hull_of(cloud.points())
}

/// Hull over a raw slice (the points must be distinct).
pub fn convex_hull_of<T: Real>(points: &[Vec2<T>]) -> Result<ConvexHull<T>, GeometryError> {
    let n = points.len();
    if n == 0 {
        return Err(GeometryError::EmptyPointSet);
    }
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_unstable_by(|&i, &j| {
        let (a, b) = (points[i], points[j]);
        a.x.partial_cmp(&b.x)
            .unwrap()
            .then(a.y.partial_cmp(&b.y).unwrap())
    });

    let (mut lower, mut upper) = half_chains(points, &sorted, false);
    lower.pop();
    upper.pop();
    let mut vertex_indices = lower;
    vertex_indices.append(&mut upper);
    let degenerate = vertex_indices.len() < 3;
    if degenerate {
        // All points collinear: extremes of the lexicographic order.
        vertex_indices = if n == 1 {
            vec![sorted[0]]
        } else {
            vec![sorted[0], sorted[n - 1]]
        };
    }

    let mut on_boundary = vec![false; n];
    if degenerate {
        on_boundary.iter_mut().for_each(|b| *b = true);
    } else {
        let (low_inc, up_inc) = half_chains(points, &sorted, true);
        for i in low_inc.into_iter().chain(up_inc) {
            on_boundary[i] = true;
        }
    }

    let polygon = ConvexPolygon {
        vertices: vertex_indices.iter().map(|&i| points[i]).collect(),
    };
    Ok(ConvexHull {
        polygon,
        vertex_indices,
        on_boundary,
        degenerate,
    })
}

impl<T: Real> ConvexHull<T> {
    /// Classifies an arbitrary point against the hull.
    pub fn classify(&self, p: Vec2<T>) -> Region {
        let eps = real::<T>(EPS_GEO);
        if self.degenerate {
            let verts = &self.polygon.vertices;
            if verts.len() == 1 {
                let on = (p - verts[0]).norm() <= eps;
                return if on {
                    Region::Boundary
                } else {
                    Region::Exterior
                };
            }
            let (a, b) = (verts[0], verts[1]);
            let along = (b - a).dot(p - a);
            let within = along >= -eps && along <= (b - a).norm_sq() + eps;
            let on_line = turn(a, b, p).abs() <= eps;
            return if within && on_line {
                Region::Boundary
            } else {
                Region::Exterior
            };
        }
        let verts = &self.polygon.vertices;
        let m = verts.len();
        let mut touches_edge = false;
        for k in 0..m {
            let t = turn(verts[k], verts[(k + 1) % m], p);
            if t < -eps {
                return Region::Exterior;
            }
            if t <= eps {
                touches_edge = true;
            }
        }
        if touches_edge {
            Region::Boundary
        } else {
            Region::Interior
        }
    }
}
