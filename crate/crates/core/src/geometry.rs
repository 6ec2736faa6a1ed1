//! Points, halfspaces and the exact orientation predicate.
//!
//! Every combinatorial decision in the crate (hull visibility, one-ring
//! convexity, unbounded-cap detection) goes through [`orient3`], which is
//! exact for all finite inputs. Constructions (normals, dual points, volumes)
//! are plain `f64`.

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// A point or free vector in model space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ZERO: Point3 = Point3::new(0.0, 0.0, 0.0);

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Checked constructor used at ingestion boundaries.
    pub fn try_new(x: f64, y: f64, z: f64) -> Result<Self, GeometryError> {
        let p = Self::new(x, y, z);
        if p.is_finite() {
            Ok(p)
        } else {
            Err(GeometryError::NonFinite)
        }
    }

    #[inline]
    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    #[inline]
    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    #[inline]
    pub fn distance(self, o: Self) -> f64 {
        (self - o).norm()
    }

    pub fn normalized(self) -> Self {
        self / self.norm()
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn component_min(self, o: Self) -> Self {
        Self::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn component_max(self, o: Self) -> Self {
        Self::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    fn coord(self) -> robust::Coord3D<f64> {
        robust::Coord3D {
            x: self.x,
            y: self.y,
            z: self.z,
        }
    }
}

impl Add for Point3 {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Point3 {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Point3 {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Point3 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Point3 {
    type Output = Self;
    #[inline]
    fn div(self, s: f64) -> Self {
        Self::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Index<usize> for Point3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Point3 index {i} out of range"),
        }
    }
}

/// Sign of an orientation determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Zero,
    Negative,
}

impl Sign {
    fn of(v: f64) -> Self {
        if v > 0.0 {
            Sign::Positive
        } else if v < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

/// Exact sign of `det[b - a, c - a, d - a]`.
///
/// Positive when `d` lies on the side of plane `abc` that the right-handed
/// normal `(b - a) x (c - a)` points to, so for an outward, counter-clockwise
/// triangle a positive result means `d` is outside.
#[inline]
pub fn orient3(a: Point3, b: Point3, c: Point3, d: Point3) -> Sign {
    // Shewchuk's orient3d is det[a - d, b - d, c - d] = -det[b - a, c - a, d - a].
    Sign::of(-robust::orient3d(a.coord(), b.coord(), c.coord(), d.coord()))
}

/// Oriented plane `n . x + b <= 0`; `n` points out of the interior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub n: Point3,
    pub b: f64,
}

impl Halfspace {
    pub fn new(n: Point3, b: f64) -> Result<Self, GeometryError> {
        if !n.is_finite() || !b.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if n.norm_squared() == 0.0 {
            return Err(GeometryError::ZeroNormal);
        }
        Ok(Self { n, b })
    }

    /// Plane through `p` with outward normal `n`.
    pub fn through(n: Point3, p: Point3) -> Result<Self, GeometryError> {
        Self::new(n, -n.dot(p))
    }

    /// `n . x + b`; positive outside.
    #[inline]
    pub fn eval(&self, x: Point3) -> f64 {
        self.n.dot(x) + self.b
    }

    /// Signed Euclidean distance of `x` from the plane, positive outside.
    #[inline]
    pub fn signed_distance(&self, x: Point3) -> f64 {
        self.eval(x) / self.n.norm()
    }

    /// Same halfspace with a unit normal.
    pub fn normalized(&self) -> Self {
        let s = self.n.norm();
        Self {
            n: self.n / s,
            b: self.b / s,
        }
    }

    /// Halfspace shifted by `t`: contains `x + t` iff `self` contains `x`.
    pub fn translated(&self, t: Point3) -> Self {
        Self {
            n: self.n,
            b: self.b - self.n.dot(t),
        }
    }
}

/// Twice-area normal of a polygon (Newell's method); half its length is the area.
pub fn polygon_area_vector(vertices: &[Point3]) -> Point3 {
    let mut acc = Point3::ZERO;
    if vertices.len() < 3 {
        return acc;
    }
    let p0 = vertices[0];
    for w in vertices[1..].windows(2) {
        acc += (w[0] - p0).cross(w[1] - p0);
    }
    acc
}

pub fn polygon_area(vertices: &[Point3]) -> f64 {
    0.5 * polygon_area_vector(vertices).norm()
}

/// Contribution of one outward, counter-clockwise face to the enclosed
/// volume of a closed mesh (divergence theorem).
///
/// For a planar polygon this is `(area_normal . centroid) / 3`. The polygon is
/// fanned from its first vertex, so the sum over a closed, consistently
/// oriented mesh is the enclosed volume even if faces are slightly warped.
pub fn signed_volume_contribution(face: &[Point3]) -> f64 {
    if face.len() < 3 {
        return 0.0;
    }
    let p0 = face[0];
    let mut acc = 0.0;
    for w in face[1..].windows(2) {
        acc += p0.dot(w[0].cross(w[1]));
    }
    acc / 6.0
}

/// Axis-aligned bounds of a point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Point3>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        let mut bb = Aabb {
            min: first,
            max: first,
        };
        for p in it {
            bb.min = bb.min.component_min(*p);
            bb.max = bb.max.component_max(*p);
        }
        Some(bb)
    }

    pub fn diagonal(&self) -> f64 {
        (self.max - self.min).norm()
    }

    pub fn center(&self) -> Point3 {
        (self.min + self.max) * 0.5
    }
}

/// Bounding-box diagonal, or 1.0 for degenerate/empty sets, for scaling tolerances.
pub fn scale_of(points: &[Point3]) -> f64 {
    match Aabb::from_points(points) {
        Some(bb) if bb.diagonal() > 0.0 => bb.diagonal(),
        _ => 1.0,
    }
}
