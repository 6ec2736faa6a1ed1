//! k-DOP baselines and tightness metrics against a reference hull.

use serde::{Deserialize, Serialize};

use crate::error::MetricsError;
use crate::geometry::{Halfspace, Point3};
use crate::hull::{halfspace_intersection, IntersectionOutcome, TriangulatedHull};
use crate::polymesh::PolyhedronMesh;
use crate::simplify::{ApproxMode, SimplifiedHull};

/// Relative containment slack, scaled by the reference diagonal.
pub const CONTAINMENT_TOL: f64 = 1e-9;

/// Fixed plane directions for a k-DOP. No two point the same way;
/// opposite pairs are allowed and make up the slabs.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    directions: Vec<Point3>,
}

impl DirectionSet {
    /// Normalizes and checks `directions`.
    pub fn new(directions: Vec<Point3>) -> Result<Self, MetricsError> {
        let mut out = Vec::with_capacity(directions.len());
        for (i, d) in directions.iter().enumerate() {
            let len = d.norm();
            if !d.is_finite() || len == 0.0 {
                return Err(MetricsError::BadDirection(i));
            }
            out.push(*d / len);
        }
        for i in 0..out.len() {
            for j in i + 1..out.len() {
                if out[i].dot(out[j]) >= 1.0 - 1e-12 {
                    return Err(MetricsError::ParallelDirections(i, j));
                }
            }
        }
        Ok(DirectionSet { directions: out })
    }

    pub fn directions(&self) -> &[Point3] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

fn axes() -> Vec<Point3> {
    let mut v = Vec::new();
    for k in 0..3 {
        for s in [1.0, -1.0] {
            let mut a = [0.0; 3];
            a[k] = s;
            v.push(Point3::from_array(a));
        }
    }
    v
}

fn edge_diagonals() -> Vec<Point3> {
    let mut v = Vec::new();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        for si in [1.0, -1.0] {
            for sj in [1.0, -1.0] {
                let mut a = [0.0; 3];
                a[i] = si;
                a[j] = sj;
                v.push(Point3::from_array(a));
            }
        }
    }
    v
}

fn corner_diagonals() -> Vec<Point3> {
    let mut v = Vec::new();
    for sx in [1.0, -1.0] {
        for sy in [1.0, -1.0] {
            for sz in [1.0, -1.0] {
                v.push(Point3::new(sx, sy, sz));
            }
        }
    }
    v
}

/// Axis directions plus the twelve edge diagonals.
pub fn canonical_directions_18() -> DirectionSet {
    canonical_directions(18).expect("18 is a supported k")
}

/// Canonical k-DOP directions for k in {6, 14, 18, 26}.
pub fn canonical_directions(k: usize) -> Option<DirectionSet> {
    let dirs = match k {
        6 => axes(),
        14 => [axes(), corner_diagonals()].concat(),
        18 => [axes(), edge_diagonals()].concat(),
        26 => [axes(), edge_diagonals(), corner_diagonals()].concat(),
        _ => return None,
    };
    Some(DirectionSet::new(dirs).expect("canonical directions are distinct"))
}

/// Tightest slab planes `d . x <= max_p d . p` for each direction.
///
/// # Panics
/// If `points` is empty.
pub fn kdop_fit(points: &[Point3], dirs: &DirectionSet) -> Vec<Halfspace> {
    assert!(!points.is_empty(), "kdop_fit needs at least one point");
    dirs.directions
        .iter()
        .map(|&d| {
            let max = points.iter().map(|&p| d.dot(p)).fold(f64::NEG_INFINITY, f64::max);
            Halfspace { n: d, b: -max }
        })
        .collect()
}

/// Size of an approximation relative to the hull it approximates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TightnessReport {
    pub volume_ratio: f64,
    pub area_ratio: f64,
    /// One-sided Hausdorff distance from the larger solid to the smaller one.
    pub hausdorff: f64,
    pub volume: f64,
    pub area: f64,
    pub reference_volume: f64,
    pub reference_area: f64,
}

/// What to compare against the reference hull.
#[derive(Debug, Clone, Copy)]
pub enum Candidate<'a> {
    /// Outer approximation given as halfspaces.
    Halfspaces(&'a [Halfspace]),
    /// A simplifier result; its mode decides the containment direction.
    Simplified(&'a SimplifiedHull),
}

pub fn tightness(candidate: Candidate<'_>, reference: &TriangulatedHull) -> Result<TightnessReport, MetricsError> {
    let (mesh, mode) = match candidate {
        Candidate::Halfspaces(h) => match halfspace_intersection(h) {
            IntersectionOutcome::Bounded(m) => (m, ApproxMode::Outer),
            _ => return Err(MetricsError::NotBounded),
        },
        Candidate::Simplified(s) => (s.mesh.clone(), s.approx_mode),
    };
    tightness_of_mesh(&mesh, mode, reference)
}

/// Tightness of a closed convex polygon mesh that contains (outer) or is
/// contained in (inner) `reference`.
pub fn tightness_of_mesh(
    mesh: &PolyhedronMesh,
    mode: ApproxMode,
    reference: &TriangulatedHull,
) -> Result<TightnessReport, MetricsError> {
    let reference_volume = reference.volume();
    let reference_area = reference.area();
    if reference_volume <= 0.0 {
        return Err(MetricsError::EmptyReference);
    }
    let tolerance = CONTAINMENT_TOL * reference.diagonal();
    let planes: Vec<Halfspace> = (0..mesh.faces.len()).filter_map(|f| mesh.face_plane(f)).collect();
    let excess = match mode {
        ApproxMode::Outer => reference
            .vertices
            .iter()
            .flat_map(|&v| planes.iter().map(move |h| h.signed_distance(v)))
            .fold(f64::NEG_INFINITY, f64::max),
        ApproxMode::Inner => mesh
            .vertices
            .iter()
            .map(|&v| outside_distance(reference, v))
            .fold(f64::NEG_INFINITY, f64::max),
    };
    if excess > tolerance {
        return Err(MetricsError::NonContainment { excess, tolerance });
    }
    // The distance to a convex solid is convex, so the max over the larger
    // solid is attained at one of its vertices.
    let hausdorff = match mode {
        ApproxMode::Outer => mesh
            .vertices
            .iter()
            .map(|&v| outside_distance(reference, v))
            .fold(0.0, f64::max),
        ApproxMode::Inner => {
            let inner = mesh.triangulated();
            reference
                .vertices
                .iter()
                .map(|&v| distance_to_solid(&inner, &planes, v))
                .fold(0.0, f64::max)
        }
    };
    let (volume, area) = (mesh.volume(), mesh.area());
    Ok(TightnessReport {
        volume_ratio: volume / reference_volume,
        area_ratio: area / reference_area,
        hausdorff,
        volume,
        area,
        reference_volume,
        reference_area,
    })
}

/// Distance from `p` to the solid bounded by `hull`; zero inside.
pub fn outside_distance(hull: &TriangulatedHull, p: Point3) -> f64 {
    let inside = (0..hull.triangles.len()).all(|t| {
        let [a, b, c] = hull.triangle(t);
        (b - a).cross(c - a).dot(p - a) <= 0.0
    });
    if inside {
        return 0.0;
    }
    (0..hull.triangles.len())
        .map(|t| {
            let [a, b, c] = hull.triangle(t);
            p.distance(closest_on_triangle(p, a, b, c))
        })
        .fold(f64::INFINITY, f64::min)
}

fn distance_to_solid(tris: &PolyhedronMesh, planes: &[Halfspace], p: Point3) -> f64 {
    if planes.iter().all(|h| h.eval(p) <= 0.0) {
        return 0.0;
    }
    (0..tris.faces.len())
        .map(|f| {
            let t = tris.face_points(f);
            p.distance(closest_on_triangle(p, t[0], t[1], t[2]))
        })
        .fold(f64::INFINITY, f64::min)
}

/// Closest point to `p` on triangle `abc` (Voronoi-region walk).
pub fn closest_on_triangle(p: Point3, a: Point3, b: Point3, c: Point3) -> Point3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}
