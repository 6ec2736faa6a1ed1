//! Face planes of a hull, with sliver and duplicate filtering.

use crate::dual::to_dual;
use crate::geometry::{Halfspace, Point3};
use crate::lp::{chebyshev_center_seeded, ChebyshevOutcome, DEFAULT_SEED};

use super::intersection::intersect_about;
use super::{IntersectionOutcome, TriangulatedHull};

/// Faces smaller than this times the squared diagonal are dropped.
pub const SLIVER_AREA: f64 = 1e-8;

/// Dual points closer than this times the largest dual norm are duplicates.
pub const DUAL_DUPLICATE: f64 = 1e-14;

/// Looser dual proximity used when merging coplanar triangles.
pub const DUAL_COPLANAR: f64 = 1e-12;

/// Halfspaces of a hull's faces, with the interior center used for duality.
#[derive(Debug, Clone, PartialEq)]
pub struct FacePlaneSet {
    pub halfspaces: Vec<Halfspace>,
    /// Hull triangles each halfspace stands for.
    pub provenance: Vec<Vec<usize>>,
    /// Chebyshev center of the halfspaces.
    pub center: Point3,
    pub radius: f64,
    /// Bounding-box diagonal of the source geometry.
    pub diagonal: f64,
}

impl FacePlaneSet {
    pub fn len(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.halfspaces.is_empty()
    }

    /// Wraps an arbitrary halfspace list whose intersection is bounded and
    /// has interior. Every halfspace keeps its index, redundant ones included.
    pub fn from_halfspaces(halfspaces: Vec<Halfspace>, seed: u64) -> Result<Self, PlaneSetError> {
        let cc = match chebyshev_center_seeded(&halfspaces, seed) {
            ChebyshevOutcome::Center(cc) => cc,
            ChebyshevOutcome::Infeasible => return Err(PlaneSetError::Empty),
            ChebyshevOutcome::Unbounded => return Err(PlaneSetError::Unbounded),
        };
        if cc.radius <= 0.0 {
            return Err(PlaneSetError::Empty);
        }
        let mesh = match intersect_about(&halfspaces, cc.center) {
            IntersectionOutcome::Bounded(m) => m,
            IntersectionOutcome::Empty => return Err(PlaneSetError::Empty),
            IntersectionOutcome::Unbounded => return Err(PlaneSetError::Unbounded),
        };
        let diagonal = mesh.bounds().map_or(0.0, |b| b.diagonal());
        if cc.radius <= 1e-12 * diagonal {
            return Err(PlaneSetError::Empty);
        }
        Ok(FacePlaneSet {
            provenance: (0..halfspaces.len()).map(|i| vec![i]).collect(),
            halfspaces,
            center: cc.center,
            radius: cc.radius,
            diagonal,
        })
    }
}

/// Why a halfspace list cannot be simplified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneSetError {
    /// Empty or without interior.
    Empty,
    Unbounded,
}

fn triangle_plane(a: Point3, b: Point3, c: Point3) -> Halfspace {
    let n = (b - a).cross(c - a).normalized();
    let off = n.dot(a).max(n.dot(b)).max(n.dot(c));
    Halfspace { n, b: -off }
}

pub fn face_planes(hull: &TriangulatedHull, merge_coplanar: bool) -> FacePlaneSet {
    face_planes_seeded(hull, merge_coplanar, DEFAULT_SEED)
}

pub fn face_planes_seeded(hull: &TriangulatedHull, merge_coplanar: bool, seed: u64) -> FacePlaneSet {
    let diagonal = hull.diagonal();
    let min_area = SLIVER_AREA * diagonal * diagonal;
    let mut tris = Vec::new();
    let mut areas = Vec::new();
    let mut planes = Vec::new();
    for t in 0..hull.triangles.len() {
        let [a, b, c] = hull.triangle(t);
        let area = 0.5 * (b - a).cross(c - a).norm();
        if area >= min_area {
            tris.push(t);
            areas.push(area);
            planes.push(triangle_plane(a, b, c));
        }
    }

    let (center, radius) = match chebyshev_center_seeded(&planes, seed) {
        ChebyshevOutcome::Center(cc) if cc.radius > 0.0 => (cc.center, cc.radius),
        _ => {
            let g = hull.vertices.iter().fold(Point3::ZERO, |a, &p| a + p) / hull.vertices.len() as f64;
            let r = planes.iter().map(|h| -h.signed_distance(g)).fold(f64::INFINITY, f64::min);
            (g, r.max(0.0))
        }
    };

    // group near-identical dual points
    let phis: Vec<Point3> = planes
        .iter()
        .map(|h| to_dual(h, center).unwrap_or(Point3::new(f64::INFINITY, 0.0, 0.0)))
        .collect();
    let max_phi = phis.iter().filter(|p| p.is_finite()).map(|p| p.norm()).fold(0.0, f64::max);
    let tol = if merge_coplanar { DUAL_COPLANAR } else { DUAL_DUPLICATE } * max_phi;
    let mut order: Vec<usize> = (0..planes.len()).filter(|&i| phis[i].is_finite()).collect();
    order.sort_by(|&i, &j| phis[i].x.total_cmp(&phis[j].x));
    let mut group: Vec<usize> = (0..planes.len()).collect();
    fn find(g: &mut [usize], mut x: usize) -> usize {
        while g[x] != x {
            g[x] = g[g[x]];
            x = g[x];
        }
        x
    }
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if phis[j].x - phis[i].x > tol {
                break;
            }
            if phis[i].distance(phis[j]) <= tol {
                let (ri, rj) = (find(&mut group, i), find(&mut group, j));
                if ri != rj {
                    group[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }

    let mut halfspaces = Vec::new();
    let mut provenance: Vec<Vec<usize>> = Vec::new();
    let mut best: Vec<usize> = Vec::new();
    let mut slot = vec![usize::MAX; planes.len()];
    for i in 0..planes.len() {
        if !phis[i].is_finite() {
            continue;
        }
        let r = find(&mut group, i);
        if slot[r] == usize::MAX {
            slot[r] = halfspaces.len();
            halfspaces.push(planes[i]);
            provenance.push(Vec::new());
            best.push(i);
        }
        let s = slot[r];
        provenance[s].push(tris[i]);
        if areas[i] > areas[best[s]] {
            best[s] = i;
            halfspaces[s] = planes[i];
        }
    }
    let radius = halfspaces
        .iter()
        .map(|h| -h.signed_distance(center))
        .fold(radius, f64::min)
        .max(0.0);
    FacePlaneSet {
        halfspaces,
        provenance,
        center,
        radius,
        diagonal,
    }
}
