//! Intersection of halfspaces by dualizing about the Chebyshev center.

use crate::dual::build_dual_hull;
use crate::error::{DualError, HullError};
use crate::geometry::{orient3, Halfspace, Point3, Sign};
use crate::lp::{chebyshev_center_seeded, ChebyshevOutcome, DEFAULT_SEED};
use crate::polymesh::PolyhedronMesh;

/// Radii at or below this fraction of the problem scale count as flat.
const FLAT_RADIUS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum IntersectionOutcome {
    Bounded(PolyhedronMesh),
    /// Empty, or without interior.
    Empty,
    Unbounded,
}

impl IntersectionOutcome {
    pub fn mesh(&self) -> Option<&PolyhedronMesh> {
        match self {
            IntersectionOutcome::Bounded(m) => Some(m),
            _ => None,
        }
    }

    pub fn volume(&self) -> Option<f64> {
        self.mesh().map(PolyhedronMesh::volume)
    }
}

pub fn halfspace_intersection(halfspaces: &[Halfspace]) -> IntersectionOutcome {
    halfspace_intersection_seeded(halfspaces, DEFAULT_SEED)
}

/// Intersection of `halfspaces`. Faces of the result are tagged with the
/// index of the halfspace they lie on; redundant halfspaces contribute no face.
pub fn halfspace_intersection_seeded(halfspaces: &[Halfspace], seed: u64) -> IntersectionOutcome {
    let cc = match chebyshev_center_seeded(halfspaces, seed) {
        ChebyshevOutcome::Infeasible => return IntersectionOutcome::Empty,
        ChebyshevOutcome::Unbounded => return IntersectionOutcome::Unbounded,
        ChebyshevOutcome::Center(cc) => cc,
    };
    let scale = halfspaces
        .iter()
        .map(|h| h.signed_distance(cc.center).abs())
        .fold(cc.center.norm(), f64::max)
        .max(f64::MIN_POSITIVE);
    if cc.radius <= FLAT_RADIUS * scale {
        return IntersectionOutcome::Empty;
    }
    if halfspaces.len() < 4 {
        return IntersectionOutcome::Unbounded;
    }
    intersect_about(halfspaces, cc.center)
}

/// Intersection about a known interior point `c`.
pub(crate) fn intersect_about(halfspaces: &[Halfspace], c: Point3) -> IntersectionOutcome {
    let dual = match build_dual_hull(halfspaces, c) {
        Ok(d) => d,
        Err(DualError::Hull(HullError::DegenerateInput)) => return IntersectionOutcome::Unbounded,
        Err(DualError::CenterOnBoundary) => return IntersectionOutcome::Empty,
        Err(_) => return IntersectionOutcome::Unbounded,
    };
    // the polytope is bounded iff the dual origin is strictly inside the dual hull
    for t in dual.mesh.triangles() {
        let [a, b, d] = t.map(|v| dual.mesh.position(v));
        if orient3(a, b, d, Point3::ZERO) != Sign::Negative {
            return IntersectionOutcome::Unbounded;
        }
    }
    match dual.extract_primal() {
        Ok(mesh) => IntersectionOutcome::Bounded(mesh),
        Err(_) => IntersectionOutcome::Unbounded,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull::{convex_hull, face_planes};
    use crate::samples;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hs(n: [f64; 3], b: f64) -> Halfspace {
        Halfspace::new(Point3::from_array(n), b).unwrap()
    }

    fn cube_planes() -> Vec<Halfspace> {
        let mut out = Vec::new();
        for k in 0..3 {
            for s in [1.0, -1.0] {
                let mut n = [0.0; 3];
                n[k] = s;
                out.push(hs(n, -0.5));
            }
        }
        out
    }

    /// Brute-force vertex enumeration: every feasible triple-plane intersection.
    fn enumerate_vertices(planes: &[Halfspace]) -> Vec<Point3> {
        let m = planes.len();
        let scale = planes.iter().map(|h| h.b.abs() / h.n.norm()).fold(1.0, f64::max);
        let mut out: Vec<Point3> = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    let (a, b, c) = (planes[i].n, planes[j].n, planes[k].n);
                    let det = a.dot(b.cross(c));
                    if det.abs() < 1e-12 * a.norm() * b.norm() * c.norm() {
                        continue;
                    }
                    let p = (b.cross(c) * -planes[i].b + c.cross(a) * -planes[j].b + a.cross(b) * -planes[k].b) / det;
                    if planes.iter().all(|h| h.signed_distance(p) <= 1e-9 * scale)
                        && !out.iter().any(|q| q.distance(p) < 1e-9 * scale)
                    {
                        out.push(p);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn cube_box() {
        let m = halfspace_intersection(&cube_planes());
        let m = m.mesh().unwrap();
        assert!((m.volume() - 1.0).abs() < 1e-14);
        assert_eq!(m.vertices.len(), 8);
        assert_eq!(m.faces.len(), 6);
    }

    #[test]
    fn redundant_plane_adds_no_face() {
        let mut p = cube_planes();
        p.push(hs([1.0, 0.0, 0.0], -10.0));
        let m = halfspace_intersection(&p);
        let m = m.mesh().unwrap();
        assert!((m.volume() - 1.0).abs() < 1e-14);
        assert_eq!(m.faces.len(), 6);
        assert!(!m.face_source.contains(&6));
    }

    #[test]
    fn flat_and_open_sets() {
        let wedge = [
            hs([1.0, 0.0, 0.0], 0.0),
            hs([-1.0, 0.0, 0.0], 0.0),
            hs([0.0, 1.0, 0.0], 0.0),
            hs([0.0, 0.0, 1.0], 0.0),
        ];
        assert_eq!(halfspace_intersection(&wedge), IntersectionOutcome::Empty);
        let mut five = cube_planes();
        five.remove(2);
        assert_eq!(halfspace_intersection(&five), IntersectionOutcome::Unbounded);
        let mut disjoint = cube_planes();
        disjoint.push(hs([-1.0, 0.0, 0.0], 2.0));
        assert_eq!(halfspace_intersection(&disjoint), IntersectionOutcome::Empty);
        assert_eq!(
            halfspace_intersection(&[hs([1.0, 0.0, 0.0], 0.0)]),
            IntersectionOutcome::Unbounded
        );
    }

    #[test]
    fn matches_vertex_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let m = rng.random_range(4..14);
            let planes: Vec<Halfspace> = samples::sphere_surface(&mut rng, m)
                .into_iter()
                .map(|n| hs(n.to_array(), -rng.random_range(0.5..2.0)))
                .collect();
            let brute = enumerate_vertices(&planes);
            match halfspace_intersection(&planes) {
                IntersectionOutcome::Bounded(mesh) => {
                    assert_eq!(mesh.vertices.len(), brute.len());
                    for v in &mesh.vertices {
                        assert!(brute.iter().any(|q| q.distance(*v) < 1e-9));
                    }
                }
                IntersectionOutcome::Unbounded => {
                    // the recession cone is nontrivial: some direction is not blocked
                    let open = samples::sphere_surface(&mut rng, 20000)
                        .into_iter()
                        .any(|d| planes.iter().all(|h| h.n.dot(d) <= 0.05));
                    assert!(open, "reported unbounded but no open direction found");
                }
                IntersectionOutcome::Empty => panic!("planes around the origin cannot be empty"),
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn hull_planes_reproduce_hull(seed in any::<u64>(), family in 0usize..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = samples::cloud(&mut rng, family, 200);
            let hull = convex_hull(&p).unwrap();
            let planes = face_planes(&hull, true);
            let out = halfspace_intersection(&planes.halfspaces);
            let mesh = out.mesh().expect("bounded");
            prop_assert!((mesh.volume() - hull.volume()).abs() <= 1e-9 * hull.volume());
            let tol = 1e-9 * hull.diagonal();
            for v in &mesh.vertices {
                for h in &planes.halfspaces {
                    prop_assert!(h.signed_distance(*v) <= tol);
                }
            }
        }
    }
}
