//! Convex hulls of point sets, their face planes, and halfspace intersection.

mod intersection;
mod planes;
mod quickhull;

pub use intersection::{halfspace_intersection, halfspace_intersection_seeded, IntersectionOutcome};
pub use planes::{face_planes, face_planes_seeded, FacePlaneSet, PlaneSetError};

use crate::error::HullError;
use crate::geometry::{orient3, signed_volume_contribution, Aabb, Point3, Sign};

/// Closed triangulated convex polyhedron with outward, counter-clockwise triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangulatedHull {
    pub vertices: Vec<Point3>,
    pub triangles: Vec<[u32; 3]>,
    /// Input index of each hull vertex.
    pub source: Vec<u32>,
}

impl TriangulatedHull {
    pub fn triangle(&self, t: usize) -> [Point3; 3] {
        self.triangles[t].map(|v| self.vertices[v as usize])
    }

    fn centroid(&self) -> Point3 {
        self.vertices.iter().fold(Point3::ZERO, |a, &p| a + p) / self.vertices.len() as f64
    }

    pub fn volume(&self) -> f64 {
        let r = self.centroid();
        (0..self.triangles.len())
            .map(|t| signed_volume_contribution(&self.triangle(t).map(|p| p - r)))
            .sum()
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| {
                let [a, b, c] = self.triangle(t);
                0.5 * (b - a).cross(c - a).norm()
            })
            .sum()
    }

    pub fn bounds(&self) -> Aabb {
        Aabb::from_points(&self.vertices).expect("a hull has vertices")
    }

    pub fn diagonal(&self) -> f64 {
        self.bounds().diagonal()
    }

    /// Undirected edges; `3F = 2E` on a closed triangulation.
    pub fn edge_count(&self) -> usize {
        self.triangles.len() * 3 / 2
    }

    /// True if `p` is on the inner side of every face plane, up to `tol` in distance.
    pub fn contains(&self, p: Point3, tol: f64) -> bool {
        (0..self.triangles.len()).all(|t| {
            let [a, b, c] = self.triangle(t);
            let n = (b - a).cross(c - a);
            let len = n.norm();
            len == 0.0 || n.dot(p - a) <= tol * len
        })
    }

    /// Exact convexity check: no hull vertex lies strictly above any triangle.
    pub fn is_convex(&self) -> bool {
        (0..self.triangles.len()).all(|t| {
            let [a, b, c] = self.triangle(t);
            self.vertices.iter().all(|&p| orient3(a, b, c, p) != Sign::Positive)
        })
    }
}

/// Convex hull of `points`. Interior and duplicate points are dropped; hull
/// vertices keep their input order.
pub fn convex_hull(points: &[Point3]) -> Result<TriangulatedHull, HullError> {
    quickhull::quickhull(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn cube_corners() -> Vec<Point3> {
        (0..8u8)
            .map(|i| Point3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
            .collect()
    }

    fn euler_ok(h: &TriangulatedHull) -> bool {
        h.vertices.len() as i64 - h.edge_count() as i64 + h.triangles.len() as i64 == 2
    }

    fn closed(h: &TriangulatedHull) -> bool {
        let mut e: Vec<(u32, u32)> = h
            .triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3])))
            .collect();
        e.sort_unstable();
        let n = e.len();
        e.dedup();
        n == e.len() && e.iter().all(|&(a, b)| e.binary_search(&(b, a)).is_ok())
    }

    #[test]
    fn cube_hull() {
        let h = convex_hull(&cube_corners()).unwrap();
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.triangles.len(), 12);
        assert!((h.volume() - 1.0).abs() < 1e-14);
        assert!((h.area() - 6.0).abs() < 1e-14);
        assert!(euler_ok(&h) && closed(&h) && h.is_convex());
        assert_eq!(h.source, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn interior_point_is_dropped() {
        let mut p = cube_corners();
        p.insert(3, Point3::new(0.5, 0.5, 0.5));
        p.push(Point3::new(1.0, 1.0, 1.0));
        let h = convex_hull(&p).unwrap();
        assert_eq!(h.vertices.len(), 8);
        assert!(!h.source.contains(&3));
        assert!((h.volume() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_volume_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = samples::sphere_surface(&mut rng, 1000);
        let h = convex_hull(&p).unwrap();
        let ball = 4.0 * std::f64::consts::PI / 3.0;
        let v = h.volume();
        assert!(v > 0.95 * ball && v < ball, "{v}");
        assert_eq!(h.vertices.len(), 1000);
        assert!(euler_ok(&h) && closed(&h) && h.is_convex());
    }

    #[test]
    fn degenerate_inputs() {
        let flat: Vec<Point3> = (0..10).map(|i| Point3::new(i as f64, (i * i) as f64, 0.0)).collect();
        assert_eq!(convex_hull(&flat), Err(HullError::DegenerateInput));
        let line: Vec<Point3> = (0..10).map(|i| Point3::new(i as f64, 2.0 * i as f64, 3.0)).collect();
        assert_eq!(convex_hull(&line), Err(HullError::DegenerateInput));
        assert_eq!(convex_hull(&[Point3::ZERO; 6]), Err(HullError::DegenerateInput));
        assert_eq!(convex_hull(&cube_corners()[..3]), Err(HullError::TooFewPoints(3)));
    }

    #[test]
    fn grid_with_many_coplanar_points() {
        let mut p = Vec::new();
        for i in 0..6 {
            for j in 0..6 {
                for k in 0..6 {
                    p.push(Point3::new(i as f64, j as f64, k as f64));
                }
            }
        }
        let h = convex_hull(&p).unwrap();
        assert!((h.volume() - 125.0).abs() < 1e-9);
        assert!(euler_ok(&h) && closed(&h) && h.is_convex());
        for q in &p {
            assert!(h.contains(*q, 1e-12));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn hull_invariants(seed in any::<u64>(), n in 4usize..300, family in 0usize..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = samples::cloud(&mut rng, family, n);
            let h = convex_hull(&p).unwrap();
            prop_assert!(euler_ok(&h));
            prop_assert!(closed(&h));
            prop_assert!(h.is_convex());
            let tol = 1e-9 * h.diagonal();
            for q in &p {
                prop_assert!(h.contains(*q, tol));
            }
            let again = convex_hull(&h.vertices).unwrap();
            prop_assert_eq!(again.vertices.len(), h.vertices.len());
            prop_assert_eq!(&again.vertices, &h.vertices);
        }

        #[test]
        fn volume_is_rotation_invariant(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = samples::cloud(&mut rng, 2, 200);
            let rot = samples::random_rotation(&mut rng);
            let q: Vec<Point3> = p.iter().map(|&x| rot.apply(x)).collect();
            let (v0, v1) = (convex_hull(&p).unwrap().volume(), convex_hull(&q).unwrap().volume());
            prop_assert!((v0 - v1).abs() <= 1e-9 * v0);
        }

        #[test]
        fn gauss_volume_matches_apex_tetrahedra(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = samples::cloud(&mut rng, 0, 100);
            let h = convex_hull(&p).unwrap();
            let apex = h.vertices[0];
            let tets: f64 = (0..h.triangles.len())
                .map(|t| {
                    let [a, b, c] = h.triangle(t);
                    (a - apex).dot((b - apex).cross(c - apex)) / 6.0
                })
                .sum();
            prop_assert!((h.volume() - tets).abs() <= 1e-12 * tets.abs());
        }
    }
}
