//! Polar duality about a fixed interior center `c`.
//!
//! A halfspace `n . x + b <= 0` with `c` strictly inside maps to the dual
//! point `phi = -n / (n . c + b)`. A dual face plane `eta . phi + beta = 0`
//! maps back to the primal vertex `c - eta / beta`. Dual coordinates are
//! relative to `c`, so the dual origin always corresponds to the center.

use crate::error::DualError;
use crate::geometry::{Halfspace, Point3};
use crate::halfedge::HalfedgeHull;
use crate::hull::convex_hull;
use crate::polymesh::PolyhedronMesh;

/// Relative guard for the center touching a halfspace boundary.
const BOUNDARY_TOL: f64 = 1e-12;

/// Relative guard for a dual plane passing through the origin.
const INFINITY_TOL: f64 = 1e-12;

/// Two dual triangles whose normalized planes differ by less than this
/// give the same primal vertex.
pub const COPLANAR_TOL: f64 = 1e-9;

/// Dual point of halfspace `source`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualVertex {
    pub phi: Point3,
    pub source: usize,
}

/// Plane `eta . phi + beta = 0` in dual space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualFacePlane {
    pub eta: Point3,
    pub beta: f64,
}

impl DualFacePlane {
    /// Plane through a counter-clockwise dual triangle; `eta` points away
    /// from the side the triangle faces inward to.
    pub fn through(a: Point3, b: Point3, c: Point3) -> Self {
        let eta = (b - a).cross(c - a);
        let centroid = (a + b + c) / 3.0;
        DualFacePlane {
            eta,
            beta: -eta.dot(centroid),
        }
    }

    /// Unit normal and signed distance of the origin, for comparisons.
    fn normalized(&self) -> (Point3, f64) {
        let len = self.eta.norm();
        (self.eta / len, self.beta / len)
    }
}

/// Dual point of `h` about `c`.
pub fn to_dual(h: &Halfspace, c: Point3) -> Result<Point3, DualError> {
    let s = h.eval(c);
    if s >= -BOUNDARY_TOL * h.n.norm() * (1.0 + c.norm()) {
        return Err(DualError::CenterOnBoundary);
    }
    Ok(-h.n / s)
}

/// Primal halfspace of dual point `phi` about `c`: `phi . (x - c) <= 1`.
pub fn halfspace_of_dual(phi: Point3, c: Point3) -> Halfspace {
    Halfspace {
        n: phi,
        b: -1.0 - phi.dot(c),
    }
}

/// Primal vertex of a dual face plane.
pub fn from_dual(plane: &DualFacePlane, c: Point3) -> Result<Point3, DualError> {
    // written so a NaN beta also lands here
    let finite = plane.beta.abs() > INFINITY_TOL * plane.eta.norm();
    if !finite {
        return Err(DualError::NearInfinitePrimalVertex);
    }
    Ok(c - plane.eta / plane.beta)
}

/// Dual hull of a halfspace set: the convex hull of its dual points.
#[derive(Debug, Clone)]
pub struct DualHull {
    /// Positions are dual points; vertex `v` came from halfspace `source[v]`.
    pub mesh: HalfedgeHull,
    pub source: Vec<usize>,
    /// Halfspaces whose dual point is not a hull vertex; they cannot bound the intersection.
    pub redundant: Vec<usize>,
    pub center: Point3,
}

pub fn build_dual_hull(halfspaces: &[Halfspace], c: Point3) -> Result<DualHull, DualError> {
    let phis = halfspaces
        .iter()
        .map(|h| to_dual(h, c))
        .collect::<Result<Vec<_>, _>>()?;
    let hull = convex_hull(&phis)?;
    let source: Vec<usize> = hull.source.iter().map(|&s| s as usize).collect();
    let mut on_hull = vec![false; halfspaces.len()];
    for &s in &source {
        on_hull[s] = true;
    }
    let redundant = (0..halfspaces.len()).filter(|&i| !on_hull[i]).collect();
    let mesh = HalfedgeHull::from_triangles(hull.vertices, &hull.triangles)?;
    Ok(DualHull {
        mesh,
        source,
        redundant,
        center: c,
    })
}

impl DualHull {
    /// Halfspaces of the alive dual vertices, in vertex-id order.
    pub fn halfspace_ids(&self) -> Vec<usize> {
        self.mesh.alive_vertices().map(|v| self.source[v as usize]).collect()
    }

    pub fn extract_primal(&self) -> Result<PolyhedronMesh, DualError> {
        extract_primal(&self.mesh, &self.source, self.center)
    }
}

/// Primal polyhedron of a dual mesh. Each alive dual vertex becomes a
/// primal face tagged with `source[v]`; adjacent coplanar dual triangles
/// collapse into one primal vertex.
pub fn extract_primal(mesh: &HalfedgeHull, source: &[usize], c: Point3) -> Result<PolyhedronMesh, DualError> {
    let (conn, face_ids) = mesh.topological_dual();
    let planes: Vec<DualFacePlane> = face_ids
        .iter()
        .map(|&f| {
            let [a, b, d] = mesh.face_vertices(f).map(|v| mesh.position(v));
            DualFacePlane::through(a, b, d)
        })
        .collect();
    let rel: Vec<Point3> = planes
        .iter()
        .map(|p| from_dual(p, Point3::ZERO))
        .collect::<Result<_, _>>()?;

    // union coplanar neighbors: consecutive faces around a dual vertex share an edge
    let mut parent: Vec<usize> = (0..planes.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let normalized: Vec<(Point3, f64)> = planes.iter().map(DualFacePlane::normalized).collect();
    for ring in &conn.polygons {
        for k in 0..ring.len() {
            let (f, g) = (ring[k] as usize, ring[(k + 1) % ring.len()] as usize);
            let ((nf, df), (ng, dg)) = (normalized[f], normalized[g]);
            let scale = df.abs().max(dg.abs());
            if (nf - ng).norm() < COPLANAR_TOL && (df - dg).abs() < COPLANAR_TOL * scale {
                let (rf, rg) = (find(&mut parent, f), find(&mut parent, g));
                if rf != rg {
                    parent[rf.max(rg)] = rf.min(rg);
                }
            }
        }
    }

    let mut group_of = vec![usize::MAX; planes.len()];
    let mut sums: Vec<(Point3, usize)> = Vec::new();
    for f in 0..planes.len() {
        let r = find(&mut parent, f);
        if group_of[r] == usize::MAX {
            group_of[r] = sums.len();
            sums.push((Point3::ZERO, 0));
        }
        let g = group_of[r];
        group_of[f] = g;
        sums[g].0 += rel[f];
        sums[g].1 += 1;
    }
    let vertices: Vec<Point3> = sums.iter().map(|&(s, n)| c + s / n as f64).collect();

    let mut faces = Vec::with_capacity(conn.polygons.len());
    let mut face_source = Vec::with_capacity(conn.polygons.len());
    for (ring, v) in conn.polygons.iter().zip(mesh.alive_vertices()) {
        let mut poly: Vec<u32> = Vec::with_capacity(ring.len());
        for &f in ring {
            let g = group_of[f as usize] as u32;
            if poly.last() != Some(&g) {
                poly.push(g);
            }
        }
        while poly.len() > 1 && poly.first() == poly.last() {
            poly.pop();
        }
        if poly.len() >= 3 {
            faces.push(poly);
            face_source.push(source[v as usize]);
        }
    }
    Ok(PolyhedronMesh {
        vertices,
        faces,
        face_source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{orient3, Sign};

    fn hs(n: [f64; 3], b: f64) -> Halfspace {
        Halfspace::new(Point3::from_array(n), b).unwrap()
    }

    pub(crate) fn cube_planes(h: f64) -> Vec<Halfspace> {
        let mut out = Vec::new();
        for k in 0..3 {
            for s in [1.0, -1.0] {
                let mut n = [0.0; 3];
                n[k] = s;
                out.push(hs(n, -h));
            }
        }
        out
    }

    #[test]
    fn to_dual_examples() {
        let c = Point3::ZERO;
        assert_eq!(to_dual(&hs([1.0, 0.0, 0.0], -0.5), c).unwrap(), Point3::new(2.0, 0.0, 0.0));
        assert_eq!(to_dual(&hs([-1.0, 0.0, 0.0], -0.5), c).unwrap(), Point3::new(-2.0, 0.0, 0.0));
        // -(1,0,0) / (0.25 - 0.5)
        let phi = to_dual(&hs([1.0, 0.0, 0.0], -0.5), Point3::new(0.25, 0.0, 0.0)).unwrap();
        assert_eq!(phi, Point3::new(4.0, 0.0, 0.0));
        assert_eq!(
            to_dual(&hs([1.0, 0.0, 0.0], -0.5), Point3::new(0.5, 0.0, 0.0)),
            Err(DualError::CenterOnBoundary)
        );
        assert_eq!(
            to_dual(&hs([1.0, 0.0, 0.0], -0.5), Point3::new(0.7, 0.0, 0.0)),
            Err(DualError::CenterOnBoundary)
        );
    }

    #[test]
    fn from_dual_examples() {
        let a = Point3::new(2.0, 0.0, 0.0);
        let b = Point3::new(0.0, 2.0, 0.0);
        let d = Point3::new(0.0, 0.0, 2.0);
        let p = DualFacePlane::through(a, b, d);
        // oracle: plane fit gives eta parallel to (1,1,1) and beta/|eta| = -2/sqrt(3)
        let (n, off) = p.normalized();
        assert!((n - Point3::new(1.0, 1.0, 1.0) / 3f64.sqrt()).norm() < 1e-15);
        assert!((off + 2.0 / 3f64.sqrt()).abs() < 1e-15);
        let v = from_dual(&p, Point3::ZERO).unwrap();
        assert!((v - Point3::new(0.5, 0.5, 0.5)).norm() < 1e-15);
        let q = DualFacePlane {
            eta: Point3::new(0.0, 0.0, 1.0),
            beta: -1.0,
        };
        assert_eq!(from_dual(&q, Point3::ZERO).unwrap(), Point3::new(0.0, 0.0, 1.0));
        assert_eq!(from_dual(&q, Point3::new(1.0, 1.0, 0.0)).unwrap(), Point3::new(1.0, 1.0, 1.0));
        let flat = DualFacePlane {
            eta: Point3::new(0.0, 0.0, 1.0),
            beta: 0.0,
        };
        assert_eq!(from_dual(&flat, Point3::ZERO), Err(DualError::NearInfinitePrimalVertex));
    }

    #[test]
    fn dual_halfspace_roundtrip() {
        let c = Point3::new(0.1, -0.2, 0.3);
        let h = hs([1.0, 2.0, -0.5], -3.0);
        let back = halfspace_of_dual(to_dual(&h, c).unwrap(), c).normalized();
        let h = h.normalized();
        assert!((back.n - h.n).norm() < 1e-15 && (back.b - h.b).abs() < 1e-15);
    }

    #[test]
    fn cube_dual_is_octahedron() {
        let planes = cube_planes(0.5);
        let d = build_dual_hull(&planes, Point3::ZERO).unwrap();
        assert_eq!(d.mesh.vertex_count(), 6);
        assert_eq!(d.mesh.face_count(), 8);
        assert!(d.redundant.is_empty());
        for v in d.mesh.alive_vertices() {
            let oracle = to_dual(&planes[d.source[v as usize]], Point3::ZERO).unwrap();
            assert_eq!(d.mesh.position(v), oracle);
            assert_eq!(oracle.norm(), 2.0);
        }
        let primal = d.extract_primal().unwrap();
        assert_eq!(primal.vertices.len(), 8);
        assert_eq!(primal.faces.len(), 6);
        assert!((primal.volume() - 1.0).abs() < 1e-14);
        for v in &primal.vertices {
            for k in 0..3 {
                assert!((v[k].abs() - 0.5).abs() < 1e-12);
            }
        }
        // faces are counter-clockwise from outside and lie on their planes
        for (f, &s) in primal.face_source.iter().enumerate() {
            let plane = primal.face_plane(f).unwrap().normalized();
            assert!((plane.n - planes[s].n).norm() < 1e-12);
            for p in primal.face_points(f) {
                assert!(planes[s].eval(p).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn redundant_plane_is_interior() {
        let mut planes = cube_planes(0.5);
        planes.push(hs([1.0, 0.0, 0.0], -10.0));
        let d = build_dual_hull(&planes, Point3::ZERO).unwrap();
        assert_eq!(d.redundant, vec![6]);
        assert_eq!(to_dual(&planes[6], Point3::ZERO).unwrap(), Point3::new(0.1, 0.0, 0.0));
        let primal = d.extract_primal().unwrap();
        assert!((primal.volume() - 1.0).abs() < 1e-14);
        assert!(!primal.face_source.contains(&6));
    }

    #[test]
    fn regular_tetrahedron_roundtrip() {
        let v = [
            Point3::new(1.0, 1.0, 1.0),
            Point3::new(1.0, -1.0, -1.0),
            Point3::new(-1.0, 1.0, -1.0),
            Point3::new(-1.0, -1.0, 1.0),
        ];
        let planes: Vec<Halfspace> = (0..4)
            .map(|i| {
                let opp = v[i];
                let n = -opp;
                Halfspace::through(n, v[(i + 1) % 4]).unwrap()
            })
            .collect();
        let d = build_dual_hull(&planes, Point3::ZERO).unwrap();
        assert_eq!(d.mesh.vertex_count(), 4);
        assert_eq!(d.mesh.face_count(), 4);
        let primal = d.extract_primal().unwrap();
        // edge 2*sqrt(2): volume a^3 / (6 sqrt 2)
        let a = 2.0 * 2f64.sqrt();
        assert!((primal.volume() - a.powi(3) / (6.0 * 2f64.sqrt())).abs() < 1e-13);
        for p in &primal.vertices {
            assert!(v.iter().any(|q| (*q - *p).norm() < 1e-13));
        }
    }

    #[test]
    fn origin_is_inside_dual_hull() {
        let d = build_dual_hull(&cube_planes(0.5), Point3::new(0.1, 0.2, -0.3)).unwrap();
        for t in d.mesh.triangles() {
            let [a, b, c] = t.map(|v| d.mesh.position(v));
            assert_eq!(orient3(a, b, c, Point3::ZERO), Sign::Negative);
        }
        let primal = d.extract_primal().unwrap();
        assert!((primal.volume() - 1.0).abs() < 1e-13);
    }
}
