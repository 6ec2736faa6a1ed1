//! Polygonal primal meshes produced from dual hulls.

use crate::geometry::{polygon_area, polygon_area_vector, signed_volume_contribution, Aabb, Halfspace, Point3};

/// Closed polygonal surface with outward, counter-clockwise faces.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolyhedronMesh {
    pub vertices: Vec<Point3>,
    pub faces: Vec<Vec<u32>>,
    /// Index of the halfspace each face lies on.
    pub face_source: Vec<usize>,
}

impl PolyhedronMesh {
    pub fn face_points(&self, f: usize) -> Vec<Point3> {
        self.faces[f].iter().map(|&v| self.vertices[v as usize]).collect()
    }

    fn centroid(&self) -> Point3 {
        if self.vertices.is_empty() {
            return Point3::ZERO;
        }
        self.vertices.iter().fold(Point3::ZERO, |a, &p| a + p) / self.vertices.len() as f64
    }

    /// Enclosed volume by the divergence theorem, relative to the vertex centroid.
    pub fn volume(&self) -> f64 {
        let r = self.centroid();
        self.faces
            .iter()
            .map(|f| {
                let pts: Vec<Point3> = f.iter().map(|&v| self.vertices[v as usize] - r).collect();
                signed_volume_contribution(&pts)
            })
            .sum()
    }

    pub fn area(&self) -> f64 {
        (0..self.faces.len())
            .map(|f| polygon_area(&self.face_points(f)))
            .sum()
    }

    pub fn bounds(&self) -> Option<Aabb> {
        Aabb::from_points(&self.vertices)
    }

    /// Outward plane of face `f` from its Newell normal.
    pub fn face_plane(&self, f: usize) -> Option<Halfspace> {
        let pts = self.face_points(f);
        let n = polygon_area_vector(&pts);
        let c = pts.iter().fold(Point3::ZERO, |a, &p| a + p) / pts.len() as f64;
        Halfspace::through(n, c).ok()
    }

    /// Same mesh with every polygon fanned into triangles.
    pub fn triangulated(&self) -> PolyhedronMesh {
        let mut faces = Vec::new();
        let mut face_source = Vec::new();
        for (f, src) in self.faces.iter().zip(&self.face_source) {
            for k in 1..f.len().saturating_sub(1) {
                faces.push(vec![f[0], f[k], f[k + 1]]);
                face_source.push(*src);
            }
        }
        PolyhedronMesh {
            vertices: self.vertices.clone(),
            faces,
            face_source,
        }
    }

    /// Undirected edge count (each edge is shared by two faces).
    pub fn edge_count(&self) -> usize {
        self.faces.iter().map(Vec::len).sum::<usize>() / 2
    }
}

/// Connectivity-only polygon mesh, used for topological duals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PolygonConnectivity {
    pub vertex_count: usize,
    pub polygons: Vec<Vec<u32>>,
}

impl PolygonConnectivity {
    /// One polygon per vertex listing its incident faces counter-clockwise;
    /// dual vertex `f` corresponds to polygon `f` of `self`.
    ///
    /// Returns `None` if the mesh is not a closed, oriented 2-manifold.
    pub fn dual(&self) -> Option<PolygonConnectivity> {
        use std::collections::HashMap;
        let mut edge_face: HashMap<(u32, u32), u32> = HashMap::new();
        let mut corner_of: Vec<Option<(u32, usize)>> = vec![None; self.vertex_count];
        for (f, poly) in self.polygons.iter().enumerate() {
            let n = poly.len();
            for k in 0..n {
                let (a, b) = (poly[k], poly[(k + 1) % n]);
                if edge_face.insert((a, b), f as u32).is_some() {
                    return None;
                }
                corner_of[a as usize].get_or_insert((f as u32, k));
            }
        }
        let mut polygons = Vec::with_capacity(self.vertex_count);
        for (u, start) in corner_of.iter().enumerate() {
            let (f0, _) = (*start)?;
            let mut ring = Vec::new();
            let mut f = f0;
            loop {
                ring.push(f);
                let poly = &self.polygons[f as usize];
                let k = poly.iter().position(|&x| x as usize == u)?;
                let pred = poly[(k + poly.len() - 1) % poly.len()];
                f = *edge_face.get(&(u as u32, pred))?;
                if f == f0 {
                    break;
                }
                if ring.len() > self.polygons.len() {
                    return None;
                }
            }
            polygons.push(ring);
        }
        Some(PolygonConnectivity {
            vertex_count: self.polygons.len(),
            polygons,
        })
    }

    /// Canonical form: each polygon rotated to start at its smallest id, then sorted.
    pub fn canonical(&self) -> Vec<Vec<u32>> {
        let mut out: Vec<Vec<u32>> = self
            .polygons
            .iter()
            .map(|p| {
                let k = (0..p.len()).min_by_key(|&k| p[k]).unwrap_or(0);
                p[k..].iter().chain(&p[..k]).copied().collect()
            })
            .collect();
        out.sort();
        out
    }
}
