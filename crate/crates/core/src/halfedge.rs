//! Half-edge connectivity for closed triangulated polyhedra.
//!
//! Supports ordered one-ring queries, vertex removal with a caller-supplied
//! retriangulation of the hole, and extraction of the topological dual.
//! Removed elements are tombstoned; vertex ids never change, so they can be
//! held in a priority queue across removals. Removal recycles the hole's
//! faces and spoke half-edges, so storage never grows.

use std::collections::HashMap;

use crate::error::MeshError;
use crate::geometry::Point3;
use crate::polymesh::PolygonConnectivity;

pub type VertexId = u32;
pub type FaceId = u32;
type HalfedgeId = u32;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Vertex {
    pos: Point3,
    halfedge: HalfedgeId,
    alive: bool,
}

#[derive(Debug, Clone, Copy)]
struct HalfEdge {
    to: VertexId,
    next: HalfedgeId,
    twin: HalfedgeId,
    face: FaceId,
}

#[derive(Debug, Clone)]
struct Face {
    halfedge: HalfedgeId,
    alive: bool,
}

/// Cyclically ordered neighborhood of a vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneRing {
    pub center: VertexId,
    /// Neighbors counter-clockwise as seen from outside.
    pub neighbors: Vec<VertexId>,
    /// `faces[k]` is the triangle `(center, neighbors[k], neighbors[k + 1])`.
    pub faces: Vec<FaceId>,
}

impl OneRing {
    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    /// The fan `(center, n_k, n_{k+1})` as vertex triples.
    pub fn fan(&self) -> impl Iterator<Item = [VertexId; 3]> + '_ {
        let k = self.neighbors.len();
        (0..k).map(move |i| [self.center, self.neighbors[i], self.neighbors[(i + 1) % k]])
    }
}

/// Triangulation of a one-ring polygon; its boundary must traverse the ring in order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LocalTriangulation {
    pub triangles: Vec<[VertexId; 3]>,
}

/// Mutable closed triangle mesh.
#[derive(Debug, Clone)]
pub struct HalfedgeHull {
    vertices: Vec<Vertex>,
    halfedges: Vec<HalfEdge>,
    faces: Vec<Face>,
    alive_vertices: usize,
    alive_faces: usize,
}

impl HalfedgeHull {
    /// Builds the mesh from outward-oriented triangles. Positions that no
    /// triangle references start out dead.
    pub fn from_triangles(positions: Vec<Point3>, triangles: &[[u32; 3]]) -> Result<Self, MeshError> {
        let nv = positions.len();
        let mut vertices: Vec<Vertex> = positions
            .into_iter()
            .map(|pos| Vertex {
                pos,
                halfedge: NONE,
                alive: false,
            })
            .collect();
        let mut halfedges = Vec::with_capacity(triangles.len() * 3);
        let mut faces = Vec::with_capacity(triangles.len());
        let mut directed: HashMap<(u32, u32), HalfedgeId> = HashMap::with_capacity(triangles.len() * 3);
        for (f, t) in triangles.iter().enumerate() {
            if t.iter().any(|&v| v as usize >= nv) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(MeshError::NotManifold(format!("bad triangle {t:?}")));
            }
            let base = halfedges.len() as u32;
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if directed.insert((a, b), base + k as u32).is_some() {
                    return Err(MeshError::NotManifold(format!("directed edge {a}->{b} repeated")));
                }
                halfedges.push(HalfEdge {
                    to: b,
                    next: base + ((k + 1) % 3) as u32,
                    twin: NONE,
                    face: f as u32,
                });
                vertices[a as usize].halfedge = base + k as u32;
                vertices[a as usize].alive = true;
            }
            faces.push(Face {
                halfedge: base,
                alive: true,
            });
        }
        for (&(a, b), &h) in &directed {
            let twin = *directed
                .get(&(b, a))
                .ok_or_else(|| MeshError::NotManifold(format!("edge {a}->{b} has no twin")))?;
            halfedges[h as usize].twin = twin;
        }
        let mesh = HalfedgeHull {
            alive_vertices: vertices.iter().filter(|v| v.alive).count(),
            alive_faces: faces.len(),
            vertices,
            halfedges,
            faces,
        };
        // one fan per vertex: a pinched vertex has a shorter ring than its degree
        let mut degree = vec![0usize; nv];
        for t in triangles {
            for &v in t {
                degree[v as usize] += 1;
            }
        }
        for v in 0..nv as u32 {
            if mesh.vertices[v as usize].alive && mesh.ring_halfedges(v).len() != degree[v as usize] {
                return Err(MeshError::NotManifold(format!("vertex {v} is not a single fan")));
            }
        }
        Ok(mesh)
    }

    pub fn vertex_capacity(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.alive_vertices
    }

    pub fn face_count(&self) -> usize {
        self.alive_faces
    }

    /// Closed triangle mesh: `3F = 2E`.
    pub fn edge_count(&self) -> usize {
        self.alive_faces * 3 / 2
    }

    pub fn is_alive(&self, v: VertexId) -> bool {
        self.vertices.get(v as usize).is_some_and(|x| x.alive)
    }

    pub fn position(&self, v: VertexId) -> Point3 {
        self.vertices[v as usize].pos
    }

    pub fn positions(&self) -> impl Iterator<Item = Point3> + '_ {
        self.vertices.iter().map(|v| v.pos)
    }

    pub fn alive_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| v.alive)
            .map(|(i, _)| i as VertexId)
    }

    pub fn face_is_alive(&self, f: FaceId) -> bool {
        self.faces.get(f as usize).is_some_and(|x| x.alive)
    }

    pub fn face_capacity(&self) -> usize {
        self.faces.len()
    }

    /// Vertices of face `f` in counter-clockwise order.
    pub fn face_vertices(&self, f: FaceId) -> [VertexId; 3] {
        let h0 = self.faces[f as usize].halfedge;
        let h1 = self.halfedges[h0 as usize].next;
        let h2 = self.halfedges[h1 as usize].next;
        [
            self.halfedges[h2 as usize].to,
            self.halfedges[h0 as usize].to,
            self.halfedges[h1 as usize].to,
        ]
    }

    pub fn alive_faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        self.faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive)
            .map(|(i, _)| i as FaceId)
    }

    pub fn triangles(&self) -> Vec<[VertexId; 3]> {
        self.alive_faces().map(|f| self.face_vertices(f)).collect()
    }

    /// Outgoing half-edges of `v`, counter-clockwise.
    fn ring_halfedges(&self, v: VertexId) -> Vec<HalfedgeId> {
        let start = self.vertices[v as usize].halfedge;
        let mut out = Vec::with_capacity(6);
        let mut h = start;
        loop {
            out.push(h);
            let prev = self.halfedges[self.halfedges[h as usize].next as usize].next;
            h = self.halfedges[prev as usize].twin;
            if h == start || out.len() > self.halfedges.len() {
                break;
            }
        }
        out
    }

    pub fn valence(&self, v: VertexId) -> usize {
        self.ring_halfedges(v).len()
    }

    pub fn one_ring(&self, v: VertexId) -> Result<OneRing, MeshError> {
        if !self.is_alive(v) {
            return Err(MeshError::DeadVertex(v));
        }
        let hs = self.ring_halfedges(v);
        Ok(OneRing {
            center: v,
            neighbors: hs.iter().map(|&h| self.halfedges[h as usize].to).collect(),
            faces: hs.iter().map(|&h| self.halfedges[h as usize].face).collect(),
        })
    }

    /// True if `a` and `b` share an edge.
    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.ring_halfedges(a)
            .iter()
            .any(|&h| self.halfedges[h as usize].to == b)
    }

    /// Checks that `tri` fills the hole left by removing `ring.center`
    /// without creating duplicate edges.
    pub fn check_triangulation(&self, ring: &OneRing, tri: &LocalTriangulation) -> Result<(), MeshError> {
        let k = ring.len();
        let mismatch = |m: String| Err(MeshError::BoundaryMismatch(m));
        if tri.triangles.len() + 2 != k {
            return mismatch(format!("{} triangles for a ring of {k}", tri.triangles.len()));
        }
        let pos = |v: VertexId| ring.neighbors.iter().position(|&n| n == v);
        let mut directed: Vec<(u32, u32)> = Vec::with_capacity(3 * k);
        for t in &tri.triangles {
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return mismatch(format!("degenerate triangle {t:?}"));
            }
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                if pos(a).is_none() {
                    return mismatch(format!("vertex {a} not in the ring"));
                }
                if directed.contains(&(a, b)) {
                    return mismatch(format!("edge {a}->{b} used twice"));
                }
                directed.push((a, b));
            }
        }
        for &(a, b) in &directed {
            let (ia, ib) = (pos(a).unwrap(), pos(b).unwrap());
            if (ia + 1) % k == ib {
                continue;
            }
            if (ib + 1) % k == ia {
                return mismatch(format!("boundary edge {a}->{b} runs backwards"));
            }
            if !directed.contains(&(b, a)) {
                return mismatch(format!("interior edge {a}->{b} is unpaired"));
            }
            if a < b && self.has_edge(a, b) {
                return mismatch(format!("edge {a}-{b} already exists outside the ring"));
            }
        }
        for i in 0..k {
            let e = (ring.neighbors[i], ring.neighbors[(i + 1) % k]);
            if !directed.contains(&e) {
                return mismatch(format!("boundary edge {}->{} missing", e.0, e.1));
            }
        }
        Ok(())
    }

    /// Deletes `v` and fills its one-ring with `tri`.
    pub fn remove_vertex(&mut self, v: VertexId, tri: &LocalTriangulation) -> Result<(), MeshError> {
        if !self.is_alive(v) {
            return Err(MeshError::DeadVertex(v));
        }
        if self.alive_vertices <= 4 {
            return Err(MeshError::MinimalComplex);
        }
        let ring = self.one_ring(v)?;
        self.check_triangulation(&ring, tri)?;
        let k = ring.len();

        // boundary[i]: n_i -> n_{i+1}; spokes are recycled for interior edges
        let outgoing = self.ring_halfedges(v);
        let mut boundary = Vec::with_capacity(k);
        let mut spare: Vec<HalfedgeId> = Vec::with_capacity(2 * k);
        for &h in &outgoing {
            let b = self.halfedges[h as usize].next;
            boundary.push(b);
            spare.push(h);
            spare.push(self.halfedges[b as usize].next);
        }
        let mut spare_faces: Vec<FaceId> = ring.faces.clone();
        let pos_in_ring = |x: VertexId| ring.neighbors.iter().position(|&n| n == x).unwrap();

        let mut interior: Vec<((u32, u32), HalfedgeId)> = Vec::with_capacity(2 * k);
        for t in &tri.triangles {
            let f = spare_faces.pop().expect("k - 2 <= k faces");
            let mut hs = [NONE; 3];
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                let ia = pos_in_ring(a);
                hs[e] = if ring.neighbors[(ia + 1) % k] == b {
                    boundary[ia]
                } else {
                    let h = spare.pop().expect("enough spokes for interior edges");
                    interior.push(((a, b), h));
                    h
                };
            }
            for e in 0..3 {
                let he = &mut self.halfedges[hs[e] as usize];
                he.to = t[(e + 1) % 3];
                he.next = hs[(e + 1) % 3];
                he.face = f;
            }
            self.faces[f as usize].halfedge = hs[0];
        }
        for &((a, b), h) in &interior {
            let twin = interior
                .iter()
                .find(|(e, _)| *e == (b, a))
                .map(|&(_, t)| t)
                .expect("interior edges are paired");
            self.halfedges[h as usize].twin = twin;
        }
        for (i, &n) in ring.neighbors.iter().enumerate() {
            self.vertices[n as usize].halfedge = boundary[i];
        }
        for h in spare {
            self.halfedges[h as usize] = HalfEdge {
                to: NONE,
                next: NONE,
                twin: NONE,
                face: NONE,
            };
        }
        for f in spare_faces {
            self.faces[f as usize].alive = false;
        }
        self.vertices[v as usize].alive = false;
        self.vertices[v as usize].halfedge = NONE;
        self.alive_vertices -= 1;
        self.alive_faces -= 2;
        Ok(())
    }

    /// Revives dead vertex `v` over the faces of `tri`, coning the ring
    /// `neighbors` to `v`. Inverse of [`remove_vertex`](Self::remove_vertex).
    pub fn reinsert_vertex(
        &mut self,
        v: VertexId,
        neighbors: &[VertexId],
        tri: &LocalTriangulation,
    ) -> Result<(), MeshError> {
        if self.is_alive(v) {
            return Err(MeshError::BoundaryMismatch(format!("vertex {v} is alive")));
        }
        let k = neighbors.len();
        if tri.triangles.len() + 2 != k {
            return Err(MeshError::BoundaryMismatch("triangle count".into()));
        }
        // locate each triangle of tri as a live face
        let mut tri_faces = Vec::with_capacity(k - 2);
        for t in &tri.triangles {
            let f = self
                .ring_halfedges(t[0])
                .into_iter()
                .find(|&h| self.halfedges[h as usize].to == t[1])
                .map(|h| self.halfedges[h as usize].face)
                .filter(|&f| {
                    let fv = self.face_vertices(f);
                    (0..3).any(|r| fv[r] == t[0] && fv[(r + 1) % 3] == t[1] && fv[(r + 2) % 3] == t[2])
                })
                .ok_or_else(|| MeshError::BoundaryMismatch(format!("{t:?} is not a face")))?;
            tri_faces.push(f);
        }
        let mut boundary = Vec::with_capacity(k);
        for i in 0..k {
            let (a, b) = (neighbors[i], neighbors[(i + 1) % k]);
            let h = self
                .ring_halfedges(a)
                .into_iter()
                .find(|&h| self.halfedges[h as usize].to == b && tri_faces.contains(&self.halfedges[h as usize].face))
                .ok_or_else(|| MeshError::BoundaryMismatch(format!("boundary edge {a}->{b} missing")))?;
            boundary.push(h);
        }
        let mut spare: Vec<HalfedgeId> = Vec::with_capacity(2 * k);
        for &f in &tri_faces {
            let h0 = self.faces[f as usize].halfedge;
            let mut h = h0;
            loop {
                if !boundary.contains(&h) {
                    spare.push(h);
                }
                h = self.halfedges[h as usize].next;
                if h == h0 {
                    break;
                }
            }
        }
        spare.extend(
            self.halfedges
                .iter()
                .enumerate()
                .filter(|(_, he)| he.face == NONE)
                .map(|(i, _)| i as HalfedgeId)
                .take(2 * k - spare.len()),
        );
        let mut faces = tri_faces.clone();
        faces.extend(
            self.faces
                .iter()
                .enumerate()
                .filter(|(_, f)| !f.alive)
                .map(|(i, _)| i as FaceId)
                .take(2),
        );
        if spare.len() != 2 * k || faces.len() != k {
            return Err(MeshError::BoundaryMismatch("no free storage".into()));
        }
        // face i = (v, n_i, n_{i+1}) with halfedges out_i, boundary_i, in_i
        for i in 0..k {
            let (out, inn) = (spare[2 * i], spare[2 * i + 1]);
            let f = faces[i];
            let b = boundary[i];
            self.halfedges[out as usize] = HalfEdge {
                to: neighbors[i],
                next: b,
                twin: NONE,
                face: f,
            };
            self.halfedges[b as usize].next = inn;
            self.halfedges[b as usize].face = f;
            self.halfedges[inn as usize] = HalfEdge {
                to: v,
                next: out,
                twin: NONE,
                face: f,
            };
            self.faces[f as usize] = Face {
                halfedge: out,
                alive: true,
            };
        }
        for i in 0..k {
            let inn = spare[2 * i + 1];
            let next_out = spare[2 * ((i + 1) % k)];
            self.halfedges[inn as usize].twin = next_out;
            self.halfedges[next_out as usize].twin = inn;
        }
        for (i, &n) in neighbors.iter().enumerate() {
            self.vertices[n as usize].halfedge = boundary[i];
        }
        self.vertices[v as usize].alive = true;
        self.vertices[v as usize].halfedge = spare[0];
        self.alive_vertices += 1;
        self.alive_faces += 2;
        Ok(())
    }

    /// Connectivity of the dual: one polygon per alive vertex (in vertex-id
    /// order) listing compact face indices counter-clockwise. Also returns
    /// the face id behind each compact index.
    pub fn topological_dual(&self) -> (PolygonConnectivity, Vec<FaceId>) {
        let mut compact = vec![NONE; self.faces.len()];
        let mut face_ids = Vec::with_capacity(self.alive_faces);
        for f in self.alive_faces() {
            compact[f as usize] = face_ids.len() as u32;
            face_ids.push(f);
        }
        let polygons = self
            .alive_vertices()
            .map(|v| {
                self.ring_halfedges(v)
                    .iter()
                    .map(|&h| compact[self.halfedges[h as usize].face as usize])
                    .collect()
            })
            .collect();
        (
            PolygonConnectivity {
                vertex_count: face_ids.len(),
                polygons,
            },
            face_ids,
        )
    }

    /// Full structural check; used by tests.
    pub fn validate(&self) -> Result<(), String> {
        let mut half_alive = 0;
        for (i, he) in self.halfedges.iter().enumerate() {
            if he.face == NONE {
                continue;
            }
            half_alive += 1;
            if !self.faces[he.face as usize].alive {
                return Err(format!("halfedge {i} on dead face"));
            }
            if self.halfedges[he.twin as usize].twin != i as u32 {
                return Err(format!("twin(twin({i})) != {i}"));
            }
            let n1 = self.halfedges[he.next as usize].next;
            let n2 = self.halfedges[n1 as usize].next;
            if n2 != i as u32 {
                return Err(format!("face cycle at {i} is not a triangle"));
            }
            if !self.vertices[he.to as usize].alive {
                return Err(format!("halfedge {i} points at dead vertex"));
            }
            let origin = self.halfedges[he.twin as usize].to;
            if origin == he.to {
                return Err(format!("halfedge {i} is a loop"));
            }
        }
        for v in self.alive_vertices() {
            let h = self.vertices[v as usize].halfedge;
            if self.halfedges[self.halfedges[h as usize].twin as usize].to != v {
                return Err(format!("vertex {v} halfedge does not start at it"));
            }
            let ring = self.one_ring(v).map_err(|e| e.to_string())?;
            if ring.len() < 3 {
                return Err(format!("vertex {v} has valence {}", ring.len()));
            }
            let mut seen = ring.neighbors.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != ring.len() {
                return Err(format!("vertex {v} has a repeated neighbor"));
            }
        }
        let (v, e, f) = (self.alive_vertices as i64, half_alive as i64 / 2, self.alive_faces as i64);
        if half_alive != 3 * self.alive_faces {
            return Err("halfedge count does not match faces".into());
        }
        if v - e + f != 2 {
            return Err(format!("Euler characteristic {} != 2", v - e + f));
        }
        Ok(())
    }
}
