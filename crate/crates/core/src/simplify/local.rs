//! Per-vertex removal geometry: retriangulating the hole and measuring the cap.

use crate::dual::{from_dual, DualFacePlane};
use crate::geometry::{orient3, polygon_area, signed_volume_contribution, Point3, Sign};
use crate::halfedge::{HalfedgeHull, LocalTriangulation, OneRing, VertexId};
use crate::hull::convex_hull;
use crate::polymesh::PolygonConnectivity;

use super::CostMode;

/// Rings at least this large are retriangulated through a convex hull.
pub const HULL_PATH_VALENCE: usize = 100;

/// Triangulation of the hole left by removing `ring.center` whose faces
/// form the outer envelope of the ring as seen from the center.
///
/// Small rings are fanned from their lowest-id vertex and reflex edges are
/// flipped; large rings, or fans whose flipping stalls, use the hull of the
/// ring. Returns `None` if neither yields a valid envelope, which can only
/// happen for rings that are not in convex position.
pub fn retriangulate_one_ring(ring: &OneRing, pos: &dyn Fn(VertexId) -> Point3) -> Option<LocalTriangulation> {
    let k = ring.len();
    if k < 3 {
        return None;
    }
    if k == 3 {
        let n = &ring.neighbors;
        return Some(LocalTriangulation {
            triangles: vec![[n[0], n[1], n[2]]],
        });
    }
    if k < HULL_PATH_VALENCE {
        if let Some(t) = fan_and_flip(ring, pos) {
            if is_envelope(ring, &t, pos) {
                return Some(t);
            }
        }
    }
    hull_envelope(ring, pos).filter(|t| is_envelope(ring, t, pos))
}

fn fan_and_flip(ring: &OneRing, pos: &dyn Fn(VertexId) -> Point3) -> Option<LocalTriangulation> {
    let k = ring.len();
    let start = (0..k).min_by_key(|&i| ring.neighbors[i])?;
    let n: Vec<VertexId> = (0..k).map(|i| ring.neighbors[(start + i) % k]).collect();
    let mut tris: Vec<[VertexId; 3]> = (1..k - 1).map(|j| [n[0], n[j], n[j + 1]]).collect();

    let mut flips = 0;
    'scan: loop {
        for t in 0..tris.len() {
            for e in 0..3 {
                let (a, b, c) = (tris[t][e], tris[t][(e + 1) % 3], tris[t][(e + 2) % 3]);
                let Some(u) = tris.iter().position(|s| (0..3).any(|r| s[r] == b && s[(r + 1) % 3] == a)) else {
                    continue;
                };
                let s = tris[u];
                let r = (0..3).find(|&r| s[r] == b).unwrap();
                let d = s[(r + 2) % 3];
                if orient3(pos(a), pos(b), pos(c), pos(d)) == Sign::Positive {
                    if flips >= k * k {
                        return None;
                    }
                    flips += 1;
                    tris[t] = [a, d, c];
                    tris[u] = [d, b, c];
                    continue 'scan;
                }
            }
        }
        break;
    }
    Some(LocalTriangulation { triangles: tris })
}

fn hull_envelope(ring: &OneRing, pos: &dyn Fn(VertexId) -> Point3) -> Option<LocalTriangulation> {
    let pts: Vec<Point3> = ring.neighbors.iter().map(|&v| pos(v)).collect();
    let hull = convex_hull(&pts).ok()?;
    let apex = pos(ring.center);
    let triangles = hull
        .triangles
        .iter()
        .map(|t| t.map(|i| ring.neighbors[hull.source[i as usize] as usize]))
        .filter(|t| {
            let [a, b, c] = t.map(pos);
            orient3(a, b, c, apex) == Sign::Positive
        })
        .collect();
    Some(LocalTriangulation { triangles })
}

/// Boundary matches the ring, the center sees every face, and no ring
/// vertex lies strictly above any face.
fn is_envelope(ring: &OneRing, tri: &LocalTriangulation, pos: &dyn Fn(VertexId) -> Point3) -> bool {
    let k = ring.len();
    if tri.triangles.len() + 2 != k {
        return false;
    }
    let index = |v: VertexId| ring.neighbors.iter().position(|&n| n == v);
    let mut directed: Vec<(VertexId, VertexId)> = Vec::with_capacity(3 * k);
    for t in &tri.triangles {
        for e in 0..3 {
            let (a, b) = (t[e], t[(e + 1) % 3]);
            if index(a).is_none() || a == b || directed.contains(&(a, b)) {
                return false;
            }
            directed.push((a, b));
        }
    }
    for &(a, b) in &directed {
        let (ia, ib) = (index(a).unwrap(), index(b).unwrap());
        if (ia + 1) % k != ib && !directed.contains(&(b, a)) {
            return false;
        }
    }
    if (0..k).any(|i| !directed.contains(&(ring.neighbors[i], ring.neighbors[(i + 1) % k]))) {
        return false;
    }
    let apex = pos(ring.center);
    tri.triangles.iter().all(|t| {
        let [a, b, c] = t.map(pos);
        orient3(a, b, c, apex) != Sign::Negative
            && ring.neighbors.iter().all(|&v| orient3(a, b, c, pos(v)) != Sign::Positive)
    })
}

/// True when removing the vertex unbounds the primal polytope: the dual
/// origin is not strictly inside every new face.
pub fn infinite_cost(tri: &LocalTriangulation, pos: &dyn Fn(VertexId) -> Point3) -> bool {
    tri.triangles.iter().any(|t| {
        let [a, b, c] = t.map(pos);
        orient3(a, b, c, Point3::ZERO) != Sign::Negative
    })
}

/// Closed local mesh: the fan around the center plus the reversed new
/// faces. Vertex 0 is the center, vertex `j + 1` is `ring.neighbors[j]`.
fn local_mesh(ring: &OneRing, tri: &LocalTriangulation) -> (Vec<[u32; 3]>, PolygonConnectivity) {
    let k = ring.len();
    let local = |v: VertexId| ring.neighbors.iter().position(|&n| n == v).unwrap() as u32 + 1;
    let mut faces: Vec<[u32; 3]> = (0..k).map(|j| [0, j as u32 + 1, ((j + 1) % k) as u32 + 1]).collect();
    faces.extend(tri.triangles.iter().map(|t| [local(t[0]), local(t[2]), local(t[1])]));
    let conn = PolygonConnectivity {
        vertex_count: k + 1,
        polygons: faces.iter().map(|f| f.to_vec()).collect(),
    };
    (faces, conn)
}

/// Volume and area change of the primal cap gained by removing a dual
/// vertex. Positions are dual coordinates about the center. Returns `None`
/// when a cap vertex would be at infinity.
pub fn dual_cap_measures(
    ring: &OneRing,
    tri: &LocalTriangulation,
    pos: &dyn Fn(VertexId) -> Point3,
) -> Option<(f64, f64)> {
    let (faces, conn) = local_mesh(ring, tri);
    let local_pos = |v: u32| if v == 0 { pos(ring.center) } else { pos(ring.neighbors[v as usize - 1]) };
    let primal: Vec<Point3> = faces
        .iter()
        .map(|f| {
            let [a, b, c] = f.map(local_pos);
            from_dual(&DualFacePlane::through(a, b, c), Point3::ZERO).ok()
        })
        .collect::<Option<_>>()?;
    let g = primal.iter().fold(Point3::ZERO, |a, &p| a + p) / primal.len() as f64;
    let cap = conn.dual()?;
    let mut volume = 0.0;
    let mut area = 0.0;
    for (u, poly) in cap.polygons.iter().enumerate() {
        let pts: Vec<Point3> = poly.iter().map(|&f| primal[f as usize] - g).collect();
        volume += signed_volume_contribution(&pts);
        let a = polygon_area(&pts);
        area += if u == 0 { -a } else { a };
    }
    // the cap lies on the far side of the removed plane from the center,
    // which reverses the orientation inherited from the local dual mesh
    Some((-volume, area))
}

/// Volume and area removed with a vertex of a primal hull.
pub fn primal_cap_measures(ring: &OneRing, tri: &LocalTriangulation, pos: &dyn Fn(VertexId) -> Point3) -> (f64, f64) {
    let apex = pos(ring.center);
    let mut volume = 0.0;
    let mut area = 0.0;
    for f in ring.fan() {
        let pts = f.map(|v| pos(v) - apex);
        area += polygon_area(&pts);
    }
    for t in &tri.triangles {
        let pts = [t[0], t[2], t[1]].map(|v| pos(v) - apex);
        volume += signed_volume_contribution(&pts);
        area -= polygon_area(&pts);
    }
    (volume, area)
}

/// Cost of removing `v` with triangulation `tri` from a dual hull, or
/// `+inf` when the removal unbounds the primal. `diagonal` scales the
/// blow-up guards.
pub fn removal_cost(
    mesh: &HalfedgeHull,
    ring: &OneRing,
    tri: &LocalTriangulation,
    mode: CostMode,
    diagonal: f64,
) -> f64 {
    let pos = |v: VertexId| mesh.position(v);
    if infinite_cost(tri, &pos) {
        return f64::INFINITY;
    }
    let Some((volume, area)) = dual_cap_measures(ring, tri, &pos) else {
        return f64::INFINITY;
    };
    guard(
        match mode {
            CostMode::Volume => volume,
            CostMode::Area => area,
        },
        mode,
        diagonal,
    )
}

/// Classifies blow-ups as infinite and clamps float noise below zero.
pub(crate) fn guard(cost: f64, mode: CostMode, diagonal: f64) -> f64 {
    let unit = match mode {
        CostMode::Volume => diagonal.powi(3),
        CostMode::Area => diagonal.powi(2),
    };
    if !cost.is_finite() || cost.abs() > 1e18 * unit {
        return f64::INFINITY;
    }
    if cost < -1e-9 * unit {
        return f64::INFINITY;
    }
    cost.max(0.0)
}
