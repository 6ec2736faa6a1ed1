//! Quickhull with exact visibility tests.
//!
//! Conflict points are attached to one visible face each; the point farthest
//! (in floating point) from a face is inserted next. Whether a face is
//! visible from a point is always decided by [`orient3`], so the output is a
//! weakly convex, closed triangulation whose vertices are input points.

use crate::error::HullError;
use crate::geometry::{orient3, Point3, Sign};

use super::TriangulatedHull;

const NONE: u32 = u32::MAX;

struct Face {
    v: [u32; 3],
    // neighbor across edge (v[i], v[i+1])
    adj: [u32; 3],
    normal: Point3,
    outside: Vec<u32>,
    far: u32,
    far_dist: f64,
    alive: bool,
}

impl Face {
    fn new(v: [u32; 3], points: &[Point3]) -> Self {
        let [a, b, c] = v.map(|i| points[i as usize]);
        Face {
            v,
            adj: [NONE; 3],
            normal: (b - a).cross(c - a),
            outside: Vec::new(),
            far: NONE,
            far_dist: f64::NEG_INFINITY,
            alive: true,
        }
    }

    fn sees(&self, points: &[Point3], p: Point3) -> bool {
        let [a, b, c] = self.v.map(|i| points[i as usize]);
        orient3(a, b, c, p) == Sign::Positive
    }

    fn push_outside(&mut self, points: &[Point3], q: u32) {
        let d = self.normal.dot(points[q as usize] - points[self.v[0] as usize]);
        if d > self.far_dist {
            self.far_dist = d;
            self.far = q;
        }
        self.outside.push(q);
    }
}

fn initial_simplex(points: &[Point3]) -> Result<[u32; 4], HullError> {
    let n = points.len();
    let i0 = (0..n)
        .min_by(|&a, &b| {
            points[a]
                .x
                .total_cmp(&points[b].x)
                .then(points[a].y.total_cmp(&points[b].y))
                .then(points[a].z.total_cmp(&points[b].z))
        })
        .unwrap();
    let p0 = points[i0];
    let i1 = (0..n)
        .max_by(|&a, &b| p0.distance(points[a]).total_cmp(&p0.distance(points[b])))
        .unwrap();
    if points[i1] == p0 {
        return Err(HullError::DegenerateInput);
    }
    let p1 = points[i1];
    let axis = p1 - p0;
    let mut by_line: Vec<usize> = (0..n).collect();
    let line_dist = |i: usize| axis.cross(points[i] - p0).norm_squared();
    by_line.sort_by(|&a, &b| line_dist(b).total_cmp(&line_dist(a)));

    // the farthest point from the line may still be exactly collinear
    let probe = 1.0 + p0.max_abs();
    let probes = [
        p0 + Point3::new(probe, 0.0, 0.0),
        p0 + Point3::new(0.0, probe, 0.0),
        p0 + Point3::new(0.0, 0.0, probe),
    ];
    let i2 = by_line
        .into_iter()
        .find(|&i| {
            probes
                .iter()
                .any(|&q| orient3(p0, p1, points[i], q) != Sign::Zero)
        })
        .ok_or(HullError::DegenerateInput)?;
    let p2 = points[i2];
    let normal = (p1 - p0).cross(p2 - p0);
    let i3 = (0..n)
        .filter(|&i| orient3(p0, p1, p2, points[i]) != Sign::Zero)
        .max_by(|&a, &b| {
            normal
                .dot(points[a] - p0)
                .abs()
                .total_cmp(&normal.dot(points[b] - p0).abs())
        })
        .ok_or(HullError::DegenerateInput)?;
    Ok([i0 as u32, i1 as u32, i2 as u32, i3 as u32])
}

pub(super) fn quickhull(points: &[Point3]) -> Result<TriangulatedHull, HullError> {
    if points.len() < 4 {
        return Err(HullError::TooFewPoints(points.len()));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(crate::error::GeometryError::NonFinite.into());
    }
    let simplex = initial_simplex(points)?;
    let [s0, s1, s2, s3] = simplex;

    let mut faces: Vec<Face> = Vec::new();
    {
        let mut tri = |v: [u32; 3], other: u32| {
            let [a, b, c] = v.map(|i| points[i as usize]);
            let v = if orient3(a, b, c, points[other as usize]) == Sign::Positive {
                [v[0], v[2], v[1]]
            } else {
                v
            };
            faces.push(Face::new(v, points));
        };
        tri([s0, s1, s2], s3);
        tri([s0, s1, s3], s2);
        tri([s0, s2, s3], s1);
        tri([s1, s2, s3], s0);
    }
    // adjacency of the initial tetrahedron
    for f in 0..4 {
        for e in 0..3 {
            let (a, b) = (faces[f].v[e], faces[f].v[(e + 1) % 3]);
            let g = (0..4)
                .find(|&g| {
                    g != f && (0..3).any(|k| faces[g].v[k] == b && faces[g].v[(k + 1) % 3] == a)
                })
                .expect("tetrahedron is closed");
            faces[f].adj[e] = g as u32;
        }
    }

    for (i, &p) in points.iter().enumerate() {
        let i = i as u32;
        if simplex.contains(&i) {
            continue;
        }
        if let Some(f) = (0..4).find(|&f| faces[f].sees(points, p)) {
            faces[f].push_outside(points, i);
        }
    }

    let mut pending: Vec<u32> = (0..4u32).filter(|&f| !faces[f as usize].outside.is_empty()).collect();
    let mut visible: Vec<u32> = Vec::new();
    let mut horizon: Vec<(u32, u32, u32)> = Vec::new();
    let mut stack: Vec<(u32, usize)> = Vec::new();
    let mut mark: Vec<u32> = vec![0; faces.len()];
    let mut epoch = 0u32;
    let mut orphans: Vec<u32> = Vec::new();

    while let Some(start) = pending.pop() {
        let start_face = &faces[start as usize];
        if !start_face.alive || start_face.outside.is_empty() {
            continue;
        }
        let apex = start_face.far;
        let p = points[apex as usize];

        // the strictly visible faces form a disk; collect it and its boundary
        epoch += 1;
        mark.resize(faces.len(), 0);
        visible.clear();
        horizon.clear();
        mark[start as usize] = epoch;
        visible.push(start);
        stack.clear();
        stack.push((start, 0));
        while let Some(&mut (f, ref mut e)) = stack.last_mut() {
            if *e == 3 {
                stack.pop();
                continue;
            }
            let edge = *e;
            *e += 1;
            let g = faces[f as usize].adj[edge];
            if mark[g as usize] == epoch {
                continue;
            }
            if faces[g as usize].sees(points, p) {
                mark[g as usize] = epoch;
                visible.push(g);
                stack.push((g, 0));
            } else {
                let fv = faces[f as usize].v;
                horizon.push((fv[edge], fv[(edge + 1) % 3], g));
            }
        }
        order_horizon(&mut horizon);

        let first_new = faces.len() as u32;
        let h = horizon.len() as u32;
        for (k, &(u, v, g)) in horizon.iter().enumerate() {
            let id = first_new + k as u32;
            let mut face = Face::new([u, v, apex], points);
            face.adj = [g, first_new + (k as u32 + 1) % h, first_new + (k as u32 + h - 1) % h];
            // repoint the surviving neighbor at the new face
            let gf = &mut faces[g as usize];
            let slot = (0..3)
                .find(|&s| gf.v[s] == v && gf.v[(s + 1) % 3] == u)
                .expect("horizon edge present in neighbor");
            gf.adj[slot] = id;
            faces.push(face);
        }

        orphans.clear();
        for &f in &visible {
            let face = &mut faces[f as usize];
            face.alive = false;
            orphans.append(&mut face.outside);
        }
        for &q in &orphans {
            if q == apex {
                continue;
            }
            let qp = points[q as usize];
            for id in first_new..first_new + h {
                if faces[id as usize].sees(points, qp) {
                    faces[id as usize].push_outside(points, q);
                    break;
                }
            }
        }
        for id in first_new..first_new + h {
            if !faces[id as usize].outside.is_empty() {
                pending.push(id);
            }
        }
    }

    // compact, keeping input order among hull vertices
    let mut used = vec![false; points.len()];
    let alive: Vec<&Face> = faces.iter().filter(|f| f.alive).collect();
    for f in &alive {
        for &v in &f.v {
            used[v as usize] = true;
        }
    }
    let mut remap = vec![NONE; points.len()];
    let mut vertices = Vec::new();
    let mut source = Vec::new();
    for (i, &u) in used.iter().enumerate() {
        if u {
            remap[i] = vertices.len() as u32;
            vertices.push(points[i]);
            source.push(i as u32);
        }
    }
    let triangles = alive
        .iter()
        .map(|f| f.v.map(|v| remap[v as usize]))
        .collect();
    Ok(TriangulatedHull {
        vertices,
        triangles,
        source,
    })
}

/// Chains horizon edges `(u, v, _)` into a cycle `v_k == u_{k+1}`.
fn order_horizon(horizon: &mut Vec<(u32, u32, u32)>) {
    let n = horizon.len();
    if n < 3 {
        return;
    }
    let mut by_start: Vec<(u32, usize)> = horizon.iter().enumerate().map(|(k, e)| (e.0, k)).collect();
    by_start.sort_unstable();
    let mut ordered = Vec::with_capacity(n);
    let mut k = 0;
    for _ in 0..n {
        ordered.push(horizon[k]);
        let tail = horizon[k].1;
        let at = by_start
            .binary_search_by_key(&tail, |e| e.0)
            .expect("horizon is a simple cycle");
        k = by_start[at].1;
    }
    debug_assert_eq!(ordered.last().unwrap().1, ordered[0].0);
    *horizon = ordered;
}
