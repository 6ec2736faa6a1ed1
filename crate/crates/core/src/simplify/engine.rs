use std::cmp::Reverse;
use std::collections::BinaryHeap;

use ordered_float::OrderedFloat;

use crate::dual::{build_dual_hull, extract_primal};
use crate::error::{DualError, SimplifyError};
use crate::geometry::{orient3, Halfspace, Point3, Sign};
use crate::halfedge::{HalfedgeHull, LocalTriangulation, VertexId};
use crate::hull::{convex_hull, face_planes_seeded, halfspace_intersection, FacePlaneSet, TriangulatedHull};
use crate::polymesh::PolyhedronMesh;

use super::local::{guard, primal_cap_measures, removal_cost, retriangulate_one_ring};
use super::{ApproxMode, CostMode, RemovalStep, SimplifiedHull, SimplifyConfig};

#[derive(Debug, Clone)]
struct Record {
    tri: Option<LocalTriangulation>,
    cost: f64,
    version: u32,
}

type Entry = Reverse<(OrderedFloat<f64>, VertexId, u32)>;

/// Stateful greedy loop over a triangulated hull: a dual hull (outer mode)
/// or the primal hull itself (inner mode).
#[derive(Debug, Clone)]
pub struct Simplifier {
    mesh: HalfedgeHull,
    /// Input plane (outer) or input hull vertex (inner) behind each mesh vertex.
    source: Vec<usize>,
    approx: ApproxMode,
    cost_mode: CostMode,
    constrained: Vec<bool>,
    records: Vec<Record>,
    heap: BinaryHeap<Entry>,
    center: Point3,
    radius: f64,
    diagonal: f64,
    /// Planes of the input set, indexed by `source` (outer mode).
    planes: Vec<Halfspace>,
    recomputed: Vec<VertexId>,
    recompute_total: usize,
    steps: Vec<RemovalStep>,
}

impl Simplifier {
    /// Dualizes `set` about its center and scores every dual vertex.
    pub fn outer(set: &FacePlaneSet, config: &SimplifyConfig) -> Result<Self, SimplifyError> {
        let dual = build_dual_hull(&set.halfspaces, set.center).map_err(|e| match e {
            DualError::CenterOnBoundary => SimplifyError::Empty,
            DualError::Hull(crate::error::HullError::DegenerateInput) => SimplifyError::Unbounded,
            e => e.into(),
        })?;
        for t in dual.mesh.triangles() {
            let [a, b, c] = t.map(|v| dual.mesh.position(v));
            if orient3(a, b, c, Point3::ZERO) != Sign::Negative {
                return Err(SimplifyError::Unbounded);
            }
        }
        let mut constrained = vec![false; dual.source.len()];
        for (v, &s) in dual.source.iter().enumerate() {
            constrained[v] = config.constrained.contains(&s);
        }
        let mut engine = Simplifier {
            mesh: dual.mesh,
            source: dual.source,
            approx: ApproxMode::Outer,
            cost_mode: config.cost_mode,
            constrained,
            records: Vec::new(),
            heap: BinaryHeap::new(),
            center: set.center,
            radius: set.radius,
            diagonal: set.diagonal,
            planes: set.halfspaces.clone(),
            recomputed: Vec::new(),
            recompute_total: 0,
            steps: Vec::new(),
        };
        let m = engine.primal_mesh()?;
        engine.diagonal = m.bounds().map_or(set.diagonal, |b| b.diagonal());
        engine.init_records();
        Ok(engine)
    }

    /// Scores every vertex of the primal hull for removal.
    pub fn inner(hull: &TriangulatedHull, config: &SimplifyConfig) -> Result<Self, SimplifyError> {
        let mesh = HalfedgeHull::from_triangles(hull.vertices.clone(), &hull.triangles)?;
        let n = hull.vertices.len();
        let mut engine = Simplifier {
            mesh,
            source: hull.source.iter().map(|&s| s as usize).collect(),
            approx: ApproxMode::Inner,
            cost_mode: config.cost_mode,
            constrained: vec![false; n],
            records: Vec::new(),
            heap: BinaryHeap::new(),
            center: Point3::ZERO,
            radius: 0.0,
            diagonal: hull.diagonal(),
            planes: Vec::new(),
            recomputed: Vec::new(),
            recompute_total: 0,
            steps: Vec::new(),
        };
        engine.init_records();
        Ok(engine)
    }

    fn init_records(&mut self) {
        let n = self.mesh.vertex_capacity();
        self.records = vec![
            Record {
                tri: None,
                cost: f64::INFINITY,
                version: 0,
            };
            n
        ];
        let alive: Vec<VertexId> = self.mesh.alive_vertices().collect();
        for v in alive {
            self.refresh(v);
        }
        self.recomputed.clear();
        self.recompute_total = 0;
    }

    pub fn approx_mode(&self) -> ApproxMode {
        self.approx
    }

    pub fn diagonal(&self) -> f64 {
        self.diagonal
    }

    pub fn mesh(&self) -> &HalfedgeHull {
        &self.mesh
    }

    /// Planes (outer) or triangles (inner) currently present.
    pub fn face_count(&self) -> usize {
        match self.approx {
            ApproxMode::Outer => self.mesh.vertex_count(),
            ApproxMode::Inner => self.mesh.face_count(),
        }
    }

    pub fn steps(&self) -> &[RemovalStep] {
        &self.steps
    }

    /// Vertices whose records were recomputed by the last step.
    pub fn last_recomputed(&self) -> &[VertexId] {
        &self.recomputed
    }

    /// Total record recomputations since construction.
    pub fn recompute_count(&self) -> usize {
        self.recompute_total
    }

    pub fn is_constrained(&self, v: VertexId) -> bool {
        self.constrained[v as usize]
    }

    pub fn source_of(&self, v: VertexId) -> usize {
        self.source[v as usize]
    }

    /// Cached cost of `v`.
    pub fn cached_cost(&self, v: VertexId) -> f64 {
        self.records[v as usize].cost
    }

    /// Cost of removing `v` now, computed from scratch.
    pub fn fresh_cost(&self, v: VertexId) -> f64 {
        self.evaluate(v).1
    }

    /// Input planes still present, in input order (outer mode).
    pub fn current_sources(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.mesh.alive_vertices().map(|v| self.source[v as usize]).collect();
        s.sort_unstable();
        s
    }

    pub fn current_halfspaces(&self) -> Vec<Halfspace> {
        self.current_sources().iter().map(|&s| self.planes[s]).collect()
    }

    fn evaluate(&self, v: VertexId) -> (Option<LocalTriangulation>, f64) {
        let Ok(ring) = self.mesh.one_ring(v) else {
            return (None, f64::INFINITY);
        };
        let pos = |u: VertexId| self.mesh.position(u);
        let Some(tri) = retriangulate_one_ring(&ring, &pos) else {
            return (None, f64::INFINITY);
        };
        if self.mesh.check_triangulation(&ring, &tri).is_err() {
            return (None, f64::INFINITY);
        }
        let cost = match self.approx {
            ApproxMode::Outer => removal_cost(&self.mesh, &ring, &tri, self.cost_mode, self.diagonal),
            ApproxMode::Inner => {
                let (vol, area) = primal_cap_measures(&ring, &tri, &pos);
                let c = match self.cost_mode {
                    CostMode::Volume => vol,
                    CostMode::Area => area,
                };
                guard(c, self.cost_mode, self.diagonal)
            }
        };
        (Some(tri), cost)
    }

    fn refresh(&mut self, v: VertexId) {
        let (tri, cost) = self.evaluate(v);
        let r = &mut self.records[v as usize];
        r.version = r.version.wrapping_add(1);
        r.tri = tri;
        r.cost = cost;
        if cost.is_finite() && !self.constrained[v as usize] {
            self.heap.push(Reverse((OrderedFloat(cost), v, r.version)));
        }
        self.recomputed.push(v);
        self.recompute_total += 1;
    }

    /// Applies the cheapest finite removal. `None` when every remaining
    /// removal is infinite or constrained, or the mesh is a tetrahedron.
    pub fn step(&mut self) -> Result<Option<RemovalStep>, SimplifyError> {
        if self.mesh.vertex_count() <= 4 {
            return Ok(None);
        }
        while let Some(Reverse((cost, v, version))) = self.heap.pop() {
            if !self.mesh.is_alive(v) || self.records[v as usize].version != version {
                continue;
            }
            let ring = self.mesh.one_ring(v)?;
            let tri = self.records[v as usize].tri.take().expect("finite records carry a triangulation");
            self.mesh.remove_vertex(v, &tri)?;
            self.recomputed.clear();
            for &n in &ring.neighbors {
                self.refresh(n);
            }
            let step = RemovalStep {
                vertex: v,
                source: self.source[v as usize],
                cost: cost.0,
                faces_after: self.face_count(),
                oracle_cost: None,
            };
            self.steps.push(step.clone());
            return Ok(Some(step));
        }
        Ok(None)
    }

    pub(crate) fn set_last_oracle(&mut self, value: f64) {
        if let Some(s) = self.steps.last_mut() {
            s.oracle_cost = Some(value);
        }
    }

    /// Volume or area of the current polytope from a from-scratch
    /// construction (halfspace intersection or hull of vertices).
    pub fn oracle_measure(&self) -> f64 {
        let (vol, area) = match self.approx {
            ApproxMode::Outer => match halfspace_intersection(&self.current_halfspaces()).mesh() {
                Some(m) => (m.volume(), m.area()),
                None => (f64::INFINITY, f64::INFINITY),
            },
            ApproxMode::Inner => {
                let pts: Vec<Point3> = self.mesh.alive_vertices().map(|v| self.mesh.position(v)).collect();
                match convex_hull(&pts) {
                    Ok(h) => (h.volume(), h.area()),
                    Err(_) => (0.0, 0.0),
                }
            }
        };
        match self.cost_mode {
            CostMode::Volume => vol,
            CostMode::Area => area,
        }
    }

    /// Volume added by dropping input plane `source` from the current set,
    /// measured directly as the intersection of the current planes with the
    /// dropped plane flipped. Avoids subtracting two large volumes.
    pub fn oracle_cap_volume(&self, source: usize) -> f64 {
        let h = self.planes[source];
        let mut clip = self.current_halfspaces();
        clip.push(Halfspace { n: -h.n, b: -h.b });
        halfspace_intersection(&clip).volume().unwrap_or(0.0)
    }

    /// Primal polytope of the current dual hull (outer mode).
    pub fn primal_mesh(&self) -> Result<PolyhedronMesh, SimplifyError> {
        Ok(extract_primal(&self.mesh, &self.source, self.center)?)
    }

    pub(crate) fn finish_outer(
        self,
        set: &FacePlaneSet,
        input_volume: f64,
        input_area: f64,
        target_faces: usize,
    ) -> Result<SimplifiedHull, SimplifyError> {
        let mesh = self.primal_mesh()?;
        let sources = self.current_sources();
        let halfspaces = sources.iter().map(|&s| set.halfspaces[s]).collect();
        let (volume, area) = (mesh.volume(), mesh.area());
        Ok(SimplifiedHull {
            halfspaces,
            sources,
            center: self.center,
            radius: self.radius,
            volume,
            area,
            input_volume,
            input_area,
            volume_ratio: volume / input_volume,
            area_ratio: area / input_area,
            steps: self.steps,
            cost_mode: self.cost_mode,
            approx_mode: ApproxMode::Outer,
            target_faces,
            early_stop: false,
            warnings: Vec::new(),
            mesh,
        })
    }

    pub(crate) fn finish_inner(
        self,
        input: &TriangulatedHull,
        seed: u64,
        target_faces: usize,
    ) -> Result<SimplifiedHull, SimplifyError> {
        let pts: Vec<Point3> = self.mesh.alive_vertices().map(|v| self.mesh.position(v)).collect();
        let hull = convex_hull(&pts)?;
        let planes = face_planes_seeded(&hull, true, seed);
        let mut face_source = vec![0; hull.triangles.len()];
        for (i, prov) in planes.provenance.iter().enumerate() {
            for &t in prov {
                face_source[t] = i;
            }
        }
        let mesh = PolyhedronMesh {
            vertices: hull.vertices.clone(),
            faces: hull.triangles.iter().map(|t| t.to_vec()).collect(),
            face_source,
        };
        let (volume, area) = (hull.volume(), hull.area());
        let (input_volume, input_area) = (input.volume(), input.area());
        Ok(SimplifiedHull {
            halfspaces: planes.halfspaces,
            sources: Vec::new(),
            center: planes.center,
            radius: planes.radius,
            volume,
            area,
            input_volume,
            input_area,
            volume_ratio: volume / input_volume,
            area_ratio: area / input_area,
            steps: self.steps,
            cost_mode: self.cost_mode,
            approx_mode: ApproxMode::Inner,
            target_faces,
            early_stop: false,
            warnings: Vec::new(),
            mesh,
        })
    }
}
