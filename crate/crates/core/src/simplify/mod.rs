//! Greedy halfspace elimination.
//!
//! Each face plane of the input hull is a vertex of the dual hull. Removing a
//! dual vertex drops its plane; the neighboring planes then meet in a new
//! cap whose volume (or area) is the removal cost. The cheapest removal is
//! applied repeatedly until the target face count is reached.

mod engine;
pub mod local;

use serde::{Deserialize, Serialize};

pub use engine::Simplifier;
pub use local::{infinite_cost, removal_cost, retriangulate_one_ring};

use crate::error::SimplifyError;
use crate::geometry::{Halfspace, Point3};
use crate::hull::{convex_hull, face_planes_seeded, FacePlaneSet, TriangulatedHull};
use crate::lp::DEFAULT_SEED;
use crate::polymesh::PolyhedronMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CostMode {
    #[default]
    Volume,
    Area,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ApproxMode {
    /// Drop halfspaces; the result contains the input.
    #[default]
    Outer,
    /// Drop hull vertices; the result is contained in the input.
    Inner,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplifyConfig {
    /// Planes to keep (outer) or triangles to keep (inner).
    pub target_faces: usize,
    pub cost_mode: CostMode,
    pub approx_mode: ApproxMode,
    /// Indices into the input plane set that must survive.
    pub constrained: Vec<usize>,
    pub rng_seed: u64,
    /// Recompute every popped cost from full halfspace intersections.
    pub exact_cost_check: bool,
}

impl SimplifyConfig {
    pub fn new(target_faces: usize) -> Self {
        SimplifyConfig {
            target_faces,
            cost_mode: CostMode::Volume,
            approx_mode: ApproxMode::Outer,
            constrained: Vec::new(),
            rng_seed: DEFAULT_SEED,
            exact_cost_check: false,
        }
    }

    pub fn with_cost(mut self, mode: CostMode) -> Self {
        self.cost_mode = mode;
        self
    }

    pub fn with_approx(mut self, mode: ApproxMode) -> Self {
        self.approx_mode = mode;
        self
    }

    pub fn with_constrained(mut self, ids: Vec<usize>) -> Self {
        self.constrained = ids;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_exact_cost_check(mut self, on: bool) -> Self {
        self.exact_cost_check = on;
        self
    }

    fn validate(&self, plane_count: usize) -> Result<(), SimplifyError> {
        if self.target_faces < 4 {
            return Err(SimplifyError::InvalidConfig(format!(
                "target_faces must be at least 4, got {}",
                self.target_faces
            )));
        }
        if let Some(&bad) = self.constrained.iter().find(|&&id| id >= plane_count) {
            return Err(SimplifyError::InvalidConfig(format!(
                "constrained face {bad} does not exist ({plane_count} faces)"
            )));
        }
        if self.approx_mode == ApproxMode::Inner && !self.constrained.is_empty() {
            return Err(SimplifyError::InvalidConfig(
                "constrained faces are only supported in outer mode".into(),
            ));
        }
        Ok(())
    }
}

/// One applied removal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovalStep {
    /// Vertex id in the simplifier's mesh.
    pub vertex: u32,
    /// Input plane index (outer) or input hull vertex index (inner).
    pub source: usize,
    pub cost: f64,
    /// Face count after the removal.
    pub faces_after: usize,
    /// Cost recomputed from full intersections, when requested.
    pub oracle_cost: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplifiedHull {
    pub halfspaces: Vec<Halfspace>,
    /// Input plane index of each halfspace; empty in inner mode.
    pub sources: Vec<usize>,
    pub mesh: PolyhedronMesh,
    pub center: Point3,
    pub radius: f64,
    pub volume: f64,
    pub area: f64,
    pub input_volume: f64,
    pub input_area: f64,
    pub volume_ratio: f64,
    pub area_ratio: f64,
    pub steps: Vec<RemovalStep>,
    pub cost_mode: CostMode,
    pub approx_mode: ApproxMode,
    pub target_faces: usize,
    /// Set when every remaining removal had infinite cost before the target.
    pub early_stop: bool,
    pub warnings: Vec<String>,
}

impl SimplifiedHull {
    pub fn face_count(&self) -> usize {
        self.halfspaces.len()
    }
}

/// Simplifier input.
#[derive(Debug, Clone, Copy)]
pub enum SimplifyInput<'a> {
    Points(&'a [Point3]),
    Planes(&'a FacePlaneSet),
}

pub fn simplify(input: SimplifyInput<'_>, config: &SimplifyConfig) -> Result<SimplifiedHull, SimplifyError> {
    match input {
        SimplifyInput::Points(p) => simplify_points(p, config),
        SimplifyInput::Planes(s) => simplify_planes(s, config),
    }
}

/// Simplifies the convex hull of `points`. Constrained ids index the hull's
/// face plane set as returned by [`face_planes_seeded`] with merging on.
pub fn simplify_points(points: &[Point3], config: &SimplifyConfig) -> Result<SimplifiedHull, SimplifyError> {
    let hull = convex_hull(points)?;
    match config.approx_mode {
        ApproxMode::Outer => {
            let set = face_planes_seeded(&hull, true, config.rng_seed);
            let reference = (hull.volume(), hull.area(), hull.vertices.clone());
            run_outer(&set, config, Some(reference))
        }
        ApproxMode::Inner => run_inner(&hull, config),
    }
}

pub fn simplify_planes(set: &FacePlaneSet, config: &SimplifyConfig) -> Result<SimplifiedHull, SimplifyError> {
    match config.approx_mode {
        ApproxMode::Outer => run_outer(set, config, None),
        ApproxMode::Inner => {
            config.validate(set.len())?;
            let mesh = crate::hull::halfspace_intersection_seeded(&set.halfspaces, config.rng_seed);
            let mesh = match mesh {
                crate::hull::IntersectionOutcome::Bounded(m) => m,
                crate::hull::IntersectionOutcome::Empty => return Err(SimplifyError::Empty),
                crate::hull::IntersectionOutcome::Unbounded => return Err(SimplifyError::Unbounded),
            };
            run_inner(&convex_hull(&mesh.vertices)?, config)
        }
    }
}

fn run_outer(
    set: &FacePlaneSet,
    config: &SimplifyConfig,
    reference: Option<(f64, f64, Vec<Point3>)>,
) -> Result<SimplifiedHull, SimplifyError> {
    config.validate(set.len())?;
    let mut warnings = Vec::new();
    if set.radius <= 0.0 {
        return Err(SimplifyError::Empty);
    }
    if set.radius < 1e-7 * set.diagonal {
        warn(
            &mut warnings,
            format!(
                "inscribed radius {:.3e} is tiny relative to the diagonal {:.3e}; duality may be inaccurate",
                set.radius, set.diagonal
            ),
        );
    }
    let mut engine = Simplifier::outer(set, config)?;
    let (input_volume, input_area) = match reference {
        Some((v, a, _)) => (v, a),
        None => {
            let m = engine.primal_mesh()?;
            (m.volume(), m.area())
        }
    };
    let initial = engine.face_count();
    if initial < set.len() {
        warn(
            &mut warnings,
            format!("{} redundant planes dropped before simplification", set.len() - initial),
        );
    }
    if initial <= config.target_faces {
        warn(
            &mut warnings,
            format!(
                "input already has {initial} faces, not more than the target {}",
                config.target_faces
            ),
        );
    }
    let early = drive(&mut engine, config)?;
    let mut out = engine.finish_outer(set, input_volume, input_area, config.target_faces)?;
    out.warnings.splice(0..0, warnings);
    finish(out, early)
}

fn run_inner(hull: &TriangulatedHull, config: &SimplifyConfig) -> Result<SimplifiedHull, SimplifyError> {
    config.validate(usize::MAX)?;
    let mut warnings = Vec::new();
    let mut engine = Simplifier::inner(hull, config)?;
    if engine.face_count() <= config.target_faces {
        warn(
            &mut warnings,
            format!(
                "input already has {} triangles, not more than the target {}",
                engine.face_count(),
                config.target_faces
            ),
        );
    }
    let early = drive(&mut engine, config)?;
    let mut out = engine.finish_inner(hull, config.rng_seed, config.target_faces)?;
    out.warnings.splice(0..0, warnings);
    finish(out, early)
}

fn warn(warnings: &mut Vec<String>, msg: String) {
    log::warn!("{msg}");
    warnings.push(msg);
}

/// Runs removals to the target; returns true on an early stop.
fn drive(engine: &mut Simplifier, config: &SimplifyConfig) -> Result<bool, SimplifyError> {
    while engine.face_count() > config.target_faces {
        let direct_cap = engine.approx_mode() == ApproxMode::Outer && config.cost_mode == CostMode::Volume;
        let before = (config.exact_cost_check && !direct_cap).then(|| engine.oracle_measure());
        let Some(step) = engine.step()? else {
            return Ok(true);
        };
        if config.exact_cost_check {
            let delta = match before {
                None => engine.oracle_cap_volume(step.source),
                Some(before) => {
                    let after = engine.oracle_measure();
                    match engine.approx_mode() {
                        ApproxMode::Outer => after - before,
                        ApproxMode::Inner => before - after,
                    }
                }
            };
            engine.set_last_oracle(delta);
            let tol = 1e-8 * step.cost.abs().max(1e-12 * engine.diagonal().powi(3));
            if (delta - step.cost).abs() > tol {
                log::warn!(
                    "cost check: vertex {} popped with {:.17e}, oracle {:.17e}",
                    step.vertex,
                    step.cost,
                    delta
                );
            }
        }
    }
    Ok(false)
}

fn finish(mut out: SimplifiedHull, early: bool) -> Result<SimplifiedHull, SimplifyError> {
    if early {
        out.early_stop = true;
        let reached = out.face_count();
        let msg = format!(
            "stopped at {reached} faces: every remaining removal has infinite cost (target {})",
            out.target_faces
        );
        log::warn!("{msg}");
        out.warnings.push(msg);
        return Err(SimplifyError::TargetUnreachable {
            reached,
            partial: Box::new(out),
        });
    }
    Ok(out)
}
