//! Randomized incremental linear programming in fixed small dimension.
//!
//! The solver follows Seidel's scheme: constraints are visited in a seeded
//! random order; when the running optimum violates a constraint, the new
//! optimum lies on that constraint's hyperplane, so one variable is
//! eliminated and the lower-dimensional problem over the constraints seen so
//! far is solved recursively. Expected running time is `O(d! m)`.
//!
//! The problem is closed with a large box so every subproblem has an optimum;
//! an optimum touching the box is reported as unbounded.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Halfspace, Point3};

/// Seed used by the convenience entry points.
pub const DEFAULT_SEED: u64 = 0x5eed_1e55;

/// Box half-width relative to the problem scale.
const BOX_FACTOR: f64 = 1e12;

/// Relative slack when testing whether a constraint is violated.
const VIOLATION_TOL: f64 = 1e-11;

/// Inscribed radii below this fraction of the scale are reported as zero.
const FLAT_RADIUS: f64 = 1e-12;

/// Outcome of a pure-feasibility problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpOutcome {
    Feasible(Point3),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Feasible(_))
    }
}

/// Center and radius of the largest ball inside an intersection of halfspaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebyshevResult {
    pub center: Point3,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChebyshevOutcome {
    Center(ChebyshevResult),
    Infeasible,
    Unbounded,
}

/// A general LP `maximize obj . x  s.t.  rows[i].0 . x <= rows[i].1` in `dim`
/// variables, solved inside the box `|x_k| <= bound`.
struct SmallLp {
    dim: usize,
    obj: Vec<f64>,
    // flat rows of (a_0 .. a_{dim-1}, b)
    rows: Vec<f64>,
    bound: f64,
}

impl SmallLp {
    fn new(dim: usize, obj: Vec<f64>, bound: f64) -> Self {
        debug_assert_eq!(obj.len(), dim);
        let mut lp = Self {
            dim,
            obj,
            rows: Vec::new(),
            bound,
        };
        for k in 0..dim {
            for s in [1.0, -1.0] {
                let mut a = vec![0.0; dim];
                a[k] = s;
                lp.push(&a, bound);
            }
        }
        lp
    }

    fn push(&mut self, a: &[f64], b: f64) {
        self.rows.extend_from_slice(a);
        self.rows.push(b);
    }

    fn row_count(&self) -> usize {
        self.rows.len() / (self.dim + 1)
    }

    /// Solves with the box rows first and the remaining rows shuffled by `seed`.
    fn solve(&self, seed: u64) -> Option<Vec<f64>> {
        let stride = self.dim + 1;
        let nbox = 2 * self.dim;
        let mut order: Vec<usize> = (nbox..self.row_count()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
        let mut rows = Vec::with_capacity(self.rows.len());
        rows.extend_from_slice(&self.rows[..nbox * stride]);
        for i in order {
            rows.extend_from_slice(&self.rows[i * stride..(i + 1) * stride]);
        }
        seidel(self.dim, &self.obj, &rows, self.bound)
    }
}

fn violated(a: &[f64], b: f64, x: &[f64]) -> bool {
    let mut lhs = 0.0;
    let mut mag = 0.0;
    for (ak, xk) in a.iter().zip(x) {
        lhs += ak * xk;
        mag += (ak * xk).abs();
    }
    // slack covers the rounding of the dot product plus a relative margin on b
    lhs - b > VIOLATION_TOL * (1.0 + b.abs()) + 8.0 * f64::EPSILON * mag
}

fn seidel(dim: usize, obj: &[f64], rows: &[f64], bound: f64) -> Option<Vec<f64>> {
    let stride = dim + 1;
    let m = rows.len() / stride;
    if dim == 0 {
        // every row reads 0 <= b
        let ok = (0..m).all(|i| {
            let b = rows[i * stride];
            b >= -VIOLATION_TOL * (1.0 + b.abs())
        });
        return ok.then(Vec::new);
    }

    let mut x: Vec<f64> = obj
        .iter()
        .map(|&o| {
            if o > 0.0 {
                bound
            } else if o < 0.0 {
                -bound
            } else {
                0.0
            }
        })
        .collect();

    for i in 0..m {
        let row = &rows[i * stride..(i + 1) * stride];
        let (a, b) = (&row[..dim], row[dim]);
        if !violated(a, b, &x) {
            continue;
        }
        let (j, aj) = a
            .iter()
            .copied()
            .enumerate()
            .max_by(|p, q| p.1.abs().total_cmp(&q.1.abs()))
            .expect("dim > 0");
        if aj.abs() <= 1e-14 {
            // 0 . x <= b with b < 0
            return None;
        }

        // eliminate x_j = (b - sum_{k != j} a_k x_k) / a_j
        let sub_dim = dim - 1;
        let mut sub_obj = Vec::with_capacity(sub_dim);
        for k in (0..dim).filter(|&k| k != j) {
            sub_obj.push(obj[k] - obj[j] * a[k] / aj);
        }
        let mut sub_rows = Vec::with_capacity(i * dim);
        let mut scratch = vec![0.0; sub_dim];
        for r in 0..i {
            let prev = &rows[r * stride..(r + 1) * stride];
            let f = prev[j] / aj;
            let mut norm2 = 0.0;
            for (slot, k) in (0..dim).filter(|&k| k != j).enumerate() {
                let v = prev[k] - f * a[k];
                scratch[slot] = v;
                norm2 += v * v;
            }
            let mut rb = prev[dim] - f * b;
            let norm = norm2.sqrt();
            if norm <= 1e-13 {
                // parallel to the hyperplane: either always or never satisfied
                if rb < -VIOLATION_TOL * (1.0 + rb.abs() + prev[dim].abs()) {
                    return None;
                }
                continue;
            }
            for v in scratch.iter_mut() {
                *v /= norm;
            }
            rb /= norm;
            sub_rows.extend_from_slice(&scratch);
            sub_rows.push(rb);
        }

        let y = seidel(sub_dim, &sub_obj, &sub_rows, bound)?;
        let mut acc = b;
        let mut yi = y.iter();
        for k in 0..dim {
            if k == j {
                continue;
            }
            let yk = *yi.next().expect("sub solution length");
            x[k] = yk;
            acc -= a[k] * yk;
        }
        x[j] = acc / aj;
    }
    Some(x)
}

/// Largest `|b_i| / |n_i|` (distance of the farthest plane from the origin), at least 1.
fn plane_scale(halfspaces: &[Halfspace]) -> f64 {
    halfspaces
        .iter()
        .map(|h| (h.b / h.n.norm()).abs())
        .fold(1.0, f64::max)
}

/// Finds a point in the intersection of `halfspaces`, or reports it empty.
pub fn feasible_point(halfspaces: &[Halfspace]) -> LpOutcome {
    feasible_point_seeded(halfspaces, DEFAULT_SEED)
}

pub fn feasible_point_seeded(halfspaces: &[Halfspace], seed: u64) -> LpOutcome {
    let scale = plane_scale(halfspaces);
    let mut lp = SmallLp::new(3, vec![0.0; 3], BOX_FACTOR * scale);
    for h in halfspaces {
        let u = h.normalized();
        lp.push(&u.n.to_array(), -u.b);
    }
    match lp.solve(seed) {
        Some(x) => LpOutcome::Feasible(Point3::new(x[0], x[1], x[2])),
        None => LpOutcome::Infeasible,
    }
}

/// Chebyshev center: maximize `r` subject to `n_i . c + |n_i| r <= -b_i`, `r >= 0`.
///
/// Also reports `Unbounded` when the intersection contains a ray, even if the
/// inscribed radius itself is bounded (a slab, for instance). A set without
/// interior yields a zero radius, even when it is unbounded.
pub fn chebyshev_center(halfspaces: &[Halfspace]) -> ChebyshevOutcome {
    chebyshev_center_seeded(halfspaces, DEFAULT_SEED)
}

pub fn chebyshev_center_seeded(halfspaces: &[Halfspace], seed: u64) -> ChebyshevOutcome {
    if halfspaces.is_empty() {
        return ChebyshevOutcome::Unbounded;
    }
    let scale = plane_scale(halfspaces);
    let bound = BOX_FACTOR * scale;
    let mut lp = SmallLp::new(4, vec![0.0, 0.0, 0.0, 1.0], bound);
    lp.push(&[0.0, 0.0, 0.0, -1.0], 0.0);
    let unit: Vec<Halfspace> = halfspaces.iter().map(Halfspace::normalized).collect();
    for u in &unit {
        // the 4-vector (n, 1) is renormalized so the violation slack is a distance
        let s = 2f64.sqrt();
        lp.push(&[u.n.x / s, u.n.y / s, u.n.z / s, 1.0 / s], -u.b / s);
    }
    let Some(x) = lp.solve(seed) else {
        return ChebyshevOutcome::Infeasible;
    };
    let center = Point3::new(x[0], x[1], x[2]);
    // a flat set has no interior whether or not it is also unbounded
    if x[3] <= FLAT_RADIUS * scale {
        return ChebyshevOutcome::Center(ChebyshevResult { center, radius: 0.0 });
    }
    if x[3] >= 0.5 * bound || center.max_abs() >= 0.5 * bound {
        return ChebyshevOutcome::Unbounded;
    }
    if has_recession_direction(&unit, seed) {
        return ChebyshevOutcome::Unbounded;
    }
    // report the exact slack at the returned center
    let radius = unit
        .iter()
        .map(|u| -u.eval(center))
        .fold(f64::INFINITY, f64::min)
        .max(0.0);
    ChebyshevOutcome::Center(ChebyshevResult { center, radius })
}

/// True when some `d != 0` has `n_i . d <= 0` for every (unit) normal.
fn has_recession_direction(unit: &[Halfspace], seed: u64) -> bool {
    for k in 0..3 {
        for s in [1.0, -1.0] {
            let mut obj = vec![0.0; 3];
            obj[k] = s;
            let mut lp = SmallLp::new(3, obj, 1.0);
            for u in unit {
                lp.push(&u.n.to_array(), 0.0);
            }
            if let Some(d) = lp.solve(seed) {
                if s * d[k] > 1e-9 {
                    return true;
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn cube(half: f64, offset: Point3) -> Vec<Halfspace> {
        let mut out = Vec::new();
        for k in 0..3 {
            for s in [1.0, -1.0] {
                let mut n = [0.0; 3];
                n[k] = s;
                let n = Point3::from_array(n);
                out.push(Halfspace::through(n, offset + n * half).unwrap());
            }
        }
        out
    }

    fn satisfies(hs: &[Halfspace], x: Point3) -> bool {
        hs.iter()
            .all(|h| h.eval(x) <= 1e-9 * (1.0 + h.b.abs() + x.norm()))
    }

    #[test]
    fn cube_is_feasible() {
        let hs = cube(0.5, Point3::ZERO);
        match feasible_point(&hs) {
            LpOutcome::Feasible(x) => assert!(satisfies(&hs, x)),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn disjoint_cubes_are_infeasible() {
        let mut hs = cube(0.5, Point3::ZERO);
        hs.extend(cube(0.5, Point3::new(2.0, 0.0, 0.0)));
        assert_eq!(feasible_point(&hs), LpOutcome::Infeasible);
    }

    #[test]
    fn overlapping_cubes_are_feasible() {
        let mut hs = cube(0.5, Point3::ZERO);
        hs.extend(cube(0.5, Point3::new(0.5, 0.0, 0.0)));
        match feasible_point(&hs) {
            LpOutcome::Feasible(x) => assert!(satisfies(&hs, x), "{x:?}"),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn touching_cubes_are_feasible() {
        let mut hs = cube(0.5, Point3::ZERO);
        hs.extend(cube(0.5, Point3::new(1.0, 0.0, 0.0)));
        assert!(feasible_point(&hs).is_feasible());
    }

    #[test]
    fn cube_chebyshev_center() {
        let ChebyshevOutcome::Center(r) = chebyshev_center(&cube(0.5, Point3::ZERO)) else {
            panic!()
        };
        assert!(r.center.norm() < 1e-12);
        assert!((r.radius - 0.5).abs() < 1e-12);
    }

    #[test]
    fn regular_tetrahedron_insphere() {
        // vertices of a regular tetrahedron, shifted off the origin
        let g = Point3::new(0.3, -1.2, 2.0);
        let v = [
            Point3::new(1.0, 1.0, 1.0),
            Point3::new(1.0, -1.0, -1.0),
            Point3::new(-1.0, 1.0, -1.0),
            Point3::new(-1.0, -1.0, 1.0),
        ];
        let mut hs = Vec::new();
        for i in 0..4 {
            // face opposite v[i] has outward normal -v[i]
            let p = v[(i + 1) % 4] + g;
            hs.push(Halfspace::through(-v[i], p).unwrap());
        }
        // closed form: edge a = 2*sqrt(2), inradius a / sqrt(24)
        let rho = 2.0 * 2f64.sqrt() / 24f64.sqrt();
        let ChebyshevOutcome::Center(r) = chebyshev_center(&hs) else {
            panic!()
        };
        assert!((r.center - g).norm() < 1e-12, "{:?}", r.center);
        assert!((r.radius - rho).abs() < 1e-12);
    }

    #[test]
    fn single_halfspace_is_unbounded() {
        let h = Halfspace::new(Point3::new(1.0, 0.0, 0.0), 0.0).unwrap();
        assert_eq!(chebyshev_center(&[h]), ChebyshevOutcome::Unbounded);
    }

    #[test]
    fn slab_is_unbounded() {
        let hs = &cube(1.0, Point3::ZERO)[..2];
        assert_eq!(chebyshev_center(hs), ChebyshevOutcome::Unbounded);
    }

    #[test]
    fn open_box_is_unbounded() {
        let mut hs = cube(1.0, Point3::ZERO);
        hs.remove(5);
        assert_eq!(chebyshev_center(&hs), ChebyshevOutcome::Unbounded);
    }

    #[test]
    fn empty_intersection_is_infeasible() {
        let hs = [
            Halfspace::new(Point3::new(1.0, 0.0, 0.0), 1.0).unwrap(), // x <= -1
            Halfspace::new(Point3::new(-1.0, 0.0, 0.0), 1.0).unwrap(), // x >= 1
        ];
        assert_eq!(chebyshev_center(&hs), ChebyshevOutcome::Infeasible);
    }

    #[test]
    fn flat_intersection_has_zero_radius() {
        let hs = [
            Halfspace::new(Point3::new(1.0, 0.0, 0.0), 0.0).unwrap(),
            Halfspace::new(Point3::new(-1.0, 0.0, 0.0), 0.0).unwrap(),
            Halfspace::new(Point3::new(0.0, 1.0, 0.0), 0.0).unwrap(),
            Halfspace::new(Point3::new(0.0, 0.0, 1.0), 0.0).unwrap(),
        ];
        match chebyshev_center(&hs) {
            ChebyshevOutcome::Center(r) => assert!(r.radius < 1e-12),
            ChebyshevOutcome::Unbounded => {}
            o => panic!("{o:?}"),
        }
    }

    /// Tangent planes at random directions on a sphere around `center`.
    fn random_polytope(seed: u64, m: usize) -> Vec<Halfspace> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let center = Point3::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), 0.5);
        (0..m)
            .map(|_| loop {
                let d = Point3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
                if d.norm() > 0.1 && d.norm() < 1.0 {
                    let d = d.normalized();
                    let dist = rng.random_range(0.5..2.0);
                    break Halfspace::through(d * rng.random_range(0.5..3.0), center + d * dist).unwrap();
                }
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn chebyshev_properties(seed in 0u64..10_000, m in 12usize..60) {
            let hs = random_polytope(seed, m);
            let ChebyshevOutcome::Center(r) = chebyshev_center(&hs) else {
                // a few draws leave a direction open
                return Ok(());
            };
            // shrunk halfspaces still contain the center
            for h in &hs {
                let shrunk = Halfspace { n: h.n, b: h.b + r.radius * h.n.norm() };
                prop_assert!(shrunk.eval(r.center) <= 1e-9 * (1.0 + shrunk.b.abs() + r.center.norm()));
            }
            // radius equals the smallest slack
            let slack = hs.iter().map(|h| -h.signed_distance(r.center)).fold(f64::INFINITY, f64::min);
            prop_assert!((slack - r.radius).abs() <= 1e-9 * r.radius.max(1e-300));
            // order invariance
            let mut shuffled = hs.clone();
            shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0xabc));
            let ChebyshevOutcome::Center(r2) = chebyshev_center_seeded(&shuffled, seed) else {
                return Err(TestCaseError::fail("permutation changed outcome"));
            };
            prop_assert!((r.radius - r2.radius).abs() <= 1e-9 * r.radius);
            prop_assert!((r.center - r2.center).norm() <= 1e-9 * (1.0 + r.center.norm()), "{:?} {:?}", r.center, r2.center);
        }

        #[test]
        fn feasible_witness_satisfies_constraints(seed in 0u64..10_000, m in 4usize..80) {
            let hs = random_polytope(seed, m);
            if let LpOutcome::Feasible(x) = feasible_point_seeded(&hs, seed) {
                prop_assert!(satisfies(&hs, x));
            }
        }
    }
}
