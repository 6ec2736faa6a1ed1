//! Seeded synthetic point clouds and rotations for tests and benchmarks.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::geometry::Point3;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Point3 {
    Point3::new(
        StandardNormal.sample(rng),
        StandardNormal.sample(rng),
        StandardNormal.sample(rng),
    )
}

/// Uniform on the unit sphere.
pub fn sphere_surface<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Point3> {
    (0..n)
        .map(|_| loop {
            let g = gaussian(rng);
            let len = g.norm();
            if len > 1e-9 {
                break g / len;
            }
        })
        .collect()
}

/// Uniform in the unit ball.
pub fn uniform_ball<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Point3> {
    let dirs = sphere_surface(rng, n);
    dirs.into_iter()
        .map(|d| d * rng.random::<f64>().cbrt())
        .collect()
}

/// Gaussian with axis scales 3, 1 and 0.4.
pub fn anisotropic_gaussian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Point3> {
    (0..n)
        .map(|_| {
            let g = gaussian(rng);
            Point3::new(3.0 * g.x, g.y, 0.4 * g.z)
        })
        .collect()
}

/// Two Gaussian clusters of unequal size, offset along a diagonal.
pub fn two_cluster<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Point3> {
    let offset = Point3::new(2.5, 1.5, 0.5);
    (0..n)
        .map(|i| {
            let g = gaussian(rng);
            if i % 3 == 0 {
                g * 0.6 + offset
            } else {
                g
            }
        })
        .collect()
}

/// `family` 0 = uniform ball, 1 = anisotropic Gaussian, 2 = two clusters.
pub fn cloud<R: Rng + ?Sized>(rng: &mut R, family: usize, n: usize) -> Vec<Point3> {
    match family % 3 {
        0 => uniform_ball(rng, n),
        1 => anisotropic_gaussian(rng, n),
        _ => two_cluster(rng, n),
    }
}

/// Proper rotation stored as a row-major matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    pub m: [[f64; 3]; 3],
}

impl Rotation {
    pub fn from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Self {
        let s = (w * w + x * x + y * y + z * z).sqrt();
        let (w, x, y, z) = (w / s, x / s, y / s, z / s);
        Rotation {
            m: [
                [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
                [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
                [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
            ],
        }
    }

    pub fn apply(&self, p: Point3) -> Point3 {
        let r = |k: usize| self.m[k][0] * p.x + self.m[k][1] * p.y + self.m[k][2] * p.z;
        Point3::new(r(0), r(1), r(2))
    }
}

/// Uniformly distributed rotation.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation {
    loop {
        let w: f64 = StandardNormal.sample(rng);
        let g = gaussian(rng);
        if w * w + g.norm_squared() > 1e-12 {
            return Rotation::from_quaternion(w, g.x, g.y, g.z);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rotation_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let r = random_rotation(&mut rng);
            let e = [Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0), Point3::new(0.0, 0.0, 1.0)];
            let img = e.map(|v| r.apply(v));
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((img[i].dot(img[j]) - want).abs() < 1e-14);
                }
            }
            assert!((img[0].cross(img[1]).dot(img[2]) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let a = uniform_ball(&mut ChaCha8Rng::seed_from_u64(3), 50);
        let b = uniform_ball(&mut ChaCha8Rng::seed_from_u64(3), 50);
        assert_eq!(a, b);
        assert!(a.iter().all(|p| p.norm() <= 1.0));
        assert!(sphere_surface(&mut ChaCha8Rng::seed_from_u64(3), 50)
            .iter()
            .all(|p| (p.norm() - 1.0).abs() < 1e-15));
    }
}
