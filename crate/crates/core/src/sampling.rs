//! Deterministic point sets on unit spheres and seeded random draws.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

use crate::vector::{normalized, scale};

/// Covering-radius constant for the spherical Fibonacci lattice: every
/// point of `S^2` lies within `FIBONACCI_COVERING_CONSTANT / sqrt(N)` of one
/// of the `N` lattice points (for `N >= 1000`). Dense probing puts the worst
/// gap, found near the poles, at about `2.7 / sqrt(N)`.
pub const FIBONACCI_COVERING_CONSTANT: f64 = 3.5;

/// Spherical Fibonacci lattice with `count` points on `S^2`.
pub fn fibonacci_sphere(count: usize) -> Vec<[f64; 3]> {
    let golden_angle = PI * (3.0 - 5.0f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden_angle * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// `count` equally spaced points on the unit circle.
pub fn circle_points(count: usize) -> Vec<[f64; 2]> {
    (0..count)
        .map(|i| {
            let phi = 2.0 * PI * (i as f64 + 0.5) / count as f64;
            [phi.cos(), phi.sin()]
        })
        .collect()
}

/// A near-uniform sample of `S^{dim-1}`.
///
/// Dimensions 1 to 3 use deterministic lattices (the two points of `S^0`,
/// an equispaced circle, the Fibonacci lattice). Higher dimensions fall back
/// to seeded Gaussian directions.
pub fn sphere_points(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => circle_points(count).iter().map(|p| p.to_vec()).collect(),
        3 => fibonacci_sphere(count).iter().map(|p| p.to_vec()).collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_5a3d);
            (0..count).map(|_| random_unit_vector(&mut rng, dim)).collect()
        }
    }
}

/// Upper bound on the angular distance from any point of the sphere to the
/// nearest point of [`sphere_points`]. `None` when no deterministic bound is
/// available (dimension 4 and up).
pub fn covering_radius(dim: usize, count: usize) -> Option<f64> {
    match dim {
        1 => Some(0.0),
        2 => Some(PI / count as f64),
        3 => Some(FIBONACCI_COVERING_CONSTANT / (count as f64).sqrt()),
        _ => None,
    }
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        if let Some(u) = normalized(&v) {
            return u;
        }
    }
}

/// Uniform point in the open ball `B(0, radius)`.
pub fn random_in_ball<R: Rng + ?Sized>(rng: &mut R, dim: usize, radius: f64) -> Vec<f64> {
    let dir = random_unit_vector(rng, dim);
    let u: f64 = rng.random::<f64>();
    let r = radius * u.powf(1.0 / dim as f64);
    // stay strictly inside
    scale(&dir, r.min(radius * (1.0 - 1e-12)))
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::{angle_between, norm};

    #[test]
    fn lattices_are_unit() {
        for p in fibonacci_sphere(1000) {
            assert!((norm(&p) - 1.0).abs() < 1e-14);
        }
        for p in sphere_points(5, 50) {
            assert!((norm(&p) - 1.0).abs() < 1e-14);
        }
        assert_eq!(sphere_points(1, 10).len(), 2);
    }

    #[test]
    fn fibonacci_covering_bound_holds_on_probes() {
        let mut rng = seeded_rng(11);
        for &count in &[1_000usize, 10_000] {
            let pts = fibonacci_sphere(count);
            let bound = covering_radius(3, count).unwrap();
            let mut worst: f64 = 0.0;
            for _ in 0..2_000 {
                let q = random_unit_vector(&mut rng, 3);
                let best = pts
                    .iter()
                    .map(|p| angle_between(p, &q))
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(best);
            }
            assert!(worst < bound, "count {count}: probe distance {worst} vs bound {bound}");
        }
    }

    #[test]
    fn ball_samples_stay_inside() {
        let mut rng = seeded_rng(3);
        for _ in 0..1000 {
            let y = random_in_ball(&mut rng, 3, 2.0);
            assert!(norm(&y) < 2.0);
        }
    }
}
