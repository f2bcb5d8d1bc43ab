//! Deterministic unit-direction samplers.
//!
//! 1-D yields the two signs, 2-D uniform angles, 3-D a Fibonacci sphere.
//! Higher dimensions fall back to normalized Gaussian samples from a fixed
//! seed so that outputs stay reproducible.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::Vector;

/// Default direction count for sphere sampling in the plane.
pub const SPHERE_DIRS_2D: usize = 720;
/// Default direction count for sphere sampling in 3-D and above.
pub const SPHERE_DIRS_ND: usize = 2048;

const HIGH_DIM_SEED: u64 = 0x5eed_d1ec;

/// Default number of directions used for spheres in dimension `n`.
pub fn default_sphere_dirs(n: usize) -> usize {
    if n <= 2 {
        SPHERE_DIRS_2D
    } else {
        SPHERE_DIRS_ND
    }
}

/// Default number of directions for sampled certificates (boundedness,
/// symmetry) in dimension `n`.
pub fn default_certificate_dirs(n: usize) -> usize {
    360 * n.max(1)
}

/// Unit directions in dimension `n`. `count` is ignored for `n = 1`.
pub fn unit_directions(n: usize, count: usize) -> Vec<Vector> {
    match n {
        0 => Vec::new(),
        1 => vec![DVector::from_element(1, 1.0), DVector::from_element(1, -1.0)],
        2 => (0..count)
            .map(|k| {
                let theta = std::f64::consts::TAU * k as f64 / count as f64;
                DVector::from_vec(vec![theta.cos(), theta.sin()])
            })
            .collect(),
        3 => fibonacci_sphere(count),
        _ => gaussian_directions(n, count),
    }
}

fn fibonacci_sphere(count: usize) -> Vec<Vector> {
    let golden_angle = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden_angle * i as f64;
            DVector::from_vec(vec![r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}

fn gaussian_directions(n: usize, count: usize) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(HIGH_DIM_SEED ^ n as u64);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        let norm: f64 = v.norm();
        if norm > 1e-12 {
            out.push(v / norm);
        }
    }
    out
}
