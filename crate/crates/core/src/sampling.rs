//! Seeded sampling helpers shared by the verification suites and tests.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::body::{ConvexBody, Ellipsoid, HPolytope};
use crate::Point;

/// Half-width of the sampling box used for unbounded bodies.
const UNBOUNDED_BOX: f64 = 10.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rejection-sampled interior point, pulled towards the witness by `shrink`
/// (`shrink = 1` leaves the sample as drawn).
pub fn random_interior_point(body: &ConvexBody, rng: &mut impl Rng, shrink: f64) -> Point {
    let w = body.witness();
    let radius = body.bounding_radius();
    let radius = if radius.is_finite() { radius } else { UNBOUNDED_BOX };
    let n = body.dimension();
    loop {
        let q = DVector::from_fn(n, |i, _| w[i] + radius * rng.random_range(-1.0..1.0));
        if body.contains_unchecked(&q) {
            let p = &w + (q - &w) * shrink;
            if body.contains_unchecked(&p) {
                return p;
            }
        }
    }
}

/// Convex polygon with `m` vertices at random angles on a circle of radius
/// `radius`, angular gaps kept below π so the center is interior.
pub fn random_polygon(m: usize, radius: f64, seed: u64) -> ConvexBody {
    let mut r = rng(seed);
    loop {
        let mut angles: Vec<f64> = (0..m).map(|_| r.random_range(0.0..TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let max_gap = angles
            .windows(2)
            .map(|w| w[1] - w[0])
            .chain(std::iter::once(angles[0] + TAU - angles[m - 1]))
            .fold(0.0, f64::max);
        if max_gap >= 0.9 * std::f64::consts::PI {
            continue;
        }
        let vertices: Vec<[f64; 2]> = angles.iter().map(|a| [radius * a.cos(), radius * a.sin()]).collect();
        if let Ok(p) = HPolytope::from_ccw_polygon(&vertices) {
            return p.into();
        }
    }
}

/// Rotated, off-center ellipse with semi-axes in `[0.5, 2]`.
pub fn random_ellipse(seed: u64) -> ConvexBody {
    let mut r = rng(seed);
    let a = r.random_range(0.5..2.0);
    let b = r.random_range(0.5..2.0);
    let theta = r.random_range(0.0..TAU);
    let (s, c) = theta.sin_cos();
    let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
    let diag = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 / (a * a), 1.0 / (b * b)]));
    let mut q = &rot * diag * rot.transpose();
    q.fill_upper_triangle_with_lower_triangle();
    let center = DVector::from_vec(vec![r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)]);
    Ellipsoid::new(center, q).expect("rotated diagonal SPD matrix").into()
}

/// Unit disk, unit square, seeded random 12-gon and seeded random ellipse.
pub fn standard_bodies() -> Vec<ConvexBody> {
    vec![
        ConvexBody::ball(&[0.0, 0.0], 1.0).expect("unit disk"),
        ConvexBody::axis_box(&[0.0, 0.0], &[1.0, 1.0]).expect("unit square"),
        random_polygon(12, 1.0, 12),
        random_ellipse(2),
    ]
}

/// Names matching [`standard_bodies`].
pub const STANDARD_BODY_NAMES: [&str; 4] = ["disk", "square", "12-gon", "ellipse"];
