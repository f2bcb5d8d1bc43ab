//! Weak Finsler structures on convex domains and path lengths.
//!
//! The tautological structure of an open convex body `Ω` takes the translate
//! `Ω − x` as the unit ball at `x`, so its Lagrangian is the Minkowski gauge
//! `p_{Ω,x}`. Lengths of concrete paths are integrated numerically.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::body::{check_dim, ConvexBody, RadialResult};
use crate::directions::{default_certificate_dirs, unit_directions};
use crate::error::{Error, Result};
use crate::gauge::minkowski_gauge;
use crate::quadrature::gauss_legendre_8;
use crate::{Point, Vector};

/// A field of convex sets on an open subset of ℝⁿ, seen through its Lagrangian.
pub trait FinslerStructure {
    fn dimension(&self) -> usize;

    /// Finsler norm of `ξ` at `x`.
    fn lagrangian(&self, x: &Point, xi: &Vector) -> Result<f64>;
}

/// The tautological weak Finsler structure of a convex body.
#[derive(Debug, Clone)]
pub struct TautologicalStructure {
    body: ConvexBody,
}

impl TautologicalStructure {
    pub fn new(body: ConvexBody) -> Self {
        Self { body }
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }
}

impl FinslerStructure for TautologicalStructure {
    fn dimension(&self) -> usize {
        self.body.dimension()
    }

    fn lagrangian(&self, x: &Point, xi: &Vector) -> Result<f64> {
        minkowski_gauge(&self.body, x, xi)
    }
}

impl<S: FinslerStructure + ?Sized> FinslerStructure for &S {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn lagrangian(&self, x: &Point, xi: &Vector) -> Result<f64> {
        (**self).lagrangian(x, xi)
    }
}

/// Intersection of two structures: the fibre is the intersection of the
/// fibres, so the Lagrangian is the pointwise maximum.
#[derive(Debug, Clone)]
pub struct IntersectionStructure<A, B> {
    first: A,
    second: B,
}

impl<A: FinslerStructure, B: FinslerStructure> FinslerStructure for IntersectionStructure<A, B> {
    fn dimension(&self) -> usize {
        self.first.dimension()
    }

    fn lagrangian(&self, x: &Point, xi: &Vector) -> Result<f64> {
        Ok(self.first.lagrangian(x, xi)?.max(self.second.lagrangian(x, xi)?))
    }
}

pub fn structure_intersection<A: FinslerStructure, B: FinslerStructure>(
    first: A,
    second: B,
) -> Result<IntersectionStructure<A, B>> {
    if first.dimension() != second.dimension() {
        return Err(Error::DimensionMismatch { expected: first.dimension(), found: second.dimension() });
    }
    Ok(IntersectionStructure { first, second })
}

/// One sample of a parameterized curve.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub t: f64,
    pub point: Point,
    pub velocity: Vector,
}

/// Piecewise-C¹ path.
///
/// Polylines move along each chord at constant velocity over a unit
/// parameter interval. Sampled curves are interpolated by cubic Hermite
/// pieces through the given positions and velocities.
#[derive(Debug, Clone, PartialEq)]
pub enum Path {
    Polyline(Vec<Point>),
    Sampled(Vec<PathSample>),
}

impl Path {
    pub fn polyline(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::EmptyPath);
        }
        let n = vertices[0].len();
        for v in &vertices {
            check_dim(n, v)?;
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidPath("non-finite vertex".into()));
            }
        }
        Ok(Path::Polyline(vertices))
    }

    pub fn sampled(samples: Vec<PathSample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::EmptyPath);
        }
        let n = samples[0].point.len();
        for s in &samples {
            check_dim(n, &s.point)?;
            check_dim(n, &s.velocity)?;
        }
        if samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::InvalidPath("sample times must increase strictly".into()));
        }
        Ok(Path::Sampled(samples))
    }

    /// Samples `curve` and its derivative at `count` equally spaced times in `[a, b]`.
    pub fn from_curve(
        curve: impl Fn(f64) -> Point,
        derivative: impl Fn(f64) -> Vector,
        a: f64,
        b: f64,
        count: usize,
    ) -> Result<Self> {
        if count < 2 {
            return Err(Error::EmptyPath);
        }
        let samples = (0..count)
            .map(|i| {
                let t = a + (b - a) * i as f64 / (count - 1) as f64;
                PathSample { t, point: curve(t), velocity: derivative(t) }
            })
            .collect();
        Self::sampled(samples)
    }

    pub fn dimension(&self) -> usize {
        self.start().len()
    }

    pub fn start(&self) -> &Point {
        match self {
            Path::Polyline(v) => &v[0],
            Path::Sampled(s) => &s[0].point,
        }
    }

    pub fn end(&self) -> &Point {
        match self {
            Path::Polyline(v) => v.last().expect("nonempty"),
            Path::Sampled(s) => &s.last().expect("nonempty").point,
        }
    }

    /// Concatenation `self ∗ other`; `other` must start where `self` ends.
    pub fn concat(&self, other: &Path) -> Result<Path> {
        if self.end() != other.start() {
            return Err(Error::InvalidPath("paths do not meet".into()));
        }
        match (self, other) {
            (Path::Polyline(a), Path::Polyline(b)) => {
                let mut v = a.clone();
                v.extend(b[1..].iter().cloned());
                Path::polyline(v)
            }
            (Path::Sampled(a), Path::Sampled(b)) => {
                let shift = a.last().expect("nonempty").t - b[0].t;
                let mut v = a.clone();
                // The junction keeps the incoming velocity of `other`.
                v.pop();
                v.extend(b.iter().map(|s| PathSample { t: s.t + shift, ..s.clone() }));
                Path::sampled(v)
            }
            _ => Err(Error::InvalidPath("cannot concatenate a polyline with a sampled curve".into())),
        }
    }
}

/// Quadrature settings for [`path_length`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Equal sub-intervals per segment, each integrated with the 8-point rule.
    pub subdivisions: usize,
    /// Relative tolerance for bisecting a sub-interval further.
    pub tolerance: f64,
    /// Maximum bisection depth per sub-interval.
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { subdivisions: 64, tolerance: 1e-12, max_depth: 30 }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<()> {
        if self.subdivisions == 0 {
            return Err(Error::InvalidArgument("subdivisions must be at least 1".into()));
        }
        Ok(())
    }
}

fn integrand(structure: &impl FinslerStructure, x: &Point, xi: &Vector) -> Result<f64> {
    match structure.lagrangian(x, xi) {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) | Err(Error::PointOutside) => Err(Error::PathExitsBody),
        Err(e) => Err(e),
    }
}

fn integrate_interval(
    a: f64,
    b: f64,
    q: &QuadratureSpec,
    f: &mut impl FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    let rule = gauss_legendre_8();
    let width = (b - a) / q.subdivisions as f64;
    let mut total = 0.0;
    for k in 0..q.subdivisions {
        let lo = a + width * k as f64;
        let hi = if k + 1 == q.subdivisions { b } else { lo + width };
        total += rule.integrate_adaptive(lo, hi, q.tolerance, q.max_depth, f)?;
    }
    Ok(total)
}

/// `ℓ(γ) = ∫ L(γ(t), γ̇(t)) dt`, summed piece by piece.
pub fn path_length(structure: &impl FinslerStructure, path: &Path, q: &QuadratureSpec) -> Result<f64> {
    q.validate()?;
    check_dim(structure.dimension(), path.start())?;
    match path {
        Path::Polyline(vertices) => {
            let mut total = 0.0;
            for pair in vertices.windows(2) {
                let (a, b) = (&pair[0], &pair[1]);
                let chord = b - a;
                if chord.iter().all(|c| *c == 0.0) {
                    integrand(structure, a, &chord)?;
                    continue;
                }
                let mut at = a.clone();
                total += integrate_interval(0.0, 1.0, q, &mut |t| {
                    at.copy_from(a);
                    at.axpy(t, &chord, 1.0);
                    integrand(structure, &at, &chord)
                })?;
            }
            Ok(total)
        }
        Path::Sampled(samples) => {
            let mut total = 0.0;
            for pair in samples.windows(2) {
                let piece = HermitePiece::new(&pair[0], &pair[1]);
                total += integrate_interval(pair[0].t, pair[1].t, q, &mut |t| {
                    let (p, v) = piece.eval(t);
                    integrand(structure, &p, &v)
                })?;
            }
            Ok(total)
        }
    }
}

/// Length at the requested resolution and at twice the subdivisions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthEstimate {
    pub coarse: f64,
    pub fine: f64,
    pub relative_difference: f64,
}

impl LengthEstimate {
    pub fn value(&self) -> f64 {
        self.fine
    }
}

pub fn path_length_checked(
    structure: &impl FinslerStructure,
    path: &Path,
    q: &QuadratureSpec,
) -> Result<LengthEstimate> {
    let coarse = path_length(structure, path, q)?;
    let fine_spec = QuadratureSpec { subdivisions: 2 * q.subdivisions, ..*q };
    let fine = path_length(structure, path, &fine_spec)?;
    let scale = fine.abs().max(f64::MIN_POSITIVE);
    Ok(LengthEstimate { coarse, fine, relative_difference: (fine - coarse).abs() / scale })
}

struct HermitePiece<'a> {
    t0: f64,
    h: f64,
    start: &'a PathSample,
    end: &'a PathSample,
}

impl<'a> HermitePiece<'a> {
    fn new(start: &'a PathSample, end: &'a PathSample) -> Self {
        Self { t0: start.t, h: end.t - start.t, start, end }
    }

    fn eval(&self, t: f64) -> (Point, Vector) {
        let s = (t - self.t0) / self.h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -6.0 * s2 + 6.0 * s;
        let d11 = 3.0 * s2 - 2.0 * s;
        let (p0, p1) = (&self.start.point, &self.end.point);
        let (v0, v1) = (&self.start.velocity, &self.end.velocity);
        let point = p0 * h00 + v0 * (h10 * self.h) + p1 * h01 + v1 * (h11 * self.h);
        let velocity = p0 * (d00 / self.h) + v0 * d10 + p1 * (d01 / self.h) + v1 * d11;
        (point, velocity)
    }
}

/// Closed-form length of the segment `[x, y]`: `log(t*/(t*−1))` where
/// `x + t*(y−x)` is the exit point, and `0` when the ray stays inside.
pub fn segment_length_closed(structure: &TautologicalStructure, x: &Point, y: &Point) -> Result<f64> {
    let body = structure.body();
    if !body.contains(x)? || !body.contains(y)? {
        return Err(Error::PointOutside);
    }
    if x == y {
        return Ok(0.0);
    }
    match body.ray_boundary(x, &(y - x))? {
        RadialResult::Contained => Ok(0.0),
        RadialResult::Hit(t) if t > 1.0 => Ok(-(-1.0 / t).ln_1p()),
        RadialResult::Hit(t) => Err(Error::Numerical(format!("exit parameter {t} does not exceed 1"))),
    }
}

/// Result of the minimality probe.
#[derive(Debug, Clone, PartialEq)]
pub struct InfimumEstimate {
    /// Smallest length seen over the straight segment and all perturbed paths.
    pub best: f64,
    /// Quadrature length of the straight segment.
    pub straight: f64,
    /// [`segment_length_closed`] for the same endpoints.
    pub closed_form: f64,
    /// Index of the perturbed path that attained `best`, if any beat the segment.
    pub best_trial: Option<usize>,
    pub trials: usize,
}

/// Minimum length over the straight segment and `trials` random interior
/// polylines with 3 to 6 vertices.
///
/// Interior vertices are jittered points of the segment (Gaussian, standard
/// deviation `0.1 ×` the estimated inradius), rejected until interior. Trial
/// `i` draws from its own ChaCha stream, so the result does not depend on
/// evaluation order.
pub fn infimum_estimate(
    structure: &TautologicalStructure,
    x: &Point,
    y: &Point,
    trials: usize,
    seed: u64,
) -> Result<InfimumEstimate> {
    let body = structure.body();
    let closed_form = segment_length_closed(structure, x, y)?;
    let q = QuadratureSpec::default();
    let straight = path_length(structure, &Path::polyline(vec![x.clone(), y.clone()])?, &q)?;
    let mut best = straight;
    let mut best_trial = None;
    if x == y {
        return Ok(InfimumEstimate { best: 0.0, straight: 0.0, closed_form, best_trial, trials });
    }
    let sigma = 0.1 * inradius_estimate(body);
    let jitter = Normal::new(0.0, sigma).map_err(|e| Error::Numerical(e.to_string()))?;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let interior = rng.random_range(1..=4usize);
        let mut params: Vec<f64> = (0..interior).map(|_| rng.random_range(0.0..1.0)).collect();
        params.sort_by(f64::total_cmp);
        let mut vertices = vec![x.clone()];
        for s in params {
            let on_segment = x + (y - x) * s;
            let mut vertex = on_segment.clone();
            for _ in 0..100 {
                let candidate = &on_segment + DVector::from_fn(x.len(), |_, _| jitter.sample(&mut rng));
                if body.contains_unchecked(&candidate) {
                    vertex = candidate;
                    break;
                }
            }
            vertices.push(vertex);
        }
        vertices.push(y.clone());
        let length = path_length(structure, &Path::polyline(vertices)?, &q)?;
        if length < best {
            best = length;
            best_trial = Some(trial);
        }
    }
    Ok(InfimumEstimate { best, straight, closed_form, best_trial, trials })
}

/// Smallest sampled exit distance from the witness.
pub fn inradius_estimate(body: &ConvexBody) -> f64 {
    let n = body.dimension();
    let w = body.witness();
    unit_directions(n, default_certificate_dirs(n))
        .iter()
        .filter_map(|d| body.exit_unchecked(&w, d).hit())
        .fold(f64::INFINITY, f64::min)
        .min(1e6)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::gauge_ball_closed;
    use crate::point as v;
    use crate::sampling::{random_interior_point, rng, standard_bodies};
    use std::f64::consts::LN_2;

    fn disk() -> TautologicalStructure {
        TautologicalStructure::new(ConvexBody::ball(&[0.0, 0.0], 1.0).unwrap())
    }

    fn upper_half_plane() -> TautologicalStructure {
        TautologicalStructure::new(ConvexBody::half_space(&[0.0, -1.0], 0.0).unwrap())
    }

    fn segment(a: &[f64], b: &[f64]) -> Path {
        Path::polyline(vec![v(a), v(b)]).unwrap()
    }

    #[test]
    fn lagrangian_examples() {
        assert_eq!(disk().lagrangian(&v(&[0.0, 0.0]), &v(&[0.0, 1.0])).unwrap(), 1.0);
        assert_eq!(upper_half_plane().lagrangian(&v(&[0.0, 1.0]), &v(&[0.0, -1.0])).unwrap(), 1.0);
        let l = disk().lagrangian(&v(&[0.5, 0.0]), &v(&[1.0, 0.0])).unwrap();
        assert!((l - 2.0).abs() < 1e-15);
        assert_eq!(disk().lagrangian(&v(&[1.0, 0.0]), &v(&[1.0, 0.0])), Err(Error::PointOutside));
    }

    #[test]
    fn path_length_examples() {
        let q = QuadratureSpec::default();
        let l = path_length(&disk(), &segment(&[0.0, 0.0], &[0.5, 0.0]), &q).unwrap();
        assert!((l - LN_2).abs() < 1e-6);
        let constant = Path::polyline(vec![v(&[0.2, 0.1]); 3]).unwrap();
        assert_eq!(path_length(&disk(), &constant, &q).unwrap(), 0.0);
        let l = path_length(&upper_half_plane(), &segment(&[0.0, 2.0], &[0.0, 1.0]), &q).unwrap();
        assert!((l - LN_2).abs() < 1e-6);
    }

    #[test]
    fn path_length_errors() {
        let q = QuadratureSpec::default();
        assert_eq!(path_length(&disk(), &segment(&[0.0, 0.0], &[1.5, 0.0]), &q), Err(Error::PathExitsBody));
        assert_eq!(Path::polyline(vec![v(&[0.0, 0.0])]), Err(Error::EmptyPath));
        let zero = QuadratureSpec { subdivisions: 0, ..q };
        assert!(path_length(&disk(), &segment(&[0.0, 0.0], &[0.5, 0.0]), &zero).is_err());
        let bad = Path::sampled(vec![
            PathSample { t: 1.0, point: v(&[0.0, 0.0]), velocity: v(&[0.0, 0.0]) },
            PathSample { t: 1.0, point: v(&[0.0, 0.0]), velocity: v(&[0.0, 0.0]) },
        ]);
        assert!(matches!(bad, Err(Error::InvalidPath(_))));
    }

    #[test]
    fn segment_length_examples() {
        let s = disk();
        let l = segment_length_closed(&s, &v(&[0.0, 0.0]), &v(&[0.5, 0.0])).unwrap();
        assert!((l - LN_2).abs() < 1e-15);
        let square = TautologicalStructure::new(ConvexBody::axis_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap());
        let l = segment_length_closed(&square, &v(&[0.5, 0.5]), &v(&[0.75, 0.5])).unwrap();
        assert!((l - LN_2).abs() < 1e-15);
        let h = upper_half_plane();
        assert_eq!(segment_length_closed(&h, &v(&[0.0, 1.0]), &v(&[3.0, 1.0])).unwrap(), 0.0);
        assert_eq!(segment_length_closed(&s, &v(&[0.1, 0.1]), &v(&[0.1, 0.1])).unwrap(), 0.0);
        assert_eq!(segment_length_closed(&s, &v(&[0.0, 0.0]), &v(&[2.0, 0.0])), Err(Error::PointOutside));
    }

    #[test]
    fn concatenation_adds_lengths() {
        let q = QuadratureSpec::default();
        let a = Path::polyline(vec![v(&[0.0, 0.0]), v(&[0.3, 0.2])]).unwrap();
        let b = Path::polyline(vec![v(&[0.3, 0.2]), v(&[-0.4, 0.5]), v(&[0.1, -0.6])]).unwrap();
        let joined = a.concat(&b).unwrap();
        let sum = path_length(&disk(), &a, &q).unwrap() + path_length(&disk(), &b, &q).unwrap();
        assert!((path_length(&disk(), &joined, &q).unwrap() - sum).abs() < 1e-14);
        assert!(b.concat(&a).is_err());
    }

    #[test]
    fn polyline_length_is_sum_of_closed_segments() {
        let q = QuadratureSpec::default();
        let mut r = rng(31);
        for body in standard_bodies() {
            let s = TautologicalStructure::new(body.clone());
            for _ in 0..50 {
                let vertices: Vec<Point> = (0..4).map(|_| random_interior_point(&body, &mut r, 0.98)).collect();
                let closed: f64 = vertices
                    .windows(2)
                    .map(|w| segment_length_closed(&s, &w[0], &w[1]).unwrap())
                    .sum();
                let l = path_length(&s, &Path::polyline(vertices).unwrap(), &q).unwrap();
                assert!((l - closed).abs() <= 1e-6 * closed, "{l} vs {closed}");
            }
        }
    }

    #[test]
    fn sampled_circle_length_is_stable_under_refinement() {
        // Circle of radius 0.5 about the center of the unit disk. Tangent
        // vectors are orthogonal to γ, so the gauge is |γ̇| / √(1 − |γ|²).
        let s = disk();
        let q = QuadratureSpec::default();
        let curve = |t: f64| v(&[0.5 * t.cos(), 0.5 * t.sin()]);
        let deriv = |t: f64| v(&[-0.5 * t.sin(), 0.5 * t.cos()]);
        let tau = std::f64::consts::TAU;
        let coarse = path_length(&s, &Path::from_curve(curve, deriv, 0.0, tau, 129).unwrap(), &q).unwrap();
        let fine = path_length(&s, &Path::from_curve(curve, deriv, 0.0, tau, 257).unwrap(), &q).unwrap();
        assert!((fine - coarse).abs() < 1e-6 * fine);
        let exact = tau * 0.5 / 0.75f64.sqrt();
        assert!((fine - exact).abs() < 1e-6 * exact);

        // Off-center ellipse arc, compared against the closed-form ball gauge.
        let curve = |t: f64| v(&[0.2 + 0.6 * t.cos(), 0.3 * t.sin()]);
        let deriv = |t: f64| v(&[-0.6 * t.sin(), 0.3 * t.cos()]);
        let coarse = path_length(&s, &Path::from_curve(curve, deriv, 0.0, 3.0, 100).unwrap(), &q).unwrap();
        let fine = path_length(&s, &Path::from_curve(curve, deriv, 0.0, 3.0, 199).unwrap(), &q).unwrap();
        assert!((fine - coarse).abs() < 1e-6 * fine);
        let rule = gauss_legendre_8();
        let reference = rule
            .integrate_adaptive(0.0, 3.0, 1e-14, 40, &mut |t| gauge_ball_closed(1.0, &curve(t), &deriv(t)))
            .unwrap();
        assert!((fine - reference).abs() < 1e-6 * reference);
    }

    #[test]
    fn checked_length_reports_refinement() {
        let est = path_length_checked(&disk(), &segment(&[0.0, 0.0], &[0.999, 0.0]), &QuadratureSpec::default()).unwrap();
        assert!(est.relative_difference < 1e-10);
        assert!((est.value() - (1000.0f64).ln()).abs() < 1e-9);
    }

    #[test]
    fn longer_paths_in_larger_domains_are_shorter() {
        let mut r = rng(32);
        let q = QuadratureSpec::default();
        let small = TautologicalStructure::new(ConvexBody::ball(&[0.0, 0.0], 1.0).unwrap());
        let big = TautologicalStructure::new(ConvexBody::axis_box(&[-1.0, -1.0], &[1.0, 1.0]).unwrap());
        for _ in 0..1000 {
            let vertices: Vec<Point> =
                (0..3).map(|_| random_interior_point(small.body(), &mut r, 0.99)).collect();
            let path = Path::polyline(vertices).unwrap();
            assert!(path_length(&big, &path, &q).unwrap() <= path_length(&small, &path, &q).unwrap() + 1e-9);
        }
    }

    #[test]
    fn infimum_examples() {
        let est = infimum_estimate(&disk(), &v(&[0.0, 0.0]), &v(&[0.5, 0.0]), 100, 1).unwrap();
        assert!(est.best >= LN_2 - 1e-9);
        assert!((est.closed_form - LN_2).abs() < 1e-15);
        let est = infimum_estimate(&disk(), &v(&[0.2, 0.0]), &v(&[0.2, 0.0]), 10, 1).unwrap();
        assert_eq!(est.best, 0.0);
        let est = infimum_estimate(&upper_half_plane(), &v(&[0.0, 1.0]), &v(&[0.0, 2.0]), 20, 1).unwrap();
        assert_eq!(est.best, 0.0);
        assert_eq!(est.closed_form, 0.0);
    }

    #[test]
    fn infimum_never_beats_the_segment() {
        let mut r = rng(33);
        for body in standard_bodies() {
            let s = TautologicalStructure::new(body.clone());
            for k in 0..10 {
                let x = random_interior_point(&body, &mut r, 0.95);
                let y = random_interior_point(&body, &mut r, 0.95);
                let est = infimum_estimate(&s, &x, &y, 20, k).unwrap();
                assert!(est.best >= est.closed_form - 1e-9);
            }
        }
    }

    #[test]
    fn intersection_structure_takes_the_max() {
        let d = disk();
        let cap = TautologicalStructure::new(ConvexBody::half_space(&[0.0, 1.0], 0.5).unwrap());
        let both = structure_intersection(&d, &cap).unwrap();
        let o = v(&[0.0, 0.0]);
        assert_eq!(both.lagrangian(&o, &v(&[0.0, 1.0])).unwrap(), 2.0);
        let p = v(&[0.1, -0.3]);
        let xi = v(&[0.4, 0.7]);
        let expected = d.lagrangian(&p, &xi).unwrap().max(cap.lagrangian(&p, &xi).unwrap());
        assert_eq!(both.lagrangian(&p, &xi).unwrap(), expected);
        let same = structure_intersection(&d, &d).unwrap();
        assert_eq!(same.lagrangian(&p, &xi).unwrap(), d.lagrangian(&p, &xi).unwrap());

        let body = ConvexBody::intersection(vec![d.body().clone(), cap.body().clone()]).unwrap();
        let direct = TautologicalStructure::new(body);
        let mut r = rng(34);
        for _ in 0..1000 {
            let x = random_interior_point(direct.body(), &mut r, 1.0);
            let xi = v(&[r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)]);
            let a = both.lagrangian(&x, &xi).unwrap();
            let b = direct.lagrangian(&x, &xi).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
        let ball3 = TautologicalStructure::new(ConvexBody::ball(&[0.0, 0.0, 0.0], 1.0).unwrap());
        assert!(structure_intersection(&d, &ball3).is_err());
    }
}
