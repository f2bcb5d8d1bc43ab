//! The Funk weak metric of an open convex body.
//!
//! `F(x, y) = log(|x − a⁺| / |y − a⁺|)` where `a⁺` is the point at which the
//! ray from `x` through `y` leaves the body, and `0` when it never does.
//! This module evaluates it in closed form, checks its geodesic properties
//! and samples its forward (right) and backward (left) spheres.
//!
//! For two bodies `Ω₁, Ω₂` the metric of the intersection is
//! `max{F_{Ω₁}, F_{Ω₂}}`.

use serde::{Deserialize, Serialize};

use crate::body::{check_dim, ConvexBody, HPolytope, Intersection, RadialResult};
use crate::directions::{default_certificate_dirs, unit_directions};
use crate::error::{Error, Result};
use crate::Point;

/// Default absolute tolerance for metric identities.
pub const METRIC_TOL: f64 = 1e-9;

/// Distance together with the exit point of the ray from `x` through `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunkDistance {
    pub value: f64,
    /// `None` when the ray stays inside the body or `x = y`.
    pub exit_point: Option<Point>,
}

/// `F(x, y)` with its exit point.
///
/// The value is computed as `log(1 + 1/s)` where `y + s(y − x)` is the exit
/// point, which equals `log(t*/(t* − 1))` for the exit parameter `t* = s + 1`
/// from `x` but keeps full relative accuracy when `y` is near the boundary.
pub fn funk_distance(body: &ConvexBody, x: &Point, y: &Point) -> Result<FunkDistance> {
    if !body.contains(x)? || !body.contains(y)? {
        return Err(Error::PointOutside);
    }
    if x == y {
        return Ok(FunkDistance { value: 0.0, exit_point: None });
    }
    let dir = y - x;
    match body.ray_boundary(y, &dir)? {
        RadialResult::Contained => Ok(FunkDistance { value: 0.0, exit_point: None }),
        RadialResult::Hit(s) => Ok(FunkDistance { value: (1.0 / s).ln_1p(), exit_point: Some(y + dir * s) }),
    }
}

/// Shorthand for `funk_distance(..).value`.
pub fn funk(body: &ConvexBody, x: &Point, y: &Point) -> Result<f64> {
    funk_distance(body, x, y).map(|d| d.value)
}

/// Closed form on the upper half-plane `{x₂ > 0}`: `max(log(x₂/y₂), 0)`.
pub fn funk_upper_halfplane(x: &Point, y: &Point) -> Result<f64> {
    check_dim(2, x)?;
    check_dim(2, y)?;
    if !(x[1] > 0.0 && y[1] > 0.0) {
        return Err(Error::PointOutside);
    }
    Ok((x[1] / y[1]).ln().max(0.0))
}

/// Whether consecutive distances along `points` add up to the end-to-end distance.
pub fn is_geodesic_chain(body: &ConvexBody, points: &[Point], tol: f64) -> Result<bool> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument("a chain needs at least two points".into()));
    }
    Ok(chain_defect(body, points)?.abs() <= tol)
}

/// `Σ F(pᵢ, pᵢ₊₁) − F(p₀, p_last)`; nonnegative up to rounding.
pub fn chain_defect(body: &ConvexBody, points: &[Point]) -> Result<f64> {
    let mut sum = 0.0;
    for pair in points.windows(2) {
        sum += funk(body, &pair[0], &pair[1])?;
    }
    Ok(sum - funk(body, &points[0], &points[points.len() - 1])?)
}

/// Index of the facet through which the ray from `x` along `dir` leaves the
/// polytope, if that facet is the unique minimiser up to `tol` relative.
fn exit_facet(p: &HPolytope, x: &Point, dir: &Point, tol: f64) -> Option<(usize, f64)> {
    let exits = p.facet_exits(x, dir);
    let t = exits.iter().flatten().copied().min_by(f64::total_cmp)?;
    let active: Vec<usize> = exits
        .iter()
        .enumerate()
        .filter(|(_, e)| e.is_some_and(|e| e <= t * (1.0 + tol)))
        .map(|(i, _)| i)
        .collect();
    (active.len() == 1).then(|| (active[0], t))
}

/// Builds a non-collinear geodesic `x → y → z` on a polytope whose boundary
/// is flat where the ray from `x` through `z` leaves.
///
/// `y` lies on the line through the midpoint of `[x, z]` orthogonal to
/// `z − x`, on the side of the facet normal, at offsets `½, ¼, …` of the
/// midpoint's distance to the facet hyperplane. The first offset at which
/// both rays `x → y` and `y → z` leave through the same facet is returned.
pub fn polygonal_geodesic_witness(body: &ConvexBody, x: &Point, z: &Point, facet: usize) -> Result<[Point; 3]> {
    let ConvexBody::HPolytope(poly) = body else {
        return Err(Error::Precondition("polygonal witnesses need a polytope".into()));
    };
    if !body.contains(x)? || !body.contains(z)? {
        return Err(Error::PointOutside);
    }
    let Some(face) = poly.facets().get(facet) else {
        return Err(Error::InvalidArgument(format!("facet index {facet} out of range")));
    };
    if x == z {
        return Err(Error::InvalidArgument("endpoints coincide".into()));
    }
    let chord = z - x;
    match exit_facet(poly, x, &chord, 1e-12) {
        Some((i, _)) if i == facet => {}
        _ => return Err(Error::NoWitness(format!("the ray from x through z does not leave through facet {facet}"))),
    }
    let normal = face.normal();
    let unit_chord = chord.normalize();
    let mut offset_dir = normal - &unit_chord * normal.dot(&unit_chord);
    if offset_dir.norm() <= 1e-12 * normal.norm() {
        offset_dir = any_orthogonal(&unit_chord);
    }
    let offset_dir = offset_dir.normalize();
    let mid = (x + z) * 0.5;
    let distance = face.slack(&mid) / normal.norm();
    for k in 1..=60 {
        let y = &mid + &offset_dir * (distance * 0.5f64.powi(k));
        if !poly.contains(&y) {
            continue;
        }
        let first = exit_facet(poly, x, &(&y - x), 1e-12).map(|(i, _)| i);
        let second = exit_facet(poly, &y, &(z - &y), 1e-12).map(|(i, _)| i);
        if first == Some(facet) && second == Some(facet) {
            let chain = [x.clone(), y, z.clone()];
            if is_geodesic_chain(body, &chain, METRIC_TOL)? {
                return Ok(chain);
            }
        }
    }
    Err(Error::NoWitness("no offset along the perpendicular produced a flat-facet chain".into()))
}

fn any_orthogonal(unit: &Point) -> Point {
    let n = unit.len();
    if n == 2 {
        return Point::from_vec(vec![-unit[1], unit[0]]);
    }
    let axis = (0..n).min_by(|a, b| unit[*a].abs().total_cmp(&unit[*b].abs())).unwrap_or(0);
    let e = Point::from_fn(n, |i, _| if i == axis { 1.0 } else { 0.0 });
    let v = &e - unit * unit.dot(&e);
    v.normalize()
}

/// Which side of the metric a sphere sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SphereSide {
    /// `{y : F(x, y) = δ}`, the right sphere.
    Forward,
    /// `{y : F(y, x) = δ}`, the left sphere.
    Backward,
}

/// Sampled metric sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereSample {
    pub center: Vec<f64>,
    pub delta: f64,
    pub side: SphereSide,
    pub points: Vec<Vec<f64>>,
    pub truncated: bool,
}

impl SphereSample {
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.points.iter().map(|p| Point::from_column_slice(p))
    }

    /// Largest deviation of the sampled points from the prescribed radius.
    pub fn max_residual(&self, body: &ConvexBody) -> Result<f64> {
        let c = Point::from_column_slice(&self.center);
        let mut worst: f64 = 0.0;
        for y in self.points() {
            let d = match self.side {
                SphereSide::Forward => funk(body, &c, &y)?,
                SphereSide::Backward => funk(body, &y, &c)?,
            };
            worst = worst.max((d - self.delta).abs());
        }
        Ok(worst)
    }
}

fn check_sphere_args(body: &ConvexBody, x: &Point, delta: f64, dirs: usize) -> Result<()> {
    if !body.contains(x)? {
        return Err(Error::PointOutside);
    }
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!("radius must be a finite nonnegative number, got {delta}")));
    }
    if dirs == 0 {
        return Err(Error::InvalidArgument("direction count must be positive".into()));
    }
    Ok(())
}

/// Right sphere `S(x, δ)`: the homothety of `∂Ω` about `x` with factor `1 − e^{−δ}`.
///
/// Directions whose ray never leaves the body contribute no point and mark the
/// sample as truncated.
pub fn forward_sphere(body: &ConvexBody, x: &Point, delta: f64, dirs: usize) -> Result<SphereSample> {
    check_sphere_args(body, x, delta, dirs)?;
    let factor = -(-delta).exp_m1();
    let mut points = Vec::with_capacity(dirs);
    let mut truncated = false;
    for u in unit_directions(body.dimension(), dirs) {
        match body.exit_unchecked(x, &u) {
            RadialResult::Hit(r) => points.push((x + u * (factor * r)).as_slice().to_vec()),
            RadialResult::Contained => truncated = true,
        }
    }
    Ok(SphereSample { center: x.as_slice().to_vec(), delta, side: SphereSide::Forward, points, truncated })
}

/// Left sphere `S′(x, δ)`: the homothety of `∂Ω` about `x` with factor
/// `e^δ − 1`, reflected through `x` and clipped to the body.
///
/// A candidate outside the body is dropped and marks the sample truncated.
pub fn backward_sphere(body: &ConvexBody, x: &Point, delta: f64, dirs: usize) -> Result<SphereSample> {
    check_sphere_args(body, x, delta, dirs)?;
    let factor = delta.exp_m1();
    let mut points = Vec::with_capacity(dirs);
    let mut truncated = false;
    for u in unit_directions(body.dimension(), dirs) {
        let RadialResult::Hit(r) = body.exit_unchecked(x, &-&u) else {
            // F(y, x) = 0 for every y on this side, so δ > 0 has no point here.
            if delta == 0.0 {
                points.push(x.as_slice().to_vec());
            }
            continue;
        };
        let y = x + u * (factor * r);
        if body.contains_unchecked(&y) {
            points.push(y.as_slice().to_vec());
        } else {
            truncated = true;
        }
    }
    Ok(SphereSample { center: x.as_slice().to_vec(), delta, side: SphereSide::Backward, points, truncated })
}

/// Sampled certificate: the left sphere is compact iff no candidate falls outside the body.
pub fn backward_sphere_is_compact(body: &ConvexBody, x: &Point, delta: f64, dirs: usize) -> Result<bool> {
    if !body.is_bounded() {
        return Err(Error::Unbounded);
    }
    Ok(!backward_sphere(body, x, delta, dirs)?.truncated)
}

/// `(F_{Ω₁∩Ω₂}(x, y), max{F_{Ω₁}(x, y), F_{Ω₂}(x, y)})`.
pub fn funk_intersection_check(first: &ConvexBody, second: &ConvexBody, x: &Point, y: &Point) -> Result<(f64, f64)> {
    if !first.contains(x)? || !first.contains(y)? || !second.contains(x)? || !second.contains(y)? {
        return Err(Error::PointOutside);
    }
    let both: ConvexBody = Intersection::new(vec![first.clone(), second.clone()], Some(x.clone()))?.into();
    let lhs = funk(&both, x, y)?;
    let rhs = funk(first, x, y)?.max(funk(second, x, y)?);
    Ok((lhs, rhs))
}

/// Distances from and to a base point along a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// `F(x, xₙ)`.
    pub forward: Vec<f64>,
    /// `F(xₙ, x)`.
    pub backward: Vec<f64>,
    /// `|x − xₙ|`.
    pub euclidean: Vec<f64>,
    pub threshold: f64,
    /// Whether the last term of each sequence is below the threshold.
    pub converged: [bool; 3],
    pub max_forward: f64,
    pub max_backward: f64,
}

impl ConvergenceReport {
    /// The three sequences agree on whether they have converged.
    pub fn equivalence_holds(&self) -> bool {
        self.converged[0] == self.converged[1] && self.converged[1] == self.converged[2]
    }
}

pub fn convergence_probe(body: &ConvexBody, x: &Point, sequence: &[Point], threshold: f64) -> Result<ConvergenceReport> {
    if !body.is_bounded() {
        return Err(Error::Unbounded);
    }
    let mut forward = Vec::with_capacity(sequence.len());
    let mut backward = Vec::with_capacity(sequence.len());
    let mut euclidean = Vec::with_capacity(sequence.len());
    for xn in sequence {
        forward.push(funk(body, x, xn)?);
        backward.push(funk(body, xn, x)?);
        euclidean.push((x - xn).norm());
    }
    let last_below = |v: &[f64]| v.last().is_some_and(|t| *t < threshold);
    let converged = [last_below(&forward), last_below(&backward), last_below(&euclidean)];
    let max_forward = forward.iter().copied().fold(0.0, f64::max);
    let max_backward = backward.iter().copied().fold(0.0, f64::max);
    Ok(ConvergenceReport { forward, backward, euclidean, threshold, converged, max_forward, max_backward })
}

/// Largest sampled chord through the witness.
pub fn diameter_estimate(body: &ConvexBody) -> f64 {
    let n = body.dimension();
    let w = body.witness();
    unit_directions(n, default_certificate_dirs(n))
        .iter()
        .map(|u| {
            let forward = body.exit_unchecked(&w, u).hit().unwrap_or(f64::INFINITY);
            let backward = body.exit_unchecked(&w, &-u).hit().unwrap_or(f64::INFINITY);
            forward + backward
        })
        .fold(0.0, f64::max)
}

/// Euclidean distance from `p` to the segment `[a, b]`.
pub fn distance_to_segment(p: &Point, a: &Point, b: &Point) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * s)).norm()
}

/// Minimum distance of `y` from `[x, z]`, relative to the body diameter,
/// required by [`strict_triangle_check`].
pub const NONCOLLINEARITY: f64 = 0.05;

/// `F(x, y) + F(y, z) − F(x, z) > margin` on a bounded strictly convex body,
/// for `y` at least `0.05 ×` the diameter away from `[x, z]`.
pub fn strict_triangle_check(body: &ConvexBody, x: &Point, y: &Point, z: &Point, margin: f64) -> Result<bool> {
    Ok(strict_triangle_gap(body, x, y, z)? > margin)
}

/// The gap `F(x, y) + F(y, z) − F(x, z)` under the preconditions of [`strict_triangle_check`].
pub fn strict_triangle_gap(body: &ConvexBody, x: &Point, y: &Point, z: &Point) -> Result<f64> {
    if !body.is_strictly_convex() {
        return Err(Error::Precondition("body is not strictly convex".into()));
    }
    if !body.is_bounded() {
        return Err(Error::Precondition("body is unbounded".into()));
    }
    for p in [x, y, z] {
        if !body.contains(p)? {
            return Err(Error::PointOutside);
        }
    }
    let required = NONCOLLINEARITY * diameter_estimate(body);
    if distance_to_segment(y, x, z) < required {
        return Err(Error::Precondition(format!("y is within {required} of the segment [x, z]")));
    }
    Ok(funk(body, x, y)? + funk(body, y, z)? - funk(body, x, z)?)
}
