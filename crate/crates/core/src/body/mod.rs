//! Open convex bodies in ℝⁿ.
//!
//! Every representation is an *open* set carrying an interior witness point.
//! Membership uses strict inequalities, so boundary points are never
//! contained. Ray queries return the exit parameter of `x + tξ`, `t ≥ 0`.

mod schema;

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::directions::{default_certificate_dirs, unit_directions};
use crate::error::{Error, Result};
use crate::{Point, Vector};

pub use schema::{BodyDocument, BodySpec, FacetSpec};

/// Tolerance for the boundary-point precondition of [`ConvexBody::support_hyperplane`].
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Bisection gives up searching for an exit beyond this ray parameter scale.
const FAR_LIMIT: f64 = (1u64 << 60) as f64;

/// Outcome of a ray/boundary query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialResult {
    /// The ray leaves the body at `x + t ξ`.
    Hit(f64),
    /// The whole ray `{x + tξ : t ≥ 0}` lies in the body.
    Contained,
}

impl RadialResult {
    pub fn hit(self) -> Option<f64> {
        match self {
            RadialResult::Hit(t) => Some(t),
            RadialResult::Contained => None,
        }
    }

    pub fn is_contained(self) -> bool {
        matches!(self, RadialResult::Contained)
    }
}

/// Open half-space `{p : ⟨ν, p⟩ < s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    normal: Vector,
    offset: f64,
}

impl HalfSpace {
    pub fn new(normal: Vector, offset: f64) -> Result<Self> {
        check_finite(&normal, "half-space normal")?;
        if normal.is_empty() {
            return Err(Error::InvalidBody("half-space in dimension 0".into()));
        }
        if !offset.is_finite() {
            return Err(Error::InvalidBody("half-space offset is not finite".into()));
        }
        if normal.norm() == 0.0 {
            return Err(Error::InvalidBody("half-space normal is zero".into()));
        }
        Ok(Self { normal, offset })
    }

    pub fn normal(&self) -> &Vector {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dimension(&self) -> usize {
        self.normal.len()
    }

    /// `s − ⟨ν, p⟩`; positive exactly on the open half-space.
    pub fn slack(&self, p: &Point) -> f64 {
        self.offset - self.normal.dot(p)
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.slack(p) > 0.0
    }

    /// A point at unit slack.
    pub fn witness(&self) -> Point {
        &self.normal * ((self.offset - 1.0) / self.normal.norm_squared())
    }

    fn exit(&self, x: &Point, dir: &Vector) -> RadialResult {
        let rate = self.normal.dot(dir);
        if rate > 0.0 {
            RadialResult::Hit(self.slack(x) / rate)
        } else {
            RadialResult::Contained
        }
    }
}

/// Open Euclidean ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: Point,
    radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        check_finite(&center, "ball center")?;
        if center.is_empty() {
            return Err(Error::InvalidBody("ball in dimension 0".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidBody(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, p: &Point) -> bool {
        (p - &self.center).norm_squared() < self.radius * self.radius
    }

    fn exit(&self, x: &Point, dir: &Vector) -> RadialResult {
        let (mut r2, mut along) = (0.0, 0.0);
        for ((xi, ci), di) in x.iter().zip(self.center.iter()).zip(dir.iter()) {
            let rel = xi - ci;
            r2 += rel * rel;
            along += di * rel;
        }
        // (|rel| − R)(|rel| + R) keeps the digits of |rel|² − R² near the sphere.
        let r = r2.sqrt();
        let c0 = (r - self.radius) * (r + self.radius);
        RadialResult::Hit(quadratic_exit(dir.norm_squared(), along, c0))
    }
}

/// Open ellipsoid `{p : ⟨Q(p−c), p−c⟩ < 1}` with `Q` symmetric positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    center: Point,
    shape: DMatrix<f64>,
    min_eigenvalue: f64,
}

impl Ellipsoid {
    pub fn new(center: Point, shape: DMatrix<f64>) -> Result<Self> {
        let n = center.len();
        check_finite(&center, "ellipsoid center")?;
        if n == 0 {
            return Err(Error::InvalidBody("ellipsoid in dimension 0".into()));
        }
        if shape.nrows() != n || shape.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: shape.nrows() });
        }
        if shape.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidBody("ellipsoid shape has non-finite entries".into()));
        }
        let scale = shape.amax().max(f64::MIN_POSITIVE);
        if (&shape - shape.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidBody("ellipsoid shape is not symmetric".into()));
        }
        let min_eigenvalue = shape.clone().symmetric_eigenvalues().min();
        if !(min_eigenvalue > 0.0) {
            return Err(Error::InvalidBody("ellipsoid shape is not positive definite".into()));
        }
        Ok(Self { center, shape, min_eigenvalue })
    }

    /// Axis-aligned ellipsoid with the given semi-axes.
    pub fn axis_aligned(center: Point, semi_axes: &[f64]) -> Result<Self> {
        if semi_axes.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::InvalidBody("semi-axes must be positive".into()));
        }
        let diag = DVector::from_iterator(semi_axes.len(), semi_axes.iter().map(|a| 1.0 / (a * a)));
        Self::new(center, DMatrix::from_diagonal(&diag))
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    fn quad(&self, v: &Vector) -> f64 {
        v.dot(&(&self.shape * v))
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.quad(&(p - &self.center)) < 1.0
    }

    /// Largest semi-axis.
    pub fn outer_radius(&self) -> f64 {
        1.0 / self.min_eigenvalue.sqrt()
    }

    /// `(⟨Qd,d⟩, ⟨Qd,r⟩, ⟨Qr,r⟩)` with `r = x − c`, without temporaries.
    fn forms(&self, x: &Point, dir: &Vector) -> (f64, f64, f64) {
        let n = x.len();
        let (mut dd, mut dr, mut rr) = (0.0, 0.0, 0.0);
        for j in 0..n {
            let rel_j = x[j] - self.center[j];
            let (mut qd, mut qr) = (0.0, 0.0);
            for i in 0..n {
                let q = self.shape[(i, j)];
                qd += q * dir[i];
                qr += q * (x[i] - self.center[i]);
            }
            dd += qd * dir[j];
            dr += qd * rel_j;
            rr += qr * rel_j;
        }
        (dd, dr, rr)
    }

    fn exit(&self, x: &Point, dir: &Vector) -> RadialResult {
        let (a, b, q) = self.forms(x, dir);
        let r = q.sqrt();
        RadialResult::Hit(quadratic_exit(a, b, (r - 1.0) * (r + 1.0)))
    }
}

/// Positive root of `a t² + 2b t + c = 0` with `a > 0`, `c < 0`, in the
/// cancellation-free form.
fn quadratic_exit(a: f64, b: f64, c: f64) -> f64 {
    let disc = (b * b - a * c).max(0.0).sqrt();
    if b > 0.0 {
        -c / (b + disc)
    } else {
        (disc - b) / a
    }
}

/// Finite intersection of open half-spaces with a strictly interior witness.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope {
    facets: Vec<HalfSpace>,
    witness: Point,
    radius_hint: f64,
}

impl HPolytope {
    pub fn new(facets: Vec<HalfSpace>, witness: Point) -> Result<Self> {
        let Some(first) = facets.first() else {
            return Err(Error::InvalidBody("polytope needs at least one facet".into()));
        };
        let n = first.dimension();
        for f in &facets {
            if f.dimension() != n {
                return Err(Error::DimensionMismatch { expected: n, found: f.dimension() });
            }
        }
        check_dim(n, &witness)?;
        check_finite(&witness, "polytope witness")?;
        if let Some(i) = facets.iter().position(|f| !f.contains(&witness)) {
            return Err(Error::InvalidBody(format!("witness violates facet {i}")));
        }
        let mut polytope = Self { facets, witness, radius_hint: f64::INFINITY };
        polytope.radius_hint = polytope.sampled_radius();
        Ok(polytope)
    }

    fn sampled_radius(&self) -> f64 {
        let n = self.dimension();
        let mut far: f64 = 0.0;
        for d in unit_directions(n, default_certificate_dirs(n)) {
            match self.exit(&self.witness, &d) {
                RadialResult::Hit(t) => far = far.max(t),
                RadialResult::Contained => return f64::INFINITY,
            }
        }
        // Sampling can miss vertices; bisection doubles past underestimates.
        2.0 * far
    }

    /// Open box `∏ (lo_i, hi_i)`. Facets are ordered `+e_0, −e_0, +e_1, −e_1, …`.
    pub fn axis_box(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), found: hi.len() });
        }
        let n = lo.len();
        let mut facets = Vec::with_capacity(2 * n);
        for i in 0..n {
            if !(lo[i] < hi[i]) {
                return Err(Error::InvalidBody(format!("empty box along axis {i}")));
            }
            let e = DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 });
            facets.push(HalfSpace::new(e.clone(), hi[i])?);
            facets.push(HalfSpace::new(-e, -lo[i])?);
        }
        let witness = DVector::from_fn(n, |k, _| 0.5 * (lo[k] + hi[k]));
        Self::new(facets, witness)
    }

    /// Convex polygon from counter-clockwise vertices. Facet `i` carries edge `v_i → v_{i+1}`.
    pub fn from_ccw_polygon(vertices: &[[f64; 2]]) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidBody("polygon needs at least three vertices".into()));
        }
        let m = vertices.len();
        let mut facets = Vec::with_capacity(m);
        for i in 0..m {
            let [ax, ay] = vertices[i];
            let [bx, by] = vertices[(i + 1) % m];
            let normal = DVector::from_vec(vec![by - ay, ax - bx]);
            let offset = normal[0] * ax + normal[1] * ay;
            facets.push(HalfSpace::new(normal, offset)?);
        }
        let cx = vertices.iter().map(|v| v[0]).sum::<f64>() / m as f64;
        let cy = vertices.iter().map(|v| v[1]).sum::<f64>() / m as f64;
        Self::new(facets, DVector::from_vec(vec![cx, cy]))
    }

    pub fn facets(&self) -> &[HalfSpace] {
        &self.facets
    }

    pub fn witness(&self) -> &Point {
        &self.witness
    }

    pub fn dimension(&self) -> usize {
        self.witness.len()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.facets.iter().all(|f| f.contains(p))
    }

    /// Per-facet exit parameters; `None` where the ray does not approach the facet.
    pub fn facet_exits(&self, x: &Point, dir: &Vector) -> Vec<Option<f64>> {
        self.facets.iter().map(|f| f.exit(x, dir).hit()).collect()
    }

    fn exit(&self, x: &Point, dir: &Vector) -> RadialResult {
        self.facets
            .iter()
            .filter_map(|f| f.exit(x, dir).hit())
            .min_by(f64::total_cmp)
            .map_or(RadialResult::Contained, RadialResult::Hit)
    }

    /// Facet indices whose hyperplane passes through `b` within `tol` (scaled by `|ν|`).
    pub fn active_facets(&self, b: &Point, tol: f64) -> Vec<usize> {
        self.facets
            .iter()
            .enumerate()
            .filter(|(_, f)| f.slack(b).abs() <= tol * f.normal().norm())
            .map(|(i, _)| i)
            .collect()
    }
}

/// Membership predicate of an [`ImplicitBody`].
pub type Membership = Arc<dyn Fn(&Point) -> bool + Send + Sync>;

/// Body known only through a membership oracle.
#[derive(Clone)]
pub struct ImplicitBody {
    dimension: usize,
    membership: Membership,
    witness: Point,
    bounding_radius: f64,
    strictly_convex: bool,
}

impl ImplicitBody {
    /// `bounding_radius` bounds the body around the witness (`f64::INFINITY` when unknown).
    pub fn new(
        membership: Membership,
        witness: Point,
        bounding_radius: f64,
        strictly_convex: bool,
    ) -> Result<Self> {
        check_finite(&witness, "implicit witness")?;
        if witness.is_empty() {
            return Err(Error::InvalidBody("implicit body in dimension 0".into()));
        }
        if !(bounding_radius > 0.0) {
            return Err(Error::InvalidBody("bounding radius must be positive".into()));
        }
        if !membership(&witness) {
            return Err(Error::InvalidBody("witness is not a member".into()));
        }
        Ok(Self { dimension: witness.len(), membership, witness, bounding_radius, strictly_convex })
    }

    /// Midpoint spot check of convexity on `samples` random members near the witness.
    pub fn spot_check_convexity(&self, samples: usize, seed: u64) -> Result<()> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let radius = if self.bounding_radius.is_finite() { self.bounding_radius } else { 1.0 };
        let mut members: Vec<Point> = Vec::new();
        let mut attempts = 0;
        while members.len() < samples && attempts < 100 * samples.max(1) {
            attempts += 1;
            let p = DVector::from_fn(self.dimension, |i, _| {
                self.witness[i] + radius * rng.random_range(-1.0..1.0)
            });
            if (self.membership)(&p) {
                members.push(p);
            }
        }
        for pair in members.windows(2) {
            let mid = (&pair[0] + &pair[1]) * 0.5;
            if !(self.membership)(&mid) {
                return Err(Error::InvalidBody("membership set failed the midpoint test".into()));
            }
        }
        Ok(())
    }

    pub fn witness(&self) -> &Point {
        &self.witness
    }

    pub fn bounding_radius(&self) -> f64 {
        self.bounding_radius
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn contains(&self, p: &Point) -> bool {
        (self.membership)(p)
    }

    fn exit(&self, x: &Point, dir: &Vector) -> RadialResult {
        let speed = dir.norm();
        let reach = (&self.witness - x).norm() + self.bounding_radius;
        let hint = if reach.is_finite() { reach / speed * (1.0 + 1e-9) } else { 1.0 / speed };
        bisect_exit(|t| (self.membership)(&(x + dir * t)), hint, FAR_LIMIT / speed)
    }
}

impl fmt::Debug for ImplicitBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImplicitBody")
            .field("dimension", &self.dimension)
            .field("witness", &self.witness.as_slice())
            .field("bounding_radius", &self.bounding_radius)
            .field("strictly_convex", &self.strictly_convex)
            .finish_non_exhaustive()
    }
}

/// Exit parameter of a ray by bracketing then bisection.
///
/// `inside(t)` must hold at `t = 0`. The bracket starts at `hint` and doubles
/// while still inside; past `limit` the ray is declared contained.
fn bisect_exit(inside: impl Fn(f64) -> bool, hint: f64, limit: f64) -> RadialResult {
    let mut lo = 0.0;
    let mut hi = hint;
    while inside(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > limit {
            return RadialResult::Contained;
        }
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi {
            break;
        }
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RadialResult::Hit(0.5 * (lo + hi))
}

/// Intersection of finitely many bodies.
#[derive(Debug, Clone)]
pub struct Intersection {
    members: Vec<ConvexBody>,
    witness: Point,
}

impl Intersection {
    /// Uses `witness` when given, otherwise the first member witness (or their
    /// centroid) that lies in every member.
    pub fn new(members: Vec<ConvexBody>, witness: Option<Point>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::InvalidBody("intersection needs at least one member".into()));
        };
        let n = first.dimension();
        for m in &members {
            if m.dimension() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.dimension() });
            }
        }
        let in_all = |p: &Point| members.iter().all(|m| m.contains_unchecked(p));
        let witness = match witness {
            Some(w) => {
                check_dim(n, &w)?;
                if !in_all(&w) {
                    return Err(Error::InvalidBody("witness is not in every member".into()));
                }
                w
            }
            None => {
                let centroid = members.iter().fold(DVector::zeros(n), |acc, m| acc + m.witness())
                    / members.len() as f64;
                members
                    .iter()
                    .map(|m| m.witness())
                    .chain(std::iter::once(centroid))
                    .find(|w| in_all(w))
                    .ok_or_else(|| {
                        Error::InvalidBody("could not find a common interior point; pass a witness".into())
                    })?
            }
        };
        Ok(Self { members, witness })
    }

    pub fn members(&self) -> &[ConvexBody] {
        &self.members
    }

    pub fn witness(&self) -> &Point {
        &self.witness
    }
}

/// An open convex subset of ℝⁿ.
#[derive(Debug, Clone)]
pub enum ConvexBody {
    HalfSpace(HalfSpace),
    Ball(Ball),
    Ellipsoid(Ellipsoid),
    HPolytope(HPolytope),
    Implicit(ImplicitBody),
    Intersection(Intersection),
}

impl From<HalfSpace> for ConvexBody {
    fn from(b: HalfSpace) -> Self {
        ConvexBody::HalfSpace(b)
    }
}

impl From<Ball> for ConvexBody {
    fn from(b: Ball) -> Self {
        ConvexBody::Ball(b)
    }
}

impl From<Ellipsoid> for ConvexBody {
    fn from(b: Ellipsoid) -> Self {
        ConvexBody::Ellipsoid(b)
    }
}

impl From<HPolytope> for ConvexBody {
    fn from(b: HPolytope) -> Self {
        ConvexBody::HPolytope(b)
    }
}

impl From<ImplicitBody> for ConvexBody {
    fn from(b: ImplicitBody) -> Self {
        ConvexBody::Implicit(b)
    }
}

impl From<Intersection> for ConvexBody {
    fn from(b: Intersection) -> Self {
        ConvexBody::Intersection(b)
    }
}

impl ConvexBody {
    pub fn ball(center: &[f64], radius: f64) -> Result<Self> {
        Ok(Ball::new(DVector::from_column_slice(center), radius)?.into())
    }

    pub fn half_space(normal: &[f64], offset: f64) -> Result<Self> {
        Ok(HalfSpace::new(DVector::from_column_slice(normal), offset)?.into())
    }

    pub fn axis_box(lo: &[f64], hi: &[f64]) -> Result<Self> {
        Ok(HPolytope::axis_box(lo, hi)?.into())
    }

    pub fn intersection(members: Vec<ConvexBody>) -> Result<Self> {
        Ok(Intersection::new(members, None)?.into())
    }

    pub fn dimension(&self) -> usize {
        match self {
            ConvexBody::HalfSpace(b) => b.dimension(),
            ConvexBody::Ball(b) => b.center.len(),
            ConvexBody::Ellipsoid(b) => b.center.len(),
            ConvexBody::HPolytope(b) => b.dimension(),
            ConvexBody::Implicit(b) => b.dimension,
            ConvexBody::Intersection(b) => b.witness.len(),
        }
    }

    /// A point in the interior.
    pub fn witness(&self) -> Point {
        match self {
            ConvexBody::HalfSpace(b) => b.witness(),
            ConvexBody::Ball(b) => b.center.clone(),
            ConvexBody::Ellipsoid(b) => b.center.clone(),
            ConvexBody::HPolytope(b) => b.witness.clone(),
            ConvexBody::Implicit(b) => b.witness.clone(),
            ConvexBody::Intersection(b) => b.witness.clone(),
        }
    }

    /// Radius around the witness that encloses the body, if known.
    pub fn bounding_radius(&self) -> f64 {
        match self {
            ConvexBody::HalfSpace(_) => f64::INFINITY,
            ConvexBody::Ball(b) => b.radius,
            ConvexBody::Ellipsoid(b) => b.outer_radius(),
            ConvexBody::HPolytope(p) => p.radius_hint,
            ConvexBody::Implicit(b) => b.bounding_radius,
            ConvexBody::Intersection(b) => b
                .members
                .iter()
                .map(|m| m.bounding_radius() + (m.witness() - &b.witness).norm())
                .fold(f64::INFINITY, f64::min),
        }
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        check_dim(self.dimension(), p)
    }

    /// Strict membership in the open body.
    pub fn contains(&self, p: &Point) -> Result<bool> {
        self.check_point(p)?;
        Ok(self.contains_unchecked(p))
    }

    pub(crate) fn contains_unchecked(&self, p: &Point) -> bool {
        if p.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            ConvexBody::HalfSpace(b) => b.contains(p),
            ConvexBody::Ball(b) => b.contains(p),
            ConvexBody::Ellipsoid(b) => b.contains(p),
            ConvexBody::HPolytope(b) => b.contains(p),
            ConvexBody::Implicit(b) => b.contains(p),
            ConvexBody::Intersection(b) => b.members.iter().all(|m| m.contains_unchecked(p)),
        }
    }

    /// Exit parameter of the ray `x + tξ`, `t ≥ 0`, from an interior point `x`.
    pub fn ray_boundary(&self, x: &Point, dir: &Vector) -> Result<RadialResult> {
        self.check_point(x)?;
        self.check_point(dir)?;
        if dir.iter().all(|v| *v == 0.0) {
            return Err(Error::ZeroDirection);
        }
        if dir.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("direction is not finite".into()));
        }
        if !self.contains_unchecked(x) {
            return Err(Error::PointOutside);
        }
        Ok(self.exit_unchecked(x, dir))
    }

    pub(crate) fn exit_unchecked(&self, x: &Point, dir: &Vector) -> RadialResult {
        match self {
            ConvexBody::HalfSpace(b) => b.exit(x, dir),
            ConvexBody::Ball(b) => b.exit(x, dir),
            ConvexBody::Ellipsoid(b) => b.exit(x, dir),
            ConvexBody::HPolytope(b) => b.exit(x, dir),
            ConvexBody::Implicit(b) => b.exit(x, dir),
            ConvexBody::Intersection(b) => b
                .members
                .iter()
                .filter_map(|m| m.exit_unchecked(x, dir).hit())
                .min_by(f64::total_cmp)
                .map_or(RadialResult::Contained, RadialResult::Hit),
        }
    }

    /// Distance from `b` to the boundary along the ray from the witness.
    fn boundary_offset(&self, b: &Point) -> f64 {
        let w = self.witness();
        let d = b - &w;
        if d.norm() == 0.0 {
            return f64::INFINITY;
        }
        match self.exit_unchecked(&w, &d) {
            RadialResult::Hit(t) => (t - 1.0).abs() * d.norm(),
            RadialResult::Contained => f64::INFINITY,
        }
    }

    fn is_boundary_point(&self, b: &Point) -> std::result::Result<(), f64> {
        let offset = self.boundary_offset(b);
        let scale = (b - self.witness()).norm().max(1.0);
        if offset <= BOUNDARY_TOL * scale {
            Ok(())
        } else {
            Err(offset)
        }
    }

    /// A half-space containing the body whose boundary hyperplane passes through `b`.
    pub fn support_hyperplane(&self, b: &Point) -> Result<HalfSpace> {
        self.check_point(b)?;
        check_finite(b, "boundary point")?;
        self.is_boundary_point(b).map_err(|offset| Error::NotBoundaryPoint { offset })?;
        match self {
            ConvexBody::HalfSpace(h) => Ok(h.clone()),
            ConvexBody::Ball(ball) => through_point((b - &ball.center).normalize(), b),
            ConvexBody::Ellipsoid(e) => through_point((&e.shape * (b - &e.center)).normalize(), b),
            ConvexBody::HPolytope(p) => {
                let scale = (b - &p.witness).norm().max(1.0);
                let active = p.active_facets(b, BOUNDARY_TOL * scale);
                let index = match active.first() {
                    Some(i) => *i,
                    None => p
                        .facets
                        .iter()
                        .enumerate()
                        .min_by(|(_, f), (_, g)| {
                            (f.slack(b).abs() / f.normal.norm()).total_cmp(&(g.slack(b).abs() / g.normal.norm()))
                        })
                        .map(|(i, _)| i)
                        .expect("polytope has facets"),
                };
                Ok(p.facets[index].clone())
            }
            ConvexBody::Implicit(_) => self.support_by_gauge_gradient(b),
            ConvexBody::Intersection(inter) => {
                let member = inter
                    .members
                    .iter()
                    .find(|m| m.is_boundary_point(b).is_ok())
                    .ok_or(Error::NotBoundaryPoint { offset: f64::NAN })?;
                member.support_hyperplane(b)
            }
        }
    }

    /// Supporting-direction estimate from the central-difference gradient of
    /// the gauge at the witness, evaluated at `b − w`.
    fn support_by_gauge_gradient(&self, b: &Point) -> Result<HalfSpace> {
        let w = self.witness();
        let d = b - &w;
        let h = 1e-5 * d.norm();
        let gauge = |v: &Vector| match self.exit_unchecked(&w, v) {
            RadialResult::Hit(t) => 1.0 / t,
            RadialResult::Contained => 0.0,
        };
        let n = d.len();
        let mut grad = DVector::zeros(n);
        for k in 0..n {
            let mut plus = d.clone();
            let mut minus = d.clone();
            plus[k] += h;
            minus[k] -= h;
            grad[k] = (gauge(&plus) - gauge(&minus)) / (2.0 * h);
        }
        if grad.norm() == 0.0 {
            return Err(Error::Numerical("gauge gradient vanished".into()));
        }
        through_point(grad.normalize(), b)
    }

    /// Structural strict-convexity answer.
    ///
    /// Intersections report `true` only when every member is strictly convex,
    /// which is sufficient but not necessary.
    pub fn is_strictly_convex(&self) -> bool {
        match self {
            ConvexBody::HalfSpace(_) => false,
            ConvexBody::Ball(_) | ConvexBody::Ellipsoid(_) => true,
            ConvexBody::HPolytope(p) => p.dimension() == 1,
            ConvexBody::Implicit(b) => b.strictly_convex,
            ConvexBody::Intersection(b) => b.members.iter().all(ConvexBody::is_strictly_convex),
        }
    }

    /// Boundedness with the default direction count (`360·n`).
    pub fn is_bounded(&self) -> bool {
        self.is_bounded_with(default_certificate_dirs(self.dimension()))
    }

    /// Boundedness; polytopes and unbounded-member intersections use a sampled
    /// recession-direction probe, so a `true` answer is a semi-decision.
    pub fn is_bounded_with(&self, dirs: usize) -> bool {
        match self {
            ConvexBody::HalfSpace(_) => false,
            ConvexBody::Ball(_) | ConvexBody::Ellipsoid(_) => true,
            ConvexBody::Implicit(b) => b.bounding_radius.is_finite(),
            ConvexBody::HPolytope(p) => self.no_recession_direction(&recession_candidates(p.facets(), p.dimension(), dirs)),
            ConvexBody::Intersection(inter) => {
                if inter.members.iter().any(|m| m.is_bounded_with(dirs)) {
                    return true;
                }
                let facets: Vec<HalfSpace> = inter
                    .members
                    .iter()
                    .flat_map(|m| match m {
                        ConvexBody::HalfSpace(h) => vec![h.clone()],
                        ConvexBody::HPolytope(p) => p.facets.clone(),
                        _ => Vec::new(),
                    })
                    .collect();
                self.no_recession_direction(&recession_candidates(&facets, self.dimension(), dirs))
            }
        }
    }

    fn no_recession_direction(&self, candidates: &[Vector]) -> bool {
        let w = self.witness();
        candidates.iter().all(|d| !self.exit_unchecked(&w, d).is_contained())
    }

    /// Probe for a Euclidean line inside the body: a direction `d` with both
    /// `±d` rays contained. Polytopes are answered exactly through the null
    /// space of the facet normals.
    pub fn contains_line_with(&self, dirs: usize) -> Option<Vector> {
        let n = self.dimension();
        match self {
            ConvexBody::Ball(_) | ConvexBody::Ellipsoid(_) => None,
            ConvexBody::HalfSpace(h) => normal_null_direction(std::slice::from_ref(h), n),
            ConvexBody::HPolytope(p) => normal_null_direction(&p.facets, n),
            _ => {
                let w = self.witness();
                let mut candidates = unit_directions(n, dirs);
                candidates.extend((0..n).map(|i| DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 })));
                candidates.into_iter().find(|d| {
                    self.exit_unchecked(&w, d).is_contained() && self.exit_unchecked(&w, &-d).is_contained()
                })
            }
        }
    }

    /// Restriction to the affine subspace `base + span(frame)`, expressed in frame coordinates.
    pub fn affine_slice(&self, base: &Point, frame: &[Vector]) -> Result<ImplicitBody> {
        let n = self.dimension();
        self.check_point(base)?;
        if !self.contains_unchecked(base) {
            return Err(Error::PointOutside);
        }
        let k = frame.len();
        if k == 0 || k > n {
            return Err(Error::DependentFrame);
        }
        for v in frame {
            check_dim(n, v)?;
            check_finite(v, "frame vector")?;
        }
        let basis = DMatrix::from_columns(frame);
        let singular = basis.clone().singular_values();
        let (smin, smax) = (singular.min(), singular.max());
        if !(smin > 1e-12 * smax) {
            return Err(Error::DependentFrame);
        }
        let reach = self.bounding_radius() + (base - self.witness()).norm();
        let bounding_radius = if reach.is_finite() { reach / smin } else { f64::INFINITY };
        let strictly_convex = self.is_strictly_convex();
        let ambient = self.clone();
        let origin = base.clone();
        let membership: Membership = Arc::new(move |u: &Point| {
            u.len() == basis.ncols() && ambient.contains_unchecked(&(&origin + &basis * u))
        });
        ImplicitBody::new(membership, DVector::zeros(k), bounding_radius, strictly_convex)
    }

    /// Wraps this body as a membership oracle, dropping closed forms.
    pub fn to_implicit(&self) -> ImplicitBody {
        let inner = self.clone();
        let membership: Membership = Arc::new(move |p: &Point| inner.contains_unchecked(p));
        ImplicitBody::new(membership, self.witness(), self.bounding_radius(), self.is_strictly_convex())
            .expect("witness of a valid body is a member")
    }
}

fn through_point(normal: Vector, b: &Point) -> Result<HalfSpace> {
    let offset = normal.dot(b);
    HalfSpace::new(normal, offset)
}

/// Sampled unit directions plus facet-derived candidates for recession probes.
fn recession_candidates(facets: &[HalfSpace], n: usize, dirs: usize) -> Vec<Vector> {
    let mut out = unit_directions(n, dirs);
    let units: Vec<Vector> = facets.iter().map(|f| f.normal().normalize()).collect();
    for (i, a) in units.iter().enumerate() {
        out.push(-a);
        if n == 2 {
            out.push(DVector::from_vec(vec![-a[1], a[0]]));
            out.push(DVector::from_vec(vec![a[1], -a[0]]));
        }
        for b in &units[i + 1..] {
            let s = -(a + b);
            if s.norm() > 1e-12 {
                out.push(s.normalize());
            }
        }
    }
    out
}

/// A nonzero direction orthogonal to every facet normal, if any.
fn normal_null_direction(facets: &[HalfSpace], n: usize) -> Option<Vector> {
    let rows: Vec<_> = facets.iter().map(|f| f.normal().normalize().transpose()).collect();
    let normals = DMatrix::from_rows(&rows);
    let mut gram = normals.transpose() * &normals;
    gram.fill_upper_triangle_with_lower_triangle();
    let eig = gram.symmetric_eigen();
    let (idx, val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, v)| (i, *v))?;
    if val.abs() <= 1e-12 * n as f64 {
        Some(eig.eigenvectors.column(idx).into_owned())
    } else {
        None
    }
}

pub(crate) fn check_dim(expected: usize, p: &DVector<f64>) -> Result<()> {
    if p.len() == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found: p.len() })
    }
}

fn check_finite(v: &DVector<f64>, what: &str) -> Result<()> {
    if v.iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidBody(format!("{what} has non-finite coordinates")))
    }
}
