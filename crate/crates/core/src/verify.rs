//! Seeded property suites over a single body.
//!
//! Every property draws from its own ChaCha stream of the run seed, so
//! reports are reproducible and independent of which suites are selected.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::body::{ConvexBody, HalfSpace};
use crate::directions::default_sphere_dirs;
use crate::error::{Error, Result};
use crate::finsler::{infimum_estimate, path_length, segment_length_closed, Path, QuadratureSpec, TautologicalStructure};
use crate::funk::{
    backward_sphere, chain_defect, diameter_estimate, distance_to_segment, forward_sphere, funk, funk_distance,
    polygonal_geodesic_witness, strict_triangle_gap, METRIC_TOL, NONCOLLINEARITY,
};
use crate::sampling::{random_interior_point, rng};
use crate::Point;

/// Relative tolerance for quadrature-backed comparisons.
pub const QUADRATURE_TOL: f64 = 1e-6;
/// Strict triangle gap margin.
pub const STRICT_MARGIN: f64 = 1e-12;
/// Tolerance for closed-form identities such as the half-space oracle.
pub const CLOSED_FORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Axioms,
    Theorem,
    Spheres,
    Geodesics,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "axioms" => Ok(Suite::Axioms),
            "theorem" => Ok(Suite::Theorem),
            "spheres" => Ok(Suite::Spheres),
            "geodesics" => Ok(Suite::Geodesics),
            other => Err(Error::InvalidArgument(format!("unknown suite '{other}'"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Suite::All => "all",
            Suite::Axioms => "axioms",
            Suite::Theorem => "theorem",
            Suite::Spheres => "spheres",
            Suite::Geodesics => "geodesics",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub suite: Suite,
    pub seed: u64,
    /// Base sample count. Cheap properties use it directly, quadrature and
    /// sphere properties a fixed fraction of it.
    pub samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { suite: Suite::All, seed: 0, samples: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    /// Not applicable to this body; counts as passed.
    pub skipped: bool,
    pub checked: usize,
    /// Worst observed deviation, where the property has one.
    pub worst: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub metric: f64,
    pub quadrature: f64,
    pub closed_form: f64,
    pub strict_margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { metric: METRIC_TOL, quadrature: QUADRATURE_TOL, closed_form: CLOSED_FORM_TOL, strict_margin: STRICT_MARGIN }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub suite: Suite,
    pub seed: u64,
    pub samples: usize,
    pub tolerances: Tolerances,
    pub results: Vec<PropertyResult>,
    pub passed: bool,
}

impl RunReport {
    pub fn failures(&self) -> impl Iterator<Item = &PropertyResult> {
        self.results.iter().filter(|r| !r.passed)
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {} seed {} samples {}", self.suite, self.seed, self.samples)?;
        for r in &self.results {
            let status = match (r.skipped, r.passed) {
                (true, _) => "SKIP",
                (false, true) => "PASS",
                (false, false) => "FAIL",
            };
            let worst = r.worst.map(|w| format!(" worst {w:.3e}")).unwrap_or_default();
            writeln!(f, "{status}  {:<10} {:<28} n={}{worst}  {}", r.suite.to_string(), r.name, r.checked, r.detail)?;
        }
        write!(f, "{}", if self.passed { "all properties passed" } else { "some properties failed" })
    }
}

/// Runs the selected suites. Errors only for bodies the suites cannot sample.
pub fn run(body: &ConvexBody, config: &VerifyConfig, command: &str) -> Result<RunReport> {
    let s = config.samples.max(1);
    let mut ctx = Ctx { body, seed: config.seed, stream: 0, results: Vec::new() };
    let sel = config.suite;

    if sel.includes(Suite::Axioms) {
        ctx.zero_diagonal(s)?;
        ctx.triangle_inequality(s)?;
        ctx.asymmetry_witness(s)?;
        ctx.strict_triangle(fraction(s, 10))?;
    } else {
        ctx.stream += 4;
    }
    if sel.includes(Suite::Theorem) {
        ctx.segment_agreement(fraction(s, 10))?;
        ctx.support_lower_bound(fraction(s, 10))?;
        ctx.halfspace_oracle(s)?;
        ctx.slice_consistency(fraction(s, 10))?;
    } else {
        ctx.stream += 4;
    }
    if sel.includes(Suite::Spheres) {
        ctx.forward_spheres(fraction(s, 1000).max(3))?;
        ctx.backward_spheres(fraction(s, 1000).max(3))?;
    } else {
        ctx.stream += 2;
    }
    if sel.includes(Suite::Geodesics) {
        ctx.collinear_additivity(s)?;
        ctx.polygonal_witness(fraction(s, 100))?;
        ctx.ball_convexity(fraction(s, 100))?;
        ctx.minimality(fraction(s, 1000).max(2))?;
    }

    let passed = ctx.results.iter().all(|r| r.passed);
    Ok(RunReport {
        command: command.to_string(),
        suite: config.suite,
        seed: config.seed,
        samples: config.samples,
        tolerances: Tolerances::default(),
        results: ctx.results,
        passed,
    })
}

fn fraction(samples: usize, divisor: usize) -> usize {
    (samples / divisor).max(1)
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn fmt_point(p: &Point) -> String {
    let coords: Vec<String> = p.iter().map(|c| format!("{c:.6}")).collect();
    format!("({})", coords.join(", "))
}

struct Ctx<'a> {
    body: &'a ConvexBody,
    seed: u64,
    stream: u64,
    results: Vec<PropertyResult>,
}

impl Ctx<'_> {
    fn next_rng(&mut self) -> ChaCha8Rng {
        let mut r = rng(self.seed);
        r.set_stream(self.stream);
        self.stream += 1;
        r
    }

    fn point(&self, r: &mut ChaCha8Rng) -> Point {
        random_interior_point(self.body, r, 1.0)
    }

    fn push(&mut self, suite: Suite, name: &str, passed: bool, checked: usize, worst: Option<f64>, detail: String) {
        self.results.push(PropertyResult { suite, name: name.into(), passed, skipped: false, checked, worst, detail });
    }

    fn skip(&mut self, suite: Suite, name: &str, detail: &str) {
        self.results.push(PropertyResult {
            suite,
            name: name.into(),
            passed: true,
            skipped: true,
            checked: 0,
            worst: None,
            detail: detail.into(),
        });
    }

    fn zero_diagonal(&mut self, n: usize) -> Result<()> {
        let mut r = self.next_rng();
        let mut bad = 0;
        let mut negative = 0;
        for _ in 0..n {
            let x = self.point(&mut r);
            let y = self.point(&mut r);
            if funk(self.body, &x, &x)? != 0.0 {
                bad += 1;
            }
            if funk(self.body, &x, &y)? < 0.0 {
                negative += 1;
            }
        }
        let detail = format!("{bad} nonzero diagonal values, {negative} negative values");
        self.push(Suite::Axioms, "zero_diagonal_nonnegative", bad == 0 && negative == 0, n, None, detail);
        Ok(())
    }

    fn triangle_inequality(&mut self, n: usize) -> Result<()> {
        let mut r = self.next_rng();
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..n {
            let (x, y, z) = (self.point(&mut r), self.point(&mut r), self.point(&mut r));
            let excess = funk(self.body, &x, &z)? - funk(self.body, &x, &y)? - funk(self.body, &y, &z)?;
            worst = worst.max(excess);
        }
        let passed = worst <= METRIC_TOL;
        self.push(Suite::Axioms, "triangle_inequality", passed, n, Some(worst.max(0.0)), "max F(x,z) - F(x,y) - F(y,z)".into());
        Ok(())
    }

    fn asymmetry_witness(&mut self, n: usize) -> Result<()> {
        let mut r = self.next_rng();
        let mut best: Option<(f64, Point, Point)> = None;
        for _ in 0..n.min(1000) {
            let (x, y) = (self.point(&mut r), self.point(&mut r));
            let gap = (funk(self.body, &x, &y)? - funk(self.body, &y, &x)?).abs();
            if best.as_ref().is_none_or(|b| gap > b.0) {
                best = Some((gap, x, y));
            }
        }
        let (gap, x, y) = best.expect("at least one pair");
        let passed = gap > 1e-6;
        let detail = format!("|F(x,y) - F(y,x)| = {gap:.6e} at x={} y={}", fmt_point(&x), fmt_point(&y));
        self.push(Suite::Axioms, "asymmetry_witness", passed, n.min(1000), Some(gap), detail);
        Ok(())
    }

    fn strict_triangle(&mut self, n: usize) -> Result<()> {
        let mut r = self.next_rng();
        if !self.body.is_strictly_convex() || !self.body.is_bounded() {
            self.skip(Suite::Axioms, "strict_triangle", "body is not strictly convex and bounded");
            return Ok(());
        }
        let required = NONCOLLINEARITY * diameter_estimate(self.body);
        let mut worst = f64::INFINITY;
        for _ in 0..n {
            let (x, z) = (self.point(&mut r), self.point(&mut r));
            let y = loop {
                let y = self.point(&mut r);
                if distance_to_segment(&y, &x, &z) >= required * (1.0 + 1e-12) {
                    break y;
                }
            };
            worst = worst.min(strict_triangle_gap(self.body, &x, &y, &z)?);
        }
        let passed = worst > STRICT_MARGIN;
        self.push(Suite::Axioms, "strict_triangle", passed, n, Some(worst), "min F(x,y) + F(y,z) - F(x,z)".into());
        Ok(())
    }

    fn segment_agreement(&mut self, n: usize) -> Result<()> {
        let mut r = self.next_rng();
        let s = TautologicalStructure::new(self.body.clone());
        let q = QuadratureSpec::default();
        let (mut worst_closed, mut worst_quad) = (0.0f64, 0.0f64);
        for _ in 0..n {
            let (x, y) = (self.point(&mut r), self.point(&mut r));
            let f = funk(self.body, &x, &y)?;
            let closed = segment_length_closed(&s, &x, &y)?;
            let quad = path_length(&s, &Path::polyline(vec![x, y])?, &q)?;
            worst_closed = worst_closed.max(relative_gap(f, closed));
            worst_quad = worst_quad.max(relative_gap(f, quad));
        }
        let passed = worst_closed <= QUADRATURE_TOL && worst_quad <= QUADRATURE_TOL;
        let detail = format!("closed segment {worst_closed:.3e}, quadrature {worst_quad:.3e} relative");
        self.push(Suite::Theorem, "segment_length_agreement", passed, n, Some(worst_quad.max(worst_closed)), detail);
        Ok(())
    }

    fn support_lower_bound(&mut self, n: usize) -> Result<()> {
        let mut r = self.next_rng();
        let mut worst = f64::NEG_INFINITY;
        let mut checked = 0;
        for _ in 0..n {
            let (x, y) = (self.point(&mut r), self.point(&mut r));
            let d = funk_distance(self.body, &x, &y)?;
            let Some(a) = d.exit_point else { continue };
            let half: ConvexBody = self.body.support_hyperplane(&a)?.into();
            let outer = funk(&half, &x, &y)?;
            worst = worst.max(outer - d.value);
            checked += 1;
        }
        let passed = worst <= METRIC_TOL;
        let worst = if checked == 0 { None } else { Some(worst.max(0.0)) };
        self.push(Suite::Theorem, "support_lower_bound", passed, checked, worst, "max F_H(x,y) - F(x,y)".into());
        Ok(())
    }

    fn halfspace_oracle(&mut self, n: usize) -> Result<()> {
        let mut r = self.next_rng();
        let ConvexBody::HalfSpace(h) = self.body else {
            self.skip(Suite::Theorem, "halfspace_oracle", "body is not a half-space");
            return Ok(());
        };
        let mut worst = 0.0f64;
        for _ in 0..n {
            let (x, y) = (self.point(&mut r), self.point(&mut r));
            worst = worst.max((funk(self.body, &x, &y)? - halfspace_closed(h, &x, &y)).abs());
        }
        let passed = worst <= CLOSED_FORM_TOL;
        self.push(Suite::Theorem, "halfspace_oracle", passed, n, Some(worst), "height coordinate max(log(h(x)/h(y)), 0)".into());
        Ok(())
    }

    fn slice_consistency(&mut self, n: usize) -> Result<()> {
        let mut r = self.next_rng();
        let dim = self.body.dimension();
        if dim < 2 {
            self.skip(Suite::Theorem, "slice_consistency", "no proper slices in dimension 1");
            return Ok(());
        }
        let k = dim - 1;
        let mut worst = 0.0f64;
        let slices = fraction(n, 50);
        for _ in 0..slices {
            let base = self.point(&mut r);
            let frame: Vec<Point> =
                (0..k).map(|_| DVector::from_fn(dim, |_, _| StandardNormal.sample(&mut r))).collect();
            let slice: ConvexBody = self.body.affine_slice(&base, &frame)?.into();
            let basis = nalgebra::DMatrix::from_columns(&frame);
            for _ in 0..n / slices {
                let u = random_interior_point(&slice, &mut r, 1.0);
                let v = random_interior_point(&slice, &mut r, 1.0);
                let (x, y) = (&base + &basis * &u, &base + &basis * &v);
                worst = worst.max((funk(&slice, &u, &v)? - funk(self.body, &x, &y)?).abs());
            }
        }
        let passed = worst <= METRIC_TOL;
        self.push(Suite::Theorem, "slice_consistency", passed, n / slices * slices, Some(worst), format!("{slices} random slices of dimension {k}"));
        Ok(())
    }

    fn sphere_centers(&self, r: &mut ChaCha8Rng, count: usize) -> Vec<Point> {
        let mut centers = vec![self.body.witness()];
        while centers.len() < count {
            centers.push(random_interior_point(self.body, r, 0.8));
        }
        centers
    }

    fn forward_spheres(&mut self, centers: usize) -> Result<()> {
        let mut r = self.next_rng();
        let dirs = default_sphere_dirs(self.body.dimension());
        let mut residual = 0.0f64;
        let mut homothety = 0.0f64;
        let mut checked = 0;
        for x in self.sphere_centers(&mut r, centers) {
            let radii = [0.1, std::f64::consts::LN_2, 2.0];
            let spheres: Vec<_> = radii.iter().map(|d| forward_sphere(self.body, &x, *d, dirs)).collect::<Result<_>>()?;
            for s in &spheres {
                residual = residual.max(s.max_residual(self.body)?);
                checked += s.points.len();
            }
            let (a, b) = (&spheres[0], &spheres[2]);
            if a.points.len() == b.points.len() {
                let ratio = (-(-a.delta).exp_m1()) / (-(-b.delta).exp_m1());
                for (p, q) in a.points().zip(b.points()) {
                    let (dp, dq) = (&p - &x, &q - &x);
                    let scale = dp.norm().max(f64::MIN_POSITIVE);
                    homothety = homothety.max((dp - dq * ratio).norm() / scale);
                }
            }
        }
        let passed = residual < METRIC_TOL && homothety <= CLOSED_FORM_TOL;
        let detail = format!("radii 0.1, log 2, 2; homothety ratio error {homothety:.3e}");
        self.push(Suite::Spheres, "forward_sphere", passed, checked, Some(residual), detail);
        Ok(())
    }

    fn backward_spheres(&mut self, centers: usize) -> Result<()> {
        let mut r = self.next_rng();
        let dirs = default_sphere_dirs(self.body.dimension());
        let mut residual = 0.0f64;
        let mut outside = 0;
        let mut checked = 0;
        for x in self.sphere_centers(&mut r, centers) {
            for delta in [0.1, 1.5f64.ln(), 1.0] {
                let s = backward_sphere(self.body, &x, delta, dirs)?;
                residual = residual.max(s.max_residual(self.body)?);
                outside += s.points().filter(|p| !self.body.contains_unchecked(p)).count();
                checked += s.points.len();
            }
        }
        let passed = residual < METRIC_TOL && outside == 0;
        let detail = format!("radii 0.1, log 1.5, 1; {outside} kept points outside");
        self.push(Suite::Spheres, "backward_sphere", passed, checked, Some(residual), detail);
        Ok(())
    }

    fn collinear_additivity(&mut self, n: usize) -> Result<()> {
        let mut r = self.next_rng();
        let mut worst = 0.0f64;
        for _ in 0..n {
            let (x, z) = (self.point(&mut r), self.point(&mut r));
            let y = &x + (&z - &x) * r.random_range(0.0..1.0);
            worst = worst.max(chain_defect(self.body, &[x, y, z])?.abs());
        }
        let passed = worst <= METRIC_TOL;
        self.push(Suite::Geodesics, "collinear_additivity", passed, n, Some(worst), "|F(x,y) + F(y,z) - F(x,z)|".into());
        Ok(())
    }

    fn polygonal_witness(&mut self, n: usize) -> Result<()> {
        let mut r = self.next_rng();
        let ConvexBody::HPolytope(poly) = self.body else {
            self.skip(Suite::Geodesics, "polygonal_witness", "body is not a polytope");
            return Ok(());
        };
        if !self.body.is_bounded() {
            self.skip(Suite::Geodesics, "polygonal_witness", "polytope is unbounded");
            return Ok(());
        }
        let mut worst = 0.0f64;
        let mut failures = 0;
        for _ in 0..n {
            let (x, z) = (self.point(&mut r), self.point(&mut r));
            let Some(facet) = unique_exit_facet(poly.facets(), &x, &z) else {
                failures += 1;
                continue;
            };
            match polygonal_geodesic_witness(self.body, &x, &z, facet) {
                Ok(chain) => worst = worst.max(chain_defect(self.body, &chain)?.abs()),
                Err(Error::NoWitness(_)) => failures += 1,
                Err(e) => return Err(e),
            }
        }
        let passed = failures == 0 && worst <= METRIC_TOL;
        self.push(Suite::Geodesics, "polygonal_witness", passed, n, Some(worst), format!("{failures} configurations without a witness"));
        Ok(())
    }

    fn ball_convexity(&mut self, n: usize) -> Result<()> {
        let mut r = self.next_rng();
        if !self.body.is_strictly_convex() {
            self.skip(Suite::Geodesics, "ball_geodesic_convexity", "body is not strictly convex");
            return Ok(());
        }
        let mut escapes = 0;
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..n {
            let x = self.point(&mut r);
            let delta = r.random_range(0.05..2.0);
            let inside = |r: &mut ChaCha8Rng| -> Result<Point> {
                loop {
                    let y = random_interior_point(self.body, r, 1.0);
                    if funk(self.body, &x, &y)? < delta {
                        return Ok(y);
                    }
                }
            };
            let (a, b) = (inside(&mut r)?, inside(&mut r)?);
            for k in 1..=16 {
                let p = &a + (&b - &a) * (k as f64 / 17.0);
                let excess = funk(self.body, &x, &p)? - delta;
                worst = worst.max(excess);
                if excess >= 0.0 {
                    escapes += 1;
                }
            }
        }
        let passed = escapes == 0;
        self.push(Suite::Geodesics, "ball_geodesic_convexity", passed, n, Some(worst), format!("{escapes} segment points outside the forward ball"));
        Ok(())
    }

    fn minimality(&mut self, n: usize) -> Result<()> {
        let mut r = self.next_rng();
        let s = TautologicalStructure::new(self.body.clone());
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..n {
            let (x, y) = (self.point(&mut r), self.point(&mut r));
            let f = funk(self.body, &x, &y)?;
            let est = infimum_estimate(&s, &x, &y, 20, r.random())?;
            worst = worst.max(f - est.best);
        }
        let passed = worst <= METRIC_TOL;
        self.push(Suite::Geodesics, "minimality_probe", passed, n, Some(worst), "max F(x,y) - shortest perturbed length, 20 paths per pair".into());
        Ok(())
    }
}

/// `max(log(h(x)/h(y)), 0)` with `h` the slack to the boundary hyperplane,
/// i.e. the half-plane closed form in coordinates where the boundary is `x₂ = 0`.
fn halfspace_closed(h: &HalfSpace, x: &Point, y: &Point) -> f64 {
    (h.slack(x) / h.slack(y)).ln().max(0.0)
}

fn unique_exit_facet(facets: &[HalfSpace], x: &Point, z: &Point) -> Option<usize> {
    let dir = z - x;
    let exits: Vec<Option<f64>> = facets
        .iter()
        .map(|f| {
            let rate = f.normal().dot(&dir);
            (rate > 0.0).then(|| f.slack(x) / rate)
        })
        .collect();
    let t = exits.iter().flatten().copied().min_by(f64::total_cmp)?;
    let active: Vec<usize> =
        exits.iter().enumerate().filter(|(_, e)| e.is_some_and(|e| e <= t * (1.0 + 1e-12))).map(|(i, _)| i).collect();
    (active.len() == 1).then(|| active[0])
}
