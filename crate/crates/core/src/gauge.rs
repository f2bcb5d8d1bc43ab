//! Radial and Minkowski functions, their closed forms for balls and
//! half-spaces, and the translation-invariant Minkowski weak metric.
//!
//! Gauge values are plain `f64`: nonnegative, `f64::INFINITY` only when the
//! base point sits on the boundary and the direction leaves immediately.

use std::fmt;

use crate::body::{check_dim, ConvexBody, RadialResult};
use crate::directions::{default_certificate_dirs, unit_directions};
use crate::error::{Error, Result};
use crate::{Point, Vector};

/// Tolerance for sampled symmetry certificates.
const SYMMETRY_TOL: f64 = 1e-9;

/// `p_{Ω,x}(ξ)`: reciprocal of the exit parameter, `0` for contained rays
/// and for the zero vector.
pub fn minkowski_gauge(body: &ConvexBody, x: &Point, xi: &Vector) -> Result<f64> {
    check_dim(body.dimension(), x)?;
    check_dim(body.dimension(), xi)?;
    if xi.iter().all(|c| *c == 0.0) {
        return if body.contains_unchecked(x) { Ok(0.0) } else { Err(Error::PointOutside) };
    }
    Ok(match body.ray_boundary(x, xi)? {
        RadialResult::Hit(t) => 1.0 / t,
        RadialResult::Contained => 0.0,
    })
}

/// Gauge of the half-space `{⟨ν,p⟩ < s}` at `x`: `max(⟨ν,ξ⟩ / (s − ⟨ν,x⟩), 0)`.
pub fn gauge_halfspace_closed(normal: &Vector, s: f64, x: &Point, xi: &Vector) -> Result<f64> {
    check_dim(normal.len(), x)?;
    check_dim(normal.len(), xi)?;
    let slack = s - normal.dot(x);
    if !(slack > 0.0) {
        return Err(Error::PointOutside);
    }
    Ok((normal.dot(xi) / slack).max(0.0))
}

/// Gauge of the ball of radius `R` centred at the origin, at `x` with `|x| < R`.
pub fn gauge_ball_closed(radius: f64, x: &Point, xi: &Vector) -> Result<f64> {
    check_dim(x.len(), xi)?;
    let room = radius * radius - x.norm_squared();
    if !(room > 0.0) {
        return Err(Error::PointOutside);
    }
    let along = xi.dot(x);
    Ok(((along * along + room * xi.norm_squared()).sqrt() + along) / room)
}

/// Gauge at a base point allowed to lie on the boundary.
///
/// For a closure point the set `{s > 0 : base + sξ ∈ Ω}` is an interval
/// `(0, b)` or empty; the gauge is `1/b`, `0` for `b = ∞` and `∞` when empty.
fn gauge_from_closure(body: &ConvexBody, base: &Point, xi: &Vector) -> f64 {
    if xi.iter().all(|c| *c == 0.0) {
        return 0.0;
    }
    if body.contains_unchecked(base) {
        return match body.exit_unchecked(base, xi) {
            RadialResult::Hit(t) => 1.0 / t,
            RadialResult::Contained => 0.0,
        };
    }
    let inside = |s: f64| body.contains_unchecked(&(base + xi * s));
    let Some(k) = (-60..=60).rev().find(|k| inside(2f64.powi(*k))) else {
        return f64::INFINITY;
    };
    if k == 60 {
        return 0.0;
    }
    let (mut lo, mut hi) = (2f64.powi(k), 2f64.powi(k + 1));
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    1.0 / lo
}

/// `δ(x, y) = p_{Ω,0}(y − x)` for a body whose closure contains the origin.
pub fn minkowski_weak_metric(body: &ConvexBody, x: &Point, y: &Point) -> Result<f64> {
    let n = body.dimension();
    check_dim(n, x)?;
    check_dim(n, y)?;
    let origin = Point::zeros(n);
    if !body.contains_unchecked(&origin) && !origin_in_closure(body) {
        return Err(Error::Precondition("origin is not in the closure of the body".into()));
    }
    Ok(gauge_from_closure(body, &origin, &(y - x)))
}

fn origin_in_closure(body: &ConvexBody) -> bool {
    let n = body.dimension();
    let origin = Point::zeros(n);
    let w = body.witness();
    // The half-open segment from a closure point to an interior point is interior.
    let toward = &w - &origin;
    (1..=40).any(|k| body.contains_unchecked(&(&origin + &toward * 2f64.powi(-k))))
}

/// Flags of the Minkowski weak metric together with a witness for each.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakMetricClassification {
    pub finite: bool,
    pub symmetric: bool,
    pub strongly_separating: bool,
    pub weakly_separating: bool,
    pub certificates: Certificates,
}

/// Human-readable justification per flag.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificates {
    pub finite: String,
    pub symmetric: String,
    pub strongly_separating: String,
    pub weakly_separating: String,
}

impl fmt::Display for WeakMetricClassification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "finite:              {:<5} {}", self.finite, self.certificates.finite)?;
        writeln!(f, "symmetric:           {:<5} {}", self.symmetric, self.certificates.symmetric)?;
        writeln!(
            f,
            "strongly separating: {:<5} {}",
            self.strongly_separating, self.certificates.strongly_separating
        )?;
        write!(f, "weakly separating:   {:<5} {}", self.weakly_separating, self.certificates.weakly_separating)
    }
}

/// Classification with the default sampled direction count (`360·n`).
pub fn classify_minkowski(body: &ConvexBody) -> WeakMetricClassification {
    classify_minkowski_with(body, default_certificate_dirs(body.dimension()))
}

/// Finite iff `0` is interior, symmetric iff `Ω = −Ω`, strongly separating
/// iff bounded, weakly separating iff `Ω` contains no Euclidean line.
pub fn classify_minkowski_with(body: &ConvexBody, dirs: usize) -> WeakMetricClassification {
    let n = body.dimension();
    let origin = Point::zeros(n);
    let finite = body.contains_unchecked(&origin);
    let finite_cert = if finite {
        "origin is interior".to_string()
    } else if origin_in_closure(body) {
        "origin is on the boundary".to_string()
    } else {
        "origin is outside the closure".to_string()
    };

    let (symmetric, symmetric_cert) = if !finite {
        (false, "a centrally symmetric body has the origin in its interior".to_string())
    } else {
        match body {
            ConvexBody::Ball(b) => {
                let centered = b.center().norm() <= 1e-12 * b.radius();
                (centered, format!("ball center at distance {:e} from origin", b.center().norm()))
            }
            ConvexBody::Ellipsoid(e) => {
                let centered = e.center().norm() <= 1e-12 * e.outer_radius();
                (centered, format!("ellipsoid center at distance {:e} from origin", e.center().norm()))
            }
            ConvexBody::HalfSpace(_) => (false, "a half-space is never centrally symmetric".to_string()),
            _ => sampled_symmetry(body, &origin, dirs),
        }
    };

    let strongly = body.is_bounded_with(dirs);
    let strongly_cert = if strongly {
        "bounded: every probed ray from the witness exits".to_string()
    } else {
        "unbounded: some ray from the witness stays inside".to_string()
    };

    let (weakly, weakly_cert) = if strongly {
        (true, "bounded bodies contain no line".to_string())
    } else {
        match body.contains_line_with(dirs) {
            Some(d) => (false, format!("contains lines along {}", fmt_coords(&d))),
            None => (true, "no probed direction is contained both ways".to_string()),
        }
    };

    WeakMetricClassification {
        finite,
        symmetric,
        strongly_separating: strongly,
        weakly_separating: weakly,
        certificates: Certificates {
            finite: finite_cert,
            symmetric: symmetric_cert,
            strongly_separating: strongly_cert,
            weakly_separating: weakly_cert,
        },
    }
}

fn sampled_symmetry(body: &ConvexBody, origin: &Point, dirs: usize) -> (bool, String) {
    let n = body.dimension();
    let mut candidates = unit_directions(n, dirs);
    if let ConvexBody::HPolytope(p) = body {
        candidates.extend(p.facets().iter().map(|f| f.normal().normalize()));
    }
    for d in &candidates {
        let forward = gauge_from_closure(body, origin, d);
        let backward = gauge_from_closure(body, origin, &-d);
        if (forward - backward).abs() > SYMMETRY_TOL * forward.max(backward).max(1.0) {
            return (
                false,
                format!("gauge {} vs {} along ±{}", forward, backward, fmt_coords(d)),
            );
        }
    }
    (true, format!("gauge(ξ) = gauge(−ξ) on {} probed directions", candidates.len()))
}

fn fmt_coords(v: &Vector) -> String {
    let parts: Vec<String> = v.iter().map(|c| format!("{:.6}", c)).collect();
    format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::{HPolytope, HalfSpace};
    use crate::point as v;
    use crate::sampling::{random_interior_point, rng, standard_bodies};
    use proptest::prelude::*;
    use rand::Rng;

    fn disk() -> ConvexBody {
        ConvexBody::ball(&[0.0, 0.0], 1.0).unwrap()
    }

    fn strip() -> ConvexBody {
        HPolytope::new(
            vec![HalfSpace::new(v(&[0.0, 1.0]), 1.0).unwrap(), HalfSpace::new(v(&[0.0, -1.0]), 1.0).unwrap()],
            v(&[0.0, 0.0]),
        )
        .unwrap()
        .into()
    }

    #[test]
    fn minkowski_gauge_examples() {
        assert_eq!(minkowski_gauge(&disk(), &v(&[0.0, 0.0]), &v(&[0.6, 0.8])).unwrap(), 1.0);
        let half = ConvexBody::half_space(&[0.0, -1.0], 0.0).unwrap();
        assert_eq!(minkowski_gauge(&half, &v(&[0.0, 1.0]), &v(&[1.0, 0.0])).unwrap(), 0.0);
        let g = minkowski_gauge(&disk(), &v(&[0.5, 0.0]), &v(&[1.0, 0.0])).unwrap();
        assert!((g - 2.0).abs() < 1e-15);
        assert_eq!(minkowski_gauge(&disk(), &v(&[0.5, 0.0]), &v(&[0.0, 0.0])).unwrap(), 0.0);
        assert_eq!(minkowski_gauge(&disk(), &v(&[1.5, 0.0]), &v(&[1.0, 0.0])), Err(Error::PointOutside));
    }

    #[test]
    fn halfspace_closed_form_examples() {
        let nu = v(&[0.0, -1.0]);
        assert_eq!(gauge_halfspace_closed(&nu, 0.0, &v(&[0.0, 1.0]), &v(&[0.0, -1.0])).unwrap(), 1.0);
        assert_eq!(gauge_halfspace_closed(&nu, 0.0, &v(&[0.0, 1.0]), &v(&[0.0, 1.0])).unwrap(), 0.0);
        let closed = gauge_halfspace_closed(&nu, 0.0, &v(&[0.0, 2.0]), &v(&[0.0, -1.0])).unwrap();
        let half = ConvexBody::half_space(&[0.0, -1.0], 0.0).unwrap();
        let generic = minkowski_gauge(&half, &v(&[0.0, 2.0]), &v(&[0.0, -1.0])).unwrap();
        assert_eq!(closed, 0.5);
        assert!((closed - generic).abs() < 1e-15);
        assert_eq!(
            gauge_halfspace_closed(&nu, 0.0, &v(&[0.0, -1.0]), &v(&[0.0, 1.0])),
            Err(Error::PointOutside)
        );
    }

    #[test]
    fn ball_closed_form_examples() {
        assert_eq!(gauge_ball_closed(1.0, &v(&[0.0, 0.0]), &v(&[3.0, 4.0])).unwrap(), 5.0);
        let g = gauge_ball_closed(1.0, &v(&[0.5, 0.0]), &v(&[1.0, 0.0])).unwrap();
        assert!((g - 2.0).abs() < 1e-12);
        let g = gauge_ball_closed(1.0, &v(&[0.5, 0.0]), &v(&[-1.0, 0.0])).unwrap();
        let t = disk().ray_boundary(&v(&[0.5, 0.0]), &v(&[-1.0, 0.0])).unwrap().hit().unwrap();
        assert!((t - 1.5).abs() < 1e-15);
        assert!((g - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(gauge_ball_closed(1.0, &v(&[1.0, 0.0]), &v(&[1.0, 0.0])), Err(Error::PointOutside));
    }

    #[test]
    fn weak_metric_examples() {
        assert_eq!(minkowski_weak_metric(&disk(), &v(&[0.0, 0.0]), &v(&[3.0, 4.0])).unwrap(), 5.0);
        let shifted = ConvexBody::half_space(&[0.0, -1.0], 1.0).unwrap();
        let d = minkowski_weak_metric(&shifted, &v(&[0.0, 0.0]), &v(&[0.0, -2.0])).unwrap();
        let oracle = minkowski_gauge(&shifted, &v(&[0.0, 0.0]), &v(&[0.0, -2.0])).unwrap();
        assert_eq!(d, 2.0);
        assert_eq!(d, oracle);
        for body in standard_bodies() {
            let p = v(&[0.3, 0.1]);
            if body.contains(&Point::zeros(2)).unwrap() {
                assert_eq!(minkowski_weak_metric(&body, &p, &p).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn weak_metric_with_origin_on_boundary() {
        let half = ConvexBody::half_space(&[0.0, -1.0], 0.0).unwrap();
        let o = v(&[0.0, 0.0]);
        // Entering direction: the ray stays inside forever.
        assert_eq!(minkowski_weak_metric(&half, &o, &v(&[0.0, 1.0])).unwrap(), 0.0);
        // Leaving and tangential directions never enter.
        assert_eq!(minkowski_weak_metric(&half, &o, &v(&[0.0, -1.0])).unwrap(), f64::INFINITY);
        assert_eq!(minkowski_weak_metric(&half, &o, &v(&[1.0, 0.0])).unwrap(), f64::INFINITY);
        let touching = ConvexBody::ball(&[1.0, 0.0], 1.0).unwrap();
        let g = minkowski_weak_metric(&touching, &o, &v(&[1.0, 0.0])).unwrap();
        assert!((g - 0.5).abs() < 1e-12);
        let away = ConvexBody::ball(&[3.0, 0.0], 1.0).unwrap();
        assert!(matches!(minkowski_weak_metric(&away, &o, &v(&[1.0, 0.0])), Err(Error::Precondition(_))));
    }

    #[test]
    fn classification_truth_table() {
        let c = classify_minkowski(&disk());
        assert!(c.finite && c.symmetric && c.strongly_separating && c.weakly_separating);

        let half = ConvexBody::half_space(&[0.0, -1.0], 1.0).unwrap();
        let c = classify_minkowski(&half);
        assert!(c.finite);
        assert!(!c.symmetric && !c.strongly_separating && !c.weakly_separating);

        let c = classify_minkowski(&strip());
        assert!(c.finite && c.symmetric);
        assert!(!c.strongly_separating && !c.weakly_separating);
        // Oracle: the horizontal rays are contained both ways.
        let o = v(&[0.0, 0.0]);
        assert!(strip().ray_boundary(&o, &v(&[1.0, 0.0])).unwrap().is_contained());
        assert!(strip().ray_boundary(&o, &v(&[-1.0, 0.0])).unwrap().is_contained());

        let off = ConvexBody::ball(&[0.2, 0.0], 1.0).unwrap();
        let c = classify_minkowski(&off);
        assert!(c.finite && !c.symmetric && c.strongly_separating);

        let square = ConvexBody::axis_box(&[-1.0, -1.0], &[1.0, 1.0]).unwrap();
        let c = classify_minkowski(&square);
        assert!(c.finite && c.symmetric && c.strongly_separating && c.weakly_separating);

        let shifted_square = ConvexBody::axis_box(&[-1.0, -1.0], &[1.0, 2.0]).unwrap();
        assert!(!classify_minkowski(&shifted_square).symmetric);

        let on_boundary = ConvexBody::ball(&[1.0, 0.0], 1.0).unwrap();
        let c = classify_minkowski(&on_boundary);
        assert!(!c.finite && !c.symmetric && c.strongly_separating && c.weakly_separating);

        let quadrant = HPolytope::new(
            vec![HalfSpace::new(v(&[-1.0, 0.0]), 0.0).unwrap(), HalfSpace::new(v(&[0.0, -1.0]), 0.0).unwrap()],
            v(&[1.0, 1.0]),
        )
        .unwrap()
        .into();
        let c = classify_minkowski(&quadrant);
        assert!(!c.finite && !c.strongly_separating && c.weakly_separating);
        assert!(c.to_string().contains("weakly separating"));
    }

    #[test]
    fn closed_forms_match_generic_gauge() {
        let mut r = rng(21);
        for _ in 0..10_000 {
            let radius = r.random_range(0.1..10.0);
            let ball = ConvexBody::ball(&[0.0, 0.0], radius).unwrap();
            let x = random_interior_point(&ball, &mut r, 1.0);
            let xi = v(&[r.random_range(-5.0..5.0), r.random_range(-5.0..5.0)]);
            let closed = gauge_ball_closed(radius, &x, &xi).unwrap();
            let generic = minkowski_gauge(&ball, &x, &xi).unwrap();
            assert!((closed - generic).abs() <= 1e-9 * generic.max(f64::MIN_POSITIVE));

            let nu = v(&[r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)]);
            let s = r.random_range(-3.0..3.0);
            let half = ConvexBody::half_space(nu.as_slice(), s).unwrap();
            let x = random_interior_point(&half, &mut r, 1.0);
            let closed = gauge_halfspace_closed(&nu, s, &x, &xi).unwrap();
            let generic = minkowski_gauge(&half, &x, &xi).unwrap();
            assert!((closed - generic).abs() <= 1e-9 * closed.max(1e-300));
        }
    }

    #[test]
    fn sublevel_set_reconstructs_the_body() {
        let mut r = rng(22);
        for body in standard_bodies() {
            let x = random_interior_point(&body, &mut r, 0.9);
            let radius = body.bounding_radius();
            let mut checked = 0;
            while checked < 10_000 {
                let xi = v(&[r.random_range(-radius..radius), r.random_range(-radius..radius)]) * 1.5;
                let g = minkowski_gauge(&body, &x, &xi).unwrap();
                if (g - 1.0).abs() <= 1e-6 {
                    continue;
                }
                checked += 1;
                assert_eq!(body.contains(&(&x + &xi)).unwrap(), g < 1.0);
            }
        }
    }

    proptest! {
        #[test]
        fn gauge_is_positively_homogeneous(
            x0 in -0.9f64..0.9, x1 in -0.4f64..0.4,
            a in -3.0f64..3.0, b in -3.0f64..3.0, lambda in 0.001f64..1000.0,
        ) {
            prop_assume!(a != 0.0 || b != 0.0);
            for body in standard_bodies() {
                let x = v(&[0.5 + 0.4 * x0, 0.5 + x1]);
                let x = if body.contains(&x).unwrap() { x } else { body.witness() };
                let xi = v(&[a, b]);
                let g = minkowski_gauge(&body, &x, &xi).unwrap();
                let scaled = minkowski_gauge(&body, &x, &(&xi * lambda)).unwrap();
                prop_assert!((scaled - lambda * g).abs() <= 1e-12 * lambda * g);
            }
        }

        #[test]
        fn gauge_is_subadditive(
            a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0, d in -3.0f64..3.0,
        ) {
            let half = ConvexBody::half_space(&[0.3, -1.0], 0.5).unwrap();
            let mut bodies = standard_bodies();
            bodies.push(half);
            for body in bodies {
                let x = body.witness();
                let (xi, eta) = (v(&[a, b]), v(&[c, d]));
                let lhs = minkowski_gauge(&body, &x, &(&xi + &eta)).unwrap();
                let rhs = minkowski_gauge(&body, &x, &xi).unwrap() + minkowski_gauge(&body, &x, &eta).unwrap();
                prop_assert!(lhs <= rhs + 1e-9);
            }
        }
    }
}
