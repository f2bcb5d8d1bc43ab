use nalgebra::DMatrix;
use proptest::prelude::*;

use funk_core::body::{HPolytope, HalfSpace};
use funk_core::finsler::{path_length, segment_length_closed, Path, QuadratureSpec, TautologicalStructure};
use funk_core::funk::{chain_defect, forward_sphere, funk};
use funk_core::gauge::minkowski_gauge;
use funk_core::sampling::{random_interior_point, random_polygon, rng};
use funk_core::{point, ConvexBody, Point};

fn disk() -> ConvexBody {
    ConvexBody::ball(&[0.0, 0.0], 1.0).unwrap()
}

fn in_disk() -> impl Strategy<Value = Point> {
    (0.0..0.95f64, 0.0..std::f64::consts::TAU).prop_map(|(r, a)| point(&[r * a.cos(), r * a.sin()]))
}

/// Image of a polytope under `p ↦ Ap + b`: facets `⟨A⁻ᵀν, q⟩ < s + ⟨A⁻ᵀν, b⟩`.
fn affine_image(p: &HPolytope, a: &DMatrix<f64>, b: &Point) -> HPolytope {
    let inv_t = a.clone().try_inverse().unwrap().transpose();
    let facets = p
        .facets()
        .iter()
        .map(|f| {
            let n = &inv_t * f.normal();
            let s = f.offset() + n.dot(b);
            HalfSpace::new(n, s).unwrap()
        })
        .collect();
    HPolytope::new(facets, a * p.witness() + b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn triangle_inequality_on_random_polygons(seed in 0u64..1000, m in 3usize..12) {
        let body = random_polygon(m, 1.0, seed);
        let mut r = rng(seed);
        for _ in 0..50 {
            let x = random_interior_point(&body, &mut r, 1.0);
            let y = random_interior_point(&body, &mut r, 1.0);
            let z = random_interior_point(&body, &mut r, 1.0);
            let excess = funk(&body, &x, &z).unwrap() - funk(&body, &x, &y).unwrap() - funk(&body, &y, &z).unwrap();
            prop_assert!(excess <= 1e-9);
        }
    }

    #[test]
    fn funk_metric_is_affinely_invariant(seed in 0u64..1000, entries in prop::array::uniform4(-2.0..2.0f64), shift in prop::array::uniform2(-3.0..3.0f64)) {
        let a = DMatrix::from_row_slice(2, 2, &entries);
        prop_assume!(a.determinant().abs() > 0.1);
        let ConvexBody::HPolytope(poly) = random_polygon(7, 1.0, seed) else { unreachable!() };
        let b = point(&shift);
        let image: ConvexBody = affine_image(&poly, &a, &b).into();
        let body: ConvexBody = poly.into();
        let mut r = rng(seed + 1);
        for _ in 0..20 {
            let x = random_interior_point(&body, &mut r, 1.0);
            let y = random_interior_point(&body, &mut r, 1.0);
            let f = funk(&body, &x, &y).unwrap();
            let g = funk(&image, &(&a * &x + &b), &(&a * &y + &b)).unwrap();
            prop_assert!((f - g).abs() <= 1e-9 * (1.0 + f), "{f} vs {g}");
        }
    }

    #[test]
    fn disk_distance_matches_the_exit_point_formula(x in in_disk(), y in in_disk()) {
        prop_assume!((&x - &y).norm() > 1e-6);
        // a⁺ from |x + t(y−x)| = 1 solved independently; F = log(|x−a⁺| / |y−a⁺|).
        let d = &y - &x;
        let (a, b, c) = (d.dot(&d), x.dot(&d), x.dot(&x) - 1.0);
        let t = (-b + (b * b - a * c).sqrt()) / a;
        let exit = &x + &d * t;
        let expected = ((&x - &exit).norm() / (&y - &exit).norm()).ln();
        let f = funk(&disk(), &x, &y).unwrap();
        prop_assert!((f - expected).abs() <= 1e-9 * (1.0 + expected));
    }

    #[test]
    fn straight_segment_length_matches_the_distance(x in in_disk(), y in in_disk()) {
        let s = TautologicalStructure::new(disk());
        let f = funk(&disk(), &x, &y).unwrap();
        let closed = segment_length_closed(&s, &x, &y).unwrap();
        let quad = path_length(&s, &Path::polyline(vec![x, y]).unwrap(), &QuadratureSpec::default()).unwrap();
        prop_assert!((f - closed).abs() <= 1e-9 * (1.0 + f));
        prop_assert!((f - quad).abs() <= 1e-6 * f.max(1e-12));
    }

    #[test]
    fn collinear_points_are_additive(x in in_disk(), z in in_disk(), s in 0.0..1.0f64) {
        let y = &x + (&z - &x) * s;
        prop_assert!(chain_defect(&disk(), &[x, y, z]).unwrap().abs() <= 1e-9);
    }

    #[test]
    fn gauge_is_positively_homogeneous(x in in_disk(), dir in prop::array::uniform2(-5.0..5.0f64), lambda in 0.01..100.0f64) {
        let xi = point(&dir);
        let g = minkowski_gauge(&disk(), &x, &xi).unwrap();
        let scaled = minkowski_gauge(&disk(), &x, &(&xi * lambda)).unwrap();
        prop_assert!((scaled - lambda * g).abs() <= 1e-12 * (1.0 + lambda * g));
    }

    #[test]
    fn forward_spheres_are_homothetic(x in in_disk(), d1 in 0.01..3.0f64, d2 in 0.01..3.0f64) {
        let a = forward_sphere(&disk(), &x, d1, 64).unwrap();
        let b = forward_sphere(&disk(), &x, d2, 64).unwrap();
        let ratio = (1.0 - (-d1).exp()) / (1.0 - (-d2).exp());
        for (p, q) in a.points().zip(b.points()) {
            let (dp, dq) = (&p - &x, &q - &x);
            prop_assert!((dp - dq * ratio).norm() <= 1e-12 * (1.0 + (&p - &x).norm()));
        }
    }

    #[test]
    fn distance_to_a_nearby_point_vanishes_smoothly(x in in_disk(), dir in prop::array::uniform2(-1.0..1.0f64)) {
        // F(x, x + εξ) = ε p_x(ξ) + O(ε²)
        let xi = point(&dir);
        prop_assume!(xi.norm() > 1e-3);
        let eps = 1e-7;
        let p = minkowski_gauge(&disk(), &x, &xi).unwrap();
        let f = funk(&disk(), &x, &(&x + &xi * eps)).unwrap();
        prop_assert!((f / eps - p).abs() <= 1e-4 * (1.0 + p));
    }
}
