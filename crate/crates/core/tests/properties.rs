mod common;

use common::{random_matrix, random_polytope};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vein_core::body::{contains, convex_hull, polar_polytope, vein_objective};
use vein_core::geom::{self, dot, Point};
use vein_core::lower::{ball_pajor_check, g_case_c, octahedron_certificate, spherical::g_domain};
use vein_core::mvee::{mvee_of_points, ovr};
use vein_core::sphere::random_direction;
use vein_core::transfer::{dist_to_ball_upper, hadamard_witness};
use vein_core::{Body, BodySpec, Polytope};

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(3.0), Just(f64::INFINITY)]
}

fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn same_point_sets(a: &[Point], b: &[Point], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().all(|p| b.iter().any(|q| geom::norm(&geom::sub(p, q)) <= tol))
        && b.iter().all(|q| a.iter().any(|p| geom::norm(&geom::sub(p, q)) <= tol))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn holder_for_lp_balls(p in exponent(), d in 2usize..6, seed in any::<u64>()) {
        let body = Body::new(BodySpec::lp_ball(p, d)).unwrap();
        let mut rng = rng_from(seed);
        for _ in 0..200 {
            let x = common::random_point(&mut rng, d);
            let u = common::random_point(&mut rng, d);
            let bound = body.gauge(&x).unwrap() * body.support(&u).unwrap();
            prop_assert!(dot(&x, &u) <= bound + 1e-9 * (1.0 + bound));
        }
    }

    #[test]
    fn support_is_max_over_extreme_points(d in 2usize..4, m in 2usize..7, seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let spec = random_polytope(&mut rng, d, m);
        let BodySpec::SymPolytope { generators } = &spec else { unreachable!() };
        let extreme = convex_hull(&geom::symmetrize(generators)).unwrap().extreme_points();
        let body = Body::new(spec.clone()).unwrap();
        for _ in 0..50 {
            let u = random_direction(d, &mut rng);
            let oracle = extreme.iter().map(|e| dot(&u, e)).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!((body.support(&u).unwrap() - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn convex_combinations_lie_inside(d in 2usize..6, m in 2usize..8, seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let spec = random_polytope(&mut rng, d, m.max(d));
        let BodySpec::SymPolytope { generators } = &spec else { unreachable!() };
        let body = Body::new(spec.clone()).unwrap();
        for _ in 0..20 {
            let w: Vec<f64> = (0..generators.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let total: f64 = w.iter().map(|v| v.abs()).sum();
            let x: Point = (0..d)
                .map(|k| generators.iter().zip(&w).map(|(g, c)| g[k] * c / total).sum())
                .collect();
            prop_assert!(body.gauge(&x).unwrap() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn polar_involution(d in 2usize..4, m in 2usize..7, seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let BodySpec::SymPolytope { generators } = random_polytope(&mut rng, d, m) else { unreachable!() };
        let p = Polytope::new(convex_hull(&geom::symmetrize(&generators)).unwrap().extreme_points());
        let back = polar_polytope(&polar_polytope(&p).unwrap()).unwrap();
        prop_assert!(same_point_sets(&back.vertices, &p.vertices, 1e-7));
    }

    #[test]
    fn containment_is_scale_monotone(d in 2usize..4, seed in any::<u64>(), t in 1.0f64..3.0) {
        let mut rng = rng_from(seed);
        let body = Body::new(BodySpec::lp_ball(2.0, d)).unwrap();
        let pts: Vec<Point> = (0..(3 * d)).map(|_| geom::scaled(&random_direction(d, &mut rng), rng.gen_range(0.8..2.5))).collect();
        let p = Polytope::new(pts);
        let Ok(r) = contains(&p, &body, 1e-9, 0) else { return Ok(()) };
        if r.contained {
            prop_assert!(contains(&p.scaled(t), &body, 1e-9, 0).unwrap().contained);
        }
    }

    #[test]
    fn objective_is_linearly_invariant(kind in 0usize..4, d in 2usize..4, seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let spec = match kind {
            0 => BodySpec::cross_polytope(d),
            1 => BodySpec::cube(d),
            2 => BodySpec::euclidean_ball(d),
            _ => random_polytope(&mut rng, d, d + 2),
        };
        let t = random_matrix(&mut rng, d);
        let moved = spec.transformed(&t).unwrap();
        let pts: Vec<Point> = (0..5).map(|_| common::random_point(&mut rng, d)).collect();
        let moved_pts: Vec<Point> = pts.iter().map(|p| geom::apply(&t, p)).collect();
        let a = vein_objective(&Body::new(spec).unwrap(), &pts).unwrap();
        let b = vein_objective(&Body::new(moved).unwrap(), &moved_pts).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{} vs {}", a, b);
    }

    #[test]
    fn john_sandwich(d in 2usize..4, m in 2usize..7, seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let spec = random_polytope(&mut rng, d, m);
        let BodySpec::SymPolytope { generators } = &spec else { unreachable!() };
        let e = mvee_of_points(generators, 1e-7).unwrap().shape;
        let l = e.factor().unwrap();
        let body = Body::new(spec.clone()).unwrap();
        let shrink = 1.0 / (d as f64).sqrt();
        for _ in 0..200 {
            let u = random_direction(d, &mut rng);
            let x = geom::scaled(&geom::apply(&l, &u), shrink);
            prop_assert!(body.gauge(&x).unwrap() <= 1.0 + 1e-6);
        }
        for g in generators {
            prop_assert!(e.gauge(g).unwrap() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn mvee_volume_is_monotone(d in 2usize..5, m in 2usize..7, seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let BodySpec::SymPolytope { mut generators } = random_polytope(&mut rng, d, m.max(d)) else { unreachable!() };
        let before = mvee_of_points(&generators, 1e-7).unwrap().shape.volume();
        generators.push(common::random_point(&mut rng, d));
        let after = mvee_of_points(&generators, 1e-7).unwrap().shape.volume();
        prop_assert!(after >= before * (1.0 - 1e-6));
    }

    #[test]
    fn mvee_is_affinely_equivariant(d in 2usize..4, m in 2usize..7, seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let BodySpec::SymPolytope { generators } = random_polytope(&mut rng, d, m) else { unreachable!() };
        let t = random_matrix(&mut rng, d);
        let a = mvee_of_points(&generators, 1e-9).unwrap().shape.to_matrix();
        let moved: Vec<Point> = generators.iter().map(|g| geom::apply(&t, g)).collect();
        let b = mvee_of_points(&moved, 1e-9).unwrap().shape.to_matrix();
        let expect = &t * a * t.transpose();
        prop_assert!((&b - &expect).amax() <= 1e-6 * expect.amax(), "{} vs {}", b, expect);
    }

    #[test]
    fn outer_volume_ratio_below_sqrt_d(d in 2usize..4, m in 2usize..7, seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let spec = random_polytope(&mut rng, d, m);
        prop_assert!(ovr(&spec).unwrap() <= (d as f64).sqrt() + 1e-3);
        prop_assert!(dist_to_ball_upper(&spec).unwrap() <= (d as f64).sqrt() + 1e-6);
    }

    #[test]
    fn octahedron_sums_dominate(d in 2usize..7, extra in 0usize..6, seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let mut pts: Vec<Point> = Vec::new();
        for i in 0..d {
            let s = 1.0 + rng.gen_range(0.0..0.5);
            pts.push(geom::scaled(&geom::unit(i, d), s));
            pts.push(geom::scaled(&geom::unit(i, d), -s));
        }
        for _ in 0..extra {
            pts.push(geom::scaled(&common::random_point(&mut rng, d), 3.0));
        }
        let c = octahedron_certificate(&pts, true).unwrap();
        let s = c.witness["l1_sum"].as_f64().unwrap();
        let t = c.witness["coordinate_spread"].as_f64().unwrap();
        prop_assert!(s >= t - 1e-9 && t >= 2.0 * d as f64 - 1e-9);
    }

    #[test]
    fn ball_pajor_and_santalo(d in 2usize..4, m in 2usize..7, seed in any::<u64>()) {
        let mut rng = rng_from(seed);
        let BodySpec::SymPolytope { generators } = random_polytope(&mut rng, d, m) else { unreachable!() };
        prop_assert!(ball_pajor_check(&generators).unwrap().passed());
    }
}

#[test]
fn g_exceeds_ball_value_except_excluded_case() {
    let ball = 6.0 * 3f64.sqrt();
    for (m, n) in g_domain() {
        let g = g_case_c(m, n).unwrap();
        if (m, n) == (0, 5) {
            assert!(g < ball);
        } else {
            assert!(g >= ball - 1e-9, "g({m},{n}) = {g}");
        }
    }
}

#[test]
fn hadamard_exact_up_to_sixteen() {
    for m in 1..=4 {
        let w = hadamard_witness(m).unwrap();
        assert_eq!(w.ratio, ((1u32 << m) as f64).sqrt());
        assert!(w.observed_ratio <= w.ratio);
    }
}
