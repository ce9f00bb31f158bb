mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vein_core::body::{contains, vein_objective};
use vein_core::certify::sandwich;
use vein_core::lower::Side;
use vein_core::mvee::VolumeOptions;
use vein_core::search::{known_witness, local_search, vein_upper, SearchConfig, SearchMode};
use vein_core::transfer::dist_to_ball_upper;
use vein_core::{Body, BodySpec, Polytope, VeinError};

const DISC: f64 = 5.656854249492381;
const BALL3: f64 = 10.392304845413264;

fn cfg(n: usize, restarts: usize) -> SearchConfig {
    SearchConfig {
        restarts,
        ..SearchConfig::new(n)
    }
}

fn assert_valid(body: &BodySpec, r: &vein_core::search::SearchResult) {
    assert_eq!(r.mode, SearchMode::Certified);
    let b = Body::new(body.clone()).unwrap();
    let report = contains(&Polytope::new(r.best_points.clone()), &b, f64::MIN_POSITIVE, 0).unwrap();
    assert!(report.worst_margin >= 0.0, "margin {}", report.worst_margin);
    assert_eq!(r.objective, vein_objective(&b, &r.best_points).unwrap());
    assert!(r.objective >= r.raw_objective);
}

#[test]
fn disc_value() {
    let body = BodySpec::euclidean_ball(2);
    let r = local_search(&body, &cfg(4, 8)).unwrap();
    assert!((r.objective - DISC).abs() < 1e-3, "{}", r.objective);
    assert!(r.objective >= DISC - 1e-9);
    assert_valid(&body, &r);
    let r = vein_upper(&body, (3, 8), &SearchConfig::new(3)).unwrap();
    assert!((r.objective - DISC).abs() < 1e-3);
    assert!(r.objective >= DISC - 1e-9);
}

#[test]
fn ball_value() {
    let body = BodySpec::euclidean_ball(3);
    let r = local_search(&body, &cfg(6, 20)).unwrap();
    assert!((r.objective - BALL3).abs() < 5e-2, "{}", r.objective);
    assert!(r.objective >= BALL3 - 1e-9);
    assert_valid(&body, &r);
}

#[test]
fn cross_polytope_value() {
    let body = BodySpec::cross_polytope(3);
    let r = local_search(&body, &cfg(6, 8)).unwrap();
    assert!((r.objective - 6.0).abs() < 1e-3);
    assert!(r.objective >= 6.0 - 1e-9);
    assert_eq!(known_witness(&BodySpec::cross_polytope(4)).unwrap().objective, 8.0);
}

#[test]
fn witnesses() {
    let w = known_witness(&BodySpec::euclidean_ball(3)).unwrap();
    assert!((w.objective - 2.0 * 3f64.powf(1.5)).abs() < 1e-9);
    let w = known_witness(&BodySpec::hexagon()).unwrap();
    assert!((w.objective - 6.0).abs() < 1e-9);
    assert_eq!(w.n_vertices(), 6);
}

/// The rhombus `(±a, 0), (0, ±b)` with `a = (1 + √2)/2`, `b = √(3/2)·a` contains
/// the regular hexagon with vertices `(±1, 0), (±1/2, ±√3/2)` and has
/// `Σ ‖pᵢ‖ = 2a + 4b/√3 = 3 + 2√2`.
#[test]
fn hexagon_rhombus_oracle() {
    let a = (1.0 + 2f64.sqrt()) / 2.0;
    let b = 1.5f64.sqrt() * a;
    let pts = vec![vec![a, 0.0], vec![-a, 0.0], vec![0.0, b], vec![0.0, -b]];
    let body = Body::new(BodySpec::hexagon()).unwrap();
    let report = contains(&Polytope::new(pts.clone()), &body, 1e-12, 0).unwrap();
    assert!(report.contained, "{}", report.worst_margin);
    let v = vein_objective(&body, &pts).unwrap();
    assert!((v - common::hexagon_rhombus_value()).abs() < 1e-12, "{v}");
}

#[test]
fn hexagon_search_goes_below_six() {
    let body = BodySpec::hexagon();
    let r = vein_upper(&body, (3, 8), &SearchConfig::new(3)).unwrap();
    assert_valid(&body, &r);
    assert!(r.objective < 5.9, "{}", r.objective);
    assert!(r.objective >= common::hexagon_rhombus_value() - 1e-3);
    let s = sandwich(&body, &VolumeOptions::default()).unwrap();
    assert!(s.lower_max <= r.objective);
}

#[test]
fn vertex_count_errors() {
    let e = local_search(&BodySpec::euclidean_ball(2), &cfg(2, 1)).unwrap_err();
    assert_eq!(e, VeinError::InfeasibleVertexCount { n: 2, dim: 2 });
    assert!(vein_upper(&BodySpec::euclidean_ball(2), (3, 65), &SearchConfig::new(3)).is_err());
}

#[test]
fn deterministic_given_seed() {
    let body = common::random_polytope(&mut ChaCha8Rng::seed_from_u64(11), 2, 4);
    let c = SearchConfig {
        seed: 42,
        ..cfg(5, 6)
    };
    let a = local_search(&body, &c).unwrap();
    let b = local_search(&body, &c).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn monotone_in_vertex_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..3 {
        let body = common::random_polytope(&mut rng, 2, 4);
        let c = SearchConfig::new(3);
        let short = vein_upper(&body, (3, 4), &c).unwrap();
        let long = vein_upper(&body, (3, 7), &c).unwrap();
        assert!(long.objective <= short.objective + 1e-9);
    }
}

#[test]
fn random_planar_bodies_within_six() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for m in [2, 3, 4, 5, 6] {
        let body = common::random_polytope(&mut rng, 2, m);
        let r = vein_upper(&body, (3, 8), &SearchConfig::new(3)).unwrap();
        assert_valid(&body, &r);
        let s = sandwich(&body, &VolumeOptions::default()).unwrap();
        assert!(s.lower_max >= 4.0 - 1e-6);
        assert!(s.lower_max <= r.objective + 1e-9);
        assert!(r.objective <= 6.0 + 5e-2, "{}", r.objective);
    }
}

#[test]
fn affine_invariance_of_outcomes() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..3 {
        let body = common::random_polytope(&mut rng, 2, 4);
        let t = common::random_matrix(&mut rng, 2);
        let moved = body.transformed(&t).unwrap();
        let c = SearchConfig::new(3);
        let a = vein_upper(&body, (3, 8), &c).unwrap().objective;
        let b = vein_upper(&moved, (3, 8), &c).unwrap().objective;
        assert!((a - b).abs() <= 0.02 * a, "{a} vs {b}");
    }
}

#[test]
fn named_bodies_close_the_gap() {
    for body in [
        BodySpec::euclidean_ball(2),
        BodySpec::euclidean_ball(3),
        BodySpec::cross_polytope(2),
        BodySpec::cross_polytope(3),
    ] {
        let d = body.dim();
        let r = vein_upper(&body, (d + 1, 2 * d), &cfg(d + 1, 8)).unwrap();
        let s = sandwich(&body, &VolumeOptions::default()).unwrap();
        assert!(s.lower_max <= r.objective + 1e-9);
        assert!((r.objective - s.lower_max) / s.lower_max < 1e-2);
    }
}

#[test]
fn three_dimensional_transfer_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for m in [3, 4, 5] {
        let body = common::random_polytope(&mut rng, 3, m);
        let lambda = dist_to_ball_upper(&body).unwrap();
        let r = vein_upper(&body, (4, 6), &cfg(4, 4)).unwrap();
        assert!(BALL3 / lambda <= r.objective + 1e-6);
        assert!(r.objective <= lambda * BALL3 + 1e-6);
        let s = sandwich(&body, &VolumeOptions::default()).unwrap();
        for c in s.certificates.iter().filter(|c| c.side == Side::Lower) {
            assert!(c.value <= r.objective + 1e-9);
        }
    }
}
