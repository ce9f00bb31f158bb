#![allow(dead_code)]

use rand::Rng;
use vein_core::geom::Point;
use vein_core::BodySpec;

pub fn random_point<R: Rng>(rng: &mut R, d: usize) -> Point {
    (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Random symmetric polytope with `max(m, d)` generators, rejecting nearly
/// flat ones.
pub fn random_polytope<R: Rng>(rng: &mut R, d: usize, m: usize) -> BodySpec {
    let m = m.max(d);
    loop {
        let generators: Vec<Point> = (0..m).map(|_| random_point(rng, d)).collect();
        if vein_core::geom::rank(&generators, d) == d && min_singular(&generators, d) > 0.1 {
            return BodySpec::SymPolytope { generators };
        }
    }
}

fn min_singular(points: &[Point], d: usize) -> f64 {
    let m = nalgebra::DMatrix::from_fn(points.len(), d, |i, j| points[i][j]);
    m.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Random well-conditioned invertible matrix.
pub fn random_matrix<R: Rng>(rng: &mut R, d: usize) -> nalgebra::DMatrix<f64> {
    loop {
        let t = nalgebra::DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
        let sv = t.singular_values();
        let (lo, hi) = sv.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &s| (a.min(s), b.max(s)));
        if lo > 0.2 && hi / lo < 10.0 {
            return t;
        }
    }
}

pub fn hexagon_rhombus_value() -> f64 {
    3.0 + 2.0 * 2f64.sqrt()
}
