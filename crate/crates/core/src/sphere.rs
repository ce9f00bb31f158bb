//! Deterministic and random direction sets on the unit sphere.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::geom::{norm, Point};

/// Fibonacci (golden-angle) lattice of `n` points on S².
pub fn fibonacci_sphere(n: usize) -> Vec<Point> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let theta = golden * i as f64;
            vec![r * theta.cos(), r * theta.sin(), z]
        })
        .collect()
}

/// `n` equally spaced directions on the unit circle.
pub fn circle_directions(n: usize) -> Vec<Point> {
    (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
            vec![t.cos(), t.sin()]
        })
        .collect()
}

/// Low-discrepancy directions in d = 2 or 3, `None` otherwise.
pub fn lattice_directions(dim: usize, n: usize) -> Option<Vec<Point>> {
    match dim {
        2 => Some(circle_directions(n)),
        3 => Some(fibonacci_sphere(n)),
        _ => None,
    }
}

/// Uniformly distributed random unit vector.
pub fn random_direction<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Point {
    loop {
        let v: Point = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_points_are_unit_and_balanced() {
        let pts = fibonacci_sphere(1000);
        let mut c = [0.0; 3];
        for p in &pts {
            assert!((norm(p) - 1.0).abs() < 1e-12);
            for k in 0..3 {
                c[k] += p[k] / 1000.0;
            }
        }
        assert!(c.iter().all(|v| v.abs() < 1e-2));
    }
}
