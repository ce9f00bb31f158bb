//! Spherical machinery for the three-dimensional Euclidean ball.
//!
//! An exterior vertex `p` of a polytope containing `B₂³` sees a spherical cap
//! of radius `R` with `|p| = 1/cos R`. The face of the polar polytope dual to
//! `p` projects to a spherical polygon inside that cap; for a regular
//! spherical `y`-gon of area `x` the reciprocal cosine of its circumradius is
//! [`f_spherical`]. The functions `g` and `h` combine these bounds for
//! polytopes with five to seven vertices.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, VeinError};
use crate::geom::{dot, norm, scaled, Point};
use crate::sphere::fibonacci_sphere;

/// Small-area threshold splitting the faces in the five-to-seven vertex case.
pub const SMALL_AREA_THRESHOLD: f64 = 0.4;
/// Upper end of the face-area range; also the right end of `h`'s domain.
pub const AREA_CEILING: f64 = 5.5;

/// `tan(π/y) · tan((x + (y−2)π) / (2y))` for `0 < x < 2π`, `y ≥ 3`.
pub fn f_spherical(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && x < 2.0 * PI) || !(y >= 3.0) || !y.is_finite() {
        return Err(VeinError::Domain(format!(
            "f(x, y) needs 0 < x < 2π and y ≥ 3, got ({x}, {y})"
        )));
    }
    Ok(f_raw(x, y))
}

#[inline]
pub(crate) fn f_raw(x: f64, y: f64) -> f64 {
    (PI / y).tan() * ((x + (y - 2.0) * PI) / (2.0 * y)).tan()
}

/// `m + (n−m) · f((4π − 0.4m)/(n−m), ((6n−12) − 3m)/(n−m))` for
/// `5 ≤ n ≤ 7`, `0 ≤ m < n−1`.
pub fn g_case_c(m: usize, n: usize) -> Result<f64> {
    if !(5..=7).contains(&n) || m + 1 >= n {
        return Err(VeinError::Domain(format!(
            "g(m, n) needs 5 ≤ n ≤ 7 and 0 ≤ m < n − 1, got ({m}, {n})"
        )));
    }
    let (mf, nf) = (m as f64, n as f64);
    let rest = nf - mf;
    let x = (4.0 * PI - SMALL_AREA_THRESHOLD * mf) / rest;
    let y = ((6.0 * nf - 12.0) - 3.0 * mf) / rest;
    Ok(mf + rest * f_spherical(x, y)?)
}

/// Every admissible `(m, n)` pair of [`g_case_c`].
pub fn g_domain() -> Vec<(usize, usize)> {
    (5..=7).flat_map(|n| (0..n - 1).map(move |m| (m, n))).collect()
}

/// `2√3 tan((a+π)/6) + 3 tan((5π−a)/12)` on `[0, 5.5]`.
pub fn h_case_n5(a: f64) -> Result<f64> {
    if !(0.0..=AREA_CEILING).contains(&a) {
        return Err(VeinError::Domain(format!("h(a) needs 0 ≤ a ≤ 5.5, got {a}")));
    }
    Ok(h_raw(a))
}

fn h_raw(a: f64) -> f64 {
    2.0 * 3f64.sqrt() * ((a + PI) / 6.0).tan() + 3.0 * ((5.0 * PI - a) / 12.0).tan()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub argmin: f64,
    pub value: f64,
}

/// Minimum of `h` over `[0, 5.5]`: a 10³-point scan, then golden-section
/// refinement on the bracket around the best grid point.
pub fn h_min() -> Minimum {
    const GRID: usize = 1000;
    let step = AREA_CEILING / GRID as f64;
    let best = (0..=GRID)
        .map(|i| i as f64 * step)
        .min_by(|a, b| h_raw(*a).total_cmp(&h_raw(*b)))
        .unwrap();
    let (mut lo, mut hi) = ((best - step).max(0.0), (best + step).min(AREA_CEILING));
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    while hi - lo > 1e-10 {
        if h_raw(c) < h_raw(d) {
            hi = d;
            d = c;
            c = hi - ratio * (hi - lo);
        } else {
            lo = c;
            c = d;
            d = lo + ratio * (hi - lo);
        }
    }
    let mut argmin = (lo + hi) / 2.0;
    // the scan endpoint may beat the interior refinement
    for end in [0.0, AREA_CEILING] {
        if h_raw(end) < h_raw(argmin) {
            argmin = end;
        }
    }
    Minimum {
        argmin,
        value: h_raw(argmin),
    }
}

/// `n/cos(π/n)`, the planar lower bound for an `n`-gon around the disc.
pub fn jensen2d_bound(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(VeinError::Domain(format!("polygons need n ≥ 3 vertices, got {n}")));
    }
    Ok(n as f64 / (PI / n as f64).cos())
}

/// `d(d+1)`, the bound for a simplex around `B₂^d`.
pub fn simplex_bound(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(VeinError::Domain(format!("simplex bound needs d ≥ 2, got {d}")));
    }
    Ok((d * (d + 1)) as f64)
}

/// `n²/(n−2)`, the cap-area bound for `n` vertices around `B₂³`.
pub fn cap_area_bound(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(VeinError::Domain(format!("cap-area bound needs n ≥ 3, got {n}")));
    }
    let nf = n as f64;
    Ok(nf * nf / (nf - 2.0))
}

/// A closed spherical cap on S².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalCap {
    pub center: Point,
    /// Spherical radius in `(0, π/2)`.
    pub radius: f64,
}

impl SphericalCap {
    pub fn area(&self) -> f64 {
        2.0 * PI * (1.0 - self.radius.cos())
    }
}

/// The cap of S² visible from the exterior point `p`: center `p/|p|`,
/// radius `arccos(1/|p|)`.
pub fn cap_from_vertex(p: &[f64]) -> Result<SphericalCap> {
    if p.len() != 3 {
        return Err(VeinError::DimensionMismatch {
            expected: 3,
            got: p.len(),
        });
    }
    let r = norm(p);
    if !(r > 1.0) || !r.is_finite() {
        return Err(VeinError::Domain(format!("a cap needs |p| > 1, got {r}")));
    }
    Ok(SphericalCap {
        center: scaled(p, 1.0 / r),
        radius: (1.0 / r).acos(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub covered: bool,
    pub n_samples: usize,
    /// Sample point with the smallest coverage slack.
    pub worst_point: Point,
    /// `max_i (⟨q, cᵢ⟩ − cos Rᵢ)` at the worst point; negative when uncovered.
    pub worst_slack: f64,
}

/// Sampled check that the caps cover S², over a Fibonacci point set.
pub fn cap_covering_check(caps: &[SphericalCap], n_samples: usize) -> Result<CoverageReport> {
    if n_samples < 1000 {
        return Err(VeinError::Domain(format!(
            "cap covering needs at least 10^3 samples, got {n_samples}"
        )));
    }
    let mut worst = (f64::INFINITY, vec![0.0; 3]);
    for q in fibonacci_sphere(n_samples) {
        let slack = caps
            .iter()
            .map(|c| dot(&q, &c.center) - c.radius.cos())
            .fold(f64::NEG_INFINITY, f64::max);
        if slack < worst.0 {
            worst = (slack, q);
        }
    }
    Ok(CoverageReport {
        covered: worst.0 >= -1e-12,
        n_samples,
        worst_point: worst.1,
        worst_slack: worst.0,
    })
}

/// `Σ nᵢ ≤ 6n − 12` for the side counts of the faces of a polytope with
/// `n` faces.
pub fn euler_edge_bound(face_side_counts: &[usize]) -> Result<bool> {
    let n = face_side_counts.len();
    if n < 4 || face_side_counts.iter().any(|&c| c < 3) {
        return Err(VeinError::Domain(
            "need at least 4 faces, each with at least 3 sides".into(),
        ));
    }
    Ok(face_side_counts.iter().sum::<usize>() <= 6 * n - 12)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaItem {
    pub item: String,
    pub description: String,
    pub passed: bool,
    /// The least favorable quantity observed (derivative, second difference
    /// or Hessian eigenvalue).
    pub worst_value: f64,
    pub worst_point: (f64, f64),
    pub checked_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub grid_step: f64,
    pub items: Vec<LemmaItem>,
}

impl LemmaReport {
    pub fn all_passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }
}

/// Floor for second differences in the one-dimensional convexity check.
pub const SECOND_DIFF_FLOOR: f64 = -1e-8;
/// Floor for finite-difference Hessian eigenvalues on the rectangle.
pub const HESSIAN_EIG_FLOOR: f64 = -1e-6;

const DERIV_STEP: f64 = 1e-5;
const HESSIAN_STEP: f64 = 1e-4;

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

struct Tracker {
    worst: f64,
    at: (f64, f64),
    count: usize,
}

impl Tracker {
    fn new() -> Self {
        Tracker {
            worst: f64::INFINITY,
            at: (f64::NAN, f64::NAN),
            count: 0,
        }
    }

    /// Records `v`, keeping the minimum.
    fn low(&mut self, v: f64, at: (f64, f64)) {
        self.count += 1;
        if v < self.worst || v.is_nan() {
            self.worst = v;
            self.at = at;
        }
    }

    fn finish(self, item: &str, description: &str, passed: impl Fn(f64) -> bool) -> LemmaItem {
        LemmaItem {
            item: item.into(),
            description: description.into(),
            passed: passed(self.worst),
            worst_value: self.worst,
            worst_point: self.at,
            checked_points: self.count,
        }
    }
}

/// Smallest finite-difference Hessian eigenvalue of `f` over a grid on the
/// rectangle, with the point where it occurs and the number of grid points.
pub fn hessian_floor(
    f: &(dyn Fn(f64, f64) -> f64 + Sync),
    xs: (f64, f64),
    ys: (f64, f64),
    step: f64,
) -> (f64, (f64, f64), usize) {
    let h = HESSIAN_STEP;
    let mut t = Tracker::new();
    for x in grid(xs.0, xs.1, step) {
        for y in grid(ys.0, ys.1, step) {
            let c = f(x, y);
            let fxx = (f(x + h, y) - 2.0 * c + f(x - h, y)) / (h * h);
            let fyy = (f(x, y + h) - 2.0 * c + f(x, y - h)) / (h * h);
            let fxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h))
                / (4.0 * h * h);
            let mean = (fxx + fyy) / 2.0;
            let radius = (((fxx - fyy) / 2.0).powi(2) + fxy * fxy).sqrt();
            t.low(mean - radius, (x, y));
        }
    }
    (t.worst, t.at, t.count)
}

/// Numerical verification of the four monotonicity and convexity claims
/// about [`f_spherical`].
pub fn lemma_func_checks(grid_step: f64) -> Result<LemmaReport> {
    lemma_func_checks_with(&f_raw, grid_step)
}

/// As [`lemma_func_checks`], for an arbitrary function of two variables.
pub fn lemma_func_checks_with(f: &(dyn Fn(f64, f64) -> f64 + Sync), grid_step: f64) -> Result<LemmaReport> {
    if !(grid_step > 0.0 && grid_step <= 0.1) {
        return Err(VeinError::Domain(format!("grid step must lie in (0, 0.1], got {grid_step}")));
    }
    let two_pi = 2.0 * PI;
    let mut items = Vec::with_capacity(4);

    // (i) decreasing in y on [3, 30] for x₀ ∈ {0.5, 1.0, …, 6.0}
    let mut t = Tracker::new();
    for k in 1..=12 {
        let x0 = 0.5 * k as f64;
        for y in grid(3.0, 30.0, grid_step) {
            let dy = (f(x0, y + DERIV_STEP) - f(x0, y - DERIV_STEP)) / (2.0 * DERIV_STEP);
            // track −∂f/∂y so the minimum is the least favorable point
            t.low(-dy, (x0, y));
        }
    }
    let mut item = t.finish("i", "f(x0, y) is decreasing in y on [3, 30]", |w| w > 0.0);
    item.worst_value = -item.worst_value;
    items.push(item);

    let xs = grid(grid_step, two_pi - grid_step, grid_step);
    let y0s = grid(3.0, 30.0, 0.5);

    // (ii) increasing in x on (0, 2π)
    let mut t = Tracker::new();
    for &y0 in &y0s {
        for &x in &xs {
            let dx = (f(x + DERIV_STEP, y0) - f(x - DERIV_STEP, y0)) / (2.0 * DERIV_STEP);
            t.low(dx, (x, y0));
        }
    }
    items.push(t.finish("ii", "f(x, y0) is increasing in x on (0, 2π)", |w| w > 0.0));

    // (iii) convex in x on (0, 2π)
    let mut t = Tracker::new();
    for &y0 in &y0s {
        for &x in &xs {
            if x - grid_step <= 0.0 || x + grid_step >= two_pi {
                continue;
            }
            let second = f(x + grid_step, y0) - 2.0 * f(x, y0) + f(x - grid_step, y0);
            t.low(second, (x, y0));
        }
    }
    items.push(t.finish("iii", "f(x, y0) is convex in x on (0, 2π)", |w| w >= SECOND_DIFF_FLOOR));

    // (iv) jointly convex on [0.4, 5.5] × [3, 9]
    let (worst, at, count) = hessian_floor(f, (SMALL_AREA_THRESHOLD, AREA_CEILING), (3.0, 9.0), grid_step);
    let t = Tracker { worst, at, count };
    items.push(t.finish(
        "iv",
        "f is convex on [0.4, 5.5] × [3, 9] (min Hessian eigenvalue)",
        |w| w >= HESSIAN_EIG_FLOOR,
    ));

    Ok(LemmaReport { grid_step, items })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn f_examples() {
        assert_abs_diff_eq!(f_spherical(1e-9, 3.0).unwrap(), 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(f_spherical(4.0 * PI / 6.0, 4.0).unwrap(), 3f64.sqrt(), epsilon = 1e-12);
        let v = 7.0 * f_spherical(4.0 * PI / 7.0, 30.0 / 7.0).unwrap();
        assert_abs_diff_eq!(v, 10.9168, epsilon = 5e-4);
        assert!(f_spherical(0.0, 3.0).is_err());
        assert!(f_spherical(1.0, 2.5).is_err());
        assert!(f_spherical(2.0 * PI, 3.0).is_err());
    }

    #[test]
    fn g_examples() {
        assert_abs_diff_eq!(g_case_c(0, 6).unwrap(), 6.0 * 3f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(g_case_c(5, 7).unwrap(), 18.3370, epsilon = 5e-4);
        assert_abs_diff_eq!(g_case_c(3, 5).unwrap(), 28.1356, epsilon = 5e-4);
        assert!(g_case_c(4, 5).is_err());
        assert!(g_case_c(0, 8).is_err());
        assert!(g_case_c(0, 4).is_err());
        assert_eq!(g_domain().len(), 15);
    }

    #[test]
    fn g_exceeds_ball_value_except_excluded_case() {
        let target = 6.0 * 3f64.sqrt();
        for (m, n) in g_domain() {
            let g = g_case_c(m, n).unwrap();
            if (m, n) == (0, 5) {
                assert!(g < target);
            } else {
                assert!(g >= target - 1e-12, "g({m},{n}) = {g}");
            }
        }
    }

    #[test]
    fn h_examples() {
        let h0 = 2.0 + 3.0 * (2.0 + 3f64.sqrt());
        assert_abs_diff_eq!(h_case_n5(0.0).unwrap(), h0, epsilon = 1e-12);
        assert!(h_case_n5(5.6).is_err());
        assert!(h_case_n5(-0.1).is_err());
        let m = h_min();
        assert_abs_diff_eq!(m.value, 10.5618, epsilon = 5e-4);
        assert!(m.value > 6.0 * 3f64.sqrt());
        // no grid point undercuts the refined minimum
        for i in 0..=55_000 {
            assert!(h_raw(i as f64 * 1e-4) >= m.value - 1e-12);
        }
    }

    #[test]
    fn simple_bounds() {
        assert_abs_diff_eq!(jensen2d_bound(4).unwrap(), 4.0 * 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(jensen2d_bound(3).unwrap(), 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(jensen2d_bound(6).unwrap(), 4.0 * 3f64.sqrt(), epsilon = 1e-12);
        assert!(jensen2d_bound(2).is_err());
        assert_eq!(simplex_bound(3).unwrap(), 12.0);
        assert_eq!(simplex_bound(2).unwrap(), 6.0);
        assert_eq!(simplex_bound(4).unwrap(), 20.0);
        assert_abs_diff_eq!(cap_area_bound(8).unwrap(), 64.0 / 6.0, epsilon = 1e-12);
        assert_eq!(cap_area_bound(4).unwrap(), 8.0);
        assert_abs_diff_eq!(cap_area_bound(100).unwrap(), 10000.0 / 98.0, epsilon = 1e-12);
    }

    #[test]
    fn jensen_minimum_at_square() {
        let best = (3..=10_000).map(|n| jensen2d_bound(n).unwrap()).fold(f64::INFINITY, f64::min);
        assert_eq!(best, jensen2d_bound(4).unwrap());
        for n in 4..10_000 {
            assert!(jensen2d_bound(n + 1).unwrap() > jensen2d_bound(n).unwrap());
        }
    }

    #[test]
    fn caps() {
        let c = cap_from_vertex(&[8.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(c.radius, 1.4454, epsilon = 1e-4);
        let c = cap_from_vertex(&[0.0, 2.0, 0.0]).unwrap();
        assert_abs_diff_eq!(c.radius, PI / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.area(), PI, epsilon = 1e-12);
        let c = cap_from_vertex(&[0.0, 0.0, 1.0 + 1e-12]).unwrap();
        assert!(c.radius < 1e-5 && c.area() < 1e-10);
        assert!(cap_from_vertex(&[1.0, 0.0, 0.0]).is_err());
        assert!(cap_from_vertex(&[0.5, 0.0, 0.0]).is_err());
    }

    #[test]
    fn cap_covering() {
        let s3 = 3f64.sqrt();
        let octa: Vec<SphericalCap> = (0..3)
            .flat_map(|i| {
                let mut p = vec![0.0; 3];
                p[i] = s3;
                let mut q = p.clone();
                q[i] = -s3;
                [cap_from_vertex(&p).unwrap(), cap_from_vertex(&q).unwrap()]
            })
            .collect();
        assert!(cap_covering_check(&octa, 5000).unwrap().covered);

        let single = vec![SphericalCap {
            center: vec![0.0, 0.0, 1.0],
            radius: 1.0,
        }];
        let r = cap_covering_check(&single, 2000).unwrap();
        assert!(!r.covered);
        assert!(r.worst_point[2] < -0.99);

        let c = 3.0 / s3;
        let tet: Vec<SphericalCap> = [[c, c, c], [c, -c, -c], [-c, c, -c], [-c, -c, c]]
            .iter()
            .map(|p| cap_from_vertex(p).unwrap())
            .collect();
        assert!(cap_covering_check(&tet, 5000).unwrap().covered);
        assert!(cap_covering_check(&tet, 999).is_err());
    }

    #[test]
    fn euler_examples() {
        assert!(euler_edge_bound(&[3, 3, 3, 3]).unwrap());
        assert!(euler_edge_bound(&[3, 3, 4, 4, 4]).unwrap());
        assert!(!euler_edge_bound(&[5, 5, 5, 5, 5]).unwrap());
        assert!(euler_edge_bound(&[3, 3, 3]).is_err());
        assert!(euler_edge_bound(&[2, 3, 3, 3]).is_err());
    }

    #[test]
    fn lemma_items_i_to_iii_hold() {
        let r = lemma_func_checks(0.05).unwrap();
        for item in &r.items[..3] {
            assert!(item.passed, "{item:?}");
        }
    }

    #[test]
    fn lemma_item_iv_fails_near_the_small_area_corner() {
        // The exact Hessian at (0.4, 3) has eigenvalues -0.13394 and 0.47208,
        // so joint convexity does not hold on the full rectangle.
        let r = lemma_func_checks(0.05).unwrap();
        let iv = &r.items[3];
        assert!(!iv.passed);
        assert_abs_diff_eq!(iv.worst_value, -0.133942, epsilon = 1e-4);
        assert_abs_diff_eq!(iv.worst_point.0, 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(iv.worst_point.1, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn convexity_holds_away_from_the_corner() {
        let (worst, _, _) = hessian_floor(&f_raw, (1.2, AREA_CEILING), (3.0, 9.0), 0.05);
        assert!(worst >= HESSIAN_EIG_FLOOR, "{worst}");
        let (worst, _, _) = hessian_floor(&f_raw, (SMALL_AREA_THRESHOLD, AREA_CEILING), (5.6, 9.0), 0.05);
        assert!(worst >= HESSIAN_EIG_FLOOR, "{worst}");
    }

    #[test]
    fn perturbed_function_fails_convexity() {
        let bumped = |x: f64, y: f64| f_raw(x, y) - 0.5 * ((x - 3.0) * (y - 6.0)).sin().powi(2);
        let r = lemma_func_checks_with(&bumped, 0.05).unwrap();
        assert!(!r.items[3].passed);
    }

    #[test]
    fn grid_step_domain() {
        assert!(lemma_func_checks(0.0).is_err());
        assert!(lemma_func_checks(0.2).is_err());
    }
}
