//! Minimal-volume enclosing ellipsoids, volumes and the outer volume ratio.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::body::{Body, BodySpec, EllipsoidShape, Exponent};
use crate::error::{Result, VeinError};
use crate::geom::{self, symmetrize, Point};

pub const DEFAULT_MVEE_EPS: f64 = 1e-7;
pub const MVEE_MAX_ITERS: usize = 100_000;
pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;
pub const DEFAULT_MC_SEED: u64 = 0x0ba1_1f00;
/// Largest relative standard error accepted from a Monte Carlo volume.
pub const MC_MAX_REL_SE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MveeResult {
    pub shape: EllipsoidShape,
    pub iterations: usize,
    pub duality_gap: f64,
}

/// Minimal-volume origin-centered ellipsoid containing `±points`.
///
/// Multiplicative-weights ascent (Khachiyan) with Todd–Yildirim away steps
/// on the symmetric formulation. The returned shape is rescaled so that
/// every point satisfies `xᵀA⁻¹x ≤ 1`; its volume is within `(1+eps)^{d/2}`
/// of optimal.
pub fn mvee_of_points(points: &[Point], eps: f64) -> Result<MveeResult> {
    let d = points.first().map(|p| p.len()).ok_or(VeinError::RankDeficient { dim: 0 })?;
    if !(eps > 0.0) {
        return Err(VeinError::Domain(format!("mvee tolerance must be positive, got {eps}")));
    }
    if points.iter().any(|p| p.len() != d) {
        return Err(VeinError::InvalidBody("points differ in length".into()));
    }
    if points.iter().any(|p| !geom::all_finite(p)) {
        return Err(VeinError::NonFinite);
    }
    let pts: Vec<DVector<f64>> = points
        .iter()
        .filter(|p| p.iter().any(|&v| v != 0.0))
        .map(|p| DVector::from_column_slice(p))
        .collect();
    if geom::rank(points, d) < d {
        return Err(VeinError::RankDeficient { dim: d });
    }
    let n = pts.len();
    let df = d as f64;
    let mut weights = vec![1.0 / n as f64; n];
    let mut iterations = 0;
    let mut kappa = vec![0.0; n];
    loop {
        let mut m = DMatrix::<f64>::zeros(d, d);
        for (w, x) in weights.iter().zip(&pts) {
            m += *w * x * x.transpose();
        }
        let chol = m.clone().cholesky().ok_or(VeinError::RankDeficient { dim: d })?;
        for (k, x) in kappa.iter_mut().zip(&pts) {
            *k = chol.solve(x).dot(x);
        }
        let (jmax, kmax) = argmax(&kappa);
        let (jmin, kmin) = kappa
            .iter()
            .enumerate()
            .filter(|(i, _)| weights[*i] > 0.0)
            .fold((0, f64::INFINITY), |acc, (i, &k)| if k < acc.1 { (i, k) } else { acc });

        if kmax <= df * (1.0 + eps) || iterations >= MVEE_MAX_ITERS {
            let shape = EllipsoidShape::from_matrix(&(m * kmax))?;
            return Ok(MveeResult {
                shape,
                iterations,
                duality_gap: (kmax / df - 1.0).max(0.0),
            });
        }
        iterations += 1;

        let toward = kmax / df - 1.0;
        let away = 1.0 - kmin / df;
        if toward >= away {
            let tau = (kmax - df) / (df * (kmax - 1.0));
            for w in weights.iter_mut() {
                *w *= 1.0 - tau;
            }
            weights[jmax] += tau;
        } else {
            let limit = -weights[jmin] / (1.0 - weights[jmin]);
            let tau = if kmin > 1.0 {
                ((kmin - df) / (df * (kmin - 1.0))).max(limit)
            } else {
                limit
            };
            for w in weights.iter_mut() {
                *w *= 1.0 - tau;
            }
            weights[jmin] += tau;
            if weights[jmin] < 1e-300 {
                weights[jmin] = 0.0;
            }
        }
    }
}

fn argmax(v: &[f64]) -> (usize, f64) {
    v.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc })
}

/// `vol(B₂^d) = π^{d/2} / Γ(1 + d/2)`, via the exact two-step recursion.
pub fn ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / d as f64 * ball_volume(d - 2),
    }
}

/// `vol(B_p^d) = 2^d Γ(1+1/p)^d / Γ(1+d/p)`.
pub fn lp_ball_volume(p: Exponent, d: usize) -> f64 {
    if p.is_infinite() {
        return 2f64.powi(d as i32);
    }
    let r = p.reciprocal();
    let df = d as f64;
    (df * (2f64.ln() + ln_gamma(1.0 + r)) - ln_gamma(1.0 + df * r)).exp()
}

/// Radius of the minimal-volume ellipsoid (a Euclidean ball) of `B_p^d`.
pub fn lp_ball_mvee_radius(p: Exponent, d: usize) -> f64 {
    if p.0 <= 2.0 {
        1.0
    } else {
        (d as f64).powf(0.5 - p.reciprocal())
    }
}

/// Minimal-volume enclosing ellipsoid of a body.
pub fn mvee_of_body(body: &BodySpec) -> Result<EllipsoidShape> {
    match body {
        BodySpec::LpBall { p, dim } => {
            let r = lp_ball_mvee_radius(*p, *dim);
            EllipsoidShape::from_matrix(&(DMatrix::identity(*dim, *dim) * (r * r)))
        }
        BodySpec::Ellipsoid { matrix } => EllipsoidShape::new(matrix.clone()),
        BodySpec::SymPolytope { generators } => Ok(mvee_of_points(generators, DEFAULT_MVEE_EPS)?.shape),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeOptions {
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for VolumeOptions {
    fn default() -> Self {
        VolumeOptions {
            mc_samples: DEFAULT_MC_SAMPLES,
            seed: DEFAULT_MC_SEED,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    /// Standard error of a Monte Carlo estimate; `None` when exact.
    pub std_error: Option<f64>,
}

/// Volume of a body: closed forms for balls and ellipsoids, exact hulls in
/// d ≤ 3, rejection sampling inside the enclosing ellipsoid otherwise.
pub fn body_volume(body: &BodySpec, opts: &VolumeOptions) -> Result<VolumeEstimate> {
    let exact = |value| Ok(VolumeEstimate { value, std_error: None });
    match body {
        BodySpec::LpBall { p, dim } => exact(lp_ball_volume(*p, *dim)),
        BodySpec::Ellipsoid { matrix } => exact(EllipsoidShape::new(matrix.clone())?.volume()),
        BodySpec::SymPolytope { generators } => {
            let d = body.dim();
            if d <= 3 {
                body.validate()?;
                exact(crate::body::polytope_volume(&symmetrize(generators))?)
            } else {
                monte_carlo_volume(body, &mvee_of_body(body)?, opts)
            }
        }
    }
}

/// Rejection-sampling volume estimate of `body` inside `envelope ⊇ body`.
pub fn monte_carlo_volume(body: &BodySpec, envelope: &EllipsoidShape, opts: &VolumeOptions) -> Result<VolumeEstimate> {
    let b = Body::new(body.clone())?;
    let d = b.dim();
    let factor = envelope.factor()?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = opts.mc_samples.max(1);
    let mut hits = 0usize;
    for _ in 0..n {
        let dir = crate::sphere::random_direction(d, &mut rng);
        let r: f64 = rng.gen::<f64>().powf(1.0 / d as f64);
        let y = geom::apply(&factor, &geom::scaled(&dir, r));
        if b.gauge(&y)? <= 1.0 {
            hits += 1;
        }
    }
    let frac = hits as f64 / n as f64;
    let ev = envelope.volume();
    let se = ev * (frac * (1.0 - frac) / n as f64).sqrt();
    let value = ev * frac;
    if hits == 0 || se / value > MC_MAX_REL_SE {
        return Err(VeinError::MonteCarloUnreliable {
            rel_se: if hits == 0 { f64::INFINITY } else { se / value },
        });
    }
    Ok(VolumeEstimate {
        value,
        std_error: Some(se),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OvrEstimate {
    pub value: f64,
    /// Standard error propagated from a Monte Carlo denominator.
    pub std_error: Option<f64>,
}

/// Outer volume ratio `(vol(E)/vol(K))^{1/d}` with `E` the minimal-volume
/// enclosing ellipsoid.
pub fn ovr(body: &BodySpec) -> Result<f64> {
    Ok(ovr_with(body, &VolumeOptions::default())?.value)
}

pub fn ovr_with(body: &BodySpec, opts: &VolumeOptions) -> Result<OvrEstimate> {
    body.validate()?;
    let d = body.dim() as f64;
    let (num, den) = match body {
        BodySpec::LpBall { p, dim } => {
            let r = lp_ball_mvee_radius(*p, *dim);
            // ratio assembled in log space to survive large d
            let log_ratio = (ball_volume(*dim).ln() + d * r.ln()) - lp_ball_volume(*p, *dim).ln();
            return Ok(OvrEstimate {
                value: (log_ratio / d).exp(),
                std_error: None,
            });
        }
        BodySpec::Ellipsoid { .. } => {
            return Ok(OvrEstimate {
                value: 1.0,
                std_error: None,
            })
        }
        BodySpec::SymPolytope { .. } => (mvee_of_body(body)?.volume(), body_volume(body, opts)?),
    };
    let value = (num / den.value).powf(1.0 / d);
    // d(r^{1/d})/dr = r^{1/d}/(d r); relative error of the ratio equals that of the denominator
    let std_error = den.std_error.map(|se| value * se / den.value / d);
    Ok(OvrEstimate { value, std_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sign_vectors(d: usize) -> Vec<Point> {
        (0..1usize << d)
            .map(|s| (0..d).map(|k| if s >> k & 1 == 1 { 1.0 } else { -1.0 }).collect())
            .collect()
    }

    fn rel_close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
        (a - b).amax() <= tol * b.amax()
    }

    #[test]
    fn ball_volumes() {
        assert!((ball_volume(2) - PI).abs() < 1e-15);
        assert!((ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
        for d in 1..40 {
            let gamma_form = (d as f64 / 2.0 * PI.ln() - ln_gamma(1.0 + d as f64 / 2.0)).exp();
            assert!((ball_volume(d) - gamma_form).abs() < 1e-10 * gamma_form);
            let bound = (2.0 * PI * std::f64::consts::E / d as f64).powf(d as f64 / 2.0);
            assert!(ball_volume(d) <= bound);
        }
    }

    #[test]
    fn lp_volumes_match_known_cases() {
        assert!((lp_ball_volume(Exponent::ONE, 3) - 8.0 / 6.0).abs() < 1e-12);
        assert!((lp_ball_volume(Exponent::TWO, 3) - ball_volume(3)).abs() < 1e-12);
        assert_eq!(lp_ball_volume(Exponent::INFINITY, 4), 16.0);
    }

    #[test]
    fn mvee_of_cube_is_scaled_ball() {
        for d in 2..=5 {
            let r = mvee_of_points(&sign_vectors(d), DEFAULT_MVEE_EPS).unwrap();
            let expect = DMatrix::identity(d, d) * d as f64;
            assert!(rel_close(&r.shape.to_matrix(), &expect, 1e-6));
        }
    }

    #[test]
    fn mvee_of_cross_polytope_vertices_is_unit_ball() {
        let pts: Vec<Point> = (0..3).map(|i| geom::unit(i, 3)).collect();
        let r = mvee_of_points(&pts, DEFAULT_MVEE_EPS).unwrap();
        assert!(rel_close(&r.shape.to_matrix(), &DMatrix::identity(3, 3), 1e-6));
    }

    #[test]
    fn mvee_axis_aligned_case() {
        let r = mvee_of_points(&[vec![2.0, 0.0], vec![0.0, 1.0]], DEFAULT_MVEE_EPS).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 1.0]);
        assert!(rel_close(&r.shape.to_matrix(), &expect, 1e-6));
    }

    #[test]
    fn mvee_rank_deficient() {
        let err = mvee_of_points(&[vec![1.0, 1.0], vec![2.0, 2.0]], 1e-7).unwrap_err();
        assert_eq!(err, VeinError::RankDeficient { dim: 2 });
    }

    #[test]
    fn mvee_contains_inputs_and_meets_optimality() {
        let pts = vec![
            vec![1.0, 0.3, -0.2],
            vec![0.2, 1.5, 0.1],
            vec![-0.4, 0.3, 0.9],
            vec![0.8, -0.8, 0.5],
            vec![0.1, 0.1, 0.1],
        ];
        let r = mvee_of_points(&pts, 1e-7).unwrap();
        let shape = &r.shape;
        let mut worst = 0.0f64;
        for p in &pts {
            worst = worst.max(shape.gauge(p).unwrap());
        }
        assert!(worst <= 1.0 + 1e-12);
        assert!(r.duality_gap <= 1e-7);
    }

    #[test]
    fn ovr_examples() {
        assert!((ovr(&BodySpec::euclidean_ball(3)).unwrap() - 1.0).abs() < 1e-12);
        assert!((ovr(&BodySpec::cube(2)).unwrap() - (PI / 2.0).sqrt()).abs() < 1e-12);
        let bound = (2.0 * PI * std::f64::consts::E).sqrt() / 2.0;
        for d in 2..=6 {
            assert!(ovr(&BodySpec::cube(d)).unwrap() <= bound);
        }
        // the polytope route agrees with the closed form for the square
        let square = BodySpec::SymPolytope {
            generators: vec![vec![1.0, 1.0], vec![1.0, -1.0]],
        };
        assert!((ovr(&square).unwrap() - (PI / 2.0).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn monte_carlo_volume_of_cross_polytope() {
        let spec = BodySpec::SymPolytope {
            generators: (0..4).map(|i| geom::unit(i, 4)).collect(),
        };
        let opts = VolumeOptions {
            mc_samples: 20_000,
            seed: 7,
        };
        let est = body_volume(&spec, &opts).unwrap();
        let exact = 16.0 / 24.0;
        let se = est.std_error.unwrap();
        assert!((est.value - exact).abs() < 5.0 * se, "{} vs {exact}", est.value);
    }

    #[test]
    fn monte_carlo_rejects_tiny_samples() {
        let spec = BodySpec::SymPolytope {
            generators: (0..4).map(|i| geom::unit(i, 4)).collect(),
        };
        let opts = VolumeOptions { mc_samples: 20, seed: 1 };
        assert!(matches!(
            body_volume(&spec, &opts),
            Err(VeinError::MonteCarloUnreliable { .. })
        ));
    }
}
