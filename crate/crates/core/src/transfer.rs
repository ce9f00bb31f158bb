//! Banach–Mazur transfer: `vein(K) ≤ d(K, L) · vein(L)`, distance upper
//! bounds to the Euclidean ball via the enclosing ellipsoid, and the
//! Sylvester–Hadamard witness relating the cross-polytope and the cube.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::body::{Body, BodySpec, EllipsoidShape};
use crate::error::{Result, VeinError};
use crate::geom::Point;
use crate::lower::{BoundCertificate, BoundKind};
use crate::mvee::mvee_of_body;

const SAMPLED_SIGN_VECTORS: usize = 10_000;
const EXHAUSTIVE_MAX_DIM: usize = 16;
const HADAMARD_SEED: u64 = 0x4ada_3a4d;
/// Sampled directions for distance bounds of polytopes above d = 3.
const DISTANCE_SAMPLES: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerificationMode {
    Exhaustive,
    ExactFacet,
    Analytic,
    Sampled,
}

/// `T·K ⊆ L ⊆ ratio · T·K`, certified by support-function comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceWitness {
    /// Row-major operator.
    pub operator: Vec<Vec<f64>>,
    pub ratio: f64,
    /// Largest dilation actually needed by the checked points.
    pub observed_ratio: f64,
    pub mode: VerificationMode,
    pub meaning: String,
}

/// `vein(K) ≤ d(K, L) · vein(L)`.
pub fn transfer_bound(vein_l_upper: f64, distance: f64) -> Result<f64> {
    if !(vein_l_upper > 0.0 && vein_l_upper.is_finite()) {
        return Err(VeinError::Domain(format!("vertex index bound must be positive, got {vein_l_upper}")));
    }
    if !(distance >= 1.0 && distance.is_finite()) {
        return Err(VeinError::Domain(format!("Banach–Mazur distances are ≥ 1, got {distance}")));
    }
    Ok(vein_l_upper * distance)
}

/// Sylvester construction of the `2^m × 2^m` Hadamard matrix.
pub fn sylvester_hadamard(m: u32) -> Vec<Vec<i64>> {
    let mut h = vec![vec![1i64]];
    for _ in 0..m {
        let n = h.len();
        let mut next = vec![vec![0i64; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = h[i][j];
                next[i][j + n] = h[i][j];
                next[i + n][j] = h[i][j];
                next[i + n][j + n] = -h[i][j];
            }
        }
        h = next;
    }
    h
}

fn l1_of_transpose_times(h: &[Vec<i64>], x: &[i64]) -> i64 {
    let d = h.len();
    (0..d)
        .map(|j| (0..d).map(|i| h[i][j] * x[i]).sum::<i64>().abs())
        .sum()
}

/// Hadamard witness for `d(B₁^d, B∞^d) ≤ √d` with `d = 2^m`.
///
/// `H·B₁^d ⊆ B∞^d` holds because every column of `H` has entries `±1`.
/// `B∞^d ⊆ √d·H·B₁^d` reduces to `‖Hᵀx‖₁ ≤ d√d` for sign vectors `x`, which
/// is checked in integer arithmetic (squared) over all `2^d` sign vectors
/// for d ≤ 16, and over random sign vectors together with `HᵀH = d·Id` for
/// larger d.
pub fn hadamard_witness(m: u32) -> Result<DistanceWitness> {
    if !(1..=6).contains(&m) {
        return Err(VeinError::Domain(format!("Hadamard order 2^m needs 1 ≤ m ≤ 6, got {m}")));
    }
    let h = sylvester_hadamard(m);
    let d = h.len();
    let di = d as i64;
    let bound_sq = di * di * di;

    for i in 0..d {
        for j in 0..d {
            let g: i64 = (0..d).map(|k| h[k][i] * h[k][j]).sum();
            if g != if i == j { di } else { 0 } {
                return Err(VeinError::InequalityViolated("HᵀH ≠ d·Id".into()));
            }
        }
    }
    if h.iter().flatten().any(|&v| v.abs() != 1) {
        return Err(VeinError::InequalityViolated("column with ∞-norm ≠ 1".into()));
    }

    let mut worst = 0i64;
    let mode = if d <= EXHAUSTIVE_MAX_DIM {
        let mut x = vec![0i64; d];
        for s in 0u64..(1u64 << d) {
            for (k, xk) in x.iter_mut().enumerate() {
                *xk = if s >> k & 1 == 1 { -1 } else { 1 };
            }
            worst = worst.max(l1_of_transpose_times(&h, &x));
        }
        VerificationMode::Exhaustive
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(HADAMARD_SEED);
        let mut x = vec![0i64; d];
        for _ in 0..SAMPLED_SIGN_VECTORS {
            for xk in x.iter_mut() {
                *xk = if rng.gen::<bool>() { 1 } else { -1 };
            }
            worst = worst.max(l1_of_transpose_times(&h, &x));
        }
        VerificationMode::Sampled
    };
    if worst * worst > bound_sq {
        return Err(VeinError::InequalityViolated(format!(
            "‖Hᵀx‖₁ = {worst} exceeds d√d for d = {d}"
        )));
    }
    Ok(DistanceWitness {
        operator: h.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect(),
        ratio: (d as f64).sqrt(),
        observed_ratio: worst as f64 / d as f64,
        mode,
        meaning: format!("H·B_1^{d} ⊆ B_inf^{d} ⊆ sqrt({d})·H·B_1^{d}"),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallDistance {
    /// `λ` with `K ⊆ E ⊆ λK` for the enclosing ellipsoid `E`.
    pub value: f64,
    pub mode: VerificationMode,
    pub ellipsoid: EllipsoidShape,
}

/// Upper bound on `d(K, B₂^d)` from the minimal-volume enclosing ellipsoid.
pub fn dist_to_ball_upper(body: &BodySpec) -> Result<f64> {
    Ok(ball_distance(body)?.value)
}

pub fn ball_distance(body: &BodySpec) -> Result<BallDistance> {
    let b = Body::new(body.clone())?;
    let d = b.dim();
    let df = d as f64;
    let ellipsoid = mvee_of_body(body)?;
    let (value, mode) = match body {
        BodySpec::LpBall { p, .. } => {
            let r = p.reciprocal();
            let v = if p.value() <= 2.0 { df.powf(r - 0.5) } else { df.powf(0.5 - r) };
            (v, VerificationMode::Analytic)
        }
        BodySpec::Ellipsoid { .. } => (1.0, VerificationMode::Analytic),
        BodySpec::SymPolytope { .. } => match b.facets() {
            Some(facets) => (
                facets
                    .iter()
                    .map(|f| ellipsoid.support(&f.normal) / f.offset)
                    .fold(1.0, f64::max),
                VerificationMode::ExactFacet,
            ),
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(HADAMARD_SEED);
                let mut dirs: Vec<Point> = (0..DISTANCE_SAMPLES)
                    .map(|_| crate::sphere::random_direction(d, &mut rng))
                    .collect();
                dirs.extend(b.generator_directions());
                let mut worst = 1.0f64;
                for u in dirs {
                    worst = worst.max(ellipsoid.support(&u) / b.support(&u)?);
                }
                (worst, VerificationMode::Sampled)
            }
        },
    };
    Ok(BallDistance {
        value,
        mode,
        ellipsoid,
    })
}

/// Exact vertex index of the Euclidean ball where it is known.
pub fn known_ball_vein(d: usize) -> Option<f64> {
    match d {
        2 => Some(4.0 * 2f64.sqrt()),
        3 => Some(6.0 * 3f64.sqrt()),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferBounds {
    pub lower: BoundCertificate,
    pub upper: BoundCertificate,
}

/// Planar bounds `max(4√2/λ, 4) ≤ vein(K) ≤ 6`.
pub fn planar_vein_bound(body: &BodySpec) -> Result<TransferBounds> {
    if body.dim() != 2 {
        return Err(VeinError::Domain(format!("planar bound needs d = 2, got {}", body.dim())));
    }
    let dist = ball_distance(body)?;
    let ball = known_ball_vein(2).unwrap();
    let transferred = ball / dist.value;
    let lower = BoundCertificate::lower(
        BoundKind::Transfer,
        transferred.max(4.0),
        json!({
            "route": "vein(B_2^2) / d(K, B_2^2)",
            "ball_vein": ball,
            "distance_upper": dist.value,
            "distance_mode": dist.mode,
            "transferred": transferred,
            "floor": 4.0,
        }),
        dist.value <= 2f64.sqrt() + 1e-6,
    );
    let upper = BoundCertificate::upper(
        BoundKind::Transfer,
        6.0,
        json!({
            "route": "d(K, B_inf^2) · vein(B_inf^2) ≤ (3/2) · 4",
            "constructive": false,
        }),
        false,
    );
    Ok(TransferBounds { lower, upper })
}

/// Transfer bounds from the Euclidean ball in any dimension:
/// lower `vein(B₂^d)/λ` where the ball value is known (d = 2, 3), upper
/// `λ · 2d^{3/2}` realized by the enclosing-ellipsoid cross-polytope.
pub fn ball_transfer_bounds(body: &BodySpec) -> Result<(Option<BoundCertificate>, BoundCertificate)> {
    let d = body.dim();
    let df = d as f64;
    let dist = ball_distance(body)?;
    let lower = known_ball_vein(d).map(|ball| {
        let transferred = ball / dist.value;
        // John's bound d_K ≤ √d gives the floor ball/√d
        let floor = ball / df.sqrt();
        BoundCertificate::lower(
            BoundKind::Transfer,
            transferred.max(floor),
            json!({
                "route": "vein(B_2^d) / d(K, B_2^d)",
                "ball_vein": ball,
                "distance_upper": dist.value,
                "distance_mode": dist.mode,
                "floor": floor,
            }),
            dist.value <= df.sqrt() + 1e-6 && dist.mode != VerificationMode::Sampled,
        )
    });
    let ball_upper = 2.0 * df.powf(1.5);
    let upper = BoundCertificate::upper(
        BoundKind::Transfer,
        transfer_bound(ball_upper, dist.value)?,
        json!({
            "route": "d(K, B_2^d) · 2 d^{3/2}",
            "distance_upper": dist.value,
            "distance_mode": dist.mode,
            "constructive": true,
        }),
        dist.mode != VerificationMode::Sampled,
    );
    Ok((lower, upper))
}

/// The operator form of a Hadamard witness as a matrix.
pub fn witness_matrix(w: &DistanceWitness) -> DMatrix<f64> {
    crate::geom::to_matrix(&w.operator)
}
