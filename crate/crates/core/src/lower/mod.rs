//! Lower-bound devices for the vertex index, packaged as certificates.

pub mod spherical;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::body::{contains, polar_polytope, polytope_volume, Body, BodySpec, Polytope, ALGEBRAIC_TOL};
use crate::error::{Result, VeinError};
use crate::geom::{self, norm, symmetrize, Point};
use crate::mvee::ball_volume;

pub use spherical::{
    cap_area_bound, cap_covering_check, cap_from_vertex, euler_edge_bound, f_spherical, g_case_c, g_domain,
    h_case_n5, h_min, jensen2d_bound, lemma_func_checks, lemma_func_checks_with, simplex_bound, CoverageReport,
    LemmaItem, LemmaReport, Minimum, SphericalCap,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Jensen2d,
    Simplex,
    CapArea,
    SphericalCaseC,
    OctahedronCoordinate,
    OvrBallPajor,
    Transfer,
    /// Explicit enclosing point set.
    Witness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lower,
    Upper,
}

/// A bound on the vertex index together with the data that establishes it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub kind: BoundKind,
    pub side: Side,
    pub value: f64,
    pub witness: serde_json::Value,
    pub checked: bool,
}

impl BoundCertificate {
    pub fn lower(kind: BoundKind, value: f64, witness: serde_json::Value, checked: bool) -> Self {
        BoundCertificate {
            kind,
            side: Side::Lower,
            value,
            witness,
            checked,
        }
    }

    pub fn upper(kind: BoundKind, value: f64, witness: serde_json::Value, checked: bool) -> Self {
        BoundCertificate {
            kind,
            side: Side::Upper,
            value,
            witness,
            checked,
        }
    }
}

/// Lower bound `4√2` for the disc: the minimum of `n/cos(π/n)` over `n ≥ 3`.
pub fn disc_certificate() -> BoundCertificate {
    let at_four = jensen2d_bound(4).unwrap();
    // increasing from n = 4 on and n = 3 gives 6, so a finite scan is a full check
    let scan_min = (3..=10_000)
        .map(|n| jensen2d_bound(n).unwrap())
        .fold(f64::INFINITY, f64::min);
    let increasing = (4..10_000).all(|n| jensen2d_bound(n + 1).unwrap() > jensen2d_bound(n).unwrap());
    BoundCertificate::lower(
        BoundKind::Jensen2d,
        at_four,
        json!({ "n_min": 4, "scan_max_n": 10_000, "scan_min": scan_min }),
        scan_min == at_four && increasing,
    )
}

/// Lower bound for the three-dimensional ball as the minimum over the case
/// analysis: simplices (n = 4), caps (n ≥ 8), and the `g`/`h` bounds for
/// five to seven vertices.
pub fn ball3_certificate() -> BoundCertificate {
    let simplex = simplex_bound(3).unwrap();
    // n²/(n−2) is increasing for n ≥ 4, so n = 8 is the minimum of the cap case
    let caps = cap_area_bound(8).unwrap();
    let caps_increasing = (8..1000).all(|n| cap_area_bound(n + 1).unwrap() > cap_area_bound(n).unwrap());
    let g_values: Vec<(usize, usize, f64)> = spherical::g_domain()
        .into_iter()
        .filter(|&(_, n)| n >= 6)
        .map(|(m, n)| (m, n, g_case_c(m, n).unwrap()))
        .collect();
    let g_min = g_values.iter().map(|v| v.2).fold(f64::INFINITY, f64::min);
    let h = h_min();
    let double_tetrahedron = euler_edge_bound(&[3, 3, 4, 4, 4]).unwrap();
    let value = simplex.min(caps).min(g_min).min(h.value);
    BoundCertificate::lower(
        BoundKind::SphericalCaseC,
        value,
        json!({
            "simplex_n4": simplex,
            "cap_area_n8": caps,
            "g_min_n6_n7": g_min,
            "g_values": g_values,
            "h_min": h.value,
            "h_argmin": h.argmin,
            "double_tetrahedron_euler": double_tetrahedron,
        }),
        caps_increasing && double_tetrahedron && value.is_finite(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OctahedronSums {
    /// `Σ ‖pᵢ‖₁`.
    pub l1_sum: f64,
    /// `Σ_k (max_i p_ik − min_i p_ik)`.
    pub coordinate_spread: f64,
}

/// `S = Σ‖pᵢ‖₁` and `T = Σ_k (maxᵢ p_ik − minᵢ p_ik)`.
pub fn octahedron_sums(points: &[Point]) -> OctahedronSums {
    let d = points.first().map_or(0, |p| p.len());
    let l1_sum = points.iter().map(|p| p.iter().map(|v| v.abs()).sum::<f64>()).sum();
    let coordinate_spread = (0..d)
        .map(|k| {
            let hi = points.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
            let lo = points.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
            hi - lo
        })
        .sum();
    OctahedronSums {
        l1_sum,
        coordinate_spread,
    }
}

/// Coordinate certificate `Σ‖pᵢ‖₁ ≥ Σ_k(max − min) ≥ 2d` for a point set
/// whose hull contains the cross-polytope.
///
/// Containment is verified exactly in d ≤ 3; above that the caller must
/// assert it through `containment_asserted`.
pub fn octahedron_certificate(points: &[Point], containment_asserted: bool) -> Result<BoundCertificate> {
    let d = points.first().map(|p| p.len()).ok_or(VeinError::ContainmentUnverified)?;
    if d < 2 {
        return Err(VeinError::Domain("dimension must be at least 2".into()));
    }
    let verified = if d <= 3 {
        let body = Body::new(BodySpec::cross_polytope(d))?;
        let report = contains(&Polytope::new(points.to_vec()), &body, ALGEBRAIC_TOL, 0)?;
        if !report.contained {
            return Err(VeinError::ContainmentUnverified);
        }
        true
    } else if containment_asserted {
        false
    } else {
        return Err(VeinError::ContainmentUnverified);
    };
    let sums = octahedron_sums(points);
    let scale = 1.0 + sums.l1_sum;
    if sums.l1_sum < sums.coordinate_spread - ALGEBRAIC_TOL * scale {
        return Err(VeinError::InequalityViolated(format!(
            "l1 sum {} below coordinate spread {}",
            sums.l1_sum, sums.coordinate_spread
        )));
    }
    let two_d = 2.0 * d as f64;
    if sums.coordinate_spread < two_d - ALGEBRAIC_TOL * scale {
        return Err(VeinError::InequalityViolated(format!(
            "coordinate spread {} below 2d = {two_d}",
            sums.coordinate_spread
        )));
    }
    Ok(BoundCertificate::lower(
        BoundKind::OctahedronCoordinate,
        two_d,
        json!({
            "dim": d,
            "n_points": points.len(),
            "l1_sum": sums.l1_sum,
            "coordinate_spread": sums.coordinate_spread,
            "containment": if verified { "exact_facet" } else { "caller_asserted" },
        }),
        true,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallPajorReport {
    pub dim: usize,
    /// `Σ |pᵢ|` over the given points.
    pub euclidean_sum: f64,
    /// `vol(L)` for `L = abs conv{pᵢ}`.
    pub volume: f64,
    pub polar_volume: f64,
    /// `(d / Σ|pᵢ|)^d`.
    pub ball_pajor_bound: f64,
    pub santalo_product: f64,
    /// `vol(B₂^d)²`.
    pub santalo_bound: f64,
    pub ball_pajor_holds: bool,
    pub santalo_holds: bool,
}

impl BallPajorReport {
    pub fn passed(&self) -> bool {
        self.ball_pajor_holds && self.santalo_holds
    }
}

/// Exact check of `vol(L°) ≥ (d/Σ|pᵢ|)^d` and `vol(L)·vol(L°) ≤ vol(B₂^d)²`
/// for `L = abs conv{pᵢ}` in d = 2, 3.
pub fn ball_pajor_check(points: &[Point]) -> Result<BallPajorReport> {
    let d = points.first().map(|p| p.len()).ok_or(VeinError::RankDeficient { dim: 0 })?;
    if !(2..=3).contains(&d) {
        return Err(VeinError::Domain(format!("exact volume checks need d ∈ {{2, 3}}, got {d}")));
    }
    if geom::rank(points, d) < d {
        return Err(VeinError::RankDeficient { dim: d });
    }
    let sym = symmetrize(points);
    let volume = polytope_volume(&sym)?;
    let polar = polar_polytope(&Polytope::new(sym))?;
    let polar_volume = polytope_volume(&polar.vertices)?;
    let euclidean_sum: f64 = points.iter().map(|p| norm(p)).sum();
    let ball_pajor_bound = (d as f64 / euclidean_sum).powi(d as i32);
    let santalo_product = volume * polar_volume;
    let santalo_bound = ball_volume(d).powi(2);
    let rel = 1e-9;
    Ok(BallPajorReport {
        dim: d,
        euclidean_sum,
        volume,
        polar_volume,
        ball_pajor_bound,
        santalo_product,
        santalo_bound,
        ball_pajor_holds: polar_volume >= ball_pajor_bound * (1.0 - rel),
        santalo_holds: santalo_product <= santalo_bound * (1.0 + rel),
    })
}

/// `d / (vol(B₂^d)^{1/d} · ovr)`, with the weaker `d^{3/2} / (√(2πe) · ovr)`
/// recorded in the witness.
pub fn ovr_lower_bound(d: usize, ovr_value: f64) -> Result<BoundCertificate> {
    if d < 2 {
        return Err(VeinError::Domain(format!("dimension must be at least 2, got {d}")));
    }
    if !(ovr_value >= 1.0 - 1e-6) || !ovr_value.is_finite() {
        return Err(VeinError::Domain(format!("outer volume ratio must be ≥ 1, got {ovr_value}")));
    }
    let df = d as f64;
    let volume_form = df / (ball_volume(d).powf(1.0 / df) * ovr_value);
    let simplified = df.powf(1.5) / ((2.0 * std::f64::consts::PI * std::f64::consts::E).sqrt() * ovr_value);
    Ok(BoundCertificate::lower(
        BoundKind::OvrBallPajor,
        volume_form.max(simplified),
        json!({
            "dim": d,
            "ovr": ovr_value,
            "volume_form": volume_form,
            "simplified_form": simplified,
        }),
        volume_form >= simplified,
    ))
}
