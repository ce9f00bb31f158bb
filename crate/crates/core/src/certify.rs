//! Every applicable bound for one body, collected into a sandwich
//! `lower_max ≤ vein(K) ≤ upper_min`.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::body::BodySpec;
use crate::error::Result;
use crate::lower::{ball3_certificate, disc_certificate, octahedron_certificate, ovr_lower_bound};
use crate::lower::{BoundCertificate, BoundKind, Side};
use crate::mvee::{ovr_with, VolumeOptions};
use crate::search::{known_witness, SearchMode, SearchResult};
use crate::transfer::{ball_transfer_bounds, planar_vein_bound};
use crate::geom;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub certificates: Vec<BoundCertificate>,
    pub lower_max: f64,
    /// Minimum over constructive upper bounds.
    pub upper_min: f64,
    pub notices: Vec<String>,
}

/// Upper certificate for an explicit point set.
pub fn witness_certificate(r: &SearchResult) -> BoundCertificate {
    BoundCertificate::upper(
        BoundKind::Witness,
        r.objective,
        json!({
            "source": r.source,
            "points": r.best_points,
            "feasibility_margin": r.feasibility_margin,
            "mode": r.mode,
            "constructive": true,
        }),
        r.mode == SearchMode::Certified,
    )
}

fn is_constructive(c: &BoundCertificate) -> bool {
    c.witness.get("constructive").and_then(|v| v.as_bool()).unwrap_or(false)
}

fn is_euclidean(body: &BodySpec) -> bool {
    match body {
        BodySpec::LpBall { p, .. } => p.value() == 2.0,
        BodySpec::Ellipsoid { .. } => true,
        BodySpec::SymPolytope { .. } => false,
    }
}

/// Runs every lower-bound routine that applies to `body` together with the
/// closed-form witness.
pub fn sandwich(body: &BodySpec, opts: &VolumeOptions) -> Result<Sandwich> {
    body.validate()?;
    let d = body.dim();
    let mut certs = Vec::new();
    let mut notices = Vec::new();

    let ovr = ovr_with(body, opts)?;
    let mut c = ovr_lower_bound(d, ovr.value)?;
    if let Some(se) = ovr.std_error {
        c.witness["ovr_std_error"] = json!(se);
        c.checked = false;
        notices.push("ovr uses a Monte Carlo volume; its certificate is statistical".into());
    }
    certs.push(c);

    match d {
        2 => {
            let planar = planar_vein_bound(body)?;
            certs.push(planar.lower);
            certs.push(planar.upper);
            if is_euclidean(body) {
                certs.push(disc_certificate());
            }
        }
        3 => {
            if is_euclidean(body) {
                certs.push(ball3_certificate());
            }
        }
        _ => notices.push(format!("d = {d}: planar and three-dimensional bounds skipped")),
    }
    let (lower, upper) = ball_transfer_bounds(body)?;
    if d == 3 {
        certs.extend(lower);
    }
    certs.push(upper);

    if let BodySpec::LpBall { p, .. } = body {
        if p.value() == 1.0 {
            let points: Vec<_> = (0..d).map(|i| geom::unit(i, d)).collect();
            certs.push(octahedron_certificate(&geom::symmetrize(&points), true)?);
        }
    }

    let witness = known_witness(body)?;
    if witness.mode == SearchMode::Sampled {
        notices.push(format!("d = {d}: witness containment is sampled, not exact"));
    }
    certs.push(witness_certificate(&witness));

    let lower_max = certs
        .iter()
        .filter(|c| c.side == Side::Lower)
        .map(|c| c.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let upper_min = certs
        .iter()
        .filter(|c| c.side == Side::Upper && is_constructive(c))
        .map(|c| c.value)
        .fold(f64::INFINITY, f64::min);
    Ok(Sandwich {
        certificates: certs,
        lower_max,
        upper_min,
        notices,
    })
}
