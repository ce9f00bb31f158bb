//! Origin-symmetric convex bodies and their oracles.
//!
//! A [`BodySpec`] is the declarative, serializable description; a [`Body`] is
//! the validated form that caches what repeated gauge and support queries
//! need (the Cholesky factor of an ellipsoid, the facets of a symmetric
//! polytope in d ≤ 3).

pub mod hull;
pub mod lp;
pub mod polytope;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, VeinError};
use crate::geom::{self, dot, norm, scaled, symmetrize, Point};

pub use hull::{convex_hull, hull_facets, Facet, Hull};
pub use polytope::{polar_polytope, polytope_volume, Polytope};

/// Absolute tolerance for algebraic identities.
pub const ALGEBRAIC_TOL: f64 = 1e-9;
/// Tolerance for hull and polar round trips.
pub const ROUNDTRIP_TOL: f64 = 1e-7;

const SAMPLED_DIRECTION_SEED: u64 = 0x5eed_d1e5;

/// An ℓp exponent in `[1, ∞]`; infinity is stored as `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// Hölder conjugate with q(1) = ∞ and q(∞) = 1.
    pub fn dual(self) -> Exponent {
        if self.0 == 1.0 {
            Exponent::INFINITY
        } else if self.0.is_infinite() {
            Exponent::ONE
        } else {
            Exponent(self.0 / (self.0 - 1.0))
        }
    }

    /// `1/p`, zero for p = ∞.
    pub fn reciprocal(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Exponent(v)),
            Raw::Text(t) => match t.trim().to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "∞" => Ok(Exponent::INFINITY),
                other => other
                    .parse::<f64>()
                    .map(Exponent)
                    .map_err(|_| serde::de::Error::custom(format!("invalid exponent {t:?}"))),
            },
        }
    }
}

/// ℓp norm of `x`, computed with max-scaling for large exponents.
pub fn lp_norm(x: &[f64], p: Exponent) -> f64 {
    let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    if p.is_infinite() {
        return m;
    }
    match p.0 {
        v if v == 1.0 => x.iter().map(|v| v.abs()).sum(),
        v if v == 2.0 => norm(x),
        v => m * x.iter().map(|c| (c.abs() / m).powf(v)).sum::<f64>().powf(1.0 / v),
    }
}

/// Declarative description of an origin-symmetric convex body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BodySpec {
    /// Unit ball of ℓp^d.
    LpBall { p: Exponent, dim: usize },
    /// `{x : xᵀ A⁻¹ x ≤ 1}`.
    Ellipsoid { matrix: Vec<Vec<f64>> },
    /// Absolute convex hull of the generators.
    SymPolytope { generators: Vec<Point> },
}

impl BodySpec {
    pub fn lp_ball(p: f64, dim: usize) -> Self {
        BodySpec::LpBall {
            p: Exponent(p),
            dim,
        }
    }

    pub fn euclidean_ball(dim: usize) -> Self {
        Self::lp_ball(2.0, dim)
    }

    pub fn cross_polytope(dim: usize) -> Self {
        Self::lp_ball(1.0, dim)
    }

    pub fn cube(dim: usize) -> Self {
        Self::lp_ball(f64::INFINITY, dim)
    }

    /// Regular symmetric `2k`-gon with circumradius 1 and a vertex on the x-axis.
    pub fn regular_polygon(k: usize) -> Self {
        let generators = (0..k)
            .map(|i| {
                let t = std::f64::consts::PI * i as f64 / k as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        BodySpec::SymPolytope { generators }
    }

    /// The regular hexagon with circumradius 1.
    pub fn hexagon() -> Self {
        Self::regular_polygon(3)
    }

    pub fn dim(&self) -> usize {
        match self {
            BodySpec::LpBall { dim, .. } => *dim,
            BodySpec::Ellipsoid { matrix } => matrix.len(),
            BodySpec::SymPolytope { generators } => generators.first().map_or(0, |g| g.len()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        Body::new(self.clone()).map(|_| ())
    }

    /// Image of the body under the invertible linear map `t`.
    ///
    /// ℓ1, ℓ2 and ℓ∞ balls map to polytopes or ellipsoids; other ℓp balls
    /// have no representation in this schema.
    pub fn transformed(&self, t: &DMatrix<f64>) -> Result<BodySpec> {
        let d = self.dim();
        if t.nrows() != d || t.ncols() != d {
            return Err(VeinError::DimensionMismatch {
                expected: d,
                got: t.nrows(),
            });
        }
        match self {
            BodySpec::LpBall { p, dim } => {
                if p.0 == 2.0 {
                    Ok(BodySpec::Ellipsoid {
                        matrix: geom::from_matrix(&(t * t.transpose())),
                    })
                } else if p.0 == 1.0 || p.is_infinite() {
                    let gens = BodySpec::SymPolytope {
                        generators: lp_ball_generators(*p, *dim)?,
                    };
                    gens.transformed(t)
                } else {
                    Err(VeinError::Unsupported(format!(
                        "linear image of the l_{} ball",
                        p.0
                    )))
                }
            }
            BodySpec::Ellipsoid { matrix } => {
                let a = geom::to_matrix(matrix);
                Ok(BodySpec::Ellipsoid {
                    matrix: geom::from_matrix(&(t * a * t.transpose())),
                })
            }
            BodySpec::SymPolytope { generators } => Ok(BodySpec::SymPolytope {
                generators: generators.iter().map(|g| geom::apply(t, g)).collect(),
            }),
        }
    }
}

/// Generators (up to sign) of the ℓ1 and ℓ∞ balls as symmetric polytopes.
fn lp_ball_generators(p: Exponent, dim: usize) -> Result<Vec<Point>> {
    if p.0 == 1.0 {
        Ok((0..dim).map(|i| geom::unit(i, dim)).collect())
    } else if p.is_infinite() {
        if dim > 20 {
            return Err(VeinError::Unsupported("cube vertex enumeration above d = 20".into()));
        }
        Ok((0..1usize << (dim - 1))
            .map(|s| {
                (0..dim)
                    .map(|k| if k + 1 < dim && s >> k & 1 == 1 { -1.0 } else { 1.0 })
                    .collect()
            })
            .collect())
    } else {
        Err(VeinError::Unsupported("generators exist only for p = 1 and p = ∞".into()))
    }
}

/// Positive-definite shape matrix of the ellipsoid `{x : xᵀA⁻¹x ≤ 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidShape {
    pub matrix: Vec<Vec<f64>>,
}

impl EllipsoidShape {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let shape = EllipsoidShape { matrix };
        shape.cholesky()?;
        Ok(shape)
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(geom::from_matrix(m))
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        geom::to_matrix(&self.matrix)
    }

    fn cholesky(&self) -> Result<Cholesky<f64, nalgebra::Dyn>> {
        let m = self.to_matrix();
        if !m.is_square() || m.nrows() == 0 {
            return Err(VeinError::InvalidBody("ellipsoid matrix must be square".into()));
        }
        if !m.iter().all(|v| v.is_finite()) {
            return Err(VeinError::NonFinite);
        }
        if (&m - m.transpose()).amax() > 1e-9 * (1.0 + m.amax()) {
            return Err(VeinError::InvalidBody("ellipsoid matrix is not symmetric".into()));
        }
        Cholesky::new(m)
            .ok_or_else(|| VeinError::InvalidBody("ellipsoid matrix is not positive definite".into()))
    }

    /// `vol(B₂^d) · √det A`.
    pub fn volume(&self) -> f64 {
        crate::mvee::ball_volume(self.dim()) * self.to_matrix().determinant().max(0.0).sqrt()
    }

    pub fn support(&self, u: &[f64]) -> f64 {
        let v = DVector::from_column_slice(u);
        (v.transpose() * self.to_matrix() * &v)[(0, 0)].max(0.0).sqrt()
    }

    pub fn gauge(&self, x: &[f64]) -> Result<f64> {
        let chol = self.cholesky()?;
        let y = chol.l().solve_lower_triangular(&DVector::from_column_slice(x)).unwrap();
        Ok(y.norm())
    }

    /// A factor `T` with `T Tᵀ = A`, so the ellipsoid is `T·B₂^d`.
    pub fn factor(&self) -> Result<DMatrix<f64>> {
        Ok(self.cholesky()?.l())
    }
}

/// A validated body with cached data for repeated oracle calls.
#[derive(Debug, Clone)]
pub struct Body {
    spec: BodySpec,
    dim: usize,
    /// `L⁻¹` for ellipsoids with `A = L Lᵀ`.
    inv_factor: Option<DMatrix<f64>>,
    /// Facets of the polytope (d ≤ 3, sym_polytope only).
    facets: Option<Vec<Facet>>,
}

impl Body {
    pub fn new(spec: BodySpec) -> Result<Self> {
        let dim = spec.dim();
        if dim < 2 {
            return Err(VeinError::InvalidBody(format!("dimension must be at least 2, got {dim}")));
        }
        let mut inv_factor = None;
        let mut facets = None;
        match &spec {
            BodySpec::LpBall { p, .. } => {
                if !(p.0 >= 1.0) {
                    return Err(VeinError::InvalidBody(format!("exponent {} below 1", p.0)));
                }
            }
            BodySpec::Ellipsoid { matrix } => {
                if matrix.iter().any(|r| r.len() != dim) {
                    return Err(VeinError::InvalidBody("ellipsoid matrix must be square".into()));
                }
                let l = EllipsoidShape {
                    matrix: matrix.clone(),
                }
                .factor()?;
                inv_factor = Some(l.try_inverse().ok_or_else(|| {
                    VeinError::InvalidBody("ellipsoid factor is singular".into())
                })?);
            }
            BodySpec::SymPolytope { generators } => {
                if generators.is_empty() {
                    return Err(VeinError::InvalidBody("no generators".into()));
                }
                if generators.iter().any(|g| g.len() != dim) {
                    return Err(VeinError::InvalidBody("generators differ in length".into()));
                }
                if generators.iter().any(|g| !geom::all_finite(g)) {
                    return Err(VeinError::NonFinite);
                }
                if geom::rank(generators, dim) < dim {
                    return Err(VeinError::InvalidBody(
                        "generators do not span the space (empty interior)".into(),
                    ));
                }
                if dim <= 3 {
                    facets = Some(hull::convex_hull(&symmetrize(generators))?.facets);
                }
            }
        }
        Ok(Body {
            spec,
            dim,
            inv_factor,
            facets,
        })
    }

    pub fn spec(&self) -> &BodySpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(VeinError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if !geom::all_finite(x) {
            return Err(VeinError::NonFinite);
        }
        Ok(())
    }

    /// Minkowski functional `‖x‖_K`. Symmetric polytopes go through the
    /// linear program `min Σ|λᵢ|` subject to `Σ λᵢ vᵢ = x`.
    pub fn gauge(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        if x.iter().all(|&v| v == 0.0) {
            return Ok(0.0);
        }
        match &self.spec {
            BodySpec::LpBall { p, .. } => Ok(lp_norm(x, *p)),
            BodySpec::Ellipsoid { .. } => Ok(self.ellipsoid_gauge(x)),
            BodySpec::SymPolytope { generators } => polytope_gauge_lp(generators, x),
        }
    }

    /// Gauge using the cached facet description when one exists; agrees
    /// with [`Body::gauge`] up to rounding.
    pub fn gauge_fast(&self, x: &[f64]) -> Result<f64> {
        match &self.facets {
            Some(facets) => {
                self.check_input(x)?;
                Ok(facets
                    .iter()
                    .map(|f| dot(&f.normal, x) / f.offset)
                    .fold(0.0, f64::max))
            }
            None => self.gauge(x),
        }
    }

    fn ellipsoid_gauge(&self, x: &[f64]) -> f64 {
        let inv = self.inv_factor.as_ref().expect("ellipsoid factor cached");
        (inv * DVector::from_column_slice(x)).norm()
    }

    /// Support function `h_K(u) = max_{y∈K} ⟨u, y⟩`.
    pub fn support(&self, u: &[f64]) -> Result<f64> {
        self.check_input(u)?;
        if u.iter().all(|&v| v == 0.0) {
            return Ok(0.0);
        }
        Ok(match &self.spec {
            BodySpec::LpBall { p, .. } => lp_norm(u, p.dual()),
            BodySpec::Ellipsoid { matrix } => EllipsoidShape {
                matrix: matrix.clone(),
            }
            .support(u),
            BodySpec::SymPolytope { generators } => generators
                .iter()
                .map(|g| dot(u, g).abs())
                .fold(0.0, f64::max),
        })
    }

    /// Cached facets of a symmetric polytope body (d ≤ 3).
    pub fn facets(&self) -> Option<&[Facet]> {
        self.facets.as_deref()
    }

    /// Directions at which the body is extremal in an obvious way: the
    /// generators of a polytope, the axes (and for p < 2 the diagonals) of an
    /// ℓp ball, the principal axes of an ellipsoid.
    pub fn generator_directions(&self) -> Vec<Point> {
        let d = self.dim;
        let mut dirs: Vec<Point> = match &self.spec {
            BodySpec::SymPolytope { generators } => generators
                .iter()
                .map(|g| scaled(g, 1.0 / norm(g).max(1e-300)))
                .collect(),
            BodySpec::LpBall { p, .. } => {
                let mut v: Vec<Point> = (0..d).map(|i| geom::unit(i, d)).collect();
                if p.0 < 2.0 && d <= 12 {
                    let r = 1.0 / (d as f64).sqrt();
                    v.extend((0..1usize << (d - 1)).map(|s| {
                        (0..d)
                            .map(|k| if k + 1 < d && s >> k & 1 == 1 { -r } else { r })
                            .collect::<Point>()
                    }));
                }
                v
            }
            BodySpec::Ellipsoid { matrix } => {
                let eig = geom::to_matrix(matrix).symmetric_eigen();
                (0..d)
                    .map(|j| eig.eigenvectors.column(j).iter().copied().collect())
                    .collect()
            }
        };
        let neg: Vec<Point> = dirs.iter().map(|v| scaled(v, -1.0)).collect();
        dirs.extend(neg);
        dirs
    }
}

fn polytope_gauge_lp(generators: &[Point], x: &[f64]) -> Result<f64> {
    let n = generators.len();
    let d = x.len();
    let cost = vec![1.0; 2 * n];
    let rows: Vec<Vec<f64>> = (0..d)
        .map(|k| {
            let mut row = Vec::with_capacity(2 * n);
            row.extend(generators.iter().map(|g| g[k]));
            row.extend(generators.iter().map(|g| -g[k]));
            row
        })
        .collect();
    Ok(lp::minimize(&cost, &rows, x)?.objective)
}

/// `‖x‖_K` for a body description.
pub fn gauge(body: &BodySpec, x: &[f64]) -> Result<f64> {
    Body::new(body.clone())?.gauge(x)
}

/// `h_K(u)` for a body description.
pub fn support(body: &BodySpec, u: &[f64]) -> Result<f64> {
    Body::new(body.clone())?.support(u)
}

/// `Σ ‖pᵢ‖_K`, the quantity minimized by the vertex index.
pub fn vein_objective(body: &Body, points: &[Point]) -> Result<f64> {
    points.iter().map(|p| body.gauge(p)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContainmentMode {
    ExactFacet,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentReport {
    pub contained: bool,
    pub mode: ContainmentMode,
    /// Minimum of `h_P(u) − h_K(u)` over the checked unit directions.
    pub worst_margin: f64,
    pub worst_direction: Point,
}

/// Tests `K ⊆ conv(poly)`.
///
/// In d ≤ 3 the test runs over the facets of the hull and is exact. In
/// higher dimensions it compares support functions over `n_samples` random
/// directions plus the body's generator directions and is labeled sampled.
pub fn contains(poly: &Polytope, body: &Body, tol: f64, n_samples: usize) -> Result<ContainmentReport> {
    if !(tol > 0.0) {
        return Err(VeinError::Domain(format!("containment tolerance must be positive, got {tol}")));
    }
    let d = body.dim();
    if poly.dim() != d {
        return Err(VeinError::DimensionMismatch {
            expected: d,
            got: poly.dim(),
        });
    }
    let mut worst = (f64::INFINITY, vec![0.0; d]);
    let mode = if d <= 3 {
        for f in poly.facets()? {
            let margin = f.offset - body.support(&f.normal)?;
            if margin < worst.0 {
                worst = (margin, f.normal.clone());
            }
        }
        ContainmentMode::ExactFacet
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLED_DIRECTION_SEED);
        let mut dirs: Vec<Point> = (0..n_samples)
            .map(|_| crate::sphere::random_direction(d, &mut rng))
            .collect();
        dirs.extend(body.generator_directions());
        for u in dirs {
            let margin = poly.support(&u) - body.support(&u)?;
            if margin < worst.0 {
                worst = (margin, u);
            }
        }
        ContainmentMode::Sampled
    };
    Ok(ContainmentReport {
        contained: worst.0 >= -tol,
        mode,
        worst_margin: worst.0,
        worst_direction: worst.1,
    })
}
