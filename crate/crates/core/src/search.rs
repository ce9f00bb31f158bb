//! Upper bounds on the vertex index: closed-form witnesses and a penalized
//! pattern search over point configurations, followed by an exact repair
//! that rescales the configuration until it encloses the body.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::body::{contains, hull, vein_objective, Body, BodySpec, Polytope};
use crate::error::{Result, VeinError};
use crate::geom::{self, dot, Point};
use crate::mvee::mvee_of_body;
use crate::sphere;

pub const MAX_VERTICES: usize = 64;
const FIXED_DIRECTIONS: usize = 64;
const RANDOM_MOVES: usize = 2;
const MAX_ESCALATIONS: usize = 8;
const REPAIR_STEPS: usize = 64;
/// Directions used for sampled containment above d = 3.
pub const SAMPLED_CONTAINMENT_DIRS: usize = 4096;
const WITNESS_SEED: u64 = 0x3173_e55e;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n_vertices: usize,
    pub restarts: usize,
    pub penalty_weight: f64,
    pub penalty_growth: f64,
    /// Pattern-search sweeps per restart.
    pub max_iters: usize,
    pub seed: u64,
    pub containment_tol: f64,
}

impl SearchConfig {
    pub fn new(n_vertices: usize) -> Self {
        SearchConfig {
            n_vertices,
            restarts: 8,
            penalty_weight: 10.0,
            penalty_growth: 10.0,
            max_iters: 2000,
            seed: 1,
            containment_tol: 1e-9,
        }
    }

    fn validate(&self, d: usize) -> Result<()> {
        if self.n_vertices <= d {
            return Err(VeinError::InfeasibleVertexCount {
                n: self.n_vertices,
                dim: d,
            });
        }
        if self.n_vertices > MAX_VERTICES {
            return Err(VeinError::Domain(format!(
                "at most {MAX_VERTICES} vertices, got {}",
                self.n_vertices
            )));
        }
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(VeinError::Domain("restarts and max_iters must be positive".into()));
        }
        if !(self.penalty_weight > 0.0 && self.penalty_growth > 1.0 && self.containment_tol > 0.0) {
            return Err(VeinError::Domain(
                "need penalty_weight > 0, penalty_growth > 1, containment_tol > 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_points: Vec<Point>,
    /// `Σ ‖pᵢ‖_K` for `best_points`.
    pub objective: f64,
    /// Objective before the repair scaling.
    pub raw_objective: f64,
    /// Worst `h_P(u) − h_K(u)` over the containment check; non-negative.
    pub feasibility_margin: f64,
    pub restarts_used: usize,
    pub mode: SearchMode,
    /// The winning restart ran out of sweeps before converging.
    pub budget_exhausted: bool,
    pub seed: u64,
    pub source: String,
}

impl SearchResult {
    pub fn n_vertices(&self) -> usize {
        self.best_points.len()
    }
}

fn lex_cmp(a: &[Point], b: &[Point]) -> Ordering {
    let sort = |pts: &[Point]| {
        let mut v = pts.to_vec();
        v.sort_by(|x, y| cmp_points(x, y));
        v
    };
    let (a, b) = (sort(a), sort(b));
    for (x, y) in a.iter().zip(&b) {
        let c = cmp_points(x, y);
        if c != Ordering::Equal {
            return c;
        }
    }
    a.len().cmp(&b.len())
}

fn cmp_points(x: &[f64], y: &[f64]) -> Ordering {
    for (a, b) in x.iter().zip(y) {
        let c = a.total_cmp(b);
        if c != Ordering::Equal {
            return c;
        }
    }
    Ordering::Equal
}

fn better(a: &SearchResult, b: &SearchResult) -> bool {
    match a.objective.total_cmp(&b.objective) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => lex_cmp(&a.best_points, &b.best_points) == Ordering::Less,
    }
}

fn pick_best(results: impl IntoIterator<Item = SearchResult>) -> Option<SearchResult> {
    let mut best: Option<SearchResult> = None;
    for r in results {
        if best.as_ref().map_or(true, |b| better(&r, b)) {
            best = Some(r);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Containment checked exactly over hull facets (d ≤ 3).
    Certified,
    Sampled,
}

fn mode_for(d: usize) -> SearchMode {
    if d <= 3 {
        SearchMode::Certified
    } else {
        SearchMode::Sampled
    }
}

/// Rescales `points` by a factor ≥ 1 until their hull contains the body.
/// Returns `None` when the origin is not interior to the hull.
fn repair(body: &Body, mut points: Vec<Point>) -> Result<Option<(Vec<Point>, f64)>> {
    let d = body.dim();
    if geom::rank(&points, d) < d {
        return Ok(None);
    }
    if d <= 3 {
        let facets = match hull::hull_facets(&points) {
            Ok(f) => f,
            Err(_) => return Ok(None),
        };
        let mut s = 1.0f64;
        for f in &facets {
            if f.offset <= 1e-12 {
                return Ok(None);
            }
            s = s.max(body.support(&f.normal)? / f.offset);
        }
        points = points.iter().map(|p| geom::scaled(p, s)).collect();
    }
    for _ in 0..REPAIR_STEPS {
        let poly = Polytope::new(points.clone());
        let report = match contains(&poly, body, f64::MIN_POSITIVE, SAMPLED_CONTAINMENT_DIRS) {
            Ok(r) => r,
            Err(VeinError::DegenerateHull) => return Ok(None),
            Err(e) => return Err(e),
        };
        if report.worst_margin >= 0.0 {
            return Ok(Some((points, report.worst_margin)));
        }
        let hp = poly.support(&report.worst_direction);
        if hp <= 1e-12 {
            return Ok(None);
        }
        let hk = body.support(&report.worst_direction)?;
        let s = (hk / hp).max(1.0) * (1.0 + 4.0 * f64::EPSILON);
        points = points.iter().map(|p| geom::scaled(p, s)).collect();
    }
    Ok(None)
}

fn finish(body: &Body, points: Vec<Point>, source: String, seed: u64) -> Result<Option<SearchResult>> {
    let raw_objective = vein_objective(body, &points)?;
    let Some((points, margin)) = repair(body, points)? else {
        return Ok(None);
    };
    Ok(Some(SearchResult {
        objective: vein_objective(body, &points)?,
        raw_objective,
        best_points: points,
        feasibility_margin: margin,
        restarts_used: 0,
        mode: mode_for(body.dim()),
        budget_exhausted: false,
        seed,
        source,
    }))
}

/// Haar-random rotation.
pub fn random_rotation<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Unit-circumradius regular simplex with `d + 1` vertices.
pub fn regular_simplex(d: usize) -> Vec<Point> {
    let m = d + 1;
    let c = DMatrix::from_fn(m, m, |i, j| if i == j { 1.0 } else { 0.0 } - 1.0 / m as f64);
    let svd = c.svd(true, false);
    let u = svd.u.expect("left singular vectors");
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    (0..m)
        .map(|i| {
            let v: Point = idx[..d].iter().map(|&k| u[(i, k)]).collect();
            let n = geom::norm(&v);
            geom::scaled(&v, 1.0 / n)
        })
        .collect()
}

fn cross_polytope_points(d: usize, r: f64) -> Vec<Point> {
    let mut v = Vec::with_capacity(2 * d);
    for i in 0..d {
        v.push(geom::scaled(&geom::unit(i, d), r));
        v.push(geom::scaled(&geom::unit(i, d), -r));
    }
    v
}

/// Scales unit directions so their hull contains the unit ball.
fn circumscribe(dirs: Vec<Point>) -> Option<Vec<Point>> {
    let facets = hull::hull_facets(&dirs).ok()?;
    let min_offset = facets.iter().map(|f| f.offset).fold(f64::INFINITY, f64::min);
    if min_offset <= 1e-9 {
        return None;
    }
    Some(dirs.iter().map(|p| geom::scaled(p, 1.0 / min_offset)).collect())
}

/// Initial configuration in the frame of the unit ball: contains `B₂^d`.
fn initial_unit_points<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Vec<Point> {
    let mut base = if n >= 2 * d {
        cross_polytope_points(d, (d as f64).sqrt())
    } else {
        sphere::lattice_directions(d, n)
            .and_then(circumscribe)
            .unwrap_or_else(|| {
                regular_simplex(d)
                    .iter()
                    .map(|p| geom::scaled(p, d as f64))
                    .collect()
            })
    };
    while base.len() < n {
        let a = rng.gen_range(0..base.len());
        let mut b = rng.gen_range(0..base.len());
        if b == a {
            b = (a + 1) % base.len();
        }
        let t: f64 = rng.gen_range(0.25..0.75);
        let p: Point = base[a].iter().zip(&base[b]).map(|(x, y)| t * x + (1.0 - t) * y).collect();
        base.push(p);
    }
    base
}

struct Problem<'a> {
    body: &'a Body,
    d: usize,
    fixed: Vec<(Point, f64)>,
}

impl Problem<'_> {
    /// Support deficits `max(0, h_K(u) − h_P(u))` summed over the fixed
    /// directions and, in d ≤ 3, the facet normals of the trial hull.
    /// Infinite when the hull is degenerate or misses the origin.
    fn violation(&self, pts: &[Point]) -> f64 {
        let mut v: f64 = self
            .fixed
            .iter()
            .map(|(u, hk)| {
                let hp = pts.iter().map(|p| dot(u, p)).fold(f64::NEG_INFINITY, f64::max);
                (hk - hp).max(0.0)
            })
            .sum();
        if self.d <= 3 {
            let Ok(facets) = hull::hull_facets(pts) else {
                return f64::INFINITY;
            };
            for f in facets {
                if f.offset <= 0.0 {
                    return f64::INFINITY;
                }
                let hk = self.body.support(&f.normal).unwrap_or(f64::INFINITY);
                v += (hk - f.offset).max(0.0);
            }
        }
        v
    }

    fn value(&self, pts: &[Point], lambda: f64) -> f64 {
        let obj: f64 = pts
            .iter()
            .map(|p| self.body.gauge_fast(p).unwrap_or(f64::INFINITY))
            .sum();
        obj + lambda * self.violation(pts)
    }

    /// Worst single support deficit.
    fn deficit(&self, pts: &[Point]) -> Result<f64> {
        let mut worst = 0.0f64;
        if self.d <= 3 {
            let Ok(facets) = hull::hull_facets(pts) else {
                return Ok(f64::INFINITY);
            };
            for f in facets {
                if f.offset <= 0.0 {
                    return Ok(f64::INFINITY);
                }
                worst = worst.max(self.body.support(&f.normal)? - f.offset);
            }
        }
        for (u, hk) in &self.fixed {
            let hp = pts.iter().map(|p| dot(u, p)).fold(f64::NEG_INFINITY, f64::max);
            worst = worst.max(hk - hp);
        }
        Ok(worst)
    }
}

struct RestartOutcome {
    points: Vec<Point>,
    exhausted: bool,
}

fn optimize(
    problem: &Problem,
    mut pts: Vec<Point>,
    cfg: &SearchConfig,
    rng: &mut ChaCha8Rng,
) -> Result<RestartOutcome> {
    let d = problem.d;
    let scale = pts.iter().map(|p| geom::norm(p)).fold(0.0, f64::max).max(1e-12);
    let mut lambda = cfg.penalty_weight;
    let mut step = 0.1 * scale;
    let min_step = 1e-10 * scale;
    let mut escalations = 0;
    let mut current = problem.value(&pts, lambda);
    for _ in 0..cfg.max_iters {
        let mut improved = false;
        for i in 0..pts.len() {
            let mut moves: Vec<Point> = (0..d).map(|k| geom::unit(k, d)).collect();
            moves.extend((0..RANDOM_MOVES).map(|_| sphere::random_direction(d, rng)));
            for m in moves {
                let orig = pts[i].clone();
                for sign in [1.0, -1.0] {
                    pts[i] = orig.iter().zip(&m).map(|(x, u)| x + sign * step * u).collect();
                    let v = problem.value(&pts, lambda);
                    if v < current {
                        current = v;
                        improved = true;
                        break;
                    }
                    pts[i] = orig.clone();
                }
            }
        }
        for factor in [1.0 + step / scale, 1.0 - step / scale] {
            let trial: Vec<Point> = pts.iter().map(|p| geom::scaled(p, factor)).collect();
            let v = problem.value(&trial, lambda);
            if v < current {
                pts = trial;
                current = v;
                improved = true;
                break;
            }
        }
        if improved {
            continue;
        }
        step *= 0.5;
        if step >= min_step {
            continue;
        }
        if problem.deficit(&pts)? <= cfg.containment_tol || escalations >= MAX_ESCALATIONS {
            return Ok(RestartOutcome {
                points: pts,
                exhausted: false,
            });
        }
        escalations += 1;
        lambda *= cfg.penalty_growth;
        step = 1e-3 * scale;
        current = problem.value(&pts, lambda);
    }
    Ok(RestartOutcome {
        points: pts,
        exhausted: true,
    })
}

fn fixed_directions(body: &Body, rng: &mut ChaCha8Rng) -> Result<Vec<(Point, f64)>> {
    let d = body.dim();
    let mut dirs = match sphere::lattice_directions(d, FIXED_DIRECTIONS) {
        Some(v) => v,
        None => (0..4 * FIXED_DIRECTIONS)
            .map(|_| sphere::random_direction(d, rng))
            .collect(),
    };
    if d > 3 {
        dirs.extend(body.generator_directions());
    }
    dirs.into_iter()
        .map(|u| {
            let hk = body.support(&u)?;
            Ok((u, hk))
        })
        .collect()
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// Penalized pattern search with `cfg.restarts` independent restarts.
///
/// Restart 0 starts from the axis-aligned configuration in the frame of the
/// enclosing ellipsoid, later restarts from random rotations of it. Each
/// restart draws from its own stream of `cfg.seed`, so results do not depend
/// on thread scheduling.
pub fn local_search(body: &BodySpec, cfg: &SearchConfig) -> Result<SearchResult> {
    let b = Body::new(body.clone())?;
    let d = b.dim();
    cfg.validate(d)?;
    let ellipsoid = mvee_of_body(body)?;
    let t = ellipsoid.factor()?;

    let outcomes: Vec<Result<Option<SearchResult>>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = restart_rng(cfg.seed, r);
            let rot = if r == 0 {
                DMatrix::identity(d, d)
            } else {
                random_rotation(d, &mut rng)
            };
            let map = &t * rot;
            let start: Vec<Point> = initial_unit_points(d, cfg.n_vertices, &mut rng)
                .iter()
                .map(|p| geom::apply(&map, p))
                .collect();
            let problem = Problem {
                body: &b,
                d,
                fixed: fixed_directions(&b, &mut rng)?,
            };
            let out = optimize(&problem, start, cfg, &mut rng)?;
            let res = finish(&b, out.points, format!("local_search(n={})", cfg.n_vertices), cfg.seed)?;
            Ok(res.map(|mut s| {
                s.budget_exhausted = out.exhausted;
                s
            }))
        })
        .collect();

    let mut feasible = Vec::new();
    for o in outcomes {
        if let Some(r) = o? {
            feasible.push(r);
        }
    }
    let mut best = pick_best(feasible).ok_or_else(|| {
        VeinError::Domain("no restart produced a configuration containing the origin".into())
    })?;
    best.restarts_used = cfg.restarts;
    Ok(best)
}

/// Best closed-form witness: the cross-polytope and cube enclosures of an ℓp
/// ball, the extreme points of a polytope and the cross-polytope inscribed
/// around the enclosing ellipsoid in a few orientations.
pub fn known_witness(body: &BodySpec) -> Result<SearchResult> {
    let b = Body::new(body.clone())?;
    let d = b.dim();
    let df = d as f64;
    let mut candidates: Vec<(String, Vec<Point>)> = Vec::new();

    if let BodySpec::LpBall { p, .. } = body {
        // c·B₁ ⊇ B_p for c = d^{1−1/p}
        let c = df.powf(1.0 - p.reciprocal());
        candidates.push(("cross_polytope".into(), cross_polytope_points(d, c)));
        if d <= 10 {
            let cube = (0..1usize << d)
                .map(|s| (0..d).map(|k| if s >> k & 1 == 1 { -1.0 } else { 1.0 }).collect())
                .collect();
            candidates.push(("cube_vertices".into(), cube));
        }
    }
    if let BodySpec::SymPolytope { generators } = body {
        let sym = geom::symmetrize(generators);
        let pts = if d <= 3 {
            hull::convex_hull(&sym)?.extreme_points()
        } else {
            sym
        };
        candidates.push(("own_vertices".into(), pts));
    }

    let t = mvee_of_body(body)?.factor()?;
    let mut rng = ChaCha8Rng::seed_from_u64(WITNESS_SEED);
    let rotations: Vec<DMatrix<f64>> = match d {
        2 => (0..16)
            .map(|k| {
                let a = std::f64::consts::FRAC_PI_2 * k as f64 / 16.0;
                DMatrix::from_row_slice(2, 2, &[a.cos(), -a.sin(), a.sin(), a.cos()])
            })
            .collect(),
        _ => {
            let extra = if d == 3 { 15 } else { 3 };
            std::iter::once(DMatrix::identity(d, d))
                .chain((0..extra).map(|_| random_rotation(d, &mut rng)))
                .collect()
        }
    };
    let cp = cross_polytope_points(d, df.sqrt());
    for rot in rotations {
        let map = &t * rot;
        candidates.push(("john_cross_polytope".into(), cp.iter().map(|p| geom::apply(&map, p)).collect()));
    }

    let mut results = Vec::new();
    for (name, pts) in candidates {
        if let Some(r) = finish(&b, pts, format!("known_witness:{name}"), 0)? {
            results.push(r);
        }
    }
    pick_best(results).ok_or_else(|| VeinError::Domain("no witness encloses the body".into()))
}

/// `min` over the known witness and local searches for every `n` in
/// `n_range`; each `n` uses `cfg` with its own vertex count, so enlarging the
/// range never raises the result.
pub fn vein_upper(body: &BodySpec, n_range: (usize, usize), cfg: &SearchConfig) -> Result<SearchResult> {
    let d = body.dim();
    let (lo, hi) = n_range;
    if lo > hi {
        return Err(VeinError::Domain(format!("empty vertex range {lo}..={hi}")));
    }
    if lo <= d {
        return Err(VeinError::InfeasibleVertexCount { n: lo, dim: d });
    }
    if hi > MAX_VERTICES {
        return Err(VeinError::Domain(format!("at most {MAX_VERTICES} vertices, got {hi}")));
    }
    let mut results = vec![known_witness(body)?];
    for n in lo..=hi {
        let c = SearchConfig {
            n_vertices: n,
            ..cfg.clone()
        };
        results.push(local_search(body, &c)?);
    }
    Ok(pick_best(results).expect("at least the known witness"))
}
