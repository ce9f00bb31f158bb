//! Convex hulls in the plane and in space.
//!
//! The plane uses a Graham scan (angular sort about the lowest point); space
//! uses an incremental hull with horizon tracking. Both report oriented
//! boundary simplices (edges or triangles) so volumes can be accumulated by a
//! signed fan from the origin, and both merge coplanar pieces into facets.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Result, VeinError};
use crate::geom::{cross3, dot, norm, sub, Point};

/// Tolerance used when deciding that points are on a facet plane.
pub const HULL_TOL: f64 = 1e-9;

/// Half-space `{x : ⟨normal, x⟩ ≤ offset}` with a unit normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Point,
    pub offset: f64,
}

#[derive(Debug, Clone)]
pub struct Hull {
    pub dim: usize,
    pub facets: Vec<Facet>,
    /// Outward-oriented boundary simplices as index tuples into the input.
    pub simplices: Vec<Vec<usize>>,
    /// Indices of input points that are vertices of the hull.
    pub extreme: Vec<usize>,
    points: Vec<Point>,
}

impl Hull {
    /// Volume by a signed fan from the origin.
    pub fn volume(&self) -> f64 {
        let total: f64 = self
            .simplices
            .iter()
            .map(|s| match self.dim {
                2 => {
                    let a = &self.points[s[0]];
                    let b = &self.points[s[1]];
                    (a[0] * b[1] - a[1] * b[0]) / 2.0
                }
                _ => {
                    let a = &self.points[s[0]];
                    let c = cross3(&self.points[s[1]], &self.points[s[2]]);
                    dot(a, &c) / 6.0
                }
            })
            .sum();
        total.abs()
    }

    pub fn extreme_points(&self) -> Vec<Point> {
        self.extreme.iter().map(|&i| self.points[i].clone()).collect()
    }
}

fn scale_of(points: &[Point]) -> f64 {
    points
        .iter()
        .map(|p| p.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        .fold(0.0, f64::max)
        .max(1e-300)
}

/// Computes the convex hull of `points` in dimension 2 or 3.
pub fn convex_hull(points: &[Point]) -> Result<Hull> {
    let dim = points.first().map(|p| p.len()).ok_or(VeinError::DegenerateHull)?;
    if points.iter().any(|p| p.len() != dim) {
        return Err(VeinError::DimensionMismatch {
            expected: dim,
            got: points.iter().map(|p| p.len()).find(|&l| l != dim).unwrap_or(dim),
        });
    }
    if points.iter().any(|p| !crate::geom::all_finite(p)) {
        return Err(VeinError::NonFinite);
    }
    match dim {
        2 => hull_2d(points),
        3 => hull_3d(points),
        _ => Err(VeinError::Unsupported(format!(
            "exact hulls are available only in dimensions 2 and 3 (got {dim})"
        ))),
    }
}

/// Facets of `conv(vertices)` as unit outward normals with offsets.
pub fn hull_facets(vertices: &[Point]) -> Result<Vec<Facet>> {
    Ok(convex_hull(vertices)?.facets)
}

fn turn(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn hull_2d(points: &[Point]) -> Result<Hull> {
    let scale = scale_of(points);
    let eps = HULL_TOL * scale * scale;
    let pivot = (0..points.len())
        .min_by(|&i, &j| {
            let (a, b) = (&points[i], &points[j]);
            a[1].total_cmp(&b[1]).then(a[0].total_cmp(&b[0]))
        })
        .unwrap();
    let o = &points[pivot];
    let mut order: Vec<usize> = (0..points.len())
        .filter(|&i| i != pivot && norm(&sub(&points[i], o)) > HULL_TOL * scale)
        .collect();
    if order.is_empty() {
        return Err(VeinError::DegenerateHull);
    }
    order.sort_by(|&i, &j| {
        let (a, b) = (&points[i], &points[j]);
        let ta = (a[1] - o[1]).atan2(a[0] - o[0]);
        let tb = (b[1] - o[1]).atan2(b[0] - o[0]);
        ta.total_cmp(&tb).then_with(|| {
            let da = norm(&sub(a, o));
            let db = norm(&sub(b, o));
            da.total_cmp(&db)
        })
    });
    let spread = order
        .iter()
        .map(|&i| turn(o, &points[order[0]], &points[i]).abs())
        .fold(0.0, f64::max);
    if spread <= eps {
        return Err(VeinError::DegenerateHull);
    }

    let mut stack: Vec<usize> = vec![pivot];
    for &i in order.iter().chain(std::iter::once(&pivot)) {
        while stack.len() >= 2 {
            let a = &points[stack[stack.len() - 2]];
            let b = &points[stack[stack.len() - 1]];
            if turn(a, b, &points[i]) <= eps {
                stack.pop();
            } else {
                break;
            }
        }
        if i != pivot {
            stack.push(i);
        }
    }
    // closing pass may leave a collinear tail behind the pivot
    while stack.len() >= 3 {
        let k = stack.len();
        if turn(&points[stack[k - 2]], &points[stack[k - 1]], &points[pivot]) <= eps {
            stack.pop();
        } else {
            break;
        }
    }
    if stack.len() < 3 {
        return Err(VeinError::DegenerateHull);
    }

    let k = stack.len();
    let mut facets = Vec::with_capacity(k);
    let mut simplices = Vec::with_capacity(k);
    for idx in 0..k {
        let a = &points[stack[idx]];
        let b = &points[stack[(idx + 1) % k]];
        let e = sub(b, a);
        let len = norm(&e);
        let normal = vec![e[1] / len, -e[0] / len];
        let offset = dot(&normal, a);
        facets.push(Facet { normal, offset });
        simplices.push(vec![stack[idx], stack[(idx + 1) % k]]);
    }
    Ok(Hull {
        dim: 2,
        facets,
        simplices,
        extreme: stack,
        points: points.to_vec(),
    })
}

struct Tri {
    v: [usize; 3],
    normal: [f64; 3],
    offset: f64,
    alive: bool,
}

fn make_tri(points: &[Point], v: [usize; 3]) -> Tri {
    let a = &points[v[0]];
    let n = cross3(&sub(&points[v[1]], a), &sub(&points[v[2]], a));
    let len = norm(&n);
    let normal = [n[0] / len, n[1] / len, n[2] / len];
    let offset = dot(&normal, a);
    Tri {
        v,
        normal,
        offset,
        alive: true,
    }
}

fn hull_3d(points: &[Point]) -> Result<Hull> {
    let scale = scale_of(points);
    let eps = HULL_TOL * scale;
    let n = points.len();
    if n < 4 {
        return Err(VeinError::DegenerateHull);
    }

    // initial tetrahedron from extreme choices
    let i0 = 0;
    let i1 = (0..n)
        .max_by(|&a, &b| {
            norm(&sub(&points[a], &points[i0])).total_cmp(&norm(&sub(&points[b], &points[i0])))
        })
        .unwrap();
    let axis = sub(&points[i1], &points[i0]);
    if norm(&axis) <= eps {
        return Err(VeinError::DegenerateHull);
    }
    let line_dist = |k: usize| norm(&cross3(&axis, &sub(&points[k], &points[i0]))) / norm(&axis);
    let i2 = (0..n).max_by(|&a, &b| line_dist(a).total_cmp(&line_dist(b))).unwrap();
    if line_dist(i2) <= eps {
        return Err(VeinError::DegenerateHull);
    }
    let plane = cross3(&axis, &sub(&points[i2], &points[i0]));
    let pn = norm(&plane);
    let plane_dist = |k: usize| dot(&plane, &sub(&points[k], &points[i0])) / pn;
    let i3 = (0..n)
        .max_by(|&a, &b| plane_dist(a).abs().total_cmp(&plane_dist(b).abs()))
        .unwrap();
    if plane_dist(i3).abs() <= eps {
        return Err(VeinError::DegenerateHull);
    }

    let centroid: Vec<f64> = (0..3)
        .map(|c| (points[i0][c] + points[i1][c] + points[i2][c] + points[i3][c]) / 4.0)
        .collect();
    let mut tris: Vec<Tri> = Vec::new();
    for v in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        let mut t = make_tri(points, v);
        if dot(&t.normal, &centroid) > t.offset {
            t = make_tri(points, [v[0], v[2], v[1]]);
        }
        tris.push(t);
    }

    let seeded = [i0, i1, i2, i3];
    for p in 0..n {
        if seeded.contains(&p) {
            continue;
        }
        let q = &points[p];
        let visible: Vec<usize> = (0..tris.len())
            .filter(|&t| tris[t].alive && dot(&tris[t].normal, q) - tris[t].offset > eps)
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut edges: HashSet<(usize, usize)> = HashSet::new();
        for &t in &visible {
            let v = tris[t].v;
            for k in 0..3 {
                edges.insert((v[k], v[(k + 1) % 3]));
            }
        }
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for &t in &visible {
            let v = tris[t].v;
            for k in 0..3 {
                let e = (v[k], v[(k + 1) % 3]);
                if !edges.contains(&(e.1, e.0)) {
                    horizon.push(e);
                }
            }
            tris[t].alive = false;
        }
        for (a, b) in horizon {
            tris.push(make_tri(points, [a, b, p]));
        }
    }

    let alive: Vec<&Tri> = tris.iter().filter(|t| t.alive).collect();
    let mut facets: Vec<Facet> = Vec::new();
    for t in &alive {
        let dup = facets.iter().any(|f| {
            (0..3).all(|c| (f.normal[c] - t.normal[c]).abs() < 1e-7)
                && (f.offset - t.offset).abs() < 1e-7 * scale
        });
        if !dup {
            facets.push(Facet {
                normal: t.normal.to_vec(),
                offset: t.offset,
            });
        }
    }
    let mut extreme: Vec<usize> = alive.iter().flat_map(|t| t.v).collect();
    extreme.sort_unstable();
    extreme.dedup();
    // a vertex lies on at least three distinct facets; fewer means edge or face interior
    extreme.retain(|&i| {
        facets
            .iter()
            .filter(|f| (dot(&f.normal, &points[i]) - f.offset).abs() <= 1e-7 * scale)
            .count()
            >= 3
    });
    let simplices = alive.iter().map(|t| t.v.to_vec()).collect();
    Ok(Hull {
        dim: 3,
        facets,
        simplices,
        extreme,
        points: points.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> Vec<Point> {
        let mut v = Vec::new();
        for s in 0..8 {
            v.push(
                (0..3)
                    .map(|k| if s >> k & 1 == 1 { 1.0 } else { -1.0 })
                    .collect(),
            );
        }
        v
    }

    #[test]
    fn square_facets() {
        let pts = vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![-1.0, 0.0],
            vec![0.0, -1.0],
        ];
        let facets = hull_facets(&pts).unwrap();
        assert_eq!(facets.len(), 4);
        for f in &facets {
            assert!((f.offset - 0.5f64.sqrt()).abs() < 1e-12);
            assert!((f.normal[0].abs() - 0.5f64.sqrt()).abs() < 1e-12);
            assert!((f.normal[1].abs() - 0.5f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn collinear_points_removed_in_plane() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![2.0, 0.0],
            vec![2.0, 2.0],
            vec![0.0, 2.0],
            vec![1.0, 1.0],
        ];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.facets.len(), 4);
        assert_eq!(hull.extreme.len(), 4);
        assert!((hull.volume() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn cube_facets_merge() {
        let hull = convex_hull(&cube()).unwrap();
        assert_eq!(hull.facets.len(), 6);
        assert_eq!(hull.extreme.len(), 8);
        for f in &hull.facets {
            assert!((f.offset - 1.0).abs() < 1e-12);
            assert_eq!(f.normal.iter().filter(|v| v.abs() > 0.5).count(), 1);
        }
        assert!((hull.volume() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn interior_point_is_absorbed() {
        let mut pts = cube();
        pts.push(vec![0.1, 0.2, -0.3]);
        pts.push(vec![1.0, 0.0, 0.0]); // on a face
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.facets.len(), 6);
        assert_eq!(hull.extreme.len(), 8);
    }

    #[test]
    fn planar_set_in_space_is_degenerate() {
        let pts = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![-1.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.3, 0.3, 0.0],
        ];
        assert_eq!(hull_facets(&pts).unwrap_err(), VeinError::DegenerateHull);
        let line = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        assert_eq!(hull_facets(&line).unwrap_err(), VeinError::DegenerateHull);
    }
}
