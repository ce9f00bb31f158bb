//! Small dense-vector helpers shared across the crate.

use nalgebra::{DMatrix, DVector};

pub type Point = Vec<f64>;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scaled(a: &[f64], t: f64) -> Point {
    a.iter().map(|x| x * t).collect()
}

pub fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn unit(i: usize, d: usize) -> Point {
    let mut e = vec![0.0; d];
    e[i] = 1.0;
    e
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}

pub fn to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    DMatrix::from_fn(r, c, |i, j| rows[i][j])
}

pub fn from_matrix(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn apply(m: &DMatrix<f64>, x: &[f64]) -> Point {
    let v = m * DVector::from_column_slice(x);
    v.iter().copied().collect()
}

/// Numerical rank of a point set via singular values.
pub fn rank(points: &[Point], dim: usize) -> usize {
    if points.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(dim, points.len(), |i, j| points[j][i]);
    let sv = m.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-10 * smax).count()
}

/// Points together with their negatives.
pub fn symmetrize(points: &[Point]) -> Vec<Point> {
    points
        .iter()
        .flat_map(|p| [p.clone(), scaled(p, -1.0)])
        .collect()
}
