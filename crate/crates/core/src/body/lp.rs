//! Dense two-phase simplex for small standard-form programs
//!
//! minimize cᵀx subject to Ax = b, x ≥ 0.
//!
//! Sized for the gauge evaluation of symmetric polytopes (a handful of rows,
//! a few dozen columns), so the tableau is stored densely and pivoting uses
//! Bland's rule, which cannot cycle.

use crate::error::{Result, VeinError};

const PIVOT_EPS: f64 = 1e-12;
const COST_EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 50_000;
const ROUNDOFF_COST: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    cost: Vec<f64>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[c];
            if factor != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * pv;
                }
            }
        }
        let factor = self.cost[c];
        if factor != 0.0 {
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations over the columns flagged in `allowed`.
    fn optimize(&mut self, allowed: &[bool]) -> Result<()> {
        let mut allowed = allowed.to_vec();
        for _ in 0..MAX_PIVOTS {
            let entering = (0..self.width).find(|&j| allowed[j] && self.cost[j] < -COST_EPS);
            let Some(c) = entering else {
                return Ok(());
            };
            let mut leaving: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                let a = self.rows[r][c];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(r) / a;
                    leaving = match leaving {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - 1e-14
                                || (ratio <= lratio + 1e-14 && self.basis[r] < self.basis[lr])
                            {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leaving else {
                // a ray with roundoff-level cost is a zero-cost ray
                let size = self.rows.iter().map(|row| row[c].abs()).fold(1.0, f64::max);
                if self.cost[c] > -ROUNDOFF_COST * size {
                    allowed[c] = false;
                    continue;
                }
                return Err(VeinError::Lp("objective unbounded below".into()));
            };
            self.pivot(r, c);
        }
        Err(VeinError::Lp("pivot limit reached".into()))
    }
}

/// Solves `min cᵀx, Ax = b, x ≥ 0`.
pub fn minimize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(VeinError::Lp("inconsistent program dimensions".into()));
    }
    let width = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut t = vec![0.0; width + 1];
        for (j, v) in row.iter().enumerate() {
            t[j] = sign * v;
        }
        t[n + i] = 1.0;
        t[width] = sign * b[i];
        rows.push(t);
    }

    // phase 1: minimize the sum of artificials
    let mut cost = vec![0.0; width + 1];
    for row in &rows {
        for j in 0..n {
            cost[j] -= row[j];
        }
        cost[width] -= row[width];
    }
    let mut tab = Tableau {
        rows,
        cost,
        basis: (n..n + m).collect(),
        width,
    };
    let mut allowed = vec![true; width];
    tab.optimize(&allowed)?;
    let infeasibility = -tab.cost[width];
    let scale = 1.0 + b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if infeasibility > 1e-9 * scale {
        return Err(VeinError::Lp(format!(
            "infeasible (phase-one residual {infeasibility:e})"
        )));
    }

    // drive zero-level artificials out of the basis, dropping redundant rows
    let mut r = 0;
    while r < tab.rows.len() {
        if tab.basis[r] >= n {
            match (0..n).find(|&j| tab.rows[r][j].abs() > 1e-9) {
                Some(j) => {
                    tab.pivot(r, j);
                    r += 1;
                }
                None => {
                    tab.rows.remove(r);
                    tab.basis.remove(r);
                }
            }
        } else {
            r += 1;
        }
    }

    // phase 2
    for slot in allowed.iter_mut().skip(n) {
        *slot = false;
    }
    let mut cost = vec![0.0; width + 1];
    cost[..n].copy_from_slice(c);
    for (r, &bj) in tab.basis.iter().enumerate() {
        let cb = cost[bj];
        if cb != 0.0 {
            for (v, rv) in cost.iter_mut().zip(&tab.rows[r]) {
                *v -= cb * rv;
            }
        }
    }
    tab.cost = cost;
    tab.optimize(&allowed)?;

    let mut x = vec![0.0; n];
    for (r, &bj) in tab.basis.iter().enumerate() {
        if bj < n {
            x[bj] = tab.rhs(r).max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution { x, objective })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_program() {
        // min x + y s.t. x + 2y = 4, 3x + y = 7 -> x = 2, y = 1
        let sol = minimize(&[1.0, 1.0], &[vec![1.0, 2.0], vec![3.0, 1.0]], &[4.0, 7.0]).unwrap();
        assert!((sol.x[0] - 2.0).abs() < 1e-12);
        assert!((sol.x[1] - 1.0).abs() < 1e-12);
        assert!((sol.objective - 3.0).abs() < 1e-12);
    }

    #[test]
    fn picks_cheapest_vertex() {
        // min 2a + b + 3c s.t. a + b + c = 1
        let sol = minimize(&[2.0, 1.0, 3.0], &[vec![1.0, 1.0, 1.0]], &[1.0]).unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_rhs_and_redundant_row() {
        let a = vec![vec![1.0, -1.0], vec![2.0, -2.0]];
        let sol = minimize(&[1.0, 1.0], &a, &[-3.0, -6.0]).unwrap();
        assert!((sol.objective - 3.0).abs() < 1e-12);
    }

    #[test]
    fn reports_infeasible() {
        let a = vec![vec![1.0, 1.0]];
        assert!(matches!(minimize(&[1.0, 1.0], &a, &[-1.0]), Err(VeinError::Lp(_))));
    }

    #[test]
    fn zero_cost_ray_is_not_unbounded() {
        // gauge of e₁ in abs conv of six generic points in R⁵; roundoff left a
        // reduced cost of -1e-10 on a column with no positive entry
        let g = [
            [0.39970645157797957, 0.4825110395879104, 0.9778398658782628, 0.31474026795179544, 0.14612589592058844],
            [-0.4270695764529959, -0.24876534376153803, -0.4200783381092603, -0.9199810292584236, -0.3035695020483735],
            [-0.9109367505064903, -0.7533253645135876, 0.8137073078564478, 0.5399213068954691, 0.7753031899936773],
            [-0.6771865239861516, -0.9910216113477444, -0.30929865849983873, -0.40559882667889946, 0.866723831663891],
            [0.5975740048029503, -0.6483295507844855, -0.20233217265086667, -0.16350677790521306, 0.7001184826617646],
            [-0.3685432402497808, 0.3995337390443079, -0.21300060240399565, 0.5866704760637393, -0.5116734088958577],
        ];
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|k| g.iter().map(|p| p[k]).chain(g.iter().map(|p| -p[k])).collect())
            .collect();
        let sol = minimize(&[1.0; 12], &rows, &[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let mut resid = [1.0, 0.0, 0.0, 0.0, 0.0];
        for (k, r) in resid.iter_mut().enumerate() {
            *r -= rows[k].iter().zip(&sol.x).map(|(a, x)| a * x).sum::<f64>();
        }
        assert!(resid.iter().all(|r| r.abs() < 1e-9), "{resid:?}");
        assert!(sol.objective > 0.0 && sol.objective.is_finite());
    }

    #[test]
    fn reports_unbounded() {
        let a = vec![vec![1.0, -1.0]];
        assert!(minimize(&[-1.0, 0.0], &a, &[1.0]).is_err());
    }
}

