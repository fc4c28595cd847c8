//! Dense two-phase simplex for tiny standard-form programs
//!
//! ```text
//! minimize c.z   subject to   A z = b,  z >= 0
//! ```
//!
//! The distance problems in this crate have at most `dim + 1 <= 5` equality
//! rows and a few dozen columns, and they are solved millions of times by the
//! certified search. A full tableau on a flat buffer is the fastest thing at
//! that size. Dantzig pricing is used first; after a fixed number of pivots
//! the solver switches to Bland's rule so degenerate cycling cannot occur.

use crate::error::{BpbError, Result};

const PIVOT_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;
const BLAND_AFTER: usize = 50;
const MAX_PIVOTS: usize = 5_000;

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub objective: f64,
    pub z: Vec<f64>,
}

/// Solves `min c.z, A z = b, z >= 0` where `a` is row-major `m x n`.
pub fn solve_standard(a: &[f64], m: usize, n: usize, b: &[f64], c: &[f64]) -> Result<LpSolution> {
    debug_assert_eq!(a.len(), m * n);
    debug_assert_eq!(b.len(), m);
    debug_assert_eq!(c.len(), n);
    let mut t = Tableau::new(a, m, n, b);

    // Phase I: minimise the sum of artificials.
    let mut phase1_cost = vec![0.0; n + m];
    for cost in phase1_cost.iter_mut().skip(n) {
        *cost = 1.0;
    }
    t.set_objective(&phase1_cost);
    t.run(n + m)?;
    if t.objective_value() > FEAS_TOL * (1.0 + b.iter().map(|v| v.abs()).sum::<f64>()) {
        return Err(BpbError::Lp("infeasible".into()));
    }
    t.expel_artificials(n);

    // Phase II on the original columns only.
    let mut cost = c.to_vec();
    cost.extend(std::iter::repeat_n(0.0, m));
    t.set_objective(&cost);
    t.run(n)?;

    let mut z = vec![0.0; n];
    for (row, &var) in t.basis.iter().enumerate() {
        if var < n {
            z[var] = t.rhs(row).max(0.0);
        }
    }
    let objective = c.iter().zip(&z).map(|(ci, zi)| ci * zi).sum();
    Ok(LpSolution { objective, z })
}

struct Tableau {
    m: usize,
    /// Columns: `n` structural, `m` artificial, then the right-hand side.
    width: usize,
    /// `m` constraint rows followed by the reduced-cost row.
    cells: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(a: &[f64], m: usize, n: usize, b: &[f64]) -> Self {
        let width = n + m + 1;
        let mut cells = vec![0.0; (m + 1) * width];
        for i in 0..m {
            let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
            let row = &mut cells[i * width..(i + 1) * width];
            for j in 0..n {
                row[j] = sign * a[i * n + j];
            }
            row[n + i] = 1.0;
            row[width - 1] = sign * b[i];
        }
        Self { m, width, cells, basis: (n..n + m).collect() }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width - 1)
    }

    /// Minimised objective value, read from the reduced-cost row.
    fn objective_value(&self) -> f64 {
        -self.at(self.m, self.width - 1)
    }

    fn set_objective(&mut self, cost: &[f64]) {
        let (m, w) = (self.m, self.width);
        let mut obj = vec![0.0; w];
        obj[..cost.len()].copy_from_slice(cost);
        for (i, &var) in self.basis.iter().enumerate() {
            let cb = cost[var];
            if cb != 0.0 {
                for j in 0..w {
                    obj[j] -= cb * self.cells[i * w + j];
                }
            }
        }
        self.cells[m * w..(m + 1) * w].copy_from_slice(&obj);
    }

    /// Pivots until optimal; only columns `< allowed` may enter.
    fn run(&mut self, allowed: usize) -> Result<()> {
        for iter in 0..MAX_PIVOTS {
            let bland = iter >= BLAND_AFTER;
            let Some(col) = self.entering(allowed, bland) else {
                return Ok(());
            };
            let Some(row) = self.leaving(col) else {
                return Err(BpbError::Lp("unbounded".into()));
            };
            self.pivot(row, col);
        }
        Err(BpbError::Lp("pivot limit reached".into()))
    }

    fn entering(&self, allowed: usize, bland: bool) -> Option<usize> {
        let base = self.m * self.width;
        let mut best: Option<(usize, f64)> = None;
        for j in 0..allowed {
            let r = self.cells[base + j];
            if r < -PIVOT_TOL {
                if bland {
                    return Some(j);
                }
                if best.is_none_or(|(_, b)| r < b) {
                    best = Some((j, r));
                }
            }
        }
        best.map(|(j, _)| j)
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let a = self.at(i, col);
            if a > PIVOT_TOL {
                let ratio = self.rhs(i) / a;
                let better = match best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < br - 1e-14 || (ratio <= br + 1e-14 && self.basis[i] < self.basis[bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
        }
        best.map(|(i, _)| i)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let p = self.cells[row * w + col];
        for j in 0..w {
            self.cells[row * w + j] /= p;
        }
        for i in 0..=self.m {
            if i == row {
                continue;
            }
            let factor = self.cells[i * w + col];
            if factor != 0.0 {
                for j in 0..w {
                    let v = self.cells[row * w + j];
                    self.cells[i * w + j] -= factor * v;
                }
            }
        }
        self.basis[row] = col;
    }

    /// After phase I, replaces basic artificials (at level zero) by structural
    /// columns where possible. Rows that cannot be repaired are redundant.
    fn expel_artificials(&mut self, n: usize) {
        for row in 0..self.m {
            if self.basis[row] < n {
                continue;
            }
            let col = (0..n)
                .filter(|&j| self.at(row, j).abs() > 1e-9)
                .max_by(|&a, &b| self.at(row, a).abs().total_cmp(&self.at(row, b).abs()));
            if let Some(col) = col {
                self.pivot(row, col);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // min -x - 2y  s.t. x + y + s1 = 4, y + s2 = 3
        let a = [1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0];
        let sol = solve_standard(&a, 2, 4, &[4.0, 3.0], &[-1.0, -2.0, 0.0, 0.0]).unwrap();
        assert!((sol.objective + 7.0).abs() < 1e-12);
        assert!((sol.z[0] - 1.0).abs() < 1e-12 && (sol.z[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasible() {
        // z0 + z1 = -1 with z >= 0
        let err = solve_standard(&[1.0, 1.0], 1, 2, &[-1.0], &[1.0, 1.0]).unwrap_err();
        assert_eq!(err, BpbError::Lp("infeasible".into()));
    }

    #[test]
    fn detects_unbounded() {
        // min -z0 s.t. z0 - z1 = 0
        let err = solve_standard(&[1.0, -1.0], 1, 2, &[0.0], &[-1.0, 0.0]).unwrap_err();
        assert_eq!(err, BpbError::Lp("unbounded".into()));
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        // Two copies of z0 + z1 = 1; minimise z0.
        let a = [1.0, 1.0, 1.0, 1.0];
        let sol = solve_standard(&a, 2, 2, &[1.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!(sol.objective.abs() < 1e-12);
        assert!((sol.z[1] - 1.0).abs() < 1e-12);
    }
}
