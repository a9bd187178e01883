//! Dense two-phase simplex for small linear programs.
//!
//! Solves `min c.x  s.t.  A x = b, x >= 0` and reports the dual vector `y`
//! (`c - A^T y >= 0` at optimality). Bland's rule keeps degenerate problems
//! from cycling; problem sizes here are a few dozen rows at most.

use crate::error::{Error, Result};

const EPS: f64 = 1e-11;

#[derive(Clone, Debug, PartialEq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Dual multipliers of the equality rows.
    pub y: Vec<f64>,
}

struct Tableau {
    m: usize,
    width: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.t[r * w + c];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        for i in 0..=self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f.abs() < 1e-300 {
                continue;
            }
            for j in 0..w {
                let delta = f * self.t[r * w + j];
                self.t[i * w + j] -= delta;
            }
            self.t[i * w + c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations on the objective row `m`; columns `>= allowed`
    /// never enter. Returns false when unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        let rhs = self.width - 1;
        let max_iter = 50_000;
        for _ in 0..max_iter {
            // Bland: smallest index with negative reduced cost
            let Some(c) = (0..allowed).find(|&j| self.at(self.m, j) < -EPS) else {
                return true;
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, c);
                if a > EPS {
                    let ratio = self.at(i, rhs) / a;
                    match best {
                        None => best = Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - EPS || (ratio <= br + EPS && self.basis[i] < self.basis[bi]) {
                                best = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
        true
    }
}

/// `min c.x  s.t.  A x = b, x >= 0`, with `A` given row-major as `m x n`.
pub fn solve_standard(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|r| r.len() != n) {
        return Err(Error::Lp("inconsistent problem dimensions".into()));
    }
    if c.iter().chain(b).chain(a.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(Error::Lp("non-finite coefficient".into()));
    }
    // columns: n structural, m artificial, rhs
    let width = n + m + 1;
    let mut t = vec![0.0; (m + 1) * width];
    let mut flip = vec![1.0; m];
    for i in 0..m {
        if b[i] < 0.0 {
            flip[i] = -1.0;
        }
        for j in 0..n {
            t[i * width + j] = flip[i] * a[i][j];
        }
        t[i * width + n + i] = 1.0;
        t[i * width + width - 1] = flip[i] * b[i];
    }
    // phase-1 objective: sum of artificials, expressed in nonbasic terms
    for j in 0..width {
        if j >= n && j < n + m {
            continue;
        }
        let s: f64 = (0..m).map(|i| t[i * width + j]).sum();
        t[m * width + j] = -s;
    }
    let mut tab = Tableau {
        m,
        width,
        t,
        basis: (n..n + m).collect(),
    };
    tab.optimize(n + m);
    let phase1 = -tab.at(m, width - 1);
    let scale = 1.0 + b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if phase1 > 1e-9 * scale {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            x: vec![0.0; n],
            objective: f64::NAN,
            y: vec![0.0; m],
        });
    }
    // drive artificials out of the basis where possible
    for r in 0..m {
        if tab.basis[r] >= n {
            if let Some(c) = (0..n).find(|&j| tab.at(r, j).abs() > 1e-9) {
                tab.pivot(r, c);
            }
        }
    }
    // phase-2 objective row
    for j in 0..width {
        tab.t[m * width + j] = if j < n { c[j] } else { 0.0 };
    }
    for r in 0..m {
        let bj = tab.basis[r];
        let cb = if bj < n { c[bj] } else { 0.0 };
        if cb != 0.0 {
            for j in 0..width {
                let delta = cb * tab.at(r, j);
                tab.t[m * width + j] -= delta;
            }
        }
    }
    if !tab.optimize(n) {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: vec![0.0; n],
            objective: f64::NEG_INFINITY,
            y: vec![0.0; m],
        });
    }
    let mut x = vec![0.0; n];
    for r in 0..m {
        if tab.basis[r] < n {
            x[tab.basis[r]] = tab.at(r, width - 1).max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    // reduced cost of artificial i is -y_i (in flipped rows)
    let y = (0..m).map(|i| -tab.at(m, n + i) * flip[i]).collect();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
        y,
    })
}

/// `max c.x  s.t.  A x <= b, x >= 0`. Slack columns are appended internally;
/// the returned `y` are the (nonnegative) multipliers of the inequality rows.
pub fn maximize_leq(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpSolution> {
    let m = a.len();
    let n = c.len();
    let rows: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..m).map(|k| if k == i { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    let mut cost: Vec<f64> = c.iter().map(|v| -v).collect();
    cost.extend(std::iter::repeat_n(0.0, m));
    let sol = solve_standard(&cost, &rows, b)?;
    Ok(LpSolution {
        status: sol.status,
        objective: -sol.objective,
        x: sol.x[..n].to_vec(),
        y: sol.y.iter().map(|v| -v).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let sol = maximize_leq(
            &[3.0, 5.0],
            &[vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            &[4.0, 12.0, 18.0],
        )
        .unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 36.0).abs() < 1e-9);
        assert!((sol.x[0] - 2.0).abs() < 1e-9 && (sol.x[1] - 6.0).abs() < 1e-9);
        // dual objective b.y equals primal
        let dual: f64 = [4.0, 12.0, 18.0].iter().zip(&sol.y).map(|(b, y)| b * y).sum();
        assert!((dual - 36.0).abs() < 1e-9);
        assert!(sol.y.iter().all(|&y| y >= -1e-12));
    }

    #[test]
    fn equality_form_with_duals() {
        // min x1 + x2 + x3 s.t. x1 - x2 = 1, x2 + x3 = 2
        let sol = solve_standard(&[1.0, 1.0, 1.0], &[vec![1.0, -1.0, 0.0], vec![0.0, 1.0, 1.0]], &[1.0, 2.0]).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 3.0).abs() < 1e-9);
        let by: f64 = sol.y[0] * 1.0 + sol.y[1] * 2.0;
        assert!((by - sol.objective).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let inf = solve_standard(&[1.0], &[vec![1.0], vec![1.0]], &[1.0, 2.0]).unwrap();
        assert_eq!(inf.status, LpStatus::Infeasible);
        let unb = maximize_leq(&[1.0, 1.0], &[vec![1.0, -1.0]], &[1.0]).unwrap();
        assert_eq!(unb.status, LpStatus::Unbounded);
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        // min x s.t. -x = -3
        let sol = solve_standard(&[1.0], &[vec![-1.0]], &[-3.0]).unwrap();
        assert!((sol.x[0] - 3.0).abs() < 1e-12);
        assert!((sol.y[0] * -3.0 - 3.0).abs() < 1e-12);
    }
}
