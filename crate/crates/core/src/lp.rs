//! Dense two-phase simplex for the tiny linear programs behind polytope gauges.
//!
//! Problems here have at most a few dozen rows and about a thousand columns,
//! so a full tableau is the simplest correct choice.

use crate::error::{Error, Result};

const EPS: f64 = 1e-11;

/// Solution of `min c^T x  s.t.  A x = b, x >= 0`.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub objective: f64,
    pub x: Vec<f64>,
}

struct Tableau {
    rows: usize,
    cols: usize, // structural + artificial columns, rhs stored separately
    a: Vec<f64>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.cols + j]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let cols = self.cols;
        let p = self.at(r, c);
        for j in 0..cols {
            self.a[r * cols + j] /= p;
        }
        self.rhs[r] /= p;
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.at(i, c);
            if f == 0.0 {
                continue;
            }
            for j in 0..cols {
                self.a[i * cols + j] -= f * self.a[r * cols + j];
            }
            self.rhs[i] -= f * self.rhs[r];
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations for `cost` restricted to columns `< allowed`.
    fn optimize(&mut self, cost: &[f64], allowed: usize, max_iter: usize) -> Result<()> {
        let mut degenerate_run = 0usize;
        for _ in 0..max_iter {
            // reduced costs d_j = c_j - c_B^T B^{-1} A_j
            let mut entering = None;
            let mut best = -EPS;
            let bland = degenerate_run > 30;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j];
                for i in 0..self.rows {
                    d -= cost[self.basis[i]] * self.at(i, j);
                }
                if d < best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(c) = entering else {
                return Ok(());
            };
            let mut leave = None;
            let mut ratio = f64::INFINITY;
            for i in 0..self.rows {
                let aij = self.at(i, c);
                if aij > EPS {
                    let t = self.rhs[i] / aij;
                    let better = t < ratio - 1e-14
                        || (bland && (t - ratio).abs() <= 1e-14
                            && leave.is_some_and(|l: usize| self.basis[i] < self.basis[l]));
                    if better {
                        ratio = t;
                        leave = Some(i);
                    }
                }
            }
            let Some(r) = leave else {
                return Err(Error::LinearProgram("unbounded objective".into()));
            };
            degenerate_run = if ratio.abs() < 1e-14 { degenerate_run + 1 } else { 0 };
            self.pivot(r, c);
        }
        Err(Error::LinearProgram("iteration limit reached".into()))
    }
}

/// Solves `min c^T x` subject to `A x = b`, `x >= 0`, with `A` given row-major
/// as `rows x c.len()`.
pub fn solve_standard(a_rows: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let m = a_rows.len();
    let nvar = c.len();
    if b.len() != m || a_rows.iter().any(|r| r.len() != nvar) {
        return Err(Error::LinearProgram("inconsistent problem shape".into()));
    }
    let cols = nvar + m;
    let mut t = Tableau {
        rows: m,
        cols,
        a: vec![0.0; m * cols],
        rhs: vec![0.0; m],
        basis: (nvar..nvar + m).collect(),
    };
    for i in 0..m {
        let s = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..nvar {
            t.a[i * cols + j] = s * a_rows[i][j];
        }
        t.a[i * cols + nvar + i] = 1.0;
        t.rhs[i] = s * b[i];
    }
    let max_iter = 50 * (cols + m) + 1000;

    let mut phase1 = vec![0.0; cols];
    phase1[nvar..].iter_mut().for_each(|v| *v = 1.0);
    t.optimize(&phase1, cols, max_iter)?;
    let infeas: f64 = (0..m)
        .filter(|&i| t.basis[i] >= nvar)
        .map(|i| t.rhs[i])
        .sum();
    let scale = 1.0 + b.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if infeas > 1e-9 * scale {
        return Err(Error::LinearProgram(format!("infeasible (phase-one residual {infeas:e})")));
    }
    // drive remaining artificial variables out of the basis
    for i in 0..m {
        if t.basis[i] >= nvar {
            if let Some(j) = (0..nvar).find(|&j| t.at(i, j).abs() > 1e-9 && !t.basis.contains(&j)) {
                t.pivot(i, j);
            }
        }
    }
    let mut phase2 = vec![0.0; cols];
    phase2[..nvar].copy_from_slice(c);
    // artificial columns stay excluded; redundant rows keep a zero-valued artificial
    t.optimize(&phase2, nvar, max_iter)?;

    let mut x = vec![0.0; nvar];
    for i in 0..m {
        if t.basis[i] < nvar {
            x[t.basis[i]] = t.rhs[i].max(0.0);
        }
    }
    let objective = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    Ok(LpSolution { objective, x })
}

/// Gauge of the symmetric hull `conv(±v_j)` at `x`: `min sum |lambda_j|` with
/// `sum lambda_j v_j = x`.
pub fn symmetric_hull_gauge(vertices: &[Vec<f64>], x: &[f64]) -> Result<f64> {
    let n = x.len();
    if x.iter().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    let k = vertices.len();
    // columns: +v_j then -v_j
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut r = Vec::with_capacity(2 * k);
            r.extend(vertices.iter().map(|v| v[i]));
            r.extend(vertices.iter().map(|v| -v[i]));
            r
        })
        .collect();
    let c = vec![1.0; 2 * k];
    match solve_standard(&rows, x, &c) {
        Ok(sol) => Ok(sol.objective),
        Err(Error::LinearProgram(msg)) if msg.starts_with("infeasible") => Err(
            Error::UnboundedGauge("point outside the span of the vertices".into()),
        ),
        Err(e) => Err(e),
    }
}
