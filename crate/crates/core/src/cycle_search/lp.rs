//! Dense two-phase simplex for small linear programs
//! `min cᵀx  s.t.  A x ≤ b,  x ≥ lower`.
//!
//! Bland's rule is used in both phases, so the method terminates on
//! degenerate problems without any anti-cycling perturbation.

use thiserror::Error;

const PIVOT_EPS: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("objective is unbounded below")]
    Unbounded,
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("simplex pivot limit reached")]
    PivotLimit,
}

/// One `coeffs · x ≤ rhs` row.
#[derive(Debug, Clone, PartialEq)]
pub struct LpConstraint {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    /// Minimized.
    pub objective: Vec<f64>,
    pub constraints: Vec<LpConstraint>,
    pub lower: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
}

impl LpProblem {
    pub fn new(objective: Vec<f64>, lower: Vec<f64>) -> Self {
        Self {
            objective,
            constraints: Vec::new(),
            lower,
        }
    }

    pub fn le(&mut self, coeffs: Vec<f64>, rhs: f64) -> &mut Self {
        self.constraints.push(LpConstraint { coeffs, rhs });
        self
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.n_vars();
        if self.lower.len() != n {
            return Err(LpError::Malformed(format!(
                "{} lower bounds for {n} variables",
                self.lower.len()
            )));
        }
        let all_finite = self.objective.iter().chain(&self.lower).all(|v| v.is_finite());
        if !all_finite {
            return Err(LpError::Malformed("non-finite objective or bound".into()));
        }
        for (k, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::Malformed(format!(
                    "constraint {k} has {} coefficients, expected {n}",
                    c.coeffs.len()
                )));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()) {
                return Err(LpError::Malformed(format!("constraint {k} is not finite")));
            }
        }
        Ok(())
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.constraints.iter().map(|c| {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            lhs - c.rhs
        });
        let bounds = self.lower.iter().zip(x).map(|(l, v)| l - v);
        rows.chain(bounds).fold(0.0, f64::max)
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    /// Reduced costs; last entry is minus the objective value.
    cost: Vec<f64>,
    basis: Vec<usize>,
    width: usize,
    allowed: Vec<bool>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let w = self.width;
        let p = self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[col];
            if f != 0.0 {
                for j in 0..=w {
                    row[j] -= f * pivot_row[j];
                }
                row[col] = 0.0;
            }
        }
        let f = self.cost[col];
        if f != 0.0 {
            for j in 0..=w {
                self.cost[j] -= f * pivot_row[j];
            }
            self.cost[col] = 0.0;
        }
        self.basis[r] = col;
    }

    /// Runs Bland-rule pivots to optimality.
    fn optimize(&mut self, pivots: &mut usize) -> Result<(), LpError> {
        loop {
            let entering = (0..self.width).find(|&j| self.allowed[j] && self.cost[j] < -PIVOT_EPS);
            let Some(col) = entering else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                let a = row[col];
                if a > PIVOT_EPS {
                    let ratio = row[self.width] / a;
                    best = match best {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            if ratio < bratio - 1e-14 * bratio.abs().max(1.0)
                                || (ratio <= bratio + 1e-14 * bratio.abs().max(1.0) && self.basis[r] < self.basis[br])
                            {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = best else {
                return Err(LpError::Unbounded);
            };
            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return Err(LpError::PivotLimit);
            }
            self.pivot(r, col);
        }
    }
}

/// Solves the problem; `Ok(Infeasible)` when phase 1 cannot reach zero.
pub fn lp_feasible(problem: &LpProblem) -> Result<LpOutcome, LpError> {
    problem.validate()?;
    let n = problem.n_vars();
    let m = problem.constraints.len();
    // shift x = lower + y, y ≥ 0; columns: y (n), slacks (m), artificials (≤ m)
    let shifted: Vec<(Vec<f64>, f64)> = problem
        .constraints
        .iter()
        .map(|c| {
            let at_lower: f64 = c.coeffs.iter().zip(&problem.lower).map(|(a, l)| a * l).sum();
            (c.coeffs.clone(), c.rhs - at_lower)
        })
        .collect();
    let n_art = shifted.iter().filter(|(_, b)| *b < 0.0).count();
    let width = n + m + n_art;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art = n + m;
    for (i, (coeffs, b)) in shifted.iter().enumerate() {
        let mut row = vec![0.0; width + 1];
        if *b >= 0.0 {
            row[..n].copy_from_slice(coeffs);
            row[n + i] = 1.0;
            row[width] = *b;
            basis.push(n + i);
        } else {
            for (dst, a) in row.iter_mut().zip(coeffs) {
                *dst = -a;
            }
            row[n + i] = -1.0;
            row[art] = 1.0;
            row[width] = -b;
            basis.push(art);
            art += 1;
        }
        rows.push(row);
    }

    let mut t = Tableau {
        rows,
        cost: vec![0.0; width + 1],
        basis,
        width,
        allowed: vec![true; width],
    };
    let mut pivots = 0;

    if n_art > 0 {
        for j in (n + m)..width {
            t.cost[j] = 1.0;
        }
        for r in 0..m {
            if t.basis[r] >= n + m {
                for j in 0..=width {
                    t.cost[j] -= t.rows[r][j];
                }
            }
        }
        t.optimize(&mut pivots)?;
        let phase1 = -t.cost[width];
        if phase1 > FEAS_TOL {
            return Ok(LpOutcome::Infeasible);
        }
        // drive zero-valued artificials out of the basis
        for r in 0..m {
            if t.basis[r] >= n + m {
                if let Some(col) = (0..n + m).find(|&j| t.rows[r][j].abs() > PIVOT_EPS) {
                    t.pivot(r, col);
                }
            }
        }
        for j in (n + m)..width {
            t.allowed[j] = false;
        }
    }

    // phase 2 reduced costs from the true objective
    let mut c_full = vec![0.0; width];
    c_full[..n].copy_from_slice(&problem.objective);
    t.cost = vec![0.0; width + 1];
    t.cost[..width].copy_from_slice(&c_full);
    for r in 0..m {
        let cb = c_full[t.basis[r]];
        if cb != 0.0 {
            for j in 0..=width {
                t.cost[j] -= cb * t.rows[r][j];
            }
        }
    }
    t.optimize(&mut pivots)?;

    let mut x = problem.lower.clone();
    for r in 0..m {
        let b = t.basis[r];
        if b < n {
            x[b] += t.rows[r][width].max(0.0);
        }
    }
    let value = x.iter().zip(&problem.objective).map(|(v, c)| v * c).sum();
    if problem.max_violation(&x) > FEAS_TOL {
        // only reachable when a redundant artificial row carried rounding
        return Ok(LpOutcome::Infeasible);
    }
    Ok(LpOutcome::Optimal { x, value })
}
