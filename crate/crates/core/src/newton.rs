//! Dense LU with partial pivoting and the Newton driver built on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hbsystem::{pack, unknown_count, unpack, Matrix, ResidualSystem};

/// Amplitude max-norm below which a converged point is an equilibrium.
pub const EQUILIBRIUM_AMPLITUDE_THRESHOLD: f64 = 1e-6;

/// Frequencies at or below this are the degenerate `w = 0` branch, not cycles.
pub const MIN_FREQUENCY: f64 = 1e-6;

/// Bound on `r_{n+1} / r_n^2` over the last iterations of a solve.
pub const QUADRATIC_RATIO_BOUND: f64 = 1e6;

/// `P A = L U`, stored in place: strictly lower part holds `L` (unit
/// diagonal implied), upper part holds `U`.
#[derive(Clone, Debug)]
pub struct LuFactors {
    lu: Matrix,
    /// `perm[i]` is the row of `A` that ended up in row `i`.
    perm: Vec<usize>,
    norm1: f64,
}

pub fn lu_factor(a: &Matrix) -> Result<LuFactors> {
    if a.rows != a.cols {
        return Err(Error::Dimension {
            expected: a.rows,
            found: a.cols,
        });
    }
    let n = a.rows;
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        // Strict comparison keeps the lowest row index on ties.
        let mut p = k;
        let mut best = lu[(k, k)].abs();
        for i in k + 1..n {
            let v = lu[(i, k)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return Err(Error::SingularMatrix { column: k });
        }
        if p != k {
            for j in 0..n {
                lu.data.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let l = lu[(i, k)] / pivot;
            lu[(i, k)] = l;
            if l != 0.0 {
                let (upper, lower) = lu.data.split_at_mut(i * n);
                let row_k = &upper[k * n + k + 1..k * n + n];
                let row_i = &mut lower[k + 1..n];
                for (x, &y) in row_i.iter_mut().zip(row_k) {
                    *x -= l * y;
                }
            }
        }
    }
    Ok(LuFactors { lu, perm, norm1 })
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn lower(&self) -> Matrix {
        let n = self.dim();
        let mut l = Matrix::identity(n);
        for i in 0..n {
            for j in 0..i {
                l[(i, j)] = self.lu[(i, j)];
            }
        }
        l
    }

    pub fn upper(&self) -> Matrix {
        let n = self.dim();
        let mut u = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                u[(i, j)] = self.lu[(i, j)];
            }
        }
        u
    }

    /// Solves `A y = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if rhs.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: rhs.len(),
            });
        }
        let mut y: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: f64 = row[..i].iter().zip(&y[..i]).map(|(l, v)| l * v).sum();
            y[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: f64 = row[i + 1..]
                .iter()
                .zip(&y[i + 1..])
                .map(|(u, v)| u * v)
                .sum();
            y[i] = (y[i] - s) / row[i];
        }
        Ok(y)
    }

    /// Solves `A^T y = rhs`.
    pub fn solve_transposed(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if rhs.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: rhs.len(),
            });
        }
        // A^T = U^T L^T P, so solve U^T z = rhs, L^T w = z, y = P^T w.
        let mut z = rhs.to_vec();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[(j, i)] * z[j]).sum();
            z[i] = (z[i] - s) / self.lu[(i, i)];
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[(j, i)] * z[j]).sum();
            z[i] -= s;
        }
        let mut y = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            y[p] = z[i];
        }
        Ok(y)
    }

    /// Estimate of the 1-norm condition number (Hager's power iteration on
    /// the inverse, using only triangular solves).
    pub fn condition_estimate(&self) -> f64 {
        let n = self.dim();
        if n == 0 {
            return 1.0;
        }
        let mut x = vec![1.0 / n as f64; n];
        let mut estimate = 0.0;
        for _ in 0..5 {
            let Ok(y) = self.solve(&x) else { break };
            let norm: f64 = y.iter().map(|v| v.abs()).sum();
            let xi: Vec<f64> = y
                .iter()
                .map(|&v| if v >= 0.0 { 1.0 } else { -1.0 })
                .collect();
            let Ok(z) = self.solve_transposed(&xi) else {
                break;
            };
            let (jmax, zmax) = z
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (j, v)| {
                    if v.abs() > acc.1 {
                        (j, v.abs())
                    } else {
                        acc
                    }
                });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if norm <= estimate || zmax <= ztx {
                estimate = estimate.max(norm);
                break;
            }
            estimate = norm;
            x = vec![0.0; n];
            x[jmax] = 1.0;
        }
        estimate * self.norm1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonConfig {
    /// Residual max-norm at which the iteration stops.
    pub tol: f64,
    pub max_iter: usize,
    /// Multiplier on each Newton step, in (0, 1].
    pub step_damping: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            tol: 1e-8,
            max_iter: 200,
            step_damping: 1.0,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!(
                "tolerance {} must be positive",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        if !(self.step_damping > 0.0 && self.step_damping <= 1.0) {
            return Err(Error::Config(format!(
                "step damping {} must lie in (0, 1]",
                self.step_damping
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NewtonStatus {
    Converged,
    MaxIterations,
    SingularJacobian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Cycle,
    EquilibriumFamily,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonReport {
    pub h: usize,
    pub status: NewtonStatus,
    pub iterations: usize,
    pub final_residual_norm: f64,
    pub classification: Classification,
    /// 1-norm condition estimate of the last factored Jacobian (NaN if none).
    pub condition_estimate: f64,
    /// Residual max-norm before each step and at the final point.
    pub residual_history: Vec<f64>,
    /// False when `r_{n+1} / r_n^2` exceeded [`QUADRATIC_RATIO_BOUND`] on
    /// the final iterations.
    pub quadratic_convergence: bool,
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| {
        if x.abs() > m || x.is_nan() {
            x.abs()
        } else {
            m
        }
    })
}

fn classify(sys: &ResidualSystem, u: &[f64], converged: bool) -> Classification {
    let Ok(sol) = unpack(u, sys.h) else {
        return Classification::Unknown;
    };
    let amplitude = sol.amplitude_norm();
    if amplitude < EQUILIBRIUM_AMPLITUDE_THRESHOLD {
        Classification::EquilibriumFamily
    } else if converged && sol.omega > MIN_FREQUENCY {
        Classification::Cycle
    } else {
        Classification::Unknown
    }
}

fn quadratic_check(history: &[f64]) -> bool {
    // Ratios over the last three steps, ignoring steps that hit round-off.
    history
        .windows(2)
        .rev()
        .take(3)
        .filter(|w| w[0] > 1e-12 && w[1] > 1e-14)
        .all(|w| w[1] / (w[0] * w[0]) < QUADRATIC_RATIO_BOUND)
}

/// Newton iteration `u <- u - damping * J(u)^{-1} F(u)`, each step a
/// factor-and-solve of the analytic Jacobian.
///
/// The returned vector always has a non-negative frequency.
pub fn newton_solve(
    sys: &ResidualSystem,
    u0: &[f64],
    cfg: &NewtonConfig,
) -> Result<(Vec<f64>, NewtonReport)> {
    cfg.validate()?;
    if u0.len() != unknown_count(sys.h) {
        return Err(Error::Dimension {
            expected: unknown_count(sys.h),
            found: u0.len(),
        });
    }
    let mut u = u0.to_vec();
    let mut history = Vec::new();
    let mut condition = f64::NAN;
    let mut iterations = 0;
    let status = loop {
        let f = sys.residual(&u)?;
        let norm = max_norm(&f);
        history.push(norm);
        if norm <= cfg.tol {
            break NewtonStatus::Converged;
        }
        if iterations == cfg.max_iter || !norm.is_finite() {
            break NewtonStatus::MaxIterations;
        }
        let jac = sys.jacobian(&u)?;
        let lu = match lu_factor(&jac) {
            Ok(lu) => lu,
            Err(Error::SingularMatrix { .. }) => break NewtonStatus::SingularJacobian,
            Err(e) => return Err(e),
        };
        condition = lu.condition_estimate();
        let step = lu.solve(&f)?;
        for (x, d) in u.iter_mut().zip(&step) {
            *x -= cfg.step_damping * d;
        }
        iterations += 1;
    };
    let final_residual_norm = *history.last().unwrap_or(&f64::NAN);
    // A negative frequency describes the same functions as its mirror with
    // negated sine amplitudes; report the positive one.
    if u[0] < 0.0 {
        u = pack(&unpack(&u, sys.h)?.with_positive_frequency())?;
    }
    let report = NewtonReport {
        h: sys.h,
        status,
        iterations,
        final_residual_norm,
        classification: classify(sys, &u, status == NewtonStatus::Converged),
        condition_estimate: condition,
        quadratic_convergence: quadratic_check(&history),
        residual_history: history,
    };
    log_report(&report);
    Ok((u, report))
}

fn log_report(report: &NewtonReport) {
    if std::env::var_os("HBCYCLE_LOG").is_some() {
        eprintln!(
            "newton h={} status={:?} iterations={} residual={:.3e} cond~{:.3e}",
            report.h,
            report.status,
            report.iterations,
            report.final_residual_norm,
            report.condition_estimate
        );
    }
}
