//! Taylor-series integration of the Lorenz flow and period checks of
//! candidate cycles in double-double arithmetic.
//!
//! The local series `x(t0 + s) = sum_k X_k s^k` follows from the quadratic
//! right-hand side by the recurrences
//!
//! ```text
//! (k+1) x1_{k+1} = sigma (x2_k - x1_k)
//! (k+1) x2_{k+1} = r x1_k - x2_k - sum_{j<=k} x1_j x3_{k-j}
//! (k+1) x3_{k+1} = sum_{j<=k} x1_j x2_{k-j} - b x3_k
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hbsystem::{HarmonicSolution, LorenzParams};
use crate::scalar::{ExtReal, Real};

/// Step sizes are multiplied by this after the tolerance estimate.
const STEP_SAFETY: f64 = 0.8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaylorConfig {
    /// Bound on the magnitude of the last retained term of each step.
    pub series_tol: f64,
    pub max_order: usize,
    /// Fixed series order; `None` picks it from `series_tol`.
    pub order: Option<usize>,
}

impl Default for TaylorConfig {
    fn default() -> Self {
        TaylorConfig {
            series_tol: 1e-25,
            max_order: 60,
            order: None,
        }
    }
}

impl TaylorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.series_tol > 0.0) {
            return Err(Error::Config(format!(
                "series tolerance {} must be positive",
                self.series_tol
            )));
        }
        if self.max_order < 2 || self.order.is_some_and(|n| n < 2 || n > self.max_order) {
            return Err(Error::Config(
                "series order must lie in [2, max_order]".into(),
            ));
        }
        Ok(())
    }

    /// Order used for each step: about `-ln(tol) / 2 + 1`, the order that
    /// minimizes the work per unit time for an entire-like series.
    pub fn effective_order(&self) -> usize {
        self.order.unwrap_or_else(|| {
            let n = (-self.series_tol.ln() / 2.0).ceil() as usize + 1;
            n.clamp(8, self.max_order)
        })
    }
}

/// Taylor coefficients `X_0..=X_order` of the solution through `x0`.
pub fn taylor_coefficients<T: Real>(
    x0: [T; 3],
    params: &LorenzParams,
    order: usize,
) -> [Vec<T>; 3] {
    let (sigma, r, b) = (
        T::from_f64(params.sigma),
        T::from_f64(params.r),
        T::from_f64(params.b),
    );
    let mut x1 = Vec::with_capacity(order + 1);
    let mut x2 = Vec::with_capacity(order + 1);
    let mut x3 = Vec::with_capacity(order + 1);
    x1.push(x0[0]);
    x2.push(x0[1]);
    x3.push(x0[2]);
    for k in 0..order {
        let mut p13 = T::zero();
        let mut p12 = T::zero();
        for j in 0..=k {
            p13 += x1[j] * x3[k - j];
            p12 += x1[j] * x2[k - j];
        }
        let inv = T::one() / T::from_usize(k + 1);
        x1.push(sigma * (x2[k] - x1[k]) * inv);
        x2.push((r * x1[k] - x2[k] - p13) * inv);
        x3.push((p12 - b * x3[k]) * inv);
    }
    [x1, x2, x3]
}

fn coefficient_norm<T: Real>(c: &[Vec<T>; 3], k: usize) -> f64 {
    c.iter().map(|v| v[k].to_f64().abs()).fold(0.0, f64::max)
}

/// Sums the series at `s` by Horner's rule.
fn sum_series<T: Real>(c: &[Vec<T>; 3], s: T) -> [T; 3] {
    let horner = |v: &Vec<T>| v.iter().rev().fold(T::zero(), |acc, &x| acc * s + x);
    [horner(&c[0]), horner(&c[1]), horner(&c[2])]
}

/// Integration statistics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegrationStats {
    pub steps: usize,
    pub order: usize,
    pub min_step: f64,
    pub max_step: f64,
}

/// Advances `x0` by the signed duration `span`.
pub fn integrate<T: Real>(
    x0: [T; 3],
    span: T,
    cfg: &TaylorConfig,
    params: &LorenzParams,
) -> Result<[T; 3]> {
    integrate_with_stats(x0, span, cfg, params).map(|(x, _)| x)
}

pub fn integrate_with_stats<T: Real>(
    x0: [T; 3],
    span: T,
    cfg: &TaylorConfig,
    params: &LorenzParams,
) -> Result<([T; 3], IntegrationStats)> {
    cfg.validate()?;
    let order = cfg.effective_order();
    let total = span.to_f64();
    if total == 0.0 || !total.is_finite() {
        return Err(Error::Config(format!(
            "integration span {total} must be finite and non-zero"
        )));
    }
    let direction = total.signum();
    let mut stats = IntegrationStats {
        order,
        min_step: f64::INFINITY,
        ..Default::default()
    };
    let mut x = x0;
    let mut elapsed = T::zero();
    loop {
        let remaining = span - elapsed;
        let remaining_abs = remaining.to_f64().abs();
        if remaining_abs == 0.0 || remaining.to_f64() * direction < 0.0 {
            break;
        }
        let coefs = taylor_coefficients(x, params, order);
        let mut step = f64::INFINITY;
        for k in [order - 1, order] {
            let norm = coefficient_norm(&coefs, k);
            if norm > 0.0 {
                step = step.min((cfg.series_tol / norm).powf(1.0 / k as f64));
            }
        }
        step *= STEP_SAFETY;
        let last = step >= remaining_abs;
        let s = if last {
            remaining
        } else {
            T::from_f64(step * direction)
        };
        if !last && step < 1e-14 * total.abs().max(1.0) {
            return Err(Error::StepUnderflow {
                t: elapsed.to_f64(),
                step,
            });
        }
        x = sum_series(&coefs, s);
        if !x.iter().all(|v| v.to_f64().is_finite()) {
            return Err(Error::StepUnderflow {
                t: elapsed.to_f64(),
                step,
            });
        }
        let s_abs = s.to_f64().abs();
        stats.steps += 1;
        stats.min_step = stats.min_step.min(s_abs);
        stats.max_step = stats.max_step.max(s_abs);
        if last {
            break;
        }
        elapsed += s;
    }
    Ok((x, stats))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// State of the harmonic approximation at `t = 0`.
    pub initial_state: [f64; 3],
    /// State after integrating forward over one period.
    pub final_state: [f64; 3],
    pub period: f64,
    /// Componentwise max `|X(T) - X(0)|`.
    pub roundtrip_error: f64,
    /// Componentwise max difference between `X(0)` and `X(T)` integrated
    /// back over one period.
    pub reverse_error: f64,
    pub digits_roundtrip: u32,
    pub digits_reverse: u32,
    pub forward: IntegrationStats,
    pub backward: IntegrationStats,
}

/// Number of agreeing digits after the decimal point, `floor(-log10(err))`,
/// capped at the resolution of [`ExtReal`].
pub fn agreement_digits(err: f64) -> u32 {
    let cap = (-ExtReal::EPSILON.log10()).floor() as u32;
    if err <= 0.0 {
        return cap;
    }
    let d = (-err.log10()).floor();
    if d <= 0.0 {
        0
    } else {
        (d as u32).min(cap)
    }
}

fn max_abs_diff(a: &[ExtReal; 3], b: &[ExtReal; 3]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (*x - *y).abs().to_f64())
        .fold(0.0, f64::max)
}

/// Integrates the state of `sol` at `t = 0` over one period forward, then
/// the result back over one period, in double-double arithmetic.
pub fn verify_cycle(
    sol: &HarmonicSolution,
    params: &LorenzParams,
    cfg: &TaylorConfig,
) -> Result<VerificationReport> {
    verify_cycle_ext(&sol.map(ExtReal::new), params, cfg)
}

/// [`verify_cycle`] for a solution whose coefficients are already extended.
pub fn verify_cycle_ext(
    ext: &HarmonicSolution<ExtReal>,
    params: &LorenzParams,
    cfg: &TaylorConfig,
) -> Result<VerificationReport> {
    if !(ext.omega.to_f64() > 0.0) {
        return Err(Error::Config(format!(
            "frequency {} must be positive",
            ext.omega
        )));
    }
    let x0 = ext.initial_state();
    let period = ext.period();
    let (x_t, forward) = integrate_with_stats(x0, period, cfg, params)?;
    let (x_back, backward) = integrate_with_stats(x_t, -period, cfg, params)?;
    let roundtrip_error = max_abs_diff(&x_t, &x0);
    let reverse_error = max_abs_diff(&x_back, &x0);
    Ok(VerificationReport {
        initial_state: x0.map(|v| v.to_f64()),
        final_state: x_t.map(|v| v.to_f64()),
        period: period.to_f64(),
        roundtrip_error,
        reverse_error,
        digits_roundtrip: agreement_digits(roundtrip_error),
        digits_reverse: agreement_digits(reverse_error),
        forward,
        backward,
    })
}
