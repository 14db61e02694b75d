//! Browser bindings: solve a cycle, look at truncated versions of it and
//! verify it, all exchanged as JSON strings.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use hbcycle::continuation::{self, ContinuationSchedule};
use hbcycle::hbsystem::{pack, HarmonicSolution, ResidualSystem};
use hbcycle::solution::{sample_trajectory, Provenance, SolutionFile};
use hbcycle::taylor::{verify_cycle, TaylorConfig};
use hbcycle::LorenzParams;

#[derive(Serialize)]
struct StepSummary {
    h: usize,
    iterations: usize,
    residual: f64,
}

#[derive(Serialize)]
struct SolveOutput {
    solution: SolutionFile,
    steps: Vec<StepSummary>,
    /// Rows of `[t, x1, x2, x3]`.
    samples: Vec<[f64; 4]>,
}

#[derive(Serialize)]
struct TruncateOutput {
    h: usize,
    residual: f64,
    samples: Vec<[f64; 4]>,
}

fn rows(sol: &HarmonicSolution, samples: usize) -> Result<Vec<[f64; 4]>, String> {
    Ok(sample_trajectory(sol, samples)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|(t, x)| [t, x[0], x[1], x[2]])
        .collect())
}

fn parse_schedule(text: &str) -> Result<Vec<usize>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| format!("bad harmonic count `{s}`")))
        .collect()
}

/// Runs the continuation for the given parameters (anchor `r - 1`).
pub fn solve_json(
    sigma: f64,
    r: f64,
    b: f64,
    schedule: &str,
    samples: usize,
) -> Result<String, String> {
    let params = LorenzParams { sigma, r, b };
    params.validate().map_err(|e| e.to_string())?;
    let schedule = ContinuationSchedule::new(parse_schedule(schedule)?);
    schedule.validate().map_err(|e| e.to_string())?;
    let guess = continuation::initial_guess(schedule.steps[0]).map_err(|e| e.to_string())?;
    let result = continuation::run(&params, &schedule, &guess).map_err(|e| e.to_string())?;
    let last = result.reports.last().expect("schedule is non-empty");
    // No wall clock on wasm32-unknown-unknown.
    let provenance = Provenance {
        generator: concat!("hbcycle-wasm-demo ", env!("CARGO_PKG_VERSION")).to_string(),
        schedule: schedule.steps.clone(),
        iterations: result.reports.iter().map(|r| r.iterations).collect(),
        newton_tol: schedule.newton.tol,
        residual_norm: last.final_residual_norm,
        created: 0,
    };
    let out = SolveOutput {
        solution: SolutionFile::new(
            &result.solution,
            params,
            params.equilibrium_height(),
            Some(provenance),
        ),
        steps: result
            .reports
            .iter()
            .map(|r| StepSummary {
                h: r.h,
                iterations: r.iterations,
                residual: r.final_residual_norm,
            })
            .collect(),
        samples: rows(&result.solution, samples)?,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

/// Keeps the first `h` harmonics of a stored solution and reports the
/// residual of the shortened vector in the `h`-harmonic system.
pub fn truncate_json(solution: &str, h: usize, samples: usize) -> Result<String, String> {
    let file = SolutionFile::from_json(solution).map_err(|e| e.to_string())?;
    if h == 0 || h > file.h {
        return Err(format!("harmonic count must lie in 1..={}", file.h));
    }
    let full = file.solution();
    let sol = HarmonicSolution {
        omega: full.omega,
        x: [
            full.x[0].truncate(h),
            full.x[1].truncate(h),
            full.x[2].truncate(h),
        ],
    };
    let sys = ResidualSystem::new(file.params, h).with_anchor(file.anchor);
    let residual = sys
        .residual(&pack(&sol).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let out = TruncateOutput {
        h,
        residual,
        samples: rows(&sol, samples)?,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

pub fn verify_json(solution: &str, series_tol: f64) -> Result<String, String> {
    let file = SolutionFile::from_json(solution).map_err(|e| e.to_string())?;
    let cfg = TaylorConfig {
        series_tol,
        ..Default::default()
    };
    let rep = verify_cycle(&file.solution(), &file.params, &cfg).map_err(|e| e.to_string())?;
    serde_json::to_string(&rep).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn solve(
    sigma: f64,
    r: f64,
    b: f64,
    schedule: &str,
    samples: usize,
) -> Result<String, JsError> {
    solve_json(sigma, r, b, schedule, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn truncate(solution: &str, h: usize, samples: usize) -> Result<String, JsError> {
    truncate_json(solution, h, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn verify(solution: &str, series_tol: f64) -> Result<String, JsError> {
    verify_json(solution, series_tol).map_err(|e| JsError::new(&e))
}
