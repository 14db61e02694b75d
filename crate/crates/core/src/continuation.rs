//! Continuation in the number of harmonics: solve at a small `h`, pad the
//! solution with zero amplitudes and use it as the starting point at the
//! next, larger `h`.
//!
//! Two conventions make the run reproducible:
//!
//! * the start vector can be projected onto the subspace invariant under
//!   the Lorenz symmetry combined with a half-period shift (x1, x2 odd
//!   harmonics only, x3 even harmonics only); Newton never leaves it;
//! * after every step the time origin is moved to the downward crossing of
//!   the plane `x3 = anchor` with the smallest `x1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hbsystem::{
    harmonics_for_len, layout, pack, unknown_count, unpack, HarmonicSolution, LorenzParams,
    ResidualSystem,
};
use crate::newton::{
    newton_solve, Classification, NewtonConfig, NewtonReport, NewtonStatus, MIN_FREQUENCY,
};
use crate::trigpoly::TrigPolynomial;

pub const INITIAL_GUESS_HARMONICS: usize = 5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectionRule {
    /// Keep whatever phase Newton converged to.
    AsSolved,
    /// Shift to the downward anchor-plane crossing with the smallest x1.
    #[default]
    Downward,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationSchedule {
    pub steps: Vec<usize>,
    pub newton: NewtonConfig,
    /// Project the start vector onto the half-period symmetric subspace.
    pub symmetric_start: bool,
    pub section: SectionRule,
}

impl Default for ContinuationSchedule {
    fn default() -> Self {
        ContinuationSchedule {
            steps: vec![5, 10, 15, 20, 25, 30, 35],
            newton: NewtonConfig::default(),
            symmetric_start: true,
            section: SectionRule::Downward,
        }
    }
}

impl ContinuationSchedule {
    pub fn new(steps: Vec<usize>) -> Self {
        ContinuationSchedule {
            steps,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.steps.first() {
            None => return Err(Error::Config("empty harmonic schedule".into())),
            Some(0) => {
                return Err(Error::Config(
                    "first harmonic count must be at least 1".into(),
                ))
            }
            _ => {}
        }
        if self.steps.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(format!(
                "harmonic schedule {:?} must be strictly increasing",
                self.steps
            )));
        }
        self.newton.validate()
    }
}

/// Starting point at `h = 5`: `w = 4`, zero constants, `c_{1,i} = -1`,
/// `s_{1,2} = 1`, every other amplitude zero.
pub fn initial_guess_h5() -> Vec<f64> {
    let h = INITIAL_GUESS_HARMONICS;
    let mut u = vec![0.0; unknown_count(h)];
    u[layout::OMEGA] = 4.0;
    for i in 1..=h {
        u[layout::cos(h, 0, i)] = -1.0;
    }
    u[layout::sin(h, 0, 2)] = 1.0;
    u
}

/// The built-in starting vector resized to `h` harmonics (dropping or
/// zero-filling the upper harmonics).
pub fn initial_guess(h: usize) -> Result<Vec<f64>> {
    let guess = unpack(&initial_guess_h5(), INITIAL_GUESS_HARMONICS)?;
    let resize = |p: &TrigPolynomial| p.truncate(h).pad(h);
    let sol = HarmonicSolution {
        omega: guess.omega,
        x: [
            resize(&guess.x[0])?,
            resize(&guess.x[1])?,
            resize(&guess.x[2])?,
        ],
    };
    pack(&sol)
}

/// Re-embeds an unknown vector at a larger harmonic count.
pub fn lift(u: &[f64], h_new: usize) -> Result<Vec<f64>> {
    let h = harmonics_for_len(u.len())?;
    pack(&unpack(u, h)?.pad(h_new)?)
}

/// Zeroes the components that break the symmetry
/// `(x1, x2, x3)(t) -> (-x1, -x2, x3)(t + T/2)`: the constants of x1 and x2,
/// their even harmonics and the odd harmonics of x3.
pub fn project_symmetric(u: &[f64]) -> Result<Vec<f64>> {
    let h = harmonics_for_len(u.len())?;
    let mut v = u.to_vec();
    v[layout::constant(0)] = 0.0;
    v[layout::constant(1)] = 0.0;
    for i in 1..=h {
        let odd = i % 2 == 1;
        let zeroed: &[usize] = if odd { &[2] } else { &[0, 1] };
        for &k in zeroed {
            v[layout::cos(h, k, i)] = 0.0;
            v[layout::sin(h, k, i)] = 0.0;
        }
    }
    Ok(v)
}

/// Largest magnitude among the components zeroed by [`project_symmetric`].
pub fn symmetry_defect(sol: &HarmonicSolution) -> f64 {
    let mut defect = sol.x[0].a0.abs().max(sol.x[1].a0.abs());
    for i in 1..=sol.h() {
        let ks: &[usize] = if i % 2 == 1 { &[2] } else { &[0, 1] };
        for &k in ks {
            defect = defect
                .max(sol.x[k].a[i - 1].abs())
                .max(sol.x[k].b[i - 1].abs());
        }
    }
    defect
}

/// Phases `theta` in `[0, 2 pi)` where `x3` crosses `level` downward.
pub fn downward_crossings(sol: &HarmonicSolution, level: f64) -> Vec<f64> {
    let x3 = &sol.x[2];
    let dx3 = x3.differentiate(1.0);
    let g = |theta: f64| x3.evaluate(1.0, theta) - level;
    let n = (32 * sol.h()).max(256);
    let step = std::f64::consts::TAU / n as f64;
    // Sample once so the wrap-around cell sees the same value at 0 and 2 pi.
    let samples: Vec<f64> = (0..n).map(|j| g(j as f64 * step)).collect();
    let mut roots = Vec::new();
    for j in 0..n {
        let (mut lo, mut hi) = (j as f64 * step, (j + 1) as f64 * step);
        if !(samples[j] > 0.0 && samples[(j + 1) % n] <= 0.0) {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut theta = 0.5 * (lo + hi);
        // Two Newton corrections to land on the root to full precision.
        for _ in 0..2 {
            let d = dx3.evaluate(1.0, theta);
            if d != 0.0 {
                theta -= g(theta) / d;
            }
        }
        roots.push(theta.rem_euclid(std::f64::consts::TAU));
    }
    roots
}

/// Moves the time origin of `sol` to the downward crossing of
/// `x3 = level` with the smallest `x1`. Returns `None` if `x3` never
/// crosses the level downward.
pub fn align_to_section(sol: &HarmonicSolution, level: f64) -> Option<HarmonicSolution> {
    downward_crossings(sol, level)
        .into_iter()
        .map(|theta| sol.shift_phase(theta))
        .min_by(|a, b| a.x[0].value_at_zero().total_cmp(&b.x[0].value_at_zero()))
}

#[derive(Clone, Debug)]
pub struct ContinuationResult {
    pub solution: HarmonicSolution,
    pub reports: Vec<NewtonReport>,
    /// Solution after each completed step.
    pub stages: Vec<HarmonicSolution>,
}

pub fn run(
    params: &LorenzParams,
    schedule: &ContinuationSchedule,
    u0: &[f64],
) -> Result<ContinuationResult> {
    run_with_anchor(params, params.equilibrium_height(), schedule, u0)
}

fn solve_step(
    sys: &ResidualSystem,
    u: &[f64],
    cfg: &NewtonConfig,
) -> Result<(Vec<f64>, NewtonReport)> {
    let h = sys.h;
    let (next, report) = newton_solve(sys, u, cfg)?;
    match (report.status, report.classification) {
        (NewtonStatus::Converged, Classification::Cycle) => Ok((next, report)),
        (_, Classification::EquilibriumFamily) => Err(Error::EquilibriumCollapse { h }),
        (status, class) => Err(Error::NewtonFailed {
            h,
            reason: format!(
                "{status:?} ({class:?}, omega {:.3e}) after {} iterations, residual {:.3e}",
                next[0], report.iterations, report.final_residual_norm
            ),
        }),
    }
}

pub fn run_with_anchor(
    params: &LorenzParams,
    anchor: f64,
    schedule: &ContinuationSchedule,
    u0: &[f64],
) -> Result<ContinuationResult> {
    params.validate()?;
    schedule.validate()?;
    if !anchor.is_finite() {
        return Err(Error::Config(format!("anchor {anchor} must be finite")));
    }
    let h0 = schedule.steps[0];
    if u0.len() != unknown_count(h0) {
        return Err(Error::Dimension {
            expected: unknown_count(h0),
            found: u0.len(),
        });
    }
    let mut u = if schedule.symmetric_start {
        project_symmetric(u0)?
    } else {
        u0.to_vec()
    };
    let mut reports = Vec::with_capacity(schedule.steps.len());
    let mut stages = Vec::with_capacity(schedule.steps.len());
    for &h in &schedule.steps {
        u = lift(&u, h)?;
        let sys = ResidualSystem::new(*params, h).with_anchor(anchor);
        let (next, mut report) = solve_step(&sys, &u, &schedule.newton)?;

        let mut sol = unpack(&next, h)?;
        if schedule.section == SectionRule::Downward {
            if let Some(aligned) = align_to_section(&sol, anchor) {
                // The shifted vector solves the system up to rounding; polish
                // so the reported residual belongs to the returned point.
                let (polished, polish) = solve_step(&sys, &pack(&aligned)?, &schedule.newton)?;
                report.iterations += polish.iterations;
                report.final_residual_norm = polish.final_residual_norm;
                report
                    .residual_history
                    .extend_from_slice(&polish.residual_history);
                sol = unpack(&polished, h)?;
            }
        }
        if !(sol.omega > MIN_FREQUENCY) {
            return Err(Error::NonPositiveFrequency {
                h,
                omega: sol.omega,
            });
        }
        u = pack(&sol)?;
        stages.push(sol);
        reports.push(report);
    }
    let solution = stages.last().cloned().expect("schedule is non-empty");
    Ok(ContinuationResult {
        solution,
        reports,
        stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_guess_slots() {
        let u = initial_guess_h5();
        let h = 5;
        assert_eq!(u.len(), 34);
        assert_eq!(u[0], 4.0);
        assert_eq!(u[layout::cos(h, 0, 3)], -1.0);
        assert_eq!(u[layout::sin(h, 0, 2)], 1.0);
        assert_eq!(u[layout::sin(h, 0, 1)], 0.0);
        assert!(u[layout::cos(h, 1, 1)..].iter().all(|&v| v == 0.0));
        assert_eq!(&u[1..4], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn resized_guess() {
        assert_eq!(initial_guess(5).unwrap(), initial_guess_h5());
        let small = unpack(&initial_guess(2).unwrap(), 2).unwrap();
        assert_eq!(small.x[0].b, vec![0.0, 1.0]);
        let big = initial_guess(8).unwrap();
        assert_eq!(big.len(), unknown_count(8));
        assert_eq!(big[layout::cos(8, 0, 3)], -1.0);
    }

    #[test]
    fn lift_identity_and_errors() {
        let u = initial_guess_h5();
        assert_eq!(lift(&u, 5).unwrap(), u);
        assert!(lift(&u, 4).is_err());
        let lifted = lift(&u, 7).unwrap();
        assert_eq!(lifted.len(), unknown_count(7));
        assert_eq!(lifted[layout::sin(7, 0, 2)], 1.0);
        assert_eq!(lifted[layout::cos(7, 0, 6)], 0.0);
    }

    #[test]
    fn lifted_equilibrium_still_solves() {
        let params = LorenzParams::default();
        let u = pack(&HarmonicSolution::equilibrium(&params, 2, 3.0, -1.0)).unwrap();
        let lifted = lift(&u, 6).unwrap();
        let res = ResidualSystem::new(params, 6).residual(&lifted).unwrap();
        assert!(res.iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn symmetric_projection_of_guess() {
        let v = project_symmetric(&initial_guess_h5()).unwrap();
        let h = 5;
        assert_eq!(v[layout::sin(h, 0, 2)], 0.0);
        assert_eq!(v[layout::cos(h, 0, 2)], 0.0);
        assert_eq!(v[layout::cos(h, 0, 3)], -1.0);
        assert_eq!(v[0], 4.0);
        assert_eq!(symmetry_defect(&unpack(&v, h).unwrap()), 0.0);
        assert_eq!(
            symmetry_defect(&unpack(&initial_guess_h5(), h).unwrap()),
            1.0
        );
    }

    #[test]
    fn crossings_of_a_cosine() {
        // x3 = 27 + cos(theta) crosses 27 downward at pi / 2.
        let mut sol = HarmonicSolution::equilibrium(&LorenzParams::default(), 2, 1.0, 1.0);
        sol.x[2].a[0] = 1.0;
        let roots = downward_crossings(&sol, 27.0);
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        let aligned = align_to_section(&sol, 27.0).unwrap();
        assert!((aligned.x[2].value_at_zero() - 27.0).abs() < 1e-14);
        assert!(align_to_section(&sol, 40.0).is_none());
    }

    #[test]
    fn crossing_at_the_origin_is_found() {
        // x3 = 27 - sin(theta): the only downward crossing sits on the grid
        // seam at theta = 0.
        let mut sol = HarmonicSolution::equilibrium(&LorenzParams::default(), 3, 1.0, 1.0);
        sol.x[2].b[0] = -1.0;
        let roots = downward_crossings(&sol, 27.0);
        assert_eq!(roots.len(), 1);
        let theta = roots[0];
        assert!(theta.min(std::f64::consts::TAU - theta) < 1e-12, "{theta}");
    }

    #[test]
    fn schedule_validation() {
        assert!(ContinuationSchedule::new(vec![]).validate().is_err());
        assert!(ContinuationSchedule::new(vec![0, 5]).validate().is_err());
        assert!(ContinuationSchedule::new(vec![5, 5]).validate().is_err());
        assert!(ContinuationSchedule::new(vec![5, 10]).validate().is_ok());
    }

    #[test]
    fn equilibrium_start_aborts() {
        let params = LorenzParams::default();
        let u = pack(&HarmonicSolution::equilibrium(&params, 5, 1.0, 1.0)).unwrap();
        let schedule = ContinuationSchedule {
            symmetric_start: false,
            ..ContinuationSchedule::new(vec![5])
        };
        let err = run(&params, &schedule, &u).unwrap_err();
        assert_eq!(err, Error::EquilibriumCollapse { h: 5 });
    }

    #[test]
    fn mismatched_start_vector() {
        let params = LorenzParams::default();
        let err = run(
            &params,
            &ContinuationSchedule::new(vec![6]),
            &initial_guess_h5(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Dimension { .. }));
    }
}
