//! On-disk form of a computed cycle and text exports of it.
//!
//! Solution files are JSON. Floats are written in shortest round-trip form
//! and parsed with correct rounding, so a save/load cycle is bit-exact.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hbsystem::{HarmonicSolution, LorenzParams};
use crate::trigpoly::TrigPolynomial;

pub const SCHEMA: &str = "hbcycle-solution/1";

/// Default number of trajectory samples per period.
pub const DEFAULT_SAMPLES: usize = 2048;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Amplitudes {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub generator: String,
    pub schedule: Vec<usize>,
    /// Newton iterations spent at each step of the schedule.
    pub iterations: Vec<usize>,
    pub newton_tol: f64,
    pub residual_norm: f64,
    /// Seconds since the Unix epoch.
    pub created: u64,
}

impl Provenance {
    pub fn now(
        schedule: Vec<usize>,
        iterations: Vec<usize>,
        newton_tol: f64,
        residual_norm: f64,
    ) -> Self {
        let created = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Provenance {
            generator: concat!("hbcycle ", env!("CARGO_PKG_VERSION")).to_string(),
            schedule,
            iterations,
            newton_tol,
            residual_norm,
            created,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub schema: String,
    pub params: LorenzParams,
    pub anchor: f64,
    pub h: usize,
    pub omega: f64,
    pub period: f64,
    /// Constant terms of `x1`, `x2`, `x3`.
    pub constants: [f64; 3],
    pub harmonics: [Amplitudes; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl SolutionFile {
    pub fn new(
        sol: &HarmonicSolution,
        params: LorenzParams,
        anchor: f64,
        provenance: Option<Provenance>,
    ) -> Self {
        let amps = |p: &TrigPolynomial| Amplitudes {
            cos: p.a.clone(),
            sin: p.b.clone(),
        };
        SolutionFile {
            schema: SCHEMA.to_string(),
            params,
            anchor,
            h: sol.h(),
            omega: sol.omega,
            period: sol.period(),
            constants: [sol.x[0].a0, sol.x[1].a0, sol.x[2].a0],
            harmonics: [amps(&sol.x[0]), amps(&sol.x[1]), amps(&sol.x[2])],
            provenance,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution files always serialize") + "\n"
    }

    /// Parses and validates a solution file. Errors carry the line and
    /// column of the offending token or field.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SolutionFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.validate()?;
        Ok(file)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(Error::Parse(format!(
                "field `schema`: expected \"{SCHEMA}\", found \"{}\"",
                self.schema
            )));
        }
        self.params.validate()?;
        if self.h == 0 {
            return Err(Error::Parse("field `h`: must be at least 1".into()));
        }
        for (k, amps) in self.harmonics.iter().enumerate() {
            for (name, v) in [("cos", &amps.cos), ("sin", &amps.sin)] {
                if v.len() != self.h {
                    return Err(Error::Parse(format!(
                        "field `harmonics[{k}].{name}`: expected {} entries, found {}",
                        self.h,
                        v.len()
                    )));
                }
            }
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::Parse(format!(
                "field `omega`: {} is not a positive frequency",
                self.omega
            )));
        }
        let expected = TAU / self.omega;
        if (self.period - expected).abs() > 4.0 * f64::EPSILON * expected {
            return Err(Error::Parse(format!(
                "field `period`: {} disagrees with 2 pi / omega = {expected}",
                self.period
            )));
        }
        Ok(())
    }

    pub fn solution(&self) -> HarmonicSolution {
        let poly = |k: usize| TrigPolynomial {
            a0: self.constants[k],
            a: self.harmonics[k].cos.clone(),
            b: self.harmonics[k].sin.clone(),
        };
        HarmonicSolution {
            omega: self.omega,
            x: [poly(0), poly(1), poly(2)],
        }
    }
}

/// `i,c,s` rows for coordinate `k`; row 0 holds the constant term.
pub fn amplitude_table_csv(sol: &HarmonicSolution, k: usize) -> String {
    let p = &sol.x[k];
    let mut out = String::from("i,c,s\n");
    writeln!(out, "0,{},0", p.a0).unwrap();
    for i in 1..=p.h() {
        writeln!(out, "{i},{},{}", p.a[i - 1], p.b[i - 1]).unwrap();
    }
    out
}

/// `samples` states at uniform times over one period, endpoint excluded.
pub fn sample_trajectory(sol: &HarmonicSolution, samples: usize) -> Result<Vec<(f64, [f64; 3])>> {
    if samples < 2 {
        return Err(Error::Config(format!(
            "sample count {samples} must be at least 2"
        )));
    }
    let period = sol.period();
    Ok((0..samples)
        .map(|j| {
            let t = period * j as f64 / samples as f64;
            (t, sol.state_at(t))
        })
        .collect())
}

pub fn trajectory_csv(sol: &HarmonicSolution, samples: usize) -> Result<String> {
    let mut out = String::from("t,x1,x2,x3\n");
    for (t, x) in sample_trajectory(sol, samples)? {
        writeln!(out, "{t},{},{},{}", x[0], x[1], x[2]).unwrap();
    }
    Ok(out)
}

/// Closed polyline of the `(x1, x3)` projection as an SVG 1.1 document.
pub fn projection_svg(sol: &HarmonicSolution, samples: usize) -> Result<String> {
    let pts = sample_trajectory(sol, samples)?;
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for (_, x) in &pts {
        xmin = xmin.min(x[0]);
        xmax = xmax.max(x[0]);
        ymin = ymin.min(x[2]);
        ymax = ymax.max(x[2]);
    }
    let pad = 0.05 * (xmax - xmin).max(ymax - ymin).max(1e-9);
    let (w, h) = (xmax - xmin + 2.0 * pad, ymax - ymin + 2.0 * pad);
    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="640" height="{:.0}" viewBox="{} {} {} {}">"#,
        640.0 * h / w,
        xmin - pad,
        -(ymax + pad),
        w,
        h
    )
    .unwrap();
    writeln!(out, "<title>x1-x3 projection, T = {}</title>", sol.period()).unwrap();
    // x3 grows upward, so plot -x3.
    let points: Vec<String> = pts
        .iter()
        .map(|(_, x)| format!("{:.6},{:.6}", x[0], -x[2]))
        .collect();
    writeln!(
        out,
        r#"<polygon fill="none" stroke="black" stroke-width="{}" points="{}"/>"#,
        w / 400.0,
        points.join(" ")
    )
    .unwrap();
    out.push_str("</svg>\n");
    Ok(out)
}
