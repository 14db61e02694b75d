//! Harmonic-balance equations for the Lorenz system.
//!
//! Each coordinate is replaced by a trigonometric polynomial with `h`
//! harmonics and a shared unknown frequency `w`. Projecting the residuals
//!
//! ```text
//! d1 = x1' - sigma (x2 - x1)
//! d2 = x2' - (r x1 - x2 - x1 x3)
//! d3 = x3' - (x1 x2 - b x3)
//! ```
//!
//! onto `cos(i w t)`, `sin(i w t)` (i = 1..h) and the constant gives `6h + 3`
//! equations in `6h + 4` unknowns. The anchor `x3(0) = anchor` closes the
//! system.
//!
//! Unknown layout: `[w, x1_0, x2_0, x3_0, c1[1..h], s1[1..h], c2, s2, c3, s3]`.
//! Equation layout: per coordinate `k`, the `h` cosine rows, the `h` sine
//! rows and the constant row; the anchor row comes last.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::trigpoly::TrigPolynomial;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LorenzParams {
    pub sigma: f64,
    pub r: f64,
    pub b: f64,
}

impl Default for LorenzParams {
    fn default() -> Self {
        LorenzParams {
            sigma: 10.0,
            r: 28.0,
            b: 8.0 / 3.0,
        }
    }
}

impl LorenzParams {
    pub fn validate(&self) -> Result<()> {
        let finite = self.sigma.is_finite() && self.r.is_finite() && self.b.is_finite();
        if !finite {
            return Err(Error::Config("Lorenz parameters must be finite".into()));
        }
        if self.b == 0.0 {
            return Err(Error::Config("b must be non-zero".into()));
        }
        if self.r <= 1.0 {
            return Err(Error::Config(format!(
                "r = {} must exceed 1 for the off-origin equilibria to exist",
                self.r
            )));
        }
        Ok(())
    }

    /// Height `r - 1` of the two off-origin equilibria.
    pub fn equilibrium_height(&self) -> f64 {
        self.r - 1.0
    }

    /// `sqrt(b (r - 1))`, the |x1| = |x2| coordinate of the off-origin equilibria.
    pub fn equilibrium_offset(&self) -> f64 {
        (self.b * (self.r - 1.0)).sqrt()
    }

    /// Velocity field of the Lorenz flow.
    pub fn rhs<T: Real>(&self, x: [T; 3]) -> [T; 3] {
        let (sigma, r, b) = (
            T::from_f64(self.sigma),
            T::from_f64(self.r),
            T::from_f64(self.b),
        );
        [
            sigma * (x[1] - x[0]),
            r * x[0] - x[1] - x[0] * x[2],
            x[0] * x[1] - b * x[2],
        ]
    }

    /// Jacobian of [`LorenzParams::rhs`] at `x`.
    pub fn rhs_jacobian(&self, x: [f64; 3]) -> [[f64; 3]; 3] {
        [
            [-self.sigma, self.sigma, 0.0],
            [self.r - x[2], -1.0, -x[0]],
            [x[1], x[0], -self.b],
        ]
    }
}

/// Candidate cycle: a frequency and one trigonometric polynomial per coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicSolution<T: Real = f64> {
    pub omega: T,
    pub x: [TrigPolynomial<T>; 3],
}

impl<T: Real> HarmonicSolution<T> {
    pub fn h(&self) -> usize {
        self.x[0].h()
    }

    pub fn period(&self) -> T {
        T::from_f64(2.0) * T::pi() / self.omega
    }

    pub fn state_at(&self, t: T) -> [T; 3] {
        [
            self.x[0].evaluate(self.omega, t),
            self.x[1].evaluate(self.omega, t),
            self.x[2].evaluate(self.omega, t),
        ]
    }

    pub fn initial_state(&self) -> [T; 3] {
        [
            self.x[0].value_at_zero(),
            self.x[1].value_at_zero(),
            self.x[2].value_at_zero(),
        ]
    }

    /// Largest amplitude magnitude over all coordinates.
    pub fn amplitude_norm(&self) -> f64 {
        self.x
            .iter()
            .flat_map(|p| p.a.iter().chain(&p.b))
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn pad(&self, h: usize) -> Result<Self> {
        Ok(HarmonicSolution {
            omega: self.omega,
            x: [self.x[0].pad(h)?, self.x[1].pad(h)?, self.x[2].pad(h)?],
        })
    }

    /// Same orbit with the time origin moved to phase `theta` (radians of
    /// the fundamental).
    pub fn shift_phase(&self, theta: T) -> Self {
        HarmonicSolution {
            omega: self.omega,
            x: [
                self.x[0].shift(theta),
                self.x[1].shift(theta),
                self.x[2].shift(theta),
            ],
        }
    }

    /// Rewrites a negative-frequency solution as the identical function
    /// with positive frequency (sine amplitudes change sign).
    pub fn with_positive_frequency(&self) -> Self {
        if self.omega >= T::zero() {
            return self.clone();
        }
        let flip = |p: &TrigPolynomial<T>| TrigPolynomial {
            a0: p.a0,
            a: p.a.clone(),
            b: p.b.iter().map(|&v| -v).collect(),
        };
        HarmonicSolution {
            omega: -self.omega,
            x: [flip(&self.x[0]), flip(&self.x[1]), flip(&self.x[2])],
        }
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U + Copy) -> HarmonicSolution<U> {
        HarmonicSolution {
            omega: f(self.omega),
            x: [self.x[0].map(f), self.x[1].map(f), self.x[2].map(f)],
        }
    }
}

impl HarmonicSolution<f64> {
    /// Zero-amplitude solution sitting on an off-origin equilibrium
    /// (`sign` > 0 picks the one with positive x1).
    pub fn equilibrium(params: &LorenzParams, h: usize, omega: f64, sign: f64) -> Self {
        let q = params.equilibrium_offset().copysign(sign);
        HarmonicSolution {
            omega,
            x: [
                TrigPolynomial::constant(q, h),
                TrigPolynomial::constant(q, h),
                TrigPolynomial::constant(params.equilibrium_height(), h),
            ],
        }
    }
}

/// Length of the unknown vector for `h` harmonics.
pub const fn unknown_count(h: usize) -> usize {
    6 * h + 4
}

/// Harmonic count encoded by an unknown vector of length `len`.
pub fn harmonics_for_len(len: usize) -> Result<usize> {
    if len < 4 || !(len - 4).is_multiple_of(6) {
        return Err(Error::Dimension {
            expected: unknown_count(len.saturating_sub(4) / 6),
            found: len,
        });
    }
    Ok((len - 4) / 6)
}

/// Index helpers for the flat unknown vector.
pub mod layout {
    pub const OMEGA: usize = 0;

    /// Constant term of coordinate `k` (0-based).
    pub const fn constant(k: usize) -> usize {
        1 + k
    }

    /// Cosine amplitude `c_{k+1, i}` (`i` 1-based).
    pub const fn cos(h: usize, k: usize, i: usize) -> usize {
        4 + 2 * k * h + (i - 1)
    }

    /// Sine amplitude `s_{k+1, i}` (`i` 1-based).
    pub const fn sin(h: usize, k: usize, i: usize) -> usize {
        4 + (2 * k + 1) * h + (i - 1)
    }

    /// Row of the cosine equation for coordinate `k`, harmonic `i`.
    pub const fn cos_row(h: usize, k: usize, i: usize) -> usize {
        k * (2 * h + 1) + (i - 1)
    }

    pub const fn sin_row(h: usize, k: usize, i: usize) -> usize {
        k * (2 * h + 1) + h + (i - 1)
    }

    pub const fn constant_row(h: usize, k: usize) -> usize {
        k * (2 * h + 1) + 2 * h
    }

    pub const fn anchor_row(h: usize) -> usize {
        6 * h + 3
    }
}

pub fn pack<T: Real>(sol: &HarmonicSolution<T>) -> Result<Vec<T>> {
    let h = sol.h();
    for p in &sol.x {
        if p.h() != h || p.b.len() != h {
            return Err(Error::Dimension {
                expected: h,
                found: p.h(),
            });
        }
    }
    let mut u = Vec::with_capacity(unknown_count(h));
    u.push(sol.omega);
    u.extend(sol.x.iter().map(|p| p.a0));
    for p in &sol.x {
        u.extend_from_slice(&p.a);
        u.extend_from_slice(&p.b);
    }
    Ok(u)
}

pub fn unpack<T: Real>(u: &[T], h: usize) -> Result<HarmonicSolution<T>> {
    if u.len() != unknown_count(h) {
        return Err(Error::Dimension {
            expected: unknown_count(h),
            found: u.len(),
        });
    }
    let coord = |k: usize| TrigPolynomial {
        a0: u[layout::constant(k)],
        a: u[layout::cos(h, k, 1)..layout::cos(h, k, 1) + h].to_vec(),
        b: u[layout::sin(h, k, 1)..layout::sin(h, k, 1) + h].to_vec(),
    };
    Ok(HarmonicSolution {
        omega: u[layout::OMEGA],
        x: [coord(0), coord(1), coord(2)],
    })
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::Dimension {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::Dimension {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok(self
            .data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// The closed `(6h + 4)`-equation harmonic-balance system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualSystem {
    pub params: LorenzParams,
    pub h: usize,
    pub anchor: f64,
}

impl ResidualSystem {
    /// System with the anchor at the equilibrium height `r - 1`.
    pub fn new(params: LorenzParams, h: usize) -> Self {
        ResidualSystem {
            params,
            h,
            anchor: params.equilibrium_height(),
        }
    }

    pub fn with_anchor(mut self, anchor: f64) -> Self {
        self.anchor = anchor;
        self
    }

    pub fn dim(&self) -> usize {
        unknown_count(self.h)
    }

    fn check_len(&self, u: &[f64]) -> Result<()> {
        if u.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: self.dim(),
                found: u.len(),
            })
        }
    }

    /// Harmonic-balance residual, one polynomial per coordinate.
    pub fn residual_polynomials(&self, sol: &HarmonicSolution) -> Result<[TrigPolynomial; 3]> {
        let h = self.h;
        let LorenzParams { sigma, r, b } = self.params;
        let [x1, x2, x3] = &sol.x;
        let w = sol.omega;
        let x1x3 = x1.multiply_truncated(x3, h)?;
        let x1x2 = x1.multiply_truncated(x2, h)?;

        let f1 = x2.sub(x1)?.scale(sigma);
        let f2 = x1.scale(r).sub(x2)?.sub(&x1x3)?;
        let f3 = x1x2.sub(&x3.scale(b))?;

        Ok([
            x1.differentiate(w).sub(&f1)?,
            x2.differentiate(w).sub(&f2)?,
            x3.differentiate(w).sub(&f3)?,
        ])
    }

    pub fn residual(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_len(u)?;
        let h = self.h;
        let sol = unpack(u, h)?;
        let deltas = self.residual_polynomials(&sol)?;
        let mut out = vec![0.0; self.dim()];
        for (k, d) in deltas.iter().enumerate() {
            for i in 1..=h {
                out[layout::cos_row(h, k, i)] = d.a[i - 1];
                out[layout::sin_row(h, k, i)] = d.b[i - 1];
            }
            out[layout::constant_row(h, k)] = d.a0;
        }
        out[layout::anchor_row(h)] = sol.x[2].value_at_zero() - self.anchor;
        Ok(out)
    }

    /// Analytic Jacobian of [`ResidualSystem::residual`].
    ///
    /// The products are bilinear, so the derivative of `p * q` with respect
    /// to a coefficient of `p` is the truncated product of the matching unit
    /// polynomial with `q`.
    pub fn jacobian(&self, u: &[f64]) -> Result<Matrix> {
        self.check_len(u)?;
        let h = self.h;
        let n = self.dim();
        let LorenzParams { sigma, r, b } = self.params;
        let sol = unpack(u, h)?;
        let w = sol.omega;
        let mut jac = Matrix::zeros(n, n);

        // Column of coefficient `j` (in [a0, a.., b..] order) of coordinate `k`.
        let col = |k: usize, j: usize| -> usize {
            if j == 0 {
                layout::constant(k)
            } else if j <= h {
                layout::cos(h, k, j)
            } else {
                layout::sin(h, k, j - h)
            }
        };
        // Row of coefficient `j` of residual `k`.
        let row = |k: usize, j: usize| -> usize {
            if j == 0 {
                layout::constant_row(h, k)
            } else if j <= h {
                layout::cos_row(h, k, j)
            } else {
                layout::sin_row(h, k, j - h)
            }
        };

        // Linear part: derivative and the linear right-hand-side terms.
        // Coefficient matrix of residual k in the coordinates (x1, x2, x3).
        let linear = [[sigma, -sigma, 0.0], [-r, 1.0, 0.0], [0.0, 0.0, b]];
        for k in 0..3 {
            for (m, &coef) in linear[k].iter().enumerate() {
                if coef != 0.0 {
                    for j in 0..=2 * h {
                        jac[(row(k, j), col(m, j))] += coef;
                    }
                }
            }
            // d/dt: cos row i gets i w s_i, sin row i gets -i w c_i.
            for i in 1..=h {
                let iw = i as f64 * w;
                jac[(layout::cos_row(h, k, i), layout::sin(h, k, i))] += iw;
                jac[(layout::sin_row(h, k, i), layout::cos(h, k, i))] -= iw;
                jac[(layout::cos_row(h, k, i), layout::OMEGA)] = i as f64 * sol.x[k].b[i - 1];
                jac[(layout::sin_row(h, k, i), layout::OMEGA)] = -(i as f64) * sol.x[k].a[i - 1];
            }
        }

        // Quadratic part: +x1 x3 in residual 2, -x1 x2 in residual 3.
        let mut add_product =
            |target: usize, sign: f64, var: usize, other: &TrigPolynomial| -> Result<()> {
                for j in 0..=2 * h {
                    let mut c = vec![0.0; 2 * h + 1];
                    c[j] = 1.0;
                    let unit = TrigPolynomial::from_coefficients(&c)?;
                    let prod = unit.multiply_truncated(other, h)?;
                    for (jr, v) in prod.coefficients().into_iter().enumerate() {
                        if v != 0.0 {
                            jac[(row(target, jr), col(var, j))] += sign * v;
                        }
                    }
                }
                Ok(())
            };
        add_product(1, 1.0, 0, &sol.x[2])?;
        add_product(1, 1.0, 2, &sol.x[0])?;
        add_product(2, -1.0, 0, &sol.x[1])?;
        add_product(2, -1.0, 1, &sol.x[0])?;

        let anchor = layout::anchor_row(h);
        jac[(anchor, layout::constant(2))] = 1.0;
        for i in 1..=h {
            jac[(anchor, layout::cos(h, 2, i))] = 1.0;
        }
        Ok(jac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_vector(h: usize, seed: u64) -> Vec<f64> {
        // Small deterministic generator; the integration tests use rand.
        let mut state = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (0..unknown_count(h))
            .map(|_| {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                ((state >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 2.0
            })
            .collect()
    }

    #[test]
    fn layout_positions() {
        let h = 3;
        let u: Vec<f64> = (0..unknown_count(h)).map(|i| i as f64).collect();
        let sol = unpack(&u, h).unwrap();
        assert_eq!(sol.omega, 0.0);
        assert_eq!(sol.x[0].a[0], u[4]);
        assert_eq!(sol.x[0].b[0], u[4 + h]);
        assert_eq!(sol.x[2].b[h - 1], u[unknown_count(h) - 1]);
        assert_eq!(pack(&sol).unwrap(), u);
    }

    #[test]
    fn unpack_rejects_bad_length() {
        assert!(matches!(
            unpack(&[0.0; 9], 1),
            Err(Error::Dimension {
                expected: 10,
                found: 9
            })
        ));
        assert!(harmonics_for_len(11).is_err());
        assert_eq!(harmonics_for_len(214).unwrap(), 35);
    }

    #[test]
    fn equilibrium_pack_has_zero_amplitudes() {
        let params = LorenzParams::default();
        let u = pack(&HarmonicSolution::equilibrium(&params, 4, 2.0, 1.0)).unwrap();
        assert!(u[4..].iter().all(|&v| v == 0.0));
        assert!((u[1] - 72f64.sqrt()).abs() < 1e-15);
        assert!((u[1] - 8.48528137423857).abs() < 1e-13);
    }

    #[test]
    fn equilibrium_residual_vanishes() {
        let params = LorenzParams::default();
        for sign in [1.0, -1.0] {
            let sys = ResidualSystem::new(params, 3);
            let u = pack(&HarmonicSolution::equilibrium(&params, 3, 0.7, sign)).unwrap();
            let res = sys.residual(&u).unwrap();
            assert!(res.iter().all(|v| v.abs() < 1e-13), "{res:?}");
        }
    }

    #[test]
    fn residual_rejects_wrong_length() {
        let sys = ResidualSystem::new(LorenzParams::default(), 2);
        assert!(sys.residual(&[0.0; 15]).is_err());
        assert!(sys.jacobian(&[0.0; 17]).is_err());
    }

    #[test]
    fn anchor_row_of_jacobian() {
        let h = 4;
        let sys = ResidualSystem::new(LorenzParams::default(), h);
        let jac = sys.jacobian(&sample_vector(h, 3)).unwrap();
        let row = jac.row(layout::anchor_row(h));
        for (j, &v) in row.iter().enumerate() {
            let expect = if j == layout::constant(2)
                || (layout::cos(h, 2, 1)..=layout::cos(h, 2, h)).contains(&j)
            {
                1.0
            } else {
                0.0
            };
            assert_eq!(v, expect, "column {j}");
        }
    }

    #[test]
    fn omega_column_of_first_block() {
        let h = 3;
        let u = sample_vector(h, 7);
        let jac = ResidualSystem::new(LorenzParams::default(), h)
            .jacobian(&u)
            .unwrap();
        for i in 1..=h {
            assert_eq!(
                jac[(layout::cos_row(h, 0, i), 0)],
                i as f64 * u[layout::sin(h, 0, i)]
            );
        }
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let h = 3;
        let sys = ResidualSystem::new(LorenzParams::default(), h);
        let u = sample_vector(h, 11);
        let jac = sys.jacobian(&u).unwrap();
        for k in 0..u.len() {
            let step = 1e-6 * u[k].abs().max(1.0);
            let mut up = u.clone();
            let mut dn = u.clone();
            up[k] += step;
            dn[k] -= step;
            let fu = sys.residual(&up).unwrap();
            let fd = sys.residual(&dn).unwrap();
            for j in 0..u.len() {
                let fdiff = (fu[j] - fd[j]) / (2.0 * step);
                assert!((fdiff - jac[(j, k)]).abs() < 1e-5, "({j},{k})");
            }
        }
    }

    #[test]
    fn params_validation() {
        assert!(LorenzParams::default().validate().is_ok());
        assert!(LorenzParams {
            b: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(LorenzParams {
            r: 0.5,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn rhs_trace_is_constant() {
        let p = LorenzParams::default();
        for x in [[1.0, 2.0, 3.0], [-7.0, 0.5, 40.0]] {
            let j = p.rhs_jacobian(x);
            let trace = j[0][0] + j[1][1] + j[2][2];
            assert!((trace + (p.sigma + 1.0 + p.b)).abs() < 1e-14);
        }
    }
}
