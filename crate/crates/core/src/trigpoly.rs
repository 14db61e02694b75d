//! Truncated trigonometric polynomials
//!
//! `p(t) = a0 + sum_{i=1..h} (a_i cos(i w t) + b_i sin(i w t))`
//!
//! The fundamental frequency `w` is not stored: every polynomial taking part
//! in one computation shares it, and it is passed to the operations that need
//! it (evaluation and differentiation).

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct TrigPolynomial<T: Real = f64> {
    pub a0: T,
    /// Cosine amplitudes; `a[i - 1]` multiplies `cos(i w t)`.
    pub a: Vec<T>,
    /// Sine amplitudes; `b[i - 1]` multiplies `sin(i w t)`.
    pub b: Vec<T>,
}

impl<T: Real> TrigPolynomial<T> {
    pub fn zero(h: usize) -> Self {
        TrigPolynomial {
            a0: T::zero(),
            a: vec![T::zero(); h],
            b: vec![T::zero(); h],
        }
    }

    pub fn constant(c: T, h: usize) -> Self {
        TrigPolynomial {
            a0: c,
            ..Self::zero(h)
        }
    }

    pub fn new(a0: T, a: Vec<T>, b: Vec<T>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Dimension {
                expected: a.len(),
                found: b.len(),
            });
        }
        Ok(TrigPolynomial { a0, a, b })
    }

    /// Harmonic count.
    #[inline]
    pub fn h(&self) -> usize {
        self.a.len()
    }

    /// Cosine amplitude of harmonic `i` (0 is the constant term); zero past `h`.
    #[inline]
    pub fn cos_coef(&self, i: usize) -> T {
        match i {
            0 => self.a0,
            i if i <= self.h() => self.a[i - 1],
            _ => T::zero(),
        }
    }

    /// Sine amplitude of harmonic `i`; zero for `i == 0` and past `h`.
    #[inline]
    pub fn sin_coef(&self, i: usize) -> T {
        match i {
            0 => T::zero(),
            i if i <= self.h() => self.b[i - 1],
            _ => T::zero(),
        }
    }

    pub fn evaluate(&self, omega: T, t: T) -> T {
        let (s1, c1) = (omega * t).sin_cos();
        // cos(i x), sin(i x) by the angle-addition recurrence.
        let (mut c, mut s) = (c1, s1);
        let mut acc = self.a0;
        for (ai, bi) in self.a.iter().zip(&self.b) {
            acc += *ai * c + *bi * s;
            let next_c = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = next_c;
        }
        acc
    }

    /// Value at `t = 0`, exact up to summation rounding.
    pub fn value_at_zero(&self) -> T {
        self.a.iter().fold(self.a0, |acc, &ai| acc + ai)
    }

    pub fn differentiate(&self, omega: T) -> Self {
        let mut out = Self::zero(self.h());
        for i in 0..self.h() {
            let k = T::from_usize(i + 1) * omega;
            out.a[i] = k * self.b[i];
            out.b[i] = -(k * self.a[i]);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same(self.h(), other.h())?;
        Ok(TrigPolynomial {
            a0: self.a0 + other.a0,
            a: self.a.iter().zip(&other.a).map(|(&x, &y)| x + y).collect(),
            b: self.b.iter().zip(&other.b).map(|(&x, &y)| x + y).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-T::one()))
    }

    pub fn scale(&self, s: T) -> Self {
        TrigPolynomial {
            a0: self.a0 * s,
            a: self.a.iter().map(|&x| x * s).collect(),
            b: self.b.iter().map(|&x| x * s).collect(),
        }
    }

    /// Appends zero amplitudes up to `h_new` harmonics.
    pub fn pad(&self, h_new: usize) -> Result<Self> {
        if h_new < self.h() {
            return Err(Error::Dimension {
                expected: self.h(),
                found: h_new,
            });
        }
        let mut out = self.clone();
        out.a.resize(h_new, T::zero());
        out.b.resize(h_new, T::zero());
        Ok(out)
    }

    /// Keeps the first `h_new` harmonics.
    pub fn truncate(&self, h_new: usize) -> Self {
        let h_new = h_new.min(self.h());
        TrigPolynomial {
            a0: self.a0,
            a: self.a[..h_new].to_vec(),
            b: self.b[..h_new].to_vec(),
        }
    }

    /// Time shift: returns the polynomial `t -> p(t + theta / w)`.
    pub fn shift(&self, theta: T) -> Self {
        let (s1, c1) = theta.sin_cos();
        let (mut c, mut s) = (c1, s1);
        let mut out = self.clone();
        for i in 0..self.h() {
            let (a, b) = (self.a[i], self.b[i]);
            out.a[i] = a * c + b * s;
            out.b[i] = b * c - a * s;
            let next_c = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = next_c;
        }
        out
    }

    /// Product of two polynomials with every harmonic above `h_out` dropped.
    ///
    /// Both factors must carry the same number of harmonics; `h_out` may be
    /// smaller or larger (up to twice that keeps the product exact). Mirror-image terms
    /// (`m` and `i - m` in the inner sum, `m` and `m + i` across the outer
    /// sums) are added in pairs so that the result is bitwise independent
    /// of the order of the factors.
    pub fn multiply_truncated(&self, other: &Self, h_out: usize) -> Result<Self> {
        check_same(self.h(), other.h())?;
        let h = self.h();
        let half = T::from_f64(0.5);
        let (a, b) = (|i| self.cos_coef(i), |i| self.sin_coef(i));
        let (ca, cb) = (|i| other.cos_coef(i), |i| other.sin_coef(i));

        let mut out = Self::zero(h_out);
        let mut s0 = T::zero();
        for m in 1..=h {
            s0 += a(m) * ca(m) + b(m) * cb(m);
        }
        out.a0 = a(0) * ca(0) + half * s0;

        for i in 1..=h_out {
            // Sum over m = 1..h-i paired with its mirror m + i.
            let mut cos_outer = T::zero();
            let mut sin_outer = T::zero();
            for m in 1..=h.saturating_sub(i) {
                cos_outer +=
                    (a(m) * ca(m + i) + b(m) * cb(m + i)) + (a(m + i) * ca(m) + b(m + i) * cb(m));
                sin_outer +=
                    (a(m) * cb(m + i) - b(m) * ca(m + i)) + (b(m + i) * ca(m) - a(m + i) * cb(m));
            }
            // Sum over m = 1..i-1 paired with its mirror i - m.
            let mut cos_inner = T::zero();
            let mut sin_inner = T::zero();
            for m in i.saturating_sub(h).max(1)..=(i - 1) / 2 {
                let n = i - m;
                cos_inner += (a(m) * ca(n) - b(m) * cb(n)) + (a(n) * ca(m) - b(n) * cb(m));
                sin_inner += (a(m) * cb(n) + b(m) * ca(n)) + (a(n) * cb(m) + b(n) * ca(m));
            }
            if i % 2 == 0 {
                let m = i / 2;
                cos_inner += a(m) * ca(m) - b(m) * cb(m);
                sin_inner += a(m) * cb(m) + b(m) * ca(m);
            }
            out.a[i - 1] = (a(0) * ca(i) + a(i) * ca(0)) + half * (cos_outer + cos_inner);
            out.b[i - 1] = (a(0) * cb(i) + b(i) * ca(0)) + half * (sin_outer + sin_inner);
        }
        Ok(out)
    }

    /// Coefficients in the order `[a0, a_1..a_h, b_1..b_h]`.
    pub fn coefficients(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(2 * self.h() + 1);
        v.push(self.a0);
        v.extend_from_slice(&self.a);
        v.extend_from_slice(&self.b);
        v
    }

    /// Inverse of [`TrigPolynomial::coefficients`].
    pub fn from_coefficients(c: &[T]) -> Result<Self> {
        if c.is_empty() || c.len().is_multiple_of(2) {
            return Err(Error::Dimension {
                expected: c.len().max(1) | 1,
                found: c.len(),
            });
        }
        let h = (c.len() - 1) / 2;
        Ok(TrigPolynomial {
            a0: c[0],
            a: c[1..=h].to_vec(),
            b: c[h + 1..].to_vec(),
        })
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> TrigPolynomial<U> {
        TrigPolynomial {
            a0: f(self.a0),
            a: self.a.iter().map(|&x| f(x)).collect(),
            b: self.b.iter().map(|&x| f(x)).collect(),
        }
    }
}

fn check_same(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
