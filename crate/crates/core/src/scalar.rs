//! Real scalar types used by the solver (binary64) and the verifier
//! (double-double, about 106 bits of mantissa).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

/// Minimal real-field interface shared by `f64` and [`ExtReal`].
pub trait Real:
    Copy
    + fmt::Debug
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn pi() -> Self;

    #[inline]
    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    #[inline]
    fn one() -> Self {
        Self::from_f64(1.0)
    }

    #[inline]
    fn from_usize(n: usize) -> Self {
        Self::from_f64(n as f64)
    }
}

impl Real for f64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    #[inline]
    fn pi() -> Self {
        std::f64::consts::PI
    }
}

#[inline(always)]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Assumes |a| >= |b|.
#[inline(always)]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline(always)]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Unevaluated sum `hi + lo` of two binary64 numbers with `|lo| <= ulp(hi)/2`.
///
/// Arithmetic follows the accurate double-double algorithms of Dekker and
/// Bailey. The unit roundoff is 2^-104 for addition and multiplication.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct ExtReal {
    hi: f64,
    lo: f64,
}

impl ExtReal {
    /// Machine epsilon of the representation (2^-104).
    pub const EPSILON: f64 = 4.930380657631324e-32;
    pub const ZERO: ExtReal = ExtReal { hi: 0.0, lo: 0.0 };
    pub const ONE: ExtReal = ExtReal { hi: 1.0, lo: 0.0 };
    pub const PI: ExtReal = ExtReal {
        hi: std::f64::consts::PI,
        lo: 1.2246467991473532e-16,
    };
    const TWO_PI: ExtReal = ExtReal {
        hi: std::f64::consts::TAU,
        lo: 2.4492935982947064e-16,
    };
    const FRAC_PI_2: ExtReal = ExtReal {
        hi: std::f64::consts::FRAC_PI_2,
        lo: 6.123233995736766e-17,
    };

    pub const fn new(x: f64) -> Self {
        ExtReal { hi: x, lo: 0.0 }
    }

    /// Builds a normalized value from an arbitrary pair.
    pub fn from_parts(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        ExtReal { hi, lo }
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn recip(self) -> Self {
        ExtReal::ONE / self
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, mut n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut base = self;
        let mut acc = ExtReal::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc *= base;
            }
            base *= base;
            n >>= 1;
        }
        acc
    }

    /// Parses a decimal literal (optional sign, digits, point, exponent)
    /// with double-double accuracy.
    pub fn parse_decimal(s: &str) -> Option<Self> {
        let s = s.trim();
        let (neg, body) = match s.as_bytes().first()? {
            b'-' => (true, &s[1..]),
            b'+' => (false, &s[1..]),
            _ => (false, s),
        };
        let (mantissa, exp) = match body.find(['e', 'E']) {
            Some(pos) => (&body[..pos], body[pos + 1..].parse::<i32>().ok()?),
            None => (body, 0),
        };
        let mut value = ExtReal::ZERO;
        let mut scale = exp;
        let mut seen_point = false;
        let mut any_digit = false;
        let ten = ExtReal::new(10.0);
        for c in mantissa.chars() {
            match c {
                '0'..='9' => {
                    any_digit = true;
                    value = value * ten + ExtReal::new(f64::from(c as u8 - b'0'));
                    if seen_point {
                        scale -= 1;
                    }
                }
                '.' if !seen_point => seen_point = true,
                _ => return None,
            }
        }
        if !any_digit {
            return None;
        }
        value *= ten.powi(scale);
        Some(if neg { -value } else { value })
    }

    // sin and cos of |x| <= pi/4 by their Taylor series.
    fn sin_cos_reduced(x: ExtReal) -> (ExtReal, ExtReal) {
        let x2 = x * x;
        let mut sin = x;
        let mut cos = ExtReal::ONE;
        let mut term_s = x;
        let mut term_c = ExtReal::ONE;
        let mut k = 1.0;
        loop {
            term_s = -term_s * x2 / ExtReal::new((2.0 * k) * (2.0 * k + 1.0));
            term_c = -term_c * x2 / ExtReal::new((2.0 * k - 1.0) * (2.0 * k));
            sin += term_s;
            cos += term_c;
            if term_s.hi.abs() < 1e-34 && term_c.hi.abs() < 1e-34 {
                break;
            }
            k += 1.0;
        }
        (sin, cos)
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtReal({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&(self.hi + self.lo), f)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::new(x)
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;
    #[inline]
    fn neg(self) -> ExtReal {
        ExtReal {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    #[inline]
    fn add(self, rhs: ExtReal) -> ExtReal {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        ExtReal { hi, lo }
    }
}

impl Sub for ExtReal {
    type Output = ExtReal;
    #[inline]
    fn sub(self, rhs: ExtReal) -> ExtReal {
        self + (-rhs)
    }
}

impl Mul for ExtReal {
    type Output = ExtReal;
    #[inline]
    fn mul(self, rhs: ExtReal) -> ExtReal {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p, e);
        ExtReal { hi, lo }
    }
}

impl Div for ExtReal {
    type Output = ExtReal;
    #[inline]
    fn div(self, rhs: ExtReal) -> ExtReal {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * ExtReal::new(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * ExtReal::new(q2);
        let q3 = r.hi / rhs.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        ExtReal { hi, lo } + ExtReal::new(q3)
    }
}

macro_rules! assign_ops {
    ($($tr:ident $method:ident $op:tt),*) => {$(
        impl $tr for ExtReal {
            #[inline]
            fn $method(&mut self, rhs: ExtReal) {
                *self = *self $op rhs;
            }
        }
    )*};
}

assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /);

impl Real for ExtReal {
    #[inline]
    fn from_f64(x: f64) -> Self {
        ExtReal::new(x)
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                ExtReal::ZERO
            } else {
                ExtReal::new(f64::NAN)
            };
        }
        // One Newton correction on top of the binary64 root.
        let x = ExtReal::new(self.hi.sqrt());
        x + (self - x * x) / (ExtReal::new(2.0) * x)
    }

    fn sin_cos(self) -> (Self, Self) {
        if !self.is_finite() {
            return (ExtReal::new(f64::NAN), ExtReal::new(f64::NAN));
        }
        let turns = (self / ExtReal::TWO_PI).hi.round();
        let r = self - ExtReal::TWO_PI * ExtReal::new(turns);
        let quadrant = (r / ExtReal::FRAC_PI_2).hi.round();
        let r = r - ExtReal::FRAC_PI_2 * ExtReal::new(quadrant);
        let (s, c) = ExtReal::sin_cos_reduced(r);
        match quadrant as i64 {
            0 => (s, c),
            1 => (c, -s),
            -1 => (-c, s),
            _ => (-s, -c),
        }
    }

    fn pi() -> Self {
        ExtReal::PI
    }
}
