//! Exact arithmetic in the real quadratic field `Q(lambda)`.
//!
//! `lambda` is the larger root of `x^2 - t x + d`, so every element is stored as
//! `a + b*lambda` with rational `a, b`, reduced through `lambda^2 = t*lambda - d`.
//! The star map is the Galois conjugation `lambda -> t - lambda`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::subst::{is_primitive, IntMatrix2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct QuadField {
    pub trace: i64,
    pub det: i64,
}

impl QuadField {
    pub fn new(trace: i64, det: i64) -> Result<Self> {
        let disc = trace * trace - 4 * det;
        if disc <= 0 || is_square(disc) {
            return Err(Error::DegenerateField { trace, det });
        }
        Ok(QuadField { trace, det })
    }

    /// Discriminant `t^2 - 4d`.
    pub fn disc(&self) -> i64 {
        self.trace * self.trace - 4 * self.det
    }

    pub fn num(&self, a: impl Into<BigRational>, b: impl Into<BigRational>) -> QuadNum {
        QuadNum {
            a: a.into(),
            b: b.into(),
            field: *self,
        }
    }

    pub fn int(&self, a: i64, b: i64) -> QuadNum {
        self.num(rat(a), rat(b))
    }

    pub fn zero(&self) -> QuadNum {
        self.int(0, 0)
    }

    pub fn one(&self) -> QuadNum {
        self.int(1, 0)
    }

    pub fn lambda(&self) -> QuadNum {
        self.int(0, 1)
    }

    pub fn lambda_star(&self) -> QuadNum {
        self.lambda().star()
    }

    /// `sqrt(disc)` as a field element: `2*lambda - t`.
    pub fn sqrt_disc(&self) -> QuadNum {
        self.int(-self.trace, 2)
    }
}

fn is_square(n: i64) -> bool {
    if n < 0 {
        return false;
    }
    let r = (n as f64).sqrt() as i64;
    (r.saturating_sub(1)..=r + 1).any(|x| x >= 0 && x * x == n)
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Field of the characteristic polynomial of a primitive matrix.
pub fn make_field(m: &IntMatrix2) -> Result<QuadField> {
    if !is_primitive(m) {
        return Err(Error::NotPrimitive);
    }
    QuadField::new(m.trace(), m.det())
}

/// `lambda > 1`, `|lambda*| < 1` and `|d| = 1`.
pub fn is_pisot_unit(f: &QuadField) -> bool {
    let one = f.one();
    let ls = f.lambda_star();
    f.det.abs() == 1
        && (f.lambda() - &one).sign() > 0
        && (&ls - &one).sign() < 0
        && (&ls + &one).sign() > 0
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadNum {
    pub a: BigRational,
    pub b: BigRational,
    pub field: QuadField,
}

impl QuadNum {
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn same_field(&self, o: &QuadNum) -> Result<()> {
        if self.field == o.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn checked_add(&self, o: &QuadNum) -> Result<QuadNum> {
        self.same_field(o)?;
        Ok(self.field.num(&self.a + &o.a, &self.b + &o.b))
    }

    pub fn checked_sub(&self, o: &QuadNum) -> Result<QuadNum> {
        self.same_field(o)?;
        Ok(self.field.num(&self.a - &o.a, &self.b - &o.b))
    }

    pub fn checked_mul(&self, o: &QuadNum) -> Result<QuadNum> {
        self.same_field(o)?;
        let t = rat(self.field.trace);
        let d = rat(self.field.det);
        let bb = &self.b * &o.b;
        let a = &self.a * &o.a - &bb * &d;
        let b = &self.a * &o.b + &self.b * &o.a + &bb * &t;
        Ok(self.field.num(a, b))
    }

    pub fn checked_div(&self, o: &QuadNum) -> Result<QuadNum> {
        self.same_field(o)?;
        self.checked_mul(&o.inv()?)
    }

    /// Field norm `x * x^star`, a rational.
    pub fn norm(&self) -> BigRational {
        let t = rat(self.field.trace);
        let d = rat(self.field.det);
        &self.a * &self.a + &self.a * &self.b * t + &self.b * &self.b * d
    }

    pub fn inv(&self) -> Result<QuadNum> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        let s = self.star();
        Ok(self.field.num(s.a / &n, s.b / n))
    }

    /// Galois conjugate: `(a + b*lambda)^star = (a + b*t) - b*lambda`.
    pub fn star(&self) -> QuadNum {
        let t = rat(self.field.trace);
        self.field.num(&self.a + &self.b * t, -&self.b)
    }

    /// Exact sign, decided by comparing `p^2` with `q^2 * disc` where
    /// `x = p + q*sqrt(disc)`.
    pub fn sign(&self) -> i32 {
        let two = rat(2);
        let p = &self.a + &self.b * rat(self.field.trace) / &two;
        let q = &self.b / two;
        let sp = signum(&p);
        let sq = signum(&q);
        if sq == 0 {
            return sp;
        }
        if sp == 0 || sp == sq {
            return sq;
        }
        let lhs = &p * &p;
        let rhs = &q * &q * rat(self.field.disc());
        if lhs > rhs {
            sp
        } else {
            sq
        }
    }

    pub fn abs(&self) -> QuadNum {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn min(self, o: QuadNum) -> QuadNum {
        if self <= o {
            self
        } else {
            o
        }
    }

    pub fn max(self, o: QuadNum) -> QuadNum {
        if self >= o {
            self
        } else {
            o
        }
    }

    /// Rational approximation with error below `eps`, returned as `f64`.
    pub fn to_real(&self, eps: f64) -> f64 {
        self.to_rational(eps).to_f64().unwrap_or(f64::NAN)
    }

    /// Rational approximation with error below `eps`.
    pub fn to_rational(&self, eps: f64) -> BigRational {
        if self.b.is_zero() {
            return self.a.clone();
        }
        // error is |b|/2 * 2^-k from truncating sqrt(disc) at k bits
        let bmag = self.b.abs().to_f64().unwrap_or(f64::MAX).max(1e-300);
        let eps = eps.max(1e-300);
        let k = ((bmag / eps).log2().ceil().max(0.0) as u32) + 2;
        let scaled = BigInt::from(self.field.disc()) << (2 * k as usize);
        let s = scaled.sqrt();
        let sqrt_d = BigRational::new(s, BigInt::one() << k as usize);
        let lam = (rat(self.field.trace) + sqrt_d) / rat(2);
        &self.a + &self.b * lam
    }

    /// Double-precision value, accurate to the last few ulps.
    pub fn approx(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mag = self.a.abs().to_f64().unwrap_or(1.0) + self.b.abs().to_f64().unwrap_or(1.0);
        let mut eps = mag.max(1.0) * 1e-18;
        let mut v = self.to_real(eps);
        // cancellation: tighten until the error is relative to the value itself
        while v.abs() * 1e-18 < eps && eps > 1e-300 {
            eps = (v.abs() * 1e-18).max(eps * 1e-30).max(1e-300);
            v = self.to_real(eps);
        }
        v
    }

    /// Coordinates `(m, n)` with `self = m + n*beta`, if they are rational.
    pub fn coords_in_basis(&self, beta: &QuadNum) -> Option<(BigRational, BigRational)> {
        if beta.b.is_zero() {
            return None;
        }
        let n = &self.b / &beta.b;
        let m = &self.a - &n * &beta.a;
        Some((m, n))
    }
}

fn signum(x: &BigRational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Formats with ten significant digits.
pub fn format_decimal(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (9 - mag).max(0) as usize;
    format!("{:.*}", decimals, x)
}

impl PartialOrd for QuadNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.field != other.field {
            return None;
        }
        Some(self.cmp(other))
    }
}

impl Ord for QuadNum {
    /// Numeric order; elements of different fields are ordered by field first.
    fn cmp(&self, other: &Self) -> Ordering {
        if self.field != other.field {
            return (self.field.trace, self.field.det).cmp(&(other.field.trace, other.field.det));
        }
        let diff = self.field.num(&self.a - &other.a, &self.b - &other.b);
        diff.sign().cmp(&0)
    }
}

impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}) ~ {}", self.a, self.b, format_decimal(self.approx()))
    }
}

impl Serialize for QuadNum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("QuadNum", 2)?;
        st.serialize_field("exact", &[self.a.to_string(), self.b.to_string()])?;
        st.serialize_field("decimal", &format_decimal(self.approx()))?;
        st.end()
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&QuadNum> for &QuadNum {
            type Output = QuadNum;
            fn $method(self, o: &QuadNum) -> QuadNum {
                self.$checked(o).expect(concat!("QuadNum::", stringify!($method)))
            }
        }
        impl $tr<QuadNum> for QuadNum {
            type Output = QuadNum;
            fn $method(self, o: QuadNum) -> QuadNum {
                (&self).$method(&o)
            }
        }
        impl $tr<&QuadNum> for QuadNum {
            type Output = QuadNum;
            fn $method(self, o: &QuadNum) -> QuadNum {
                (&self).$method(o)
            }
        }
        impl $tr<QuadNum> for &QuadNum {
            type Output = QuadNum;
            fn $method(self, o: QuadNum) -> QuadNum {
                self.$method(&o)
            }
        }
    };
}

// Operators panic on field mismatch or division by zero; use the checked_* forms
// where either can happen.
forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for &QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        self.field.num(-&self.a, -&self.b)
    }
}

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        -&self
    }
}

/// Perron-Frobenius data of a primitive 2x2 matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PfData {
    pub lambda: QuadNum,
    pub lambda_star: QuadNum,
    /// Left eigenvector, scaled so the smaller entry is 1.
    pub left_vec: (QuadNum, QuadNum),
    /// Right eigenvector `(m12, lambda - m11)`, unnormalized.
    pub right_vec: (QuadNum, QuadNum),
}

pub fn pf_data(m: &IntMatrix2) -> Result<PfData> {
    let f = make_field(m)?;
    let lam = f.lambda();
    let m11 = f.int(m.get(0, 0) as i64, 0);
    let m12 = f.int(m.get(0, 1) as i64, 0);
    let m22 = f.int(m.get(1, 1) as i64, 0);
    let la = &lam - &m22;
    let lb = m12.clone();
    let left_vec = if la <= lb {
        let lb = &lb / &la;
        (f.one(), lb)
    } else {
        let la = &la / &lb;
        (la, f.one())
    };
    Ok(PfData {
        lambda_star: lam.star(),
        right_vec: (m12, &lam - &m11),
        lambda: lam,
        left_vec,
    })
}
