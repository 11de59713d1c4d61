//! Exact arithmetic in the cyclotomic field Q(ω), ω = e^{2πi/3}.
//!
//! Elements are stored as `a + b·ω` with arbitrary-precision rational
//! `a`, `b`, using the reduction ω² = −1 − ω.

use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact scalar `a + b·ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycloScalar {
    pub a: BigRational,
    pub b: BigRational,
}

impl CycloScalar {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Self { a, b }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn omega() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    /// ω^k for any integer exponent (taken mod 3).
    pub fn omega_pow(k: i64) -> Self {
        match k.rem_euclid(3) {
            0 => Self::one(),
            1 => Self::omega(),
            _ => Self::new(-BigRational::one(), -BigRational::one()),
        }
    }

    /// Multiplies by ω^k without a general product.
    pub fn mul_omega_pow(&self, k: i64) -> Self {
        let mut out = self.clone();
        for _ in 0..k.rem_euclid(3) {
            // ω(a + bω) = −b + (a − b)ω
            out = Self::new(-out.b.clone(), &out.a - &out.b);
        }
        out
    }

    /// Galois conjugate ω ↦ ω².
    pub fn conj(&self) -> Self {
        Self::new(&self.a - &self.b, -self.b.clone())
    }

    /// Field norm a² − ab + b², always a non-negative rational.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.a * &self.b + &self.b * &self.b
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(Self::new(c.a / &n, c.b / &n))
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn to_complex(&self) -> Complex64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        Complex64::new(a - 0.5 * b, b * HALF_SQRT3)
    }
}

/// Imaginary part of ω.
pub(crate) const HALF_SQRT3: f64 = 0.866_025_403_784_438_6;

impl Zero for CycloScalar {
    fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for CycloScalar {
    fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }
}

impl Add for CycloScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl<'a> Add<&'a CycloScalar> for &'a CycloScalar {
    type Output = CycloScalar;
    fn add(self, rhs: &CycloScalar) -> CycloScalar {
        CycloScalar::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl AddAssign for CycloScalar {
    fn add_assign(&mut self, rhs: Self) {
        self.a += rhs.a;
        self.b += rhs.b;
    }
}

impl Sub for CycloScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl Neg for CycloScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b)
    }
}

impl Mul for CycloScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<'a> Mul<&'a CycloScalar> for &'a CycloScalar {
    type Output = CycloScalar;
    fn mul(self, rhs: &CycloScalar) -> CycloScalar {
        // (a + bω)(c + dω) = (ac − bd) + (ad + bc − bd)ω
        let bd = &self.b * &rhs.b;
        CycloScalar::new(
            &self.a * &rhs.a - &bd,
            &self.a * &rhs.b + &self.b * &rhs.a - bd,
        )
    }
}

impl Div for CycloScalar {
    type Output = Self;
    /// Panics on division by zero, like the rational division it wraps.
    fn div(self, rhs: Self) -> Self {
        let inv = rhs.inv().expect("division by zero in Q(ω)");
        self * inv
    }
}

impl fmt::Display for CycloScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}*w", self.b),
            (false, false) => {
                if self.b.is_negative() {
                    write!(f, "{} - {}*w", self.a, -self.b.clone())
                } else {
                    write!(f, "{} + {}*w", self.a, self.b)
                }
            }
        }
    }
}
