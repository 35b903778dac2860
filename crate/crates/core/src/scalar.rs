//! Scalar abstraction shared by every tensor routine.
//!
//! All algorithms are written against [`Scalar`]. Exact rationals
//! ([`BigRational`]) are the default field; `f64`/`f32` are an explicit
//! opt-in for finite-difference checks, and [`Dual`] carries a forward-mode
//! derivative alongside any other scalar.

use std::fmt::Debug;
use std::ops::{AddAssign, Div, MulAssign, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Field element used for tensor components.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Div<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + 'static
{
    /// `true` when arithmetic is exact (no rounding).
    const EXACT: bool;

    /// The value `num / den`. `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_int(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    /// Multiplicative inverse, or `None` for zero.
    fn checked_recip(&self) -> Option<Self>;

    /// Lossy conversion used only for reporting and tolerance checks.
    fn to_f64(&self) -> f64;

    fn from_u64(v: u64) -> Self {
        Self::from_int(i64::try_from(v).expect("integer factor exceeds i64"))
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn checked_recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_ratio(num: i64, den: i64) -> Self {
                num as $t / den as $t
            }

            fn checked_recip(&self) -> Option<Self> {
                if *self == 0.0 {
                    None
                } else {
                    Some(1.0 / *self)
                }
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

/// Absolute value of an exact scalar.
pub fn abs_exact(v: &BigRational) -> BigRational {
    v.abs()
}

/// `n!` as a scalar.
pub fn factorial<T: Scalar>(n: usize) -> T {
    let mut acc = T::one();
    for k in 2..=n {
        acc *= &T::from_u64(k as u64);
    }
    acc
}

/// `n!` as an integer; panics past `20!`.
pub fn factorial_u64(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Binomial coefficient `C(n, k)`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i as u64 + 1);
    }
    acc
}

/// Integer power by repeated multiplication.
pub fn powi<T: Scalar>(base: &T, exp: usize) -> T {
    let mut acc = T::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Forward-mode dual number `re + du·ε` with `ε² = 0`.
///
/// Evaluating any routine over `Dual<T>` with a unit seed in one input yields
/// the exact directional derivative in `du`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub du: T,
}

impl<T: Scalar> Dual<T> {
    pub fn constant(re: T) -> Self {
        Dual { re, du: T::zero() }
    }

    pub fn variable(re: T) -> Self {
        Dual { re, du: T::one() }
    }
}

impl<T: Scalar> std::ops::Add for Dual<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += &rhs;
        self
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Dual {
            re: self.re - rhs.re,
            du: self.du - rhs.du,
        }
    }
}

impl<T: Scalar> std::ops::Mul for Dual<T> {
    type Output = Self;
    fn mul(mut self, rhs: Self) -> Self {
        self *= &rhs;
        self
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        let inv = rhs.checked_recip().expect("division by dual with zero real part");
        self * inv
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual {
            re: -self.re,
            du: -self.du,
        }
    }
}

impl<'a, T: Scalar> AddAssign<&'a Dual<T>> for Dual<T> {
    fn add_assign(&mut self, rhs: &'a Dual<T>) {
        self.re += &rhs.re;
        self.du += &rhs.du;
    }
}

impl<'a, T: Scalar> MulAssign<&'a Dual<T>> for Dual<T> {
    fn mul_assign(&mut self, rhs: &'a Dual<T>) {
        // (a + a'ε)(b + b'ε) = ab + (ab' + a'b)ε
        let mut cross = self.re.clone();
        cross *= &rhs.du;
        self.du *= &rhs.re;
        self.du += &cross;
        self.re *= &rhs.re;
    }
}

impl<T: Scalar> Zero for Dual<T> {
    fn zero() -> Self {
        Dual {
            re: T::zero(),
            du: T::zero(),
        }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.du.is_zero()
    }
}

impl<T: Scalar> One for Dual<T> {
    fn one() -> Self {
        Dual::constant(T::one())
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    const EXACT: bool = T::EXACT;

    fn from_ratio(num: i64, den: i64) -> Self {
        Dual::constant(T::from_ratio(num, den))
    }

    fn checked_recip(&self) -> Option<Self> {
        let inv = self.re.checked_recip()?;
        let mut du = inv.clone();
        du *= &inv;
        du *= &self.du;
        Some(Dual { re: inv, du: -du })
    }

    fn to_f64(&self) -> f64 {
        self.re.to_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    #[test]
    fn rationals_stay_reduced() {
        let v = q(6, -4);
        assert_eq!(v, q(-3, 2));
        assert!(v.denom() > &BigInt::zero());
        assert_eq!(v.to_string(), "-3/2");
        assert_eq!(q(4, 2).to_string(), "2");
    }

    #[test]
    fn zero_has_no_inverse() {
        assert!(BigRational::zero().checked_recip().is_none());
        assert!(0.0f64.checked_recip().is_none());
        assert_eq!(q(2, 3).checked_recip(), Some(q(3, 2)));
    }

    #[test]
    fn combinatorics() {
        assert_eq!(factorial_u64(6), 720);
        assert_eq!(factorial::<BigRational>(4), q(24, 1));
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(powi(&q(-2, 3), 3), q(-8, 27));
    }

    #[test]
    fn dual_quotient_rule() {
        // d/dx (x^2 / (x + 1)) at x = 2 is (x^2 + 2x)/(x+1)^2 = 8/9
        let x = Dual::variable(q(2, 1));
        let num = x.clone() * x.clone();
        let den = x + Dual::one();
        let f = num / den;
        assert_eq!(f.re, q(4, 3));
        assert_eq!(f.du, q(8, 9));
        assert!(Dual::constant(q(0, 1)).checked_recip().is_none());
    }
}
