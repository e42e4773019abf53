//! Scalar abstraction: the numeric kernels in this crate are generic over a
//! [`Real`] type. `f64` gives a fast low-precision instantiation used for
//! cross-checks; [`BigFloat`] is the working type (default 256 mantissa bits,
//! configurable process-wide via [`set_precision`]).

mod bigfloat;
mod elementary;

pub use bigfloat::BigFloat;

use num_bigint::BigInt;
use num_traits::{Num, Signed, Zero};
use std::fmt::{Debug, Display};
use std::ops::Neg;
use std::sync::atomic::{AtomicU32, Ordering};

/// Process-wide working precision in mantissa bits for [`BigFloat`].
///
/// Set once at startup (CLI `--precision`); every tolerance that the library
/// documents is a function of this value.
static PRECISION_BITS: AtomicU32 = AtomicU32::new(256);

pub const MIN_PRECISION: u32 = 64;
pub const MAX_PRECISION: u32 = 8192;

pub fn precision() -> u32 {
    PRECISION_BITS.load(Ordering::Relaxed)
}

/// Sets the working precision. Intended to be called once before any
/// computation; changing it mid-run mixes precisions in cached constants.
pub fn set_precision(bits: u32) {
    let clamped = bits.clamp(MIN_PRECISION, MAX_PRECISION);
    PRECISION_BITS.store(clamped, Ordering::Relaxed);
}

/// Real scalar usable by every numeric kernel in the crate.
///
/// Implementations: `f64` (53 bits) and [`BigFloat`] (working precision).
/// All transcendental methods are faithful to within a few ulps at the
/// type's precision; nothing here assumes `Copy`.
pub trait Real:
    Num + Clone + PartialOrd + Neg<Output = Self> + Debug + Display + Send + Sync + 'static
{
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn from_bigint(v: &BigInt) -> Self;

    /// Mantissa bits carried by this type right now.
    fn prec_bits() -> u32;

    fn from_i64(v: i64) -> Self {
        Self::from_f64(v as f64)
    }

    /// 2^(-bits), used to build precision-relative tolerances.
    fn exp2i(bits: i64) -> Self {
        Self::one().ldexp(bits)
    }

    /// self * 2^k, exact.
    fn ldexp(self, k: i64) -> Self;

    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn powi(&self, k: i64) -> Self;
    /// self^p for self > 0.
    fn powf(&self, p: &Self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn atan(&self) -> Self;
    fn atan2(y: &Self, x: &Self) -> Self;
    fn pi() -> Self;
    fn ln_2() -> Self;

    /// Largest integer <= self, as a BigInt.
    fn floor_bigint(&self) -> BigInt;

    fn ceil_bigint(&self) -> BigInt {
        let f = self.floor_bigint();
        if &Self::from_bigint(&f) == self {
            f
        } else {
            f + 1
        }
    }

    fn max_val(a: Self, b: Self) -> Self {
        if a < b {
            b
        } else {
            a
        }
    }

    fn min_val(a: Self, b: Self) -> Self {
        if a < b {
            a
        } else {
            b
        }
    }

    fn is_positive_val(&self) -> bool {
        *self > Self::zero()
    }
}

impl Real for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_bigint(v: &BigInt) -> Self {
        use num_traits::ToPrimitive;
        v.to_f64().unwrap_or(f64::INFINITY)
    }

    fn prec_bits() -> u32 {
        53
    }

    fn ldexp(self, k: i64) -> Self {
        self * (k as f64).exp2()
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }

    fn ln(&self) -> Self {
        f64::ln(*self)
    }

    fn exp(&self) -> Self {
        f64::exp(*self)
    }

    fn powi(&self, k: i64) -> Self {
        f64::powi(*self, k as i32)
    }

    fn powf(&self, p: &Self) -> Self {
        f64::powf(*self, *p)
    }

    fn sin(&self) -> Self {
        f64::sin(*self)
    }

    fn cos(&self) -> Self {
        f64::cos(*self)
    }

    fn atan(&self) -> Self {
        f64::atan(*self)
    }

    fn atan2(y: &Self, x: &Self) -> Self {
        f64::atan2(*y, *x)
    }

    fn pi() -> Self {
        std::f64::consts::PI
    }

    fn ln_2() -> Self {
        std::f64::consts::LN_2
    }

    fn floor_bigint(&self) -> BigInt {
        let f = self.floor();
        // f64 integers are exact dyadics; route through the bit pattern.
        BigFloat::from_f64_exact(f).floor_bigint()
    }
}

impl Real for BigFloat {
    fn from_f64(v: f64) -> Self {
        BigFloat::from_f64_exact(v)
    }

    fn to_f64(&self) -> f64 {
        BigFloat::to_f64_lossy(self)
    }

    fn from_bigint(v: &BigInt) -> Self {
        BigFloat::from_int(v.clone())
    }

    fn prec_bits() -> u32 {
        precision()
    }

    fn ldexp(self, k: i64) -> Self {
        BigFloat::ldexp(self, k)
    }

    fn abs(&self) -> Self {
        BigFloat::abs(self)
    }

    fn sqrt(&self) -> Self {
        BigFloat::sqrt(self)
    }

    fn ln(&self) -> Self {
        elementary::ln(self)
    }

    fn exp(&self) -> Self {
        elementary::exp(self)
    }

    fn powi(&self, k: i64) -> Self {
        BigFloat::powi(self, k)
    }

    fn powf(&self, p: &Self) -> Self {
        elementary::powf(self, p)
    }

    fn sin(&self) -> Self {
        elementary::sin(self)
    }

    fn cos(&self) -> Self {
        elementary::cos(self)
    }

    fn atan(&self) -> Self {
        elementary::atan(self)
    }

    fn atan2(y: &Self, x: &Self) -> Self {
        elementary::atan2(y, x)
    }

    fn pi() -> Self {
        elementary::pi()
    }

    fn ln_2() -> Self {
        elementary::ln2()
    }

    fn floor_bigint(&self) -> BigInt {
        BigFloat::floor_int(self)
    }
}

/// ln of a nonnegative BigInt, at working precision. Zero maps to -inf is
/// not representable, so this panics on zero; callers guard.
pub fn ln_bigint<R: Real>(v: &BigInt) -> R {
    assert!(!v.is_zero(), "ln_bigint: zero argument");
    assert!(v.is_positive(), "ln_bigint: negative argument");
    R::from_bigint(v).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_floor_bigint() {
        assert_eq!((2.75f64).floor_bigint(), BigInt::from(2));
        assert_eq!((-2.75f64).floor_bigint(), BigInt::from(-3));
        assert_eq!((1e18f64).floor_bigint(), BigInt::from(1_000_000_000_000_000_000u64));
    }

    #[test]
    fn ceil_matches_floor_on_integers() {
        assert_eq!((5.0f64).ceil_bigint(), BigInt::from(5));
        assert_eq!((5.1f64).ceil_bigint(), BigInt::from(6));
    }
}
