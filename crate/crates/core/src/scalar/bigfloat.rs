//! Arbitrary-precision binary floating point on top of `num_bigint`.
//!
//! A value is `mant * 2^exp` with `mant: BigInt`. The canonical form keeps no
//! trailing zero bits in the mantissa (so equality is structural) and rounds
//! results to the working precision, nearest-ties-away. Exact small integers
//! therefore stay exact, and `ldexp` is free.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Num, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::precision;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
}

impl BigFloat {
    pub fn zero_val() -> Self {
        BigFloat { mant: BigInt::zero(), exp: 0 }
    }

    /// Exact constructor; only trims trailing zero bits, never rounds.
    pub fn from_parts(mant: BigInt, exp: i64) -> Self {
        let mut v = BigFloat { mant, exp };
        v.trim();
        v
    }

    pub fn from_int(v: BigInt) -> Self {
        Self::from_parts(v, 0)
    }

    pub fn from_f64_exact(v: f64) -> Self {
        assert!(v.is_finite(), "from_f64_exact: non-finite input {v}");
        if v == 0.0 {
            return Self::zero_val();
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant_u, exp) = if biased == 0 {
            (frac, -1074i64) // subnormal
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        let mant = BigInt::from(mant_u) * sign;
        Self::from_parts(mant, exp)
    }

    fn trim(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn mant_bits(&self) -> u64 {
        self.mant.bits()
    }

    /// Position of the leading bit: value is in [2^(k-1), 2^k) for k = msb_exp.
    fn msb_exp(&self) -> i64 {
        debug_assert!(!self.mant.is_zero());
        self.exp + self.mant.bits() as i64
    }

    /// Rounds to `prec` mantissa bits, nearest with ties away from zero.
    pub fn round_prec(mut self, prec: u32) -> Self {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self;
        }
        let shift = bits - prec as u64;
        let neg = self.mant.is_negative();
        let mag = self.mant.magnitude();
        let round_bit = ((mag >> (shift - 1)) & BigUint::one()) == BigUint::one();
        let mut m = mag >> shift;
        if round_bit {
            m += 1u32;
        }
        let mant = BigInt::from_biguint(if neg { Sign::Minus } else { Sign::Plus }, m);
        self = BigFloat { mant, exp: self.exp + shift as i64 };
        self.trim();
        self
    }

    fn round_working(self) -> Self {
        let p = precision();
        self.round_prec(p)
    }

    pub fn is_zero_val(&self) -> bool {
        self.mant.is_zero()
    }

    /// Leading-bit exponent as in `msb_exp`, 0 for zero values.
    pub fn msb_exp_pub(&self) -> i64 {
        if self.mant.is_zero() {
            0
        } else {
            self.msb_exp()
        }
    }

    pub fn neg_val(self) -> Self {
        -self
    }

    /// Multiplication rounded at an explicit precision (guard-bit work).
    pub fn mul_prec(&self, rhs: &Self, prec: u32) -> Self {
        if self.mant.is_zero() || rhs.mant.is_zero() {
            return Self::zero_val();
        }
        Self::from_parts(&self.mant * &rhs.mant, self.exp + rhs.exp).round_prec(prec)
    }

    /// Division rounded at an explicit precision.
    pub fn div_prec(&self, rhs: &Self, prec: u32) -> Self {
        assert!(!rhs.mant.is_zero(), "BigFloat division by zero");
        if self.mant.is_zero() {
            return Self::zero_val();
        }
        let nbits = self.mant.bits();
        let dbits = rhs.mant.bits();
        let scale = (dbits + prec as u64 + 32).saturating_sub(nbits) as i64;
        let scale = scale.max(0);
        let num = &self.mant << scale as u64;
        let q = num / &rhs.mant;
        Self::from_parts(q, self.exp - rhs.exp - scale).round_prec(prec)
    }

    /// Square root rounded at an explicit precision.
    pub fn sqrt_prec(&self, prec: u32) -> Self {
        assert!(!self.mant.is_negative(), "BigFloat sqrt of negative value");
        if self.mant.is_zero() {
            return Self::zero_val();
        }
        let target = 2 * (prec as u64 + 32);
        let bits = self.mant.bits();
        let mut shift = target.saturating_sub(bits) as i64;
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let scaled: BigUint = (self.mant.magnitude().clone()) << shift as u64;
        let root = scaled.sqrt();
        Self::from_parts(BigInt::from(root), (self.exp - shift) / 2).round_prec(prec)
    }

    pub fn signum_i(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn ldexp(mut self, k: i64) -> Self {
        if !self.mant.is_zero() {
            self.exp += k;
        }
        self
    }

    pub fn abs(&self) -> Self {
        BigFloat { mant: self.mant.abs(), exp: self.exp }
    }

    /// Exact sum, no rounding. Mantissa growth is bounded by the exponent
    /// spread of the operands; magnitude bookkeeping relies on this.
    pub fn add_exact(&self, rhs: &Self) -> Self {
        if self.mant.is_zero() {
            return rhs.clone();
        }
        if rhs.mant.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(rhs.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &rhs.mant << (rhs.exp - e) as u64;
        Self::from_parts(a + b, e)
    }

    fn add_rounded(&self, rhs: &Self) -> Self {
        if self.mant.is_zero() {
            return rhs.clone();
        }
        if rhs.mant.is_zero() {
            return self.clone();
        }
        let prec = precision() as i64;
        // If the operands' bit ranges are disjoint by a wide margin the small
        // one only perturbs guard bits; skip the shift to keep adds O(prec).
        let (hi, lo) = if self.msb_exp() >= rhs.msb_exp() { (self, rhs) } else { (rhs, self) };
        if hi.exp - lo.msb_exp() > prec + 4 {
            // lo is far below hi's ulp at working precision
            let gap_ok = hi.msb_exp() - lo.msb_exp() > prec + 4;
            if gap_ok {
                return hi.clone();
            }
        }
        self.add_exact(rhs).round_working()
    }

    pub fn mul_rounded(&self, rhs: &Self) -> Self {
        if self.mant.is_zero() || rhs.mant.is_zero() {
            return Self::zero_val();
        }
        Self::from_parts(&self.mant * &rhs.mant, self.exp + rhs.exp).round_working()
    }

    pub fn div_rounded(&self, rhs: &Self) -> Self {
        self.div_prec(rhs, precision())
    }

    /// Square root (argument must be >= 0), faithful at working precision.
    pub fn sqrt(&self) -> Self {
        self.sqrt_prec(precision())
    }

    pub fn powi(&self, k: i64) -> Self {
        if k == 0 {
            return Self::one();
        }
        if k < 0 {
            return Self::one().div_rounded(&self.powi(-k));
        }
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_rounded(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_rounded(&base);
            }
        }
        acc
    }

    pub fn to_f64_lossy(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let (top, scale) = if bits > 63 {
            let shift = bits - 63;
            let m = self.mant.magnitude() >> shift;
            (m.to_u64_digits()[0], self.exp + shift as i64)
        } else {
            (self.mant.magnitude().to_u64_digits()[0], self.exp)
        };
        let sign = if self.mant.is_negative() { -1.0 } else { 1.0 };
        if scale > 1024 {
            return sign * f64::INFINITY;
        }
        if scale < -1200 {
            return 0.0;
        }
        sign * (top as f64) * (scale as f64).exp2()
    }

    pub fn floor_int(&self) -> BigInt {
        if self.mant.is_zero() {
            return BigInt::zero();
        }
        if self.exp >= 0 {
            return &self.mant << self.exp as u64;
        }
        let shift = (-self.exp) as u64;
        if self.mant.is_negative() {
            // shift right rounds toward zero on magnitude; adjust to floor
            let mag = self.mant.magnitude();
            let q = mag >> shift;
            let exact = (&q << shift) == *mag;
            let q = BigInt::from_biguint(Sign::Minus, q);
            if exact {
                q
            } else {
                q - 1
            }
        } else {
            BigInt::from(self.mant.magnitude() >> shift)
        }
    }

    /// Nearest integer (ties toward +inf), as i64. Panics if out of range.
    pub fn round_i64(&self) -> i64 {
        use num_traits::ToPrimitive;
        let half = BigFloat::from_parts(BigInt::one(), -1);
        let shifted = self.add_exact(&half);
        shifted
            .floor_int()
            .to_i64()
            .expect("round_i64: value out of i64 range")
    }

    pub fn cmp_val(&self, rhs: &Self) -> Ordering {
        let ls = self.signum_i();
        let rs = rhs.signum_i();
        if ls != rs {
            return ls.cmp(&rs);
        }
        if ls == 0 {
            return Ordering::Equal;
        }
        // same nonzero sign: compare magnitudes via leading-bit position first
        let lm = self.msb_exp();
        let rm = rhs.msb_exp();
        if lm != rm {
            let mag_ord = lm.cmp(&rm);
            return if ls > 0 { mag_ord } else { mag_ord.reverse() };
        }
        let e = self.exp.min(rhs.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &rhs.mant << (rhs.exp - e) as u64;
        a.cmp(&b)
    }

    /// Canonical string form `<sign><hex mantissa>p<exp>`, round-trip exact.
    pub fn to_hex_string(&self) -> String {
        if self.mant.is_zero() {
            return "0".to_string();
        }
        let sign = if self.mant.is_negative() { "-" } else { "" };
        format!("{}{:x}p{}", sign, self.mant.magnitude(), self.exp)
    }

    pub fn from_hex_string(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero_val());
        }
        let (sign, rest) = match s.strip_prefix('-') {
            Some(r) => (Sign::Minus, r),
            None => (Sign::Plus, s),
        };
        let (mant_s, exp_s) = rest
            .split_once('p')
            .ok_or_else(|| format!("bad BigFloat literal: {s}"))?;
        let mag = BigUint::from_str_radix(mant_s, 16).map_err(|e| e.to_string())?;
        let exp: i64 = exp_s.parse().map_err(|_| format!("bad exponent in {s}"))?;
        Ok(Self::from_parts(BigInt::from_biguint(sign, mag), exp))
    }

    /// Parses a decimal literal (optionally with `.`, exponent `e`) at working
    /// precision.
    pub fn parse_decimal(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.is_empty() {
            return Err("empty decimal literal".into());
        }
        let (sign, body) = match s.strip_prefix('-') {
            Some(r) => (-1, r),
            None => (1, s.strip_prefix('+').unwrap_or(s)),
        };
        let (digits_part, exp10_extra) = match body.split_once(['e', 'E']) {
            Some((d, e)) => {
                let e: i64 = e.parse().map_err(|_| format!("bad exponent in {s}"))?;
                (d, e)
            }
            None => (body, 0),
        };
        let (int_part, frac_part) = match digits_part.split_once('.') {
            Some((i, f)) => (i, f),
            None => (digits_part, ""),
        };
        let all: String = format!("{int_part}{frac_part}");
        if all.is_empty() || !all.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal literal: {s}"));
        }
        let digits = BigInt::from_str_radix(&all, 10).map_err(|e| e.to_string())?;
        let exp10 = exp10_extra - frac_part.len() as i64;
        let base = BigFloat::from_int(digits * sign);
        if exp10 == 0 {
            return Ok(base);
        }
        let ten = BigFloat::from_int(BigInt::from(10));
        let p = ten.powi(exp10.abs());
        Ok(if exp10 > 0 { base.mul_rounded(&p) } else { base.div_rounded(&p) })
    }

    /// Decimal rendering with enough digits to identify the value at working
    /// precision (used in reports; hex form is the canonical round-trip).
    pub fn to_decimal_string(&self, digits: usize) -> String {
        if self.mant.is_zero() {
            return "0".to_string();
        }
        let neg = self.mant.is_negative();
        let mag = self.abs();
        // exponent10 ~ msb * log10(2)
        let e10 = ((mag.msb_exp() as f64) * std::f64::consts::LOG10_2).floor() as i64;
        let ten = BigFloat::from_int(BigInt::from(10));
        let scale = digits as i64 - e10;
        let scaled = if scale >= 0 {
            mag.mul_rounded(&ten.powi(scale))
        } else {
            mag.div_rounded(&ten.powi(-scale))
        };
        let int = scaled.add_exact(&BigFloat::from_parts(BigInt::one(), -1)).floor_int();
        let mut ds = int.to_string();
        let mut e10 = e10;
        if ds.len() > digits + 1 {
            // rounding bumped a digit
            e10 += 1;
            ds.truncate(digits + 1);
        }
        while ds.len() < digits + 1 {
            ds.insert(0, '0');
        }
        let (head, tail) = ds.split_at(1);
        format!("{}{}.{}e{}", if neg { "-" } else { "" }, head, tail, e10)
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigFloat({})", self.to_decimal_string(20))
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string(20))
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_val(other))
    }
}

impl Ord for BigFloat {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_val(other)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $impl_fn:ident) => {
        impl $trait for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: BigFloat) -> BigFloat {
                BigFloat::$impl_fn(&self, &rhs)
            }
        }
        impl<'a> $trait<&'a BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: &'a BigFloat) -> BigFloat {
                BigFloat::$impl_fn(&self, rhs)
            }
        }
        impl<'a> $trait<BigFloat> for &'a BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: BigFloat) -> BigFloat {
                BigFloat::$impl_fn(self, &rhs)
            }
        }
        impl<'a, 'b> $trait<&'b BigFloat> for &'a BigFloat {
            type Output = BigFloat;
            fn $method(self, rhs: &'b BigFloat) -> BigFloat {
                BigFloat::$impl_fn(self, rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_rounded);
forward_binop!(Mul, mul, mul_rounded);
forward_binop!(Div, div, div_rounded);

impl Sub for BigFloat {
    type Output = BigFloat;
    fn sub(self, rhs: BigFloat) -> BigFloat {
        self.add_rounded(&-rhs)
    }
}
impl<'a> Sub<&'a BigFloat> for BigFloat {
    type Output = BigFloat;
    fn sub(self, rhs: &'a BigFloat) -> BigFloat {
        self.add_rounded(&rhs.clone().neg())
    }
}
impl<'a> Sub<BigFloat> for &'a BigFloat {
    type Output = BigFloat;
    fn sub(self, rhs: BigFloat) -> BigFloat {
        self.add_rounded(&-rhs)
    }
}
impl<'a, 'b> Sub<&'b BigFloat> for &'a BigFloat {
    type Output = BigFloat;
    fn sub(self, rhs: &'b BigFloat) -> BigFloat {
        self.add_rounded(&rhs.clone().neg())
    }
}

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat { mant: -self.mant, exp: self.exp }
    }
}
impl<'a> Neg for &'a BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat { mant: -self.mant.clone(), exp: self.exp }
    }
}

impl Zero for BigFloat {
    fn zero() -> Self {
        Self::zero_val()
    }
    fn is_zero(&self) -> bool {
        self.is_zero_val()
    }
}

impl One for BigFloat {
    fn one() -> Self {
        Self::from_parts(BigInt::one(), 0)
    }
}

impl std::ops::Rem for BigFloat {
    type Output = BigFloat;
    fn rem(self, rhs: BigFloat) -> BigFloat {
        // Euclidean-style remainder; rarely used, present to satisfy Num.
        let q = self.div_rounded(&rhs).floor_int();
        let qf = BigFloat::from_int(q);
        self.add_rounded(&qf.mul_rounded(&rhs).neg())
    }
}

impl Num for BigFloat {
    type FromStrRadixErr = String;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, String> {
        match radix {
            10 => Self::parse_decimal(s),
            16 => Self::from_hex_string(s),
            r => Err(format!("unsupported radix {r}")),
        }
    }
}

impl Serialize for BigFloat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex_string())
    }
}

impl<'de> Deserialize<'de> for BigFloat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BigFloat::from_hex_string(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Real;

    fn bf(v: f64) -> BigFloat {
        BigFloat::from_f64_exact(v)
    }

    #[test]
    fn arithmetic_small_values() {
        let a = bf(1.5);
        let b = bf(2.25);
        assert_eq!((&a + &b).to_f64_lossy(), 3.75);
        assert_eq!((&a * &b).to_f64_lossy(), 3.375);
        assert_eq!((&b - &a).to_f64_lossy(), 0.75);
        assert_eq!((&b / &a).to_f64_lossy(), 1.5);
    }

    #[test]
    fn exact_integer_round_trip() {
        let v = BigFloat::from_int(BigInt::from(123456789i64));
        assert_eq!(v.floor_int(), BigInt::from(123456789i64));
        assert_eq!(v.to_f64_lossy(), 123456789.0);
    }

    #[test]
    fn division_accuracy() {
        let one = BigFloat::one();
        let three = bf(3.0);
        let third = &one / &three;
        let back = &third * &three;
        let err = (&back - &one).abs();
        assert!(err < BigFloat::exp2i(-250), "err = {err}");
    }

    #[test]
    fn sqrt_accuracy() {
        let two = bf(2.0);
        let r = two.sqrt();
        let err = (&(&r * &r) - &two).abs();
        assert!(err < BigFloat::exp2i(-250), "err = {err}");
    }

    #[test]
    fn comparisons() {
        assert!(bf(1.0) < bf(2.0));
        assert!(bf(-3.0) < bf(-2.0));
        assert!(bf(-1.0) < bf(0.5));
        assert_eq!(bf(4.0).cmp_val(&bf(4.0)), Ordering::Equal);
        // different bit-lengths, same magnitude ordering
        assert!(bf(0.1) < bf(100.0));
    }

    #[test]
    fn hex_round_trip() {
        for v in [0.0, 1.0, -1.5, 0.1, 12345.678, -1e-30] {
            let x = bf(v);
            let s = x.to_hex_string();
            let y = BigFloat::from_hex_string(&s).unwrap();
            assert_eq!(x, y, "round trip failed for {v}: {s}");
        }
    }

    #[test]
    fn parse_decimal_values() {
        let x = BigFloat::parse_decimal("1.25").unwrap();
        assert_eq!(x.to_f64_lossy(), 1.25);
        let y = BigFloat::parse_decimal("-3e2").unwrap();
        assert_eq!(y.to_f64_lossy(), -300.0);
        let z = BigFloat::parse_decimal("0.5").unwrap();
        assert_eq!(z, bf(0.5));
    }

    #[test]
    fn floor_negative() {
        assert_eq!(bf(-2.5).floor_int(), BigInt::from(-3));
        assert_eq!(bf(-2.0).floor_int(), BigInt::from(-2));
        assert_eq!(bf(2.5).floor_int(), BigInt::from(2));
    }

    #[test]
    fn round_i64_ties() {
        assert_eq!(bf(2.5).round_i64(), 3);
        assert_eq!(bf(-2.5).round_i64(), -2);
        assert_eq!(bf(7.49).round_i64(), 7);
    }

    #[test]
    fn huge_exponents_no_overflow() {
        let tiny = BigFloat::one().ldexp(-1_500_000);
        let prod = tiny.mul_rounded(&tiny);
        assert!(!prod.is_zero_val());
        assert_eq!(prod.msb_exp(), -3_000_000 + 1);
    }

    #[test]
    fn add_rounded_wide_gap() {
        let big = bf(1.0);
        let small = BigFloat::one().ldexp(-400);
        let s = big.add_rounded(&small);
        assert_eq!(s, big);
        let s2 = big.add_exact(&small);
        assert!(s2 > big);
    }

    #[test]
    fn decimal_rendering() {
        let x = bf(0.125);
        let s = x.to_decimal_string(5);
        assert!(s.starts_with("1.25000"), "{s}");
    }
}
