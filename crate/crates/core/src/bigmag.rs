//! Log-space magnitudes. The pipeline multiplies quantities spanning
//! hundreds of orders of magnitude (e^(-N^n) against polynomial heights), so
//! every such magnitude is carried as its natural log plus a distinguished
//! zero element. Products use exact log addition, so magnitude products are
//! associative bit-for-bit.

use crate::scalar::{BigFloat, Real};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum BigMag<R> {
    Zero,
    /// Natural log of a positive magnitude.
    Log(R),
}

pub type Mag = BigMag<BigFloat>;

impl<R: Real> BigMag<R> {
    pub fn zero() -> Self {
        BigMag::Zero
    }

    pub fn one() -> Self {
        BigMag::Log(R::zero())
    }

    pub fn from_ln(ln: R) -> Self {
        BigMag::Log(ln)
    }

    pub fn from_value(v: &R) -> Self {
        if v.is_zero() {
            BigMag::Zero
        } else {
            BigMag::Log(v.abs().ln())
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, BigMag::Zero)
    }

    pub fn ln_value(&self) -> Option<&R> {
        match self {
            BigMag::Zero => None,
            BigMag::Log(l) => Some(l),
        }
    }

    /// ln as f64 (-inf for the zero magnitude), for reports.
    pub fn ln_f64(&self) -> f64 {
        match self {
            BigMag::Zero => f64::NEG_INFINITY,
            BigMag::Log(l) => l.to_f64(),
        }
    }

    pub fn to_value(&self) -> R {
        match self {
            BigMag::Zero => R::zero(),
            BigMag::Log(l) => l.exp(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (BigMag::Zero, _) | (_, BigMag::Zero) => BigMag::Zero,
            (BigMag::Log(a), BigMag::Log(b)) => BigMag::Log(Self::add_ln(a, b)),
        }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (_, BigMag::Zero) => panic!("BigMag division by zero magnitude"),
            (BigMag::Zero, _) => BigMag::Zero,
            (BigMag::Log(a), BigMag::Log(b)) => BigMag::Log(Self::add_ln(a, &(-b.clone()))),
        }
    }

    pub fn powi(&self, k: i64) -> Self {
        match self {
            BigMag::Zero => {
                assert!(k > 0, "BigMag zero to non-positive power");
                BigMag::Zero
            }
            BigMag::Log(l) => BigMag::Log(l.clone() * R::from_i64(k)),
        }
    }

    /// Magnitude sum; exact in the dominant term, standard log1p-style tail.
    pub fn add(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (BigMag::Zero, x) | (x, BigMag::Zero) => x.clone(),
            (BigMag::Log(a), BigMag::Log(b)) => {
                let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
                let diff = lo.clone() - hi.clone(); // <= 0
                // exp(diff) underflows harmlessly through the Real type
                let corr = (R::one() + diff.exp()).ln();
                BigMag::Log(hi.clone() + corr)
            }
        }
    }

    pub fn cmp_mag(&self, rhs: &Self) -> Ordering {
        match (self, rhs) {
            (BigMag::Zero, BigMag::Zero) => Ordering::Equal,
            (BigMag::Zero, _) => Ordering::Less,
            (_, BigMag::Zero) => Ordering::Greater,
            (BigMag::Log(a), BigMag::Log(b)) => a.partial_cmp(b).unwrap(),
        }
    }

    pub fn max_mag(a: Self, b: Self) -> Self {
        if a.cmp_mag(&b) == Ordering::Less {
            b
        } else {
            a
        }
    }

    pub fn min_mag(a: Self, b: Self) -> Self {
        if a.cmp_mag(&b) == Ordering::Greater {
            b
        } else {
            a
        }
    }
}

impl BigMag<BigFloat> {
    /// Exact product in log space (no rounding of the log sum).
    pub fn mul_exact(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (BigMag::Zero, _) | (_, BigMag::Zero) => BigMag::Zero,
            (BigMag::Log(a), BigMag::Log(b)) => BigMag::Log(a.add_exact(b)),
        }
    }
}

impl<R: Real> BigMag<R> {
    fn add_ln(a: &R, b: &R) -> R {
        a.clone() + b.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BF;

    #[test]
    fn product_is_log_sum() {
        let a: Mag = BigMag::from_ln(BF::from_f64(-1000000.0));
        let b: Mag = BigMag::from_ln(BF::from_f64(250.0));
        let p = a.mul(&b);
        assert_eq!(p.ln_f64(), -999750.0);
    }

    #[test]
    fn tiny_magnitudes_survive() {
        // e^(-10^6) representable without underflow
        let t: Mag = BigMag::from_ln(BF::from_f64(-1e6));
        assert!(!t.is_zero());
        let sq = t.mul(&t);
        assert_eq!(sq.ln_f64(), -2e6);
    }

    #[test]
    fn exact_product_associativity() {
        let vals = [-123456.75, 0.0317891, 42.0, -1.0e5, 7.5e-3];
        let mags: Vec<Mag> = vals
            .iter()
            .map(|v| BigMag::from_ln(BF::from_f64(*v)))
            .collect();
        for a in &mags {
            for b in &mags {
                for c in &mags {
                    let l = a.mul_exact(b).mul_exact(c);
                    let r = a.mul_exact(&b.mul_exact(c));
                    assert_eq!(l, r);
                }
            }
        }
    }

    #[test]
    fn magnitude_sum() {
        let a: Mag = BigMag::from_value(&BF::from_f64(3.0));
        let b: Mag = BigMag::from_value(&BF::from_f64(4.0));
        let s = a.add(&b);
        assert!((s.ln_f64() - 7.0f64.ln()).abs() < 1e-12);
        let z: Mag = BigMag::zero();
        assert_eq!(z.add(&a).ln_f64(), a.ln_f64());
    }

    #[test]
    fn zero_ordering() {
        let z: Mag = BigMag::zero();
        let small: Mag = BigMag::from_ln(BF::from_f64(-1e9));
        assert_eq!(z.cmp_mag(&small), Ordering::Less);
    }
}
