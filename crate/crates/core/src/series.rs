//! Truncated univariate power series with complex coefficients and a
//! certified tail bound on a closed disk. The trajectory solver produces
//! them, polynomial composition combines them, and the zero counter consumes
//! them as the concrete function representation.

use crate::bigmag::BigMag;
use crate::cx;
use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// f(z) = sum coeffs[k] z^k + E(z), |E(z)| <= tail on |z| <= radius.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Series<R> {
    pub coeffs: Vec<Complex<R>>,
    /// Radius of the closed disk on which the tail bound is valid.
    pub radius: R,
    /// Uniform bound for the truncation error on that disk.
    pub tail: BigMag<R>,
}

impl<R: Real> Series<R> {
    pub fn new(coeffs: Vec<Complex<R>>, radius: R, tail: BigMag<R>) -> Self {
        Series { coeffs, radius, tail }
    }

    /// Exact polynomial as a series: zero tail, valid on any requested disk.
    pub fn from_poly_coeffs(coeffs: Vec<Complex<R>>, radius: R) -> Self {
        Series { coeffs, radius, tail: BigMag::Zero }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_identically_zero_truncation(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_zero() && c.im.is_zero())
    }

    pub fn eval(&self, z: &Complex<R>) -> Complex<R> {
        let mut acc = cx::cx_zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z.clone() + c.clone();
        }
        acc
    }

    /// Derivative series; the tail bound is propagated by Cauchy's estimate
    /// on the slightly smaller disk radius*shrink (0 < shrink < 1).
    pub fn derivative(&self, shrink: &R) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len().saturating_sub(1));
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            let kf = R::from_i64(k as i64);
            coeffs.push(Complex::new(c.re.clone() * kf.clone(), c.im.clone() * kf));
        }
        let new_radius = self.radius.clone() * shrink.clone();
        let tail = match &self.tail {
            BigMag::Zero => BigMag::Zero,
            BigMag::Log(l) => {
                // |E'(z)| <= tail / (radius (1 - shrink)) on the shrunk disk
                let gap = self.radius.clone() * (R::one() - shrink.clone());
                BigMag::from_ln(l.clone() - gap.ln())
            }
        };
        Series { coeffs, radius: new_radius, tail }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            let a = self.coeffs.get(k).cloned().unwrap_or_else(cx::cx_zero);
            let b = rhs.coeffs.get(k).cloned().unwrap_or_else(cx::cx_zero);
            coeffs.push(a + b);
        }
        Series {
            coeffs,
            radius: R::min_val(self.radius.clone(), rhs.radius.clone()),
            tail: self.tail.add(&rhs.tail),
        }
    }

    pub fn scale(&self, s: &Complex<R>) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c.clone() * s.clone()).collect();
        let smag = cx::cx_abs(s);
        let tail = match &self.tail {
            BigMag::Zero => BigMag::Zero,
            t => t.mul(&BigMag::from_value(&smag)),
        };
        Series { coeffs, radius: self.radius.clone(), tail }
    }

    /// Truncated product. Both factors must share the same disk; the result
    /// is truncated at `trunc` coefficients with the discarded convolution
    /// tail and the operand tails folded into the result tail bound.
    pub fn mul_trunc(&self, rhs: &Self, trunc: usize) -> Self {
        let radius = R::min_val(self.radius.clone(), rhs.radius.clone());
        let na = self.coeffs.len();
        let nb = rhs.coeffs.len();
        let full = na + nb - 1;
        let keep = trunc.min(full);
        let mut coeffs = vec![cx::cx_zero(); keep];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= keep {
                break;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j >= keep {
                    break;
                }
                let prod = a.clone() * b.clone();
                coeffs[i + j] = coeffs[i + j].clone() + prod;
            }
        }
        // bound on the dropped convolution terms: sum over k >= keep of
        // |sum_{i+j=k} a_i b_j| r^k <= A * B restricted; we bound crudely by
        // summing |a_i| r^i and |b_j| r^j over the dropped index pairs.
        let mut dropped_ln: BigMag<R> = BigMag::Zero;
        if full > keep {
            let amags: Vec<R> = weighted_mags(&self.coeffs, &radius);
            let bmags: Vec<R> = weighted_mags(&rhs.coeffs, &radius);
            let mut acc = R::zero();
            for i in 0..na {
                for j in 0..nb {
                    if i + j >= keep {
                        acc = acc + amags[i].clone() * bmags[j].clone();
                    }
                }
            }
            dropped_ln = BigMag::from_value(&acc);
        }
        // operand tails: |E_a| * sup|b| + |E_b| * sup|a| + |E_a||E_b|
        let sup_a = sup_bound(self, &radius);
        let sup_b = sup_bound(rhs, &radius);
        let t1 = self.tail.mul(&sup_b);
        let t2 = rhs.tail.mul(&sup_a);
        let t3 = self.tail.mul(&rhs.tail);
        let tail = dropped_ln.add(&t1).add(&t2).add(&t3);
        Series { coeffs, radius, tail }
    }
}

fn weighted_mags<R: Real>(coeffs: &[Complex<R>], r: &R) -> Vec<R> {
    let mut out = Vec::with_capacity(coeffs.len());
    let mut rk = R::one();
    for c in coeffs {
        out.push(cx::cx_abs(c) * rk.clone());
        rk = rk * r.clone();
    }
    out
}

/// Magnitude bound for |f| on the disk: sum |c_k| r^k + tail.
pub fn sup_bound<R: Real>(s: &Series<R>, r: &R) -> BigMag<R> {
    let sum = weighted_mags(&s.coeffs, r)
        .into_iter()
        .fold(R::zero(), |a, b| a + b);
    BigMag::from_value(&sum).add(&s.tail)
}

/// Composition p(s_1, ..., s_n) of a multivariate polynomial with n series
/// over a common disk, truncated at `trunc` coefficients.
pub fn compose_poly_series<R: Real>(
    p: &crate::poly::IntPolynomial,
    components: &[Series<R>],
    trunc: usize,
) -> Result<Series<R>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial("compose_poly_series"));
    }
    assert_eq!(p.num_vars(), components.len());
    let radius = components
        .iter()
        .map(|s| s.radius.clone())
        .reduce(R::min_val)
        .unwrap();
    // power tables of each component series
    let maxe = p.max_exponents();
    let one = Series::from_poly_coeffs(vec![cx::cx_one()], radius.clone());
    let mut tables: Vec<Vec<Series<R>>> = Vec::with_capacity(components.len());
    for (i, s) in components.iter().enumerate() {
        let mut t = vec![one.clone()];
        for e in 1..=maxe[i] as usize {
            let prev = &t[e - 1];
            t.push(prev.mul_trunc(s, trunc));
        }
        tables.push(t);
    }
    let mut acc = Series::from_poly_coeffs(vec![], radius.clone());
    for (mono, c) in p.terms() {
        let mut term = one.clone();
        for (i, &e) in mono.0.iter().enumerate() {
            if e > 0 {
                term = term.mul_trunc(&tables[i][e as usize], trunc);
            }
        }
        let cf = cx::cx(R::from_bigint(c), R::zero());
        acc = acc.add(&term.scale(&cf));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::IntPolynomial;
    use crate::BF;
    use num_bigint::BigInt;
    use num_traits::Zero;

    fn poly_series(cs: &[f64]) -> Series<BF> {
        Series::from_poly_coeffs(
            cs.iter().map(|&c| cx::cx_from_f64(c, 0.0)).collect(),
            BF::from_f64(1.0),
        )
    }

    #[test]
    fn eval_horner() {
        // 1 + 2z + 3z^2 at z = 2 -> 17
        let s = poly_series(&[1.0, 2.0, 3.0]);
        let v = s.eval(&cx::cx_from_f64(2.0, 0.0));
        assert_eq!(v.re.to_f64(), 17.0);
        assert!(v.im.is_zero());
    }

    #[test]
    fn mul_exact_when_within_truncation() {
        let a = poly_series(&[1.0, 1.0]); // 1 + z
        let b = poly_series(&[1.0, -1.0]); // 1 - z
        let p = a.mul_trunc(&b, 8);
        assert_eq!(p.coeffs.len(), 3);
        assert_eq!(p.coeffs[0].re.to_f64(), 1.0);
        assert_eq!(p.coeffs[1].re.to_f64(), 0.0);
        assert_eq!(p.coeffs[2].re.to_f64(), -1.0);
        assert!(p.tail.is_zero());
    }

    #[test]
    fn truncation_tail_is_sound() {
        // (1+z)^2 truncated to 2 coefficients on |z| <= 1: dropped term z^2
        let a = poly_series(&[1.0, 1.0]);
        let p = a.mul_trunc(&a, 2);
        assert_eq!(p.coeffs.len(), 2);
        // dropped mass is exactly 1 at r = 1
        assert!((p.tail.ln_f64() - 0.0).abs() < 1e-12);
        // evaluation error at z=1: true 4, truncated 3, tail covers it
        let v = p.eval(&cx::cx_from_f64(1.0, 0.0));
        assert!((v.re.to_f64() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_shifts_and_scales() {
        let s = poly_series(&[5.0, 1.0, 2.0, 3.0]);
        let d = s.derivative(&BF::from_f64(0.5));
        assert_eq!(d.coeffs.len(), 3);
        assert_eq!(d.coeffs[0].re.to_f64(), 1.0);
        assert_eq!(d.coeffs[1].re.to_f64(), 4.0);
        assert_eq!(d.coeffs[2].re.to_f64(), 9.0);
    }

    #[test]
    fn compose_linear_poly() {
        // p(x, y) = x + 2y composed with (z, z^2)
        let p = IntPolynomial::from_terms(
            2,
            [(vec![1, 0], BigInt::from(1)), (vec![0, 1], BigInt::from(2))],
        );
        let sx = poly_series(&[0.0, 1.0]);
        let sy = poly_series(&[0.0, 0.0, 1.0]);
        let c = compose_poly_series(&p, &[sx, sy], 8).unwrap();
        let v = c.eval(&cx::cx_from_f64(3.0, 0.0));
        assert_eq!(v.re.to_f64(), 3.0 + 2.0 * 9.0);
    }

    #[test]
    fn sup_bound_dominates_samples() {
        let s = poly_series(&[0.5, -1.0, 0.25]);
        let r = BF::from_f64(0.8);
        let bound = sup_bound(&s, &r);
        for k in 0..16 {
            let th = 2.0 * std::f64::consts::PI * (k as f64) / 16.0;
            let z = cx::cx_from_f64::<BF>(0.8 * th.cos(), 0.8 * th.sin());
            let v = cx::cx_abs(&s.eval(&z));
            // one sample attains the bound exactly; allow rounding ulps
            assert!(v.ln().to_f64() <= bound.ln_f64() + 1e-30);
        }
    }
}
