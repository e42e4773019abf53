//! Helpers for `num_complex::Complex<R>` over a non-`Copy` [`Real`] scalar.

use crate::scalar::Real;
use num_complex::Complex;

pub fn cx<R: Real>(re: R, im: R) -> Complex<R> {
    Complex::new(re, im)
}

pub fn cx_from_f64<R: Real>(re: f64, im: f64) -> Complex<R> {
    Complex::new(R::from_f64(re), R::from_f64(im))
}

pub fn cx_zero<R: Real>() -> Complex<R> {
    Complex::new(R::zero(), R::zero())
}

pub fn cx_one<R: Real>() -> Complex<R> {
    Complex::new(R::one(), R::zero())
}

pub fn norm_sqr<R: Real>(z: &Complex<R>) -> R {
    z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone()
}

pub fn cx_abs<R: Real>(z: &Complex<R>) -> R {
    norm_sqr(z).sqrt()
}

/// log |z|; callers must keep z away from zero.
pub fn cx_ln_abs<R: Real>(z: &Complex<R>) -> R {
    let n2 = norm_sqr(z);
    assert!(n2.is_positive_val(), "cx_ln_abs of zero");
    n2.ln().ldexp(-1)
}

/// Principal argument in (-pi, pi].
pub fn cx_arg<R: Real>(z: &Complex<R>) -> R {
    R::atan2(&z.im, &z.re)
}

/// Principal logarithm.
pub fn cx_ln<R: Real>(z: &Complex<R>) -> Complex<R> {
    Complex::new(cx_ln_abs(z), cx_arg(z))
}

pub fn cx_exp<R: Real>(z: &Complex<R>) -> Complex<R> {
    let m = z.re.exp();
    Complex::new(m.clone() * z.im.cos(), m * z.im.sin())
}

/// r * e^(i theta).
pub fn polar<R: Real>(r: &R, theta: &R) -> Complex<R> {
    Complex::new(r.clone() * theta.cos(), r.clone() * theta.sin())
}

pub fn to_c64<R: Real>(z: &Complex<R>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

pub fn from_c64<R: Real>(z: &Complex<f64>) -> Complex<R> {
    Complex::new(R::from_f64(z.re), R::from_f64(z.im))
}

pub fn cx_dist<R: Real>(a: &Complex<R>, b: &Complex<R>) -> R {
    cx_abs(&(a.clone() - b.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BF;

    #[test]
    fn polar_and_arg_agree() {
        let r = BF::from_f64(2.0);
        let th = BF::from_f64(0.7);
        let z = polar(&r, &th);
        let back_r = cx_abs(&z);
        let back_th = cx_arg(&z);
        assert!((back_r - r).abs() < BF::exp2i(-240));
        assert!((back_th - th).abs() < BF::exp2i(-240));
    }

    #[test]
    fn ln_exp_round_trip() {
        let z = cx_from_f64::<BF>(1.3, -0.4);
        let w = cx_exp(&cx_ln(&z));
        assert!(cx_dist(&w, &z) < BF::exp2i(-240));
    }
}
