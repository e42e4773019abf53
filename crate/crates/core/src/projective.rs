//! Projective-space metrology: Bombieri-weighted norms, the norm at a point,
//! the chordal projective distance, and the appendix constants A(omega),
//! c_d, c_d' together with the zero-free-ball radius they certify.

use crate::bigmag::BigMag;
use crate::cx;
use crate::error::{Error, Result};
use crate::poly::{HomogeneousPolynomial, IntPolynomial};
use crate::scalar::Real;
use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Zero};

#[derive(Clone, Debug)]
pub struct ProjectivePoint<R> {
    coords: Vec<Complex<R>>,
}

impl<R: Real> ProjectivePoint<R> {
    pub fn new(coords: Vec<Complex<R>>) -> Result<Self> {
        if coords.iter().all(|c| c.re.is_zero() && c.im.is_zero()) {
            return Err(Error::Domain("projective point needs a nonzero coordinate".into()));
        }
        Ok(ProjectivePoint { coords })
    }

    /// (1 : omega_1 : ... : omega_n).
    pub fn from_affine(omega: &[Complex<R>]) -> Self {
        let mut coords = Vec::with_capacity(omega.len() + 1);
        coords.push(cx::cx_one());
        coords.extend(omega.iter().cloned());
        ProjectivePoint { coords }
    }

    pub fn coords(&self) -> &[Complex<R>] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// l2 norm of the coordinate vector.
    pub fn coord_norm(&self) -> R {
        self.coords
            .iter()
            .fold(R::zero(), |acc, c| acc + cx::norm_sqr(c))
            .sqrt()
    }

    pub fn scale(&self, s: &Complex<R>) -> Self {
        ProjectivePoint {
            coords: self.coords.iter().map(|c| c.clone() * s.clone()).collect(),
        }
    }
}

/// Exact multinomial coefficient (d; alpha) with sum(alpha) = d.
pub fn multinomial(d: u32, alpha: &[u32]) -> BigInt {
    debug_assert_eq!(alpha.iter().sum::<u32>(), d);
    let mut num = BigInt::one();
    let mut rem = d;
    for &a in alpha {
        // (rem choose a), telescoping
        for j in 0..a {
            num = num * BigInt::from(rem - j);
        }
        let mut fact = BigInt::one();
        for j in 1..=a {
            fact *= BigInt::from(j);
        }
        num /= fact;
        rem -= a;
    }
    num
}

/// Bombieri norm of a homogeneous polynomial.
///
/// The squared norm is assembled exactly over rationals (coefficients and
/// multinomial weights are integers) and rounded only at the final sqrt.
pub fn bombieri_norm<R: Real>(q: &HomogeneousPolynomial) -> Result<BigMag<R>> {
    let d = q.degree();
    // sum |c|^2 / mult = (sum |c|^2 * (M/mult)) / M with M = lcm-free common
    // denominator d!^? -- simpler: accumulate over a common denominator of
    // prod(mult) is overkill; use exact rational via num-rational-free route:
    // scale by D = multinomial lcm substitute: multiply through by d!.
    let mut dfact = BigInt::one();
    for j in 1..=d {
        dfact *= BigInt::from(j);
    }
    // d!/mult(alpha) is an integer (it is a product of factorials).
    let mut num = BigInt::zero();
    for (m, c) in q.terms() {
        let mult = multinomial(d, &m.0);
        let w = &dfact / &mult;
        num += c * c * w;
    }
    if num.is_zero() {
        return Err(Error::ZeroPolynomial("bombieri_norm"));
    }
    // norm^2 = num / d!
    let num_r = R::from_bigint(&num);
    let den_r = R::from_bigint(&dfact);
    let ln_norm = (num_r.ln() - den_r.ln()).ldexp(-1);
    Ok(BigMag::from_ln(ln_norm))
}

/// h1 log-height: log of the Bombieri norm.
pub fn h1<R: Real>(q: &HomogeneousPolynomial) -> Result<R> {
    Ok(bombieri_norm::<R>(q)?.ln_value().unwrap().clone())
}

/// |Q(x)| / ||x||^(deg Q), invariant under rescaling of x.
pub fn norm_at<R: Real>(q: &HomogeneousPolynomial, x: &ProjectivePoint<R>) -> Result<BigMag<R>> {
    if x.coords.len() != q.num_vars() {
        return Err(Error::Domain(format!(
            "point has {} coordinates, polynomial expects {}",
            x.coords.len(),
            q.num_vars()
        )));
    }
    let v = q.eval(x.coords());
    let nsq = cx::norm_sqr(&v);
    if nsq.is_zero() {
        return Ok(BigMag::Zero);
    }
    let ln_abs = nsq.ln().ldexp(-1);
    let ln_coord = x.coord_norm().ln();
    let d = R::from_i64(q.degree() as i64);
    Ok(BigMag::from_ln(ln_abs - ln_coord * d))
}

/// Chordal projective distance from the 2x2 minors, in [0, 1].
pub fn proj_dist<R: Real>(x: &ProjectivePoint<R>, y: &ProjectivePoint<R>) -> Result<R> {
    if x.coords.len() != y.coords.len() {
        return Err(Error::Domain("projective points of different dimension".into()));
    }
    let n1 = x.coords.len();
    let mut minor_sq = R::zero();
    for i in 0..n1 {
        for j in (i + 1)..n1 {
            let m = x.coords[i].clone() * y.coords[j].clone()
                - x.coords[j].clone() * y.coords[i].clone();
            minor_sq = minor_sq + cx::norm_sqr(&m);
        }
    }
    let d = minor_sq.sqrt() / (x.coord_norm() * y.coord_norm());
    Ok(d)
}

/// A(omega) = 2n+1 + log(1 + c3^2 * n * max_i |omega_i|^2).
pub fn a_omega<R: Real>(omega: &[Complex<R>], c3: &R) -> Result<R> {
    if !(c3.clone() > R::one()) {
        return Err(Error::Domain("A(omega) needs c3 > 1".into()));
    }
    let n = omega.len();
    Ok(R::from_i64(2 * n as i64 + 1) + log1p_max_sq(omega, c3))
}

/// c_d = sqrt(1 + sum |omega_i|^2) * sqrt(1 + d^2 n max_i |omega_i|^2).
pub fn c_d<R: Real>(omega: &[Complex<R>], d: &R) -> Result<R> {
    if !(d.clone() > R::one()) {
        return Err(Error::Domain("c_d needs d > 1".into()));
    }
    let sum_sq = omega.iter().fold(R::zero(), |acc, c| acc + cx::norm_sqr(c));
    let factor1 = (R::one() + sum_sq).sqrt();
    let max_sq = max_coord_sq(omega);
    let n = R::from_i64(omega.len() as i64);
    let factor2 = (R::one() + d.clone() * d.clone() * n * max_sq).sqrt();
    Ok(factor1 * factor2)
}

/// c_d' = 2n+1 + log(1 + d^2 n max_i |omega_i|^2).
pub fn c_d_prime<R: Real>(omega: &[Complex<R>], d: &R) -> Result<R> {
    if !(d.clone() > R::one()) {
        return Err(Error::Domain("c_d' needs d > 1".into()));
    }
    Ok(R::from_i64(2 * omega.len() as i64 + 1) + log1p_max_sq(omega, d))
}

fn max_coord_sq<R: Real>(omega: &[Complex<R>]) -> R {
    omega
        .iter()
        .map(cx::norm_sqr)
        .fold(R::zero(), R::max_val)
}

fn log1p_max_sq<R: Real>(omega: &[Complex<R>], d: &R) -> R {
    let n = R::from_i64(omega.len() as i64);
    (R::one() + d.clone() * d.clone() * n * max_coord_sq(omega)).ln()
}

/// The two caps on the radius under which the Dist-ball maps into the
/// l2-ball of radius c_d r: r <= (1 - 1/d) / (sqrt(1+|omega|^2) sqrt(n+1))
/// and r <= 1 / (sqrt(1+|omega|^2) sqrt(1 + d^2 n max |omega_i|^2)).
pub fn dist_ball_caps<R: Real>(omega: &[Complex<R>], d: &R) -> (R, R) {
    let n = omega.len();
    let sum_sq = omega.iter().fold(R::zero(), |acc, c| acc + cx::norm_sqr(c));
    let s = (R::one() + sum_sq).sqrt();
    let cap1 = (R::one() - R::one() / d.clone()) / (s.clone() * R::from_i64(n as i64 + 1).sqrt());
    let max_sq = max_coord_sq(omega);
    let cap2 = R::one()
        / (s * (R::one() + d.clone() * d.clone() * R::from_i64(n as i64) * max_sq).sqrt());
    (cap1, cap2)
}

#[derive(Clone, Debug)]
pub struct NonvanishingRadius<R> {
    /// Largest certified radius (zero magnitude when p(omega) = 0).
    pub radius: BigMag<R>,
    /// True when p(omega) vanished at working precision.
    pub vanished_at_point: bool,
    /// c_d for converting the projective radius into an l2 radius.
    pub c_d: R,
}

/// Largest radius r such that the homogenization of `p` is certified
/// zero-free on the closed projective ball of radius r about (1 : omega):
/// r must satisfy e^(c_d'(delta+tau)) r < |p(omega)| and the Dist-to-l2 caps.
pub fn nonvanishing_radius<R: Real>(
    p: &IntPolynomial,
    omega: &[Complex<R>],
    d: &R,
) -> Result<NonvanishingRadius<R>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial("nonvanishing_radius"));
    }
    if !(d.clone() > R::one()) {
        return Err(Error::Domain("nonvanishing_radius needs d > 1".into()));
    }
    let cd = c_d(omega, d)?;
    let value = p.eval(omega);
    let vsq = cx::norm_sqr(&value);
    if vsq.is_zero() {
        return Ok(NonvanishingRadius {
            radius: BigMag::Zero,
            vanished_at_point: true,
            c_d: cd,
        });
    }
    let (deg, h, _t): (u32, R, R) = p.t_of()?;
    let delta = R::from_i64(deg as i64);
    let cdp = c_d_prime(omega, d)?;
    // strictness margin: shave one working-precision ulp band
    let ln_p = vsq.ln().ldexp(-1);
    let ln_lemma = ln_p - cdp * (delta + h) + (-crate::working_tolerance::<R>());
    let (cap1, cap2) = dist_ball_caps(omega, d);
    let ln_caps = R::min_val(cap1, cap2).ln();
    let ln_r = R::min_val(ln_lemma, ln_caps);
    Ok(NonvanishingRadius {
        radius: BigMag::from_ln(ln_r),
        vanished_at_point: false,
        c_d: cd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::IntPolynomial;
    use crate::{working_tolerance, BF};
    use num_bigint::BigInt;

    fn pt(coords: &[(f64, f64)]) -> ProjectivePoint<BF> {
        ProjectivePoint::new(
            coords
                .iter()
                .map(|&(re, im)| cx::cx_from_f64(re, im))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn multinomial_values() {
        assert_eq!(multinomial(2, &[1, 1]), BigInt::from(2));
        assert_eq!(multinomial(4, &[2, 2]), BigInt::from(6));
        assert_eq!(multinomial(3, &[3, 0]), BigInt::from(1));
        assert_eq!(multinomial(5, &[2, 2, 1]), BigInt::from(30));
    }

    #[test]
    fn bombieri_examples() {
        // Q = X0 -> norm 1, h1 = 0
        let q = HomogeneousPolynomial::from_terms(2, [(vec![1, 0], BigInt::one())]).unwrap();
        let h: BF = h1(&q).unwrap();
        assert!(h.is_zero());

        // Q = X0 X1 (n=1) -> norm = sqrt(1/2)
        let q = HomogeneousPolynomial::from_terms(2, [(vec![1, 1], BigInt::one())]).unwrap();
        let nm: BigMag<BF> = bombieri_norm(&q).unwrap();
        let expect = 0.5f64.sqrt().ln();
        assert!((nm.ln_f64() - expect).abs() < 1e-14);

        // Q = X0^2 + X1^2 -> norm = sqrt(2)
        let q = HomogeneousPolynomial::from_terms(
            2,
            [(vec![2, 0], BigInt::one()), (vec![0, 2], BigInt::one())],
        )
        .unwrap();
        let nm: BigMag<BF> = bombieri_norm(&q).unwrap();
        assert!((nm.ln_f64() - 2.0f64.sqrt().ln()).abs() < 1e-14);
    }

    #[test]
    fn norm_at_examples() {
        // Q = X0 at (1:1) -> 1/sqrt(2)
        let q = HomogeneousPolynomial::from_terms(2, [(vec![1, 0], BigInt::one())]).unwrap();
        let x = pt(&[(1.0, 0.0), (1.0, 0.0)]);
        let v: BigMag<BF> = norm_at(&q, &x).unwrap();
        assert!((v.ln_f64() - (1.0 / 2.0f64.sqrt()).ln()).abs() < 1e-14);

        // Q = X1 at (1:0) -> 0
        let q = HomogeneousPolynomial::from_terms(2, [(vec![0, 1], BigInt::one())]).unwrap();
        let x = pt(&[(1.0, 0.0), (0.0, 0.0)]);
        assert!(norm_at(&q, &x).unwrap().is_zero());

        // Q = X0 + X1 at (1:1) -> 2/sqrt(2) = sqrt(2)
        let q = HomogeneousPolynomial::from_terms(
            2,
            [(vec![1, 0], BigInt::one()), (vec![0, 1], BigInt::one())],
        )
        .unwrap();
        let x = pt(&[(1.0, 0.0), (1.0, 0.0)]);
        let v: BigMag<BF> = norm_at(&q, &x).unwrap();
        assert!((v.ln_f64() - 2.0f64.sqrt().ln()).abs() < 1e-14);
    }

    #[test]
    fn norm_at_rescaling_invariance() {
        let q = HomogeneousPolynomial::from_terms(
            3,
            [
                (vec![1, 1, 0], BigInt::from(3)),
                (vec![0, 0, 2], BigInt::from(-2)),
            ],
        )
        .unwrap();
        let x = pt(&[(1.0, 0.5), (-0.25, 2.0), (0.7, -0.1)]);
        let s = cx::cx_from_f64::<BF>(-1.75, 0.4);
        let v1 = norm_at(&q, &x).unwrap();
        let v2 = norm_at(&q, &x.scale(&s)).unwrap();
        let tol = working_tolerance::<BF>();
        let diff = (v1.ln_value().unwrap().clone() - v2.ln_value().unwrap().clone()).abs();
        assert!(diff < tol, "rescaling changed norm_at by {diff}");
    }

    #[test]
    fn proj_dist_examples() {
        // orthogonal points
        let x = pt(&[(1.0, 0.0), (0.0, 0.0)]);
        let y = pt(&[(0.0, 0.0), (1.0, 0.0)]);
        let d: BF = proj_dist(&x, &y).unwrap();
        assert!((d.to_f64() - 1.0).abs() < 1e-14);

        // identical points, complex coordinates
        let x = pt(&[(1.0, 0.0), (2.0, 3.0)]);
        assert!(proj_dist(&x, &x).unwrap().is_zero());

        // (1:1) vs (1:-1) -> minor 2, denominators sqrt(2) each
        let x = pt(&[(1.0, 0.0), (1.0, 0.0)]);
        let y = pt(&[(1.0, 0.0), (-1.0, 0.0)]);
        let d: BF = proj_dist(&x, &y).unwrap();
        assert!((d.to_f64() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn proj_dist_symmetry_and_rescaling() {
        let x = pt(&[(1.0, -0.3), (0.2, 0.9), (-1.1, 0.0)]);
        let y = pt(&[(0.4, 0.4), (1.0, 0.0), (0.0, -2.0)]);
        let dxy: BF = proj_dist(&x, &y).unwrap();
        let dyx: BF = proj_dist(&y, &x).unwrap();
        assert_eq!(dxy, dyx);
        let s = cx::cx_from_f64::<BF>(0.123, -4.5);
        let d2: BF = proj_dist(&x.scale(&s), &y).unwrap();
        let tol = BF::exp2i(-(BF::prec_bits() as i64 - 8));
        assert!((dxy - d2).abs() < tol);
    }

    #[test]
    fn appendix_constants() {
        // A((0,0)) = 5 for n = 2
        let omega: Vec<num_complex::Complex<BF>> =
            vec![cx::cx_from_f64(0.0, 0.0), cx::cx_from_f64(0.0, 0.0)];
        let a: BF = a_omega(&omega, &BF::from_f64(7.3)).unwrap();
        assert_eq!(a.to_f64(), 5.0);

        // c_d((0,), d=2) = 1
        let omega0: Vec<num_complex::Complex<BF>> = vec![cx::cx_from_f64(0.0, 0.0)];
        let c: BF = c_d(&omega0, &BF::from_f64(2.0)).unwrap();
        assert_eq!(c.to_f64(), 1.0);

        // c_d((1,), d=2) = sqrt(2) * sqrt(5)
        let omega1: Vec<num_complex::Complex<BF>> = vec![cx::cx_from_f64(1.0, 0.0)];
        let c: BF = c_d(&omega1, &BF::from_f64(2.0)).unwrap();
        assert!((c.to_f64() - (2.0f64.sqrt() * 5.0f64.sqrt())).abs() < 1e-14);

        // d <= 1 rejected
        assert!(c_d(&omega1, &BF::from_f64(1.0)).is_err());
    }

    #[test]
    fn nonvanishing_radius_examples() {
        // p = x - 2 at omega = 0, d = 2: r ~ e^-3/4, true zero at distance 2
        let p = IntPolynomial::from_terms(
            1,
            [(vec![1], BigInt::one()), (vec![0], BigInt::from(-2))],
        );
        let omega = vec![cx::cx_from_f64::<BF>(0.0, 0.0)];
        let out = nonvanishing_radius(&p, &omega, &BF::from_f64(2.0)).unwrap();
        assert!(!out.vanished_at_point);
        let expect = (2.0f64.ln() - 3.0 * (1.0 + 2.0f64.ln())).min((0.5 / 2.0f64.sqrt()).ln());
        // r = min(|p(0)| e^{-c_d'(delta+tau)}, caps) = e^{-3(1+log 2)} * 2
        let r_lemma = 2.0 * (-3.0f64 * (1.0 + 2.0f64.ln())).exp();
        let caps = 0.5 / 2.0f64.sqrt();
        let r_expect = r_lemma.min(caps);
        assert!((out.radius.ln_f64() - r_expect.ln()).abs() < 1e-9, "{} vs {}", out.radius.ln_f64(), r_expect.ln());
        let _ = expect;
        // certified radius below the true root distance 2
        assert!(out.radius.ln_f64() < 2.0f64.ln());

        // p = x at omega = 1: 0 < r < 1
        let p = IntPolynomial::var(1, 0);
        let omega = vec![cx::cx_from_f64::<BF>(1.0, 0.0)];
        let out = nonvanishing_radius(&p, &omega, &BF::from_f64(2.0)).unwrap();
        assert!(!out.radius.is_zero());
        assert!(out.radius.ln_f64() < 0.0);

        // p = x at omega = 0: vanishes, zero radius flagged
        let omega = vec![cx::cx_from_f64::<BF>(0.0, 0.0)];
        let out = nonvanishing_radius(&p, &omega, &BF::from_f64(2.0)).unwrap();
        assert!(out.vanished_at_point);
        assert!(out.radius.is_zero());
    }
}
