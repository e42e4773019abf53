//! Elementary functions for [`BigFloat`]: exp, ln, sin/cos, atan and the
//! constants pi and ln 2. Everything runs with guard bits above the working
//! precision and rounds once at the end; series are argument-reduced so the
//! term counts stay in the dozens at 256-bit precision.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::sync::Mutex;

use super::bigfloat::BigFloat;
use super::precision;

const GUARD: u32 = 48;

fn mul_p(a: &BigFloat, b: &BigFloat, p: u32) -> BigFloat {
    a.mul_prec(b, p)
}

fn div_p(a: &BigFloat, b: &BigFloat, p: u32) -> BigFloat {
    a.div_prec(b, p)
}

fn add_p(a: &BigFloat, b: &BigFloat, p: u32) -> BigFloat {
    a.add_exact(b).round_prec(p)
}

// ---------------------------------------------------------------------------
// constants (integer-scaled series, cached per precision)
// ---------------------------------------------------------------------------

struct ConstSet {
    ln2: BigFloat,
    pi: BigFloat,
}

static CONSTS: Mutex<BTreeMap<u32, &'static ConstSet>> = Mutex::new(BTreeMap::new());

fn consts(bits: u32) -> &'static ConstSet {
    let mut map = CONSTS.lock().unwrap();
    if let Some(c) = map.get(&bits) {
        return c;
    }
    let f = bits as u64 + 32;
    let ln2 = ln2_scaled(f);
    let pi = pi_scaled(f);
    let set: &'static ConstSet = Box::leak(Box::new(ConstSet {
        ln2: BigFloat::from_parts(BigInt::from(ln2), -(f as i64)).round_prec(bits),
        pi: BigFloat::from_parts(BigInt::from(pi), -(f as i64)).round_prec(bits),
    }));
    map.insert(bits, set);
    set
}

/// ln 2 * 2^f as an integer: 2 * atanh(1/3).
fn ln2_scaled(f: u64) -> BigUint {
    let mut num = (BigUint::one() << f) / 3u32; // (1/3)^(2j+1) scaled
    let nine = BigUint::from(9u32);
    let mut sum = BigUint::zero();
    let mut j = 0u64;
    while !num.is_zero() {
        sum += &num / (2 * j + 1);
        num /= &nine;
        j += 1;
    }
    sum << 1
}

/// pi * 2^f as an integer: Machin, pi = 16 atan(1/5) - 4 atan(1/239).
fn pi_scaled(f: u64) -> BigUint {
    let a5 = atan_inv_scaled(5, f + 8);
    let a239 = atan_inv_scaled(239, f + 8);
    let v = (a5 << 4) - (a239 << 2);
    v >> 8
}

/// atan(1/k) * 2^f, alternating integer series.
fn atan_inv_scaled(k: u64, f: u64) -> BigUint {
    let k2 = BigUint::from(k * k);
    let mut num = (BigUint::one() << f) / k;
    let mut sum = BigUint::zero();
    let mut j = 0u64;
    let mut positive = true;
    while !num.is_zero() {
        let term = &num / (2 * j + 1);
        if positive {
            sum += term;
        } else {
            sum -= term;
        }
        num /= &k2;
        j += 1;
        positive = !positive;
    }
    sum
}

pub fn pi() -> BigFloat {
    consts(precision()).pi.clone()
}

pub fn ln2() -> BigFloat {
    consts(precision()).ln2.clone()
}

// ---------------------------------------------------------------------------
// exp / ln
// ---------------------------------------------------------------------------

pub fn exp(x: &BigFloat) -> BigFloat {
    let prec = precision();
    if x.is_zero_val() {
        return BigFloat::one();
    }
    let xf = x.to_f64_lossy();
    assert!(
        xf.abs() < 1e17,
        "exp argument magnitude too large ({xf:e}); keep such quantities in log space"
    );
    let p2 = prec + GUARD;
    // x = k ln2 + r, |r| <= ln2/2
    let k = (xf / std::f64::consts::LN_2).round() as i64;
    let kbits = 64 - (k.unsigned_abs().max(1)).leading_zeros();
    let ln2_hi = consts(p2 + kbits + 16).ln2.clone();
    let r = x
        .add_exact(&mul_p(&BigFloat::from_int(BigInt::from(-k)), &ln2_hi, p2 + kbits + 16))
        .round_prec(p2 + 8);
    // halve the argument 9 times, series, then square back
    const H: i64 = 9;
    let r_small = r.ldexp(-H);
    let mut term = BigFloat::one();
    let mut sum = BigFloat::one();
    let mut n = 1i64;
    loop {
        term = mul_p(&term, &r_small, p2);
        term = div_p(&term, &BigFloat::from_int(BigInt::from(n)), p2);
        if term.is_zero_val() || term.msb_exp_pub() < -(p2 as i64 + 8) {
            break;
        }
        sum = add_p(&sum, &term, p2);
        n += 1;
    }
    let mut y = sum;
    for _ in 0..H {
        y = mul_p(&y, &y, p2);
    }
    y.ldexp(k).round_prec(prec)
}

pub fn ln(x: &BigFloat) -> BigFloat {
    let prec = precision();
    assert!(x.signum_i() > 0, "ln of non-positive value {x:?}");
    let p2 = prec + GUARD;
    // x = m * 2^e with m in [1/2, 1)
    let e = x.msb_exp_pub();
    if x.mant_bits() == 1 {
        // exact power of two: ln(2^k) = k ln 2, and ln(1) = 0 exactly
        let k = e - 1;
        if k == 0 {
            return BigFloat::zero_val();
        }
        return mul_p(&BigFloat::from_int(BigInt::from(k)), &consts(p2).ln2, prec);
    }
    let m = x.clone().ldexp(-e);
    // ln m = 2 atanh(u), u = (m-1)/(m+1) in [-1/3, 0)
    let one = BigFloat::one();
    let u = div_p(&m.add_exact(&one.clone().neg_val()), &m.add_exact(&one), p2 + 8);
    let u2 = mul_p(&u, &u, p2 + 8);
    let mut term = u.clone();
    let mut sum = u;
    let mut j = 1i64;
    loop {
        term = mul_p(&term, &u2, p2 + 8);
        let contrib = div_p(&term, &BigFloat::from_int(BigInt::from(2 * j + 1)), p2 + 8);
        if contrib.is_zero_val() || contrib.msb_exp_pub() < -(p2 as i64 + 8) {
            break;
        }
        sum = add_p(&sum, &contrib, p2 + 8);
        j += 1;
    }
    let ln_m = sum.ldexp(1);
    let ebits = 64 - (e.unsigned_abs().max(1)).leading_zeros();
    let ln2_hi = consts(p2 + ebits + 8).ln2.clone();
    let e_ln2 = mul_p(&BigFloat::from_int(BigInt::from(e)), &ln2_hi, p2 + ebits + 8);
    ln_m.add_exact(&e_ln2).round_prec(prec)
}

pub fn powf(x: &BigFloat, p: &BigFloat) -> BigFloat {
    if p.is_zero_val() {
        return BigFloat::one();
    }
    if x.is_zero_val() {
        assert!(p.signum_i() > 0, "0^p with p <= 0");
        return BigFloat::zero_val();
    }
    exp(&(ln(x) * p))
}

// ---------------------------------------------------------------------------
// trigonometry
// ---------------------------------------------------------------------------

/// sin and cos of r by direct Taylor expansion; caller guarantees |r| <= 1.
fn sin_cos_small(r: &BigFloat, p2: u32) -> (BigFloat, BigFloat) {
    let r2 = mul_p(r, r, p2);
    let mut sin_sum = r.clone();
    let mut cos_sum = BigFloat::one();
    let mut term_s = r.clone();
    let mut term_c = BigFloat::one();
    let mut n = 1i64;
    loop {
        // cos term: r^(2n)/(2n)!, sin term: r^(2n+1)/(2n+1)!
        term_c = mul_p(&term_c, &r2, p2);
        term_c = div_p(&term_c, &BigFloat::from_int(BigInt::from((2 * n - 1) * (2 * n))), p2);
        term_s = mul_p(&term_s, &r2, p2);
        term_s = div_p(&term_s, &BigFloat::from_int(BigInt::from((2 * n) * (2 * n + 1))), p2);
        let done_c = term_c.is_zero_val() || term_c.msb_exp_pub() < -(p2 as i64 + 8);
        let done_s = term_s.is_zero_val() || term_s.msb_exp_pub() < -(p2 as i64 + 8);
        let sign = if n % 2 == 1 { -1 } else { 1 };
        if !done_c {
            let t = if sign < 0 { term_c.clone().neg_val() } else { term_c.clone() };
            cos_sum = add_p(&cos_sum, &t, p2);
        }
        if !done_s {
            let t = if sign < 0 { term_s.clone().neg_val() } else { term_s.clone() };
            sin_sum = add_p(&sin_sum, &t, p2);
        }
        if done_c && done_s {
            break;
        }
        n += 1;
    }
    (sin_sum, cos_sum)
}

fn sin_cos(x: &BigFloat) -> (BigFloat, BigFloat) {
    let prec = precision();
    let p2 = prec + GUARD;
    let xf = x.to_f64_lossy();
    assert!(xf.abs() < 1e15, "sin/cos argument too large for range reduction: {xf}");
    let half_pi_f = std::f64::consts::FRAC_PI_2;
    let q = (xf / half_pi_f).round() as i64;
    let qbits = 64 - (q.unsigned_abs().max(1)).leading_zeros();
    let pi_hi = consts(p2 + qbits + 16).pi.clone();
    let half_pi = pi_hi.ldexp(-1);
    let r = x
        .add_exact(&mul_p(&BigFloat::from_int(BigInt::from(-q)), &half_pi, p2 + qbits + 16))
        .round_prec(p2 + 8);
    let (s, c) = sin_cos_small(&r, p2);
    let (s, c) = match q.rem_euclid(4) {
        0 => (s, c),
        1 => (c, s.neg_val()),
        2 => (s.neg_val(), c.neg_val()),
        _ => (c.neg_val(), s),
    };
    (s.round_prec(prec), c.round_prec(prec))
}

pub fn sin(x: &BigFloat) -> BigFloat {
    sin_cos(x).0
}

pub fn cos(x: &BigFloat) -> BigFloat {
    sin_cos(x).1
}

pub fn atan(x: &BigFloat) -> BigFloat {
    let prec = precision();
    let p2 = prec + GUARD;
    if x.is_zero_val() {
        return BigFloat::zero_val();
    }
    let neg = x.signum_i() < 0;
    let a = x.abs();
    let one = BigFloat::one();
    let (arg, from_recip) = if a.cmp_val(&one) == std::cmp::Ordering::Greater {
        (div_p(&one, &a, p2 + 8), true)
    } else {
        (a, false)
    };
    // two halvings: atan(t) = 2 atan(t / (1 + sqrt(1+t^2)))
    let mut t = arg;
    for _ in 0..2 {
        let t2 = mul_p(&t, &t, p2 + 8);
        let s = add_p(&t2, &one, p2 + 8).sqrt_prec(p2 + 8);
        t = div_p(&t, &add_p(&s, &one, p2 + 8), p2 + 8);
    }
    let t2 = mul_p(&t, &t, p2 + 8);
    let mut term = t.clone();
    let mut sum = t;
    let mut j = 1i64;
    loop {
        term = mul_p(&term, &t2, p2 + 8);
        let contrib = div_p(&term, &BigFloat::from_int(BigInt::from(2 * j + 1)), p2 + 8);
        if contrib.is_zero_val() || contrib.msb_exp_pub() < -(p2 as i64 + 8) {
            break;
        }
        let signed = if j % 2 == 1 { contrib.neg_val() } else { contrib };
        sum = add_p(&sum, &signed, p2 + 8);
        j += 1;
    }
    let mut v = sum.ldexp(2);
    if from_recip {
        let half_pi = consts(p2 + 8).pi.clone().ldexp(-1);
        v = half_pi.add_exact(&v.neg_val());
    }
    let v = if neg { v.neg_val() } else { v };
    v.round_prec(prec)
}

pub fn atan2(y: &BigFloat, x: &BigFloat) -> BigFloat {
    let prec = precision();
    match (x.signum_i(), y.signum_i()) {
        (0, 0) => BigFloat::zero_val(),
        (0, sy) => {
            let h = pi().ldexp(-1);
            if sy > 0 { h } else { h.neg_val() }
        }
        (sx, _) if sx > 0 => atan(&(y / x)),
        (_, sy) => {
            let base = atan(&(y / x));
            let p = pi();
            let v = if sy >= 0 { base + p } else { base - p };
            v.round_prec(prec)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &BigFloat, b: f64, tol_exp: i64) {
        let d = (a - &BigFloat::from_f64_exact(b)).abs();
        assert!(
            d < BigFloat::one().ldexp(tol_exp),
            "value {} vs reference {b}, diff {d}",
            a
        );
    }

    #[test]
    fn constants_match_f64() {
        close(&pi(), std::f64::consts::PI, -50);
        close(&ln2(), std::f64::consts::LN_2, -50);
    }

    #[test]
    fn exp_ln_inverse() {
        for v in [0.5, 1.0, -2.25, 10.0, -30.5, 0.001] {
            let x = BigFloat::from_f64_exact(v);
            let back = ln(&exp(&x));
            let d = (&back - &x).abs();
            assert!(d < BigFloat::one().ldexp(-240), "v={v} diff={d}");
        }
    }

    #[test]
    fn exp_known_values() {
        close(&exp(&BigFloat::from_f64_exact(1.0)), std::f64::consts::E, -48);
        close(&exp(&BigFloat::from_f64_exact(0.0)), 1.0, -60);
        // e^(ln 2) = 2 at full precision
        let two = exp(&ln2());
        let d = (&two - &BigFloat::from_f64_exact(2.0)).abs();
        assert!(d < BigFloat::one().ldexp(-250), "diff {d}");
    }

    #[test]
    fn ln_known_values() {
        close(&ln(&BigFloat::from_f64_exact(2.0)), std::f64::consts::LN_2, -50);
        assert!(ln(&BigFloat::from_f64_exact(1.0)).is_zero_val());
        close(&ln(&BigFloat::from_f64_exact(1e6)), 6.0 * std::f64::consts::LN_10, -45);
    }

    #[test]
    fn trig_values() {
        let p = pi();
        assert!(sin(&p).abs() < BigFloat::one().ldexp(-250));
        let half = p.clone().ldexp(-1);
        close(&sin(&half), 1.0, -250);
        close(&cos(&half), 0.0, -250);
        close(&sin(&BigFloat::from_f64_exact(1.0)), 1.0f64.sin(), -48);
        close(&cos(&BigFloat::from_f64_exact(-0.7)), 0.7f64.cos(), -48);
    }

    #[test]
    fn sin_cos_pythagorean_identity() {
        for v in [0.1, 0.9, 2.3, -1.7, 6.1] {
            let x = BigFloat::from_f64_exact(v);
            let s = sin(&x);
            let c = cos(&x);
            let lhs = &s * &s + &c * &c;
            let d = (&lhs - &BigFloat::one()).abs();
            assert!(d < BigFloat::one().ldexp(-245), "v={v} diff={d}");
        }
    }

    #[test]
    fn atan_values() {
        close(&atan(&BigFloat::from_f64_exact(1.0)), std::f64::consts::FRAC_PI_4, -48);
        close(&atan(&BigFloat::from_f64_exact(-3.0)), (-3.0f64).atan(), -48);
        // atan(tan(x)) = x
        let x = BigFloat::from_f64_exact(0.8);
        let t = div_p(&sin(&x), &cos(&x), 300);
        let back = atan(&t);
        let d = (&back - &x).abs();
        assert!(d < BigFloat::one().ldexp(-240), "diff={d}");
    }

    #[test]
    fn atan2_quadrants() {
        let one = BigFloat::one();
        let m1 = one.clone().neg_val();
        close(&atan2(&one, &one), std::f64::consts::FRAC_PI_4, -48);
        close(&atan2(&one, &m1), 3.0 * std::f64::consts::FRAC_PI_4, -48);
        close(&atan2(&m1, &m1), -3.0 * std::f64::consts::FRAC_PI_4, -48);
        close(&atan2(&m1, &one), -std::f64::consts::FRAC_PI_4, -48);
    }

    #[test]
    fn powf_matches_powi() {
        let x = BigFloat::from_f64_exact(1.7);
        let a = x.powi(5);
        let b = powf(&x, &BigFloat::from_f64_exact(5.0));
        let d = (&a - &b).abs();
        assert!(d < BigFloat::one().ldexp(-230), "diff={d}");
    }
}
