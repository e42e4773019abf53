//! Census enumerators for the example curves: points of the log-curve coming
//! from z^n' = (1+z)^m' relations, and the rational-parameter point count of
//! the exponential curve, together with the pairwise separation check.

use crate::bigmag::BigMag;
use crate::cx;
use crate::error::{Error, Result};
use crate::poly::IntPolynomial;
use crate::scalar::Real;
use crate::smallpoly::{CoordRelation, Provenance, WitnessIdeal, WitnessPoint};
use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

// ---------------------------------------------------------------------------
// univariate root finding: Durand-Kerner in f64, Newton polish at precision
// ---------------------------------------------------------------------------

/// All complex roots of a univariate integer polynomial, polished to working
/// precision. Callers must accept f64-seeded starting points (degree is small
/// here; the families in scope have well-separated roots).
pub fn univariate_roots<R: Real>(p: &IntPolynomial) -> Result<Vec<Complex<R>>> {
    if p.num_vars() != 1 {
        return Err(Error::Domain("univariate_roots needs one variable".into()));
    }
    let deg = p.degree().ok_or(Error::ZeroPolynomial("univariate_roots"))? as usize;
    if deg == 0 {
        return Ok(vec![]);
    }
    let mut coeffs = vec![0.0f64; deg + 1];
    for (m, c) in p.terms() {
        coeffs[m.0[0] as usize] = crate::scalar::Real::to_f64(&R::from_bigint(c));
    }
    let lead = coeffs[deg];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    // Durand-Kerner
    let mut zs: Vec<Complex<f64>> = (0..deg)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * (k as f64) / (deg as f64) + 0.4;
            Complex::new(1.3 * th.cos(), 1.3 * th.sin())
        })
        .collect();
    let eval = |z: &Complex<f64>| -> Complex<f64> {
        let mut acc = Complex::new(0.0, 0.0);
        for c in monic.iter().rev() {
            acc = acc * z + Complex::new(*c, 0.0);
        }
        acc
    };
    for _ in 0..256 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let mut denom = Complex::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    denom *= zs[i] - zs[j];
                }
            }
            if denom.norm() < 1e-280 {
                denom = Complex::new(1e-280, 0.0);
            }
            let step = eval(&zs[i]) / denom;
            zs[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-13 {
            break;
        }
    }
    // Newton polish at working precision
    let dp = p.derivative(0);
    let mut out = Vec::with_capacity(deg);
    for z0 in zs {
        let mut z: Complex<R> = cx::from_c64(&z0);
        for _ in 0..64 {
            let v = p.eval(std::slice::from_ref(&z));
            let d = dp.eval(std::slice::from_ref(&z));
            let d2 = cx::norm_sqr(&d);
            if !d2.is_positive_val() {
                break;
            }
            let num = v * d.conj();
            let step = Complex::new(num.re / d2.clone(), num.im / d2);
            let small = cx::cx_abs(&step).to_f64() < 2.0f64.powf(-(R::prec_bits() as f64) + 24.0);
            z = z - step;
            if small {
                break;
            }
        }
        out.push(z);
    }
    // deterministic order
    out.sort_by(|a, b| {
        (a.re.to_f64(), a.im.to_f64())
            .partial_cmp(&(b.re.to_f64(), b.im.to_f64()))
            .unwrap()
    });
    Ok(out)
}

// ---------------------------------------------------------------------------
// log-curve census
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiskSpec {
    pub center_re: f64,
    pub center_im: f64,
    pub radius: f64,
}

impl DiskSpec {
    /// Default witness domain: a disk around z = 1.1 staying inside the cut
    /// plane and away from the singular points 0 and -1.
    pub fn default_log_domain() -> Self {
        DiskSpec { center_re: 1.1, center_im: 0.0, radius: 0.85 }
    }

    pub fn contains(&self, z: &Complex<f64>) -> bool {
        let d = (z.re - self.center_re).hypot(z.im - self.center_im);
        d <= self.radius
    }

    /// The disk must avoid the branch cut (-inf, 0] and the points 0, -1.
    pub fn validate(&self) -> Result<()> {
        if self.radius <= 0.0 {
            return Err(Error::Domain("domain disk needs positive radius".into()));
        }
        let reach = if self.center_im.abs() > self.radius {
            f64::INFINITY
        } else {
            self.center_re - (self.radius * self.radius - self.center_im * self.center_im).sqrt()
        };
        if reach <= 0.0 {
            return Err(Error::Domain(
                "domain disk touches the branch cut (-inf, 0]".into(),
            ));
        }
        Ok(())
    }
}

/// One enumerated log-curve point: a root z* of z^n' = (1+z)^m' on the
/// principal sheet, with its ideal presentation and trajectory parameter.
#[derive(Clone, Debug)]
pub struct LogWitness<R> {
    pub pair: (u32, u32),
    pub z_curve: Complex<R>,
    /// Trajectory parameter s with gamma(s) = omega (for the supplied rho).
    pub s_param: Complex<R>,
    pub in_gamma: bool,
    pub point: WitnessPoint<R>,
    /// ln |n' log z - m' log(1+z)| at working precision (branch residual).
    pub branch_residual_ln: f64,
}

/// f_{n'm'}(z) = z^n' - (1+z)^m' as an integer polynomial.
pub fn pair_polynomial(np: u32, mp: u32) -> IntPolynomial {
    let mut p = IntPolynomial::zero(1);
    p.add_term(crate::poly::Monomial(vec![np]), BigInt::one());
    // subtract (1+z)^m'
    for j in 0..=mp {
        let c = binomial(mp, j);
        p.add_term(crate::poly::Monomial(vec![j]), -c);
    }
    p
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut num = BigInt::one();
    for j in 0..k {
        num = num * BigInt::from(n - j);
    }
    let mut den = BigInt::one();
    for j in 1..=k {
        den *= BigInt::from(j);
    }
    num / den
}

/// Witness ideal of the pair locus: z algebraic over f_{n'm'}, y1 = t,
/// y2 = (n'/m') t, and for the embedded curve y3 = z^2, y4 = z^3. The t-value
/// applies the non-irreducible-locus multiplier (n^2 + 1).
pub fn pair_ideal(np: u32, mp: u32, embedded: bool) -> Result<WitnessIdeal> {
    let f = pair_polynomial(np, mp);
    let (deg, h, t): (u32, f64, f64) = f.t_of()?;
    let _ = (deg, h);
    let n_amb = if embedded { 5 } else { 3 };
    let mut coords = vec![
        CoordRelation::PolyOfParam(IntPolynomial::var(1, 0)),
        CoordRelation::LinearInLog { num: 1, den: 1 },
        CoordRelation::LinearInLog { num: np as i64, den: mp as i64 },
    ];
    if embedded {
        coords.push(CoordRelation::PolyOfParam(IntPolynomial::from_terms(
            1,
            [(vec![2u32], BigInt::one())],
        )));
        coords.push(CoordRelation::PolyOfParam(IntPolynomial::from_terms(
            1,
            [(vec![3u32], BigInt::one())],
        )));
    }
    Ok(WitnessIdeal {
        min_poly: f,
        coords,
        label: format!("z^{np}=(1+z)^{mp}"),
        t_value: ((n_amb * n_amb + 1) as f64) * t,
    })
}

/// Enumerates the log-curve census for pair budgets max(n', m') <= T inside
/// the domain disk, on the principal branch, deduplicated across pairs.
pub fn enumerate_log_curve_points<R: Real>(
    t_budget: u32,
    domain: &DiskSpec,
    embedded: bool,
    rho: &R,
) -> Result<Vec<LogWitness<R>>> {
    enumerate_log_curve_points_at(t_budget, domain, embedded, rho, &cx::cx_one())
}

/// Census with the trajectory parameter taken relative to the base point z0.
pub fn enumerate_log_curve_points_at<R: Real>(
    t_budget: u32,
    domain: &DiskSpec,
    embedded: bool,
    rho: &R,
    z0: &Complex<R>,
) -> Result<Vec<LogWitness<R>>> {
    if t_budget < 1 {
        return Err(Error::Domain("census budget T >= 1 required".into()));
    }
    domain.validate()?;
    let mut out: Vec<LogWitness<R>> = Vec::new();
    let dedup_tol = 2.0f64.powf(-(R::prec_bits() as f64) / 4.0);
    let gamma_r = crate::trajectory::gamma_radius::<R>().to_f64();
    for np in 1..=t_budget {
        for mp in 1..=t_budget {
            let f = pair_polynomial(np, mp);
            if f.is_zero() || f.degree() == Some(0) {
                continue; // e.g. n'=m'=1: z = 1+z has no root
            }
            let roots = univariate_roots::<R>(&f)?;
            for z in roots {
                let zf = cx::to_c64(&z);
                if !domain.contains(&zf) {
                    continue;
                }
                // stay away from the singular points and the cut
                if zf.norm() < 1e-9 || (zf + Complex::new(1.0, 0.0)).norm() < 1e-9 {
                    continue;
                }
                if zf.re <= 0.0 && zf.im.abs() < 1e-12 {
                    continue;
                }
                // principal-branch residual n' Log z - m' Log(1+z)
                let lz = cx::cx_ln(&z);
                let one: Complex<R> = cx::cx_one();
                let l1z = cx::cx_ln(&(one.clone() + z.clone()));
                let res = Complex::new(
                    R::from_i64(np as i64) * lz.re.clone() - R::from_i64(mp as i64) * l1z.re.clone(),
                    R::from_i64(np as i64) * lz.im.clone() - R::from_i64(mp as i64) * l1z.im.clone(),
                );
                let res_mag = cx::cx_abs(&res);
                let res_ln = if res_mag.is_zero() {
                    f64::NEG_INFINITY
                } else {
                    res_mag.ln().to_f64()
                };
                if res_ln > -((R::prec_bits() / 2) as f64) * std::f64::consts::LN_2 {
                    continue; // root of the relation on a different sheet
                }
                // dedup across pairs (first pair in lex order wins)
                if out.iter().any(|w| cx::cx_dist(&w.z_curve, &z).to_f64() < dedup_tol) {
                    continue;
                }
                let mut omega = vec![z.clone(), lz, l1z];
                if embedded {
                    let z2 = z.clone() * z.clone();
                    omega.push(z2.clone());
                    omega.push(z2 * z.clone());
                }
                let s = crate::curves::logcurve_param_at(&z, rho, z0);
                let in_gamma = cx::cx_abs(&s).to_f64() <= gamma_r * (1.0 + 1e-12);
                let ideal = pair_ideal(np, mp, embedded)?;
                out.push(LogWitness {
                    pair: (np, mp),
                    z_curve: z.clone(),
                    s_param: s.clone(),
                    in_gamma,
                    point: WitnessPoint {
                        z: s,
                        omega,
                        provenance: Provenance::ExactAlgebraic(ideal),
                    },
                    branch_residual_ln: res_ln,
                });
            }
        }
    }
    Ok(out)
}

/// True iff all pairwise l-infinity distances exceed twice the radius.
pub fn separation_check<R: Real>(points: &[WitnessPoint<R>], radius: &BigMag<R>) -> bool {
    let two_r = radius.mul(&BigMag::from_value(&R::from_f64(2.0)));
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d = points[i]
                .omega
                .iter()
                .zip(&points[j].omega)
                .map(|(a, b)| cx::cx_dist(a, b))
                .fold(R::zero(), R::max_val);
            let dm = BigMag::from_value(&d);
            if dm.cmp_mag(&two_r) != std::cmp::Ordering::Greater {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// exp-curve census
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct ExpCensus {
    pub t_budget: f64,
    pub count: u64,
    /// Least-squares slope of log count vs log T across the internal sweep.
    pub fitted_exponent: f64,
    pub sweep: Vec<(f64, u64)>,
}

/// Strict complexity test t(W_{p/q}) = g^(n-1) + (n-1) log g < T at working
/// precision (g >= 2 makes the log irrational, so no ties exist; g = 1 makes
/// it exactly 1 and the strict comparison settles the boundary).
fn exp_pair_fits<R: Real>(g: u64, n: usize, t_budget: f64) -> bool {
    let gf = R::from_i64(g as i64);
    let t = gf.powi((n - 1) as i64) + R::from_i64((n - 1) as i64) * gf.ln();
    t < R::from_f64(t_budget)
}

/// Number of coprime pairs (p, q), q >= 1, |p/q| <= R, with strict
/// t-complexity below the budget.
pub fn exp_census_count<R: Real>(t_budget: f64, n: usize, r_bound: f64) -> Result<u64> {
    if n < 2 {
        return Err(Error::Domain("exp census needs curve exponent n >= 2".into()));
    }
    let mut g_max = 0u64;
    while exp_pair_fits::<R>(g_max + 1, n, t_budget) {
        g_max += 1;
        if g_max > 10_000_000 {
            return Err(Error::Domain("exp census budget too large".into()));
        }
    }
    if g_max == 0 {
        return Ok(0);
    }
    let mut count = 0u64;
    for q in 1..=g_max {
        let p_cap = ((r_bound * q as f64).floor() as i64).min(g_max as i64);
        for p in -p_cap..=p_cap {
            let g = (p.unsigned_abs()).max(q);
            if g > g_max {
                continue;
            }
            if BigInt::from(p).gcd(&BigInt::from(q)).is_one() {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Census at one budget plus the slope across a log-spaced internal sweep
/// from max(4, T/100) to T.
pub fn count_exp_curve<R: Real>(t_budget: f64, n: usize, r_bound: f64) -> Result<ExpCensus> {
    let count = exp_census_count::<R>(t_budget, n, r_bound)?;
    let lo = (t_budget / 100.0).max(4.0);
    let steps = 16usize;
    let mut sweep = Vec::with_capacity(steps);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..steps {
        let t = lo * (t_budget / lo).powf(i as f64 / (steps - 1) as f64);
        let c = exp_census_count::<R>(t, n, r_bound)?;
        sweep.push((t, c));
        if c > 0 {
            xs.push(t.ln());
            ys.push((c as f64).ln());
        }
    }
    let fitted = crate::zerocount::least_squares_slope(&xs, &ys);
    Ok(ExpCensus { t_budget, count, fitted_exponent: fitted, sweep })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BF;

    #[test]
    fn roots_of_golden_relation() {
        // z^2 = 1 + z: roots (1 +- sqrt 5)/2
        let f = pair_polynomial(2, 1);
        let roots = univariate_roots::<BF>(&f).unwrap();
        assert_eq!(roots.len(), 2);
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        let phib = (1.0 - 5.0f64.sqrt()) / 2.0;
        assert!((roots[0].re.to_f64() - phib).abs() < 1e-12);
        assert!((roots[1].re.to_f64() - phi).abs() < 1e-12);
        // residual exactly zero to high precision
        for r in &roots {
            let v = f.eval(std::slice::from_ref(r));
            assert!(cx::cx_abs(&v).to_f64() < 1e-60);
        }
    }

    #[test]
    fn trivial_pair_contributes_nothing() {
        // n' = m' = 1: z = 1 + z is constant -1, no roots
        let f = pair_polynomial(1, 1);
        assert_eq!(f.degree(), Some(0));
    }

    #[test]
    fn census_t3_contains_golden_and_respects_branch() {
        let rho = BF::from_f64(0.359);
        let ws =
            enumerate_log_curve_points::<BF>(3, &DiskSpec::default_log_domain(), true, &rho)
                .unwrap();
        // golden ratio must be present (phi ~ 1.618 lies in the domain disk)
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!(
            ws.iter().any(|w| (w.z_curve.re.to_f64() - phi).abs() < 1e-9),
            "census: {:?}",
            ws.iter().map(|w| (w.pair, w.z_curve.re.to_f64())).collect::<Vec<_>>()
        );
        // every witness satisfies its defining polynomial and branch relation
        for w in &ws {
            let Provenance::ExactAlgebraic(ideal) = &w.point.provenance else {
                panic!("census witnesses must be exact")
            };
            let v = ideal.min_poly.eval(std::slice::from_ref(&w.z_curve));
            assert!(cx::cx_abs(&v).to_f64() < 1e-60);
            assert!(w.branch_residual_ln <= -128.0 * std::f64::consts::LN_2);
        }
        // dedup: no two witnesses share a z
        for i in 0..ws.len() {
            for j in (i + 1)..ws.len() {
                assert!(cx::cx_dist(&ws[i].z_curve, &ws[j].z_curve).to_f64() > 1e-9);
            }
        }
    }

    #[test]
    fn census_witness_matches_trajectory() {
        // gamma(s_param) must reproduce the witness coordinates
        let traj = crate::curves::logcurve::<BF>(true, None).unwrap();
        let rho = traj.rho().clone();
        let ws =
            enumerate_log_curve_points::<BF>(4, &DiskSpec::default_log_domain(), true, &rho)
                .unwrap();
        let mut checked = 0;
        for w in ws.iter().filter(|w| w.in_gamma) {
            let g = traj.eval_gamma(&w.s_param).unwrap();
            for (a, b) in g.iter().zip(&w.point.omega) {
                assert!(
                    cx::cx_dist(a, b).to_f64() < 1e-30,
                    "pair {:?}: gamma mismatch {}",
                    w.pair,
                    cx::cx_dist(a, b).to_f64()
                );
            }
            checked += 1;
        }
        assert!(checked >= 1, "no in-Gamma witnesses at T = 4");
    }

    #[test]
    fn separation_examples() {
        let rho = BF::from_f64(0.359);
        let ws =
            enumerate_log_curve_points::<BF>(3, &DiskSpec::default_log_domain(), true, &rho)
                .unwrap();
        let pts: Vec<WitnessPoint<BF>> = ws.iter().map(|w| w.point.clone()).collect();
        // radius e^{-T^2} separates the census
        let r: BigMag<BF> = BigMag::from_ln(BF::from_f64(-9.0));
        assert!(separation_check(&pts, &r));
        // duplicated point fails
        let mut dup = pts.clone();
        if let Some(first) = pts.first() {
            dup.push(first.clone());
            assert!(!separation_check(&dup, &r));
        }
        // empty list passes
        let empty: Vec<WitnessPoint<BF>> = vec![];
        assert!(separation_check(&empty, &r));
    }

    #[test]
    fn exp_census_boundary_and_monotonicity() {
        // T = 1: strict comparison leaves nothing (g = 1 gives t = 1, not < 1)
        assert_eq!(exp_census_count::<BF>(1.0, 3, 1.0).unwrap(), 0);
        // monotone in T and R
        let mut prev = 0;
        for t in [4.0, 10.0, 100.0, 1000.0] {
            let c = exp_census_count::<BF>(t, 3, 1.0).unwrap();
            assert!(c >= prev);
            prev = c;
        }
        let narrow = exp_census_count::<BF>(100.0, 3, 0.5).unwrap();
        let wide = exp_census_count::<BF>(100.0, 3, 2.0).unwrap();
        assert!(wide >= narrow);
    }

    #[test]
    fn exp_census_slope_near_one_for_n3() {
        let rep = count_exp_curve::<BF>(2000.0, 3, 1.0).unwrap();
        assert!(
            (rep.fitted_exponent - 1.0).abs() < 0.25,
            "slope = {}",
            rep.fitted_exponent
        );
    }
}
