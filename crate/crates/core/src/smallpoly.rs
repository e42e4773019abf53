//! Construction of small integer polynomials vanishing at prescribed points
//! of Gamma, plus the classical feasibility calculators (residue-count bound,
//! pigeonhole threshold) and the many-zeroes-implies-small check.
//!
//! The construction replaces the nonconstructive residue pigeonhole with an
//! effective route: exact rational kernels for algebraically presented
//! witnesses, or lattice reduction on the scaled evaluation matrix for
//! numeric ones. The theoretical calculators stay available so the counting
//! arithmetic can be checked independently of the constructive path.

use crate::cx;
use crate::error::{Error, Result};
use crate::lattice::{clear_denominators, linf_norm, lll_reduce, rational_kernel};
use crate::poly::{IntPolynomial, Monomial};
use crate::scalar::Real;
use crate::trajectory::{gamma_radius, ord_gamma, Trajectory};
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

/// How a witness point is known.
#[derive(Clone, Debug)]
pub enum Provenance {
    /// The point's coordinate relations are exact: an algebraic parameter
    /// with its defining integer polynomial, coordinates polynomial in the
    /// parameter or rational multiples of one transcendental log value.
    ExactAlgebraic(WitnessIdeal),
    /// Coordinates known only numerically at the tagged precision.
    NumericOnly { precision_bits: u32 },
}

/// Exact presentation of the dimension-k locus a witness lies on.
#[derive(Clone, Debug)]
pub struct WitnessIdeal {
    /// Defining integer polynomial of the algebraic parameter (univariate).
    pub min_poly: IntPolynomial,
    /// One relation per ambient coordinate.
    pub coords: Vec<CoordRelation>,
    /// Human-readable origin, e.g. "z^3=(1+z)^2".
    pub label: String,
    /// t-proxy of the locus (degree + log-height of its presentation).
    pub t_value: f64,
}

#[derive(Clone, Debug)]
pub enum CoordRelation {
    /// coordinate = q(param), q an integer univariate polynomial.
    PolyOfParam(IntPolynomial),
    /// coordinate = (num/den) * t with t the shared transcendental value.
    LinearInLog { num: i64, den: i64 },
}

impl WitnessIdeal {
    /// Identity used to share condition rows between witnesses on one locus.
    pub fn signature(&self) -> String {
        let coords: Vec<String> = self
            .coords
            .iter()
            .map(|c| match c {
                CoordRelation::PolyOfParam(q) => format!("p:{}", q.to_canonical_string()),
                CoordRelation::LinearInLog { num, den } => format!("l:{num}/{den}"),
            })
            .collect();
        format!("{}|{}", self.min_poly.to_canonical_string(), coords.join(";"))
    }
}

#[derive(Clone, Debug)]
pub struct WitnessPoint<R> {
    /// Trajectory parameter in the closed 1/e disk.
    pub z: Complex<R>,
    /// gamma(z).
    pub omega: Vec<Complex<R>>,
    pub provenance: Provenance,
}

/// Numeric t-budget data for the ideals behind a witness family.
#[derive(Clone, Debug, Serialize)]
pub struct IdealBudget {
    pub k: usize,
    pub t_values: Vec<f64>,
    pub c: f64,
    pub alpha: f64,
}

impl IdealBudget {
    /// Every t-value must fit under c N^alpha and alpha under n - k - 1.
    pub fn validate(&self, n: usize, n_param: f64) -> Result<()> {
        if self.alpha <= 0.0 || self.alpha >= (n - self.k) as f64 - 1.0 {
            return Err(Error::Domain(format!(
                "alpha = {} outside (0, n-k-1) = (0, {})",
                self.alpha,
                (n - self.k) as f64 - 1.0
            )));
        }
        let cap = self.c * n_param.powf(self.alpha);
        for (i, t) in self.t_values.iter().enumerate() {
            if *t > cap {
                return Err(Error::Domain(format!(
                    "t-value {t} of ideal {i} exceeds the budget c N^alpha = {cap}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SiegelDiagnostics {
    pub monomial_count: usize,
    pub condition_rows: usize,
    pub rank: Option<usize>,
    pub scale_bits: Option<u32>,
    pub kernel_dim: Option<usize>,
    pub row_norm_ln_max: f64,
    pub row_norm_ln_min: f64,
}

#[derive(Clone, Debug)]
pub struct SiegelOutcome {
    pub poly: IntPolynomial,
    /// ln of the achieved height.
    pub achieved_height_ln: f64,
    /// ln of max |p(omega_i)| over the witnesses (NEG_INFINITY when exact).
    pub residual_max_ln: f64,
    /// All admissible candidates in the deterministic preference order.
    pub candidates: Vec<IntPolynomial>,
    pub diag: SiegelDiagnostics,
}

/// Monomials of total degree <= d in n variables, lexicographic order.
pub fn monomials_up_to(n: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    loop {
        if cur.iter().sum::<u32>() <= d {
            out.push(Monomial(cur.clone()));
        }
        // odometer increment with degree cap
        let mut i = n;
        loop {
            if i == 0 {
                out.sort();
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur.iter().sum::<u32>() <= d {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// Builds a nonzero integer polynomial of degree <= deg_bound and log-height
/// <= height_bound vanishing at every witness: exactly (rational kernel) for
/// algebraic witnesses, to within 2^(-precision/2) (lattice reduction on the
/// scaled evaluation matrix) for numeric ones.
pub fn siegel_construct<R: Real>(
    points: &[WitnessPoint<R>],
    deg_bound: u32,
    height_bound: f64,
) -> Result<SiegelOutcome> {
    if points.is_empty() {
        return Err(Error::Domain("siegel_construct needs at least one witness".into()));
    }
    let n = points[0].omega.len();
    if points.iter().any(|p| p.omega.len() != n) {
        return Err(Error::Domain("witnesses of mixed ambient dimension".into()));
    }
    let monos = monomials_up_to(n, deg_bound);
    let all_exact = points
        .iter()
        .all(|p| matches!(p.provenance, Provenance::ExactAlgebraic(_)));
    if all_exact {
        siegel_exact(points, &monos, deg_bound, height_bound)
    } else {
        siegel_numeric(points, &monos, height_bound)
    }
}

// ---------------------------------------------------------------------------
// exact path
// ---------------------------------------------------------------------------

/// Arithmetic in Q[z]/(f): dense coefficient vectors of length deg f.
struct ParamField {
    f: Vec<BigRational>, // monic-normalized defining polynomial coefficients
    deg: usize,
}

impl ParamField {
    fn new(min_poly: &IntPolynomial) -> Result<Self> {
        if min_poly.num_vars() != 1 {
            return Err(Error::Domain("witness minimal polynomial must be univariate".into()));
        }
        let d = min_poly
            .degree()
            .ok_or_else(|| Error::ZeroPolynomial("witness minimal polynomial"))? as usize;
        if d == 0 {
            return Err(Error::Domain("witness minimal polynomial is constant".into()));
        }
        let mut coeffs = vec![BigRational::zero(); d + 1];
        for (m, c) in min_poly.terms() {
            coeffs[m.0[0] as usize] = BigRational::from(c.clone());
        }
        let lead = coeffs[d].clone();
        for c in coeffs.iter_mut() {
            *c /= lead.clone();
        }
        Ok(ParamField { f: coeffs, deg: d })
    }

    fn reduce_mul(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let mut prod = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                prod[i + j] += x * y;
            }
        }
        // reduce degree by the monic relation z^d = -(f[0] + ... + f[d-1] z^(d-1))
        while prod.len() > self.deg {
            let top = prod.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let k = prod.len() - self.deg; // top was coefficient of z^(deg + k - ... )
            let _ = k;
            let offset = prod.len() - self.deg;
            for i in 0..self.deg {
                let sub = top.clone() * self.f[i].clone();
                prod[offset + i] -= sub;
            }
        }
        prod.resize(self.deg, BigRational::zero());
        prod
    }

    fn embed_poly(&self, q: &IntPolynomial) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); self.deg.max(1)];
        let mut pow = vec![BigRational::zero(); self.deg];
        pow[0] = BigRational::one(); // z^0
        let mut powers: Vec<Vec<BigRational>> = vec![pow];
        let maxdeg = q.degree().unwrap_or(0) as usize;
        let mut zvec = vec![BigRational::zero(); self.deg];
        if self.deg == 1 {
            // z = -f[0]
            zvec[0] = -self.f[0].clone();
        } else {
            zvec[1] = BigRational::one();
        }
        for _ in 1..=maxdeg {
            let prev = powers.last().unwrap().clone();
            powers.push(self.reduce_mul(&prev, &zvec));
        }
        for (m, c) in q.terms() {
            let e = m.0[0] as usize;
            let cc = BigRational::from(c.clone());
            for (i, p) in powers[e].iter().enumerate() {
                v[i] += cc.clone() * p.clone();
            }
        }
        v.resize(self.deg, BigRational::zero());
        v
    }

    fn one(&self) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); self.deg];
        v[0] = BigRational::one();
        v
    }
}

fn siegel_exact<R: Real>(
    points: &[WitnessPoint<R>],
    monos: &[Monomial],
    deg_bound: u32,
    height_bound: f64,
) -> Result<SiegelOutcome> {
    // group witnesses by ideal signature; each ideal contributes rows once
    let mut ideals: Vec<&WitnessIdeal> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for p in points {
        let Provenance::ExactAlgebraic(ideal) = &p.provenance else {
            unreachable!()
        };
        let sig = ideal.signature();
        if seen.insert(sig) {
            ideals.push(ideal);
        }
    }
    let cols = monos.len();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for ideal in &ideals {
        let field = ParamField::new(&ideal.min_poly)?;
        // per-coordinate power tables
        let n = ideal.coords.len();
        // algebraic factor tables: coords -> powers (vec over Q[z]/f)
        let mut alg_pows: Vec<Vec<Vec<BigRational>>> = Vec::with_capacity(n);
        let mut log_factors: Vec<Option<BigRational>> = Vec::with_capacity(n);
        for rel in &ideal.coords {
            match rel {
                CoordRelation::PolyOfParam(q) => {
                    let base = field.embed_poly(q);
                    let mut tab = vec![field.one(), base.clone()];
                    for _ in 2..=deg_bound as usize {
                        let prev = tab.last().unwrap().clone();
                        tab.push(field.reduce_mul(&prev, &base));
                    }
                    alg_pows.push(tab);
                    log_factors.push(None);
                }
                CoordRelation::LinearInLog { num, den } => {
                    alg_pows.push(vec![field.one()]);
                    log_factors.push(Some(BigRational::new(BigInt::from(*num), BigInt::from(*den))));
                }
            }
        }
        // condition rows indexed by (t-power, z-power); build columns
        let mut block: std::collections::BTreeMap<(u32, usize), Vec<BigRational>> =
            std::collections::BTreeMap::new();
        for (ci, mono) in monos.iter().enumerate() {
            let mut t_pow = 0u32;
            let mut scalar = BigRational::one();
            let mut alg = field.one();
            for (j, &e) in mono.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match &log_factors[j] {
                    Some(ratio) => {
                        t_pow += e;
                        let mut r = BigRational::one();
                        for _ in 0..e {
                            r *= ratio.clone();
                        }
                        scalar *= r;
                    }
                    None => {
                        alg = field.reduce_mul(&alg, &alg_pows[j][e as usize]);
                    }
                }
            }
            for (zi, coeff) in alg.iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                let entry = block
                    .entry((t_pow, zi))
                    .or_insert_with(|| vec![BigRational::zero(); cols]);
                entry[ci] = scalar.clone() * coeff.clone();
            }
        }
        rows.extend(block.into_values());
    }
    let (ln_max, ln_min) = row_norm_range(&rows);
    let kernel = rational_kernel(&rows, cols);
    let rank = cols - kernel.len();
    if kernel.is_empty() {
        return Err(Error::Infeasible(format!(
            "no kernel: {} monomials vs rank {rank}; raise the degree bound",
            cols
        )));
    }
    // shorten: keep the lowest-height kernel vectors, LLL the sublattice
    let mut cands: Vec<Vec<BigInt>> = kernel;
    cands.sort_by_key(|v| linf_norm(v));
    cands.truncate(48);
    let reduced = lll_reduce(cands.clone());
    cands.extend(reduced);
    let polys = candidate_polys(cands, monos, points[0].omega.len());
    finish_selection(
        polys,
        points,
        height_bound,
        true,
        SiegelDiagnostics {
            monomial_count: cols,
            condition_rows: rows.len(),
            rank: Some(rank),
            scale_bits: None,
            kernel_dim: Some(cols - rank),
            row_norm_ln_max: ln_max,
            row_norm_ln_min: ln_min,
        },
    )
}

fn row_norm_range(rows: &[Vec<BigRational>]) -> (f64, f64) {
    let mut ln_max = f64::NEG_INFINITY;
    let mut ln_min = f64::INFINITY;
    for r in rows {
        let ints = clear_denominators(r);
        let n = linf_norm(&ints);
        if n.is_zero() {
            continue;
        }
        let ln = crate::scalar::ln_bigint::<f64>(&n);
        ln_max = ln_max.max(ln);
        ln_min = ln_min.min(ln);
    }
    (ln_max, ln_min)
}

// ---------------------------------------------------------------------------
// numeric path
// ---------------------------------------------------------------------------

fn siegel_numeric<R: Real>(
    points: &[WitnessPoint<R>],
    monos: &[Monomial],
    height_bound: f64,
) -> Result<SiegelOutcome> {
    let cols = monos.len();
    let rows = 2 * points.len();
    if cols <= 2 * points.len() {
        return Err(Error::Domain(format!(
            "need more than {} monomials for {} numeric witnesses, have {cols}",
            2 * points.len(),
            points.len()
        )));
    }
    let scale_bits = R::prec_bits() / 2 + 32;
    let scale = R::exp2i(scale_bits as i64);
    // lattice basis rows: identity block ++ scaled evaluation block
    let mut basis: Vec<Vec<BigInt>> = Vec::with_capacity(cols);
    let mut ln_max = f64::NEG_INFINITY;
    let mut ln_min = f64::INFINITY;
    for (mi, mono) in monos.iter().enumerate() {
        let mut row = vec![BigInt::zero(); cols + rows];
        row[mi] = BigInt::one();
        for (pi, pt) in points.iter().enumerate() {
            let mut val: Complex<R> = cx::cx_one();
            for (j, &e) in mono.0.iter().enumerate() {
                for _ in 0..e {
                    val = val * pt.omega[j].clone();
                }
            }
            let re_scaled = (val.re.clone() * scale.clone()).floor_bigint();
            let im_scaled = (val.im.clone() * scale.clone()).floor_bigint();
            row[cols + 2 * pi] = re_scaled;
            row[cols + 2 * pi + 1] = im_scaled;
        }
        let n = linf_norm(&row[cols..]);
        if !n.is_zero() {
            let ln = crate::scalar::ln_bigint::<f64>(&n);
            ln_max = ln_max.max(ln);
            ln_min = ln_min.min(ln);
        }
        basis.push(row);
    }
    let reduced = lll_reduce(basis);
    let cands: Vec<Vec<BigInt>> = reduced.into_iter().map(|r| r[..cols].to_vec()).collect();
    let polys = candidate_polys(cands, monos, points[0].omega.len());
    finish_selection(
        polys,
        points,
        height_bound,
        false,
        SiegelDiagnostics {
            monomial_count: cols,
            condition_rows: rows,
            rank: None,
            scale_bits: Some(scale_bits),
            kernel_dim: None,
            row_norm_ln_max: ln_max,
            row_norm_ln_min: ln_min,
        },
    )
}

fn candidate_polys(
    vectors: Vec<Vec<BigInt>>,
    monos: &[Monomial],
    n: usize,
) -> Vec<IntPolynomial> {
    let mut out = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for v in vectors {
        if v.iter().all(|x| x.is_zero()) {
            continue;
        }
        // sign normalization: first nonzero coefficient positive
        let flip = v
            .iter()
            .find(|x| !x.is_zero())
            .map(|x| x.is_negative())
            .unwrap_or(false);
        let mut p = IntPolynomial::zero(n);
        for (c, m) in v.iter().zip(monos) {
            if !c.is_zero() {
                p.add_term(m.clone(), if flip { -c.clone() } else { c.clone() });
            }
        }
        let key = p.to_canonical_string();
        if seen.insert(key) {
            out.push(p);
        }
    }
    out
}

fn finish_selection<R: Real>(
    mut polys: Vec<IntPolynomial>,
    points: &[WitnessPoint<R>],
    height_bound: f64,
    exact: bool,
    diag: SiegelDiagnostics,
) -> Result<SiegelOutcome> {
    // deterministic preference: smallest height, then lexicographic canonical form
    polys.sort_by(|a, b| {
        let ha = a.height_int();
        let hb = b.height_int();
        ha.cmp(&hb).then_with(|| a.to_canonical_string().cmp(&b.to_canonical_string()))
    });
    let eps_ln = -((R::prec_bits() / 2) as f64) * std::f64::consts::LN_2;
    let mut smallest_achieved = f64::INFINITY;
    let mut admissible = Vec::new();
    let mut first_residual = f64::NEG_INFINITY;
    for p in &polys {
        let h_ln = crate::scalar::ln_bigint::<f64>(&p.height_int());
        smallest_achieved = smallest_achieved.min(h_ln);
        if h_ln > height_bound + 1e-12 {
            continue;
        }
        // residual check at every witness
        let mut max_ln = f64::NEG_INFINITY;
        for pt in points {
            let v = p.eval(&pt.omega);
            let m2 = cx::norm_sqr(&v);
            if m2.is_positive_val() {
                max_ln = max_ln.max(m2.ln().to_f64() / 2.0);
            }
        }
        if max_ln > eps_ln {
            continue;
        }
        if admissible.is_empty() {
            first_residual = max_ln;
        }
        admissible.push(p.clone());
    }
    if admissible.is_empty() {
        return Err(Error::Infeasible(format!(
            "no candidate within log-height bound {height_bound}; smallest achieved {}",
            if smallest_achieved.is_finite() {
                format!("{smallest_achieved:.4}")
            } else {
                "none (no vanishing candidate at all)".to_string()
            }
        )));
    }
    let poly = admissible[0].clone();
    let achieved = crate::scalar::ln_bigint::<f64>(&poly.height_int());
    Ok(SiegelOutcome {
        poly,
        achieved_height_ln: achieved,
        residual_max_ln: if exact { f64::NEG_INFINITY } else { first_residual },
        candidates: admissible,
        diag,
    })
}

// ---------------------------------------------------------------------------
// calculators
// ---------------------------------------------------------------------------

/// Residue-count bound: with the growth hypothesis
/// e^((k+1)t) >= max(30, 2k deg t + 3 deg h + 6n(k+1) deg^2 + 3(k+1) deg^3)
/// the log-count of height-T degree-t residues is at most
/// 6^(k+1) ((n^2+n+2) deg t^(k+1) + h t^(k+1) + deg t^k log T).
pub fn residue_bound<R: Real>(
    deg_p: u32,
    h_p: &R,
    k: usize,
    n: usize,
    t_height: &R,
    t: u32,
) -> Result<R> {
    if t == 0 {
        return Err(Error::Domain("residue_bound needs t >= 1".into()));
    }
    let deg = R::from_i64(deg_p as i64);
    let tf = R::from_i64(t as i64);
    let kf = k as i64;
    // hypothesis, compared in log space
    let lhs_ln = R::from_i64(kf + 1) * tf.clone();
    let rhs = {
        let a = R::from_i64(2 * kf) * deg.clone() * tf.clone();
        let b = R::from_i64(3) * deg.clone() * h_p.clone();
        let c = R::from_i64(6 * n as i64 * (kf + 1)) * deg.clone() * deg.clone();
        let d = R::from_i64(3 * (kf + 1)) * deg.clone() * deg.clone() * deg.clone();
        R::max_val(R::from_f64(30.0), a + b + c + d)
    };
    if lhs_ln < rhs.ln() {
        return Err(Error::Domain(format!(
            "growth hypothesis fails: (k+1)t = {} < log(max(30, ...)) = {}",
            lhs_ln.to_f64(),
            rhs.ln().to_f64()
        )));
    }
    let six_pow = R::from_f64(6.0).powi(kf + 1);
    let t_k1 = tf.powi(kf + 1);
    let t_k = tf.powi(kf);
    let n2 = R::from_i64((n * n + n + 2) as i64);
    let body = n2 * deg.clone() * t_k1.clone() + h_p.clone() * t_k1 + deg * t_k * t_height.ln();
    Ok(six_pow * body)
}

/// Smallest integer t >= 30 with t >= c (sum t_i)^(1/(n-k)) and
/// t >= c max(t_i)^(1/n).
pub fn pigeonhole_min_t(t_values: &[f64], n: usize, k: usize, safety_const: f64) -> Result<u64> {
    if t_values.is_empty() {
        return Err(Error::Domain("pigeonhole_min_t needs at least one t-value".into()));
    }
    if k + 2 > n {
        return Err(Error::Domain(format!("pigeonhole needs k <= n - 2, got k = {k}, n = {n}")));
    }
    let sum: f64 = t_values.iter().sum();
    let max: f64 = t_values.iter().cloned().fold(0.0, f64::max);
    let a = safety_const * sum.powf(1.0 / (n - k) as f64);
    let b = safety_const * max.powf(1.0 / n as f64);
    let t = a.max(b).max(30.0);
    Ok(t.ceil() as u64)
}

#[derive(Clone, Debug, Serialize)]
pub struct SmallnessCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub zero_count: usize,
}

/// many-zeroes-implies-small: log max_Gamma |p| <= C t(p) - s/C, with the
/// zero-count precondition verified through the argument principle.
pub fn verify_smallness<R: Real>(
    traj: &Trajectory<R>,
    p: &IntPolynomial,
    s: usize,
    c: f64,
) -> Result<SmallnessCheck> {
    if c <= 0.0 {
        return Err(Error::Domain("verify_smallness needs C > 0".into()));
    }
    let count = if s == 0 {
        0
    } else {
        let f = crate::trajectory::compose_poly(traj, p)?;
        let (rep, _) = crate::zerocount::count_zeros(&f, &gamma_radius::<R>())?;
        if rep.count < s {
            return Err(Error::Domain(format!(
                "zero-count precondition unverified: found {} zeros, need {s}",
                rep.count
            )));
        }
        rep.count
    };
    let ord = ord_gamma(traj, p, crate::trajectory::DEFAULT_BOUNDARY_SAMPLES.min(1024))?;
    let (_, _, t): (u32, R, R) = p.t_of()?;
    let lhs = -ord.ord.to_f64();
    let rhs = c * t.to_f64() - s as f64 / c;
    Ok(SmallnessCheck { lhs, rhs, holds: lhs <= rhs, zero_count: count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BF;

    fn numeric_point(omega: &[(f64, f64)]) -> WitnessPoint<BF> {
        WitnessPoint {
            z: cx::cx_from_f64(0.0, 0.0),
            omega: omega.iter().map(|&(re, im)| cx::cx_from_f64(re, im)).collect(),
            provenance: Provenance::NumericOnly { precision_bits: crate::precision() },
        }
    }

    #[test]
    fn siegel_single_point_unit_system() {
        // single point (0, 1): some nonzero p, deg <= 1, p(0,1) = 0
        let pt = numeric_point(&[(0.0, 0.0), (1.0, 0.0)]);
        let out = siegel_construct(&[pt.clone()], 1, 2.0).unwrap();
        assert!(!out.poly.is_zero());
        assert!(out.poly.degree().unwrap() <= 1);
        let v = out.poly.eval(&pt.omega);
        assert!(cx::cx_abs(&v).to_f64() < 2f64.powi(-100));
    }

    #[test]
    fn siegel_empty_points_rejected() {
        let pts: Vec<WitnessPoint<BF>> = vec![];
        assert!(siegel_construct(&pts, 2, 5.0).is_err());
    }

    #[test]
    fn siegel_exact_golden_ratio_relation() {
        // witnesses on z^2 = 1 + z with coords (z, t, 2t): the construction
        // must vanish identically on the locus, hence at both conjugates
        let min_poly = IntPolynomial::from_terms(
            1,
            [
                (vec![2], BigInt::from(1)),
                (vec![1], BigInt::from(-1)),
                (vec![0], BigInt::from(-1)),
            ],
        );
        let ideal = WitnessIdeal {
            min_poly,
            coords: vec![
                CoordRelation::PolyOfParam(IntPolynomial::var(1, 0)),
                CoordRelation::LinearInLog { num: 1, den: 1 },
                CoordRelation::LinearInLog { num: 2, den: 1 },
            ],
            label: "z^2=(1+z)^1".into(),
            t_value: 3.0,
        };
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        let lphi = phi.ln();
        let w1 = WitnessPoint::<BF> {
            z: cx::cx_from_f64(0.0, 0.0),
            omega: vec![
                cx::cx_from_f64(phi, 0.0),
                cx::cx_from_f64(lphi, 0.0),
                cx::cx_from_f64(2.0 * lphi, 0.0),
            ],
            provenance: Provenance::ExactAlgebraic(ideal),
        };
        let out = siegel_construct(&[w1.clone()], 2, 3.0).unwrap();
        assert!(!out.poly.is_zero());
        // exact vanishing at phi-point
        let v = out.poly.eval(&w1.omega);
        assert!(cx::cx_abs(&v).to_f64() < 1e-12, "residual {}", cx::cx_abs(&v).to_f64());
        // and at the conjugate point (1-sqrt5)/2 with the same formal log slot
        let phib = (1.0 - 5.0f64.sqrt()) / 2.0;
        let tslot = 0.7318; // arbitrary: vanishing holds for every t value
        let conj = vec![
            cx::cx_from_f64::<BF>(phib, 0.0),
            cx::cx_from_f64(tslot, 0.0),
            cx::cx_from_f64(2.0 * tslot, 0.0),
        ];
        let v = out.poly.eval(&conj);
        assert!(cx::cx_abs(&v).to_f64() < 1e-12, "conjugate residual {}", cx::cx_abs(&v).to_f64());
    }

    #[test]
    fn residue_bound_examples() {
        // deg=1, h=0, k=0, n=1, T=e^t -> 6 (4t + t) = 30t
        let t = 40u32;
        let t_height: BF = BF::from_f64(t as f64).exp();
        let b: BF = residue_bound(1, &BF::from_f64(0.0), 0, 1, &t_height, t).unwrap();
        assert!((b.to_f64() - 30.0 * t as f64).abs() < 1e-9, "bound = {}", b.to_f64());
        // below the hypothesis threshold: guard fires
        let small: BF = BF::from_f64(1.5);
        assert!(residue_bound::<BF>(1, &BF::from_f64(0.0), 0, 1, &small, 1).is_err());
        // linearity in h: doubling h adds exactly 6^(k+1) h t^(k+1)
        let h = BF::from_f64(3.0);
        let b1: BF = residue_bound(1, &h, 0, 1, &t_height, t).unwrap();
        let b2: BF = residue_bound(1, &(h.clone() + h.clone()), 0, 1, &t_height, t).unwrap();
        let diff = (b2 - b1).to_f64();
        let expect = 6.0 * 3.0 * (t as f64).powi(1);
        assert!((diff - expect).abs() < 1e-8, "diff = {diff}, expect {expect}");
    }

    #[test]
    fn pigeonhole_examples() {
        // floor 30 dominates
        let t = pigeonhole_min_t(&[100.0], 2, 0, 1.0).unwrap();
        assert_eq!(t, 30);
        // sum branch dominates
        let t = pigeonhole_min_t(&[1e6], 2, 0, 1.0).unwrap();
        assert_eq!(t, 1000);
        // empty and bad k rejected
        assert!(pigeonhole_min_t(&[], 2, 0, 1.0).is_err());
        assert!(pigeonhole_min_t(&[10.0], 2, 1, 1.0).is_err());
    }

    #[test]
    fn pigeonhole_monotonicity() {
        let mut prev = 0;
        for sum in [10.0, 1e3, 1e5, 1e7, 1e9] {
            let t = pigeonhole_min_t(&[sum], 3, 0, 1.0).unwrap();
            assert!(t >= prev);
            prev = t;
        }
        let a = pigeonhole_min_t(&[1e6], 2, 0, 1.0).unwrap();
        let b = pigeonhole_min_t(&[1e6], 2, 0, 2.0).unwrap();
        assert!(b >= a);
    }

    #[test]
    fn smallness_on_coordinate_powers() {
        // p = x1^k on the exp curve: lhs = -k, rhs = C k - k/C, holds for C >= 1
        let t = crate::curves::expcurve::<BF>(1, None).unwrap();
        let k = 4u32;
        let p = IntPolynomial::var(2, 0).pow(k);
        let chk = verify_smallness(&t, &p, k as usize, 1.5).unwrap();
        assert!((chk.lhs + k as f64).abs() < 1e-6, "lhs = {}", chk.lhs);
        assert!(chk.holds);
        // s = 0 degenerates to the coefficient bound
        let chk0 = verify_smallness(&t, &p, 0, 1.5).unwrap();
        assert!(chk0.holds);
    }
}
