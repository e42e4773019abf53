//! Certified trajectories of polynomial vector fields: power-series solution
//! of x' = rho * xi(x) with a geometric majorant tail bound, point evaluation,
//! boundary sampling, the order functional ord_Gamma, polynomial composition
//! and the distance-based tameness probe.

use crate::bigmag::BigMag;
use crate::cx;
use crate::error::{Error, Result};
use crate::poly::IntPolynomial;
use crate::scalar::Real;
use crate::series::{compose_poly_series, Series};
use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::sync::Mutex;

/// Radius of the parameter disk carrying Gamma.
pub fn gamma_radius<R: Real>() -> R {
    R::one() / R::from_f64(1.0).exp()
}

/// Polynomial vector field xi = sum (components_i / denominator) d/dx_i.
#[derive(Clone, Debug)]
pub struct VectorField {
    n: usize,
    components: Vec<IntPolynomial>,
    denominator: BigInt,
}

impl VectorField {
    pub fn new(components: Vec<IntPolynomial>, denominator: BigInt) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Domain("vector field needs at least one component".into()));
        }
        let n = components.len();
        for c in &components {
            if c.num_vars() != n {
                return Err(Error::Domain(format!(
                    "component arity {} does not match dimension {n}",
                    c.num_vars()
                )));
            }
        }
        if denominator <= BigInt::zero() {
            return Err(Error::Domain("denominator must be positive".into()));
        }
        Ok(VectorField { n, components, denominator })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[IntPolynomial] {
        &self.components
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    /// Max total degree over components (0 for constant fields).
    pub fn degree(&self) -> u32 {
        self.components
            .iter()
            .filter_map(|c| c.degree())
            .max()
            .unwrap_or(0)
    }

    /// Majorant constant: max_i sum |coefficients| / denominator.
    pub fn majorant_constant<R: Real>(&self) -> R {
        let num = self
            .components
            .iter()
            .map(|c| c.coeff_abs_sum())
            .max()
            .unwrap_or_else(BigInt::zero);
        R::from_bigint(&num) / R::from_bigint(&self.denominator)
    }
}

/// Parameters of the scalar majorant ODE u' = rho C (b0 + u)^D.
#[derive(Clone, Debug)]
pub struct Majorant<R> {
    pub b0: R,
    pub c: R,
    pub degree: u32,
    pub rho: R,
}

impl<R: Real> Majorant<R> {
    pub fn build(field: &VectorField, base: &[Complex<R>], rho: &R) -> Self {
        let b0 = base
            .iter()
            .map(cx::cx_abs)
            .fold(R::one(), R::max_val);
        Majorant {
            b0,
            c: field.majorant_constant(),
            degree: field.degree(),
            rho: rho.clone(),
        }
    }

    /// Blow-up radius of the majorant solution; None means entire.
    pub fn blow_up_radius(&self) -> Option<R> {
        if self.degree <= 1 {
            return None;
        }
        let d = self.degree as i64;
        // s* = b0^(1-D) / ((D-1) rho C)
        let num = self.b0.powi(1 - d);
        Some(num / (R::from_i64(d - 1) * self.rho.clone() * self.c.clone()))
    }

    pub fn certifies(&self, radius: &R) -> bool {
        match self.blow_up_radius() {
            None => true,
            Some(s) => s > *radius,
        }
    }

    /// Majorant value u(r), finite only for r inside the blow-up radius.
    pub fn value(&self, r: &R) -> R {
        let d = self.degree as i64;
        if d == 0 {
            return self.rho.clone() * self.c.clone() * r.clone();
        }
        if d == 1 {
            let e = (self.rho.clone() * self.c.clone() * r.clone()).exp();
            return self.b0.clone() * (e - R::one());
        }
        let dm1 = R::from_i64(d - 1);
        let inner = self.b0.powi(1 - d) - dm1 * self.rho.clone() * self.c.clone() * r.clone();
        assert!(inner.is_positive_val(), "majorant evaluated beyond blow-up");
        // (inner)^(-1/(D-1)) - b0
        let exponent = -(R::one() / R::from_i64(d - 1));
        inner.powf(&exponent) - self.b0.clone()
    }

    /// ln of the tail bound sum_{k>M} [u]_k rc^k, minimized over a small set
    /// of Cauchy radii r in (rc, s*).
    pub fn ln_tail(&self, trunc_order: usize, rc: &R) -> R {
        let candidates: Vec<R> = match self.blow_up_radius() {
            None => vec![
                rc.clone() * R::from_f64(2.0),
                rc.clone() * R::from_f64(4.0),
                rc.clone() * R::from_f64(8.0),
            ],
            Some(s) => (1..=8)
                .map(|j| {
                    let lam = R::one() - R::exp2i(-j);
                    rc.clone() + (s.clone() - rc.clone()) * lam
                })
                .collect(),
        };
        let m1 = R::from_i64(trunc_order as i64 + 1);
        let mut best: Option<R> = None;
        for r in candidates {
            if !(r > *rc) {
                continue;
            }
            let q = rc.clone() / r.clone();
            let u = self.value(&r);
            if !u.is_positive_val() {
                continue;
            }
            // ln( u q^(M+1) / (1-q) )
            let ln_t = u.ln() + m1.clone() * q.clone().ln() - (R::one() - q).ln();
            best = Some(match best {
                None => ln_t,
                Some(b) => R::min_val(b, ln_t),
            });
        }
        best.expect("no valid Cauchy radius for tail bound")
    }
}

/// Analytic trajectory on the certified disk |z| <= 1/e + margin.
pub struct Trajectory<R> {
    field: VectorField,
    base: Vec<Complex<R>>,
    rho: R,
    margin: R,
    cert_radius: R,
    order: usize,
    series: Vec<Series<R>>,
    grids: Mutex<BTreeMap<(usize, String), std::sync::Arc<SampleGrid<R>>>>,
}

/// gamma evaluated on a uniform boundary grid z_j = r e^(2 pi i j / count).
pub struct SampleGrid<R> {
    pub radius: R,
    pub zs: Vec<Complex<R>>,
    pub points: Vec<Vec<Complex<R>>>,
}

pub const DEFAULT_TRUNCATION: usize = 160;
pub const DEFAULT_MARGIN: f64 = 0.05;
pub const DEFAULT_BOUNDARY_SAMPLES: usize = 1 << 12;

impl<R: Real> Trajectory<R> {
    pub fn field(&self) -> &VectorField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn base_point(&self) -> &[Complex<R>] {
        &self.base
    }

    pub fn rho(&self) -> &R {
        &self.rho
    }

    pub fn margin(&self) -> &R {
        &self.margin
    }

    pub fn cert_radius(&self) -> &R {
        &self.cert_radius
    }

    pub fn truncation_order(&self) -> usize {
        self.order
    }

    pub fn component_series(&self) -> &[Series<R>] {
        &self.series
    }

    pub fn tail_bound(&self) -> &BigMag<R> {
        &self.series[0].tail
    }

    pub fn from_parts(
        field: VectorField,
        base: Vec<Complex<R>>,
        rho: R,
        margin: R,
        order: usize,
        series: Vec<Series<R>>,
    ) -> Self {
        let cert_radius = gamma_radius::<R>() + margin.clone();
        Trajectory {
            field,
            base,
            rho,
            margin,
            cert_radius,
            order,
            series,
            grids: Mutex::new(BTreeMap::new()),
        }
    }
}

/// Largest rho certified by the majorant test on |z| <= 1/e + margin,
/// located by bisection as the error reports request.
pub fn max_certified_rho<R: Real>(field: &VectorField, base: &[Complex<R>], margin: &R) -> Option<R> {
    let rc = gamma_radius::<R>() + margin.clone();
    let probe = |rho: &R| Majorant::build(field, base, rho).certifies(&rc);
    if probe(&R::from_f64(1e9)) {
        return None; // entire: any rho works
    }
    let mut lo = R::zero();
    let mut hi = R::from_f64(1.0);
    while probe(&hi) {
        hi = hi.clone() * R::from_f64(2.0);
    }
    for _ in 0..64 {
        let mid = (lo.clone() + hi.clone()).ldexp(-1);
        if probe(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

/// Solves x' = rho xi(x), x(0) = base, as truncated power series with a
/// certified tail bound on |z| <= 1/e + margin.
///
/// The requested truncation order doubles until the majorant tail is below
/// 2^(-precision/2).
pub fn solve_trajectory<R: Real>(
    field: &VectorField,
    base: &[Complex<R>],
    rho: &R,
    order_request: usize,
    margin: &R,
) -> Result<Trajectory<R>> {
    if base.len() != field.dim() {
        return Err(Error::Domain(format!(
            "base point has {} coordinates, field dimension is {}",
            base.len(),
            field.dim()
        )));
    }
    if order_request < 8 {
        return Err(Error::Domain("truncation order must be at least 8".into()));
    }
    if !rho.is_positive_val() {
        return Err(Error::Domain("rho must be positive".into()));
    }
    let rc = gamma_radius::<R>() + margin.clone();
    let majorant = Majorant::build(field, base, rho);
    if !majorant.certifies(&rc) {
        let best = max_certified_rho(field, base, margin)
            .map(|r| r.to_f64())
            .unwrap_or(f64::INFINITY);
        return Err(Error::Convergence(format!(
            "majorant does not certify rho = {} on |z| <= {}; largest admissible rho ~ {:.6}",
            rho.to_f64(),
            rc.to_f64(),
            best
        )));
    }
    // pick the truncation order by doubling until the tail target holds
    let target = -((R::prec_bits() / 2) as i64);
    let mut order = order_request;
    loop {
        let ln_tail = majorant.ln_tail(order, &rc);
        if ln_tail < R::from_i64(target) * R::ln_2() {
            break;
        }
        order *= 2;
        if order > 1 << 20 {
            return Err(Error::Convergence(
                "tail bound does not reach the target at any practical truncation order".into(),
            ));
        }
    }
    let coeffs = recursion_coefficients(field, base, rho, order);
    let ln_tail = majorant.ln_tail(order, &rc);
    let tail = BigMag::from_ln(ln_tail);
    let series: Vec<Series<R>> = coeffs
        .into_iter()
        .map(|c| Series::new(c, rc.clone(), tail.clone()))
        .collect();
    Ok(Trajectory::from_parts(
        field.clone(),
        base.to_vec(),
        rho.clone(),
        margin.clone(),
        order,
        series,
    ))
}

/// Incremental coefficient recursion: a_{i,k+1} = rho [xi_i(x)]_k / (k+1).
///
/// Each monomial of each component keeps a growing product ladder so one new
/// coefficient costs O(k) per product level; the whole solve is O(M^2) per
/// monomial factor.
fn recursion_coefficients<R: Real>(
    field: &VectorField,
    base: &[Complex<R>],
    rho: &R,
    order: usize,
) -> Vec<Vec<Complex<R>>> {
    let n = field.dim();
    let m = order;
    let mut comps: Vec<Vec<Complex<R>>> = base.iter().map(|b| vec![b.clone()]).collect();

    struct Ladder<R> {
        factors: Vec<usize>,          // component index, one per degree
        levels: Vec<Vec<Complex<R>>>, // levels[l] = coeffs of product of factors[0..=l]
        coeff: Complex<R>,
    }
    // monomials per field component
    let mut ladders: Vec<Vec<Ladder<R>>> = Vec::with_capacity(n);
    let denom = R::from_bigint(field.denominator());
    for comp in field.components() {
        let mut ls = Vec::new();
        for (mono, c) in comp.terms() {
            let mut factors = Vec::new();
            for (var, &e) in mono.0.iter().enumerate() {
                for _ in 0..e {
                    factors.push(var);
                }
            }
            let coeff = cx::cx(R::from_bigint(c) / denom.clone(), R::zero());
            ls.push(Ladder { factors, levels: Vec::new(), coeff });
        }
        ladders.push(ls);
    }

    // extend every ladder with coefficient index k of its product
    let extend = |ladder: &mut Ladder<R>, comps: &Vec<Vec<Complex<R>>>, k: usize| {
        if ladder.factors.is_empty() {
            return; // constant monomial, handled at extraction
        }
        if ladder.levels.is_empty() {
            ladder.levels = vec![Vec::new(); ladder.factors.len()];
        }
        for l in 0..ladder.factors.len() {
            let idx = ladder.factors[l];
            let val = if l == 0 {
                comps[idx][k].clone()
            } else {
                // convolution coefficient k of levels[l-1] * comps[idx]
                let mut acc = cx::cx_zero();
                for i in 0..=k {
                    let a = &ladder.levels[l - 1][i];
                    let b = &comps[idx][k - i];
                    acc = acc + a.clone() * b.clone();
                }
                acc
            };
            ladder.levels[l].push(val);
        }
    };

    for k in 0..m {
        // all component coefficients up to index k are known; extend ladders
        for ls in ladders.iter_mut() {
            for ladder in ls.iter_mut() {
                extend(ladder, &comps, k);
            }
        }
        // a_{i,k+1} = rho/(k+1) * [xi_i(x)]_k
        let kf = R::from_i64(k as i64 + 1);
        for i in 0..n {
            let mut acc: Complex<R> = cx::cx_zero();
            for ladder in &ladders[i] {
                let term_k = if ladder.factors.is_empty() {
                    if k == 0 {
                        ladder.coeff.clone()
                    } else {
                        cx::cx_zero()
                    }
                } else {
                    let top = ladder.levels.last().unwrap();
                    top[k].clone() * ladder.coeff.clone()
                };
                acc = acc + term_k;
            }
            let scale = cx::cx(rho.clone() / kf.clone(), R::zero());
            comps[i].push(acc * scale);
        }
    }
    comps
}

impl<R: Real> Trajectory<R> {
    /// gamma(z) for |z| within the certified disk.
    pub fn eval_gamma(&self, z: &Complex<R>) -> Result<Vec<Complex<R>>> {
        let zmag2 = cx::norm_sqr(z);
        let r2 = self.cert_radius.clone() * self.cert_radius.clone();
        // allow a one-ulp band at the rim
        let slack = R::one() + R::exp2i(-(R::prec_bits() as i64 - 8));
        if zmag2 > r2 * slack {
            return Err(Error::Domain(format!(
                "|z| = {} outside certified radius {}",
                zmag2.sqrt().to_f64(),
                self.cert_radius.to_f64()
            )));
        }
        Ok(self.series.iter().map(|s| s.eval(z)).collect())
    }

    /// gamma'(z), via the derivative series (certified on a shrunk disk that
    /// still contains |z| <= 1/e + margin/2).
    pub fn eval_gamma_derivative(&self, z: &Complex<R>) -> Vec<Complex<R>> {
        let shrink = (gamma_radius::<R>() + self.margin.clone().ldexp(-1)) / self.cert_radius.clone();
        self.series
            .iter()
            .map(|s| s.derivative(&shrink).eval(z))
            .collect()
    }

    /// Uniform boundary grid at `radius` with `count` samples, cached.
    pub fn boundary_grid(&self, radius: &R, count: usize) -> std::sync::Arc<SampleGrid<R>> {
        let key = (count, format!("{radius}"));
        {
            let grids = self.grids.lock().unwrap();
            if let Some(g) = grids.get(&key) {
                return g.clone();
            }
        }
        let two_pi = R::pi().ldexp(1);
        let countf = R::from_i64(count as i64);
        let mut zs = Vec::with_capacity(count);
        let mut points = Vec::with_capacity(count);
        for j in 0..count {
            let theta = two_pi.clone() * R::from_i64(j as i64) / countf.clone();
            let z = cx::polar(radius, &theta);
            let p = self.series.iter().map(|s| s.eval(&z)).collect();
            zs.push(z);
            points.push(p);
        }
        let grid = std::sync::Arc::new(SampleGrid { radius: radius.clone(), zs, points });
        let mut grids = self.grids.lock().unwrap();
        grids.entry(key).or_insert_with(|| grid.clone()).clone()
    }

    /// Residual ||gamma'(z) - rho xi(gamma(z))||_inf at a parameter z.
    pub fn residual_at(&self, z: &Complex<R>) -> R {
        let g = self.eval_gamma(z).expect("residual inside certified disk");
        let dg = self.eval_gamma_derivative(z);
        let denom = R::from_bigint(self.field.denominator());
        let mut worst = R::zero();
        for (i, comp) in self.field.components().iter().enumerate() {
            let xi = comp.eval(&g);
            let scaled = Complex::new(
                xi.re * self.rho.clone() / denom.clone(),
                xi.im * self.rho.clone() / denom.clone(),
            );
            let diff = dg[i].clone() - scaled;
            worst = R::max_val(worst, cx::cx_abs(&diff));
        }
        worst
    }
}

/// Result of the boundary maximum search behind ord_Gamma.
#[derive(Clone, Debug)]
pub struct OrdReport<R> {
    /// ord_Gamma p = -log max_{|z|<=1/e} |p(gamma(z))|.
    pub ord: R,
    /// Heuristic error estimate: mesh term plus tail contribution.
    pub error_estimate: R,
    /// Parameter of the located boundary maximum.
    pub argmax_z: Complex<R>,
    pub samples_used: usize,
}

pub fn ord_gamma<R: Real>(
    traj: &Trajectory<R>,
    p: &IntPolynomial,
    samples: usize,
) -> Result<OrdReport<R>> {
    ord_gamma_with(traj, p, samples, true)
}

/// Order functional with optional golden-section refinement (the coarse mode
/// serves candidate filtering, where only the sample maximum matters).
pub fn ord_gamma_with<R: Real>(
    traj: &Trajectory<R>,
    p: &IntPolynomial,
    samples: usize,
    refine: bool,
) -> Result<OrdReport<R>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial("ord_gamma"));
    }
    if p.num_vars() != traj.dim() {
        return Err(Error::Domain(format!(
            "polynomial in {} variables on a trajectory of dimension {}",
            p.num_vars(),
            traj.dim()
        )));
    }
    let radius = gamma_radius::<R>();
    let grid = traj.boundary_grid(&radius, samples);
    // scan boundary samples for |p|^2 maxima
    let maxe = p.max_exponents();
    let mut best_sq = R::zero();
    let mut best_idx = 0usize;
    let mut all_sq: Vec<R> = Vec::with_capacity(samples);
    for (j, pt) in grid.points.iter().enumerate() {
        let tables = crate::poly::PowerTable::build(pt, maxe.iter().cloned());
        let v = p.eval_with_tables(&tables);
        let sq = cx::norm_sqr(&v);
        if sq > best_sq {
            best_sq = sq.clone();
            best_idx = j;
        }
        all_sq.push(sq);
    }
    // degenerate: the composition is indistinguishable from zero
    let tail = traj.tail_bound();
    let poly_scale = R::from_bigint(&p.coeff_abs_sum());
    let tail_threshold = match tail {
        BigMag::Zero => R::zero(),
        BigMag::Log(l) => {
            let t = l.clone().exp() * poly_scale * R::from_f64(16.0);
            t.clone() * t
        }
    };
    if best_sq <= tail_threshold {
        return Err(Error::Degenerate(
            "p∘gamma vanishes on Gamma at working precision".into(),
        ));
    }
    // golden-section refinement in the three best brackets
    let two_pi = R::pi().ldexp(1);
    let countf = R::from_i64(samples as i64);
    let mut ranked: Vec<usize> = if refine { local_maxima(&all_sq) } else { Vec::new() };
    ranked.sort_by(|&a, &b| all_sq[b].partial_cmp(&all_sq[a]).unwrap());
    ranked.truncate(3);
    if refine && !ranked.contains(&best_idx) {
        ranked.push(best_idx);
    }
    let eval_theta = |theta: &R| -> R {
        let z = cx::polar(&radius, theta);
        let pt = traj.eval_gamma(&z).unwrap();
        let tables = crate::poly::PowerTable::build(&pt, maxe.iter().cloned());
        cx::norm_sqr(&p.eval_with_tables(&tables))
    };
    let mut best_theta = two_pi.clone() * R::from_i64(best_idx as i64) / countf.clone();
    for &j in &ranked {
        let lo = two_pi.clone() * R::from_i64(j as i64 - 1) / countf.clone();
        let hi = two_pi.clone() * R::from_i64(j as i64 + 1) / countf.clone();
        let (theta, val) = golden_max(&eval_theta, lo, hi, 48);
        if val > best_sq {
            best_sq = val;
            best_theta = theta;
        }
    }
    let max_abs_ln = best_sq.ln().ldexp(-1);
    let ord = -max_abs_ln.clone();
    // mesh error: discrete curvature of log|f|^2 around the best sample
    let prev = &all_sq[(best_idx + samples - 1) % samples];
    let next = &all_sq[(best_idx + 1) % samples];
    let mesh_err = if prev.is_positive_val() && next.is_positive_val() {
        let c = prev.clone().ln() + next.clone().ln() - all_sq[best_idx].clone().ln().ldexp(1);
        c.abs().ldexp(-3)
    } else {
        R::from_f64(1e-3)
    };
    let tail_err = match tail {
        BigMag::Zero => R::zero(),
        BigMag::Log(l) => (l.clone() - max_abs_ln).exp(),
    };
    Ok(OrdReport {
        ord,
        error_estimate: mesh_err + tail_err,
        argmax_z: cx::polar(&radius, &best_theta),
        samples_used: samples,
    })
}

fn local_maxima<R: Real>(vals: &[R]) -> Vec<usize> {
    let n = vals.len();
    (0..n)
        .filter(|&j| {
            let prev = &vals[(j + n - 1) % n];
            let next = &vals[(j + 1) % n];
            vals[j] >= *prev && vals[j] >= *next
        })
        .collect()
}

/// Golden-section maximization on [lo, hi].
fn golden_max<R: Real>(f: &dyn Fn(&R) -> R, mut lo: R, mut hi: R, iters: usize) -> (R, R) {
    let phi_inv = (R::from_f64(5.0).sqrt() - R::one()).ldexp(-1); // 0.618...
    let mut c = hi.clone() - (hi.clone() - lo.clone()) * phi_inv.clone();
    let mut d = lo.clone() + (hi.clone() - lo.clone()) * phi_inv.clone();
    let mut fc = f(&c);
    let mut fd = f(&d);
    for _ in 0..iters {
        if fc > fd {
            hi = d;
            d = c.clone();
            fd = fc.clone();
            c = hi.clone() - (hi.clone() - lo.clone()) * phi_inv.clone();
            fc = f(&c);
        } else {
            lo = c;
            c = d.clone();
            fc = fd.clone();
            d = lo.clone() + (hi.clone() - lo.clone()) * phi_inv.clone();
            fd = f(&d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// p composed with gamma as a truncated univariate series with tail bound.
pub fn compose_poly<R: Real>(traj: &Trajectory<R>, p: &IntPolynomial) -> Result<Series<R>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial("compose_poly"));
    }
    compose_poly_series(p, traj.component_series(), traj.truncation_order() + 1)
}

/// Hypersurface {p = 0} with cached complexity data.
#[derive(Clone, Debug)]
pub struct HypersurfaceDescriptor<R> {
    pub poly: IntPolynomial,
    pub deg: u32,
    pub log_height: R,
    pub t: R,
}

impl<R: Real> HypersurfaceDescriptor<R> {
    pub fn new(poly: IntPolynomial) -> Result<Self> {
        let (deg, log_height, t) = poly.t_of()?;
        Ok(HypersurfaceDescriptor { poly, deg, log_height, t })
    }
}

/// Heuristic probe of -log max_{omega in Gamma} dist(omega, {p=0}) with
/// dist the l-infinity point-to-variety distance. Per sample the distance is
/// estimated by Gauss-Newton descent on |p| and floored by the first-order
/// bound |p(omega)| / Lip(p). Not a certificate.
pub fn dprop_probe<R: Real>(
    traj: &Trajectory<R>,
    v: &HypersurfaceDescriptor<R>,
    samples: usize,
) -> Result<R> {
    if v.poly.is_constant() {
        return Err(Error::Domain("d-property probe needs a nonconstant hypersurface".into()));
    }
    let radius = gamma_radius::<R>();
    let grid = traj.boundary_grid(&radius, samples.max(8));
    let grads: Vec<IntPolynomial> = (0..v.poly.num_vars()).map(|i| v.poly.derivative(i)).collect();
    let mut max_dist: Option<R> = None;
    for pt in &grid.points {
        let d = estimate_point_distance(&v.poly, &grads, pt);
        max_dist = Some(match max_dist {
            None => d,
            Some(m) => R::max_val(m, d),
        });
    }
    let m = max_dist.unwrap();
    if !m.is_positive_val() {
        return Err(Error::Degenerate("Gamma appears to meet the hypersurface everywhere".into()));
    }
    Ok(-m.ln())
}

fn estimate_point_distance<R: Real>(
    p: &IntPolynomial,
    grads: &[IntPolynomial],
    omega: &[Complex<R>],
) -> R {
    // Gauss-Newton steps toward the zero set
    let mut x: Vec<Complex<R>> = omega.to_vec();
    let mut converged = false;
    for _ in 0..24 {
        let val = p.eval(&x);
        let vmag2 = cx::norm_sqr(&val);
        if vmag2.clone().sqrt() < R::exp2i(-(R::prec_bits() as i64 / 2)) {
            converged = true;
            break;
        }
        let g: Vec<Complex<R>> = grads.iter().map(|gp| gp.eval(&x)).collect();
        let gnorm2 = g.iter().fold(R::zero(), |acc, gi| acc + cx::norm_sqr(gi));
        if !gnorm2.is_positive_val() {
            break;
        }
        for (xi, gi) in x.iter_mut().zip(&g) {
            // x -= val * conj(g) / |g|^2
            let step = val.clone() * gi.conj();
            let s = Complex::new(step.re / gnorm2.clone(), step.im / gnorm2.clone());
            *xi = xi.clone() - s;
        }
    }
    let upper = omega
        .iter()
        .zip(&x)
        .map(|(a, b)| cx::cx_abs(&(a.clone() - b.clone())))
        .fold(R::zero(), R::max_val);
    // first-order floor: dist >= |p(omega)| / Lipschitz bound on the box
    let pval = cx::cx_abs(&p.eval(omega));
    let reach = R::max_val(upper.clone(), R::one());
    let bmax = omega
        .iter()
        .map(cx::cx_abs)
        .fold(R::one(), R::max_val)
        + reach;
    let deg = p.degree().unwrap_or(1).max(1);
    let lip = grads
        .iter()
        .map(|g| R::from_bigint(&g.coeff_abs_sum()) * bmax.powi(deg as i64 - 1))
        .fold(R::zero(), |a, b| a + b);
    let lower = if lip.is_positive_val() { pval / lip } else { R::zero() };
    if converged {
        R::max_val(lower, upper)
    } else {
        lower
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves;
    use crate::BF;
    use num_traits::One;

    fn exp_curve_1() -> Trajectory<BF> {
        curves::expcurve::<BF>(1, None).unwrap()
    }

    #[test]
    fn exp_curve_series_is_exponential() {
        let t = exp_curve_1();
        // first component: z itself
        let s0 = &t.component_series()[0];
        assert_eq!(s0.coeffs[0].re.to_f64(), 0.0);
        assert_eq!(s0.coeffs[1].re.to_f64(), 1.0);
        assert!(s0.coeffs[2].re.is_zero());
        // second component: sum z^k / k!
        let s1 = &t.component_series()[1];
        let mut fact = 1.0f64;
        for k in 0..10 {
            if k > 0 {
                fact *= k as f64;
            }
            assert!(
                (s1.coeffs[k].re.to_f64() - 1.0 / fact).abs() < 1e-15,
                "coefficient {k}"
            );
        }
    }

    #[test]
    fn exp_curve_rho2_coefficients() {
        let t = curves::expcurve::<BF>(1, Some(BF::from_f64(2.0))).unwrap();
        let s1 = &t.component_series()[1];
        let mut expect = 1.0f64;
        for k in 0..8 {
            if k > 0 {
                expect *= 2.0 / k as f64;
            }
            assert!(
                (s1.coeffs[k].re.to_f64() - expect).abs() < 1e-12,
                "2^k/k! at {k}"
            );
        }
    }

    #[test]
    fn eval_gamma_examples() {
        let t = exp_curve_1();
        // z = 0 -> base point exactly
        let v = t.eval_gamma(&cx::cx_from_f64(0.0, 0.0)).unwrap();
        assert!(v[0].re.is_zero() && v[0].im.is_zero());
        assert_eq!(v[1].re.to_f64(), 1.0);
        // z = 1/e -> (1/e, e^(1/e)) within tail bound
        let ie = gamma_radius::<BF>();
        let v = t.eval_gamma(&cx::cx(ie.clone(), BF::zero())).unwrap();
        let expect = (1.0f64 / std::f64::consts::E).exp();
        assert!((v[1].re.to_f64() - expect).abs() < 1e-12);
        assert!((v[0].re.clone() - ie).abs() < BF::exp2i(-200));
        // outside the certified disk -> error
        assert!(t.eval_gamma(&cx::cx_from_f64(0.9, 0.0)).is_err());
    }

    #[test]
    fn trajectory_identity_residual() {
        let t = exp_curve_1();
        let tail = match t.tail_bound() {
            BigMag::Log(l) => l.clone().exp(),
            BigMag::Zero => BF::zero(),
        };
        let bound = tail * BF::from_f64(16.0) + BF::exp2i(-120);
        let r = gamma_radius::<BF>();
        for j in 0..16 {
            let th = BF::from_f64(2.0 * std::f64::consts::PI * (j as f64) / 16.0);
            let z = cx::polar(&r, &th);
            let res = t.residual_at(&z);
            assert!(res < bound, "residual {res} at sample {j} exceeds {bound}");
        }
    }

    #[test]
    fn ord_gamma_examples() {
        let t = exp_curve_1();
        // p = x1 -> ord = 1
        let p = IntPolynomial::var(2, 0);
        let r = ord_gamma(&t, &p, 512).unwrap();
        assert!((r.ord.to_f64() - 1.0).abs() < 1e-9, "ord = {}", r.ord.to_f64());
        // p = x2 -> ord = -1/e
        let p = IntPolynomial::var(2, 1);
        let r = ord_gamma(&t, &p, 512).unwrap();
        assert!(
            (r.ord.to_f64() + 1.0 / std::f64::consts::E).abs() < 1e-9,
            "ord = {}",
            r.ord.to_f64()
        );
        // p = x2 - 1 -> ord = -log(e^(1/e) - 1)
        let p = IntPolynomial::from_terms(
            2,
            [(vec![0, 1], BigInt::one()), (vec![0, 0], BigInt::from(-1))],
        );
        let r = ord_gamma(&t, &p, 512).unwrap();
        let expect = -((1.0f64 / std::f64::consts::E).exp() - 1.0).ln();
        assert!((r.ord.to_f64() - expect).abs() < 1e-9, "ord = {}", r.ord.to_f64());
    }

    #[test]
    fn ord_gamma_power_scaling() {
        let t = exp_curve_1();
        let p = IntPolynomial::var(2, 0);
        let base = ord_gamma(&t, &p, 256).unwrap();
        for k in [2u32, 5, 16] {
            let pk = p.pow(k);
            let r = ord_gamma(&t, &pk, 256).unwrap();
            let expect = base.ord.to_f64() * k as f64;
            assert!(
                (r.ord.to_f64() - expect).abs() < 2.0 * (k as f64) * 1e-9,
                "k = {k}"
            );
        }
    }

    #[test]
    fn ord_gamma_degenerate_zero_composition() {
        let t = exp_curve_1();
        let p = IntPolynomial::zero(2);
        assert!(ord_gamma(&t, &p, 64).is_err());
    }

    #[test]
    fn compose_poly_examples() {
        let t = exp_curve_1();
        // x2^2 -> sum (2z)^k / k!
        let p = IntPolynomial::from_terms(2, [(vec![0, 2], BigInt::one())]);
        let s = compose_poly(&t, &p).unwrap();
        let mut expect = 1.0f64;
        for k in 0..8 {
            if k > 0 {
                expect *= 2.0 / k as f64;
            }
            assert!((s.coeffs[k].re.to_f64() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn dprop_probe_examples() {
        let t = exp_curve_1();
        // V = {x2 = 0}: dist = |e^z|, max = e^(1/e), probe ~ -1/e
        let v = HypersurfaceDescriptor::new(IntPolynomial::var(2, 1)).unwrap();
        let probe = dprop_probe(&t, &v, 64).unwrap();
        assert!(
            (probe.to_f64() + 1.0 / std::f64::consts::E).abs() < 0.05,
            "probe = {}",
            probe.to_f64()
        );
        // V = {x1 = 0}: max dist = 1/e, probe = 1
        let v = HypersurfaceDescriptor::new(IntPolynomial::var(2, 0)).unwrap();
        let probe = dprop_probe(&t, &v, 64).unwrap();
        assert!((probe.to_f64() - 1.0).abs() < 0.05, "probe = {}", probe.to_f64());
        // V = {x1 - 5 = 0}: max |z - 5| over |z| <= 1/e is 5 + 1/e
        let v = HypersurfaceDescriptor::new(IntPolynomial::from_terms(
            2,
            [(vec![1, 0], BigInt::one()), (vec![0, 0], BigInt::from(-5))],
        ))
        .unwrap();
        let probe = dprop_probe(&t, &v, 64).unwrap();
        let expect = -(5.0f64 + 1.0 / std::f64::consts::E).ln();
        assert!((probe.to_f64() - expect).abs() < 0.05, "probe = {}", probe.to_f64());
    }
}
