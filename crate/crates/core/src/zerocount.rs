//! Argument-principle zero counting on the closed parameter disk, the
//! Ilyashenko-Yakovenko growth bound, and the order-bound envelope
//! experiment.
//!
//! The winding engine walks contours adaptively (argument increment below
//! pi/4 per accepted step) in f64 first and re-walks any ambiguous edge at
//! working precision, so clean instances stay fast while near-boundary zeros
//! remain correctly counted. Locations come from recursive quadrisection of
//! polar cells with per-cell winding numbers, polished by modified Newton.

use crate::bigmag::BigMag;
use crate::cx;
use crate::error::{Error, Result};
use crate::poly::IntPolynomial;
use crate::scalar::Real;
use crate::series::{sup_bound, Series};
use crate::trajectory::{gamma_radius, ord_gamma, Trajectory};
use num_complex::Complex;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct ZeroLocation {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroReport {
    pub count: usize,
    pub zero_locations: Vec<ZeroLocation>,
    pub contour_radius: f64,
    /// Log of the outer/inner max ratio, when the IY bound was evaluated.
    pub iy_ratio: Option<f64>,
    pub iy_bound_constant: Option<f64>,
    pub iy_bound: Option<f64>,
    pub iy_holds: Option<bool>,
}

/// High-precision zero locations (the report carries f64 mirrors).
pub struct ZeroSet<R> {
    pub locations: Vec<(Complex<R>, usize)>,
    pub contour_radius: R,
}

const MAX_CONTOUR_RETRIES: usize = 8;
const MAX_CELLS: usize = 200_000;

/// Anything the winding engine can count zeros of: pointwise evaluation at
/// both precisions, a derivative for Newton polish, and an absolute log-floor
/// below which values are numerically indistinguishable from zero.
pub trait ContourTarget<R: Real> {
    fn eval_big(&self, z: &Complex<R>) -> Complex<R>;
    fn eval_f64(&self, z: &Complex<f64>) -> Complex<f64>;
    fn derivative_big(&self, z: &Complex<R>) -> Complex<R>;
    fn ln_tail_floor(&self) -> Option<R>;
    fn validity_radius(&self) -> f64;
}

pub struct SeriesTarget<'a, R: Real> {
    big: &'a Series<R>,
    small: Series<f64>,
    dbig: Series<R>,
}

impl<'a, R: Real> SeriesTarget<'a, R> {
    pub fn new(f: &'a Series<R>, contour_r: &R) -> Self {
        // derivative certified on a disk still containing the contour
        let shrink_f = ((contour_r.to_f64() * 1.02).min(f.radius.to_f64() * 0.999))
            / f.radius.to_f64();
        let dbig = f.derivative(&R::from_f64(shrink_f));
        SeriesTarget { big: f, small: to_f64_series(f), dbig }
    }
}

impl<'a, R: Real> ContourTarget<R> for SeriesTarget<'a, R> {
    fn eval_big(&self, z: &Complex<R>) -> Complex<R> {
        self.big.eval(z)
    }

    fn eval_f64(&self, z: &Complex<f64>) -> Complex<f64> {
        self.small.eval(z)
    }

    fn derivative_big(&self, z: &Complex<R>) -> Complex<R> {
        self.dbig.eval(z)
    }

    fn ln_tail_floor(&self) -> Option<R> {
        match &self.big.tail {
            BigMag::Zero => None,
            BigMag::Log(l) => Some(l.clone() + R::from_f64(16.0f64.ln())),
        }
    }

    fn validity_radius(&self) -> f64 {
        self.big.radius.to_f64()
    }
}

pub fn count_zeros<R: Real>(f: &Series<R>, r: &R) -> Result<(ZeroReport, ZeroSet<R>)> {
    if f.is_identically_zero_truncation() {
        return Err(Error::Degenerate("count_zeros on the zero series".into()));
    }
    if *r > f.radius {
        return Err(Error::Domain(format!(
            "contour radius {} beyond series validity {}",
            r.to_f64(),
            f.radius.to_f64()
        )));
    }
    // precision guard: the tail must sit far below the function scale
    let scale = sup_bound(f, r);
    if let (BigMag::Log(t), BigMag::Log(s)) = (&f.tail, &scale) {
        let gap = s.clone() - t.clone();
        if gap < R::from_i64(R::prec_bits() as i64 / 8) * R::ln_2() {
            return Err(Error::Precision(
                "series tail too large relative to the function scale; raise the truncation order"
                    .into(),
            ));
        }
    }
    let target = SeriesTarget::new(f, r);
    count_zeros_target(&target, r)
}

/// Zero count and locations for any contour target.
pub fn count_zeros_target<R: Real, T: ContourTarget<R>>(
    target: &T,
    r: &R,
) -> Result<(ZeroReport, ZeroSet<R>)> {
    let mut radius = r.clone();
    let mut attempt = 0usize;
    loop {
        match try_count(target, &radius) {
            Ok(out) => {
                return Ok(out);
            }
            Err(Error::Degenerate(msg)) if msg == "near-contour zero" => {
                attempt += 1;
                if attempt > MAX_CONTOUR_RETRIES {
                    return Err(Error::Precision(
                        "contour keeps meeting zeros after 8 radius nudges".into(),
                    ));
                }
                // nudge outward by 1/8 of a percent per retry, up to 1%
                radius = radius * (R::one() + R::from_f64(0.00125));
                if radius.to_f64() > target.validity_radius() {
                    return Err(Error::Domain(
                        "no zero-free contour inside the validity disk".into(),
                    ));
                }
            }
            Err(e) => return Err(e),
        }
    }
}

fn to_f64_series<R: Real>(f: &Series<R>) -> Series<f64> {
    Series {
        coeffs: f.coeffs.iter().map(cx::to_c64).collect(),
        radius: f.radius.to_f64(),
        tail: match &f.tail {
            BigMag::Zero => BigMag::Zero,
            BigMag::Log(l) => BigMag::Log(l.to_f64()),
        },
    }
}

// one polar cell: a disk about the origin or an annulus sector
#[derive(Clone, Debug)]
enum Cell {
    Disk { r: f64 },
    Sector { r0: f64, r1: f64, th0: f64, th1: f64 },
}

impl Cell {
    fn diameter(&self) -> f64 {
        match self {
            Cell::Disk { r } => 2.0 * r,
            Cell::Sector { r0, r1, th0, th1 } => {
                let dr = r1 - r0;
                let arc = r1 * (th1 - th0);
                dr.max(arc)
            }
        }
    }

    fn center(&self) -> Complex<f64> {
        match self {
            Cell::Disk { .. } => Complex::new(0.0, 0.0),
            Cell::Sector { r0, r1, th0, th1 } => {
                let rm = 0.5 * (r0 + r1);
                let tm = 0.5 * (th0 + th1);
                Complex::new(rm * tm.cos(), rm * tm.sin())
            }
        }
    }

    /// Boundary as directed edges (positively oriented).
    fn edges(&self) -> Vec<Edge> {
        match self {
            Cell::Disk { r } => vec![Edge::Arc { r: *r, th0: 0.0, th1: std::f64::consts::TAU }],
            Cell::Sector { r0, r1, th0, th1 } => vec![
                Edge::Radial { th: *th0, r0: *r0, r1: *r1 },
                Edge::Arc { r: *r1, th0: *th0, th1: *th1 },
                Edge::Radial { th: *th1, r0: *r1, r1: *r0 },
                Edge::Arc { r: *r0, th0: *th1, th1: *th0 },
            ],
        }
    }

    fn split(&self, jitter: f64) -> Vec<Cell> {
        match self {
            Cell::Disk { r } => {
                let rm = r * (0.5 + jitter);
                let mut cells = vec![Cell::Disk { r: rm }];
                let th_step = std::f64::consts::TAU / 4.0;
                for k in 0..4 {
                    cells.push(Cell::Sector {
                        r0: rm,
                        r1: *r,
                        th0: k as f64 * th_step + jitter,
                        th1: (k + 1) as f64 * th_step + jitter,
                    });
                }
                cells
            }
            Cell::Sector { r0, r1, th0, th1 } => {
                let rm = r0 + (r1 - r0) * (0.5 + jitter);
                let tm = th0 + (th1 - th0) * (0.5 + jitter);
                vec![
                    Cell::Sector { r0: *r0, r1: rm, th0: *th0, th1: tm },
                    Cell::Sector { r0: *r0, r1: rm, th0: tm, th1: *th1 },
                    Cell::Sector { r0: rm, r1: *r1, th0: *th0, th1: tm },
                    Cell::Sector { r0: rm, r1: *r1, th0: tm, th1: *th1 },
                ]
            }
        }
    }
}

#[derive(Clone, Debug)]
enum Edge {
    Arc { r: f64, th0: f64, th1: f64 },
    Radial { th: f64, r0: f64, r1: f64 },
}

impl Edge {
    fn point(&self, t: f64) -> Complex<f64> {
        match self {
            Edge::Arc { r, th0, th1 } => {
                let th = th0 + (th1 - th0) * t;
                Complex::new(r * th.cos(), r * th.sin())
            }
            Edge::Radial { th, r0, r1 } => {
                let r = r0 + (r1 - r0) * t;
                Complex::new(r * th.cos(), r * th.sin())
            }
        }
    }
}

/// Outcome of walking one edge in f64.
enum WalkOutcome {
    /// Total argument variation along the edge.
    Ok(f64),
    /// |f| got too small relative to scale, or the step budget ran out.
    Ambiguous,
}

fn walk_edge_f64<R: Real, T: ContourTarget<R>>(
    f: &T,
    edge: &Edge,
    tail_floor: f64,
) -> WalkOutcome {
    let mut total = 0.0f64;
    let mut t = 0.0f64;
    let mut h = 1.0 / 16.0;
    let mut v = f.eval_f64(&edge.point(0.0));
    let mut min_mag = v.norm();
    let mut max_mag = min_mag;
    if !min_mag.is_finite() || min_mag == 0.0 {
        return WalkOutcome::Ambiguous;
    }
    let mut steps = 0usize;
    while t < 1.0 {
        if steps > 1 << 14 {
            return WalkOutcome::Ambiguous;
        }
        steps += 1;
        let tn = (t + h).min(1.0);
        let w = f.eval_f64(&edge.point(tn));
        let wmag = w.norm();
        if !wmag.is_finite() || wmag == 0.0 {
            return WalkOutcome::Ambiguous;
        }
        min_mag = min_mag.min(wmag);
        max_mag = max_mag.max(wmag);
        let dot = v.re * w.re + v.im * w.im;
        let cross = v.re * w.im - v.im * w.re;
        let darg = cross.atan2(dot);
        if darg.abs() > std::f64::consts::FRAC_PI_4 {
            h *= 0.5;
            if h < 1e-12 {
                return WalkOutcome::Ambiguous;
            }
            continue;
        }
        total += darg;
        t = tn;
        v = w;
        if darg.abs() < std::f64::consts::FRAC_PI_4 / 4.0 && t < 1.0 {
            h = (h * 2.0).min(1.0 - t).max(1e-9);
        }
    }
    // a zero near the edge shows up as a huge dynamic range or a dip into
    // f64 noise and the truncation-tail band
    if min_mag < 1e-12 * max_mag || min_mag < 1e4 * tail_floor {
        return WalkOutcome::Ambiguous;
    }
    WalkOutcome::Ok(total)
}

/// Same walk at working precision; returns None when the edge runs through a
/// genuine near-zero of f (relative to `ln_scale`).
fn walk_edge_big<R: Real, T: ContourTarget<R>>(
    f: &T,
    edge: &Edge,
    ln_tail_floor: &Option<R>,
) -> Option<R> {
    let mut total = R::zero();
    let mut t = 0.0f64;
    let mut h = 1.0 / 16.0;
    let at = |t: f64| {
        let p = edge.point(t);
        f.eval_big(&cx::cx_from_f64(p.re, p.im))
    };
    let good = |w: &Complex<R>| -> Option<R> {
        let n2 = cx::norm_sqr(w);
        if !n2.is_positive_val() {
            return None;
        }
        let ln_mag = n2.ln().ldexp(-1);
        if let Some(floor) = ln_tail_floor {
            if ln_mag <= *floor {
                return None;
            }
        }
        Some(ln_mag)
    };
    let mut v = at(0.0);
    let mut min_ln = good(&v)?;
    let mut max_ln = min_ln.clone();
    let mut steps = 0usize;
    let quarter_pi = R::pi().ldexp(-2);
    while t < 1.0 {
        if steps > 1 << 14 {
            return None;
        }
        steps += 1;
        let tn = (t + h).min(1.0);
        let w = at(tn);
        let ln_mag = good(&w)?;
        if ln_mag < min_ln {
            min_ln = ln_mag.clone();
        }
        if ln_mag > max_ln {
            max_ln = ln_mag;
        }
        let dot = v.re.clone() * w.re.clone() + v.im.clone() * w.im.clone();
        let cross = v.re.clone() * w.im.clone() - v.im.clone() * w.re.clone();
        let darg = R::atan2(&cross, &dot);
        if darg.abs() > quarter_pi {
            h *= 0.5;
            if h < 1e-12 {
                return None;
            }
            continue;
        }
        total = total + darg;
        t = tn;
        v = w;
    }
    // dynamic range beyond the comparison tolerance means a zero hugs the edge
    let range_cap = R::from_i64((R::prec_bits() as i64 - 32).max(32)) * R::ln_2();
    if max_ln - min_ln > range_cap {
        return None;
    }
    Some(total)
}

/// Winding number of f along a cell boundary, f64 first, escalating to
/// working precision per ambiguous edge. None = a zero sits on (or numerically
/// on) the boundary.
fn cell_winding<R: Real, T: ContourTarget<R>>(
    f: &T,
    cell: &Cell,
    tail_floor_f64: f64,
    ln_tail_floor: &Option<R>,
) -> Option<i64> {
    let mut total_f64 = 0.0f64;
    let mut need_big = false;
    for e in cell.edges() {
        match walk_edge_f64(f, &e, tail_floor_f64) {
            WalkOutcome::Ok(a) => total_f64 += a,
            WalkOutcome::Ambiguous => {
                need_big = true;
                break;
            }
        }
    }
    if !need_big {
        let w = total_f64 / std::f64::consts::TAU;
        let rounded = w.round();
        if (w - rounded).abs() < 0.25 {
            return Some(rounded as i64);
        }
        // fall through to the precise walk
    }
    let mut total = R::zero();
    for e in cell.edges() {
        match walk_edge_big(f, &e, ln_tail_floor) {
            Some(a) => total = total + a,
            None => return None,
        }
    }
    let tau = R::pi().ldexp(1);
    let w = (total / tau).to_f64();
    let rounded = w.round();
    if (w - rounded).abs() < 0.25 {
        Some(rounded as i64)
    } else {
        None
    }
}

fn try_count<R: Real, T: ContourTarget<R>>(
    f: &T,
    radius: &R,
) -> Result<(ZeroReport, ZeroSet<R>)> {
    // the genuine precision floor: values inside the truncation-tail band
    // (plus headroom) cannot be winding-tracked meaningfully
    let ln_tail_floor = f.ln_tail_floor();
    let tail_floor_f64 = match &ln_tail_floor {
        None => 0.0f64,
        Some(l) => l.to_f64().exp(),
    };
    let rf = radius.to_f64();

    let root = Cell::Disk { r: rf };
    let count = match cell_winding(f, &root, tail_floor_f64, &ln_tail_floor) {
        None => return Err(Error::Degenerate("near-contour zero".into())),
        Some(w) if w < 0 => {
            return Err(Error::Precision("negative winding on the outer contour".into()))
        }
        Some(w) => w as usize,
    };

    // localize by quadrisection
    let coarse_iso = 2.0f64.powi(-12);
    let target = 2.0f64.powf(-(R::prec_bits() as f64) / 4.0);
    let mut queue: Vec<(Cell, usize)> = vec![(root, count)];
    let mut found: Vec<(Complex<R>, usize)> = Vec::new();
    let mut cells_processed = 0usize;
    while let Some((cell, mult)) = queue.pop() {
        if mult == 0 {
            continue;
        }
        cells_processed += 1;
        if cells_processed > MAX_CELLS {
            return Err(Error::Precision("cell budget exhausted in zero isolation".into()));
        }
        if cell.diameter() < coarse_iso {
            // polish with modified Newton at working precision
            match newton_polish(f, &cell, mult, target) {
                Some(z) => {
                    found.push((z, mult));
                    continue;
                }
                None => {
                    // keep subdividing to the hard target
                    if cell.diameter() < target {
                        let c = cell.center();
                        found.push((cx::cx_from_f64(c.re, c.im), mult));
                        continue;
                    }
                }
            }
        }
        // split with deterministic jitter retries when children are ambiguous
        let mut placed = false;
        for attempt in 0..8 {
            let jitter = match attempt {
                0 => 0.0,
                k => 0.031 * k as f64 * if k % 2 == 0 { 1.0 } else { -1.0 },
            };
            let children = cell.split(jitter);
            let mut winds = Vec::with_capacity(children.len());
            let mut ok = true;
            for ch in &children {
                match cell_winding(f, ch, tail_floor_f64, &ln_tail_floor) {
                    Some(w) if w >= 0 => winds.push(w as usize),
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && winds.iter().sum::<usize>() == mult {
                for (ch, w) in children.into_iter().zip(winds) {
                    if w > 0 {
                        queue.push((ch, w));
                    }
                }
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::Precision(
                "zero isolation failed: children windings never matched the parent".into(),
            ));
        }
    }

    found.sort_by(|a, b| {
        let ka = (a.0.re.to_f64(), a.0.im.to_f64());
        let kb = (b.0.re.to_f64(), b.0.im.to_f64());
        ka.partial_cmp(&kb).unwrap()
    });
    let report = ZeroReport {
        count,
        zero_locations: found
            .iter()
            .map(|(z, m)| ZeroLocation { re: z.re.to_f64(), im: z.im.to_f64(), multiplicity: *m })
            .collect(),
        contour_radius: rf,
        iy_ratio: None,
        iy_bound_constant: None,
        iy_bound: None,
        iy_holds: None,
    };
    let set = ZeroSet { locations: found, contour_radius: radius.clone() };
    Ok((report, set))
}

/// Modified Newton z <- z - m f/f' from the cell center; None when it leaves
/// the cell neighborhood or stalls.
fn newton_polish<R: Real, T: ContourTarget<R>>(
    f: &T,
    cell: &Cell,
    mult: usize,
    target: f64,
) -> Option<Complex<R>> {
    let c = cell.center();
    let diam = cell.diameter();
    let mut z: Complex<R> = cx::cx_from_f64(c.re, c.im);
    let mf = R::from_i64(mult as i64);
    let mut last_step = f64::INFINITY;
    for _ in 0..80 {
        let v = f.eval_big(&z);
        let d = f.derivative_big(&z);
        let d2 = cx::norm_sqr(&d);
        if !d2.is_positive_val() {
            return None;
        }
        // step = m * v / d
        let num = v * d.conj();
        let step = Complex::new(
            num.re * mf.clone() / d2.clone(),
            num.im * mf.clone() / d2.clone(),
        );
        let smag = cx::cx_abs(&step).to_f64();
        z = z - step;
        let dist = (z.re.to_f64() - c.re).hypot(z.im.to_f64() - c.im);
        if dist > 4.0 * diam + 1e-9 {
            return None; // escaped: not actually converging to this cell's zero
        }
        if smag < target / 4.0 {
            return Some(z);
        }
        if smag > last_step * 4.0 && smag > diam {
            return None;
        }
        last_step = smag;
    }
    None
}

/// Ilyashenko-Yakovenko growth bound: count <= C log(max_outer / max_inner).
///
/// The inner radius is 1/e. The outer radius is the series' validity radius
/// capped at 1 (entire inputs like polynomials use the literal 1 of the
/// theorem; trajectory compositions use the certified 1/e + margin).
pub fn iy_bound<R: Real>(
    f: &Series<R>,
    count: usize,
    c: &R,
    outer_override: Option<R>,
) -> Result<(R, bool, R)> {
    if f.is_identically_zero_truncation() {
        return Err(Error::Degenerate("iy_bound on the zero series".into()));
    }
    let inner_r = gamma_radius::<R>();
    let outer_r = match outer_override {
        Some(r) => r,
        None => R::min_val(R::one(), f.radius.clone()),
    };
    if !(outer_r > inner_r) {
        return Err(Error::Domain("outer radius must exceed 1/e".into()));
    }
    let ln_outer = boundary_max_ln(f, &outer_r);
    let ln_inner = boundary_max_ln(f, &inner_r);
    let ratio = ln_outer - ln_inner;
    let bound = c.clone() * ratio.clone();
    Ok((bound.clone(), R::from_i64(count as i64) <= bound, ratio))
}

/// ln max |f| on |z| = r by dense sampling plus golden refinement.
pub fn boundary_max_ln<R: Real>(f: &Series<R>, r: &R) -> R {
    let samples = 512usize;
    let two_pi = R::pi().ldexp(1);
    let countf = R::from_i64(samples as i64);
    let mut best = R::zero();
    let mut best_j = 0usize;
    let mut vals: Vec<R> = Vec::with_capacity(samples);
    for j in 0..samples {
        let th = two_pi.clone() * R::from_i64(j as i64) / countf.clone();
        let z = cx::polar(r, &th);
        let sq = cx::norm_sqr(&f.eval(&z));
        if sq > best {
            best = sq.clone();
            best_j = j;
        }
        vals.push(sq);
    }
    // refine around the best sample
    let lo = two_pi.clone() * R::from_i64(best_j as i64 - 1) / countf.clone();
    let hi = two_pi.clone() * R::from_i64(best_j as i64 + 1) / countf.clone();
    let eval = |th: &R| -> R {
        let z = cx::polar(r, th);
        cx::norm_sqr(&f.eval(&z))
    };
    let (mut a, mut b) = (lo, hi);
    let phi_inv = (R::from_f64(5.0).sqrt() - R::one()).ldexp(-1);
    let mut c1 = b.clone() - (b.clone() - a.clone()) * phi_inv.clone();
    let mut d1 = a.clone() + (b.clone() - a.clone()) * phi_inv.clone();
    let mut fc = eval(&c1);
    let mut fd = eval(&d1);
    for _ in 0..40 {
        if fc > fd {
            b = d1;
            d1 = c1.clone();
            fd = fc.clone();
            c1 = b.clone() - (b.clone() - a.clone()) * phi_inv.clone();
            fc = eval(&c1);
        } else {
            a = c1;
            c1 = d1.clone();
            fc = fd.clone();
            d1 = a.clone() + (b.clone() - a.clone()) * phi_inv.clone();
            fd = eval(&d1);
        }
    }
    let refined = R::max_val(fc, fd);
    let m = R::max_val(best, refined);
    m.ln().ldexp(-1)
}

// ---------------------------------------------------------------------------
// order-bound envelope experiment
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct EnvelopePoint {
    pub t: f64,
    pub ord: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnvelopeReport {
    /// All (t(p), max(0, ord)) pairs.
    pub pairs: Vec<EnvelopePoint>,
    /// Least-squares slope of log ord vs log t over the bucketed top decile.
    pub fitted_exponent: f64,
    /// Smallest C with ord <= C t^n over all samples (n = ambient dim).
    pub calibrated_c: f64,
    pub usable_samples: usize,
}

/// Random integer polynomials with t(p) <= t_max, deterministic in the seed.
pub struct RandomPolyFamily {
    pub num_vars: usize,
    pub min_degree: u32,
    pub max_degree: u32,
    pub t_max: f64,
    pub count: usize,
    pub seed: u64,
}

impl RandomPolyFamily {
    pub fn generate(&self) -> Vec<IntPolynomial> {
        use num_bigint::BigInt;
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(self.count);
        let mut attempts = 0usize;
        while out.len() < self.count {
            attempts += 1;
            if attempts > 1000 * self.count.max(1) {
                break; // infeasible budget: return what exists
            }
            let deg = rng.random_range(self.min_degree..=self.max_degree);
            let budget = self.t_max - deg as f64;
            if budget < 0.0 {
                continue;
            }
            let bound = budget.exp().min(1e6).floor() as i64;
            let bound = bound.max(1);
            let mut p = IntPolynomial::zero(self.num_vars);
            // sparse draw: up to 3 + deg terms, one pinned at total degree deg
            let terms = rng.random_range(1..=(3 + deg as usize));
            for ti in 0..terms {
                let mut exps = vec![0u32; self.num_vars];
                let mut left = if ti == 0 { deg } else { rng.random_range(0..=deg) };
                for e in exps.iter_mut() {
                    let d = rng.random_range(0..=left);
                    *e = d;
                    left -= d;
                }
                if left > 0 {
                    exps[self.num_vars - 1] += left;
                }
                let c = rng.random_range(-bound..=bound);
                p.add_term(crate::poly::Monomial(exps), BigInt::from(c));
            }
            if p.is_zero() {
                continue;
            }
            // keep the advertised budget after cancellation
            let (d, _h, t): (u32, f64, f64) = match p.t_of::<f64>() {
                Ok(v) => v,
                Err(_) => continue,
            };
            if t > self.t_max || d < self.min_degree {
                continue;
            }
            out.push(p);
        }
        out
    }
}

/// Order-bound experiment: ord_Gamma p against t(p)^n on random families.
pub fn verify_order_bound<R: Real>(
    traj: &Trajectory<R>,
    family: &RandomPolyFamily,
    samples_per_poly: usize,
) -> Result<EnvelopeReport> {
    let polys = family.generate();
    let n = traj.dim() as f64;
    let mut pairs = Vec::new();
    let mut usable = 0usize;
    let mut calibrated_c = 0.0f64;
    for p in &polys {
        let (_, _, t): (u32, R, R) = p.t_of()?;
        let t = t.to_f64();
        let ord = match ord_gamma(traj, p, samples_per_poly) {
            Ok(rep) => rep.ord.to_f64(),
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        };
        let ord_clamped = ord.max(0.0);
        if ord_clamped > 0.0 {
            usable += 1;
            calibrated_c = calibrated_c.max(ord_clamped / t.powf(n));
        }
        pairs.push(EnvelopePoint { t, ord: ord_clamped });
    }
    if usable < 20 {
        return Err(Error::InsufficientData(format!(
            "only {usable} samples with positive order; need at least 20"
        )));
    }
    let fitted = envelope_slope(&pairs);
    Ok(EnvelopeReport {
        pairs,
        fitted_exponent: fitted,
        calibrated_c,
        usable_samples: usable,
    })
}

/// Upper-envelope fit: bucket log t, keep the top decile of ord per bucket,
/// least-squares on (log t, log ord).
pub fn envelope_slope(pairs: &[EnvelopePoint]) -> f64 {
    let pos: Vec<&EnvelopePoint> = pairs.iter().filter(|p| p.ord > 0.0 && p.t > 1.0).collect();
    if pos.len() < 4 {
        return f64::NAN;
    }
    let lt_min = pos.iter().map(|p| p.t.ln()).fold(f64::INFINITY, f64::min);
    let lt_max = pos.iter().map(|p| p.t.ln()).fold(f64::NEG_INFINITY, f64::max);
    let buckets = 10usize;
    let width = ((lt_max - lt_min) / buckets as f64).max(1e-9);
    let mut grouped: Vec<Vec<&EnvelopePoint>> = vec![Vec::new(); buckets];
    for p in &pos {
        let b = (((p.t.ln() - lt_min) / width) as usize).min(buckets - 1);
        grouped[b].push(p);
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for g in grouped.iter_mut() {
        if g.is_empty() {
            continue;
        }
        g.sort_by(|a, b| b.ord.partial_cmp(&a.ord).unwrap());
        let keep = (g.len() / 10).max(1);
        for p in g.iter().take(keep) {
            xs.push(p.t.ln());
            ys.push(p.ord.ln());
        }
    }
    least_squares_slope(&xs, &ys)
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return f64::NAN;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BF;
    use num_traits::{One, Zero};

    fn poly_series(cs: &[(f64, f64)]) -> Series<BF> {
        Series::from_poly_coeffs(
            cs.iter().map(|&(re, im)| cx::cx_from_f64(re, im)).collect(),
            BF::from_f64(1.0),
        )
    }

    #[test]
    fn count_z_cubed() {
        // f = z^3: count 3 at the origin
        let f = poly_series(&[(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let r = gamma_radius::<BF>();
        let (rep, set) = count_zeros(&f, &r).unwrap();
        assert_eq!(rep.count, 3);
        assert_eq!(set.locations.len(), 1);
        assert_eq!(set.locations[0].1, 3);
        assert!(cx::cx_abs(&set.locations[0].0).to_f64() < 1e-15);
    }

    #[test]
    fn count_inside_vs_outside() {
        // f = (z - 0.1)(z - 0.5): only 0.1 lies inside |z| <= 1/e
        let f = poly_series(&[(0.05, 0.0), (-0.6, 0.0), (1.0, 0.0)]);
        let r = gamma_radius::<BF>();
        let (rep, set) = count_zeros(&f, &r).unwrap();
        assert_eq!(rep.count, 1);
        assert_eq!(set.locations.len(), 1);
        let z = &set.locations[0].0;
        assert!((z.re.to_f64() - 0.1).abs() < 1e-18);
        assert!(z.im.to_f64().abs() < 1e-18);
    }

    #[test]
    fn count_exp_minus_one_on_curve() {
        // p = x2 - 1 on the exp curve: e^z - 1 has exactly one zero (z = 0)
        let t = crate::curves::expcurve::<BF>(1, None).unwrap();
        let p = IntPolynomial::from_terms(
            2,
            [
                (vec![0u32, 1], num_bigint::BigInt::one()),
                (vec![0, 0], num_bigint::BigInt::from(-1)),
            ],
        );
        let f = crate::trajectory::compose_poly(&t, &p).unwrap();
        let r = gamma_radius::<BF>();
        let (rep, set) = count_zeros(&f, &r).unwrap();
        assert_eq!(rep.count, 1);
        assert!(cx::cx_abs(&set.locations[0].0).to_f64() < 1e-18);
    }

    #[test]
    fn winding_stability_under_radius_perturbation() {
        let f = poly_series(&[(0.02, 0.0), (-0.3, 0.0), (1.0, 0.0)]);
        // zeros at ~0.0718 and ~0.2282: both inside 1/e, none near the rim
        let r0 = gamma_radius::<BF>();
        let (rep0, _) = count_zeros(&f, &r0).unwrap();
        for pct in [-0.01f64, 0.01] {
            let r = r0.clone() * BF::from_f64(1.0 + pct);
            let (rep, _) = count_zeros(&f, &r).unwrap();
            assert_eq!(rep.count, rep0.count, "radius factor {pct}");
        }
    }

    #[test]
    fn iy_zk_tight_at_c_one() {
        for k in [1usize, 4, 9] {
            let mut cs = vec![(0.0, 0.0); k + 1];
            cs[k] = (1.0, 0.0);
            let f = poly_series(&cs);
            let one = BF::from_f64(1.0);
            let (bound, holds, ratio) = iy_bound(&f, k, &one, Some(BF::from_f64(1.0))).unwrap();
            assert!((ratio.to_f64() - k as f64).abs() < 1e-9, "ratio for k={k}");
            assert!(holds, "k = {k}");
            assert!((bound.to_f64() - k as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn iy_constant_function() {
        let f = poly_series(&[(5.0, 0.0)]);
        let (bound, holds, ratio) = iy_bound(&f, 0, &BF::from_f64(2.0), None).unwrap();
        assert!(ratio.to_f64().abs() < 1e-12);
        assert!(bound.to_f64().abs() < 1e-12);
        assert!(holds);
    }

    #[test]
    fn iy_two_zero_example() {
        // f = (z - 0.2) z: two zeros inside, bound must hold with default C=2
        let f = poly_series(&[(0.0, 0.0), (-0.2, 0.0), (1.0, 0.0)]);
        let r = gamma_radius::<BF>();
        let (rep, _) = count_zeros(&f, &r).unwrap();
        assert_eq!(rep.count, 2);
        let (_bound, holds, _ratio) = iy_bound(&f, rep.count, &BF::from_f64(2.0), None).unwrap();
        assert!(holds);
    }

    #[test]
    fn envelope_linear_family_slope_one() {
        // p = x1^k on the exp curve: ord = k, t = k, slope exactly 1
        let t = crate::curves::expcurve::<BF>(1, None).unwrap();
        let mut pairs = Vec::new();
        for k in 1..=24u32 {
            let p = IntPolynomial::var(2, 0).pow(k);
            let rep = ord_gamma(&t, &p, 128).unwrap();
            pairs.push(EnvelopePoint { t: k as f64, ord: rep.ord.to_f64().max(0.0) });
        }
        let slope = envelope_slope(&pairs);
        assert!((slope - 1.0).abs() < 0.05, "slope = {slope}");
    }

    #[test]
    fn envelope_insufficient_data() {
        let t = crate::curves::expcurve::<BF>(1, None).unwrap();
        // constants only: every ord is <= 0
        let family = RandomPolyFamily {
            num_vars: 2,
            min_degree: 0,
            max_degree: 0,
            t_max: 8.0,
            count: 30,
            seed: 7,
        };
        let got = verify_order_bound(&t, &family, 64);
        assert!(matches!(got, Err(Error::InsufficientData(_))));
    }

    #[test]
    fn zero_series_rejected() {
        let f: Series<BF> = Series::from_poly_coeffs(
            vec![cx::cx(BF::zero(), BF::zero())],
            BF::from_f64(1.0),
        );
        assert!(count_zeros(&f, &gamma_radius::<BF>()).is_err());
    }
}
