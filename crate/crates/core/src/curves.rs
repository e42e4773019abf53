//! Built-in curves, curve configuration files and the on-disk series cache.
//!
//! Built-ins: `expcurve(n)` is (z, e^z, ..., e^(z^n)) as a trajectory of
//! d/dz + sum j z^(j-1) y_j d/dy_j; `logcurve` is (z, log z, log(1+z)) from
//! the base point (1, 0, log 2); `logcurve5` embeds it in dimension five by
//! appending y3 = z^2 and y4 = z^3, which keeps the trajectory property and
//! raises the ambient dimension enough for k = 1 criterion runs.

use crate::bigmag::BigMag;
use crate::cx;
use crate::error::{Error, Result};
use crate::poly::IntPolynomial;
use crate::scalar::Real;
use crate::series::Series;
use crate::trajectory::{
    max_certified_rho, solve_trajectory, Trajectory, DEFAULT_MARGIN, DEFAULT_TRUNCATION,
};
use crate::BF;
use num_bigint::BigInt;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

fn auto_rho<R: Real>(field: &crate::trajectory::VectorField, base: &[Complex<R>], margin: &R) -> R {
    match max_certified_rho(field, base, margin) {
        None => R::one(),
        Some(m) => m * R::from_f64(0.9),
    }
}

pub fn expcurve_field(n: usize) -> crate::trajectory::VectorField {
    assert!(n >= 1);
    let nv = n + 1;
    let mut comps = Vec::with_capacity(nv);
    comps.push(IntPolynomial::constant(nv, BigInt::from(1)));
    for j in 1..=n {
        let mut e = vec![0u32; nv];
        e[0] = (j - 1) as u32;
        e[j] = 1;
        comps.push(IntPolynomial::from_terms(nv, [(e, BigInt::from(j as i64))]));
    }
    crate::trajectory::VectorField::new(comps, BigInt::from(1)).unwrap()
}

pub fn expcurve<R: Real>(n: usize, rho: Option<R>) -> Result<Trajectory<R>> {
    let field = expcurve_field(n);
    let mut base = vec![cx::cx_zero()];
    for _ in 0..n {
        base.push(cx::cx_one());
    }
    let margin = R::from_f64(DEFAULT_MARGIN);
    let rho = match rho {
        Some(r) => r,
        None => {
            if n == 1 {
                R::one()
            } else {
                auto_rho(&field, &base, &margin)
            }
        }
    };
    solve_trajectory(&field, &base, &rho, DEFAULT_TRUNCATION, &margin)
}

pub fn logcurve_field(embedded: bool) -> crate::trajectory::VectorField {
    let nv = if embedded { 5 } else { 3 };
    let term = |exps: Vec<u32>, c: i64| (exps, BigInt::from(c));
    let mut comps = Vec::new();
    // z' = z + z^2
    let mut e1 = vec![0u32; nv];
    e1[0] = 1;
    let mut e2 = vec![0u32; nv];
    e2[0] = 2;
    comps.push(IntPolynomial::from_terms(nv, [term(e1.clone(), 1), term(e2, 1)]));
    // y1' = 1 + z
    comps.push(IntPolynomial::from_terms(
        nv,
        [term(vec![0; nv], 1), term(e1.clone(), 1)],
    ));
    // y2' = z
    comps.push(IntPolynomial::from_terms(nv, [term(e1, 1)]));
    if embedded {
        // y3' = 2 y3 (1 + z), y4' = 3 y4 (1 + z)
        for (idx, mult) in [(3usize, 2i64), (4usize, 3i64)] {
            let mut ea = vec![0u32; nv];
            ea[idx] = 1;
            let mut eb = ea.clone();
            eb[0] = 1;
            comps.push(IntPolynomial::from_terms(
                nv,
                [term(ea, mult), term(eb, mult)],
            ));
        }
    }
    crate::trajectory::VectorField::new(comps, BigInt::from(1)).unwrap()
}

pub fn logcurve_base<R: Real>(embedded: bool) -> Vec<Complex<R>> {
    logcurve_base_at::<R>(1, 1, embedded)
}

/// Base point over z0 = num/den > 0: (z0, log z0, log(1+z0), z0^2, z0^3).
pub fn logcurve_base_at<R: Real>(num: u32, den: u32, embedded: bool) -> Vec<Complex<R>> {
    assert!(num > 0 && den > 0);
    let z0 = R::from_i64(num as i64) / R::from_i64(den as i64);
    let mut base = vec![
        cx::cx(z0.clone(), R::zero()),
        cx::cx(z0.clone().ln(), R::zero()),
        cx::cx((R::one() + z0.clone()).ln(), R::zero()),
    ];
    if embedded {
        base.push(cx::cx(z0.clone() * z0.clone(), R::zero()));
        base.push(cx::cx(z0.clone() * z0.clone() * z0, R::zero()));
    }
    base
}

pub fn logcurve<R: Real>(embedded: bool, rho: Option<R>) -> Result<Trajectory<R>> {
    let field = logcurve_field(embedded);
    let base = logcurve_base::<R>(embedded);
    let margin = R::from_f64(DEFAULT_MARGIN);
    let rho = rho.unwrap_or_else(|| auto_rho(&field, &base, &margin));
    solve_trajectory(&field, &base, &rho, DEFAULT_TRUNCATION, &margin)
}

/// Log-curve trajectory from a rational base z0 = num/den. The cover runs
/// use z0 = 5/4: the census points of the (n', 1) families then straddle the
/// parameter window, which makes the auxiliary polynomials genuinely small
/// on Gamma.
pub fn logcurve_at<R: Real>(
    num: u32,
    den: u32,
    embedded: bool,
    rho: Option<R>,
) -> Result<Trajectory<R>> {
    let field = logcurve_field(embedded);
    let base = logcurve_base_at::<R>(num, den, embedded);
    let margin = R::from_f64(DEFAULT_MARGIN);
    let rho = rho.unwrap_or_else(|| auto_rho(&field, &base, &margin));
    solve_trajectory(&field, &base, &rho, DEFAULT_TRUNCATION, &margin)
}

/// Curve parameter for a point z on the log-curve: the trajectory time
/// s = ln((z/(1+z)) / (z0/(1+z0))) / rho from the closed-form flow of
/// z' = rho z (1+z) started at z0.
pub fn logcurve_param_at<R: Real>(z: &Complex<R>, rho: &R, z0: &Complex<R>) -> Complex<R> {
    let one = cx::cx_one::<R>();
    let w = z.clone() / (one.clone() + z.clone());
    let w0 = z0.clone() / (one + z0.clone());
    let l = cx::cx_ln(&(w / w0));
    Complex::new(l.re / rho.clone(), l.im / rho.clone())
}

pub fn logcurve_param<R: Real>(z: &Complex<R>, rho: &R) -> Complex<R> {
    logcurve_param_at(z, rho, &cx::cx_one())
}

// ---------------------------------------------------------------------------
// configuration files
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveConfig {
    /// Built-in name: "expcurve(n)", "logcurve", "logcurve5"; overrides the
    /// explicit field below when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Field components in the canonical polynomial text form.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<serde_json::Value>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub denominator: Option<String>,
    /// Base point, decimal strings for re/im.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_point: Option<Vec<[String; 2]>>,
    /// Decimal string, or "auto" for the largest certified value times 0.9.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
}

impl CurveConfig {
    pub fn named(name: &str) -> Self {
        CurveConfig {
            name: Some(name.to_string()),
            n: None,
            components: None,
            denominator: None,
            base_point: None,
            rho: None,
            margin: None,
            truncation: None,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("curve config: {e}")))
    }

    /// Canonical form entering the cache key.
    pub fn canonical_string(&self) -> String {
        serde_json::to_string(self).unwrap()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(name) = &self.name {
            parse_builtin_name(name)?;
            return Ok(());
        }
        if self.components.is_none() || self.base_point.is_none() {
            return Err(Error::Parse(
                "curve config needs either a builtin name or components + base_point".into(),
            ));
        }
        Ok(())
    }
}

enum Builtin {
    Exp(usize),
    Log,
    Log5,
    LogCover5,
}

fn parse_builtin_name(name: &str) -> Result<Builtin> {
    let name = name.trim();
    if name == "logcurve" {
        return Ok(Builtin::Log);
    }
    if name == "logcurve5" {
        return Ok(Builtin::Log5);
    }
    if name == "logcover5" {
        return Ok(Builtin::LogCover5);
    }
    if let Some(rest) = name.strip_prefix("expcurve(") {
        if let Some(ns) = rest.strip_suffix(')') {
            let n: usize = ns
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad expcurve arity: {name}")))?;
            if n < 1 {
                return Err(Error::Parse("expcurve needs n >= 1".into()));
            }
            return Ok(Builtin::Exp(n));
        }
    }
    Err(Error::Parse(format!("unknown builtin curve: {name}")))
}

/// Builds the trajectory described by a config, consulting the series cache
/// when a directory is supplied.
pub fn build_trajectory(config: &CurveConfig, cache_dir: Option<&Path>) -> Result<Trajectory<BF>> {
    config.validate()?;
    let rho_spec = config.rho.as_deref().unwrap_or("auto");
    let margin = BF::from_f64(config.margin.unwrap_or(DEFAULT_MARGIN));
    let trunc = config.truncation.unwrap_or(DEFAULT_TRUNCATION);

    let (field, base): (crate::trajectory::VectorField, Vec<Complex<BF>>) =
        if let Some(name) = &config.name {
            match parse_builtin_name(name)? {
                Builtin::Exp(n) => {
                    let field = expcurve_field(n);
                    let mut base = vec![cx::cx_zero()];
                    for _ in 0..n {
                        base.push(cx::cx_one());
                    }
                    (field, base)
                }
                Builtin::Log => (logcurve_field(false), logcurve_base::<BF>(false)),
                Builtin::Log5 => (logcurve_field(true), logcurve_base::<BF>(true)),
                Builtin::LogCover5 => (logcurve_field(true), logcurve_base_at::<BF>(5, 4, true)),
            }
        } else {
            let comps = config
                .components
                .as_ref()
                .unwrap()
                .iter()
                .map(IntPolynomial::from_canonical_json)
                .collect::<Result<Vec<_>>>()?;
            let denom = match &config.denominator {
                None => BigInt::from(1),
                Some(s) => s
                    .parse::<BigInt>()
                    .map_err(|e| Error::Parse(format!("bad denominator: {e}")))?,
            };
            let field = crate::trajectory::VectorField::new(comps, denom)?;
            let base = config
                .base_point
                .as_ref()
                .unwrap()
                .iter()
                .map(|[re, im]| {
                    Ok(Complex::new(
                        BF::parse_decimal(re).map_err(Error::Parse)?,
                        BF::parse_decimal(im).map_err(Error::Parse)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            (field, base)
        };

    let rho: BF = if rho_spec == "auto" {
        if config.name.as_deref() == Some("expcurve(1)") {
            BF::one_val()
        } else {
            auto_rho(&field, &base, &margin)
        }
    } else {
        BF::parse_decimal(rho_spec).map_err(Error::Parse)?
    };

    if let Some(dir) = cache_dir {
        let key = cache_key(config, &rho, trunc);
        if let Some(traj) = load_cached(dir, &key, &field)? {
            return Ok(traj);
        }
        let traj = solve_trajectory(&field, &base, &rho, trunc, &margin)?;
        store_cached(dir, &key, &traj)?;
        return Ok(traj);
    }
    solve_trajectory(&field, &base, &rho, trunc, &margin)
}

trait OneVal {
    fn one_val() -> Self;
}

impl OneVal for BF {
    fn one_val() -> Self {
        <BF as num_traits::One>::one()
    }
}

fn cache_key(config: &CurveConfig, rho: &BF, trunc: usize) -> String {
    let mut hasher = Sha256::new();
    hasher.update(config.canonical_string().as_bytes());
    hasher.update(rho.to_hex_string().as_bytes());
    hasher.update(trunc.to_le_bytes());
    hasher.update(crate::precision().to_le_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize, Deserialize)]
struct CachedTrajectory {
    rho: BF,
    margin: BF,
    order: usize,
    base: Vec<[BF; 2]>,
    series: Vec<Series<BF>>,
}

fn load_cached(
    dir: &Path,
    key: &str,
    field: &crate::trajectory::VectorField,
) -> Result<Option<Trajectory<BF>>> {
    let path = cache_path(dir, key);
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&path)?;
    let cached: CachedTrajectory = match serde_json::from_str(&text) {
        Ok(c) => c,
        Err(_) => return Ok(None), // stale or corrupt entry: recompute
    };
    let base: Vec<Complex<BF>> = cached
        .base
        .iter()
        .map(|[re, im]| Complex::new(re.clone(), im.clone()))
        .collect();
    Ok(Some(Trajectory::from_parts(
        field.clone(),
        base,
        cached.rho,
        cached.margin,
        cached.order,
        cached.series,
    )))
}

fn store_cached(dir: &Path, key: &str, traj: &Trajectory<BF>) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let path = cache_path(dir, key);
    if path.exists() {
        return Ok(());
    }
    let cached = CachedTrajectory {
        rho: traj.rho().clone(),
        margin: traj.margin().clone(),
        order: traj.truncation_order(),
        base: traj
            .base_point()
            .iter()
            .map(|c| [c.re.clone(), c.im.clone()])
            .collect(),
        series: traj.component_series().to_vec(),
    };
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serde_json::to_string(&cached).unwrap())?;
    // exclusive-create: lose the race silently if another writer finished first
    if path.exists() {
        let _ = std::fs::remove_file(&tmp);
        return Ok(());
    }
    std::fs::rename(&tmp, &path)?;
    Ok(())
}

fn cache_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("traj-{key}.json"))
}

/// Residual tail magnitude helper for tests and reports.
pub fn tail_value<R: Real>(traj: &Trajectory<R>) -> R {
    match traj.tail_bound() {
        BigMag::Zero => R::zero(),
        BigMag::Log(l) => l.clone().exp(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::gamma_radius;

    #[test]
    fn logcurve_first_component_matches_closed_form() {
        let t = logcurve::<BF>(false, Some(BF::from_f64(0.25))).unwrap();
        // z(s) = e^(rho s) / (2 - e^(rho s))
        for sf in [0.05, -0.2, 0.3] {
            let s = cx::cx_from_f64::<BF>(sf, 0.0);
            let v = t.eval_gamma(&s).unwrap();
            let e = (0.25 * sf).exp();
            let expect = e / (2.0 - e);
            assert!(
                (v[0].re.to_f64() - expect).abs() < 1e-12,
                "s = {sf}: {} vs {expect}",
                v[0].re.to_f64()
            );
        }
    }

    #[test]
    fn logcurve_log_components_consistent() {
        let t = logcurve::<BF>(false, None).unwrap();
        let s = cx::cx_from_f64::<BF>(0.21, 0.04);
        let v = t.eval_gamma(&s).unwrap();
        // y1 = log z, y2 = log(1+z), principal branches near base
        let lz = cx::cx_ln(&v[0]);
        let l1z = cx::cx_ln(&(cx::cx_one::<BF>() + v[0].clone()));
        assert!(cx::cx_dist(&v[1], &lz) < BF::exp2i(-100));
        assert!(cx::cx_dist(&v[2], &l1z) < BF::exp2i(-100));
    }

    #[test]
    fn embedded_logcurve_square_cube_coords() {
        let t = logcurve::<BF>(true, None).unwrap();
        let s = cx::cx_from_f64::<BF>(-0.17, 0.09);
        let v = t.eval_gamma(&s).unwrap();
        let z2 = v[0].clone() * v[0].clone();
        let z3 = z2.clone() * v[0].clone();
        assert!(cx::cx_dist(&v[3], &z2) < BF::exp2i(-100));
        assert!(cx::cx_dist(&v[4], &z3) < BF::exp2i(-100));
    }

    #[test]
    fn logcurve_param_inverts_flow() {
        let t = logcurve::<BF>(false, None).unwrap();
        let rho = t.rho().clone();
        // pick a point on the curve, recover its parameter, re-evaluate
        let s0 = cx::cx_from_f64::<BF>(0.11, -0.06);
        let v = t.eval_gamma(&s0).unwrap();
        let s1 = logcurve_param(&v[0], &rho);
        assert!(cx::cx_dist(&s0, &s1) < BF::exp2i(-100));
    }

    #[test]
    fn rho_too_large_errors_with_suggestion() {
        let field = logcurve_field(false);
        let base = logcurve_base::<BF>(false);
        let margin = BF::from_f64(DEFAULT_MARGIN);
        let msg = match solve_trajectory(&field, &base, &BF::from_f64(5.0), 160, &margin) {
            Ok(_) => panic!("expected convergence error"),
            Err(e) => format!("{e}"),
        };
        assert!(msg.contains("largest admissible rho"), "{msg}");
    }

    #[test]
    fn cache_round_trip() {
        let dir = std::env::temp_dir().join("ordcover-test-cache");
        let _ = std::fs::remove_dir_all(&dir);
        let cfg = CurveConfig::named("expcurve(1)");
        let t1 = build_trajectory(&cfg, Some(&dir)).unwrap();
        let t2 = build_trajectory(&cfg, Some(&dir)).unwrap();
        assert_eq!(t1.truncation_order(), t2.truncation_order());
        let z = cx::cx(gamma_radius::<BF>(), BF::from_f64(0.0));
        let a = t1.eval_gamma(&z).unwrap();
        let b = t2.eval_gamma(&z).unwrap();
        assert_eq!(a[1].re, b[1].re);
        let _ = std::fs::remove_dir_all(&dir);
    }
}
