//! Exact multivariate integer polynomials: sparse representation over
//! `BigInt`, degree/height bookkeeping, homogenization and the canonical text
//! serialization.

use crate::cx;
use crate::error::{Error, Result};
use crate::scalar::Real;
use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Shared Debug body for the two polynomial types.
macro_rules! fmt_poly_body {
    ($var:literal) => {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if self.terms.is_empty() {
                return write!(f, "0");
            }
            let parts: Vec<String> = self
                .terms
                .iter()
                .map(|(m, c)| {
                    let vars: String = m
                        .0
                        .iter()
                        .enumerate()
                        .filter(|(_, &e)| e > 0)
                        .map(|(i, &e)| {
                            if e == 1 {
                                format!("{}{}", $var, i + if $var == "X" { 0 } else { 1 })
                            } else {
                                format!("{}{}^{}", $var, i + if $var == "X" { 0 } else { 1 }, e)
                            }
                        })
                        .collect::<Vec<_>>()
                        .join("*");
                    if vars.is_empty() {
                        format!("{c}")
                    } else if c.is_one() {
                        vars
                    } else if (-c).is_one() {
                        format!("-{vars}")
                    } else {
                        format!("{c}*{vars}")
                    }
                })
                .collect();
            write!(f, "{}", parts.join(" + "))
        }
    };
}

/// Exponent multi-index; lexicographic order from the derived `Ord` gives the
/// deterministic term order used everywhere.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn constant(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    num_vars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl IntPolynomial {
    pub fn zero(num_vars: usize) -> Self {
        IntPolynomial { num_vars, terms: BTreeMap::new() }
    }

    pub fn constant(num_vars: usize, c: BigInt) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(Monomial::constant(num_vars), c);
        p
    }

    pub fn var(num_vars: usize, i: usize) -> Self {
        assert!(i < num_vars, "variable index {i} out of range {num_vars}");
        let mut p = Self::zero(num_vars);
        p.add_term(Monomial::var(num_vars, i), BigInt::one());
        p
    }

    pub fn from_terms<I>(num_vars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, BigInt)>,
    {
        let mut p = Self::zero(num_vars);
        for (e, c) in terms {
            assert_eq!(e.len(), num_vars, "exponent arity mismatch");
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.0.len(), self.num_vars);
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = o.get_mut();
                *v += c;
                if v.is_zero() {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.total_degree() == 0)
    }

    /// Total degree; zero polynomial has none.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    /// Height: max |coefficient|.
    pub fn height_int(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// log-height h(p) = log max |coefficient|, natural log.
    pub fn log_height<R: Real>(&self) -> Result<R> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial("log_height"));
        }
        Ok(crate::scalar::ln_bigint(&self.height_int()))
    }

    /// (deg p, h(p), t(p) = deg p + h(p)).
    pub fn t_of<R: Real>(&self) -> Result<(u32, R, R)> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial("t_of"));
        }
        let deg = self.degree().unwrap();
        let h: R = self.log_height()?;
        let t = R::from_i64(deg as i64) + h.clone();
        Ok((deg, h, t))
    }

    pub fn neg(&self) -> Self {
        IntPolynomial {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.num_vars, rhs.num_vars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.num_vars, rhs.num_vars);
        let mut out = Self::zero(self.num_vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.num_vars, BigInt::one());
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.num_vars);
        }
        IntPolynomial {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, q)| (m.clone(), q * c)).collect(),
        }
    }

    pub fn derivative(&self, var: usize) -> Self {
        assert!(var < self.num_vars);
        let mut out = Self::zero(self.num_vars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[var] = e - 1;
            out.add_term(m2, c * BigInt::from(e));
        }
        out
    }

    /// Evaluation at a complex point with per-variable power tables.
    pub fn eval<R: Real>(&self, point: &[Complex<R>]) -> Complex<R> {
        assert_eq!(point.len(), self.num_vars, "evaluation arity mismatch");
        let tables = PowerTable::build(point, self.max_exponents());
        self.eval_with_tables(&tables)
    }

    pub fn max_exponents(&self) -> Vec<u32> {
        let mut m = vec![0u32; self.num_vars];
        for mono in self.terms.keys() {
            for (i, e) in mono.0.iter().enumerate() {
                m[i] = m[i].max(*e);
            }
        }
        m
    }

    pub fn eval_with_tables<R: Real>(&self, tables: &[PowerTable<R>]) -> Complex<R> {
        let mut acc = cx::cx_zero();
        for (mono, c) in &self.terms {
            let mut term = cx::cx(R::from_bigint(c), R::zero());
            for (i, &e) in mono.0.iter().enumerate() {
                if e > 0 {
                    term = term * tables[i].pow(e).clone();
                }
            }
            acc = acc + term;
        }
        acc
    }

    pub fn eval_real<R: Real>(&self, point: &[R]) -> R {
        let pt: Vec<Complex<R>> = point.iter().map(|x| cx::cx(x.clone(), R::zero())).collect();
        self.eval(&pt).re
    }

    /// Sum of |coefficients| as a BigInt; Lipschitz-style bounds build on it.
    pub fn coeff_abs_sum(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Sum over variables of the gradient coefficient mass, a crude global
    /// Lipschitz numerator.
    pub fn grads_abs_sum_bound(&self) -> BigInt {
        (0..self.num_vars)
            .map(|i| self.derivative(i).coeff_abs_sum())
            .sum()
    }

    /// X0^(deg p) * p(X1/X0, ..., Xn/X0).
    pub fn homogenize(&self) -> Result<HomogeneousPolynomial> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial("homogenize"));
        }
        let d = self.degree().unwrap();
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let td = m.total_degree();
            let mut e = Vec::with_capacity(self.num_vars + 1);
            e.push(d - td);
            e.extend_from_slice(&m.0);
            terms.insert(Monomial(e), c.clone());
        }
        Ok(HomogeneousPolynomial { num_vars: self.num_vars + 1, degree: d, terms })
    }
}

impl fmt::Debug for IntPolynomial {
    fmt_poly_body!("x");
}

#[derive(Clone, PartialEq, Eq)]
pub struct HomogeneousPolynomial {
    num_vars: usize, // n + 1 variables X0..Xn
    degree: u32,
    terms: BTreeMap<Monomial, BigInt>,
}

impl HomogeneousPolynomial {
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, BigInt)>,
    {
        let mut map: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            if c.is_zero() {
                continue;
            }
            assert_eq!(e.len(), num_vars);
            let m = Monomial(e);
            let entry = map.entry(m).or_insert_with(BigInt::zero);
            *entry += c;
            if entry.is_zero() {
                // removed below
            }
        }
        map.retain(|_, c| !c.is_zero());
        if map.is_empty() {
            return Err(Error::ZeroPolynomial("homogeneous from_terms"));
        }
        let degs: Vec<u32> = map.keys().map(Monomial::total_degree).collect();
        let degree = degs[0];
        if degs.iter().any(|&d| d != degree) {
            return Err(Error::Domain("terms of unequal total degree".into()));
        }
        Ok(HomogeneousPolynomial { num_vars, degree, terms: map })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn height_int(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Sets X0 = 1.
    pub fn dehomogenize(&self) -> IntPolynomial {
        let mut p = IntPolynomial::zero(self.num_vars - 1);
        for (m, c) in &self.terms {
            p.add_term(Monomial(m.0[1..].to_vec()), c.clone());
        }
        p
    }

    pub fn eval<R: Real>(&self, point: &[Complex<R>]) -> Complex<R> {
        assert_eq!(point.len(), self.num_vars);
        let mut maxe = vec![0u32; self.num_vars];
        for mono in self.terms.keys() {
            for (i, e) in mono.0.iter().enumerate() {
                maxe[i] = maxe[i].max(*e);
            }
        }
        let tables = PowerTable::build(point, maxe);
        let mut acc = cx::cx_zero();
        for (mono, c) in &self.terms {
            let mut term = cx::cx(R::from_bigint(c), R::zero());
            for (i, &e) in mono.0.iter().enumerate() {
                if e > 0 {
                    term = term * tables[i].pow(e).clone();
                }
            }
            acc = acc + term;
        }
        acc
    }
}

impl fmt::Debug for HomogeneousPolynomial {
    fmt_poly_body!("X");
}

/// Cached powers 1, z, z^2, ..., z^max of one coordinate.
pub struct PowerTable<R> {
    powers: Vec<Complex<R>>,
}

impl<R: Real> PowerTable<R> {
    pub fn build(point: &[Complex<R>], max_exps: impl IntoIterator<Item = u32>) -> Vec<Self> {
        point
            .iter()
            .zip(max_exps)
            .map(|(z, me)| {
                let mut powers = Vec::with_capacity(me as usize + 1);
                powers.push(cx::cx_one());
                for k in 1..=me as usize {
                    let prev = powers[k - 1].clone();
                    powers.push(prev * z.clone());
                }
                PowerTable { powers }
            })
            .collect()
    }

    pub fn pow(&self, e: u32) -> &Complex<R> {
        &self.powers[e as usize]
    }
}

// ---------------------------------------------------------------------------
// canonical text form
// ---------------------------------------------------------------------------

impl IntPolynomial {
    /// Canonical serialization: `{"n": 2, "terms": [[[2,0], "3"], ...]}`,
    /// terms in lexicographic exponent order, coefficients as decimal strings.
    pub fn to_canonical_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(m, c)| {
                serde_json::json!([
                    m.0.iter().map(|&e| serde_json::json!(e)).collect::<Vec<_>>(),
                    c.to_string()
                ])
            })
            .collect();
        serde_json::json!({ "n": self.num_vars, "terms": terms })
    }

    pub fn to_canonical_string(&self) -> String {
        self.to_canonical_json().to_string()
    }

    pub fn from_canonical_json(v: &serde_json::Value) -> Result<Self> {
        let n = v
            .get("n")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::Parse("polynomial: missing \"n\"".into()))? as usize;
        let terms = v
            .get("terms")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::Parse("polynomial: missing \"terms\"".into()))?;
        let mut p = IntPolynomial::zero(n);
        for t in terms {
            let pair = t
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::Parse("polynomial term must be [exps, coeff]".into()))?;
            let exps: Vec<u32> = pair[0]
                .as_array()
                .ok_or_else(|| Error::Parse("exponent vector expected".into()))?
                .iter()
                .map(|e| {
                    e.as_u64()
                        .map(|x| x as u32)
                        .ok_or_else(|| Error::Parse("non-integer exponent".into()))
                })
                .collect::<Result<_>>()?;
            if exps.len() != n {
                return Err(Error::Parse(format!(
                    "exponent arity {} does not match n = {n}",
                    exps.len()
                )));
            }
            let coeff = match &pair[1] {
                serde_json::Value::String(s) => s
                    .parse::<BigInt>()
                    .map_err(|e| Error::Parse(format!("bad coefficient {s}: {e}")))?,
                serde_json::Value::Number(num) => num
                    .as_i64()
                    .map(BigInt::from)
                    .ok_or_else(|| Error::Parse(format!("bad numeric coefficient {num}")))?,
                other => return Err(Error::Parse(format!("bad coefficient value {other}"))),
            };
            p.add_term(Monomial(exps), coeff);
        }
        Ok(p)
    }

    pub fn from_canonical_str(s: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_canonical_json(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BF;

    fn p_3x2_plus_1() -> IntPolynomial {
        IntPolynomial::from_terms(
            1,
            [(vec![2], BigInt::from(3)), (vec![0], BigInt::from(1))],
        )
    }

    #[test]
    fn t_of_examples() {
        // 3x^2 + 1 -> (2, log 3, 2 + log 3)
        let (d, h, t): (u32, BF, BF) = p_3x2_plus_1().t_of().unwrap();
        assert_eq!(d, 2);
        assert!((h.to_f64() - 3.0f64.ln()).abs() < 1e-14);
        assert!((t.to_f64() - (2.0 + 3.0f64.ln())).abs() < 1e-14);

        // x1 -> (1, 0, 1)
        let x1 = IntPolynomial::var(2, 0);
        let (d, h, t): (u32, BF, BF) = x1.t_of().unwrap();
        assert_eq!(d, 1);
        assert!(h.is_zero());
        assert_eq!(t.to_f64(), 1.0);

        // 7 x1 x2^3 - 2 -> (4, log 7, 4 + log 7)
        let p = IntPolynomial::from_terms(
            2,
            [(vec![1, 3], BigInt::from(7)), (vec![0, 0], BigInt::from(-2))],
        );
        let (d, h, t): (u32, BF, BF) = p.t_of().unwrap();
        assert_eq!(d, 4);
        assert!((h.to_f64() - 7.0f64.ln()).abs() < 1e-14);
        assert!((t.to_f64() - (4.0 + 7.0f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn t_of_rejects_zero() {
        let z = IntPolynomial::zero(2);
        assert!(z.t_of::<BF>().is_err());
    }

    #[test]
    fn homogenize_examples() {
        // x1 + 1 -> X1 + X0
        let p = IntPolynomial::from_terms(
            1,
            [(vec![1], BigInt::from(1)), (vec![0], BigInt::from(1))],
        );
        let q = p.homogenize().unwrap();
        assert_eq!(q.degree(), 1);
        let coeffs: Vec<(Vec<u32>, BigInt)> =
            q.terms().map(|(m, c)| (m.0.clone(), c.clone())).collect();
        assert_eq!(
            coeffs,
            vec![
                (vec![0, 1], BigInt::from(1)),
                (vec![1, 0], BigInt::from(1))
            ]
        );

        // x1^2 + x2 -> X1^2 + X0 X2
        let p = IntPolynomial::from_terms(
            2,
            [(vec![2, 0], BigInt::from(1)), (vec![0, 1], BigInt::from(1))],
        );
        let q = p.homogenize().unwrap();
        assert_eq!(q.degree(), 2);
        assert_eq!(q.dehomogenize(), p);

        // constant 5 -> degree 0
        let c = IntPolynomial::constant(3, BigInt::from(5));
        let q = c.homogenize().unwrap();
        assert_eq!(q.degree(), 0);
        assert_eq!(q.dehomogenize(), c);
    }

    #[test]
    fn homogenize_round_trip_random_shape() {
        let p = IntPolynomial::from_terms(
            2,
            [
                (vec![0, 0], BigInt::from(4)),
                (vec![1, 2], BigInt::from(-7)),
                (vec![3, 0], BigInt::from(2)),
            ],
        );
        assert_eq!(p.homogenize().unwrap().dehomogenize(), p);
    }

    #[test]
    fn eval_and_derivative() {
        let p = p_3x2_plus_1();
        let v = p.eval_real(&[BF::from_f64(2.0)]);
        assert_eq!(v.to_f64(), 13.0);
        let dp = p.derivative(0);
        let v = dp.eval_real(&[BF::from_f64(2.0)]);
        assert_eq!(v.to_f64(), 12.0);
    }

    #[test]
    fn mul_pow_consistency() {
        let p = p_3x2_plus_1();
        assert_eq!(p.mul(&p), p.pow(2));
        assert_eq!(p.pow(0), IntPolynomial::constant(1, BigInt::one()));
    }

    #[test]
    fn canonical_serialization_round_trip() {
        let p = IntPolynomial::from_terms(
            2,
            [(vec![2, 0], BigInt::from(3)), (vec![0, 0], BigInt::from(1))],
        );
        let s = p.to_canonical_string();
        assert_eq!(s, r#"{"n":2,"terms":[[[0,0],"1"],[[2,0],"3"]]}"#);
        let q = IntPolynomial::from_canonical_str(&s).unwrap();
        assert_eq!(p, q);
        // plain JSON numbers accepted on input
        let q2 =
            IntPolynomial::from_canonical_str(r#"{"n":2,"terms":[[[2,0],3],[[0,0],1]]}"#).unwrap();
        assert_eq!(p, q2);
    }
}
