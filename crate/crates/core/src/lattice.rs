//! Exact integer lattice utilities: textbook LLL with rational Gram-Schmidt
//! and rational kernel bases. Dimensions here are small (dozens), so exact
//! arithmetic is affordable and keeps every run bit-reproducible.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Euclid, One, Signed, Zero};

fn dot_rat(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lovasz-reduced basis (delta = 3/4) of the lattice spanned by `basis` rows.
/// Zero rows are dropped.
pub fn lll_reduce(mut basis: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    basis.retain(|r| r.iter().any(|x| !x.is_zero()));
    let n = basis.len();
    if n <= 1 {
        return basis;
    }
    let dim = basis[0].len();
    assert!(basis.iter().all(|r| r.len() == dim));

    // Gram-Schmidt data, recomputed incrementally
    let mut mu: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n]; n];
    let mut b_star: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); dim]; n];
    let mut b_norm: Vec<BigRational> = vec![BigRational::zero(); n];

    let compute_gs = |k: usize,
                      basis: &Vec<Vec<BigInt>>,
                      mu: &mut Vec<Vec<BigRational>>,
                      b_star: &mut Vec<Vec<BigRational>>,
                      b_norm: &mut Vec<BigRational>| {
        let bk: Vec<BigRational> = basis[k].iter().map(|x| BigRational::from(x.clone())).collect();
        let mut star = bk.clone();
        for j in 0..k {
            let m = if b_norm[j].is_zero() {
                BigRational::zero()
            } else {
                dot_rat(&bk, &b_star[j]) / b_norm[j].clone()
            };
            mu[k][j] = m.clone();
            for (s, bs) in star.iter_mut().zip(&b_star[j]) {
                *s -= m.clone() * bs.clone();
            }
        }
        b_norm[k] = dot_rat(&star, &star);
        b_star[k] = star;
    };

    for k in 0..n {
        compute_gs(k, &basis, &mut mu, &mut b_star, &mut b_norm);
    }

    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let mut k = 1usize;
    let mut guard = 0usize;
    while k < n {
        guard += 1;
        assert!(guard < 2_000_000, "LLL iteration guard tripped");
        // size-reduce row k against rows k-1 .. 0
        for j in (0..k).rev() {
            let m = mu[k][j].clone();
            if m.clone().abs() > half {
                let q = round_rational(&m);
                if !q.is_zero() {
                    let prev = basis[j].clone();
                    for (x, p) in basis[k].iter_mut().zip(&prev) {
                        *x -= &q * p;
                    }
                }
                compute_gs(k, &basis, &mut mu, &mut b_star, &mut b_norm);
            }
        }
        // Lovasz condition
        let lhs = b_norm[k].clone();
        let rhs = (delta.clone() - mu[k][k - 1].clone() * mu[k][k - 1].clone())
            * b_norm[k - 1].clone();
        if lhs >= rhs {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            compute_gs(k - 1, &basis, &mut mu, &mut b_star, &mut b_norm);
            compute_gs(k, &basis, &mut mu, &mut b_star, &mut b_norm);
            k = k.max(2) - 1;
        }
    }
    basis
}

fn round_rational(x: &BigRational) -> BigInt {
    let two = BigInt::from(2);
    let num = x.numer() * &two + x.denom();
    let den = x.denom() * &two;
    Euclid::div_euclid(&num, &den)
}

/// Integer-cleared basis of the rational kernel {v : A v = 0} of a rational
/// matrix given by rows. Output vectors are primitive (gcd 1) and ordered by
/// the free-column order of the reduced echelon form.
pub fn rational_kernel(rows: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigInt>> {
    let mut mat: Vec<Vec<BigRational>> = rows.to_vec();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        // find pivot
        let mut piv = None;
        for i in r..mat.len() {
            if !mat[i][c].is_zero() {
                piv = Some(i);
                break;
            }
        }
        let Some(p) = piv else { continue };
        mat.swap(r, p);
        let inv = mat[r][c].clone();
        for x in mat[r].iter_mut() {
            *x /= inv.clone();
        }
        for i in 0..mat.len() {
            if i != r && !mat[i][c].is_zero() {
                let f = mat[i][c].clone();
                let pivot_row = mat[r].clone();
                for (x, pr) in mat[i].iter_mut().zip(&pivot_row) {
                    *x -= f.clone() * pr.clone();
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == mat.len() {
            break;
        }
    }
    let pivot_set: std::collections::BTreeSet<usize> = pivot_cols.iter().cloned().collect();
    let mut kernel = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::one();
        for (ri, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -mat[ri][free].clone();
        }
        kernel.push(clear_denominators(&v));
    }
    kernel
}

pub fn clear_denominators(v: &[BigRational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() || g.is_one() {
        return ints;
    }
    ints.iter().map(|x| x / &g).collect()
}

pub fn linf_norm(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn lll_shortens_a_skewed_basis() {
        let basis = vec![vec![bi(1), bi(0), bi(1000)], vec![bi(0), bi(1), bi(999)]];
        let red = lll_reduce(basis);
        // the difference vector (1, -1, 1) must be discovered
        let norms: Vec<BigInt> = red.iter().map(|r| dot(r, r)).collect();
        assert!(norms.iter().any(|n| *n <= bi(3)), "norms {norms:?}");
    }

    #[test]
    fn lll_preserves_lattice_membership_dim2() {
        // classic example: reduced basis of {(1, 1), (1, 0)} spans the same lattice
        let basis = vec![vec![bi(12), bi(2)], vec![bi(13), bi(4)]];
        let red = lll_reduce(basis.clone());
        // determinant magnitude is invariant
        let det0 = (bi(12) * bi(4) - bi(2) * bi(13)).abs();
        let det1 = (&red[0][0] * &red[1][1] - &red[0][1] * &red[1][0]).abs();
        assert_eq!(det0, det1);
    }

    #[test]
    fn kernel_of_simple_system() {
        // x + y + z = 0, x - z = 0 -> kernel spanned by (1, -2, 1)
        let one = BigRational::one();
        let rows = vec![
            vec![one.clone(), one.clone(), one.clone()],
            vec![one.clone(), BigRational::zero(), -one.clone()],
        ];
        let k = rational_kernel(&rows, 3);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert_eq!(v[0], v[2]);
        assert_eq!(v[1], -(&v[0] * BigInt::from(2)));
    }

    #[test]
    fn kernel_handles_rational_entries() {
        // (1/2)x + (1/3)y = 0 -> kernel (2, -3) primitive
        let rows = vec![vec![
            BigRational::new(bi(1), bi(2)),
            BigRational::new(bi(1), bi(3)),
        ]];
        let k = rational_kernel(&rows, 2);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        assert_eq!((v[0].clone() * bi(3) + v[1].clone() * bi(2)).abs(), BigInt::zero().abs());
        assert_eq!(linf_norm(v), bi(3));
    }

    #[test]
    fn round_rational_ties() {
        assert_eq!(round_rational(&BigRational::new(bi(1), bi(2))), bi(1));
        assert_eq!(round_rational(&BigRational::new(bi(-1), bi(2))), bi(0));
        assert_eq!(round_rational(&BigRational::new(bi(7), bi(3))), bi(2));
    }
}
