//! Dense exact linear algebra over the rationals and the integers.
//!
//! Matrices are row-major `Vec<Vec<_>>`. Everything here is exact except the
//! pruning arithmetic inside lattice enumeration, whose results are always
//! re-checked with rationals.

#![allow(clippy::needless_range_loop)]

mod integer;
mod poly;
mod reduce;
mod subspace;

pub use integer::{
    column_hnf, complete_basis, hnf_generators, integer_inverse, integer_kernel, saturate_columns,
    ColumnHnf,
};
pub use poly::{largest_pencil_root, Poly, RootBracket};
pub use reduce::{lll_gram, short_vectors, DEFAULT_NODE_BUDGET};
pub use subspace::Subspace;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{int, Rational};

pub type QMat = Vec<Vec<Rational>>;
pub type IMat = Vec<Vec<BigInt>>;

pub fn zeros(rows: usize, cols: usize) -> QMat {
    vec![vec![Rational::zero(); cols]; rows]
}

pub fn identity(n: usize) -> QMat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    m
}

pub fn int_identity(n: usize) -> IMat {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i32)).collect())
        .collect()
}

pub fn to_rational(m: &IMat) -> QMat {
    m.iter().map(|row| row.iter().map(int).collect()).collect()
}

/// Converts a matrix with integral entries; `None` if some entry is not.
pub fn to_integer(m: &QMat) -> Option<IMat> {
    m.iter()
        .map(|row| {
            row.iter()
                .map(|q| q.is_integer().then(|| q.to_integer()))
                .collect()
        })
        .collect()
}

pub fn cols(m: &[Vec<Rational>]) -> usize {
    m.first().map_or(0, Vec::len)
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    let c = m.first().map_or(0, Vec::len);
    (0..c).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> QMat {
    let inner = b.len();
    let c = cols(b);
    a.iter()
        .map(|row| {
            debug_assert_eq!(row.len(), inner);
            (0..c)
                .map(|j| {
                    let mut s = Rational::zero();
                    for (k, x) in row.iter().enumerate() {
                        if !x.is_zero() && !b[k][j].is_zero() {
                            s += x * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn int_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> IMat {
    let c = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..c)
                .map(|j| {
                    row.iter()
                        .enumerate()
                        .fold(BigInt::zero(), |s, (k, x)| s + x * &b[k][j])
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    a.iter().map(|row| dot(row, v)).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |s, (x, y)| s + x * y)
}

/// `xᵀ G y` for integer vectors.
pub fn bilinear(g: &[Vec<Rational>], x: &[BigInt], y: &[BigInt]) -> Rational {
    let mut s = Rational::zero();
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        let mut t = Rational::zero();
        for (j, yj) in y.iter().enumerate() {
            if !yj.is_zero() {
                t += &g[i][j] * int(yj);
            }
        }
        s += t * int(xi);
    }
    s
}

/// `Bᵀ G B` where the columns of `B` are the given generators.
pub fn congruence(g: &[Vec<Rational>], gens: &[Vec<BigInt>]) -> QMat {
    let k = gens.len();
    let mut out = zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = bilinear(g, &gens[i], &gens[j]);
            out[j][i] = v.clone();
            out[i][j] = v;
        }
    }
    out
}

/// Rational congruence `Pᵀ G P` where the columns of `P` are generators.
pub fn congruence_q(g: &[Vec<Rational>], gens: &[Vec<Rational>]) -> QMat {
    let gp: Vec<Vec<Rational>> = gens.iter().map(|v| mat_vec(g, v)).collect();
    let k = gens.len();
    let mut out = zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = dot(&gens[i], &gp[j]);
            out[j][i] = v.clone();
            out[i][j] = v;
        }
    }
    out
}

/// Reduced row echelon form and the pivot columns.
pub fn rref(m: &[Vec<Rational>]) -> (QMat, Vec<usize>) {
    let mut a: QMat = m.to_vec();
    let rows = a.len();
    let c = cols(&a);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..c {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][col].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in col..c {
                    if !a[r][j].is_zero() {
                        let t = &f * &a[r][j];
                        a[i][j] -= t;
                    }
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rank(m: &[Vec<Rational>]) -> usize {
    rref(m).1.len()
}

/// Basis of `{x : M x = 0}` as row vectors.
pub fn kernel(m: &[Vec<Rational>], ncols: usize) -> QMat {
    let (r, pivots) = rref(m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

pub fn determinant(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a: QMat = m.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !a[i][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= &a[col][col];
        let inv = a[col][col].recip();
        for i in col + 1..n {
            if a[i][col].is_zero() {
                continue;
            }
            let f = &a[i][col] * &inv;
            for j in col..n {
                if !a[col][j].is_zero() {
                    let t = &f * &a[col][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    det
}

pub fn int_determinant(m: &[Vec<BigInt>]) -> BigInt {
    determinant(&to_rational(&m.to_vec())).to_integer()
}

pub fn inverse(m: &[Vec<Rational>]) -> Result<QMat> {
    let n = m.len();
    let aug: QMat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(Error::invalid("matrix is singular"));
    }
    Ok(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// `L D Lᵀ` with unit lower-triangular `L`; `None` unless positive definite.
pub fn ldl(g: &[Vec<Rational>]) -> Option<(QMat, Vec<Rational>)> {
    let n = g.len();
    let mut l = identity(n);
    let mut d: Vec<Rational> = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..i {
            let mut s = g[i][j].clone();
            for k in 0..j {
                if !l[i][k].is_zero() && !l[j][k].is_zero() {
                    s -= &l[i][k] * &l[j][k] * &d[k];
                }
            }
            l[i][j] = s / &d[j];
        }
        let mut s = g[i][i].clone();
        for k in 0..i {
            if !l[i][k].is_zero() {
                s -= &l[i][k] * &l[i][k] * &d[k];
            }
        }
        if !s.is_positive() {
            return None;
        }
        d.push(s);
    }
    Some((l, d))
}

pub fn is_symmetric(g: &[Vec<Rational>]) -> bool {
    let n = g.len();
    g.iter().all(|r| r.len() == n) && (0..n).all(|i| (0..i).all(|j| g[i][j] == g[j][i]))
}

pub fn is_positive_definite(g: &[Vec<Rational>]) -> bool {
    is_symmetric(g) && ldl(g).is_some()
}

pub fn block_diagonal(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> QMat {
    let (n, m) = (a.len(), b.len());
    let mut out = zeros(n + m, n + m);
    for i in 0..n {
        out[i][..n].clone_from_slice(&a[i]);
    }
    for i in 0..m {
        out[n + i][n..].clone_from_slice(&b[i]);
    }
    out
}

/// Kronecker product; row index of `a[i][j] * b[k][l]` is `i * rows(b) + k`.
pub fn kronecker(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> QMat {
    let (ar, ac, br, bc) = (a.len(), cols(a), b.len(), cols(b));
    let mut out = zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            if a[i][j].is_zero() {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[i * br + k][j * bc + l] = &a[i][j] * &b[k][l];
                }
            }
        }
    }
    out
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Position of a sorted subset in the lexicographic list of `k`-subsets.
pub fn subset_index(set: &[usize], n: usize) -> usize {
    let k = set.len();
    let mut idx = 0;
    let mut prev = 0;
    for (pos, &s) in set.iter().enumerate() {
        for skipped in prev..s {
            idx += binomial(n - skipped - 1, k - pos - 1);
        }
        prev = s + 1;
    }
    idx
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `k`-th compound matrix: entries are the `k×k` minors of `m` with rows
/// and columns indexed by sorted `k`-subsets in lexicographic order.
pub fn compound(m: &[Vec<Rational>], k: usize) -> QMat {
    let rs = subsets(m.len(), k);
    let cs = subsets(cols(m), k);
    rs.iter()
        .map(|r| {
            cs.iter()
                .map(|c| {
                    let minor: QMat = r
                        .iter()
                        .map(|&i| c.iter().map(|&j| m[i][j].clone()).collect())
                        .collect();
                    determinant(&minor)
                })
                .collect()
        })
        .collect()
}

/// Coordinates of `v_1 ∧ … ∧ v_k` in the basis `e_I` of sorted subsets.
pub fn wedge(vectors: &[Vec<Rational>]) -> Vec<Rational> {
    let as_cols = transpose(vectors);
    let n = as_cols.len();
    let k = vectors.len();
    subsets(n, k)
        .iter()
        .map(|set| {
            let minor: QMat = set.iter().map(|&i| as_cols[i].clone()).collect();
            determinant(&minor)
        })
        .collect()
}

pub fn scale_vec(v: &[Rational], s: &Rational) -> Vec<Rational> {
    v.iter().map(|x| x * s).collect()
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, ratio};

    fn q(rows: &[&[i64]]) -> QMat {
        rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    #[test]
    fn determinant_and_inverse() {
        let m = q(&[&[2, 1], &[1, 3]]);
        assert_eq!(determinant(&m), rat(5));
        let inv = inverse(&m).unwrap();
        assert_eq!(mul(&m, &inv), identity(2));
        assert!(inverse(&q(&[&[1, 2], &[2, 4]])).is_err());
    }

    #[test]
    fn kernel_and_rank() {
        let m = q(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(rank(&m), 1);
        let k = kernel(&m, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(is_zero_vec(&mat_vec(&m, v)));
        }
    }

    #[test]
    fn ldl_detects_definiteness() {
        assert!(is_positive_definite(&q(&[&[2, 1], &[1, 2]])));
        assert!(!is_positive_definite(&q(&[&[1, 2], &[2, 1]])));
        assert!(!is_positive_definite(&q(&[&[1, 0], &[1, 1]])));
        let (l, d) = ldl(&q(&[&[4, 2], &[2, 3]])).unwrap();
        assert_eq!(d, vec![rat(4), rat(2)]);
        assert_eq!(l[1][0], ratio(1, 2));
    }

    #[test]
    fn compound_and_subsets() {
        assert_eq!(subsets(4, 2).len(), 6);
        for (i, s) in subsets(5, 3).iter().enumerate() {
            assert_eq!(subset_index(s, 5), i);
        }
        let g = q(&[&[1, 0], &[0, 4]]);
        assert_eq!(compound(&g, 2), q(&[&[4]]));
        assert_eq!(compound(&g, 1), g);
        // Cauchy-Binet: compound is multiplicative.
        let a = q(&[&[1, 2, 0], &[3, -1, 2], &[0, 1, 1]]);
        let b = q(&[&[2, 0, 1], &[1, 1, 0], &[-1, 2, 3]]);
        assert_eq!(compound(&mul(&a, &b), 2), mul(&compound(&a, 2), &compound(&b, 2)));
    }

    #[test]
    fn kronecker_layout() {
        let a = q(&[&[1, 0], &[0, 4]]);
        let b = q(&[&[9]]);
        assert_eq!(kronecker(&a, &b), q(&[&[9, 0], &[0, 36]]));
        let c = q(&[&[1, 2], &[3, 4]]);
        let k = kronecker(&c, &c);
        assert_eq!(k[1][2], rat(6)); // a[0][1] * b[1][0]
    }
}
