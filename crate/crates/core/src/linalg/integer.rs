//! Column Hermite normal form with unimodular transform, and the integer
//! kernels, saturations and basis completions built on it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{inverse, to_integer, to_rational, IMat};
use crate::error::{Error, Result};

/// `A · U = H` with `U` unimodular and `H` in column Hermite form: the first
/// `rank` columns carry positive pivots on strictly increasing rows, entries
/// left of a pivot are reduced into `[0, pivot)`, the rest are zero.
#[derive(Debug, Clone)]
pub struct ColumnHnf {
    pub h: IMat,
    pub u: IMat,
    pub rank: usize,
    pub pivot_rows: Vec<usize>,
}

fn col_axpy(m: &mut IMat, dst: usize, src: usize, q: &BigInt) {
    for row in m.iter_mut() {
        if !row[src].is_zero() {
            let t = &row[src] * q;
            row[dst] -= t;
        }
    }
}

fn col_swap(m: &mut IMat, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn col_negate(m: &mut IMat, c: usize) {
    for row in m.iter_mut() {
        row[c] = -&row[c];
    }
}

pub fn column_hnf(a: &IMat, ncols: usize) -> ColumnHnf {
    let mut h = a.clone();
    let mut u = super::int_identity(ncols);
    let mut k = 0;
    let mut pivot_rows = Vec::new();
    for i in 0..h.len() {
        if k == ncols {
            break;
        }
        loop {
            let best = (k..ncols)
                .filter(|&j| !h[i][j].is_zero())
                .min_by(|&x, &y| h[i][x].abs().cmp(&h[i][y].abs()));
            let Some(j) = best else { break };
            if j != k {
                col_swap(&mut h, j, k);
                col_swap(&mut u, j, k);
            }
            let mut done = true;
            for j in k + 1..ncols {
                if h[i][j].is_zero() {
                    continue;
                }
                let q = h[i][j].div_floor(&h[i][k]);
                col_axpy(&mut h, j, k, &q);
                col_axpy(&mut u, j, k, &q);
                if !h[i][j].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[i][k].is_zero() {
            continue;
        }
        if h[i][k].is_negative() {
            col_negate(&mut h, k);
            col_negate(&mut u, k);
        }
        for c in 0..k {
            let q = h[i][c].div_floor(&h[i][k]);
            if !q.is_zero() {
                col_axpy(&mut h, c, k, &q);
                col_axpy(&mut u, c, k, &q);
            }
        }
        pivot_rows.push(i);
        k += 1;
    }
    ColumnHnf {
        h,
        u,
        rank: k,
        pivot_rows,
    }
}

fn rows_from(vectors: &[Vec<BigInt>]) -> IMat {
    vectors.to_vec()
}

fn columns_of(m: &IMat, range: std::ops::Range<usize>) -> Vec<Vec<BigInt>> {
    range.map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

/// A ℤ-basis of `{x ∈ ℤ^n : A x = 0}` where the rows of `A` are given.
pub fn integer_kernel(rows: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let hnf = column_hnf(&rows_from(rows), n);
    columns_of(&hnf.u, hnf.rank..n)
}

/// Canonical generators (column HNF) of the lattice spanned by `vectors`.
pub fn hnf_generators(vectors: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let as_cols = super::transpose(vectors);
    debug_assert_eq!(as_cols.len(), n);
    let hnf = column_hnf(&as_cols, vectors.len());
    columns_of(&hnf.h, 0..hnf.rank)
}

/// Generators of `(ℚ·span) ∩ ℤ^n`, in canonical Hermite form.
pub fn saturate_columns(vectors: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let nonzero: Vec<Vec<BigInt>> = vectors
        .iter()
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    if nonzero.is_empty() {
        return Vec::new();
    }
    let orth = integer_kernel(&nonzero, n);
    let sat = integer_kernel(&orth, n);
    hnf_generators(&sat, n)
}

pub fn integer_inverse(u: &IMat) -> Result<IMat> {
    let inv = inverse(&to_rational(u))?;
    to_integer(&inv).ok_or_else(|| Error::Internal("matrix is not unimodular".into()))
}

/// Vectors completing a saturated family to a basis of `ℤ^n`.
pub fn complete_basis(basis: &[Vec<BigInt>], n: usize) -> Result<Vec<Vec<BigInt>>> {
    let k = basis.len();
    if k == 0 {
        return Ok(columns_of(&super::int_identity(n), 0..n));
    }
    let hnf = column_hnf(&rows_from(basis), n);
    if hnf.rank < k {
        return Err(Error::invalid("basis vectors are linearly dependent"));
    }
    let pivots_product = (0..k).fold(BigInt::one(), |acc, i| acc * &hnf.h[i][i]);
    if !pivots_product.is_one() {
        return Err(Error::NotSaturated);
    }
    let v = super::transpose(&integer_inverse(&hnf.u)?);
    Ok(columns_of(&v, k..n))
}
