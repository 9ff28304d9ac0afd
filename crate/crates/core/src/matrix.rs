// SPDX-License-Identifier: MIT OR Apache-2.0

//! Dense integer and rational matrices with the exact elimination routines the
//! rest of the crate relies on: Bareiss determinants, Hermite and Smith normal
//! forms (with transforms), integer kernels and saturation.
//!
//! Matrices are row-major `Vec<Vec<_>>`. Rows are vectors; a matrix `B` whose
//! rows are lattice vectors represents the sublattice they span.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type IVec = Vec<BigInt>;
pub type IMat = Vec<IVec>;
pub type QVec = Vec<BigRational>;
pub type QMat = Vec<QVec>;

pub fn zeros(r: usize, c: usize) -> IMat {
    vec![vec![BigInt::zero(); c]; r]
}

pub fn identity(n: usize) -> IMat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    m
}

pub fn from_i64(rows: &[Vec<i64>]) -> IMat {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Converts to machine integers; `None` if any entry does not fit.
pub fn to_i64(m: &IMat) -> Option<Vec<Vec<i64>>> {
    m.iter().map(|r| r.iter().map(|x| x.to_i64()).collect()).collect()
}

pub fn vec_to_i64(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter().map(|x| x.to_i64()).collect()
}

pub fn vec_from_i64(v: &[i64]) -> IVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn transpose(m: &IMat) -> IMat {
    if m.is_empty() {
        return vec![];
    }
    let (r, c) = (m.len(), m[0].len());
    (0..c).map(|j| (0..r).map(|i| m[i][j].clone()).collect()).collect()
}

pub fn mul(a: &IMat, b: &IMat) -> IMat {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            let mut out = vec![BigInt::zero(); n];
            for (k, x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in b[k].iter().enumerate() {
                    if !y.is_zero() {
                        out[j] += x * y;
                    }
                }
            }
            out
        })
        .collect()
}

/// Row vector times matrix.
pub fn vec_mul(v: &[BigInt], m: &IMat) -> IVec {
    let n = m.first().map_or(0, |r| r.len());
    let mut out = vec![BigInt::zero(); n];
    for (k, x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in m[k].iter().enumerate() {
            out[j] += x * y;
        }
    }
    out
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `x G yᵀ`.
pub fn bilinear(x: &[BigInt], g: &IMat, y: &[BigInt]) -> BigInt {
    dot(&vec_mul(x, g), y)
}

/// `B G Bᵀ`.
pub fn congruence(b: &IMat, g: &IMat) -> IMat {
    mul(&mul(b, g), &transpose(b))
}

pub fn is_symmetric(m: &IMat) -> bool {
    let n = m.len();
    m.iter().all(|r| r.len() == n) && (0..n).all(|i| (0..i).all(|j| m[i][j] == m[j][i]))
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det(m: &IMat) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Rank over ℚ.
pub fn rank(m: &IMat) -> usize {
    row_basis(m).len()
}

fn row_op_add(m: &mut IMat, dst: usize, src: usize, f: &BigInt) {
    if f.is_zero() {
        return;
    }
    let (d, s) = if dst < src {
        let (a, b) = m.split_at_mut(src);
        (&mut a[dst], &b[0])
    } else {
        let (a, b) = m.split_at_mut(dst);
        (&mut b[0], &a[src])
    };
    for (x, y) in d.iter_mut().zip(s.iter()) {
        *x += f * y;
    }
}

/// Row-style Hermite normal form with the unimodular transform:
/// returns `(H, U)` with `U·A = H`, `H` in echelon form with positive pivots
/// and reduced entries above each pivot. Zero rows are kept at the bottom.
pub fn hnf_with_transform(a: &IMat) -> (IMat, IMat) {
    let r = a.len();
    let c = a.first().map_or(0, |x| x.len());
    let mut h = a.clone();
    let mut u = identity(r);
    let mut prow = 0;
    for col in 0..c {
        if prow >= r {
            break;
        }
        // Euclid down the column until a single nonzero entry remains.
        loop {
            let mut best: Option<usize> = None;
            for i in prow..r {
                if !h[i][col].is_zero() && best.map_or(true, |b| h[i][col].abs() < h[b][col].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            h.swap(prow, b);
            u.swap(prow, b);
            let mut done = true;
            for i in prow + 1..r {
                if h[i][col].is_zero() {
                    continue;
                }
                let q = -(h[i][col].div_floor(&h[prow][col]));
                row_op_add(&mut h, i, prow, &q);
                row_op_add(&mut u, i, prow, &q);
                if !h[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[prow][col].is_zero() {
            continue;
        }
        if h[prow][col].is_negative() {
            for x in h[prow].iter_mut() {
                *x = -x.clone();
            }
            for x in u[prow].iter_mut() {
                *x = -x.clone();
            }
        }
        for i in 0..prow {
            let q = -(h[i][col].div_floor(&h[prow][col]));
            row_op_add(&mut h, i, prow, &q);
            row_op_add(&mut u, i, prow, &q);
        }
        prow += 1;
    }
    (h, u)
}

/// A basis (in Hermite normal form) of the ℤ-span of the rows.
pub fn row_basis(a: &IMat) -> IMat {
    let (h, _) = hnf_with_transform(a);
    h.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect()
}

/// Basis of the integer left kernel `{x ∈ ℤ^r : x·A = 0}`; automatically saturated.
pub fn left_kernel(a: &IMat) -> IMat {
    let (h, u) = hnf_with_transform(a);
    let k: IMat = h.iter().zip(u).filter(|(row, _)| row.iter().all(|x| x.is_zero())).map(|(_, urow)| urow).collect();
    row_basis(&k)
}

/// Smith normal form `U·A·V = D` with `D` diagonal, `d_i | d_{i+1}`, `d_i ≥ 0`.
/// Pivoting always picks the entry of minimal absolute value.
#[derive(Clone, Debug)]
pub struct Snf {
    pub diag: Vec<BigInt>,
    pub u: IMat,
    pub v: IMat,
}

pub fn snf(a: &IMat) -> Snf {
    let r = a.len();
    let c = a.first().map_or(0, |x| x.len());
    let mut m = a.clone();
    let mut u = identity(r);
    let mut v = identity(c);
    let n = r.min(c);
    let mut t = 0;
    while t < n {
        // locate minimal nonzero entry in the trailing block
        let mut piv: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                if !m[i][j].is_zero() && piv.map_or(true, |(pi, pj)| m[i][j].abs() < m[pi][pj].abs()) {
                    piv = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = piv else { break };
        m.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut m, t, pj);
        swap_cols(&mut v, t, pj);
        let mut clean = true;
        for i in t + 1..r {
            if m[i][t].is_zero() {
                continue;
            }
            let q = -(m[i][t].div_floor(&m[t][t]));
            row_op_add(&mut m, i, t, &q);
            row_op_add(&mut u, i, t, &q);
            if !m[i][t].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..c {
            if m[t][j].is_zero() {
                continue;
            }
            let q = -(m[t][j].div_floor(&m[t][t]));
            col_op_add(&mut m, j, t, &q);
            col_op_add(&mut v, j, t, &q);
            if !m[t][j].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // divisibility condition
        let mut bad = None;
        'outer: for i in t + 1..r {
            for j in t + 1..c {
                if !(&m[i][j] % &m[t][t]).is_zero() {
                    bad = Some(i);
                    break 'outer;
                }
            }
        }
        if let Some(i) = bad {
            let one = BigInt::one();
            row_op_add(&mut m, t, i, &one);
            row_op_add(&mut u, t, i, &one);
            continue;
        }
        if m[t][t].is_negative() {
            for x in m[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        t += 1;
    }
    let diag = (0..n).map(|i| m[i][i].clone()).collect();
    Snf { diag, u, v }
}

fn swap_cols(m: &mut IMat, a: usize, b: usize) {
    if a != b {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }
}

fn col_op_add(m: &mut IMat, dst: usize, src: usize, f: &BigInt) {
    for row in m.iter_mut() {
        let s = row[src].clone();
        row[dst] += f * s;
    }
}

/// Saturation of the row span: a basis of `(ℚ·B) ∩ ℤ^n`.
pub fn saturate(b: &IMat) -> IMat {
    let b = row_basis(b);
    if b.is_empty() {
        return b;
    }
    let k = b.len();
    let s = snf(&b);
    // B = U⁻¹ D V⁻¹, so the row space is spanned by the first k rows of V⁻¹.
    let vinv = inverse_unimodular(&s.v);
    row_basis(&vinv[..k].to_vec())
}

/// Inverse of a unimodular integer matrix.
pub fn inverse_unimodular(m: &IMat) -> IMat {
    let q = rat_inverse(m).expect("unimodular matrix is invertible");
    q.into_iter().map(|r| r.into_iter().map(|x| x.to_integer()).collect()).collect()
}

pub fn to_rat(m: &IMat) -> QMat {
    m.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect()
}

/// Rational inverse by Gauss–Jordan; `None` if singular.
pub fn rat_inverse(m: &IMat) -> Option<QMat> {
    let n = m.len();
    let mut a = to_rat(m);
    let mut inv: QMat = to_rat(&identity(n));
    for col in 0..n {
        let p = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, p);
        inv.swap(col, p);
        let f = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &f;
            inv[col][j] = &inv[col][j] / &f;
        }
        for i in 0..n {
            if i == col || a[i][col].is_zero() {
                continue;
            }
            let g = a[i][col].clone();
            for j in 0..n {
                let x = &g * &a[col][j];
                a[i][j] -= x;
                let y = &g * &inv[col][j];
                inv[i][j] -= y;
            }
        }
    }
    Some(inv)
}

/// Solves `x·A = b` over ℚ for full-row-rank `A` (k×n, k ≤ n); `None` if no solution.
pub fn solve_left(a: &IMat, b: &[BigRational]) -> Option<QVec> {
    let k = a.len();
    let n = b.len();
    // transpose system: Aᵀ xᵀ = bᵀ, augmented (n × (k+1))
    let mut m: QMat = (0..n)
        .map(|j| {
            let mut row: QVec = (0..k).map(|i| BigRational::from_integer(a[i][j].clone())).collect();
            row.push(b[j].clone());
            row
        })
        .collect();
    let mut piv_cols = vec![];
    let mut r = 0;
    for col in 0..k {
        let Some(p) = (r..n).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, p);
        let f = m[r][col].clone();
        for x in m[r].iter_mut() {
            *x = &*x / &f;
        }
        for i in 0..n {
            if i != r && !m[i][col].is_zero() {
                let g = m[i][col].clone();
                for j in 0..=k {
                    let y = &g * &m[r][j];
                    m[i][j] -= y;
                }
            }
        }
        piv_cols.push(col);
        r += 1;
    }
    if (r..n).any(|i| !m[i][k].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); k];
    for (i, &c) in piv_cols.iter().enumerate() {
        x[c] = m[i][k].clone();
    }
    Some(x)
}

/// Least common multiple of the denominators.
pub fn common_denominator(v: &[BigRational]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}
