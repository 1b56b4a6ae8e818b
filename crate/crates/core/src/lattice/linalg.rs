//! Exact linear algebra: Gaussian elimination over prime fields, and integer
//! systems solved through the Mersenne prime `2^61 - 1` with exact verification.

use super::zq::{IntMatrix, Modulus, ZqMatrix, ZqVector};
use crate::error::{Error, Result};

const P61: u64 = (1 << 61) - 1;

#[inline]
fn m61_reduce(x: u128) -> u64 {
    let lo = (x as u64) & P61;
    let hi = (x >> 61) as u64;
    let mut s = lo + (hi & P61) + (hi >> 61);
    while s >= P61 {
        s -= P61;
    }
    s
}

#[inline]
fn m61_mul(a: u64, b: u64) -> u64 {
    m61_reduce(a as u128 * b as u128)
}

#[inline]
fn m61_sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P61 - b
    }
}

#[inline]
fn m61_from_i128(x: i128) -> u64 {
    x.rem_euclid(P61 as i128) as u64
}

fn m61_inv(a: u64) -> u64 {
    let m = Modulus::new(P61).expect("valid modulus");
    m.pow(a, P61 - 2)
}

fn m61_center(a: u64) -> i128 {
    if a > P61 / 2 {
        a as i128 - P61 as i128
    } else {
        a as i128
    }
}

/// Solves `A x = b (mod q)` for prime `q` when `A` has full column rank;
/// fails when the system is inconsistent or the solution is not unique.
pub fn solve_full_column_rank(a: &ZqMatrix, b: &ZqVector) -> Result<ZqVector> {
    let q = a.modulus();
    if b.modulus() != q {
        return Err(Error::ModulusMismatch(q.value(), b.modulus().value()));
    }
    if b.len() != a.rows() {
        return Err(Error::Dimension(format!("{} rows vs rhs {}", a.rows(), b.len())));
    }
    let (rows, cols) = (a.rows(), a.cols());
    let width = cols + 1;
    let mut m: Vec<u64> = Vec::with_capacity(rows * width);
    for r in 0..rows {
        m.extend_from_slice(a.row(r));
        m.push(b.get(r));
    }
    let mut pivot_row = 0;
    for c in 0..cols {
        let Some(p) = (pivot_row..rows).find(|&r| m[r * width + c] != 0) else {
            return Err(Error::NotInvertible(format!("column {c} has no pivot")));
        };
        if p != pivot_row {
            for k in 0..width {
                m.swap(p * width + k, pivot_row * width + k);
            }
        }
        let inv = q.inv(m[pivot_row * width + c])?;
        for k in c..width {
            m[pivot_row * width + k] = q.mul(m[pivot_row * width + k], inv);
        }
        for r in 0..rows {
            if r == pivot_row {
                continue;
            }
            let f = m[r * width + c];
            if f == 0 {
                continue;
            }
            for k in c..width {
                let t = q.mul(f, m[pivot_row * width + k]);
                m[r * width + k] = q.sub(m[r * width + k], t);
            }
        }
        pivot_row += 1;
    }
    if (cols..rows).any(|r| m[r * width + cols] != 0) {
        return Err(Error::NotInvertible("inconsistent system".into()));
    }
    Ok(ZqVector::from_u64(q, (0..cols).map(|r| m[r * width + cols]).collect()))
}

/// Rank of a matrix over the prime field `Z_q`.
pub fn rank_mod_prime(a: &ZqMatrix) -> usize {
    let q = a.modulus();
    let mut tracker = Vec::<(usize, Vec<u64>)>::new();
    for r in 0..a.rows() {
        let mut v = a.row(r).to_vec();
        for (pc, pv) in &tracker {
            let f = v[*pc];
            if f != 0 {
                for (x, &y) in v.iter_mut().zip(pv) {
                    *x = q.sub(*x, q.mul(f, y));
                }
            }
        }
        if let Some(pc) = v.iter().position(|&x| x != 0) {
            let inv = q.inv(v[pc]).expect("prime modulus");
            v.iter_mut().for_each(|x| *x = q.mul(*x, inv));
            tracker.push((pc, v));
        }
    }
    tracker.len()
}

/// Incrementally tests integer vectors for linear independence over the
/// rationals by reducing them modulo a large prime.
///
/// A vector accepted here is independent over `Q`; a rejected one is dependent
/// modulo the prime, which for short vectors almost always means over `Q` too.
#[derive(Debug)]
pub struct IndependenceTracker {
    dim: usize,
    basis: Vec<(usize, Vec<u64>)>,
}

impl IndependenceTracker {
    pub fn new(dim: usize) -> Self {
        Self { dim, basis: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Adds `v` if it is independent of the vectors seen so far.
    pub fn try_add(&mut self, v: &[i64]) -> Result<bool> {
        if v.len() != self.dim {
            return Err(Error::Dimension(format!("vector length {} vs {}", v.len(), self.dim)));
        }
        let mut w: Vec<u64> = v.iter().map(|&x| m61_from_i128(x as i128)).collect();
        for (pc, pv) in &self.basis {
            let f = w[*pc];
            if f != 0 {
                for (x, &y) in w.iter_mut().zip(pv) {
                    if y != 0 {
                        *x = m61_sub(*x, m61_mul(f, y));
                    }
                }
            }
        }
        match w.iter().position(|&x| x != 0) {
            Some(pc) => {
                let inv = m61_inv(w[pc]);
                w.iter_mut().for_each(|x| *x = m61_mul(*x, inv));
                self.basis.push((pc, w));
                Ok(true)
            }
            None => Ok(false),
        }
    }
}

/// LU factorisation of a square integer matrix modulo `2^61 - 1`, used to solve
/// integer systems whose solution is known to be short.
#[derive(Clone, Debug)]
pub struct IntegerSolver {
    n: usize,
    matrix: IntMatrix,
    lu: Vec<u64>,
    perm: Vec<usize>,
}

impl IntegerSolver {
    pub fn new(matrix: IntMatrix) -> Result<Self> {
        if matrix.rows != matrix.cols {
            return Err(Error::Dimension(format!("{}x{} is not square", matrix.rows, matrix.cols)));
        }
        let n = matrix.rows;
        let mut lu: Vec<u64> = matrix.data.iter().map(|&x| m61_from_i128(x as i128)).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        for c in 0..n {
            let p = (c..n)
                .find(|&r| lu[r * n + c] != 0)
                .ok_or_else(|| Error::NotInvertible(format!("singular at column {c}")))?;
            if p != c {
                for k in 0..n {
                    lu.swap(p * n + k, c * n + k);
                }
                perm.swap(p, c);
            }
            let inv = m61_inv(lu[c * n + c]);
            let (upper, lower) = lu.split_at_mut((c + 1) * n);
            let pivot = &upper[c * n..];
            for r in 0..n - c - 1 {
                let row = &mut lower[r * n..(r + 1) * n];
                if row[c] == 0 {
                    continue;
                }
                let f = m61_mul(row[c], inv);
                row[c] = f;
                for k in c + 1..n {
                    if pivot[k] != 0 {
                        row[k] = m61_sub(row[k], m61_mul(f, pivot[k]));
                    }
                }
            }
        }
        Ok(Self { n, matrix, lu, perm })
    }

    /// Returns the integer solution of `M x = rhs` if it exists and is bounded
    /// by `bound` in infinity norm; `None` otherwise.
    pub fn solve_bounded(&self, rhs: &[i128], bound: u64) -> Result<Option<Vec<i64>>> {
        let n = self.n;
        if rhs.len() != n {
            return Err(Error::Dimension(format!("rhs length {} vs {n}", rhs.len())));
        }
        let mut y: Vec<u64> = self.perm.iter().map(|&p| m61_from_i128(rhs[p])).collect();
        for r in 0..n {
            for k in 0..r {
                let l = self.lu[r * n + k];
                if l != 0 {
                    y[r] = m61_sub(y[r], m61_mul(l, y[k]));
                }
            }
        }
        for r in (0..n).rev() {
            for k in r + 1..n {
                let u = self.lu[r * n + k];
                if u != 0 {
                    y[r] = m61_sub(y[r], m61_mul(u, y[k]));
                }
            }
            y[r] = m61_mul(y[r], m61_inv(self.lu[r * n + r]));
        }
        let x: Vec<i128> = y.into_iter().map(m61_center).collect();
        if x.iter().any(|v| v.unsigned_abs() > bound as u128) {
            return Ok(None);
        }
        let x: Vec<i64> = x.into_iter().map(|v| v as i64).collect();
        let check = self.matrix.mul_vec(&x)?;
        Ok((check.as_slice() == rhs).then_some(x))
    }
}
