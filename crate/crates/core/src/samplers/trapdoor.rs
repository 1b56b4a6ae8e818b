//! Gadget trapdoors: generation, Gaussian preimage sampling and short kernel bases.

use super::gaussian::{sample_centered, smoothing_constant, standard_normals};
use crate::encoding::{tag, Decode, Encode, Reader, Sink};
use crate::error::{Error, Result};
use crate::lattice::{gadget_matrix, linalg, IntMatrix, IntVector, Modulus, ZqMatrix, ZqVector};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use std::f64::consts::PI;

/// Consecutive rank failures tolerated while generating a binary trapdoor.
const RANK_RETRIES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrapdoorKind {
    /// Entries in `{0, 1}`; the owning matrix carries tag `I`.
    Binary,
    /// Entries in `{-1, 0, 1}`; the owning matrix may carry any scalar tag.
    Ternary,
}

/// A short matrix `R` with `(A | H·G - A·R)·(R; I) = H·G`.
#[derive(Clone, Debug, PartialEq)]
pub struct GTrapdoor {
    r: IntMatrix,
    kind: TrapdoorKind,
    spectral_norm: f64,
}

impl GTrapdoor {
    pub fn new(r: IntMatrix, kind: TrapdoorKind) -> Result<Self> {
        let ok = match kind {
            TrapdoorKind::Binary => r.data.iter().all(|&x| x == 0 || x == 1),
            TrapdoorKind::Ternary => r.data.iter().all(|&x| (-1..=1).contains(&x)),
        };
        if !ok {
            return Err(Error::Range(format!("trapdoor entries outside the {kind:?} alphabet")));
        }
        let spectral_norm = spectral_norm(&r);
        Ok(Self { r, kind, spectral_norm })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.r
    }

    pub fn kind(&self) -> TrapdoorKind {
        self.kind
    }

    /// Power-iteration estimate of the largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        self.spectral_norm
    }
}

impl Encode for GTrapdoor {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u8(tag::TRAPDOOR);
        s.put_u8(match self.kind {
            TrapdoorKind::Binary => 0,
            TrapdoorKind::Ternary => 1,
        });
        s.put_int_matrix(&self.r);
    }
}

impl Decode for GTrapdoor {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.expect_tag(tag::TRAPDOOR)?;
        let kind = match r.u8()? {
            0 => TrapdoorKind::Binary,
            1 => TrapdoorKind::Ternary,
            k => return Err(Error::Decode(format!("trapdoor kind {k}"))),
        };
        Self::new(r.int_matrix()?, kind)
    }
}

/// Largest singular value of an integer matrix by power iteration on `RᵀR`.
pub fn spectral_norm(r: &IntMatrix) -> f64 {
    if r.rows == 0 || r.cols == 0 {
        return 0.0;
    }
    let mut v: Vec<f64> = (0..r.cols).map(|i| 1.0 + (i % 7) as f64 * 0.01).collect();
    let mut est = 0.0;
    let rf: Vec<f64> = r.data.iter().map(|&x| x as f64).collect();
    for _ in 0..300 {
        let w: Vec<f64> = (0..r.rows)
            .map(|i| rf[i * r.cols..(i + 1) * r.cols].iter().zip(&v).map(|(a, b)| a * b).sum())
            .collect();
        let mut next = vec![0.0; r.cols];
        for (i, wi) in w.iter().enumerate() {
            for (n, a) in next.iter_mut().zip(&rf[i * r.cols..(i + 1) * r.cols]) {
                *n += a * wi;
            }
        }
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let new_est = norm.sqrt();
        v = next.into_iter().map(|x| x / norm).collect();
        if (new_est - est).abs() < 1e-9 * new_est {
            est = new_est;
            break;
        }
        est = new_est;
    }
    est
}

/// `B = (B̄ | G - B̄·S)` with uniform full-rank `B̄` and binary `S`.
pub fn trapdoor_gen_binary<R: Rng + ?Sized>(n: usize, m: usize, q: Modulus, rng: &mut R) -> Result<(ZqMatrix, GTrapdoor)> {
    let nk = n * q.bits();
    if m < 2 * nk {
        return Err(Error::Dimension(format!("binary trapdoor needs m >= {}, got {m}", 2 * nk)));
    }
    let mbar = m - nk;
    for _ in 0..RANK_RETRIES {
        let bbar = ZqMatrix::uniform(q, n, mbar, rng);
        if linalg::rank_mod_prime(&bbar) < n {
            continue;
        }
        let s = IntMatrix::new(mbar, nk, (0..mbar * nk).map(|_| rng.random_range(0..=1)).collect())?;
        let g = gadget_matrix(n, q, nk)?;
        let right = g.sub(&bbar.mul_int_matrix(&s)?)?;
        return Ok((bbar.hconcat(&right)?, GTrapdoor::new(s, TrapdoorKind::Binary)?));
    }
    Err(Error::Param(format!("no full-rank matrix after {RANK_RETRIES} attempts; modulus {} too small", q.value())))
}

/// Uniform `A`, ternary `R` and `A' = -A·R`, so `(A | id·G + A')` has trapdoor `R` with tag `id`.
pub fn trapdoor_gen_ternary<R: Rng + ?Sized>(
    n: usize,
    m1: usize,
    q: Modulus,
    rng: &mut R,
) -> Result<(ZqMatrix, ZqMatrix, GTrapdoor)> {
    let m2 = n * q.bits();
    let a = ZqMatrix::uniform(q, n, m1, rng);
    let r = IntMatrix::new(m1, m2, (0..m1 * m2).map(|_| rng.random_range(-1..=1)).collect())?;
    let a_prime = a.mul_int_matrix(&r)?.neg();
    Ok((a, a_prime, GTrapdoor::new(r, TrapdoorKind::Ternary)?))
}

/// Samples `D_{Λ^⊥_u(gᵀ), s}` for `g = (1, 2, ..., 2^{k-1})` with Klein's
/// algorithm on the basis `2e_i - e_{i+1}` completed by the bits of `q`.
#[derive(Clone, Debug)]
pub struct GadgetSampler {
    q: Modulus,
    basis: Vec<Vec<i64>>,
    gs: Vec<Vec<f64>>,
    gs_sq: Vec<f64>,
    width: f64,
}

impl GadgetSampler {
    pub fn new(q: Modulus, smoothing: f64) -> Self {
        let k = q.bits();
        let qv = q.value();
        let basis: Vec<Vec<i64>> = (0..k)
            .map(|i| {
                if i + 1 < k {
                    let mut b = vec![0i64; k];
                    b[i] = 2;
                    b[i + 1] = -1;
                    b
                } else {
                    (0..k).map(|j| ((qv >> j) & 1) as i64).collect()
                }
            })
            .collect();
        let mut gs: Vec<Vec<f64>> = Vec::with_capacity(k);
        for b in &basis {
            let mut v: Vec<f64> = b.iter().map(|&x| x as f64).collect();
            for u in &gs {
                let uu: f64 = u.iter().map(|x| x * x).sum();
                let mu = v.iter().zip(u).map(|(a, b)| a * b).sum::<f64>() / uu;
                v.iter_mut().zip(u).for_each(|(a, b)| *a -= mu * b);
            }
            gs.push(v);
        }
        let gs_sq: Vec<f64> = gs.iter().map(|v| v.iter().map(|x| x * x).sum()).collect();
        let max_gs = gs_sq.iter().cloned().fold(0.0, f64::max).sqrt();
        Self { q, basis, gs, gs_sq, width: max_gs * smoothing }
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Integer vector `z` with `gᵀz = u (mod q)`.
    pub fn sample<R: Rng + ?Sized>(&self, u: u64, rng: &mut R) -> Vec<i64> {
        let k = self.basis.len();
        let t: Vec<i64> = (0..k).map(|j| ((u % self.q.value()) >> j & 1) as i64).collect();
        let mut center: Vec<f64> = t.iter().map(|&x| -(x as f64)).collect();
        let mut out = t;
        for i in (0..k).rev() {
            let coef = center.iter().zip(&self.gs[i]).map(|(a, b)| a * b).sum::<f64>() / self.gs_sq[i];
            let s = self.width / self.gs_sq[i].sqrt();
            let zi = sample_centered(s, coef, rng);
            if zi != 0 {
                for ((c, o), &b) in center.iter_mut().zip(out.iter_mut()).zip(&self.basis[i]) {
                    *c -= (zi * b) as f64;
                    *o += zi * b;
                }
            }
        }
        out
    }
}

/// Width needed to realise preimage sampling for a trapdoor of spectral norm `s1`
/// in total dimension `dim`: perturbation must absorb the gadget width through `R`
/// plus the rounding width.
pub fn required_width(q: Modulus, s1: f64, dim: usize) -> f64 {
    let c = smoothing_constant(dim);
    let rg = GadgetSampler::new(q, c).width();
    (rg * rg * (1.0 + s1 * s1) + c * c).sqrt()
}

/// The lower bound `c·sqrt(1 + s1²)` on usable widths.
pub fn width_floor(s1: f64, dim: usize) -> f64 {
    smoothing_constant(dim) * (1.0 + s1 * s1).sqrt()
}

/// Gaussian preimage sampler for `A_full = (A | tag·G + A')` where `A' = -A·R`.
///
/// The perturbation covariance factor depends only on the trapdoor and width, so
/// one instance serves every tag.
#[derive(Clone, Debug)]
pub struct PreimageSampler {
    a: ZqMatrix,
    a_prime: ZqMatrix,
    r: IntMatrix,
    width: f64,
    round_width: f64,
    factor: DMatrix<f64>,
    gadget: GadgetSampler,
}

impl PreimageSampler {
    pub fn new(a: ZqMatrix, a_prime: ZqMatrix, trapdoor: &GTrapdoor, width: f64) -> Result<Self> {
        let q = a.modulus();
        if a_prime.modulus() != q {
            return Err(Error::ModulusMismatch(q.value(), a_prime.modulus().value()));
        }
        let r = trapdoor.matrix().clone();
        let n = a.rows();
        let nk = n * q.bits();
        if a_prime.rows() != n || a_prime.cols() != nk || r.rows != a.cols() || r.cols != nk {
            return Err(Error::Dimension(format!(
                "A {}x{}, A' {}x{}, R {}x{} inconsistent",
                a.rows(),
                a.cols(),
                a_prime.rows(),
                a_prime.cols(),
                r.rows,
                r.cols
            )));
        }
        let dim = a.cols() + nk;
        let floor = width_floor(trapdoor.spectral_norm(), dim);
        if width < floor {
            return Err(Error::Width(format!("width {width:.3} below floor {floor:.3}")));
        }
        let c = smoothing_constant(dim);
        let gadget = GadgetSampler::new(q, c);
        let rg2 = gadget.width() * gadget.width();
        let mbar = a.cols();
        let m = DMatrix::<f64>::from_fn(dim, nk, |i, j| if i < mbar { r.get(i, j) as f64 } else if i - mbar == j { 1.0 } else { 0.0 });
        let mut cov = &m * m.transpose() * (-rg2);
        for i in 0..dim {
            cov[(i, i)] += width * width - c * c;
        }
        cov /= 2.0 * PI;
        let factor = nalgebra::Cholesky::new(cov)
            .ok_or_else(|| Error::Width(format!("width {width:.3} too small for this trapdoor")))?
            .l();
        Ok(Self { a, a_prime, r, width, round_width: c, factor, gadget })
    }

    /// Builds a sampler from a full matrix `(A | tag·G + A')` by splitting off `A'`.
    pub fn from_full(a_full: &ZqMatrix, trapdoor: &GTrapdoor, tag: u64, width: f64) -> Result<Self> {
        let q = a_full.modulus();
        let n = a_full.rows();
        let nk = n * q.bits();
        if a_full.cols() < nk {
            return Err(Error::Dimension(format!("{} columns cannot hold the gadget block", a_full.cols())));
        }
        let mbar = a_full.cols() - nk;
        let (left, right) = split_columns(a_full, mbar);
        let a_prime = right.sub(&gadget_matrix(n, q, nk)?.scale(tag))?;
        Self::new(left, a_prime, trapdoor, width)
    }

    pub fn modulus(&self) -> Modulus {
        self.a.modulus()
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.a.cols() + self.a_prime.cols()
    }

    /// `(A | tag·G + A')·v mod q`.
    pub fn syndrome(&self, tag: u64, v: &[i64]) -> Result<ZqVector> {
        let q = self.modulus();
        let mbar = self.a.cols();
        if v.len() != self.dim() {
            return Err(Error::Dimension(format!("vector length {} vs {}", v.len(), self.dim())));
        }
        let (v1, v2) = v.split_at(mbar);
        let left = self.a.mul_int(&IntVector(v1.to_vec()))?;
        let right = self.a_prime.mul_int(&IntVector(v2.to_vec()))?;
        let k = q.bits();
        let gv: Vec<u64> = v2
            .chunks(k)
            .map(|c| q.from_i128(c.iter().enumerate().map(|(b, &x)| (x as i128) << b).sum::<i128>()))
            .collect();
        let gv = ZqVector::from_u64(q, gv).scale(tag);
        left.add(&right)?.add(&gv)
    }

    /// Integer `v` with `(A | tag·G + A')·v = u (mod q)`, distributed close to `D_{Z^m, width}`.
    pub fn sample<R: Rng + ?Sized>(&self, tag: u64, u: &ZqVector, rng: &mut R) -> Result<IntVector> {
        let q = self.modulus();
        if u.modulus() != q {
            return Err(Error::ModulusMismatch(q.value(), u.modulus().value()));
        }
        if u.len() != self.a.rows() {
            return Err(Error::Dimension(format!("syndrome length {} vs {}", u.len(), self.a.rows())));
        }
        let tag_inv = q.inv(tag).map_err(|_| Error::NotInvertible(format!("tag {tag} mod {}", q.value())))?;
        let g = DVector::from_vec(standard_normals(self.dim(), rng));
        let y = &self.factor * g;
        let mut v: Vec<i64> = y.iter().map(|&c| sample_centered(self.round_width, c, rng)).collect();
        let target = u.sub(&self.syndrome(tag, &v)?)?.scale(tag_inv);
        let k = q.bits();
        let z: Vec<i64> = target.as_slice().iter().flat_map(|&t| self.gadget.sample(t, rng)).collect();
        let mbar = self.a.cols();
        let rz = self.r.mul_vec(&z)?;
        for (vi, d) in v[..mbar].iter_mut().zip(rz) {
            *vi += d as i64;
        }
        for (vi, zi) in v[mbar..].iter_mut().zip(&z) {
            *vi += zi;
        }
        debug_assert_eq!(z.len(), self.a.rows() * k);
        Ok(IntVector(v))
    }
}

fn split_columns(m: &ZqMatrix, at: usize) -> (ZqMatrix, ZqMatrix) {
    let q = m.modulus();
    let mut left = Vec::with_capacity(m.rows() * at);
    let mut right = Vec::with_capacity(m.rows() * (m.cols() - at));
    for r in 0..m.rows() {
        let row = m.row(r);
        left.extend_from_slice(&row[..at]);
        right.extend_from_slice(&row[at..]);
    }
    (
        ZqMatrix::from_rows(q, m.rows(), at, left).expect("sizes match"),
        ZqMatrix::from_rows(q, m.rows(), m.cols() - at, right).expect("sizes match"),
    )
}

/// One-shot preimage sampling for `(A | tag·G - A·R)·v = u`.
pub fn sample_d<R: Rng + ?Sized>(
    a_full: &ZqMatrix,
    trapdoor: &GTrapdoor,
    tag: u64,
    u: &ZqVector,
    width: f64,
    rng: &mut R,
) -> Result<IntVector> {
    PreimageSampler::from_full(a_full, trapdoor, tag, width)?.sample(tag, u, rng)
}

/// A square matrix whose columns are short vectors of `Λ^⊥(B)`, linearly
/// independent over the rationals.
pub fn sample_kernel_basis<R: Rng + ?Sized>(sampler: &PreimageSampler, rng: &mut R) -> Result<IntMatrix> {
    let m = sampler.dim();
    let zero = ZqVector::zero(sampler.modulus(), sampler.a.rows());
    let mut tracker = linalg::IndependenceTracker::new(m);
    let mut cols: Vec<Vec<i64>> = Vec::with_capacity(m);
    let budget = 4 * m * m;
    for _ in 0..budget {
        let v = sampler.sample(1, &zero, rng)?;
        if tracker.try_add(&v.0)? {
            cols.push(v.0);
            if cols.len() == m {
                let mut data = vec![0i64; m * m];
                for (c, col) in cols.iter().enumerate() {
                    for (r, &x) in col.iter().enumerate() {
                        data[r * m + c] = x;
                    }
                }
                return IntMatrix::new(m, m, data);
            }
        }
    }
    Err(Error::Budget(format!("fewer than {m} independent kernel vectors after {budget} draws")))
}
