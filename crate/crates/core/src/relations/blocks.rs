//! The signing and claiming relations as compiled statements.

use super::compiler::{Coef, Encoding, Relation, RelationBuilder, SegmentId};
use crate::error::{Error, Result};
use crate::lattice::{bin_decompose, BitVector, IntVector, Modulus, ParamSet, ZqMatrix, ZqVector};
use crate::zk::{QuadraticStatement, QuadraticWitness};

/// Segment names shared by the signing and claiming layouts.
pub mod seg {
    pub const Z: &str = "z";
    pub const X_BITS: &str = "x_bits";
    pub const Y_BITS: &str = "y_bits";
    pub const E: &str = "e";
    pub const R_BITS: &str = "r_bits";
    pub const E_C: &str = "e_c";
    pub const ID_BITS: &str = "id_bits";
    pub const ID: &str = "id";
    pub const V1: &str = "v1";
    pub const V2: &str = "v2";
    pub const GV: &str = "gv";
    pub const PROD: &str = "prod";
    pub const E_T: &str = "e_t";
}

/// Block names, in statement order.
pub mod block {
    pub const SIS: &str = "sis";
    pub const LWE_SAMPLE: &str = "lwe_sample";
    pub const ENC: &str = "enc";
    pub const LWE_SECRET: &str = "lwe_secret";
    pub const CERT: &str = "cert";
}

/// Public inputs of the signing relation.
#[derive(Clone, Copy, Debug)]
pub struct SignPublic<'a> {
    pub a: &'a ZqMatrix,
    pub a_prime: &'a ZqMatrix,
    pub d: &'a ZqMatrix,
    pub u: &'a ZqVector,
    pub b: &'a ZqMatrix,
    pub f: &'a ZqMatrix,
    /// Identity vector the ciphertext was formed under.
    pub v: &'a ZqVector,
    pub c: &'a ZqVector,
    pub m_mat: &'a ZqMatrix,
    pub t: &'a ZqVector,
}

/// Witness of the signing relation.
#[derive(Clone, Copy, Debug)]
pub struct SignSecrets<'a> {
    pub id: u64,
    pub z: &'a BitVector,
    pub x: &'a ZqVector,
    pub e: &'a IntVector,
    pub y: &'a ZqVector,
    pub v1: &'a IntVector,
    pub v2: &'a IntVector,
    pub r: &'a ZqVector,
    pub e_c: &'a IntVector,
    pub e_t: &'a IntVector,
}

#[derive(Clone, Copy, Debug)]
pub struct ClaimPublic<'a> {
    pub f: &'a ZqMatrix,
    pub m_mat: &'a ZqMatrix,
    pub t: &'a ZqVector,
}

#[derive(Clone, Copy, Debug)]
pub struct ClaimSecrets<'a> {
    pub z: &'a BitVector,
    pub x: &'a ZqVector,
    pub e_t: &'a IntVector,
}

/// Sizes of a compiled relation, independent of the instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationShape {
    pub n_vars: usize,
    pub n_rows: usize,
    pub n_triples: usize,
    pub bounds: Vec<(String, u128)>,
}

impl RelationShape {
    fn of(rel: &Relation) -> Self {
        Self { n_vars: rel.n_vars(), n_rows: rel.n_rows(), n_triples: rel.n_triples(), bounds: rel.q_bounds() }
    }
}

fn check_matrix(name: &str, m: &ZqMatrix, q: Modulus, rows: usize, cols: usize) -> Result<()> {
    if m.modulus() != q {
        return Err(Error::ModulusMismatch(q.value(), m.modulus().value()));
    }
    if (m.rows(), m.cols()) != (rows, cols) {
        return Err(Error::Dimension(format!("{name} is {}x{}, expected {rows}x{cols}", m.rows(), m.cols())));
    }
    Ok(())
}

fn check_vector(name: &str, v: &ZqVector, q: Modulus, len: usize) -> Result<()> {
    if v.modulus() != q {
        return Err(Error::ModulusMismatch(q.value(), v.modulus().value()));
    }
    if v.len() != len {
        return Err(Error::Dimension(format!("{name} has length {}, expected {len}", v.len())));
    }
    Ok(())
}

/// Range-encoding offset of the identifier: `id - 1 - β_id ∈ [-β_id, β_id]`
/// covers exactly `id ∈ [1, N]`.
fn id_offset(pp: &ParamSet) -> u64 {
    (pp.group_size - 1) / 2
}

/// `x ≡ F·z (mod q')` with `x` given by its bits.
pub fn build_sis_block(b: &mut RelationBuilder, f: &ZqMatrix, z: SegmentId, x_bits: SegmentId) -> Result<()> {
    let kp = f.modulus().bits();
    let qp = f.modulus().value();
    b.begin_block(block::SIS)?;
    for i in 0..f.rows() {
        let mut row = b.lifted_row(0);
        for (c, &v) in f.row(i).iter().enumerate() {
            row.add(z, c, v, Coef::Public);
        }
        row.add_binary(x_bits, i * kp, kp, qp - 1, Coef::Exact);
        b.push(row)?;
    }
    b.end_block()
}

/// `y ≡ Bᵀx + e (mod q')` with `y` given by the bits the certificate signs.
pub fn build_lwe_sample_block(b: &mut RelationBuilder, bmat: &ZqMatrix, x_bits: SegmentId, e: SegmentId, y_bits: SegmentId) -> Result<()> {
    let kp = bmat.modulus().bits();
    let qp = bmat.modulus().value();
    b.begin_block(block::LWE_SAMPLE)?;
    for j in 0..bmat.cols() {
        let mut row = b.lifted_row(0);
        for i in 0..bmat.rows() {
            row.add_binary(x_bits, i * kp, kp, bmat.get(i, j), Coef::Public);
        }
        row.add(e, j, 1, Coef::Exact);
        row.add_binary(y_bits, j * kp, kp, qp - 1, Coef::Exact);
        b.push(row)?;
    }
    b.end_block()
}

/// `c ≡ (Bᵀ; vᵀ)·r + e_c + (0; Δ·id) (mod q')`.
#[allow(clippy::too_many_arguments)]
pub fn build_enc_block(
    b: &mut RelationBuilder,
    bmat: &ZqMatrix,
    v: &ZqVector,
    c: &ZqVector,
    r_bits: SegmentId,
    e_c: SegmentId,
    id: SegmentId,
    delta: u64,
) -> Result<()> {
    let kp = bmat.modulus().bits();
    let m_b = bmat.cols();
    b.begin_block(block::ENC)?;
    for j in 0..=m_b {
        let mut row = b.lifted_row(c.get(j));
        for i in 0..bmat.rows() {
            let coef = if j < m_b { bmat.get(i, j) } else { v.get(i) };
            row.add_binary(r_bits, i * kp, kp, coef, Coef::Public);
        }
        row.add(e_c, j, 1, Coef::Exact);
        if j == m_b {
            row.add(id, 0, delta, Coef::Exact);
        }
        b.push(row)?;
    }
    b.end_block()
}

/// `t ≡ M·x + e_t (mod q')` through the shared bits of `x`.
pub fn build_lwe_secret_block(b: &mut RelationBuilder, m_mat: &ZqMatrix, t: &ZqVector, x_bits: SegmentId, e_t: SegmentId) -> Result<()> {
    let kp = m_mat.modulus().bits();
    b.begin_block(block::LWE_SECRET)?;
    for j in 0..m_mat.rows() {
        let mut row = b.lifted_row(t.get(j));
        for (i, &coef) in m_mat.row(j).iter().enumerate() {
            row.add_binary(x_bits, i * kp, kp, coef, Coef::Public);
        }
        row.add(e_t, j, 1, Coef::Exact);
        b.push(row)?;
    }
    b.end_block()
}

/// Segments the certificate block reads.
#[derive(Clone, Copy, Debug)]
pub struct CertSegments {
    pub id: SegmentId,
    pub id_bits: SegmentId,
    pub v1: SegmentId,
    pub v2: SegmentId,
    pub gv: SegmentId,
    pub prod: SegmentId,
    pub y_bits: SegmentId,
}

/// `[A | id·G + A']·(v1; v2) = u + D·bin(y) (mod q)` with `id·(G·v2)_j`
/// carried by product coordinates.
pub fn build_cert_block(
    b: &mut RelationBuilder,
    a: &ZqMatrix,
    a_prime: &ZqMatrix,
    d: &ZqMatrix,
    u: &ZqVector,
    s: CertSegments,
    id_offset: u64,
) -> Result<()> {
    let q = a.modulus();
    let k = q.bits();
    let n = a.rows();
    b.begin_block(block::CERT)?;
    let mut tie = b.native_row(1 + id_offset);
    tie.add(s.id, 0, 1, Coef::Exact).add(s.id_bits, 0, q.value() - 1, Coef::Exact);
    b.push(tie)?;
    for j in 0..n {
        let mut row = b.native_row(0);
        row.add(s.gv, j, 1, Coef::Exact).add_binary(s.v2, j * k, k, q.value() - 1, Coef::Exact);
        b.push(row)?;
    }
    for j in 0..n {
        let mut row = b.native_row(u.get(j));
        for (c, &v) in a.row(j).iter().enumerate() {
            row.add(s.v1, c, v, Coef::Exact);
        }
        for (c, &v) in a_prime.row(j).iter().enumerate() {
            row.add(s.v2, c, v, Coef::Exact);
        }
        row.add(s.prod, j, 1, Coef::Exact);
        for (c, &v) in d.row(j).iter().enumerate() {
            row.add(s.y_bits, c, q.neg(v), Coef::Exact);
        }
        b.push(row)?;
    }
    b.end_block()?;
    for j in 0..n {
        b.product((s.prod, j), (s.id, 0), (s.gv, j))?;
    }
    Ok(())
}

/// Compiles the signing relation for the given public inputs.
pub fn sign_relation(p: &SignPublic<'_>, pp: &ParamSet) -> Result<Relation> {
    let (q, qp) = (pp.q, pp.q_prime);
    let (n, kp, m_b) = (pp.n, qp.bits(), pp.m_b);
    check_matrix("A", p.a, q, n, pp.m_1)?;
    check_matrix("A'", p.a_prime, q, n, pp.m_2)?;
    check_matrix("D", p.d, q, n, m_b * kp)?;
    check_vector("u", p.u, q, n)?;
    check_matrix("B", p.b, qp, n, m_b)?;
    check_matrix("F", p.f, qp, n, pp.m_f)?;
    check_vector("v", p.v, qp, n)?;
    check_vector("c", p.c, qp, m_b + 1)?;
    check_matrix("M", p.m_mat, qp, pp.m_m, n)?;
    check_vector("t", p.t, qp, pp.m_m)?;

    let mut b = RelationBuilder::new(q, qp);
    let z = b.segment(seg::Z, pp.m_f, Encoding::Bits);
    let x_bits = b.segment(seg::X_BITS, n * kp, Encoding::Bits);
    let y_bits = b.segment(seg::Y_BITS, m_b * kp, Encoding::Bits);
    let e = b.segment(seg::E, m_b, Encoding::Range(pp.b_lwe));
    let r_bits = b.segment(seg::R_BITS, n * kp, Encoding::Bits);
    let e_c = b.segment(seg::E_C, m_b + 1, Encoding::Range(pp.b_gpv));
    let id_bits = b.segment(seg::ID_BITS, 1, Encoding::Range(id_offset(pp)));
    let id = b.segment(seg::ID, 1, Encoding::Free(pp.group_size));
    let v1 = b.segment(seg::V1, pp.m_1, Encoding::Range(pp.beta_1));
    let v2 = b.segment(seg::V2, pp.m_2, Encoding::Range(pp.beta_2));
    let gv = b.segment(seg::GV, n, Encoding::Free(q.value() - 1));
    let prod = b.segment(seg::PROD, n, Encoding::Free(q.value() - 1));
    let e_t = b.segment(seg::E_T, pp.m_m, Encoding::Range(pp.b_lwe));

    build_sis_block(&mut b, p.f, z, x_bits)?;
    build_lwe_sample_block(&mut b, p.b, x_bits, e, y_bits)?;
    build_enc_block(&mut b, p.b, p.v, p.c, r_bits, e_c, id, pp.delta())?;
    build_lwe_secret_block(&mut b, p.m_mat, p.t, x_bits, e_t)?;
    build_cert_block(&mut b, p.a, p.a_prime, p.d, p.u, CertSegments { id, id_bits, v1, v2, gv, prod, y_bits }, id_offset(pp))?;
    b.finish()
}

pub fn assemble_sign_statement(p: &SignPublic<'_>, pp: &ParamSet) -> Result<(QuadraticStatement, Relation)> {
    let rel = sign_relation(p, pp)?;
    Ok((rel.statement()?, rel))
}

fn bits_of(v: &ZqVector) -> Vec<i64> {
    bin_decompose(v).to_i64()
}

pub fn assemble_sign_witness(rel: &Relation, s: &SignSecrets<'_>, pp: &ParamSet) -> Result<QuadraticWitness> {
    let q = pp.q;
    if s.id == 0 || s.id > pp.group_size {
        return Err(Error::Witness(format!("identifier {} outside [1, {}]", s.id, pp.group_size)));
    }
    for (name, v, m) in [("x", s.x, pp.q_prime), ("y", s.y, pp.q_prime), ("r", s.r, pp.q_prime)] {
        if v.modulus() != m {
            return Err(Error::Witness(format!("{name} is not over q'")));
        }
    }
    let k = q.bits();
    if s.v2.len() != pp.m_2 {
        return Err(Error::Witness(format!("v2 has length {}, expected {}", s.v2.len(), pp.m_2)));
    }
    let gv: Vec<u64> = (0..pp.n)
        .map(|j| {
            let acc: i128 = (0..k).map(|b| (s.v2.0[j * k + b] as i128) << b).sum();
            q.from_i128(acc)
        })
        .collect();
    let prod: Vec<i64> = gv.iter().map(|&g| q.mul(g, s.id) as i64).collect();
    let l = rel.layout();
    let mut asg = rel.assignment();
    asg.set(l.id(seg::Z)?, s.z.to_i64())
        .set(l.id(seg::X_BITS)?, bits_of(s.x))
        .set(l.id(seg::Y_BITS)?, bits_of(s.y))
        .set(l.id(seg::E)?, s.e.0.clone())
        .set(l.id(seg::R_BITS)?, bits_of(s.r))
        .set(l.id(seg::E_C)?, s.e_c.0.clone())
        .set(l.id(seg::ID_BITS)?, vec![s.id as i64 - 1 - id_offset(pp) as i64])
        .set(l.id(seg::ID)?, vec![s.id as i64])
        .set(l.id(seg::V1)?, s.v1.0.clone())
        .set(l.id(seg::V2)?, s.v2.0.clone())
        .set(l.id(seg::GV)?, gv.iter().map(|&g| g as i64).collect())
        .set(l.id(seg::PROD)?, prod)
        .set(l.id(seg::E_T)?, s.e_t.0.clone());
    rel.witness(&asg)
}

pub fn claim_relation(p: &ClaimPublic<'_>, pp: &ParamSet) -> Result<Relation> {
    let (q, qp) = (pp.q, pp.q_prime);
    let (n, kp) = (pp.n, qp.bits());
    check_matrix("F", p.f, qp, n, pp.m_f)?;
    check_matrix("M", p.m_mat, qp, pp.m_m, n)?;
    check_vector("t", p.t, qp, pp.m_m)?;
    let mut b = RelationBuilder::new(q, qp);
    let z = b.segment(seg::Z, pp.m_f, Encoding::Bits);
    let x_bits = b.segment(seg::X_BITS, n * kp, Encoding::Bits);
    let e_t = b.segment(seg::E_T, pp.m_m, Encoding::Range(pp.b_lwe));
    build_sis_block(&mut b, p.f, z, x_bits)?;
    build_lwe_secret_block(&mut b, p.m_mat, p.t, x_bits, e_t)?;
    b.finish()
}

pub fn assemble_claim_statement(p: &ClaimPublic<'_>, pp: &ParamSet) -> Result<(QuadraticStatement, Relation)> {
    let rel = claim_relation(p, pp)?;
    Ok((rel.statement()?, rel))
}

pub fn assemble_claim_witness(rel: &Relation, s: &ClaimSecrets<'_>) -> Result<QuadraticWitness> {
    let l = rel.layout();
    let mut asg = rel.assignment();
    asg.set(l.id(seg::Z)?, s.z.to_i64()).set(l.id(seg::X_BITS)?, bits_of(s.x)).set(l.id(seg::E_T)?, s.e_t.0.clone());
    rel.witness(&asg)
}

/// Shape of the signing relation, compiled against all-zero public inputs.
pub fn sign_shape(pp: &ParamSet) -> Result<RelationShape> {
    let (q, qp) = (pp.q, pp.q_prime);
    let (n, m_b) = (pp.n, pp.m_b);
    let a = ZqMatrix::zero(q, n, pp.m_1);
    let a_prime = ZqMatrix::zero(q, n, pp.m_2);
    let d = ZqMatrix::zero(q, n, m_b * qp.bits());
    let u = ZqVector::zero(q, n);
    let bm = ZqMatrix::zero(qp, n, m_b);
    let f = ZqMatrix::zero(qp, n, pp.m_f);
    let v = ZqVector::zero(qp, n);
    let c = ZqVector::zero(qp, m_b + 1);
    let m_mat = ZqMatrix::zero(qp, pp.m_m, n);
    let t = ZqVector::zero(qp, pp.m_m);
    let p = SignPublic { a: &a, a_prime: &a_prime, d: &d, u: &u, b: &bm, f: &f, v: &v, c: &c, m_mat: &m_mat, t: &t };
    Ok(RelationShape::of(&sign_relation(&p, pp)?))
}

pub fn claim_shape(pp: &ParamSet) -> Result<RelationShape> {
    let qp = pp.q_prime;
    let f = ZqMatrix::zero(qp, pp.n, pp.m_f);
    let m_mat = ZqMatrix::zero(qp, pp.m_m, pp.n);
    let t = ZqVector::zero(qp, pp.m_m);
    Ok(RelationShape::of(&claim_relation(&ClaimPublic { f: &f, m_mat: &m_mat, t: &t }, pp)?))
}

/// Argument-system requirement `16p · max(l1 + l2 + n', l1 + l2 + |S|) · (σ2 + pσ1) · √l1 · log l1`.
fn argument_bound(pp: &ParamSet, shape: &RelationShape) -> u128 {
    let base = (pp.l1 + pp.l2) as f64;
    let width = (base + shape.n_vars as f64).max(base + shape.n_triples as f64);
    let l1 = pp.l1 as f64;
    let p = pp.p as f64;
    (16.0 * p * width * (pp.sigma_2 + p * pp.sigma_1) * l1.sqrt() * l1.log2()).ceil() as u128
}

/// Every lower bound on `q`: compiled block bounds of both relations, the
/// closed-form block bounds, the argument-system bound and `N`.
pub fn q_lower_bounds(pp: &ParamSet) -> Result<Vec<(String, u128)>> {
    let sign = sign_shape(pp)?;
    let claim = claim_shape(pp)?;
    let qp = pp.q_prime.value() as u128;
    let mut out: Vec<(String, u128)> = Vec::new();
    out.extend(sign.bounds.iter().map(|(name, b)| (format!("sign {name} block"), *b)));
    out.extend(claim.bounds.iter().map(|(name, b)| (format!("claim {name} block"), *b)));
    out.push(("sis closed form q'(m_F + 1)".into(), qp * (pp.m_f as u128 + 1)));
    out.push(("lwe closed form q' + q'^2 + 2 B_lwe".into(), qp + qp * qp + 2 * pp.b_lwe as u128));
    let enc = qp as f64 * (1.0 + pp.n as f64 * qp as f64 / 2.0 + pp.b_gpv as f64 + pp.group_size as f64) / 2.0;
    out.push(("enc closed form q'(1 + n q'/2 + B_gpv + N)/2".into(), enc.ceil() as u128));
    out.push(("sign argument".into(), argument_bound(pp, &sign)));
    out.push(("claim argument".into(), argument_bound(pp, &claim)));
    out.push(("group size N".into(), pp.group_size as u128));
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::lattice::{IntVector, ZqMatrix};
    use crate::zk::witness_check;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;
    use std::sync::OnceLock;

    pub(crate) fn desk() -> &'static ParamSet {
        static PP: OnceLock<ParamSet> = OnceLock::new();
        PP.get_or_init(|| ParamSet::desk().unwrap())
    }

    fn small() -> &'static ParamSet {
        static PP: OnceLock<ParamSet> = OnceLock::new();
        PP.get_or_init(|| ParamSet::setup(4, 3).unwrap())
    }

    /// A consistent instance built forwards from random secrets.
    #[derive(Clone)]
    struct Plant {
        a: ZqMatrix,
        a_prime: ZqMatrix,
        d: ZqMatrix,
        u: ZqVector,
        b: ZqMatrix,
        f: ZqMatrix,
        v: ZqVector,
        c: ZqVector,
        m_mat: ZqMatrix,
        t: ZqVector,
        id: u64,
        z: BitVector,
        x: ZqVector,
        e: IntVector,
        y: ZqVector,
        v1: IntVector,
        v2: IntVector,
        r: ZqVector,
        e_c: IntVector,
        e_t: IntVector,
    }

    fn small_vec(len: usize, bound: u64, rng: &mut ChaCha20Rng) -> IntVector {
        let b = bound as i64;
        IntVector((0..len).map(|_| rng.random_range(-b..=b)).collect())
    }

    fn encrypt(pp: &ParamSet, b: &ZqMatrix, v: &ZqVector, r: &ZqVector, e_c: &IntVector, id: u64) -> ZqVector {
        let qp = pp.q_prime;
        let mut c = b.transpose().mul_vec(r).unwrap().concat(&ZqVector::from_u64(qp, vec![v.dot(r).unwrap()])).unwrap();
        c = c.add(&ZqVector::from_i64(qp, &e_c.0)).unwrap();
        let last = c.len() - 1;
        c.set(last, qp.add(c.get(last), qp.mul(pp.delta(), id)));
        c
    }

    fn plant(pp: &ParamSet, id: u64, rng: &mut ChaCha20Rng) -> Plant {
        let (q, qp, n) = (pp.q, pp.q_prime, pp.n);
        let k = q.bits();
        let b = ZqMatrix::uniform(qp, n, pp.m_b, rng);
        let f = ZqMatrix::uniform(qp, n, pp.m_f, rng);
        let z = BitVector::new((0..pp.m_f).map(|_| rng.random_range(0..=1)).collect()).unwrap();
        let x = f.mul_vec(&ZqVector::from_i64(qp, &z.to_i64())).unwrap();
        let e = small_vec(pp.m_b, pp.b_lwe, rng);
        let y = b.transpose().mul_vec(&x).unwrap().add(&ZqVector::from_i64(qp, &e.0)).unwrap();
        let a = ZqMatrix::uniform(q, n, pp.m_1, rng);
        let a_prime = ZqMatrix::uniform(q, n, pp.m_2, rng);
        let d = ZqMatrix::uniform(q, n, pp.m_b * qp.bits(), rng);
        let v1 = small_vec(pp.m_1, pp.beta_1, rng);
        let v2 = small_vec(pp.m_2, pp.beta_2, rng);
        let mut lhs = a.mul_int(&v1).unwrap().add(&a_prime.mul_int(&v2).unwrap()).unwrap();
        for j in 0..n {
            let gv: i128 = (0..k).map(|b| (v2.0[j * k + b] as i128) << b).sum();
            lhs.set(j, q.add(lhs.get(j), q.mul(q.from_i128(gv), id)));
        }
        let ybits = ZqVector::from_i64(q, &bin_decompose(&y).to_i64());
        let u = lhs.sub(&d.mul_vec(&ybits).unwrap()).unwrap();
        let v = ZqVector::uniform(qp, n, rng);
        let r = ZqVector::uniform(qp, n, rng);
        let e_c = small_vec(pp.m_b + 1, 12, rng);
        let c = encrypt(pp, &b, &v, &r, &e_c, id);
        let m_mat = ZqMatrix::uniform(qp, pp.m_m, n, rng);
        let e_t = small_vec(pp.m_m, pp.b_lwe, rng);
        let t = m_mat.mul_vec(&x).unwrap().add(&ZqVector::from_i64(qp, &e_t.0)).unwrap();
        Plant { a, a_prime, d, u, b, f, v, c, m_mat, t, id, z, x, e, y, v1, v2, r, e_c, e_t }
    }

    impl Plant {
        fn public(&self) -> SignPublic<'_> {
            SignPublic {
                a: &self.a,
                a_prime: &self.a_prime,
                d: &self.d,
                u: &self.u,
                b: &self.b,
                f: &self.f,
                v: &self.v,
                c: &self.c,
                m_mat: &self.m_mat,
                t: &self.t,
            }
        }

        fn secrets(&self) -> SignSecrets<'_> {
            SignSecrets {
                id: self.id,
                z: &self.z,
                x: &self.x,
                e: &self.e,
                y: &self.y,
                v1: &self.v1,
                v2: &self.v2,
                r: &self.r,
                e_c: &self.e_c,
                e_t: &self.e_t,
            }
        }

        fn claim_public(&self) -> ClaimPublic<'_> {
            ClaimPublic { f: &self.f, m_mat: &self.m_mat, t: &self.t }
        }

        fn claim_secrets(&self) -> ClaimSecrets<'_> {
            ClaimSecrets { z: &self.z, x: &self.x, e_t: &self.e_t }
        }
    }

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    fn flip(w: &mut QuadraticWitness, coord: usize) {
        let v = w.0.get(coord);
        w.0.set(coord, 1 - v);
    }

    #[test]
    fn desk_sign_witness_passes_and_bookkeeping_adds_up() {
        let pp = desk();
        let p = plant(pp, 3, &mut rng(1));
        let (stmt, rel) = assemble_sign_statement(&p.public(), pp).unwrap();
        let wit = assemble_sign_witness(&rel, &p.secrets(), pp).unwrap();
        assert!(witness_check(&stmt, &wit).unwrap());
        let segs = rel.layout().segments();
        assert_eq!(segs.iter().map(|s| s.coords().len()).sum::<usize>(), stmt.n_vars());
        assert!(segs.windows(2).all(|w| w[0].coords().end == w[1].offset));
        assert_eq!(stmt.n_rows(), pp.n + pp.m_b + (pp.m_b + 1) + pp.m_m + 1 + 2 * pp.n);
        assert_eq!(sign_shape(pp).unwrap().n_vars, stmt.n_vars());
        assert_eq!(sign_shape(pp).unwrap().n_triples, stmt.triples().len());
        let (again, _) = assemble_sign_statement(&p.public(), pp).unwrap();
        assert_eq!(stmt.fingerprint(), again.fingerprint());
    }

    #[test]
    fn shared_segments_are_referenced_by_every_user() {
        let pp = small();
        let p = plant(pp, 1, &mut rng(2));
        let rel = sign_relation(&p.public(), pp).unwrap();
        let l = rel.layout();
        let uses = |name: &str| rel.block(name).unwrap().uses.clone();
        let x = l.id(seg::X_BITS).unwrap();
        for b in [block::SIS, block::LWE_SAMPLE, block::LWE_SECRET] {
            assert!(uses(b).contains(&x), "{b}");
        }
        let y = l.id(seg::Y_BITS).unwrap();
        assert!(uses(block::LWE_SAMPLE).contains(&y) && uses(block::CERT).contains(&y));
        let id = l.id(seg::ID).unwrap();
        assert!(uses(block::ENC).contains(&id) && uses(block::CERT).contains(&id));
    }

    #[test]
    fn flipping_an_x_bit_breaks_both_sis_and_tag_blocks() {
        let pp = small();
        let p = plant(pp, 2, &mut rng(3));
        let (stmt, rel) = assemble_sign_statement(&p.public(), pp).unwrap();
        let wit = assemble_sign_witness(&rel, &p.secrets(), pp).unwrap();
        let xs = rel.layout().get(rel.layout().id(seg::X_BITS).unwrap()).coords();
        for coord in xs.step_by(5) {
            let mut bad = wit.clone();
            flip(&mut bad, coord);
            let v = rel.violated_blocks(&stmt, &bad).unwrap();
            assert!(v.contains(&block::SIS.to_string()) && v.contains(&block::LWE_SECRET.to_string()), "{v:?}");
        }
        let (cstmt, crel) = assemble_claim_statement(&p.claim_public(), pp).unwrap();
        let cwit = assemble_claim_witness(&crel, &p.claim_secrets()).unwrap();
        let mut bad = cwit.clone();
        flip(&mut bad, crel.layout().get(crel.layout().id(seg::X_BITS).unwrap()).offset);
        assert_eq!(crel.violated_blocks(&cstmt, &bad).unwrap(), vec![block::SIS.to_string(), block::LWE_SECRET.to_string()]);
    }

    #[test]
    fn flipping_a_y_bit_breaks_sample_and_certificate() {
        let pp = small();
        let p = plant(pp, 2, &mut rng(4));
        let (stmt, rel) = assemble_sign_statement(&p.public(), pp).unwrap();
        let wit = assemble_sign_witness(&rel, &p.secrets(), pp).unwrap();
        let mut bad = wit.clone();
        flip(&mut bad, rel.layout().get(rel.layout().id(seg::Y_BITS).unwrap()).offset + 3);
        let v = rel.violated_blocks(&stmt, &bad).unwrap();
        assert!(v.contains(&block::LWE_SAMPLE.to_string()) && v.contains(&block::CERT.to_string()), "{v:?}");
    }

    #[test]
    fn certificate_under_another_identifier_fails() {
        let pp = small();
        let p = plant(pp, 1, &mut rng(5));
        // ciphertext for id + 1, certificate issued for id
        let mut q = p.clone();
        q.id = 2;
        q.c = encrypt(pp, &p.b, &p.v, &p.r, &p.e_c, 2);
        let (stmt, rel) = assemble_sign_statement(&q.public(), pp).unwrap();
        let wit = assemble_sign_witness(&rel, &q.secrets(), pp).unwrap();
        assert!(!witness_check(&stmt, &wit).unwrap());
        assert_eq!(rel.violated_blocks(&stmt, &wit).unwrap(), vec![block::CERT.to_string()]);
    }

    #[test]
    fn ciphertext_of_another_identifier_is_rejected_at_assembly() {
        let pp = small();
        let mut p = plant(pp, 2, &mut rng(6));
        p.c = encrypt(pp, &p.b, &p.v, &p.r, &p.e_c, 3);
        let rel = sign_relation(&p.public(), pp).unwrap();
        let err = assemble_sign_witness(&rel, &p.secrets(), pp).unwrap_err().to_string();
        assert!(err.contains("block enc"), "{err}");
    }

    #[test]
    fn out_of_range_noise_names_its_segment() {
        let pp = small();
        let mut p = plant(pp, 1, &mut rng(7));
        p.e.0[0] = pp.b_lwe as i64 + 1;
        let rel = sign_relation(&p.public(), pp).unwrap();
        let err = assemble_sign_witness(&rel, &p.secrets(), pp).unwrap_err().to_string();
        assert!(err.contains("segment e "), "{err}");
        p.id = 0;
        assert!(assemble_sign_witness(&rel, &p.secrets(), pp).is_err());
    }

    #[test]
    fn zero_secrets_and_degenerate_instances() {
        let pp = small();
        let p = plant(pp, 1, &mut rng(8));
        // z = 0 forces x = 0, so t = e_t
        let z = BitVector::new(vec![0; pp.m_f]).unwrap();
        let x = ZqVector::zero(pp.q_prime, pp.n);
        let e_t = small_vec(pp.m_m, pp.b_lwe, &mut rng(9));
        let t = ZqVector::from_i64(pp.q_prime, &e_t.0);
        let cp = ClaimPublic { f: &p.f, m_mat: &p.m_mat, t: &t };
        let (stmt, rel) = assemble_claim_statement(&cp, pp).unwrap();
        let wit = assemble_claim_witness(&rel, &ClaimSecrets { z: &z, x: &x, e_t: &e_t }).unwrap();
        assert!(witness_check(&stmt, &wit).unwrap());
        let zero_t = IntVector::zero(pp.m_m);
        let t0 = ZqVector::zero(pp.q_prime, pp.m_m);
        let cp = ClaimPublic { f: &p.f, m_mat: &p.m_mat, t: &t0 };
        let (stmt, rel) = assemble_claim_statement(&cp, pp).unwrap();
        let wit = assemble_claim_witness(&rel, &ClaimSecrets { z: &z, x: &x, e_t: &zero_t }).unwrap();
        assert!(witness_check(&stmt, &wit).unwrap());
    }

    #[test]
    fn another_members_secret_fails_the_claim() {
        let pp = small();
        let p1 = plant(pp, 1, &mut rng(10));
        let mut p2 = plant(pp, 2, &mut rng(11));
        p2.f = p1.f.clone();
        p2.x = p1.f.mul_vec(&ZqVector::from_i64(pp.q_prime, &p2.z.to_i64())).unwrap();
        let rel = claim_relation(&p1.claim_public(), pp).unwrap();
        // right z, wrong x: the one-way block fails
        let s = ClaimSecrets { z: &p2.z, x: &p1.x, e_t: &p1.e_t };
        assert!(assemble_claim_witness(&rel, &s).unwrap_err().to_string().contains("block sis"));
        // consistent (z, x) of another member: the tag residue is not short
        let e_t: Vec<i64> = p1.t.sub(&p1.m_mat.mul_vec(&p2.x).unwrap()).unwrap().centered().0;
        let s = ClaimSecrets { z: &p2.z, x: &p2.x, e_t: &IntVector(e_t) };
        assert!(assemble_claim_witness(&rel, &s).unwrap_err().to_string().contains("segment e_t"));
    }

    #[test]
    fn planted_instances_pass_and_single_corruptions_fail() {
        let pp = small();
        let mut r = rng(12);
        for trial in 0..100u64 {
            let p = plant(pp, 1 + trial % pp.group_size, &mut r);
            let (stmt, rel) = assemble_sign_statement(&p.public(), pp).unwrap();
            let wit = assemble_sign_witness(&rel, &p.secrets(), pp).unwrap();
            assert!(witness_check(&stmt, &wit).unwrap());
            let (cstmt, crel) = assemble_claim_statement(&p.claim_public(), pp).unwrap();
            let cwit = assemble_claim_witness(&crel, &p.claim_secrets()).unwrap();
            assert!(witness_check(&cstmt, &cwit).unwrap());
            // one corruption per block, on a coordinate that block reads
            for b in rel.blocks() {
                let s = rel.layout().get(b.uses[r.random_range(0..b.uses.len())]);
                let coords = s.coords();
                if coords.is_empty() {
                    continue;
                }
                let coord = r.random_range(coords);
                let mut bad = wit.clone();
                let q = pp.q;
                bad.0.set(coord, q.add(bad.0.get(coord), r.random_range(1..q.value())));
                assert!(!witness_check(&stmt, &bad).unwrap(), "block {} segment {}", b.name, s.name);
            }
        }
    }

    #[test]
    fn lower_bounds_cover_both_relations() {
        let pp = desk();
        let bounds = q_lower_bounds(pp).unwrap();
        assert!(!bounds.is_empty());
        assert!(bounds.iter().all(|(_, b)| *b < pp.q.value() as u128));
        for name in ["sign sis block", "sign enc block", "claim lwe_secret block", "sign argument", "group size N"] {
            assert!(bounds.iter().any(|(n, _)| n == name), "{name}");
        }
    }
}
