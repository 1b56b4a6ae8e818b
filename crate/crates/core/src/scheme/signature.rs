//! Group signatures: signing, verification, opening, tracing and claims.

use super::join::UserSecret;
use super::keys::{sample_lwe_noise, GroupPublicKey, OpenerKey};
use super::registry::Certificate;
use crate::commit::BdlopCrs;
use crate::encoding::{tag, Decode, Encode, Reader, Sink};
use crate::error::{Error, Result};
use crate::ibe::{ibe_decrypt, ibe_encrypt, identity_vector, IbeCiphertext};
use crate::lattice::{IntVector, ZqMatrix, ZqVector};
use crate::oracles::{fingerprint, ro_zq_matrix, OracleTag};
use crate::relations::{
    assemble_claim_statement, assemble_claim_witness, assemble_sign_statement, assemble_sign_witness, ClaimPublic, ClaimSecrets,
    SignPublic, SignSecrets,
};
use crate::sigs::{ots_keygen, ots_sign, ots_verify, OtsPublicKey, OtsSignature};
use crate::zk::{nizk_prove, nizk_verify, witness_check, NizkProof, OraclePair, QuadraticStatement, SokContext};
use rand::Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSignature {
    pub rho: [u8; 32],
    pub c: IbeCiphertext,
    pub t: ZqVector,
    pub pi: NizkProof,
    pub vk: OtsPublicKey,
    pub sig: OtsSignature,
}

/// The part of a signature covered by the one-time signature.
struct SignedPart<'a> {
    rho: &'a [u8; 32],
    c: &'a IbeCiphertext,
    t: &'a ZqVector,
    pi: &'a NizkProof,
}

impl Encode for SignedPart<'_> {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put(self.rho);
        self.c.encode(s);
        s.put_zq_vector(self.t);
        self.pi.encode(s);
    }
}

fn signed_digest(rho: &[u8; 32], c: &IbeCiphertext, t: &ZqVector, pi: &NizkProof) -> [u8; 32] {
    fingerprint(b"OTS-PAYLOAD", &SignedPart { rho, c, t, pi })
}

/// Public matrix of the tracing sample, derived from the signature's nonce.
pub fn tracing_matrix(gpk: &GroupPublicKey, rho: &[u8; 32]) -> ZqMatrix {
    let pp = &gpk.pp;
    ro_zq_matrix(OracleTag::Lwe, rho, pp.m_m, pp.n, pp.q_prime)
}

fn context(msg: &[u8], rho: &[u8; 32]) -> SokContext {
    SokContext { message: msg.to_vec(), extra: rho.to_vec() }
}

fn sign_statement(gpk: &GroupPublicKey, rho: &[u8; 32], c: &IbeCiphertext, t: &ZqVector, vk: &OtsPublicKey) -> Result<(QuadraticStatement, crate::relations::Relation)> {
    let v = identity_vector(&vk.0, &gpk.pp);
    let m_mat = tracing_matrix(gpk, rho);
    let public = SignPublic {
        a: &gpk.cert_vk.a,
        a_prime: &gpk.cert_vk.a_prime,
        d: &gpk.cert_vk.d,
        u: &gpk.cert_vk.u,
        b: &gpk.b,
        f: &gpk.f,
        v: &v,
        c: &c.0,
        m_mat: &m_mat,
        t,
    };
    assemble_sign_statement(&public, &gpk.pp)
}

pub fn sign<R: Rng + ?Sized>(gpk: &GroupPublicKey, usk: &UserSecret, cert: &Certificate, msg: &[u8], rng: &mut R) -> Result<GroupSignature> {
    let pp = &gpk.pp;
    let x = usk.trapdoor_vector(gpk)?;
    if cert.y.modulus() != pp.q_prime || cert.y.len() != pp.m_b {
        return Err(Error::Witness("certificate sample has the wrong shape".into()));
    }
    let e = cert.y.sub(&gpk.b.transpose().mul_vec(&x)?)?.centered();
    if e.inf_norm() > pp.b_lwe {
        return Err(Error::Witness("certificate was not issued for this secret".into()));
    }
    let mut ots = ots_keygen(rng);
    let (c, coins) = ibe_encrypt(&gpk.b, &ots.vk.0, cert.id, pp, rng)?;
    let rho: [u8; 32] = rng.random();
    let m_mat = tracing_matrix(gpk, &rho);
    let e_t = sample_lwe_noise(pp.m_m, pp, rng)?;
    let t = m_mat.mul_vec(&x)?.add(&ZqVector::from_i64(pp.q_prime, &e_t.0))?;

    let (stmt, rel) = sign_statement(gpk, &rho, &c, &t, &ots.vk)?;
    let secrets = SignSecrets {
        id: cert.id,
        z: &usk.z,
        x: &x,
        e: &e,
        y: &cert.y,
        v1: &cert.v1,
        v2: &cert.v2,
        r: &coins.r,
        e_c: &coins.e_c,
        e_t: &e_t,
    };
    let wit = assemble_sign_witness(&rel, &secrets, pp).map_err(|e| Error::Witness(e.to_string()))?;
    if !witness_check(&stmt, &wit)? {
        let broken = rel.violated_blocks(&stmt, &wit)?.join(", ");
        return Err(Error::Witness(format!("signing witness violates {broken}")));
    }
    let pi = nizk_prove(gpk.sign_crs()?, &stmt, &wit, &context(msg, &rho), OraclePair::SIGN, pp.kappa, rng)?;
    let sig = ots_sign(&mut ots.sk, &signed_digest(&rho, &c, &t, &pi))?;
    Ok(GroupSignature { rho, c, t, pi, vk: ots.vk, sig })
}

pub fn verify(gpk: &GroupPublicKey, msg: &[u8], sigma: &GroupSignature) -> bool {
    if !ots_verify(&sigma.vk, &signed_digest(&sigma.rho, &sigma.c, &sigma.t, &sigma.pi), &sigma.sig) {
        return false;
    }
    let Ok(crs) = gpk.sign_crs() else {
        return false;
    };
    match sign_statement(gpk, &sigma.rho, &sigma.c, &sigma.t, &sigma.vk) {
        Ok((stmt, _)) => nizk_verify(crs, &stmt, &sigma.pi, &context(msg, &sigma.rho), OraclePair::SIGN, gpk.pp.kappa),
        Err(_) => false,
    }
}

/// The signer's identifier, or `None` when the signature is invalid or the
/// ciphertext does not decrypt to a value in `0..=N`.
pub fn open(gpk: &GroupPublicKey, osk: &OpenerKey, msg: &[u8], sigma: &GroupSignature) -> Option<u64> {
    if !verify(gpk, msg, sigma) {
        return None;
    }
    let key = osk.extractor(gpk).ok()?.extract(&sigma.vk.0, &gpk.pp).ok()?;
    ibe_decrypt(&sigma.c, &key, &gpk.pp)
}

/// A member's tracing trapdoor `x = F·z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TracingTrapdoor {
    pub x: ZqVector,
}

impl Encode for TracingTrapdoor {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u8(tag::TRACING_TRAPDOOR);
        s.put_zq_vector(&self.x);
    }
}

impl Decode for TracingTrapdoor {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.expect_tag(tag::TRACING_TRAPDOOR)?;
        Ok(Self { x: r.zq_vector()? })
    }
}

/// `t - M·x`, centered.
pub fn tracing_residual(gpk: &GroupPublicKey, x: &ZqVector, sigma: &GroupSignature) -> Option<IntVector> {
    let pp = &gpk.pp;
    if x.modulus() != pp.q_prime || x.len() != pp.n || sigma.t.modulus() != pp.q_prime || sigma.t.len() != pp.m_m {
        return None;
    }
    let mx = tracing_matrix(gpk, &sigma.rho).mul_vec(x).ok()?;
    Some(sigma.t.sub(&mx).ok()?.centered())
}

pub fn trace(gpk: &GroupPublicKey, trapdoor: &TracingTrapdoor, sigma: &GroupSignature) -> bool {
    tracing_residual(gpk, &trapdoor.x, sigma).is_some_and(|r| r.inf_norm() <= gpk.pp.b_lwe)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimProof {
    pub chi: NizkProof,
}

impl Encode for ClaimProof {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u8(tag::CLAIM);
        self.chi.encode(s);
    }
}

impl ClaimProof {
    pub fn decode_for(r: &mut Reader<'_>, gpk: &GroupPublicKey) -> Result<Self> {
        r.expect_tag(tag::CLAIM)?;
        Ok(Self { chi: NizkProof::decode(r, gpk.claim_crs()?)? })
    }

    pub fn from_bytes_for(bytes: &[u8], gpk: &GroupPublicKey) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let v = Self::decode_for(&mut r, gpk)?;
        r.finish()?;
        Ok(v)
    }
}

fn claim_statement(gpk: &GroupPublicKey, sigma: &GroupSignature) -> Result<(QuadraticStatement, crate::relations::Relation)> {
    let m_mat = tracing_matrix(gpk, &sigma.rho);
    assemble_claim_statement(&ClaimPublic { f: &gpk.f, m_mat: &m_mat, t: &sigma.t }, &gpk.pp)
}

/// A proof that `usk` produced `sigma`, or `None` when its tracing sample
/// does not belong to this member.
pub fn claim<R: Rng + ?Sized>(gpk: &GroupPublicKey, usk: &UserSecret, msg: &[u8], sigma: &GroupSignature, rng: &mut R) -> Result<Option<ClaimProof>> {
    let x = usk.trapdoor_vector(gpk)?;
    let Some(e_t) = tracing_residual(gpk, &x, sigma) else {
        return Ok(None);
    };
    if e_t.inf_norm() > gpk.pp.b_lwe {
        return Ok(None);
    }
    let (stmt, rel) = claim_statement(gpk, sigma)?;
    let wit = assemble_claim_witness(&rel, &ClaimSecrets { z: &usk.z, x: &x, e_t: &e_t })?;
    let chi = nizk_prove(gpk.claim_crs()?, &stmt, &wit, &context(msg, &sigma.rho), OraclePair::CLAIM, gpk.pp.kappa, rng)?;
    Ok(Some(ClaimProof { chi }))
}

pub fn claim_verify(gpk: &GroupPublicKey, msg: &[u8], sigma: &GroupSignature, proof: &ClaimProof) -> bool {
    let Ok(crs) = gpk.claim_crs() else {
        return false;
    };
    match claim_statement(gpk, sigma) {
        Ok((stmt, _)) => nizk_verify(crs, &stmt, &proof.chi, &context(msg, &sigma.rho), OraclePair::CLAIM, gpk.pp.kappa),
        Err(_) => false,
    }
}

impl Encode for GroupSignature {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u8(tag::GROUP_SIGNATURE);
        s.put(&self.rho);
        self.c.encode(s);
        s.put_zq_vector(&self.t);
        self.pi.encode(s);
        self.vk.encode(s);
        self.sig.encode(s);
    }
}

impl GroupSignature {
    pub fn decode_for(r: &mut Reader<'_>, gpk: &GroupPublicKey) -> Result<Self> {
        let pp = &gpk.pp;
        r.expect_tag(tag::GROUP_SIGNATURE)?;
        Ok(Self {
            rho: r.array()?,
            c: IbeCiphertext(r.zq_vector_of(pp.q_prime, pp.m_b + 1)?),
            t: r.zq_vector_of(pp.q_prime, pp.m_m)?,
            pi: NizkProof::decode(r, gpk.sign_crs()?)?,
            vk: OtsPublicKey::decode(r)?,
            sig: OtsSignature::decode(r)?,
        })
    }

    pub fn from_bytes_for(bytes: &[u8], gpk: &GroupPublicKey) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let v = Self::decode_for(&mut r, gpk)?;
        r.finish()?;
        Ok(v)
    }

    /// Encoded size of each field, in bytes.
    pub fn size_report(&self) -> Vec<(&'static str, usize)> {
        vec![
            ("rho", self.rho.len()),
            ("ciphertext", self.c.to_bytes().len()),
            ("tracing sample", self.t.to_bytes().len()),
            ("proof", self.pi.to_bytes().len()),
            ("proof response hashes", self.pi.hash_block_bytes()),
            ("one-time key", self.vk.to_bytes().len()),
            ("one-time signature", self.sig.to_bytes().len()),
        ]
    }
}

/// Rebuilds the signing statement a signature is checked against.
pub fn reconstruct_sign_statement(gpk: &GroupPublicKey, sigma: &GroupSignature) -> Result<QuadraticStatement> {
    Ok(sign_statement(gpk, &sigma.rho, &sigma.c, &sigma.t, &sigma.vk)?.0)
}

/// The CRS and context a signature's proof was produced under.
pub fn sign_proof_context<'a>(gpk: &'a GroupPublicKey, msg: &[u8], sigma: &GroupSignature) -> Result<(&'a BdlopCrs, SokContext)> {
    Ok((gpk.sign_crs()?, context(msg, &sigma.rho)))
}
