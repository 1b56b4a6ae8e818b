//! The two-round join exchange as three functions over explicit messages.

use super::keys::{sample_lwe_noise, GroupPublicKey, ManagerKey};
use super::registry::{Certificate, Registry, RegistryEntry};
use crate::encoding::{tag, Decode, Encode, Reader, Sink};
use crate::error::{Error, Result};
use crate::lattice::{bin_decompose, bin_recompose, BitVector, IntVector, ZqVector};
use crate::sigs::{tagsig_verify, usersig_sign, usersig_verify, TagSignature, UserPublicKey, UserSignature, UserSigningKey};
use rand::Rng;

/// A member's long-term secret: the preimage of its tracing trapdoor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserSecret {
    pub z: BitVector,
}

impl UserSecret {
    /// `x = F·z mod q'`.
    pub fn trapdoor_vector(&self, gpk: &GroupPublicKey) -> Result<ZqVector> {
        gpk.f.mul_vec(&ZqVector::from_i64(gpk.pp.q_prime, &self.z.to_i64()))
    }
}

impl Encode for UserSecret {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u8(tag::USER_SECRET);
        s.put_bit_vector(&self.z);
    }
}

impl Decode for UserSecret {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.expect_tag(tag::USER_SECRET)?;
        Ok(Self { z: r.bit_vector()? })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinRequest {
    pub y_bits: BitVector,
    pub user_pk: UserPublicKey,
    pub user_sig: UserSignature,
}

/// What the applicant keeps between the two rounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PendingUser {
    pub z: BitVector,
    pub x: ZqVector,
    pub e: IntVector,
    pub y: ZqVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinResponse {
    pub cert_sig: TagSignature,
}

/// Bytes the applicant signs with its ordinary key.
pub fn join_message(y_bits: &BitVector) -> Vec<u8> {
    let mut out = b"JOIN".to_vec();
    out.put_bit_vector(y_bits);
    out
}

pub fn join_user_request<R: Rng + ?Sized>(
    gpk: &GroupPublicKey,
    user_sk: &mut UserSigningKey,
    rng: &mut R,
) -> Result<(JoinRequest, PendingUser)> {
    let pp = &gpk.pp;
    let z = BitVector::new((0..pp.m_f).map(|_| rng.random_range(0..=1)).collect())?;
    let x = gpk.f.mul_vec(&ZqVector::from_i64(pp.q_prime, &z.to_i64()))?;
    let e = sample_lwe_noise(pp.m_b, pp, rng)?;
    let y = gpk.b.transpose().mul_vec(&x)?.add(&ZqVector::from_i64(pp.q_prime, &e.0))?;
    let y_bits = bin_decompose(&y);
    let user_sig = usersig_sign(user_sk, &join_message(&y_bits))?;
    let request = JoinRequest { y_bits, user_pk: user_sk.public_key(), user_sig };
    Ok((request, PendingUser { z, x, e, y }))
}

/// Checks the request, issues the next identifier and records the transcript.
pub fn join_gm_process<R: Rng + ?Sized>(
    gsk: &ManagerKey,
    gpk: &GroupPublicKey,
    registry: &mut Registry,
    request: &JoinRequest,
    rng: &mut R,
) -> Result<JoinResponse> {
    let pp = &gpk.pp;
    if !usersig_verify(&request.user_pk, &join_message(&request.y_bits), &request.user_sig) {
        return Err(Error::Rejected("join request signature does not verify".into()));
    }
    let y = bin_recompose(&request.y_bits, pp.q_prime)?;
    if y.len() != pp.m_b || bin_decompose(&y) != request.y_bits {
        return Err(Error::Rejected("sample is not a canonical vector over q'".into()));
    }
    if registry.contains_sample(&y) {
        return Err(Error::Rejected("sample already registered".into()));
    }
    if registry.counter() >= pp.group_size {
        return Err(Error::Registry(format!("group is full ({} members)", pp.group_size)));
    }
    let id = registry.counter() + 1;
    let cert_sig = gsk.signer(gpk)?.sign(id, &request.y_bits, pp, rng)?;
    let cert = Certificate { id, y, v1: cert_sig.v1.clone(), v2: cert_sig.v2.clone() };
    registry.append(
        RegistryEntry { id, user_pk: request.user_pk, user_sig: request.user_sig.clone(), cert },
        pp.group_size,
    )?;
    Ok(JoinResponse { cert_sig })
}

pub fn join_user_finalize(gpk: &GroupPublicKey, pending: &PendingUser, response: &JoinResponse) -> Result<(u64, UserSecret, Certificate)> {
    let sig = &response.cert_sig;
    if !tagsig_verify(&gpk.cert_vk, sig, &bin_decompose(&pending.y), &gpk.pp) {
        return Err(Error::Rejected("certificate does not verify".into()));
    }
    let cert = Certificate { id: sig.id, y: pending.y.clone(), v1: sig.v1.clone(), v2: sig.v2.clone() };
    Ok((sig.id, UserSecret { z: pending.z.clone() }, cert))
}

impl Encode for JoinRequest {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u8(tag::JOIN_REQUEST);
        s.put_bit_vector(&self.y_bits);
        self.user_pk.encode(s);
        self.user_sig.encode(s);
    }
}

impl Decode for JoinRequest {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.expect_tag(tag::JOIN_REQUEST)?;
        Ok(Self { y_bits: r.bit_vector()?, user_pk: UserPublicKey::decode(r)?, user_sig: UserSignature::decode(r)? })
    }
}

impl Encode for PendingUser {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u8(tag::PENDING_USER);
        s.put_bit_vector(&self.z);
        s.put_zq_vector(&self.x);
        s.put_int_vector(&self.e);
        s.put_zq_vector(&self.y);
    }
}

impl Decode for PendingUser {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.expect_tag(tag::PENDING_USER)?;
        Ok(Self { z: r.bit_vector()?, x: r.zq_vector()?, e: r.int_vector()?, y: r.zq_vector()? })
    }
}

impl Encode for JoinResponse {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u8(tag::JOIN_RESPONSE);
        self.cert_sig.encode(s);
    }
}

impl Decode for JoinResponse {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.expect_tag(tag::JOIN_RESPONSE)?;
        Ok(Self { cert_sig: TagSignature::decode(r)? })
    }
}
