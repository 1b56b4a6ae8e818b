//! Group key generation and the three long-term keys.

use crate::commit::{BdlopCrs, CrsShape};
use crate::encoding::{tag, Decode, Encode, Reader, Sink};
use crate::error::{Error, Result};
use crate::ibe::{IbeExtractor, IbeMasterKey};
use crate::lattice::{IntVector, ParamSet, ZqMatrix};
use crate::oracles::{digest32, OracleTag};
use crate::relations::{claim_shape, sign_shape};
use crate::samplers::{trapdoor_gen_binary, DiscreteGaussian, GTrapdoor, PreimageSampler};
use crate::sigs::{tagsig_keygen, TagSigPublicKey, TagSigSecretKey, TagSigner};
use rand::Rng;
use std::sync::OnceLock;

use super::registry::Registry;
use super::reveal::RevealSolver;

/// Identifier of the one-time signature family bound into the group key.
pub const OTS_SCHEME: &str = "WOTS-16/SHA3-256";

const TRAPDOOR_ATTEMPTS: usize = 16;

/// Everything a verifier needs, with the two proof CRSs expanded on first use.
#[derive(Clone, Debug)]
pub struct GroupPublicKey {
    pub pp: ParamSet,
    pub cert_vk: TagSigPublicKey,
    pub b: ZqMatrix,
    pub f: ZqMatrix,
    pub sign_crs_seed: [u8; 32],
    pub claim_crs_seed: [u8; 32],
    sign_crs: OnceLock<BdlopCrs>,
    claim_crs: OnceLock<BdlopCrs>,
}

impl PartialEq for GroupPublicKey {
    fn eq(&self, other: &Self) -> bool {
        self.to_bytes() == other.to_bytes()
    }
}

impl GroupPublicKey {
    pub fn new(pp: ParamSet, cert_vk: TagSigPublicKey, b: ZqMatrix, f: ZqMatrix, sign_crs_seed: [u8; 32], claim_crs_seed: [u8; 32]) -> Self {
        Self { pp, cert_vk, b, f, sign_crs_seed, claim_crs_seed, sign_crs: OnceLock::new(), claim_crs: OnceLock::new() }
    }

    fn crs_shape(&self, n_vars: usize, n_triples: usize) -> CrsShape {
        let pp = &self.pp;
        CrsShape {
            q: pp.q,
            l1: pp.l1,
            l2: pp.l2,
            n_vars,
            n_triples,
            sigma1: pp.sigma_1,
            sigma2: pp.sigma_2,
            p: pp.p,
            m_rej: pp.m_rej,
        }
    }

    pub fn sign_crs(&self) -> Result<&BdlopCrs> {
        if let Some(crs) = self.sign_crs.get() {
            return Ok(crs);
        }
        let shape = sign_shape(&self.pp)?;
        let crs = BdlopCrs::from_seed(self.sign_crs_seed, &self.crs_shape(shape.n_vars, shape.n_triples));
        Ok(self.sign_crs.get_or_init(|| crs))
    }

    pub fn claim_crs(&self) -> Result<&BdlopCrs> {
        if let Some(crs) = self.claim_crs.get() {
            return Ok(crs);
        }
        let shape = claim_shape(&self.pp)?;
        let crs = BdlopCrs::from_seed(self.claim_crs_seed, &self.crs_shape(shape.n_vars, shape.n_triples));
        Ok(self.claim_crs.get_or_init(|| crs))
    }
}

impl Encode for GroupPublicKey {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u8(tag::GROUP_PUBLIC_KEY);
        self.pp.encode(s);
        self.cert_vk.encode(s);
        s.put_zq_matrix(&self.b);
        s.put_zq_matrix(&self.f);
        s.put_bytes(OTS_SCHEME.as_bytes());
        s.put_u32(OracleTag::ALL.len() as u32);
        for t in OracleTag::ALL {
            s.put_bytes(t.label());
        }
        s.put(&self.sign_crs_seed);
        s.put(&self.claim_crs_seed);
    }
}

impl Decode for GroupPublicKey {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.expect_tag(tag::GROUP_PUBLIC_KEY)?;
        let pp = ParamSet::decode(r)?;
        let cert_vk = TagSigPublicKey::decode_for(r, &pp)?;
        let b = r.zq_matrix_of(pp.q_prime, pp.n, pp.m_b)?;
        let f = r.zq_matrix_of(pp.q_prime, pp.n, pp.m_f)?;
        if r.bytes()? != OTS_SCHEME.as_bytes() {
            return Err(Error::Decode("unsupported one-time signature scheme".into()));
        }
        let count = r.u32()? as usize;
        if count != OracleTag::ALL.len() {
            return Err(Error::Decode(format!("{count} oracle labels")));
        }
        for t in OracleTag::ALL {
            if r.bytes()? != t.label() {
                return Err(Error::Decode("oracle labels differ from this implementation".into()));
            }
        }
        Ok(Self::new(pp, cert_vk, b, f, r.array()?, r.array()?))
    }
}

/// The issuer's certificate trapdoor.
#[derive(Clone, Debug)]
pub struct ManagerKey {
    pub cert_sk: TagSigSecretKey,
    signer: OnceLock<TagSigner>,
}

impl PartialEq for ManagerKey {
    fn eq(&self, other: &Self) -> bool {
        self.cert_sk == other.cert_sk
    }
}

impl ManagerKey {
    pub fn new(cert_sk: TagSigSecretKey) -> Self {
        Self { cert_sk, signer: OnceLock::new() }
    }

    pub fn signer(&self, gpk: &GroupPublicKey) -> Result<&TagSigner> {
        if let Some(s) = self.signer.get() {
            return Ok(s);
        }
        let s = TagSigner::new(&self.cert_sk, &gpk.cert_vk, &gpk.pp)?;
        Ok(self.signer.get_or_init(|| s))
    }
}

impl Encode for ManagerKey {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u8(tag::MANAGER_KEY);
        self.cert_sk.trapdoor.encode(s);
    }
}

impl Decode for ManagerKey {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.expect_tag(tag::MANAGER_KEY)?;
        Ok(Self::new(TagSigSecretKey { trapdoor: GTrapdoor::decode(r)? }))
    }
}

/// The opener's trapdoor for `B`, with the extraction sampler built on first use.
#[derive(Clone, Debug)]
pub struct OpenerKey {
    pub ibe: IbeMasterKey,
    extractor: OnceLock<IbeExtractor>,
    reveal: OnceLock<RevealSolver>,
}

impl PartialEq for OpenerKey {
    fn eq(&self, other: &Self) -> bool {
        self.ibe.trapdoor == other.ibe.trapdoor && self.ibe.extract_seed == other.ibe.extract_seed
    }
}

impl OpenerKey {
    pub fn new(ibe: IbeMasterKey) -> Self {
        Self { ibe, extractor: OnceLock::new(), reveal: OnceLock::new() }
    }

    pub fn extractor(&self, gpk: &GroupPublicKey) -> Result<&IbeExtractor> {
        if let Some(e) = self.extractor.get() {
            return Ok(e);
        }
        let e = IbeExtractor::new(&gpk.b, &self.ibe, &gpk.pp)?;
        Ok(self.extractor.get_or_init(|| e))
    }

    pub fn reveal_solver(&self, gpk: &GroupPublicKey) -> Result<&RevealSolver> {
        if let Some(r) = self.reveal.get() {
            return Ok(r);
        }
        let r = RevealSolver::new(gpk, self)?;
        Ok(self.reveal.get_or_init(|| r))
    }

    /// Seed for randomness the opener needs beyond extraction.
    pub(crate) fn derived_seed(&self, domain: &[u8]) -> [u8; 32] {
        digest32(domain, &[&self.ibe.extract_seed])
    }
}

impl Encode for OpenerKey {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u8(tag::OPENER_KEY);
        self.ibe.trapdoor.encode(s);
        s.put(&self.ibe.extract_seed);
    }
}

impl Decode for OpenerKey {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.expect_tag(tag::OPENER_KEY)?;
        let trapdoor = GTrapdoor::decode(r)?;
        Ok(Self::new(IbeMasterKey { trapdoor, extract_seed: r.array()? }))
    }
}

#[derive(Clone, Debug)]
pub struct GroupKeys {
    pub gpk: GroupPublicKey,
    pub gsk: ManagerKey,
    pub osk: OpenerKey,
    pub registry: Registry,
}

pub fn keygen<R: Rng + ?Sized>(pp: &ParamSet, rng: &mut R) -> Result<GroupKeys> {
    let cert = tagsig_keygen(pp, rng)?;
    let mut attempt = 0;
    let (b, trapdoor) = loop {
        let (b, trapdoor) = trapdoor_gen_binary(pp.n, pp.m_b, pp.q_prime, rng)?;
        match PreimageSampler::from_full(&b, &trapdoor, 1, pp.sigma_gpv) {
            Ok(_) => break (b, trapdoor),
            Err(Error::Width(_)) if attempt + 1 < TRAPDOOR_ATTEMPTS => attempt += 1,
            Err(e) => return Err(e),
        }
    };
    let f = ZqMatrix::uniform(pp.q_prime, pp.n, pp.m_f, rng);
    let gpk = GroupPublicKey::new(pp.clone(), cert.vk, b, f, rng.random(), rng.random());
    let osk = OpenerKey::new(IbeMasterKey { trapdoor, extract_seed: rng.random() });
    Ok(GroupKeys { gpk, gsk: ManagerKey::new(cert.sk), osk, registry: Registry::default() })
}

/// Short noise for LWE samples: a Gaussian of width `B` cut at `B`.
pub fn sample_lwe_noise<R: Rng + ?Sized>(dim: usize, pp: &ParamSet, rng: &mut R) -> Result<IntVector> {
    let g = DiscreteGaussian::new(pp.b_lwe as f64)?;
    let bound = pp.b_lwe as i64;
    Ok(IntVector(
        (0..dim)
            .map(|_| loop {
                let x = g.sample(rng);
                if x.abs() <= bound {
                    break x;
                }
            })
            .collect(),
    ))
}
