//! Tag-based certificate signatures: `[A | id·G + A']·(v1; v2) = u + D·msg (mod q)`.

use crate::encoding::{Decode, Encode, Reader, Sink};
use crate::error::{Error, Result};
use crate::lattice::{BitVector, IntVector, ParamSet, ZqMatrix, ZqVector};
use crate::samplers::{trapdoor_gen_ternary, DiscreteGaussian, GTrapdoor, PreimageSampler};
use rand::Rng;

/// Draws allowed before a signature is declared unattainable.
pub const RESAMPLE_BUDGET: usize = 64;

/// Trapdoor draws tried before the width floor is declared unreachable.
const KEYGEN_ATTEMPTS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TagSigPublicKey {
    pub a: ZqMatrix,
    pub a_prime: ZqMatrix,
    pub d: ZqMatrix,
    pub u: ZqVector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TagSigSecretKey {
    pub trapdoor: GTrapdoor,
}

#[derive(Clone, Debug)]
pub struct TagSigKeypair {
    pub vk: TagSigPublicKey,
    pub sk: TagSigSecretKey,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TagSignature {
    pub id: u64,
    pub v1: IntVector,
    pub v2: IntVector,
}

/// Length of the signed bit strings.
pub fn message_bits(pp: &ParamSet) -> usize {
    pp.m_b * pp.q_prime.bits()
}

pub fn tagsig_keygen<R: Rng + ?Sized>(pp: &ParamSet, rng: &mut R) -> Result<TagSigKeypair> {
    let mut last = None;
    for _ in 0..KEYGEN_ATTEMPTS {
        let (a, a_prime, trapdoor) = trapdoor_gen_ternary(pp.n, pp.m_1, pp.q, rng)?;
        match PreimageSampler::new(a.clone(), a_prime.clone(), &trapdoor, pp.sigma_sign) {
            Ok(_) => {
                let d = ZqMatrix::uniform(pp.q, pp.n, message_bits(pp), rng);
                let u = ZqVector::uniform(pp.q, pp.n, rng);
                return Ok(TagSigKeypair { vk: TagSigPublicKey { a, a_prime, d, u }, sk: TagSigSecretKey { trapdoor } });
            }
            Err(e @ Error::Width(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Width("no trapdoor drawn".into())))
}

/// `[A | id·G + A']·(v1; v2) mod q`.
pub fn certificate_syndrome(vk: &TagSigPublicKey, id: u64, v1: &IntVector, v2: &IntVector) -> Result<ZqVector> {
    let q = vk.a.modulus();
    let k = q.bits();
    if v2.len() != vk.a_prime.cols() || v2.len() != vk.a.rows() * k {
        return Err(Error::Dimension(format!("v2 has length {}, expected {}", v2.len(), vk.a_prime.cols())));
    }
    let gv: Vec<u64> = v2.0.chunks(k).map(|c| q.from_i128(c.iter().enumerate().map(|(b, &x)| (x as i128) << b).sum())).collect();
    vk.a.mul_int(v1)?.add(&vk.a_prime.mul_int(v2)?)?.add(&ZqVector::from_u64(q, gv).scale(q.from_i64(id as i64)))
}

/// `u + D·msg mod q`.
pub fn certificate_target(vk: &TagSigPublicKey, msg: &BitVector) -> Result<ZqVector> {
    let q = vk.a.modulus();
    vk.u.add(&vk.d.mul_vec(&ZqVector::from_i64(q, &msg.to_i64()))?)
}

/// Signing state with the preimage sampler's factorisation computed once.
#[derive(Clone, Debug)]
pub struct TagSigner {
    vk: TagSigPublicKey,
    sampler: PreimageSampler,
    commit_width: f64,
}

impl TagSigner {
    pub fn new(sk: &TagSigSecretKey, vk: &TagSigPublicKey, pp: &ParamSet) -> Result<Self> {
        Self::with_width(sk, vk, pp.sigma_sign, pp)
    }

    /// A signer whose preimage width is `width` instead of the configured one.
    pub fn with_width(sk: &TagSigSecretKey, vk: &TagSigPublicKey, width: f64, pp: &ParamSet) -> Result<Self> {
        let sampler = PreimageSampler::new(vk.a.clone(), vk.a_prime.clone(), &sk.trapdoor, width)?;
        Ok(Self { vk: vk.clone(), sampler, commit_width: pp.sigma_com })
    }

    pub fn sign<R: Rng + ?Sized>(&self, id: u64, msg: &BitVector, pp: &ParamSet, rng: &mut R) -> Result<TagSignature> {
        let q = pp.q;
        if id == 0 || id > pp.group_size || id.is_multiple_of(q.value()) {
            return Err(Error::Range(format!("tag {id} outside 1..={}", pp.group_size)));
        }
        if msg.len() != self.vk.d.cols() {
            return Err(Error::Dimension(format!("message of {} bits, expected {}", msg.len(), self.vk.d.cols())));
        }
        let m1 = self.vk.a.cols();
        let shift = DiscreteGaussian::new(self.commit_width)?;
        let goal = certificate_target(&self.vk, msg)?;
        for _ in 0..RESAMPLE_BUDGET {
            let r = shift.sample_vec(m1, rng);
            let target = goal.sub(&self.vk.a.mul_int(&r)?)?;
            let w = self.sampler.sample(id, &target, rng)?;
            let v1 = IntVector(w.0[..m1].iter().zip(&r.0).map(|(a, b)| a + b).collect());
            let v2 = IntVector(w.0[m1..].to_vec());
            if v1.inf_norm() <= pp.beta_1 && v2.inf_norm() <= pp.beta_2 {
                return Ok(TagSignature { id, v1, v2 });
            }
        }
        Err(Error::Budget(format!("no signature within the norm bounds after {RESAMPLE_BUDGET} draws")))
    }
}

pub fn tagsig_sign<R: Rng + ?Sized>(
    sk: &TagSigSecretKey,
    vk: &TagSigPublicKey,
    id: u64,
    msg: &BitVector,
    pp: &ParamSet,
    rng: &mut R,
) -> Result<TagSignature> {
    TagSigner::new(sk, vk, pp)?.sign(id, msg, pp, rng)
}

pub fn tagsig_verify(vk: &TagSigPublicKey, sig: &TagSignature, msg: &BitVector, pp: &ParamSet) -> bool {
    if sig.id == 0 || sig.id > pp.group_size || sig.v1.len() != pp.m_1 || msg.len() != vk.d.cols() {
        return false;
    }
    if sig.v1.inf_norm() > pp.beta_1 || sig.v2.inf_norm() > pp.beta_2 {
        return false;
    }
    match (certificate_syndrome(vk, sig.id, &sig.v1, &sig.v2), certificate_target(vk, msg)) {
        (Ok(lhs), Ok(rhs)) => lhs == rhs,
        _ => false,
    }
}

impl Encode for TagSigPublicKey {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_zq_matrix(&self.a);
        s.put_zq_matrix(&self.a_prime);
        s.put_zq_matrix(&self.d);
        s.put_zq_vector(&self.u);
    }
}

impl TagSigPublicKey {
    pub fn decode_for(r: &mut Reader<'_>, pp: &ParamSet) -> Result<Self> {
        let (q, n) = (pp.q, pp.n);
        Ok(Self {
            a: r.zq_matrix_of(q, n, pp.m_1)?,
            a_prime: r.zq_matrix_of(q, n, pp.m_2)?,
            d: r.zq_matrix_of(q, n, message_bits(pp))?,
            u: r.zq_vector_of(q, n)?,
        })
    }
}

impl Encode for TagSignature {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u64(self.id);
        s.put_int_vector(&self.v1);
        s.put_int_vector(&self.v2);
    }
}

impl Decode for TagSignature {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(Self { id: r.u64()?, v1: r.int_vector()?, v2: r.int_vector()? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::bin_decompose;
    use crate::samplers::gaussian::width_to_std;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::sync::OnceLock;

    struct Fixture {
        pp: ParamSet,
        kp: TagSigKeypair,
        signer: TagSigner,
    }

    fn fixture() -> &'static Fixture {
        static F: OnceLock<Fixture> = OnceLock::new();
        F.get_or_init(|| {
            let pp = ParamSet::desk().unwrap();
            let kp = tagsig_keygen(&pp, &mut ChaCha20Rng::seed_from_u64(1)).unwrap();
            let signer = TagSigner::new(&kp.sk, &kp.vk, &pp).unwrap();
            Fixture { pp, kp, signer }
        })
    }

    fn random_msg(pp: &ParamSet, rng: &mut ChaCha20Rng) -> BitVector {
        bin_decompose(&ZqVector::uniform(pp.q_prime, pp.m_b, rng))
    }

    #[test]
    fn keys_satisfy_the_trapdoor_relation() {
        let f = fixture();
        let r = f.kp.sk.trapdoor.matrix();
        assert_eq!(f.kp.vk.a.mul_int_matrix(r).unwrap().add(&f.kp.vk.a_prime).unwrap(), ZqMatrix::zero(f.pp.q, f.pp.n, f.pp.m_2));
        let again = tagsig_keygen(&f.pp, &mut ChaCha20Rng::seed_from_u64(1)).unwrap();
        assert_eq!(again.vk, f.kp.vk);
        let bytes = f.kp.vk.to_bytes();
        let back = TagSigPublicKey::decode_for(&mut Reader::new(&bytes), &f.pp).unwrap();
        assert_eq!(back, f.kp.vk);
        assert_eq!(GTrapdoor::from_bytes(&f.kp.sk.trapdoor.to_bytes()).unwrap(), f.kp.sk.trapdoor);
    }

    #[test]
    fn signatures_satisfy_the_equation_exactly() {
        let f = fixture();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for i in 0..100u64 {
            let msg = random_msg(&f.pp, &mut rng);
            let id = 1 + i % f.pp.group_size;
            let sig = f.signer.sign(id, &msg, &f.pp, &mut rng).unwrap();
            assert_eq!(
                certificate_syndrome(&f.kp.vk, id, &sig.v1, &sig.v2).unwrap(),
                certificate_target(&f.kp.vk, &msg).unwrap()
            );
            assert!(tagsig_verify(&f.kp.vk, &sig, &msg, &f.pp));
        }
    }

    #[test]
    fn shifted_component_has_the_combined_width() {
        let f = fixture();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let msg = random_msg(&f.pp, &mut rng);
        let mut samples = Vec::new();
        while samples.len() < 10_000 {
            samples.extend(f.signer.sign(2, &msg, &f.pp, &mut rng).unwrap().v1.0);
        }
        let n = samples.len() as f64;
        let mean = samples.iter().map(|&x| x as f64).sum::<f64>() / n;
        let std = (samples.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / n).sqrt();
        let expected = width_to_std(f.pp.sigma_verif);
        assert!((std / expected - 1.0).abs() < 0.10, "std {std} vs {expected}");
    }

    #[test]
    fn zero_message_and_tampering() {
        let f = fixture();
        let pp = &f.pp;
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let zero = BitVector::new(vec![0; message_bits(pp)]).unwrap();
        let sig = tagsig_sign(&f.kp.sk, &f.kp.vk, 1, &zero, pp, &mut rng).unwrap();
        assert!(tagsig_verify(&f.kp.vk, &sig, &zero, pp));
        let mut other_id = sig.clone();
        other_id.id = 2;
        assert!(!tagsig_verify(&f.kp.vk, &other_id, &zero, pp));
        let mut long = sig.clone();
        long.v2.0[0] = pp.beta_2 as i64 + 1;
        assert!(!tagsig_verify(&f.kp.vk, &long, &zero, pp));
        let mut flipped = zero.as_slice().to_vec();
        flipped[0] = 1;
        assert!(!tagsig_verify(&f.kp.vk, &sig, &BitVector::new(flipped).unwrap(), pp));
        assert!(f.signer.sign(0, &zero, pp, &mut rng).is_err());
        assert!(f.signer.sign(pp.group_size + 1, &zero, pp, &mut rng).is_err());
        assert_eq!(TagSignature::from_bytes(&sig.to_bytes()).unwrap(), sig);
    }

    #[test]
    fn tenfold_width_exhausts_the_budget() {
        let f = fixture();
        let wide = TagSigner::with_width(&f.kp.sk, &f.kp.vk, 10.0 * f.pp.sigma_sign, &f.pp).unwrap();
        let msg = random_msg(&f.pp, &mut ChaCha20Rng::seed_from_u64(5));
        let err = wide.sign(1, &msg, &f.pp, &mut ChaCha20Rng::seed_from_u64(6)).unwrap_err();
        assert!(matches!(err, Error::Budget(_)), "{err}");
    }
}
