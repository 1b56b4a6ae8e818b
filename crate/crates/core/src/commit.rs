//! Structured lattice commitment keys and a hash-based string commitment.

use crate::encoding::{Encode, Reader, Sink};
use crate::error::{Error, Result};
use crate::lattice::{IntVector, Modulus, ZqMatrix, ZqVector};
use crate::oracles::{digest32, fingerprint};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Commitment matrix `[[I_l1, T], [0, I_n | U]]` with `T` of shape
/// `l1 × (n + l2)` and `U` of shape `n × l2`.
///
/// Randomness is laid out as `(s_a, s_b, s_c)` of lengths `(l1, n, l2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BdlopMatrix {
    l1: usize,
    l2: usize,
    msg_len: usize,
    top: ZqMatrix,
    bottom: ZqMatrix,
}

impl BdlopMatrix {
    pub fn random<R: RngCore + ?Sized>(q: Modulus, l1: usize, l2: usize, msg_len: usize, rng: &mut R) -> Self {
        let top = ZqMatrix::uniform(q, l1, msg_len + l2, rng);
        let bottom = ZqMatrix::uniform(q, msg_len, l2, rng);
        Self { l1, l2, msg_len, top, bottom }
    }

    pub fn modulus(&self) -> Modulus {
        self.top.modulus()
    }

    pub fn rows(&self) -> usize {
        self.l1 + self.msg_len
    }

    pub fn cols(&self) -> usize {
        self.l1 + self.msg_len + self.l2
    }

    pub fn msg_len(&self) -> usize {
        self.msg_len
    }

    /// Entry of the full matrix, for inspection and small-size oracles.
    pub fn entry(&self, r: usize, c: usize) -> u64 {
        let (l1, n) = (self.l1, self.msg_len);
        if r < l1 {
            if c < l1 {
                (r == c) as u64
            } else {
                self.top.get(r, c - l1)
            }
        } else {
            let r = r - l1;
            if c < l1 {
                0
            } else if c < l1 + n {
                (c - l1 == r) as u64
            } else {
                self.bottom.get(r, c - l1 - n)
            }
        }
    }

    pub fn to_dense(&self) -> ZqMatrix {
        let mut m = ZqMatrix::zero(self.modulus(), self.rows(), self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                m.set(r, c, self.entry(r, c));
            }
        }
        m
    }

    /// `B·s + (0 ‖ msg) mod q`.
    pub fn commit(&self, s: &IntVector, msg: &ZqVector) -> Result<ZqVector> {
        let q = self.modulus();
        if s.len() != self.cols() {
            return Err(Error::Dimension(format!("randomness length {} vs {}", s.len(), self.cols())));
        }
        if msg.len() != self.msg_len {
            return Err(Error::Dimension(format!("message length {} vs {}", msg.len(), self.msg_len)));
        }
        if msg.modulus() != q {
            return Err(Error::ModulusMismatch(q.value(), msg.modulus().value()));
        }
        let sq: Vec<u64> = s.0.iter().map(|&x| q.from_i64(x)).collect();
        let (sa, rest) = sq.split_at(self.l1);
        let (sb, sc) = rest.split_at(self.msg_len);
        let mut out = Vec::with_capacity(self.rows());
        for (i, &a) in sa.iter().enumerate() {
            out.push(q.add(a, q.dot(self.top.row(i), rest)));
        }
        for (i, (&b, &m)) in sb.iter().zip(msg.as_slice()).enumerate() {
            out.push(q.add(q.add(b, q.dot(self.bottom.row(i), sc)), m));
        }
        Ok(ZqVector::from_u64(q, out))
    }

    fn encode_into<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_len(self.l1);
        s.put_len(self.l2);
        s.put_len(self.msg_len);
        s.put_zq_matrix(&self.top);
        s.put_zq_matrix(&self.bottom);
    }
}

/// Public parameters of the quadratic argument: two commitment matrices, the
/// masking widths, the challenge range `[-p, p]` and the rejection constant.
#[derive(Clone, Debug)]
pub struct BdlopCrs {
    seed: [u8; 32],
    pub b1: BdlopMatrix,
    pub b2: BdlopMatrix,
    pub sigma1: f64,
    pub sigma2: f64,
    pub p: u32,
    pub m_rej: f64,
    fingerprint: [u8; 32],
}

/// Everything needed to regenerate a [`BdlopCrs`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrsShape {
    pub q: Modulus,
    pub l1: usize,
    pub l2: usize,
    pub n_vars: usize,
    pub n_triples: usize,
    pub sigma1: f64,
    pub sigma2: f64,
    pub p: u32,
    pub m_rej: f64,
}

impl BdlopCrs {
    /// Expands the matrices deterministically from `seed`.
    pub fn from_seed(seed: [u8; 32], shape: &CrsShape) -> Self {
        let mut rng = ChaCha20Rng::from_seed(seed);
        let b1 = BdlopMatrix::random(shape.q, shape.l1, shape.l2, shape.n_vars, &mut rng);
        let b2 = BdlopMatrix::random(shape.q, shape.l1, shape.l2, shape.n_triples, &mut rng);
        let mut crs = Self {
            seed,
            b1,
            b2,
            sigma1: shape.sigma1,
            sigma2: shape.sigma2,
            p: shape.p,
            m_rej: shape.m_rej,
            fingerprint: [0; 32],
        };
        crs.fingerprint = fingerprint(b"CRS", &crs);
        crs
    }

    pub fn seed(&self) -> [u8; 32] {
        self.seed
    }

    pub fn modulus(&self) -> Modulus {
        self.b1.modulus()
    }

    pub fn shape(&self) -> CrsShape {
        CrsShape {
            q: self.modulus(),
            l1: self.b1.l1,
            l2: self.b1.l2,
            n_vars: self.b1.msg_len,
            n_triples: self.b2.msg_len,
            sigma1: self.sigma1,
            sigma2: self.sigma2,
            p: self.p,
            m_rej: self.m_rej,
        }
    }

    /// Hash of the canonical encoding, bound into every proof.
    pub fn fingerprint(&self) -> [u8; 32] {
        self.fingerprint
    }
}

impl Encode for BdlopCrs {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u64(self.modulus().value());
        self.b1.encode_into(s);
        self.b2.encode_into(s);
        s.put_f64(self.sigma1);
        s.put_f64(self.sigma2);
        s.put_u32(self.p);
        s.put_f64(self.m_rej);
    }
}

impl CrsShape {
    pub fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u64(self.q.value());
        s.put_len(self.l1);
        s.put_len(self.l2);
        s.put_len(self.n_vars);
        s.put_len(self.n_triples);
        s.put_f64(self.sigma1);
        s.put_f64(self.sigma2);
        s.put_u32(self.p);
        s.put_f64(self.m_rej);
    }

    pub fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let q = Modulus::new(r.u64()?).map_err(|e| Error::Decode(e.to_string()))?;
        Ok(Self {
            q,
            l1: r.count()?,
            l2: r.count()?,
            n_vars: r.count()?,
            n_triples: r.count()?,
            sigma1: r.f64()?,
            sigma2: r.f64()?,
            p: r.u32()?,
            m_rej: r.f64()?,
        })
    }
}

/// `bdlop_setup`: fresh CRS for a statement with `n_vars` variables and `n_triples` products.
pub fn bdlop_setup<R: RngCore + ?Sized>(shape: &CrsShape, rng: &mut R) -> BdlopCrs {
    let mut seed = [0u8; 32];
    rng.fill_bytes(&mut seed);
    BdlopCrs::from_seed(seed, shape)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AuxCommitment(pub [u8; 32]);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuxOpening(pub [u8; 32]);

const AUX_DOMAIN: &[u8] = b"AUXCOM";

/// Hash commitment `H(tag ‖ ρ ‖ payload)` with a 32-byte opening `ρ`.
pub fn aux_commit<R: Rng + ?Sized>(payload: &[&[u8]], rng: &mut R) -> (AuxCommitment, AuxOpening) {
    let mut rho = [0u8; 32];
    rng.fill(&mut rho);
    (aux_commit_with(payload, &AuxOpening(rho)), AuxOpening(rho))
}

pub fn aux_commit_with(payload: &[&[u8]], opening: &AuxOpening) -> AuxCommitment {
    let mut parts: Vec<&[u8]> = Vec::with_capacity(payload.len() + 1);
    parts.push(&opening.0);
    parts.extend_from_slice(payload);
    AuxCommitment(digest32(AUX_DOMAIN, &parts))
}

pub fn aux_verify(com: &AuxCommitment, payload: &[&[u8]], opening: &AuxOpening) -> bool {
    aux_commit_with(payload, opening) == *com
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::Encode;
    use rand::SeedableRng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn shape(q: u64) -> CrsShape {
        CrsShape { q: Modulus::new(q).unwrap(), l1: 3, l2: 2, n_vars: 4, n_triples: 5, sigma1: 3.0, sigma2: 100.0, p: 2, m_rej: 1.5 }
    }

    #[test]
    fn identity_blocks_in_place() {
        let crs = bdlop_setup(&shape(1009), &mut ChaCha20Rng::seed_from_u64(1));
        let d = crs.b1.to_dense();
        assert_eq!((d.rows(), d.cols()), (7, 9));
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(d.get(r, c), (r == c) as u64);
            }
        }
        for r in 3..7 {
            for c in 0..3 {
                assert_eq!(d.get(r, c), 0);
            }
            for c in 3..7 {
                assert_eq!(d.get(r, c), (r == c) as u64);
            }
        }
        assert_eq!((crs.b2.rows(), crs.b2.cols()), (8, 10));
    }

    #[test]
    fn deterministic_under_seed() {
        let a = bdlop_setup(&shape(1009), &mut ChaCha20Rng::seed_from_u64(9));
        let b = bdlop_setup(&shape(1009), &mut ChaCha20Rng::seed_from_u64(9));
        assert_eq!(a.b1, b.b1);
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = bdlop_setup(&shape(1009), &mut ChaCha20Rng::seed_from_u64(10));
        assert_ne!(a.fingerprint(), c.fingerprint());
        assert_eq!(a.to_bytes().len(), c.to_bytes().len());
    }

    #[test]
    fn sub_blocks_uniform() {
        let mut s = shape(17);
        s.l1 = 40;
        s.n_vars = 500;
        s.l2 = 40;
        let crs = bdlop_setup(&s, &mut ChaCha20Rng::seed_from_u64(2));
        let mut counts = [0f64; 17];
        crs.b1.top.as_slice().iter().chain(crs.b1.bottom.as_slice()).for_each(|&x| counts[x as usize] += 1.0);
        let total: f64 = counts.iter().sum();
        let e = total / 17.0;
        let stat: f64 = counts.iter().map(|c| (c - e).powi(2) / e).sum();
        assert!(1.0 - ChiSquared::new(16.0).unwrap().cdf(stat) > 0.001);
    }

    #[test]
    fn commit_matches_dense_product() {
        let crs = bdlop_setup(&shape(1009), &mut ChaCha20Rng::seed_from_u64(3));
        let q = crs.modulus();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let msg = ZqVector::uniform(q, 4, &mut rng);
        assert_eq!(crs.b1.commit(&IntVector::zero(9), &msg).unwrap().as_slice()[3..], *msg.as_slice());
        assert!(crs.b1.commit(&IntVector::zero(9), &ZqVector::zero(q, 4)).unwrap().as_slice().iter().all(|&x| x == 0));
        for _ in 0..50 {
            let s = IntVector((0..9).map(|_| rng.random_range(-50..=50)).collect());
            let dense = crs.b1.to_dense().mul_int(&s).unwrap();
            let padded = ZqVector::zero(q, 3).concat(&msg).unwrap();
            assert_eq!(crs.b1.commit(&s, &msg).unwrap(), dense.add(&padded).unwrap());
        }
        assert!(crs.b1.commit(&IntVector::zero(8), &msg).is_err());
    }

    #[test]
    fn aux_commitment_roundtrip() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let (c, o) = aux_commit(&[b"payload"], &mut rng);
        assert!(aux_verify(&c, &[b"payload"], &o));
        assert!(aux_verify(&c, &[b"pay", b"load"], &o));
        assert!(!aux_verify(&c, &[b"paylobd"], &o));
        let mut o2 = o;
        o2.0[0] ^= 1;
        assert!(!aux_verify(&c, &[b"payload"], &o2));
    }

    #[test]
    fn aux_hiding_and_binding_smoke() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let (a, _) = aux_commit(&[b"zero"], &mut rng);
            let (b, _) = aux_commit(&[b"one"], &mut rng);
            assert_ne!(a, b);
        }
        let mut seen = std::collections::HashSet::new();
        for _ in 0..10_000 {
            let mut payload = [0u8; 16];
            rng.fill(&mut payload);
            let (c, _) = aux_commit(&[&payload], &mut rng);
            assert!(seen.insert(c));
        }
    }
}
