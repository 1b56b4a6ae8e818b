//! Three-move argument of knowledge of `x` with `A·x = y mod q` and
//! `x[h] = x[i]·x[j]` for every listed triple.

use crate::commit::{aux_commit, aux_verify, AuxCommitment, AuxOpening, BdlopCrs};
use crate::encoding::{Encode, Reader, Sink};
use crate::error::{Error, Result};
use crate::lattice::{IntVector, Modulus, SparseZqMatrix, ZqVector};
use crate::oracles::fingerprint;
use crate::samplers::{rejection_prob, DiscreteGaussian};
use rand::Rng;

/// Product constraint `x[h] = x[i]·x[j]` on zero-based variable indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Triple {
    pub h: u32,
    pub i: u32,
    pub j: u32,
}

impl Triple {
    pub fn new(h: usize, i: usize, j: usize) -> Self {
        let c = |v: usize| u32::try_from(v).expect("index fits in u32");
        Self { h: c(h), i: c(i), j: c(j) }
    }
}

#[derive(Clone, Debug)]
pub struct QuadraticStatement {
    a: SparseZqMatrix,
    y: ZqVector,
    triples: Vec<Triple>,
    fingerprint: [u8; 32],
}

impl QuadraticStatement {
    pub fn new(a: SparseZqMatrix, y: ZqVector, triples: Vec<Triple>) -> Result<Self> {
        if a.modulus() != y.modulus() {
            return Err(Error::ModulusMismatch(a.modulus().value(), y.modulus().value()));
        }
        if a.rows() != y.len() {
            return Err(Error::Dimension(format!("{} rows but target of length {}", a.rows(), y.len())));
        }
        let n = a.cols();
        if let Some(t) = triples.iter().find(|t| [t.h, t.i, t.j].iter().any(|&v| v as usize >= n)) {
            return Err(Error::Dimension(format!("triple {t:?} outside {n} variables")));
        }
        let mut stmt = Self { a, y, triples, fingerprint: [0; 32] };
        stmt.fingerprint = fingerprint(b"QSTMT", &stmt);
        Ok(stmt)
    }

    pub fn modulus(&self) -> Modulus {
        self.a.modulus()
    }

    pub fn n_vars(&self) -> usize {
        self.a.cols()
    }

    pub fn n_rows(&self) -> usize {
        self.a.rows()
    }

    pub fn matrix(&self) -> &SparseZqMatrix {
        &self.a
    }

    pub fn target(&self) -> &ZqVector {
        &self.y
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    /// Hash of the canonical encoding.
    pub fn fingerprint(&self) -> [u8; 32] {
        self.fingerprint
    }

    pub fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let a = r.sparse()?;
        let y = r.zq_vector()?;
        let count = r.u64()? as usize;
        if count.saturating_mul(12) > r.remaining() {
            return Err(Error::Decode("triple list longer than input".into()));
        }
        let triples = (0..count)
            .map(|_| Ok(Triple { h: r.u32()?, i: r.u32()?, j: r.u32()? }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(a, y, triples).map_err(|e| Error::Decode(e.to_string()))
    }
}

impl Encode for QuadraticStatement {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_sparse(&self.a);
        s.put_zq_vector(&self.y);
        s.put_u64(self.triples.len() as u64);
        for t in &self.triples {
            s.put_u32(t.h);
            s.put_u32(t.i);
            s.put_u32(t.j);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticWitness(pub ZqVector);

pub fn witness_check(stmt: &QuadraticStatement, wit: &QuadraticWitness) -> Result<bool> {
    let q = stmt.modulus();
    if wit.0.modulus() != q {
        return Err(Error::ModulusMismatch(q.value(), wit.0.modulus().value()));
    }
    if wit.0.len() != stmt.n_vars() {
        return Err(Error::Dimension(format!("witness length {} vs {} variables", wit.0.len(), stmt.n_vars())));
    }
    let x = wit.0.as_slice();
    let products = stmt.triples.iter().all(|t| x[t.h as usize] == q.mul(x[t.i as usize], x[t.j as usize]));
    Ok(products && stmt.a.mul_vec(&wit.0)? == stmt.y)
}

/// First index of a failing row or triple, for diagnostics.
pub fn first_violation(stmt: &QuadraticStatement, wit: &QuadraticWitness) -> Result<Option<String>> {
    let q = stmt.modulus();
    let ax = stmt.a.mul_vec(&wit.0)?;
    if let Some(r) = (0..ax.len()).find(|&r| ax.get(r) != stmt.y.get(r)) {
        return Ok(Some(format!("row {r}: {} != {}", ax.get(r), stmt.y.get(r))));
    }
    let x = wit.0.as_slice();
    Ok(stmt
        .triples
        .iter()
        .position(|t| x[t.h as usize] != q.mul(x[t.i as usize], x[t.j as usize]))
        .map(|k| format!("triple {k}: {:?}", stmt.triples[k])))
}

/// Prover memory between the commitment and the response.
#[derive(Debug)]
pub struct ProverState {
    x: ZqVector,
    r: ZqVector,
    s: [IntVector; 4],
    c1: ZqVector,
    c3: ZqVector,
    rho: AuxOpening,
    com: AuxCommitment,
}

impl ProverState {
    pub fn commitment(&self) -> AuxCommitment {
        self.com
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaResponse {
    pub c1: ZqVector,
    pub c3: ZqVector,
    pub rho: AuxOpening,
    pub z0: ZqVector,
    pub z1: IntVector,
    pub z2: IntVector,
}

impl SigmaResponse {
    /// Masked vectors are written as residues mod `q`, like the other entries.
    pub fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        let q = self.c1.modulus();
        s.put_zq_vector(&self.c1);
        s.put_zq_vector(&self.c3);
        s.put(&self.rho.0);
        s.put_zq_vector(&self.z0);
        s.put_zq_vector(&ZqVector::from_i64(q, &self.z1.0));
        s.put_zq_vector(&ZqVector::from_i64(q, &self.z2.0));
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.encode(&mut out);
        out
    }

    /// Decodes a response shaped by `crs`.
    pub fn decode(r: &mut Reader<'_>, crs: &BdlopCrs) -> Result<Self> {
        let q = crs.modulus();
        let c1 = r.zq_vector_of(q, crs.b1.rows())?;
        let c3 = r.zq_vector_of(q, crs.b2.rows())?;
        let rho = AuxOpening(r.array()?);
        let z0 = r.zq_vector_of(q, crs.b1.msg_len())?;
        let z1 = r.zq_vector_of(q, crs.b1.cols())?.centered();
        let z2 = r.zq_vector_of(q, crs.b2.cols())?.centered();
        Ok(Self { c1, c3, rho, z0, z1, z2 })
    }

    /// Encoded length for a given shape; every honest response has this size.
    pub fn encoded_len(crs: &BdlopCrs) -> usize {
        let w = crs.modulus().entry_bytes();
        let vec = |n: usize| 13 + n * w;
        vec(crs.b1.rows()) + vec(crs.b2.rows()) + 32 + vec(crs.b1.msg_len()) + vec(crs.b1.cols()) + vec(crs.b2.cols())
    }
}

/// One accepting or candidate conversation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaTranscript {
    pub com: AuxCommitment,
    pub challenge: i64,
    pub response: SigmaResponse,
}

fn check_shapes(crs: &BdlopCrs, stmt: &QuadraticStatement) -> Result<()> {
    if crs.modulus() != stmt.modulus() {
        return Err(Error::ModulusMismatch(crs.modulus().value(), stmt.modulus().value()));
    }
    if crs.b1.msg_len() != stmt.n_vars() || crs.b2.msg_len() != stmt.triples.len() {
        return Err(Error::Dimension(format!(
            "crs sized for {} variables and {} triples, statement has {} and {}",
            crs.b1.msg_len(),
            crs.b2.msg_len(),
            stmt.n_vars(),
            stmt.triples.len()
        )));
    }
    Ok(())
}

fn payload(t: &ZqVector, c: [&ZqVector; 4]) -> Vec<u8> {
    let mut out = Vec::new();
    out.put_zq_vector(t);
    for v in c {
        out.put_zq_vector(v);
    }
    out
}

pub fn sigma_commit<R: Rng + ?Sized>(
    crs: &BdlopCrs,
    stmt: &QuadraticStatement,
    wit: &QuadraticWitness,
    rng: &mut R,
) -> Result<(AuxCommitment, ProverState)> {
    check_shapes(crs, stmt)?;
    if !witness_check(stmt, wit)? {
        return Err(Error::Witness("witness does not satisfy the statement".into()));
    }
    let q = stmt.modulus();
    let x = wit.0.clone();
    let r = ZqVector::uniform(q, stmt.n_vars(), rng);
    let t = stmt.a.mul_vec(&r)?;

    let narrow = DiscreteGaussian::new(crs.sigma1)?;
    let wide = DiscreteGaussian::new(crs.sigma2)?;
    let s1 = narrow.sample_vec(crs.b1.cols(), rng);
    let s2 = wide.sample_vec(crs.b1.cols(), rng);
    let s3 = narrow.sample_vec(crs.b2.cols(), rng);
    let s4 = wide.sample_vec(crs.b2.cols(), rng);

    let c1 = crs.b1.commit(&s1, &x)?;
    let c2 = crs.b1.commit(&s2, &r)?;
    let (xs, rs) = (x.as_slice(), r.as_slice());
    let (a, b): (Vec<u64>, Vec<u64>) = stmt
        .triples
        .iter()
        .map(|t| {
            let (h, i, j) = (t.h as usize, t.i as usize, t.j as usize);
            let cross = q.add(q.mul(rs[i], xs[j]), q.mul(rs[j], xs[i]));
            (q.sub(rs[h], cross), q.mul(rs[i], rs[j]))
        })
        .unzip();
    let c3 = crs.b2.commit(&s3, &ZqVector::from_u64(q, a))?;
    let c4 = crs.b2.commit(&s4, &ZqVector::from_u64(q, b))?;

    let bytes = payload(&t, [&c1, &c2, &c3, &c4]);
    let (com, rho) = aux_commit(&[&bytes], rng);
    Ok((com, ProverState { x, r, s: [s1, s2, s3, s4], c1, c3, rho, com }))
}

fn scaled_add(ch: i64, a: &IntVector, sign: i64, b: &IntVector) -> IntVector {
    IntVector(a.0.iter().zip(&b.0).map(|(&x, &y)| ch * x + sign * y).collect())
}

/// Response to `challenge`, or `None` when rejection sampling aborts.
pub fn sigma_respond<R: Rng + ?Sized>(
    crs: &BdlopCrs,
    state: &ProverState,
    challenge: i64,
    rng: &mut R,
) -> Result<Option<SigmaResponse>> {
    if challenge.unsigned_abs() > crs.p as u64 {
        return Err(Error::Range(format!("challenge {challenge} outside [-{0}, {0}]", crs.p)));
    }
    let q = crs.modulus();
    let ch = q.from_i64(challenge);
    let z0 = state.x.scale(ch).add(&state.r)?;
    let [s1, s2, s3, s4] = &state.s;
    let z1 = scaled_add(challenge, s1, 1, s2);
    let z2 = scaled_add(challenge, s3, -1, s4);
    let shift = IntVector(s1.0.iter().chain(&s3.0).map(|&v| challenge * v).collect());
    let p = rejection_prob(&shift, &z1.concat(&z2), crs.sigma2, crs.m_rej)?;
    if rng.random::<f64>() >= p {
        return Ok(None);
    }
    Ok(Some(SigmaResponse { c1: state.c1.clone(), c3: state.c3.clone(), rho: state.rho, z0, z1, z2 }))
}

/// Norm bound `2·sqrt(dim)·(σ2 + p·σ1)` on each masked response.
pub fn response_bound(crs: &BdlopCrs, dim: usize) -> f64 {
    2.0 * (dim as f64).sqrt() * (crs.sigma2 + crs.p as f64 * crs.sigma1)
}

pub fn sigma_verify(
    crs: &BdlopCrs,
    stmt: &QuadraticStatement,
    com: &AuxCommitment,
    challenge: i64,
    rsp: &SigmaResponse,
) -> bool {
    verify_inner(crs, stmt, com, challenge, rsp).unwrap_or(false)
}

fn verify_inner(
    crs: &BdlopCrs,
    stmt: &QuadraticStatement,
    com: &AuxCommitment,
    challenge: i64,
    rsp: &SigmaResponse,
) -> Result<bool> {
    check_shapes(crs, stmt)?;
    if challenge.unsigned_abs() > crs.p as u64 {
        return Ok(false);
    }
    let q = crs.modulus();
    let shaped = rsp.c1.len() == crs.b1.rows()
        && rsp.c3.len() == crs.b2.rows()
        && rsp.z0.len() == stmt.n_vars()
        && [&rsp.c1, &rsp.c3, &rsp.z0].iter().all(|v| v.modulus() == q);
    if !shaped {
        return Ok(false);
    }
    for (z, dim) in [(&rsp.z1, crs.b1.cols()), (&rsp.z2, crs.b2.cols())] {
        let bound = response_bound(crs, dim);
        if z.len() != dim || z.l2_norm_sq() as f64 > bound * bound {
            return Ok(false);
        }
    }

    let ch = q.from_i64(challenge);
    let z0 = rsp.z0.as_slice();
    let d: Vec<u64> = stmt
        .triples
        .iter()
        .map(|t| q.sub(q.mul(ch, z0[t.h as usize]), q.mul(z0[t.i as usize], z0[t.j as usize])))
        .collect();
    let t = stmt.a.mul_vec(&rsp.z0)?.sub(&stmt.y.scale(ch))?;
    let c2 = crs.b1.commit(&rsp.z1, &rsp.z0)?.sub(&rsp.c1.scale(ch))?;
    let c4 = rsp.c3.scale(ch).sub(&crs.b2.commit(&rsp.z2, &ZqVector::from_u64(q, d))?)?;
    let bytes = payload(&t, [&rsp.c1, &c2, &rsp.c3, &c4]);
    Ok(aux_verify(com, &[&bytes], &rsp.rho))
}

/// Recovers a witness from three accepting transcripts on one commitment.
pub fn sigma_extract(
    crs: &BdlopCrs,
    stmt: &QuadraticStatement,
    transcripts: &[SigmaTranscript; 3],
) -> Result<QuadraticWitness> {
    let com = transcripts[0].com;
    let chs: Vec<i64> = transcripts.iter().map(|t| t.challenge).collect();
    if chs[0] == chs[1] || chs[0] == chs[2] || chs[1] == chs[2] {
        return Err(Error::Param("extraction needs pairwise distinct challenges".into()));
    }
    if transcripts.iter().any(|t| t.com != com || !sigma_verify(crs, stmt, &com, t.challenge, &t.response)) {
        return Err(Error::Witness("transcripts do not all accept on one commitment".into()));
    }
    let q = stmt.modulus();
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let (ta, tb) = (&transcripts[a], &transcripts[b]);
        let inv = q.inv(q.from_i64(ta.challenge - tb.challenge))?;
        let cand = QuadraticWitness(ta.response.z0.sub(&tb.response.z0)?.scale(inv));
        if witness_check(stmt, &cand)? {
            return Ok(cand);
        }
    }
    Err(Error::Witness("no transcript pair yields a witness".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commit::{bdlop_setup, CrsShape};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    const Q: u64 = 1_000_000_007;

    fn q() -> Modulus {
        Modulus::new(Q).unwrap()
    }

    /// Random statement with a planted witness: `x = (b, b², u, v)` blocks of
    /// bits, their squares and free entries, constrained by random rows.
    fn planted(n_bits: usize, rows: usize, rng: &mut ChaCha20Rng) -> (QuadraticStatement, QuadraticWitness) {
        let n = 2 * n_bits + 4;
        let mut x: Vec<u64> = (0..n_bits).map(|_| rng.random_range(0..2)).collect();
        x.extend(x.clone());
        x.extend((0..4).map(|_| q().uniform(rng)));
        let mut triples: Vec<Triple> = (0..n_bits).map(|k| Triple::new(k, k, k)).collect();
        triples.extend((0..n_bits).map(|k| Triple::new(n_bits + k, k, n_bits + k)));
        let mut a = SparseZqMatrix::new(q(), n);
        for _ in 0..rows {
            a.push_row((0..n).map(|c| (c, q().uniform(rng)))).unwrap();
        }
        let x = ZqVector::from_u64(q(), x);
        let y = a.mul_vec(&x).unwrap();
        (QuadraticStatement::new(a, y, triples).unwrap(), QuadraticWitness(x))
    }

    fn crs_for(stmt: &QuadraticStatement, rng: &mut ChaCha20Rng) -> BdlopCrs {
        let (l1, l2) = (4, 4);
        let sigma1 = (2.0 * l2 as f64 / std::f64::consts::PI).sqrt();
        let l = (2 * l1 + 2 * l2 + stmt.n_vars() + stmt.triples().len()) as f64;
        let shape = CrsShape {
            q: q(),
            l1,
            l2,
            n_vars: stmt.n_vars(),
            n_triples: stmt.triples().len(),
            sigma1,
            sigma2: 2.0 * 2.0 * l * l.log2() * sigma1,
            p: 2,
            m_rej: 1.5,
        };
        bdlop_setup(&shape, rng)
    }

    fn accept<R: Rng>(crs: &BdlopCrs, state: &ProverState, ch: i64, rng: &mut R) -> SigmaResponse {
        loop {
            if let Some(r) = sigma_respond(crs, state, ch, rng).unwrap() {
                return r;
            }
        }
    }

    #[test]
    fn witness_check_examples() {
        let mut a = SparseZqMatrix::new(Modulus::new(5).unwrap(), 1);
        a.push_row([(0, 1)]).unwrap();
        let y0 = ZqVector::zero(Modulus::new(5).unwrap(), 1);
        let stmt = QuadraticStatement::new(a.clone(), y0, vec![Triple::new(0, 0, 0)]).unwrap();
        assert!(witness_check(&stmt, &QuadraticWitness(ZqVector::zero(Modulus::new(5).unwrap(), 1))).unwrap());
        let two = ZqVector::from_u64(Modulus::new(5).unwrap(), vec![2]);
        let stmt2 = QuadraticStatement::new(a, two.clone(), vec![Triple::new(0, 0, 0)]).unwrap();
        assert!(!witness_check(&stmt2, &QuadraticWitness(two)).unwrap());
        assert!(witness_check(&stmt2, &QuadraticWitness(ZqVector::zero(Modulus::new(5).unwrap(), 2))).is_err());
    }

    #[test]
    fn statement_validation_and_encoding() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let (stmt, _) = planted(3, 2, &mut rng);
        let bytes = stmt.to_bytes();
        let back = QuadraticStatement::decode(&mut Reader::new(&bytes)).unwrap();
        assert_eq!(back.fingerprint(), stmt.fingerprint());
        assert_eq!(back.triples(), stmt.triples());
        let bad = QuadraticStatement::new(stmt.matrix().clone(), stmt.target().clone(), vec![Triple::new(99, 0, 0)]);
        assert!(matches!(bad, Err(Error::Dimension(_))));
    }

    #[test]
    fn commit_products_and_determinism() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let (stmt, wit) = planted(1, 1, &mut rng);
        let crs = crs_for(&stmt, &mut rng);
        let (c1, s1) = sigma_commit(&crs, &stmt, &wit, &mut ChaCha20Rng::seed_from_u64(9)).unwrap();
        let (c2, _) = sigma_commit(&crs, &stmt, &wit, &mut ChaCha20Rng::seed_from_u64(9)).unwrap();
        assert_eq!(c1, c2);
        // second triple is (1, 0, 1): its b entry is r[0]·r[1]
        let qq = q();
        let b = qq.mul(s1.r.get(0), s1.r.get(1));
        let msg = crs.b2.commit(&s1.s[3], &ZqVector::from_u64(qq, vec![qq.mul(s1.r.get(0), s1.r.get(0)), b])).unwrap();
        let t = stmt.matrix().mul_vec(&s1.r).unwrap();
        let c2v = crs.b1.commit(&s1.s[1], &s1.r).unwrap();
        let bytes = payload(&t, [&s1.c1, &c2v, &s1.c3, &msg]);
        assert!(aux_verify(&c1, &[&bytes], &s1.rho));
    }

    #[test]
    fn zero_challenge_is_plain_masking() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let (stmt, wit) = planted(2, 2, &mut rng);
        let crs = crs_for(&stmt, &mut rng);
        let (_, st) = sigma_commit(&crs, &stmt, &wit, &mut rng).unwrap();
        let rsp = accept(&crs, &st, 0, &mut rng);
        assert_eq!(rsp.z0, st.r);
        assert_eq!(rsp.z1, st.s[1]);
        assert_eq!(rsp.z2.0, st.s[3].0.iter().map(|v| -v).collect::<Vec<_>>());
        assert!(sigma_respond(&crs, &st, 3, &mut rng).is_err());
    }

    #[test]
    fn honest_transcripts_verify_and_tampering_fails() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let (stmt, wit) = planted(4, 3, &mut rng);
        let crs = crs_for(&stmt, &mut rng);
        for _ in 0..100 {
            let (com, st) = sigma_commit(&crs, &stmt, &wit, &mut rng).unwrap();
            let ch = rng.random_range(-2..=2);
            let rsp = accept(&crs, &st, ch, &mut rng);
            assert!(sigma_verify(&crs, &stmt, &com, ch, &rsp));
            let decoded = SigmaResponse::decode(&mut Reader::new(&rsp.to_bytes()), &crs).unwrap();
            assert_eq!(decoded, rsp);
            assert_eq!(rsp.to_bytes().len(), SigmaResponse::encoded_len(&crs));

            let mut big = rsp.clone();
            big.z1.0.iter_mut().for_each(|v| *v *= 3);
            assert!(!sigma_verify(&crs, &stmt, &com, ch, &big));
            big = rsp.clone();
            big.z2.0[0] = response_bound(&crs, big.z2.len()) as i64 + 1;
            assert!(!sigma_verify(&crs, &stmt, &com, ch, &big));
            let (other, _) = sigma_commit(&crs, &stmt, &wit, &mut rng).unwrap();
            assert!(!sigma_verify(&crs, &stmt, &other, ch, &rsp));
            let wrong_ch = if ch == 2 { 1 } else { ch + 1 };
            assert!(!sigma_verify(&crs, &stmt, &com, wrong_ch, &rsp));
        }
    }

    #[test]
    fn abort_rate_matches_rejection_constant() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let (stmt, wit) = planted(2, 1, &mut rng);
        let crs = crs_for(&stmt, &mut rng);
        let (_, st) = sigma_commit(&crs, &stmt, &wit, &mut rng).unwrap();
        let runs = 10_000;
        let aborts = (0..runs).filter(|_| sigma_respond(&crs, &st, 2, &mut rng).unwrap().is_none()).count();
        let rate = aborts as f64 / runs as f64;
        assert!((rate - (1.0 - 1.0 / 1.5)).abs() < 0.05, "abort rate {rate}");
    }

    #[test]
    fn plant_and_extract() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        for _ in 0..20 {
            let (stmt, wit) = planted(rng.random_range(1..=8), 2, &mut rng);
            let crs = crs_for(&stmt, &mut rng);
            let (com, st) = sigma_commit(&crs, &stmt, &wit, &mut rng).unwrap();
            let ts = [-1i64, 0, 2].map(|ch| SigmaTranscript { com, challenge: ch, response: accept(&crs, &st, ch, &mut rng) });
            assert_eq!(sigma_extract(&crs, &stmt, &ts).unwrap(), wit);
            let mut same = ts.clone();
            same[1] = same[0].clone();
            assert!(matches!(sigma_extract(&crs, &stmt, &same), Err(Error::Param(_))));
            let (com2, st2) = sigma_commit(&crs, &stmt, &wit, &mut rng).unwrap();
            let mut mixed = ts.clone();
            mixed[2] = SigmaTranscript { com: com2, challenge: 2, response: accept(&crs, &st2, 2, &mut rng) };
            assert!(sigma_extract(&crs, &stmt, &mixed).is_err());
        }
    }

    #[test]
    fn rejects_bad_witness_and_mismatched_crs() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let (stmt, wit) = planted(2, 2, &mut rng);
        let crs = crs_for(&stmt, &mut rng);
        let mut bad = wit.clone();
        bad.0.set(0, 5);
        assert!(matches!(sigma_commit(&crs, &stmt, &bad, &mut rng), Err(Error::Witness(_))));
        let (other, _) = planted(3, 2, &mut rng);
        assert!(sigma_commit(&crs, &other, &wit, &mut rng).is_err());
        assert!(first_violation(&stmt, &bad).unwrap().is_some());
        assert!(first_violation(&stmt, &wit).unwrap().is_none());
    }
}
