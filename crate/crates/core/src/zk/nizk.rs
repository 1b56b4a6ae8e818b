//! Non-interactive signature of knowledge from the three-move argument.
//!
//! Each of `κ` repetitions commits once, answers four distinct challenges,
//! and publishes hashes of all four answers. A hash over the whole transcript
//! selects which answer is opened in each repetition.

use crate::commit::{AuxCommitment, BdlopCrs};
use crate::encoding::{Reader, Sink};
use crate::error::{Error, Result};
use crate::oracles::{digest32, ro_challenge_indices, ro_response_hash, OracleTag};
use crate::zk::sigma::{sigma_commit, sigma_respond, sigma_verify, QuadraticStatement, QuadraticWitness, SigmaResponse};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Challenges answered per repetition.
pub const CHALLENGES_PER_REP: usize = 4;

/// Fresh commitments tried per repetition before giving up.
pub const RESTART_BUDGET: usize = 1024;

/// The pair of oracles used by one kind of proof.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OraclePair {
    pub select: OracleTag,
    pub hide: OracleTag,
}

impl OraclePair {
    pub const SIGN: Self = Self { select: OracleTag::Sign1, hide: OracleTag::Sign2 };
    pub const CLAIM: Self = Self { select: OracleTag::Claim1, hide: OracleTag::Claim2 };
}

/// Data bound into the selection hash besides the CRS and the statement.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SokContext {
    pub message: Vec<u8>,
    pub extra: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Repetition {
    pub com: AuxCommitment,
    pub challenges: [i64; CHALLENGES_PER_REP],
    pub hashes: [Vec<u8>; CHALLENGES_PER_REP],
    pub response: SigmaResponse,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NizkProof {
    pub p: u32,
    pub crs_fingerprint: [u8; 32],
    pub reps: Vec<Repetition>,
}

impl NizkProof {
    pub fn kappa(&self) -> usize {
        self.reps.len()
    }

    pub fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u32(self.reps.len() as u32);
        s.put_u32(self.p);
        s.put(&self.crs_fingerprint);
        for rep in &self.reps {
            s.put(&rep.com.0);
            for &c in &rep.challenges {
                s.put(&(c as i16).to_le_bytes());
            }
            for h in &rep.hashes {
                s.put_u64(h.len() as u64);
                s.put(h);
            }
            rep.response.encode(s);
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.encode(&mut out);
        out
    }

    pub fn decode(r: &mut Reader<'_>, crs: &BdlopCrs) -> Result<Self> {
        let kappa = r.u32()? as usize;
        let p = r.u32()?;
        let crs_fingerprint = r.array()?;
        let rsp_len = SigmaResponse::encoded_len(crs);
        if kappa.saturating_mul(rsp_len) > r.remaining() {
            return Err(Error::Decode(format!("{kappa} repetitions exceed the input")));
        }
        let mut reps = Vec::with_capacity(kappa);
        for _ in 0..kappa {
            let com = AuxCommitment(r.array()?);
            let mut challenges = [0i64; CHALLENGES_PER_REP];
            for c in &mut challenges {
                *c = i16::from_le_bytes(r.array()?) as i64;
            }
            let mut hashes: [Vec<u8>; CHALLENGES_PER_REP] = Default::default();
            for h in &mut hashes {
                let len = r.u64()? as usize;
                if len != rsp_len {
                    return Err(Error::Decode(format!("hash of {len} bytes, responses have {rsp_len}")));
                }
                *h = r.take(len)?.to_vec();
            }
            let response = SigmaResponse::decode(r, crs)?;
            reps.push(Repetition { com, challenges, hashes, response });
        }
        Ok(Self { p, crs_fingerprint, reps })
    }

    pub fn from_bytes(bytes: &[u8], crs: &BdlopCrs) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let proof = Self::decode(&mut r, crs)?;
        r.finish()?;
        Ok(proof)
    }

    /// Total size of the published response hashes.
    pub fn hash_block_bytes(&self) -> usize {
        self.reps.iter().flat_map(|r| r.hashes.iter()).map(Vec::len).sum()
    }
}

fn context_header(crs: &BdlopCrs, stmt: &QuadraticStatement, ctx: &SokContext) -> Vec<u8> {
    let mut out = Vec::new();
    out.put(&crs.fingerprint());
    out.put(&stmt.fingerprint());
    out.put_bytes(&ctx.message);
    out.put_bytes(&ctx.extra);
    out
}

fn rep_header(com: &AuxCommitment, challenges: &[i64; CHALLENGES_PER_REP]) -> Vec<u8> {
    let mut out = com.0.to_vec();
    for &c in challenges {
        out.extend_from_slice(&(c as i16).to_le_bytes());
    }
    out
}

/// Opened index per repetition, in `0..4`.
fn selection(tag: OracleTag, header: &[u8], reps: &[(Vec<u8>, &[Vec<u8>; CHALLENGES_PER_REP])]) -> Vec<usize> {
    let mut parts: Vec<&[u8]> = vec![header];
    for (head, hashes) in reps {
        parts.push(head);
        parts.extend(hashes.iter().map(Vec::as_slice));
    }
    ro_challenge_indices(tag, &parts, reps.len()).into_iter().map(|j| j as usize - 1).collect()
}

struct Prepared {
    com: AuxCommitment,
    challenges: [i64; CHALLENGES_PER_REP],
    hashes: [Vec<u8>; CHALLENGES_PER_REP],
    responses: Vec<SigmaResponse>,
}

fn prepare_repetition(
    crs: &BdlopCrs,
    stmt: &QuadraticStatement,
    wit: &QuadraticWitness,
    hide: OracleTag,
    rng: &mut ChaCha20Rng,
) -> Result<Prepared> {
    let range = 2 * crs.p as usize + 1;
    for _ in 0..RESTART_BUDGET {
        let picks = sample(rng, range, CHALLENGES_PER_REP);
        let mut challenges = [0i64; CHALLENGES_PER_REP];
        for (c, k) in challenges.iter_mut().zip(picks) {
            *c = k as i64 - crs.p as i64;
        }
        let (com, state) = sigma_commit(crs, stmt, wit, rng)?;
        let responses: Option<Vec<SigmaResponse>> = challenges
            .iter()
            .map(|&ch| sigma_respond(crs, &state, ch, rng))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .collect();
        if let Some(responses) = responses {
            let hashes = std::array::from_fn(|k| ro_response_hash(hide, &responses[k].to_bytes()));
            return Ok(Prepared { com, challenges, hashes, responses });
        }
    }
    Err(Error::Budget(format!("no repetition without an abort in {RESTART_BUDGET} attempts")))
}

pub fn nizk_prove<R: Rng + ?Sized>(
    crs: &BdlopCrs,
    stmt: &QuadraticStatement,
    wit: &QuadraticWitness,
    ctx: &SokContext,
    oracles: OraclePair,
    kappa: usize,
    rng: &mut R,
) -> Result<NizkProof> {
    if crs.p < 2 {
        return Err(Error::Param(format!("challenge range [-{0}, {0}] has fewer than four values", crs.p)));
    }
    let mut master = [0u8; 32];
    rng.fill(&mut master);
    let prepared = (0..kappa as u64)
        .map(|i| {
            let mut stream = ChaCha20Rng::from_seed(digest32(b"NIZK-REP", &[&master, &i.to_le_bytes()]));
            prepare_repetition(crs, stmt, wit, oracles.hide, &mut stream)
        })
        .collect::<Result<Vec<_>>>()?;

    let header = context_header(crs, stmt, ctx);
    let heads: Vec<_> = prepared.iter().map(|p| (rep_header(&p.com, &p.challenges), &p.hashes)).collect();
    let picks = selection(oracles.select, &header, &heads);
    let reps = prepared
        .into_iter()
        .zip(picks)
        .map(|(mut p, j)| Repetition {
            com: p.com,
            challenges: p.challenges,
            hashes: p.hashes,
            response: p.responses.swap_remove(j),
        })
        .collect();
    Ok(NizkProof { p: crs.p, crs_fingerprint: crs.fingerprint(), reps })
}

pub fn nizk_verify(
    crs: &BdlopCrs,
    stmt: &QuadraticStatement,
    proof: &NizkProof,
    ctx: &SokContext,
    oracles: OraclePair,
    kappa: usize,
) -> bool {
    if proof.reps.len() != kappa || proof.p != crs.p || proof.crs_fingerprint != crs.fingerprint() {
        return false;
    }
    let p = crs.p as i64;
    let well_formed = proof.reps.iter().all(|rep| {
        let c = &rep.challenges;
        c.iter().all(|v| v.abs() <= p) && (0..4).all(|a| (a + 1..4).all(|b| c[a] != c[b]))
    });
    if !well_formed {
        return false;
    }
    let header = context_header(crs, stmt, ctx);
    let heads: Vec<_> = proof.reps.iter().map(|r| (rep_header(&r.com, &r.challenges), &r.hashes)).collect();
    let picks = selection(oracles.select, &header, &heads);
    // hash comparisons are cheap, so all of them run before any algebra
    proof.reps.iter().zip(&picks).all(|(rep, &j)| ro_response_hash(oracles.hide, &rep.response.to_bytes()) == rep.hashes[j])
        && proof.reps.iter().zip(&picks).all(|(rep, &j)| sigma_verify(crs, stmt, &rep.com, rep.challenges[j], &rep.response))
}

/// Decodes and verifies; malformed bytes are rejected.
pub fn nizk_verify_bytes(
    crs: &BdlopCrs,
    stmt: &QuadraticStatement,
    bytes: &[u8],
    ctx: &SokContext,
    oracles: OraclePair,
    kappa: usize,
) -> bool {
    NizkProof::from_bytes(bytes, crs).is_ok_and(|p| nizk_verify(crs, stmt, &p, ctx, oracles, kappa))
}
