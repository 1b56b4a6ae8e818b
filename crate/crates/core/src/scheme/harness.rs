//! Scripted honest-party runs that check the correctness properties after
//! every step.

use super::join::{join_gm_process, join_user_finalize, join_user_request, UserSecret};
use super::keys::{keygen, GroupKeys};
use super::registry::Certificate;
use super::reveal::reveal;
use super::signature::{claim, claim_verify, open, sign, trace, verify, GroupSignature, TracingTrapdoor};
use crate::error::Result;
use crate::lattice::ParamSet;
use crate::sigs::{usersig_keygen, UserSigningKey};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use std::fmt;

#[derive(Clone, Debug)]
pub struct Member {
    pub id: u64,
    pub usk: UserSecret,
    pub cert: Certificate,
    pub user_sk: UserSigningKey,
}

impl Member {
    pub fn own_trapdoor(&self, keys: &GroupKeys) -> Result<TracingTrapdoor> {
        Ok(TracingTrapdoor { x: self.usk.trapdoor_vector(&keys.gpk)? })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Join,
    Sign { member: usize, msg: Vec<u8> },
    Reveal { member: usize },
    Claim { signature: usize },
    Open { signature: usize },
}

/// A property that failed, with the step that exposed it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub step: usize,
    pub what: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: {}", self.step, self.what)
    }
}

struct Recorded {
    signer: usize,
    msg: Vec<u8>,
    sigma: GroupSignature,
}

pub struct HonestParties {
    pub keys: GroupKeys,
    pub members: Vec<Member>,
    signatures: Vec<Recorded>,
    rng: ChaCha20Rng,
    violations: Vec<Violation>,
    step: usize,
}

impl HonestParties {
    pub fn new(pp: &ParamSet, seed: u64) -> Result<Self> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let keys = keygen(pp, &mut rng)?;
        Ok(Self { keys, members: Vec::new(), signatures: Vec::new(), rng, violations: Vec::new(), step: 0 })
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn signature_count(&self) -> usize {
        self.signatures.len()
    }

    fn flag(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.violations.push(Violation { step: self.step, what: what() });
        }
    }

    pub fn run(&mut self, script: &[Step]) -> Result<()> {
        for s in script {
            self.apply(s)?;
        }
        Ok(())
    }

    pub fn apply(&mut self, step: &Step) -> Result<()> {
        self.step += 1;
        match step {
            Step::Join => self.join(),
            Step::Sign { member, msg } => self.sign(*member, msg),
            Step::Reveal { member } => self.reveal(*member),
            Step::Claim { signature } => self.claim(*signature),
            Step::Open { signature } => self.open(*signature),
        }
    }

    fn join(&mut self) -> Result<()> {
        let (_, mut user_sk) = usersig_keygen(&mut self.rng);
        let GroupKeys { gpk, gsk, registry, .. } = &mut self.keys;
        let (req, pending) = join_user_request(gpk, &mut user_sk, &mut self.rng)?;
        let resp = join_gm_process(gsk, gpk, registry, &req, &mut self.rng)?;
        let (id, usk, cert) = join_user_finalize(gpk, &pending, &resp)?;
        let expected = self.members.len() as u64 + 1;
        self.flag(id == expected, || format!("join issued id {id}, expected {expected}"));
        let member = Member { id, usk, cert, user_sk };
        let td = member.own_trapdoor(&self.keys)?;
        let foreign = self.signatures.iter().filter(|r| trace(&self.keys.gpk, &td, &r.sigma)).count();
        self.flag(foreign == 0, || format!("new member {id} traces {foreign} earlier signatures"));
        self.members.push(member);
        Ok(())
    }

    fn sign(&mut self, member: usize, msg: &[u8]) -> Result<()> {
        let m = &self.members[member];
        let sigma = sign(&self.keys.gpk, &m.usk, &m.cert, msg, &mut self.rng)?;
        let gpk = &self.keys.gpk;
        let ok = verify(gpk, msg, &sigma);
        let opened = open(gpk, &self.keys.osk, msg, &sigma);
        let traces: Vec<bool> = self.members.iter().map(|o| o.own_trapdoor(&self.keys).map(|td| trace(gpk, &td, &sigma))).collect::<Result<_>>()?;
        let id = m.id;
        self.flag(ok, || format!("signature by member {id} does not verify"));
        self.flag(opened == Some(id), || format!("signature by {id} opened to {opened:?}"));
        for (j, t) in traces.into_iter().enumerate() {
            self.flag(t == (j == member), || format!("trace by member {} on signature of {id} gave {t}", j + 1));
        }
        self.signatures.push(Recorded { signer: member, msg: msg.to_vec(), sigma });
        Ok(())
    }

    fn reveal(&mut self, member: usize) -> Result<()> {
        let m = &self.members[member];
        let revealed = reveal(&self.keys.gpk, &self.keys.osk, &self.keys.registry, m.id)?;
        let own = m.own_trapdoor(&self.keys)?;
        let id = m.id;
        self.flag(revealed.as_ref() == Some(&own), || format!("reveal of member {id} differs from its trapdoor"));
        if let Some(td) = revealed {
            let misses = self.signatures.iter().filter(|r| (r.signer == member) != trace(&self.keys.gpk, &td, &r.sigma)).count();
            self.flag(misses == 0, || format!("revealed trapdoor of {id} misclassifies {misses} signatures"));
        }
        Ok(())
    }

    fn claim(&mut self, signature: usize) -> Result<()> {
        let Recorded { signer, msg, sigma } = &self.signatures[signature];
        let gpk = &self.keys.gpk;
        let proof = claim(gpk, &self.members[*signer].usk, msg, sigma, &mut self.rng)?;
        let ok = proof.as_ref().is_some_and(|p| claim_verify(gpk, msg, sigma, p));
        let mut stolen = 0;
        for (j, other) in self.members.iter().enumerate() {
            if j != *signer && claim(gpk, &other.usk, msg, sigma, &mut self.rng)?.is_some() {
                stolen += 1;
            }
        }
        self.flag(ok, || format!("signer cannot claim signature {signature}"));
        self.flag(stolen == 0, || format!("{stolen} non-signers could claim signature {signature}"));
        Ok(())
    }

    fn open(&mut self, signature: usize) -> Result<()> {
        let r = &self.signatures[signature];
        let opened = open(&self.keys.gpk, &self.keys.osk, &r.msg, &r.sigma);
        let id = self.members[r.signer].id;
        self.flag(opened == Some(id), || format!("signature {signature} opened to {opened:?}, signer {id}"));
        Ok(())
    }
}
