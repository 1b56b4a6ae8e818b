//! The traceable group signature scheme over the building blocks.

pub mod artifact;
pub mod harness;
pub mod join;
pub mod keys;
pub mod registry;
pub mod reveal;
pub mod signature;

pub use artifact::{read_artifact, seal, unseal, write_artifact, FORMAT_VERSION, MAGIC};
pub use harness::{HonestParties, Member, Step, Violation};
pub use join::{join_gm_process, join_user_finalize, join_user_request, JoinRequest, JoinResponse, PendingUser, UserSecret};
pub use keys::{keygen, sample_lwe_noise, GroupKeys, GroupPublicKey, ManagerKey, OpenerKey};
pub use registry::{audit_opened_id, AuditFinding, Certificate, Registry, RegistryEntry};
pub use reveal::{reveal, RevealSolver};
pub use signature::{
    claim, claim_verify, open, reconstruct_sign_statement, sign, sign_proof_context, trace, tracing_matrix, tracing_residual, verify,
    ClaimProof, GroupSignature, TracingTrapdoor,
};

use crate::lattice::ParamSet;
use crate::Result;

/// Parameters for `lambda` and group size `N = 2^l - 1`.
pub fn setup(lambda: usize, group_size: u64) -> Result<ParamSet> {
    ParamSet::setup(lambda, group_size)
}
