//! Zero-knowledge arguments for linear-plus-quadratic relations.

pub mod nizk;
pub mod sigma;

pub use nizk::{nizk_prove, nizk_verify, nizk_verify_bytes, NizkProof, OraclePair, SokContext};
pub use sigma::{
    sigma_commit, sigma_extract, sigma_respond, sigma_verify, witness_check, QuadraticStatement, QuadraticWitness,
    SigmaResponse, SigmaTranscript, Triple,
};
