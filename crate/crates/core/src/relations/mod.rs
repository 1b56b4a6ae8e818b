//! Compilation of the scheme's modular statements into one quadratic relation.

pub mod blocks;
pub mod compiler;

pub use blocks::{
    assemble_claim_statement, assemble_claim_witness, assemble_sign_statement, assemble_sign_witness, build_cert_block,
    build_enc_block, build_lwe_sample_block, build_lwe_secret_block, build_sis_block, claim_relation, claim_shape,
    q_lower_bounds, sign_relation, sign_shape, CertSegments, ClaimPublic, ClaimSecrets, RelationShape, SignPublic,
    SignSecrets,
};
pub use compiler::{
    lift_and_binarize, Assignment, BlockStatement, Coef, Encoding, Relation, RelationBuilder, RowDraft, Segment, SegmentId,
    WitnessLayout,
};
