//! Certificate, one-time and user signatures.

pub mod ots;
pub mod tagsig;
pub mod usersig;

pub use ots::{ots_keygen, ots_sign, ots_verify, OtsKeypair, OtsPublicKey, OtsSecretKey, OtsSignature};
pub use tagsig::{
    certificate_syndrome, certificate_target, message_bits, tagsig_keygen, tagsig_sign, tagsig_verify, TagSigKeypair,
    TagSigPublicKey, TagSigSecretKey, TagSignature, TagSigner,
};
pub use usersig::{usersig_keygen, usersig_sign, usersig_verify, UserPublicKey, UserSignature, UserSigningKey};

use crate::error::Result;

/// Signing over byte strings, shared by the one-time and user schemes.
pub trait MessageSigner {
    type Signature;

    fn sign_message(&mut self, msg: &[u8]) -> Result<Self::Signature>;
}

pub trait MessageVerifier {
    type Signature;

    fn verify_message(&self, msg: &[u8], sig: &Self::Signature) -> bool;
}

impl MessageSigner for OtsSecretKey {
    type Signature = OtsSignature;

    fn sign_message(&mut self, msg: &[u8]) -> Result<OtsSignature> {
        ots_sign(self, msg)
    }
}

impl MessageVerifier for OtsPublicKey {
    type Signature = OtsSignature;

    fn verify_message(&self, msg: &[u8], sig: &OtsSignature) -> bool {
        ots_verify(self, msg, sig)
    }
}

impl MessageSigner for UserSigningKey {
    type Signature = UserSignature;

    fn sign_message(&mut self, msg: &[u8]) -> Result<UserSignature> {
        usersig_sign(self, msg)
    }
}

impl MessageVerifier for UserPublicKey {
    type Signature = UserSignature;

    fn verify_message(&self, msg: &[u8], sig: &UserSignature) -> bool {
        usersig_verify(self, msg, sig)
    }
}
