//! Discrete Gaussians, gadget trapdoors and rejection sampling.

pub mod gaussian;
pub mod rejection;
pub mod trapdoor;

pub use gaussian::{sample_centered, sample_dgauss_vec, sample_dgauss_z, smoothing_constant, DiscreteGaussian};
pub use rejection::rejection_prob;
pub use trapdoor::{
    required_width, sample_d, sample_kernel_basis, trapdoor_gen_binary, trapdoor_gen_ternary, width_floor, GTrapdoor,
    GadgetSampler, PreimageSampler, TrapdoorKind,
};

/// Deterministic seedable generator used throughout.
pub type RngHandle = rand_chacha::ChaCha20Rng;

pub fn rng_from_seed(seed: u64) -> RngHandle {
    rand::SeedableRng::seed_from_u64(seed)
}
