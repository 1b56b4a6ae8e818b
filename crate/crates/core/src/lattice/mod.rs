//! Modular linear algebra, decompositions, norms and the global parameter set.

pub mod decompose;
pub mod linalg;
pub mod params;
mod zq;

pub use decompose::{bin_decompose, bin_recompose, gadget_matrix, range_decompose, range_gadget, range_recompose, range_width};
pub use zq::{
    inf_norm, is_prime, l2_norm_sq, next_prime, BitVector, IntMatrix, IntVector, Modulus, SparseZqMatrix, ZqMatrix, ZqVector,
    MAX_MODULUS,
};
pub use params::{validate_params, ConstraintReport, ConstraintRow, ParamSet};
