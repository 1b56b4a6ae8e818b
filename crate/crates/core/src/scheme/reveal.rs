//! Recovering a member's tracing trapdoor from its registered sample.

use super::keys::{GroupPublicKey, OpenerKey};
use super::registry::Registry;
use super::signature::TracingTrapdoor;
use crate::error::Result;
use crate::lattice::linalg::{solve_full_column_rank, IntegerSolver};
use crate::lattice::{IntMatrix, ZqVector};
use crate::samplers::sample_kernel_basis;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// A short basis `S` of the kernel of `B` with `Sᵀ` factored over the integers.
#[derive(Clone, Debug)]
pub struct RevealSolver {
    kernel: IntMatrix,
    solver: IntegerSolver,
}

impl RevealSolver {
    pub fn new(gpk: &GroupPublicKey, osk: &OpenerKey) -> Result<Self> {
        let mut rng = ChaCha20Rng::from_seed(osk.derived_seed(b"REVEAL-BASIS"));
        let kernel = sample_kernel_basis(osk.extractor(gpk)?.sampler(), &mut rng)?;
        let solver = IntegerSolver::new(kernel.transpose())?;
        Ok(Self { kernel, solver })
    }

    pub fn kernel(&self) -> &IntMatrix {
        &self.kernel
    }

    /// The short `e` and the `x` with `y = Bᵀx + e (mod q')`, if they exist.
    pub fn decompose_sample(&self, gpk: &GroupPublicKey, y: &ZqVector) -> Result<Option<(Vec<i64>, ZqVector)>> {
        let pp = &gpk.pp;
        let qp = pp.q_prime;
        if y.modulus() != qp || y.len() != pp.m_b {
            return Ok(None);
        }
        // Sᵀy = Sᵀe (mod q'), and Sᵀe is short enough to lift exactly
        let y_int: Vec<i64> = y.as_slice().iter().map(|&v| v as i64).collect();
        let lifted: Vec<i128> = self.kernel.transpose().mul_vec(&y_int)?.into_iter().map(|v| qp.center(qp.from_i128(v)) as i128).collect();
        let Some(e) = self.solver.solve_bounded(&lifted, pp.b_lwe)? else {
            return Ok(None);
        };
        let rhs = y.sub(&ZqVector::from_i64(qp, &e))?;
        match solve_full_column_rank(&gpk.b.transpose(), &rhs) {
            Ok(x) => Ok(Some((e, x))),
            Err(_) => Ok(None),
        }
    }
}

/// The tracing trapdoor of member `id`, or `None` when it is not registered
/// or its sample does not decompose.
pub fn reveal(gpk: &GroupPublicKey, osk: &OpenerKey, registry: &Registry, id: u64) -> Result<Option<TracingTrapdoor>> {
    let Some(entry) = registry.get(id) else {
        return Ok(None);
    };
    let solver = osk.reveal_solver(gpk)?;
    Ok(solver.decompose_sample(gpk, &entry.cert.y)?.map(|(_, x)| TracingTrapdoor { x }))
}
