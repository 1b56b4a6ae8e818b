use crate::error::{Error, Result};
use crate::lattice::IntVector;
use std::f64::consts::PI;

/// Acceptance probability `min(1, D_s(z) / (M · D_{s,v}(z)))` that makes an
/// accepted `z = v + y`, `y ← D_s`, independent of the shift `v`.
pub fn rejection_prob(v: &IntVector, z: &IntVector, width: f64, m_rej: f64) -> Result<f64> {
    if v.len() != z.len() {
        return Err(Error::Dimension(format!("shift length {} vs response {}", v.len(), z.len())));
    }
    let vv = v.l2_norm_sq() as f64;
    let zv: f64 = v.0.iter().zip(&z.0).map(|(&a, &b)| a as i128 * b as i128).sum::<i128>() as f64;
    let log_ratio = PI * (vv - 2.0 * zv) / (width * width);
    Ok((log_ratio.exp() / m_rej).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn rho(x: &[i64], c: &[i64], s: f64) -> f64 {
        let d: f64 = x.iter().zip(c).map(|(&a, &b)| ((a - b) as f64).powi(2)).sum();
        (-PI * d / (s * s)).exp()
    }

    #[test]
    fn zero_shift_gives_inverse_m() {
        let z = IntVector(vec![5, -3, 2]);
        assert_eq!(rejection_prob(&IntVector::zero(3), &z, 10.0, 1.5).unwrap(), 1.0 / 1.5);
    }

    #[test]
    fn balanced_inner_product_gives_inverse_m() {
        let v = IntVector(vec![2, 0]);
        let z = IntVector(vec![1, 7]);
        assert_eq!(rejection_prob(&v, &z, 3.0, 3.0).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn matches_direct_density_ratio() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..200 {
            let v: Vec<i64> = (0..6).map(|_| rng.random_range(-4..=4)).collect();
            let z: Vec<i64> = (0..6).map(|_| rng.random_range(-12..=12)).collect();
            let s = 20.0;
            let direct = (rho(&z, &[0; 6], s) / (2.0 * rho(&z, &v, s))).min(1.0);
            let got = rejection_prob(&IntVector(v), &IntVector(z), s, 2.0).unwrap();
            assert!((got - direct).abs() <= 1e-12 * direct, "{got} vs {direct}");
        }
    }

    #[test]
    fn length_mismatch() {
        assert!(rejection_prob(&IntVector::zero(2), &IntVector::zero(3), 1.0, 1.0).is_err());
    }
}
