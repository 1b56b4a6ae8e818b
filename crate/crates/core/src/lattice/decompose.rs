use super::zq::{BitVector, Modulus, ZqMatrix, ZqVector};
use crate::error::{Error, Result};

/// `G = [I_n ⊗ (1, 2, ..., 2^{k-1}) | 0]` with `k = ceil(log2 q)`, padded with
/// zero columns up to `width`.
pub fn gadget_matrix(n: usize, q: Modulus, width: usize) -> Result<ZqMatrix> {
    let k = q.bits();
    if width < n * k {
        return Err(Error::Dimension(format!("gadget width {width} below {}", n * k)));
    }
    let mut g = ZqMatrix::zero(q, n, width);
    for i in 0..n {
        for b in 0..k {
            g.set(i, i * k + b, 1u64 << b);
        }
    }
    Ok(g)
}

/// Little-endian binary expansion of every entry, `ceil(log2 q)` bits each.
pub fn bin_decompose(u: &ZqVector) -> BitVector {
    let k = u.modulus().bits();
    let bits = u
        .as_slice()
        .iter()
        .flat_map(|&x| (0..k).map(move |b| ((x >> b) & 1) as u8))
        .collect();
    BitVector::new(bits).expect("shifted bits are binary")
}

pub fn bin_recompose(bits: &BitVector, q: Modulus) -> Result<ZqVector> {
    let k = q.bits();
    if !bits.len().is_multiple_of(k) {
        return Err(Error::Dimension(format!("{} bits not a multiple of {k}", bits.len())));
    }
    let data = bits
        .as_slice()
        .chunks(k)
        .map(|c| c.iter().enumerate().fold(0u64, |acc, (b, &bit)| acc + ((bit as u64) << b)))
        .collect();
    Ok(ZqVector::from_u64(q, data))
}

/// Number of entries in the range gadget for bound `beta`.
pub fn range_width(beta: u64) -> usize {
    (64 - (2 * beta).leading_zeros()) as usize
}

/// Weights `floor((2β + 2^{j-1}) / 2^j)` for `j = 1..k`; every `a ∈ [0, 2β]` is a
/// subset sum of them and their total is exactly `2β`.
pub fn range_gadget(beta: u64) -> Result<Vec<i64>> {
    if beta == 0 {
        return Err(Error::Range("range bound must be positive".into()));
    }
    let two_beta = 2 * beta as u128;
    Ok((1..=range_width(beta))
        .map(|j| ((two_beta + (1u128 << (j - 1))) >> j) as i64)
        .collect())
}

/// Greedy decomposition of `a ∈ [0, 2β]` over the range gadget, largest weight first.
pub fn range_decompose(a: u64, beta: u64) -> Result<BitVector> {
    if a > 2 * beta {
        return Err(Error::Range(format!("{a} outside [0, {}]", 2 * beta)));
    }
    let g = range_gadget(beta)?;
    let mut rest = a as i64;
    let bits = g
        .iter()
        .map(|&w| {
            if rest >= w {
                rest -= w;
                1
            } else {
                0
            }
        })
        .collect();
    debug_assert_eq!(rest, 0);
    BitVector::new(bits)
}

pub fn range_recompose(bits: &BitVector, beta: u64) -> Result<u64> {
    let g = range_gadget(beta)?;
    if bits.len() != g.len() {
        return Err(Error::Dimension(format!("{} bits for a width-{} range gadget", bits.len(), g.len())));
    }
    Ok(bits.as_slice().iter().zip(&g).map(|(&b, &w)| b as u64 * w as u64).sum())
}
