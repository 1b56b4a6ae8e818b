//! Discrete Gaussian sampling over the integers.
//!
//! Widths follow the `ρ_s(x) = exp(-π x² / s²)` convention, so a width `s`
//! corresponds to a standard deviation of `s / sqrt(2π)`.

use crate::error::{Error, Result};
use crate::lattice::IntVector;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

/// Samples further than this many widths from the center are never produced.
pub const TAIL_CUT: f64 = 12.0;

/// Widths up to this value use an inversion table; wider ones use convolution.
const TABLE_MAX_WIDTH: f64 = 4096.0;

/// Width of the integer rounding step in the convolution sampler.
const ROUNDING_WIDTH: f64 = 8.0;

/// Statistical-distance target for smoothing-style width floors.
pub const SMOOTHING_EPSILON_LOG2: f64 = -40.0;

/// `sqrt(ln(2·dim/ε)/π)` with `ε = 2^-40`: the multiplier that turns a basis
/// length into a width above the smoothing parameter.
pub fn smoothing_constant(dim: usize) -> f64 {
    let ln_eps = SMOOTHING_EPSILON_LOG2 * std::f64::consts::LN_2;
    (((2 * dim.max(1)) as f64).ln() - ln_eps).sqrt() / PI.sqrt()
}

#[inline]
fn rho(x: f64, s: f64) -> f64 {
    (-PI * x * x / (s * s)).exp()
}

/// Standard deviation of a width-`s` Gaussian.
pub fn width_to_std(s: f64) -> f64 {
    s / (2.0 * PI).sqrt()
}

/// A reusable sampler for `D_{Z,s}` truncated to `|x| <= 12 s`.
#[derive(Clone, Debug)]
pub struct DiscreteGaussian {
    width: f64,
    bound: i64,
    kind: Kind,
}

#[derive(Clone, Debug)]
enum Kind {
    /// Cumulative probabilities scaled to `2^127`, starting at `-bound`.
    Table(Vec<u128>),
    /// Continuous normal with the given standard deviation, then randomized rounding.
    Convolution(f64),
}

impl DiscreteGaussian {
    pub fn new(width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::Width(format!("width {width} is not positive")));
        }
        let bound = (TAIL_CUT * width).floor().max(0.0) as i64;
        let kind = if width <= TABLE_MAX_WIDTH {
            Kind::Table(cdf_table(width, bound))
        } else {
            let cont = (width * width - ROUNDING_WIDTH * ROUNDING_WIDTH).sqrt();
            Kind::Convolution(width_to_std(cont))
        };
        Ok(Self { width, bound, kind })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Largest magnitude this sampler can output.
    pub fn bound(&self) -> u64 {
        self.bound as u64
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        match &self.kind {
            Kind::Table(cdf) => {
                let u: u128 = rng.random::<u128>() >> 1;
                let idx = cdf.partition_point(|&c| c <= u);
                idx as i64 - self.bound
            }
            Kind::Convolution(std) => loop {
                let y: f64 = rng.sample::<f64, _>(StandardNormal) * std;
                let x = sample_centered(ROUNDING_WIDTH, y, rng);
                if x.abs() <= self.bound {
                    return x;
                }
            },
        }
    }

    pub fn sample_vec<R: Rng + ?Sized>(&self, dim: usize, rng: &mut R) -> IntVector {
        IntVector((0..dim).map(|_| self.sample(rng)).collect())
    }
}

fn cdf_table(width: f64, bound: i64) -> Vec<u128> {
    let weights: Vec<f64> = (-bound..=bound).map(|x| rho(x as f64, width)).collect();
    let total: f64 = weights.iter().sum();
    let scale = 2f64.powi(127);
    let mut acc = 0.0f64;
    let mut cdf: Vec<u128> = weights
        .iter()
        .map(|w| {
            acc += w / total;
            (acc.min(1.0) * scale) as u128
        })
        .collect();
    *cdf.last_mut().expect("table non-empty") = 1u128 << 127;
    cdf
}

/// One draw from `D_{Z,s}`; builds a fresh sampler, so prefer
/// [`DiscreteGaussian`] in loops.
pub fn sample_dgauss_z<R: Rng + ?Sized>(width: f64, rng: &mut R) -> Result<i64> {
    Ok(DiscreteGaussian::new(width)?.sample(rng))
}

pub fn sample_dgauss_vec<R: Rng + ?Sized>(width: f64, dim: usize, rng: &mut R) -> Result<IntVector> {
    Ok(DiscreteGaussian::new(width)?.sample_vec(dim, rng))
}

/// `D_{Z,s,c}` for an arbitrary real center, by rejection from the uniform
/// distribution on the integers within `12 s` of the center.
pub fn sample_centered<R: Rng + ?Sized>(width: f64, center: f64, rng: &mut R) -> i64 {
    let lo = (center - TAIL_CUT * width).ceil() as i64;
    let hi = (center + TAIL_CUT * width).floor() as i64;
    loop {
        let x = rng.random_range(lo..=hi);
        let d = x as f64 - center;
        if rng.random::<f64>() < rho(d, width) {
            return x;
        }
    }
}

/// Vector of independent standard normal draws.
pub fn standard_normals<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}
