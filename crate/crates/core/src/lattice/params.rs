//! Scheme-wide parameters, their derivation from `(λ, N)` and a constraint report.

use super::zq::{is_prime, next_prime, Modulus, MAX_MODULUS};
use crate::encoding::{tag, Decode, Encode, Reader, Sink};
use crate::error::{Error, Result};
use crate::relations;
use crate::samplers::{required_width, DiscreteGaussian};
use std::fmt;

/// Infinity bound on tracing-tag and membership LWE errors.
pub const DESK_B_LWE: u64 = 3;
/// Challenge range `[-p, p]` of the quadratic argument.
pub const DESK_P: u32 = 2;
/// Repetitions of the non-interactive transform.
pub const DESK_KAPPA: usize = 8;
/// Rejection-sampling constant.
pub const DESK_M_REJ: f64 = 1.5;
/// Bit length of one-time verification keys.
pub const OTS_VK_BITS: usize = 256;
/// Smallest admissible `q'` before any other constraint is considered.
pub const MIN_Q_PRIME: u64 = 173;

/// Safety factor applied to sampler widths over the computed requirement.
const WIDTH_MARGIN: f64 = 1.01;
/// Safety factor on predicted trapdoor spectral norms.
const NORM_MARGIN: f64 = 1.05;

#[derive(Clone, Debug, PartialEq)]
pub struct ParamSet {
    pub lambda_desk: usize,
    pub n: usize,
    pub q: Modulus,
    pub q_prime: Modulus,
    pub group_size: u64,
    pub ell: u32,
    pub m_f: usize,
    pub m_b: usize,
    pub m_1: usize,
    pub m_2: usize,
    pub m_m: usize,
    pub sigma_sign: f64,
    pub sigma_com: f64,
    pub sigma_verif: f64,
    pub beta_1: u64,
    pub beta_2: u64,
    pub alpha_gpv: f64,
    pub sigma_gpv: f64,
    pub b_gpv: u64,
    pub b_lwe: u64,
    pub l1: usize,
    pub l2: usize,
    pub sigma_1: f64,
    pub sigma_2: f64,
    pub p: u32,
    pub kappa: usize,
    pub m_rej: f64,
    pub ots_vklen: usize,
}

/// Predicted largest singular value of an `a × b` matrix with i.i.d. entries of
/// the given mean and variance.
fn predicted_norm(a: usize, b: usize, mean: f64, var: f64) -> f64 {
    let (a, b) = (a as f64, b as f64);
    NORM_MARGIN * (mean * (a * b).sqrt() + var.sqrt() * (a.sqrt() + b.sqrt()))
}

impl ParamSet {
    /// Binary opening trapdoor: `(m_B - n k') × n k'` entries uniform in `{0, 1}`.
    pub fn predicted_norm_oa(&self) -> f64 {
        let nk = self.n * self.q_prime.bits();
        predicted_norm(self.m_b - nk, nk, 0.5, 0.25)
    }

    /// Ternary signing trapdoor: `m_1 × m_2` entries uniform in `{-1, 0, 1}`.
    pub fn predicted_norm_gm(&self) -> f64 {
        predicted_norm(self.m_1, self.m_2, 0.0, 2.0 / 3.0)
    }

    /// Plaintext scaling `round(q' / (2(N+1)))`.
    pub fn delta(&self) -> u64 {
        let d = 2 * (self.group_size + 1);
        (self.q_prime.value() + d / 2) / d
    }

    /// Every derived quantity for fixed moduli.
    pub fn derive(lambda_desk: usize, group_size: u64, q_prime: Modulus, q: Modulus) -> Result<Self> {
        let mut pp = Self::derive_widths(lambda_desk, group_size, q_prime, q)?;
        let shape = relations::sign_shape(&pp)?;
        let l = (2 * pp.l1 + 2 * pp.l2 + shape.n_vars + shape.n_triples) as f64;
        pp.sigma_2 = 2.0 * pp.p as f64 * l * l.log2() * pp.sigma_1;
        Ok(pp)
    }

    /// Everything except the masking width, which needs the relation shape.
    fn derive_widths(lambda_desk: usize, group_size: u64, q_prime: Modulus, q: Modulus) -> Result<Self> {
        let ell = group_bits(group_size)?;
        if lambda_desk < 2 {
            return Err(Error::Param(format!("lambda {lambda_desk} below 2")));
        }
        let n = lambda_desk;
        let (kp, k) = (q_prime.bits(), q.bits());
        let m_f = n * kp + lambda_desk;
        let m_b = 2 * n * kp + lambda_desk;
        let m_2 = n * k;
        let m_1 = ((m_2 + lambda_desk) as f64 / 3f64.log2()).ceil() as usize;
        let m_m = 3 * n;
        let mut pp = Self {
            lambda_desk,
            n,
            q,
            q_prime,
            group_size,
            ell,
            m_f,
            m_b,
            m_1,
            m_2,
            m_m,
            sigma_sign: 0.0,
            sigma_com: 0.0,
            sigma_verif: 0.0,
            beta_1: 0,
            beta_2: 0,
            alpha_gpv: 1.0 / q_prime.value() as f64,
            sigma_gpv: 0.0,
            b_gpv: 0,
            b_lwe: DESK_B_LWE,
            l1: lambda_desk,
            l2: lambda_desk,
            sigma_1: 0.0,
            sigma_2: 0.0,
            p: DESK_P,
            kappa: DESK_KAPPA,
            m_rej: DESK_M_REJ,
            ots_vklen: OTS_VK_BITS,
        };
        pp.sigma_gpv = WIDTH_MARGIN * required_width(q_prime, pp.predicted_norm_oa(), m_b);
        pp.b_gpv = (pp.alpha_gpv * q_prime.value() as f64 * ((m_b + 1) as f64).sqrt()).ceil() as u64;
        pp.sigma_sign = WIDTH_MARGIN * required_width(q, pp.predicted_norm_gm(), m_1 + m_2);
        pp.sigma_com = pp.sigma_sign;
        pp.sigma_verif = (pp.sigma_com.powi(2) + pp.sigma_sign.powi(2)).sqrt();
        pp.beta_1 = (pp.sigma_verif * (m_1 as f64).log2()).ceil() as u64;
        pp.beta_2 = (pp.sigma_sign * (m_2 as f64).log2()).ceil() as u64;
        pp.sigma_1 = (2.0 * pp.l2 as f64 / std::f64::consts::PI).sqrt();
        Ok(pp)
    }

    /// Smallest primes `q'` then `q` satisfying every constraint.
    pub fn setup(lambda_desk: usize, group_size: u64) -> Result<Self> {
        group_bits(group_size)?;
        let q_prime = search_q_prime(lambda_desk, group_size)?;
        let mut k = q_prime.bits() + 1;
        while k <= 62 {
            let mut cand = next_prime(1u64 << (k - 1));
            for _ in 0..64 {
                let bits = Modulus::new(cand)?.bits();
                if bits != k {
                    // the bound grows with the bit length, so shorter lengths stay infeasible
                    k = bits.max(k + 1) - 1;
                    break;
                }
                let pp = Self::derive(lambda_desk, group_size, q_prime, Modulus::new(cand)?)?;
                let need = relations::q_lower_bounds(&pp)?.into_iter().map(|(_, b)| b).max().unwrap_or(0);
                if (cand as u128) > need {
                    let report = validate_params(&pp);
                    if report.all_pass() {
                        return Ok(pp);
                    }
                    return Err(Error::Param(format!("setup produced a failing parameter set:\n{report}")));
                }
                if need >= MAX_MODULUS as u128 {
                    break;
                }
                cand = next_prime(need as u64);
            }
            k += 1;
        }
        Err(Error::Param("no prime q below 2^62 satisfies the lower bounds".into()))
    }

    /// The preset used throughout the test and acceptance suites.
    pub fn desk() -> Result<Self> {
        Self::setup(16, 7)
    }
}

/// `ℓ` with `N = 2^ℓ - 1`.
fn group_bits(group_size: u64) -> Result<u32> {
    if group_size == 0 || !(group_size + 1).is_power_of_two() {
        return Err(Error::Param(format!("group size {group_size} is not of the form 2^l - 1")));
    }
    Ok((group_size + 1).trailing_zeros())
}

/// Decryption noise bound `α q' √n σ_gpv √(m_B + 1)`.
fn decryption_noise(pp: &ParamSet) -> f64 {
    pp.alpha_gpv * pp.q_prime.value() as f64 * (pp.n as f64).sqrt() * pp.sigma_gpv * ((pp.m_b + 1) as f64).sqrt()
}

fn q_prime_ok(pp: &ParamSet) -> bool {
    let qp = pp.q_prime.value() as f64;
    let lwe = (4 * pp.b_lwe + 1).pow(2) < pp.q_prime.value();
    let reveal = pp.sigma_gpv * (pp.m_b as f64).sqrt() * pp.b_lwe as f64 * 2.0 < qp;
    let decrypt = decryption_noise(pp) * 4.0 * ((pp.group_size + 1) as f64) < qp;
    lwe && reveal && decrypt
}

fn search_q_prime(lambda_desk: usize, group_size: u64) -> Result<Modulus> {
    for kp in 8..=40usize {
        let mut cand = next_prime((1u64 << (kp - 1)).max(MIN_Q_PRIME));
        while Modulus::new(cand)?.bits() == kp {
            let qp = Modulus::new(cand)?;
            // q only influences the signing-side quantities; any large prime will do here
            let probe = ParamSet::derive_widths(lambda_desk, group_size, qp, Modulus::new(next_prime(1 << 50))?)?;
            if q_prime_ok(&probe) {
                return Ok(qp);
            }
            let need = decryption_noise(&probe) * 4.0 * (group_size + 1) as f64;
            cand = next_prime((need.ceil() as u64).max(cand));
        }
    }
    Err(Error::Param("no prime q' below 2^40 satisfies the decryption bound".into()))
}

impl Encode for ParamSet {
    fn encode<S: Sink + ?Sized>(&self, s: &mut S) {
        s.put_u8(tag::PARAMS);
        s.put_u64(self.lambda_desk as u64);
        s.put_u64(self.group_size);
        s.put_u64(self.q_prime.value());
        s.put_u64(self.q.value());
    }
}

impl Decode for ParamSet {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.expect_tag(tag::PARAMS)?;
        let lambda = r.u64()? as usize;
        let group = r.u64()?;
        let q_prime = Modulus::new(r.u64()?)?;
        let q = Modulus::new(r.u64()?)?;
        if lambda > 1 << 12 {
            return Err(Error::Decode(format!("lambda {lambda} implausible")));
        }
        ParamSet::derive(lambda, group, q_prime, q).map_err(|e| Error::Decode(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintRow {
    pub name: String,
    pub lhs: String,
    pub relation: &'static str,
    pub rhs: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConstraintReport {
    pub rows: Vec<ConstraintRow>,
}

impl ConstraintReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConstraintRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn row(&self, name: &str) -> Option<&ConstraintRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    fn push(&mut self, name: impl Into<String>, lhs: impl fmt::Display, relation: &'static str, rhs: impl fmt::Display, pass: bool) {
        self.rows.push(ConstraintRow { name: name.into(), lhs: lhs.to_string(), relation, rhs: rhs.to_string(), pass });
    }

    fn lt_f(&mut self, name: &str, lhs: f64, rhs: f64) {
        self.push(name, format!("{lhs:.4}"), "<", format!("{rhs:.4}"), lhs < rhs);
    }

    fn eq_u(&mut self, name: &str, lhs: u128, rhs: u128) {
        self.push(name, lhs, "=", rhs, lhs == rhs);
    }

    fn gt_u(&mut self, name: &str, lhs: u128, rhs: u128) {
        self.push(name, lhs, ">", rhs, lhs > rhs);
    }
}

impl fmt::Display for ConstraintReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
        for r in &self.rows {
            let verdict = if r.pass { "pass" } else { "FAIL" };
            writeln!(f, "{verdict}  {:width$}  {} {} {}", r.name, r.lhs, r.relation, r.rhs)?;
        }
        Ok(())
    }
}

/// Evaluates every parameter constraint, including the modulus lower bounds
/// emitted by the relation compiler and the argument system.
pub fn validate_params(pp: &ParamSet) -> ConstraintReport {
    let mut r = ConstraintReport::default();
    let (q, qp) = (pp.q.value(), pp.q_prime.value());
    let (n, kp, k) = (pp.n as u128, pp.q_prime.bits() as u128, pp.q.bits() as u128);
    let lambda = pp.lambda_desk as u128;
    r.push("q prime", q, "is", "prime", is_prime(q));
    r.push("q' prime", qp, "is", "prime", is_prime(qp));
    r.gt_u("q > q'", q as u128, qp as u128);
    r.gt_u("q > N", q as u128, pp.group_size as u128);
    r.eq_u("N = 2^l - 1", pp.group_size as u128, (1u128 << pp.ell) - 1);
    r.push("q <= 2^62", q, "<=", MAX_MODULUS, q <= MAX_MODULUS);
    r.push("(4 B_lwe + 1)^2 < q'", (4 * pp.b_lwe + 1).pow(2), "<", qp, (4 * pp.b_lwe + 1).pow(2) < qp);
    r.lt_f("sigma_gpv sqrt(m_B) B_lwe < q'/2", pp.sigma_gpv * (pp.m_b as f64).sqrt() * pp.b_lwe as f64, qp as f64 / 2.0);
    r.lt_f("decryption noise < q'/(4(N+1))", decryption_noise(pp), qp as f64 / (4.0 * (pp.group_size + 1) as f64));
    r.lt_f("sqrt(n + log m_B) < sigma_gpv", (pp.n as f64 + (pp.m_b as f64).log2()).sqrt(), pp.sigma_gpv);
    r.eq_u(
        "B_gpv = ceil(alpha q' sqrt(m_B + 1))",
        pp.b_gpv as u128,
        (pp.alpha_gpv * qp as f64 * ((pp.m_b + 1) as f64).sqrt()).ceil() as u128,
    );
    r.push(
        "encryption noise tail <= B_gpv",
        DiscreteGaussian::new(pp.alpha_gpv * qp as f64).map(|g| g.bound()).unwrap_or(u64::MAX),
        "<=",
        pp.b_gpv,
        DiscreteGaussian::new(pp.alpha_gpv * qp as f64).is_ok_and(|g| g.bound() <= pp.b_gpv),
    );
    r.eq_u("m_F = n ceil(log q') + lambda", pp.m_f as u128, n * kp + lambda);
    r.eq_u("m_B = 2n ceil(log q') + lambda", pp.m_b as u128, 2 * n * kp + lambda);
    r.eq_u("m_2 = n ceil(log q)", pp.m_2 as u128, n * k);
    r.eq_u("m_M = 3n", pp.m_m as u128, 3 * n);
    r.eq_u("m_1 = ceil((m_2 + lambda) / log 3)", pp.m_1 as u128, ((pp.m_2 + pp.lambda_desk) as f64 / 3f64.log2()).ceil() as u128);
    let verif = (pp.sigma_com.powi(2) + pp.sigma_sign.powi(2)).sqrt();
    r.push(
        "sigma_verif^2 = sigma_com^2 + sigma_sign^2",
        format!("{:.6}", pp.sigma_verif.powi(2)),
        "=",
        format!("{:.6}", verif.powi(2)),
        (pp.sigma_verif - verif).abs() <= 1e-9 * verif,
    );
    r.eq_u("beta_1 = ceil(sigma_verif log m_1)", pp.beta_1 as u128, (pp.sigma_verif * (pp.m_1 as f64).log2()).ceil() as u128);
    r.eq_u("beta_2 = ceil(sigma_sign log m_2)", pp.beta_2 as u128, (pp.sigma_sign * (pp.m_2 as f64).log2()).ceil() as u128);
    r.push(
        "sigma_gpv >= preimage width",
        format!("{:.4}", pp.sigma_gpv),
        ">=",
        format!("{:.4}", required_width(pp.q_prime, pp.predicted_norm_oa(), pp.m_b)),
        pp.sigma_gpv >= required_width(pp.q_prime, pp.predicted_norm_oa(), pp.m_b),
    );
    r.push(
        "sigma_sign >= preimage width",
        format!("{:.4}", pp.sigma_sign),
        ">=",
        format!("{:.4}", required_width(pp.q, pp.predicted_norm_gm(), pp.m_1 + pp.m_2)),
        pp.sigma_sign >= required_width(pp.q, pp.predicted_norm_gm(), pp.m_1 + pp.m_2),
    );
    r.push("l1 >= lambda", pp.l1, ">=", pp.lambda_desk, pp.l1 >= pp.lambda_desk);
    r.push("l2 >= lambda", pp.l2, ">=", pp.lambda_desk, pp.l2 >= pp.lambda_desk);
    let s1_floor = (2.0 * pp.l2 as f64 / std::f64::consts::PI).sqrt();
    r.push("sigma_1 >= sqrt(2 l2 / pi)", format!("{:.4}", pp.sigma_1), ">=", format!("{s1_floor:.4}"), pp.sigma_1 >= s1_floor - 1e-12);
    r.push("p >= 2", pp.p, ">=", 2, pp.p >= 2);
    r.push("M_rej > 1", pp.m_rej, ">", 1, pp.m_rej > 1.0);
    r.push("kappa >= 1", pp.kappa, ">=", 1, pp.kappa >= 1);
    match relations::q_lower_bounds(pp) {
        Ok(bounds) => {
            for (name, bound) in bounds {
                r.gt_u(&format!("q > {name}"), q as u128, bound);
            }
        }
        Err(e) => r.push("q lower bounds", "error", ":", e, false),
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::OnceLock;

    pub(crate) fn desk() -> &'static ParamSet {
        static PP: OnceLock<ParamSet> = OnceLock::new();
        PP.get_or_init(|| ParamSet::desk().unwrap())
    }

    #[test]
    fn desk_preset_passes_every_row() {
        let report = validate_params(desk());
        assert!(report.all_pass(), "{report}");
        assert!(report.rows.iter().filter(|r| r.name.starts_with("q > ")).count() >= 6);
    }

    #[test]
    fn moduli_are_smallest_admissible() {
        let pp = desk();
        assert!(pp.q_prime.value() > MIN_Q_PRIME);
        // the previous prime of the same bit length fails a q' constraint
        let mut prev = pp.q_prime.value() - 1;
        while !is_prime(prev) {
            prev -= 1;
        }
        if Modulus::new(prev).unwrap().bits() == pp.q_prime.bits() {
            let probe = ParamSet::derive(16, 7, Modulus::new(prev).unwrap(), pp.q).unwrap();
            assert!(!q_prime_ok(&probe));
        }
        let need = relations::q_lower_bounds(pp).unwrap().into_iter().map(|b| b.1).max().unwrap();
        assert!(pp.q.value() as u128 > need);
        let mut c = need as u64 + 1;
        while !is_prime(c) {
            c += 1;
        }
        assert!(c >= pp.q.value() || Modulus::new(c).unwrap().bits() < pp.q.bits());
    }

    #[test]
    fn bumped_lwe_bound_fails_its_row() {
        let mut pp = desk().clone();
        pp.b_lwe = ((pp.q_prime.value() as f64).sqrt() as u64 + 1) / 4 + 1;
        let report = validate_params(&pp);
        assert!(!report.row("(4 B_lwe + 1)^2 < q'").unwrap().pass, "{report}");
    }

    #[test]
    fn modulus_equal_to_group_size_fails() {
        let mut pp = desk().clone();
        pp.q = Modulus::new(7).unwrap();
        let report = validate_params(&pp);
        assert!(!report.row("q > N").unwrap().pass);
        assert!(!report.all_pass());
    }

    #[test]
    fn group_size_shape() {
        assert!(ParamSet::derive(16, 6, Modulus::new(173).unwrap(), Modulus::new(next_prime(1 << 40)).unwrap()).is_err());
        assert_eq!(group_bits(1).unwrap(), 1);
        assert_eq!(group_bits(7).unwrap(), 3);
        assert!(group_bits(0).is_err());
    }

    #[test]
    fn smallest_group_sets_up() {
        let pp = ParamSet::setup(8, 1).unwrap();
        assert!(validate_params(&pp).all_pass());
        assert_eq!(pp.ell, 1);
    }

    #[test]
    fn widths_and_bounds_relationships() {
        let pp = desk();
        assert!((pp.sigma_verif.powi(2) - pp.sigma_com.powi(2) - pp.sigma_sign.powi(2)).abs() < 1e-6 * pp.sigma_verif.powi(2));
        assert!(pp.beta_1 > pp.beta_2);
        assert_eq!(pp.delta(), (pp.q_prime.value() as f64 / 16.0).round() as u64);
    }

    #[test]
    fn encoding_roundtrip() {
        let pp = desk();
        let bytes = pp.to_bytes();
        assert_eq!(&ParamSet::from_bytes(&bytes).unwrap(), pp);
    }
}
