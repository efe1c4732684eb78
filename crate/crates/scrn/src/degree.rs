//! Degree-distribution families: parameter solving and integer degree sampling.
//!
//! Three discrete families are supported, all zero-truncated so every firm has
//! at least one trading link:
//!
//! * **Regular** — every node has exactly `target_mean` links (integer).
//! * **Zero-truncated Poisson** — Poisson(λ) conditioned on k ≥ 1, with λ
//!   solved so the truncated mean λ/(1 − e^(−λ)) hits the target.
//! * **Zero-truncated power law** — p(k) ∝ k^(−γ) on {1..k_max}, with γ > 1
//!   solved so the truncated mean hits the target.

use crate::error::{Result, ScrnError};
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

/// Relative tolerance for parameter solves.
const SOLVE_TOL: f64 = 1e-12;
/// Iteration cap for zero-rejection sampling.
const SAMPLE_CAP: u64 = 100_000;

/// Distribution family of a degree sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Regular,
    ZeroTruncatedPoisson,
    ZeroTruncatedPowerLaw,
}

impl Family {
    /// Stable lowercase token used in config files and result tables.
    pub fn token(self) -> &'static str {
        match self {
            Family::Regular => "regular",
            Family::ZeroTruncatedPoisson => "poisson",
            Family::ZeroTruncatedPowerLaw => "powerlaw",
        }
    }

    /// Parse the config-file token.
    pub fn from_token(s: &str) -> Option<Family> {
        match s {
            "regular" => Some(Family::Regular),
            "poisson" => Some(Family::ZeroTruncatedPoisson),
            "powerlaw" => Some(Family::ZeroTruncatedPowerLaw),
            _ => None,
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

/// Which tier-role a degree sequence describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    SupplierOut,
    WholesalerIn,
    WholesalerOut,
    RetailerIn,
}

/// A sampled integer degree sequence for one tier-role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    /// One entry per node; every entry ≥ 1 (zero-truncation).
    pub degrees: Vec<u32>,
    pub role: Role,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<u32>, role: Role) -> Self {
        DegreeSequence { degrees, role }
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    /// Sum of all degrees (the stub count of the sequence's side of a layer).
    pub fn sum(&self) -> u64 {
        self.degrees.iter().map(|&d| d as u64).sum()
    }

    /// Sample mean degree.
    pub fn mean(&self) -> f64 {
        self.sum() as f64 / self.degrees.len() as f64
    }
}

/// A fully solved degree-distribution specification.
///
/// Construct with [`DegreeDistributionSpec::new`]; the internal parameter
/// (λ or γ) is solved at construction so sampling never re-solves.
#[derive(Debug, Clone)]
pub struct DegreeDistributionSpec {
    pub family: Family,
    /// Prescribed mean number of links per node.
    pub target_mean: f64,
    /// λ for the truncated Poisson, γ for the power law, unused for Regular.
    pub param: f64,
    /// Maximum degree k_max (power law only; ignored otherwise).
    pub support_cap: usize,
    /// Cumulative distribution table over {1..k_max} (power law only).
    cdf: Vec<f64>,
}

impl DegreeDistributionSpec {
    /// Solve the family parameter for `target_mean` and build sampling tables.
    ///
    /// `support_cap` is only consulted for the power-law family.
    pub fn new(family: Family, target_mean: f64, support_cap: usize) -> Result<Self> {
        if !(target_mean >= 1.0) {
            return Err(ScrnError::ConfigInvalid(format!(
                "target mean {target_mean} < 1: zero-truncation requires every node to have at least one link"
            )));
        }
        let (param, cdf) = match family {
            Family::Regular => {
                if (target_mean - target_mean.round()).abs() > 1e-9 {
                    return Err(ScrnError::ConfigInvalid(format!(
                        "regular family requires an integer mean, got {target_mean}"
                    )));
                }
                (0.0, Vec::new())
            }
            Family::ZeroTruncatedPoisson => (solve_ztp_lambda(target_mean)?, Vec::new()),
            Family::ZeroTruncatedPowerLaw => {
                let gamma = solve_powerlaw_gamma(target_mean, support_cap)?;
                (gamma, powerlaw_cdf(gamma, support_cap))
            }
        };
        Ok(DegreeDistributionSpec {
            family,
            target_mean,
            param,
            support_cap,
            cdf,
        })
    }

    /// Analytic mean of the parametrized distribution (equals `target_mean`
    /// within solver tolerance; exposed for calibration tests).
    pub fn analytic_mean(&self) -> f64 {
        match self.family {
            Family::Regular => self.target_mean,
            Family::ZeroTruncatedPoisson => ztp_mean(self.param),
            Family::ZeroTruncatedPowerLaw => powerlaw_mean(self.param, self.support_cap),
        }
    }

    /// The probability table p(k), k = 1..k_max (power law only).
    pub fn pmf(&self) -> Vec<f64> {
        let mut pmf = Vec::with_capacity(self.cdf.len());
        let mut prev = 0.0;
        for &c in &self.cdf {
            pmf.push(c - prev);
            prev = c;
        }
        pmf
    }

    /// Draw a single degree.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<u32> {
        match self.family {
            Family::Regular => Ok(self.target_mean.round() as u32),
            Family::ZeroTruncatedPoisson => {
                let pois = Poisson::new(self.param).expect("λ > 0 by construction");
                for _ in 0..SAMPLE_CAP {
                    let draw = pois.sample(rng) as u32;
                    if draw >= 1 {
                        return Ok(draw);
                    }
                }
                Err(ScrnError::InternalSamplingFailure(SAMPLE_CAP))
            }
            Family::ZeroTruncatedPowerLaw => {
                // Inverse CDF over the precomputed table: find the first k
                // with CDF(k) ≥ u.
                let u: f64 = rng.gen();
                let idx = self.cdf.partition_point(|&c| c < u);
                Ok((idx.min(self.cdf.len() - 1) + 1) as u32)
            }
        }
    }
}

/// Solve λ such that the zero-truncated Poisson mean λ/(1 − e^(−λ)) equals
/// `target_mean`, by bisection.
///
/// The truncated mean approaches 1 as λ → 0, so means ≤ 1 are unreachable.
pub fn solve_ztp_lambda(target_mean: f64) -> Result<f64> {
    if !(target_mean > 1.0) {
        return Err(ScrnError::NonBracketable(format!(
            "zero-truncated Poisson mean must exceed 1, got {target_mean}"
        )));
    }
    // ztp_mean(λ) is strictly increasing with ztp_mean(λ) > λ, so λ = target
    // bounds the root from above; the mean exceeds 1 everywhere, so any tiny
    // positive λ bounds it from below.
    let mut lo = f64::MIN_POSITIVE;
    let mut hi = target_mean;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ztp_mean(mid) > target_mean {
            hi = mid;
        } else {
            lo = mid;
        }
        if (hi - lo) / hi < SOLVE_TOL {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Mean of the zero-truncated Poisson with parameter `lambda`.
pub fn ztp_mean(lambda: f64) -> f64 {
    lambda / (1.0 - (-lambda).exp())
}

/// Solve γ > 1 such that the truncated power law p(k) ∝ k^(−γ) on
/// {1..support_cap} has mean `target_mean`, by bisection (the truncated mean
/// is strictly decreasing in γ).
///
/// The achievable range is (1, support_cap / H(support_cap)): as γ → 1⁺ the
/// mean approaches k_max/H(k_max), and as γ → ∞ it approaches 1. Targets
/// outside that open interval are rejected as `NonBracketable`.
pub fn solve_powerlaw_gamma(target_mean: f64, support_cap: usize) -> Result<f64> {
    if support_cap < 2 {
        return Err(ScrnError::ConfigInvalid(format!(
            "power-law support cap must be ≥ 2, got {support_cap}"
        )));
    }
    if !(target_mean > 1.0) || target_mean >= (support_cap as f64 + 1.0) / 2.0 {
        return Err(ScrnError::NonBracketable(format!(
            "power-law mean {target_mean} outside (1, {}) for support cap {support_cap}",
            (support_cap as f64 + 1.0) / 2.0
        )));
    }
    // Hard attainability bound under γ > 1.
    let lo_gamma = 1.0 + 1e-12;
    if powerlaw_mean(lo_gamma, support_cap) <= target_mean {
        return Err(ScrnError::NonBracketable(format!(
            "power-law mean {target_mean} unreachable with exponent > 1 on support {{1..{support_cap}}} (max ≈ {:.6})",
            powerlaw_mean(lo_gamma, support_cap)
        )));
    }
    let mut lo = lo_gamma; // mean(lo) > target
    let mut hi = 2.0;
    while powerlaw_mean(hi, support_cap) > target_mean {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(ScrnError::NonBracketable(format!(
                "power-law mean {target_mean} unreachable (requires exponent > 1e6)"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if powerlaw_mean(mid, support_cap) > target_mean {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) / hi < SOLVE_TOL {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Mean of the truncated power law p(k) ∝ k^(−γ) on {1..support_cap}.
pub fn powerlaw_mean(gamma: f64, support_cap: usize) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 1..=support_cap {
        let w = (k as f64).powf(-gamma);
        num += k as f64 * w;
        den += w;
    }
    num / den
}

/// Normalized cumulative distribution table of the truncated power law.
fn powerlaw_cdf(gamma: f64, support_cap: usize) -> Vec<f64> {
    let weights: Vec<f64> = (1..=support_cap).map(|k| (k as f64).powf(-gamma)).collect();
    let total: f64 = weights.iter().sum();
    let mut cdf = Vec::with_capacity(support_cap);
    let mut acc = 0.0;
    for w in weights {
        acc += w / total;
        cdf.push(acc);
    }
    // Pin the final entry so inverse-CDF lookup can never fall off the table.
    *cdf.last_mut().expect("cap ≥ 2") = 1.0;
    cdf
}

/// Draw `n` i.i.d. degrees from `spec` for the given tier-role.
pub fn sample_degree_sequence<R: Rng + ?Sized>(
    spec: &DegreeDistributionSpec,
    role: Role,
    n: usize,
    rng: &mut R,
) -> Result<DegreeSequence> {
    let mut degrees = Vec::with_capacity(n);
    for _ in 0..n {
        degrees.push(spec.sample_one(rng)?);
    }
    debug_assert!(degrees.iter().all(|&d| d >= 1), "zero-truncation violated");
    Ok(DegreeSequence::new(degrees, role))
}
