//! Scenario configuration: one experimental cell, plus the flat key-value
//! file format used by the command line.
//!
//! The file format is one `key = value` pair per line; blank lines and lines
//! starting with `#` are ignored. Recognized keys (all optional, defaults are
//! the paper baseline):
//!
//! | key | default | meaning |
//! |---|---|---|
//! | `n_wholesalers` | `100` | wholesaler tier size N_w |
//! | `ratio_alpha` | `2` | suppliers per wholesaler (N_s = α·N_w) |
//! | `ratio_beta` | `10` | retailers per wholesaler (N_r = β·N_w) |
//! | `wholesaler_dist` | `regular` | `regular` / `poisson` / `powerlaw` |
//! | `retailer_dist` | `regular` | `regular` / `poisson` / `powerlaw` |
//! | `retailer_mean_in_degree` | `2` | target mean k̄_r^in |
//! | `rho` | `0` | fraction of wholesalers with horizontal links |
//! | `ordered` | `false` | rank-ordered (assortative) stub matching |
//! | `coupled` | `true` | wholesaler out-degree tied to in-degree |
//! | `capacity_mode` | `realized_balance` | or `theoretical_mean` |
//! | `horizontal_policy` | `coalition` | or `pairs` |
//! | `replications` | `1000` | Monte Carlo replications |
//! | `seed` | `42` | master seed |
//! | `gap_threshold` | `0.05` | mean-gap rejection threshold |

use crate::degree::Family;
use crate::error::{Result, ScrnError};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// How the supplier unit capacity c_s is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CapacityMode {
    /// c_s = realized total demand / N_s, so supply equals demand exactly in
    /// every sample (default).
    RealizedBalance,
    /// c_s = (β/α)·k̄_r^in from the nominal means, independent of the sample.
    TheoreticalMean,
}

impl CapacityMode {
    pub fn token(self) -> &'static str {
        match self {
            CapacityMode::RealizedBalance => "realized_balance",
            CapacityMode::TheoreticalMean => "theoretical_mean",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s {
            "realized_balance" => Some(CapacityMode::RealizedBalance),
            "theoretical_mean" => Some(CapacityMode::TheoreticalMean),
            _ => None,
        }
    }
}

/// How the selected ρ-fraction of wholesalers shares capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HorizontalPolicy {
    /// All selected wholesalers pool into a single group (default; makes
    /// ρ = 1 a single pool with OFR = 1).
    Coalition,
    /// Selected wholesalers are paired uniformly at random; an odd one out
    /// stays a singleton.
    Pairs,
}

impl HorizontalPolicy {
    pub fn token(self) -> &'static str {
        match self {
            HorizontalPolicy::Coalition => "coalition",
            HorizontalPolicy::Pairs => "pairs",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s {
            "coalition" => Some(HorizontalPolicy::Coalition),
            "pairs" => Some(HorizontalPolicy::Pairs),
            _ => None,
        }
    }
}

/// One experimental cell: tier shape, distribution choices, matching and
/// pooling options, and Monte Carlo bookkeeping.
///
/// The supplier out-degree is always Regular with mean 1 (every supplier
/// trades with exactly one wholesaler), so the derived means are
/// k̄_w^in = α and k̄_w^out = β·k̄_r^in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n_wholesalers: usize,
    pub ratio_alpha: f64,
    pub ratio_beta: f64,
    pub wholesaler_dist: Family,
    pub retailer_dist: Family,
    pub retailer_mean_in_degree: f64,
    pub rho: f64,
    pub ordered: bool,
    pub coupled: bool,
    pub capacity_mode: CapacityMode,
    pub horizontal_policy: HorizontalPolicy,
    pub replications: usize,
    pub seed: u64,
    pub gap_threshold: f64,
}

impl Default for ScenarioConfig {
    /// The paper baseline: 2:1:10 tiers with N_w = 100, regular degrees with
    /// k̄_r^in = 2, no horizontal links, 1000 replications.
    fn default() -> Self {
        ScenarioConfig {
            n_wholesalers: 100,
            ratio_alpha: 2.0,
            ratio_beta: 10.0,
            wholesaler_dist: Family::Regular,
            retailer_dist: Family::Regular,
            retailer_mean_in_degree: 2.0,
            rho: 0.0,
            ordered: false,
            coupled: true,
            capacity_mode: CapacityMode::RealizedBalance,
            horizontal_policy: HorizontalPolicy::Coalition,
            replications: 1000,
            seed: 42,
            gap_threshold: 0.05,
        }
    }
}

impl ScenarioConfig {
    /// Number of suppliers N_s = α·N_w.
    pub fn n_suppliers(&self) -> usize {
        (self.ratio_alpha * self.n_wholesalers as f64).round() as usize
    }

    /// Number of retailers N_r = β·N_w.
    pub fn n_retailers(&self) -> usize {
        (self.ratio_beta * self.n_wholesalers as f64).round() as usize
    }

    /// Supplier out-degree mean (fixed at 1).
    pub fn supplier_mean_out_degree(&self) -> f64 {
        1.0
    }

    /// Derived wholesaler in-degree mean k̄_w^in = α·k̄_s^out.
    pub fn wholesaler_mean_in_degree(&self) -> f64 {
        self.ratio_alpha * self.supplier_mean_out_degree()
    }

    /// Derived wholesaler out-degree mean k̄_w^out = β·k̄_r^in.
    pub fn wholesaler_mean_out_degree(&self) -> f64 {
        self.ratio_beta * self.retailer_mean_in_degree
    }

    /// Out/in degree ratio used when `coupled` ties the wholesaler roles.
    pub fn coupling_ratio(&self) -> f64 {
        self.wholesaler_mean_out_degree() / self.wholesaler_mean_in_degree()
    }

    /// Validate every structural invariant; returns the violated constraint
    /// by name on failure.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(ScrnError::ConfigInvalid(msg));
        if self.n_wholesalers < 1 {
            return fail("n_wholesalers must be ≥ 1".into());
        }
        if !(self.ratio_alpha > 0.0) || !(self.ratio_beta > 0.0) {
            return fail("ratio_alpha and ratio_beta must be positive".into());
        }
        for (name, v) in [
            ("ratio_alpha", self.ratio_alpha * self.n_wholesalers as f64),
            ("ratio_beta", self.ratio_beta * self.n_wholesalers as f64),
        ] {
            if (v - v.round()).abs() > 1e-9 || v.round() < 1.0 {
                return fail(format!("{name} × n_wholesalers must be a positive integer"));
            }
        }
        if !(self.retailer_mean_in_degree >= 1.0) {
            return fail(format!(
                "retailer_mean_in_degree = {} violates zero-truncation (mean must be ≥ 1)",
                self.retailer_mean_in_degree
            ));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return fail(format!("rho = {} outside [0, 1]", self.rho));
        }
        if self.replications < 1 {
            return fail("replications must be ≥ 1".into());
        }
        if !(self.gap_threshold >= 0.0) {
            return fail("gap_threshold must be ≥ 0".into());
        }
        if self.coupled {
            let ratio = self.coupling_ratio();
            if (ratio - ratio.round()).abs() > 1e-9 || ratio.round() < 1.0 {
                return fail(format!(
                    "coupled degrees require β·k̄_r^in / (α·k̄_s^out) to be a positive integer, got {ratio}"
                ));
            }
        }
        Ok(())
    }

    /// Serialize as a flat key-value file; `parse_config_str` round-trips it.
    pub fn to_config_string(&self) -> String {
        format!(
            "n_wholesalers = {}\n\
             ratio_alpha = {}\n\
             ratio_beta = {}\n\
             wholesaler_dist = {}\n\
             retailer_dist = {}\n\
             retailer_mean_in_degree = {}\n\
             rho = {}\n\
             ordered = {}\n\
             coupled = {}\n\
             capacity_mode = {}\n\
             horizontal_policy = {}\n\
             replications = {}\n\
             seed = {}\n\
             gap_threshold = {}\n",
            self.n_wholesalers,
            self.ratio_alpha,
            self.ratio_beta,
            self.wholesaler_dist,
            self.retailer_dist,
            self.retailer_mean_in_degree,
            self.rho,
            self.ordered,
            self.coupled,
            self.capacity_mode.token(),
            self.horizontal_policy.token(),
            self.replications,
            self.seed,
            self.gap_threshold,
        )
    }
}

/// Parse a scenario file from disk.
pub fn parse_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

/// Parse the flat key-value scenario format from a string.
pub fn parse_config_str(text: &str) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = i + 1;
        let perr = |msg: String| ScrnError::ParseError { line: lineno, msg };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| perr(format!("expected `key = value`, got `{line}`")))?;
        let key = key.trim();
        let value = value.trim();
        macro_rules! num {
            ($t:ty) => {
                value
                    .parse::<$t>()
                    .map_err(|e| perr(format!("field `{key}`: {e}")))?
            };
        }
        match key {
            "n_wholesalers" => cfg.n_wholesalers = num!(usize),
            "ratio_alpha" => cfg.ratio_alpha = num!(f64),
            "ratio_beta" => cfg.ratio_beta = num!(f64),
            "wholesaler_dist" => {
                cfg.wholesaler_dist = Family::from_token(value)
                    .ok_or_else(|| perr(format!("unknown distribution `{value}`")))?
            }
            "retailer_dist" => {
                cfg.retailer_dist = Family::from_token(value)
                    .ok_or_else(|| perr(format!("unknown distribution `{value}`")))?
            }
            "retailer_mean_in_degree" => cfg.retailer_mean_in_degree = num!(f64),
            "rho" => cfg.rho = num!(f64),
            "ordered" => cfg.ordered = num!(bool),
            "coupled" => cfg.coupled = num!(bool),
            "capacity_mode" => {
                cfg.capacity_mode = CapacityMode::from_token(value)
                    .ok_or_else(|| perr(format!("unknown capacity mode `{value}`")))?
            }
            "horizontal_policy" => {
                cfg.horizontal_policy = HorizontalPolicy::from_token(value)
                    .ok_or_else(|| perr(format!("unknown horizontal policy `{value}`")))?
            }
            "replications" => cfg.replications = num!(usize),
            "seed" => cfg.seed = num!(u64),
            "gap_threshold" => cfg.gap_threshold = num!(f64),
            _ => return Err(perr(format!("unknown key `{key}`"))),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid_paper_baseline() {
        let cfg = ScenarioConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.n_suppliers(), 200);
        assert_eq!(cfg.n_retailers(), 1000);
        assert_eq!(cfg.wholesaler_mean_in_degree(), 2.0);
        assert_eq!(cfg.wholesaler_mean_out_degree(), 20.0);
        assert_eq!(cfg.coupling_ratio(), 10.0);
    }

    #[test]
    fn parse_baseline_file() {
        let cfg = parse_config_str(
            "# paper baseline\n\
             n_wholesalers = 100\n\
             ratio_alpha = 2\n\
             ratio_beta = 10\n\
             wholesaler_dist = regular\n\
             retailer_dist = regular\n\
             retailer_mean_in_degree = 2\n\
             replications = 1000\n",
        )
        .unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
    }

    #[test]
    fn rejects_sub_unit_mean() {
        let err = parse_config_str("retailer_mean_in_degree = 0.5\n").unwrap_err();
        assert!(matches!(err, ScrnError::ConfigInvalid(_)));
    }

    #[test]
    fn rejects_rho_out_of_range() {
        let err = parse_config_str("rho = 1.2\n").unwrap_err();
        assert!(matches!(err, ScrnError::ConfigInvalid(_)));
    }

    #[test]
    fn parse_error_carries_line_number() {
        let err = parse_config_str("rho = 0\nnot a pair\n").unwrap_err();
        match err {
            ScrnError::ParseError { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn round_trip() {
        let mut cfg = ScenarioConfig::default();
        cfg.wholesaler_dist = Family::ZeroTruncatedPowerLaw;
        cfg.retailer_dist = Family::ZeroTruncatedPoisson;
        cfg.retailer_mean_in_degree = 4.0;
        cfg.rho = 0.3;
        cfg.ordered = true;
        cfg.capacity_mode = CapacityMode::TheoreticalMean;
        cfg.horizontal_policy = HorizontalPolicy::Pairs;
        cfg.seed = 7;
        let echoed = parse_config_str(&cfg.to_config_string()).unwrap();
        assert_eq!(cfg, echoed);
    }
}
