//! Lab configuration: defaults ship as JSON; user files overlay them key by key.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::measure::MeasureSpec;

const DEFAULT: &str = include_str!("default_config.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabConfig {
    pub seed: u64,
    pub polynomials: PolynomialsConfig,
    pub identities: IdentitiesConfig,
    pub asymptotics: AsymptoticsConfig,
    pub littlewood_paley: LittlewoodPaleyConfig,
    pub multipliers: MultipliersConfig,
    pub embeddings: EmbeddingsConfig,
    pub coefficients: CoefficientsConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialsConfig {
    pub degree_min: usize,
    pub degree_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitiesConfig {
    pub binomial_n_max: u32,
    pub binomial_degree: usize,
    pub alternating_max: u32,
    pub divisor_m_max: u32,
    pub divisor_n_max: usize,
    pub divisor_k_max: u32,
    pub weight_alphas: Vec<f64>,
    pub weight_n_max: u64,
    pub weight_points: usize,
    pub weight_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorCase {
    pub m: u32,
    pub sigmas: Vec<f64>,
    pub band_sigma: f64,
    pub band: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitCase {
    pub m: u32,
    pub window: [f64; 2],
    pub points: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharpnessConfig {
    pub sigma: f64,
    pub alphas: Vec<f64>,
    pub band: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptoticsConfig {
    pub direct_terms: usize,
    pub euler_primes: u64,
    pub gamma_primes: u64,
    pub gamma2_tolerance: f64,
    pub residual_max: f64,
    pub divisor: Vec<DivisorCase>,
    pub zeta_power: Vec<FitCase>,
    pub blowup: Vec<FitCase>,
    pub blowup_primes: u64,
    pub eval_sharpness: SharpnessConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LittlewoodPaleyConfig {
    pub alphas: Vec<f64>,
    pub n_max: u64,
    pub weight_tolerance: f64,
    pub b2_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultipliersConfig {
    pub j_max: u64,
    /// `r₀` candidate as `[numerator, denominator]`.
    pub r_good: [u64; 2],
    pub r_bad: f64,
    pub a_values: Vec<f64>,
    pub quadratic_tolerance: f64,
    pub b2_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TEpsilonConfig {
    pub epsilons: Vec<f64>,
    pub trials: u64,
    pub degree_max: usize,
    pub samples: u64,
    pub bins: usize,
    pub slope_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingsConfig {
    pub measure: Value,
    pub b4_trials: u64,
    pub b4_degree_max: usize,
    pub b4_scale_bits: u32,
    pub contraction_trials: u64,
    pub contraction_ps: Vec<f64>,
    pub samples: u64,
    pub basis_ps: Vec<f64>,
    pub basis_pairs: Vec<[usize; 2]>,
    pub basis_samples: u64,
    pub eigen_n_max: u64,
    pub t_epsilon: TEpsilonConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsConfig {
    pub measure: Value,
    pub ps: Vec<f64>,
    pub trials: u64,
    pub samples: u64,
    pub equality_tolerance: f64,
}

/// A measure given either as shorthand text or as a config object.
pub fn measure_from_value(v: &Value) -> Result<MeasureSpec> {
    match v {
        Value::String(s) => MeasureSpec::parse(s),
        other => MeasureSpec::from_config(other),
    }
}

fn overlay(base: &mut Value, top: &Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                match b.get_mut(k) {
                    Some(slot) => overlay(slot, v),
                    None => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (slot, v) => *slot = v.clone(),
    }
}

impl Default for LabConfig {
    fn default() -> Self {
        Self::from_value(&Value::Object(Default::default())).expect("bundled defaults are valid")
    }
}

impl LabConfig {
    pub fn default_value() -> Value {
        serde_json::from_str(DEFAULT).expect("bundled defaults parse")
    }

    /// Defaults overlaid with `user` (objects merge, everything else replaces).
    pub fn from_value(user: &Value) -> Result<Self> {
        if !user.is_object() {
            return Err(Error::Parse("lab config must be a JSON object".into()));
        }
        let mut v = Self::default_value();
        overlay(&mut v, user);
        let cfg: LabConfig =
            serde_json::from_value(v).map_err(|e| Error::Parse(format!("lab config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("lab config: {e}")))?;
        Self::from_value(&v)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    fn validate(&self) -> Result<()> {
        let p = &self.polynomials;
        if p.degree_min == 0 || p.degree_min > p.degree_max {
            return Err(Error::InvalidParameter(
                "polynomials: need 1 <= degree_min <= degree_max".into(),
            ));
        }
        measure_from_value(&self.embeddings.measure)?;
        measure_from_value(&self.coefficients.measure)?;
        let windows = self
            .asymptotics
            .zeta_power
            .iter()
            .chain(&self.asymptotics.blowup);
        for c in windows {
            if !(c.window[0] > 0.5 && c.window[1] > c.window[0]) || c.points < 2 {
                return Err(Error::InvalidParameter(format!(
                    "fit window {:?} must lie in (1/2, ∞) with >= 2 points",
                    c.window
                )));
            }
        }
        if self.multipliers.r_good[1] == 0 {
            return Err(Error::InvalidParameter(
                "multipliers.r_good denominator is zero".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn defaults_round_trip() {
        let c = LabConfig::default();
        assert_eq!(LabConfig::from_value(&c.to_value()).unwrap(), c);
        assert_eq!(c.identities.binomial_n_max, 40);
    }

    #[test]
    fn overlay_replaces_leaves() {
        let c = LabConfig::from_value(&json!({"seed": 5, "identities": {"alternating_max": 3}}))
            .unwrap();
        assert_eq!(c.seed, 5);
        assert_eq!(c.identities.alternating_max, 3);
        assert_eq!(c.identities.binomial_degree, 300);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(LabConfig::from_value(&json!({"sed": 5})).is_err());
        assert!(LabConfig::from_value(&json!([1])).is_err());
        assert!(LabConfig::from_value(&json!({"coefficients": {"measure": "bogus"}})).is_err());
        assert!(LabConfig::from_json("{").is_err());
    }
}
