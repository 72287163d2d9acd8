use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::CodeError;

const SUM_TOL: f64 = 1e-6;

/// Edge-perspective degree distribution pair `(lambda, rho)`.
///
/// Serialized as `{"lambda": {"2": 0.28, ...}, "rho": {"5": 0.46, ...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    lambda: BTreeMap<u32, f64>,
    rho: BTreeMap<u32, f64>,
}

fn validate(name: &str, map: &BTreeMap<u32, f64>) -> Result<(), CodeError> {
    if map.is_empty() {
        return Err(CodeError::InvalidDistribution(format!("{name} is empty")));
    }
    let mut sum = 0.0;
    for (&d, &f) in map {
        if d == 0 {
            return Err(CodeError::InvalidDistribution(format!(
                "{name} has degree 0"
            )));
        }
        if !f.is_finite() || f < 0.0 {
            return Err(CodeError::InvalidDistribution(format!("{name}_{d} = {f}")));
        }
        sum += f;
    }
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(CodeError::InvalidDistribution(format!(
            "{name} sums to {sum}"
        )));
    }
    Ok(())
}

impl DegreeDistribution {
    pub fn new(lambda: BTreeMap<u32, f64>, rho: BTreeMap<u32, f64>) -> Result<Self, CodeError> {
        let strip = |m: BTreeMap<u32, f64>| m.into_iter().filter(|&(_, f)| f != 0.0).collect();
        let d = Self {
            lambda: strip(lambda),
            rho: strip(rho),
        };
        d.validate()?;
        Ok(d)
    }

    pub fn from_pairs(lambda: &[(u32, f64)], rho: &[(u32, f64)]) -> Result<Self, CodeError> {
        Self::new(
            lambda.iter().copied().collect(),
            rho.iter().copied().collect(),
        )
    }

    pub fn regular(dv: u32, dc: u32) -> Result<Self, CodeError> {
        Self::from_pairs(&[(dv, 1.0)], &[(dc, 1.0)])
    }

    pub fn validate(&self) -> Result<(), CodeError> {
        validate("lambda", &self.lambda)?;
        validate("rho", &self.rho)
    }

    pub fn from_json(s: &str) -> Result<Self, CodeError> {
        let d: Self =
            serde_json::from_str(s).map_err(|e| CodeError::InvalidDistribution(e.to_string()))?;
        d.validate()?;
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("distribution serializes")
    }

    pub fn lambda(&self) -> &BTreeMap<u32, f64> {
        &self.lambda
    }

    pub fn rho(&self) -> &BTreeMap<u32, f64> {
        &self.rho
    }

    pub fn max_var_degree(&self) -> u32 {
        *self.lambda.keys().next_back().expect("validated non-empty")
    }

    pub fn max_check_degree(&self) -> u32 {
        *self.rho.keys().next_back().expect("validated non-empty")
    }

    /// `sum_i lambda_i / i`.
    pub fn lambda_integral(&self) -> f64 {
        self.lambda.iter().map(|(&d, &f)| f / d as f64).sum()
    }

    pub fn rho_integral(&self) -> f64 {
        self.rho.iter().map(|(&d, &f)| f / d as f64).sum()
    }

    /// Design rate `1 - (sum rho_i/i) / (sum lambda_i/i)`.
    pub fn design_rate(&self) -> f64 {
        1.0 - self.rho_integral() / self.lambda_integral()
    }

    /// Node-perspective variable degree fractions.
    pub fn var_node_fractions(&self) -> BTreeMap<u32, f64> {
        node_fractions(&self.lambda)
    }

    pub fn check_node_fractions(&self) -> BTreeMap<u32, f64> {
        node_fractions(&self.rho)
    }

    /// Replaces lambda, keeping rho.
    pub fn with_lambda(&self, lambda: BTreeMap<u32, f64>) -> Result<Self, CodeError> {
        Self::new(lambda, self.rho.clone())
    }

    pub fn with_rho(&self, rho: BTreeMap<u32, f64>) -> Result<Self, CodeError> {
        Self::new(self.lambda.clone(), rho)
    }
}

fn node_fractions(edge: &BTreeMap<u32, f64>) -> BTreeMap<u32, f64> {
    let total: f64 = edge.iter().map(|(&d, &f)| f / d as f64).sum();
    edge.iter()
        .map(|(&d, &f)| (d, f / d as f64 / total))
        .collect()
}
