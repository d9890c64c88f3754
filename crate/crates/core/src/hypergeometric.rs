//! Generalized hypergeometric series `pFq`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::series::{series_config, sum_by_ratio, SeriesConfig, SeriesEval};

/// Parameters `a_1..a_p; b_1..b_q` of a `pFq` series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypergeometricParams {
    numerator: Vec<f64>,
    denominator: Vec<f64>,
}

fn is_non_positive_integer(b: f64) -> bool {
    b <= 0.0 && b.fract() == 0.0
}

impl HypergeometricParams {
    /// Validates that no denominator parameter is zero or a negative integer
    /// and that `p <= q + 1`.
    pub fn new(numerator: Vec<f64>, denominator: Vec<f64>) -> Result<Self> {
        if numerator.iter().chain(&denominator).any(|v| !v.is_finite()) {
            return Err(domain("hypergeometric parameters must be finite"));
        }
        if let Some(b) = denominator.iter().find(|&&b| is_non_positive_integer(b)) {
            return Err(domain(format!(
                "denominator parameter {b} is zero or a negative integer"
            )));
        }
        if numerator.len() > denominator.len() + 1 {
            return Err(domain(format!(
                "{}F{} diverges for every non-zero argument",
                numerator.len(),
                denominator.len()
            )));
        }
        Ok(HypergeometricParams {
            numerator,
            denominator,
        })
    }

    pub fn numerator(&self) -> &[f64] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[f64] {
        &self.denominator
    }

    fn term_ratio(&self, k: usize, z: f64) -> f64 {
        let kf = k as f64;
        let num: f64 = self.numerator.iter().map(|a| a + kf).product();
        let den: f64 = self.denominator.iter().map(|b| b + kf).product();
        num / den * z / (kf + 1.0)
    }
}

/// Evaluates `pFq(a; b; z)` by direct summation.
pub fn pfq(params: &HypergeometricParams, z: f64) -> Result<SeriesEval> {
    pfq_with(params, z, series_config())
}

pub fn pfq_with(params: &HypergeometricParams, z: f64, cfg: &SeriesConfig) -> Result<SeriesEval> {
    if !z.is_finite() {
        return Err(domain("pFq argument must be finite"));
    }
    if params.numerator.len() == params.denominator.len() + 1 && z.abs() >= 1.0 {
        return Err(domain(format!(
            "{}F{} series requires |z| < 1, got {z}",
            params.numerator.len(),
            params.denominator.len()
        )));
    }
    if z == 0.0 {
        return Ok(SeriesEval::exact(1.0));
    }
    sum_by_ratio(1.0, |k| params.term_ratio(k, z), cfg)
}
