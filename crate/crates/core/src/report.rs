//! Every applicable bound for one damped integral, side by side.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bounds::{BoundEngine, BoundId, Frame};
use crate::dconst::{d_constant, DConstant};
use crate::error::{domain, Error, Result};
use crate::integrals::{
    integral_quadrature, integral_quadrature_scaled, undamped_integral, undamped_integral_scaled,
    IntegralSpec,
};

/// Skip reason recorded when `gamma * D >= 1`.
pub const REASON_GAMMA_TOO_LARGE: &str = "γ ≥ 1/D";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub spec: IntegralSpec,
    pub integral: f64,
    pub applicable_bounds: BTreeMap<BoundId, f64>,
    pub rel_errors: BTreeMap<BoundId, f64>,
    pub skipped: BTreeMap<BoundId, String>,
    pub d_constant: Option<DConstant>,
}

impl BoundReport {
    /// Lower bounds not above and upper bounds not below the integral,
    /// allowing `slack * |integral|`.
    pub fn is_consistent(&self, slack: f64) -> bool {
        let tol = slack * self.integral.abs();
        self.applicable_bounds.iter().all(|(id, &b)| {
            if id.is_lower() {
                b <= self.integral + tol
            } else {
                b >= self.integral - tol
            }
        })
    }
}

/// The integral bounded by `id`: undamped for `bi1`-`bi3`, damped otherwise.
pub fn reference_integral(spec: &IntegralSpec) -> Result<f64> {
    if spec.gamma == 0.0 {
        Ok(undamped_integral(spec.nu, spec.n, spec.x)?.value)
    } else {
        Ok(integral_quadrature(spec)?.value)
    }
}

/// `e^(-(1-gamma) x)` times the integral; finite for any `x`.
pub fn reference_integral_scaled(spec: &IntegralSpec) -> Result<f64> {
    spec.validate()?;
    if spec.gamma == 0.0 {
        Ok(undamped_integral_scaled(spec.nu, spec.n, spec.x)?.value)
    } else {
        Ok(integral_quadrature_scaled(spec)?.value)
    }
}

fn check_family(id: BoundId, spec: &IntegralSpec) -> Result<()> {
    if id.is_damped() == (spec.gamma > 0.0) {
        return Ok(());
    }
    Err(domain(format!(
        "{id} bounds the {} integral but gamma = {}",
        if id.is_damped() { "damped" } else { "undamped" },
        spec.gamma
    )))
}

fn needs_zero_shift(id: BoundId, spec: &IntegralSpec) -> Result<()> {
    let only_n0 = matches!(id, BoundId::Bi1 | BoundId::Bi4 | BoundId::Bi5);
    if only_n0 && spec.n != 0.0 {
        return Err(domain(format!(
            "{id} is stated for n = 0 only, got n = {}",
            spec.n
        )));
    }
    Ok(())
}

impl BoundEngine {
    /// Evaluates bound `id` at `spec`, multiplied by `e^(-shift)`.
    fn evaluate_in(
        &self,
        frame: Frame,
        id: BoundId,
        spec: &IntegralSpec,
        d: Option<&DConstant>,
    ) -> Result<f64> {
        spec.validate()?;
        check_family(id, spec)?;
        needs_zero_shift(id, spec)?;
        let IntegralSpec { gamma, nu, n, x } = *spec;
        let need_d = || d.ok_or_else(|| domain(format!("{id} needs a D constant")));
        match id {
            BoundId::Bi1 => self.bi1(frame, nu, x),
            BoundId::Bi2 => self.bi2(frame, nu, n, x),
            BoundId::Bi3 => self.bi3(frame, nu, n, x),
            BoundId::Bi4 => self.bi4(frame, gamma, nu, x),
            BoundId::Bi5 => self.bi5(frame, gamma, nu, x),
            BoundId::Bi7 => self.bi7(frame, gamma, nu, n, x, need_d()?),
            BoundId::Bi8 => self.bi8(frame, gamma, nu, n, x, need_d()?),
        }
    }

    pub fn evaluate(&self, id: BoundId, spec: &IntegralSpec, d: Option<&DConstant>) -> Result<f64> {
        self.evaluate_in(Frame::PLAIN, id, spec, d)
    }

    /// Bound `id` times `e^(-(1-gamma) x)`, comparable with
    /// [`reference_integral_scaled`] at any `x`.
    pub fn evaluate_scaled(
        &self,
        id: BoundId,
        spec: &IntegralSpec,
        d: Option<&DConstant>,
    ) -> Result<f64> {
        self.evaluate_in(Frame::scaled(spec.growth() * spec.x), id, spec, d)
    }

    pub fn bound_report(&self, spec: &IntegralSpec, d: Option<&DConstant>) -> Result<BoundReport> {
        spec.validate()?;
        let integral = reference_integral(spec)?;
        let mut report = BoundReport {
            spec: *spec,
            integral,
            applicable_bounds: BTreeMap::new(),
            rel_errors: BTreeMap::new(),
            skipped: BTreeMap::new(),
            d_constant: None,
        };
        let strict_order = spec.nu > -0.5 * (spec.n + 1.0);
        let computed_d;
        let d = if spec.gamma > 0.0 && strict_order {
            match d {
                Some(d) => Some(d),
                None => {
                    computed_d = d_constant(spec.nu, spec.n)?;
                    Some(&computed_d)
                }
            }
        } else {
            None
        };
        report.d_constant = d.copied();
        for id in BoundId::ALL {
            if id.is_damped() != (spec.gamma > 0.0) {
                let reason = if spec.gamma > 0.0 {
                    "bounds the undamped integral"
                } else {
                    "gamma = 0"
                };
                report.skipped.insert(id, reason.to_string());
                continue;
            }
            if matches!(id, BoundId::Bi7 | BoundId::Bi8) && !strict_order {
                report
                    .skipped
                    .insert(id, "requires nu > -(n+1)/2".to_string());
                continue;
            }
            match self.evaluate(id, spec, d) {
                Ok(v) => {
                    report.applicable_bounds.insert(id, v);
                    report
                        .rel_errors
                        .insert(id, ((integral - v) / integral).abs());
                }
                Err(Error::Inapplicable(_)) => {
                    report
                        .skipped
                        .insert(id, REASON_GAMMA_TOO_LARGE.to_string());
                }
                Err(Error::Domain(msg)) => {
                    report.skipped.insert(id, msg);
                }
                Err(e) => return Err(e),
            }
        }
        Ok(report)
    }
}

/// [`BoundEngine::bound_report`] with the standard coefficients. Computes
/// `D_(nu,n)` when `d` is `None` and the damped upper bounds are in play.
pub fn bound_report(spec: &IntegralSpec, d: Option<&DConstant>) -> Result<BoundReport> {
    BoundEngine::default().bound_report(spec, d)
}
