//! The damped Struve integral `int_0^x e^(-gamma t) t^(-nu) L_(nu+n)(t) dt`
//! by three independent routes:
//!
//! * the `2F3` closed form, valid for `gamma = 0, n = 0`;
//! * adaptive quadrature of the integrand, for any admissible parameters;
//! * termwise integration of the defining series, which reduces each term to
//!   a lower incomplete gamma function (a plain power when `gamma = 0`).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gamma::{gamma_fn, ln_gamma, lower_incomplete_gamma};
use crate::hypergeometric::{pfq, HypergeometricParams};
use crate::quadrature::{integrate, QuadratureConfig, QuadratureResult};
use crate::series::{
    series_config, sum_by_ratio, sum_by_ratio_tracked, SeriesConfig, SeriesEval, Tracked,
};
use crate::struve::{struve_l, struve_l_scaled, Order, PLAIN_X_MAX, SCALED_SWITCH_X};

/// Parameters `(gamma, nu, n, x)` of one damped integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralSpec {
    pub gamma: f64,
    pub nu: f64,
    pub n: f64,
    pub x: f64,
}

impl IntegralSpec {
    /// Checks `0 <= gamma < 1`, `n > -1`, `nu + n > -3/2` and `x > 0`.
    pub fn new(gamma: f64, nu: f64, n: f64, x: f64) -> Result<Self> {
        let spec = IntegralSpec { gamma, nu, n, x };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let IntegralSpec { gamma, nu, n, x } = *self;
        if !(0.0..1.0).contains(&gamma) {
            return Err(domain(format!(
                "damping must satisfy 0 <= gamma < 1, got {gamma}"
            )));
        }
        if !(n > -1.0) || !n.is_finite() {
            return Err(domain(format!("order shift must satisfy n > -1, got {n}")));
        }
        if !(nu + n > -1.5) || !nu.is_finite() {
            return Err(domain(format!(
                "need nu + n > -3/2, got nu = {nu}, n = {n}"
            )));
        }
        if !(x > 0.0) || !x.is_finite() {
            return Err(domain(format!("upper limit must satisfy x > 0, got {x}")));
        }
        Ok(())
    }

    fn order(&self) -> Order {
        Order::new(self.nu + self.n).expect("validated: nu + n > -3/2")
    }

    /// Exponential growth rate `(1 - gamma)` of the integral in `x`.
    pub fn growth(&self) -> f64 {
        1.0 - self.gamma
    }
}

/// `e^(-gamma t) t^(-nu) L_(nu+n)(t)`, with its limit 0 at `t = 0`.
pub fn integrand(spec: &IntegralSpec, t: f64) -> Result<f64> {
    spec.validate()?;
    if !(t >= 0.0) {
        return Err(domain(format!("integrand requires t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if t <= PLAIN_X_MAX {
        let l = struve_l(spec.order(), t)?.value;
        Ok((-spec.gamma * t).exp() * t.powf(-spec.nu) * l)
    } else {
        let s = struve_l_scaled(spec.order(), t)?.value;
        Ok(s * ((1.0 - spec.gamma) * t - spec.nu * t.ln()).exp())
    }
}

/// Integrand multiplied by `e^(-(1-gamma) x)`; bounded on `[0, x]` for any `x`.
fn scaled_integrand(spec: &IntegralSpec, order: Order, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let s = struve_l_scaled(order, t)?.value;
    Ok(s * t.powf(-spec.nu) * (spec.growth() * (t - spec.x)).exp())
}

/// `int_0^x L_nu(t) / t^nu dt = x^2 / (sqrt(pi) 2^(nu+1) Gamma(nu+3/2)) * 2F3(1,1; 3/2,2,nu+3/2; x^2/4)`.
pub fn integral_closed_form(nu: f64, x: f64) -> Result<SeriesEval> {
    Order::new(nu)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("upper limit must satisfy x > 0, got {x}")));
    }
    let params = HypergeometricParams::new(vec![1.0, 1.0], vec![1.5, 2.0, nu + 1.5])?;
    let series = pfq(&params, 0.25 * x * x)?;
    let prefactor = x * x / (PI.sqrt() * 2f64.powf(nu + 1.0) * gamma_fn(nu + 1.5)?);
    let eval = series.scaled(prefactor);
    if eval.value.is_finite() {
        Ok(eval)
    } else {
        Err(Error::Overflow(format!("closed-form integral at x = {x}")))
    }
}

/// Leading term and ratio of `sum_k c_k x^(n+2k+2) / (n+2k+2)`, the termwise
/// integral of `L_(nu+n)(t) / t^nu` over `(0, x)`.
fn power_series_parts(nu: f64, n: f64, x: f64) -> Result<(Tracked, impl Fn(usize) -> f64)> {
    let mu = nu + n;
    let direct = x.powf(n + 2.0) * 0.5f64.powf(mu + 1.0)
        / ((n + 2.0) * gamma_fn(1.5)? * gamma_fn(mu + 1.5)?);
    let first = if direct.is_normal() {
        Tracked::new(direct)
    } else {
        Tracked::from_ln(
            (n + 2.0) * x.ln()
                - (mu + 1.0) * std::f64::consts::LN_2
                - (n + 2.0).ln()
                - ln_gamma(1.5)?
                - ln_gamma(mu + 1.5)?,
        )
    };
    let q = 0.25 * x * x;
    let ratio = move |k: usize| {
        let kf = k as f64;
        let s = n + 2.0 * kf + 2.0;
        q * s / ((s + 2.0) * (kf + 1.5) * (kf + mu + 1.5))
    };
    Ok((first, ratio))
}

fn check_undamped(nu: f64, n: f64, x: f64) -> Result<()> {
    IntegralSpec {
        gamma: 0.0,
        nu,
        n,
        x,
    }
    .validate()
}

/// `int_0^x L_(nu+n)(t) / t^nu dt`: the closed form when `n = 0`, termwise
/// power integration otherwise.
pub fn undamped_integral(nu: f64, n: f64, x: f64) -> Result<SeriesEval> {
    check_undamped(nu, n, x)?;
    if n == 0.0 {
        return integral_closed_form(nu, x);
    }
    undamped_power_series(nu, n, x, series_config())
}

fn undamped_power_series(nu: f64, n: f64, x: f64, cfg: &SeriesConfig) -> Result<SeriesEval> {
    let (first, ratio) = power_series_parts(nu, n, x)?;
    if first.exp2 == 0 {
        sum_by_ratio(first.mantissa, ratio, cfg)
    } else {
        sum_by_ratio_tracked(first, ratio, cfg).map(|s| s.to_series_eval(0.0))
    }
}

/// `e^-x int_0^x L_(nu+n)(t) / t^nu dt`, finite well past the binary64 range
/// of the unscaled integral.
pub fn undamped_integral_scaled(nu: f64, n: f64, x: f64) -> Result<SeriesEval> {
    check_undamped(nu, n, x)?;
    if x <= SCALED_SWITCH_X {
        let factor = (-x).exp();
        return undamped_integral(nu, n, x).map(|s| s.scaled(factor));
    }
    let (first, ratio) = power_series_parts(nu, n, x)?;
    sum_by_ratio_tracked(first, ratio, series_config()).map(|s| s.to_series_eval(x))
}

/// Adaptive quadrature of the damped integral.
pub fn integral_quadrature(spec: &IntegralSpec) -> Result<QuadratureResult> {
    integral_quadrature_with(spec, &QuadratureConfig::default())
}

pub fn integral_quadrature_with(
    spec: &IntegralSpec,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    spec.validate()?;
    if spec.x <= SCALED_SWITCH_X {
        let order = spec.order();
        let (gamma, nu) = (spec.gamma, spec.nu);
        return integrate(
            |t| {
                if t == 0.0 {
                    return Ok(0.0);
                }
                Ok((-gamma * t).exp() * t.powf(-nu) * struve_l(order, t)?.value)
            },
            0.0,
            spec.x,
            cfg,
        );
    }
    let scaled = integral_quadrature_scaled_with(spec, cfg)?;
    let factor = (spec.growth() * spec.x).exp();
    let value = scaled.value * factor;
    if !value.is_finite() {
        return Err(Error::Overflow(format!(
            "damped integral at x = {}; use the scaled quadrature",
            spec.x
        )));
    }
    Ok(QuadratureResult {
        value,
        abs_error_estimate: scaled.abs_error_estimate * factor,
        subdivisions: scaled.subdivisions,
    })
}

/// Adaptive quadrature of `e^(-(1-gamma) x)` times the damped integral.
pub fn integral_quadrature_scaled(spec: &IntegralSpec) -> Result<QuadratureResult> {
    integral_quadrature_scaled_with(spec, &QuadratureConfig::default())
}

pub fn integral_quadrature_scaled_with(
    spec: &IntegralSpec,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    spec.validate()?;
    let order = spec.order();
    integrate(|t| scaled_integrand(spec, order, t), 0.0, spec.x, cfg)
}

/// Termwise integral of the defining series:
/// `sum_k (1/2)^(nu+n+2k+1) / (Gamma(k+3/2) Gamma(k+nu+n+3/2)) * gamma^-(n+2k+2) gamma_low(n+2k+2, gamma x)`.
///
/// At `gamma = 0` each term integrates to a plain power.
pub fn integral_series_oracle(spec: &IntegralSpec) -> Result<SeriesEval> {
    integral_series_oracle_with(spec, series_config())
}

pub fn integral_series_oracle_with(spec: &IntegralSpec, cfg: &SeriesConfig) -> Result<SeriesEval> {
    spec.validate()?;
    let IntegralSpec { gamma, nu, n, x } = *spec;
    if gamma == 0.0 {
        return undamped_power_series(nu, n, x, cfg);
    }
    let mu = nu + n;
    let ln_gamma_damp = gamma.ln();
    let z = gamma * x;
    // ln of the coefficient (1/2)^(mu+2k+1) / (Gamma(k+3/2) Gamma(k+mu+3/2))
    let mut ln_coeff = -(mu + 1.0) * std::f64::consts::LN_2 - ln_gamma(1.5)? - ln_gamma(mu + 1.5)?;
    let mut sum = 0.0;
    let mut small_run = 0;
    let mut last = 0.0;
    for k in 0..cfg.max_terms {
        let kf = k as f64;
        let s = n + 2.0 * kf + 2.0;
        let incomplete = lower_incomplete_gamma(s, z)?;
        let term = (ln_coeff + incomplete.ln() - s * ln_gamma_damp).exp();
        sum += term;
        last = term;
        if !sum.is_finite() {
            return Err(Error::Overflow(format!("termwise integral at x = {x}")));
        }
        if term <= cfg.term_tol * sum {
            small_run += 1;
            if small_run == 2 {
                return Ok(SeriesEval {
                    value: sum,
                    abs_error_estimate: 2.0 * term,
                    terms_used: k + 1,
                    converged: true,
                });
            }
        } else {
            small_run = 0;
        }
        ln_coeff -= 4f64.ln() + (kf + 1.5).ln() + (kf + mu + 1.5).ln();
    }
    Err(Error::NonConvergence {
        terms: cfg.max_terms,
        partial: sum,
        last_term: last,
    })
}

/// Natural log of the leading large-`x` behaviour of the damped integral,
/// `x^(-nu-1/2) e^((1-gamma) x) / (sqrt(2 pi) (1 - gamma))`.
pub fn asymptotic_integral_ln(spec: &IntegralSpec) -> f64 {
    spec.growth() * spec.x
        - (spec.nu + 0.5) * spec.x.ln()
        - ((2.0 * PI).sqrt() * spec.growth()).ln()
}

/// Leading large-`x` behaviour of the damped integral (may be `+inf`).
pub fn asymptotic_integral(spec: &IntegralSpec) -> f64 {
    asymptotic_integral_ln(spec).exp()
}

/// Natural log of the large-`x` behaviour of `e^(-gamma x) L_(nu+n)(x) / x^nu`,
/// namely `x^(-nu-1/2) e^((1-gamma) x) / sqrt(2 pi)`.
pub fn asymptotic_endpoint_ln(spec: &IntegralSpec) -> f64 {
    spec.growth() * spec.x - (spec.nu + 0.5) * spec.x.ln() - 0.5 * (2.0 * PI).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn spec_validation() {
        assert!(IntegralSpec::new(0.0, 0.0, 0.0, 1.0).is_ok());
        assert!(IntegralSpec::new(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(IntegralSpec::new(-0.1, 0.0, 0.0, 1.0).is_err());
        assert!(IntegralSpec::new(0.5, 0.0, -1.0, 1.0).is_err());
        assert!(IntegralSpec::new(0.5, -1.0, -0.6, 1.0).is_err());
        assert!(IntegralSpec::new(0.5, 0.0, 0.0, 0.0).is_err());
        assert!(IntegralSpec::new(0.5, f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn integrand_values() {
        let s = IntegralSpec::new(0.0, 0.0, 0.0, 1.0).unwrap();
        assert!(rel(integrand(&s, 1.0).unwrap(), 0.710_243_185_937_890_9) < 1e-14);
        assert_eq!(integrand(&s, 0.0).unwrap(), 0.0);
        let s = IntegralSpec::new(0.5, 0.0, 0.0, 1.0).unwrap();
        // e^-0.5 L_0(1)
        let want = (-0.5f64).exp() * 0.710_243_185_937_890_9;
        assert!(rel(integrand(&s, 1.0).unwrap(), want) < 1e-14);
        assert!(integrand(&s, -1.0).is_err());
        // plain branch against the scaled form used past t = 700
        let s = IntegralSpec::new(0.3, 1.0, 0.0, 650.0).unwrap();
        let plain = integrand(&s, 640.0).unwrap();
        let scaled = scaled_integrand(&s, s.order(), 640.0).unwrap() * (0.7f64 * 650.0).exp();
        assert!(rel(plain, scaled) < 1e-12);
        let s = IntegralSpec::new(0.3, 1.0, 0.0, 800.0).unwrap();
        let far = integrand(&s, 750.0).unwrap();
        let scaled = scaled_integrand(&s, s.order(), 750.0).unwrap() * (0.7f64 * 800.0).exp();
        assert!(rel(far, scaled) < 1e-12);
    }

    #[test]
    fn closed_form_and_power_series_agree() {
        for &nu in &[-1.2, -0.4, 0.0, 1.0, 3.5] {
            for &x in &[0.01, 0.5, 5.0, 40.0] {
                let a = integral_closed_form(nu, x).unwrap().value;
                let b = undamped_power_series(nu, 0.0, x, series_config())
                    .unwrap()
                    .value;
                assert!(rel(a, b) < 1e-13, "nu={nu} x={x}");
            }
        }
    }

    #[test]
    fn undamped_scaled_matches_plain() {
        for &(nu, n) in &[(0.0, 0.0), (1.0, 0.5), (3.0, 2.0)] {
            for &x in &[10.0, 31.0, 120.0, 500.0] {
                let a = undamped_integral_scaled(nu, n, x).unwrap().value;
                let b = (-x).exp() * undamped_integral(nu, n, x).unwrap().value;
                assert!(rel(a, b) < 1e-12, "nu={nu} n={n} x={x}: {a} {b}");
            }
        }
    }

    #[test]
    fn oracle_leading_term() {
        // k = 0 term at (0.5, 0, 0, 1): (2/pi) * gamma^-2 gamma_low(2, 0.5)
        let cfg = SeriesConfig {
            max_terms: 1,
            ..SeriesConfig::default()
        };
        let spec = IntegralSpec::new(0.5, 0.0, 0.0, 1.0).unwrap();
        let err = integral_series_oracle_with(&spec, &cfg).unwrap_err();
        let Error::NonConvergence { partial, .. } = err else {
            panic!("expected non-convergence")
        };
        let want = 2.0 / PI * 4.0 * (1.0 - 1.5 * (-0.5f64).exp());
        assert!(rel(partial, want) < 1e-14);
        assert!((want - 0.229_702_626_349_031_6).abs() < 1e-15);
    }

    #[test]
    fn asymptotic_helpers() {
        let spec = IntegralSpec::new(0.0, 0.0, 0.0, 100.0).unwrap();
        let want = 100f64.exp() / ((2.0 * PI).sqrt() * 10.0);
        assert!(rel(asymptotic_integral(&spec), want) < 1e-13);
        let e = asymptotic_endpoint_ln(&spec);
        assert!((e - (100.0 - 0.5 * 100f64.ln() - 0.5 * (2.0 * PI).ln())).abs() < 1e-12);
    }
}
