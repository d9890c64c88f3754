//! Lower and upper bounds for `int_0^x e^(-gamma t) t^(-nu) L_(nu+n)(t) dt`
//! and the derived two-sided bound on the `2F3` expression
//! `x^(nu+1) / (sqrt(pi) 2^nu Gamma(nu+1/2)) 2F3(1,1; 3/2,2,nu+1/2; x^2/4)`.
//!
//! Bounds are identified by [`BoundId`]. `bi1`, `bi2`, `bi4` and `bi5` are
//! lower bounds; `bi3`, `bi7` and `bi8` are upper bounds. `bi1`-`bi3` bound
//! the undamped integral (`gamma = 0`), the rest the damped one.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dconst::DConstant;
use crate::error::{domain, Error, Result};
use crate::gamma::{gamma_fn, lower_incomplete_gamma};
use crate::hypergeometric::{pfq, HypergeometricParams};
use crate::integrals::{undamped_integral, undamped_integral_scaled};
use crate::struve::{struve_l, struve_l_scaled, Order};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundId {
    Bi1,
    Bi2,
    Bi3,
    Bi4,
    Bi5,
    Bi7,
    Bi8,
}

impl BoundId {
    pub const ALL: [BoundId; 7] = [
        BoundId::Bi1,
        BoundId::Bi2,
        BoundId::Bi3,
        BoundId::Bi4,
        BoundId::Bi5,
        BoundId::Bi7,
        BoundId::Bi8,
    ];

    pub fn is_lower(self) -> bool {
        matches!(
            self,
            BoundId::Bi1 | BoundId::Bi2 | BoundId::Bi4 | BoundId::Bi5
        )
    }

    /// Whether the bound applies to the damped (`gamma > 0`) integral.
    pub fn is_damped(self) -> bool {
        matches!(
            self,
            BoundId::Bi4 | BoundId::Bi5 | BoundId::Bi7 | BoundId::Bi8
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BoundId::Bi1 => "bi1",
            BoundId::Bi2 => "bi2",
            BoundId::Bi3 => "bi3",
            BoundId::Bi4 => "bi4",
            BoundId::Bi5 => "bi5",
            BoundId::Bi7 => "bi7",
            BoundId::Bi8 => "bi8",
        }
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BoundId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BoundId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| domain(format!("unknown bound '{s}'")))
    }
}

/// The constants `a_(nu,n)`, `b_(nu,n)`, `c_(nu,n)` of the polynomial
/// correction terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

pub fn coefficients(nu: f64, n: f64) -> Result<BoundCoefficients> {
    let m = nu + n;
    if !(m + 2.5 > 0.0) || !m.is_finite() {
        return Err(domain(format!("coefficients need nu + n > -5/2, got {m}")));
    }
    for (name, v) in [
        ("n + 1", n + 1.0),
        ("n + 2", n + 2.0),
        ("n + 4", n + 4.0),
        ("nu + n + 1", m + 1.0),
        ("nu + n + 3", m + 3.0),
    ] {
        if v == 0.0 {
            return Err(domain(format!("coefficient denominator {name} vanishes")));
        }
    }
    let sqrt_pi = PI.sqrt();
    let k = 2.0 * nu + n + 1.0;
    let g52 = gamma_fn(m + 2.5)?;
    let g92 = gamma_fn(m + 4.5)?;
    let a = k / (sqrt_pi * 2f64.powf(m + 2.0) * (n + 2.0) * (m + 1.0) * g52);
    let b =
        k * (k + 2.0) / (sqrt_pi * 2f64.powf(m + 4.0) * (n + 1.0) * (n + 4.0) * (m + 3.0) * g92);
    let c = k / (sqrt_pi * 2f64.powf(m + 1.0) * (n + 1.0) * (n + 2.0) * g52);
    Ok(BoundCoefficients { a, b, c })
}

/// `1 / (sqrt(pi) 2^nu Gamma(nu + 3/2))`, the constant in the derivative of
/// `L_nu(x) / x^nu` and in the small-`x` limit of `L_nu`.
pub(crate) fn derivative_constant(nu: f64) -> Result<f64> {
    Ok(1.0 / (PI.sqrt() * 2f64.powf(nu) * gamma_fn(nu + 1.5)?))
}

/// Evaluation frame: every quantity is returned multiplied by `e^(-shift)`.
/// A zero shift gives plain values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Frame {
    shift: f64,
}

impl Frame {
    pub const PLAIN: Frame = Frame { shift: 0.0 };

    pub fn scaled(shift: f64) -> Frame {
        Frame { shift }
    }

    /// Frame for `e^(-extra)` times a quantity.
    fn with_extra(self, extra: f64) -> Frame {
        Frame {
            shift: self.shift + extra,
        }
    }

    /// `L_mu(x) / x^nu`
    fn struve_over_power(self, mu: f64, nu: f64, x: f64) -> Result<f64> {
        let order = Order::new(mu)?;
        if self.shift == 0.0 {
            return Ok(struve_l(order, x)?.value * x.powf(-nu));
        }
        Ok(struve_l_scaled(order, x)?.value * (x - self.shift - nu * x.ln()).exp())
    }

    /// `coeff * x^p`
    fn power(self, coeff: f64, p: f64, x: f64) -> f64 {
        if coeff == 0.0 {
            return 0.0;
        }
        if self.shift == 0.0 {
            coeff * x.powf(p)
        } else {
            coeff * (p * x.ln() - self.shift).exp()
        }
    }

    fn constant(self, v: f64) -> f64 {
        v * (-self.shift).exp()
    }

    /// `int_0^x L_(nu+n)(t) / t^nu dt`
    fn undamped(self, nu: f64, n: f64, x: f64) -> Result<f64> {
        if self.shift == 0.0 {
            return Ok(undamped_integral(nu, n, x)?.value);
        }
        Ok(undamped_integral_scaled(nu, n, x)?.value * (x - self.shift).exp())
    }
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("bounds require x > 0, got {x}")))
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(domain(format!(
            "damped bounds require 0 < gamma < 1, got {gamma}"
        )))
    }
}

fn check_shifted_order(nu: f64, n: f64, strict: bool) -> Result<()> {
    if !(n > -1.0) || !n.is_finite() {
        return Err(domain(format!("bounds require n > -1, got {n}")));
    }
    let edge = -0.5 * (n + 1.0);
    let ok = if strict { nu > edge } else { nu >= edge };
    if ok && nu.is_finite() {
        Ok(())
    } else {
        let rel = if strict { ">" } else { ">=" };
        Err(domain(format!(
            "bound requires nu {rel} -(n+1)/2 = {edge}, got nu = {nu}"
        )))
    }
}

/// Source of the coefficient triple used by a [`BoundEngine`].
pub type CoefficientFn = fn(f64, f64) -> Result<BoundCoefficients>;

/// Evaluates every bound from a coefficient source. The default engine uses
/// [`coefficients`]; substituting another source is how the verification
/// suite checks that it detects broken bounds.
#[derive(Debug, Clone, Copy)]
pub struct BoundEngine {
    pub coefficients: CoefficientFn,
}

impl Default for BoundEngine {
    fn default() -> Self {
        BoundEngine { coefficients }
    }
}

impl BoundEngine {
    pub(crate) fn bi1(&self, frame: Frame, nu: f64, x: f64) -> Result<f64> {
        Order::new(nu)?;
        check_x(x)?;
        let g = derivative_constant(nu)?;
        Ok(frame.struve_over_power(nu, nu, x)? - frame.power(g, 1.0, x))
    }

    pub(crate) fn bi2(&self, frame: Frame, nu: f64, n: f64, x: f64) -> Result<f64> {
        check_shifted_order(nu, n, false)?;
        check_x(x)?;
        let co = (self.coefficients)(nu, n)?;
        Ok(frame.struve_over_power(nu + n + 1.0, nu, x)? - frame.power(co.a, n + 2.0, x))
    }

    pub(crate) fn bi3(&self, frame: Frame, nu: f64, n: f64, x: f64) -> Result<f64> {
        check_shifted_order(nu, n, false)?;
        check_x(x)?;
        let co = (self.coefficients)(nu, n)?;
        let lead = 2.0 * (nu + n + 1.0) / (n + 1.0);
        let tail = (2.0 * nu + n + 1.0) / (n + 1.0);
        let mut v = lead * frame.struve_over_power(nu + n + 1.0, nu, x)?;
        if tail != 0.0 {
            v -= tail * frame.struve_over_power(nu + n + 3.0, nu, x)?;
        }
        Ok(v + frame.power(co.b, n + 4.0, x) - frame.power(co.c, n + 2.0, x))
    }

    pub(crate) fn bi4(&self, frame: Frame, gamma: f64, nu: f64, x: f64) -> Result<f64> {
        check_gamma(gamma)?;
        Order::new(nu)?;
        check_x(x)?;
        let g = derivative_constant(nu)?;
        let damped = frame.with_extra(gamma * x).undamped(nu, 0.0, x)?;
        // (1 - (1 + gamma x) e^(-gamma x)) = gamma_low(2, gamma x)
        let correction = g * lower_incomplete_gamma(2.0, gamma * x)? / gamma;
        Ok((damped - frame.constant(correction)) / (1.0 - gamma))
    }

    pub(crate) fn bi5(&self, frame: Frame, gamma: f64, nu: f64, x: f64) -> Result<f64> {
        check_gamma(gamma)?;
        Order::new(nu)?;
        check_x(x)?;
        let g = derivative_constant(nu)?;
        let head = frame.with_extra(gamma * x).struve_over_power(nu, nu, x)?;
        let correction = g * (1.0 + gamma * x) * -(-gamma * x).exp_m1() / gamma;
        Ok((head - frame.constant(correction)) / (1.0 - gamma))
    }

    fn damped_prefactor(gamma: f64, nu: f64, n: f64, x: f64, d: &DConstant) -> Result<f64> {
        check_gamma(gamma)?;
        check_shifted_order(nu, n, true)?;
        check_x(x)?;
        if (d.nu - nu).abs() > 1e-12 * nu.abs().max(1.0)
            || (d.n - n).abs() > 1e-12 * n.abs().max(1.0)
        {
            return Err(domain(format!(
                "D constant computed for (nu, n) = ({}, {}) used at ({nu}, {n})",
                d.nu, d.n
            )));
        }
        if gamma * d.value >= 1.0 {
            return Err(Error::Inapplicable(format!(
                "gamma >= 1/D: gamma = {gamma}, 1/D = {}",
                1.0 / d.value
            )));
        }
        Ok(1.0 / (1.0 - d.value * gamma))
    }

    pub(crate) fn bi7(
        &self,
        frame: Frame,
        gamma: f64,
        nu: f64,
        n: f64,
        x: f64,
        d: &DConstant,
    ) -> Result<f64> {
        let k = Self::damped_prefactor(gamma, nu, n, x, d)?;
        Ok(k * frame.with_extra(gamma * x).undamped(nu, n, x)?)
    }

    pub(crate) fn bi8(
        &self,
        frame: Frame,
        gamma: f64,
        nu: f64,
        n: f64,
        x: f64,
        d: &DConstant,
    ) -> Result<f64> {
        let k = Self::damped_prefactor(gamma, nu, n, x, d)?;
        Ok(k * self.bi3(frame.with_extra(gamma * x), nu, n, x)?)
    }

    pub fn lower_bi1(&self, nu: f64, x: f64) -> Result<f64> {
        self.bi1(Frame::PLAIN, nu, x)
    }

    pub fn lower_bi2(&self, nu: f64, n: f64, x: f64) -> Result<f64> {
        self.bi2(Frame::PLAIN, nu, n, x)
    }

    pub fn upper_bi3(&self, nu: f64, n: f64, x: f64) -> Result<f64> {
        self.bi3(Frame::PLAIN, nu, n, x)
    }

    pub fn lower_bi4(&self, gamma: f64, nu: f64, x: f64) -> Result<f64> {
        self.bi4(Frame::PLAIN, gamma, nu, x)
    }

    pub fn lower_bi5(&self, gamma: f64, nu: f64, x: f64) -> Result<f64> {
        self.bi5(Frame::PLAIN, gamma, nu, x)
    }

    pub fn upper_bi7(&self, gamma: f64, nu: f64, n: f64, x: f64, d: &DConstant) -> Result<f64> {
        self.bi7(Frame::PLAIN, gamma, nu, n, x, d)
    }

    pub fn upper_bi8(&self, gamma: f64, nu: f64, n: f64, x: f64, d: &DConstant) -> Result<f64> {
        self.bi8(Frame::PLAIN, gamma, nu, n, x, d)
    }

    /// Lower and upper bound on [`corollary_middle`].
    pub fn corollary_bounds(&self, nu: f64, x: f64) -> Result<(f64, f64)> {
        check_corollary_order(nu)?;
        check_x(x)?;
        let co = (self.coefficients)(nu - 1.0, 0.0)?;
        let l_nu = struve_l(Order::new(nu)?, x)?.value;
        let l_nu2 = struve_l(Order::new(nu + 2.0)?, x)?.value;
        let lower = l_nu - co.a * x.powf(nu + 1.0);
        let upper = 2.0 * nu * l_nu - (2.0 * nu - 1.0) * l_nu2 + co.b * x.powf(nu + 3.0)
            - co.c * x.powf(nu + 1.0);
        Ok((lower, upper))
    }
}

fn check_corollary_order(nu: f64) -> Result<()> {
    if nu > 0.5 && nu.is_finite() {
        Ok(())
    } else {
        Err(domain(format!(
            "corollary bounds require nu > 1/2, got {nu}"
        )))
    }
}

pub fn lower_bi1(nu: f64, x: f64) -> Result<f64> {
    BoundEngine::default().lower_bi1(nu, x)
}

pub fn lower_bi2(nu: f64, n: f64, x: f64) -> Result<f64> {
    BoundEngine::default().lower_bi2(nu, n, x)
}

pub fn upper_bi3(nu: f64, n: f64, x: f64) -> Result<f64> {
    BoundEngine::default().upper_bi3(nu, n, x)
}

pub fn lower_bi4(gamma: f64, nu: f64, x: f64) -> Result<f64> {
    BoundEngine::default().lower_bi4(gamma, nu, x)
}

pub fn lower_bi5(gamma: f64, nu: f64, x: f64) -> Result<f64> {
    BoundEngine::default().lower_bi5(gamma, nu, x)
}

pub fn upper_bi7(gamma: f64, nu: f64, n: f64, x: f64, d: &DConstant) -> Result<f64> {
    BoundEngine::default().upper_bi7(gamma, nu, n, x, d)
}

pub fn upper_bi8(gamma: f64, nu: f64, n: f64, x: f64, d: &DConstant) -> Result<f64> {
    BoundEngine::default().upper_bi8(gamma, nu, n, x, d)
}

/// `x^(nu+1) / (sqrt(pi) 2^nu Gamma(nu+1/2)) * 2F3(1,1; 3/2,2,nu+1/2; x^2/4)` for `nu > 1/2`.
pub fn corollary_middle(nu: f64, x: f64) -> Result<f64> {
    check_corollary_order(nu)?;
    check_x(x)?;
    let params = HypergeometricParams::new(vec![1.0, 1.0], vec![1.5, 2.0, nu + 0.5])?;
    let series = pfq(&params, 0.25 * x * x)?.value;
    let v = x.powf(nu + 1.0) / (PI.sqrt() * 2f64.powf(nu) * gamma_fn(nu + 0.5)?) * series;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("corollary expression at x = {x}")))
    }
}

pub fn corollary_bounds(nu: f64, x: f64) -> Result<(f64, f64)> {
    BoundEngine::default().corollary_bounds(nu, x)
}
