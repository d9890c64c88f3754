//! Modified Struve function of the first kind `L_nu(x)` for real order
//! `nu > -3/2` and real `x >= 0`.
//!
//! `L_nu(x) = sum_k (x/2)^(nu+2k+1) / (Gamma(k+3/2) Gamma(k+nu+3/2))`.
//! All terms are positive for `x > 0`, so direct summation loses no
//! accuracy to cancellation; the only obstacle is the `e^x` growth, handled
//! by [`struve_l_scaled`].

use std::f64::consts::{FRAC_2_PI, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gamma::{gamma_fn, ln_gamma};
use crate::series::{
    series_config, sum_by_ratio, sum_by_ratio_tracked, SeriesConfig, SeriesEval, Tracked,
};

/// Largest argument accepted by the unscaled evaluation.
pub const PLAIN_X_MAX: f64 = 700.0;
/// Below this argument the scaled evaluation is `e^-x` times the plain one.
pub const SCALED_SWITCH_X: f64 = 30.0;

/// Order `nu` of a modified Struve function, restricted to `nu > -3/2`,
/// where `L_nu(x) > 0` for every `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Order(f64);

impl Order {
    pub fn new(nu: f64) -> Result<Self> {
        if nu.is_finite() && nu > -1.5 {
            Ok(Order(nu))
        } else {
            Err(domain(format!(
                "Struve order must satisfy nu > -3/2, got {nu}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Order {
    type Error = Error;
    fn try_from(nu: f64) -> Result<Self> {
        Order::new(nu)
    }
}

impl From<Order> for f64 {
    fn from(o: Order) -> f64 {
        o.0
    }
}

/// Value at the origin: 0 for `nu > -1`, `2/pi` at `nu = -1`, divergent below.
fn at_origin(nu: f64) -> Result<SeriesEval> {
    if nu > -1.0 {
        Ok(SeriesEval::exact(0.0))
    } else if nu == -1.0 {
        Ok(SeriesEval::exact(FRAC_2_PI))
    } else {
        Err(domain(format!(
            "L_nu(x) diverges as x -> 0 for nu = {nu} < -1"
        )))
    }
}

fn check_argument(x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain(format!(
            "Struve argument must be finite and >= 0, got {x}"
        )))
    }
}

/// Leading series term `(x/2)^(nu+1) / (Gamma(3/2) Gamma(nu+3/2))`.
fn leading_term(nu: f64, x: f64) -> Result<Tracked> {
    let half = 0.5 * x;
    let direct = half.powf(nu + 1.0) / (gamma_fn(1.5)? * gamma_fn(nu + 1.5)?);
    if direct.is_normal() {
        return Ok(Tracked::new(direct));
    }
    let ln = (nu + 1.0) * half.ln() - ln_gamma(1.5)? - ln_gamma(nu + 1.5)?;
    Ok(Tracked::from_ln(ln))
}

fn term_ratio(nu: f64, x: f64) -> impl Fn(usize) -> f64 {
    let q = 0.25 * x * x;
    move |k| {
        let kf = k as f64;
        q / ((kf + 1.5) * (kf + nu + 1.5))
    }
}

/// `L_nu(x)` by its defining series. Refuses `x > 700` (use the scaled form).
pub fn struve_l(nu: Order, x: f64) -> Result<SeriesEval> {
    struve_l_with(nu, x, series_config())
}

pub fn struve_l_with(nu: Order, x: f64, cfg: &SeriesConfig) -> Result<SeriesEval> {
    let nu = nu.value();
    check_argument(x)?;
    if x == 0.0 {
        return at_origin(nu);
    }
    if x > PLAIN_X_MAX {
        return Err(Error::Overflow(format!(
            "L_nu(x) for x = {x} > {PLAIN_X_MAX}; use the scaled evaluation"
        )));
    }
    let first = leading_term(nu, x)?;
    if first.exp2 == 0 {
        sum_by_ratio(first.mantissa, term_ratio(nu, x), cfg)
    } else {
        sum_by_ratio_tracked(first, term_ratio(nu, x), cfg).map(|s| s.to_series_eval(0.0))
    }
}

/// Exponentially scaled `e^-x L_nu(x)`, finite for every finite `x >= 0`.
pub fn struve_l_scaled(nu: Order, x: f64) -> Result<SeriesEval> {
    struve_l_scaled_with(nu, x, series_config())
}

pub fn struve_l_scaled_with(nu: Order, x: f64, cfg: &SeriesConfig) -> Result<SeriesEval> {
    check_argument(x)?;
    if x == 0.0 {
        return at_origin(nu.value());
    }
    if x <= SCALED_SWITCH_X {
        let factor = (-x).exp();
        return struve_l_with(nu, x, cfg).map(|s| s.scaled(factor));
    }
    let first = leading_term(nu.value(), x)?;
    match sum_by_ratio_tracked(first, term_ratio(nu.value(), x), cfg) {
        Ok(sum) => Ok(sum.to_series_eval(x)),
        Err(Error::NonConvergence { .. }) if x >= PLAIN_X_MAX => {
            large_argument_scaled(nu.value(), x)
        }
        Err(e) => Err(e),
    }
}

/// Large-argument expansion of `e^-x L_nu(x)`.
///
/// `L_nu - I_nu` grows only algebraically, so past `x = 700` its scaled
/// contribution is below the binary64 resolution of `e^-x I_nu(x)`, which
/// is summed from its Hankel expansion.
fn large_argument_scaled(nu: f64, x: f64) -> Result<SeriesEval> {
    // e^-x |L_nu - I_nu| ~ (x/2)^(nu-1) e^-x / sqrt(pi) relative to 1/sqrt(2 pi x)
    if (nu + 0.5) * x.ln() - x > -45.0 {
        return Err(Error::NonConvergence {
            terms: 0,
            partial: f64::NAN,
            last_term: f64::NAN,
        });
    }
    let mu = 4.0 * nu * nu;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut k = 1;
    loop {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (8.0 * k as f64 * x);
        if next.abs() > term.abs() || k > 200 {
            // asymptotic series has started to diverge
            if term.abs() > 1e-15 * sum.abs() {
                return Err(Error::NonConvergence {
                    terms: k,
                    partial: sum,
                    last_term: term,
                });
            }
            break;
        }
        term = next;
        sum += term;
        k += 1;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    let norm = 1.0 / (2.0 * PI * x).sqrt();
    Ok(SeriesEval {
        value: norm * sum,
        abs_error_estimate: norm * (term.abs() + 4.0 * f64::EPSILON * sum.abs()),
        terms_used: k,
        converged: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(nu: f64, x: f64) -> f64 {
        struve_l(Order::new(nu).unwrap(), x).unwrap().value
    }

    fn ls(nu: f64, x: f64) -> f64 {
        struve_l_scaled(Order::new(nu).unwrap(), x).unwrap().value
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn order_domain() {
        assert!(Order::new(-1.5).is_err());
        assert!(Order::new(-1.49).is_ok());
        assert!(Order::new(f64::NAN).is_err());
        assert!(Order::try_from(f64::INFINITY).is_err());
    }

    #[test]
    fn origin_values() {
        assert_eq!(l(0.0, 0.0), 0.0);
        assert_eq!(l(3.5, 0.0), 0.0);
        assert_eq!(l(-1.0, 0.0), FRAC_2_PI);
        assert!(struve_l(Order::new(-1.2).unwrap(), 0.0).is_err());
        assert_eq!(ls(0.0, 0.0), 0.0);
    }

    #[test]
    fn reference_values() {
        // 0.71024318593789088874 (mpmath struvel)
        assert!(
            rel(l(0.0, 1.0), 0.710_243_185_937_890_9) < 5e-15,
            "{}",
            l(0.0, 1.0)
        );
        // half order closed form sqrt(2/(pi x)) (cosh x - 1)
        for &x in &[0.1, 1.0, 3.0, 12.0, 29.0, 60.0] {
            let closed = (2.0 / (PI * x)).sqrt() * 2.0 * (0.5 * x).sinh().powi(2);
            assert!(rel(l(0.5, x), closed) < 1e-14, "x = {x}");
        }
        // nu = -1/2: sqrt(2/(pi x)) sinh x
        for &x in &[0.2, 2.0, 25.0] {
            let closed = (2.0 / (PI * x)).sqrt() * x.sinh();
            assert!(rel(l(-0.5, x), closed) < 1e-14, "x = {x}");
        }
    }

    #[test]
    fn plain_refuses_overflow_region() {
        assert!(matches!(
            struve_l(Order::new(0.0).unwrap(), 701.0),
            Err(Error::Overflow(_))
        ));
        assert!(l(0.0, 700.0).is_finite());
    }

    #[test]
    fn scaled_matches_plain() {
        for &nu in &[-1.2, 0.0, 1.0, 4.5, 12.0] {
            for &x in &[0.5, 10.0, 30.0, 31.0, 100.0, 350.0, 650.0] {
                let a = ls(nu, x);
                let b = (-x).exp() * l(nu, x);
                assert!(rel(a, b) < 2e-13, "nu={nu} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn scaled_large_arguments() {
        // e^-400 L_0(400) sqrt(2 pi 400) -> 1
        let v = ls(0.0, 400.0) * (2.0 * PI * 400.0).sqrt();
        assert!((v - 1.0).abs() < 0.01);
        for &x in &[900.0, 1_000.0, 2_500.0, 10_000.0, 1e6] {
            let v = ls(0.0, x) * (2.0 * PI * x).sqrt();
            assert!(v.is_finite() && (v - 1.0).abs() < 1.0 / x, "x = {x}: {v}");
        }
        // continuity across the switch to the asymptotic expansion
        let cfg = SeriesConfig {
            max_terms: 4_000,
            ..SeriesConfig::default()
        };
        let o = Order::new(2.0).unwrap();
        let series = struve_l_scaled_with(o, 1_500.0, &cfg).unwrap();
        let asym = large_argument_scaled(2.0, 1_500.0).unwrap();
        assert!(rel(series.value, asym.value) < 1e-13);
    }

    #[test]
    fn term_cap_below_needed_terms_fails() {
        let cfg = SeriesConfig {
            max_terms: 3,
            ..SeriesConfig::default()
        };
        let r = struve_l_with(Order::new(0.0).unwrap(), 5.0, &cfg);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn large_order_does_not_overflow_gamma() {
        // Gamma(201.5) overflows on its own; the leading term goes through logs.
        let v = l(200.0, 500.0);
        assert!(v.is_finite() && v > 0.0);
        let r = l(200.0, 500.0) / l(199.0, 500.0);
        assert!(r < 1.0);
    }
}
