//! Gamma function and its relatives used by the series.
//!
//! Every gamma argument that arises for orders above -3/2 is positive, so
//! there is no reflection formula here: non-positive arguments are rejected.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// 0.5 * ln(2*pi)
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (Gamma(x + 1) form).
    let mut acc = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    acc
}

/// Gamma function for positive real arguments.
///
/// Lanczos approximation (g = 7, nine coefficients) for `x >= 0.5`, upward
/// recurrence below. Returns `+inf` past the binary64 range (x > 171.6).
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain(format!("gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        // Gamma(x) = Gamma(x + 1) / x
        return Ok(gamma_lanczos(x + 1.0) / x);
    }
    Ok(gamma_lanczos(x))
}

fn gamma_lanczos(x: f64) -> f64 {
    if x > 171.7 {
        return f64::INFINITY;
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // Split the power so t^(z + 1/2) does not overflow before Gamma does.
    let half_pow = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half_pow * (half_pow * (-t).exp()) * lanczos_sum(z)
}

/// Natural logarithm of the gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok(ln_gamma_lanczos(x + 1.0) - x.ln());
    }
    if x < 100.0 {
        return Ok(gamma_lanczos(x).ln());
    }
    Ok(ln_gamma_lanczos(x))
}

fn ln_gamma_lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// Lower incomplete gamma function `gamma_low(s, z) = int_0^z t^(s-1) e^(-t) dt`.
///
/// Series expansion for `z < s + 1`, Lentz continued fraction for the
/// complementary function otherwise.
pub fn lower_incomplete_gamma(s: f64, z: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(domain(format!(
            "lower incomplete gamma requires s > 0, got {s}"
        )));
    }
    if !(z >= 0.0) {
        return Err(domain(format!(
            "lower incomplete gamma requires z >= 0, got {z}"
        )));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let value = if z < s + 1.0 {
        incgamma_series(s, z)?
    } else {
        let q = upper_regularized_cf(s, z)?;
        gamma_fn(s)? * (1.0 - q)
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow(format!(
            "lower incomplete gamma ({s}, {z})"
        )))
    }
}

const INCGAMMA_TOL: f64 = 1e-16;
const INCGAMMA_MAX_ITER: usize = 10_000;

fn incgamma_series(s: f64, z: f64) -> Result<f64> {
    let mut ap = s;
    let mut del = 1.0 / s;
    let mut sum = del;
    for _ in 0..INCGAMMA_MAX_ITER {
        ap += 1.0;
        del *= z / ap;
        sum += del;
        if del.abs() < sum.abs() * INCGAMMA_TOL {
            return Ok(sum * (s * z.ln() - z).exp());
        }
    }
    Err(Error::NonConvergence {
        terms: INCGAMMA_MAX_ITER,
        partial: sum,
        last_term: del,
    })
}

/// Regularized upper incomplete gamma Q(s, z) by continued fraction.
fn upper_regularized_cf(s: f64, z: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = z + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..INCGAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < INCGAMMA_TOL {
            return Ok((s * z.ln() - z - ln_gamma(s)?).exp() * h);
        }
    }
    Err(Error::NonConvergence {
        terms: INCGAMMA_MAX_ITER,
        partial: h,
        last_term: f64::NAN,
    })
}

/// Rising factorial `(a)_k = a (a + 1) ... (a + k - 1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (a + j as f64))
}
