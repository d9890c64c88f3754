//! Summation of power series with a configurable stopping rule, plus the
//! exponent-tracked variant used for exponentially scaled evaluations.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of series terms.
pub const DEFAULT_MAX_TERMS: usize = 600;
/// Environment variable that overrides the term cap.
pub const MAX_TERMS_ENV: &str = "STRUVE_MAX_TERMS";

/// Stopping rule for series summation: stop once two consecutive terms are
/// at most `term_tol` times the partial sum in magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesConfig {
    pub max_terms: usize,
    pub term_tol: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            max_terms: DEFAULT_MAX_TERMS,
            term_tol: 1e-16,
        }
    }
}

impl SeriesConfig {
    /// Default configuration with the term cap taken from `STRUVE_MAX_TERMS`
    /// when it is set to a positive integer.
    pub fn from_env() -> Self {
        let mut cfg = SeriesConfig::default();
        if let Some(n) = std::env::var(MAX_TERMS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
        {
            cfg.max_terms = n;
        }
        cfg
    }

    /// Relative accuracy promised by a converged evaluation.
    pub fn rel_tol(&self) -> f64 {
        2.0 * self.term_tol
    }
}

/// Process-wide configuration, read from the environment on first use.
pub fn series_config() -> &'static SeriesConfig {
    static CONFIG: OnceLock<SeriesConfig> = OnceLock::new();
    CONFIG.get_or_init(SeriesConfig::from_env)
}

/// A series value with its error estimate and convergence metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesEval {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub terms_used: usize,
    pub converged: bool,
}

impl SeriesEval {
    pub(crate) fn exact(value: f64) -> Self {
        SeriesEval {
            value,
            abs_error_estimate: 0.0,
            terms_used: 0,
            converged: true,
        }
    }

    /// Multiplies value and error estimate by a constant factor.
    pub(crate) fn scaled(self, factor: f64) -> Self {
        SeriesEval {
            value: self.value * factor,
            abs_error_estimate: self.abs_error_estimate * factor.abs(),
            ..self
        }
    }
}

/// Sums `t_0 + t_1 + ...` with `t_0 = first` and `t_{k+1} = t_k * ratio(k)`.
pub(crate) fn sum_by_ratio(
    first: f64,
    mut ratio: impl FnMut(usize) -> f64,
    cfg: &SeriesConfig,
) -> Result<SeriesEval> {
    let mut term = first;
    let mut sum = first;
    let mut small_run = 0;
    let mut k = 0;
    loop {
        if term.abs() <= cfg.term_tol * sum.abs() {
            small_run += 1;
            if small_run == 2 {
                break;
            }
        } else {
            small_run = 0;
        }
        if k + 1 >= cfg.max_terms {
            return Err(Error::NonConvergence {
                terms: k + 1,
                partial: sum,
                last_term: term,
            });
        }
        term *= ratio(k);
        sum += term;
        k += 1;
        if !sum.is_finite() {
            return Err(Error::Overflow(format!(
                "series partial sum after {k} terms"
            )));
        }
    }
    Ok(SeriesEval {
        value: sum,
        abs_error_estimate: 2.0 * term.abs(),
        terms_used: k + 1,
        converged: true,
    })
}

/// A binary64 mantissa with a separate power-of-two exponent:
/// the represented value is `mantissa * 2^exp2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Tracked {
    pub mantissa: f64,
    pub exp2: i64,
}

const RESCALE_BITS: i32 = 512;

impl Tracked {
    pub fn new(v: f64) -> Self {
        Tracked {
            mantissa: v,
            exp2: 0,
        }
    }

    /// Builds `exp(ln_value)` without overflow.
    pub fn from_ln(ln_value: f64) -> Self {
        let e = (ln_value / std::f64::consts::LN_2).floor();
        let r = reduce_ln2(ln_value, e);
        Tracked {
            mantissa: r.exp(),
            exp2: e as i64,
        }
    }

    /// `self * e^(-shift)` as a plain binary64 value.
    pub fn scaled_by_exp(self, shift: f64) -> f64 {
        let m = (shift / std::f64::consts::LN_2).round();
        let r = reduce_ln2(shift, m);
        ldexp(self.mantissa * (-r).exp(), self.exp2 - m as i64)
    }
}

// Cody-Waite split of ln 2; the high part has enough trailing zero bits that
// m * LN2_HI is exact for |m| < 2^20.
const LN2_HI: f64 = 6.931_471_803_691_238_164_90e-1;
const LN2_LO: f64 = 1.908_214_929_270_587_700_02e-10;

/// `v - m ln 2` with the product carried in two parts.
fn reduce_ln2(v: f64, m: f64) -> f64 {
    (v - m * LN2_HI) - m * LN2_LO
}

/// `v * 2^e`, exact whenever the result is a normal number.
pub(crate) fn ldexp(mut v: f64, mut e: i64) -> f64 {
    const STEP: i64 = 1000;
    let up = 2f64.powi(STEP as i32);
    let down = 2f64.powi(-(STEP as i32));
    while e > STEP {
        v *= up;
        e -= STEP;
        if v.is_infinite() || v == 0.0 {
            return v;
        }
    }
    while e < -STEP {
        v *= down;
        e += STEP;
        if v == 0.0 {
            return v;
        }
    }
    v * 2f64.powi(e as i32)
}

/// Result of an exponent-tracked summation.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TrackedSum {
    pub sum: Tracked,
    /// Error estimate in the same binary scale as `sum`.
    pub abs_error: Tracked,
    pub terms_used: usize,
}

impl TrackedSum {
    /// Converts to `sum * e^(-shift)`.
    pub fn to_series_eval(self, shift: f64) -> SeriesEval {
        SeriesEval {
            value: self.sum.scaled_by_exp(shift),
            abs_error_estimate: self.abs_error.scaled_by_exp(shift),
            terms_used: self.terms_used,
            converged: true,
        }
    }
}

/// Same recurrence as [`sum_by_ratio`] but for a positive series whose sum
/// may exceed the binary64 range. Partial sums are renormalised by exact
/// powers of two.
pub(crate) fn sum_by_ratio_tracked(
    first: Tracked,
    mut ratio: impl FnMut(usize) -> f64,
    cfg: &SeriesConfig,
) -> Result<TrackedSum> {
    let threshold = 2f64.powi(RESCALE_BITS);
    let shrink = 2f64.powi(-RESCALE_BITS);
    let mut exp2 = first.exp2;
    let mut term = first.mantissa;
    let mut sum = term;
    let mut small_run = 0;
    let mut k = 0;
    loop {
        if term.abs() <= cfg.term_tol * sum.abs() {
            small_run += 1;
            if small_run == 2 {
                break;
            }
        } else {
            small_run = 0;
        }
        if k + 1 >= cfg.max_terms {
            return Err(Error::NonConvergence {
                terms: k + 1,
                partial: ldexp(sum, exp2),
                last_term: ldexp(term, exp2),
            });
        }
        term *= ratio(k);
        sum += term;
        k += 1;
        if sum.abs() > threshold {
            sum *= shrink;
            term *= shrink;
            exp2 += RESCALE_BITS as i64;
        }
        if !sum.is_finite() {
            return Err(Error::Overflow(format!("tracked series after {k} terms")));
        }
    }
    Ok(TrackedSum {
        sum: Tracked {
            mantissa: sum,
            exp2,
        },
        abs_error: Tracked {
            mantissa: 2.0 * term.abs(),
            exp2,
        },
        terms_used: k + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_series() {
        let cfg = SeriesConfig::default();
        let e = sum_by_ratio(1.0, |k| 1.0 / (k as f64 + 1.0), &cfg).unwrap();
        assert!((e.value - std::f64::consts::E).abs() < 1e-15, "{e:?}");
        assert!(e.converged);
        assert!(e.abs_error_estimate <= cfg.rel_tol() * e.value, "{e:?}");
    }

    #[test]
    fn terminating_series_stops_on_zero_terms() {
        let cfg = SeriesConfig::default();
        // (1 + 1)^3 via binomial terms: ratio (3 - k)/(k + 1)
        let s = sum_by_ratio(1.0, |k| (3.0 - k as f64) / (k as f64 + 1.0), &cfg).unwrap();
        assert_eq!(s.value, 8.0);
        assert!(s.terms_used <= 7);
    }

    #[test]
    fn term_cap_reports_non_convergence() {
        let cfg = SeriesConfig {
            max_terms: 10,
            ..SeriesConfig::default()
        };
        let err = sum_by_ratio(1.0, |_| 1.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { terms: 10, .. }));
    }

    #[test]
    fn tracked_sum_beyond_binary64() {
        // e^800 * e^-800 = 1
        let cfg = SeriesConfig {
            max_terms: 5_000,
            ..SeriesConfig::default()
        };
        let x = 800.0;
        let s = sum_by_ratio_tracked(Tracked::new(1.0), |k| x / (k as f64 + 1.0), &cfg).unwrap();
        let v = s.to_series_eval(x).value;
        assert!((v - 1.0).abs() < 1e-13, "{v}");
    }

    #[test]
    fn tracked_from_ln_round_trips() {
        for &l in &[-900.0, -3.5, 0.0, 2.25, 705.0, 2000.0] {
            let t = Tracked::from_ln(l);
            assert!((t.scaled_by_exp(l) - 1.0).abs() < 1e-15, "{l}");
        }
    }

    #[test]
    fn ldexp_is_exact_on_normals() {
        assert_eq!(ldexp(1.5, 3), 12.0);
        assert_eq!(ldexp(1.0, -1074), f64::from_bits(1));
        assert_eq!(ldexp(1.0, 1023), 2f64.powi(1023));
        assert!(ldexp(1.0, 5000).is_infinite());
    }
}
