//! Grid-driven checks of the bounds and of the numerics beneath them.
//!
//! Every check reports a signed margin per sampled point: non-negative means
//! the property holds with that much room, negative means a violation.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{corollary_middle, derivative_constant, BoundEngine, BoundId};
use crate::dconst::{d_constant, ratio_fn, DConstant};
use crate::error::{parse_error, Error, Result};
use crate::format::sig6;
use crate::gamma::gamma_fn;
use crate::integrals::{
    integral_closed_form, integral_quadrature, integral_series_oracle, undamped_integral,
    IntegralSpec,
};
use crate::report::{reference_integral, reference_integral_scaled, REASON_GAMMA_TOO_LARGE};
use crate::struve::{struve_l, struve_l_scaled, Order, SCALED_SWITCH_X};
use crate::table::{TABLE_NU, TABLE_X};

/// Default tolerances, keyed by the names accepted in [`GridConfig::tolerances`].
pub const DEFAULT_TOLERANCES: [(&str, f64); 13] = [
    ("closed_form_rel", 1e-10),
    ("d_sup_abs", 5e-4),
    ("derivative_rel", 1e-5),
    ("equality_rel", 1e-10),
    ("gamma_recurrence_rel", 1e-13),
    ("large_x_limit_abs", 0.02),
    ("oracle_rel", 1e-9),
    ("ordering_slack", 1e-12),
    ("recurrence_rel", 1e-11),
    ("scaling_rel", 1e-13),
    ("small_x_limit_window", 1e-3),
    ("tightness_large_x_window", 0.01),
    ("tightness_small_x_window", 1e-3),
];

/// Upper limit of the large-argument tightness check.
pub const TIGHTNESS_LARGE_X: f64 = 300.0;
/// Upper limit of the small-argument tightness check.
pub const TIGHTNESS_SMALL_X: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    OracleTriangle,
    OrderingUndamped,
    OrderingDamped,
    EqualityBoundary,
    TightnessLargeX,
    TightnessSmallX,
    Recurrence,
    Derivative,
    SmallXLimit,
    LargeXLimit,
    Monotonicity,
    Positivity,
    ScalingConsistency,
    GammaRecurrence,
    DProperties,
    CorollaryChain,
}

impl CheckKind {
    pub const ALL: [CheckKind; 16] = [
        CheckKind::OracleTriangle,
        CheckKind::OrderingUndamped,
        CheckKind::OrderingDamped,
        CheckKind::EqualityBoundary,
        CheckKind::TightnessLargeX,
        CheckKind::TightnessSmallX,
        CheckKind::Recurrence,
        CheckKind::Derivative,
        CheckKind::SmallXLimit,
        CheckKind::LargeXLimit,
        CheckKind::Monotonicity,
        CheckKind::Positivity,
        CheckKind::ScalingConsistency,
        CheckKind::GammaRecurrence,
        CheckKind::DProperties,
        CheckKind::CorollaryChain,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckKind::OracleTriangle => "oracle_triangle",
            CheckKind::OrderingUndamped => "ordering_undamped",
            CheckKind::OrderingDamped => "ordering_damped",
            CheckKind::EqualityBoundary => "equality_boundary",
            CheckKind::TightnessLargeX => "tightness_large_x",
            CheckKind::TightnessSmallX => "tightness_small_x",
            CheckKind::Recurrence => "recurrence",
            CheckKind::Derivative => "derivative",
            CheckKind::SmallXLimit => "small_x_limit",
            CheckKind::LargeXLimit => "large_x_limit",
            CheckKind::Monotonicity => "monotonicity",
            CheckKind::Positivity => "positivity",
            CheckKind::ScalingConsistency => "scaling_consistency",
            CheckKind::GammaRecurrence => "gamma_recurrence",
            CheckKind::DProperties => "d_properties",
            CheckKind::CorollaryChain => "corollary_chain",
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CheckKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| parse_error(format!("unknown check '{s}'")))
    }
}

/// Parameter grid and tolerances for a verification run. Missing fields take
/// their defaults; missing tolerance keys keep their default values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub nu_values: Vec<f64>,
    pub n_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
    pub x_values: Vec<f64>,
    pub tolerances: BTreeMap<String, f64>,
    /// Checks to run; all of them when absent.
    pub checks: Option<Vec<CheckKind>>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            nu_values: vec![-0.4, 0.0, 1.0, 3.0],
            n_values: vec![0.0, 0.5, 2.0],
            gamma_values: vec![0.0, 0.25, 0.5, 0.9],
            x_values: vec![0.5, 1.0, 5.0, 20.0],
            tolerances: BTreeMap::new(),
            checks: None,
        }
    }
}

impl GridConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: GridConfig = serde_json::from_str(text).map_err(|e| parse_error(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let lists = [
            ("nu_values", &self.nu_values),
            ("n_values", &self.n_values),
            ("gamma_values", &self.gamma_values),
            ("x_values", &self.x_values),
        ];
        for (name, list) in lists {
            if let Some(v) = list.iter().find(|v| !v.is_finite()) {
                return Err(parse_error(format!("{name} contains non-finite value {v}")));
            }
        }
        for (key, &v) in &self.tolerances {
            if !DEFAULT_TOLERANCES.iter().any(|(k, _)| k == key) {
                return Err(parse_error(format!("unknown tolerance '{key}'")));
            }
            if !(v.is_finite() && v > 0.0) {
                return Err(parse_error(format!(
                    "tolerance '{key}' must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Every tolerance in effect, defaults overlaid with the configured values.
    pub fn effective_tolerances(&self) -> BTreeMap<String, f64> {
        let mut map: BTreeMap<String, f64> = DEFAULT_TOLERANCES
            .iter()
            .map(|&(k, v)| (k.to_string(), v))
            .collect();
        map.extend(self.tolerances.iter().map(|(k, &v)| (k.clone(), v)));
        map
    }

    pub fn tolerance(&self, key: &str) -> f64 {
        self.tolerances.get(key).copied().unwrap_or_else(|| {
            DEFAULT_TOLERANCES
                .iter()
                .find(|(k, _)| *k == key)
                .map(|&(_, v)| v)
                .unwrap_or_else(|| panic!("no default tolerance named '{key}'"))
        })
    }

    pub fn selected_checks(&self) -> Vec<CheckKind> {
        match &self.checks {
            Some(list) => CheckKind::ALL
                .into_iter()
                .filter(|k| list.contains(k))
                .collect(),
            None => CheckKind::ALL.to_vec(),
        }
    }
}

/// Parameters and the compared quantity at one sampled point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub quantity: String,
    pub params: BTreeMap<String, f64>,
}

impl Witness {
    fn new(quantity: impl Into<String>, params: &[(&str, f64)]) -> Self {
        Witness {
            quantity: quantity.into(),
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.quantity)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={}", if i == 0 { " @ " } else { ", " }, sig6(*v))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: CheckKind,
    pub passed: bool,
    pub evaluated: usize,
    pub failures: usize,
    /// Skip reason to number of points skipped for it.
    pub skipped: BTreeMap<String, usize>,
    /// Error message to number of points where it occurred.
    pub errors: BTreeMap<String, usize>,
    /// Smallest margin seen; negative when the check failed.
    pub worst_margin: Option<f64>,
    /// Point attaining `worst_margin`.
    pub witness: Option<Witness>,
    /// The first failing points in grid order, at most [`MAX_LISTED_FAILURES`].
    pub failing: Vec<Witness>,
}

/// Cap on [`CheckResult::failing`].
pub const MAX_LISTED_FAILURES: usize = 20;

enum Outcome {
    Measured {
        margin: f64,
        ok: bool,
        witness: Witness,
    },
    Skipped(String),
    Failed(String),
}

/// Holds when `margin >= 0`.
fn at_least(margin: f64, witness: Witness) -> Outcome {
    Outcome::Measured {
        margin,
        ok: margin >= 0.0,
        witness,
    }
}

/// Holds when `margin > 0`.
fn positive(margin: f64, witness: Witness) -> Outcome {
    Outcome::Measured {
        margin,
        ok: margin > 0.0,
        witness,
    }
}

fn failed(e: Error) -> Outcome {
    Outcome::Failed(e.to_string())
}

fn collect<P, F>(name: CheckKind, points: &[P], eval: F) -> CheckResult
where
    P: Sync,
    F: Fn(&P) -> Vec<Outcome> + Sync + Send,
{
    let outcomes: Vec<Vec<Outcome>> = points.par_iter().map(eval).collect();
    let mut r = CheckResult {
        name,
        passed: true,
        evaluated: 0,
        failures: 0,
        skipped: BTreeMap::new(),
        errors: BTreeMap::new(),
        worst_margin: None,
        witness: None,
        failing: Vec::new(),
    };
    for outcome in outcomes.into_iter().flatten() {
        match outcome {
            Outcome::Measured {
                margin,
                ok,
                witness,
            } => {
                r.evaluated += 1;
                if !ok {
                    r.failures += 1;
                    if r.failing.len() < MAX_LISTED_FAILURES {
                        r.failing.push(witness.clone());
                    }
                }
                let worse = match r.worst_margin {
                    None => true,
                    Some(w) => margin < w || (margin.is_nan() && !w.is_nan()),
                };
                if worse {
                    r.worst_margin = Some(margin);
                    r.witness = Some(witness);
                }
            }
            Outcome::Skipped(reason) => *r.skipped.entry(reason).or_insert(0) += 1,
            Outcome::Failed(msg) => *r.errors.entry(msg).or_insert(0) += 1,
        }
    }
    r.passed = r.failures == 0 && r.errors.is_empty();
    r
}

fn log_grid(a: f64, b: f64, points: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..points)
        .map(|i| (la + (lb - la) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

fn lin_grid(a: f64, b: f64, step: f64) -> Vec<f64> {
    let count = ((b - a) / step).round() as usize;
    (0..=count).map(|i| a + step * i as f64).collect()
}

fn rel_diff(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn product<A: Copy, B: Copy>(a: &[A], b: &[B]) -> Vec<(A, B)> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| (x, y)))
        .collect()
}

fn distinct(values: &[f64]) -> Vec<f64> {
    let mut seen = BTreeSet::new();
    values
        .iter()
        .copied()
        .filter(|v| seen.insert(v.to_bits()))
        .collect()
}

/// `e^(-x) L_nu(x)`, plain below the scaling switch.
fn scaled_l(nu: f64, x: f64) -> Result<f64> {
    Ok(struve_l_scaled(Order::new(nu)?, x)?.value)
}

fn plain_l(nu: f64, x: f64) -> Result<f64> {
    Ok(struve_l(Order::new(nu)?, x)?.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub kind: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    pub meta: ReportMeta,
}

impl VerificationReport {
    pub fn check(&self, kind: CheckKind) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == kind)
    }

    /// One row per check, numbers to six significant digits.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        let err = |e: csv::Error| parse_error(e.to_string());
        w.write_record([
            "check",
            "status",
            "evaluated",
            "failures",
            "skipped",
            "errors",
            "worst_margin",
            "witness",
        ])
        .map_err(err)?;
        let join = |m: &BTreeMap<String, usize>| {
            m.iter()
                .map(|(k, v)| format!("{k} ({v})"))
                .collect::<Vec<_>>()
                .join("; ")
        };
        for c in &self.checks {
            w.write_record([
                c.name.as_str().to_string(),
                if c.passed { "pass" } else { "fail" }.to_string(),
                c.evaluated.to_string(),
                c.failures.to_string(),
                join(&c.skipped),
                join(&c.errors),
                c.worst_margin.map(sig6).unwrap_or_default(),
                c.witness
                    .as_ref()
                    .map(|w| w.to_string())
                    .unwrap_or_default(),
            ])
            .map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| parse_error(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| parse_error(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| parse_error(e.to_string()))
    }
}

/// Runs the checks selected by a [`GridConfig`] against a [`BoundEngine`].
#[derive(Debug, Clone, Default)]
pub struct Verifier {
    pub engine: BoundEngine,
    pub config: GridConfig,
}

impl Verifier {
    pub fn new(config: GridConfig) -> Self {
        Verifier {
            engine: BoundEngine::default(),
            config,
        }
    }

    pub fn with_engine(engine: BoundEngine, config: GridConfig) -> Self {
        Verifier { engine, config }
    }

    pub fn run(&self) -> Result<VerificationReport> {
        self.config.validate()?;
        let checks: Vec<CheckResult> = self
            .config
            .selected_checks()
            .into_iter()
            .map(|k| self.run_check(k))
            .collect();
        Ok(VerificationReport {
            kind: "verification".to_string(),
            passed: checks.iter().all(|c| c.passed),
            checks,
            meta: ReportMeta {
                tolerances: self.config.effective_tolerances(),
            },
        })
    }

    pub fn run_check(&self, kind: CheckKind) -> CheckResult {
        match kind {
            CheckKind::OracleTriangle => self.oracle_triangle(),
            CheckKind::OrderingUndamped => self.ordering_undamped(),
            CheckKind::OrderingDamped => self.ordering_damped(),
            CheckKind::EqualityBoundary => self.equality_boundary(),
            CheckKind::TightnessLargeX => self.tightness_large_x(),
            CheckKind::TightnessSmallX => self.tightness_small_x(),
            CheckKind::Recurrence => self.recurrence(),
            CheckKind::Derivative => self.derivative(),
            CheckKind::SmallXLimit => self.small_x_limit(),
            CheckKind::LargeXLimit => self.large_x_limit(),
            CheckKind::Monotonicity => self.monotonicity(),
            CheckKind::Positivity => self.positivity(),
            CheckKind::ScalingConsistency => self.scaling_consistency(),
            CheckKind::GammaRecurrence => self.gamma_recurrence(),
            CheckKind::DProperties => self.d_properties(),
            CheckKind::CorollaryChain => self.corollary_chain(),
        }
    }

    fn tol(&self, key: &str) -> f64 {
        self.config.tolerance(key)
    }

    fn full_grid(&self) -> Vec<(f64, f64, f64, f64)> {
        let c = &self.config;
        let mut out = Vec::new();
        for &g in &c.gamma_values {
            for &nu in &c.nu_values {
                for &n in &c.n_values {
                    for &x in &c.x_values {
                        out.push((g, nu, n, x));
                    }
                }
            }
        }
        out
    }

    fn undamped_grid(&self) -> Vec<(f64, f64, f64)> {
        let c = &self.config;
        let mut out = Vec::new();
        for &nu in &distinct(&c.nu_values) {
            for &n in &distinct(&c.n_values) {
                for &x in &distinct(&c.x_values) {
                    out.push((nu, n, x));
                }
            }
        }
        out
    }

    /// Quadrature against the incomplete-gamma series, plus the closed form
    /// where it applies.
    fn oracle_triangle(&self) -> CheckResult {
        let tol = self.tol("oracle_rel");
        let closed_tol = self.tol("closed_form_rel");
        collect(
            CheckKind::OracleTriangle,
            &self.full_grid(),
            |&(gamma, nu, n, x)| {
                let spec = match IntegralSpec::new(gamma, nu, n, x) {
                    Ok(s) => s,
                    Err(e) => return vec![Outcome::Skipped(e.to_string())],
                };
                let p = [("gamma", gamma), ("nu", nu), ("n", n), ("x", x)];
                let (q, s) = match (integral_quadrature(&spec), integral_series_oracle(&spec)) {
                    (Ok(q), Ok(s)) => (q.value, s.value),
                    (Err(e), _) | (_, Err(e)) => return vec![failed(e)],
                };
                let mut out = vec![at_least(
                    tol - rel_diff(q, s),
                    Witness::new("quadrature vs series", &p),
                )];
                if gamma == 0.0 && n == 0.0 {
                    match integral_closed_form(nu, x) {
                        Ok(c) => {
                            out.push(at_least(
                                closed_tol - rel_diff(q, c.value),
                                Witness::new("quadrature vs closed form", &p),
                            ));
                            out.push(at_least(
                                closed_tol - rel_diff(s, c.value),
                                Witness::new("series vs closed form", &p),
                            ));
                        }
                        Err(e) => out.push(failed(e)),
                    }
                }
                out
            },
        )
    }

    fn ordering_undamped(&self) -> CheckResult {
        let slack = self.tol("ordering_slack");
        let engine = self.engine;
        collect(
            CheckKind::OrderingUndamped,
            &self.undamped_grid(),
            |&(nu, n, x)| {
                let spec = match IntegralSpec::new(0.0, nu, n, x) {
                    Ok(s) => s,
                    Err(e) => return vec![Outcome::Skipped(e.to_string())],
                };
                let p = [("nu", nu), ("n", n), ("x", x)];
                let integral = match undamped_integral(nu, n, x) {
                    Ok(v) => v.value,
                    Err(e) => return vec![failed(e)],
                };
                let mut out = Vec::new();
                let mut bounds = vec![BoundId::Bi2, BoundId::Bi3];
                if n == 0.0 {
                    bounds.insert(0, BoundId::Bi1);
                } else {
                    out.push(Outcome::Skipped("bi1: requires n = 0".to_string()));
                }
                if nu < -0.5 * (n + 1.0) {
                    bounds.retain(|&b| b == BoundId::Bi1);
                    out.push(Outcome::Skipped(
                        "bi2, bi3: require nu >= -(n+1)/2".to_string(),
                    ));
                }
                for id in bounds {
                    match engine.evaluate(id, &spec, None) {
                        Ok(b) => out.push(bound_side(id, b, integral, slack, &p)),
                        Err(e) => out.push(failed(e)),
                    }
                }
                out
            },
        )
    }

    fn ordering_damped(&self) -> CheckResult {
        let slack = self.tol("ordering_slack");
        let engine = self.engine;
        let grid: Vec<_> = self
            .full_grid()
            .into_iter()
            .filter(|p| p.0 != 0.0)
            .collect();
        let pairs: Vec<(f64, f64)> = product(
            &distinct(&self.config.nu_values),
            &distinct(&self.config.n_values),
        )
        .into_iter()
        .filter(|&(nu, n)| nu > -0.5 * (n + 1.0) && n > -1.0)
        .collect();
        let ds: BTreeMap<(u64, u64), std::result::Result<DConstant, String>> = pairs
            .par_iter()
            .map(|&(nu, n)| {
                (
                    (nu.to_bits(), n.to_bits()),
                    d_constant(nu, n).map_err(|e| e.to_string()),
                )
            })
            .collect::<Vec<_>>()
            .into_iter()
            .collect();
        collect(CheckKind::OrderingDamped, &grid, |&(gamma, nu, n, x)| {
            let spec = match IntegralSpec::new(gamma, nu, n, x) {
                Ok(s) => s,
                Err(e) => return vec![Outcome::Skipped(e.to_string())],
            };
            let p = [("gamma", gamma), ("nu", nu), ("n", n), ("x", x)];
            let integral = match reference_integral(&spec) {
                Ok(v) => v,
                Err(e) => return vec![failed(e)],
            };
            let mut out = Vec::new();
            if n == 0.0 {
                match (
                    engine.evaluate(BoundId::Bi4, &spec, None),
                    engine.evaluate(BoundId::Bi5, &spec, None),
                ) {
                    (Ok(b4), Ok(b5)) => {
                        out.push(bound_side(BoundId::Bi4, b4, integral, slack, &p));
                        out.push(bound_side(BoundId::Bi5, b5, integral, slack, &p));
                        out.push(at_least(
                            (b4 - b5) / integral.abs() + slack,
                            Witness::new("bi5 <= bi4", &p),
                        ));
                    }
                    (Err(e), _) | (_, Err(e)) => out.push(failed(e)),
                }
            } else {
                out.push(Outcome::Skipped("bi4, bi5: require n = 0".to_string()));
            }
            let d = match ds.get(&(nu.to_bits(), n.to_bits())) {
                None => {
                    out.push(Outcome::Skipped(
                        "bi7, bi8: require nu > -(n+1)/2".to_string(),
                    ));
                    return out;
                }
                Some(Err(msg)) => {
                    out.push(Outcome::Failed(msg.clone()));
                    return out;
                }
                Some(Ok(d)) => d,
            };
            match (
                engine.evaluate(BoundId::Bi7, &spec, Some(d)),
                engine.evaluate(BoundId::Bi8, &spec, Some(d)),
            ) {
                (Ok(b7), Ok(b8)) => {
                    out.push(bound_side(BoundId::Bi7, b7, integral, slack, &p));
                    out.push(bound_side(BoundId::Bi8, b8, integral, slack, &p));
                    out.push(at_least(
                        (b8 - b7) / integral.abs() + slack,
                        Witness::new("bi7 <= bi8", &p),
                    ));
                }
                (Err(Error::Inapplicable(_)), _) | (_, Err(Error::Inapplicable(_))) => {
                    out.push(Outcome::Skipped(format!(
                        "bi7, bi8: {REASON_GAMMA_TOO_LARGE}"
                    )));
                }
                (Err(e), _) | (_, Err(e)) => out.push(failed(e)),
            }
            out
        })
    }

    fn equality_boundary(&self) -> CheckResult {
        let tol = self.tol("equality_rel");
        let engine = self.engine;
        let grid = product(&[0.0, 1.0, 2.5], &[0.5, 2.0, 10.0]);
        collect(CheckKind::EqualityBoundary, &grid, |&(n, x)| {
            let nu = -0.5 * (n + 1.0);
            let p = [("nu", nu), ("n", n), ("x", x)];
            let values = IntegralSpec::new(0.0, nu, n, x).and_then(|spec| {
                Ok((
                    engine.evaluate(BoundId::Bi2, &spec, None)?,
                    engine.evaluate(BoundId::Bi3, &spec, None)?,
                    undamped_integral(nu, n, x)?.value,
                ))
            });
            match values {
                Ok((b2, b3, i)) => vec![
                    at_least(
                        tol - rel_diff(b2, b3),
                        Witness::new("|bi2 - bi3| / bi3", &p),
                    ),
                    at_least(tol - rel_diff(b2, i), Witness::new("|bi2 - I| / I", &p)),
                ],
                Err(e) => vec![failed(e)],
            }
        })
    }

    /// Bound-to-integral ratios at large `x`, both sides scaled by
    /// `e^(-(1-gamma) x)`. Lower bounds must land in `[1 - w, 1]` and upper
    /// bounds in `[1, 1 + w]`.
    fn tightness_large_x(&self) -> CheckResult {
        let w = self.tol("tightness_large_x_window");
        let engine = self.engine;
        let mut grid = Vec::new();
        for &gamma in &[0.0, 0.5] {
            for &nu in &[0.0, 1.0] {
                let ids: &[BoundId] = if gamma == 0.0 {
                    &[BoundId::Bi1, BoundId::Bi2, BoundId::Bi3]
                } else {
                    &[BoundId::Bi4, BoundId::Bi5]
                };
                grid.extend(ids.iter().map(|&id| (id, gamma, nu)));
            }
        }
        collect(CheckKind::TightnessLargeX, &grid, |&(id, gamma, nu)| {
            let x = TIGHTNESS_LARGE_X;
            let p = [("gamma", gamma), ("nu", nu), ("n", 0.0), ("x", x)];
            let ratio = IntegralSpec::new(gamma, nu, 0.0, x).and_then(|spec| {
                Ok(engine.evaluate_scaled(id, &spec, None)? / reference_integral_scaled(&spec)?)
            });
            match ratio {
                Ok(r) => vec![window(id, r, w, &p)],
                Err(e) => vec![failed(e)],
            }
        })
    }

    fn tightness_small_x(&self) -> CheckResult {
        let w = self.tol("tightness_small_x_window");
        let engine = self.engine;
        let grid = product(&[0.0, 1.0, 3.0], &[0.0, 1.0]);
        collect(CheckKind::TightnessSmallX, &grid, |&(nu, n)| {
            let x = TIGHTNESS_SMALL_X;
            let p = [("nu", nu), ("n", n), ("x", x)];
            let ratio =
                IntegralSpec::new(0.0, nu, n, x).and_then(|spec| {
                    Ok(engine.evaluate(BoundId::Bi3, &spec, None)?
                        / undamped_integral(nu, n, x)?.value)
                });
            match ratio {
                Ok(r) => vec![window(BoundId::Bi3, r, w, &p)],
                Err(e) => vec![failed(e)],
            }
        })
    }

    /// `L_(nu-1) - L_(nu+1) - (2 nu / x) L_nu = (x/2)^nu / (sqrt(pi) Gamma(nu + 3/2))`.
    fn recurrence(&self) -> CheckResult {
        let tol = self.tol("recurrence_rel");
        let grid = product(&lin_grid(0.5, 10.0, 0.5), &log_grid(0.1, 50.0, 25));
        collect(CheckKind::Recurrence, &grid, |&(nu, x)| {
            let p = [("nu", nu), ("x", x)];
            let residual = (|| -> Result<f64> {
                let (lm, l0, lp, scale) = if x > SCALED_SWITCH_X {
                    (
                        scaled_l(nu - 1.0, x)?,
                        scaled_l(nu, x)?,
                        scaled_l(nu + 1.0, x)?,
                        (-x).exp(),
                    )
                } else {
                    (
                        plain_l(nu - 1.0, x)?,
                        plain_l(nu, x)?,
                        plain_l(nu + 1.0, x)?,
                        1.0,
                    )
                };
                let source = scale * (0.5 * x).powf(nu) / (PI.sqrt() * gamma_fn(nu + 1.5)?);
                Ok(((lm - lp - 2.0 * nu / x * l0 - source) / lm).abs())
            })();
            match residual {
                Ok(r) => vec![at_least(tol - r, Witness::new("recurrence residual", &p))],
                Err(e) => vec![failed(e)],
            }
        })
    }

    /// `d/dx [x^(-nu) L_nu] = x^(-nu) L_(nu+1) + 2^(-nu) / (sqrt(pi) Gamma(nu + 3/2))`,
    /// checked by central differences.
    fn derivative(&self) -> CheckResult {
        let tol = self.tol("derivative_rel");
        let grid = product(&lin_grid(-1.0, 5.0, 0.5), &log_grid(0.5, 20.0, 20));
        collect(CheckKind::Derivative, &grid, |&(nu, x)| {
            let p = [("nu", nu), ("x", x)];
            let err = (|| -> Result<f64> {
                let f = |t: f64| -> Result<f64> { Ok(plain_l(nu, t)? * t.powf(-nu)) };
                let h = 1e-5 * x.max(1.0);
                let fd = (f(x + h)? - f(x - h)?) / (2.0 * h);
                let exact = plain_l(nu + 1.0, x)? * x.powf(-nu) + derivative_constant(nu)?;
                Ok(rel_diff(fd, exact))
            })();
            match err {
                Ok(e) => vec![at_least(
                    tol - e,
                    Witness::new("finite difference vs derivative", &p),
                )],
                Err(e) => vec![failed(e)],
            }
        })
    }

    /// `L_nu(x)` over its leading term must lie in `[1, 1 + w]` at `x = 1e-3`.
    fn small_x_limit(&self) -> CheckResult {
        let w = self.tol("small_x_limit_window");
        let grid = [-1.0, 0.0, 1.0, 5.0];
        collect(CheckKind::SmallXLimit, &grid, |&nu| {
            let x = 1e-3;
            let p = [("nu", nu), ("x", x)];
            let ratio = (|| -> Result<f64> {
                let lead = 2.0 / (PI.sqrt() * gamma_fn(nu + 1.5)?) * (0.5 * x).powf(nu + 1.0);
                Ok(plain_l(nu, x)? / lead)
            })();
            match ratio {
                Ok(r) => vec![at_least(
                    (r - 1.0).min(1.0 + w - r),
                    Witness::new("L / leading term", &p),
                )],
                Err(e) => vec![failed(e)],
            }
        })
    }

    /// `e^(-x) L_nu(x) sqrt(2 pi x)` within `tol` of 1 at `x = 400`.
    fn large_x_limit(&self) -> CheckResult {
        let tol = self.tol("large_x_limit_abs");
        let grid = [0.0, 1.0, 2.0];
        collect(CheckKind::LargeXLimit, &grid, |&nu| {
            let x = 400.0;
            let p = [("nu", nu), ("x", x)];
            match scaled_l(nu, x) {
                Ok(s) => vec![at_least(
                    tol - (s * (2.0 * PI * x).sqrt() - 1.0).abs(),
                    Witness::new("scaled L * sqrt(2 pi x)", &p),
                )],
                Err(e) => vec![failed(e)],
            }
        })
    }

    /// `L_nu(x) < L_(nu-1)(x)`. Sampled up to `x = 30`: at `nu = 1/2` the
    /// relative gap is about `2 e^(-x)` and drops below double precision beyond.
    fn monotonicity(&self) -> CheckResult {
        let grid = product(&lin_grid(0.5, 10.0, 0.5), &log_grid(1e-3, 30.0, 40));
        collect(CheckKind::Monotonicity, &grid, |&(nu, x)| {
            let p = [("nu", nu), ("x", x)];
            match (plain_l(nu, x), plain_l(nu - 1.0, x)) {
                (Ok(a), Ok(b)) => vec![positive(
                    (b - a) / b,
                    Witness::new("(L_(nu-1) - L_nu) / L_(nu-1)", &p),
                )],
                (Err(e), _) | (_, Err(e)) => vec![failed(e)],
            }
        })
    }

    fn positivity(&self) -> CheckResult {
        let nus = [-1.4, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 15.0, 20.0];
        let grid = product(&nus, &log_grid(1e-3, 500.0, 40));
        collect(CheckKind::Positivity, &grid, |&(nu, x)| {
            let p = [("nu", nu), ("x", x)];
            match scaled_l(nu, x) {
                Ok(s) => vec![positive(s, Witness::new("scaled L", &p))],
                Err(e) => vec![failed(e)],
            }
        })
    }

    fn scaling_consistency(&self) -> CheckResult {
        let tol = self.tol("scaling_rel");
        let nus = [-1.4, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0];
        let grid = product(&nus, &log_grid(1e-3, SCALED_SWITCH_X, 30));
        collect(CheckKind::ScalingConsistency, &grid, |&(nu, x)| {
            let p = [("nu", nu), ("x", x)];
            match (scaled_l(nu, x), plain_l(nu, x)) {
                (Ok(s), Ok(l)) => vec![at_least(
                    tol - rel_diff((-x).exp() * l, s),
                    Witness::new("scaled vs e^(-x) L", &p),
                )],
                (Err(e), _) | (_, Err(e)) => vec![failed(e)],
            }
        })
    }

    fn gamma_recurrence(&self) -> CheckResult {
        let tol = self.tol("gamma_recurrence_rel");
        let grid = log_grid(0.5, 50.0, 50);
        collect(CheckKind::GammaRecurrence, &grid, |&x| {
            let p = [("x", x)];
            match (gamma_fn(x + 1.0), gamma_fn(x)) {
                (Ok(g1), Ok(g)) => vec![at_least(
                    tol - ((g1 - x * g) / g1).abs(),
                    Witness::new("Gamma(x+1) vs x Gamma(x)", &p),
                )],
                (Err(e), _) | (_, Err(e)) => vec![failed(e)],
            }
        })
    }

    /// `D < 2(nu + n + 1)` and no sampled ratio above `D` plus the tolerance.
    fn d_properties(&self) -> CheckResult {
        let tol = self.tol("d_sup_abs");
        let pairs = product(
            &distinct(&self.config.nu_values),
            &distinct(&self.config.n_values),
        );
        let xs = log_grid(1e-3, 500.0, 400);
        collect(CheckKind::DProperties, &pairs, |&(nu, n)| {
            if !(n > -1.0 && nu > -0.5 * (n + 1.0)) {
                return vec![Outcome::Skipped(
                    "requires n > -1 and nu > -(n+1)/2".to_string(),
                )];
            }
            let d = match d_constant(nu, n) {
                Ok(d) => d,
                Err(e) => return vec![failed(e)],
            };
            let limit = d.upper_limit();
            let mut out = vec![positive(
                (limit - d.value) / limit,
                Witness::new("D < 2(nu+n+1)", &[("nu", nu), ("n", n)]),
            )];
            for &x in &xs {
                match ratio_fn(nu, n, x) {
                    Ok(r) => out.push(at_least(
                        d.value + tol - r,
                        Witness::new("D + tol - ratio", &[("nu", nu), ("n", n), ("x", x)]),
                    )),
                    Err(e) => out.push(failed(e)),
                }
            }
            out
        })
    }

    fn corollary_chain(&self) -> CheckResult {
        let engine = self.engine;
        let grid = product(&TABLE_NU, &TABLE_X);
        collect(CheckKind::CorollaryChain, &grid, |&(nu, x)| {
            let p = [("nu", nu), ("x", x)];
            match (corollary_middle(nu, x), engine.corollary_bounds(nu, x)) {
                (Ok(f), Ok((lo, up))) => vec![
                    positive((f - lo) / f, Witness::new("(F - lower) / F", &p)),
                    positive((up - f) / f, Witness::new("(upper - F) / F", &p)),
                ],
                (Err(e), _) | (_, Err(e)) => vec![failed(e)],
            }
        })
    }
}

/// Lower bounds may not exceed the integral, upper bounds may not fall
/// below it, each up to `slack` relative.
fn bound_side(id: BoundId, bound: f64, integral: f64, slack: f64, p: &[(&str, f64)]) -> Outcome {
    let gap = if id.is_lower() {
        integral - bound
    } else {
        bound - integral
    };
    let quantity = if id.is_lower() {
        format!("{id} <= I")
    } else {
        format!("{id} >= I")
    };
    at_least(gap / integral.abs() + slack, Witness::new(quantity, p))
}

fn window(id: BoundId, ratio: f64, w: f64, p: &[(&str, f64)]) -> Outcome {
    let margin = if id.is_lower() {
        (ratio - (1.0 - w)).min(1.0 - ratio)
    } else {
        (ratio - 1.0).min(1.0 + w - ratio)
    };
    at_least(margin, Witness::new(format!("{id} / I"), p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn only(checks: &[CheckKind]) -> GridConfig {
        GridConfig {
            checks: Some(checks.to_vec()),
            ..GridConfig::default()
        }
    }

    #[test]
    fn config_defaults_and_overrides() {
        let cfg = GridConfig::from_json(r#"{"x_values":[1.0],"tolerances":{"oracle_rel":1e-8}}"#)
            .unwrap();
        assert_eq!(cfg.x_values, vec![1.0]);
        assert_eq!(cfg.nu_values, GridConfig::default().nu_values);
        assert_eq!(cfg.tolerance("oracle_rel"), 1e-8);
        assert_eq!(cfg.tolerance("ordering_slack"), 1e-12);
        assert_eq!(cfg.effective_tolerances().len(), DEFAULT_TOLERANCES.len());
    }

    #[test]
    fn config_rejects_bad_input() {
        assert!(GridConfig::from_json(r#"{"bogus":1}"#).is_err());
        assert!(GridConfig::from_json(r#"{"tolerances":{"nope":1}}"#).is_err());
        assert!(GridConfig::from_json(r#"{"tolerances":{"oracle_rel":-1}}"#).is_err());
        assert!(GridConfig::from_json(r#"{"checks":["fast"]}"#).is_err());
        assert!(GridConfig::from_json("not json").is_err());
    }

    #[test]
    fn check_names_round_trip() {
        for k in CheckKind::ALL {
            assert_eq!(k.as_str().parse::<CheckKind>().unwrap(), k);
            assert_eq!(
                serde_json::to_string(&k).unwrap(),
                format!("\"{}\"", k.as_str())
            );
        }
    }

    #[test]
    fn grids() {
        let g = log_grid(1e-3, 500.0, 400);
        assert_eq!(g.len(), 400);
        assert!((g[0] - 1e-3).abs() < 1e-18 && (g[399] - 500.0).abs() < 1e-9);
        assert_eq!(lin_grid(0.5, 10.0, 0.5).len(), 20);
        assert_eq!(distinct(&[1.0, 2.0, 1.0]), vec![1.0, 2.0]);
    }

    #[test]
    fn large_damping_skips_damped_upper_bounds() {
        let cfg = GridConfig {
            nu_values: vec![0.0],
            n_values: vec![0.0],
            gamma_values: vec![0.95],
            x_values: vec![1.0],
            checks: Some(vec![CheckKind::OrderingDamped]),
            ..GridConfig::default()
        };
        let report = Verifier::new(cfg).run().unwrap();
        let c = report.check(CheckKind::OrderingDamped).unwrap();
        assert!(c.passed);
        assert_eq!(c.skipped.get("bi7, bi8: γ ≥ 1/D"), Some(&1));
    }

    #[test]
    fn failing_point_is_the_witness() {
        let r = collect(CheckKind::Positivity, &[1.0, -2.0, 3.0], |&v| {
            vec![at_least(v, Witness::new("v", &[("v", v)]))]
        });
        assert!(!r.passed);
        assert_eq!((r.evaluated, r.failures), (3, 1));
        assert_eq!(r.worst_margin, Some(-2.0));
        assert_eq!(r.witness.unwrap().params["v"], -2.0);
    }

    #[test]
    fn report_csv_layout() {
        let report = Verifier::new(only(&[CheckKind::GammaRecurrence, CheckKind::LargeXLimit]))
            .run()
            .unwrap();
        assert!(report.passed);
        let csv = report.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "check,status,evaluated,failures,skipped,errors,worst_margin,witness"
        );
        assert!(lines
            .next()
            .unwrap()
            .starts_with("large_x_limit,pass,3,0,,,"));
        assert!(lines
            .next()
            .unwrap()
            .starts_with("gamma_recurrence,pass,50,0,,,"));
    }
}
