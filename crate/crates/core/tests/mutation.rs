//! The verifier must notice a broken bound.

use struve_bounds::bounds::{coefficients, BoundCoefficients, BoundEngine};
use struve_bounds::verify::{CheckKind, GridConfig, Verifier};
use struve_bounds::Result;

fn doubled_c(nu: f64, n: f64) -> Result<BoundCoefficients> {
    let c = coefficients(nu, n)?;
    Ok(BoundCoefficients { c: 2.0 * c.c, ..c })
}

fn negated_c(nu: f64, n: f64) -> Result<BoundCoefficients> {
    let c = coefficients(nu, n)?;
    Ok(BoundCoefficients { c: -c.c, ..c })
}

fn run(
    coefficients: fn(f64, f64) -> Result<BoundCoefficients>,
    checks: &[CheckKind],
) -> Vec<(CheckKind, bool, usize)> {
    let config = GridConfig {
        checks: Some(checks.to_vec()),
        ..GridConfig::default()
    };
    let report = Verifier::with_engine(BoundEngine { coefficients }, config)
        .run()
        .unwrap();
    report
        .checks
        .iter()
        .map(|c| (c.name, c.passed, c.failures))
        .collect()
}

const CHECKS: [CheckKind; 3] = [
    CheckKind::OrderingUndamped,
    CheckKind::OrderingDamped,
    CheckKind::TightnessSmallX,
];

#[test]
fn intact_engine_passes() {
    for (name, passed, _) in run(coefficients, &CHECKS) {
        assert!(passed, "{name}");
    }
}

#[test]
fn doubled_c_breaks_the_ordering() {
    let results = run(doubled_c, &CHECKS);
    let (_, passed, failures) = results[0];
    assert!(
        !passed && failures > 0,
        "undamped ordering must fail: {results:?}"
    );
    let (_, passed, _) = results[1];
    assert!(!passed, "bi8 inherits the broken bi3: {results:?}");
}

#[test]
fn negated_c_breaks_small_x_tightness() {
    let results = run(negated_c, &CHECKS);
    assert!(
        results[0].1 && results[1].1,
        "negating c only loosens the upper bounds: {results:?}"
    );
    assert!(
        !results[2].1,
        "bi3 / I drifts far above 1 near the origin: {results:?}"
    );
}
