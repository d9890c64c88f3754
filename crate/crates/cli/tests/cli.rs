use std::process::{Command, Output};

use struve_bounds::table::{TableArtifact, TableKind};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_struve-verify"));
    c.env_remove("STRUVE_MAX_TERMS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn eval_struve() {
    let o = run(&["eval", "struve-l", "--nu", "0", "--x", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("quantity,value,abs_error_estimate,note\r\n"));
    assert!(text.contains("L,0.710243,"), "{text}");

    let o = run(&["eval", "struve-l", "--nu", "0", "--x", "0"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\r\nL,0,0,terms=0\r\n"));
}

#[test]
fn eval_integral_lists_every_route() {
    let o = run(&[
        "eval", "integral", "--gamma", "0", "--nu", "0", "--n", "0", "--x", "1",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    for route in ["quadrature", "series_oracle", "power_series", "closed_form"] {
        assert!(
            text.contains(&format!("{route},0.336473,")),
            "{route}: {text}"
        );
    }
}

#[test]
fn eval_json() {
    let o = run(&[
        "eval", "bounds", "--gamma", "0.95", "--nu", "0", "--x", "1", "--format", "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kind"], "bounds");
    let rows = v["rows"].as_array().unwrap();
    let bi7 = rows.iter().find(|r| r["quantity"] == "bi7").unwrap();
    assert_eq!(bi7["note"], "skipped: γ ≥ 1/D");
    assert!(bi7["value"].is_null());
}

#[test]
fn domain_errors_exit_one() {
    let o = run(&["eval", "struve-l", "--nu", "-2", "--x", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nu > -3/2"), "{}", stderr(&o));
    let o = run(&["dconst", "--nu", "-1", "--n", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        run(&["eval", "struve-l", "--nu", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["eval", "struve-l", "-x", "1"]).status.code(), Some(2));
    assert_eq!(run(&["table", "--kind", "table3"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--format", "xml"]).status.code(), Some(2));
}

#[test]
fn dconst_values() {
    for (nu, expected) in [("0", 1.109), ("1", 1.331), ("3", 1.693)] {
        let o = run(&["dconst", "--nu", nu, "--n", "0"]);
        assert!(o.status.success());
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        let d = v["value"].as_f64().unwrap();
        assert!((d - expected).abs() <= 1e-3, "nu = {nu}: {d}");
        assert_eq!(
            v["upper_limit"].as_f64().unwrap(),
            2.0 * (nu.parse::<f64>().unwrap() + 1.0)
        );
        assert!(v["argmax_x"].as_f64().unwrap() > 0.0);
    }
    let o = run(&["dconst", "--nu", "0", "--format", "csv"]);
    assert_eq!(
        stdout(&o),
        "nu,n,D,argmax_x,upper_limit\r\n0,0,1.1083,5.2044,2.00000\r\n"
    );
}

#[test]
fn table_to_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t1.csv");
    let o = run(&["table", "--kind", "table1", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let t = TableArtifact::from_csv(TableKind::Table1, &text).unwrap();
    assert_eq!(t.entry("5", "25"), Some(0.3130));
    assert_eq!(
        t,
        TableArtifact {
            meta: Default::default(),
            ..TableArtifact::generate(TableKind::Table1).unwrap()
        }
    );

    let o = run(&["table", "--kind", "table2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["kind", "rows", "row_labels", "col_labels"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert!(v["meta"]["tolerances"].is_object());
    let t = TableArtifact::from_json(&stdout(&o)).unwrap();
    assert_eq!(t.entry("10", "25"), Some(4.5028));
    assert_eq!(t.entry("1", "0.5"), Some(0.0041));
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [
        &["table", "--kind", "table2"][..],
        &["table", "--kind", "dconstants", "--format", "json"][..],
        &["verify", "--format", "json"][..],
        &["verify"][..],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}

fn verify_with(config: &str, extra: &[&str]) -> Output {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.json");
    std::fs::write(&path, config).unwrap();
    let mut args = vec!["verify", "--config", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn verify_ordering_on_default_grid_passes() {
    let o = verify_with(
        r#"{"checks":["ordering_undamped","ordering_damped","equality_boundary"]}"#,
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("\r\nordering_undamped,pass,"));
    assert!(text.contains("\r\nordering_damped,pass,"));
}

#[test]
fn verify_reports_inapplicable_upper_bounds() {
    let cfg = r#"{"nu_values":[0],"n_values":[0],"gamma_values":[0.95],"x_values":[1,5],"checks":["ordering_damped"]}"#;
    let o = verify_with(cfg, &["--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["checks"][0]["skipped"]["bi7, bi8: γ ≥ 1/D"], 2);
    assert_eq!(v["checks"][0]["failures"], 0);
}

#[test]
fn failing_check_exits_one() {
    let o = verify_with(
        r#"{"tolerances":{"oracle_rel":1e-30},"checks":["oracle_triangle"]}"#,
        &[],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("\r\noracle_triangle,fail,"));
}

#[test]
fn bad_config_exits_two() {
    assert_eq!(verify_with(r#"{"nu":[1]}"#, &[]).status.code(), Some(2));
    assert_eq!(verify_with("[", &[]).status.code(), Some(2));
    assert_eq!(
        run(&["verify", "--config", "/nonexistent/grid.json"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn term_cap_from_environment() {
    let o = bin()
        .env("STRUVE_MAX_TERMS", "5")
        .args(["eval", "struve-l", "--nu", "0", "--x", "20"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("did not converge after 5 terms"),
        "{}",
        stderr(&o)
    );
    let o = bin()
        .env("STRUVE_MAX_TERMS", "2000")
        .args(["eval", "struve-l", "--nu", "0", "--x", "20"])
        .output()
        .unwrap();
    assert!(o.status.success());
    let o = bin()
        .env("STRUVE_MAX_TERMS", "many")
        .args(["eval", "gamma", "--x", "2"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
