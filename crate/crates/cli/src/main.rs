//! Command-line front end to the `struve_bounds` library.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use struve_bounds::bounds::{corollary_bounds, corollary_middle};
use struve_bounds::dconst::ratio_fn;
use struve_bounds::format::{round_to, sig6};
use struve_bounds::gamma::{gamma_fn, lower_incomplete_gamma};
use struve_bounds::integrals::{
    integral_closed_form, integral_quadrature, integral_series_oracle, undamped_integral,
};
use struve_bounds::series::MAX_TERMS_ENV;
use struve_bounds::{
    bound_report, coefficients, d_constant, struve_l, struve_l_scaled, GridConfig, IntegralSpec,
    Order, TableArtifact, TableKind, Verifier,
};

/// Exit code for a failed check or a domain error.
const EXIT_FAILURE: u8 = 1;
/// Exit code for invalid usage or configuration.
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "struve-verify",
    version,
    about = "Bounds for damped modified Struve integrals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Function {
    /// L_nu(x)
    StruveL,
    /// e^(-x) L_nu(x)
    StruveLScaled,
    /// The damped integral by every available route
    Integral,
    /// Coefficients a, b, c of the polynomial corrections
    Coefficients,
    /// The integral with every applicable bound
    Bounds,
    /// The 2F3 expression with its lower and upper bounds
    Corollary,
    /// The ratio whose supremum defines D
    Ratio,
    /// Gamma(x)
    Gamma,
    /// Lower incomplete gamma(s, z)
    IncompleteGamma,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one function at one point
    Eval {
        function: Function,
        #[arg(long = "nu", allow_hyphen_values = true)]
        nu: Option<f64>,
        #[arg(long = "n", allow_hyphen_values = true)]
        n: Option<f64>,
        #[arg(long = "gamma", allow_hyphen_values = true)]
        gamma: Option<f64>,
        #[arg(long = "x", allow_hyphen_values = true)]
        x: Option<f64>,
        #[arg(long = "s", allow_hyphen_values = true)]
        s: Option<f64>,
        #[arg(long = "z", allow_hyphen_values = true)]
        z: Option<f64>,
        #[arg(long = "format", value_enum, default_value = "csv")]
        format: Format,
        #[arg(long = "out")]
        out: Option<PathBuf>,
    },
    /// Compute D_(nu,n), the supremum gating the damped upper bounds
    Dconst {
        #[arg(long = "nu", allow_hyphen_values = true)]
        nu: f64,
        #[arg(long = "n", allow_hyphen_values = true, default_value_t = 0.0)]
        n: f64,
        #[arg(long = "format", value_enum, default_value = "json")]
        format: Format,
        #[arg(long = "out")]
        out: Option<PathBuf>,
    },
    /// Write a relative-error table or the table of D constants
    Table {
        #[arg(long = "kind", value_parser = ["table1", "table2", "dconstants"])]
        kind: String,
        #[arg(long = "format", value_enum, default_value = "csv")]
        format: Format,
        #[arg(long = "out")]
        out: Option<PathBuf>,
    },
    /// Run the verification grid; exits 1 if any check fails
    Verify {
        /// JSON grid configuration; the built-in grid when absent
        #[arg(long = "config")]
        config: Option<PathBuf>,
        #[arg(long = "format", value_enum, default_value = "csv")]
        format: Format,
        #[arg(long = "out")]
        out: Option<PathBuf>,
    },
}

/// Errors that should exit with [`EXIT_USAGE`] rather than [`EXIT_FAILURE`].
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILURE),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_FAILURE)
            }
        }
    }
}

fn check_env() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var(MAX_TERMS_ENV) {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {}
            _ => {
                return Err(usage(format!(
                    "{MAX_TERMS_ENV} must be a positive integer, got '{v}'"
                )))
            }
        }
    }
    Ok(())
}

/// Returns whether every check passed.
fn run(cli: Cli) -> anyhow::Result<bool> {
    check_env()?;
    match cli.command {
        Command::Eval {
            function,
            nu,
            n,
            gamma,
            x,
            s,
            z,
            format,
            out,
        } => {
            let p = Params {
                nu,
                n,
                gamma,
                x,
                s,
                z,
            };
            let rows = eval(function, &p)?;
            emit(out.as_deref(), &render_rows(function, &p, &rows, format)?)?;
            Ok(true)
        }
        Command::Dconst { nu, n, format, out } => {
            let d = d_constant(nu, n)?;
            let text = match format {
                Format::Json => {
                    let v = json!({
                        "kind": "dconstant",
                        "nu": nu,
                        "n": n,
                        "value": round_to(d.value, 4),
                        "argmax_x": round_to(d.argmax_x, 4),
                        "upper_limit": d.upper_limit(),
                    });
                    serde_json::to_string_pretty(&v)? + "\n"
                }
                Format::Csv => format!(
                    "nu,n,D,argmax_x,upper_limit\r\n{},{},{:.4},{:.4},{}\r\n",
                    sig6(nu),
                    sig6(n),
                    d.value,
                    d.argmax_x,
                    sig6(d.upper_limit())
                ),
            };
            emit(out.as_deref(), &text)?;
            Ok(true)
        }
        Command::Table { kind, format, out } => {
            let kind: TableKind = kind.parse().map_err(|e| usage(format!("{e}")))?;
            let table = TableArtifact::generate(kind)?;
            let text = match format {
                Format::Csv => table.to_csv()?,
                Format::Json => table.to_json()? + "\n",
            };
            emit(out.as_deref(), &text)?;
            Ok(true)
        }
        Command::Verify {
            config,
            format,
            out,
        } => {
            let config = match config {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    GridConfig::from_json(&text)
                        .map_err(|e| usage(format!("{}: {e}", path.display())))?
                }
                None => GridConfig::default(),
            };
            let report = Verifier::new(config).run()?;
            let text = match format {
                Format::Csv => report.to_csv()?,
                Format::Json => report.to_json()? + "\n",
            };
            emit(out.as_deref(), &text)?;
            Ok(report.passed)
        }
    }
}

struct Params {
    nu: Option<f64>,
    n: Option<f64>,
    gamma: Option<f64>,
    x: Option<f64>,
    s: Option<f64>,
    z: Option<f64>,
}

fn need(v: Option<f64>, flag: &str, function: Function) -> anyhow::Result<f64> {
    let name = function
        .to_possible_value()
        .map(|p| p.get_name().to_string())
        .unwrap_or_default();
    v.ok_or_else(|| usage(format!("eval {name} requires --{flag}")))
}

/// One output line. Missing numbers print as empty cells.
struct Row {
    quantity: String,
    value: Option<f64>,
    abs_error_estimate: Option<f64>,
    note: String,
}

impl Row {
    fn value(quantity: impl Into<String>, value: f64, err: Option<f64>) -> Self {
        Row {
            quantity: quantity.into(),
            value: Some(value),
            abs_error_estimate: err,
            note: String::new(),
        }
    }

    fn note(quantity: impl Into<String>, note: impl Into<String>) -> Self {
        Row {
            quantity: quantity.into(),
            value: None,
            abs_error_estimate: None,
            note: note.into(),
        }
    }
}

fn eval(function: Function, p: &Params) -> anyhow::Result<Vec<Row>> {
    let f = function;
    Ok(match f {
        Function::StruveL | Function::StruveLScaled => {
            let order = Order::new(need(p.nu, "nu", f)?)?;
            let x = need(p.x, "x", f)?;
            let (name, e) = if matches!(f, Function::StruveL) {
                ("L", struve_l(order, x)?)
            } else {
                ("scaled_L", struve_l_scaled(order, x)?)
            };
            let mut row = Row::value(name, e.value, Some(e.abs_error_estimate));
            row.note = format!("terms={}", e.terms_used);
            vec![row]
        }
        Function::Integral => {
            let gamma = p.gamma.unwrap_or(0.0);
            let (nu, n, x) = (need(p.nu, "nu", f)?, p.n.unwrap_or(0.0), need(p.x, "x", f)?);
            let spec = IntegralSpec::new(gamma, nu, n, x)?;
            let q = integral_quadrature(&spec)?;
            let s = integral_series_oracle(&spec)?;
            let mut rows = vec![
                Row::value("quadrature", q.value, Some(q.abs_error_estimate)),
                Row::value("series_oracle", s.value, Some(s.abs_error_estimate)),
            ];
            if gamma == 0.0 {
                let u = undamped_integral(nu, n, x)?;
                rows.push(Row::value(
                    "power_series",
                    u.value,
                    Some(u.abs_error_estimate),
                ));
                if n == 0.0 {
                    let c = integral_closed_form(nu, x)?;
                    rows.push(Row::value(
                        "closed_form",
                        c.value,
                        Some(c.abs_error_estimate),
                    ));
                }
            }
            rows
        }
        Function::Coefficients => {
            let c = coefficients(need(p.nu, "nu", f)?, p.n.unwrap_or(0.0))?;
            vec![
                Row::value("a", c.a, None),
                Row::value("b", c.b, None),
                Row::value("c", c.c, None),
            ]
        }
        Function::Bounds => {
            let gamma = p.gamma.unwrap_or(0.0);
            let spec = IntegralSpec::new(
                gamma,
                need(p.nu, "nu", f)?,
                p.n.unwrap_or(0.0),
                need(p.x, "x", f)?,
            )?;
            let r = bound_report(&spec, None)?;
            let mut rows = vec![Row::value("integral", r.integral, None)];
            if let Some(d) = r.d_constant {
                rows.push(Row::value("D", d.value, None));
            }
            for (id, &v) in &r.applicable_bounds {
                let mut row = Row::value(id.as_str(), v, None);
                row.note = format!("rel_error={}", sig6(r.rel_errors[id]));
                rows.push(row);
            }
            for (id, reason) in &r.skipped {
                rows.push(Row::note(id.as_str(), format!("skipped: {reason}")));
            }
            rows
        }
        Function::Corollary => {
            let (nu, x) = (need(p.nu, "nu", f)?, need(p.x, "x", f)?);
            let middle = corollary_middle(nu, x)?;
            let (lo, up) = corollary_bounds(nu, x)?;
            vec![
                Row::value("lower", lo, None),
                Row::value("middle", middle, None),
                Row::value("upper", up, None),
                Row::value("rel_error_lower", (middle - lo) / middle, None),
                Row::value("rel_error_upper", (up - middle) / middle, None),
            ]
        }
        Function::Ratio => {
            let v = ratio_fn(need(p.nu, "nu", f)?, p.n.unwrap_or(0.0), need(p.x, "x", f)?)?;
            vec![Row::value("ratio", v, None)]
        }
        Function::Gamma => vec![Row::value("gamma", gamma_fn(need(p.x, "x", f)?)?, None)],
        Function::IncompleteGamma => {
            let v = lower_incomplete_gamma(need(p.s, "s", f)?, need(p.z, "z", f)?)?;
            vec![Row::value("lower_incomplete_gamma", v, None)]
        }
    })
}

fn render_rows(
    function: Function,
    p: &Params,
    rows: &[Row],
    format: Format,
) -> anyhow::Result<String> {
    let name = function
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .ok_or_else(|| anyhow!("unnamed function"))?;
    match format {
        Format::Csv => {
            let mut out = String::from("quantity,value,abs_error_estimate,note\r\n");
            for r in rows {
                let cells = [
                    r.quantity.clone(),
                    r.value.map(sig6).unwrap_or_default(),
                    r.abs_error_estimate.map(sig6).unwrap_or_default(),
                    r.note.clone(),
                ];
                out.push_str(
                    &cells
                        .iter()
                        .map(|c| csv_field(c))
                        .collect::<Vec<_>>()
                        .join(","),
                );
                out.push_str("\r\n");
            }
            Ok(out)
        }
        Format::Json => {
            let params: serde_json::Map<String, serde_json::Value> = [
                ("gamma", p.gamma),
                ("n", p.n),
                ("nu", p.nu),
                ("s", p.s),
                ("x", p.x),
                ("z", p.z),
            ]
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), json!(v))))
            .collect();
            let rows: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "quantity": r.quantity,
                        "value": r.value,
                        "abs_error_estimate": r.abs_error_estimate,
                        "note": r.note,
                    })
                })
                .collect();
            let v = json!({ "kind": name, "params": params, "rows": rows });
            Ok(serde_json::to_string_pretty(&v)? + "\n")
        }
    }
}

/// Quotes a field when it contains a delimiter, quote or line break.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\r', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn parses_negative_orders() {
        let cli = Cli::try_parse_from([
            "struve-verify",
            "eval",
            "struve-l",
            "--nu",
            "-1",
            "--x",
            "2",
        ])
        .unwrap();
        assert!(matches!(cli.command, Command::Eval { nu: Some(v), .. } if v == -1.0));
    }

    #[test]
    fn short_flags_are_rejected() {
        assert!(Cli::try_parse_from(["struve-verify", "dconst", "-n", "0"]).is_err());
    }
}
