//! `rtheta`: evaluate partial theta series, run verification suites and emit
//! asymptotic data as JSON or CSV reports.
//!
//! Exit codes: 0 when every row passes, 1 on a numerical failure, 2 on a
//! configuration error.

mod input;
mod report;
mod suites;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use rtheta::core_numerics::{PrecisionContext, PRECISION_ENV};
use rtheta::periodic::{catalog, CATALOG_NAMES};
use rtheta::resummation::decomposition;
use rtheta::theta::{asymptotic_series, asymptotic_series_at, compose_q_variable, theta_eval, ThetaSpec};
use rtheta::Cx;
use std::io::Write;
use std::process::ExitCode;

use input::{parse_rational, parse_tau, SpecSource};
use report::{cx_json, emit, CheckRow, CoeffRow, EvalRow, Format, Report, Status};
use suites::{Suite, VerifyInput};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("output: {0}")]
    Io(String),
}

impl CliError {
    fn io(e: impl std::fmt::Display) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "rtheta", version, about = "Partial theta series with periodic coefficients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Working precision in bits (default: $RT_PRECISION_BITS, else 256).
    #[arg(long, global = true)]
    bits: Option<u32>,
    /// Requested absolute accuracy of each evaluation (default 2^(−0.52·bits)).
    #[arg(long, global = true)]
    target: Option<f64>,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<String>,
    /// Worker threads for independent rows (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct SpecArgs {
    /// Catalog entry (see `rtheta catalog`).
    #[arg(long, conflicts_with = "f")]
    catalog: Option<String>,
    /// JSON file with a periodic function `{"period": M, "values": [["re","im"], …]}`.
    #[arg(long)]
    f: Option<String>,
    /// Exponent ν of the weight n^ν (default: the catalog's, 0 for files).
    #[arg(long)]
    nu: Option<u32>,
}

impl SpecArgs {
    fn source(&self) -> Result<SpecSource, CliError> {
        match (&self.catalog, &self.f) {
            (Some(c), None) => Ok(SpecSource::Catalog(c.clone())),
            (None, Some(p)) => Ok(SpecSource::File(p.clone())),
            _ => Err(CliError::Config("give exactly one of --catalog or --f".into())),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate Θ(τ; ν, f) at the given points.
    Eval {
        #[command(flatten)]
        spec: SpecArgs,
        /// Evaluation point, e.g. `i`, `0.3+0.7i`, `1/2+i/3`; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        tau: Vec<String>,
        /// Also report the pole / median-sum / remainder decomposition.
        #[arg(long)]
        decompose: bool,
    },
    /// Run a verification suite and judge every residual against its threshold.
    Verify {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum)]
        suite: Suite,
        /// Evaluation points (default: i and 0.3+0.7i).
        #[arg(long, allow_hyphen_values = true)]
        tau: Vec<String>,
        /// Lateral offset ε of the Laplace rays.
        #[arg(long, default_value_t = std::f64::consts::PI / 12.0)]
        eps: f64,
        /// Rational points for the gauss and boundary suites; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Vec<String>,
        /// Positive integers k for the boundary suite (points ±1/k); repeatable.
        #[arg(long)]
        k: Vec<i64>,
    },
    /// Coefficients of the asymptotic series Θ̃(τ) = Σ L(−2p−ν, f)(πiτ/M)^p/p!.
    Asymptotic {
        #[command(flatten)]
        spec: SpecArgs,
        /// Highest power p.
        #[arg(long, default_value_t = 10)]
        order: usize,
        /// Expand at the rational point α instead of 0.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        /// Re-expand in Q = (e^{2πiτ} − 1)/(2πi) instead of τ.
        #[arg(long)]
        q_variable: bool,
        /// Point |τ| used to locate the optimal truncation index.
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
    },
    /// List the catalog, or print one entry as PeriodicFunction JSON.
    Catalog { name: Option<String> },
}

fn precision(common: &Common) -> Result<PrecisionContext, CliError> {
    let base = PrecisionContext::from_env().map_err(|e| CliError::Config(e.to_string()))?;
    let bits = common.bits.unwrap_or(base.bits());
    let target = common.target.unwrap_or_else(|| (-(bits as f64) * 0.52).exp2());
    PrecisionContext::new(bits, target).map_err(|e| CliError::Config(e.to_string()))
}

fn parse_taus(prec: u32, raw: &[String]) -> Result<Vec<(String, Cx)>, CliError> {
    raw.iter().map(|s| Ok((s.clone(), parse_tau(prec, s)?))).collect()
}

fn cmd_eval(common: &Common, spec: &SpecArgs, taus: &[String], decompose: bool) -> Result<ExitCode, CliError> {
    let ctx = precision(common)?;
    let source = spec.source()?;
    let spec = source.spec(ctx.bits(), spec.nu)?;
    let taus = parse_taus(ctx.bits(), taus)?;
    let full = spec.nu == 0 && spec.f.is_even();
    let rows: Vec<EvalRow> = taus
        .par_iter()
        .map(|(_, tau)| {
            let mut row = EvalRow {
                tau: cx_json(tau),
                nu: spec.nu,
                value: None,
                err: None,
                full_theta: None,
                pole: None,
                plus: None,
                minus: None,
                error: None,
            };
            match theta_eval(&spec, tau, &ctx) {
                Ok(v) => {
                    if full {
                        row.full_theta = Some(cx_json(&(spec.f.at(0) + &v.value.scale_i64(2))));
                    }
                    row.value = Some(cx_json(&v.value));
                    row.err = Some(v.err);
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            if decompose && row.error.is_none() {
                match decomposition(&spec, tau, &ctx) {
                    Ok(d) => {
                        row.pole = Some(cx_json(&d.pole));
                        row.plus = Some(cx_json(&d.plus.value));
                        row.minus = Some(cx_json(&d.minus.value));
                    }
                    Err(e) => row.error = Some(format!("decomposition: {e}")),
                }
            }
            row
        })
        .collect();
    let failed = rows.iter().any(|r| r.error.is_some());
    let mut report = Report::new("eval", source.label(), spec.period(), ctx.bits(), rows);
    report.passed = !failed;
    emit(&report, common.format, common.output.as_deref())?;
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn cmd_verify(
    common: &Common,
    spec: &SpecArgs,
    suite: Suite,
    taus: &[String],
    eps: f64,
    alphas: &[String],
    ks: &[i64],
) -> Result<ExitCode, CliError> {
    let ctx = precision(common)?;
    let source = spec.source()?;
    let (_, f) = source.load(ctx.bits())?;
    if !(eps > 0.0 && eps < std::f64::consts::FRAC_PI_2) {
        return Err(CliError::Config(format!("ε = {eps} must lie in (0, π/2)")));
    }
    if let Some(&k) = ks.iter().find(|&&k| k <= 0) {
        return Err(CliError::Config(format!("k = {k} must be positive")));
    }
    let input = VerifyInput {
        f,
        nu: spec.nu,
        taus: parse_taus(ctx.bits(), taus)?,
        eps,
        alphas: alphas.iter().map(|a| parse_rational(a)).collect::<Result<_, _>>()?,
        ks: ks.to_vec(),
        ctx: ctx.clone(),
    };
    let period = input.f.period();
    let rows: Vec<CheckRow> = suites::run(suite, &input);
    let failed = rows.iter().any(|r| matches!(r.status, Status::Fail | Status::Error));
    let max_residual = rows.iter().filter_map(|r| r.residual).fold(0.0, f64::max);
    let mut report = Report::new("verify", source.label(), period, ctx.bits(), rows);
    report.suite = Some(suite.name().into());
    report.max_residual = Some(max_residual);
    report.passed = !failed;
    emit(&report, common.format, common.output.as_deref())?;
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn cmd_asymptotic(
    common: &Common,
    spec: &SpecArgs,
    order: usize,
    alpha: Option<&str>,
    q_variable: bool,
    tau: Option<&str>,
) -> Result<ExitCode, CliError> {
    let ctx = precision(common)?;
    let source = spec.source()?;
    let spec: ThetaSpec = source.spec(ctx.bits(), spec.nu)?;
    let mut series = match alpha {
        Some(a) => asymptotic_series_at(&spec, parse_rational(a)?, order),
        None => asymptotic_series(&spec, order),
    };
    if q_variable {
        series = compose_q_variable(&series, order).map_err(|e| CliError::Config(e.to_string()))?;
    }
    let coeffs = series.coeffs();
    let rows: Vec<CoeffRow> = coeffs
        .iter()
        .enumerate()
        .map(|(p, c)| {
            let abs = c.abs_f64();
            CoeffRow {
                p,
                coeff: cx_json(c),
                abs,
                ratio: (p > 0).then(|| abs / coeffs[p - 1].abs_f64()),
                root: (p > 0).then(|| abs.powf(1.0 / p as f64)),
            }
        })
        .collect();
    // Smallest term |a_p||τ|^p marks the optimal truncation.
    let optimal = match tau {
        Some(t) => {
            let r = parse_tau(ctx.bits(), t)?.abs_f64();
            rows.iter()
                .filter(|row| row.abs > 0.0)
                .min_by(|a, b| {
                    let ta = a.abs.ln() + a.p as f64 * r.ln();
                    let tb = b.abs.ln() + b.p as f64 * r.ln();
                    ta.total_cmp(&tb)
                })
                .map(|row| row.p)
        }
        None => None,
    };
    let mut report = Report::new("asymptotic", source.label(), spec.period(), ctx.bits(), rows);
    report.optimal_index = optimal;
    emit(&report, common.format, common.output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_catalog(common: &Common, name: Option<&str>) -> Result<ExitCode, CliError> {
    let ctx = precision(common)?;
    let text = match name {
        Some(n) => {
            let (_, f) = catalog(n, ctx.bits()).map_err(|e| CliError::Config(e.to_string()))?;
            f.to_json_string()
        }
        None => {
            let entries: Vec<serde_json::Value> = CATALOG_NAMES
                .iter()
                .map(|n| {
                    let (nu, f) = catalog(n, ctx.bits()).expect("catalog names resolve");
                    serde_json::json!({"name": n, "nu": nu, "period": f.period()})
                })
                .collect();
            serde_json::to_string_pretty(&entries).map_err(CliError::io)?
        }
    };
    match &common.output {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| CliError::Config(format!("writing {p}: {e}")))?,
        None => writeln!(std::io::stdout().lock(), "{text}").map_err(CliError::io)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    if let Some(n) = cli.common.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    match &cli.command {
        Command::Eval { spec, tau, decompose } => cmd_eval(&cli.common, spec, tau, *decompose),
        Command::Verify { spec, suite, tau, eps, alpha, k } => cmd_verify(&cli.common, spec, *suite, tau, *eps, alpha, k),
        Command::Asymptotic { spec, order, alpha, q_variable, tau } => {
            cmd_asymptotic(&cli.common, spec, *order, alpha.as_deref(), *q_variable, tau.as_deref())
        }
        Command::Catalog { name } => cmd_catalog(&cli.common, name.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("rtheta: {e} (see --help; {PRECISION_ENV} sets the default precision)");
            ExitCode::from(2)
        }
    }
}
