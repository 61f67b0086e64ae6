//! Machine-readable reports. Complex values are decimal string pairs with as
//! many digits as the working precision carries; residuals are plain numbers.

use rtheta::core_numerics::digits_for_bits;
use rtheta::Cx;
use serde::Serialize;
use std::io::Write;

use crate::CliError;

/// Version of the report layouts below, bumped on any column change.
pub const SCHEMA_VERSION: u32 = 1;

pub fn cx_json(z: &Cx) -> [String; 2] {
    let (re, im) = z.to_decimal(digits_for_bits(z.prec()));
    [re, im]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Error,
}

/// One row of `verify`.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub suite: String,
    pub case: String,
    pub nu: Option<u32>,
    pub param: String,
    pub residual: Option<f64>,
    pub threshold: f64,
    pub status: Status,
    pub note: String,
}

impl CheckRow {
    pub fn judged(suite: &str, case: impl Into<String>, nu: Option<u32>, param: impl Into<String>, residual: f64, threshold: f64) -> Self {
        let status = if residual.is_finite() && residual < threshold { Status::Pass } else { Status::Fail };
        CheckRow {
            suite: suite.into(),
            case: case.into(),
            nu,
            param: param.into(),
            residual: Some(residual),
            threshold,
            status,
            note: String::new(),
        }
    }

    pub fn skipped(suite: &str, case: impl Into<String>, nu: Option<u32>, param: impl Into<String>, why: impl Into<String>) -> Self {
        CheckRow {
            suite: suite.into(),
            case: case.into(),
            nu,
            param: param.into(),
            residual: None,
            threshold: 0.0,
            status: Status::Skipped,
            note: why.into(),
        }
    }

    pub fn error(suite: &str, case: impl Into<String>, nu: Option<u32>, param: impl Into<String>, err: impl ToString) -> Self {
        CheckRow {
            suite: suite.into(),
            case: case.into(),
            nu,
            param: param.into(),
            residual: None,
            threshold: 0.0,
            status: Status::Error,
            note: err.to_string(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

/// One row of `eval`.
#[derive(Clone, Debug, Serialize)]
pub struct EvalRow {
    pub tau: [String; 2],
    pub nu: u32,
    pub value: Option<[String; 2]>,
    pub err: Option<f64>,
    /// `f(0) + 2Θ(τ;0,f)` for even `f` and `ν = 0` (the full theta function).
    pub full_theta: Option<[String; 2]>,
    pub pole: Option<[String; 2]>,
    pub plus: Option<[String; 2]>,
    pub minus: Option<[String; 2]>,
    pub error: Option<String>,
}

/// One row of `asymptotic`.
#[derive(Clone, Debug, Serialize)]
pub struct CoeffRow {
    pub p: usize,
    pub coeff: [String; 2],
    pub abs: f64,
    /// `|a_p / a_{p−1}|`.
    pub ratio: Option<f64>,
    /// `|a_p|^{1/p}`.
    pub root: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Report<R: Serialize> {
    pub schema: String,
    pub command: String,
    pub suite: Option<String>,
    pub source: String,
    pub period: usize,
    pub bits: u32,
    pub rows: Vec<R>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimal_index: Option<usize>,
    pub passed: bool,
}

impl<R: Serialize> Report<R> {
    pub fn new(command: &str, source: String, period: usize, bits: u32, rows: Vec<R>) -> Self {
        Report {
            schema: format!("rtheta-report/{SCHEMA_VERSION}"),
            command: command.into(),
            suite: None,
            source,
            period,
            bits,
            rows,
            max_residual: None,
            optimal_index: None,
            passed: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn cell(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Null => String::new(),
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Array(a) => a.iter().map(cell).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

/// CSV layout: a `#rtheta-csv/<version> <command>` line, a header, then one
/// line per row; complex pairs become `re` and `im` columns.
fn write_csv<R: Serialize>(report: &Report<R>, out: &mut dyn Write) -> Result<(), CliError> {
    writeln!(out, "#rtheta-csv/{SCHEMA_VERSION} {}", report.command).map_err(CliError::io)?;
    let mut w = csv::Writer::from_writer(out);
    let mut header_written = false;
    for row in &report.rows {
        let serde_json::Value::Object(map) = serde_json::to_value(row).map_err(CliError::io)? else {
            continue;
        };
        let mut names = Vec::new();
        let mut cells = Vec::new();
        for (k, v) in &map {
            match v {
                serde_json::Value::Array(a) if a.len() == 2 && a.iter().all(|x| x.is_string()) => {
                    names.push(format!("{k}_re"));
                    names.push(format!("{k}_im"));
                    cells.push(cell(&a[0]));
                    cells.push(cell(&a[1]));
                }
                serde_json::Value::Null if is_pair_field(k) => {
                    names.push(format!("{k}_re"));
                    names.push(format!("{k}_im"));
                    cells.push(String::new());
                    cells.push(String::new());
                }
                _ => {
                    names.push(k.clone());
                    cells.push(cell(v));
                }
            }
        }
        if !header_written {
            w.write_record(&names).map_err(CliError::io)?;
            header_written = true;
        }
        w.write_record(&cells).map_err(CliError::io)?;
    }
    w.flush().map_err(CliError::io)?;
    Ok(())
}

fn is_pair_field(k: &str) -> bool {
    matches!(k, "tau" | "value" | "full_theta" | "pole" | "plus" | "minus" | "coeff")
}

pub fn emit<R: Serialize>(report: &Report<R>, format: Format, path: Option<&str>) -> Result<(), CliError> {
    let mut sink: Box<dyn Write> = match path {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|e| CliError::Config(format!("creating {p}: {e}")))?),
        None => Box::new(std::io::stdout().lock()),
    };
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, report).map_err(CliError::io)?;
            writeln!(sink).map_err(CliError::io)?;
        }
        Format::Csv => write_csv(report, &mut sink)?,
    }
    sink.flush().map_err(CliError::io)
}
