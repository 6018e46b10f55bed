use std::io::Write;

use rpm_core::number::BigReal;
use rpm_core::solver::Root;
use serde_json::{json, Map, Value};

use crate::config::{Flags, Format};
use crate::CliError;

pub type Record = Map<String, Value>;

/// Output of one command.
#[derive(Debug, Default)]
pub struct Report {
    pub results: Vec<Record>,
    /// Additional top-level JSON members (fits, oracle metadata).
    pub extra: Map<String, Value>,
    /// Largest working precision used, in digits.
    pub precision: u32,
    /// Preformatted text for `--format text`.
    pub text: Option<String>,
}

impl Report {
    pub fn push(&mut self, record: Record) {
        self.results.push(record);
    }

    pub fn saw(&mut self, root: &Root) {
        self.precision = self.precision.max(root.precision.digits());
    }
}

/// `x` to `sig` significant digits, rounded half-to-even, trailing zeros kept.
pub fn decimal(x: &BigReal, sig: u32) -> String {
    x.to_sig_string(sig.max(1) as usize)
}

/// Root printed to its certified digits, capped at `cap`.
pub fn root_text(root: &Root, cap: u32) -> String {
    decimal(&root.energy, root.certified_digits.min(cap))
}

/// Scientific notation that survives magnitudes outside the `f64` range.
pub fn sci(x: &BigReal, sig: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let exp = x.log10_abs().floor() as i64;
    let prec = x.precision();
    let mut mantissa = x * &BigReal::ten_pow(-exp, prec);
    let mut exp = exp;
    // the floor can be off by one at exact powers of ten
    if mantissa.abs().to_f64() >= 10.0 {
        mantissa = &mantissa / &BigReal::from_int(10, prec);
        exp += 1;
    } else if mantissa.abs().to_f64() < 1.0 {
        mantissa = &mantissa * &BigReal::from_int(10, prec);
        exp -= 1;
    }
    format!("{}e{exp}", mantissa.to_sig_string(sig))
}

pub fn root_record(root: &Root, parity: u64, cap: u32) -> Record {
    let mut r = Record::new();
    r.insert("D".into(), json!(root.dim));
    r.insert("d".into(), json!(root.shift));
    r.insert("parity".into(), json!(parity));
    r.insert("root".into(), json!(root_text(root, cap)));
    r.insert("certified_digits".into(), json!(root.certified_digits));
    r.insert("residual".into(), json!(sci(&root.residual, 3)));
    r.insert("precision".into(), json!(root.precision.digits()));
    r
}

pub fn emit(report: &Report, flags: &Flags, command: &str, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match format {
        Format::Json => {
            let mut top = Map::new();
            let mut inputs = serde_json::to_value(flags).map_err(|e| CliError::Io(e.to_string()))?;
            if let Value::Object(map) = &mut inputs {
                map.insert("command".into(), json!(command));
            }
            top.insert("inputs".into(), inputs);
            top.insert("results".into(), Value::Array(report.results.iter().cloned().map(Value::Object).collect()));
            for (k, v) in &report.extra {
                top.insert(k.clone(), v.clone());
            }
            top.insert(
                "meta".into(),
                json!({ "version": env!("CARGO_PKG_VERSION"), "precision": report.precision }),
            );
            serde_json::to_writer_pretty(&mut *out, &Value::Object(top)).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(out).map_err(io)
        }
        Format::Csv => write_csv(&report.results, out),
        Format::Text => match &report.text {
            Some(text) => writeln!(out, "{text}").map_err(io),
            None => Err(CliError::Invalid(format!("`{command}` has no text output; use json or csv"))),
        },
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// RFC 4180 rows; the header is the union of keys in first-seen order.
pub fn write_csv(records: &[Record], out: &mut dyn Write) -> Result<(), CliError> {
    let mut header: Vec<&String> = Vec::new();
    for r in records {
        for k in r.keys() {
            if !header.contains(&k) {
                header.push(k);
            }
        }
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
    let err = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header.iter().map(|s| s.as_str())).map_err(err)?;
    for r in records {
        w.write_record(header.iter().map(|k| r.get(*k).map(cell).unwrap_or_default()))
            .map_err(err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}
