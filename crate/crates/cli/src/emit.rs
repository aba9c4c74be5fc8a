//! Record emission: JSON-lines and CSV share the same 17-significant-digit
//! number formatting, so both streams carry identical payloads and binary64
//! values round-trip losslessly.

use clap::ValueEnum;
use std::io::Write;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

/// 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct EvalRecord {
    pub x: f64,
    pub target: f64,
    pub approx: f64,
    pub margin: f64,
}

pub fn header(out: &mut impl Write, format: Format) {
    if format == Format::Csv {
        writeln!(out, "x,target,approx,margin").expect("stdout");
    }
}

pub fn record(out: &mut impl Write, format: Format, r: &EvalRecord) {
    match format {
        Format::Jsonl => writeln!(
            out,
            "{{\"x\":{},\"target\":{},\"approx\":{},\"margin\":{}}}",
            fmt17(r.x),
            fmt17(r.target),
            fmt17(r.approx),
            fmt17(r.margin)
        )
        .expect("stdout"),
        Format::Csv => writeln!(
            out,
            "{},{},{},{}",
            fmt17(r.x),
            fmt17(r.target),
            fmt17(r.approx),
            fmt17(r.margin)
        )
        .expect("stdout"),
    }
}
