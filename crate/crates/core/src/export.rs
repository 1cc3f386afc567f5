//! CSV and JSON renderings of traces and reports.
//!
//! Floats are written with 17 significant digits so parsing a file gives back
//! the in-memory values bit for bit.

use std::io::{Read, Write};

use serde::Serialize;

use crate::analysis::{CounterexampleRow, SequenceEnvelope};
use crate::error::{Error, Result};
use crate::iteration::IterationTrace;

/// Round-trip rendering of an `f64`.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidInput(format!("csv: {e}"))
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidInput(format!("io: {e}"))
}

/// Writes one row per step:
/// `n, coord_0..coord_{d-1}, residual_1..residual_m, step_diff, dist_to_p`.
pub fn write_trace_csv<W: Write>(trace: &IterationTrace, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let first = &trace.records[0];
    let mut header = vec!["n".to_string()];
    header.extend((0..first.x.dim()).map(|i| format!("coord_{i}")));
    header.extend((1..=first.residuals.len()).map(|i| format!("residual_{i}")));
    header.push("step_diff".into());
    header.push("dist_to_p".into());
    w.write_record(&header).map_err(csv_err)?;
    for rec in &trace.records {
        let mut row = vec![rec.n.to_string()];
        row.extend(rec.x.coords().iter().map(|&c| fmt17(c)));
        row.extend(rec.residuals.iter().map(|&r| fmt17(r)));
        row.push(fmt17(rec.step_diff));
        row.push(rec.dist_to_p.map(fmt17).unwrap_or_default());
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(io_err)
}

/// A parsed trace CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub n: usize,
    pub coords: Vec<f64>,
    pub residuals: Vec<f64>,
    pub step_diff: f64,
    pub dist_to_p: Option<f64>,
}

pub fn read_trace_csv<R: Read>(input: R) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    let dim = header.iter().filter(|h| h.starts_with("coord_")).count();
    let m = header.iter().filter(|h| h.starts_with("residual_")).count();
    if header.len() != 3 + dim + m {
        return Err(Error::InvalidInput(format!("unexpected trace header {header:?}")));
    }
    let parse = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|e| Error::InvalidInput(format!("bad number {s:?}: {e}")))
    };
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let n = rec[0]
            .parse()
            .map_err(|e| Error::InvalidInput(format!("bad step index {:?}: {e}", &rec[0])))?;
        let coords = (1..=dim).map(|i| parse(&rec[i])).collect::<Result<_>>()?;
        let residuals = (1 + dim..1 + dim + m)
            .map(|i| parse(&rec[i]))
            .collect::<Result<_>>()?;
        let step_diff = parse(&rec[1 + dim + m])?;
        let last = &rec[2 + dim + m];
        let dist_to_p = if last.is_empty() { None } else { Some(parse(last)?) };
        rows.push(TraceRow {
            n,
            coords,
            residuals,
            step_diff,
            dist_to_p,
        });
    }
    Ok(rows)
}

/// Pretty JSON rendering of any report or trace.
pub fn write_json<T: Serialize, W: Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::InvalidInput(format!("json: {e}")))?;
    out.write_all(b"\n").map_err(io_err)
}

/// `n, step_diff, image_diff_log10`
pub fn write_counterexample_csv<W: Write>(rows: &[CounterexampleRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "step_diff", "image_diff_log10"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([r.n.to_string(), fmt17(r.step_diff), fmt17(r.image_diff_log10)])
            .map_err(csv_err)?;
    }
    w.flush().map_err(io_err)
}

/// `n, value, product, sum_b`
pub fn write_envelope_csv<W: Write>(env: &SequenceEnvelope, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "value", "product", "sum_b"])
        .map_err(csv_err)?;
    for e in &env.entries {
        w.write_record([e.n.to_string(), fmt17(e.value), fmt17(e.product), fmt17(e.sum_b)])
            .map_err(csv_err)?;
    }
    w.flush().map_err(io_err)
}

/// Writes a header and rows of preformatted cells.
pub fn write_table_csv<W: Write>(header: &[&str], rows: &[Vec<String>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(io_err)
}
