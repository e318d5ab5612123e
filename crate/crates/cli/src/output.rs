//! Sweep CSV format.
//!
//! The first line is the schema comment [`SWEEP_SCHEMA`], then a header
//! row of [`COLUMNS`]. Probabilities are written in shortest round-trip
//! exponent form, so reading a file back is lossless.

use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};
use crate::sweep::SweepRow;

pub const SWEEP_SCHEMA: &str = "# hstn-sweep-csv v1";

pub const COLUMNS: [&str; 9] = [
    "scenario",
    "method",
    "x_axis_name",
    "x_value_db",
    "op_value",
    "std_err",
    "trials",
    "wall_time_ms",
    "status",
];

/// Index of the column left out of the determinism hash.
const WALL_TIME: usize = 7;

fn fields(row: &SweepRow) -> [String; 9] {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
    [
        row.scenario.clone(),
        row.method.clone(),
        row.x_axis_name.clone(),
        format!("{}", row.x_value_db),
        opt(row.op_value),
        opt(row.std_err),
        row.trials.map(|n| n.to_string()).unwrap_or_default(),
        format!("{:.3}", row.wall_time_ms),
        row.status.clone(),
    ]
}

pub fn to_csv_string(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COLUMNS).expect("in-memory write");
    for row in rows {
        w.write_record(fields(row)).expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("fields are UTF-8");
    format!("{SWEEP_SCHEMA}\n{body}")
}

pub fn write_csv(path: &Path, rows: &[SweepRow]) -> CliResult<()> {
    let mut f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(to_csv_string(rows).as_bytes()).map_err(|e| CliError::io(path, e))
}

/// SHA-256 over every field except `wall_time_ms`, hex encoded.
pub fn determinism_hash(rows: &[SweepRow]) -> String {
    let mut h = Sha256::new();
    let header: Vec<&str> = COLUMNS.iter().enumerate().filter(|&(i, _)| i != WALL_TIME).map(|(_, c)| *c).collect();
    h.update(header.join(",").as_bytes());
    h.update(b"\n");
    for row in rows {
        let f = fields(row);
        for (i, field) in f.iter().enumerate().filter(|&(i, _)| i != WALL_TIME) {
            if i > 0 {
                h.update(b",");
            }
            // length prefix keeps field boundaries unambiguous
            h.update((field.len() as u64).to_le_bytes());
            h.update(field.as_bytes());
        }
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn parse_opt<T: std::str::FromStr>(s: &str, column: &str, line: u64) -> CliResult<Option<T>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| CliError::Config(format!("line {line}: column `{column}` has unparsable value `{s}`")))
}

/// Parses sweep CSV text. Columns are found by name; a missing one is an
/// error naming it.
pub fn parse_csv(text: &str, origin: &str) -> CliResult<Vec<SweepRow>> {
    let bad = |msg: String| CliError::Config(format!("{origin}: {msg}"));
    let first = text.lines().next().unwrap_or("");
    if first.starts_with('#') && first.trim() != SWEEP_SCHEMA {
        return Err(bad(format!("unsupported schema `{}`, expected `{SWEEP_SCHEMA}`", first.trim())));
    }
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    let mut index = [0usize; 9];
    for (slot, name) in index.iter_mut().zip(COLUMNS) {
        *slot = header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| bad(format!("missing column `{name}`")))?;
    }
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let get = |k: usize| record.get(index[k]).unwrap_or("");
        let x_value_db = parse_opt::<f64>(get(3), COLUMNS[3], line)
            .map_err(|e| bad(e.to_string()))?
            .ok_or_else(|| bad(format!("line {line}: empty x_value_db")))?;
        rows.push(SweepRow {
            scenario: get(0).to_string(),
            method: get(1).to_string(),
            x_axis_name: get(2).to_string(),
            x_value_db,
            op_value: parse_opt(get(4), COLUMNS[4], line).map_err(|e| bad(e.to_string()))?,
            std_err: parse_opt(get(5), COLUMNS[5], line).map_err(|e| bad(e.to_string()))?,
            trials: parse_opt(get(6), COLUMNS[6], line).map_err(|e| bad(e.to_string()))?,
            wall_time_ms: parse_opt(get(7), COLUMNS[7], line).map_err(|e| bad(e.to_string()))?.unwrap_or(0.0),
            status: get(8).to_string(),
        });
    }
    Ok(rows)
}

pub fn read_csv(path: &Path) -> CliResult<Vec<SweepRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_csv(&text, &path.display().to_string())
}
