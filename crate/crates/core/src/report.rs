//! Output formats.
//!
//! Every output file starts each run with a metadata line: bare JSON for
//! JSON-lines files, `# ` followed by JSON for CSV files. Payload builders
//! return strings so that runs can be compared byte for byte without the
//! metadata.

use std::fs::OpenOptions;
use std::io::{self, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::audit::AuditFinding;
use crate::equations::SolutionRecord;
use crate::search::CensusSummary;

pub const SCHEMA: &str = "facprod/1";

pub const FINDINGS_HEADER: [&str; 6] = ["check_id", "parameters", "lhs", "rhs", "margin", "ok"];
pub const CENSUS_HEADER: [&str; 6] = ["metric", "t", "s", "class", "pairing", "value"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunHeader {
    pub schema: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: serde_json::Value,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl RunHeader {
    pub fn new(command: impl Into<String>, config: serde_json::Value) -> Self {
        RunHeader {
            schema: SCHEMA,
            tool: "facprod",
            version: crate::VERSION,
            command: command.into(),
            config,
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        }
    }

    pub fn json(&self) -> String {
        serde_json::to_string(self).expect("header serialization cannot fail")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    JsonLines,
    Csv,
}

impl FileKind {
    pub fn for_path(path: &Path) -> FileKind {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => FileKind::Csv,
            _ => FileKind::JsonLines,
        }
    }
}

/// The metadata line for a file of `kind`, newline included.
pub fn header_line(header: &RunHeader, kind: FileKind) -> String {
    match kind {
        FileKind::JsonLines => format!("{}\n", header.json()),
        FileKind::Csv => format!("# {}\n", header.json()),
    }
}

/// Appends the metadata line and `payload` to `path`, creating it if needed.
pub fn append_run(path: &Path, header: &RunHeader, payload: &str) -> io::Result<()> {
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut buf = header_line(header, FileKind::for_path(path));
    buf.push_str(payload);
    file.write_all(buf.as_bytes())
}

/// Splits a file produced by [`append_run`] into runs of
/// `(metadata, payload)`.
pub fn split_runs(contents: &str, kind: FileKind) -> Vec<(String, String)> {
    let mut runs: Vec<(String, String)> = Vec::new();
    for line in contents.lines() {
        let meta = match kind {
            FileKind::Csv => line.strip_prefix("# ").filter(|l| l.contains(SCHEMA)),
            FileKind::JsonLines => Some(line).filter(|l| l.contains("\"schema\":")),
        };
        match meta {
            Some(m) => runs.push((m.to_string(), String::new())),
            None => {
                if let Some((_, payload)) = runs.last_mut() {
                    payload.push_str(line);
                    payload.push('\n');
                }
            }
        }
    }
    runs
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Real numbers are printed with Rust's shortest round-trip formatting.
pub fn findings_csv(findings: &[AuditFinding]) -> String {
    csv_string(
        &FINDINGS_HEADER,
        findings.iter().map(|f| {
            vec![
                f.check.as_str().to_string(),
                f.params_string(),
                f.lhs.to_string(),
                f.rhs.to_string(),
                f.margin.to_string(),
                f.ok.to_string(),
            ]
        }),
    )
}

/// Rows: `count` per `(t, s, class)`, `extremal_n1`, `nontrivial_total`,
/// and `nc_in` / `nc_out` per pairing when a ratio bound was given.
pub fn census_csv(summary: &CensusSummary) -> String {
    let mut rows = Vec::new();
    for ((t, s, class), n) in &summary.counts {
        rows.push(vec![
            "count".into(),
            t.to_string(),
            s.to_string(),
            class.as_str().into(),
            String::new(),
            n.to_string(),
        ]);
    }
    let blank = || vec![String::new(); 4];
    let mut scalar = |metric: &str, value: String| {
        let mut row = vec![metric.to_string()];
        row.extend(blank());
        row.push(value);
        rows.push(row);
    };
    scalar(
        "extremal_n1",
        summary.extremal_n1.map_or(String::new(), |n| n.to_string()),
    );
    scalar("nontrivial_total", summary.nontrivial_count().to_string());
    if let Some(c) = summary.c {
        scalar("c", c.to_string());
    }
    for (pairing, (inside, outside)) in &summary.nc_tallies {
        let p = pairing
            .iter()
            .map(|i| (i + 1).to_string())
            .collect::<Vec<_>>()
            .join(" ");
        for (metric, v) in [("nc_in", inside), ("nc_out", outside)] {
            rows.push(vec![
                metric.into(),
                String::new(),
                String::new(),
                String::new(),
                p.clone(),
                v.to_string(),
            ]);
        }
    }
    csv_string(&CENSUS_HEADER, rows)
}

/// One JSON object per record, newline-terminated.
pub fn records_jsonl(records: &[SolutionRecord]) -> String {
    records.iter().map(|r| r.to_json_line() + "\n").collect()
}

/// One JSON object per item, newline-terminated.
pub fn jsonl<T: Serialize>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| serde_json::to_string(x).expect("serializable") + "\n")
        .collect()
}
