//! Report plumbing: JSON-lines records plus optional CSV tables.
//!
//! Every line of the report is one `Record` with a `kind` tag, a typed
//! payload, and a provenance block (config hash + crate version). The first
//! line is a `meta` record carrying the only timestamp in the file, so two
//! runs over the same config differ in at most that line. CSV rows are
//! buffered and written at the end so that report assembly stays
//! deterministic regardless of the order work items finish in.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::OutputSpec;
use crate::error::Result;

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    /// FNV-1a hash of the raw config document.
    pub config_hash: String,
    /// Version of the driver and library crates.
    pub version: &'static str,
}

#[derive(Serialize)]
struct Record<'a, P: Serialize> {
    kind: &'a str,
    payload: P,
    provenance: &'a Provenance,
}

#[derive(Serialize)]
struct MetaPayload<'a> {
    command: &'a str,
    /// Unix timestamp (seconds); the single non-reproducible field.
    timestamp: u64,
    /// Effective coupling `v = |V|_1 / c`.
    coupling: f64,
    /// Scale factor applied to the configured terms to reach `coupling`.
    applied_scale: f64,
}

/// One buffered CSV table.
struct CsvTable {
    name: &'static str,
    header: &'static str,
    rows: Vec<String>,
}

pub struct ReportWriter {
    out: BufWriter<File>,
    out_dir: PathBuf,
    csv_enabled: bool,
    tables: Vec<CsvTable>,
    provenance: Provenance,
}

impl ReportWriter {
    pub fn create(
        out_dir: &Path,
        outputs: &OutputSpec,
        provenance: Provenance,
        command: &str,
        coupling: f64,
        applied_scale: f64,
    ) -> Result<Self> {
        std::fs::create_dir_all(out_dir)?;
        let jsonl_path = out_dir.join(&outputs.jsonl);
        let file = File::create(&jsonl_path)?;
        let mut w = ReportWriter {
            out: BufWriter::new(file),
            out_dir: out_dir.to_path_buf(),
            csv_enabled: outputs.csv,
            tables: Vec::new(),
            provenance,
        };
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        w.write(
            "meta",
            MetaPayload {
                command,
                timestamp,
                coupling,
                applied_scale,
            },
        )?;
        Ok(w)
    }

    /// Appends one record line.
    pub fn write<P: Serialize>(&mut self, kind: &str, payload: P) -> Result<()> {
        let record = Record {
            kind,
            payload,
            provenance: &self.provenance,
        };
        let line = serde_json::to_string(&record).expect("report payloads serialize");
        self.out.write_all(line.as_bytes())?;
        self.out.write_all(b"\n")?;
        Ok(())
    }

    /// Appends one row to a named CSV table (created on first use).
    pub fn csv_row(&mut self, name: &'static str, header: &'static str, row: String) {
        if !self.csv_enabled {
            return;
        }
        match self.tables.iter_mut().find(|t| t.name == name) {
            Some(t) => t.rows.push(row),
            None => self.tables.push(CsvTable {
                name,
                header,
                rows: vec![row],
            }),
        }
    }

    /// Flushes the report and writes any buffered CSV tables.
    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        for table in &self.tables {
            let path = self.out_dir.join(table.name);
            let mut f = BufWriter::new(File::create(&path)?);
            writeln!(f, "{}", table.header)?;
            for row in &table.rows {
                writeln!(f, "{row}")?;
            }
            f.flush()?;
        }
        Ok(())
    }
}

/// Formats a float for CSV with full round-trip precision.
pub fn csv_num(x: f64) -> String {
    let mut s = format!("{x}");
    if !s.contains(['.', 'e', 'n', 'i']) {
        s.push_str(".0");
    }
    s
}
