//! Append-only JSONL witness cache.
//!
//! Each line is `{"base":..,"ratio":..,"exponent":..,"report":{..}}`. Entries
//! are never rewritten; a stale entry is shadowed by a newer line.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, ErrorKind, Write};
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use digitwitness::report::ReportJson;
use digitwitness::{solver, verify_witness, Exponent, RatioTarget, WitnessReport};

use crate::CliError;

static APPEND: Mutex<()> = Mutex::new(());

#[derive(Debug, Serialize, Deserialize)]
struct Entry {
    base: u32,
    ratio: String,
    exponent: String,
    report: ReportJson,
}

pub struct Lookup {
    pub report: WitnessReport,
    pub rebuilt: bool,
}

fn key_matches(e: &Entry, q: u32, r: RatioTarget, exponent: Exponent) -> bool {
    e.base == q
        && e.ratio.parse::<RatioTarget>().ok() == Some(r)
        && e.exponent.parse::<Exponent>().ok() == Some(exponent)
}

/// Re-derives the witness from its trace and recomputes both digit sums.
fn reverify(e: Entry, q: u32, r: RatioTarget, exponent: Exponent) -> Option<WitnessReport> {
    let claimed = e.report.into_report().ok()?;
    if claimed.q != q || claimed.exponent != exponent || claimed.ratio != r {
        return None;
    }
    let replayed = solver::replay(q, exponent, &claimed.trace).ok()?;
    if replayed != claimed.witness {
        return None;
    }
    let fresh = verify_witness(&claimed.witness, q, exponent).ok()?;
    if !r.matches(fresh.s_fu, fresh.s_u) {
        return None;
    }
    Some(WitnessReport {
        ratio: r,
        trace: claimed.trace,
        verified: true,
        ..fresh
    })
}

fn read_entries(path: &Path) -> Result<Vec<Entry>, CliError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(CliError::io(path, e)),
    };
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: Entry = serde_json::from_str(&line).map_err(|e| CliError::CacheCorruption {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(entry);
    }
    Ok(out)
}

fn append(path: &Path, entry: &Entry) -> Result<(), CliError> {
    let mut line = serde_json::to_string(entry).expect("cache entries serialize");
    line.push('\n');
    let _guard = APPEND.lock().unwrap_or_else(|p| p.into_inner());
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::io(path, e))?;
    f.write_all(line.as_bytes()).map_err(|e| CliError::io(path, e))
}

/// Serves a re-verified cached report, or builds one and appends it.
pub fn lookup_or_build(
    path: &Path,
    q: u32,
    r: RatioTarget,
    exponent: Exponent,
    build: impl FnOnce() -> Result<WitnessReport, CliError>,
) -> Result<Lookup, CliError> {
    let entries = read_entries(path)?;
    let mut stale = false;
    for e in entries.into_iter().rev() {
        if !key_matches(&e, q, r, exponent) {
            continue;
        }
        match reverify(e, q, r, exponent) {
            Some(report) => return Ok(Lookup { report, rebuilt: false }),
            None => {
                stale = true;
                break;
            }
        }
    }
    let report = build()?;
    append(
        path,
        &Entry {
            base: q,
            ratio: r.to_string(),
            exponent: exponent.to_string(),
            report: report.to_json(),
        },
    )?;
    Ok(Lookup {
        report,
        rebuilt: stale,
    })
}
