//! CSV and JSON emission of verification reports.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::num::fmt_sig17;
use crate::SPEC_VERSION;

use super::PropertyReport;

pub const CSV_HEADER: [&str; 7] = [
    "subject",
    "property",
    "expected",
    "verdict",
    "witness_r_or_t",
    "witness_value",
    "grid_id",
];

pub fn write_csv<W: Write>(reports: &[PropertyReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| crate::error::Error::Dataset(e.to_string());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in reports {
        let subject = r.subject.to_string();
        for c in &r.checks {
            let expected = match c.expected {
                Some(true) => "holds",
                Some(false) => "fails",
                None => "",
            };
            let witness = c.witness.map(fmt_sig17).unwrap_or_default();
            w.write_record([
                subject.as_str(),
                c.property.as_str(),
                expected,
                c.verdict.as_str(),
                &witness,
                &fmt_sig17(c.witness_value),
                &c.grid_id,
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Summary {
    reports: usize,
    checks: usize,
    mismatches: usize,
    unexplained_mismatches: usize,
}

#[derive(Serialize)]
struct Document<'a> {
    spec_version: &'a str,
    summary: Summary,
    reports: &'a [PropertyReport],
}

pub fn write_json<W: Write>(reports: &[PropertyReport], out: W) -> Result<()> {
    let summary = Summary {
        reports: reports.len(),
        checks: reports.iter().map(|r| r.checks.len()).sum(),
        mismatches: reports.iter().map(|r| r.mismatches().count()).sum(),
        unexplained_mismatches: reports.iter().map(|r| r.unexplained_mismatches()).sum(),
    };
    let doc = Document {
        spec_version: SPEC_VERSION,
        summary,
        reports,
    };
    serde_json::to_writer_pretty(out, &doc)?;
    Ok(())
}
