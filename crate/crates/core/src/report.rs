//! Delimited-text outputs: daily series, grid tables, contact dumps, edge
//! lists and threshold tables. Numbers use Rust's shortest round-trip
//! formatting, so identical values always produce identical bytes.

use std::io::{Read, Write};

use crate::engine::DailyCounts;
use crate::ingest::{LocationId, PersonId};
use crate::network::{ContactEvent, ContactKind, Venue};
use crate::scenario::{CalibrationResult, CellKey, CellResult};
use crate::threshold::{OracleEstimate, ThresholdReport};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {reason}")]
    Malformed { line: u64, reason: String },
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(out)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn key_fields(k: &CellKey) -> [String; 4] {
    [
        k.pttcr_reduction.to_string(),
        k.h_minutes.to_string(),
        opt(k.r0),
        k.school_closure.to_string(),
    ]
}

const KEY_HEADER: [&str; 4] = ["pttcr_reduction", "h_minutes", "r0", "school_closure"];

pub fn write_daily_counts<W: Write>(out: W, series: &[DailyCounts]) -> Result<(), ReportError> {
    let mut w = writer(out);
    w.write_record(["day", "S", "E", "I", "R", "new_infections"])?;
    for c in series {
        w.write_record([c.day, c.s as u32, c.e as u32, c.i as u32, c.r as u32, c.new_infections as u32].map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_daily_counts<R: Read>(input: R) -> Result<Vec<DailyCounts>, ReportError> {
    let mut r = csv::ReaderBuilder::new().from_reader(input);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let f = |k: usize| -> Result<usize, ReportError> {
            rec.get(k)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| ReportError::Malformed { line, reason: format!("column {k}") })
        };
        out.push(DailyCounts { day: f(0)? as u32, s: f(1)?, e: f(2)?, i: f(3)?, r: f(4)?, new_infections: f(5)? });
    }
    Ok(out)
}

/// Per-cell mean daily curves in long format.
pub fn write_mean_curves<W: Write>(out: W, cells: &[CellResult]) -> Result<(), ReportError> {
    let mut w = writer(out);
    let mut header = KEY_HEADER.to_vec();
    header.extend(["day", "S", "E", "I", "R", "new_infections"]);
    w.write_record(header)?;
    for c in cells {
        for m in &c.mean_curve {
            let mut row = key_fields(&c.key).to_vec();
            row.push(m.day.to_string());
            row.extend([m.s, m.e, m.i, m.r, m.new_infections].map(|v| v.to_string()));
            w.write_record(row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One row per cell.
pub fn write_grid_summary<W: Write>(out: W, cells: &[CellResult]) -> Result<(), ReportError> {
    let mut w = writer(out);
    let mut header = KEY_HEADER.to_vec();
    header.extend(["beta", "riders", "replicates", "attack_rate", "attack_rate_sd", "peak_day", "peak_height"]);
    w.write_record(header)?;
    for c in cells {
        let mut row = key_fields(&c.key).to_vec();
        row.extend([
            c.beta.to_string(),
            c.riders.to_string(),
            c.replicates.len().to_string(),
            c.attack_rate.to_string(),
            c.attack_rate_sd.to_string(),
            c.peak_day.to_string(),
            c.peak_height.to_string(),
        ]);
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per (cell, replicate).
pub fn write_replicates<W: Write>(out: W, cells: &[CellResult]) -> Result<(), ReportError> {
    let mut w = writer(out);
    let mut header = KEY_HEADER.to_vec();
    header.extend(["replicate", "seed", "attack_rate", "peak_day", "peak_height"]);
    w.write_record(header)?;
    for c in cells {
        for r in &c.replicates {
            let mut row = key_fields(&c.key).to_vec();
            row.extend([
                r.replicate.to_string(),
                r.seed.to_string(),
                r.attack_rate.to_string(),
                r.peak_day.to_string(),
                r.peak_height.to_string(),
            ]);
            w.write_record(row)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_calibrations<W: Write>(out: W, calibrations: &[(f64, CalibrationResult)]) -> Result<(), ReportError> {
    let mut w = writer(out);
    w.write_record(["r0_target", "beta", "achieved_r0", "iterations"])?;
    for (target, c) in calibrations {
        w.write_record([target.to_string(), c.beta.to_string(), c.achieved_r0.to_string(), c.iterations.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// The daily contact events. Schedules repeat every day, so every event
/// carries day 0.
pub fn write_contact_dump<W: Write>(out: W, events: &[ContactEvent]) -> Result<(), ReportError> {
    let mut w = writer(out);
    w.write_record(["day", "i", "j", "kind", "minutes"])?;
    for e in events {
        w.write_record(["0".to_string(), e.i.0.to_string(), e.j.0.to_string(), e.kind.as_str().to_string(), e.minutes.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn venue_str(v: Venue) -> String {
    match v {
        Venue::Place(l) => format!("place:{}", l.0),
        Venue::Vehicle(r) => format!("vehicle:{r}"),
    }
}

fn parse_venue(s: &str) -> Option<Venue> {
    let (tag, id) = s.split_once(':')?;
    let id: u32 = id.parse().ok()?;
    match tag {
        "place" => Some(Venue::Place(LocationId(id))),
        "vehicle" => Some(Venue::Vehicle(id)),
        _ => None,
    }
}

pub fn write_edge_list<W: Write>(out: W, events: &[ContactEvent]) -> Result<(), ReportError> {
    let mut w = writer(out);
    w.write_record(["i", "j", "kind", "minutes", "venue"])?;
    for e in events {
        w.write_record([e.i.0.to_string(), e.j.0.to_string(), e.kind.as_str().to_string(), e.minutes.to_string(), venue_str(e.venue)])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an edge list with columns `i, j, kind, minutes` and an optional
/// `venue`. Returns the events and the person count (largest index + 1).
pub fn read_edge_list<R: Read>(input: R) -> Result<(Vec<ContactEvent>, usize), ReportError> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = r.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let missing = |name: &str| ReportError::Malformed { line: 1, reason: format!("missing column {name}") };
    let (ci, cj, ck, cm) = (
        col("i").ok_or_else(|| missing("i"))?,
        col("j").ok_or_else(|| missing("j"))?,
        col("kind").ok_or_else(|| missing("kind"))?,
        col("minutes").ok_or_else(|| missing("minutes"))?,
    );
    let cv = col("venue");
    let mut events = Vec::new();
    let mut persons = 0usize;
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |reason: String| ReportError::Malformed { line, reason };
        let field = |k: usize| rec.get(k).unwrap_or("");
        let i: u32 = field(ci).parse().map_err(|_| bad(format!("bad i {:?}", field(ci))))?;
        let j: u32 = field(cj).parse().map_err(|_| bad(format!("bad j {:?}", field(cj))))?;
        if i == j {
            return Err(bad(format!("self-loop on {i}")));
        }
        let kind: ContactKind = field(ck).parse().map_err(|_| bad(format!("bad kind {:?}", field(ck))))?;
        let minutes: f64 = field(cm).parse().map_err(|_| bad(format!("bad minutes {:?}", field(cm))))?;
        let venue = match cv.map(field).filter(|s| !s.is_empty()) {
            Some(s) => parse_venue(s).ok_or_else(|| bad(format!("bad venue {s:?}")))?,
            None if kind.is_transit() => Venue::Vehicle(0),
            None => Venue::Place(LocationId(0)),
        };
        persons = persons.max(i.max(j) as usize + 1);
        events.push(ContactEvent::new(PersonId(i), PersonId(j), kind, venue, minutes));
    }
    Ok((events, persons))
}

/// One threshold table row, optionally with oracle estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdRow {
    pub report: ThresholdReport,
    pub oracle: Option<OracleEstimate>,
}

pub fn write_threshold_rows<W: Write>(out: W, rows: &[ThresholdRow]) -> Result<(), ReportError> {
    let mut w = writer(out);
    let with_oracle = rows.iter().any(|r| r.oracle.is_some());
    let mut header = vec![
        "alpha", "T", "mean_k_alpha", "w", "mu", "v", "outbreak_size", "t_c", "t_c_raw", "t_c_in_range",
    ];
    if with_oracle {
        header.extend(["oracle_mean_size", "oracle_mean_size_se", "oracle_giant_fraction", "oracle_giant_fraction_se"]);
    }
    w.write_record(header)?;
    for row in rows {
        let r = &row.report;
        let mut rec = vec![
            r.alpha.to_string(),
            r.transmissibility_t.to_string(),
            r.mean_k_alpha.to_string(),
            r.w.to_string(),
            opt(r.mu),
            r.v.to_string(),
            r.outbreak_size.to_string(),
            opt(r.t_c.map(|t| t.t_c)),
            opt(r.t_c.map(|t| t.raw)),
            opt(r.t_c.map(|t| t.in_range)),
        ];
        if with_oracle {
            let o = row.oracle;
            rec.extend([
                opt(o.map(|o| o.mean_component_size)),
                opt(o.map(|o| o.mean_component_size_se)),
                opt(o.map(|o| o.giant_fraction)),
                opt(o.map(|o| o.giant_fraction_se)),
            ]);
        }
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}
