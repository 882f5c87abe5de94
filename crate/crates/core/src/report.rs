//! Report emission (CSV + JSON), trace export and trace-based verification.
//!
//! `kpi.csv` holds one row per report with a frozen column order (see
//! `KPI_COLUMNS`); `kpi.json` is the superset format. Floats render with
//! the shortest round-trip representation, so identical inputs produce
//! byte-identical files and parsing a file back recovers the exact values.
//! Verification re-derives every KPI field from the emitted interval
//! traces and compares field for field.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::analytics::{AnalyticsError, OutageInterval, OutageSession, SessionClass};
use crate::float::Float;
use crate::kpi::{recompute_from_trace, KpiReport};
use crate::runner::RunResult;
use crate::sim::Simulation;

/// Full per-run trace kept for export.
#[derive(Debug, Clone)]
pub struct RunTrace {
    pub scenario: String,
    pub intervals: Vec<OutageInterval>,
    pub sessions: Vec<OutageSession>,
    pub classes: Vec<Option<SessionClass>>,
}

#[derive(Debug, Clone, Default)]
pub struct EmitOptions {
    /// Overwrite existing output files.
    pub force: bool,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("refusing to overwrite existing files (use --force): {}",
            .0.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", "))]
    WouldOverwrite(Vec<PathBuf>),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{file}: {msg}")]
    Malformed { file: String, msg: String },
    #[error("missing file {0} (traces are written by `simulate --trace`)")]
    Missing(PathBuf),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
}

/// Frozen `kpi.csv` column order.
pub const KPI_COLUMNS: [&str; 27] = [
    "scenario",
    "speed_kmh",
    "blockage",
    "rep",
    "seed",
    "config_hash",
    "n_ue",
    "sim_time_s",
    "tick_s",
    "n_intervals",
    "n_sessions",
    "n_ho_success",
    "n_mobility_failure",
    "n_classification_errors",
    "ho_success_rate_per_ue_min",
    "mobility_failure_rate_per_ue_min",
    "pct_outage_ho_success",
    "pct_outage_ho_failure",
    "pct_outage_bfr_success",
    "pct_outage_bfr_failure",
    "pct_outage_rlf",
    "pct_outage_sinr_degradation",
    "total_outage_pct",
    "mot_s",
    "mtbo_s",
    "mdt_s",
    "mtbf_s",
];

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Render the KPI table; one row per report, `KPI_COLUMNS` order.
pub fn kpi_csv(reports: &[&KpiReport]) -> String {
    let mut out = String::new();
    out.push_str(&KPI_COLUMNS.join(","));
    out.push('\n');
    for r in reports {
        let row = [
            r.scenario.clone(),
            fmt_f64(r.speed_kmh),
            r.hand_blockage.to_string(),
            r.rep.to_string(),
            r.seed.to_string(),
            r.config_hash.clone(),
            r.n_ue.to_string(),
            fmt_f64(r.sim_time_s),
            fmt_f64(r.tick_s),
            r.n_intervals.to_string(),
            r.n_sessions.to_string(),
            r.n_ho_success.to_string(),
            r.n_mobility_failure.to_string(),
            r.n_classification_errors.to_string(),
            fmt_f64(r.ho_success_rate_per_ue_min),
            fmt_f64(r.mobility_failure_rate_per_ue_min),
            fmt_f64(r.outage_pct_by_component["HO_SUCCESS"]),
            fmt_f64(r.outage_pct_by_component["HO_FAILURE"]),
            fmt_f64(r.outage_pct_by_component["BFR_SUCCESS"]),
            fmt_f64(r.outage_pct_by_component["BFR_FAILURE"]),
            fmt_f64(r.outage_pct_by_component["RLF"]),
            fmt_f64(r.outage_pct_by_component["SINR_DEGRADATION"]),
            fmt_f64(r.total_outage_pct),
            fmt_opt(r.mot_s),
            fmt_opt(r.mtbo_s),
            fmt_opt(r.mdt_s),
            fmt_opt(r.mtbf_s),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Render one run's interval trace: `ue_id,t_start,t_end,cause`.
pub fn trace_csv(intervals: &[OutageInterval]) -> String {
    let mut out = String::from("ue_id,t_start,t_end,cause\n");
    for iv in intervals {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            iv.ue_id,
            fmt_f64(iv.t_start),
            fmt_f64(iv.t_end),
            iv.cause
        );
    }
    out
}

/// Render one run's session table.
pub fn sessions_csv(sessions: &[OutageSession], classes: &[Option<SessionClass>]) -> String {
    let mut out = String::from("ue_id,t_start,t_end,class,n_constituents,constituents\n");
    for (s, class) in sessions.iter().zip(classes) {
        let causes: Vec<&str> = s.constituents.iter().map(|c| c.cause.label()).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.ue_id,
            fmt_f64(s.t_start),
            fmt_f64(s.t_end),
            class.map(|c| c.label()).unwrap_or("INVALID"),
            s.constituents.len(),
            causes.join(";")
        );
    }
    out
}

/// Write `kpi.csv`, `kpi.json` and any collected traces into `out_dir`.
/// Returns the manifest of written files. Never overwrites without
/// `force`, and identical inputs produce byte-identical files.
pub fn emit_reports(
    results: &[RunResult],
    out_dir: &Path,
    opts: &EmitOptions,
) -> Result<Vec<PathBuf>, ReportError> {
    fs::create_dir_all(out_dir)?;
    let reports: Vec<&KpiReport> = results.iter().map(|r| &r.report).collect();

    let mut files: Vec<(PathBuf, String)> = vec![
        (out_dir.join("kpi.csv"), kpi_csv(&reports)),
        (
            out_dir.join("kpi.json"),
            serde_json::to_string_pretty(&results.iter().map(|r| &r.report).collect::<Vec<_>>())?
                + "\n",
        ),
    ];
    for r in results {
        if let Some(trace) = &r.trace {
            files.push((
                out_dir.join(format!("trace_{}.csv", trace.scenario)),
                trace_csv(&trace.intervals),
            ));
            files.push((
                out_dir.join(format!("sessions_{}.csv", trace.scenario)),
                sessions_csv(&trace.sessions, &trace.classes),
            ));
        }
    }

    if !opts.force {
        let existing: Vec<PathBuf> = files
            .iter()
            .map(|(p, _)| p.clone())
            .filter(|p| p.exists())
            .collect();
        if !existing.is_empty() {
            return Err(ReportError::WouldOverwrite(existing));
        }
    }

    let mut manifest = Vec::with_capacity(files.len());
    for (path, content) in files {
        fs::write(&path, content)?;
        manifest.push(path);
    }
    Ok(manifest)
}

/// Dump each cell's normalized shadow field as `shadow_<cell>.csv`
/// (`x_m,y_m,shadow` rows). Link-level shadowing scales these values by
/// the LOS or NLOS sigma.
pub fn write_shadow_dump<F: Float>(
    sim: &Simulation<F>,
    out_dir: &Path,
    force: bool,
) -> Result<Vec<PathBuf>, ReportError> {
    fs::create_dir_all(out_dir)?;
    let mut manifest = Vec::new();
    for c in 0..sim.radio().n_cells() {
        let path = out_dir.join(format!("shadow_{c}.csv"));
        if path.exists() && !force {
            return Err(ReportError::WouldOverwrite(vec![path]));
        }
        let field = sim.radio().shadow_field(c);
        let n = field.grid_size();
        let mut out = String::from("x_m,y_m,shadow\n");
        for i in 0..n {
            for j in 0..n {
                let p = field.node_position(i, j);
                let v = sim.radio().shadow_norm(c, p);
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    fmt_f64(p.x.as_f64()),
                    fmt_f64(p.y.as_f64()),
                    fmt_f64(v.as_f64())
                );
            }
        }
        fs::write(&path, out)?;
        manifest.push(path);
    }
    Ok(manifest)
}

/// Parse a trace file back into intervals.
pub fn parse_trace_csv(text: &str, file: &str) -> Result<Vec<OutageInterval>, ReportError> {
    let malformed = |msg: String| ReportError::Malformed {
        file: file.to_string(),
        msg,
    };
    let mut lines = text.lines();
    match lines.next() {
        Some("ue_id,t_start,t_end,cause") => {}
        other => return Err(malformed(format!("unexpected header {other:?}"))),
    }
    let mut intervals = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(malformed(format!("line {}: expected 4 fields", k + 2)));
        }
        let parse_err = |what: &str| malformed(format!("line {}: bad {what}", k + 2));
        intervals.push(OutageInterval {
            ue_id: fields[0].parse().map_err(|_| parse_err("ue_id"))?,
            t_start: fields[1].parse().map_err(|_| parse_err("t_start"))?,
            t_end: fields[2].parse().map_err(|_| parse_err("t_end"))?,
            cause: fields[3].parse().map_err(|_| parse_err("cause"))?,
        });
    }
    Ok(intervals)
}

/// Outcome of `verify`: how many reports were checked and every
/// discrepancy found.
#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub n_reports: usize,
    pub mismatches: Vec<String>,
}

impl VerifyOutcome {
    pub fn is_ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

macro_rules! cmp_field {
    ($diffs:ident, $scenario:expr, $stored:ident, $recomputed:ident, $field:ident) => {
        if $stored.$field != $recomputed.$field {
            $diffs.push(format!(
                "{}: {} differs: stored {:?}, recomputed {:?}",
                $scenario,
                stringify!($field),
                $stored.$field,
                $recomputed.$field
            ));
        }
    };
}

/// Recompute every KPI from the traces in a report directory and compare
/// against the stored `kpi.json` and `kpi.csv`.
pub fn verify_dir(dir: &Path) -> Result<VerifyOutcome, ReportError> {
    let json_path = dir.join("kpi.json");
    if !json_path.exists() {
        return Err(ReportError::Missing(json_path));
    }
    let reports: Vec<KpiReport> = serde_json::from_str(&fs::read_to_string(&json_path)?)?;
    let mut mismatches = Vec::new();

    // stored CSV must match a fresh rendering of the stored reports
    let csv_path = dir.join("kpi.csv");
    if !csv_path.exists() {
        return Err(ReportError::Missing(csv_path));
    }
    let stored_csv = fs::read_to_string(&csv_path)?;
    let expected_csv = kpi_csv(&reports.iter().collect::<Vec<_>>());
    if stored_csv != expected_csv {
        mismatches.push("kpi.csv does not match kpi.json".to_string());
    }

    for stored in &reports {
        let trace_path = dir.join(format!("trace_{}.csv", stored.scenario));
        if !trace_path.exists() {
            return Err(ReportError::Missing(trace_path));
        }
        let intervals = parse_trace_csv(
            &fs::read_to_string(&trace_path)?,
            &trace_path.display().to_string(),
        )?;
        let recomputed = recompute_from_trace(stored, &intervals)?;

        let diffs = &mut mismatches;
        let sc = &stored.scenario;
        cmp_field!(diffs, sc, stored, recomputed, n_intervals);
        cmp_field!(diffs, sc, stored, recomputed, n_sessions);
        cmp_field!(diffs, sc, stored, recomputed, interval_counts);
        cmp_field!(diffs, sc, stored, recomputed, session_counts);
        cmp_field!(diffs, sc, stored, recomputed, n_ho_success);
        cmp_field!(diffs, sc, stored, recomputed, n_mobility_failure);
        cmp_field!(diffs, sc, stored, recomputed, n_classification_errors);
        cmp_field!(diffs, sc, stored, recomputed, ho_success_rate_per_ue_min);
        cmp_field!(diffs, sc, stored, recomputed, mobility_failure_rate_per_ue_min);
        cmp_field!(diffs, sc, stored, recomputed, outage_pct_by_component);
        cmp_field!(diffs, sc, stored, recomputed, total_outage_pct);
        cmp_field!(diffs, sc, stored, recomputed, mot_s);
        cmp_field!(diffs, sc, stored, recomputed, mtbo_s);
        cmp_field!(diffs, sc, stored, recomputed, mdt_s);
        cmp_field!(diffs, sc, stored, recomputed, mtbf_s);
        cmp_field!(diffs, sc, stored, recomputed, no_outage);

        // if the session export exists it must match the recomputation
        let sessions_path = dir.join(format!("sessions_{}.csv", stored.scenario));
        if sessions_path.exists() {
            let sessions =
                crate::analytics::merge_sessions(&intervals, stored.tick_s / 2.0)?;
            let classes: Vec<Option<SessionClass>> = sessions
                .iter()
                .map(|s| crate::analytics::classify(s).ok())
                .collect();
            let expected = sessions_csv(&sessions, &classes);
            if fs::read_to_string(&sessions_path)? != expected {
                mismatches.push(format!("{}: sessions export differs", stored.scenario));
            }
        }
    }

    Ok(VerifyOutcome {
        n_reports: reports.len(),
        mismatches,
    })
}
