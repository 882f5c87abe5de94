//! Experiment orchestration: sweep points x replications.
//!
//! Sweep points and replications share nothing mutable, so they run in
//! parallel; each individual run stays single-threaded and deterministic.
//! Replication `r` uses `seed = base_seed + r`. Any run error aborts the
//! experiment; partial result sets are never returned.

use rayon::prelude::*;

use crate::config::ScenarioConfig;
use crate::kpi::{build_report, KpiReport};
use crate::report::RunTrace;
use crate::sim::{SimError, Simulation};

/// One cell of the experiment grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub speed_kmh: f64,
    pub hand_blockage: bool,
}

impl SweepPoint {
    pub fn scenario_label(&self, rep: u32) -> String {
        format!(
            "s{}_{}_r{}",
            self.speed_kmh,
            if self.hand_blockage { "blocked" } else { "free" },
            rep
        )
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub report: KpiReport,
    /// Present when trace collection was requested.
    pub trace: Option<RunTrace>,
}

/// Derive the effective config of one (sweep point, replication) cell.
pub fn point_config(base: &ScenarioConfig, point: &SweepPoint, rep: u32) -> ScenarioConfig {
    let mut cfg = base.clone();
    cfg.ue_speed_kmh = point.speed_kmh;
    cfg.hand_blockage = point.hand_blockage;
    cfg.seed = base.seed + rep as u64;
    cfg
}

/// Run every (sweep point, replication) cell and build one report each.
/// Results are ordered sweep-major, replication-minor.
pub fn run_experiment(
    base: &ScenarioConfig,
    sweep: &[SweepPoint],
    replications: u32,
    collect_traces: bool,
) -> Result<Vec<RunResult>, SimError> {
    assert!(replications >= 1, "need at least one replication");
    let jobs: Vec<(SweepPoint, u32)> = sweep
        .iter()
        .flat_map(|p| (0..replications).map(move |r| (*p, r)))
        .collect();

    jobs.par_iter()
        .map(|(point, rep)| run_point(base, point, *rep, collect_traces))
        .collect()
}

fn run_point(
    base: &ScenarioConfig,
    point: &SweepPoint,
    rep: u32,
    collect_traces: bool,
) -> Result<RunResult, SimError> {
    let cfg = point_config(base, point, rep);
    let scenario = point.scenario_label(rep);
    let out = Simulation::<crate::Scalar>::new(&cfg)?.run()?;
    let report = build_report(
        &cfg,
        scenario.clone(),
        rep,
        &out.intervals,
        &out.sessions,
        &out.classes,
    );
    let trace = collect_traces.then_some(RunTrace {
        scenario,
        intervals: out.intervals,
        sessions: out.sessions,
        classes: out.classes,
    });
    Ok(RunResult { report, trace })
}
