//! Reliability and mobility KPIs over outage traces.
//!
//! Outage percentage: `100 * sum_u(outage duration of u) / (n_ue * t_sim)`.
//! MTBO: `(n_ue * t_sim - sum_s t_s) / |S|` with the session set `S` pooled
//! over all UEs. MOT: `sum_s t_s / |S|`. Mobility rates are events per UE
//! per minute. MTBF and MDT are emitted as aliases of MTBO and MOT to make
//! the classical-reliability correspondence concrete in the output.
//!
//! An empty session set makes MOT/MTBO undefined; reports mark that as a
//! structured no-outage case instead of emitting 0 or infinity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analytics::{OutageInterval, OutageSession, SessionClass};
use crate::config::ScenarioConfig;
use crate::procedures::OutageCause;

/// One scenario-replication's KPI set plus provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiReport {
    pub scenario: String,
    pub speed_kmh: f64,
    pub hand_blockage: bool,
    pub rep: u32,
    pub seed: u64,
    pub config_hash: String,
    pub n_ue: u32,
    pub sim_time_s: f64,
    pub tick_s: f64,

    pub n_intervals: usize,
    pub n_sessions: usize,
    pub interval_counts: BTreeMap<String, usize>,
    pub session_counts: BTreeMap<String, usize>,
    pub n_ho_success: usize,
    pub n_mobility_failure: usize,
    pub n_classification_errors: usize,

    pub ho_success_rate_per_ue_min: f64,
    pub mobility_failure_rate_per_ue_min: f64,
    pub outage_pct_by_component: BTreeMap<String, f64>,
    pub total_outage_pct: f64,

    /// None (with `no_outage = true`) when the run had zero sessions.
    pub mot_s: Option<f64>,
    pub mtbo_s: Option<f64>,
    pub mdt_s: Option<f64>,
    pub mtbf_s: Option<f64>,
    pub no_outage: bool,
}

/// Total outage percentage and the per-cause split.
pub fn outage_percentage(
    intervals: &[OutageInterval],
    n_ue: u32,
    t_sim: f64,
) -> (f64, BTreeMap<String, f64>) {
    assert!(n_ue > 0 && t_sim > 0.0);
    let denom = n_ue as f64 * t_sim;
    let mut by_cause: BTreeMap<String, f64> = OutageCause::ALL
        .iter()
        .map(|c| (c.label().to_string(), 0.0))
        .collect();
    let mut total = 0.0;
    for iv in intervals {
        let d = iv.duration();
        total += d;
        *by_cause.get_mut(iv.cause.label()).unwrap() += d;
    }
    for v in by_cause.values_mut() {
        *v = 100.0 * *v / denom;
    }
    (100.0 * total / denom, by_cause)
}

/// Mean time between outages over the pooled session set; None when empty.
pub fn mtbo(sessions: &[OutageSession], n_ue: u32, t_sim: f64) -> Option<f64> {
    if sessions.is_empty() {
        return None;
    }
    let total_outage: f64 = sessions.iter().map(|s| s.duration()).sum();
    Some((n_ue as f64 * t_sim - total_outage) / sessions.len() as f64)
}

/// Mean outage time (mean session duration); None when empty.
pub fn mot(sessions: &[OutageSession]) -> Option<f64> {
    if sessions.is_empty() {
        return None;
    }
    let total: f64 = sessions.iter().map(|s| s.duration()).sum();
    Some(total / sessions.len() as f64)
}

/// Normalize an event count to events per UE per minute.
pub fn mobility_rate(count: usize, n_ue: u32, t_sim: f64) -> f64 {
    assert!(t_sim > 0.0);
    count as f64 / (n_ue as f64 * t_sim / 60.0)
}

struct Provenance {
    scenario: String,
    speed_kmh: f64,
    hand_blockage: bool,
    rep: u32,
    seed: u64,
    config_hash: String,
    n_ue: u32,
    sim_time_s: f64,
    tick_s: f64,
}

/// Assemble a report from a finished run's trace and session classes
/// (None marks an inadmissible sequence, counted as a classification
/// error and excluded from the class counts).
pub fn build_report(
    cfg: &ScenarioConfig,
    scenario: String,
    rep: u32,
    intervals: &[OutageInterval],
    sessions: &[OutageSession],
    classes: &[Option<SessionClass>],
) -> KpiReport {
    assemble(
        Provenance {
            scenario,
            speed_kmh: cfg.ue_speed_kmh,
            hand_blockage: cfg.hand_blockage,
            rep,
            seed: cfg.seed,
            config_hash: cfg.config_hash(),
            n_ue: cfg.n_ue,
            sim_time_s: cfg.sim_time_s,
            tick_s: cfg.tick_s,
        },
        intervals,
        sessions,
        classes,
    )
}

/// Recompute every KPI field from a raw interval trace, carrying over the
/// provenance of the stored report. Used by the verification path; the
/// result must equal the stored report field for field.
pub fn recompute_from_trace(
    meta: &KpiReport,
    intervals: &[OutageInterval],
) -> Result<KpiReport, crate::analytics::AnalyticsError> {
    let sessions = crate::analytics::merge_sessions(intervals, meta.tick_s / 2.0)?;
    let classes: Vec<Option<SessionClass>> = sessions
        .iter()
        .map(|s| crate::analytics::classify(s).ok())
        .collect();
    Ok(assemble(
        Provenance {
            scenario: meta.scenario.clone(),
            speed_kmh: meta.speed_kmh,
            hand_blockage: meta.hand_blockage,
            rep: meta.rep,
            seed: meta.seed,
            config_hash: meta.config_hash.clone(),
            n_ue: meta.n_ue,
            sim_time_s: meta.sim_time_s,
            tick_s: meta.tick_s,
        },
        intervals,
        &sessions,
        &classes,
    ))
}

fn assemble(
    p: Provenance,
    intervals: &[OutageInterval],
    sessions: &[OutageSession],
    classes: &[Option<SessionClass>],
) -> KpiReport {
    assert_eq!(sessions.len(), classes.len());
    let n_ue = p.n_ue;
    let t_sim = p.sim_time_s;

    let mut interval_counts: BTreeMap<String, usize> = OutageCause::ALL
        .iter()
        .map(|c| (c.label().to_string(), 0))
        .collect();
    for iv in intervals {
        *interval_counts.get_mut(iv.cause.label()).unwrap() += 1;
    }
    let mut session_counts: BTreeMap<String, usize> = SessionClass::ALL
        .iter()
        .map(|c| (c.label().to_string(), 0))
        .collect();
    let mut n_classification_errors = 0;
    for class in classes {
        match class {
            Some(c) => *session_counts.get_mut(c.label()).unwrap() += 1,
            None => n_classification_errors += 1,
        }
    }

    let n_ho_success = session_counts["SUCCESSFUL_HO"];
    let admissible: Vec<SessionClass> = classes.iter().flatten().copied().collect();
    let n_mobility_failure = crate::analytics::mobility_failure_count(&admissible);
    let (total_outage_pct, outage_pct_by_component) = outage_percentage(intervals, n_ue, t_sim);
    let mot_s = mot(sessions);
    let mtbo_s = mtbo(sessions, n_ue, t_sim);

    KpiReport {
        scenario: p.scenario,
        speed_kmh: p.speed_kmh,
        hand_blockage: p.hand_blockage,
        rep: p.rep,
        seed: p.seed,
        config_hash: p.config_hash,
        n_ue,
        sim_time_s: t_sim,
        tick_s: p.tick_s,
        n_intervals: intervals.len(),
        n_sessions: sessions.len(),
        interval_counts,
        session_counts,
        n_ho_success,
        n_mobility_failure,
        n_classification_errors,
        ho_success_rate_per_ue_min: mobility_rate(n_ho_success, n_ue, t_sim),
        mobility_failure_rate_per_ue_min: mobility_rate(n_mobility_failure, n_ue, t_sim),
        outage_pct_by_component,
        total_outage_pct,
        mot_s,
        mtbo_s,
        mdt_s: mot_s,
        mtbf_s: mtbo_s,
        no_outage: sessions.is_empty(),
    }
}
