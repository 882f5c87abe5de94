//! Per-tick protocol state machines for one UE: conditional handover,
//! serving-beam management, beam failure detection/recovery, radio link
//! failure and re-establishment. Emits cause-tagged outage intervals.
//!
//! Per-tick operation order (fixed): active-procedure progress, serving
//! beam update, conditional handover, radio link monitoring, SINR outage
//! accounting. TTT clocks accumulate in every mode and are cleared on any
//! serving-cell change; the handover execution transition itself fires
//! only while connected, which lets a handover start back-to-back with a
//! beam recovery and form one contiguous session.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analytics::OutageInterval;
use crate::config::ScenarioConfig;

/// Cause tag of one outage interval. Labels are frozen; they appear
/// verbatim in trace files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OutageCause {
    #[serde(rename = "HO_SUCCESS")]
    HoSuccess,
    #[serde(rename = "HO_FAILURE")]
    HoFailure,
    #[serde(rename = "BFR_SUCCESS")]
    BfrSuccess,
    #[serde(rename = "BFR_FAILURE")]
    BfrFailure,
    #[serde(rename = "RLF")]
    Rlf,
    #[serde(rename = "SINR_DEGRADATION")]
    SinrDegradation,
}

impl OutageCause {
    pub const ALL: [OutageCause; 6] = [
        OutageCause::HoSuccess,
        OutageCause::HoFailure,
        OutageCause::BfrSuccess,
        OutageCause::BfrFailure,
        OutageCause::Rlf,
        OutageCause::SinrDegradation,
    ];

    pub fn label(self) -> &'static str {
        match self {
            OutageCause::HoSuccess => "HO_SUCCESS",
            OutageCause::HoFailure => "HO_FAILURE",
            OutageCause::BfrSuccess => "BFR_SUCCESS",
            OutageCause::BfrFailure => "BFR_FAILURE",
            OutageCause::Rlf => "RLF",
            OutageCause::SinrDegradation => "SINR_DEGRADATION",
        }
    }
}

impl fmt::Display for OutageCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for OutageCause {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OutageCause::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| format!("unknown outage cause '{s}'"))
    }
}

/// Read-only view of the radio/measurement state the state machine needs
/// at one tick. The simulation backs it with link tables and filter banks;
/// tests back it with canned values.
pub trait LinkView {
    fn n_cells(&self) -> usize;
    /// L3-filtered cell quality in dBm; None before the first measurement.
    fn l3_dbm(&self, cell: usize) -> Option<f64>;
    /// Beam with the highest L1 output in a cell (lowest id on ties).
    fn best_l1_beam(&self, cell: usize) -> usize;
    /// Average downlink SINR of a (cell, beam) link as if served by it.
    fn beam_sinr_db(&self, cell: usize, beam: usize) -> f64;
    fn n_beams(&self) -> usize;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcMode {
    Connected,
    HoExecuting {
        target: usize,
        start: f64,
        attempts_done: u32,
    },
    BfrInProgress {
        bfd_at: f64,
        /// Candidate beam and its scheduled recovery instant.
        pending: Option<(usize, f64)>,
    },
    Reestablishing {
        until: f64,
    },
}

const EPS: f64 = 1e-9;

/// Protocol state machine of one UE.
#[derive(Debug, Clone)]
pub struct UeProcedures {
    pub ue_id: usize,
    serving_cell: usize,
    serving_beam: usize,
    mode: ProcMode,

    prepared: Vec<bool>,
    prep_since: Vec<Option<f64>>,
    exec_since: Vec<Option<f64>>,
    bfd_count: u32,
    open_sinr_since: Option<f64>,
    interval_closed_this_tick: bool,

    // timing constants
    gamma_out_db: f64,
    gamma_in_db: f64,
    o_prep_db: f64,
    o_exec_db: f64,
    ttt_prep_s: f64,
    ttt_exec_s: f64,
    t_ho_s: f64,
    t_hof_s: f64,
    t_res_s: f64,
    t_rach_s: f64,
    max_rach_attempts: u32,
    n_bfd: u32,
    t_bfr_max_s: f64,
    t_bfr_rach_s: f64,
}

impl UeProcedures {
    /// Attach to the strongest cell's best beam and start connected.
    pub fn new(ue_id: usize, cfg: &ScenarioConfig, view: &impl LinkView) -> Self {
        let serving_cell = argmax_l3(view).unwrap_or(0);
        let serving_beam = view.best_l1_beam(serving_cell);
        let n_cells = view.n_cells();
        UeProcedures {
            ue_id,
            serving_cell,
            serving_beam,
            mode: ProcMode::Connected,
            prepared: vec![false; n_cells],
            prep_since: vec![None; n_cells],
            exec_since: vec![None; n_cells],
            bfd_count: 0,
            open_sinr_since: None,
            interval_closed_this_tick: false,
            gamma_out_db: cfg.gamma_out_db,
            gamma_in_db: cfg.gamma_in_db,
            o_prep_db: cfg.o_prep_db,
            o_exec_db: cfg.o_exec_db,
            ttt_prep_s: cfg.ttt_prep_s,
            ttt_exec_s: cfg.ttt_exec_s,
            t_ho_s: cfg.t_ho_s,
            t_hof_s: cfg.t_hof_s,
            t_res_s: cfg.t_res_s,
            t_rach_s: cfg.t_rach_s,
            max_rach_attempts: cfg.max_rach_attempts,
            n_bfd: cfg.n_bfd,
            t_bfr_max_s: cfg.t_bfr_max_s,
            t_bfr_rach_s: cfg.t_bfr_rach_s,
        }
    }

    pub fn serving_cell(&self) -> usize {
        self.serving_cell
    }

    pub fn serving_beam(&self) -> usize {
        self.serving_beam
    }

    pub fn mode(&self) -> ProcMode {
        self.mode
    }

    pub fn prepared_cells(&self) -> Vec<usize> {
        self.prepared
            .iter()
            .enumerate()
            .filter_map(|(c, &p)| p.then_some(c))
            .collect()
    }

    /// Run one tick at time `t`. `is_ssb` marks SSB instants (measurement
    /// grid). Emits finished outage intervals into `out`.
    pub fn step(&mut self, t: f64, is_ssb: bool, view: &impl LinkView, out: &mut Vec<OutageInterval>) {
        self.interval_closed_this_tick = false;
        self.progress_active(t, is_ssb, view, out);
        if is_ssb {
            self.beam_update(view);
        }
        self.cho_step(t, view, out);
        if is_ssb {
            self.rlm_step(t, view, out);
        }
        self.sinr_outage_step(t, view, out);
    }

    /// Close the run at the horizon: an open SINR interval ends at `t_end`;
    /// procedures still in flight have no determined cause and emit
    /// nothing (re-establishment periods were already emitted in full and
    /// are clamped by the caller).
    pub fn finish(&mut self, t_end: f64, out: &mut Vec<OutageInterval>) {
        if let Some(start) = self.open_sinr_since.take() {
            if t_end > start {
                out.push(self.interval(start, t_end, OutageCause::SinrDegradation));
            }
        }
    }

    /// Switch the serving beam to the strongest L1 beam of the serving
    /// cell. Instantaneous and outage-free; only meaningful while
    /// connected, and the backing L1 state changes only at SSB instants.
    pub fn beam_update(&mut self, view: &impl LinkView) -> usize {
        if matches!(self.mode, ProcMode::Connected) {
            self.serving_beam = view.best_l1_beam(self.serving_cell);
        }
        self.serving_beam
    }

    /// Conditional handover: track preparation and execution time-to-
    /// trigger per neighbor, add qualifying neighbors to the prepared set,
    /// and fire the execution transition while connected.
    pub fn cho_step(&mut self, t: f64, view: &impl LinkView, out: &mut Vec<OutageInterval>) {
        let Some(l3_serving) = view.l3_dbm(self.serving_cell) else {
            return;
        };
        let mut exec_candidate: Option<(usize, f64)> = None;
        for n in 0..view.n_cells() {
            if n == self.serving_cell {
                continue;
            }
            let Some(l3_n) = view.l3_dbm(n) else {
                self.prep_since[n] = None;
                self.exec_since[n] = None;
                continue;
            };

            // preparation: neighbor above serving + o_prep for ttt_prep
            if l3_n > l3_serving + self.o_prep_db {
                let since = *self.prep_since[n].get_or_insert(t);
                if t - since >= self.ttt_prep_s - EPS {
                    self.prepared[n] = true;
                }
            } else {
                self.prep_since[n] = None;
            }

            // execution: prepared neighbor above serving + o_exec for ttt_exec
            if self.prepared[n] && l3_n > l3_serving + self.o_exec_db {
                let since = *self.exec_since[n].get_or_insert(t);
                if t - since >= self.ttt_exec_s - EPS {
                    let better = match exec_candidate {
                        None => true,
                        Some((_, best_l3)) => l3_n > best_l3,
                    };
                    if better {
                        exec_candidate = Some((n, l3_n));
                    }
                }
            } else {
                self.exec_since[n] = None;
            }
        }

        if let Some((target, _)) = exec_candidate {
            if matches!(self.mode, ProcMode::Connected) {
                self.close_open_sinr(t, out);
                self.mode = ProcMode::HoExecuting {
                    target,
                    start: t,
                    attempts_done: 0,
                };
            }
        }
    }

    /// Radio link monitoring at SSB indication instants: count consecutive
    /// sub-threshold indications of the serving link; on the n-th, declare
    /// beam failure and start recovery.
    pub fn rlm_step(&mut self, t: f64, view: &impl LinkView, out: &mut Vec<OutageInterval>) {
        if !matches!(self.mode, ProcMode::Connected) {
            return;
        }
        let sinr = view.beam_sinr_db(self.serving_cell, self.serving_beam);
        if sinr < self.gamma_out_db {
            self.bfd_count += 1;
        } else {
            self.bfd_count = 0;
        }
        if self.bfd_count >= self.n_bfd {
            self.bfd_count = 0;
            self.close_open_sinr(t, out);
            self.mode = ProcMode::BfrInProgress {
                bfd_at: t,
                pending: None,
            };
        }
    }

    /// Account SINR degradation while connected: open an interval when the
    /// average SINR drops below `gamma_out`, close it on recovery (another
    /// procedure taking over closes it at the takeover instant instead).
    pub fn sinr_outage_step(&mut self, t: f64, view: &impl LinkView, out: &mut Vec<OutageInterval>) {
        if !matches!(self.mode, ProcMode::Connected) {
            debug_assert!(self.open_sinr_since.is_none());
            return;
        }
        let sinr = view.beam_sinr_db(self.serving_cell, self.serving_beam);
        if sinr < self.gamma_out_db {
            // Never open at a tick that closed an interval: no admissible
            // sequence continues past a terminal or recovery constituent.
            if self.open_sinr_since.is_none() && !self.interval_closed_this_tick {
                self.open_sinr_since = Some(t);
            }
        } else if let Some(start) = self.open_sinr_since.take() {
            out.push(self.interval(start, t, OutageCause::SinrDegradation));
        }
    }

    fn progress_active(
        &mut self,
        t: f64,
        is_ssb: bool,
        view: &impl LinkView,
        out: &mut Vec<OutageInterval>,
    ) {
        match self.mode {
            ProcMode::Connected => {}
            ProcMode::HoExecuting {
                target,
                start,
                mut attempts_done,
            } => {
                // handover failure timer has priority over late attempts
                if t >= start + self.t_hof_s - EPS {
                    let end = start + self.t_hof_s + self.t_res_s;
                    out.push(self.interval(start, end, OutageCause::HoFailure));
                    self.mode = ProcMode::Reestablishing { until: end };
                    return;
                }
                while attempts_done < self.max_rach_attempts {
                    let due = start + self.t_ho_s + attempts_done as f64 * self.t_rach_s;
                    if due > t + EPS {
                        break;
                    }
                    attempts_done += 1;
                    let beam = view.best_l1_beam(target);
                    if view.beam_sinr_db(target, beam) > self.gamma_out_db {
                        out.push(self.interval(start, due, OutageCause::HoSuccess));
                        self.serving_cell = target;
                        self.serving_beam = beam;
                        self.on_cell_change();
                        self.mode = ProcMode::Connected;
                        self.interval_closed_this_tick = true;
                        return;
                    }
                }
                self.mode = ProcMode::HoExecuting {
                    target,
                    start,
                    attempts_done,
                };
            }
            ProcMode::BfrInProgress { bfd_at, pending } => {
                if let Some((beam, recover_at)) = pending {
                    if t >= recover_at - EPS {
                        out.push(self.interval(bfd_at, recover_at, OutageCause::BfrSuccess));
                        self.serving_beam = beam;
                        self.bfd_count = 0;
                        self.mode = ProcMode::Connected;
                        self.interval_closed_this_tick = true;
                    }
                    return;
                }
                if t >= bfd_at + self.t_bfr_max_s - EPS {
                    let fail_end = bfd_at + self.t_bfr_max_s;
                    out.push(self.interval(bfd_at, fail_end, OutageCause::BfrFailure));
                    out.push(self.interval(fail_end, fail_end + self.t_res_s, OutageCause::Rlf));
                    self.mode = ProcMode::Reestablishing {
                        until: fail_end + self.t_res_s,
                    };
                    return;
                }
                // candidate search at SSB instants strictly after detection
                if is_ssb && t > bfd_at + EPS {
                    if let Some(beam) = self.bfr_candidate(view) {
                        self.mode = ProcMode::BfrInProgress {
                            bfd_at,
                            pending: Some((beam, t + self.t_bfr_rach_s)),
                        };
                    }
                }
            }
            ProcMode::Reestablishing { until } => {
                if t >= until - EPS {
                    let cell = argmax_l3(view).unwrap_or(self.serving_cell);
                    self.serving_cell = cell;
                    self.serving_beam = view.best_l1_beam(cell);
                    self.on_cell_change();
                    self.mode = ProcMode::Connected;
                    self.interval_closed_this_tick = true;
                }
            }
        }
    }

    /// Best beam of the serving cell whose SINR clears the recovery
    /// threshold `gamma_in` (lowest id on ties).
    fn bfr_candidate(&self, view: &impl LinkView) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for b in 0..view.n_beams() {
            let s = view.beam_sinr_db(self.serving_cell, b);
            if s > self.gamma_in_db && best.is_none_or(|(_, bs)| s > bs) {
                best = Some((b, s));
            }
        }
        best.map(|(b, _)| b)
    }

    fn on_cell_change(&mut self) {
        self.prepared.fill(false);
        self.prep_since.fill(None);
        self.exec_since.fill(None);
        self.bfd_count = 0;
    }

    fn close_open_sinr(&mut self, t: f64, out: &mut Vec<OutageInterval>) {
        if let Some(start) = self.open_sinr_since.take() {
            debug_assert!(t > start);
            out.push(self.interval(start, t, OutageCause::SinrDegradation));
        }
    }

    fn interval(&self, t_start: f64, t_end: f64, cause: OutageCause) -> OutageInterval {
        OutageInterval {
            ue_id: self.ue_id,
            t_start,
            t_end,
            cause,
        }
    }
}

fn argmax_l3(view: &impl LinkView) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for c in 0..view.n_cells() {
        if let Some(v) = view.l3_dbm(c) {
            if best.is_none_or(|(_, bv)| v > bv) {
                best = Some((c, v));
            }
        }
    }
    best.map(|(c, _)| c)
}
