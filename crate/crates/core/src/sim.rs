//! Single-run tick loop: mobility, measurement, procedures, trace capture.
//!
//! A run is strictly single-threaded and deterministic: one master stream
//! seeded from the config fans out into fixed-order sub-streams (UE drop,
//! radio construction, runtime fading), and all per-tick iteration is in
//! UE/cell/beam id order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::analytics::{classify, merge_sessions, AnalyticsError, OutageInterval, OutageSession, SessionClass};
use crate::config::ScenarioConfig;
use crate::deployment::{build_grid, drop_ues, DeploymentError, UeKinematics};
use crate::float::Float;
use crate::measurement::FilterBank;
use crate::procedures::{LinkView, UeProcedures};
use crate::radio::{LinkTable, RadioError, RadioModel};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration:\n{}", .0.join("\n"))]
    Config(Vec<String>),
    #[error(transparent)]
    Deployment(#[from] DeploymentError),
    #[error(transparent)]
    Radio(#[from] RadioError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
}

/// Trace and session set of one finished run.
#[derive(Debug, Clone)]
pub struct SimOutput {
    /// All outage intervals, UE-major, chronological per UE.
    pub intervals: Vec<OutageInterval>,
    pub sessions: Vec<OutageSession>,
    /// Per-session class; None marks an inadmissible sequence.
    pub classes: Vec<Option<SessionClass>>,
    pub n_classification_errors: usize,
}

pub struct Simulation<F: Float> {
    cfg: ScenarioConfig,
    radio: RadioModel<F>,
    ues: Vec<UeKinematics<F>>,
    fade_rng: ChaCha8Rng,
}

impl<F: Float> Simulation<F> {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self, SimError> {
        let violations = cfg.validate();
        if !violations.is_empty() {
            return Err(SimError::Config(violations));
        }
        let cells = build_grid::<F>(cfg)?;
        let mut master = ChaCha8Rng::seed_from_u64(cfg.seed);
        // fixed fan-out order; adding a consumer later must not reshuffle
        // the existing streams
        let mut drop_rng = ChaCha8Rng::seed_from_u64(master.random());
        let mut radio_rng = ChaCha8Rng::seed_from_u64(master.random());
        let fade_rng = ChaCha8Rng::seed_from_u64(master.random());

        let ues = drop_ues::<F, _>(cfg, &mut drop_rng);
        let radio = RadioModel::new(cfg, cells, &ues, &mut radio_rng)?;
        Ok(Simulation {
            cfg: cfg.clone(),
            radio,
            ues,
            fade_rng,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn radio(&self) -> &RadioModel<F> {
        &self.radio
    }

    /// Run the full horizon and collect the outage trace.
    pub fn run(mut self) -> Result<SimOutput, SimError> {
        let n_ue = self.ues.len();
        let n_cells = self.radio.n_cells();
        let n_beams = self.radio.n_beams();
        let tick = self.cfg.tick_s;
        let n_ticks = self.cfg.n_ticks();
        let ticks_per_ssb = self.cfg.ticks_per_ssb();
        let region_radius = F::of(self.cfg.region_radius_m());
        let enabled = [true; 3];

        let mut banks: Vec<FilterBank<F>> =
            (0..n_ue).map(|_| FilterBank::new(&self.cfg)).collect();
        let mut procs: Vec<UeProcedures> = Vec::with_capacity(n_ue);
        let mut tables: Vec<LinkTable<F>> = (0..n_ue)
            .map(|_| LinkTable::new(n_cells, n_beams))
            .collect();
        let mut per_ue_out: Vec<Vec<OutageInterval>> = vec![Vec::new(); n_ue];
        let mut raw_buf = vec![F::zero(); n_cells * n_beams];

        for i in 0..n_ticks {
            let t = i as f64 * tick;
            let is_ssb = i % ticks_per_ssb == 0;

            if i > 0 {
                for ue in &mut self.ues {
                    ue.advance(F::of(tick), region_radius);
                }
                if is_ssb {
                    self.radio.advance_fades(&mut self.fade_rng);
                }
            }

            for u in 0..n_ue {
                self.radio
                    .fill_link_table(&self.ues[u], enabled, &mut tables[u])?;
                if is_ssb {
                    for c in 0..n_cells {
                        for b in 0..n_beams {
                            raw_buf[c * n_beams + b] =
                                self.radio.rsrp_raw(u, c, b, t, &tables[u])?;
                        }
                    }
                    banks[u].measure_all(&raw_buf);
                }
                let view = SimView {
                    table: &tables[u],
                    bank: &banks[u],
                };
                if i == 0 {
                    procs.push(UeProcedures::new(u, &self.cfg, &view));
                }
                procs[u].step(t, is_ssb, &view, &mut per_ue_out[u]);
            }
        }

        let t_end = self.cfg.sim_time_s;
        let mut intervals = Vec::new();
        for (u, proc) in procs.iter_mut().enumerate() {
            proc.finish(t_end, &mut per_ue_out[u]);
            for mut iv in per_ue_out[u].drain(..) {
                // procedures may emit re-establishment spans that outlive
                // the horizon; clamp them to the simulated window
                debug_assert!(iv.t_start < t_end + 1e-9);
                iv.t_end = iv.t_end.min(t_end);
                if iv.t_end > iv.t_start {
                    intervals.push(iv);
                }
            }
        }

        let sessions = merge_sessions(&intervals, self.cfg.merge_tolerance_s())?;
        let mut classes = Vec::with_capacity(sessions.len());
        let mut n_classification_errors = 0;
        for s in &sessions {
            match classify(s) {
                Ok(c) => classes.push(Some(c)),
                Err(_) => {
                    classes.push(None);
                    n_classification_errors += 1;
                }
            }
        }
        Ok(SimOutput {
            intervals,
            sessions,
            classes,
            n_classification_errors,
        })
    }
}

/// Adapter exposing one UE's current radio/measurement state to the
/// procedure state machine.
struct SimView<'a, F: Float> {
    table: &'a LinkTable<F>,
    bank: &'a FilterBank<F>,
}

impl<F: Float> LinkView for SimView<'_, F> {
    fn n_cells(&self) -> usize {
        self.table.n_cells()
    }

    fn l3_dbm(&self, cell: usize) -> Option<f64> {
        self.bank.l3(cell).map(|v| v.as_f64())
    }

    fn best_l1_beam(&self, cell: usize) -> usize {
        self.bank.best_l1_beam(cell)
    }

    fn beam_sinr_db(&self, cell: usize, beam: usize) -> f64 {
        self.table.avg_sinr_db(cell, beam).as_f64()
    }

    fn n_beams(&self) -> usize {
        self.table.n_beams()
    }
}
