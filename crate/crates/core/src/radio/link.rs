//! Per-link large-scale gain, raw RSRP and average downlink SINR.
//!
//! The composition law for one (UE, cell, beam, panel) link is fixed here:
//! `total = -path_loss - shadow + beam_gain + panel_gain - blockage + fast_fade`.
//! Raw RSRP (measurement path) includes the AR(1) fast-fade term; the
//! average downlink SINR is an expectation over fast dynamics and
//! interferer scheduling, so it uses large-scale gains only, with each
//! interfering cell contributing its closed-form expected power under
//! uniform scheduling of `k_sched` of `n_beams` beams.

use rand::Rng;
use thiserror::Error;

use crate::config::{PanelId, ScenarioConfig};
use crate::deployment::{CellPlan, UeKinematics};
use crate::float::{db_to_linear, linear_to_db, Float};
use crate::geometry::wrap_deg;
use crate::radio::beams::{beam_gain, beam_grid, panel_gain, BeamGridError, BeamPattern};
use crate::radio::fading::Ar1Fade;
use crate::radio::pathloss::{los_probability, path_loss_unchecked};
use crate::radio::shadow::ShadowField;

#[derive(Debug, Error)]
pub enum RadioError {
    #[error(transparent)]
    BeamGrid(#[from] BeamGridError),
    #[error("t = {0} s is not on the SSB grid")]
    OffSsbGrid(f64),
    #[error("ue {0} has no enabled panel")]
    NoEnabledPanel(usize),
}

/// Full decomposition of one link's gain terms, all in dB/dBi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGain<F> {
    pub ue_id: usize,
    pub cell_id: usize,
    pub beam_id: usize,
    pub panel_id: PanelId,
    pub path_loss_db: F,
    pub shadow_db: F,
    pub beam_gain_dbi: F,
    pub panel_gain_dbi: F,
    pub blockage_loss_db: F,
    pub fast_fade_db: F,
}

impl<F: Float> LinkGain<F> {
    /// The sign convention fixed once for the whole artifact.
    pub fn total_db(&self) -> F {
        -self.path_loss_db - self.shadow_db + self.beam_gain_dbi + self.panel_gain_dbi
            - self.blockage_loss_db
            + self.fast_fade_db
    }
}

/// Combine signal, interference and noise powers (linear mW) into dB SINR.
#[inline]
pub fn sinr_db<F: Float>(signal_mw: F, interference_mw: F, noise_mw: F) -> F {
    linear_to_db(signal_mw / (interference_mw + noise_mw))
}

/// Large-scale link state of one UE toward every (cell, beam), refreshed
/// each tick. Reused across ticks to avoid allocation.
#[derive(Debug, Clone)]
pub struct LinkTable<F> {
    n_cells: usize,
    n_beams: usize,
    /// Total large-scale gain (best enabled panel) per (cell, beam), dB.
    gains_db: Vec<F>,
    gains_lin: Vec<F>,
    /// Best enabled panel per cell (the panel is a per-cell choice: all
    /// beams of a cell arrive from the same azimuth).
    best_panel: Vec<PanelId>,
    /// Expected interference power contributed by each cell, linear mW.
    cell_int_mw: Vec<F>,
    total_int_mw: F,
    noise_mw: F,
    tx_serv_mw: F,
}

impl<F: Float> LinkTable<F> {
    pub fn new(n_cells: usize, n_beams: usize) -> Self {
        LinkTable {
            n_cells,
            n_beams,
            gains_db: vec![F::zero(); n_cells * n_beams],
            gains_lin: vec![F::zero(); n_cells * n_beams],
            best_panel: vec![PanelId::P1; n_cells],
            cell_int_mw: vec![F::zero(); n_cells],
            total_int_mw: F::zero(),
            noise_mw: F::zero(),
            tx_serv_mw: F::zero(),
        }
    }

    #[inline]
    pub fn gain_db(&self, cell: usize, beam: usize) -> F {
        self.gains_db[cell * self.n_beams + beam]
    }

    pub fn best_panel(&self, cell: usize) -> PanelId {
        self.best_panel[cell]
    }

    /// Average downlink SINR for a served (cell, beam).
    pub fn avg_sinr_db(&self, serving_cell: usize, serving_beam: usize) -> F {
        let s = self.tx_serv_mw * self.gains_lin[serving_cell * self.n_beams + serving_beam];
        let i = self.total_int_mw - self.cell_int_mw[serving_cell];
        sinr_db(s, i, self.noise_mw)
    }

    /// Beam with the highest large-scale gain in a cell (lowest id on ties).
    pub fn best_beam_by_gain(&self, cell: usize) -> usize {
        let mut best = 0;
        let mut best_gain = self.gain_db(cell, 0);
        for b in 1..self.n_beams {
            let g = self.gain_db(cell, b);
            if g > best_gain {
                best_gain = g;
                best = b;
            }
        }
        best
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_beams(&self) -> usize {
        self.n_beams
    }
}

/// Immutable radio state shared by one run plus the per-link fast-fade
/// registers (mutated only by the single-threaded tick loop).
#[derive(Debug, Clone)]
pub struct RadioModel<F: Float> {
    cells: Vec<CellPlan<F>>,
    beams: Vec<BeamPattern<F>>,
    shadows: Vec<ShadowField<F>>,
    /// Shared component making shadowing partially correlated across
    /// cells: `shadow_c = sqrt(corr) common + sqrt(1 - corr) own_c`.
    common_shadow: ShadowField<F>,
    common_weight: F,
    own_weight: F,
    /// Frozen LOS state per (ue, cell), drawn once at drop positions.
    los: Vec<bool>,
    fade: Vec<F>,
    fade_proc: Ar1Fade<F>,

    n_cells: usize,
    n_beams: usize,
    n_ue: usize,
    fc_ghz: F,
    ue_height_m: F,
    sigma_los_db: F,
    sigma_nlos_db: F,
    tx_per_beam_dbm: F,
    tx_serv_mw: F,
    tx_int_mw: F,
    noise_mw: F,
    front_to_back_db: F,
    panel_peak_dbi: F,
    panel_bw_deg: F,
    blockage_loss_db: F,
    hand_blockage: bool,
    blocked: [bool; 3],
    ssb_period_s: f64,
}

impl<F: Float> RadioModel<F> {
    pub fn new<R: Rng + ?Sized>(
        cfg: &ScenarioConfig,
        cells: Vec<CellPlan<F>>,
        ues: &[UeKinematics<F>],
        rng: &mut R,
    ) -> Result<Self, RadioError> {
        let beams = beam_grid::<F>(cfg)?;
        let n_cells = cells.len();
        let n_beams = beams.len();
        let n_ue = ues.len();

        let half_extent = F::of(cfg.region_radius_m() + cfg.shadow_grid_res_m);
        let gen_field = |rng: &mut R| {
            ShadowField::generate(
                half_extent,
                F::of(cfg.shadow_grid_res_m),
                F::of(cfg.shadow_decorr_dist_m),
                rng,
            )
        };
        let common_shadow = gen_field(rng);
        let shadows: Vec<ShadowField<F>> = (0..n_cells).map(|_| gen_field(rng)).collect();
        let common_weight = F::of(cfg.shadow_site_corr).sqrt();
        let own_weight = (F::one() - F::of(cfg.shadow_site_corr)).sqrt();

        let mut los = Vec::with_capacity(n_ue * n_cells);
        for ue in ues {
            for cell in &cells {
                let d2d = ue.position.distance(cell.site_position);
                let p = los_probability(d2d);
                los.push(F::sample_unit(rng) < p);
            }
        }

        let fade_proc = Ar1Fade::new(
            F::of(cfg.ue_speed_mps()),
            F::of(cfg.ssb_period_s),
            F::of(cfg.coherence_dist_m),
            F::of(cfg.fast_fade_sigma_db),
        );
        let fade: Vec<F> = (0..n_ue * n_cells * n_beams)
            .map(|_| fade_proc.init(rng))
            .collect();

        let mut blocked = [false; 3];
        for p in &cfg.blocked_panels {
            blocked[p.index()] = true;
        }

        let tx_total_mw = db_to_linear(F::of(cfg.tx_power_dbm));
        Ok(RadioModel {
            cells,
            beams,
            shadows,
            common_shadow,
            common_weight,
            own_weight,
            los,
            fade,
            fade_proc,
            n_cells,
            n_beams,
            n_ue,
            fc_ghz: F::of(cfg.carrier_freq_ghz),
            ue_height_m: F::of(cfg.ue_height_m),
            sigma_los_db: F::of(cfg.shadow_sigma_los_db),
            sigma_nlos_db: F::of(cfg.shadow_sigma_nlos_db),
            tx_per_beam_dbm: F::of(cfg.tx_per_beam_dbm()),
            tx_serv_mw: tx_total_mw / F::of(cfg.k_sched as f64),
            tx_int_mw: tx_total_mw / F::of(cfg.n_beams as f64),
            noise_mw: db_to_linear(F::of(cfg.noise_dbm())),
            front_to_back_db: F::of(cfg.front_to_back_db),
            panel_peak_dbi: F::of(cfg.panel_peak_gain_dbi),
            panel_bw_deg: F::of(cfg.panel_beamwidth_deg),
            blockage_loss_db: F::of(cfg.blockage_loss_db),
            hand_blockage: cfg.hand_blockage,
            blocked,
            ssb_period_s: cfg.ssb_period_s,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_beams(&self) -> usize {
        self.n_beams
    }

    pub fn cells(&self) -> &[CellPlan<F>] {
        &self.cells
    }

    pub fn shadow_field(&self, cell: usize) -> &ShadowField<F> {
        &self.shadows[cell]
    }

    /// Normalized (sigma = 1) shadow value a link to `cell` sees at a
    /// position, including the cross-cell common component.
    pub fn shadow_norm(&self, cell: usize, position: crate::geometry::Vec2<F>) -> F {
        self.common_weight * self.common_shadow.sample(position)
            + self.own_weight * self.shadows[cell].sample(position)
    }

    /// Frozen LOS state of a (ue, cell) link; identical across queries.
    pub fn los_state(&self, ue_id: usize, cell: usize) -> bool {
        self.los[ue_id * self.n_cells + cell]
    }

    #[inline]
    fn fade_idx(&self, ue_id: usize, cell: usize, beam: usize) -> usize {
        (ue_id * self.n_cells + cell) * self.n_beams + beam
    }

    /// Advance every per-link fast-fade register by one SSB period.
    /// Consumption order is fixed (ue-major, then cell, then beam).
    pub fn advance_fades<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for x in &mut self.fade {
            *x = self.fade_proc.advance(*x, rng);
        }
    }

    /// Effective panel gain minus blockage, per panel, for an arrival
    /// azimuth at the UE. Disabled panels yield None.
    fn panel_gains(
        &self,
        heading_deg: F,
        arrival_at_ue_deg: F,
        enabled: [bool; 3],
    ) -> [Option<(F, F)>; 3] {
        let mut out = [None; 3];
        for panel in PanelId::ALL {
            let i = panel.index();
            if !enabled[i] {
                continue;
            }
            let blocked = self.hand_blockage && self.blocked[i];
            let raw = panel_gain(
                heading_deg,
                panel,
                arrival_at_ue_deg,
                false,
                self.panel_peak_dbi,
                self.panel_bw_deg,
                self.front_to_back_db,
                F::zero(),
            );
            let loss = if blocked {
                self.blockage_loss_db
            } else {
                F::zero()
            };
            out[i] = Some((raw, loss));
        }
        out
    }

    /// Recompute a UE's large-scale link table at its current position.
    pub fn fill_link_table(
        &self,
        ue: &UeKinematics<F>,
        enabled_panels: [bool; 3],
        table: &mut LinkTable<F>,
    ) -> Result<(), RadioError> {
        if !enabled_panels.iter().any(|&e| e) {
            return Err(RadioError::NoEnabledPanel(ue.ue_id));
        }
        debug_assert!(ue.ue_id < self.n_ue);
        debug_assert_eq!(table.n_cells, self.n_cells);
        debug_assert_eq!(table.n_beams, self.n_beams);

        let heading_deg = ue.heading_rad.to_degrees();
        table.noise_mw = self.noise_mw;
        table.tx_serv_mw = self.tx_serv_mw;
        let mut total_int = F::zero();

        for (c, cell) in self.cells.iter().enumerate() {
            let dvec = ue.position - cell.site_position;
            let d2d = dvec.norm();
            let d3d = (d2d * d2d
                + (cell.bs_height_m - self.ue_height_m) * (cell.bs_height_m - self.ue_height_m))
                .sqrt();
            debug_assert!(d3d >= F::one());
            let los = self.los[ue.ue_id * self.n_cells + c];
            let pl = path_loss_unchecked(d3d, self.fc_ghz, los, self.ue_height_m);
            let sigma = if los {
                self.sigma_los_db
            } else {
                self.sigma_nlos_db
            };
            let shadow = self.shadow_norm(c, ue.position) * sigma;

            let az_at_bs = dvec.azimuth_deg();
            let az_at_ue = wrap_deg(az_at_bs + F::of(180.0));
            let el_at_bs = (self.ue_height_m - cell.bs_height_m).atan2(d2d).to_degrees();

            // best enabled panel: same arrival azimuth for every beam of the cell
            let gains = self.panel_gains(heading_deg, az_at_ue, enabled_panels);
            let mut best_panel = PanelId::P1;
            let mut best_panel_gain = F::neg_infinity();
            for panel in PanelId::ALL {
                if let Some((g, loss)) = gains[panel.index()] {
                    let eff = g - loss;
                    if eff > best_panel_gain {
                        best_panel_gain = eff;
                        best_panel = panel;
                    }
                }
            }
            table.best_panel[c] = best_panel;

            let base = -pl - shadow + best_panel_gain;
            let mut cell_sum_lin = F::zero();
            for (b, beam) in self.beams.iter().enumerate() {
                let daz = wrap_deg(az_at_bs - cell.sector_orientation_deg - beam.boresight_az_deg);
                let del = el_at_bs - beam.elevation_deg;
                let g_db = base + beam_gain(beam, daz, del, self.front_to_back_db);
                let g_lin = db_to_linear(g_db);
                table.gains_db[c * self.n_beams + b] = g_db;
                table.gains_lin[c * self.n_beams + b] = g_lin;
                cell_sum_lin += g_lin;
            }
            let int = self.tx_int_mw * cell_sum_lin;
            table.cell_int_mw[c] = int;
            total_int += int;
        }
        table.total_int_mw = total_int;
        Ok(())
    }

    /// Raw RSRP of one (cell, beam) link at an SSB instant, from the
    /// current link table plus the link's fast-fade register.
    pub fn rsrp_raw(
        &self,
        ue_id: usize,
        cell: usize,
        beam: usize,
        t: f64,
        table: &LinkTable<F>,
    ) -> Result<F, RadioError> {
        let k = (t / self.ssb_period_s).round();
        if (t - k * self.ssb_period_s).abs() > 1e-9 {
            return Err(RadioError::OffSsbGrid(t));
        }
        Ok(self.tx_per_beam_dbm
            + table.gain_db(cell, beam)
            + self.fade[self.fade_idx(ue_id, cell, beam)])
    }

    /// Full gain decomposition of one link (diagnostics and tests; the
    /// tick loop uses the fused path in `fill_link_table`).
    pub fn link_gain(
        &self,
        ue: &UeKinematics<F>,
        cell_id: usize,
        beam_id: usize,
        enabled_panels: [bool; 3],
    ) -> Result<LinkGain<F>, RadioError> {
        if !enabled_panels.iter().any(|&e| e) {
            return Err(RadioError::NoEnabledPanel(ue.ue_id));
        }
        let cell = &self.cells[cell_id];
        let beam = &self.beams[beam_id];
        let dvec = ue.position - cell.site_position;
        let d2d = dvec.norm();
        let d3d = (d2d * d2d
            + (cell.bs_height_m - self.ue_height_m) * (cell.bs_height_m - self.ue_height_m))
            .sqrt();
        let los = self.los[ue.ue_id * self.n_cells + cell_id];
        let pl = path_loss_unchecked(d3d, self.fc_ghz, los, self.ue_height_m);
        let sigma = if los {
            self.sigma_los_db
        } else {
            self.sigma_nlos_db
        };
        let shadow = self.shadow_norm(cell_id, ue.position) * sigma;
        let az_at_bs = dvec.azimuth_deg();
        let az_at_ue = wrap_deg(az_at_bs + F::of(180.0));
        let el_at_bs = (self.ue_height_m - cell.bs_height_m).atan2(d2d).to_degrees();
        let heading_deg = ue.heading_rad.to_degrees();

        let gains = self.panel_gains(heading_deg, az_at_ue, enabled_panels);
        let mut best = None;
        for panel in PanelId::ALL {
            if let Some((g, loss)) = gains[panel.index()] {
                let eff = g - loss;
                if best.is_none_or(|(_, _, _, b)| eff > b) {
                    best = Some((panel, g, loss, eff));
                }
            }
        }
        let (panel_id, panel_g, blockage, _) = best.unwrap();

        let daz = wrap_deg(az_at_bs - cell.sector_orientation_deg - beam.boresight_az_deg);
        let del = el_at_bs - beam.elevation_deg;
        Ok(LinkGain {
            ue_id: ue.ue_id,
            cell_id,
            beam_id,
            panel_id,
            path_loss_db: pl,
            shadow_db: shadow,
            beam_gain_dbi: beam_gain(beam, daz, del, self.front_to_back_db),
            panel_gain_dbi: panel_g,
            blockage_loss_db: blockage,
            fast_fade_db: self.fade[self.fade_idx(ue.ue_id, cell_id, beam_id)],
        })
    }

    #[cfg(test)]
    pub(crate) fn force_all_los(&mut self, value: bool) {
        for l in &mut self.los {
            *l = value;
        }
    }

}
