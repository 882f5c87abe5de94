//! Scenario configuration: the single source of truth for one simulation run.
//!
//! Configs are flat `key = value` text files. Every physical, protocol and
//! experiment constant lives here so runs can be recalibrated without code
//! changes. Absent keys take the documented defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// UE antenna panel identifier. Panels sit on the top, left and right edges
/// of the device; boresights are at heading, heading+90° and heading-90°.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PanelId {
    P1,
    P2,
    P3,
}

impl PanelId {
    pub const ALL: [PanelId; 3] = [PanelId::P1, PanelId::P2, PanelId::P3];

    pub fn index(self) -> usize {
        match self {
            PanelId::P1 => 0,
            PanelId::P2 => 1,
            PanelId::P3 => 2,
        }
    }

    /// Panel boresight azimuth relative to the UE heading, in degrees.
    pub fn boresight_offset_deg(self) -> f64 {
        match self {
            PanelId::P1 => 0.0,
            PanelId::P2 => 90.0,
            PanelId::P3 => -90.0,
        }
    }
}

impl fmt::Display for PanelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PanelId::P1 => write!(f, "P1"),
            PanelId::P2 => write!(f, "P2"),
            PanelId::P3 => write!(f, "P3"),
        }
    }
}

impl std::str::FromStr for PanelId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "P1" | "p1" => Ok(PanelId::P1),
            "P2" | "p2" => Ok(PanelId::P2),
            "P3" | "p3" => Ok(PanelId::P3),
            other => Err(format!("unknown panel id '{other}' (expected P1, P2 or P3)")),
        }
    }
}

/// All constants for one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    // deployment
    pub n_sites: u32,
    pub cells_per_site: u32,
    pub isd_m: f64,
    pub carrier_freq_ghz: f64,
    pub bs_height_m: f64,
    pub ue_height_m: f64,
    /// UEs are dropped uniformly on a disc of radius `region_scale * isd`.
    pub region_scale: f64,

    // population and clock
    pub n_ue: u32,
    pub sim_time_s: f64,
    pub tick_s: f64,
    pub ue_speed_kmh: f64,

    // beams and scheduling
    pub n_beams: u32,
    pub k_sched: u32,
    pub outer_peak_gain_dbi: f64,
    pub inner_peak_gain_dbi: f64,
    pub outer_az_beamwidth_deg: f64,
    pub inner_az_beamwidth_deg: f64,
    pub outer_el_beamwidth_deg: f64,
    pub inner_el_beamwidth_deg: f64,
    pub outer_tilt_deg: f64,
    pub inner_tilt_deg: f64,
    pub front_to_back_db: f64,

    // UE panels
    pub panel_peak_gain_dbi: f64,
    pub panel_beamwidth_deg: f64,

    // link budget
    pub tx_power_dbm: f64,
    pub bandwidth_mhz: f64,
    pub noise_figure_db: f64,

    // radio-link monitoring thresholds
    pub gamma_out_db: f64,
    pub gamma_in_db: f64,

    // protocol timers
    pub t_ho_s: f64,
    pub t_hof_s: f64,
    pub t_res_s: f64,
    pub max_rach_attempts: u32,
    pub t_rach_s: f64,
    pub n_bfd: u32,
    pub t_bfr_max_s: f64,
    pub t_bfr_rach_s: f64,

    // measurement chain
    pub ssb_period_s: f64,
    pub l1_window: u32,
    pub l3_k: u32,

    // conditional handover
    pub o_prep_db: f64,
    pub o_exec_db: f64,
    pub ttt_prep_s: f64,
    pub ttt_exec_s: f64,

    // hand blockage
    pub hand_blockage: bool,
    pub blockage_loss_db: f64,
    pub blocked_panels: Vec<PanelId>,

    // randomness and fading
    pub seed: u64,
    pub shadow_decorr_dist_m: f64,
    pub shadow_sigma_los_db: f64,
    pub shadow_sigma_nlos_db: f64,
    pub shadow_grid_res_m: f64,
    /// Correlation of shadowing between different cells at one position.
    pub shadow_site_corr: f64,
    pub fast_fade_sigma_db: f64,
    pub coherence_dist_m: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n_sites: 7,
            cells_per_site: 3,
            isd_m: 200.0,
            carrier_freq_ghz: 28.0,
            bs_height_m: 10.0,
            ue_height_m: 1.5,
            region_scale: 1.2,

            n_ue: 420,
            sim_time_s: 30.0,
            tick_s: 0.01,
            ue_speed_kmh: 60.0,

            n_beams: 12,
            k_sched: 4,
            outer_peak_gain_dbi: 18.0,
            inner_peak_gain_dbi: 14.0,
            outer_az_beamwidth_deg: 15.0,
            inner_az_beamwidth_deg: 30.0,
            outer_el_beamwidth_deg: 10.0,
            inner_el_beamwidth_deg: 20.0,
            outer_tilt_deg: 8.0,
            inner_tilt_deg: 16.0,
            front_to_back_db: 30.0,

            panel_peak_gain_dbi: 5.0,
            panel_beamwidth_deg: 90.0,

            tx_power_dbm: 40.0,
            bandwidth_mhz: 100.0,
            noise_figure_db: 9.0,

            gamma_out_db: -8.0,
            gamma_in_db: -6.0,

            t_ho_s: 0.055,
            t_hof_s: 0.200,
            t_res_s: 0.180,
            max_rach_attempts: 4,
            t_rach_s: 0.010,
            n_bfd: 3,
            t_bfr_max_s: 0.100,
            t_bfr_rach_s: 0.010,

            ssb_period_s: 0.020,
            l1_window: 5,
            l3_k: 4,

            o_prep_db: 0.0,
            o_exec_db: 3.0,
            ttt_prep_s: 0.100,
            ttt_exec_s: 0.080,

            hand_blockage: false,
            blockage_loss_db: 25.0,
            blocked_panels: vec![PanelId::P1, PanelId::P3],

            seed: 1,
            shadow_decorr_dist_m: 13.0,
            shadow_sigma_los_db: 4.0,
            shadow_sigma_nlos_db: 7.82,
            shadow_grid_res_m: 5.0,
            shadow_site_corr: 0.5,
            fast_fade_sigma_db: 4.0,
            coherence_dist_m: 5.0,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid configuration:\n{}", .0.join("\n"))]
    Validation(Vec<String>),
}

/// Load and validate a config file, applying defaults for absent keys.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

/// Parse a flat `key = value` document and validate the result.
///
/// All violations are collected and reported together, each naming the
/// offending key.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = ScenarioConfig::default();
    let mut problems = Vec::new();

    for (lineno, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find(['#', ';']) {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Parse {
                line: lineno + 1,
                msg: format!("expected 'key = value', got '{line}'"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if let Err(msg) = cfg.set_key(key, value) {
            problems.push(msg);
        }
    }

    problems.extend(cfg.validate());
    if problems.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError::Validation(problems))
    }
}

macro_rules! parse_num {
    ($key:ident, $value:ident, $field:expr) => {{
        match $value.parse() {
            Ok(v) => {
                $field = v;
                Ok(())
            }
            Err(_) => Err(format!("{}: cannot parse '{}'", $key, $value)),
        }
    }};
}

impl ScenarioConfig {
    fn set_key(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "n_sites" => parse_num!(key, value, self.n_sites),
            "cells_per_site" => parse_num!(key, value, self.cells_per_site),
            "isd" => parse_num!(key, value, self.isd_m),
            "carrier_freq" => parse_num!(key, value, self.carrier_freq_ghz),
            "bs_height" => parse_num!(key, value, self.bs_height_m),
            "ue_height" => parse_num!(key, value, self.ue_height_m),
            "region_scale" => parse_num!(key, value, self.region_scale),
            "n_ue" => parse_num!(key, value, self.n_ue),
            "sim_time" => parse_num!(key, value, self.sim_time_s),
            "tick" => parse_num!(key, value, self.tick_s),
            "ue_speed" => parse_num!(key, value, self.ue_speed_kmh),
            "n_beams" => parse_num!(key, value, self.n_beams),
            "k_sched" => parse_num!(key, value, self.k_sched),
            "outer_peak_gain" => parse_num!(key, value, self.outer_peak_gain_dbi),
            "inner_peak_gain" => parse_num!(key, value, self.inner_peak_gain_dbi),
            "outer_az_beamwidth" => parse_num!(key, value, self.outer_az_beamwidth_deg),
            "inner_az_beamwidth" => parse_num!(key, value, self.inner_az_beamwidth_deg),
            "outer_el_beamwidth" => parse_num!(key, value, self.outer_el_beamwidth_deg),
            "inner_el_beamwidth" => parse_num!(key, value, self.inner_el_beamwidth_deg),
            "outer_tilt" => parse_num!(key, value, self.outer_tilt_deg),
            "inner_tilt" => parse_num!(key, value, self.inner_tilt_deg),
            "front_to_back" => parse_num!(key, value, self.front_to_back_db),
            "panel_peak_gain" => parse_num!(key, value, self.panel_peak_gain_dbi),
            "panel_beamwidth" => parse_num!(key, value, self.panel_beamwidth_deg),
            "tx_power" => parse_num!(key, value, self.tx_power_dbm),
            "bandwidth" => parse_num!(key, value, self.bandwidth_mhz),
            "noise_figure" => parse_num!(key, value, self.noise_figure_db),
            "gamma_out" => parse_num!(key, value, self.gamma_out_db),
            "gamma_in" => parse_num!(key, value, self.gamma_in_db),
            "t_ho" => parse_num!(key, value, self.t_ho_s),
            "t_hof" => parse_num!(key, value, self.t_hof_s),
            "t_res" => parse_num!(key, value, self.t_res_s),
            "max_rach_attempts" => parse_num!(key, value, self.max_rach_attempts),
            "t_rach" => parse_num!(key, value, self.t_rach_s),
            "n_bfd" => parse_num!(key, value, self.n_bfd),
            "t_bfr_max" => parse_num!(key, value, self.t_bfr_max_s),
            "t_bfr_rach" => parse_num!(key, value, self.t_bfr_rach_s),
            "ssb_period" => parse_num!(key, value, self.ssb_period_s),
            "l1_window" => parse_num!(key, value, self.l1_window),
            "l3_k" => parse_num!(key, value, self.l3_k),
            "o_prep" => parse_num!(key, value, self.o_prep_db),
            "o_exec" => parse_num!(key, value, self.o_exec_db),
            "ttt_prep" => parse_num!(key, value, self.ttt_prep_s),
            "ttt_exec" => parse_num!(key, value, self.ttt_exec_s),
            "hand_blockage" => match value {
                "true" | "on" => {
                    self.hand_blockage = true;
                    Ok(())
                }
                "false" | "off" => {
                    self.hand_blockage = false;
                    Ok(())
                }
                _ => Err(format!("{key}: expected true/false, got '{value}'")),
            },
            "blockage_loss" => parse_num!(key, value, self.blockage_loss_db),
            "blocked_panels" => {
                let mut panels = Vec::new();
                for part in value.split(',') {
                    match part.parse::<PanelId>() {
                        Ok(p) => {
                            if !panels.contains(&p) {
                                panels.push(p);
                            }
                        }
                        Err(e) => return Err(format!("{key}: {e}")),
                    }
                }
                panels.sort();
                self.blocked_panels = panels;
                Ok(())
            }
            "seed" => parse_num!(key, value, self.seed),
            "shadow_decorr_dist" => parse_num!(key, value, self.shadow_decorr_dist_m),
            "shadow_sigma_los" => parse_num!(key, value, self.shadow_sigma_los_db),
            "shadow_sigma_nlos" => parse_num!(key, value, self.shadow_sigma_nlos_db),
            "shadow_grid_res" => parse_num!(key, value, self.shadow_grid_res_m),
            "shadow_site_corr" => parse_num!(key, value, self.shadow_site_corr),
            "fast_fade_sigma" => parse_num!(key, value, self.fast_fade_sigma_db),
            "coherence_dist" => parse_num!(key, value, self.coherence_dist_m),
            other => Err(format!("unknown key '{other}'")),
        }
    }

    /// Check every invariant; returns one message per violation.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        let durations = [
            ("sim_time", self.sim_time_s),
            ("tick", self.tick_s),
            ("ssb_period", self.ssb_period_s),
            ("t_ho", self.t_ho_s),
            ("t_hof", self.t_hof_s),
            ("t_res", self.t_res_s),
            ("t_rach", self.t_rach_s),
            ("t_bfr_max", self.t_bfr_max_s),
            ("t_bfr_rach", self.t_bfr_rach_s),
            ("ttt_prep", self.ttt_prep_s),
            ("ttt_exec", self.ttt_exec_s),
        ];
        for (name, value) in durations {
            if !(value > 0.0) {
                v.push(format!("{name}: duration must be > 0 (got {value})"));
            }
        }
        if self.tick_s > 0.0 && self.ssb_period_s > 0.0 {
            let ratio = self.ssb_period_s / self.tick_s;
            if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) || ratio < 1.0 - 1e-9 {
                v.push(format!(
                    "tick: tick must divide ssb_period exactly (tick = {}, ssb_period = {})",
                    self.tick_s, self.ssb_period_s
                ));
            }
        }
        if self.t_hof_s < self.t_ho_s {
            v.push(format!(
                "t_hof: must be >= t_ho (t_hof = {}, t_ho = {})",
                self.t_hof_s, self.t_ho_s
            ));
        }
        if self.k_sched == 0 || self.k_sched > self.n_beams {
            v.push(format!(
                "k_sched: must satisfy 0 < k_sched <= n_beams (k_sched = {}, n_beams = {})",
                self.k_sched, self.n_beams
            ));
        }
        if self.gamma_in_db <= self.gamma_out_db {
            v.push(format!(
                "gamma_in: must be > gamma_out (gamma_in = {}, gamma_out = {})",
                self.gamma_in_db, self.gamma_out_db
            ));
        }
        if self.n_ue == 0 {
            v.push("n_ue: must be >= 1".to_string());
        }
        if self.l1_window == 0 {
            v.push("l1_window: must be >= 1".to_string());
        }
        if self.max_rach_attempts == 0 {
            v.push("max_rach_attempts: must be >= 1".to_string());
        }
        if self.n_bfd == 0 {
            v.push("n_bfd: must be >= 1".to_string());
        }
        if !(self.ue_speed_kmh > 0.0) {
            v.push(format!(
                "ue_speed: must be > 0 km/h (got {})",
                self.ue_speed_kmh
            ));
        }
        if !(self.isd_m > 0.0) {
            v.push(format!("isd: must be > 0 m (got {})", self.isd_m));
        }
        if !(self.shadow_grid_res_m > 0.0) || !(self.shadow_decorr_dist_m > 0.0) {
            v.push("shadow_grid_res/shadow_decorr_dist: must be > 0".to_string());
        }
        if !(0.0..=1.0).contains(&self.shadow_site_corr) {
            v.push(format!(
                "shadow_site_corr: must be in [0, 1] (got {})",
                self.shadow_site_corr
            ));
        }
        v
    }

    /// UE speed in m/s.
    pub fn ue_speed_mps(&self) -> f64 {
        self.ue_speed_kmh / 3.6
    }

    /// Radius of the circular deployment region in meters.
    pub fn region_radius_m(&self) -> f64 {
        self.region_scale * self.isd_m
    }

    /// Number of simulation ticks per SSB period (exact by invariant).
    pub fn ticks_per_ssb(&self) -> u64 {
        (self.ssb_period_s / self.tick_s).round() as u64
    }

    /// Number of ticks in the whole run.
    pub fn n_ticks(&self) -> u64 {
        (self.sim_time_s / self.tick_s).round() as u64
    }

    /// L3 filter coefficient `alpha = 1 / 2^(k/4)`.
    pub fn l3_alpha(&self) -> f64 {
        0.5f64.powf(self.l3_k as f64 / 4.0)
    }

    /// Per-beam transmit power when `k_sched` beams share `tx_power`.
    pub fn tx_per_beam_dbm(&self) -> f64 {
        self.tx_power_dbm - 10.0 * (self.k_sched as f64).log10()
    }

    /// Thermal noise power over the configured bandwidth, incl. noise figure.
    pub fn noise_dbm(&self) -> f64 {
        -174.0 + 10.0 * (self.bandwidth_mhz * 1e6).log10() + self.noise_figure_db
    }

    /// Total number of cells.
    pub fn n_cells(&self) -> usize {
        (self.n_sites * self.cells_per_site) as usize
    }

    /// Gap tolerance for session contiguity: half a tick.
    pub fn merge_tolerance_s(&self) -> f64 {
        self.tick_s / 2.0
    }

    /// Canonical `key = value` rendering, sorted by key. Input for the
    /// config hash and usable as a config file.
    pub fn canonical_text(&self) -> String {
        let panels: Vec<String> = self.blocked_panels.iter().map(|p| p.to_string()).collect();
        let mut kv: BTreeMap<&str, String> = BTreeMap::new();
        kv.insert("n_sites", self.n_sites.to_string());
        kv.insert("cells_per_site", self.cells_per_site.to_string());
        kv.insert("isd", self.isd_m.to_string());
        kv.insert("carrier_freq", self.carrier_freq_ghz.to_string());
        kv.insert("bs_height", self.bs_height_m.to_string());
        kv.insert("ue_height", self.ue_height_m.to_string());
        kv.insert("region_scale", self.region_scale.to_string());
        kv.insert("n_ue", self.n_ue.to_string());
        kv.insert("sim_time", self.sim_time_s.to_string());
        kv.insert("tick", self.tick_s.to_string());
        kv.insert("ue_speed", self.ue_speed_kmh.to_string());
        kv.insert("n_beams", self.n_beams.to_string());
        kv.insert("k_sched", self.k_sched.to_string());
        kv.insert("outer_peak_gain", self.outer_peak_gain_dbi.to_string());
        kv.insert("inner_peak_gain", self.inner_peak_gain_dbi.to_string());
        kv.insert("outer_az_beamwidth", self.outer_az_beamwidth_deg.to_string());
        kv.insert("inner_az_beamwidth", self.inner_az_beamwidth_deg.to_string());
        kv.insert("outer_el_beamwidth", self.outer_el_beamwidth_deg.to_string());
        kv.insert("inner_el_beamwidth", self.inner_el_beamwidth_deg.to_string());
        kv.insert("outer_tilt", self.outer_tilt_deg.to_string());
        kv.insert("inner_tilt", self.inner_tilt_deg.to_string());
        kv.insert("front_to_back", self.front_to_back_db.to_string());
        kv.insert("panel_peak_gain", self.panel_peak_gain_dbi.to_string());
        kv.insert("panel_beamwidth", self.panel_beamwidth_deg.to_string());
        kv.insert("tx_power", self.tx_power_dbm.to_string());
        kv.insert("bandwidth", self.bandwidth_mhz.to_string());
        kv.insert("noise_figure", self.noise_figure_db.to_string());
        kv.insert("gamma_out", self.gamma_out_db.to_string());
        kv.insert("gamma_in", self.gamma_in_db.to_string());
        kv.insert("t_ho", self.t_ho_s.to_string());
        kv.insert("t_hof", self.t_hof_s.to_string());
        kv.insert("t_res", self.t_res_s.to_string());
        kv.insert("max_rach_attempts", self.max_rach_attempts.to_string());
        kv.insert("t_rach", self.t_rach_s.to_string());
        kv.insert("n_bfd", self.n_bfd.to_string());
        kv.insert("t_bfr_max", self.t_bfr_max_s.to_string());
        kv.insert("t_bfr_rach", self.t_bfr_rach_s.to_string());
        kv.insert("ssb_period", self.ssb_period_s.to_string());
        kv.insert("l1_window", self.l1_window.to_string());
        kv.insert("l3_k", self.l3_k.to_string());
        kv.insert("o_prep", self.o_prep_db.to_string());
        kv.insert("o_exec", self.o_exec_db.to_string());
        kv.insert("ttt_prep", self.ttt_prep_s.to_string());
        kv.insert("ttt_exec", self.ttt_exec_s.to_string());
        kv.insert("hand_blockage", self.hand_blockage.to_string());
        kv.insert("blockage_loss", self.blockage_loss_db.to_string());
        kv.insert("blocked_panels", panels.join(","));
        kv.insert("seed", self.seed.to_string());
        kv.insert("shadow_decorr_dist", self.shadow_decorr_dist_m.to_string());
        kv.insert("shadow_sigma_los", self.shadow_sigma_los_db.to_string());
        kv.insert("shadow_sigma_nlos", self.shadow_sigma_nlos_db.to_string());
        kv.insert("shadow_grid_res", self.shadow_grid_res_m.to_string());
        kv.insert("shadow_site_corr", self.shadow_site_corr.to_string());
        kv.insert("fast_fade_sigma", self.fast_fade_sigma_db.to_string());
        kv.insert("coherence_dist", self.coherence_dist_m.to_string());

        let mut out = String::new();
        for (k, v) in kv {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        }
        out
    }

    /// 64-bit FNV-1a over the canonical rendering, as 16 hex digits.
    /// Provenance identifier, not a cryptographic digest.
    pub fn config_hash(&self) -> String {
        let mut h: u64 = 0xcbf29ce484222325;
        for byte in self.canonical_text().bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }
}
