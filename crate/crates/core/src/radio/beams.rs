//! Transmit beam grid and UE panel directivity.
//!
//! Cells share one 12-beam grid: eight narrow high-gain outer beams whose
//! boresights tile the 120° sector every 15°, and four wide lower-gain
//! inner beams every 30° with stronger downtilt. UE panels use the same
//! parabolic main-lobe model with a 90° lobe.

use thiserror::Error;

use crate::config::{PanelId, ScenarioConfig};
use crate::float::Float;
use crate::geometry::wrap_deg;

pub const N_BEAMS: usize = 12;
pub const N_OUTER: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct BeamPattern<F> {
    /// Beam index 0..11; 0..7 are outer, 8..11 inner.
    pub beam_id: usize,
    /// Boresight azimuth relative to the sector orientation, degrees.
    pub boresight_az_deg: F,
    /// Boresight elevation (negative = downtilt), degrees.
    pub elevation_deg: F,
    pub az_beamwidth_deg: F,
    pub el_beamwidth_deg: F,
    pub peak_gain_dbi: F,
}

#[derive(Debug, Error)]
pub enum BeamGridError {
    #[error("unsupported beam count {0}: the grid is 8 outer + 4 inner beams")]
    UnsupportedBeamCount(u32),
    #[error("outer beams must have strictly higher peak gain than inner beams ({outer} vs {inner} dBi)")]
    GainOrdering { outer: f64, inner: f64 },
    #[error("outer beams must be narrower than inner beams ({outer} vs {inner} deg)")]
    WidthOrdering { outer: f64, inner: f64 },
}

/// Build the 12-beam grid from config constants.
pub fn beam_grid<F: Float>(cfg: &ScenarioConfig) -> Result<Vec<BeamPattern<F>>, BeamGridError> {
    if cfg.n_beams as usize != N_BEAMS {
        return Err(BeamGridError::UnsupportedBeamCount(cfg.n_beams));
    }
    if cfg.outer_peak_gain_dbi <= cfg.inner_peak_gain_dbi {
        return Err(BeamGridError::GainOrdering {
            outer: cfg.outer_peak_gain_dbi,
            inner: cfg.inner_peak_gain_dbi,
        });
    }
    if cfg.outer_az_beamwidth_deg >= cfg.inner_az_beamwidth_deg {
        return Err(BeamGridError::WidthOrdering {
            outer: cfg.outer_az_beamwidth_deg,
            inner: cfg.inner_az_beamwidth_deg,
        });
    }

    let mut beams = Vec::with_capacity(N_BEAMS);
    for k in 0..N_OUTER {
        // boresights at -52.5, -37.5, ..., +52.5 for a 15° raster
        let az = (k as f64 - (N_OUTER as f64 - 1.0) / 2.0) * cfg.outer_az_beamwidth_deg;
        beams.push(BeamPattern {
            beam_id: k,
            boresight_az_deg: F::of(az),
            elevation_deg: F::of(-cfg.outer_tilt_deg),
            az_beamwidth_deg: F::of(cfg.outer_az_beamwidth_deg),
            el_beamwidth_deg: F::of(cfg.outer_el_beamwidth_deg),
            peak_gain_dbi: F::of(cfg.outer_peak_gain_dbi),
        });
    }
    let n_inner = N_BEAMS - N_OUTER;
    for k in 0..n_inner {
        let az = (k as f64 - (n_inner as f64 - 1.0) / 2.0) * cfg.inner_az_beamwidth_deg;
        beams.push(BeamPattern {
            beam_id: N_OUTER + k,
            boresight_az_deg: F::of(az),
            elevation_deg: F::of(-cfg.inner_tilt_deg),
            az_beamwidth_deg: F::of(cfg.inner_az_beamwidth_deg),
            el_beamwidth_deg: F::of(cfg.inner_el_beamwidth_deg),
            peak_gain_dbi: F::of(cfg.inner_peak_gain_dbi),
        });
    }
    Ok(beams)
}

/// Parabolic main-lobe gain:
/// `peak - min(12 (daz/bw_az)^2 + 12 (del/bw_el)^2, front_to_back)`.
#[inline]
pub fn lobe_gain<F: Float>(
    peak_dbi: F,
    delta_az_deg: F,
    delta_el_deg: F,
    az_bw_deg: F,
    el_bw_deg: F,
    front_to_back_db: F,
) -> F {
    let a = delta_az_deg / az_bw_deg;
    let e = delta_el_deg / el_bw_deg;
    let att = (F::of(12.0) * (a * a + e * e)).min(front_to_back_db);
    peak_dbi - att
}

/// Gain of one transmit beam toward an offset from its boresight.
#[inline]
pub fn beam_gain<F: Float>(
    pattern: &BeamPattern<F>,
    azimuth_offset_deg: F,
    elevation_offset_deg: F,
    front_to_back_db: F,
) -> F {
    lobe_gain(
        pattern.peak_gain_dbi,
        wrap_deg(azimuth_offset_deg),
        elevation_offset_deg,
        pattern.az_beamwidth_deg,
        pattern.el_beamwidth_deg,
        front_to_back_db,
    )
}

/// Gain of one UE panel for a signal arriving at the given azimuth (in the
/// global frame), for a UE with the given heading. Blocked panels take the
/// configured blockage loss on top of the pattern.
#[inline]
pub fn panel_gain<F: Float>(
    heading_deg: F,
    panel: PanelId,
    arrival_azimuth_deg: F,
    blocked: bool,
    peak_dbi: F,
    beamwidth_deg: F,
    front_to_back_db: F,
    blockage_loss_db: F,
) -> F {
    let boresight = heading_deg + F::of(panel.boresight_offset_deg());
    let delta = wrap_deg(arrival_azimuth_deg - boresight);
    let g = lobe_gain(
        peak_dbi,
        delta,
        F::zero(),
        beamwidth_deg,
        beamwidth_deg,
        front_to_back_db,
    );
    if blocked {
        g - blockage_loss_db
    } else {
        g
    }
}
