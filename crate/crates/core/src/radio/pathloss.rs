//! TR 38.901 urban-micro street-canyon path loss and LOS probability.
//!
//! The LOS branch is the below-breakpoint expression; with 10 m sites,
//! 1.5 m UEs and 28 GHz the breakpoint distance is ~1.7 km, well beyond
//! the deployment region, so the single branch covers every link here.

use thiserror::Error;

use crate::float::Float;

#[derive(Debug, Error)]
pub enum PathLossError {
    #[error("3D distance {0} m is below the 1 m model validity limit")]
    DistanceTooSmall(f64),
}

/// UMi street-canyon path loss in dB for a 3D distance in meters and a
/// carrier frequency in GHz.
///
/// LOS: `32.4 + 21 log10(d3d) + 20 log10(fc)`.
/// NLOS: `max(LOS, 35.3 log10(d3d) + 22.4 + 21.3 log10(fc) - 0.3 (h_ue - 1.5))`.
pub fn path_loss<F: Float>(
    d3d_m: F,
    fc_ghz: F,
    los: bool,
    ue_height_m: F,
) -> Result<F, PathLossError> {
    if d3d_m < F::one() {
        return Err(PathLossError::DistanceTooSmall(d3d_m.as_f64()));
    }
    Ok(path_loss_unchecked(d3d_m, fc_ghz, los, ue_height_m))
}

#[inline]
pub(crate) fn path_loss_unchecked<F: Float>(d3d_m: F, fc_ghz: F, los: bool, ue_height_m: F) -> F {
    let log_d = d3d_m.log10();
    let log_f = fc_ghz.log10();
    let pl_los = F::of(32.4) + F::of(21.0) * log_d + F::of(20.0) * log_f;
    if los {
        pl_los
    } else {
        let pl_nlos = F::of(35.3) * log_d + F::of(22.4) + F::of(21.3) * log_f
            - F::of(0.3) * (ue_height_m - F::of(1.5));
        pl_los.max(pl_nlos)
    }
}

/// UMi LOS probability for a 2D distance in meters:
/// `min(18/d, 1) * (1 - e^(-d/36)) + e^(-d/36)`.
pub fn los_probability<F: Float>(d2d_m: F) -> F {
    if d2d_m <= F::of(18.0) {
        return F::one();
    }
    let e = (-d2d_m / F::of(36.0)).exp();
    (F::of(18.0) / d2d_m) * (F::one() - e) + e
}
