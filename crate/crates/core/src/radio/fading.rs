//! Log-domain AR(1) fast fading.
//!
//! Per-link fluctuation in dB evolves as
//! `x(t+dt) = rho x(t) + sqrt(1 - rho^2) sigma w`,  `rho = exp(-v dt / d_coh)`,
//! so correlation decays with distance traveled and the stationary standard
//! deviation stays `sigma`. A static UE (v = 0) keeps its initial draw.

use rand::Rng;

use crate::float::Float;

#[derive(Debug, Clone, Copy)]
pub struct Ar1Fade<F> {
    rho: F,
    /// Innovation scale `sqrt(1 - rho^2) * sigma`.
    innov: F,
    sigma: F,
}

impl<F: Float> Ar1Fade<F> {
    pub fn new(speed_mps: F, step_s: F, coherence_dist_m: F, sigma_db: F) -> Self {
        let rho = (-(speed_mps * step_s) / coherence_dist_m).exp();
        let innov = (F::one() - rho * rho).max(F::zero()).sqrt() * sigma_db;
        Ar1Fade {
            rho,
            innov,
            sigma: sigma_db,
        }
    }

    pub fn rho(&self) -> F {
        self.rho
    }

    /// Draw from the stationary distribution.
    pub fn init<R: Rng + ?Sized>(&self, rng: &mut R) -> F {
        self.sigma * F::sample_standard_normal(rng)
    }

    /// One step of the process.
    #[inline]
    pub fn advance<R: Rng + ?Sized>(&self, x: F, rng: &mut R) -> F {
        self.rho * x + self.innov * F::sample_standard_normal(rng)
    }
}
