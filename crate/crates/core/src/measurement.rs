//! L1 and L3 filtering of raw RSRP samples.
//!
//! At every SSB instant the UE measures all (cell, beam) links through its
//! best panel. L1 is a moving average over the last `l1_window` raw samples
//! per (cell, beam). The per-cell L3 register smooths the best-beam L1
//! output recursively: `F <- (1 - alpha) F + alpha M`, initialized to the
//! first L1 output. All filtering happens in the dB domain.

use crate::config::ScenarioConfig;
use crate::float::Float;

#[derive(Debug, Clone)]
struct L1Ring<F> {
    buf: Vec<F>,
    next: usize,
    len: usize,
}

impl<F: Float> L1Ring<F> {
    fn new(window: usize) -> Self {
        L1Ring {
            buf: vec![F::zero(); window],
            next: 0,
            len: 0,
        }
    }

    fn push_and_mean(&mut self, raw: F) -> F {
        self.buf[self.next] = raw;
        self.next = (self.next + 1) % self.buf.len();
        if self.len < self.buf.len() {
            self.len += 1;
        }
        // slots 0..len are live both before and after the first wrap
        let sum: F = self.buf[..self.len].iter().copied().sum();
        sum / F::of(self.len as f64)
    }
}

/// Per-UE measurement state across all cells and beams.
#[derive(Debug, Clone)]
pub struct FilterBank<F> {
    n_cells: usize,
    n_beams: usize,
    l1: Vec<L1Ring<F>>,
    l1_out: Vec<F>,
    l3: Vec<Option<F>>,
    best_l1_beam: Vec<usize>,
    alpha: F,
}

impl<F: Float> FilterBank<F> {
    pub fn new(cfg: &ScenarioConfig) -> Self {
        let n_cells = cfg.n_cells();
        let n_beams = cfg.n_beams as usize;
        FilterBank {
            n_cells,
            n_beams,
            l1: (0..n_cells * n_beams)
                .map(|_| L1Ring::new(cfg.l1_window as usize))
                .collect(),
            l1_out: vec![F::neg_infinity(); n_cells * n_beams],
            l3: vec![None; n_cells],
            best_l1_beam: vec![0; n_cells],
            alpha: F::of(cfg.l3_alpha()),
        }
    }

    pub fn l3_alpha(&self) -> F {
        self.alpha
    }

    /// Push one raw sample into a (cell, beam) L1 filter; returns the mean
    /// of the last `min(n_seen, l1_window)` samples.
    pub fn l1_update(&mut self, cell: usize, beam: usize, raw: F) -> F {
        let out = self.l1[cell * self.n_beams + beam].push_and_mean(raw);
        self.l1_out[cell * self.n_beams + beam] = out;
        out
    }

    /// Feed the cell-level L3 filter with an L1 output.
    pub fn l3_update(&mut self, cell: usize, l1_out: F) -> F {
        let next = match self.l3[cell] {
            None => l1_out,
            Some(prev) => (F::one() - self.alpha) * prev + self.alpha * l1_out,
        };
        self.l3[cell] = Some(next);
        next
    }

    /// One full measurement pass: `raws` holds raw RSRP per (cell, beam) in
    /// cell-major order. Updates every L1 filter, drives each cell's L3
    /// register from its best-beam L1 output and returns the L3 map.
    pub fn measure_all(&mut self, raws: &[F]) -> &[Option<F>] {
        assert_eq!(raws.len(), self.n_cells * self.n_beams);
        for cell in 0..self.n_cells {
            let mut best = F::neg_infinity();
            let mut best_beam = 0;
            for beam in 0..self.n_beams {
                let out = self.l1_update(cell, beam, raws[cell * self.n_beams + beam]);
                if out > best {
                    best = out;
                    best_beam = beam;
                }
            }
            self.best_l1_beam[cell] = best_beam;
            self.l3_update(cell, best);
        }
        &self.l3
    }

    pub fn l1_output(&self, cell: usize, beam: usize) -> F {
        self.l1_out[cell * self.n_beams + beam]
    }

    /// Beam with the highest L1 output in a cell (lowest id on ties).
    pub fn best_l1_beam(&self, cell: usize) -> usize {
        self.best_l1_beam[cell]
    }

    pub fn l3(&self, cell: usize) -> Option<F> {
        self.l3[cell]
    }

    pub fn l3_map(&self) -> &[Option<F>] {
        &self.l3
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng as _, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_cfg() -> ScenarioConfig {
        let mut cfg = ScenarioConfig::default();
        cfg.l1_window = 5;
        cfg.l3_k = 4;
        cfg
    }

    #[test]
    fn l1_single_sample_passthrough() {
        let mut bank: FilterBank<f64> = FilterBank::new(&small_cfg());
        assert_relative_eq!(bank.l1_update(0, 0, -80.0), -80.0);
    }

    #[test]
    fn l1_partial_window_mean() {
        let mut bank: FilterBank<f64> = FilterBank::new(&small_cfg());
        bank.l1_update(0, 0, -80.0);
        assert_relative_eq!(bank.l1_update(0, 0, -90.0), -85.0);
    }

    #[test]
    fn l1_constant_input_is_fixed_point() {
        let mut bank: FilterBank<f64> = FilterBank::new(&small_cfg());
        let c = -73.25;
        let mut out = 0.0;
        for _ in 0..12 {
            out = bank.l1_update(1, 3, c);
        }
        assert_relative_eq!(out, c, epsilon = 1e-12);
    }

    #[test]
    fn l1_rolls_off_old_samples() {
        let mut bank: FilterBank<f64> = FilterBank::new(&small_cfg());
        for v in [-100.0, -90.0, -90.0, -90.0, -90.0] {
            bank.l1_update(0, 0, v);
        }
        // window full of -90 after one more push
        assert_relative_eq!(bank.l1_update(0, 0, -90.0), -90.0);
    }

    #[test]
    fn l3_recursive_step() {
        let mut bank: FilterBank<f64> = FilterBank::new(&small_cfg());
        assert_relative_eq!(bank.l3_alpha(), 0.5);
        bank.l3_update(0, -90.0); // init to first input
        assert_relative_eq!(bank.l3(0).unwrap(), -90.0);
        assert_relative_eq!(bank.l3_update(0, -80.0), -85.0);
    }

    #[test]
    fn l3_converges_geometrically() {
        // from a 10 dB offset, residual after 10 steps is (1-alpha)^10 * 10
        let mut bank: FilterBank<f64> = FilterBank::new(&small_cfg());
        bank.l3_update(0, -90.0);
        let mut out = -90.0;
        for _ in 0..10 {
            out = bank.l3_update(0, -80.0);
        }
        let residual = (-80.0f64 - out).abs();
        assert_relative_eq!(residual, 10.0 * 0.5f64.powi(10), epsilon = 1e-12);
        assert!(residual < 0.01);
    }

    #[test]
    fn l3_alpha_one_is_passthrough() {
        let mut cfg = small_cfg();
        cfg.l3_k = 0; // alpha = 1
        let mut bank: FilterBank<f64> = FilterBank::new(&cfg);
        assert_relative_eq!(bank.l3_alpha(), 1.0);
        bank.l3_update(0, -90.0);
        assert_relative_eq!(bank.l3_update(0, -71.0), -71.0);
    }

    #[test]
    fn measure_all_covers_every_cell() {
        let cfg = small_cfg();
        let mut bank: FilterBank<f64> = FilterBank::new(&cfg);
        let raws = vec![-80.0; cfg.n_cells() * 12];
        let map = bank.measure_all(&raws);
        assert_eq!(map.len(), 21);
        assert!(map.iter().all(|v| v.is_some()));
    }

    #[test]
    fn best_beam_argmax_with_low_id_tie_break() {
        let cfg = small_cfg();
        let mut bank: FilterBank<f64> = FilterBank::new(&cfg);
        let mut raws = vec![-90.0; cfg.n_cells() * 12];
        raws[5] = -80.0; // cell 0, beam 5
        raws[7] = -80.0; // tie: beam 7
        bank.measure_all(&raws);
        assert_eq!(bank.best_l1_beam(0), 5);
        assert_relative_eq!(bank.l3(0).unwrap(), -80.0);
    }

    proptest::proptest! {
        // L1 and L3 are convex combinations in the dB domain: outputs
        // never leave the [min, max] envelope of the inputs seen so far
        #[test]
        fn outputs_bounded_by_inputs(
            raws in proptest::collection::vec(-140.0f64..-40.0, 1..60),
            window in 1u32..8,
            l3_k in 0u32..12,
        ) {
            let mut cfg = small_cfg();
            cfg.l1_window = window;
            cfg.l3_k = l3_k;
            let mut bank: FilterBank<f64> = FilterBank::new(&cfg);
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for raw in raws {
                lo = lo.min(raw);
                hi = hi.max(raw);
                let l1 = bank.l1_update(2, 4, raw);
                proptest::prop_assert!(l1 >= lo - 1e-9 && l1 <= hi + 1e-9);
                let l3 = bank.l3_update(2, l1);
                proptest::prop_assert!(l3 >= lo - 1e-9 && l3 <= hi + 1e-9);
            }
        }
    }

    #[test]
    fn l3_trace_smoother_than_raw() {
        // an AR(1)-like noisy input filtered by L1+L3 must lose variance
        let cfg = small_cfg();
        let mut bank: FilterBank<f64> = FilterBank::new(&cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rho = 0.9;
        let mut x = 0.0;
        let mut raw_series = Vec::new();
        let mut l3_series = Vec::new();
        for _ in 0..1000 {
            let w: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut rng);
            x = rho * x + (1.0f64 - rho * rho).sqrt() * 4.0 * w;
            let raw = -80.0 + x;
            let l1 = bank.l1_update(0, 0, raw);
            let l3 = bank.l3_update(0, l1);
            raw_series.push(raw);
            l3_series.push(l3);
        }
        let var = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64
        };
        assert!(
            var(&l3_series) < var(&raw_series),
            "L3 variance {} should be below raw variance {}",
            var(&l3_series),
            var(&raw_series)
        );
    }
}
