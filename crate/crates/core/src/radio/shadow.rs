//! Spatially correlated shadow fading fields.
//!
//! Each cell owns one normalized field (unit marginal variance) on a square
//! grid covering the deployment region. Correlation decays exponentially
//! with distance along each grid axis with the configured decorrelation
//! distance, which produces the "coverage island" structure. Link-level
//! shadowing scales a field sample by the LOS- or NLOS-sigma.

use rand::Rng;

use crate::float::Float;
use crate::geometry::Vec2;

#[derive(Debug, Clone)]
pub struct ShadowField<F> {
    /// Coordinate of grid node (0, 0).
    min_corner: Vec2<F>,
    res_m: F,
    n: usize,
    /// Row-major normalized values, sigma = 1.
    values: Vec<F>,
}

impl<F: Float> ShadowField<F> {
    /// Generate a field covering `[-half_extent, half_extent]^2` with the
    /// given grid resolution and decorrelation distance.
    ///
    /// Construction is a separable first-order sweep: fill with white
    /// Gaussian samples, then filter rows and columns with coefficient
    /// `a = exp(-res/decorr)`. Both passes preserve unit variance, and the
    /// axis autocorrelation at lag `k` nodes is `a^k`.
    pub fn generate<R: Rng + ?Sized>(
        half_extent_m: F,
        res_m: F,
        decorr_dist_m: F,
        rng: &mut R,
    ) -> Self {
        let n = (F::of(2.0) * half_extent_m / res_m).ceil().as_f64() as usize + 1;
        let a = (-res_m / decorr_dist_m).exp();
        let b = (F::one() - a * a).sqrt();

        let mut values: Vec<F> = (0..n * n)
            .map(|_| F::sample_standard_normal(rng))
            .collect();

        // rows
        for i in 0..n {
            for j in 1..n {
                values[i * n + j] = a * values[i * n + j - 1] + b * values[i * n + j];
            }
        }
        // columns
        for j in 0..n {
            for i in 1..n {
                values[i * n + j] = a * values[(i - 1) * n + j] + b * values[i * n + j];
            }
        }

        ShadowField {
            min_corner: Vec2::new(-half_extent_m, -half_extent_m),
            res_m,
            n,
            values,
        }
    }

    pub fn grid_size(&self) -> usize {
        self.n
    }

    pub fn resolution_m(&self) -> F {
        self.res_m
    }

    /// Normalized value at grid node (i, j) = (row, col).
    pub fn node(&self, i: usize, j: usize) -> F {
        self.values[i * self.n + j]
    }

    /// Position of grid node (i, j).
    pub fn node_position(&self, i: usize, j: usize) -> Vec2<F> {
        Vec2::new(
            self.min_corner.x + self.res_m * F::of(j as f64),
            self.min_corner.y + self.res_m * F::of(i as f64),
        )
    }

    /// Bilinear sample of the normalized field at an arbitrary position,
    /// clamped to the grid.
    pub fn sample(&self, p: Vec2<F>) -> F {
        let fx = ((p.x - self.min_corner.x) / self.res_m).max(F::zero());
        let fy = ((p.y - self.min_corner.y) / self.res_m).max(F::zero());
        let max_idx = F::of((self.n - 1) as f64);
        let fx = fx.min(max_idx);
        let fy = fy.min(max_idx);
        let j0 = fx.floor().as_f64() as usize;
        let i0 = fy.floor().as_f64() as usize;
        let j1 = (j0 + 1).min(self.n - 1);
        let i1 = (i0 + 1).min(self.n - 1);
        let tx = fx - F::of(j0 as f64);
        let ty = fy - F::of(i0 as f64);

        let v00 = self.node(i0, j0);
        let v01 = self.node(i0, j1);
        let v10 = self.node(i1, j0);
        let v11 = self.node(i1, j1);
        let top = v00 + (v01 - v00) * tx;
        let bot = v10 + (v11 - v10) * tx;
        top + (bot - top) * ty
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn autocorr_at_axis_lag(f: &ShadowField<f64>, lag: usize) -> f64 {
        let n = f.grid_size();
        let mut num = 0.0;
        let mut den = 0.0;
        let mut count = 0usize;
        let mean: f64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| f.node(i, j))
            .sum::<f64>()
            / (n * n) as f64;
        for i in 0..n {
            for j in 0..n {
                let v = f.node(i, j) - mean;
                den += v * v;
                if j + lag < n {
                    num += v * (f.node(i, j + lag) - mean);
                    count += 1;
                }
                if i + lag < n {
                    num += v * (f.node(i + lag, j) - mean);
                    count += 1;
                }
            }
        }
        (num / count as f64) / (den / (n * n) as f64)
    }

    #[test]
    fn marginal_std_within_ten_percent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f: ShadowField<f64> = ShadowField::generate(245.0, 5.0, 13.0, &mut rng);
        let n = f.grid_size();
        let all: Vec<f64> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| f.node(i, j))
            .collect();
        let mean = all.iter().sum::<f64>() / all.len() as f64;
        let var = all.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / all.len() as f64;
        let std = var.sqrt();
        assert!(
            (std - 1.0).abs() < 0.1,
            "normalized field std {std} should be 1 +/- 10%"
        );
    }

    #[test]
    fn autocorrelation_at_decorrelation_distance_is_e_inv() {
        // decorrelation distance = 3 grid cells so the lag lands exactly on
        // nodes; expected autocorrelation e^-1 within +/- 0.1
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f: ShadowField<f64> = ShadowField::generate(300.0, 5.0, 15.0, &mut rng);
        let rho = autocorr_at_axis_lag(&f, 3);
        let target = (-1.0f64).exp();
        assert!(
            (rho - target).abs() < 0.1,
            "autocorr {rho}, expected {target} +/- 0.1"
        );
    }

    #[test]
    fn bilinear_matches_nodes_and_interpolates() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f: ShadowField<f64> = ShadowField::generate(50.0, 5.0, 13.0, &mut rng);
        let p = f.node_position(4, 6);
        assert!((f.sample(p) - f.node(4, 6)).abs() < 1e-12);
        // midpoint between two nodes is the average
        let q = Vec2::new(p.x + 2.5, p.y);
        let expect = 0.5 * (f.node(4, 6) + f.node(4, 7));
        assert!((f.sample(q) - expect).abs() < 1e-12);
        // out-of-grid positions clamp instead of panicking
        let far = Vec2::new(1e6, -1e6);
        f.sample(far);
    }

    #[test]
    fn deterministic_given_seed() {
        let f1: ShadowField<f64> =
            ShadowField::generate(100.0, 5.0, 13.0, &mut ChaCha8Rng::seed_from_u64(5));
        let f2: ShadowField<f64> =
            ShadowField::generate(100.0, 5.0, 13.0, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(f1.values, f2.values);
    }
}
