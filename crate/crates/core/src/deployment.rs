//! Hexagonal deployment layout and straight-line UE mobility.

use rand::Rng;
use thiserror::Error;

use crate::config::ScenarioConfig;
use crate::float::Float;
use crate::geometry::Vec2;

/// One sector of a site.
#[derive(Debug, Clone, PartialEq)]
pub struct CellPlan<F> {
    pub cell_id: usize,
    pub site_id: usize,
    pub site_position: Vec2<F>,
    /// Boresight azimuth of the sector in degrees.
    pub sector_orientation_deg: F,
    pub bs_height_m: F,
}

/// Position and motion state of one UE.
#[derive(Debug, Clone, PartialEq)]
pub struct UeKinematics<F> {
    pub ue_id: usize,
    pub position: Vec2<F>,
    pub heading_rad: F,
    pub speed_mps: F,
    pub ue_height_m: F,
}

#[derive(Debug, Error)]
pub enum DeploymentError {
    #[error("unsupported site count {0}: layout is one central site plus one hexagonal ring (7)")]
    UnsupportedSiteCount(u32),
    #[error("unsupported sector count {0}: each site serves 3 cells")]
    UnsupportedSectorCount(u32),
}

/// Sector boresights within a site, by convention.
const SECTOR_ORIENTATIONS_DEG: [f64; 3] = [30.0, 150.0, 270.0];

/// Build the 7-site / 21-cell hexagonal layout: site 0 at the origin, six
/// ring sites at distance `isd` with 60° angular spacing.
pub fn build_grid<F: Float>(cfg: &ScenarioConfig) -> Result<Vec<CellPlan<F>>, DeploymentError> {
    if cfg.n_sites != 7 {
        return Err(DeploymentError::UnsupportedSiteCount(cfg.n_sites));
    }
    if cfg.cells_per_site != 3 {
        return Err(DeploymentError::UnsupportedSectorCount(cfg.cells_per_site));
    }

    let mut sites = vec![Vec2::zero()];
    for k in 0..6u32 {
        let angle = F::of(k as f64 * 60.0).to_radians();
        sites.push(Vec2::new(
            F::of(cfg.isd_m) * angle.cos(),
            F::of(cfg.isd_m) * angle.sin(),
        ));
    }

    let mut cells = Vec::with_capacity(sites.len() * 3);
    for (site_id, &site_position) in sites.iter().enumerate() {
        for (sector, &orient) in SECTOR_ORIENTATIONS_DEG.iter().enumerate() {
            cells.push(CellPlan {
                cell_id: site_id * 3 + sector,
                site_id,
                site_position,
                sector_orientation_deg: F::of(orient),
                bs_height_m: F::of(cfg.bs_height_m),
            });
        }
    }
    Ok(cells)
}

/// Drop `n_ue` UEs uniformly on the deployment disc with uniform random
/// headings and the configured constant speed.
pub fn drop_ues<F: Float, R: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    rng: &mut R,
) -> Vec<UeKinematics<F>> {
    let radius = F::of(cfg.region_radius_m());
    let speed = F::of(cfg.ue_speed_mps());
    (0..cfg.n_ue as usize)
        .map(|ue_id| {
            // Uniform over the disc: radius scales with sqrt of a unit draw.
            let r = radius * F::sample_unit(rng).sqrt();
            let theta = F::sample_unit(rng) * F::TAU();
            let heading = F::sample_unit(rng) * F::TAU();
            UeKinematics {
                ue_id,
                position: Vec2::new(r * theta.cos(), r * theta.sin()),
                heading_rad: heading,
                speed_mps: speed,
                ue_height_m: F::of(cfg.ue_height_m),
            }
        })
        .collect()
}

impl<F: Float> UeKinematics<F> {
    /// Advance along the heading for `dt` seconds, specularly reflecting
    /// off the circular region boundary of radius `region_radius`. Returns
    /// the path length traveled; reflections preserve it.
    pub fn advance(&mut self, dt: F, region_radius: F) -> F {
        let step = self.speed_mps * dt;
        let mut remaining = step;
        let mut dir = Vec2::from_heading(self.heading_rad);
        let mut pos = self.position;

        // A tick's step is far smaller than the region, so one reflection
        // per step is the norm; the loop guards corner cases.
        for _ in 0..8 {
            let next = pos + dir.scale(remaining);
            if next.norm() <= region_radius {
                pos = next;
                remaining = F::zero();
                break;
            }
            let s = ray_circle_exit(pos, dir, remaining, region_radius);
            let q = pos + dir.scale(remaining * s);
            let n = q.scale(q.norm().recip());
            let d_dot_n = dir.dot(n);
            dir = dir - n.scale(F::of(2.0) * d_dot_n);
            remaining *= F::one() - s;
            pos = q;
            if remaining <= F::zero() {
                break;
            }
        }
        if remaining > F::zero() {
            // Degenerate numerics: finish the step and clamp inside.
            pos = pos + dir.scale(remaining);
            let norm = pos.norm();
            if norm > region_radius {
                pos = pos.scale(region_radius / norm);
            }
        }
        self.position = pos;
        self.heading_rad = dir.y.atan2(dir.x);
        step
    }
}

/// Fraction `s` in [0, 1] of the segment `pos + s*len*dir` at which the
/// circle of radius `r` is crossed (outward). Returns 0 when already at or
/// beyond the boundary and heading outward.
fn ray_circle_exit<F: Float>(pos: Vec2<F>, dir: Vec2<F>, len: F, r: F) -> F {
    let a = len * len;
    let b = F::of(2.0) * pos.dot(dir) * len;
    let c = pos.dot(pos) - r * r;
    if c >= F::zero() {
        return F::zero();
    }
    let disc = (b * b - F::of(4.0) * a * c).max(F::zero()).sqrt();
    let s = (-b + disc) / (F::of(2.0) * a);
    s.max(F::zero()).min(F::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> ScenarioConfig {
        ScenarioConfig::default()
    }

    #[test]
    fn grid_has_21_cells_from_7_sites() {
        let cells: Vec<CellPlan<f64>> = build_grid(&cfg()).unwrap();
        assert_eq!(cells.len(), 21);
        let sites: std::collections::BTreeSet<usize> = cells.iter().map(|c| c.site_id).collect();
        assert_eq!(sites.len(), 7);
    }

    #[test]
    fn ring_site_positions() {
        let cells: Vec<CellPlan<f64>> = build_grid(&cfg()).unwrap();
        // cells 3..5 sit on the first ring site, cells 6..8 on the second
        assert_relative_eq!(cells[3].site_position.x, 200.0, epsilon = 1e-9);
        assert_relative_eq!(cells[3].site_position.y, 0.0, epsilon = 1e-9);
        assert_relative_eq!(cells[6].site_position.x, 100.0, epsilon = 1e-9);
        assert_relative_eq!(cells[6].site_position.y, 173.20508075688772, epsilon = 1e-9);
        // central site at origin
        assert_relative_eq!(cells[0].site_position.norm(), 0.0);
    }

    #[test]
    fn adjacent_ring_sites_are_isd_apart() {
        let cells: Vec<CellPlan<f64>> = build_grid(&cfg()).unwrap();
        let ring: Vec<Vec2<f64>> = (1..7).map(|s| cells[s * 3].site_position).collect();
        for k in 0..6 {
            let d = ring[k].distance(ring[(k + 1) % 6]);
            assert_relative_eq!(d, 200.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn sector_boresights_120_apart() {
        let cells: Vec<CellPlan<f64>> = build_grid(&cfg()).unwrap();
        for site in 0..7 {
            let o: Vec<f64> = (0..3)
                .map(|k| cells[site * 3 + k].sector_orientation_deg)
                .collect();
            assert_relative_eq!(o[1] - o[0], 120.0);
            assert_relative_eq!(o[2] - o[1], 120.0);
        }
    }

    #[test]
    fn grid_is_pure() {
        let a: Vec<CellPlan<f64>> = build_grid(&cfg()).unwrap();
        let b: Vec<CellPlan<f64>> = build_grid(&cfg()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unsupported_site_count() {
        let mut c = cfg();
        c.n_sites = 19;
        assert!(build_grid::<f64>(&c).is_err());
    }

    #[test]
    fn drop_produces_n_ue_inside_region_at_speed() {
        let c = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ues: Vec<UeKinematics<f64>> = drop_ues(&c, &mut rng);
        assert_eq!(ues.len(), 420);
        for ue in &ues {
            assert!(ue.position.norm() <= c.region_radius_m() + 1e-9);
            assert_relative_eq!(ue.speed_mps, 16.666666666666668, epsilon = 1e-9);
        }
    }

    #[test]
    fn seed_averaged_centroid_near_origin() {
        // Monte-Carlo over 100 seeds: the empirical centroid of all drops
        // stays within 10 m of the origin.
        let c = cfg();
        let (mut sx, mut sy, mut n) = (0.0f64, 0.0f64, 0usize);
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for ue in drop_ues::<f64, _>(&c, &mut rng) {
                sx += ue.position.x;
                sy += ue.position.y;
                n += 1;
            }
        }
        let centroid = (sx / n as f64).hypot(sy / n as f64);
        assert!(centroid < 10.0, "centroid {centroid} m from origin");
    }

    #[test]
    fn different_seeds_different_positions() {
        let c = cfg();
        let mut r1 = ChaCha8Rng::seed_from_u64(1);
        let mut r2 = ChaCha8Rng::seed_from_u64(2);
        let a: Vec<UeKinematics<f64>> = drop_ues(&c, &mut r1);
        let b: Vec<UeKinematics<f64>> = drop_ues(&c, &mut r2);
        assert_ne!(a, b);
    }

    #[test]
    fn advance_single_tick() {
        let mut ue = UeKinematics::<f64> {
            ue_id: 0,
            position: Vec2::zero(),
            heading_rad: 0.0,
            speed_mps: 16.667,
            ue_height_m: 1.5,
        };
        ue.advance(0.01, 240.0);
        assert_relative_eq!(ue.position.x, 0.16667, epsilon = 1e-9);
        assert_relative_eq!(ue.position.y, 0.0);
    }

    #[test]
    fn path_length_preserved_with_reflections() {
        // 120 km/h for 30 s -> 1000 m of path regardless of reflections.
        let speed = 120.0 / 3.6;
        let mut ue = UeKinematics::<f64> {
            ue_id: 0,
            position: Vec2::new(200.0, 0.0),
            heading_rad: 0.3,
            speed_mps: speed,
            ue_height_m: 1.5,
        };
        let radius = 240.0;
        let tick = 0.01;
        let one_tick = speed * tick;
        let mut path = 0.0;
        let mut reflections = 0;
        let mut prev = ue.position;
        for _ in 0..3000 {
            path += ue.advance(tick, radius);
            // the straight-line displacement never exceeds the path moved
            let chord = prev.distance(ue.position);
            assert!(chord <= one_tick + 1e-9);
            if chord < one_tick - 1e-9 {
                reflections += 1;
            }
            prev = ue.position;
            assert!(ue.position.norm() <= radius + 1e-6);
        }
        let expected = speed * 30.0;
        assert_relative_eq!(expected, 1000.0, epsilon = 1e-9);
        assert!(
            (path - expected).abs() <= one_tick + 1e-6,
            "path {path}, expected {expected}"
        );
        assert!(reflections > 0, "trajectory should bounce at least once");
    }

    #[test]
    fn outward_ue_at_boundary_is_reflected() {
        let mut ue = UeKinematics::<f64> {
            ue_id: 0,
            position: Vec2::new(240.0, 0.0),
            heading_rad: 0.0, // radially outward
            speed_mps: 10.0,
            ue_height_m: 1.5,
        };
        ue.advance(0.01, 240.0);
        assert!(ue.position.norm() <= 240.0 + 1e-9);
        assert_relative_eq!(ue.position.x, 239.9, epsilon = 1e-9);
        // heading flipped to point inward
        assert_relative_eq!(ue.heading_rad.cos(), -1.0, epsilon = 1e-12);
    }

    proptest::proptest! {
        // reflections keep the UE inside the region and preserve the
        // traveled distance for arbitrary start states
        #[test]
        fn reflection_keeps_ue_inside_region(
            r_frac in 0.0f64..1.0,
            theta in 0.0f64..std::f64::consts::TAU,
            heading in 0.0f64..std::f64::consts::TAU,
            speed in 1.0f64..40.0,
        ) {
            let radius = 240.0;
            let r = radius * r_frac.sqrt();
            let mut ue = UeKinematics::<f64> {
                ue_id: 0,
                position: Vec2::new(r * theta.cos(), r * theta.sin()),
                heading_rad: heading,
                speed_mps: speed,
                ue_height_m: 1.5,
            };
            let mut path = 0.0;
            for _ in 0..500 {
                path += ue.advance(0.01, radius);
                proptest::prop_assert!(ue.position.norm() <= radius + 1e-6);
            }
            let expected = speed * 5.0;
            proptest::prop_assert!((path - expected).abs() <= speed * 0.01 + 1e-6);
        }
    }

    #[test]
    fn oblique_reflection_law() {
        // Hit the boundary at 45°: the radial component flips, the
        // tangential component is preserved.
        let mut ue = UeKinematics::<f64> {
            ue_id: 0,
            position: Vec2::new(239.95, 0.0),
            heading_rad: std::f64::consts::FRAC_PI_4,
            speed_mps: 20.0,
            ue_height_m: 1.5,
        };
        ue.advance(0.01, 240.0);
        assert!(ue.position.norm() <= 240.0 + 1e-9);
        let d = Vec2::from_heading(ue.heading_rad);
        assert!(d.x < 0.0, "radial component should flip");
        assert!(d.y > 0.0, "tangential component preserved");
    }
}
