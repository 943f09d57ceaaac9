use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal};

use crate::error::{Error, Result};
use crate::md::{kinetic_energy, ForceField, PhaseState, Side, SimConfig};
use crate::scalar::Real;

/// Places the particles evenly at the Lennard-Jones minimum spacing around the
/// chosen well minimum, draws Gaussian momenta from the seeded generator and
/// rescales them so the total energy is `N · target_energy_per_particle`.
pub fn initialize<T: Real>(cfg: &SimConfig<T>) -> Result<PhaseState<T>> {
    cfg.validate()?;
    let n = cfg.n_particles;
    let spacing = T::lit(2f64.powf(1.0 / 6.0)) * cfg.lj_sigma;
    let centre = match cfg.init_side {
        Side::Left => -cfg.well_minimum_position,
        Side::Right => cfg.well_minimum_position,
    };
    let half_span = T::from_usize_lossy(n - 1) * T::lit(0.5);
    let q: Vec<T> = (0..n)
        .map(|i| centre + (T::from_usize_lossy(i) - half_span) * spacing)
        .collect();
    let fits = match cfg.init_side {
        Side::Left => q.iter().all(|&x| x < T::zero()),
        Side::Right => q.iter().all(|&x| x > T::zero()),
    };
    if !fits {
        return Err(Error::CannotFit {
            n,
            side: cfg.init_side.to_string(),
            spacing: spacing.as_f64(),
        });
    }

    let potential = ForceField::new(cfg).potential_energy(&q)?;
    let target = T::from_usize_lossy(n) * cfg.target_energy_per_particle;
    let needed = target - potential;
    if !(needed > T::zero()) {
        return Err(Error::EnergyBelowFloor {
            target: target.as_f64(),
            floor: potential.as_f64(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut p: Vec<T> = (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            T::lit(z)
        })
        .collect();
    let drawn = kinetic_energy(&p, cfg.mass);
    if !(drawn > T::zero()) {
        p[0] = T::one();
    }
    let scale = (needed / kinetic_energy(&p, cfg.mass)).sqrt();
    for x in &mut p {
        *x = *x * scale;
    }
    Ok(PhaseState::new(q, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::md::{count_right, total_energy};

    #[test]
    fn single_particle_sits_in_left_minimum() {
        let cfg = SimConfig::<f64>::default();
        let s = initialize(&cfg).unwrap();
        assert_eq!(s.q, [-3.0]);
        assert!((s.p[0].abs() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn left_start_has_nobody_on_the_right() {
        let s = initialize(&SimConfig::<f64>::desk_scale()).unwrap();
        assert_eq!(count_right(&s), 0);
        let right = initialize(&SimConfig::<f64> {
            init_side: Side::Right,
            ..SimConfig::desk_scale()
        })
        .unwrap();
        assert_eq!(count_right(&right), 20);
    }

    #[test]
    fn energy_hits_target_for_many_seeds() {
        for seed in 0..100 {
            let cfg = SimConfig::<f64> {
                seed,
                ..SimConfig::desk_scale()
            };
            let s = initialize(&cfg).unwrap();
            let e = total_energy(&s, &cfg).unwrap();
            let target = 20.0 * cfg.target_energy_per_particle;
            assert!(((e - target) / target).abs() < 1e-9, "seed {seed}: {e}");
        }
    }

    #[test]
    fn too_many_particles_do_not_fit() {
        let cfg = SimConfig::<f64> {
            n_particles: 8,
            ..SimConfig::default()
        };
        assert!(matches!(initialize(&cfg), Err(Error::CannotFit { .. })));
    }

    #[test]
    fn energy_below_placement_floor() {
        let cfg = SimConfig::<f64> {
            n_particles: 4,
            target_energy_per_particle: -5.0,
            ..SimConfig::default()
        };
        assert!(matches!(initialize(&cfg), Err(Error::EnergyBelowFloor { .. })));
    }
}
