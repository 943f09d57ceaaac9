use crate::error::{Error, Result};
use crate::md::{count_right, initialize, kinetic_energy, Rk4, SimConfig};
use crate::scalar::Real;

/// Largest relative energy drift a run may accumulate before it is aborted.
pub const ENERGY_DRIFT_BUDGET: f64 = 1e-4;

/// Positions, momenta and elapsed time.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState<T> {
    pub q: Vec<T>,
    pub p: Vec<T>,
    pub t: T,
}

impl<T: Real> PhaseState<T> {
    pub fn new(q: Vec<T>, p: Vec<T>) -> Self {
        assert_eq!(q.len(), p.len(), "positions and momenta must pair up");
        Self { q, p, t: T::zero() }
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// `(q, p) → (−q, −p)`; the dynamics commutes with this map.
    pub fn mirrored(&self) -> Self {
        Self {
            q: self.q.iter().map(|&x| -x).collect(),
            p: self.p.iter().map(|&x| -x).collect(),
            t: self.t,
        }
    }

    /// `p → −p` only.
    pub fn momentum_reversed(&self) -> Self {
        Self {
            q: self.q.clone(),
            p: self.p.iter().map(|&x| -x).collect(),
            t: self.t,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub t: T,
    pub state: PhaseState<T>,
    /// Number of particles with `q > 0`.
    pub right: usize,
    pub total_energy: T,
    pub kinetic_energy: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub config: SimConfig<T>,
    pub samples: Vec<Sample<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn right_counts(&self) -> Vec<usize> {
        self.samples.iter().map(|s| s.right).collect()
    }

    /// Largest `|E(t) − E(0)| / |E(0)|` over the samples.
    pub fn max_relative_energy_drift(&self) -> T {
        let Some(first) = self.samples.first() else {
            return T::zero();
        };
        let scale = first.total_energy.abs().max(T::min_positive_value());
        self.samples
            .iter()
            .map(|s| (s.total_energy - first.total_energy).abs() / scale)
            .fold(T::zero(), T::max)
    }
}

pub(crate) fn make_sample<T: Real>(state: &PhaseState<T>, cfg: &SimConfig<T>, potential: T) -> Sample<T> {
    let kinetic = kinetic_energy(&state.p, cfg.mass);
    Sample {
        t: state.t,
        state: state.clone(),
        right: count_right(state),
        total_energy: kinetic + potential,
        kinetic_energy: kinetic,
    }
}

/// Initializes from `cfg` and integrates `n_steps`, sampling every
/// `sample_stride` steps (step 0 included). Aborts when the relative energy
/// drift at a sample exceeds [`ENERGY_DRIFT_BUDGET`].
pub fn run<T: Real>(cfg: &SimConfig<T>) -> Result<Trajectory<T>> {
    cfg.validate()?;
    let mut state = initialize(cfg)?;
    let mut integrator = Rk4::new(cfg);
    let potential = integrator.field().potential_energy(&state.q)?;
    let first = make_sample(&state, cfg, potential);
    let e0 = first.total_energy;
    let scale = e0.abs().max(T::min_positive_value());
    let budget = T::lit(ENERGY_DRIFT_BUDGET);
    let capacity = (cfg.n_steps / cfg.sample_stride) as usize + 1;
    let mut samples = Vec::with_capacity(capacity);
    samples.push(first);
    for step in 1..=cfg.n_steps {
        integrator.advance(&mut state).map_err(|e| match e {
            Error::Blowup { .. } => Error::Blowup { step },
            other => other,
        })?;
        if step % cfg.sample_stride == 0 {
            state.t = T::from_u64(step).expect("step count representable") * cfg.dt;
            let potential = integrator.field().potential_energy(&state.q)?;
            let sample = make_sample(&state, cfg, potential);
            let drift = (sample.total_energy - e0).abs() / scale;
            if !(drift <= budget) {
                return Err(Error::EnergyDrift {
                    step,
                    drift: drift.as_f64(),
                    budget: ENERGY_DRIFT_BUDGET,
                });
            }
            samples.push(sample);
        }
    }
    Ok(Trajectory {
        config: cfg.clone(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimConfig<f64> {
        SimConfig {
            n_particles: 5,
            lj_sigma: 0.3,
            n_steps: 2_000,
            sample_stride: 50,
            seed: 9,
            ..SimConfig::default()
        }
    }

    #[test]
    fn zero_steps_gives_initial_sample_only() {
        let cfg = SimConfig { n_steps: 0, ..small() };
        let traj = run(&cfg).unwrap();
        assert_eq!(traj.len(), 1);
        assert_eq!(traj.samples[0].t, 0.0);
        assert_eq!(traj.samples[0].right, 0);
    }

    #[test]
    fn same_seed_same_bits() {
        let a = run(&small()).unwrap();
        let b = run(&small()).unwrap();
        assert_eq!(a, b);
        let c = run(&SimConfig { seed: 10, ..small() }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn times_strictly_increase() {
        let traj = run(&small()).unwrap();
        assert_eq!(traj.len(), 41);
        assert!(traj.samples.windows(2).all(|w| w[1].t > w[0].t));
        assert!(traj.samples.iter().all(|s| s.right <= 5));
    }

    #[test]
    fn drift_budget_aborts_coarse_runs() {
        let cfg = SimConfig {
            dt: 0.05,
            n_steps: 20_000,
            ..small()
        };
        assert!(matches!(run(&cfg), Err(Error::EnergyDrift { .. } | Error::Blowup { .. } | Error::Overlap { .. })));
    }
}
