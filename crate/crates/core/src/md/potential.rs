use crate::error::{Error, Result};
use crate::md::{PhaseState, SimConfig};
use crate::scalar::Real;

/// `V(q) = B((q/q0)² − 1)²` and the force `−V'(q)`.
pub fn double_well_potential<T: Real>(q: T, barrier: T, q0: T) -> (T, T) {
    let x = q / q0;
    let s = x * x - T::one();
    let energy = barrier * s * s;
    let force = -T::lit(4.0) * barrier * s * x / q0;
    (energy, force)
}

/// Precomputed constants of the combined Lennard-Jones + double-well field.
#[derive(Debug, Clone)]
pub struct ForceField<T> {
    epsilon4: T,
    sigma: T,
    cutoff: T,
    shift: T,
    overlap: T,
    barrier: T,
    q0: T,
}

impl<T: Real> ForceField<T> {
    pub fn new(cfg: &SimConfig<T>) -> Self {
        let epsilon4 = T::lit(4.0) * cfg.lj_epsilon;
        let cutoff = cfg.lj_cutoff * cfg.lj_sigma;
        let sr6 = (cfg.lj_sigma / cutoff).powi(6);
        Self {
            epsilon4,
            sigma: cfg.lj_sigma,
            cutoff,
            shift: epsilon4 * (sr6 * sr6 - sr6),
            overlap: T::lit(1e-6) * cfg.lj_sigma,
            barrier: cfg.well_barrier_height,
            q0: cfg.well_minimum_position,
        }
    }

    /// Truncated-and-shifted pair energy and `−dV/dr` at separation `r`.
    #[inline]
    fn pair(&self, r: T) -> (T, T) {
        let sr2 = (self.sigma / r) * (self.sigma / r);
        let sr6 = sr2 * sr2 * sr2;
        let sr12 = sr6 * sr6;
        let energy = self.epsilon4 * (sr12 - sr6) - self.shift;
        let magnitude = self.epsilon4 * (T::lit(12.0) * sr12 - T::lit(6.0) * sr6) / r;
        (energy, magnitude)
    }

    /// Adds the pair forces to `forces` and returns the pair energy.
    pub fn lennard_jones(&self, q: &[T], forces: &mut [T]) -> Result<T> {
        let mut energy = T::zero();
        for i in 0..q.len() {
            for j in i + 1..q.len() {
                let d = q[j] - q[i];
                let r = d.abs();
                if r < self.overlap {
                    return Err(Error::Overlap {
                        i,
                        j,
                        separation: r.as_f64(),
                    });
                }
                if r >= self.cutoff {
                    continue;
                }
                let (e, magnitude) = self.pair(r);
                energy = energy + e;
                let f = if d > T::zero() { magnitude } else { -magnitude };
                forces[j] = forces[j] + f;
                forces[i] = forces[i] - f;
            }
        }
        Ok(energy)
    }

    /// Overwrites `forces` with the total force and returns the potential energy.
    pub fn evaluate(&self, q: &[T], forces: &mut [T]) -> Result<T> {
        let mut well = T::zero();
        for (f, &x) in forces.iter_mut().zip(q) {
            let (e, fw) = double_well_potential(x, self.barrier, self.q0);
            well = well + e;
            *f = fw;
        }
        Ok(well + self.lennard_jones(q, forces)?)
    }

    pub fn potential_energy(&self, q: &[T]) -> Result<T> {
        let mut scratch = vec![T::zero(); q.len()];
        self.evaluate(q, &mut scratch)
    }
}

/// Pairwise Lennard-Jones energy and forces alone (no external well).
pub fn lj_force_energy<T: Real>(q: &[T], cfg: &SimConfig<T>) -> Result<(T, Vec<T>)> {
    let mut forces = vec![T::zero(); q.len()];
    let energy = ForceField::new(cfg).lennard_jones(q, &mut forces)?;
    Ok((energy, forces))
}

pub fn kinetic_energy<T: Real>(p: &[T], mass: T) -> T {
    p.iter().map(|&x| x * x).sum::<T>() / (T::lit(2.0) * mass)
}

/// `Σ p²/2m + LJ + Σ V_well(q)`.
pub fn total_energy<T: Real>(state: &PhaseState<T>, cfg: &SimConfig<T>) -> Result<T> {
    Ok(kinetic_energy(&state.p, cfg.mass) + ForceField::new(cfg).potential_energy(&state.q)?)
}
