use crate::error::{Error, Result};
use crate::md::{PhaseState, Trajectory};
use crate::scalar::Real;

/// `F(z) = Σ θ(q_i)` with `θ(0) = 0`.
pub fn count_right<T: Real>(state: &PhaseState<T>) -> usize {
    state.q.iter().filter(|&&x| x > T::zero()).count()
}

/// Which particles enter a kinetic temperature average.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideFilter {
    All,
    /// `q ≤ 0`.
    Left,
    /// `q > 0`.
    Right,
}

impl std::fmt::Display for SideFilter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SideFilter::All => "all",
            SideFilter::Left => "left",
            SideFilter::Right => "right",
        })
    }
}

impl SideFilter {
    fn keeps<T: Real>(self, q: T) -> bool {
        match self {
            SideFilter::All => true,
            SideFilter::Left => q <= T::zero(),
            SideFilter::Right => q > T::zero(),
        }
    }
}

/// Per-sample kinetic temperature `(1/n) Σ p²/m` (1D equipartition, `k_B = 1`)
/// over the selected particles; samples selecting nobody are skipped.
pub fn kinetic_temperature_series<T: Real>(traj: &Trajectory<T>, filter: SideFilter) -> Vec<T> {
    let mass = traj.config.mass;
    traj.samples
        .iter()
        .filter_map(|s| {
            let (sum, n) = s
                .state
                .q
                .iter()
                .zip(&s.state.p)
                .filter(|(&q, _)| filter.keeps(q))
                .fold((T::zero(), 0usize), |(acc, n), (_, &p)| (acc + p * p / mass, n + 1));
            (n > 0).then(|| sum / T::from_usize_lossy(n))
        })
        .collect()
}

/// Time mean and standard deviation of the kinetic temperature.
pub fn kinetic_temperature<T: Real>(traj: &Trajectory<T>, filter: SideFilter) -> Result<(T, T)> {
    if traj.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            have: traj.len(),
        });
    }
    let series = kinetic_temperature_series(traj, filter);
    if series.is_empty() {
        return Err(Error::EmptyFilter(filter.to_string()));
    }
    let n = T::from_usize_lossy(series.len());
    let mean = series.iter().copied().sum::<T>() / n;
    let var = if series.len() > 1 {
        series.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>() / (n - T::one())
    } else {
        T::zero()
    };
    Ok((mean, var.sqrt()))
}

/// `L̂F = Σ δ(q_i) p_i/m` with `δ` replaced by a unit-mass Gaussian of width `eps`.
pub fn liouville_f<T: Real>(state: &PhaseState<T>, mass: T, eps: T) -> T {
    let norm = T::one() / (eps * T::TAU().sqrt());
    let inv_two_var = T::one() / (T::lit(2.0) * eps * eps);
    state
        .q
        .iter()
        .zip(&state.p)
        .map(|(&q, &p)| norm * (-(q * q) * inv_two_var).exp() * p / mass)
        .sum()
}
