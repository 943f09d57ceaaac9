use crate::error::{Error, Result};
use crate::md::{liouville_f, Trajectory};
use crate::scalar::Real;

/// Settings shared by the multiplier solve and the drift estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct ReweightConfig<T> {
    /// Width of the Gaussian standing in for `δ(q)`.
    pub eps: T,
    /// Accepted `|⟨F⟩_λ − target|`.
    pub lambda_tolerance: T,
    pub lambda_bracket: (T, T),
    pub bootstrap_resamples: usize,
    /// Block length of the moving-block bootstrap, in samples.
    pub block_length: usize,
    /// Root seed of the bootstrap streams.
    pub seed: u64,
}

impl<T: Real> ReweightConfig<T> {
    /// Defaults with `eps = 0.05·q0`.
    pub fn for_well(well_minimum_position: T) -> Self {
        Self {
            eps: T::lit(0.05) * well_minimum_position.abs(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.lambda_bracket;
        let problem = if !(self.eps > T::zero() && self.eps.is_finite()) {
            Some(format!("eps must be positive, got {}", self.eps))
        } else if !(self.lambda_tolerance > T::zero()) {
            Some(format!("lambda_tolerance must be positive, got {}", self.lambda_tolerance))
        } else if !(lo <= T::zero() && T::zero() <= hi && lo.is_finite() && hi.is_finite()) {
            Some(format!("lambda bracket [{lo}, {hi}] must be finite and contain 0"))
        } else if self.bootstrap_resamples < 2 {
            Some("bootstrap_resamples must be at least 2".to_string())
        } else if self.block_length == 0 {
            Some("block_length must be positive".to_string())
        } else {
            None
        };
        problem.map_or(Ok(()), |m| Err(Error::Config(m)))
    }
}

impl<T: Real> Default for ReweightConfig<T> {
    fn default() -> Self {
        Self {
            eps: T::lit(0.15),
            lambda_tolerance: T::lit(1e-8),
            lambda_bracket: (T::lit(-50.0), T::lit(50.0)),
            bootstrap_resamples: 200,
            block_length: 100,
            seed: 0,
        }
    }
}

/// The per-sample quantities the reweighted estimators need: `F` and the
/// kernel-regularized `L̂F`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet<T> {
    f: Vec<T>,
    flux: Vec<T>,
}

impl<T: Real> SampleSet<T> {
    pub fn from_trajectory(traj: &Trajectory<T>, cfg: &ReweightConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let mass = traj.config.mass;
        Ok(Self {
            f: traj.samples.iter().map(|s| T::from_usize_lossy(s.right)).collect(),
            flux: traj.samples.iter().map(|s| liouville_f(&s.state, mass, cfg.eps)).collect(),
        })
    }

    pub fn from_parts(f: Vec<T>, flux: Vec<T>) -> Result<Self> {
        if f.len() != flux.len() {
            return Err(Error::DimensionMismatch {
                expected: f.len(),
                got: flux.len(),
            });
        }
        if let Some(index) = f.iter().chain(&flux).position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteObservable {
                name: if index < f.len() { "F" } else { "LF" }.to_string(),
                index: index % f.len().max(1),
            });
        }
        Ok(Self { f, flux })
    }

    /// Every sample followed by its momentum-reversed copy. `F` depends on
    /// positions only and `L̂F` is odd in the momenta, so the pair contributes
    /// equal weights and opposite fluxes.
    pub fn momentum_symmetrized(&self) -> Self {
        let mut f = Vec::with_capacity(2 * self.len());
        let mut flux = Vec::with_capacity(2 * self.len());
        for (&fj, &xj) in self.f.iter().zip(&self.flux) {
            f.extend([fj, fj]);
            flux.extend([xj, -xj]);
        }
        Self { f, flux }
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn f(&self) -> &[T] {
        &self.f
    }

    pub fn flux(&self) -> &[T] {
        &self.flux
    }

    pub fn f_range(&self) -> Option<(T, T)> {
        let first = *self.f.first()?;
        Some(self.f.iter().fold((first, first), |(lo, hi), &x| (lo.min(x), hi.max(x))))
    }

    pub fn mean_f(&self) -> T {
        self.f.iter().copied().sum::<T>() / T::from_usize_lossy(self.len().max(1))
    }
}
