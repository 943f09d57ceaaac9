use crate::ensemble::{DiscreteSystem, Distribution};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// One invariant shell `I(z) = i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Shell<T> {
    pub label: String,
    pub states: Vec<usize>,
    /// `Ω(i)`, the total reference measure of the shell.
    pub measure: T,
    /// `P(i)`.
    pub probability: T,
}

impl<T: Real> Shell<T> {
    /// `Φ(i) = P(i)/Ω(i)`, the equilibrium density on the shell.
    pub fn density(&self) -> T {
        self.probability / self.measure
    }
}

/// Partition of a system's states into invariant shells, each carrying a probability.
/// Shells appear in the order of [`DiscreteSystem::labels`].
#[derive(Debug, Clone, PartialEq)]
pub struct ShellDecomposition<T> {
    shells: Vec<Shell<T>>,
    n_states: usize,
}

impl<T: Real> ShellDecomposition<T> {
    /// Builds the decomposition of `sys` with the given shell probabilities.
    /// Labels absent from `probabilities` get zero; labels unknown to `sys`
    /// must carry zero probability.
    pub fn with_probabilities<'a>(
        sys: &DiscreteSystem<T>,
        probabilities: impl IntoIterator<Item = (&'a str, T)>,
    ) -> Result<Self> {
        let mut out = Self::skeleton(sys);
        for (label, p) in probabilities {
            if !(p.is_finite() && p >= T::zero()) {
                return Err(Error::Config(format!(
                    "shell `{label}` has invalid probability {p}"
                )));
            }
            match out.shells.iter_mut().find(|s| s.label == label) {
                Some(shell) => shell.probability = p,
                None if p == T::zero() => {}
                None => {
                    return Err(Error::EmptyShell {
                        label: label.to_owned(),
                        probability: p.as_f64(),
                    })
                }
            }
        }
        let sum: T = out.shells.iter().map(|s| s.probability).sum();
        if (sum - T::one()).abs() > T::NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum: sum.as_f64() });
        }
        Ok(out)
    }

    fn skeleton(sys: &DiscreteSystem<T>) -> Self {
        let mut shells: Vec<Shell<T>> = sys
            .labels()
            .iter()
            .map(|label| Shell {
                label: label.clone(),
                states: Vec::new(),
                measure: T::zero(),
                probability: T::zero(),
            })
            .collect();
        for (z, (&s, &m)) in sys.shell_indices().iter().zip(sys.measure()).enumerate() {
            shells[s].states.push(z);
            shells[s].measure = shells[s].measure + m;
        }
        Self {
            shells,
            n_states: sys.len(),
        }
    }

    pub fn shells(&self) -> &[Shell<T>] {
        &self.shells
    }

    pub fn len(&self) -> usize {
        self.shells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shells.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<&Shell<T>> {
        self.shells.iter().find(|s| s.label == label)
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.shells.iter().map(|s| s.probability).collect()
    }

    pub(crate) fn check_system(&self, sys: &DiscreteSystem<T>) -> Result<()> {
        if self.n_states != sys.len() || self.shells.len() != sys.shell_count() {
            return Err(Error::DimensionMismatch {
                expected: sys.len(),
                got: self.n_states,
            });
        }
        Ok(())
    }
}

/// `P(i) = Σ_{z: I(z)=i} ρ(z)` together with `Ω(i)`.
pub fn shell_marginal<T: Real>(
    rho: &Distribution<T>,
    sys: &DiscreteSystem<T>,
) -> Result<ShellDecomposition<T>> {
    rho.check_len(sys.len())?;
    let mut out = ShellDecomposition::skeleton(sys);
    for shell in &mut out.shells {
        shell.probability = shell.states.iter().map(|&z| rho[z]).sum();
    }
    Ok(out)
}

/// `ρ_eq(z) = m(z) P(I(z)) / Ω(I(z))`: uniform in measure inside every shell.
pub fn equilibrium_from_invariants<T: Real>(
    shells: &ShellDecomposition<T>,
    sys: &DiscreteSystem<T>,
) -> Result<Distribution<T>> {
    shells.check_system(sys)?;
    let mut p = vec![T::zero(); sys.len()];
    for shell in shells.shells() {
        if shell.states.is_empty() {
            if shell.probability > T::zero() {
                return Err(Error::EmptyShell {
                    label: shell.label.clone(),
                    probability: shell.probability.as_f64(),
                });
            }
            continue;
        }
        let density = shell.density();
        for &z in &shell.states {
            p[z] = sys.measure()[z] * density;
        }
    }
    Distribution::new(p)
}
