use crate::ensemble::{equilibrium_from_invariants, shell_marginal, DiscreteSystem, Distribution, ShellDecomposition};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Boltzmann's constant in the caller's units; 1 in reduced units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyConfig<T> {
    k_b: T,
}

impl<T: Real> EntropyConfig<T> {
    pub fn new(k_b: T) -> Result<Self> {
        if k_b.is_finite() && k_b > T::zero() {
            Ok(Self { k_b })
        } else {
            Err(Error::Config(format!("k_B must be positive, got {k_b}")))
        }
    }

    pub fn k_b(&self) -> T {
        self.k_b
    }
}

impl<T: Real> Default for EntropyConfig<T> {
    fn default() -> Self {
        Self { k_b: T::one() }
    }
}

/// `S[ρ] = −k_B Σ ρ ln(ρ/m)`, with `0 ln 0 = 0`.
pub fn gibbs_jaynes_entropy<T: Real>(
    rho: &Distribution<T>,
    sys: &DiscreteSystem<T>,
    cfg: &EntropyConfig<T>,
) -> Result<T> {
    rho.check_len(sys.len())?;
    let s: T = rho
        .probabilities()
        .iter()
        .zip(sys.measure())
        .filter(|(&p, _)| p > T::zero())
        .map(|(&p, &m)| p * (p / m).ln())
        .sum();
    Ok(-cfg.k_b() * s)
}

/// `D(ρ‖ρ') = Σ ρ ln(ρ/ρ')`. Fails when ρ puts mass where ρ' has none.
pub fn kl_divergence<T: Real>(rho: &Distribution<T>, rho_ref: &Distribution<T>) -> Result<T> {
    rho.check_len(rho_ref.len())?;
    let mut d = T::zero();
    for (index, (&p, &q)) in rho
        .probabilities()
        .iter()
        .zip(rho_ref.probabilities())
        .enumerate()
    {
        if p == T::zero() {
            continue;
        }
        if q == T::zero() {
            return Err(Error::AbsoluteContinuity { index });
        }
        d = d + p * (p / q).ln();
    }
    // Gibbs' inequality; negative values are rounding noise.
    Ok(d.max(T::zero()))
}

/// `ΔS[ρ] = −k_B D(ρ‖ρ_eq)`; nonpositive, zero only at equilibrium.
pub fn relative_entropy<T: Real>(
    rho: &Distribution<T>,
    rho_eq: &Distribution<T>,
    cfg: &EntropyConfig<T>,
) -> Result<T> {
    Ok(-cfg.k_b() * kl_divergence(rho, rho_eq)?)
}

/// `ΔS[ρ] − S[ρ] − k_B Σ_i P̃(i) ln(P(i)/Ω(i))`, where `P̃` is the shell
/// marginal of `rho` and `P`, `Ω` belong to the equilibrium shells. The
/// identity holds for any `rho`, so the result is rounding noise.
pub fn entropy_decomposition_residual<T: Real>(
    rho: &Distribution<T>,
    rho_eq_shells: &ShellDecomposition<T>,
    sys: &DiscreteSystem<T>,
    cfg: &EntropyConfig<T>,
) -> Result<T> {
    let rho_eq = equilibrium_from_invariants(rho_eq_shells, sys)?;
    let delta_s = relative_entropy(rho, &rho_eq, cfg)?;
    let s = gibbs_jaynes_entropy(rho, sys, cfg)?;
    let marginal = shell_marginal(rho, sys)?;
    let mut shell_term = T::zero();
    for (own, eq) in marginal.shells().iter().zip(rho_eq_shells.shells()) {
        if own.probability > T::zero() {
            shell_term = shell_term + own.probability * (eq.probability / eq.measure).ln();
        }
    }
    Ok(delta_s - s - cfg.k_b() * shell_term)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_sys(n: usize) -> DiscreteSystem<f64> {
        DiscreteSystem::uniform(n)
    }

    #[test]
    fn uniform_two_state_entropy_is_ln2() {
        let rho = Distribution::new(vec![0.5, 0.5]).unwrap();
        let s = gibbs_jaynes_entropy(&rho, &uniform_sys(2), &EntropyConfig::default()).unwrap();
        assert!((s - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn point_mass_has_zero_entropy() {
        let rho = Distribution::point(4, 2);
        let s = gibbs_jaynes_entropy(&rho, &uniform_sys(4), &EntropyConfig::default()).unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn weighted_measure_entropy() {
        // ρ/m = 1/4 on every state, so S = ln 4.
        let sys = DiscreteSystem::<f64>::new(["a", "b", "c"], vec![2.0, 1.0, 1.0], ["x"; 3]).unwrap();
        let rho = Distribution::new(vec![0.5, 0.25, 0.25]).unwrap();
        let s = gibbs_jaynes_entropy(&rho, &sys, &EntropyConfig::default()).unwrap();
        assert!((s - 1.386_294_361_119_890_6).abs() < 1e-14);
    }

    #[test]
    fn kl_closed_forms() {
        let a = Distribution::new(vec![1.0, 0.0]).unwrap();
        let b = Distribution::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(kl_divergence(&b, &b).unwrap(), 0.0);
        assert!((kl_divergence(&a, &b).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(matches!(
            kl_divergence(&b, &a),
            Err(Error::AbsoluteContinuity { index: 1 })
        ));
    }

    #[test]
    fn relative_entropy_is_linear_in_kb() {
        let a = Distribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let b = Distribution::new(vec![0.25; 4]).unwrap();
        let one = relative_entropy(&a, &b, &EntropyConfig::default()).unwrap();
        let two = relative_entropy(&a, &b, &EntropyConfig::new(2.0).unwrap()).unwrap();
        assert!(one < 0.0);
        assert_eq!(two, 2.0 * one);
        assert_eq!(relative_entropy(&b, &b, &EntropyConfig::default()).unwrap(), 0.0);
        // Direct summation: Σ ρ ln(4ρ).
        let expect = -(0.1 * 0.4_f64.ln() + 0.2 * 0.8_f64.ln() + 0.3 * 1.2_f64.ln() + 0.4 * 1.6_f64.ln());
        assert!((one - expect).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let rho = Distribution::new(vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            gibbs_jaynes_entropy(&rho, &uniform_sys(3), &EntropyConfig::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kb_must_be_positive() {
        assert!(EntropyConfig::new(0.0_f64).is_err());
        assert!(EntropyConfig::new(-1.0_f64).is_err());
    }
}
