//! Shipped example inputs and seeded generators of random instances, used by
//! the test suites and by `relent verify`.

use rand::Rng;
use rand_distr::{Distribution as _, Exp1, StandardNormal};

use crate::ensemble::{shell_marginal, DiscreteSystem, Distribution, ShellDecomposition};
use crate::error::Result;
use crate::maxent::ConstraintSet;
use crate::scalar::Real;

/// Text fixtures shipped with the crate, as `(file name, contents)`.
pub const SHIPPED: &[(&str, &str)] = &[
    ("two_state.system", include_str!("../fixtures/two_state.system")),
    ("two_state.constraints", include_str!("../fixtures/two_state.constraints")),
    ("shells12.system", include_str!("../fixtures/shells12.system")),
    ("shells12.constraints", include_str!("../fixtures/shells12.constraints")),
    ("shells12.base", include_str!("../fixtures/shells12.base")),
];

pub fn shipped(name: &str) -> Option<&'static str> {
    SHIPPED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// A system with invariant shells, constraints that are jointly feasible with
/// the shell probabilities, and the distribution that witnesses feasibility.
#[derive(Debug, Clone)]
pub struct ShellInstance<T> {
    pub system: DiscreteSystem<T>,
    pub shells: ShellDecomposition<T>,
    pub constraints: ConstraintSet<T>,
    pub witness: Distribution<T>,
}

fn lit<T: Real>(x: f64) -> T {
    T::lit(x)
}

/// Positive weights `e^{s·g}` with standard normal `g`, normalized.
fn random_positive<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, spread: f64) -> Vec<T> {
    let w: Vec<f64> = (0..n)
        .map(|_| {
            let g: f64 = StandardNormal.sample(rng);
            (spread * g).exp()
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| lit(x / total)).collect()
}

/// Random system with `n_states` states spread over `n_shells` nonempty
/// shells `I0, I1, ...`, measures in `[0.5, 2]` and observables `F1, F2, ...`
/// drawn from a standard normal.
pub fn random_system<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    n_states: usize,
    n_shells: usize,
    n_observables: usize,
) -> Result<DiscreteSystem<T>> {
    let n_shells = n_shells.clamp(1, n_states.max(1));
    let labels: Vec<String> = (0..n_states)
        .map(|z| {
            let shell = if z < n_shells { z } else { rng.random_range(0..n_shells) };
            format!("I{shell}")
        })
        .collect();
    let measure: Vec<T> = (0..n_states).map(|_| lit(rng.random_range(0.5..2.0))).collect();
    let mut sys = DiscreteSystem::new((0..n_states).map(|z| format!("z{z}")), measure, labels)?;
    for k in 0..n_observables {
        let values = (0..n_states)
            .map(|_| lit(StandardNormal.sample(rng)))
            .collect();
        sys.add_observable(format!("F{}", k + 1), values)?;
    }
    Ok(sys)
}

/// Random instance with at most the given sizes. Targets and shell
/// probabilities are the moments of a random full-support witness, so both
/// shell-aware routes are feasible. Every shell keeps more states than
/// constraints so the multipliers stay identifiable.
pub fn shell_instance<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    max_states: usize,
    max_shells: usize,
    max_constraints: usize,
) -> Result<ShellInstance<T>> {
    let n_constraints = rng.random_range(1..=max_constraints.max(1));
    let n_shells = rng.random_range(1..=max_shells.max(1));
    let min_states = n_shells * (n_constraints + 1);
    let n_states = rng.random_range(min_states.min(max_states)..=max_states.max(min_states));
    let labels: Vec<String> = (0..n_states)
        .map(|z| {
            let shell = if z < min_states { z % n_shells } else { rng.random_range(0..n_shells) };
            format!("I{shell}")
        })
        .collect();
    let measure: Vec<T> = (0..n_states).map(|_| lit(rng.random_range(0.5..2.0))).collect();
    let mut system = DiscreteSystem::new((0..n_states).map(|z| format!("z{z}")), measure, labels)?;
    for k in 0..n_constraints {
        let values = (0..n_states).map(|_| lit(StandardNormal.sample(rng))).collect();
        system.add_observable(format!("F{}", k + 1), values)?;
    }
    let witness = Distribution::from_weights(random_positive(rng, n_states, 1.0))?;
    let shells = shell_marginal(&witness, &system)?;
    let constraints = ConstraintSet::new(
        system
            .observable_names()
            .iter()
            .map(|n| Ok((n.clone(), witness.expectation(system.observable(n)?)?)))
            .collect::<Result<Vec<_>>>()?,
    )?;
    Ok(ShellInstance {
        system,
        shells,
        constraints,
        witness,
    })
}

/// Random `(ρ, shells)` pair. `ρ` has exact zeros on roughly a fifth of the
/// states; every shell has positive probability.
pub fn decomposition_pair<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    max_states: usize,
    max_shells: usize,
) -> Result<(DiscreteSystem<T>, Distribution<T>, ShellDecomposition<T>)> {
    let n_states = rng.random_range(2..=max_states.max(2));
    let n_shells = rng.random_range(1..=max_shells.max(1).min(n_states));
    let sys = random_system::<T, R>(rng, n_states, n_shells, 0)?;
    let mut w: Vec<f64> = (0..n_states)
        .map(|_| if rng.random_bool(0.2) { 0.0 } else { Exp1.sample(rng) })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[0] = 1.0;
    }
    let rho = Distribution::from_weights(w.into_iter().map(lit).collect())?;
    let p: Vec<T> = random_positive(rng, sys.shell_count(), 1.0);
    let labels = sys.labels().to_vec();
    let shells = ShellDecomposition::with_probabilities(&sys, labels.iter().map(String::as_str).zip(p))?;
    Ok((sys, rho, shells))
}

/// A system, a reservoir and their product with `H = H_S + H_R`.
#[derive(Debug, Clone)]
pub struct Composite<T> {
    /// Observables `H` and `A`.
    pub system: DiscreteSystem<T>,
    /// Observable `H`.
    pub reservoir: DiscreteSystem<T>,
    /// Observables `S.H`, `S.A`, `R.H` and the total `energy`. State
    /// `s·reservoir.len() + r` pairs system state `s` with reservoir state `r`.
    pub product: DiscreteSystem<T>,
}

/// Deterministic fixture: 8 system states with irregular levels and a second
/// observable, 32 reservoir levels, unit measure everywhere.
pub fn composite() -> Result<Composite<f64>> {
    let h_s: Vec<f64> = (0..8).map(|k| 0.5 * k as f64 + 0.13 * ((k * k) % 5) as f64).collect();
    let a: Vec<f64> = (0..8).map(|k| (1.7 * k as f64).sin()).collect();
    let system = DiscreteSystem::new((0..8).map(|k| format!("s{k}")), vec![1.0; 8], ["S"; 8])?
        .with_observable("H", h_s)?
        .with_observable("A", a)?;
    let h_r: Vec<f64> = (0..32).map(|k| 0.25 * k as f64 + 0.05 * ((3 * k) % 7) as f64).collect();
    let reservoir = DiscreteSystem::new((0..32).map(|k| format!("r{k}")), vec![1.0; 32], ["R"; 32])?
        .with_observable("H", h_r)?;
    let mut product = system.product(&reservoir, "S.", "R.")?;
    let total: Vec<f64> = product
        .observable("S.H")?
        .iter()
        .zip(product.observable("R.H")?)
        .map(|(a, b)| a + b)
        .collect();
    product.add_observable("energy", total)?;
    Ok(Composite {
        system,
        reservoir,
        product,
    })
}
