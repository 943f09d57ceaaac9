use crate::ensemble::{
    equilibrium_from_invariants, shell_marginal, DiscreteSystem, Distribution, EntropyConfig,
    ShellDecomposition,
};
use crate::error::{Error, Result};
use crate::maxent::{ConstraintSet, DualProblem, DualState};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    /// Absolute constraint residual (and dual gradient norm) at convergence.
    pub tolerance: T,
    pub max_iter: usize,
    /// Observable whose multiplier is reported as `β`.
    pub energy_observable: Option<String>,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            tolerance: T::SOLVER_TOL,
            max_iter: 200,
            energy_observable: Some("energy".into()),
        }
    }
}

/// Which maximization produced a [`RelevantDistribution`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Gibbs-Jaynes entropy, global normalization.
    GibbsJaynes,
    /// Relative entropy from a base, global normalization.
    Relative,
    /// Relative entropy from a base, one normalizer per invariant shell.
    RelativeShellwise,
    /// Gibbs-Jaynes entropy with the shell probabilities imposed.
    JaynesInvariant,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LogNormalizer<T> {
    /// `ln Z`.
    Global(T),
    /// `ln 𝒵(i)` for every shell with nonzero probability.
    PerShell(Vec<(String, T)>),
}

/// Solved multipliers. The exponent is `−Σ λ_k F_k` on every route.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierVector<T> {
    pub names: Vec<String>,
    pub lambda: Vec<T>,
    /// The multiplier of the energy observable, if it was constrained.
    pub beta: Option<T>,
    pub log_normalizer: LogNormalizer<T>,
}

impl<T: Real> MultiplierVector<T> {
    pub fn get(&self, name: &str) -> Option<T> {
        self.names.iter().position(|n| n == name).map(|i| self.lambda[i])
    }

    /// `μ = ln Z − 1` for globally normalized routes.
    pub fn mu(&self) -> Option<T> {
        match &self.log_normalizer {
            LogNormalizer::Global(log_z) => Some(*log_z - T::one()),
            LogNormalizer::PerShell(_) => None,
        }
    }
}

/// The least-biased distribution compatible with a set of constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct RelevantDistribution<T> {
    pub route: Route,
    /// Reference ensemble; uniform in measure on the plain Gibbs-Jaynes route.
    pub base: Distribution<T>,
    pub multipliers: MultiplierVector<T>,
    pub result: Distribution<T>,
    pub targets: Vec<T>,
    pub dual_iterations: usize,
    /// Largest absolute constraint residual of `result`.
    pub residual_norm: T,
    shell_probabilities: Vec<T>,
    base_log_weight: Vec<T>,
}

/// Maximizes `S[ρ]` subject to the constraints: `ρ̄ ∝ m(z) e^{−Σ λ_k F_k}`.
pub fn solve_gibbs_jaynes<T: Real>(
    sys: &DiscreteSystem<T>,
    constraints: &ConstraintSet<T>,
    cfg: &SolverConfig<T>,
) -> Result<RelevantDistribution<T>> {
    let log_m: Vec<T> = sys.measure().iter().map(|m| m.ln()).collect();
    let problem = DualProblem::new(log_m, sys, constraints, None)?;
    let base = Distribution::uniform_in_measure(sys);
    solve(problem, Route::GibbsJaynes, base, sys, constraints, cfg, false)
}

/// Maximizes `ΔS[ρ]` relative to `base`: `ρ̄ ∝ base(z) e^{−Σ λ_k F_k}`.
pub fn solve_relative<T: Real>(
    base: &Distribution<T>,
    sys: &DiscreteSystem<T>,
    constraints: &ConstraintSet<T>,
    cfg: &SolverConfig<T>,
) -> Result<RelevantDistribution<T>> {
    base.check_len(sys.len())?;
    let problem = DualProblem::new(log_weights(base), sys, constraints, None)?;
    solve(problem, Route::Relative, base.clone(), sys, constraints, cfg, true)
}

/// Relative-entropy route that also keeps every invariant shell at the
/// probability `base` gives it: `ρ̄(z) = base(z) e^{−Σ λ_k F_k(z)} / 𝒵(I(z))`.
pub fn solve_relative_shellwise<T: Real>(
    base: &Distribution<T>,
    sys: &DiscreteSystem<T>,
    constraints: &ConstraintSet<T>,
    cfg: &SolverConfig<T>,
) -> Result<RelevantDistribution<T>> {
    let shells = shell_marginal(base, sys)?;
    if let Some(empty) = shells.shells().iter().find(|s| s.probability <= T::zero()) {
        return Err(Error::ZeroShellMass {
            label: empty.label.clone(),
        });
    }
    let problem = DualProblem::new(log_weights(base), sys, constraints, Some(&shells))?;
    solve(problem, Route::RelativeShellwise, base.clone(), sys, constraints, cfg, true)
}

/// Gibbs-Jaynes route with the shell probabilities `P(i)` imposed as
/// constraints: `ρ̄(z) = P(I(z)) m(z) e^{−Σ λ_k F_k(z)} / Σ_{z'∈I(z)} m e^{−Σ λ_k F_k}`.
pub fn solve_jaynes_invariant_constrained<T: Real>(
    sys: &DiscreteSystem<T>,
    shells: &ShellDecomposition<T>,
    constraints: &ConstraintSet<T>,
    cfg: &SolverConfig<T>,
) -> Result<RelevantDistribution<T>> {
    let log_m: Vec<T> = sys.measure().iter().map(|m| m.ln()).collect();
    let problem = DualProblem::new(log_m, sys, constraints, Some(shells))?;
    let base = equilibrium_from_invariants(shells, sys)?;
    solve(problem, Route::JaynesInvariant, base, sys, constraints, cfg, false)
}

fn log_weights<T: Real>(base: &Distribution<T>) -> Vec<T> {
    base.probabilities()
        .iter()
        .map(|&p| if p > T::zero() { p.ln() } else { T::neg_infinity() })
        .collect()
}

fn solve<T: Real>(
    problem: DualProblem<T>,
    route: Route,
    base: Distribution<T>,
    sys: &DiscreteSystem<T>,
    constraints: &ConstraintSet<T>,
    cfg: &SolverConfig<T>,
    zero_tilt_is_base: bool,
) -> Result<RelevantDistribution<T>> {
    problem.check_feasible(cfg.tolerance)?;
    let (lambda, state, iterations) = problem.minimize(cfg.tolerance, cfg.max_iter)?;
    let DualState {
        log_normalizers,
        probabilities,
        ..
    } = state;

    let result = if zero_tilt_is_base && lambda.iter().all(|&l| l == T::zero()) {
        base.clone()
    } else {
        Distribution::new(probabilities)?
    };

    let features = constraints.resolve(sys)?;
    let targets = constraints.targets();
    let mut residual_norm = T::zero();
    for (f, &target) in features.iter().zip(&targets) {
        residual_norm = residual_norm.max((result.expectation(f)? - target).abs());
    }
    if residual_norm > cfg.tolerance {
        return Err(Error::Divergent {
            iterations,
            gradient_norm: residual_norm.as_f64(),
        });
    }

    let names = constraints.names();
    let beta = cfg
        .energy_observable
        .as_deref()
        .and_then(|e| names.iter().position(|n| n == e))
        .map(|i| lambda[i]);
    let shellwise = problem.is_shellwise();
    let shell_probabilities = if shellwise {
        let shells = shell_marginal(&result, sys)?;
        log_normalizers
            .iter()
            .map(|(label, _)| shells.get(label).map_or(T::zero(), |s| s.probability))
            .collect()
    } else {
        vec![T::one()]
    };
    let log_normalizer = if shellwise {
        LogNormalizer::PerShell(log_normalizers)
    } else {
        LogNormalizer::Global(log_normalizers[0].1)
    };
    Ok(RelevantDistribution {
        route,
        base,
        multipliers: MultiplierVector {
            names,
            lambda,
            beta,
            log_normalizer,
        },
        result,
        targets,
        dual_iterations: iterations,
        residual_norm,
        shell_probabilities,
        base_log_weight: problem.log_base().to_vec(),
    })
}

/// Entropy of the solution from its multipliers,
/// `k_B (Σ_s P_s ln 𝒵_s + Σ_k λ_k f_k − Σ_z ρ̄ ln(b/m))`, where `b` is the
/// unnormalized base weight. On the Gibbs-Jaynes route `b = m` and this is
/// `k_B (ln Z + Σ λ_k f_k)`, with `β E` included when energy is constrained.
pub fn entropy_at_solution<T: Real>(
    rel: &RelevantDistribution<T>,
    sys: &DiscreteSystem<T>,
    cfg: &EntropyConfig<T>,
) -> Result<T> {
    rel.result.check_len(sys.len())?;
    let normalizer = match &rel.multipliers.log_normalizer {
        LogNormalizer::Global(log_z) => *log_z,
        LogNormalizer::PerShell(per_shell) => per_shell
            .iter()
            .zip(&rel.shell_probabilities)
            .map(|((_, log_z), &p)| p * *log_z)
            .sum(),
    };
    let tilt: T = rel
        .multipliers
        .lambda
        .iter()
        .zip(&rel.targets)
        .map(|(&l, &f)| l * f)
        .sum();
    let cross: T = rel
        .result
        .probabilities()
        .iter()
        .zip(&rel.base_log_weight)
        .zip(sys.measure())
        .filter(|((&p, _), _)| p > T::zero())
        .map(|((&p, &lb), &m)| p * (lb - m.ln()))
        .sum();
    Ok(cfg.k_b() * (normalizer + tilt - cross))
}
