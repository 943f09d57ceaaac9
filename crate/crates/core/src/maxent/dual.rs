use crate::ensemble::{DiscreteSystem, Distribution, ShellDecomposition};
use crate::error::{Error, Result};
use crate::maxent::{linalg, ConstraintSet};
use crate::scalar::Real;

#[derive(Debug, Clone)]
struct Group<T> {
    label: String,
    states: Vec<usize>,
    probability: T,
}

/// The exponential-family dual of a constrained entropy maximization.
///
/// States with `log_base = −∞` are outside the support and never receive mass.
/// With shells, each group `s` is normalized to its own probability `P_s`;
/// otherwise a single group with `P = 1` covers the support.
#[derive(Debug, Clone)]
pub struct DualProblem<T> {
    log_base: Vec<T>,
    features: Vec<Vec<T>>,
    targets: Vec<T>,
    names: Vec<String>,
    groups: Vec<Group<T>>,
}

/// Dual objective and derivatives at one multiplier vector.
#[derive(Debug, Clone)]
pub struct DualState<T> {
    /// `Σ_s P_s ln 𝒵_s(λ) + λ·f`.
    pub value: T,
    /// `f − ⟨F⟩_λ`.
    pub gradient: Vec<T>,
    /// `Σ_s P_s Cov_s(F)`, positive semidefinite.
    pub hessian: Vec<Vec<T>>,
    /// `ln 𝒵_s = ln Σ_{z∈s} b(z) e^{−λ·F(z)} − ln P_s`, per group.
    pub log_normalizers: Vec<(String, T)>,
    /// The tilted distribution over all states.
    pub probabilities: Vec<T>,
}

impl<T: Real> DualProblem<T> {
    /// `log_base` holds `ln b(z)` for an unnormalized base weight (`−∞` outside
    /// the support). Shell probabilities, when given, fix the mass of each shell.
    pub fn new(
        log_base: Vec<T>,
        sys: &DiscreteSystem<T>,
        constraints: &ConstraintSet<T>,
        shells: Option<&ShellDecomposition<T>>,
    ) -> Result<Self> {
        if log_base.len() != sys.len() {
            return Err(Error::DimensionMismatch {
                expected: sys.len(),
                got: log_base.len(),
            });
        }
        let features = constraints
            .resolve(sys)?
            .into_iter()
            .map(<[T]>::to_vec)
            .collect();
        let in_support = |z: &usize| log_base[*z] > T::neg_infinity();
        let groups = match shells {
            Some(shells) => {
                shells.check_system(sys)?;
                let mut groups = Vec::new();
                for shell in shells.shells() {
                    if shell.probability == T::zero() {
                        continue;
                    }
                    let states: Vec<usize> = shell.states.iter().copied().filter(in_support).collect();
                    if states.is_empty() {
                        return Err(Error::ZeroShellMass {
                            label: shell.label.clone(),
                        });
                    }
                    groups.push(Group {
                        label: shell.label.clone(),
                        states,
                        probability: shell.probability,
                    });
                }
                groups
            }
            None => {
                let states: Vec<usize> = (0..sys.len()).filter(in_support).collect();
                if states.is_empty() {
                    return Err(Error::ZeroShellMass {
                        label: "support".into(),
                    });
                }
                vec![Group {
                    label: String::new(),
                    states,
                    probability: T::one(),
                }]
            }
        };
        Ok(Self {
            log_base,
            features,
            targets: constraints.targets(),
            names: constraints.names(),
            groups,
        })
    }

    pub fn dimension(&self) -> usize {
        self.targets.len()
    }

    pub fn is_shellwise(&self) -> bool {
        self.groups.len() != 1 || !self.groups[0].label.is_empty()
    }

    pub(crate) fn log_base(&self) -> &[T] {
        &self.log_base
    }

    /// Feasible interval for each constrained observable under this family:
    /// `[Σ_s P_s min_s F, Σ_s P_s max_s F]` over the support.
    pub fn feasible_ranges(&self) -> Vec<(T, T)> {
        self.features
            .iter()
            .map(|f| {
                self.groups.iter().fold((T::zero(), T::zero()), |(lo, hi), g| {
                    let (mn, mx) = g.states.iter().fold(
                        (T::infinity(), T::neg_infinity()),
                        |(mn, mx), &z| (mn.min(f[z]), mx.max(f[z])),
                    );
                    (lo + g.probability * mn, hi + g.probability * mx)
                })
            })
            .collect()
    }

    /// Rejects targets outside the feasible ranges, and targets on their edge
    /// (the multiplier would run off to infinity).
    pub fn check_feasible(&self, tol: T) -> Result<()> {
        for ((name, &target), (lo, hi)) in self
            .names
            .iter()
            .zip(&self.targets)
            .zip(self.feasible_ranges())
        {
            let slack = tol * (T::one() + lo.abs().max(hi.abs()));
            if target < lo - slack || target > hi + slack {
                return Err(Error::Infeasible {
                    name: name.clone(),
                    target: target.as_f64(),
                    min: lo.as_f64(),
                    max: hi.as_f64(),
                });
            }
            if (target - lo).abs() <= slack || (target - hi).abs() <= slack {
                return Err(Error::BoundaryTarget {
                    name: name.clone(),
                    target: target.as_f64(),
                });
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, lambda: &[T]) -> DualState<T> {
        let k = self.dimension();
        assert_eq!(lambda.len(), k, "multiplier dimension");
        let mut probabilities = vec![T::zero(); self.log_base.len()];
        let mut mean = vec![T::zero(); k];
        let mut hessian = vec![vec![T::zero(); k]; k];
        let mut value: T = lambda.iter().zip(&self.targets).map(|(&l, &f)| l * f).sum();
        let mut log_normalizers = Vec::with_capacity(self.groups.len());

        let mut exponent = Vec::new();
        for g in &self.groups {
            exponent.clear();
            exponent.extend(g.states.iter().map(|&z| {
                let tilt: T = (0..k).map(|i| lambda[i] * self.features[i][z]).sum();
                self.log_base[z] - tilt
            }));
            let shift = exponent.iter().copied().fold(T::neg_infinity(), T::max);
            let mut total = T::zero();
            for a in exponent.iter_mut() {
                *a = (*a - shift).exp();
                total = total + *a;
            }
            let log_z = shift + total.ln() - g.probability.ln();
            value = value + g.probability * log_z;
            log_normalizers.push((g.label.clone(), log_z));

            let mut group_mean = vec![T::zero(); k];
            for (&z, &w) in g.states.iter().zip(exponent.iter()) {
                let p = w / total;
                probabilities[z] = g.probability * p;
                for i in 0..k {
                    group_mean[i] = group_mean[i] + p * self.features[i][z];
                }
            }
            for (&z, &w) in g.states.iter().zip(exponent.iter()) {
                let p = w / total;
                for i in 0..k {
                    let di = self.features[i][z] - group_mean[i];
                    for j in 0..=i {
                        let dj = self.features[j][z] - group_mean[j];
                        hessian[i][j] = hessian[i][j] + g.probability * p * di * dj;
                    }
                }
            }
            for i in 0..k {
                mean[i] = mean[i] + g.probability * group_mean[i];
            }
        }
        for i in 0..k {
            for j in 0..i {
                hessian[j][i] = hessian[i][j];
            }
        }
        let gradient = self.targets.iter().zip(&mean).map(|(&f, &m)| f - m).collect();
        DualState {
            value,
            gradient,
            hessian,
            log_normalizers,
            probabilities,
        }
    }

    /// Minimizes the dual by damped Newton with backtracking; singular
    /// Hessians fall back to a steepest-descent step. Returns the multipliers,
    /// the state there and the number of iterations taken.
    pub fn minimize(&self, tol: T, max_iter: usize) -> Result<(Vec<T>, DualState<T>, usize)> {
        let k = self.dimension();
        let mut lambda = vec![T::zero(); k];
        let mut state = self.evaluate(&lambda);
        let armijo = T::lit(1e-4);
        let half = T::lit(0.5);
        for iteration in 0..max_iter {
            if converged(&state.gradient, tol) {
                return Ok((lambda, state, iteration));
            }
            let neg_grad: Vec<T> = state.gradient.iter().map(|&g| -g).collect();
            let mut direction = linalg::solve(state.hessian.clone(), neg_grad.clone(), T::lit(1e-13))
                .filter(|d| d.iter().all(|x| x.is_finite()))
                .unwrap_or_else(|| neg_grad.clone());
            let mut slope: T = dot(&state.gradient, &direction);
            if slope >= T::zero() {
                direction = neg_grad;
                slope = dot(&state.gradient, &direction);
            }
            // Rounding floor for the objective comparison.
            let noise = T::epsilon() * T::lit(16.0) * (T::one() + state.value.abs());
            let old_norm = norm(&state.gradient);
            let mut step = T::one();
            loop {
                let trial: Vec<T> = lambda
                    .iter()
                    .zip(&direction)
                    .map(|(&l, &d)| l + step * d)
                    .collect();
                let trial_state = self.evaluate(&trial);
                let decrease_ok = trial_state.value.is_finite()
                    && trial_state.value <= state.value + armijo * step * slope + noise;
                let gradient_ok = norm(&trial_state.gradient) < old_norm;
                if decrease_ok || (step == T::one() && gradient_ok) {
                    lambda = trial;
                    state = trial_state;
                    break;
                }
                step = step * half;
                if step < T::lit(1e-20) {
                    return Err(Error::Divergent {
                        iterations: iteration,
                        gradient_norm: old_norm.as_f64(),
                    });
                }
            }
        }
        if converged(&state.gradient, tol) {
            Ok((lambda, state, max_iter))
        } else {
            Err(Error::Divergent {
                iterations: max_iter,
                gradient_norm: norm(&state.gradient).as_f64(),
            })
        }
    }
}

fn converged<T: Real>(gradient: &[T], tol: T) -> bool {
    norm(gradient) <= tol
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Dual value and gradient for a base distribution, optionally renormalized
/// inside the given shells.
pub fn dual_value_and_gradient<T: Real>(
    lambda: &[T],
    base: &Distribution<T>,
    sys: &DiscreteSystem<T>,
    constraints: &ConstraintSet<T>,
    shells: Option<&ShellDecomposition<T>>,
) -> Result<(T, Vec<T>)> {
    base.check_len(sys.len())?;
    if !lambda.iter().all(|l| l.is_finite()) {
        return Err(Error::Config("multipliers must be finite".into()));
    }
    let problem = DualProblem::new(
        base.probabilities().iter().map(|p| p.ln()).collect(),
        sys,
        constraints,
        shells,
    )?;
    if lambda.len() != problem.dimension() {
        return Err(Error::DimensionMismatch {
            expected: problem.dimension(),
            got: lambda.len(),
        });
    }
    let state = problem.evaluate(lambda);
    Ok((state.value, state.gradient))
}
