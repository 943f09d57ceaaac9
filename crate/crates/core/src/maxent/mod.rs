//! Lagrange multipliers for maximum-entropy problems on discrete systems.
//!
//! Every route reduces to the same exponential family: a base weight `b(z)`
//! tilted by `exp(−Σ λ_k F_k(z))` and normalized either globally or inside
//! each invariant shell. The multipliers minimize the convex dual
//! `Σ_s P_s ln Z_s(λ) + λ·f`, solved by damped Newton in [`dual`].

mod constraints;
mod dual;
mod linalg;
mod routes;

pub use constraints::{Constraint, ConstraintSet};
pub use dual::{dual_value_and_gradient, DualProblem, DualState};
pub use routes::{
    entropy_at_solution, solve_gibbs_jaynes, solve_jaynes_invariant_constrained, solve_relative,
    solve_relative_shellwise, LogNormalizer, MultiplierVector, RelevantDistribution, Route,
    SolverConfig,
};
