//! Enumerable state spaces, probability distributions over them, the entropy
//! functionals and the decomposition of a state space into invariant shells.

mod distribution;
mod entropy;
mod shells;
pub(crate) mod system;

pub use distribution::Distribution;
pub use entropy::{
    entropy_decomposition_residual, gibbs_jaynes_entropy, kl_divergence, relative_entropy,
    EntropyConfig,
};
pub use shells::{equilibrium_from_invariants, shell_marginal, Shell, ShellDecomposition};
pub use system::DiscreteSystem;
