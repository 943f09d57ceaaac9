//! Least-biased ("relevant") statistical ensembles.
//!
//! The crate computes relevant distributions on enumerable systems by two
//! routes, maximizing the Gibbs-Jaynes entropy or the relative entropy from a
//! known equilibrium ensemble, and checks that they agree. A small 1D
//! molecular dynamics engine (Lennard-Jones particles in a double well)
//! supplies a non-ergodic test case on which the relative entropy route is
//! used to estimate the organised drift of the number of particles on the
//! right, which then drives a memoryless transport equation.
//!
//! All numerics are generic over [`Real`]; `f64` aliases are provided below.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod drift;
pub mod ensemble;
mod error;
pub mod fixtures;
pub mod maxent;
pub mod md;
pub mod oracle;
mod scalar;
pub mod transport;

pub use error::{Error, ErrorClass, Result};
pub use scalar::{log_sum_exp, Real};

pub type DiscreteSystem64 = ensemble::DiscreteSystem<f64>;
pub type Distribution64 = ensemble::Distribution<f64>;
pub type ShellDecomposition64 = ensemble::ShellDecomposition<f64>;
pub type ConstraintSet64 = maxent::ConstraintSet<f64>;
pub type RelevantDistribution64 = maxent::RelevantDistribution<f64>;
pub type SimConfig64 = md::SimConfig<f64>;
pub type PhaseState64 = md::PhaseState<f64>;
pub type Trajectory64 = md::Trajectory<f64>;
pub type ReweightConfig64 = drift::ReweightConfig<f64>;
pub type DriftCurve64 = drift::DriftCurve<f64>;
pub type TransportConfig64 = transport::TransportConfig<f64>;
pub type TransportResult64 = transport::TransportResult<f64>;

pub type DiscreteSystem32 = ensemble::DiscreteSystem<f32>;
pub type Distribution32 = ensemble::Distribution<f32>;
pub type SimConfig32 = md::SimConfig<f32>;
pub type Trajectory32 = md::Trajectory<f32>;
