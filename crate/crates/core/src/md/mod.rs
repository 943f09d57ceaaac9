//! One-dimensional molecular dynamics: Lennard-Jones particles in a quartic
//! double well, integrated with classic fourth-order Runge-Kutta.

mod config;
mod init;
mod integrator;
mod observables;
mod potential;
mod run;
mod trajectory_file;

pub use config::{Side, SimConfig, GENERATOR_NAME};
pub use init::initialize;
pub use integrator::{rk4_step, Rk4};
pub use observables::{count_right, kinetic_temperature, kinetic_temperature_series, liouville_f, SideFilter};
pub use potential::{double_well_potential, kinetic_energy, lj_force_energy, total_energy, ForceField};
pub use run::{run, PhaseState, Sample, Trajectory, ENERGY_DRIFT_BUDGET};
pub use trajectory_file::{read_trajectory, write_trajectory};
