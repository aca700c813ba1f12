//! Two-dimensional cluster variation method toolkit: exact
//! configuration-variable accounting on wrapped staggered bistate grids,
//! thermodynamic evaluation (enthalpy, cluster entropy, free energy),
//! stochastic free-energy minimization at fixed activation fraction, and
//! closed-form equilibrium comparisons.

pub mod analytic;
pub mod configuration;
pub mod error;
pub mod experiment;
pub mod lattice;
pub mod minimizer;
pub mod oracle;
pub mod plot;
pub mod thermodynamics;

pub use analytic::{analytic_table, z3_current, z3_previous, AnalyticPoint, AnalyticValue};
pub use configuration::{count_configs, fractions, ConfigCounts, ConfigFractions, TripletMode};
pub use error::{CvmError, Result};
pub use experiment::{run_sweep, Phase, RunConfig, SweepRow};
pub use lattice::{CellState, Grid, GridGeometry};
pub use minimizer::{adjust_x1, descend, perturb, run_trial, DescentParams, DescentTrace};
pub use oracle::brute_force_count;
pub use thermodynamics::{entropy, eps_from_h, free_energy, EnthalpyForm, ThermoState};
