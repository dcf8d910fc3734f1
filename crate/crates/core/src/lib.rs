//! Continuous-variable Gaussian simulator for a two-node quantum network:
//! two driven optomechanical cavities coupled by an optical fiber.
//!
//! The crate is organized in layers:
//!
//! * [`gaussian`]: covariance matrices, symplectic spectra, entanglement
//!   (logarithmic negativity) and Gaussian quantum discord;
//! * [`model`]: the physical network, both the passive "simplified" picture
//!   (two fiber-coupled cavity fields fed by common thermal noise) and the
//!   linearized optomechanical "full" model with its classical mean field;
//! * [`dynamics`]: steady-state Lyapunov solves and time integration of the
//!   covariance equation of motion;
//! * [`analysis`]: parameter sweeps, entanglement-threshold searches, the
//!   collective +/- mode decomposition, and precanned figure datasets;
//! * [`cli`]: the `cvgn` command-line front end.

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod gaussian;
pub mod model;

pub use analysis::{
    build_model, figure_dataset, figure_defaults, find_threshold, initial_state_full,
    plus_minus_decomposition, steady_state, sweep, DataTable, FigureId, FigureOptions, Metric,
    ModelKind, ModelParams, SweepColumn, SweepResult,
};
pub use dynamics::{evolve_covariance, evolve_mean, solve_steady, Trajectory};
pub use error::{Error, Result};
pub use gaussian::{
    entropy_f, gaussian_discord, log_negativity_bipartition, log_negativity_two_mode,
    partial_transpose, reduce_modes, rotate_basis, symplectic_eigenvalues,
    symplectic_eigenvalues_two_mode, two_mode_invariants, BipartitionSpec, CovarianceMatrix,
    SymplecticForm, TwoModeInvariants,
};
pub use model::{
    build_full_linearized, build_simplified, mean_field, optical_residual, stability,
    DriftDiffusion, FullParams, MeanFieldState, SimplifiedParams,
};
