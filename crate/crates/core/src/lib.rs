//! Numerical laboratory for Gaussian rough paths: fractional Brownian
//! drivers, level-2 lifts, weighted variation seminorms, compensated
//! integration, greedy interval partitions, a second-order pathwise solver,
//! and stability diagnostics for linear-plus-nonlinear systems.

pub mod error;
pub mod fbm;
pub mod greedy;
pub mod grid;
pub mod integrate;
pub mod io;
pub mod norms;
pub mod path;
pub mod rng;
pub mod rough;
pub mod solver;
pub mod stability;
pub mod systems;

pub use error::{Error, Result};
pub use fbm::{sample_fbm, CovKernel, FbmSampler, FbmSpec};
pub use greedy::{
    greedy_times, ks_critical_1pct, ks_statistic, scaled_control_ks, shift_covariance_check,
    subdivision_inequality, tail_estimate, GreedyPartition, GreedyVariant, KsRow,
    StationarityReport, SubdivisionReport, TailReport, TailRow,
};
pub use grid::TimeGrid;
pub use integrate::{
    change_of_variables_check, rough_integral, sewing_constant, translation_bound_check,
    translation_constant, young_integral, young_loeve_constant, ControlledPath, RoughIntegral,
    TranslationCheck, VSpec, YoungIntegral,
};
pub use io::{sha256_hex, write_atomic, Manifest, OutputFile};
pub use norms::{
    area_var, holder_seminorm, p_sigma_var, p_var, rough_norm, RunningVar, SeminormKind,
    SeminormReport,
};
pub use path::SamplePath;
pub use rng::stream_rng;
pub use rough::RoughPath;
pub use solver::{
    bound_rhs_log, linearized_flow, solution_bound_check, solve, solve_pure_diffusion,
    DiffusionSpec, DriftSpec, SolutionBoundReport, Trajectory, DIVERGENCE_GUARD,
};
pub use stability::{
    angular_bound_check, gronwall_chain_check, lyapunov_estimate, lyapunov_sweep,
    polar_decompose, step1_rde_residuals, AngularBoundReport, ChainReport, LyapunovEstimate,
    PolarSeries, Step1Residuals, SweepReport, SweepRow, CHAIN_SLACK, POLAR_FLOOR, RATE_SLACK,
};
