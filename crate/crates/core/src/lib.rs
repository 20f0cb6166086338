//! Fixed-grid simulation of univariate Hawkes processes.
//!
//! The grid schemes sample integrated-intensity increments from an Inverse
//! Gaussian law and counts from a Poisson law, at a deterministic
//! `O(n²)` cost per path (`O(n)` for exponential kernels). Exact samplers
//! (population/branching and Ogata thinning) and the statistics used to
//! compare them live alongside.

pub mod baselines;
pub mod error;
pub mod kernels;
pub mod montecarlo;
mod quadrature;
pub mod rng;
pub mod schemes;
pub mod specfun;
pub mod stats;

pub use baselines::{
    compensator_at, counting_path_from_events, simulate_ogata, simulate_population, EventList,
};
pub use error::{HawkesError, Result};
pub use kernels::{
    g0r_increments, grid_weights, integrated_kernel, kernel_eval, resolvent_grid_weights,
    resolvent_of, Baseline, CustomBaseline, CustomKernel, Grid, GridKind, KernelFamily, KernelSpec,
};
pub use rng::{
    sample_exponential, sample_inverse_gaussian, sample_normal, sample_poisson, sample_uniform,
    IGParams, RngStream,
};
pub use schemes::{
    reconstruct_intensity, simulate, simulate_explicit, simulate_ivi, simulate_markov,
    simulate_resolvent_ivi, volterra_residual, MarkovState, PathRecord, Scheme, SchemeConfig,
    Variant,
};
pub use specfun::{lower_incomplete_gamma, mittag_leffler, MLParams};
pub use stats::{
    ecdf_distance, ks_one_sample, ks_two_sample, laplace_estimate, qq_pairs, time_change_test,
    EstimateWithError, KSResult,
};
