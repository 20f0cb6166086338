//! Shared fixtures for the criterion benches.

pub use hawkes_core::montecarlo::PATH_CHUNK;
use hawkes_core::{Baseline, KernelSpec, RngStream, Scheme, SchemeConfig, Variant};

/// Exponential kernel `c = 4, b = 5`, `μ = 10`, `T = 2`.
pub fn exponential() -> (KernelSpec, Baseline, f64) {
    (
        KernelSpec::exponential(4.0, 5.0).unwrap(),
        Baseline::constant(10.0).unwrap(),
        2.0,
    )
}

/// Gamma kernel `c = 8.1, b = 3, α = 2`, `μ = 5`, `T = 1`.
pub fn gamma() -> (KernelSpec, Baseline, f64) {
    (
        KernelSpec::gamma(8.1, 3.0, 2.0).unwrap(),
        Baseline::constant(5.0).unwrap(),
        1.0,
    )
}

/// Fractional kernel `c = 0.1, H = 0.1`, `μ = 5`, `T = 30`.
pub fn fractional() -> (KernelSpec, Baseline, f64) {
    (
        KernelSpec::fractional_hurst(0.1, 0.1).unwrap(),
        Baseline::constant(5.0).unwrap(),
        30.0,
    )
}

pub fn scheme(fixture: (KernelSpec, Baseline, f64), steps: usize, variant: Variant) -> Scheme {
    let (k, g, t) = fixture;
    Scheme::new(&SchemeConfig::new(k, g, t, steps, variant)).unwrap()
}

/// One batch worth of streams.
pub fn streams(seed: u64) -> Vec<RngStream> {
    (0..PATH_CHUNK as u64)
        .map(|i| RngStream::new(seed, i))
        .collect()
}
