//! Reproducible per-path random streams and the samplers used by the
//! schemes: Inverse Gaussian, Poisson, exponential, uniform and normal.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Result};
use crate::specfun::ln_gamma;

/// Means below this use sequential-search inversion, above it PTRS.
pub const POISSON_INVERSION_MAX_MEAN: f64 = 10.0;

/// A deterministic random stream keyed by `(seed, stream_id)`.
///
/// The seed selects a ChaCha8 key and the stream id selects one of its
/// 2^64 independent nonce streams, so path `i` of a batch can be generated
/// on any thread without coordination.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform on `(0, 1]`.
    #[inline]
    pub fn next_f64_open0(&mut self) -> f64 {
        1.0 - self.next_f64()
    }

    #[inline]
    pub fn next_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Inverse Gaussian law with mean `mu ≥ 0` and shape `lambda > 0`;
/// `mu = 0` is the point mass at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IGParams {
    pub mu: f64,
    pub lambda: f64,
}

impl IGParams {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu >= 0.0 && mu.is_finite()) {
            return domain(format!(
                "Inverse Gaussian mean must be nonnegative, got {mu}"
            ));
        }
        if !(lambda > 0.0) || lambda.is_nan() {
            return domain(format!(
                "Inverse Gaussian shape must be positive, got {lambda}"
            ));
        }
        Ok(Self { mu, lambda })
    }

    pub fn mean(&self) -> f64 {
        self.mu
    }

    pub fn variance(&self) -> f64 {
        self.mu.powi(3) / self.lambda
    }
}

/// Michael–Schucany–Haas sampler: one normal and one uniform per draw
/// (none for the degenerate `mu = 0`).
pub fn sample_inverse_gaussian(r: &mut RngStream, p: IGParams) -> Result<f64> {
    if !(p.lambda > 0.0) {
        return domain(format!(
            "Inverse Gaussian shape must be positive, got {}",
            p.lambda
        ));
    }
    Ok(ig_draw(r, p.mu, p.lambda))
}

/// Unchecked inner IG draw used by the schemes.
#[inline]
pub(crate) fn ig_draw(r: &mut RngStream, mu: f64, lambda: f64) -> f64 {
    if mu == 0.0 {
        return 0.0;
    }
    let xi = r.next_normal();
    let y = xi * xi;
    // μ + μ²Y/2λ − (μ/2λ)√(4μλY + μ²Y²), rewritten without cancellation:
    // X = μ / (1 + ρ + √(ρ(ρ + 2))) with ρ = μY / 2λ
    let rho = mu * y / (2.0 * lambda);
    let x = mu / (1.0 + rho + (rho * (rho + 2.0)).max(0.0).sqrt());
    let eta = r.next_f64();
    if eta <= mu / (mu + x) {
        x
    } else {
        mu * mu / x
    }
}

/// Poisson draw; inversion for small means, Hörmann's PTRS otherwise.
pub fn sample_poisson(r: &mut RngStream, mean: f64) -> Result<u64> {
    if !(mean >= 0.0 && mean.is_finite()) {
        return domain(format!(
            "Poisson mean must be nonnegative and finite, got {mean}"
        ));
    }
    Ok(poisson_draw(r, mean))
}

#[inline]
pub(crate) fn poisson_draw(r: &mut RngStream, mean: f64) -> u64 {
    if mean == 0.0 {
        0
    } else if mean < POISSON_INVERSION_MAX_MEAN {
        poisson_inversion(r, mean)
    } else {
        poisson_ptrs(r, mean)
    }
}

fn poisson_inversion(r: &mut RngStream, mean: f64) -> u64 {
    let u = r.next_f64();
    let mut k = 0u64;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u >= cdf {
        k += 1;
        p *= mean / k as f64;
        let next = cdf + p;
        // the remaining mass is below the resolution of u
        if next == cdf {
            break;
        }
        cdf = next;
    }
    k
}

fn poisson_ptrs(r: &mut RngStream, mean: f64) -> u64 {
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = r.next_f64() - 0.5;
        let v = r.next_f64();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        if v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln()
            <= -mean + k * loglam - ln_gamma(k + 1.0)
        {
            return k as u64;
        }
    }
}

pub fn sample_exponential(r: &mut RngStream, rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate.is_finite()) {
        return domain(format!("exponential rate must be positive, got {rate}"));
    }
    Ok(-r.next_f64_open0().ln() / rate)
}

/// Uniform on `[a, b)`; `a == b` returns `a`.
pub fn sample_uniform(r: &mut RngStream, a: f64, b: f64) -> Result<f64> {
    if !(a <= b) || !a.is_finite() || !b.is_finite() {
        return domain(format!("invalid uniform range [{a}, {b})"));
    }
    if a == b {
        return Ok(a);
    }
    Ok(a + (b - a) * r.next_f64())
}

pub fn sample_normal(r: &mut RngStream) -> f64 {
    r.next_normal()
}
