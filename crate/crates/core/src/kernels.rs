//! Memory kernels `K`, exogenous baselines `g_0`, their integrals, grid
//! weights and resolvents of the second kind.
//!
//! Catalog (`c ≥ 0`, `α > 0`):
//!
//! | family | `K(t)` | resolvent `R(t)` |
//! |---|---|---|
//! | exponential | `c e^{-bt}` | `c e^{-(b-c)t}` |
//! | fractional | `c t^{α-1} / Γ(α)` | `c t^{α-1} E_{α,α}(c t^α)` |
//! | gamma | `c e^{-bt} t^{α-1} / Γ(α)` | `c e^{-bt} t^{α-1} E_{α,α}(c t^α)` |
//! | Mittag-Leffler | `c t^{α-1} E_{α,α}(λ t^α)` | same with `λ + c` |
//! | tempered Mittag-Leffler | `c e^{-bt} t^{α-1} E_{α,α}(λ t^α)` | same with `λ + c` |
//!
//! The Mittag-Leffler families carry a separate rate `λ` so that the
//! catalog is closed under taking resolvents; the fractional resolvent is
//! the `λ = c` member.
//!
//! Grid weights are always differences of integrated kernels, never
//! pointwise samples of `K`, which keeps singular kernels exact.

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, HawkesError, Result};
use crate::quadrature;
use crate::specfun::{
    gamma, incomplete_gamma_pq, ln_gamma, lower_incomplete_gamma, mittag_leffler, MLParams,
    MAX_SERIES_TERMS, SERIES_TOL,
};

/// Absolute tolerance for quadrature fallbacks.
pub const QUADRATURE_TOL: f64 = 1e-10;
/// Absolute tolerance (in time units) of numeric inversions of `K̄` and `G_0`.
pub const INVERSION_TOL: f64 = 1e-12;

/// Shared scalar function used by custom kernels and baselines.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// `(t0, t1) -> sup_{u ∈ [t0, t1]} g_0(u)`.
pub type RangeMaxFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A user-supplied kernel.
#[derive(Clone)]
pub struct CustomKernel {
    pub name: String,
    pub eval: ScalarFn,
    /// Exact `K̄`. Without it `K̄` falls back to adaptive quadrature.
    pub integrated: Option<ScalarFn>,
    pub singular_at_zero: bool,
    /// Nonincreasing `K^m ≥ K`, needed only by the thinning sampler.
    pub envelope: Option<ScalarFn>,
}

impl fmt::Debug for CustomKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomKernel")
            .field("name", &self.name)
            .field("integrated", &self.integrated.is_some())
            .field("singular_at_zero", &self.singular_at_zero)
            .field("envelope", &self.envelope.is_some())
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    Exponential,
    Fractional,
    Gamma,
    MittagLeffler,
    TemperedMittagLeffler,
    SumOfExponentials,
    Custom,
}

/// Description of a memory kernel.
#[derive(Debug, Clone)]
pub enum KernelSpec {
    Exponential {
        c: f64,
        b: f64,
    },
    Fractional {
        c: f64,
        alpha: f64,
    },
    Gamma {
        c: f64,
        b: f64,
        alpha: f64,
    },
    MittagLeffler {
        c: f64,
        lambda: f64,
        alpha: f64,
    },
    TemperedMittagLeffler {
        c: f64,
        lambda: f64,
        b: f64,
        alpha: f64,
    },
    SumOfExponentials {
        c: Vec<f64>,
        b: Vec<f64>,
    },
    Custom(CustomKernel),
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        domain(format!("kernel parameter {name} must be finite, got {v}"))
    }
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    check_finite(name, v)?;
    if v < 0.0 {
        return domain(format!(
            "kernel parameter {name} must be nonnegative, got {v}"
        ));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    check_finite(name, v)?;
    if v <= 0.0 {
        return domain(format!("kernel parameter {name} must be positive, got {v}"));
    }
    Ok(())
}

impl KernelSpec {
    pub fn exponential(c: f64, b: f64) -> Result<Self> {
        let k = Self::Exponential { c, b };
        k.validate()?;
        Ok(k)
    }

    pub fn fractional(c: f64, alpha: f64) -> Result<Self> {
        let k = Self::Fractional { c, alpha };
        k.validate()?;
        Ok(k)
    }

    /// Fractional kernel `c t^{H-1/2} / Γ(H + 1/2)` parameterized by `H ∈ (0, 1)`.
    pub fn fractional_hurst(c: f64, hurst: f64) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return domain(format!("Hurst index must lie in (0, 1), got {hurst}"));
        }
        Self::fractional(c, hurst + 0.5)
    }

    pub fn gamma(c: f64, b: f64, alpha: f64) -> Result<Self> {
        let k = Self::Gamma { c, b, alpha };
        k.validate()?;
        Ok(k)
    }

    pub fn mittag_leffler(c: f64, lambda: f64, alpha: f64) -> Result<Self> {
        let k = Self::MittagLeffler { c, lambda, alpha };
        k.validate()?;
        Ok(k)
    }

    pub fn tempered_mittag_leffler(c: f64, lambda: f64, b: f64, alpha: f64) -> Result<Self> {
        let k = Self::TemperedMittagLeffler {
            c,
            lambda,
            b,
            alpha,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn sum_of_exponentials(c: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let k = Self::SumOfExponentials { c, b };
        k.validate()?;
        Ok(k)
    }

    /// `K ≡ 0`, represented as an exponential kernel with zero amplitude so
    /// that it is accepted by every scheme variant.
    pub fn zero() -> Self {
        Self::Exponential { c: 0.0, b: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Exponential { c, b } => {
                check_nonneg("c", *c)?;
                check_finite("b", *b)
            }
            Self::Fractional { c, alpha } => {
                check_nonneg("c", *c)?;
                check_positive("alpha", *alpha)
            }
            Self::Gamma { c, b, alpha } => {
                check_nonneg("c", *c)?;
                check_positive("b", *b)?;
                check_positive("alpha", *alpha)
            }
            Self::MittagLeffler { c, lambda, alpha } => {
                check_nonneg("c", *c)?;
                check_nonneg("lambda", *lambda)?;
                check_positive("alpha", *alpha)
            }
            Self::TemperedMittagLeffler {
                c,
                lambda,
                b,
                alpha,
            } => {
                check_nonneg("c", *c)?;
                check_nonneg("lambda", *lambda)?;
                check_positive("b", *b)?;
                check_positive("alpha", *alpha)
            }
            Self::SumOfExponentials { c, b } => {
                if c.is_empty() || c.len() != b.len() {
                    return domain(format!(
                        "sum of exponentials needs m >= 1 amplitudes and rates of equal length, got {} and {}",
                        c.len(),
                        b.len()
                    ));
                }
                for (ck, bk) in c.iter().zip(b) {
                    check_positive("c_k", *ck)?;
                    check_positive("b_k", *bk)?;
                }
                Ok(())
            }
            Self::Custom(_) => Ok(()),
        }
    }

    pub fn family(&self) -> KernelFamily {
        match self {
            Self::Exponential { .. } => KernelFamily::Exponential,
            Self::Fractional { .. } => KernelFamily::Fractional,
            Self::Gamma { .. } => KernelFamily::Gamma,
            Self::MittagLeffler { .. } => KernelFamily::MittagLeffler,
            Self::TemperedMittagLeffler { .. } => KernelFamily::TemperedMittagLeffler,
            Self::SumOfExponentials { .. } => KernelFamily::SumOfExponentials,
            Self::Custom(_) => KernelFamily::Custom,
        }
    }

    /// True when the kernel is identically zero.
    pub fn is_zero(&self) -> bool {
        match self {
            Self::Exponential { c, .. }
            | Self::Fractional { c, .. }
            | Self::Gamma { c, .. }
            | Self::MittagLeffler { c, .. }
            | Self::TemperedMittagLeffler { c, .. } => *c == 0.0,
            Self::SumOfExponentials { .. } | Self::Custom(_) => false,
        }
    }

    /// True when `K(0+) = +∞`.
    pub fn is_singular(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        match self {
            Self::Fractional { alpha, .. }
            | Self::Gamma { alpha, .. }
            | Self::MittagLeffler { alpha, .. }
            | Self::TemperedMittagLeffler { alpha, .. } => *alpha < 1.0,
            Self::Custom(k) => k.singular_at_zero,
            Self::Exponential { .. } | Self::SumOfExponentials { .. } => false,
        }
    }

    /// `K(t)`. At `t = 0` the right limit is returned when it is finite.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return domain(format!("kernel evaluated at negative time {t}"));
        }
        if t == 0.0 && self.is_singular() {
            return domain("singular kernel evaluated at t = 0");
        }
        if self.is_zero() {
            return Ok(0.0);
        }
        let v = match self {
            Self::Exponential { c, b } => c * (-b * t).exp(),
            Self::Fractional { c, alpha } => power_law(*c, *alpha, t),
            Self::Gamma { c, b, alpha } => power_law(*c, *alpha, t) * (-b * t).exp(),
            Self::MittagLeffler { c, lambda, alpha } => ml_density(*c, *lambda, *alpha, t)?,
            Self::TemperedMittagLeffler {
                c,
                lambda,
                b,
                alpha,
            } => ml_density(*c, *lambda, *alpha, t)? * (-b * t).exp(),
            Self::SumOfExponentials { c, b } => {
                c.iter().zip(b).map(|(ck, bk)| ck * (-bk * t).exp()).sum()
            }
            Self::Custom(k) => (k.eval)(t),
        };
        Ok(v)
    }

    /// `K̄(t) = ∫_0^t K(s) ds`.
    pub fn integrated(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return domain(format!("integrated kernel evaluated at negative time {t}"));
        }
        if t == 0.0 || self.is_zero() {
            return Ok(0.0);
        }
        match self {
            Self::Exponential { c, b } => Ok(exp_integral(*c, *b, t)),
            Self::Fractional { c, alpha } => Ok(c * t.powf(*alpha) / gamma(alpha + 1.0)),
            Self::Gamma { c, b, alpha } => {
                Ok(c / b.powf(*alpha) * lower_incomplete_gamma(*alpha, b * t)?)
            }
            Self::MittagLeffler { c, lambda, alpha } => {
                let ta = t.powf(*alpha);
                Ok(c * ta * mittag_leffler(MLParams::new(*alpha, alpha + 1.0)?, lambda * ta)?)
            }
            Self::TemperedMittagLeffler {
                c,
                lambda,
                b,
                alpha,
            } => tempered_ml_series(*c, *lambda, *b, *alpha, t, |a, x| {
                lower_incomplete_gamma(a, x)
            }),
            Self::SumOfExponentials { c, b } => Ok(c
                .iter()
                .zip(b)
                .map(|(ck, bk)| exp_integral(*ck, *bk, t))
                .sum()),
            Self::Custom(k) => match &k.integrated {
                Some(f) => Ok(f(t)),
                None => {
                    let eval = k.eval.clone();
                    quadrature::integrate(move |s| eval(s), 0.0, t, QUADRATURE_TOL)
                }
            },
        }
    }

    /// `∫_{t0}^{t1} K(s) ds`, using cancellation-free forms where the
    /// family allows it.
    pub fn interval_integral(&self, t0: f64, t1: f64) -> Result<f64> {
        if !(t0 >= 0.0 && t1 >= t0) {
            return domain(format!("invalid integration interval [{t0}, {t1}]"));
        }
        if t0 == t1 || self.is_zero() {
            return Ok(0.0);
        }
        match self {
            Self::Exponential { c, b } => Ok(exp_interval(*c, *b, t0, t1)),
            Self::SumOfExponentials { c, b } => Ok(c
                .iter()
                .zip(b)
                .map(|(ck, bk)| exp_interval(*ck, *bk, t0, t1))
                .sum()),
            Self::Fractional { c, alpha } => {
                let diff = if t0 == 0.0 {
                    t1.powf(*alpha)
                } else {
                    t0.powf(*alpha) * (alpha * ((t1 - t0) / t0).ln_1p()).exp_m1()
                };
                Ok(c * diff / gamma(alpha + 1.0))
            }
            Self::Gamma { c, b, alpha } => {
                let (p0, q0) = incomplete_gamma_pq(*alpha, b * t0)?;
                let (p1, q1) = incomplete_gamma_pq(*alpha, b * t1)?;
                let diff = if p0 < 0.5 { p1 - p0 } else { q0 - q1 };
                Ok(c / b.powf(*alpha) * diff)
            }
            _ => Ok(self.integrated(t1)? - self.integrated(t0)?),
        }
    }

    /// `∫_0^t K̄(s) ds`, the quantity behind `G_0^R` for constant baselines.
    pub fn double_integrated(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return domain(format!("double integral evaluated at negative time {t}"));
        }
        if t == 0.0 || self.is_zero() {
            return Ok(0.0);
        }
        match self {
            Self::Exponential { c, b } => Ok(exp_double_integral(*c, *b, t)),
            Self::SumOfExponentials { c, b } => Ok(c
                .iter()
                .zip(b)
                .map(|(ck, bk)| exp_double_integral(*ck, *bk, t))
                .sum()),
            Self::Fractional { c, alpha } => Ok(c * t.powf(alpha + 1.0) / gamma(alpha + 2.0)),
            Self::Gamma { c, b, alpha } => {
                Ok(c / b.powf(*alpha) * integrated_regularized_gamma(*alpha, *b, t)?)
            }
            Self::MittagLeffler { c, lambda, alpha } => {
                let ta = t.powf(*alpha);
                Ok(c * ta * t * mittag_leffler(MLParams::new(*alpha, alpha + 2.0)?, lambda * ta)?)
            }
            Self::TemperedMittagLeffler {
                c,
                lambda,
                b,
                alpha,
            } => tempered_ml_series(*c, *lambda, *b, *alpha, t, |a, _| {
                integrated_regularized_gamma(a, *b, t)
            }),
            Self::Custom(_) => {
                let k = self.clone();
                let failure = std::cell::Cell::new(None);
                let v = quadrature::integrate(
                    |s| match k.integrated(s) {
                        Ok(v) => v,
                        Err(e) => {
                            failure.set(Some(e));
                            f64::NAN
                        }
                    },
                    0.0,
                    t,
                    QUADRATURE_TOL,
                );
                match failure.into_inner() {
                    Some(e) => Err(e),
                    None => v,
                }
            }
        }
    }

    /// Solves `K̄(s) = y` for `s ∈ [0, upper]`; requires `y ≤ K̄(upper)`.
    ///
    /// Closed forms for exponential and fractional kernels, safeguarded
    /// Newton/bisection otherwise.
    pub fn inverse_integrated(&self, y: f64, upper: f64) -> Result<f64> {
        if y <= 0.0 {
            return Ok(0.0);
        }
        match self {
            Self::Exponential { c, b } if *c > 0.0 => {
                if *b == 0.0 {
                    return Ok((y / c).min(upper));
                }
                let arg = -b * y / c;
                if arg <= -1.0 {
                    return domain(format!(
                        "{y} exceeds the total mass of the exponential kernel"
                    ));
                }
                Ok((-arg.ln_1p() / b).min(upper))
            }
            Self::Fractional { c, alpha } if *c > 0.0 => {
                Ok((y * gamma(alpha + 1.0) / c).powf(1.0 / alpha).min(upper))
            }
            _ => invert_monotone(|s| self.integrated(s), |s| self.eval(s), y, upper),
        }
    }
}

fn power_law(c: f64, alpha: f64, t: f64) -> f64 {
    if alpha == 1.0 {
        c
    } else {
        c * t.powf(alpha - 1.0) / gamma(alpha)
    }
}

fn ml_density(c: f64, lambda: f64, alpha: f64, t: f64) -> Result<f64> {
    let ta = t.powf(alpha);
    Ok(c * t.powf(alpha - 1.0) * mittag_leffler(MLParams::new(alpha, alpha)?, lambda * ta)?)
}

fn exp_integral(c: f64, b: f64, t: f64) -> f64 {
    if b == 0.0 {
        c * t
    } else {
        -c / b * (-b * t).exp_m1()
    }
}

fn exp_interval(c: f64, b: f64, t0: f64, t1: f64) -> f64 {
    if b == 0.0 {
        c * (t1 - t0)
    } else {
        -c / b * (-b * t0).exp() * (-b * (t1 - t0)).exp_m1()
    }
}

fn exp_double_integral(c: f64, b: f64, t: f64) -> f64 {
    let x = b * t;
    if x.abs() < 1e-3 {
        // (x + e^{-x} - 1) / x^2 = 1/2 - x/6 + x^2/24 - x^3/120 + ...
        c * t * t * (0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0)
    } else {
        c / (b * b) * (x + (-x).exp_m1())
    }
}

/// `∫_0^t P(a, b s) ds = t P(a, bt) - (a/b) P(a+1, bt)`.
fn integrated_regularized_gamma(a: f64, b: f64, t: f64) -> Result<f64> {
    Ok(t * lower_incomplete_gamma(a, b * t)? - a / b * lower_incomplete_gamma(a + 1.0, b * t)?)
}

/// `Σ_{n≥0} c λ^n b^{-α(n+1)} F(α(n+1))` for the tempered Mittag-Leffler
/// integrals, where `F(a)` is `P(a, bt)` or its time integral. The terms are
/// dominated by the Mittag-Leffler series terms `c λ^n t^{α(n+1)+j} / Γ(α(n+1)+1+j)`
/// so the sum converges for every finite `t`.
fn tempered_ml_series<F>(c: f64, lambda: f64, b: f64, alpha: f64, t: f64, f: F) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let log_ratio = if lambda > 0.0 {
        lambda.ln() - alpha * b.ln()
    } else {
        f64::NEG_INFINITY
    };
    let ln_c = c.ln();
    let mut sum = 0.0;
    for n in 0..MAX_SERIES_TERMS {
        let a = alpha * (n as f64 + 1.0);
        let log_coef = ln_c - alpha * b.ln() + n as f64 * log_ratio;
        let coef = log_coef.exp();
        let term = if coef == 0.0 {
            0.0
        } else {
            coef * f(a, b * t)?
        };
        sum += term;
        if lambda == 0.0 {
            return Ok(sum);
        }
        // majorant of the remaining terms: Mittag-Leffler-type term in (λ t^α)
        let log_bound =
            ln_c + n as f64 * lambda.ln() + a * t.ln() + t.ln().max(0.0) - ln_gamma(a + 1.0);
        let decaying = a + 1.0 > 2.0;
        if decaying
            && term.abs() <= SERIES_TOL * sum.abs()
            && log_bound.exp() <= SERIES_TOL * sum.abs()
        {
            return Ok(sum);
        }
    }
    Err(HawkesError::NonConvergence(format!(
        "tempered Mittag-Leffler series (c={c}, λ={lambda}, b={b}, α={alpha}) at t = {t}"
    )))
}

/// Solves `F(s) = y` on `[0, upper]` for nondecreasing `F` with derivative `dF`.
pub(crate) fn invert_monotone<F, D>(f: F, df: D, y: f64, upper: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
    D: Fn(f64) -> Result<f64>,
{
    let mut lo = 0.0;
    let mut hi = upper;
    let f_hi = f(hi)?;
    if y >= f_hi {
        return Ok(hi);
    }
    let mut s = 0.5 * (lo + hi);
    for _ in 0..400 {
        let value = f(s)? - y;
        if value == 0.0 {
            return Ok(s);
        }
        if value > 0.0 {
            hi = s;
        } else {
            lo = s;
        }
        if hi - lo <= INVERSION_TOL {
            return Ok(0.5 * (lo + hi));
        }
        let slope = if s > 0.0 {
            df(s).unwrap_or(f64::NAN)
        } else {
            f64::NAN
        };
        let newton = s - value / slope;
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - s).abs() <= 0.25 * INVERSION_TOL {
            return Ok(next);
        }
        s = next;
    }
    Err(HawkesError::NonConvergence(format!(
        "inversion of a monotone function at level {y}"
    )))
}

/// Resolvent of the second kind `R` with `R * K = K * R = R - K`.
pub fn resolvent_of(k: &KernelSpec) -> Result<KernelSpec> {
    k.validate()?;
    match k {
        KernelSpec::Exponential { c, b } => Ok(KernelSpec::Exponential { c: *c, b: b - c }),
        KernelSpec::Fractional { c, alpha } => Ok(KernelSpec::MittagLeffler {
            c: *c,
            lambda: *c,
            alpha: *alpha,
        }),
        KernelSpec::Gamma { c, b, alpha } => Ok(KernelSpec::TemperedMittagLeffler {
            c: *c,
            lambda: *c,
            b: *b,
            alpha: *alpha,
        }),
        KernelSpec::MittagLeffler { c, lambda, alpha } => Ok(KernelSpec::MittagLeffler {
            c: *c,
            lambda: lambda + c,
            alpha: *alpha,
        }),
        KernelSpec::TemperedMittagLeffler {
            c,
            lambda,
            b,
            alpha,
        } => Ok(KernelSpec::TemperedMittagLeffler {
            c: *c,
            lambda: lambda + c,
            b: *b,
            alpha: *alpha,
        }),
        KernelSpec::SumOfExponentials { .. } => Err(HawkesError::Unsupported(
            "no closed-form resolvent for a general sum of exponentials".into(),
        )),
        KernelSpec::Custom(c) => Err(HawkesError::Unsupported(format!(
            "custom kernel '{}' has no closed-form resolvent",
            c.name
        ))),
    }
}

/// Free-function form of [`KernelSpec::eval`].
pub fn kernel_eval(k: &KernelSpec, t: f64) -> Result<f64> {
    k.eval(t)
}

/// Free-function form of [`KernelSpec::integrated`].
pub fn integrated_kernel(k: &KernelSpec, t: f64) -> Result<f64> {
    k.integrated(t)
}

/// An exogenous intensity `g_0` supplied by the caller.
#[derive(Clone)]
pub struct CustomBaseline {
    pub name: String,
    pub rate: ScalarFn,
    /// Exact `G_0(t) = ∫_0^t g_0`.
    pub integral: ScalarFn,
    /// `sup g_0` over an interval, needed by the thinning sampler.
    pub range_max: Option<RangeMaxFn>,
}

impl fmt::Debug for CustomBaseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomBaseline")
            .field("name", &self.name)
            .field("range_max", &self.range_max.is_some())
            .finish()
    }
}

/// Exogenous intensity `g_0 ≥ 0`.
#[derive(Debug, Clone)]
pub enum Baseline {
    Constant { mu: f64 },
    Custom(CustomBaseline),
}

impl Baseline {
    pub fn constant(mu: f64) -> Result<Self> {
        if !(mu >= 0.0 && mu.is_finite()) {
            return domain(format!(
                "baseline intensity must be nonnegative and finite, got {mu}"
            ));
        }
        Ok(Self::Constant { mu })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Constant { mu } if *mu == 0.0)
    }

    pub fn rate(&self, t: f64) -> f64 {
        match self {
            Self::Constant { mu } => *mu,
            Self::Custom(g) => (g.rate)(t),
        }
    }

    /// `G_0(t)`.
    pub fn integral(&self, t: f64) -> f64 {
        match self {
            Self::Constant { mu } => mu * t,
            Self::Custom(g) => (g.integral)(t),
        }
    }

    /// `G_0(t_{i+1}) - G_0(t_i)` on the uniform grid (`μ T / n` for a
    /// constant baseline).
    ///
    /// The increments are differences of `G_0` at the grid points rather
    /// than `μ h` itself: for a constant baseline the differences are exact
    /// in floating point, so their running sum hits `G_0(t_i)` bit for bit
    /// and a path without jumps has `Λ_T == G_0(T)`, exactly like the
    /// compensator of an exact sampler.
    pub fn increments(&self, horizon: f64, steps: usize) -> Vec<f64> {
        (0..steps)
            .map(|i| {
                self.integral(grid_time(horizon, steps, i + 1))
                    - self.integral(grid_time(horizon, steps, i))
            })
            .collect()
    }

    /// `sup_{u ∈ [t0, t1]} g_0(u)`.
    pub fn range_max(&self, t0: f64, t1: f64) -> Result<f64> {
        match self {
            Self::Constant { mu } => Ok(*mu),
            Self::Custom(g) => match &g.range_max {
                Some(f) => Ok(f(t0, t1)),
                None => Err(HawkesError::Config(format!(
                    "custom baseline '{}' must provide its running maximum for thinning",
                    g.name
                ))),
            },
        }
    }

    /// Solves `G_0(s) = y` on `[0, upper]`.
    pub fn inverse_integral(&self, y: f64, upper: f64) -> Result<f64> {
        match self {
            Self::Constant { mu } if *mu > 0.0 => Ok((y / mu).min(upper)),
            Self::Constant { .. } => Ok(upper),
            Self::Custom(_) => {
                invert_monotone(|s| Ok(self.integral(s)), |s| Ok(self.rate(s)), y, upper)
            }
        }
    }
}

/// `t_i = i T / n`.
#[inline]
pub fn grid_time(horizon: f64, steps: usize, i: usize) -> f64 {
    if i == steps {
        return horizon;
    }
    horizon * i as f64 / steps as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Kernel,
    Resolvent,
}

/// Uniform partition of `[0, T]` with the integrated weights of a kernel
/// (`k_j^n`) or of its resolvent (`r_j^n`).
#[derive(Debug, Clone)]
pub struct Grid {
    horizon: f64,
    steps: usize,
    weights: Vec<f64>,
    kind: GridKind,
}

impl Grid {
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn step_size(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        grid_time(self.horizon, self.steps, i)
    }

    /// `k_0^n` (or `r_0^n`).
    pub fn first_weight(&self) -> f64 {
        self.weights[0]
    }
}

fn check_grid(horizon: f64, steps: usize) -> Result<()> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return domain(format!(
            "horizon must be positive and finite, got {horizon}"
        ));
    }
    if steps == 0 {
        return domain("number of steps must be positive");
    }
    Ok(())
}

/// `∫_{t_j}^{t_j + h} K` on the uniform grid. The exponential families use
/// the exact step `h` rather than `t_{j+1} - t_j`, which carries the
/// rounding error of `t_j`, so consecutive weights keep the exact ratio
/// `e^{-bh}`.
fn step_integral(k: &KernelSpec, t0: f64, t1: f64, h: f64) -> Result<f64> {
    match k {
        KernelSpec::Exponential { c, b } if *c > 0.0 && *b != 0.0 => {
            Ok(-c / b * (-b * t0).exp() * (-b * h).exp_m1())
        }
        KernelSpec::SumOfExponentials { c, b } => Ok(c
            .iter()
            .zip(b)
            .map(|(ck, bk)| -ck / bk * (-bk * t0).exp() * (-bk * h).exp_m1())
            .sum()),
        _ => k.interval_integral(t0, t1),
    }
}

fn weights_for(k: &KernelSpec, horizon: f64, steps: usize) -> Result<Vec<f64>> {
    let mut weights = Vec::with_capacity(steps);
    let h = horizon / steps as f64;
    for j in 0..steps {
        let w = step_integral(
            k,
            grid_time(horizon, steps, j),
            grid_time(horizon, steps, j + 1),
            h,
        )?;
        if !w.is_finite() {
            return Err(HawkesError::Overflow(format!(
                "grid weight {j} is not finite"
            )));
        }
        weights.push(w);
    }
    Ok(weights)
}

/// Smallest `n` with `K̄(T/n) < 1`.
pub fn min_well_posed_steps(k: &KernelSpec, horizon: f64) -> Result<usize> {
    let ok = |n: usize| -> Result<bool> { Ok(k.integrated(horizon / n as f64)? < 1.0) };
    if ok(1)? {
        return Ok(1);
    }
    let mut hi = 2usize;
    while !ok(hi)? {
        if hi > (1usize << 40) {
            return Err(HawkesError::Config(
                "kernel mass near zero does not vanish; no admissible grid".into(),
            ));
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `k_j^n = ∫_{t_j}^{t_{j+1}} K`, `j = 0..n-1`, with the well-posedness
/// check `k_0^n < 1`.
pub fn grid_weights(k: &KernelSpec, horizon: f64, steps: usize) -> Result<Grid> {
    check_grid(horizon, steps)?;
    k.validate()?;
    let weights = weights_for(k, horizon, steps)?;
    if weights.iter().any(|w| *w < 0.0) {
        return domain("kernel has negative mass on the grid");
    }
    if weights[0] >= 1.0 {
        return Err(HawkesError::WellPosedness {
            k0: weights[0],
            steps,
            min_steps: min_well_posed_steps(k, horizon)?,
        });
    }
    Ok(Grid {
        horizon,
        steps,
        weights,
        kind: GridKind::Kernel,
    })
}

/// `r_j^n = ∫_{t_j}^{t_{j+1}} R` for the resolvent `R` of `k`.
pub fn resolvent_grid_weights(k: &KernelSpec, horizon: f64, steps: usize) -> Result<Grid> {
    check_grid(horizon, steps)?;
    let r = resolvent_of(k)?;
    let weights = weights_for(&r, horizon, steps)?;
    if weights.iter().any(|w| *w < 0.0) {
        return Err(HawkesError::Unsupported(
            "resolvent takes negative values on the grid".into(),
        ));
    }
    Ok(Grid {
        horizon,
        steps,
        weights,
        kind: GridKind::Resolvent,
    })
}

/// `G_0^R(t) = G_0(t) + ∫_0^t R(t-s) G_0(s) ds`.
pub fn g0r(g: &Baseline, r: &KernelSpec, t: f64) -> Result<f64> {
    match g {
        Baseline::Constant { mu } => Ok(mu * (t + r.double_integrated(t)?)),
        Baseline::Custom(_) => {
            // integrate by parts: ∫_0^t R(u) G_0(t-u) du = ∫_0^t K̄_R(u) g_0(t-u) du
            let failure = std::cell::Cell::new(None);
            let conv = quadrature::integrate(
                |u| match r.integrated(u) {
                    Ok(v) => v * g.rate(t - u),
                    Err(e) => {
                        failure.set(Some(e));
                        f64::NAN
                    }
                },
                0.0,
                t,
                QUADRATURE_TOL,
            );
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            Ok(g.integral(t) + conv?)
        }
    }
}

/// Increments `G_0^R(t_{i+1}) - G_0^R(t_i)` of the resolvent-adjusted baseline.
pub fn g0r_increments(
    g: &Baseline,
    k: &KernelSpec,
    horizon: f64,
    steps: usize,
) -> Result<Vec<f64>> {
    check_grid(horizon, steps)?;
    let r = resolvent_of(k)?;
    if g.is_zero() {
        return Ok(vec![0.0; steps]);
    }
    match g {
        Baseline::Constant { mu } => {
            let h = horizon / steps as f64;
            let mut prev = 0.0;
            let mut out = Vec::with_capacity(steps);
            for i in 1..=steps {
                let next = r.double_integrated(grid_time(horizon, steps, i))?;
                out.push(mu * h + mu * (next - prev));
                prev = next;
            }
            Ok(out)
        }
        Baseline::Custom(_) => {
            let mut prev = 0.0;
            let mut out = Vec::with_capacity(steps);
            for i in 1..=steps {
                let next = g0r(g, &r, grid_time(horizon, steps, i))?;
                out.push((next - prev).max(0.0));
                prev = next;
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pointwise_examples() {
        let k = KernelSpec::exponential(2.0, 3.0).unwrap();
        assert_eq!(k.eval(0.0).unwrap(), 2.0);
        let k = KernelSpec::fractional(1.0, 0.6).unwrap();
        assert_relative_eq!(k.eval(1.0).unwrap(), 1.0 / gamma(0.6), max_relative = 1e-14);
        assert!(k.eval(0.0).is_err());
        let k = KernelSpec::gamma(0.9 * 9.0, 3.0, 2.0).unwrap();
        assert_relative_eq!(
            k.eval(1.0).unwrap(),
            8.1 * (-3.0f64).exp(),
            max_relative = 1e-14
        );
        assert!(k.eval(-1.0).is_err());
    }

    #[test]
    fn hurst_constructor_shifts_by_one_half() {
        let k = KernelSpec::fractional_hurst(0.1, 0.1).unwrap();
        match k {
            KernelSpec::Fractional { alpha, .. } => assert_relative_eq!(alpha, 0.6),
            _ => unreachable!(),
        }
        assert!(KernelSpec::fractional_hurst(0.1, 1.2).is_err());
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(KernelSpec::exponential(-1.0, 1.0).is_err());
        assert!(KernelSpec::gamma(1.0, 0.0, 2.0).is_err());
        assert!(KernelSpec::fractional(1.0, 0.0).is_err());
        assert!(KernelSpec::sum_of_exponentials(vec![], vec![]).is_err());
        assert!(KernelSpec::sum_of_exponentials(vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(KernelSpec::sum_of_exponentials(vec![0.0], vec![1.0]).is_err());
    }

    #[test]
    fn integrated_examples() {
        let k = KernelSpec::exponential(1.0, 1.0).unwrap();
        assert_relative_eq!(
            k.integrated(1.0).unwrap(),
            1.0 - (-1.0f64).exp(),
            max_relative = 1e-15
        );
        assert_eq!(k.integrated(0.0).unwrap(), 0.0);
        let k = KernelSpec::fractional(0.1, 0.6).unwrap();
        assert_relative_eq!(
            k.integrated(1.0).unwrap(),
            0.1 / gamma(1.6),
            max_relative = 1e-14
        );
    }

    #[test]
    fn zero_kernel_weights_are_zero() {
        let g = grid_weights(&KernelSpec::zero(), 3.0, 7).unwrap();
        assert!(g.weights().iter().all(|w| *w == 0.0));
        let g = grid_weights(&KernelSpec::fractional(0.0, 0.6).unwrap(), 3.0, 7).unwrap();
        assert!(g.weights().iter().all(|w| *w == 0.0));
    }

    #[test]
    fn well_posedness_reports_minimum_steps() {
        // K̄(t) = 3t, so k_0 < 1 needs n > 3
        let k = KernelSpec::exponential(3.0, 0.0).unwrap();
        match grid_weights(&k, 1.0, 2) {
            Err(HawkesError::WellPosedness {
                k0,
                steps,
                min_steps,
            }) => {
                assert_relative_eq!(k0, 1.5);
                assert_eq!(steps, 2);
                assert_eq!(min_steps, 4);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(grid_weights(&k, 1.0, 4).is_ok());
    }

    #[test]
    fn resolvent_catalog() {
        match resolvent_of(&KernelSpec::exponential(0.5, 1.0).unwrap()).unwrap() {
            KernelSpec::Exponential { c, b } => {
                assert_eq!(c, 0.5);
                assert_eq!(b, 0.5);
            }
            other => panic!("{other:?}"),
        }
        match resolvent_of(&KernelSpec::fractional(0.1, 0.6).unwrap()).unwrap() {
            KernelSpec::MittagLeffler { c, lambda, alpha } => {
                assert_eq!((c, lambda, alpha), (0.1, 0.1, 0.6));
            }
            other => panic!("{other:?}"),
        }
        // resolvent of the fractional resolvent doubles the rate
        let r = resolvent_of(&resolvent_of(&KernelSpec::fractional(0.1, 0.6).unwrap()).unwrap())
            .unwrap();
        assert!(matches!(r, KernelSpec::MittagLeffler { lambda, .. } if lambda == 0.2));
        let sum = KernelSpec::sum_of_exponentials(vec![1.0], vec![2.0]).unwrap();
        assert!(matches!(
            resolvent_of(&sum),
            Err(HawkesError::Unsupported(_))
        ));
        // a growing resolvent is allowed
        let r = resolvent_of(&KernelSpec::exponential(2.0, 1.0).unwrap()).unwrap();
        assert!(matches!(r, KernelSpec::Exponential { b, .. } if b == -1.0));
    }

    #[test]
    fn resolvent_weights_examples() {
        let k = KernelSpec::exponential(0.5, 1.0).unwrap();
        let g = resolvent_grid_weights(&k, 1.0, 1).unwrap();
        assert_relative_eq!(g.weights()[0], 1.0 - (-0.5f64).exp(), max_relative = 1e-14);
        assert_eq!(g.kind(), GridKind::Resolvent);
        let g = resolvent_grid_weights(&KernelSpec::fractional(0.0, 0.6).unwrap(), 1.0, 5).unwrap();
        assert!(g.weights().iter().all(|w| *w == 0.0));
    }

    #[test]
    fn g0r_examples() {
        let zero_mu = Baseline::constant(0.0).unwrap();
        let k = KernelSpec::gamma(8.1, 3.0, 2.0).unwrap();
        assert!(g0r_increments(&zero_mu, &k, 1.0, 4)
            .unwrap()
            .iter()
            .all(|v| *v == 0.0));

        let mu = Baseline::constant(5.0).unwrap();
        for v in g0r_increments(&mu, &KernelSpec::zero(), 1.0, 10).unwrap() {
            assert_relative_eq!(v, 0.5, max_relative = 1e-15);
        }

        let mu = Baseline::constant(1.0).unwrap();
        let k = KernelSpec::exponential(0.5, 1.0).unwrap();
        let inc = g0r_increments(&mu, &k, 1.0, 1).unwrap();
        // 1 + ∫_0^1 (1 - e^{-s/2}) ds = 2 - 2(1 - e^{-1/2})
        assert_relative_eq!(inc[0], 2.0 * (-0.5f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn closed_form_inverses() {
        let k = KernelSpec::exponential(4.0, 5.0).unwrap();
        let s = k.inverse_integrated(0.3, 2.0).unwrap();
        assert_relative_eq!(k.integrated(s).unwrap(), 0.3, max_relative = 1e-13);
        let k = KernelSpec::fractional(0.1, 0.6).unwrap();
        let s = k.inverse_integrated(0.05, 30.0).unwrap();
        assert_relative_eq!(k.integrated(s).unwrap(), 0.05, max_relative = 1e-13);
        let k = KernelSpec::gamma(8.1, 3.0, 2.0).unwrap();
        let s = k.inverse_integrated(0.4, 1.0).unwrap();
        assert!((k.integrated(s).unwrap() - 0.4).abs() < 1e-11);
    }

    #[test]
    fn custom_kernel_without_integral_uses_quadrature() {
        let k = KernelSpec::Custom(CustomKernel {
            name: "linear".into(),
            eval: Arc::new(|t| 1.0 + t),
            integrated: None,
            singular_at_zero: false,
            envelope: None,
        });
        assert_relative_eq!(k.integrated(2.0).unwrap(), 4.0, max_relative = 1e-12);
        assert!(resolvent_of(&k).is_err());
    }

    #[test]
    fn custom_baseline_g0r_matches_constant() {
        let custom = Baseline::Custom(CustomBaseline {
            name: "flat".into(),
            rate: Arc::new(|_| 2.0),
            integral: Arc::new(|t| 2.0 * t),
            range_max: Some(Arc::new(|_, _| 2.0)),
        });
        let constant = Baseline::constant(2.0).unwrap();
        let k = KernelSpec::gamma(8.1, 3.0, 2.0).unwrap();
        let a = g0r_increments(&custom, &k, 1.0, 8).unwrap();
        let b = g0r_increments(&constant, &k, 1.0, 8).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
    }
}
