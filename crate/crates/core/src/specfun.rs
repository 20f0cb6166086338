//! Special functions needed by the kernel catalog: the two-parameter
//! Mittag-Leffler function and the regularized incomplete gamma functions.
//!
//! `lower_incomplete_gamma` returns the *regularized* value
//! `P(a, x) = (1 / Γ(a)) ∫_0^x t^(a-1) e^(-t) dt`, so that the integrated
//! gamma kernel reads `(c / b^a) P(a, b t)`.

use crate::error::{domain, HawkesError, Result};

pub use statrs::function::gamma::{gamma, ln_gamma};

/// Relative truncation threshold for every series in this module.
pub const SERIES_TOL: f64 = 1e-16;
/// Hard cap on the number of series terms before giving up.
pub const MAX_SERIES_TERMS: usize = 10_000;

/// Above this value of `z^(1/α)` the positive axis switches to the
/// exponential asymptotic expansion.
const ML_ASYMPTOTIC_SWITCH: f64 = 50.0;
/// Relative error accepted from the series on the negative axis before the
/// asymptotic expansion is tried instead.
const ML_NEGATIVE_SERIES_TOL: f64 = 1e-12;
/// Worst relative error we are willing to return at all.
const ML_MAX_REL_ERROR: f64 = 1e-9;
/// Relative accuracy of the underlying gamma function, used in error estimates.
const GAMMA_REL_EPS: f64 = 4e-15;
/// ln(f64::MAX)
const LN_MAX: f64 = 709.782_712_893_384;

/// Parameters `(α, β)` of `E_{α,β}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLParams {
    pub alpha: f64,
    pub beta: f64,
}

impl MLParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return domain(format!(
                "Mittag-Leffler alpha must be positive, got {alpha}"
            ));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return domain(format!("Mittag-Leffler beta must be positive, got {beta}"));
        }
        Ok(Self { alpha, beta })
    }
}

/// `1 / Γ(x)` for any real `x`, exactly zero at the poles of Γ.
pub fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x < 0.5 {
        // reflection: 1/Γ(x) = sin(πx) Γ(1-x) / π
        (std::f64::consts::PI * x).sin() * gamma(1.0 - x) / std::f64::consts::PI
    } else if x > 171.0 {
        (-ln_gamma(x)).exp()
    } else {
        1.0 / gamma(x)
    }
}

/// Neumaier's compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Two-parameter Mittag-Leffler function `E_{α,β}(z) = Σ z^n / Γ(αn + β)`.
///
/// The series is summed directly while it is well conditioned. On the
/// positive axis the exponential asymptotic takes over once `z^(1/α)`
/// exceeds 50; on the negative axis it takes over when cancellation in the
/// series would cost more than 1e-12 relative accuracy.
pub fn mittag_leffler(p: MLParams, z: f64) -> Result<f64> {
    if !z.is_finite() {
        return domain(format!("Mittag-Leffler argument must be finite, got {z}"));
    }
    if z == 0.0 {
        return Ok(recip_gamma(p.beta));
    }
    if z > 0.0 {
        let scale = z.powf(1.0 / p.alpha);
        if scale <= ML_ASYMPTOTIC_SWITCH {
            return ml_series(p, z).map(|(value, _)| value);
        }
        return ml_asymptotic_positive(p, z);
    }
    ml_negative(p, z)
}

fn ml_term(p: MLParams, z: f64, k: usize) -> f64 {
    let arg = p.alpha * k as f64 + p.beta;
    if arg < 170.0 && k < i32::MAX as usize {
        let zp = z.powi(k as i32);
        if zp.is_finite() && zp != 0.0 {
            return zp * recip_gamma(arg);
        }
    }
    let sign = if z < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
    sign * (k as f64 * z.abs().ln() - ln_gamma(arg)).exp()
}

/// Series value together with the sum of absolute term values.
fn ml_series(p: MLParams, z: f64) -> Result<(f64, f64)> {
    let mut acc = CompensatedSum::default();
    let mut abs_sum = 0.0;
    for k in 0..MAX_SERIES_TERMS {
        let term = ml_term(p, z, k);
        acc.add(term);
        abs_sum += term.abs();
        if !abs_sum.is_finite() {
            return Err(HawkesError::Overflow(format!(
                "Mittag-Leffler series overflows at z = {z}"
            )));
        }
        // Γ is increasing past 2, so the terms are monotone from there on.
        let past_minimum = p.alpha * k as f64 + p.beta > 2.0;
        if past_minimum && term.abs() <= SERIES_TOL * acc.value().abs() {
            return Ok((acc.value(), abs_sum));
        }
        if past_minimum && term == 0.0 {
            return Ok((acc.value(), abs_sum));
        }
    }
    Err(HawkesError::NonConvergence(format!(
        "Mittag-Leffler series for (α={}, β={}) at z = {z} exceeded {MAX_SERIES_TERMS} terms",
        p.alpha, p.beta
    )))
}

/// `(ln |1/Γ(x)|, sign of 1/Γ(x), ln of the sin-free envelope)`; the
/// envelope drops the oscillating `|sin(πx)|` of the reflection formula.
fn ln_recip_gamma(x: f64) -> (f64, f64, f64) {
    if x > 0.0 {
        let l = -ln_gamma(x);
        return (l, 1.0, l);
    }
    let s = (std::f64::consts::PI * x).sin();
    let envelope = ln_gamma(1.0 - x) - std::f64::consts::PI.ln();
    if x == x.floor() || s == 0.0 {
        return (f64::NEG_INFINITY, 0.0, envelope);
    }
    (envelope + s.abs().ln(), s.signum(), envelope)
}

/// `-Σ_{k≥1} z^(-k) / Γ(β - αk)`, truncated where the term envelope is
/// smallest. Returns the value and the envelope of the first omitted term.
fn ml_algebraic_tail(p: MLParams, z: f64) -> (f64, f64) {
    let ln_z = z.abs().ln();
    let mut acc = CompensatedSum::default();
    if p.alpha == p.alpha.floor() && p.beta == p.beta.floor() {
        // β - αk runs into the poles of Γ: the expansion is a finite sum
        let mut k = 1.0;
        while p.beta - p.alpha * k > 0.0 {
            acc.add(-z.powf(-k) * recip_gamma(p.beta - p.alpha * k));
            k += 1.0;
        }
        return (acc.value(), 0.0);
    }
    let mut prev_envelope = f64::INFINITY;
    for k in 1..MAX_SERIES_TERMS {
        let kf = k as f64;
        let (ln_mag, sign, ln_env) = ln_recip_gamma(p.beta - p.alpha * kf);
        let env = ln_env - kf * ln_z;
        if env > prev_envelope {
            return (acc.value(), env.exp());
        }
        prev_envelope = env;
        if sign != 0.0 {
            let z_sign = if z < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
            acc.add(-z_sign * sign * (ln_mag - kf * ln_z).exp());
        }
        if env.exp() < 1e-18 * acc.value().abs() {
            return (acc.value(), env.exp());
        }
    }
    (acc.value(), prev_envelope.exp())
}

fn ml_asymptotic_positive(p: MLParams, z: f64) -> Result<f64> {
    if p.alpha > 2.0 {
        return Err(HawkesError::Unsupported(format!(
            "Mittag-Leffler asymptotics for alpha = {} > 2",
            p.alpha
        )));
    }
    let scale = z.powf(1.0 / p.alpha);
    let log_lead = -p.alpha.ln() + (1.0 - p.beta) / p.alpha * z.ln() + scale;
    if log_lead >= LN_MAX {
        return Err(HawkesError::Overflow(format!(
            "E_{{{},{}}}({z}) exceeds the f64 range",
            p.alpha, p.beta
        )));
    }
    let (tail, _) = ml_algebraic_tail(p, z);
    Ok(log_lead.exp() + tail)
}

/// Residue contributions `(1/α) s^(1-β) e^s` of the poles `s^α = z`, `z < 0`,
/// that lie inside the Hankel contour. Returns the sum and an additional
/// error term for the cases we cannot resolve.
fn ml_negative_poles(p: MLParams, z: f64) -> (f64, f64) {
    let r = z.abs().powf(1.0 / p.alpha);
    let beta_is_int = p.beta == p.beta.floor();
    if p.alpha == 1.0 {
        // single pole on the negative axis, s = z
        let contribution = z.powf(1.0 - p.beta) * z.exp();
        return if beta_is_int {
            (contribution, 0.0)
        } else {
            (0.0, r.powf(1.0 - p.beta) * (-r).exp())
        };
    }
    if p.alpha < 1.0 {
        return (0.0, 0.0);
    }
    // 1 < α ≤ 2: conjugate pair at arg s = ±π/α
    let theta = std::f64::consts::PI / p.alpha;
    let modulus = r.powf(1.0 - p.beta) * (r * theta.cos()).exp() / p.alpha;
    let phase = theta * (1.0 - p.beta) + r * theta.sin();
    (2.0 * modulus * phase.cos(), 0.0)
}

fn ml_negative(p: MLParams, z: f64) -> Result<f64> {
    let series = ml_series(p, z);
    if let Ok((value, abs_sum)) = series {
        let err = GAMMA_REL_EPS * abs_sum;
        if err <= ML_NEGATIVE_SERIES_TOL * value.abs() {
            return Ok(value);
        }
    }
    if p.alpha > 2.0 {
        return series.map(|(v, _)| v);
    }
    let (tail, tail_err) = ml_algebraic_tail(p, z);
    let (poles, pole_err) = ml_negative_poles(p, z);
    let asym = tail + poles;
    let asym_err = tail_err + pole_err + f64::EPSILON * asym.abs();
    if asym_err <= ML_MAX_REL_ERROR * 1e-3 * asym.abs() {
        return Ok(asym);
    }
    // Neither expansion is accurate at intermediate |z|: integrate along
    // the folded Hankel contour instead.
    let value = ml_negative_integral(p, -z)?;
    if !value.is_finite() {
        return Err(HawkesError::NonConvergence(format!(
            "E_{{{},{}}}({z}) cannot be evaluated to 1e-9 relative accuracy",
            p.alpha, p.beta
        )));
    }
    Ok(value)
}

/// `E_{α,β}(-x)` for `x > 0` and `α ≤ 2` from the inverse Laplace
/// transform of `s^(α-β) / (s^α + x)`, with the Hankel contour collapsed
/// onto the branch cut plus the residues of the poles it no longer encloses.
fn ml_negative_integral(p: MLParams, x: f64) -> Result<f64> {
    let (alpha, beta) = (p.alpha, p.beta);
    if beta >= 1.0 + alpha {
        // the fold is only valid when r^(α-β) stays integrable at the origin
        let lower = ml_negative_integral(
            MLParams {
                alpha,
                beta: beta - alpha,
            },
            x,
        )?;
        return Ok((recip_gamma(beta - alpha) - lower) / x);
    }
    if alpha == 1.0 {
        return ml_one_negative(beta, x);
    }
    let pi = std::f64::consts::PI;
    let (sin_b, sin_ab, cos_a) = (
        (pi * beta).sin(),
        (pi * (alpha - beta)).sin(),
        (pi * alpha).cos(),
    );
    // r = u^m absorbs the r^(α-β) singularity at the origin into dr
    let m = 1.0 / (alpha - beta + 1.0);
    let f = |u: f64| {
        let r = u.powf(m);
        let ra = r.powf(alpha);
        let den = ra * ra + 2.0 * x * ra * cos_a + x * x;
        m * (-r).exp() * (ra * sin_b - x * sin_ab) / den
    };
    // the denominator is smallest near r = x^(1/α); past r ≈ 745 e^{-r} underflows
    let peak = x.powf(1.0 / alpha).min(700.0);
    let cuts = [
        0.0,
        0.5 * peak,
        peak,
        2.0 * peak + 1.0,
        760.0_f64.max(2.0 * peak + 2.0),
    ]
    .map(|r: f64| r.powf(1.0 / m));
    let integral_with = |g: &dyn Fn(f64) -> f64, tol: f64| -> Result<f64> {
        let mut acc = CompensatedSum::default();
        for w in cuts.windows(2) {
            acc.add(crate::quadrature::integrate(g, w[0], w[1], tol)?);
        }
        Ok(acc.value() / pi)
    };
    let rough = integral_with(&f, 1e-8)?;
    let l1 = integral_with(&|u| f(u).abs(), 1e-6)?;
    let (poles, _) = ml_negative_poles(p, -x);
    // near a zero of E only absolute accuracy relative to ∫|f| is attainable
    let scale = rough
        .abs()
        .max((rough + poles).abs())
        .max(1e-3 * l1)
        .max(1e-300);
    Ok(integral_with(&f, 1e-13 * scale)? + poles)
}

/// `E_{1,β}(-x)`, from `∫_0^1 e^{-xu} (1-u)^(β-2) du / Γ(β-1)` once β > 1.
fn ml_one_negative(beta: f64, x: f64) -> Result<f64> {
    if beta <= 1.0 {
        return Ok(recip_gamma(beta) - x * ml_one_negative(beta + 1.0, x)?);
    }
    if beta == 2.0 {
        return Ok(-(-x).exp_m1() / x);
    }
    // 1 - u = w^(1/(β-1)) removes the endpoint singularity
    let q = 1.0 / (beta - 1.0);
    let f = |w: f64| (-x * (1.0 - w.powf(q))).exp();
    let rough = crate::quadrature::integrate(f, 0.0, 1.0, 1e-8)?;
    let value = crate::quadrature::integrate(f, 0.0, 1.0, 1e-13 * rough.abs().max(1e-300))?;
    Ok(value * recip_gamma(beta))
}

/// Regularized lower incomplete gamma function `P(a, x)`.
pub fn lower_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    incomplete_gamma_pq(a, x).map(|(p, _)| p)
}

/// Regularized upper incomplete gamma function `Q(a, x) = 1 - P(a, x)`,
/// computed without cancellation when `P` is close to one.
pub fn upper_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    incomplete_gamma_pq(a, x).map(|(_, q)| q)
}

/// Both regularized incomplete gamma functions. Series for `x < a + 1`,
/// Lentz continued fraction otherwise.
pub fn incomplete_gamma_pq(a: f64, x: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && a.is_finite()) {
        return domain(format!("incomplete gamma shape must be positive, got {a}"));
    }
    if x.is_nan() || x < 0.0 {
        return domain(format!(
            "incomplete gamma argument must be nonnegative, got {x}"
        ));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    if x.is_infinite() {
        return Ok((1.0, 0.0));
    }
    if x < a + 1.0 {
        let p = gamma_series(a, x)?;
        Ok((p, 1.0 - p))
    } else {
        let q = gamma_continued_fraction(a, x)?;
        Ok((1.0 - q, q))
    }
}

fn gamma_series(a: f64, x: f64) -> Result<f64> {
    let log_prefactor = -x + a * x.ln() - ln_gamma(a + 1.0);
    if log_prefactor < -745.0 {
        return Ok(0.0);
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..MAX_SERIES_TERMS {
        term *= x / (a + n as f64);
        sum += term;
        if term < sum * SERIES_TOL {
            return Ok((log_prefactor.exp() * sum).min(1.0));
        }
    }
    Err(HawkesError::NonConvergence(format!(
        "incomplete gamma series at (a={a}, x={x})"
    )))
}

fn gamma_continued_fraction(a: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let log_prefactor = -x + a * x.ln() - ln_gamma(a);
    if log_prefactor < -745.0 {
        return Ok(0.0);
    }
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_SERIES_TERMS {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            return Ok((log_prefactor.exp() * h).clamp(0.0, 1.0));
        }
    }
    Err(HawkesError::NonConvergence(format!(
        "incomplete gamma continued fraction at (a={a}, x={x})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ml(alpha: f64, beta: f64, z: f64) -> f64 {
        mittag_leffler(MLParams::new(alpha, beta).unwrap(), z).unwrap()
    }

    #[test]
    fn exponential_special_case() {
        assert_relative_eq!(ml(1.0, 1.0, 1.0), std::f64::consts::E, max_relative = 1e-14);
        for i in -40..=40 {
            let z = i as f64 * 0.5;
            assert_relative_eq!(ml(1.0, 1.0, z), z.exp(), max_relative = 1e-12);
        }
    }

    #[test]
    fn hyperbolic_and_trigonometric_cases() {
        assert_relative_eq!(ml(2.0, 1.0, 1.0), 1.0_f64.cosh(), max_relative = 1e-14);
        assert_relative_eq!(ml(2.0, 1.0, 9.0), 3.0_f64.cosh(), max_relative = 1e-13);
        assert_relative_eq!(ml(2.0, 1.0, -4.0), 2.0_f64.cos(), max_relative = 1e-12);
        assert_relative_eq!(
            ml(2.0, 2.0, 4.0),
            2.0_f64.sinh() / 2.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn zero_argument_keeps_first_term() {
        assert_relative_eq!(
            ml(0.5, 0.5, 0.0),
            0.564_189_583_547_756_3,
            max_relative = 1e-14
        );
    }

    #[test]
    fn asymptotic_branch_matches_series_at_the_switch() {
        // E_{1,1} crosses into the asymptotic regime at z = 50
        for z in [49.0, 50.5, 80.0, 300.0] {
            assert_relative_eq!(ml(1.0, 1.0, z), f64::exp(z), max_relative = 1e-12);
        }
        // E_{2,2}(z) = sinh(√z)/√z
        for z in [2400.0, 2600.0, 10_000.0] {
            let s = f64::sqrt(z);
            assert_relative_eq!(ml(2.0, 2.0, z), s.sinh() / s, max_relative = 1e-11);
        }
    }

    #[test]
    fn overflow_and_domain_errors() {
        let p = MLParams::new(1.0, 1.0).unwrap();
        assert!(matches!(
            mittag_leffler(p, 800.0),
            Err(HawkesError::Overflow(_))
        ));
        assert!(matches!(
            mittag_leffler(p, f64::NAN),
            Err(HawkesError::Domain(_))
        ));
        assert!(MLParams::new(0.0, 1.0).is_err());
        assert!(MLParams::new(1.0, -1.0).is_err());
    }

    #[test]
    fn incomplete_gamma_examples() {
        assert_relative_eq!(
            lower_incomplete_gamma(1.0, 1.0).unwrap(),
            1.0 - (-1.0f64).exp(),
            max_relative = 1e-14
        );
        assert_eq!(lower_incomplete_gamma(3.7, 0.0).unwrap(), 0.0);
        assert_relative_eq!(
            lower_incomplete_gamma(2.0, 2.0).unwrap(),
            1.0 - 3.0 * (-2.0f64).exp(),
            max_relative = 1e-13
        );
        // continued-fraction branch
        assert_relative_eq!(
            upper_incomplete_gamma(2.0, 10.0).unwrap(),
            11.0 * (-10.0f64).exp(),
            max_relative = 1e-13
        );
        assert!(lower_incomplete_gamma(0.0, 1.0).is_err());
        assert!(lower_incomplete_gamma(-1.0, 1.0).is_err());
        assert!(lower_incomplete_gamma(1.0, -1.0).is_err());
    }

    #[test]
    fn recip_gamma_handles_poles_and_reflection() {
        assert_eq!(recip_gamma(0.0), 0.0);
        assert_eq!(recip_gamma(-3.0), 0.0);
        assert_relative_eq!(
            recip_gamma(-0.5),
            -0.5 / std::f64::consts::PI.sqrt(),
            max_relative = 1e-13
        );
        assert_relative_eq!(recip_gamma(5.0), 1.0 / 24.0, max_relative = 1e-14);
    }
}
