//! Validation statistics: Monte Carlo estimates with standard errors,
//! Laplace transforms, Kolmogorov–Smirnov and χ² tests, time-change
//! diagnostics and Q-Q data.

use crate::baselines::{compensator_at, EventList};
use crate::error::{domain, HawkesError, Result};
use crate::kernels::{Baseline, KernelSpec};
use crate::specfun::upper_incomplete_gamma;

/// Terms of the Kolmogorov series.
pub const KOLMOGOROV_TERMS: usize = 100;
/// Minimum expected count per χ² cell after pooling.
pub const CHI_SQUARE_MIN_EXPECTED: f64 = 5.0;

/// Sum with a fixed pairwise order, independent of how the values were
/// produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Monte Carlo mean with its standard error `s / √n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithError {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

impl EstimateWithError {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let n = samples.len();
        if n == 0 {
            return Err(HawkesError::EmptySample);
        }
        let mean = pairwise_sum(samples) / n as f64;
        let std_error = if n > 1 {
            let dev: Vec<f64> = samples.iter().map(|x| (x - mean) * (x - mean)).collect();
            (pairwise_sum(&dev) / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            value: mean,
            std_error,
            n_samples: n,
        })
    }

    /// `|self - other| / √(se₁² + se₂²)`; infinite when both errors are
    /// zero and the values differ.
    pub fn z_score(&self, other: &EstimateWithError) -> f64 {
        z_score(self.value, self.std_error, other.value, other.std_error)
    }

    /// Distance to an exact value in units of the standard error.
    pub fn z_score_exact(&self, exact: f64) -> f64 {
        z_score(self.value, self.std_error, exact, 0.0)
    }
}

fn z_score(a: f64, se_a: f64, b: f64, se_b: f64) -> f64 {
    let diff = (a - b).abs();
    let se = (se_a * se_a + se_b * se_b).sqrt();
    if diff == 0.0 {
        0.0
    } else if se == 0.0 {
        f64::INFINITY
    } else {
        diff / se
    }
}

/// Estimate of `E[e^{wX}]`, `w ≤ 0`.
pub fn laplace_estimate(samples: &[f64], w: f64) -> Result<EstimateWithError> {
    if !(w <= 0.0) {
        return domain(format!("Laplace argument must be nonpositive, got {w}"));
    }
    let values: Vec<f64> = samples.iter().map(|x| (w * x).exp()).collect();
    EstimateWithError::from_samples(&values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KSResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// `P(sup|B| > x)` for a Brownian bridge `B`: the Kolmogorov survival
/// function. The alternating series converges slowly near zero, where the
/// equivalent theta-function form is used instead.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if !(x > 0.0) {
        return 1.0;
    }
    if x < 1.0 {
        // 1 - (√(2π)/x) Σ_{k≥1} exp(-(2k-1)² π² / (8x²))
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        let mut cdf = 0.0;
        for k in 1..=KOLMOGOROV_TERMS {
            let m = (2 * k - 1) as f64;
            let term = (-m * m * pi2 / (8.0 * x * x)).exp();
            cdf += term;
            if term < 1e-300 {
                break;
            }
        }
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / x * cdf;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for k in 1..=KOLMOGOROV_TERMS {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-300 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn sorted(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(HawkesError::EmptySample);
    }
    if samples.iter().any(|x| x.is_nan()) {
        return domain("sample contains NaN");
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// One-sample KS test of `samples` against the continuous CDF `cdf`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<KSResult> {
    let xs = sorted(samples)?;
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, x) in xs.iter().enumerate() {
        let f = cdf(*x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(KSResult {
        statistic: d,
        p_value: kolmogorov_survival(n.sqrt() * d),
        n: xs.len(),
    })
}

/// `sup_x |F_a(x) - F_b(x)|` between empirical CDFs, ties handled.
pub fn ecdf_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    let xa = sorted(a)?;
    let xb = sorted(b)?;
    Ok(ecdf_distance_sorted(&xa, &xb))
}

fn ecdf_distance_sorted(xa: &[f64], xb: &[f64]) -> f64 {
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Two-sample KS test with effective size `nm / (n + m)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KSResult> {
    let xa = sorted(a)?;
    let xb = sorted(b)?;
    let d = ecdf_distance_sorted(&xa, &xb);
    let (n, m) = (xa.len() as f64, xb.len() as f64);
    let eff = n * m / (n + m);
    Ok(KSResult {
        statistic: d,
        p_value: kolmogorov_survival(eff.sqrt() * d),
        n: eff.round() as usize,
    })
}

/// Empirical quantile with linear interpolation at position `p (n + 1)`.
fn quantile_sorted(xs: &[f64], p: f64) -> f64 {
    let n = xs.len();
    let pos = (p * (n as f64 + 1.0)).clamp(1.0, n as f64);
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if lo >= n || frac == 0.0 {
        return xs[lo.min(n) - 1];
    }
    xs[lo - 1] + frac * (xs[lo] - xs[lo - 1])
}

/// Matched quantiles of `a` and `b` at `k / (m + 1)`, `m = min(|a|, |b|)`.
pub fn qq_pairs(a: &[f64], b: &[f64]) -> Result<Vec<(f64, f64)>> {
    let xa = sorted(a)?;
    let xb = sorted(b)?;
    let m = xa.len().min(xb.len());
    Ok((1..=m)
        .map(|k| {
            let p = k as f64 / (m as f64 + 1.0);
            (quantile_sorted(&xa, p), quantile_sorted(&xb, p))
        })
        .collect())
}

/// Result of the random time-change diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeChangeResult {
    /// KS test of the transformed interarrival times against `Exp(1)`.
    pub ks: KSResult,
    /// `τ*_i = Λ(τ_i)`.
    pub transformed: Vec<f64>,
    /// `τ*_1 - 0, τ*_2 - τ*_1, ...`.
    pub interarrivals: Vec<f64>,
    /// `(e^{-Δ_i}, e^{-Δ_{i+1}})` for consecutive interarrivals; i.i.d.
    /// uniform on the unit square under the null.
    pub scatter: Vec<(f64, f64)>,
}

/// Maps event times through the exact compensator and tests the gaps
/// against a unit-rate Poisson process.
pub fn time_change_test(
    events: &EventList,
    kernel: &KernelSpec,
    baseline: &Baseline,
) -> Result<TimeChangeResult> {
    let times = events.times();
    if times.is_empty() {
        return Err(HawkesError::EmptySample);
    }
    let mut transformed = Vec::with_capacity(times.len());
    for (i, t) in times.iter().enumerate() {
        transformed.push(compensator_at(&times[..i], kernel, baseline, *t)?);
    }
    let mut interarrivals = Vec::with_capacity(times.len());
    let mut prev = 0.0;
    for t in &transformed {
        interarrivals.push(t - prev);
        prev = *t;
    }
    let ks = ks_one_sample(
        &interarrivals,
        |x| if x <= 0.0 { 0.0 } else { -(-x).exp_m1() },
    )?;
    let scatter = interarrivals
        .windows(2)
        .map(|w| ((-w[0]).exp(), (-w[1]).exp()))
        .collect();
    Ok(TimeChangeResult {
        ks,
        transformed,
        interarrivals,
        scatter,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Number of cells after pooling.
    pub cells: usize,
}

fn chi_square_p(statistic: f64, dof: usize) -> Result<f64> {
    if dof == 0 {
        return Ok(1.0);
    }
    upper_incomplete_gamma(dof as f64 / 2.0, statistic / 2.0)
}

/// Goodness of fit of integer samples to a Poisson law. Adjacent values
/// are pooled until every cell expects at least five observations.
pub fn chi_square_poisson(samples: &[u64], mean: f64) -> Result<ChiSquareResult> {
    if samples.is_empty() {
        return Err(HawkesError::EmptySample);
    }
    if !(mean > 0.0 && mean.is_finite()) {
        return domain(format!("Poisson mean must be positive, got {mean}"));
    }
    let n = samples.len() as f64;
    let max = *samples.iter().max().expect("nonempty");
    let upper = (max as usize).max((mean + 20.0 * mean.sqrt() + 20.0) as usize);
    let mut observed = vec![0f64; upper + 1];
    for s in samples {
        observed[*s as usize] += 1.0;
    }
    let mut probs = Vec::with_capacity(upper + 1);
    let mut p = (-mean).exp();
    for k in 0..=upper {
        if k > 0 {
            p *= mean / k as f64;
        }
        probs.push(p);
    }
    // the last cell collects the whole upper tail
    let head: f64 = probs[..upper].iter().sum();
    probs[upper] = (1.0 - head).max(0.0);
    let expected: Vec<f64> = probs.iter().map(|p| p * n).collect();
    chi_square_pooled(&observed, &expected, 0)
}

/// Pools adjacent cells left to right until each expects at least
/// [`CHI_SQUARE_MIN_EXPECTED`], merging a short final cell into its
/// neighbour. `fitted` parameters reduce the degrees of freedom.
pub fn chi_square_pooled(
    observed: &[f64],
    expected: &[f64],
    fitted: usize,
) -> Result<ChiSquareResult> {
    if observed.len() != expected.len() || observed.is_empty() {
        return domain("observed and expected counts must have the same nonzero length");
    }
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (oi, ei) in observed.iter().zip(expected) {
        o += oi;
        e += ei;
        if e >= CHI_SQUARE_MIN_EXPECTED {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => cells.push((o, e)),
        }
    }
    let statistic: f64 = cells
        .iter()
        .map(|(o, e)| if *e > 0.0 { (o - e) * (o - e) / e } else { 0.0 })
        .sum();
    let dof = cells.len().saturating_sub(1 + fitted);
    Ok(ChiSquareResult {
        statistic,
        dof,
        p_value: chi_square_p(statistic, dof)?,
        cells: cells.len(),
    })
}

/// χ² test of homogeneity for two samples of counts, with values pooled
/// into cells holding enough combined observations for every expected
/// count to reach five.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<ChiSquareResult> {
    if a.is_empty() || b.is_empty() {
        return Err(HawkesError::EmptySample);
    }
    let max = *a.iter().chain(b).max().expect("nonempty") as usize;
    let mut ca = vec![0f64; max + 1];
    let mut cb = vec![0f64; max + 1];
    for v in a {
        ca[*v as usize] += 1.0;
    }
    for v in b {
        cb[*v as usize] += 1.0;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let frac_min = na.min(nb) / (na + nb);
    // a cell with total t expects t·n_a/(n_a+n_b) and t·n_b/(n_a+n_b)
    let min_total = CHI_SQUARE_MIN_EXPECTED / frac_min;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut oa, mut ob) = (0.0, 0.0);
    for (x, y) in ca.iter().zip(&cb) {
        oa += x;
        ob += y;
        if oa + ob >= min_total {
            cells.push((oa, ob));
            oa = 0.0;
            ob = 0.0;
        }
    }
    if oa + ob > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += oa;
                last.1 += ob;
            }
            None => cells.push((oa, ob)),
        }
    }
    let total = na + nb;
    let mut statistic = 0.0;
    for (x, y) in &cells {
        let t = x + y;
        let ea = t * na / total;
        let eb = t * nb / total;
        statistic += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
    }
    let dof = cells.len().saturating_sub(1);
    Ok(ChiSquareResult {
        statistic,
        dof,
        p_value: chi_square_p(statistic, dof)?,
        cells: cells.len(),
    })
}
