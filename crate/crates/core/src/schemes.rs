//! Grid schemes for the counting process `N` and its compensator `Λ`.
//!
//! All variants share the same step: given the predictable part `α_i`
//! of the next integrated-intensity increment, draw the increment itself
//! and the number of jumps in `[t_i, t_{i+1})`.
//!
//! * [`Variant::IVi`]: `ξ ~ IG(α/(1-k₀), (α/k₀)²)`, `N̂ ~ P(ξ)`, `Λ̂ = α + k₀ N̂`.
//! * [`Variant::ResolventIVi`]: convolution against the resolvent `r_j`
//!   of the martingale increments `Ẑ = N̂ - ξ`; `α` is capped at zero.
//! * [`Variant::ExplicitII`]: `N̂ ~ P(α)` directly.
//! * [`Variant::MarkovIVi`] / [`Variant::MultifactorIVi`]: the iVi step
//!   with the convolution replaced by an `O(1)` (per factor) recursion.
//!
//! The convolution variants cost `Θ(n²)` per path whatever the number of
//! jumps. [`Scheme::simulate_batch`] runs several paths in a
//! structure-of-arrays layout; each path keeps its own stream and the
//! per-path arithmetic is identical to a single-path run.

use crate::error::{HawkesError, Result};
use crate::kernels::{
    g0r_increments, grid_time, grid_weights, resolvent_grid_weights, Baseline, Grid, KernelSpec,
};
use crate::rng::{ig_draw, poisson_draw, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    IVi,
    ResolventIVi,
    ExplicitII,
    MarkovIVi,
    MultifactorIVi,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::IVi,
        Variant::ResolventIVi,
        Variant::ExplicitII,
        Variant::MarkovIVi,
        Variant::MultifactorIVi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::IVi => "ivi",
            Variant::ResolventIVi => "resolvent_ivi",
            Variant::ExplicitII => "explicit",
            Variant::MarkovIVi => "markov_ivi",
            Variant::MultifactorIVi => "multifactor_ivi",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == name)
    }
}

#[derive(Debug, Clone)]
pub struct SchemeConfig {
    pub kernel: KernelSpec,
    pub baseline: Baseline,
    pub horizon: f64,
    pub steps: usize,
    pub emit_jump_times: bool,
    pub variant: Variant,
}

impl SchemeConfig {
    pub fn new(
        kernel: KernelSpec,
        baseline: Baseline,
        horizon: f64,
        steps: usize,
        variant: Variant,
    ) -> Self {
        Self {
            kernel,
            baseline,
            horizon,
            steps,
            emit_jump_times: false,
            variant,
        }
    }

    pub fn with_jump_times(mut self, emit: bool) -> Self {
        self.emit_jump_times = emit;
        self
    }

    pub fn with_variant(&self, variant: Variant) -> Self {
        Self {
            variant,
            ..self.clone()
        }
    }
}

/// One simulated trajectory on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    /// `None` for paths binned from exact event lists.
    pub variant: Option<Variant>,
    pub horizon: f64,
    /// `Λ̂_{i,i+1}`.
    pub lambda_inc: Vec<f64>,
    /// `N̂_{i,i+1}`.
    pub n_inc: Vec<u64>,
    /// `Ẑ_{i,i+1} = N̂ - ξ`, resolvent variant only.
    pub z_inc: Option<Vec<f64>>,
    /// Sorted jump times in `[0, T)`, when requested.
    pub jump_times: Option<Vec<f64>>,
    /// Steps where the resolvent predictor was negative and capped at 0.
    pub cap_events: usize,
}

impl PathRecord {
    pub fn steps(&self) -> usize {
        self.n_inc.len()
    }

    /// `N_T`.
    pub fn total_count(&self) -> u64 {
        self.n_inc.iter().sum()
    }

    /// `Λ_T`.
    pub fn integrated_intensity(&self) -> f64 {
        self.lambda_inc.iter().sum()
    }

    /// `[Z]_T = Σ (N̂ - Λ̂)²`.
    pub fn quadratic_variation(&self) -> f64 {
        self.n_inc
            .iter()
            .zip(&self.lambda_inc)
            .map(|(n, l)| {
                let d = *n as f64 - l;
                d * d
            })
            .sum()
    }

    /// `N_{t_i}`, `i = 0..=n`.
    pub fn counting_path(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.n_inc.len() + 1);
        let mut acc = 0;
        out.push(0);
        for n in &self.n_inc {
            acc += n;
            out.push(acc);
        }
        out
    }

    /// `Λ_{t_i}`, `i = 0..=n`.
    pub fn compensator_path(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.lambda_inc.len() + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for l in &self.lambda_inc {
            acc += l;
            out.push(acc);
        }
        out
    }
}

/// Per-factor memory of the Markovian schemes.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovState {
    /// `y_{i,k}`.
    pub y: Vec<f64>,
    /// `e^{-b_k T/n}`.
    pub decay: Vec<f64>,
    /// `k_1^{n,(k)}`.
    pub k1: Vec<f64>,
}

impl MarkovState {
    fn for_kernel(kernel: &KernelSpec, grid: &Grid) -> Result<Self> {
        let h = grid.step_size();
        let (decay, k1) = match kernel {
            KernelSpec::Exponential { b, .. } => {
                let k1 = if grid.steps() > 1 {
                    grid.weights()[1]
                } else {
                    kernel.interval_integral(h, 2.0 * h)?
                };
                (vec![(-b * h).exp()], vec![k1])
            }
            KernelSpec::SumOfExponentials { c, b } => {
                let mut decay = Vec::with_capacity(c.len());
                let mut k1 = Vec::with_capacity(c.len());
                for (ck, bk) in c.iter().zip(b) {
                    let factor = KernelSpec::Exponential { c: *ck, b: *bk };
                    decay.push((-bk * h).exp());
                    k1.push(factor.interval_integral(h, 2.0 * h)?);
                }
                (decay, k1)
            }
            _ => {
                return Err(HawkesError::Config(format!(
                    "Markovian schemes need an exponential or sum-of-exponentials kernel, got {:?}",
                    kernel.family()
                )))
            }
        };
        Ok(Self {
            y: vec![0.0; decay.len()],
            decay,
            k1,
        })
    }

    /// `Σ_k y_k`.
    #[inline]
    pub fn memory(&self) -> f64 {
        self.y.iter().sum()
    }

    /// `y_k ← e^{-b_k h} y_k + k_1^{(k)} N̂`.
    #[inline]
    pub fn advance(&mut self, jumps: f64) {
        for ((y, d), k1) in self.y.iter_mut().zip(&self.decay).zip(&self.k1) {
            *y = d * *y + k1 * jumps;
        }
    }
}

/// A scheme with its grid quantities precomputed, ready to simulate paths.
#[derive(Debug, Clone)]
pub struct Scheme {
    cfg: SchemeConfig,
    grid: Grid,
    /// `ΔG_0` (or `ΔG_0^R` for the resolvent variant).
    dg: Vec<f64>,
    markov: Option<MarkovState>,
}

impl Scheme {
    pub fn new(cfg: &SchemeConfig) -> Result<Self> {
        let cfg = cfg.clone();
        let (grid, dg, markov) = match cfg.variant {
            Variant::IVi | Variant::ExplicitII => {
                let grid = grid_weights(&cfg.kernel, cfg.horizon, cfg.steps)?;
                let dg = cfg.baseline.increments(cfg.horizon, cfg.steps);
                (grid, dg, None)
            }
            Variant::ResolventIVi => {
                let grid = resolvent_grid_weights(&cfg.kernel, cfg.horizon, cfg.steps)?;
                let dg = g0r_increments(&cfg.baseline, &cfg.kernel, cfg.horizon, cfg.steps)?;
                (grid, dg, None)
            }
            Variant::MarkovIVi | Variant::MultifactorIVi => {
                let wanted = matches!(
                    (cfg.variant, &cfg.kernel),
                    (Variant::MarkovIVi, KernelSpec::Exponential { .. })
                        | (
                            Variant::MultifactorIVi,
                            KernelSpec::SumOfExponentials { .. }
                        )
                );
                if !wanted {
                    return Err(HawkesError::Config(format!(
                        "variant {} does not accept a {:?} kernel",
                        cfg.variant.name(),
                        cfg.kernel.family()
                    )));
                }
                let grid = grid_weights(&cfg.kernel, cfg.horizon, cfg.steps)?;
                let dg = cfg.baseline.increments(cfg.horizon, cfg.steps);
                let markov = MarkovState::for_kernel(&cfg.kernel, &grid)?;
                (grid, dg, Some(markov))
            }
        };
        if let Some(bad) = dg.iter().position(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(HawkesError::Domain(format!(
                "baseline increment {bad} is negative or not finite"
            )));
        }
        Ok(Self {
            cfg,
            grid,
            dg,
            markov,
        })
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `ΔG_0` (or `ΔG_0^R`) per step.
    pub fn baseline_increments(&self) -> &[f64] {
        &self.dg
    }

    pub fn variant(&self) -> Variant {
        self.cfg.variant
    }

    pub fn simulate(&self, r: &mut RngStream) -> PathRecord {
        self.simulate_batch(std::slice::from_mut(r))
            .pop()
            .expect("one path")
    }

    /// Simulates one path per stream.
    pub fn simulate_batch(&self, streams: &mut [RngStream]) -> Vec<PathRecord> {
        match self.cfg.variant {
            Variant::MarkovIVi | Variant::MultifactorIVi => {
                streams.iter_mut().map(|r| self.run_markov(r)).collect()
            }
            _ => self.run_convolution(streams),
        }
    }

    fn empty_record(&self) -> PathRecord {
        let n = self.cfg.steps;
        PathRecord {
            variant: Some(self.cfg.variant),
            horizon: self.cfg.horizon,
            lambda_inc: Vec::with_capacity(n),
            n_inc: Vec::with_capacity(n),
            z_inc: (self.cfg.variant == Variant::ResolventIVi).then(|| Vec::with_capacity(n)),
            jump_times: self.cfg.emit_jump_times.then(Vec::new),
            cap_events: 0,
        }
    }

    fn emit_times(&self, r: &mut RngStream, i: usize, count: u64, rec: &mut PathRecord) {
        if let Some(times) = rec.jump_times.as_mut() {
            let t0 = grid_time(self.cfg.horizon, self.cfg.steps, i);
            let t1 = grid_time(self.cfg.horizon, self.cfg.steps, i + 1);
            let start = times.len();
            for _ in 0..count {
                let mut t = t0 + (t1 - t0) * r.next_f64();
                if t >= t1 {
                    // rounding pushed the draw onto the right end point
                    t = f64::from_bits(t1.to_bits() - 1).max(t0);
                }
                times.push(t);
            }
            times[start..].sort_by(f64::total_cmp);
        }
    }

    fn run_convolution(&self, streams: &mut [RngStream]) -> Vec<PathRecord> {
        let p = streams.len();
        let n = self.cfg.steps;
        let w = self.grid.weights();
        let w0 = w[0];
        let variant = self.cfg.variant;
        let mut records: Vec<PathRecord> = (0..p).map(|_| self.empty_record()).collect();
        // hist[j * p + q] is N̂_j (or Ẑ_j) of path q
        let mut hist = vec![0.0f64; n * p];
        let mut acc = vec![0.0f64; p];
        for i in 0..n {
            acc.iter_mut().for_each(|a| *a = 0.0);
            // Σ_{j<i} w_{i-j} hist_j, accumulated in ascending j; four rows
            // per sweep keep the accumulator in registers without changing
            // the summation order.
            let mut j = 0;
            while j + 4 <= i {
                let (w0, w1, w2, w3) = (w[i - j], w[i - j - 1], w[i - j - 2], w[i - j - 3]);
                let rows = &hist[j * p..(j + 4) * p];
                let (r0, rest) = rows.split_at(p);
                let (r1, rest) = rest.split_at(p);
                let (r2, r3) = rest.split_at(p);
                for ((((a, h0), h1), h2), h3) in acc.iter_mut().zip(r0).zip(r1).zip(r2).zip(r3) {
                    let mut s = *a;
                    s += w0 * h0;
                    s += w1 * h1;
                    s += w2 * h2;
                    s += w3 * h3;
                    *a = s;
                }
                j += 4;
            }
            while j < i {
                let wij = w[i - j];
                let row = &hist[j * p..(j + 1) * p];
                for (a, h) in acc.iter_mut().zip(row) {
                    *a += wij * h;
                }
                j += 1;
            }
            for q in 0..p {
                let r = &mut streams[q];
                let rec = &mut records[q];
                let alpha = self.dg[i] + acc[q];
                let (jumps, lambda, stored) = match variant {
                    Variant::IVi => {
                        let (jumps, lambda) = ivi_step(r, alpha, w0);
                        (jumps, lambda, jumps as f64)
                    }
                    Variant::ExplicitII => {
                        let jumps = poisson_draw(r, alpha);
                        (jumps, alpha + w0 * jumps as f64, jumps as f64)
                    }
                    Variant::ResolventIVi => {
                        let alpha = if alpha < 0.0 {
                            rec.cap_events += 1;
                            0.0
                        } else {
                            alpha
                        };
                        let (jumps, lambda, z) = resolvent_step(r, alpha, w0);
                        rec.z_inc.as_mut().expect("resolvent record").push(z);
                        (jumps, lambda, z)
                    }
                    Variant::MarkovIVi | Variant::MultifactorIVi => unreachable!(),
                };
                hist[i * p + q] = stored;
                rec.n_inc.push(jumps);
                rec.lambda_inc.push(lambda);
                self.emit_times(r, i, jumps, rec);
            }
        }
        records
    }

    fn run_markov(&self, r: &mut RngStream) -> PathRecord {
        let mut state = self.markov.clone().expect("markov state");
        let w0 = self.grid.first_weight();
        let mut rec = self.empty_record();
        for i in 0..self.cfg.steps {
            let alpha = self.dg[i] + state.memory();
            let (jumps, lambda) = ivi_step(r, alpha, w0);
            state.advance(jumps as f64);
            rec.n_inc.push(jumps);
            rec.lambda_inc.push(lambda);
            self.emit_times(r, i, jumps, &mut rec);
        }
        rec
    }
}

/// One iVi step: returns `(N̂, Λ̂)`.
#[inline]
fn ivi_step(r: &mut RngStream, alpha: f64, k0: f64) -> (u64, f64) {
    if alpha == 0.0 {
        return (0, 0.0);
    }
    let xi = if k0 == 0.0 {
        // IG(α/(1-k₀), ·) collapses onto α as k₀ → 0
        alpha
    } else {
        let shape = alpha / k0;
        ig_draw(r, alpha / (1.0 - k0), shape * shape)
    };
    let jumps = poisson_draw(r, xi);
    (jumps, alpha + k0 * jumps as f64)
}

/// One resolvent-iVi step with a nonnegative `α`: returns `(N̂, Λ̂, Ẑ)`.
#[inline]
fn resolvent_step(r: &mut RngStream, alpha: f64, r0: f64) -> (u64, f64, f64) {
    if alpha == 0.0 {
        return (0, 0.0, 0.0);
    }
    let xi = if r0 == 0.0 {
        alpha
    } else {
        let shape = alpha / r0;
        ig_draw(r, alpha, shape * shape)
    };
    let jumps = poisson_draw(r, xi);
    let n = jumps as f64;
    (jumps, (alpha + r0 * n) / (1.0 + r0), n - xi)
}

pub fn simulate_ivi(cfg: &SchemeConfig, r: &mut RngStream) -> Result<PathRecord> {
    Ok(Scheme::new(&cfg.with_variant(Variant::IVi))?.simulate(r))
}

pub fn simulate_resolvent_ivi(cfg: &SchemeConfig, r: &mut RngStream) -> Result<PathRecord> {
    Ok(Scheme::new(&cfg.with_variant(Variant::ResolventIVi))?.simulate(r))
}

pub fn simulate_explicit(cfg: &SchemeConfig, r: &mut RngStream) -> Result<PathRecord> {
    Ok(Scheme::new(&cfg.with_variant(Variant::ExplicitII))?.simulate(r))
}

/// Markovian iVi: picks the single-factor or multifactor recursion from
/// the kernel family.
pub fn simulate_markov(cfg: &SchemeConfig, r: &mut RngStream) -> Result<PathRecord> {
    let variant = match cfg.kernel {
        KernelSpec::SumOfExponentials { .. } => Variant::MultifactorIVi,
        _ => Variant::MarkovIVi,
    };
    Ok(Scheme::new(&cfg.with_variant(variant))?.simulate(r))
}

/// Dispatches on `cfg.variant`.
pub fn simulate(cfg: &SchemeConfig, r: &mut RngStream) -> Result<PathRecord> {
    Ok(Scheme::new(cfg)?.simulate(r))
}

/// Left-endpoint intensity `λ_{t_i} ≈ g_0(t_i) + Σ_{j<i} K(t_i - t_j) N̂_j`,
/// `i = 0..=n`.
pub fn reconstruct_intensity(
    p: &PathRecord,
    k: &KernelSpec,
    g: &Baseline,
    grid: &Grid,
) -> Result<Vec<f64>> {
    let n = p.n_inc.len();
    if n != grid.steps() {
        return Err(HawkesError::Config(format!(
            "path has {n} steps but the grid has {}",
            grid.steps()
        )));
    }
    // K at the lags t_1..t_n
    let mut lag = vec![0.0; n + 1];
    if !k.is_zero() {
        for (l, v) in lag.iter_mut().enumerate().skip(1) {
            *v = k.eval(grid.time(l))?;
        }
    }
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut acc = g.rate(grid.time(i));
        for (j, jumps) in p.n_inc[..i].iter().enumerate() {
            if *jumps > 0 {
                acc += lag[i - j] * *jumps as f64;
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Largest relative violation of the discrete Volterra identity
/// `Λ_{t_m} = G_0(t_m) + Σ_{l<m} k_l N_{t_{m-l}}` over the grid points,
/// measured as `|lhs - rhs| / max(1, |lhs|)`.
///
/// `baseline_increments` are the `ΔG_0` used by the scheme.
pub fn volterra_residual(p: &PathRecord, weights: &[f64], baseline_increments: &[f64]) -> f64 {
    let n = p.n_inc.len();
    let counts = p.counting_path();
    let mut lhs = 0.0;
    let mut g = 0.0;
    let mut worst = 0.0f64;
    for m in 1..=n {
        lhs += p.lambda_inc[m - 1];
        g += baseline_increments[m - 1];
        let mut rhs = g;
        for l in 0..m {
            rhs += weights[l] * counts[m - l] as f64;
        }
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(kernel: KernelSpec, mu: f64, t: f64, n: usize, v: Variant) -> SchemeConfig {
        SchemeConfig::new(kernel, Baseline::constant(mu).unwrap(), t, n, v)
    }

    #[test]
    fn zero_baseline_gives_empty_paths() {
        let k = KernelSpec::gamma(8.1, 3.0, 2.0).unwrap();
        for v in [Variant::IVi, Variant::ResolventIVi, Variant::ExplicitII] {
            let mut r = RngStream::new(1, 0);
            let p = simulate(
                &cfg(k.clone(), 0.0, 1.0, 50, v).with_jump_times(true),
                &mut r,
            )
            .unwrap();
            assert_eq!(p.total_count(), 0);
            assert!(p.lambda_inc.iter().all(|l| *l == 0.0));
            assert!(p.jump_times.unwrap().is_empty());
        }
    }

    #[test]
    fn ivi_increment_identity_holds_by_construction() {
        let k = KernelSpec::exponential(4.0, 5.0).unwrap();
        let scheme = Scheme::new(&cfg(k, 10.0, 2.0, 100, Variant::IVi)).unwrap();
        let mut r = RngStream::new(3, 1);
        let p = scheme.simulate(&mut r);
        let w = scheme.grid().weights();
        for i in 0..p.steps() {
            let mut alpha = 0.0;
            for j in 0..i {
                alpha += w[i - j] * p.n_inc[j] as f64;
            }
            let alpha = scheme.baseline_increments()[i] + alpha;
            assert_eq!(p.lambda_inc[i], alpha + w[0] * p.n_inc[i] as f64);
        }
    }

    #[test]
    fn batch_matches_single_paths() {
        let k = KernelSpec::fractional_hurst(0.1, 0.1).unwrap();
        for v in [Variant::IVi, Variant::ResolventIVi, Variant::ExplicitII] {
            let scheme =
                Scheme::new(&cfg(k.clone(), 5.0, 3.0, 40, v).with_jump_times(true)).unwrap();
            let mut streams: Vec<_> = (0..7).map(|i| RngStream::new(9, i)).collect();
            let batch = scheme.simulate_batch(&mut streams);
            for (i, rec) in batch.iter().enumerate() {
                let single = scheme.simulate(&mut RngStream::new(9, i as u64));
                assert_eq!(&single, rec);
            }
        }
    }

    #[test]
    fn jump_times_are_binned_and_sorted() {
        let k = KernelSpec::exponential(4.0, 5.0).unwrap();
        let mut r = RngStream::new(5, 5);
        let p = simulate_ivi(
            &cfg(k, 10.0, 2.0, 20, Variant::IVi).with_jump_times(true),
            &mut r,
        )
        .unwrap();
        let times = p.jump_times.as_ref().unwrap();
        assert_eq!(times.len() as u64, p.total_count());
        assert!(times.windows(2).all(|w| w[0] <= w[1]));
        let h = 0.1;
        for (i, n) in p.n_inc.iter().enumerate() {
            let inside = times
                .iter()
                .filter(|t| **t >= i as f64 * h * (1.0 - 1e-15) && **t < (i + 1) as f64 * h)
                .count();
            assert_eq!(inside as u64, *n, "bin {i}");
        }
    }

    #[test]
    fn markov_requires_exponential_family() {
        let k = KernelSpec::gamma(8.1, 3.0, 2.0).unwrap();
        assert!(matches!(
            Scheme::new(&cfg(k, 1.0, 1.0, 10, Variant::MarkovIVi)),
            Err(HawkesError::Config(_))
        ));
        let k = KernelSpec::exponential(1.0, 2.0).unwrap();
        assert!(Scheme::new(&cfg(k, 1.0, 1.0, 10, Variant::MultifactorIVi)).is_err());
    }

    #[test]
    fn ill_posed_grid_is_reported() {
        let k = KernelSpec::exponential(30.0, 1.0).unwrap();
        assert!(matches!(
            Scheme::new(&cfg(k, 1.0, 1.0, 10, Variant::IVi)),
            Err(HawkesError::WellPosedness { .. })
        ));
    }

    #[test]
    fn single_factor_multifactor_matches_markov() {
        let exp = KernelSpec::exponential(4.0, 5.0).unwrap();
        let soe = KernelSpec::sum_of_exponentials(vec![4.0], vec![5.0]).unwrap();
        let a = simulate(
            &cfg(exp, 10.0, 2.0, 100, Variant::MarkovIVi),
            &mut RngStream::new(2, 2),
        )
        .unwrap();
        let b = simulate(
            &cfg(soe, 10.0, 2.0, 100, Variant::MultifactorIVi),
            &mut RngStream::new(2, 2),
        )
        .unwrap();
        assert_eq!(a.n_inc, b.n_inc);
        assert_eq!(a.lambda_inc, b.lambda_inc);
    }

    #[test]
    fn reconstructed_intensity_single_jump() {
        let k = KernelSpec::exponential(2.0, 3.0).unwrap();
        let g = Baseline::constant(1.5).unwrap();
        let grid = grid_weights(&k, 1.0, 4).unwrap();
        let mut n_inc = vec![0; 4];
        n_inc[0] = 1;
        let p = PathRecord {
            variant: Some(Variant::IVi),
            horizon: 1.0,
            lambda_inc: vec![0.0; 4],
            n_inc,
            z_inc: None,
            jump_times: None,
            cap_events: 0,
        };
        let lam = reconstruct_intensity(&p, &k, &g, &grid).unwrap();
        assert_eq!(lam.len(), 5);
        assert_eq!(lam[0], 1.5);
        for (i, l) in lam.iter().enumerate().skip(1) {
            let t = grid.time(i);
            assert!((l - (1.5 + 2.0 * (-3.0 * t).exp())).abs() < 1e-14);
        }
    }
}
