//! Exact reference samplers: the population (branching) method and
//! Ogata's thinning, plus conversion of event lists to grid paths.

use std::collections::VecDeque;

use crate::error::{HawkesError, Result};
use crate::kernels::{grid_time, Baseline, KernelSpec, ScalarFn};
use crate::rng::RngStream;
use crate::schemes::PathRecord;

/// Default shift for singular kernels in the thinning sampler.
pub const DEFAULT_SINGULAR_EPSILON: f64 = 1e-10;

/// Strictly increasing event times in `[0, T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EventList {
    times: Vec<f64>,
    horizon: f64,
    /// Points proposed by the sampler: migrants plus offspring for the
    /// population method, thinning candidates for Ogata.
    pub candidates: usize,
}

impl EventList {
    pub fn new(times: Vec<f64>, horizon: f64) -> Result<Self> {
        for (i, t) in times.iter().enumerate() {
            if !(*t >= 0.0 && *t <= horizon) {
                return Err(HawkesError::Domain(format!(
                    "event time {t} lies outside [0, {horizon}]"
                )));
            }
            if i > 0 && times[i - 1] >= *t {
                return Err(HawkesError::Unsorted(i));
            }
        }
        let candidates = times.len();
        Ok(Self {
            times,
            horizon,
            candidates,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn into_times(self) -> Vec<f64> {
        self.times
    }
}

fn check_horizon(horizon: f64) -> Result<()> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(HawkesError::Domain(format!(
            "horizon must be positive and finite, got {horizon}"
        )));
    }
    Ok(())
}

/// Points of a unit-rate Poisson process on `[0, mass)`.
fn unit_poisson_points(r: &mut RngStream, mass: f64, out: &mut Vec<f64>) {
    out.clear();
    if !(mass > 0.0) {
        return;
    }
    let mut s = 0.0;
    loop {
        s += -r.next_f64_open0().ln();
        if s >= mass {
            return;
        }
        out.push(s);
    }
}

/// Population (cluster) representation: migrants arrive with intensity
/// `g_0`, and every event at `τ` begets a Poisson process with intensity
/// `K(· - τ)` on `(τ, T)`. Both are sampled by time change through `G_0`
/// and `K̄`. Exact in law.
pub fn simulate_population(
    kernel: &KernelSpec,
    baseline: &Baseline,
    horizon: f64,
    r: &mut RngStream,
) -> Result<EventList> {
    check_horizon(horizon)?;
    kernel.validate()?;
    let mut queue = VecDeque::new();
    let mut scratch = Vec::new();
    let mut candidates = 0usize;

    unit_poisson_points(r, baseline.integral(horizon), &mut scratch);
    candidates += scratch.len();
    for &s in &scratch {
        let t = baseline.inverse_integral(s, horizon)?;
        if t < horizon {
            queue.push_back(t);
        }
    }

    let mut events = Vec::new();
    let fertile = !kernel.is_zero();
    while let Some(tau) = queue.pop_front() {
        events.push(tau);
        if !fertile {
            continue;
        }
        let window = horizon - tau;
        unit_poisson_points(r, kernel.integrated(window)?, &mut scratch);
        candidates += scratch.len();
        for &s in &scratch {
            let child = tau + kernel.inverse_integrated(s, window)?;
            if child < horizon && child > tau {
                queue.push_back(child);
            }
        }
    }
    events.sort_by(f64::total_cmp);
    let mut list = EventList::new(events, horizon)?;
    list.candidates = candidates;
    Ok(list)
}

/// Nonincreasing dominating kernel used to bound the intensity.
enum Envelope {
    Kernel,
    /// `K(t*)` on `[0, t*]`, `K` afterwards (`t*` the mode of `K`).
    Plateau {
        until: f64,
        level: f64,
    },
    Constant(f64),
    Custom(ScalarFn),
}

fn envelope_for(kernel: &KernelSpec, horizon: f64) -> Result<Envelope> {
    let unsupported = |what: &str| {
        Err(HawkesError::Config(format!(
            "thinning needs a nonincreasing kernel; {what} has no built-in dominating envelope, \
             supply a custom kernel with a monotone envelope"
        )))
    };
    Ok(match kernel {
        _ if kernel.is_zero() => Envelope::Kernel,
        KernelSpec::Exponential { b, .. } if *b >= 0.0 => Envelope::Kernel,
        KernelSpec::Exponential { .. } => Envelope::Constant(kernel.eval(horizon)?),
        KernelSpec::SumOfExponentials { .. } => Envelope::Kernel,
        KernelSpec::Fractional { alpha, .. } if *alpha <= 1.0 => Envelope::Kernel,
        KernelSpec::Fractional { .. } => Envelope::Constant(kernel.eval(horizon)?),
        KernelSpec::Gamma { alpha, .. } if *alpha <= 1.0 => Envelope::Kernel,
        KernelSpec::Gamma { b, alpha, .. } => {
            let mode = (alpha - 1.0) / b;
            Envelope::Plateau {
                until: mode,
                level: kernel.eval(mode)?,
            }
        }
        KernelSpec::MittagLeffler { .. } => return unsupported("the Mittag-Leffler kernel"),
        KernelSpec::TemperedMittagLeffler { .. } => {
            return unsupported("the tempered Mittag-Leffler kernel")
        }
        KernelSpec::Custom(c) => match &c.envelope {
            Some(f) => Envelope::Custom(f.clone()),
            None => return unsupported(&format!("custom kernel '{}'", c.name)),
        },
    })
}

impl Envelope {
    fn eval(&self, kernel: &KernelSpec, t: f64) -> Result<f64> {
        match self {
            Envelope::Kernel => kernel.eval(t),
            Envelope::Plateau { until, level } => {
                if t <= *until {
                    Ok(*level)
                } else {
                    kernel.eval(t)
                }
            }
            Envelope::Constant(v) => Ok(*v),
            Envelope::Custom(f) => Ok(f(t)),
        }
    }
}

/// Ogata's thinning with the kernel shifted by `epsilon`:
/// `λ(t) = g_0(t) + Σ K(max(t - τ_i, ε))`.
///
/// Exact for bounded nonincreasing kernels with `epsilon = 0`. Exponential
/// and sum-of-exponentials kernels use an `O(1)`-per-candidate recursion.
pub fn simulate_ogata(
    kernel: &KernelSpec,
    baseline: &Baseline,
    horizon: f64,
    r: &mut RngStream,
    epsilon: f64,
) -> Result<EventList> {
    check_horizon(horizon)?;
    kernel.validate()?;
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(HawkesError::Domain(format!(
            "epsilon must be nonnegative, got {epsilon}"
        )));
    }
    if kernel.is_singular() && epsilon == 0.0 {
        return Err(HawkesError::Config(
            "singular kernels need a positive shift epsilon for thinning".into(),
        ));
    }
    if let Some(list) = ogata_markov(kernel, baseline, horizon, r)? {
        return Ok(list);
    }
    let envelope = envelope_for(kernel, horizon)?;
    let fertile = !kernel.is_zero();
    let mut events: Vec<f64> = Vec::new();
    let mut candidates = 0usize;
    let mut t = 0.0;
    loop {
        let mut bound = baseline.range_max(t, horizon)?;
        if fertile {
            for tau in &events {
                bound += envelope.eval(kernel, (t - tau).max(epsilon))?;
            }
        }
        if !(bound > 0.0) {
            break;
        }
        t += -r.next_f64_open0().ln() / bound;
        if t >= horizon {
            break;
        }
        candidates += 1;
        let mut intensity = baseline.rate(t);
        if fertile {
            for tau in &events {
                intensity += kernel.eval((t - tau).max(epsilon))?;
            }
        }
        check_bound(intensity, bound, t)?;
        if r.next_f64() * bound <= intensity {
            events.push(t);
        }
    }
    let mut list = EventList::new(events, horizon)?;
    list.candidates = candidates;
    Ok(list)
}

fn check_bound(intensity: f64, bound: f64, t: f64) -> Result<()> {
    if intensity > bound * (1.0 + 1e-12) {
        return Err(HawkesError::Config(format!(
            "intensity {intensity} exceeds the thinning bound {bound} at t = {t}; \
             the kernel envelope does not dominate the kernel"
        )));
    }
    Ok(())
}

fn ogata_markov(
    kernel: &KernelSpec,
    baseline: &Baseline,
    horizon: f64,
    r: &mut RngStream,
) -> Result<Option<EventList>> {
    let (amp, rate): (Vec<f64>, Vec<f64>) = match kernel {
        KernelSpec::Exponential { c, b } if *b >= 0.0 => (vec![*c], vec![*b]),
        KernelSpec::SumOfExponentials { c, b } => (c.clone(), b.clone()),
        _ => return Ok(None),
    };
    // s_k = Σ_i c_k e^{-b_k (t - τ_i)} at the current time t
    let mut s = vec![0.0; amp.len()];
    let mut events = Vec::new();
    let mut candidates = 0usize;
    let mut t = 0.0;
    loop {
        let bound = baseline.range_max(t, horizon)? + s.iter().sum::<f64>();
        if !(bound > 0.0) {
            break;
        }
        let dt = -r.next_f64_open0().ln() / bound;
        t += dt;
        if t >= horizon {
            break;
        }
        candidates += 1;
        for (sk, bk) in s.iter_mut().zip(&rate) {
            *sk *= (-bk * dt).exp();
        }
        let intensity = baseline.rate(t) + s.iter().sum::<f64>();
        check_bound(intensity, bound, t)?;
        if r.next_f64() * bound <= intensity {
            events.push(t);
            for (sk, ck) in s.iter_mut().zip(&amp) {
                *sk += ck;
            }
        }
    }
    let mut list = EventList::new(events, horizon)?;
    list.candidates = candidates;
    Ok(Some(list))
}

/// Exact compensator `Λ(t) = G_0(t) + Σ_{τ_j < t} K̄(t - τ_j)`.
pub fn compensator_at(
    times: &[f64],
    kernel: &KernelSpec,
    baseline: &Baseline,
    t: f64,
) -> Result<f64> {
    let mut acc = baseline.integral(t);
    if !kernel.is_zero() {
        for tau in times.iter().take_while(|tau| **tau < t) {
            acc += kernel.integrated(t - tau)?;
        }
    }
    Ok(acc)
}

/// Bins an event list on the uniform grid and computes the exact
/// compensator increments between grid points.
pub fn counting_path_from_events(
    e: &EventList,
    kernel: &KernelSpec,
    baseline: &Baseline,
    steps: usize,
) -> Result<PathRecord> {
    if steps == 0 {
        return Err(HawkesError::Domain(
            "number of steps must be positive".into(),
        ));
    }
    let horizon = e.horizon();
    let mut n_inc = vec![0u64; steps];
    for &tau in e.times() {
        let mut i = ((tau / horizon) * steps as f64).floor() as usize;
        i = i.min(steps - 1);
        while i > 0 && tau < grid_time(horizon, steps, i) {
            i -= 1;
        }
        while i + 1 < steps && tau >= grid_time(horizon, steps, i + 1) {
            i += 1;
        }
        n_inc[i] += 1;
    }
    let mut lambda_inc = Vec::with_capacity(steps);
    let mut prev = 0.0;
    for i in 1..=steps {
        let next = compensator_at(e.times(), kernel, baseline, grid_time(horizon, steps, i))?;
        lambda_inc.push(next - prev);
        prev = next;
    }
    Ok(PathRecord {
        variant: None,
        horizon,
        lambda_inc,
        n_inc,
        z_inc: None,
        jump_times: Some(e.times().to_vec()),
        cap_events: 0,
    })
}
