//! Runs a validated experiment: one Monte Carlo batch per (scheme, n),
//! followed by the statistics requested in the config.

use std::time::Instant;

use hawkes_core::montecarlo::{map_event_paths, map_scheme_paths};
use hawkes_core::stats::chi_square_two_sample;
use hawkes_core::{
    compensator_at, counting_path_from_events, ks_two_sample, laplace_estimate,
    reconstruct_intensity, simulate_ogata, simulate_population, time_change_test,
    EstimateWithError, EventList, PathRecord, RngStream, Scheme, SchemeConfig,
};
use serde::Serialize;

use crate::config::{Experiment, Method};
use crate::error::CliError;

/// Step count used to bin exact paths for trajectory files when the config
/// lists no grid step counts.
pub const DEFAULT_TRAJECTORY_STEPS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub statistic: String,
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

impl Estimate {
    fn new(statistic: impl Into<String>, e: &EstimateWithError) -> Self {
        Self {
            statistic: statistic.into(),
            value: e.value,
            std_error: e.std_error,
            n_samples: e.n_samples,
        }
    }
}

/// A hypothesis test; `path` is set for per-path tests.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestRecord {
    pub test: String,
    pub against: String,
    pub path: Option<usize>,
    pub statistic: f64,
    pub p_value: f64,
    pub n_samples: usize,
}

/// Terminal values of one batch, kept for the comparisons.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Samples {
    pub counts: Vec<f64>,
    pub compensator: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchResult {
    pub scheme: String,
    /// Grid steps; 0 for the exact samplers.
    pub n: usize,
    pub paths: usize,
    /// Simulation time, including the per-path terminal statistics.
    pub wall_clock_seconds: f64,
    pub estimates: Vec<Estimate>,
    pub tests: Vec<TestRecord>,
    /// Resolvent predictor caps over the whole batch.
    pub cap_events: Option<usize>,
    /// Candidate points per path drawn by the exact samplers.
    pub mean_candidates: Option<f64>,
    #[serde(skip)]
    pub method: Option<Method>,
    #[serde(skip)]
    pub samples: Samples,
}

impl BatchResult {
    pub fn estimate(&self, statistic: &str) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.statistic == statistic)
    }

    pub fn test(&self, test: &str) -> Option<&TestRecord> {
        self.tests.iter().find(|t| t.test == test)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub reference: String,
    /// `-1 / E[N_T]` of the reference, when requested.
    pub w_reference: Option<f64>,
    pub results: Vec<BatchResult>,
}

impl Report {
    pub fn find(&self, scheme: &str, n: usize) -> Option<&BatchResult> {
        self.results.iter().find(|r| r.scheme == scheme && r.n == n)
    }
}

/// One trajectory on the grid: `t_i, N_{t_i}, Λ_{t_i}, λ_{t_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub scheme: String,
    pub n: usize,
    pub path: usize,
    pub t: Vec<f64>,
    pub counts: Vec<u64>,
    pub compensator: Vec<f64>,
    pub intensity: Vec<f64>,
}

/// The per-path data of the time-change diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeChangePath {
    pub scheme: String,
    pub n: usize,
    pub path: usize,
    pub times: Vec<f64>,
    pub transformed: Vec<f64>,
    pub interarrivals: Vec<f64>,
    pub scatter: Vec<(f64, f64)>,
}

#[derive(Debug, Default)]
pub struct Artifacts {
    pub report: Option<Report>,
    pub trajectories: Vec<Trajectory>,
    pub time_change_paths: Vec<TimeChangePath>,
}

#[derive(Debug, Clone, Copy)]
struct PathSummary {
    count: f64,
    compensator: f64,
    quadratic_variation: f64,
    caps: usize,
    candidates: usize,
}

fn stat(name: &str, xs: &[f64]) -> Result<Estimate, CliError> {
    let e = EstimateWithError::from_samples(xs).map_err(|source| CliError::Simulation {
        context: name.to_string(),
        source,
    })?;
    Ok(Estimate::new(name, &e))
}

fn laplace_name(quantity: &str, w: &str) -> String {
    format!("laplace_{quantity}[w={w}]")
}

impl Experiment {
    fn step_counts(&self, m: Method) -> Vec<usize> {
        if m.is_exact() {
            vec![0]
        } else {
            self.config.steps.clone()
        }
    }

    fn scheme(&self, m: Method, steps: usize, jump_times: bool) -> Result<Scheme, CliError> {
        let Method::Grid(variant) = m else {
            unreachable!("exact samplers have no grid")
        };
        let cfg = SchemeConfig::new(
            self.kernel.clone(),
            self.baseline.clone(),
            self.config.horizon,
            steps,
            variant,
        )
        .with_jump_times(jump_times);
        Scheme::new(&cfg).map_err(|e| CliError::from_core(m.name(), steps, e))
    }

    fn exact_path(&self, m: Method, r: &mut RngStream) -> hawkes_core::Result<EventList> {
        let (k, g, t) = (&self.kernel, &self.baseline, self.config.horizon);
        match m {
            Method::Population => simulate_population(k, g, t, r),
            Method::Ogata => simulate_ogata(k, g, t, r, self.config.ogata_epsilon),
            Method::Grid(_) => unreachable!("grid schemes are not event samplers"),
        }
    }

    /// Checks that every (scheme, n) can be set up before anything runs.
    pub fn check_schemes(&self) -> Result<(), CliError> {
        for &m in &self.methods {
            if !m.is_exact() {
                for n in self.step_counts(m) {
                    self.scheme(m, n, false)?;
                }
            }
        }
        Ok(())
    }

    fn run_batch(&self, m: Method, n: usize) -> Result<BatchResult, CliError> {
        let (paths, seed) = (self.config.paths, self.config.seed);
        let (summaries, seconds) = if m.is_exact() {
            let (k, g, t) = (&self.kernel, &self.baseline, self.config.horizon);
            let start = Instant::now();
            let out = map_event_paths(
                paths,
                seed,
                |r| self.exact_path(m, r),
                |e| {
                    compensator_at(e.times(), k, g, t).map(|lam| PathSummary {
                        count: e.len() as f64,
                        compensator: lam,
                        quadratic_variation: f64::NAN,
                        caps: 0,
                        candidates: e.candidates,
                    })
                },
            );
            let seconds = start.elapsed().as_secs_f64();
            let out: hawkes_core::Result<Vec<PathSummary>> =
                out.and_then(|v| v.into_iter().collect());
            (
                out.map_err(|e| CliError::from_core(m.name(), n, e))?,
                seconds,
            )
        } else {
            let scheme = self.scheme(m, n, false)?;
            let start = Instant::now();
            let out = map_scheme_paths(&scheme, paths, seed, |p| PathSummary {
                count: p.total_count() as f64,
                compensator: p.integrated_intensity(),
                quadratic_variation: p.quadratic_variation(),
                caps: p.cap_events,
                candidates: 0,
            });
            (out, start.elapsed().as_secs_f64())
        };

        let samples = Samples {
            counts: summaries.iter().map(|s| s.count).collect(),
            compensator: summaries.iter().map(|s| s.compensator).collect(),
        };
        let diff: Vec<f64> = summaries.iter().map(|s| s.count - s.compensator).collect();
        let mut estimates = vec![
            stat("mean_N", &samples.counts)?,
            stat("mean_Lambda", &samples.compensator)?,
            stat("mean_N_minus_Lambda", &diff)?,
        ];
        let mut cap_events = None;
        let mut mean_candidates = None;
        if m.is_exact() {
            let c: Vec<f64> = summaries.iter().map(|s| s.candidates as f64).collect();
            let e = stat("mean_candidates", &c)?;
            mean_candidates = Some(e.value);
            estimates.push(e);
        } else {
            let qv: Vec<f64> = summaries.iter().map(|s| s.quadratic_variation).collect();
            estimates.push(stat("mean_QV", &qv)?);
            if m == Method::Grid(hawkes_core::Variant::ResolventIVi) {
                let caps: Vec<f64> = summaries.iter().map(|s| s.caps as f64).collect();
                estimates.push(stat("cap_events_per_path", &caps)?);
                cap_events = Some(summaries.iter().map(|s| s.caps).sum());
            }
        }
        Ok(BatchResult {
            scheme: m.name().to_string(),
            n,
            paths,
            wall_clock_seconds: seconds,
            estimates,
            tests: Vec::new(),
            cap_events,
            mean_candidates,
            method: Some(m),
            samples,
        })
    }

    /// Simulates every (scheme, n), reference first, and attaches the
    /// requested statistics.
    pub fn run_batches(&self) -> Result<Report, CliError> {
        self.check_schemes()?;
        let mut order = vec![self.reference];
        order.extend(
            self.methods
                .iter()
                .copied()
                .filter(|m| *m != self.reference),
        );
        let mut results = Vec::new();
        for m in order {
            for n in self.step_counts(m) {
                results.push(self.run_batch(m, n)?);
            }
        }
        // the reference batch is the finest run of the reference scheme
        let reference_index = results
            .iter()
            .enumerate()
            .filter(|(_, r)| r.method == Some(self.reference))
            .max_by_key(|(_, r)| r.n)
            .map(|(i, _)| i)
            .expect("the reference scheme was run");

        let outputs = &self.config.outputs;
        let mut w_reference = None;
        if let Some(l) = &outputs.laplace {
            let mut ws: Vec<(f64, String)> = l.w.iter().map(|w| (*w, format!("{w}"))).collect();
            if l.reference_mean {
                let mean = results[reference_index]
                    .estimate("mean_N")
                    .expect("mean_N is always computed")
                    .value;
                if mean > 0.0 {
                    w_reference = Some(-1.0 / mean);
                    ws.push((-1.0 / mean, "ref".to_string()));
                }
            }
            for r in results.iter_mut() {
                for (w, label) in &ws {
                    for (quantity, xs) in
                        [("N", &r.samples.counts), ("Lambda", &r.samples.compensator)]
                    {
                        let e =
                            laplace_estimate(xs, *w).map_err(|source| CliError::Simulation {
                                context: format!(
                                    "{} with n = {}: Laplace transform",
                                    r.scheme, r.n
                                ),
                                source,
                            })?;
                        r.estimates
                            .push(Estimate::new(laplace_name(quantity, label), &e));
                    }
                }
            }
            let reference = results[reference_index].clone();
            for (i, r) in results.iter_mut().enumerate() {
                if i == reference_index {
                    continue;
                }
                let mut errors = Vec::new();
                for e in &r.estimates {
                    if !e.statistic.starts_with("laplace_") {
                        continue;
                    }
                    let base = reference.estimate(&e.statistic).expect("same statistics");
                    errors.push(Estimate {
                        statistic: format!("{}_error", e.statistic),
                        value: e.value - base.value,
                        std_error: e.std_error.hypot(base.std_error),
                        n_samples: e.n_samples,
                    });
                }
                r.estimates.extend(errors);
            }
        }

        if outputs.marginals {
            let reference = results[reference_index].clone();
            for (i, r) in results.iter_mut().enumerate() {
                if i == reference_index {
                    continue;
                }
                let context = |what: &str| format!("{} with n = {}: {what}", r.scheme, r.n);
                let ks = ks_two_sample(&r.samples.compensator, &reference.samples.compensator)
                    .map_err(|source| CliError::Simulation {
                        context: context("two-sample KS"),
                        source,
                    })?;
                let as_counts = |v: &[f64]| v.iter().map(|c| *c as u64).collect::<Vec<_>>();
                let chi = chi_square_two_sample(
                    &as_counts(&r.samples.counts),
                    &as_counts(&reference.samples.counts),
                )
                .map_err(|source| CliError::Simulation {
                    context: context("two-sample chi-square"),
                    source,
                })?;
                let against = format!("{}@{}", reference.scheme, reference.n);
                r.tests.push(TestRecord {
                    test: "ks2_Lambda".into(),
                    against: against.clone(),
                    path: None,
                    statistic: ks.statistic,
                    p_value: ks.p_value,
                    n_samples: r.paths,
                });
                r.tests.push(TestRecord {
                    test: "chi2_N".into(),
                    against,
                    path: None,
                    statistic: chi.statistic,
                    p_value: chi.p_value,
                    n_samples: r.paths,
                });
            }
        }

        Ok(Report {
            reference: self.reference.name().to_string(),
            w_reference,
            results,
        })
    }

    /// Event list of path `index`, from the exact sampler or from the jump
    /// times placed by the grid scheme.
    fn path_events(&self, m: Method, n: usize, index: usize) -> Result<EventList, CliError> {
        let mut r = RngStream::new(self.config.seed, index as u64);
        let events = if m.is_exact() {
            self.exact_path(m, &mut r)
        } else {
            let p = self.scheme(m, n, true)?.simulate(&mut r);
            EventList::new(
                p.jump_times.expect("jump times were requested"),
                self.config.horizon,
            )
        };
        events.map_err(|e| CliError::from_core(m.name(), n, e))
    }

    /// Runs the time-change test on paths `0..paths` of every batch and
    /// adds the per-path tests and the pass rate to `report`.
    pub fn run_time_change(&self, report: &mut Report) -> Result<Vec<TimeChangePath>, CliError> {
        let Some(tc) = &self.config.outputs.time_change else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        for r in report.results.iter_mut() {
            let m = r.method.expect("batches record their method");
            let mut passes = Vec::new();
            let mut p_values = Vec::new();
            for index in 0..tc.paths {
                let events = self.path_events(m, r.n, index)?;
                if events.is_empty() {
                    continue;
                }
                let res = time_change_test(&events, &self.kernel, &self.baseline)
                    .map_err(|e| CliError::from_core(m.name(), r.n, e))?;
                r.tests.push(TestRecord {
                    test: "time_change_ks".into(),
                    against: "exp1".into(),
                    path: Some(index),
                    statistic: res.ks.statistic,
                    p_value: res.ks.p_value,
                    n_samples: res.ks.n,
                });
                passes.push(if res.ks.p_value > tc.level { 1.0 } else { 0.0 });
                p_values.push(res.ks.p_value);
                out.push(TimeChangePath {
                    scheme: r.scheme.clone(),
                    n: r.n,
                    path: index,
                    times: events.into_times(),
                    transformed: res.transformed,
                    interarrivals: res.interarrivals,
                    scatter: res.scatter,
                });
            }
            if !passes.is_empty() {
                r.estimates.push(stat("time_change_pass_rate", &passes)?);
                r.estimates.push(stat("time_change_mean_p", &p_values)?);
            }
        }
        Ok(out)
    }

    /// Trajectory of path `index` for scheme `m` on `n` steps (exact paths
    /// are binned on `n` steps).
    pub fn trajectory(&self, m: Method, n: usize, index: usize) -> Result<Trajectory, CliError> {
        let steps = if m.is_exact() {
            self.config
                .steps
                .iter()
                .copied()
                .max()
                .unwrap_or(DEFAULT_TRAJECTORY_STEPS)
        } else {
            n
        };
        let horizon = self.config.horizon;
        let core = |e| CliError::from_core(m.name(), steps, e);
        let (path, intensity): (PathRecord, Vec<f64>) = if m.is_exact() {
            let events = self.path_events(m, n, index)?;
            let p = counting_path_from_events(&events, &self.kernel, &self.baseline, steps)
                .map_err(core)?;
            let mut lam = Vec::with_capacity(steps + 1);
            for i in 0..=steps {
                let t = hawkes_core::kernels::grid_time(horizon, steps, i);
                let mut acc = self.baseline.rate(t);
                for tau in events.times().iter().take_while(|tau| **tau < t) {
                    acc += self.kernel.eval(t - tau).map_err(core)?;
                }
                lam.push(acc);
            }
            (p, lam)
        } else {
            let scheme = self.scheme(m, steps, false)?;
            let p = scheme.simulate(&mut RngStream::new(self.config.seed, index as u64));
            let lam = reconstruct_intensity(&p, &self.kernel, &self.baseline, scheme.grid())
                .map_err(core)?;
            (p, lam)
        };
        Ok(Trajectory {
            scheme: m.name().to_string(),
            n: if m.is_exact() { 0 } else { steps },
            path: index,
            t: (0..=steps)
                .map(|i| hawkes_core::kernels::grid_time(horizon, steps, i))
                .collect(),
            counts: path.counting_path(),
            compensator: path.compensator_path(),
            intensity,
        })
    }

    pub fn trajectories(&self, indices: &[usize]) -> Result<Vec<Trajectory>, CliError> {
        self.check_schemes()?;
        let mut out = Vec::new();
        for &m in &self.methods {
            for n in self.step_counts(m) {
                for &i in indices {
                    out.push(self.trajectory(m, n, i)?);
                }
            }
        }
        Ok(out)
    }
}
