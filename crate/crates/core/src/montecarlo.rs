//! Seeded, thread-count independent Monte Carlo batches.
//!
//! Path `i` always draws from `RngStream::new(seed, i)` and paths are cut
//! into fixed chunks of [`PATH_CHUNK`], so the per-path results do not
//! depend on the number of workers. Results come back in path order and
//! every reduction is a fixed-order pairwise sum.

use std::ops::Range;

use rayon::prelude::*;

use crate::baselines::EventList;
use crate::error::{HawkesError, Result};
use crate::rng::RngStream;
use crate::schemes::{PathRecord, Scheme};

/// Paths simulated together in one structure-of-arrays block.
pub const PATH_CHUNK: usize = 64;

/// Applies `f` to consecutive chunks of path indices in parallel and
/// concatenates the results in path order.
pub fn map_path_chunks<T, F>(n_paths: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> Vec<T> + Sync + Send,
{
    let chunks: Vec<Range<usize>> = (0..n_paths)
        .step_by(PATH_CHUNK)
        .map(|start| start..(start + PATH_CHUNK).min(n_paths))
        .collect();
    chunks.into_par_iter().flat_map_iter(&f).collect()
}

/// Simulates `n_paths` grid paths and maps each through `summarize`.
pub fn map_scheme_paths<T, F>(scheme: &Scheme, n_paths: usize, seed: u64, summarize: F) -> Vec<T>
where
    T: Send,
    F: Fn(&PathRecord) -> T + Sync + Send,
{
    map_path_chunks(n_paths, |range| {
        let mut streams: Vec<RngStream> = range.map(|i| RngStream::new(seed, i as u64)).collect();
        scheme
            .simulate_batch(&mut streams)
            .iter()
            .map(&summarize)
            .collect()
    })
}

/// Runs an exact sampler once per path; the first error aborts the batch.
pub fn map_event_paths<T, S, F>(
    n_paths: usize,
    seed: u64,
    sample: S,
    summarize: F,
) -> Result<Vec<T>>
where
    T: Send,
    S: Fn(&mut RngStream) -> Result<EventList> + Sync + Send,
    F: Fn(&EventList) -> T + Sync + Send,
{
    map_path_chunks(n_paths, |range| {
        range
            .map(|i| {
                let mut r = RngStream::new(seed, i as u64);
                sample(&mut r).map(|e| summarize(&e))
            })
            .collect()
    })
    .into_iter()
    .collect()
}

/// Terminal values `N_T`, `Λ_T` and `[Z]_T` per path.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TerminalValues {
    pub counts: Vec<f64>,
    pub compensator: Vec<f64>,
    pub quadratic_variation: Vec<f64>,
    /// Total resolvent cap events over the batch.
    pub cap_events: usize,
}

impl TerminalValues {
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

impl FromIterator<(f64, f64, f64, usize)> for TerminalValues {
    fn from_iter<I: IntoIterator<Item = (f64, f64, f64, usize)>>(iter: I) -> Self {
        let mut out = TerminalValues::default();
        for (n, l, q, c) in iter {
            out.counts.push(n);
            out.compensator.push(l);
            out.quadratic_variation.push(q);
            out.cap_events += c;
        }
        out
    }
}

pub fn scheme_terminal_values(scheme: &Scheme, n_paths: usize, seed: u64) -> TerminalValues {
    map_scheme_paths(scheme, n_paths, seed, |p| {
        (
            p.total_count() as f64,
            p.integrated_intensity(),
            p.quadratic_variation(),
            p.cap_events,
        )
    })
    .into_iter()
    .collect()
}

/// Runs `f` on a dedicated pool with `threads` workers (the global pool
/// when `None`).
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(HawkesError::Config("thread count must be positive".into())),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| HawkesError::Config(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
