//! CSV and JSON artifacts. Floats are written with 17 significant digits
//! so that every value round-trips exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::experiment::{Report, TimeChangePath, Trajectory};

pub const RESULTS_HEADER: &str = "scheme,n,statistic,value,std_error,n_samples";
pub const TESTS_HEADER: &str = "scheme,n,test,against,path,statistic,p_value,n_samples";
pub const TIMING_HEADER: &str =
    "scheme,n,paths,wall_clock_seconds,seconds_per_path,speedup_vs_reference,mean_candidates";
pub const TRAJECTORY_HEADER: &str = "t,N,Lambda,lambda";

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: PathBuf, text: String) -> Result<PathBuf, CliError> {
    fs::write(&path, text).map_err(CliError::io(&path))?;
    Ok(path)
}

pub fn results_csv(report: &Report) -> String {
    let mut s = String::new();
    writeln!(s, "{RESULTS_HEADER}").unwrap();
    for r in &report.results {
        for e in &r.estimates {
            writeln!(
                s,
                "{},{},{},{},{},{}",
                r.scheme,
                r.n,
                e.statistic,
                fmt_f64(e.value),
                fmt_f64(e.std_error),
                e.n_samples
            )
            .unwrap();
        }
    }
    s
}

pub fn tests_csv(report: &Report) -> String {
    let mut s = String::new();
    writeln!(s, "{TESTS_HEADER}").unwrap();
    for r in &report.results {
        for t in &r.tests {
            let path = t.path.map(|p| p.to_string()).unwrap_or_default();
            writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                r.scheme,
                r.n,
                t.test,
                t.against,
                path,
                fmt_f64(t.statistic),
                fmt_f64(t.p_value),
                t.n_samples
            )
            .unwrap();
        }
    }
    s
}

/// Wall-clock times with the speedup relative to the reference scheme's
/// finest run (reference time / scheme time).
pub fn timing_csv(report: &Report) -> String {
    let reference = report
        .results
        .iter()
        .filter(|r| r.scheme == report.reference)
        .max_by_key(|r| r.n)
        .map(|r| r.wall_clock_seconds);
    let mut s = String::new();
    writeln!(s, "{TIMING_HEADER}").unwrap();
    for r in &report.results {
        let speedup = reference.map_or(f64::NAN, |t| t / r.wall_clock_seconds);
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.scheme,
            r.n,
            r.paths,
            fmt_f64(r.wall_clock_seconds),
            fmt_f64(r.wall_clock_seconds / r.paths as f64),
            fmt_f64(speedup),
            r.mean_candidates.map(fmt_f64).unwrap_or_default()
        )
        .unwrap();
    }
    s
}

pub fn trajectory_csv(t: &Trajectory) -> String {
    let mut s = String::new();
    writeln!(s, "{TRAJECTORY_HEADER}").unwrap();
    for i in 0..t.t.len() {
        writeln!(
            s,
            "{},{},{},{}",
            fmt_f64(t.t[i]),
            t.counts[i],
            fmt_f64(t.compensator[i]),
            fmt_f64(t.intensity[i])
        )
        .unwrap();
    }
    s
}

pub fn marginals_csv(counts: &[f64], compensator: &[f64]) -> String {
    let mut s = String::new();
    writeln!(s, "path,N,Lambda").unwrap();
    for (i, (n, l)) in counts.iter().zip(compensator).enumerate() {
        writeln!(s, "{i},{},{}", *n as u64, fmt_f64(*l)).unwrap();
    }
    s
}

pub fn time_change_csv(paths: &[TimeChangePath]) -> String {
    let mut s = String::new();
    writeln!(s, "path,i,tau,transformed,interarrival").unwrap();
    for p in paths {
        for i in 0..p.times.len() {
            writeln!(
                s,
                "{},{i},{},{},{}",
                p.path,
                fmt_f64(p.times[i]),
                fmt_f64(p.transformed[i]),
                fmt_f64(p.interarrivals[i])
            )
            .unwrap();
        }
    }
    s
}

pub fn scatter_csv(paths: &[TimeChangePath]) -> String {
    let mut s = String::new();
    writeln!(s, "path,u,v").unwrap();
    for p in paths {
        for (u, v) in &p.scatter {
            writeln!(s, "{},{},{}", p.path, fmt_f64(*u), fmt_f64(*v)).unwrap();
        }
    }
    s
}

#[derive(Serialize)]
struct Summary<'a> {
    config: &'a ExperimentConfig,
    #[serde(flatten)]
    report: &'a Report,
}

/// Writes every artifact of a run into `dir` and returns the file paths.
pub fn write_artifacts(
    dir: &Path,
    config: &ExperimentConfig,
    report: Option<&Report>,
    trajectories: &[Trajectory],
    time_change: &[TimeChangePath],
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let mut written = Vec::new();
    if let Some(report) = report {
        written.push(write_file(dir.join("results.csv"), results_csv(report))?);
        if report.results.iter().any(|r| !r.tests.is_empty()) {
            written.push(write_file(dir.join("tests.csv"), tests_csv(report))?);
        }
        if config.outputs.timing {
            written.push(write_file(dir.join("timing.csv"), timing_csv(report))?);
        }
        if config.outputs.marginals {
            for r in &report.results {
                let name = format!("marginals_{}_{}.csv", r.scheme, r.n);
                let text = marginals_csv(&r.samples.counts, &r.samples.compensator);
                written.push(write_file(dir.join(name), text)?);
            }
        }
        let summary = Summary { config, report };
        let json = serde_json::to_string_pretty(&summary).expect("report serializes");
        written.push(write_file(dir.join("summary.json"), json + "\n")?);
    }
    for t in trajectories {
        let name = format!("trajectory_{}_{}_{}.csv", t.scheme, t.n, t.path);
        written.push(write_file(dir.join(name), trajectory_csv(t))?);
    }
    let mut groups: Vec<(&str, usize)> = time_change
        .iter()
        .map(|p| (p.scheme.as_str(), p.n))
        .collect();
    groups.dedup();
    for (scheme, n) in groups {
        let paths: Vec<TimeChangePath> = time_change
            .iter()
            .filter(|p| p.scheme == scheme && p.n == n)
            .cloned()
            .collect();
        written.push(write_file(
            dir.join(format!("timechange_{scheme}_{n}.csv")),
            time_change_csv(&paths),
        )?);
        written.push(write_file(
            dir.join(format!("scatter_{scheme}_{n}.csv")),
            scatter_csv(&paths),
        )?);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let x = 0.1 + 0.2;
        let s = fmt_f64(x);
        assert_eq!(s.parse::<f64>().unwrap(), x);
        assert_eq!(s, "3.0000000000000004e-1");
    }
}
