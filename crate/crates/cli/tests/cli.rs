use std::fs;
use std::path::Path;
use std::process::Command;

use hawkes_cli::{run_experiment, ExperimentConfig};

fn write_config(dir: &Path, json: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, json).unwrap();
    path
}

fn hawkes(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_hawkes"))
        .args(args)
        .env_remove("HAWKES_THREADS")
        .output()
        .unwrap()
}

const GAMMA: &str = r#"{
    "schemes": ["ivi", "resolvent_ivi", "population"],
    "kernel": { "family": "gamma", "params": { "c": 8.1, "b": 3.0, "alpha": 2.0 } },
    "baseline": { "mu": 5.0 },
    "horizon": 1.0,
    "steps": [20, 40],
    "paths": 500,
    "seed": 9,
    "outputs": {
        "laplace": { "w": [-0.1], "reference_mean": true },
        "marginals": true,
        "time_change": { "paths": 3 },
        "timing": true,
        "trajectories": [0, 7]
    }
}"#;

#[test]
fn outputs_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), GAMMA);
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("out{threads}"));
        let res = hawkes(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--threads",
            threads,
        ]);
        assert!(
            res.status.success(),
            "{}",
            String::from_utf8_lossy(&res.stderr)
        );
        outputs.push(out);
    }
    let mut compared = 0;
    for entry in fs::read_dir(&outputs[0]).unwrap() {
        let name = entry.unwrap().file_name();
        let name = name.to_str().unwrap();
        // wall-clock times are the only nondeterministic output
        if name == "timing.csv" || name == "summary.json" {
            continue;
        }
        let a = fs::read(outputs[0].join(name)).unwrap();
        let b = fs::read(outputs[1].join(name)).unwrap();
        assert_eq!(a, b, "{name} differs");
        compared += 1;
    }
    assert!(compared >= 10, "only {compared} files compared");
    // a rerun reproduces the results exactly
    let again = dir.path().join("again");
    let res = hawkes(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    assert_eq!(
        fs::read(outputs[0].join("results.csv")).unwrap(),
        fs::read(again.join("results.csv")).unwrap()
    );
}

#[test]
fn thread_count_can_come_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), GAMMA);
    let run = |threads: &str, out: &str| {
        let out = dir.path().join(out);
        let res = Command::new(env!("CARGO_BIN_EXE_hawkes"))
            .args([
                "laplace",
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ])
            .env("HAWKES_THREADS", threads)
            .output()
            .unwrap();
        assert!(
            res.status.success(),
            "{}",
            String::from_utf8_lossy(&res.stderr)
        );
        fs::read(out.join("results.csv")).unwrap()
    };
    assert_eq!(run("1", "a"), run("2", "b"));
    let bad = Command::new(env!("CARGO_BIN_EXE_hawkes"))
        .args(["laplace", "--config", cfg.to_str().unwrap()])
        .env("HAWKES_THREADS", "0")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn results_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), GAMMA);
    let out = dir.path().join("out");
    let res = hawkes(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let text = fs::read_to_string(out.join("results.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "scheme,n,statistic,value,std_error,n_samples"
    );
    let mut rows = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 6, "{line}");
        cols[3].parse::<f64>().unwrap();
        let se: f64 = cols[4].parse().unwrap();
        assert!(se >= 0.0, "{line}");
        assert!(cols[5].parse::<usize>().unwrap() > 0);
        rows += 1;
    }
    assert!(rows > 20);
    assert!(text.contains("ivi,40,laplace_N[w=ref],"));
    assert!(text.contains("ivi,40,laplace_N[w=ref]_error,"));
    assert!(text.contains("resolvent_ivi,20,cap_events_per_path,"));
    assert!(text.contains("population,0,time_change_pass_rate,"));
    let tests = fs::read_to_string(out.join("tests.csv")).unwrap();
    assert!(tests.contains("ivi,40,ks2_Lambda,population@0,,"));
    assert!(tests.contains("population,0,time_change_ks,exp1,2,"));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["reference"], "population");
    assert!(summary["w_reference"].as_f64().unwrap() < 0.0);
    assert_eq!(summary["results"].as_array().unwrap().len(), 5);
    assert!(out.join("timing.csv").exists());
    assert!(out.join("scatter_ivi_20.csv").exists());
    assert!(out.join("marginals_population_0.csv").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    let cfg = write_config(dir.path(), &GAMMA.replace("\"paths\": 500", "\"paths\": 0"));
    let res = hawkes(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("paths"));

    let cfg = write_config(dir.path(), "{ not json");
    assert_eq!(
        hawkes(&["simulate", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        hawkes(&["simulate", "--config", "/does/not/exist.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(hawkes(&["simulate"]).status.code(), Some(2));

    // K(0+) = ∞ needs enough steps for k_0 < 1
    let ill_posed = r#"{
        "schemes": ["ivi"],
        "kernel": { "family": "fractional", "params": { "c": 3.0, "alpha": 0.6 } },
        "baseline": { "mu": 1.0 },
        "horizon": 10.0,
        "steps": [2],
        "paths": 10
    }"#;
    let cfg = write_config(dir.path(), ill_posed);
    let res = hawkes(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out]);
    assert_eq!(
        res.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    assert!(String::from_utf8_lossy(&res.stderr).contains("n = 2"));

    let cfg = write_config(dir.path(), GAMMA);
    let res = hawkes(&[
        "bench",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out,
        "--seed",
        "4",
    ]);
    assert_eq!(res.status.code(), Some(0));
    assert!(Path::new(out).join("timing.csv").exists());
}

#[test]
fn trajectory_files_have_n_plus_one_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), GAMMA);
    let out = dir.path().join("traj");
    let res = hawkes(&[
        "trajectory",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--path",
        "3,5",
    ]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    assert!(!out.join("results.csv").exists());
    for (scheme, n) in [
        ("ivi", 20),
        ("ivi", 40),
        ("resolvent_ivi", 40),
        ("population", 0),
    ] {
        for path in [3, 5] {
            let text = fs::read_to_string(out.join(format!("trajectory_{scheme}_{n}_{path}.csv")))
                .unwrap();
            let mut lines = text.lines();
            assert_eq!(lines.next().unwrap(), "t,N,Lambda,lambda");
            let rows: Vec<Vec<f64>> = lines
                .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
                .collect();
            let steps = if n == 0 { 40 } else { n };
            assert_eq!(rows.len(), steps + 1);
            assert!(rows.iter().all(|r| r.len() == 4));
            assert_eq!(rows[0][..3], [0.0, 0.0, 0.0]);
            assert_eq!(rows[0][3], 5.0);
            assert!((rows[steps][0] - 1.0).abs() < 1e-15);
            assert!(rows
                .windows(2)
                .all(|w| w[1][1] >= w[0][1] && w[1][2] >= w[0][2]));
        }
    }
}

#[test]
fn memoryless_trajectories_are_flat() {
    let zero_kernel = r#"{
        "schemes": ["ivi", "explicit"],
        "kernel": { "family": "zero" },
        "baseline": { "mu": MU },
        "horizon": 2.0,
        "steps": [8],
        "paths": 3,
        "outputs": { "trajectories": [1] }
    }"#;
    for mu in ["0.0", "3.0"] {
        let exp = ExperimentConfig::from_json(&zero_kernel.replace("MU", mu))
            .unwrap()
            .validate()
            .unwrap();
        let artifacts = run_experiment(&exp).unwrap();
        assert!(artifacts.report.is_none());
        assert_eq!(artifacts.trajectories.len(), 2);
        let mu: f64 = mu.parse().unwrap();
        for t in &artifacts.trajectories {
            assert_eq!(t.t.len(), 9);
            assert!(t.intensity.iter().all(|l| *l == mu));
            for (i, l) in t.compensator.iter().enumerate() {
                assert!((l - mu * t.t[i]).abs() < 1e-12);
            }
            if mu == 0.0 {
                assert!(t.counts.iter().all(|c| *c == 0));
            }
        }
    }
}

#[test]
fn poisson_laplace_example() {
    let json = r#"{
        "schemes": ["ivi"],
        "kernel": { "family": "zero" },
        "baseline": { "mu": 5.0 },
        "horizon": 1.0,
        "steps": [10],
        "paths": 100000,
        "seed": 17,
        "outputs": { "laplace": { "w": [-0.2] } }
    }"#;
    let exp = ExperimentConfig::from_json(json)
        .unwrap()
        .validate()
        .unwrap();
    let report = run_experiment(&exp).unwrap().report.unwrap();
    let e = report
        .find("ivi", 10)
        .unwrap()
        .estimate("laplace_N[w=-0.2]")
        .unwrap();
    let exact = (5.0 * ((-0.2f64).exp() - 1.0)).exp();
    assert!((exact - 0.404).abs() < 1e-3);
    assert!(
        (e.value - exact).abs() < 3.0 * e.std_error,
        "{e:?} vs {exact}"
    );
    assert_eq!(e.n_samples, 100_000);
}
