use std::path::Path;
use std::process::{Command, Output};

use spinstat_cli::config::RunConfig;
use spinstat_cli::output::{Metric, ResultEnvelope};

fn spinstat(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinstat"))
        .args(args)
        .arg("--output-dir")
        .arg(dir)
        .env_remove("SPINSTAT_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn envelope(path: &Path) -> ResultEnvelope {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

fn real(e: &ResultEnvelope, key: &str) -> f64 {
    match e.metrics[key] {
        Metric::Real(v) => v,
        Metric::Complex(_) => panic!("{key} is complex"),
    }
}

#[test]
fn interferometer_full_turn_for_spin_half() {
    let dir = tempfile::tempdir().unwrap();
    let out = spinstat(
        dir.path(),
        &[
            "interferometer",
            "--two-s",
            "1",
            "--alpha",
            "1.0",
            "--model",
            "dynamical",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let e = envelope(&dir.path().join("interferometer_2s1.json"));
    assert!(e.pass);
    assert_eq!(e.schema_version, "1.0");
    assert_eq!(real(&e, "phase"), std::f64::consts::PI);
    assert_eq!(e.parameters_echo.two_s, Some(1));
    assert_eq!(e.parameters_echo.model.as_deref(), Some("dynamical"));
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = spinstat(
        dir.path(),
        &["entangle-sweep", "--two-s", "1", "--alphas", "0:1:0.1"],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("entangle-sweep_2s1.csv")).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 12);
    assert!(lines[0].starts_with("alpha,concurrence,entropy_bits"));
    let last: Vec<&str> = lines[11].split(',').collect();
    assert_eq!(last[0].parse::<f64>().unwrap(), 1.0);
    assert_eq!(last[1].parse::<f64>().unwrap(), 1.0);
    let alphas: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(alphas.windows(2).all(|w| w[0] < w[1]));

    let out = spinstat(
        dir.path(),
        &[
            "entangle-sweep",
            "--two-s",
            "3",
            "--alphas",
            "0.25:0.75:0.5",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("entangle-sweep_2s3.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn forced_tolerance_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = spinstat(dir.path(), &["ll-check", "--tol", "squaring=1e-30"]);
    assert_eq!(out.status.code(), Some(2));
    let e = envelope(&dir.path().join("ll-check.json"));
    assert!(!e.pass);
    assert_eq!(e.tolerances["squaring"], 1e-30);
    assert_eq!(e.failed_checks.len(), 1);

    let cfg = dir.path().join("strict.toml");
    std::fs::write(
        &cfg,
        "subcommand = \"ll-check\"\n[parameters.tolerances]\nsquaring = 1e-30\n",
    )
    .unwrap();
    let out = spinstat(dir.path(), &["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out");
    for args in [
        vec!["bogus"],
        vec!["interferometer", "--alpha", "1.5"],
        vec!["interferometer", "--model", "sideways"],
        vec!["entangle-sweep", "--alphas", "0:1"],
        vec!["exchange-phase", "--schedule", "0:1"],
        vec!["spin-rep", "--two-s", "1000"],
        vec!["ll-check", "--tol", "nonsense=1"],
        vec!["gravito-check", "--grid-h", "0.5"],
    ] {
        let out = spinstat(&target, &args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    assert!(!target.exists());

    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "subcommand = \"all\"\nunknown = 3\n").unwrap();
    let out = spinstat(&target, &["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_and_version_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(spinstat(dir.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(spinstat(dir.path(), &["--version"]).status.code(), Some(0));
}

#[test]
fn env_var_sets_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_spinstat"))
        .args(["correlator-check", "--two-s", "1"])
        .env("SPINSTAT_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("correlator-check_2s1.json").exists());
    assert!(dir.path().join("correlator-check_2s1.csv").exists());
}

#[test]
fn echoed_parameters_reproduce_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 5] = [
        &[
            "interferometer",
            "--two-s",
            "3",
            "--alpha",
            "0.3",
            "--model",
            "mode_relabeling",
        ],
        &["entangle-sweep", "--two-s", "2", "--alphas", "0:1:0.25"],
        &[
            "exchange-phase",
            "--two-s",
            "1",
            "--schedule",
            "0:0.5:4,0.5:1:8.566370614359172",
        ],
        &[
            "gravito-check",
            "--omega",
            "-1,0.5,2",
            "--dt",
            "0.0005",
            "--seed",
            "99",
        ],
        &["ll-check", "--mass", "2.5", "--tol", "covariance=1e-8"],
    ];
    for args in runs {
        let first = dir.path().join("first");
        let out = spinstat(&first, args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        let json = std::fs::read_dir(&first)
            .unwrap()
            .map(|e| e.unwrap().path())
            .find(|p| p.extension().is_some_and(|x| x == "json"))
            .unwrap();
        let e = envelope(&json);
        let cfg = RunConfig::new(
            e.subcommand.parse().unwrap(),
            e.parameters_echo.clone(),
            e.seed,
        );
        let cfg_path = dir.path().join("echo.json");
        std::fs::write(&cfg_path, serde_json::to_vec(&cfg).unwrap()).unwrap();

        let second = dir.path().join("second");
        let out = spinstat(&second, &["run", "--config", cfg_path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        for entry in std::fs::read_dir(&first).unwrap() {
            let name = entry.unwrap().file_name();
            assert_eq!(
                std::fs::read(first.join(&name)).unwrap(),
                std::fs::read(second.join(&name)).unwrap(),
                "{args:?} {name:?}"
            );
        }
        std::fs::remove_dir_all(&first).unwrap();
        std::fs::remove_dir_all(&second).unwrap();
    }
}

#[test]
fn all_is_deterministic_and_seed_sensitive() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    assert_eq!(spinstat(&a, &["all", "--seed", "3"]).status.code(), Some(0));
    assert_eq!(spinstat(&b, &["all", "--seed", "3"]).status.code(), Some(0));
    assert_eq!(spinstat(&c, &["all", "--seed", "4"]).status.code(), Some(0));
    let read = |d: &Path, n: &str| std::fs::read(d.join(n)).unwrap();
    for entry in std::fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        assert_eq!(read(&a, &name), read(&b, &name), "{name}");
    }
    assert_ne!(read(&a, "ll-check.json"), read(&c, "ll-check.json"));
    let summary = envelope(&a.join("all.json"));
    assert!(summary.pass);
    assert_eq!(summary.metrics.len(), 7);
}

#[test]
fn all_fails_when_any_suite_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = spinstat(dir.path(), &["all", "--tol", "curl=1e-30"]);
    assert_eq!(out.status.code(), Some(2));
    let summary = envelope(&dir.path().join("all.json"));
    assert!(!summary.pass);
    assert_eq!(real(&summary, "gravito-check.pass"), 0.0);
    assert_eq!(real(&summary, "interferometer_2s1.pass"), 1.0);
}
