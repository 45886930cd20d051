use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use zhs_cli::output::trajectory_csv;
use zhs_cli::{parse_trajectory, LoadedTrajectory};
use zhs_core::{FieldOffset, KinkState, PeakonState, Sample, Train, Trajectory};

const KINK: &str = r#"
schema = 1
b = 2

[initial]
family = "kink"
u = { amplitudes = [1.0], positions = [0.6931471805599453] }
v = { amplitudes = [1.0], positions = [0.0] }

[integrator]
method = "rk4"
dt = 1e-3
t_end = 10.0
"#;

fn zhs(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zhs"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

fn last_row(csv: &str) -> Vec<f64> {
    csv.lines()
        .last()
        .unwrap()
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect()
}

#[test]
fn simulate_then_verify_kink_pair() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "kink.toml", KINK);
    let out = zhs(
        &[
            "simulate-kink",
            "--config",
            "kink.toml",
            "--out",
            "sim",
            "--quiet",
        ],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stdout.is_empty());
    let csv = fs::read_to_string(dir.path().join("sim/trajectory.csv")).unwrap();
    let row = last_row(&csv);
    assert_eq!(row[0], 10.0);
    assert!((row[3] - (std::f64::consts::LN_2 - 2.5)).abs() <= 1e-8);
    assert!((row[4] + 2.5).abs() <= 1e-8);

    let verify = KINK.replace(
        "[initial]\nfamily = \"kink\"\nu = { amplitudes = [1.0], positions = [0.6931471805599453] }\nv = { amplitudes = [1.0], positions = [0.0] }",
        "[input]\ntrajectory = \"sim/trajectory.csv\"",
    );
    write(dir.path(), "verify.toml", &verify);
    let out = zhs(
        &["verify", "--config", "verify.toml", "--out", "check"],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: toml::Value =
        toml::from_str(&fs::read_to_string(dir.path().join("check/report.toml")).unwrap()).unwrap();
    assert_eq!(report["status"].as_str(), Some("pass"));
    assert!(report["weak"]["max"].as_float().unwrap() <= 1e-6);
}

#[test]
fn tampered_trajectory_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "kink.toml",
        &KINK.replace("t_end = 10.0", "t_end = 0.5"),
    );
    assert_eq!(
        zhs(
            &["simulate-kink", "--config", "kink.toml", "--out", "."],
            dir.path()
        )
        .status
        .code(),
        Some(0)
    );
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    // Freeze the v kink in place while u keeps moving.
    let tampered: String = csv
        .lines()
        .map(|l| {
            if l.starts_with('#') || l.starts_with('t') {
                format!("{l}\n")
            } else {
                let mut cols: Vec<&str> = l.split(',').collect();
                cols[4] = "0.0";
                format!("{}\n", cols.join(","))
            }
        })
        .collect();
    write(dir.path(), "bad.csv", &tampered);
    write(
        dir.path(),
        "verify.toml",
        "schema = 1\nb = 2\n[input]\ntrajectory = \"bad.csv\"\n[integrator]\nmethod = \"rk4\"\ndt = 1e-3\nt_end = 0.5\n",
    );
    let out = zhs(
        &["verify", "--config", "verify.toml", "--out", "check", "--quiet"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let report = fs::read_to_string(dir.path().join("check/report.toml")).unwrap();
    assert!(report.contains("status = \"fail\""));
}

#[test]
fn invalid_configs_exit_with_one_line_reason() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.toml", &KINK.replace("b = 2", "b = 0"));
    let out = zhs(&["simulate-kink", "--config", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("b must be a positive integer"), "{err}");

    let out = zhs(&["simulate-peakon", "--config", "../kink.toml"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    write(dir.path(), "kink.toml", KINK);
    let out = zhs(&["simulate-peakon", "--config", "kink.toml"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let out = zhs(&["symmetry", "--config", "kink.toml"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn seed_changes_hash_but_reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "kink.toml",
        &KINK.replace("t_end = 10.0", "t_end = 0.1"),
    );
    for (out, seed) in [("a", "5"), ("b", "5"), ("c", "6")] {
        let status = zhs(
            &[
                "verify",
                "--config",
                "kink.toml",
                "--out",
                out,
                "--seed",
                seed,
                "--quiet",
            ],
            dir.path(),
        );
        assert_eq!(status.status.code(), Some(0));
    }
    let read = |d: &str| fs::read(dir.path().join(d).join("report.toml")).unwrap();
    assert_eq!(read("a"), read("b"));
    let header = |d: &str| {
        String::from_utf8(read(d))
            .unwrap()
            .lines()
            .next()
            .unwrap()
            .to_string()
    };
    assert!(header("a").starts_with("# config-sha256: "));
    assert_ne!(header("a"), header("c"));
}

fn train(n: usize) -> impl Strategy<Value = Train> {
    (
        prop::collection::vec(
            any::<f64>().prop_filter("finite nonzero", |x| x.is_finite() && *x != 0.0),
            n,
        ),
        prop::collection::vec(-1e6f64..1e6, n),
    )
        .prop_map(|(a, p)| Train::new(a, p).unwrap())
}

proptest! {
    #[test]
    fn trajectory_csv_round_trips_bit_exact(
        us in prop::collection::vec(train(2), 1..6),
        vs in prop::collection::vec(train(1), 6),
        du in -10.0f64..10.0,
        kink in any::<bool>(),
    ) {
        let offset = FieldOffset { du, dv: 0.0 };
        let times = |n: usize| (0..n).map(|k| k as f64 * 0.1 + 1e-17);
        if kink {
            let samples = times(us.len())
                .zip(us.iter().zip(&vs))
                .map(|(t, (u, v))| Sample { t, state: KinkState::new(3, u.clone(), v.clone()).unwrap() })
                .collect();
            let traj = Trajectory::from_samples(samples, offset).unwrap();
            let back = parse_trajectory(&trajectory_csv(&traj, "h")).unwrap();
            prop_assert!(back == LoadedTrajectory::Kink(traj));
        } else {
            let samples = times(us.len())
                .zip(us.iter().zip(&vs))
                .map(|(t, (u, v))| Sample { t, state: PeakonState::new(2, u.clone(), v.clone()).unwrap() })
                .collect();
            let traj = Trajectory::from_samples(samples, offset).unwrap();
            let back = parse_trajectory(&trajectory_csv(&traj, "h")).unwrap();
            prop_assert!(back == LoadedTrajectory::Peakon(traj));
        }
    }
}
