use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn swg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swg"))
        .args(args)
        .env("SWG_OUTPUT_DIR", dir)
        .output()
        .expect("failed to launch swg")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Data rows of a CSV file, split into fields.
fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn projection_study_writes_table_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = swg(
        dir.path(),
        &[
            "projection-study",
            "--r",
            "4",
            "--mesh",
            "uniform",
            "--N",
            "9,17,33,65",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));

    let csv = dir.path().join("projection-study.csv");
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("# projection study"));
    assert!(text.contains("# target = nonsmooth"));
    assert!(text.contains(
        "resolution,L2,rate_L2,H1semi,rate_H1semi,H2semi,rate_H2semi,H3semi,rate_H3semi,H3,rate_H3,Linf,rate_Linf"
    ));

    let table = rows(&csv);
    assert_eq!(table.len(), 4);
    assert_eq!(table[0][2], "-");
    // N = 65 against published values: L2 3.16e-9, |.|_1 7.76e-7, |.|_2 2.21e-4.
    let n65 = &table[3];
    assert_eq!(n65[0], "65");
    for (col, expected) in [(1, 3.16e-9), (3, 7.76e-7), (5, 2.21e-4), (7, 8.91e-2)] {
        let got: f64 = n65[col].parse().unwrap();
        assert!(
            got / expected < 1.5 && expected / got < 1.5,
            "column {col}: {got}"
        );
    }
    let l2_rate: f64 = n65[2].parse().unwrap();
    assert!((l2_rate - 3.5).abs() < 0.05);

    let plot = dir.path().join("projection-study.plot.csv");
    let plot = fs::read_to_string(plot).unwrap();
    assert!(plot.starts_with("h_max,log10_h_max,log10_L2,"));
    assert_eq!(plot.lines().count(), 5);
}

#[test]
fn conflicting_time_steps_are_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = swg(
        dir.path(),
        &[
            "spatial-study",
            "--N",
            "4",
            "--lambda",
            "0.05",
            "--k",
            "1e-4",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parity_violation_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = swg(
        dir.path(),
        &["spatial-study", "--mesh", "quasi-a", "--N", "8,9"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("N = 9"));
    let out = swg(
        dir.path(),
        &[
            "projection-study",
            "--r",
            "5",
            "--mu",
            "3",
            "--mesh",
            "quasi-b",
            "--N",
            "9,16",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn temporal_reference_not_finer_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = swg(
        dir.path(),
        &[
            "temporal-study",
            "--mesh",
            "uniform",
            "--N",
            "20",
            "--M",
            "60,65",
            "--M-ref",
            "65",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("M_ref"));
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn zero_data_solve_stays_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snap/zero.csv");
    let out = swg(
        dir.path(),
        &[
            "solve",
            "--mms",
            "0",
            "--mesh",
            "uniform",
            "--N",
            "8",
            "--M",
            "10",
            "--output",
            path.to_str().unwrap(),
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let table = rows(&path);
    assert_eq!(table.len(), 8 * 5 + 1);
    for row in &table {
        assert_eq!(row.len(), 3);
        assert_eq!(row[1].parse::<f64>().unwrap(), 0.0);
        assert_eq!(row[2].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn solve_reports_errors_for_manufactured_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = swg(dir.path(), &["solve", "--N", "20", "--T", "0.1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("M=40"), "{stdout}");
    assert!(stdout.contains("eta: L2"));
    let text = fs::read_to_string(dir.path().join("solve.csv")).unwrap();
    assert!(text.contains("# mesh = quasi-a"));
    assert!(text.contains("# L2_eta = "));
}

#[test]
fn divergence_gives_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let out = swg(
        dir.path(),
        &["solve", "--N", "40", "--lambda", "4", "--T", "0.5"],
    );
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    let text = fs::read_to_string(dir.path().join("solve.csv")).unwrap();
    assert!(text.contains("# diverged at step"));

    let out = swg(
        dir.path(),
        &[
            "spatial-study",
            "--N",
            "8,40",
            "--lambda",
            "4",
            "--T",
            "0.5",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    let table = rows(&dir.path().join("spatial-study.csv"));
    assert_eq!(table[1][1], "diverged");
}

#[test]
fn config_file_round_trip_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let dumped = swg(
        dir.path(),
        &[
            "spatial-study",
            "--r",
            "4",
            "--mesh",
            "quasi-a",
            "--N",
            "160,200,240",
            "--lambda",
            "0.05",
            "--T",
            "1",
            "--mms",
            "1",
            "--dump-config",
        ],
    );
    assert!(dumped.status.success(), "{}", stderr(&dumped));
    let cfg_path = dir.path().join("t1.toml");
    fs::write(&cfg_path, &dumped.stdout).unwrap();

    let again = swg(
        dir.path(),
        &["--config", cfg_path.to_str().unwrap(), "--dump-config"],
    );
    assert!(again.status.success(), "{}", stderr(&again));
    assert_eq!(again.stdout, dumped.stdout);

    let text = String::from_utf8_lossy(&dumped.stdout);
    assert!(text.contains("command = \"spatial-study\""));
    assert!(text.contains("lambda = 0.05"));

    let out = swg(
        dir.path(),
        &[
            "--config",
            cfg_path.to_str().unwrap(),
            "--N",
            "10,20",
            "--T",
            "0.2",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let table = rows(&dir.path().join("spatial-study.csv"));
    assert_eq!(table.len(), 2);
    assert_eq!(table[0][0], "10");
}

#[test]
fn missing_config_file_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = swg(dir.path(), &["--config", "/nonexistent/run.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("/nonexistent/run.toml"));
}
