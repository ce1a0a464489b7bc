//! End-to-end tests of the `kgo` binary: exit codes, output formats,
//! config-file merging and byte stability.

use std::io::Write;
use std::process::{Command, Output};

fn kgo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kgo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn csv_column(text: &str, column: &str) -> Vec<f64> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().expect("header").split(',').collect();
    let idx = header
        .iter()
        .position(|h| *h == column)
        .unwrap_or_else(|| panic!("column {column} in {header:?}"));
    lines
        .map(|line| {
            let cell = line.split(',').nth(idx).expect("cell");
            if cell == "NaN" {
                f64::NAN
            } else {
                cell.parse().unwrap_or_else(|_| panic!("numeric cell {cell:?}"))
            }
        })
        .collect()
}

const PDM_FLAT: &[&str] = &[
    "--kind", "pdm", "--alpha", "0", "--mass", "1", "--omega-osc", "1", "--xi", "1", "--kc", "0",
    "--l", "0", "--k", "0", "--n", "0",
];

#[test]
fn spectrum_reports_flat_closed_form_roots() {
    let out = kgo(&[&["spectrum"], PDM_FLAT].concat());
    assert!(out.status.success(), "{}", stderr(&out));
    let energies = csv_column(&stdout(&out), "E");
    assert_eq!(energies.len(), 2);
    let expected = 5.0_f64.sqrt();
    assert!((energies[0] + expected).abs() < 1e-9);
    assert!((energies[1] - expected).abs() < 1e-9);
}

#[test]
fn spectrum_missing_mass_exits_2_and_names_the_key() {
    let out = kgo(&[
        "spectrum", "--kind", "pdm", "--alpha", "0", "--omega-osc", "1", "--xi", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("mass"), "{}", stderr(&out));
}

#[test]
fn spectrum_empty_bracket_exits_3() {
    let out = kgo(&[&["spectrum"], PDM_FLAT, &["--e-min", "100", "--e-max", "101"]].concat());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn spectrum_json_mirrors_csv_columns() {
    let out = kgo(&[&["spectrum"], PDM_FLAT, &["--format", "json"]].concat());
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    let energies = value["E"].as_array().expect("E column");
    assert_eq!(energies.len(), 2);
    assert!((energies[1].as_f64().unwrap() - 5.0_f64.sqrt()).abs() < 1e-9);
    assert_eq!(value["n"][0], serde_json::json!(0));
}

#[test]
fn csv_output_is_byte_stable() {
    let first = kgo(&[&["spectrum"], PDM_FLAT].concat());
    let second = kgo(&[&["spectrum"], PDM_FLAT].concat());
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    let mut file = std::fs::File::create(&path).unwrap();
    writeln!(
        file,
        "# flat linear-coupling scenario\nkind = pdm\nmass = 1\nomega_osc = 1\nxi = 1\nalpha = 0\nn = 0"
    )
    .unwrap();

    let out = kgo(&["spectrum", "--config", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let energies = csv_column(&stdout(&out), "E");
    assert!((energies[1] - 5.0_f64.sqrt()).abs() < 1e-9);

    // flag overrides the file: n = 1 shifts the closed form to sqrt(7)
    let out = kgo(&["spectrum", "--config", path.to_str().unwrap(), "--n", "1"]);
    let energies = csv_column(&stdout(&out), "E");
    assert!((energies[1] - 7.0_f64.sqrt()).abs() < 1e-9);
}

#[test]
fn config_file_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.conf");
    std::fs::write(&path, "kind = pdm\nbogus = 1\n").unwrap();
    let out = kgo(&["spectrum", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bogus"));
}

#[test]
fn wavefunction_rejects_tiny_sample_count() {
    let out = kgo(&[&["wavefunction"], PDM_FLAT, &["--samples", "3"]].concat());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn wavefunction_output_is_normalized() {
    let out = kgo(&[&["wavefunction"], PDM_FLAT].concat());
    assert!(out.status.success());
    let text = stdout(&out);
    let xs = csv_column(&text, "x");
    let psi = csv_column(&text, "psi");
    let dx = xs[1] - xs[0];
    let mass: f64 = psi.iter().map(|p| p * p * dx).sum();
    assert!((mass - 1.0).abs() < 1e-4, "trapezoid mass {mass}");
}

#[test]
fn wavefunction_joint_state_has_n_nodes() {
    let out = kgo(&[
        "wavefunction", "--kind", "pdm", "--alpha", "1", "--mass", "1", "--omega-osc", "2",
        "--xi", "1", "--kc", "0.1", "--l", "-2", "--n", "1", "--joint", "--free", "omega-osc",
        "--guess-e", "5.9", "--guess-p", "2.0",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let psi = csv_column(&stdout(&out), "psi");
    let peak = psi.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut sign = 0i8;
    let mut nodes = 0;
    for &v in &psi {
        if v.abs() <= 1e-12 * peak {
            continue;
        }
        let s = if v > 0.0 { 1 } else { -1 };
        if sign != 0 && s != sign {
            nodes += 1;
        }
        sign = s;
    }
    assert_eq!(nodes, 1);
}

#[test]
fn verify_passes_on_worked_root() {
    let out = kgo(&[
        "verify", "--kind", "cornell", "--alpha", "1", "--mass", "1", "--omega-osc", "1",
        "--a-lin", "1", "--b-coul", "0", "--fd-points", "8000",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let relative = csv_column(&text, "relative_mismatch")[0];
    let overlap = csv_column(&text, "overlap")[0];
    assert!(relative <= 1e-3);
    assert!(overlap >= 0.999);
}

#[test]
fn scan_rejects_zero_steps() {
    let out = kgo(&[
        "scan", "--kind", "cornell", "--alpha", "0", "--mass", "1", "--omega-osc", "1",
        "--a-lin", "1", "--param", "alpha", "--from", "0", "--to", "1", "--steps", "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_alpha_zero_row_matches_spectrum() {
    let scan = kgo(&[
        "scan", "--kind", "pdm", "--alpha", "0", "--mass", "1", "--omega-osc", "1", "--xi", "1",
        "--param", "alpha", "--from", "0", "--to", "0", "--steps", "1",
    ]);
    assert!(scan.status.success(), "{}", stderr(&scan));
    let energies = csv_column(&stdout(&scan), "E");
    let spectrum = kgo(&[&["spectrum"], PDM_FLAT].concat());
    let expected = csv_column(&stdout(&spectrum), "E");
    assert_eq!(energies.len(), expected.len());
    for (a, b) in energies.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn scan_energies_increase_with_alpha() {
    let out = kgo(&[
        "scan", "--kind", "cornell", "--alpha", "0", "--mass", "1", "--omega-osc", "1",
        "--a-lin", "1", "--param", "alpha", "--from", "0", "--to", "1", "--steps", "3",
        "--levels", "0",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let params = csv_column(&text, "param");
    let energies = csv_column(&text, "E");
    let mut tops: Vec<(f64, f64)> = Vec::new();
    for (p, e) in params.iter().zip(&energies) {
        match tops.last_mut() {
            Some((lp, le)) if *lp == *p => *le = le.max(*e),
            _ => tops.push((*p, *e)),
        }
    }
    assert_eq!(tops.len(), 3);
    assert!(tops[0].1 < tops[1].1 && tops[1].1 < tops[2].1, "{tops:?}");
}

#[test]
fn scan_marks_failed_rows_with_nan() {
    // xi <= 0 is invalid for the pdm kind: the row is marked, not fatal
    let out = kgo(&[
        "scan", "--kind", "pdm", "--alpha", "0", "--mass", "1", "--omega-osc", "1", "--xi", "1",
        "--param", "xi", "--from", "-1", "--to", "1", "--steps", "2",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let energies = csv_column(&stdout(&out), "E");
    assert!(energies[0].is_nan());
    assert!(energies.iter().any(|e| e.is_finite()));
}

#[test]
fn selftest_passes() {
    let out = kgo(&["selftest"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("all checks passed"));
}

#[test]
fn kgo_threads_rejects_garbage() {
    let out = Command::new(env!("CARGO_BIN_EXE_kgo"))
        .args(["selftest"])
        .env("KGO_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("KGO_THREADS"));

    let out = Command::new(env!("CARGO_BIN_EXE_kgo"))
        .args(["selftest"])
        .env("KGO_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
}
