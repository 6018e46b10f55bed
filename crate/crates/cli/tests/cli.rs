use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv: Vec<&str> = std::iter::once("rpm").chain(args.iter().copied()).collect();
    let code = rpm_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn significant_digits(s: &str) -> usize {
    let digits: String = s.chars().filter(|c| c.is_ascii_digit()).collect();
    digits.trim_start_matches('0').len()
}

#[test]
fn solve_quartic_ground_state() {
    let (code, out, _) = run(&["solve", "--potential", "quartic", "--parity", "0", "--d", "0", "--dmax", "11", "--digits", "20"]);
    assert_eq!(code, 0);
    assert!(out.contains("1.0603620904841828996"));
    let v: Value = serde_json::from_str(&out).unwrap();
    let r = &v["results"][0];
    for key in ["D", "d", "root", "certified_digits", "residual"] {
        assert!(!r[key].is_null(), "missing {key}");
    }
    assert_eq!(v["meta"]["version"], "0.1.0");
    assert!(v["meta"]["precision"].as_u64().unwrap() >= 40);
}

#[test]
fn hankel_polynomial_text() {
    let (code, out, _) = run(&["hankel-poly", "--potential", "x2x4:lambda=L", "--parity", "0", "--D", "2", "--d", "0", "--monic"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "E^6 - 27*E^4 + 162*E^3*L + 51*E^2 - 162*E*L - 189*L^2 - 25");
}

#[test]
fn spurious_table_has_both_columns() {
    let v = json(&["table", "--name", "spurious"]);
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[6]["E0_MPT"], "-4.0000000000000000000");
    assert_eq!(rows[6]["E0_PT"], "-9.0000000000000000000");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["solve", "--potential", "sextic"]).0, 3);
    assert_eq!(run(&["solve", "--potential", "x2x4:lambda=0.1"]).0, 3);
    assert_eq!(run(&["solve"]).0, 3);
    assert_eq!(run(&["solve", "--potential", "quartic", "--parity", "2"]).0, 3);
    assert_eq!(run(&["solve", "--bogus"]).0, 3);
    assert_eq!(run(&["expect", "--potential", "quartic", "--observable", "0,0"]).0, 3);
    assert_eq!(run(&["sequence", "--potential", "harmonic", "--window", "100,101"]).0, 2);
    assert_eq!(run(&["table", "--name", "nope"]).0, 3);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn precision_cap_from_environment() {
    let bin = env!("CARGO_BIN_EXE_rpm");
    let bad = Command::new(bin)
        .args(["solve", "--potential", "quartic"])
        .env("RPM_PRECISION_CAP", "abc")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(3));

    let capped = Command::new(bin)
        .args(["solve", "--potential", "quartic", "--dmax", "6", "--digits", "60"])
        .env("RPM_PRECISION_CAP", "45")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&capped.stdout).unwrap();
    assert!(v["meta"]["precision"].as_u64().unwrap() <= 45);
    assert!(v["results"][0]["certified_digits"].as_u64().unwrap() < 60);
}

#[test]
fn json_output_round_trips_as_seed_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let first_s = first.to_str().unwrap();
    let args = ["solve", "--potential", "x2x4:lambda=1/2", "--parity", "1", "--dmin", "3", "--dmax", "9", "--digits", "30"];
    let mut with_out = args.to_vec();
    with_out.extend(["--out", first_s]);
    assert_eq!(run(&with_out).0, 0);
    let original: Value = serde_json::from_str(&std::fs::read_to_string(&first).unwrap()).unwrap();

    let seed = format!("@{first_s}");
    let mut seeded = args.to_vec();
    seeded.extend(["--seed", &seed]);
    let again = json(&seeded);
    assert_eq!(again["results"], original["results"]);

    let (code, _, _) = run(&["solve", "--config", first_s, "--out", dir.path().join("second.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    let second: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("second.json")).unwrap()).unwrap();
    assert_eq!(second["results"], original["results"]);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, r#"{"potential": "harmonic", "dmax": 3, "digits": 20}"#).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(json(&["solve", "--config", p])["results"][0]["D"], 3);
    assert_eq!(json(&["solve", "--config", p, "--dmax", "4"])["results"][0]["D"], 4);
    std::fs::write(&path, r#"{"potential": "harmonic", "colour": 1}"#).unwrap();
    assert_eq!(run(&["solve", "--config", p]).0, 3);
}

#[test]
fn csv_is_rfc4180_with_certified_digits() {
    let (code, out, _) = run(&["sequence", "--potential", "dwell:beta=-1", "--dmax", "5", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.ends_with("\r\n"));
    let mut reader = csv::Reader::from_reader(out.as_bytes());
    let header = reader.headers().unwrap().clone();
    let root = header.iter().position(|h| h == "root").unwrap();
    let digits = header.iter().position(|h| h == "certified_digits").unwrap();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.unwrap();
        assert_eq!(record.len(), header.len());
        assert_eq!(significant_digits(&record[root]), record[digits].parse::<usize>().unwrap());
        rows += 1;
    }
    assert_eq!(rows, 4);
}

#[test]
fn bounds_bracket_and_report_gap() {
    let v = json(&["bounds", "--potential", "quartic", "--dmax", "6", "--digits", "20"]);
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    for pair in rows.chunks(2) {
        assert_eq!(pair[0]["bound"], "lower");
        assert_eq!(pair[1]["bound"], "upper");
        let lo: f64 = pair[0]["root"].as_str().unwrap().parse().unwrap();
        let hi: f64 = pair[1]["root"].as_str().unwrap().parse().unwrap();
        assert!(lo < 1.0603620904841829 && 1.0603620904841829 < hi);
    }
}

#[test]
fn strong_coupling_coefficients() {
    let v = json(&["solve", "--potential", "x2x4:lambda=1000000", "--dmax", "12", "--digits", "20"]);
    let e: f64 = v["results"][0]["root"].as_str().unwrap().parse().unwrap();
    let (e0, e1) = (1.0603620904841829, 0.36202264878867685);
    let next = (e / 100.0 - e0) * 1e4;
    assert!((next - e1).abs() < 0.01 * e1, "{next}");
}

#[test]
fn wavefunction_profile() {
    let (code, out, err) = run(&["wavefunction", "--potential", "quartic", "--D", "8", "--points", "5", "--xmax", "2"]);
    assert_eq!(code, 0, "{err}");
    let mut reader = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), ["x", "psi", "residual"]);
    let rows: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(&rows[0][1][..4], "1.00");
    for row in &rows {
        assert!(row[2].parse::<f64>().unwrap() < 1e-6, "{row:?}");
    }
    assert_eq!(run(&["wavefunction", "--potential", "quartic", "--D", "8", "--xmax", "-1"]).0, 3);
}

#[test]
fn expectation_and_oracle() {
    let v = json(&["expect", "--potential", "harmonic", "--dmax", "3", "--digits", "20"]);
    assert_eq!(v["results"][0]["expectation"], "0.50000000000000000000");
    let o = json(&["oracle", "--potential", "harmonic", "--count", "3"]);
    let energies: Vec<f64> = o["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["energy"].as_str().unwrap().parse().unwrap())
        .collect();
    for (k, e) in energies.iter().enumerate() {
        assert!((e - (2 * k + 1) as f64).abs() < 1e-8);
    }
}

#[test]
fn rate_fit_reported() {
    let v = json(&["rate", "--potential", "quartic", "--dmax", "9"]);
    let k = v["fit"]["k"].as_f64().unwrap();
    assert!(k > 3.5 && k < 5.5, "{k}");
    assert_eq!(v["results"].as_array().unwrap().len(), 8);
}
