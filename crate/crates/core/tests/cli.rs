use std::fs;
use std::path::Path;
use std::process::Command as Proc;

use lle_bifurcation::cli_io::*;
use lle_bifurcation::continuation::ContinuationConfig;
use lle_bifurcation::counterexample::CounterexampleReport;
use lle_bifurcation::symmetry::Certificate;
use serde::de::DeserializeOwned;
use serde::Serialize;

const BIN: &str = env!("CARGO_BIN_EXE_lle-bif");

fn cfg_in(dir: &Path) -> RunConfig {
    RunConfig { out: Some(dir.to_path_buf()), ..Default::default() }
}

fn round_trip<T: DeserializeOwned + Serialize + PartialEq + std::fmt::Debug>(path: &Path) -> T {
    let text = fs::read_to_string(path).unwrap();
    let value: T = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&value).unwrap() + "\n";
    assert_eq!(again, text, "{}", path.display());
    value
}

#[test]
fn primary_table_matches_reference_values() {
    let dir = tempfile::tempdir().unwrap();
    run(&cfg_in(dir.path()), Command::Primary).unwrap();
    let csv = fs::read_to_string(dir.path().join("primary.csv")).unwrap();
    let expected = [
        (1, 1, 0.10528), (1, 2, 0.77130), (2, 1, -0.18543), (2, 2, 0.75556),
        (3, 1, -0.52046), (3, 2, 0.72127), (4, 1, -0.72866), (4, 2, 0.66089),
        (5, 1, -0.77281), (5, 2, 0.56321), (6, 1, -0.61695), (6, 2, 0.40312),
        (7, 1, -0.20600), (7, 2, 0.01535),
    ];
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 14);
    for (row, (k, slot, t)) in rows.iter().zip(expected) {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[0].parse::<usize>().unwrap(), k);
        assert_eq!(cells[1].parse::<u8>().unwrap(), slot);
        assert!((cells[2].parse::<f64>().unwrap() - t).abs() < 2e-5, "{row}");
    }
    let report: PrimaryReport = round_trip(&dir.path().join("primary.json"));
    assert_eq!(report.k_max, 7);
    let table = fs::read_to_string(dir.path().join("primary_table.csv")).unwrap();
    assert_eq!(table.lines().count(), 5);
    assert!(table.starts_with("quantity,z_1_1,z_1_2,"));
}

#[test]
fn certificate_export() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig { q: Some(7), p_div: Some(1), ..cfg_in(dir.path()) };
    run(&cfg, Command::Certify).unwrap();
    let c: Certificate = round_trip(&dir.path().join("certificate.json"));
    assert_eq!(c.total, -4);
    assert!(c.certified);
}

#[test]
fn invalid_certificate_exits_with_error_object() {
    let dir = tempfile::tempdir().unwrap();
    let out = Proc::new(BIN)
        .args(["certify", "--q", "7", "--p", "7", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    let e: ErrorObject = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(e.error, "ConfigError");
}

#[test]
fn missing_q_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let e = run(&cfg_in(dir.path()), Command::Branch).unwrap_err();
    assert_eq!(e.kind(), "ConfigError");
}

#[test]
fn outputs_are_deterministic_and_round_trip() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cont = ContinuationConfig { budget: 40, ..Default::default() };
    for dir in [a.path(), b.path()] {
        let cfg = RunConfig { q: Some(4), p_div: Some(2), continuation: cont, samples: 50, ..cfg_in(dir) };
        for c in [Command::Trivial, Command::Primary, Command::Index, Command::Branch, Command::Secondary, Command::Counterexample] {
            run(&cfg, c).unwrap();
        }
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 9);
    for name in names {
        assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap(), "{name:?}");
    }
    let _: Vec<IndexEntry> = round_trip(&a.path().join("index.json"));
    let _: BranchSummary = round_trip(&a.path().join("branch_summary.json"));
    let _: SecondaryReport = round_trip(&a.path().join("secondary.json"));
    let rep: CounterexampleReport = round_trip(&a.path().join("counterexample.json"));
    assert!(rep.passed());

    let branch = fs::read_to_string(a.path().join("branch.csv")).unwrap();
    assert!(branch.starts_with("s,zeta,re_c0,im_c0,amplitude,morse_in_ambient,sym_residual\n"));
    assert_eq!(branch.lines().count(), 1 + 41);
}

#[test]
fn index_report_is_restricted_by_p() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig { p_div: Some(3), ..cfg_in(dir.path()) };
    run(&cfg, Command::Index).unwrap();
    let entries: Vec<IndexEntry> = round_trip(&dir.path().join("index.json"));
    let labels: Vec<_> = entries.iter().map(|e| (e.k, e.slot, e.delta_star)).collect();
    assert_eq!(labels, vec![(3, 1, 2), (3, 2, 2), (6, 1, -2), (6, 2, -2)]);
}

#[test]
fn flags_override_config_file_and_env_supplies_out() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.json");
    fs::write(&conf, r#"{"q": 6, "p_div": 2, "f": 1.6}"#).unwrap();
    let out_env = dir.path().join("from_env");
    let status = Proc::new(BIN)
        .args(["certify", "--p", "3", "--config"])
        .arg(&conf)
        .env(OUT_ENV, &out_env)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stdout));
    let c: Certificate = round_trip(&out_env.join("certificate.json"));
    assert_eq!((c.q, c.p_div, c.total), (6, 3, -4));
}

#[test]
fn diagram_marks_secondary_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig { p_div: Some(2), ..cfg_in(dir.path()) };
    run(&cfg, Command::Diagram).unwrap();
    let svg = fs::read_to_string(dir.path().join("diagram.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains(r#"stroke="black""#));
    assert_eq!(svg.matches(r#"stroke="blue""#).count(), 7);
    assert!(svg.contains(r#"fill="red""#));
}
