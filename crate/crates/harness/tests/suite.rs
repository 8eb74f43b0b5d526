//! Suite execution, report bookkeeping and determinism.

use spt_harness::registry::{self, Suite};
use spt_harness::{run_suite, HarnessError, Scenario};

fn seeds(a: u64, b: u64) -> Scenario {
    Scenario { seed_start: a, seed_end: b, ..Scenario::default() }
}

#[test]
fn psh_suite_over_five_seeds() {
    let r = run_suite("psh", &seeds(1, 5)).unwrap();
    assert!(r.rows.len() >= 20);
    assert!(r.all_pass(), "{:#?}", r.rows.iter().filter(|x| !x.pass).collect::<Vec<_>>());
    assert!(r.rows.iter().all(|x| x.suite == Suite::Psh && x.pass == (x.value <= x.tol)));
}

#[test]
fn summary_matches_the_registry() {
    let r = run_suite("all", &seeds(2, 2)).unwrap();
    let checks = registry::checks();
    assert_eq!(r.summary.checks.len(), checks.len());
    assert_eq!(r.summary.rows, checks.len());
    for (s, c) in r.summary.checks.iter().zip(checks) {
        assert_eq!(s.check_id, c.id);
        assert_eq!(s.rows, 1);
    }
    assert_eq!(r.summary.passed + r.summary.failed, r.summary.rows);
    assert!(r.all_pass(), "{:#?}", r.rows.iter().filter(|x| !x.pass).collect::<Vec<_>>());
}

#[test]
fn replay_is_identical_apart_from_the_timestamp() {
    let s = seeds(1, 3);
    let mut a = run_suite("energies", &s).unwrap();
    let mut b = run_suite("energies", &s).unwrap();
    a.generated_unix = 0;
    b.generated_unix = 0;
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn worker_count_does_not_change_results() {
    let mut one = seeds(1, 4);
    one.workers = 1;
    let mut many = one.clone();
    many.workers = 3;
    let a = run_suite("measures", &one).unwrap();
    let b = run_suite("measures", &many).unwrap();
    assert_eq!(a.rows, b.rows);
}

#[test]
fn tolerance_overrides_decide_pass() {
    let mut s = seeds(1, 2);
    s.tolerances.insert("psh.margin-floor".into(), -1.0);
    let r = run_suite("psh", &s).unwrap();
    let rows: Vec<_> = r.rows.iter().filter(|x| x.check_id == "psh.margin-floor").collect();
    assert!(rows.iter().all(|x| !x.pass && x.tol == -1.0));
    assert_eq!(r.summary.failed, 2);
}

#[test]
fn library_errors_become_failed_rows() {
    // Potentials with a vanishing margin have a degenerate Monge–Ampère
    // density, so the entropy raises an error; the run records it and goes on.
    let s = Scenario { delta: 1e-13, seed_start: 1, seed_end: 1, ..Scenario::default() };
    let r = run_suite("energies", &s).unwrap();
    assert_eq!(r.summary.rows, registry::select(Some(Suite::Energies)).len());
    let row = r.rows.iter().find(|x| x.check_id == "energy.entropy-sign").unwrap();
    assert!(!row.pass && row.value.is_nan());
    assert!(row.error.as_deref().unwrap().contains("degenerate"));
    assert_eq!(r.summary.errors, 1);
    assert_eq!(r.summary.failed, 1);
}

#[test]
fn unknown_suites_are_rejected() {
    assert!(matches!(run_suite("nope", &Scenario::default()), Err(HarnessError::Config(_))));
}

#[test]
fn reports_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let r = run_suite("charts", &seeds(1, 2)).unwrap();
    let (json, csv) = r.write(dir.path()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["suite"], "charts");
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    for key in ["check_id", "paper_ref", "inputs", "value", "tol", "pass"] {
        assert!(v["rows"][0].get(key).is_some(), "missing {key}");
    }
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("check_id,suite,seed,value,tol,pass"));
}
