use std::fs;
use std::path::Path;
use std::process::Command;

use pressure_lab::geometry::CurvePreset;
use pressure_lab_cli::*;

fn cfg_in(dir: &Path, overrides: &[&str]) -> ExperimentConfig {
    let mut sets: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    sets.push(format!("output.dir={:?}", dir.display().to_string()));
    ExperimentConfig::load("", &sets).unwrap()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pressure-lab"))
}

#[test]
fn config_round_trip() {
    let mut cfg = ExperimentConfig::default();
    assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    cfg.domain.curve = CurvePreset::Ellipse { a: 2.0, b: 1.0 };
    cfg.cutoffs = None;
    cfg.mollifier = EtaSweep::List { values: vec![0.02, 0.01] };
    cfg.field = FieldSpec::Rough { alpha: 1.0 / 3.0, seed: 7, j_max: Some(2) };
    cfg.study.field = StudyField::Smooth;
    cfg.output.jobs = Some(3);
    assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    let err = ExperimentConfig::load("", &["grid.resolutions=[[64, 96]]".into()]).unwrap().resolve().unwrap_err();
    assert!(err.to_string().contains("power of two"));
}

#[test]
fn overrides_apply_by_dotted_path() {
    let cfg = ExperimentConfig::load(
        "[grid]\nresolutions = [[64, 128]]\n",
        &["solver.tolerance=1e-9".into(), "field.kind=smooth".into(), "field.wave=[2.0, 0.5]".into()],
    )
    .unwrap();
    assert_eq!(cfg.grid.resolutions, vec![[64, 128]]);
    assert_eq!(cfg.solver.tolerance, 1e-9);
    assert_eq!(cfg.field, FieldSpec::Smooth { wave: [2.0, 0.5] });
    let err = ExperimentConfig::load("", &["grid.bogus=1".into()]).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("bogus"));
    assert!(ExperimentConfig::load("", &["novalue".into()]).is_err());
}

#[test]
fn validation_names_the_violated_relation() {
    let cfg = ExperimentConfig::load("", &["cutoffs.delta3=0.3".into()]).unwrap();
    let err = cfg.resolve().unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("δ₃ < δ − 2ε"), "{err}");
}

#[test]
fn mollifier_guard_rejects_small_eta() {
    let cfg = ExperimentConfig::load("", &["mollifier.policy=list".into(), "mollifier.values=[0.005]".into()]).unwrap();
    let err = cfg.resolve().unwrap_err();
    assert!(matches!(err, CliError::Validation(_)));
    assert!(err.to_string().contains("mollifier.values[0]"), "{err}");
    let cfg = ExperimentConfig::load("", &["mollifier.policy=list".into(), "mollifier.values=[0.01, 0.02]".into()]).unwrap();
    assert!(cfg.resolve().unwrap_err().to_string().contains("decreasing"));
}

#[test]
fn empty_sweep_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = cfg_in(dir.path(), &["study.alphas=[]"]);
    assert_eq!(cmd_study(&cfg).unwrap_err().exit_code(), 1);
    let cfg = cfg_in(dir.path(), &["study.seeds=[]"]);
    assert_eq!(cmd_study(&cfg).unwrap_err().exit_code(), 1);
}

#[test]
fn solve_rigid_rotation_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = cfg_in(dir.path(), &["grid.resolutions=[[128, 256]]"]);
    let r = cmd_solve(&cfg).unwrap();
    assert!(r.oracle_error.unwrap() <= 1e-3);
    for f in ["p.csv", "P.csv", "trace.csv", "report.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["schema"], "pressure-lab/1");
    assert_eq!(json["command"], "solve");
}

#[test]
fn solve_zero_field_is_all_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = cfg_in(dir.path(), &["grid.resolutions=[[64, 128]]", "field.kind=zero"]);
    let r = cmd_solve(&cfg).unwrap();
    assert_eq!((r.p_sup, r.big_p_sup), (0.0, 0.0));
    assert!(r.trace.distance.iter().all(|d| *d == 0.0));
    let csv = fs::read_to_string(dir.path().join("P.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",0.0")));
}

#[test]
fn solve_rough_field_reports_constant_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = cfg_in(
        dir.path(),
        &["grid.resolutions=[[160, 256]]", "field.kind=rough", "field.alpha=0.3333333333333333", "field.seed=7"],
    );
    let r = cmd_solve(&cfg).unwrap();
    assert!(r.c_meas.is_some_and(|c| c.is_finite() && c > 0.0));
    assert!(!r.trace.distance.is_empty() && r.trace.distance.iter().all(|d| d.is_finite()));
    assert_eq!(r.records.len(), 2);
}

#[test]
fn smooth_study_constant_is_resolution_stable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = cfg_in(
        dir.path(),
        &["study.field=smooth", "study.alphas=[0.5]", "grid.resolutions=[[160, 256], [320, 512]]"],
    );
    let out = cmd_study(&cfg).unwrap();
    let spread = out.resolutions[0].c_meas_spread.unwrap();
    assert!(spread <= 1.1, "{spread}");
}

#[test]
fn study_ledger_cardinality_and_reproducibility() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let sets = ["study.alphas=[0.3333333333333333]", "study.seeds=[0,1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19]", "grid.resolutions=[[96, 128]]", "holder.random_pairs=2000", "study.j_max=2"];
    let mut ca = cfg_in(a.path(), &sets);
    ca.output.jobs = Some(1);
    let mut cb = cfg_in(b.path(), &sets);
    cb.output.jobs = Some(2);
    let out = run_study(&ca).unwrap();
    let n_eta = ca.resolve().unwrap().levels[0].etas.len();
    assert_eq!(out.ledger.records().len(), 20 * n_eta);
    run_study(&cb).unwrap();
    for f in ["ledger.csv", "ledger.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let csv = fs::read_to_string(a.path().join("ledger.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 20 * n_eta);
    assert!(csv.starts_with("run_id,field,seed,alpha,eta"));
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let st = bin().args(["verify", "--set", "cutoffs.delta3=0.3"]).output().unwrap();
    assert_eq!(st.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&st.stderr).contains("δ₃ < δ − 2ε"));
    let cfg = dir.path().join("exp.toml");
    fs::write(&cfg, "[grid]\nresolutions = [[64, 128]]\n[field]\nkind = \"rigid\"\n").unwrap();
    let st = bin()
        .args(["solve", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stderr));
    assert!(dir.path().join("report.json").exists());
    let st = bin().args(["solve", "--config", "/nonexistent.toml"]).output().unwrap();
    assert_eq!(st.status.code(), Some(1));
    let st = bin().arg("verify").arg("positional").output().unwrap();
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn verify_default_configuration_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = cfg_in(dir.path(), &[]);
    let r = cmd_verify(&cfg).unwrap();
    assert!(r.passed() && r.checks.len() > 20);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(json["passed"], true);
}
