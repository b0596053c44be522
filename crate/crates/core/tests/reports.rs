use gvlp::exponents::ExponentSpec;
use gvlp::functions::FunctionSpec;
use gvlp::harness::{emit_report, render_report, run_boundedness_experiment, ExperimentConfig, ReportFormat, HYPOTHESES_UNVERIFIED, SCHEMA};

fn light() -> ExperimentConfig {
    ExperimentConfig { hermite_nodes: 40, laguerre_nodes: 32, ..Default::default() }
}

#[test]
fn report_files_are_byte_identical() {
    let dir = std::env::temp_dir().join(format!("gvlp-reports-{}", std::process::id()));
    let cfg = ExperimentConfig { seed: 11, ..light() };
    for format in [ReportFormat::Json, ReportFormat::Csv] {
        let (a, b) = (dir.join("a.out"), dir.join("b.out"));
        emit_report(&run_boundedness_experiment::<f64>(&cfg).unwrap(), format, &a).unwrap();
        emit_report(&run_boundedness_experiment::<f64>(&cfg).unwrap(), format, &b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn json_report_schema_and_provenance() {
    let cfg = light();
    let r = run_boundedness_experiment::<f64>(&cfg).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&render_report(&r, ReportFormat::Json).unwrap()).unwrap();
    assert_eq!(v["schema"], SCHEMA);
    assert_eq!(v["provenance"]["config_hash"], cfg.hash());
    assert_eq!(v["rows"].as_array().unwrap().len(), 20 * 13);
    assert!(v["notes"].as_array().unwrap().iter().any(|n| n.as_str().unwrap().starts_with("T*")));
    assert!(r.verdicts.iter().all(|v| v.criterion.is_some()));
}

#[test]
fn csv_rows_follow_the_header() {
    let cfg = ExperimentConfig { suite: Some(vec![FunctionSpec::Hermite { nu: vec![2] }]), ..light() };
    let bytes = render_report(&run_boundedness_experiment::<f64>(&cfg).unwrap(), ReportFormat::Csv).unwrap();
    let mut rd = csv::Reader::from_reader(bytes.as_slice());
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), ["function_id", "operator", "param", "ratio", "verdict"]);
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 13);
    let star = rows.iter().find(|r| &r[1] == "T*").unwrap();
    assert_eq!(&star[2], "");
    // T_t h_2 = e^{-2t} h_2 exactly, whatever the exponent.
    let t03 = rows.iter().find(|r| &r[1] == "T_t" && &r[2] == "0.3").unwrap();
    let ratio: f64 = t03[3].parse().unwrap();
    assert!((ratio - (-0.6f64).exp()).abs() < 1e-9, "{ratio}");
}

#[test]
fn rows_failing_to_normalize_do_not_abort_the_run() {
    let cfg = ExperimentConfig { suite: Some(vec![FunctionSpec::Constant { c: 0.0 }, FunctionSpec::Constant { c: 1.0 }]), ..light() };
    let r = run_boundedness_experiment::<f64>(&cfg).unwrap();
    assert_eq!(r.row_errors.len(), 1);
    assert_eq!(r.rows.len(), 13);
}

#[test]
fn oscillating_exponent_is_flagged_but_measured() {
    let cfg = ExperimentConfig { exponent: ExponentSpec::Oscillating { p0: 2.5, a: 0.5 }, suite: Some(vec![FunctionSpec::Hermite { nu: vec![1] }]), ..light() };
    let r = run_boundedness_experiment::<f64>(&cfg).unwrap();
    assert_eq!(r.hypotheses.as_ref().unwrap().flag.as_deref(), Some(HYPOTHESES_UNVERIFIED));
    assert!(r.rows.iter().all(|x| x.ratio.is_finite()));
    assert!(r.verdicts.iter().filter(|v| v.name.contains("stable")).all(|v| !v.asserted));
    assert!(r.verdicts.iter().any(|v| v.name == "all ratios finite" && v.asserted));
    assert!(r.all_passed());
}
