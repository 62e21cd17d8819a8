use rearrkit_core::config::{Format, RunConfig};
use rearrkit_core::report::{emit_report, read_json_report};
use rearrkit_core::supermodular::{random_supermodular, uniform_axes, Family, IntegrandSpec, TabulatedIntegrand};
use rearrkit_core::{run_suite, SuiteKind};

#[test]
fn integrand_csv_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    for m in 1..=3 {
        let f = random_supermodular(4, m, &uniform_axes(m, 4, 2.0), Family::MixedDensity);
        f.write_csv(std::fs::File::create(&path).unwrap()).unwrap();
        let back = TabulatedIntegrand::read_csv(std::fs::File::open(&path).unwrap()).unwrap();
        assert_eq!(back, f);
        let spec = IntegrandSpec::Table { axes: None, values: None, csv: Some(path.clone()) };
        assert_eq!(spec.build(0).unwrap(), f);
    }
}

#[test]
fn config_file_and_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"suite": "hl", "trials": 4, "seed": 2, "m": 3}"#).unwrap();
    let config = RunConfig::from_path(&cfg).unwrap();
    assert_eq!(config.suite, SuiteKind::Hl);
    let out = run_suite(&config).unwrap();
    let report = dir.path().join("report.json");
    emit_report(&out.rows, Format::Json, &report).unwrap();
    assert_eq!(read_json_report(&std::fs::read_to_string(&report).unwrap()).unwrap(), out.rows);
    let csv = dir.path().join("report.csv");
    emit_report(&[], Format::Csv, &csv).unwrap();
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), "trial,lhs,rhs,slack,holds\n");
    assert!(RunConfig::from_path(&dir.path().join("missing.json")).is_err());
}
