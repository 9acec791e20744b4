use halluc_core::adversaries::Construction;
use halluc_core::harness::{complexity_curve, run_trials, write_curve, write_outputs, ExperimentConfig};

fn config() -> ExperimentConfig {
    ExperimentConfig::from_json(
        r#"{
            "version": "v1",
            "construction": {"name": "theorem3", "params": {"d": 4, "eps_prime": 0.3}},
            "learner": {"kind": "improper_max_info", "measure": {"kind": "out_of_sample"}},
            "n_values": [2, 8, 32],
            "trials": 40,
            "epsilon": 0.1,
            "delta": 0.1,
            "base_seed": 5
        }"#,
    )
    .unwrap()
}

#[test]
fn outputs_are_written_and_reproducible() {
    let cfg = config();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    write_outputs(a.path(), &run_trials(&cfg).unwrap()).unwrap();
    write_outputs(b.path(), &run_trials(&cfg).unwrap()).unwrap();
    for file in ["trials.jsonl", "summary.csv", "plot/hall_rate.dat", "plot/mean_hall.dat", "plot/dominance.dat"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        assert!(!x.is_empty(), "{file}");
        assert_eq!(x, std::fs::read(b.path().join(file)).unwrap(), "{file}");
    }
    let jsonl = std::fs::read_to_string(a.path().join("trials.jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), 120);
    let first: serde_json::Value = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
    assert!(first.get("wall_time").is_none());
    assert_eq!(first["n"], 2);

    let mut rdr = csv::Reader::from_path(a.path().join("summary.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(&headers[0], "n");
    assert_eq!(rdr.records().count(), 3);
}

#[test]
fn curve_csv_has_one_row_per_n() {
    let cfg = config();
    let (rows, _) = complexity_curve(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    write_curve(&path, &rows).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("n,hall_rate,hall_rate_lower,hall_rate_upper,dominance_rate"));
    for r in &rows {
        assert!(r.hall_rate_lower <= r.hall_rate && r.hall_rate <= r.hall_rate_upper);
    }
}

#[test]
fn timing_is_opt_in() {
    let mut cfg = config();
    cfg.record_timing = true;
    cfg.n_values = vec![2];
    let res = run_trials(&cfg).unwrap();
    assert!(res.records.iter().all(|r| r.wall_time.is_some()));
    assert!(matches!(cfg.construction, Construction::Theorem3 { .. }));
}
