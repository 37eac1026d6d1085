mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::{sinusoid, sinusoid_csv};
use pmbsi::cli::commands::{bench_series, evaluate_series, predict_series, scan_grid};
use pmbsi::cli::config::RunConfig;
use pmbsi::cli::report::ModelFile;
use pmbsi::predictor::forecast_targets;
use pmbsi::{predict_one, Mode, StringParams, TimeSeries};

fn pmbsi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmbsi")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn sinusoid_args<'a>(input: &'a str, out: &'a str, seed: &'a str) -> Vec<&'a str> {
    vec!["fit", "--input", input, "--horizon", "1,3", "--valid-frac", "0.49", "--seed", seed, "--out", out]
}

fn without_timing(json: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(json).unwrap();
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn fit_writes_reproducible_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let input = sinusoid_csv(dir.path());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let run = pmbsi(&sinusoid_args(path(&input), path(out), "3"));
        assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    }
    for file in ["metrics.csv", "model_h1.txt", "model_h3.txt", "trace_h1.csv", "trace_h3.csv"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
    let ja = fs::read_to_string(a.join("report.json")).unwrap();
    let jb = fs::read_to_string(b.join("report.json")).unwrap();
    assert_eq!(without_timing(&ja), without_timing(&jb));

    let report: serde_json::Value = serde_json::from_str(&ja).unwrap();
    assert_eq!(report["seed"], 3);
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
    assert!(report["horizons"][0]["valid"]["metrics"]["mae"].as_f64().unwrap() <= 0.005);
}

#[test]
fn report_metrics_recompute_from_vectors() {
    let dir = tempfile::tempdir().unwrap();
    let input = sinusoid_csv(dir.path());
    let out = dir.path().join("out");
    assert!(pmbsi(&sinusoid_args(path(&input), path(&out), "1")).status.success());
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    for h in report["horizons"].as_array().unwrap() {
        for seg in ["eval", "valid", "naive_valid"] {
            let s = &h[seg];
            let vec = |k: &str| -> Vec<f64> { s[k].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect() };
            let (actual, forecast) = (vec("actual"), vec("forecast"));
            let mae = pmbsi::mae(&actual, &forecast).unwrap();
            let smape = pmbsi::smape(&actual, &forecast, pmbsi::SmapeVariant::Standard).unwrap();
            approx::assert_relative_eq!(mae, s["metrics"]["mae"].as_f64().unwrap(), max_relative = 1e-15);
            approx::assert_relative_eq!(smape, s["metrics"]["smape"].as_f64().unwrap(), max_relative = 1e-15);
        }
    }
}

#[test]
fn fit_without_out_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    let input = sinusoid_csv(dir.path());
    let run = pmbsi(&["fit", "--input", path(&input), "--valid-frac", "0.49"]);
    assert!(run.status.success());
    let v: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(v["command"], "fit");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let input = sinusoid_csv(dir.path());
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, format!("input = {}\nhorizon = 2\nvalid_frac = 0.49\nseed = 5\nbounds = q=0.5:2\n", input.display())).unwrap();
    let run = pmbsi(&["fit", "--config", path(&cfg), "--seed", "6"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let v: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(v["seed"], 6);
    assert_eq!(v["horizons"][0]["horizon"], 2);
    let q = v["horizons"][0]["params"]["q"].as_f64().unwrap();
    assert!((0.5..=2.0).contains(&q));
}

#[test]
fn predict_matches_library_and_iterates() {
    let dir = tempfile::tempdir().unwrap();
    let input = sinusoid_csv(dir.path());
    let out = dir.path().join("out");
    assert!(pmbsi(&sinusoid_args(path(&input), path(&out), "2")).status.success());
    let model_path = out.join("model_h1.txt");
    let model = ModelFile::load(&model_path).unwrap();

    let run = pmbsi(&["predict", "--model", path(&model_path), "--input", path(&input)]);
    assert!(run.status.success());
    let printed: f64 = String::from_utf8(run.stdout).unwrap().trim().parse().unwrap();
    let shifted: Vec<f64> = sinusoid().iter().map(|v| v + model.offset).collect();
    let library = predict_one(&shifted, shifted.len() - 1, &model.params).unwrap().value.unwrap() - model.offset;
    assert_eq!(printed, library);

    let run = pmbsi(&["predict", "--model", path(&model_path), "--input", path(&input), "--steps", "5"]);
    assert!(run.status.success());
    assert_eq!(String::from_utf8(run.stdout).unwrap().lines().count(), 5);

    let h3 = out.join("model_h3.txt");
    assert!(!pmbsi(&["predict", "--model", path(&h3), "--input", path(&input), "--steps", "4"]).status.success());
    assert!(pmbsi(&["predict", "--model", path(&h3), "--input", path(&input), "--steps", "3"]).status.success());
}

#[test]
fn predict_constant_model_and_long_series() {
    let model = ModelFile {
        params: StringParams::new(80, 56, 0.3, 0.4, 2.0).unwrap(),
        offset: 0.5,
        mode: Mode::Direct,
        seed: 0,
        bounds: Default::default(),
        version: "test".into(),
    };
    let raw = TimeSeries::new(vec![7.0; 775]);
    assert_eq!(predict_series(&model, &raw, 56).unwrap(), vec![7.0; 56]);

    let dir = tempfile::tempdir().unwrap();
    let model_path = dir.path().join("model.txt");
    fs::write(&model_path, model.to_text()).unwrap();
    let input = dir.path().join("nn5_like.csv");
    let text: String = (0..775).map(|i| format!("{}\n", 10.0 + (i as f64 * 0.9).sin() * 3.0)).collect();
    fs::write(&input, text).unwrap();
    let run = pmbsi(&["predict", "--model", path(&model_path), "--input", path(&input), "--steps", "56"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8(run.stdout).unwrap().lines().count(), 56);
}

#[test]
fn evaluate_reproduces_fit_metrics() {
    let raw = TimeSeries::new(sinusoid());
    let cfg = common::sinusoid_config(&[1], Mode::Direct, 4);
    let fit = pmbsi::cli::commands::fit_series(&raw, "s", &cfg).unwrap();
    let (_, model) = &fit.models[0];
    let model = ModelFile::parse(&model.to_text()).unwrap();
    let eval = evaluate_series(&model, &raw, "s", &cfg).unwrap();
    assert_eq!(eval.horizons[0].valid, fit.report.horizons[0].valid);
    assert_eq!(eval.horizons[0].eval, fit.report.horizons[0].eval);
}

#[test]
fn scan_single_cell_equals_direct_evaluation() {
    let raw = TimeSeries::new(sinusoid());
    let shifted = raw.shift_positive(raw.default_epsilon());
    let values = shifted.values();
    let grid = scan_grid(values, 2, &[6], &[1.5], (0.0, 0.0), 15..26).unwrap();
    assert_eq!(grid.rows.len(), 1);
    let p = StringParams::new(6, 2, 0.0, 0.0, 1.5).unwrap();
    let tf = forecast_targets(values, &p, 2, 15..26, Mode::Direct).unwrap();
    assert_eq!(grid.rows[0].eval_mae, pmbsi::mae(&tf.actual, &tf.forecast).unwrap());
    assert!(grid.to_csv().lines().nth(1).unwrap().ends_with(",1"));
}

#[test]
fn scan_skips_short_strings_and_finds_many_minima() {
    let raw = TimeSeries::new(sinusoid());
    let shifted = raw.shift_positive(raw.default_epsilon());
    let l_s: Vec<usize> = (1..=20).collect();
    let q: Vec<f64> = (0..20).map(|i| 0.05 + 0.25 * i as f64).collect();
    let grid = scan_grid(shifted.values(), 1, &l_s, &q, (0.0, 0.0), 15..51).unwrap();
    assert_eq!(grid.skipped.len(), 1);
    assert_eq!(grid.rows.len(), 19 * 20);
    let minima = grid.strict_local_minima();
    assert!(minima > 1, "{minima} strict local minima");
}

#[test]
fn scan_minimum_not_below_ga_optimum() {
    let raw = TimeSeries::new(sinusoid());
    let mut cfg = common::sinusoid_config(&[1], Mode::Direct, 9);
    cfg.ga.bounds.set("eta1", 0.0, 0.0).unwrap();
    cfg.ga.bounds.set("eta2", 0.0, 0.0).unwrap();
    let fit = pmbsi::cli::commands::fit_series(&raw, "s", &cfg).unwrap();
    let ga = fit.report.horizons[0].ga.clone().unwrap();
    let best = fit.report.horizons[0].params;
    let shifted = raw.shift_positive(raw.default_epsilon());
    let eval = fit.report.split.eval.clone();
    let context = &shifted.values()[..eval.end];
    let q = [best.q * 0.5, best.q, best.q * 2.0];
    let grid = scan_grid(context, 1, &[best.l_s], &q, (0.0, 0.0), eval).unwrap();
    // The grid contains the GA optimum, so its minimum cannot exceed it.
    assert!(grid.minimum().eval_mae <= ga.eval_mae + 1e-12);
    let at_optimum = grid.rows.iter().find(|r| r.q == best.q).unwrap();
    approx::assert_relative_eq!(at_optimum.eval_mae, ga.eval_mae, max_relative = 1e-12);
}

#[test]
fn scan_cli_writes_grid() {
    let dir = tempfile::tempdir().unwrap();
    let input = sinusoid_csv(dir.path());
    let run = pmbsi(&["scan", "--input", path(&input), "--valid-frac", "0.49", "--horizon", "2", "--ls", "1:4", "--q", "0.5:2:4"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let csv = String::from_utf8(run.stdout).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 4);
    assert_eq!(csv.lines().filter(|l| l.ends_with(",1")).count(), 1);
    assert!(String::from_utf8(run.stderr).unwrap().contains("skipped l_s = 1"));
}

fn write_series(dir: &Path, name: &str, values: &[f64]) {
    let text: String = values.iter().map(|v| format!("{v}\n")).collect();
    fs::write(dir.join(name), text).unwrap();
}

#[test]
fn bench_constant_series_scores_zero() {
    let dir = tempfile::tempdir().unwrap();
    for (i, level) in [3.0, 10.0, 0.25].iter().enumerate() {
        write_series(dir.path(), &format!("s{i}.csv"), &vec![*level; 40]);
    }
    let out = dir.path().join("out");
    let run = pmbsi(&["bench", "--dir", path(dir.path()), "--horizon", "5", "--out", path(&out)]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("bench.json")).unwrap()).unwrap();
    assert_eq!(v["completed"], 3);
    assert_eq!(v["mean_smape"].as_f64().unwrap(), 0.0);
    assert_eq!(v["reference"].as_array().unwrap().len(), 27);
    assert!(fs::read_to_string(out.join("bench_series.csv")).unwrap().lines().count() == 4);
}

#[test]
fn bench_single_series_and_failures() {
    let wave: Vec<f64> = (0..80).map(|i| 5.0 + (i as f64 * 0.6).sin()).collect();
    let cfg = RunConfig::default();
    let single = bench_series(&[("w".into(), Ok(TimeSeries::new(wave.clone())))], 4, &cfg);
    assert_eq!(single.mean_smape, single.series[0].smape);
    let s = &single.series[0];
    assert_eq!(s.smape.unwrap(), pmbsi::smape(&s.actual, &s.forecast, pmbsi::SmapeVariant::Standard).unwrap());

    let items = vec![
        ("a".to_string(), Ok(TimeSeries::new(vec![1.0, 2.0, 3.0]))),
        ("w".to_string(), Ok(TimeSeries::new(wave))),
    ];
    let mixed = bench_series(&items, 4, &cfg);
    assert_eq!((mixed.completed, mixed.failed), (1, 1));
    assert!(mixed.series[0].error.is_some());
    // Series index 1 uses seed + 1, so it differs from the single-series run.
    assert_eq!(mixed.series[1].seed, cfg.ga.seed + 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(pmbsi(&["--version"]).status.code(), Some(0));
    assert_eq!(pmbsi(&["fit", "--bogus"]).status.code(), Some(1));
    assert_eq!(pmbsi(&["fit", "--input", "/nonexistent.csv"]).status.code(), Some(2));
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "x\ny\n").unwrap();
    assert_eq!(pmbsi(&["fit", "--input", path(&bad)]).status.code(), Some(2));
    let input = sinusoid_csv(dir.path());
    assert_eq!(pmbsi(&["fit", "--input", path(&input), "--valid-frac", "1.5"]).status.code(), Some(1));
    assert_eq!(pmbsi(&["fit", "--input", path(&input), "--mode", "sideways"]).status.code(), Some(1));
    assert_eq!(pmbsi(&["fit", "--input", path(&input), "--bounds", "q=2:1"]).status.code(), Some(1));
}
