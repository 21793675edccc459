mod common;

use common::{median, rel_err};
use hywave::dynamics::{LinearizeOptions, PtoSetting};
use hywave::environment::*;
use hywave::harness::*;
use hywave::objectives::*;

fn small_config(out: &std::path::Path) -> ExperimentConfig {
    ExperimentConfig {
        algorithms: vec!["WOA".into(), "AHA".into(), "EEA".into()],
        pop_size: 8,
        eval_budget: 80,
        runs: 3,
        master_seed: 7,
        output_dir: out.to_path_buf(),
        grid: GridConfig {
            points: 40,
            ..GridConfig::default()
        },
        ..ExperimentConfig::default()
    }
}

fn sample_std(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

#[test]
fn summary_recomputes_from_run_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let out = run_experiment(&cfg).unwrap();
    assert_eq!(out.dir, tmp.path().join("sydney").join("annual_power"));
    assert_eq!(out.runs.len(), 9);
    for s in &out.summaries {
        let values: Vec<f64> = out.runs.iter().filter(|r| r.algo == s.algo).map(|r| r.best_value).collect();
        assert_eq!(values.len(), 3);
        assert_eq!(s.min, values.iter().copied().fold(f64::INFINITY, f64::min));
        assert_eq!(s.max, values.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        assert!(rel_err(s.mean, values.iter().sum::<f64>() / 3.0) < 1e-14);
        assert_eq!(s.median, median(&values));
        assert!(rel_err(s.std, sample_std(&values)) < 1e-12);
    }
    for r in &out.runs {
        assert_eq!(r.evaluations, 80);
        assert_eq!(r.best_value, -r.best_fitness);
        assert_eq!(r.seed, run_seed(7, r.algo.parse().unwrap(), r.run));
    }

    let text = std::fs::read_to_string(out.dir.join("summary.csv")).unwrap();
    let parsed = parse_summary_csv(&text).unwrap();
    assert_eq!(parsed.len(), 3);
    for (p, s) in parsed.iter().zip(&out.summaries) {
        assert_eq!((p.algo.as_str(), p.mean, p.std), (s.algo.as_str(), s.mean, s.std));
    }

    let rep = report(&out.dir, "EEA").unwrap();
    assert_eq!(summary_csv(&rep.summaries), text);
    let cmp = rep.comparison.unwrap();
    assert_eq!(cmp.len(), 2);
    let eea = out.summaries.iter().find(|s| s.algo == "EEA").unwrap().mean;
    for c in cmp {
        let expected = 100.0 * (eea - c.mean) / c.mean.abs();
        assert!((c.improvement_pct.unwrap() - expected).abs() < 1e-9);
    }
    assert_eq!(rep.convergence.len(), 3);
    assert!(rep.convergence.iter().all(|b| b.median.len() == 80));

    let manifest: Vec<ManifestEntry> =
        serde_json::from_str(&std::fs::read_to_string(out.dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest, out.manifest);
    assert!(manifest.iter().any(|e| e.path == "EEA/run_2.csv"));
}

#[test]
fn single_run_has_zero_spread() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        algorithms: vec!["DE".into()],
        runs: 1,
        ..small_config(tmp.path())
    };
    let out = run_experiment(&cfg).unwrap();
    let s = &out.summaries[0];
    assert_eq!(s.std, 0.0);
    assert_eq!(s.min, s.max);
    assert_eq!(s.mean, s.median);
    assert!(!out.dir.join("compare.csv").exists());
}

#[test]
fn reruns_are_byte_identical_and_workers_do_not_matter() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small_config(&tmp.path().join("a"));
    let a = run_experiment(&cfg).unwrap();
    cfg.output_dir = tmp.path().join("b");
    cfg.workers = 2;
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(a.manifest, b.manifest);
    let read = |d: &std::path::Path| std::fs::read(d.join("summary.csv")).unwrap();
    assert_eq!(read(&a.dir), read(&b.dir));
    cfg.master_seed = 8;
    cfg.output_dir = tmp.path().join("c");
    let c = run_experiment(&cfg).unwrap();
    assert_ne!(a.manifest, c.manifest);
}

#[test]
fn golden_summary_layout() {
    let stats = vec![
        SummaryStats::from_values("WOA", &[1.0, 2.0, 4.0]).unwrap(),
        SummaryStats::from_values("EEA", &[3.0]).unwrap(),
    ];
    let expected = "metric,WOA,EEA\n\
                    Min,1e0,3e0\n\
                    Max,4e0,3e0\n\
                    Mean,2.3333333333333335e0,3e0\n\
                    Median,2e0,3e0\n\
                    STD,1.5275252316519465e0,0e0\n";
    assert_eq!(summary_csv(&stats), expected);
}

fn model() -> SiteModel {
    SiteModel::new(
        PhysicsConfig::default(),
        FrequencyGrid::uniform(0.1, 3.0, 60).unwrap(),
        bundled_site("sydney").unwrap(),
        LinearizeOptions::default(),
    )
    .unwrap()
}

#[test]
fn single_cell_landscape_equals_direct_evaluation() {
    let m = model();
    let k = LogAxis::new(3e3, 3e3, 1).unwrap();
    let b = LogAxis::new(7e5, 7e5, 1).unwrap();
    let cells = landscape(&m, 24.0, 5.0, &k, &b, LossForm::Ratio).unwrap();
    assert_eq!(cells.len(), 1);
    let d = DesignVector::uniform(24.0, 5.0, PtoSetting::new(3e3, 7e5).unwrap(), m.n_states());
    let c = cells[0];
    assert!(rel_err(c.annual_power, m.annual_power(&d).unwrap()) < 1e-12);
    assert!(rel_err(c.nacelle_ratio, m.nacelle_ratio(&d).unwrap()) < 1e-12);
    assert!(rel_err(c.power_loss, m.power_loss(&d, LossForm::Ratio).unwrap()) < 1e-12);
}

#[test]
fn landscape_rows_and_interior_optimum() {
    let m = model();
    let k = LogAxis::new(1e1, 1e10, 7).unwrap();
    let b = LogAxis::new(1e1, 1e10, 10).unwrap();
    let cells = landscape(&m, 20.0, 5.0, &k, &b, LossForm::Log).unwrap();
    assert_eq!(cells.len(), 70);
    assert_eq!(landscape_csv(&cells).lines().count(), 71);
    for (i, c) in cells.iter().enumerate() {
        assert!(rel_err(c.k_pto, k.points()[i / 10]) < 1e-12);
        assert!(rel_err(c.b_pto, b.points()[i % 10]) < 1e-12);
    }
    let best = (0..cells.len())
        .max_by(|&x, &y| cells[x].annual_power.total_cmp(&cells[y].annual_power))
        .unwrap();
    let bi = best % 10;
    assert!(bi > 0 && bi < 9);
}

#[test]
fn configs_round_trip_through_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let path = tmp.path().join("exp.toml");
    std::fs::write(&path, cfg.to_toml_string().unwrap()).unwrap();
    let back = ExperimentConfig::load(&path).unwrap();
    assert_eq!(back.hash(), cfg.hash());
    assert!(ExperimentConfig::from_toml_str("pop_size = 0").is_err());
    assert!(ExperimentConfig::from_toml_str("unknown_key = 1").is_err());
}

#[test]
fn custom_site_files_are_resolved() {
    let tmp = tempfile::tempdir().unwrap();
    let site = bundled_site("gippsland").unwrap();
    let path = tmp.path().join("mine.csv");
    save_site(&path, &site).unwrap();
    let loaded = resolve_site(path.to_str().unwrap()).unwrap();
    assert_eq!(loaded.states(), site.states());
    assert!(resolve_site("atlantis").is_err());
}
