//! Multi-seed experiments, landscape scans and reporting.
//!
//! An experiment writes, under `<output_dir>/<site>/<objective>/`:
//!
//! - `<ALGO>/run_<i>.csv`: the trace of run `i`;
//! - `<ALGO>/run_<i>.json`: seed, configuration hash and terminal design;
//! - `summary.csv`: Min/Max/Mean/Median/STD of the best value per run;
//! - `compare.csv`: improvement of the reference algorithm over the others;
//! - `convergence.csv`: median and interquartile best-so-far fitness;
//! - `manifest.json`: SHA-256 of every file above.

mod landscape;
mod stats;

use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::LinearizeOptions;
use crate::ensemble::EnsembleConfig;
use crate::environment::{bundled_site, load_site, FrequencyGrid, PhysicsConfig, SiteScatter};
use crate::objectives::{DesignProblem, DesignSpace, LossForm, ObjectiveKind, PtoMode, RadiusMode, SiteModel};
use crate::optimizers::{minimize_with, AlgorithmId, RunTrace};
use crate::{Error, Result};

pub use landscape::{landscape, landscape_csv, LandscapeCell, LogAxis};
pub use stats::{
    compare_csv, compare_report, convergence_csv, emit_plot_data, parse_summary_csv, quantile, summary_csv,
    Comparison, ConvergenceBand, SummaryStats, SUMMARY_METRICS,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        let g = FrequencyGrid::default();
        Self {
            omega_min: g.omegas()[0],
            omega_max: g.omegas()[g.len() - 1],
            points: g.len(),
        }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::uniform(self.omega_min, self.omega_max, self.points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Bundled site name or path to a scatter CSV.
    pub site: String,
    pub objective: String,
    pub power_loss_form: LossForm,
    pub radius_mode: RadiusMode,
    pub pto_mode: PtoMode,
    pub algorithms: Vec<String>,
    pub pop_size: usize,
    pub eval_budget: usize,
    pub runs: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    /// Worker threads; zero uses every core.
    pub workers: usize,
    /// Algorithm the comparison table is taken against.
    pub reference: String,
    pub grid: GridConfig,
    pub linearize: LinearizeOptions,
    pub ensemble: EnsembleConfig,
    pub physics: PhysicsConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            site: "sydney".into(),
            objective: "annual_power".into(),
            power_loss_form: LossForm::Log,
            radius_mode: RadiusMode::Fixed,
            pto_mode: PtoMode::PerState,
            algorithms: AlgorithmId::ALL.iter().map(|a| a.name().to_string()).collect(),
            pop_size: 25,
            eval_budget: 1000,
            runs: 10,
            master_seed: 0,
            output_dir: PathBuf::from("results"),
            workers: 1,
            reference: "EEA".into(),
            grid: GridConfig::default(),
            linearize: LinearizeOptions::default(),
            ensemble: EnsembleConfig::default(),
            physics: PhysicsConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn objective_kind(&self) -> Result<ObjectiveKind> {
        let kind: ObjectiveKind = self.objective.parse()?;
        Ok(match kind {
            ObjectiveKind::PowerLoss(_) if self.objective == "power_loss" => {
                ObjectiveKind::PowerLoss(self.power_loss_form)
            }
            k => k,
        })
    }

    pub fn algorithm_ids(&self) -> Result<Vec<AlgorithmId>> {
        self.algorithms.iter().map(|a| a.parse()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("algorithm list is empty".into()));
        }
        if self.pop_size == 0 || self.eval_budget < self.pop_size {
            return Err(Error::Config(format!(
                "budget {} must be at least the population size {}",
                self.eval_budget, self.pop_size
            )));
        }
        let ids = self.algorithm_ids()?;
        for (i, a) in ids.iter().enumerate() {
            if ids[..i].contains(a) {
                return Err(Error::Config(format!("algorithm {a} listed twice")));
            }
        }
        self.objective_kind()?;
        self.linearize.validate()?;
        self.ensemble.validate()?;
        self.physics.validate()?;
        self.grid.build()?;
        Ok(())
    }

    /// SHA-256 of the settings that influence results; output location and
    /// worker count are excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        c.workers = 0;
        let text = serde_json::to_string(&c).expect("config serialises");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn load_site(&self) -> Result<SiteScatter> {
        resolve_site(&self.site)
    }

    pub fn model(&self) -> Result<SiteModel> {
        SiteModel::new(self.physics.clone(), self.grid.build()?, self.load_site()?, self.linearize)
    }

    pub fn design_space(&self, n_states: usize) -> DesignSpace {
        DesignSpace::new(self.radius_mode, self.pto_mode, n_states, self.physics.clearance)
    }
}

/// A path to an existing file, otherwise a bundled site name.
pub fn resolve_site(spec: &str) -> Result<SiteScatter> {
    let p = Path::new(spec);
    if p.is_file() {
        load_site(p)
    } else {
        bundled_site(spec)
    }
}

/// Seed of run `run` of `algo`: the first eight bytes (big-endian) of
/// `SHA-256("<master>:<ALGO>:<run>")`.
pub fn run_seed(master: u64, algo: AlgorithmId, run: usize) -> u64 {
    let digest = Sha256::digest(format!("{master}:{}:{run}", algo.name()).as_bytes());
    u64::from_be_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerminalDesign {
    pub distance: f64,
    pub radius: f64,
    pub k_pto: Vec<f64>,
    pub b_pto: Vec<f64>,
}

/// JSON sidecar of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub algo: String,
    pub run: usize,
    pub seed: u64,
    pub site: String,
    pub objective: String,
    pub config_hash: String,
    pub evaluations: usize,
    pub best_fitness: f64,
    pub best_value: f64,
    pub design: Option<TerminalDesign>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub dir: PathBuf,
    pub summaries: Vec<SummaryStats>,
    pub runs: Vec<RunInfo>,
    pub manifest: Vec<ManifestEntry>,
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "panic".into())
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Runs every configured algorithm `runs` times and writes traces, summary,
/// comparison, convergence data and manifest.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let kind = cfg.objective_kind()?;
    let algos = cfg.algorithm_ids()?;
    let model = cfg.model()?;
    let site_name = model.site().name.clone();
    let space = cfg.design_space(model.n_states());
    let problem = DesignProblem::new(&model, space.clone(), kind)?;
    let bounds = problem.bounds();
    let dir = cfg.output_dir.join(&site_name).join(kind.name());
    for a in &algos {
        let d = dir.join(a.name());
        fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
    }
    let hash = cfg.hash();
    let jobs: Vec<(AlgorithmId, usize)> = algos
        .iter()
        .flat_map(|&a| (0..cfg.runs).map(move |i| (a, i)))
        .collect();

    let run_one = |&(algo, i): &(AlgorithmId, usize)| -> Result<(RunInfo, RunTrace)> {
        let id = format!("{}/run_{i}", algo.name());
        let seed = run_seed(cfg.master_seed, algo, i);
        let trace = catch_unwind(AssertUnwindSafe(|| {
            minimize_with(algo, &problem, &bounds, cfg.pop_size, cfg.eval_budget, seed, &cfg.ensemble)
        }))
        .map_err(|p| Error::Run {
            run: id.clone(),
            message: panic_message(p),
        })?
        .map_err(|e| Error::Run {
            run: id.clone(),
            message: e.to_string(),
        })?;
        let design = (!trace.best_position.is_empty()).then(|| {
            let d = space.decode(&trace.best_position);
            TerminalDesign {
                distance: d.distance,
                radius: d.radius,
                k_pto: d.pto.iter().map(|p| p.k_pto).collect(),
                b_pto: d.pto.iter().map(|p| p.b_pto).collect(),
            }
        });
        let info = RunInfo {
            algo: algo.name().into(),
            run: i,
            seed,
            site: site_name.clone(),
            objective: kind.name().into(),
            config_hash: hash.clone(),
            evaluations: trace.len(),
            best_fitness: trace.best_fitness,
            best_value: kind.value(trace.best_fitness),
            design,
        };
        let base = dir.join(algo.name());
        trace.write_csv(&base.join(format!("run_{i}.csv")))?;
        write(&base.join(format!("run_{i}.json")), &serde_json::to_string_pretty(&info)?)?;
        log::info!("{id}: best {}", info.best_value);
        Ok((info, trace))
    };

    let results: Vec<(RunInfo, RunTrace)> =
        thread_pool(cfg.workers)?.install(|| jobs.par_iter().map(run_one).collect::<Result<Vec<_>>>())?;

    let mut summaries = Vec::with_capacity(algos.len());
    let mut curves = Vec::with_capacity(algos.len());
    for a in &algos {
        let own: Vec<&(RunInfo, RunTrace)> = results.iter().filter(|(r, _)| r.algo == a.name()).collect();
        let values: Vec<f64> = own.iter().map(|(r, _)| r.best_value).collect();
        summaries.push(SummaryStats::from_values(a.name(), &values)?);
        curves.push((a.name().to_string(), own.iter().map(|(_, t)| t.best_so_far()).collect()));
    }
    write(&dir.join("summary.csv"), &summary_csv(&summaries))?;
    if summaries.len() >= 2 && summaries.iter().any(|s| s.algo == cfg.reference) {
        let rows = compare_report(&summaries, &cfg.reference, kind.maximize())?;
        write(&dir.join("compare.csv"), &compare_csv(&cfg.reference, &rows))?;
    }
    write(&dir.join("convergence.csv"), &convergence_csv(&emit_plot_data(&curves)))?;
    let manifest = write_manifest(&dir)?;
    Ok(ExperimentOutput {
        dir,
        summaries,
        runs: results.into_iter().map(|(r, _)| r).collect(),
        manifest,
    })
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_dir() {
            collect_files(root, &path, out)?;
        } else if path.file_name().is_some_and(|n| n != "manifest.json") {
            out.push(path);
        }
    }
    Ok(())
}

/// Hashes every file under `dir` into `dir/manifest.json`.
pub fn write_manifest(dir: &Path) -> Result<Vec<ManifestEntry>> {
    let mut files = Vec::new();
    collect_files(dir, dir, &mut files)?;
    let mut entries: Vec<ManifestEntry> = files
        .iter()
        .map(|p| {
            let bytes = fs::read(p).map_err(|e| Error::io(p, e))?;
            let rel = p.strip_prefix(dir).expect("file under dir");
            let path = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
            Ok(ManifestEntry {
                path,
                sha256: hex::encode(Sha256::digest(&bytes)),
            })
        })
        .collect::<Result<_>>()?;
    entries.sort_by(|a, b| a.path.cmp(&b.path));
    write(&dir.join("manifest.json"), &serde_json::to_string_pretty(&entries)?)?;
    Ok(entries)
}

/// Summary, comparison and convergence data recomputed from the run files
/// of an experiment directory.
#[derive(Debug, Clone)]
pub struct Report {
    pub summaries: Vec<SummaryStats>,
    pub comparison: Option<Vec<Comparison>>,
    pub convergence: Vec<ConvergenceBand>,
}

pub fn report(dir: &Path, reference: &str) -> Result<Report> {
    let mut by_algo: BTreeMap<usize, (String, Vec<RunInfo>, Vec<Vec<f64>>)> = BTreeMap::new();
    let mut maximize = None;
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let sub = entry.map_err(|e| Error::io(dir, e))?.path();
        if !sub.is_dir() {
            continue;
        }
        let name = sub.file_name().unwrap_or_default().to_string_lossy().to_string();
        let Ok(algo) = name.parse::<AlgorithmId>() else {
            continue;
        };
        let order = AlgorithmId::ALL.iter().position(|a| *a == algo).unwrap_or(usize::MAX);
        let mut runs = Vec::new();
        let mut i = 0;
        loop {
            let json = sub.join(format!("run_{i}.json"));
            if !json.is_file() {
                break;
            }
            let info: RunInfo = serde_json::from_str(&fs::read_to_string(&json).map_err(|e| Error::io(&json, e))?)?;
            let csv = sub.join(format!("run_{i}.csv"));
            let text = fs::read_to_string(&csv).map_err(|e| Error::io(&csv, e))?;
            let trace = RunTrace::parse_csv(&info.algo, info.seed, &text)?;
            maximize.get_or_insert(info.objective.parse::<ObjectiveKind>()?.maximize());
            runs.push((info, trace.best_so_far()));
            i += 1;
        }
        if runs.is_empty() {
            continue;
        }
        let (infos, curves) = runs.into_iter().unzip();
        by_algo.insert(order, (algo.name().to_string(), infos, curves));
    }
    if by_algo.is_empty() {
        return Err(Error::Config(format!("no runs found under {}", dir.display())));
    }
    let mut summaries = Vec::new();
    let mut curves = Vec::new();
    for (_, (name, infos, c)) in by_algo {
        let values: Vec<f64> = infos.iter().map(|r| r.best_value).collect();
        summaries.push(SummaryStats::from_values(&name, &values)?);
        curves.push((name, c));
    }
    let comparison = if summaries.len() >= 2 && summaries.iter().any(|s| s.algo == reference) {
        Some(compare_report(&summaries, reference, maximize.unwrap_or(true))?)
    } else {
        None
    };
    Ok(Report {
        summaries,
        comparison,
        convergence: emit_plot_data(&curves),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_protocol() {
        let c = ExperimentConfig::default();
        assert_eq!((c.pop_size, c.eval_budget, c.runs), (25, 1000, 10));
        assert_eq!(c.algorithms.len(), 10);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn toml_round_trip() {
        let c = ExperimentConfig::default();
        let text = c.to_toml_string().unwrap();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), c);
        let partial = ExperimentConfig::from_toml_str("runs = 3\nalgorithms = [\"EEA\", \"WOA\"]\n[ensemble]\nomega = 1e-5\n").unwrap();
        assert_eq!(partial.runs, 3);
        assert_eq!(partial.ensemble.omega, 1e-5);
        assert!(ExperimentConfig::from_toml_str("runz = 3").is_err());
    }

    #[test]
    fn invalid_configs() {
        let mut c = ExperimentConfig::default();
        c.runs = 0;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.algorithms.clear();
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.eval_budget = 10;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.algorithms = vec!["WOA".into(), "woa".into()];
        assert!(c.validate().is_err());
    }

    #[test]
    fn hash_ignores_location() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.output_dir = "elsewhere".into();
        b.workers = 4;
        assert_eq!(a.hash(), b.hash());
        b.master_seed = 1;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        let s = run_seed(0, AlgorithmId::Eea, 0);
        assert_eq!(s, run_seed(0, AlgorithmId::Eea, 0));
        assert_ne!(s, run_seed(0, AlgorithmId::Eea, 1));
        assert_ne!(s, run_seed(0, AlgorithmId::Woa, 0));
        assert_ne!(s, run_seed(1, AlgorithmId::Eea, 0));
        let digest = Sha256::digest(b"0:EEA:0");
        assert_eq!(s.to_be_bytes(), digest[..8]);
    }
}
