use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hywave::dynamics::PtoSetting;
use hywave::environment::{generate_site, site_to_csv, BUNDLED_SITES};
use hywave::harness::{
    compare_csv, convergence_csv, landscape, landscape_csv, report, run_experiment, summary_csv, ExperimentConfig,
    LogAxis,
};
use hywave::objectives::{DesignVector, ObjectiveKind};

#[derive(Parser)]
#[command(name = "hywave", version, about = "Hybrid wind/wave platform optimisation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (TOML). Defaults apply when omitted.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Output location override.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker thread override; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        if let Some(o) = &self.out {
            cfg.output_dir = o.clone();
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured algorithm over the configured number of runs.
    Optimize(Common),
    /// Grid search over one PTO pair shared by all sea states.
    Landscape {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20.0)]
        distance: f64,
        #[arg(long, default_value_t = 5.0)]
        radius: f64,
        #[arg(long, default_value_t = 1e1)]
        k_min: f64,
        #[arg(long, default_value_t = 1e10)]
        k_max: f64,
        #[arg(long, default_value_t = 20)]
        k_points: usize,
        #[arg(long, default_value_t = 1e1)]
        b_min: f64,
        #[arg(long, default_value_t = 1e10)]
        b_max: f64,
        #[arg(long, default_value_t = 20)]
        b_points: usize,
    },
    /// Evaluate one design and print every objective as JSON.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// JSON design file (`distance`, `radius`, `pto`). Overrides the
        /// shared-pair flags.
        #[arg(long)]
        design: Option<PathBuf>,
        #[arg(long, default_value_t = 20.0)]
        distance: f64,
        #[arg(long, default_value_t = 5.0)]
        radius: f64,
        #[arg(long, default_value_t = 1e4)]
        k: f64,
        #[arg(long, default_value_t = 1e6)]
        b: f64,
    },
    /// Recompute summary, comparison and convergence data from run files.
    Report {
        /// Experiment directory (`<out>/<site>/<objective>`).
        dir: PathBuf,
        #[arg(long, default_value = "EEA")]
        reference: String,
        /// Where to write the tables; defaults to `dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate the bundled scatter tables.
    GenSites {
        #[arg(long, default_value = "sites")]
        out: PathBuf,
    },
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Optimize(common) => {
            let cfg = common.load()?;
            let out = run_experiment(&cfg)?;
            print!("{}", summary_csv(&out.summaries));
            println!("wrote {} files under {}", out.manifest.len() + 1, out.dir.display());
        }
        Command::Landscape {
            common,
            distance,
            radius,
            k_min,
            k_max,
            k_points,
            b_min,
            b_max,
            b_points,
        } => {
            let cfg = common.load()?;
            let model = cfg.model()?;
            let form = match cfg.objective_kind()? {
                ObjectiveKind::PowerLoss(f) => f,
                _ => cfg.power_loss_form,
            };
            let cells = landscape(
                &model,
                distance,
                radius,
                &LogAxis::new(k_min, k_max, k_points)?,
                &LogAxis::new(b_min, b_max, b_points)?,
                form,
            )?;
            let path = cfg.output_dir.join(&model.site().name).join("landscape.csv");
            write(&path, &landscape_csv(&cells))?;
            println!("wrote {} cells to {}", cells.len(), path.display());
        }
        Command::Evaluate {
            common,
            design,
            distance,
            radius,
            k,
            b,
        } => {
            let cfg = common.load()?;
            let model = cfg.model()?;
            let d: DesignVector = match design {
                Some(p) => serde_json::from_str(&fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?)?,
                None => DesignVector::uniform(distance, radius, PtoSetting::new(k, b)?, model.n_states()),
            };
            cfg.design_space(model.n_states()).validate(&d)?;
            let rec = model.evaluate(&d, cfg.objective_kind()?)?;
            let out = serde_json::json!({
                "site": model.site().name,
                "objective": cfg.objective_kind()?.name(),
                "fitness": rec.fitness,
                "failed": rec.failed,
                "unconverged_states": rec.unconverged,
                "annual_power": model.annual_power(&d)?,
                "annual_nacelle": model.annual_nacelle(&d)?,
                "nacelle_ratio": model.nacelle_ratio(&d)?,
                "power_loss": model.power_loss(&d, cfg.power_loss_form)?,
                "state_power": rec.state_power,
                "state_nacelle": rec.state_nacelle,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Report { dir, reference, out } => {
            let r = report(&dir, &reference)?;
            let out = out.unwrap_or(dir);
            write(&out.join("summary.csv"), &summary_csv(&r.summaries))?;
            write(&out.join("convergence.csv"), &convergence_csv(&r.convergence))?;
            print!("{}", summary_csv(&r.summaries));
            match r.comparison {
                Some(rows) => {
                    let text = compare_csv(&reference, &rows);
                    write(&out.join("compare.csv"), &text)?;
                    print!("{text}");
                }
                None => log::warn!("no comparison: reference {reference} missing or fewer than two algorithms"),
            }
        }
        Command::GenSites { out } => {
            if out.is_file() {
                bail!("{} is a file", out.display());
            }
            for p in BUNDLED_SITES {
                let path = out.join(format!("{}.csv", p.name));
                write(&path, &site_to_csv(&generate_site(&p)))?;
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}
