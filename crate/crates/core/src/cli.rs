//! Command-line front end.
//!
//! Exit status is 0 on success, 1 on a usage error and 2 on a data error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::clustering;
use crate::curve::{default_lambda_grid, LambdaGrid, PrCurve, DEFAULT_RESOLUTION};
use crate::data::PairedDataset;
use crate::ensemble::TrainingConfig;
use crate::error::{Error, Result};
use crate::estimator::estimate_pr_curve;
use crate::io::{self, CurveFormat, CurveMeta, CurveOutput, FeatureFormat};
use crate::measures::exact_pr_curve;
use crate::roc::{mcr_frontier_discrete, roc_from_scores};
use crate::synthetic::{self, ClusterGeometry, Experiment, TheoreticalCurveSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "PRD_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "prd",
    version,
    about = "Precision-recall curves between two distributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact curve between two histogram files.
    Exact {
        p: PathBuf,
        q: PathBuf,
        /// Treat histogram values as counts and normalize them.
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        curve: CurveArgs,
    },
    /// Classifier-based estimate from two feature files.
    Estimate {
        real: PathBuf,
        fake: PathBuf,
        #[command(flatten)]
        train: TrainArgs,
        /// Write the held-out scores as `score,origin` CSV.
        #[arg(long, value_name = "PATH")]
        emit_scores: Option<PathBuf>,
        /// Write the trained ensemble as JSON.
        #[arg(long, value_name = "PATH")]
        emit_model: Option<PathBuf>,
        #[command(flatten)]
        curve: CurveArgs,
    },
    /// K-means histogram baseline from two feature files.
    ClusterBaseline {
        real: PathBuf,
        fake: PathBuf,
        #[arg(long, default_value_t = clustering::DEFAULT_CLUSTERS)]
        clusters: usize,
        #[arg(long, default_value_t = clustering::DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        curve: CurveArgs,
    },
    /// ROC frontier from a `score,origin` CSV.
    Roc {
        scores: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Mode-collapse-region frontier between two histogram files.
    Mcr {
        p: PathBuf,
        q: PathBuf,
        #[arg(long)]
        normalize: bool,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Generate a synthetic benchmark.
    Synth {
        #[command(subcommand)]
        kind: SynthKind,
    },
    /// Reference curve of a rectangular spec, a synth sidecar, or a Gaussian pair.
    Theoretical {
        #[arg(long, requires = "max_recall", conflicts_with_all = ["spec", "mu1"])]
        max_precision: Option<f64>,
        #[arg(long, requires = "max_precision")]
        max_recall: Option<f64>,
        /// Sidecar JSON written by `synth`.
        #[arg(long, conflicts_with = "mu1")]
        spec: Option<PathBuf>,
        #[arg(long, requires_all = ["mu2", "sigma"], allow_hyphen_values = true)]
        mu1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        mu2: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[command(flatten)]
        curve: CurveArgs,
    },
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
}

#[derive(Debug, Args)]
struct CurveArgs {
    /// Number of lambda values in the angular grid.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    lambdas: usize,
    /// Also emit the lambda = 0 and lambda = inf points.
    #[arg(long)]
    endpoints: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    members: usize,
    #[arg(long, default_value_t = 50)]
    epochs: usize,
    #[arg(long, default_value_t = 1e-3)]
    lr: f64,
    #[arg(long, default_value_t = 0.1)]
    weight_decay: f64,
    #[arg(long, default_value_t = 64)]
    batch: usize,
}

#[derive(Debug, Subcommand)]
enum SynthKind {
    /// Five reference clusters against the first `q`.
    ClassSubset {
        #[arg(long)]
        q: usize,
        #[arg(long, default_value_t = 400)]
        per_class: usize,
        #[command(flatten)]
        common: SynthArgs,
    },
    /// Two sets of `classes` clusters sharing a fraction `ratio`.
    ClassOverlap {
        #[arg(long, default_value_t = 80)]
        classes: usize,
        #[arg(long)]
        ratio: f64,
        #[arg(long, default_value_t = 50)]
        per_class: usize,
        #[command(flatten)]
        common: SynthArgs,
    },
    /// Mixture `w A + (1 - w) B` against `A`.
    Reweighting {
        #[arg(long, default_value_t = 0.6)]
        weight_a: f64,
        #[arg(long, default_value_t = 2000)]
        per_side: usize,
        #[command(flatten)]
        common: SynthArgs,
    },
    /// Two 1-D Gaussians with a shared standard deviation.
    Gaussian {
        #[arg(long, allow_hyphen_values = true)]
        mu1: f64,
        #[arg(long, allow_hyphen_values = true)]
        mu2: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 2000)]
        per_side: usize,
        #[command(flatten)]
        common: SynthArgs,
    },
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = FileFormat::Csv)]
    format: FileFormat,
    /// Center-to-center cluster distance in standard deviations.
    #[arg(long, default_value_t = 10.0)]
    separation: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FileFormat {
    Csv,
    Binary,
}

/// Contents of the `theoretical.json` sidecar written by `synth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SynthSidecar {
    pub experiment: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_precision: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_recall: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gaussian: Option<GaussianParams>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub mu1: f64,
    pub mu2: f64,
    pub sigma: f64,
}

/// Runs the CLI with `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let pool = match thread_pool() {
        Ok(pool) => pool,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}

fn thread_pool() -> std::result::Result<rayon::ThreadPool, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let n: usize = value
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {value:?}"))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| e.to_string())
}

fn grid_for(args: &CurveArgs) -> Result<LambdaGrid> {
    let grid = default_lambda_grid(args.lambdas)?;
    Ok(if args.endpoints {
        grid.with_endpoints()
    } else {
        grid
    })
}

fn emit(output: &CurveOutput, args: &OutArgs) -> Result<()> {
    let format = match args.format {
        OutFormat::Json => CurveFormat::Json,
        OutFormat::Csv => CurveFormat::Csv,
    };
    match &args.out {
        Some(path) => io::save_curve(output, path, format),
        None => {
            let text = match format {
                CurveFormat::Json => output.to_json()?,
                CurveFormat::Csv => output.to_csv()?,
            };
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_curve(curve: &PrCurve, meta: CurveMeta, args: &CurveArgs) -> Result<()> {
    emit(&CurveOutput::from_curve(curve, meta), &args.out)
}

fn load_pair(real: &Path, fake: &Path) -> Result<PairedDataset> {
    PairedDataset::new(io::load_features(real)?, io::load_features(fake)?)
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Exact {
            p,
            q,
            normalize,
            curve,
        } => {
            let p = io::load_histogram(&p, normalize)?;
            let q = io::load_histogram(&q, normalize)?;
            let result = exact_pr_curve(&p, &q, &grid_for(&curve)?)?;
            emit_curve(&result, CurveMeta::new("exact"), &curve)
        }
        Command::Estimate {
            real,
            fake,
            train,
            emit_scores,
            emit_model,
            curve,
        } => {
            let data = load_pair(&real, &fake)?;
            let config = TrainingConfig {
                member_count: train.members,
                epochs: train.epochs,
                initial_learning_rate: train.lr,
                weight_decay: train.weight_decay,
                batch_size: train.batch,
                seed: train.seed,
            };
            let estimate = estimate_pr_curve(&data, &config, &grid_for(&curve)?)?;
            if let Some(path) = emit_scores {
                io::write_atomic(&path, io::encode_scores(&estimate.scored).as_bytes())?;
            }
            if let Some(path) = emit_model {
                io::write_atomic(&path, estimate.model.to_json()?.as_bytes())?;
            }
            let meta = CurveMeta::new("estimate")
                .with_seed(config.seed)
                .with_config(&config)?;
            emit_curve(&estimate.curve, meta, &curve)
        }
        Command::ClusterBaseline {
            real,
            fake,
            clusters,
            restarts,
            seed,
            curve,
        } => {
            let real = io::load_features(&real)?;
            let fake = io::load_features(&fake)?;
            let result = clustering::histogram_prd_with_restarts(
                &real,
                &fake,
                clusters,
                &grid_for(&curve)?,
                seed,
                restarts,
            )?;
            let meta = CurveMeta::new("cluster-baseline")
                .with_seed(seed)
                .with_config(&serde_json::json!({ "clusters": clusters, "restarts": restarts }))?;
            emit_curve(&result, meta, &curve)
        }
        Command::Roc { scores, out } => {
            let scored = io::load_scores(&scores)?;
            let frontier = roc_from_scores(&scored);
            emit(
                &CurveOutput::from_roc(&frontier, CurveMeta::new("roc")),
                &out,
            )
        }
        Command::Mcr {
            p,
            q,
            normalize,
            resolution,
            out,
        } => {
            let p = io::load_histogram(&p, normalize)?;
            let q = io::load_histogram(&q, normalize)?;
            let frontier = mcr_frontier_discrete(&p, &q, resolution)?;
            emit(
                &CurveOutput::from_mcr(&frontier, CurveMeta::new("mcr")),
                &out,
            )
        }
        Command::Synth { kind } => synth(kind),
        Command::Theoretical {
            max_precision,
            max_recall,
            spec,
            mu1,
            mu2,
            sigma,
            curve,
        } => {
            let grid = grid_for(&curve)?;
            let gaussian = match (mu1, mu2, sigma) {
                (Some(mu1), Some(mu2), Some(sigma)) => Some(GaussianParams { mu1, mu2, sigma }),
                _ => None,
            };
            let result = if let Some(g) = gaussian {
                synthetic::gaussian_optimal_curve(g.mu1, g.mu2, g.sigma, &grid)?
            } else if let Some(path) = spec {
                let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
                let sidecar: SynthSidecar = serde_json::from_slice(&bytes)?;
                match (sidecar.gaussian, sidecar.max_precision, sidecar.max_recall) {
                    (Some(g), _, _) => {
                        synthetic::gaussian_optimal_curve(g.mu1, g.mu2, g.sigma, &grid)?
                    }
                    (None, Some(a), Some(b)) => synthetic::theoretical_rectangle_curve(
                        &TheoreticalCurveSpec::new(a, b)?,
                        &grid,
                    ),
                    _ => return Err(Error::invalid("sidecar carries no reference curve")),
                }
            } else if let (Some(a), Some(b)) = (max_precision, max_recall) {
                synthetic::theoretical_rectangle_curve(&TheoreticalCurveSpec::new(a, b)?, &grid)
            } else {
                return Err(Error::invalid(
                    "theoretical needs --max-precision/--max-recall, --spec, or --mu1/--mu2/--sigma",
                ));
            };
            emit_curve(&result, CurveMeta::new("theoretical"), &curve)
        }
    }
}

fn synth(kind: SynthKind) -> Result<()> {
    let (experiment, name, common, gaussian) = match kind {
        SynthKind::ClassSubset {
            q,
            per_class,
            common,
        } => {
            let geometry = geometry(&common);
            let e = synthetic::class_subset_experiment(q, per_class, common.seed, &geometry)?;
            (e, "class-subset", common, None)
        }
        SynthKind::ClassOverlap {
            classes,
            ratio,
            per_class,
            common,
        } => {
            let geometry = geometry(&common);
            let e = synthetic::class_overlap_experiment(
                classes,
                ratio,
                per_class,
                common.seed,
                &geometry,
            )?;
            (e, "class-overlap", common, None)
        }
        SynthKind::Reweighting {
            weight_a,
            per_side,
            common,
        } => {
            let geometry = geometry(&common);
            let e = synthetic::reweighting_experiment(weight_a, per_side, common.seed, &geometry)?;
            (e, "reweighting", common, None)
        }
        SynthKind::Gaussian {
            mu1,
            mu2,
            sigma,
            per_side,
            common,
        } => {
            let mut rng_seed = common.seed;
            let real = synthetic::sample_gaussian_1d(mu1, sigma, per_side, rng_seed)?;
            rng_seed = rng_seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let fake = synthetic::sample_gaussian_1d(mu2, sigma, per_side, rng_seed)?;
            let data = PairedDataset::new(real, fake)?;
            // the optimal curve is not rectangular; the sidecar carries the parameters
            let spec = TheoreticalCurveSpec::new(1.0, 1.0)?;
            let g = GaussianParams { mu1, mu2, sigma };
            (Experiment { data, spec }, "gaussian", common, Some(g))
        }
    };
    write_experiment(&experiment, name, &common, gaussian)
}

fn geometry(common: &SynthArgs) -> ClusterGeometry {
    ClusterGeometry {
        separation: common.separation,
        ..ClusterGeometry::default()
    }
}

fn write_experiment(
    experiment: &Experiment,
    name: &str,
    common: &SynthArgs,
    gaussian: Option<GaussianParams>,
) -> Result<()> {
    std::fs::create_dir_all(&common.out_dir).map_err(|e| Error::io(&common.out_dir, e))?;
    let (ext, format) = match common.format {
        FileFormat::Csv => ("csv", FeatureFormat::Csv),
        FileFormat::Binary => ("prdf", FeatureFormat::Binary),
    };
    io::save_features(
        experiment.data.real(),
        &common.out_dir.join(format!("real.{ext}")),
        format,
    )?;
    io::save_features(
        experiment.data.fake(),
        &common.out_dir.join(format!("fake.{ext}")),
        format,
    )?;
    let sidecar = SynthSidecar {
        experiment: name.into(),
        seed: common.seed,
        max_precision: gaussian.is_none().then_some(experiment.spec.max_precision),
        max_recall: gaussian.is_none().then_some(experiment.spec.max_recall),
        gaussian,
    };
    let mut text = serde_json::to_string_pretty(&sidecar)?;
    text.push('\n');
    io::write_atomic(&common.out_dir.join("theoretical.json"), text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["prd", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["prd", "exact", "--bogus"]), EXIT_USAGE);
        assert_eq!(run(["prd"]), EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run(["prd", "--help"]), EXIT_OK);
    }

    #[test]
    fn missing_file_is_data_error() {
        assert_eq!(
            run(["prd", "exact", "/nonexistent/p.csv", "/nonexistent/q.csv"]),
            EXIT_DATA
        );
    }
}
