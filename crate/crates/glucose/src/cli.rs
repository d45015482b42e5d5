//! `glucose` subcommands: `gen`, `train`, `predict` and `evaluate`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use glucose_core::forest::fit_forest;
use glucose_core::piecewise::train_pipeline;
use glucose_core::synth::generate_synthetic_dataset;
use glucose_core::{Dataset, ForestParams, SplitConfig, SynthConfig, TestTransform};

use crate::config::{FileConfig, ReportFormat};
use crate::csv_io::{format_number, load_csv, load_table, save_csv};
use crate::error::{Error, Result};
use crate::model::{ModelFile, SplitRecord};
use crate::plot::clarke_svg;
use crate::report::{MethodResult, Report, RowResult};

/// Seed used by `gen` and `train` when none is given.
pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_WINDOW: usize = 5;

#[derive(Debug, Parser)]
#[command(
    name = "glucose",
    version,
    about = "Blood glucose estimation from feature tables"
)]
pub struct Cli {
    /// TOML file with per-command defaults; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset CSV.
    Gen(GenArgs),
    /// Train the averaging pipeline and the baseline forest.
    Train(TrainArgs),
    /// Estimate glucose for every row of a feature CSV.
    Predict(PredictArgs),
    /// Score both methods on the held-out rows of a dataset.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub informative: Option<usize>,
    #[arg(long)]
    pub noise_sd: Option<f64>,
    #[arg(long)]
    pub drift_amp: Option<f64>,
    /// Artifact period in measurements.
    #[arg(long)]
    pub drift_period: Option<f64>,
    #[arg(long)]
    pub glucose_low: Option<f64>,
    #[arg(long)]
    pub glucose_high: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Seeds both the train/test split and the forests.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub trees: Option<usize>,
    #[arg(long)]
    pub train_fraction: Option<f64>,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long)]
    pub min_samples_leaf: Option<usize>,
    #[arg(long)]
    pub mtry: Option<usize>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Feature CSV, read as one chronological series. A trailing
    /// glucose_mmol_l column is ignored.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub test_transform: Option<Transform>,
    /// Output CSV; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// The dataset the model was trained from.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<ReportFormat>,
    #[arg(long, value_enum)]
    pub test_transform: Option<Transform>,
    /// Report file; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Write the pipeline's Clarke error grid as SVG.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

/// Command-line spelling of [`TestTransform`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Transform {
    History,
    DcGain,
    GainOnly,
}

impl From<Transform> for TestTransform {
    fn from(t: Transform) -> Self {
        match t {
            Transform::History => TestTransform::History,
            Transform::DcGain => TestTransform::DcGain,
            Transform::GainOnly => TestTransform::GainOnly,
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Gen(a) => cmd_gen(&synth_config(&a, &file), &a.output, out),
        Command::Train(a) => {
            let (split, params, window) = train_config(&a, &file);
            cmd_train(&a.data, &a.output, &split, window, &params, out)
        }
        Command::Predict(a) => {
            let mode = a
                .test_transform
                .map(Into::into)
                .or(file.predict.test_transform)
                .unwrap_or_default();
            cmd_predict(&a.model, &a.data, mode, a.output.as_deref(), out)
        }
        Command::Evaluate(a) => {
            let mode = a
                .test_transform
                .map(Into::into)
                .or(file.evaluate.test_transform)
                .unwrap_or_default();
            let format = a.format.or(file.evaluate.format).unwrap_or_default();
            let report = cmd_evaluate(&a.model, &a.data, mode)?;
            let text = match format {
                ReportFormat::Text => report.to_text(),
                ReportFormat::Structured => report.to_json()?,
            };
            match &a.output {
                Some(p) => write_file(p, text.as_bytes())?,
                None => write_stdout(out, text.as_bytes())?,
            }
            if let Some(p) = &a.plot {
                let (refs, preds): (Vec<f64>, Vec<f64>) = report
                    .rows
                    .iter()
                    .map(|r| (r.reference, r.pipeline))
                    .unzip();
                write_file(
                    p,
                    clarke_svg("Clarke error grid (pipeline)", &refs, &preds).as_bytes(),
                )?;
            }
            Ok(())
        }
    }
}

pub fn synth_config(a: &GenArgs, file: &FileConfig) -> SynthConfig {
    let f = &file.gen;
    let d = SynthConfig::default();
    SynthConfig {
        n: a.n.or(f.n).unwrap_or(d.n),
        k: a.k.or(f.k).unwrap_or(d.k),
        informative: a.informative.or(f.informative).unwrap_or(d.informative),
        noise_sd: a.noise_sd.or(f.noise_sd).unwrap_or(d.noise_sd),
        glucose_range: (
            a.glucose_low.or(f.glucose_low).unwrap_or(d.glucose_range.0),
            a.glucose_high
                .or(f.glucose_high)
                .unwrap_or(d.glucose_range.1),
        ),
        drift_amp: a.drift_amp.or(f.drift_amp).unwrap_or(d.drift_amp),
        drift_period: a.drift_period.or(f.drift_period).unwrap_or(d.drift_period),
        seed: a.seed.or(f.seed).unwrap_or(DEFAULT_SEED),
    }
}

pub fn train_config(a: &TrainArgs, file: &FileConfig) -> (SplitConfig, ForestParams, usize) {
    let f = &file.train;
    let seed = a.seed.or(f.seed).unwrap_or(DEFAULT_SEED);
    let split = SplitConfig {
        train_fraction: a
            .train_fraction
            .or(f.train_fraction)
            .unwrap_or(SplitConfig::default().train_fraction),
        seed,
    };
    let d = ForestParams::default();
    let params = ForestParams {
        n_trees: a.trees.or(f.trees).unwrap_or(d.n_trees),
        max_depth: a.max_depth.or(f.max_depth).or(d.max_depth),
        min_samples_leaf: a
            .min_samples_leaf
            .or(f.min_samples_leaf)
            .unwrap_or(d.min_samples_leaf),
        mtry: a.mtry.or(f.mtry).or(d.mtry),
        seed,
        ..d
    };
    (
        split,
        params,
        a.window.or(f.window).unwrap_or(DEFAULT_WINDOW),
    )
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn write_stdout(out: &mut dyn Write, bytes: &[u8]) -> Result<()> {
    out.write_all(bytes).map_err(|e| Error::io("<stdout>", e))
}

pub fn cmd_gen(cfg: &SynthConfig, output: &Path, out: &mut dyn Write) -> Result<()> {
    let d = generate_synthetic_dataset(cfg)?;
    save_csv(output, &d)?;
    let msg = format!(
        "wrote {} rows x {} features to {}\n",
        d.n_rows(),
        d.n_features(),
        output.display()
    );
    write_stdout(out, msg.as_bytes())
}

/// Trains the pipeline and the baseline on the training part of `data`.
pub fn train_model(
    d: &Dataset,
    split: &SplitConfig,
    window: usize,
    params: &ForestParams,
) -> Result<ModelFile> {
    let (train_idx, _) = glucose_core::dataset::split_indices(d.n_rows(), split)?;
    let train = d.select_rows(&train_idx)?;
    let pipeline = train_pipeline(&train, window, params)?;
    let baseline = fit_forest(train.features(), train.glucose(), params).map_err(|e| {
        glucose_core::Error::Stage {
            stage: "baseline forest",
            source: Box::new(e),
        }
    })?;
    let record = SplitRecord {
        train_fraction: split.train_fraction,
        seed: split.seed,
        n_rows: d.n_rows(),
    };
    Ok(ModelFile::new(
        d.feature_names().to_vec(),
        record,
        pipeline,
        baseline,
    ))
}

pub fn cmd_train(
    data: &Path,
    output: &Path,
    split: &SplitConfig,
    window: usize,
    params: &ForestParams,
    out: &mut dyn Write,
) -> Result<()> {
    let d = load_csv(data)?;
    let model = train_model(&d, split, window, params)?;
    model.save(output)?;

    let p = &model.pipeline;
    let n_train = split.train_size(d.n_rows());
    let mut s = format!(
        "trained on {n_train} of {} rows, window {window}, {} trees per forest\n",
        d.n_rows(),
        params.n_trees
    );
    let sizes = p.partition_sizes.map(|c| c.to_string()).join(" / ");
    s += &format!("partition sizes (high / mid / low): {sizes}\n");
    s += &format!(
        "boundaries (mmol/L): {} / {}\n",
        format_number(p.boundaries[0]),
        format_number(p.boundaries[1])
    );
    s += "feature importances:\n";
    for (name, w) in model.feature_names.iter().zip(&p.importance_weights) {
        s += &format!("  {name:<12} {w:.4}\n");
    }
    s += &format!("model written to {}\n", output.display());
    write_stdout(out, s.as_bytes())
}

fn check_features(model: &ModelFile, names: &[String]) -> Result<()> {
    if names != model.feature_names.as_slice() {
        return Err(Error::Usage(format!(
            "data columns {names:?} do not match the model's features {:?}",
            model.feature_names
        )));
    }
    Ok(())
}

pub fn cmd_predict(
    model: &Path,
    data: &Path,
    mode: TestTransform,
    output: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    let model = ModelFile::load(model)?;
    let table = load_table(data)?;
    check_features(&model, &table.names)?;
    let pred = model.pipeline.predict(&table.features, mode)?;
    let base = model.baseline.predict_rows(&table.features)?;

    let mut s = String::from("row,subset,pipeline_mmol_l,baseline_mmol_l\n");
    for (i, ((g, t), b)) in pred
        .glucose
        .iter()
        .zip(&pred.classes)
        .zip(&base)
        .enumerate()
    {
        s += &format!("{i},{t},{},{}\n", format_number(*g), format_number(*b));
    }
    match output {
        Some(p) => write_file(p, s.as_bytes()),
        None => write_stdout(out, s.as_bytes()),
    }
}

/// Scores the baseline and the pipeline on the rows held out at training.
pub fn evaluate_model(model: &ModelFile, d: &Dataset, mode: TestTransform) -> Result<Report> {
    check_features(model, d.feature_names())?;
    if d.n_rows() != model.split.n_rows {
        return Err(Error::Usage(format!(
            "model was trained on {} rows but the data has {}",
            model.split.n_rows,
            d.n_rows()
        )));
    }
    let (_, test_idx) = model.split.indices()?;
    let refs: Vec<f64> = test_idx.iter().map(|&i| d.glucose()[i]).collect();
    let pipe = model.pipeline.predict_rows(d.features(), &test_idx, mode)?;
    let base = model
        .baseline
        .predict_rows(&d.features().select_rows(&test_idx))?;

    let methods = vec![
        MethodResult::compute("baseline", &refs, &base)?,
        MethodResult::compute("pipeline", &refs, &pipe.glucose)?,
    ];
    let rows = test_idx
        .iter()
        .enumerate()
        .map(|(j, &row)| RowResult {
            row,
            reference: refs[j],
            baseline: base[j],
            pipeline: pipe.glucose[j],
            subset: pipe.classes[j],
        })
        .collect();
    Ok(Report::new(mode, methods, rows))
}

pub fn cmd_evaluate(model: &Path, data: &Path, mode: TestTransform) -> Result<Report> {
    let model = ModelFile::load(model)?;
    let d = load_csv(data)?;
    evaluate_model(&model, &d, mode)
}
