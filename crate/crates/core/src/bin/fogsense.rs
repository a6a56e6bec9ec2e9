//! Command-line front end: run scenarios and sweeps, sense single frame
//! files, train and save classifiers, demo manifold embeddings, and calibrate
//! detector thresholds.
//!
//! Exit codes: 0 success · 1 validation/usage error · 2 runtime or
//! convergence error. Data goes to stdout or `--out` files; diagnostics go to
//! stderr.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fogsense_core::error::Error;
use fogsense_core::learning::{
    classify::{train_regression_classifier, train_svm_classifier},
    gen_manifold, lle_embed,
    manifold::affine_procrustes_residual,
    model_io, trustworthiness, Kernel, ManifoldKind,
};
use fogsense_core::sensing::{
    calibrate_cyclic_threshold, calibrate_energy_threshold, calibrate_waveform_threshold, decide,
    detect_cyclostationary, energy_metric, framefile, waveform_metric, FeatureVector,
    FEATURE_SCHEMA_VERSION,
};
use fogsense_core::simharness::{self, Scenario};

#[derive(Parser)]
#[command(
    name = "fogsense",
    about = "Fog-computing cognitive radio network simulator",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and emit the metrics report as CSV.
    Run(RunArgs),
    /// Run one scenario per value of a swept parameter.
    Sweep(SweepArgs),
    /// One-shot detection on a binary frame file.
    Sense(SenseArgs),
    /// Train a classifier on a labeled feature CSV and save it.
    Train(TrainArgs),
    /// Generate a manifold, embed it with LLE, and write the CSVs.
    Embed(EmbedArgs),
    /// Monte Carlo threshold calibration.
    Calibrate(CalibrateArgs),
    /// Run a scenario and print the cloud-state dump plus metrics text.
    Report(ReportArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file; defaults apply for absent keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides, repeatable: --set key=value
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<Scenario, Error> {
        let text = match &self.config {
            Some(path) => fs::read_to_string(path)?,
            None => String::new(),
        };
        let mut overrides = Vec::new();
        for item in &self.overrides {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("--set expects key=value, got '{item}'")))?;
            overrides.push((k.trim().to_string(), v.trim().to_string()));
        }
        let mut scenario = Scenario::parse(&text)?.with_overrides(&overrides)?;
        if let Some(seed) = self.seed {
            scenario.master_seed = seed;
        }
        Ok(scenario)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Parameter to sweep: snr_db, pfa_target, transport_drop_prob, or eta.
    #[arg(long)]
    param: String,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',')]
    values: Vec<f64>,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SenseArgs {
    /// Input frame file (see the documented binary layout).
    #[arg(long = "in")]
    input: PathBuf,
    /// Detector: energy, waveform, or cyclic.
    #[arg(long)]
    detector: String,
    /// Decision threshold ρ.
    #[arg(long)]
    rho: f64,
    /// Known-pattern frame file (waveform detector).
    #[arg(long)]
    pattern: Option<PathBuf>,
    /// Cyclic frequency candidates (cyclic detector).
    #[arg(long, value_delimiter = ',', default_value = "0.125,0.25,0.375")]
    alpha_grid: Vec<f64>,
    /// Lags for the cyclic detector.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    tau_set: Vec<i64>,
}

#[derive(Args)]
struct TrainArgs {
    /// Labeled feature CSV: columns f0..f5,label with label ∈ {0,1}.
    #[arg(long)]
    data: PathBuf,
    /// Engine: regression or svm.
    #[arg(long)]
    engine: String,
    /// LASSO penalty for the regression engine (0 = plain least squares).
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Box constraint for the SVM engine.
    #[arg(long, default_value_t = 10.0)]
    c: f64,
    /// SVM kernel: linear, rbf, polynomial, sigmoid.
    #[arg(long, default_value = "rbf")]
    kernel: String,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    coef0: f64,
    #[arg(long, default_value_t = 3)]
    degree: u32,
    /// Where to write the serialized model.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EmbedArgs {
    /// Manifold: linear_subspace, s_curve, or swiss_roll.
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    r: usize,
    /// Local Gram regularization (relative to trace).
    #[arg(long, default_value_t = 1e-3)]
    reg: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output prefix: writes <prefix>_ambient.csv, _intrinsic.csv, _embedding.csv.
    #[arg(long)]
    out_prefix: PathBuf,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Detector: energy, waveform, or cyclic.
    #[arg(long)]
    detector: String,
    #[arg(long)]
    pfa: f64,
    /// Frame length.
    #[arg(long, default_value_t = 128)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    noise_var: f64,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Known-pattern frame file (waveform detector).
    #[arg(long)]
    pattern: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "0.125,0.25,0.375")]
    alpha_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    tau_set: Vec<i64>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            // Usage problems are validation errors: exit 1, usage to stderr.
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) | Error::Validation(_) | Error::Format(_) => 1,
        Error::Convergence { .. }
        | Error::RankDeficient { .. }
        | Error::SummaryOverflow { .. }
        | Error::Io(_) => 2,
    }
}

fn dispatch(command: Command) -> Result<(), Error> {
    match command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Sense(args) => cmd_sense(args),
        Command::Train(args) => cmd_train(args),
        Command::Embed(args) => cmd_embed(args),
        Command::Calibrate(args) => cmd_calibrate(args),
        Command::Report(args) => cmd_report(args),
    }
}

fn cmd_run(args: RunArgs) -> Result<(), Error> {
    let scenario = args.scenario.load()?;
    let report = simharness::run(&scenario)?;
    let csv = report.to_csv();
    match &args.out {
        Some(path) => {
            fs::write(path, &csv)?;
            print!("{}", report.to_text());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Error> {
    let scenario = args.scenario.load()?;
    let reports = simharness::sweep(&scenario, &args.param, &args.values)?;
    let mut csv = String::from(simharness::CSV_HEADER);
    csv.push('\n');
    for report in &reports {
        for line in report.to_csv().lines().skip(1) {
            csv.push_str(line);
            csv.push('\n');
        }
    }
    match &args.out {
        Some(path) => {
            fs::write(path, &csv)?;
            for report in &reports {
                print!("{}", report.to_text());
            }
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_sense(args: SenseArgs) -> Result<(), Error> {
    let frame = framefile::read_frame(fs::File::open(&args.input)?)?;
    let (metric, hypothesis) = match args.detector.as_str() {
        "energy" => {
            let m = energy_metric(&frame).value;
            (m, decide(m, args.rho))
        }
        "waveform" => {
            let pattern_path = args
                .pattern
                .as_ref()
                .ok_or_else(|| Error::invalid("waveform detector needs --pattern"))?;
            let pattern = framefile::read_frame(fs::File::open(pattern_path)?)?;
            let m = waveform_metric(&frame, &pattern)?;
            (m, decide(m, args.rho))
        }
        "cyclic" => {
            let (hyp, _, peak) =
                detect_cyclostationary(&frame, &args.alpha_grid, &args.tau_set, args.rho)?;
            (peak, hyp)
        }
        other => {
            return Err(Error::invalid(format!(
                "unknown detector '{other}' (energy, waveform, cyclic)"
            )))
        }
    };
    println!("metric {metric}");
    println!("decision {hypothesis}");
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<(), Error> {
    let text = fs::read_to_string(&args.data)?;
    let (features, labels) = parse_feature_csv(&text)?;
    let model = match args.engine.as_str() {
        "regression" => {
            train_regression_classifier(&features, &labels, args.lambda, FEATURE_SCHEMA_VERSION)?
        }
        "svm" => {
            let kernel = match args.kernel.as_str() {
                "linear" => Kernel::Linear,
                "rbf" => Kernel::Rbf { gamma: args.gamma },
                "polynomial" => Kernel::Polynomial {
                    degree: args.degree,
                    gamma: args.gamma,
                    coef0: args.coef0,
                },
                "sigmoid" => Kernel::Sigmoid {
                    gamma: args.gamma,
                    coef0: args.coef0,
                },
                other => return Err(Error::invalid(format!("unknown kernel '{other}'"))),
            };
            train_svm_classifier(&features, &labels, args.c, kernel, FEATURE_SCHEMA_VERSION)?
        }
        other => {
            return Err(Error::invalid(format!(
                "unknown engine '{other}' (regression, svm)"
            )))
        }
    };
    let correct = features
        .iter()
        .zip(&labels)
        .filter(|(f, &label)| {
            fogsense_core::learning::classify(&model, f)
                .map(|(hyp, _)| hyp.is_occupied() == label)
                .unwrap_or(false)
        })
        .count();
    fs::write(&args.out, model_io::serialize_model(&model))?;
    println!(
        "trained {} on {} samples, training accuracy {}",
        args.engine,
        features.len(),
        correct as f64 / features.len() as f64
    );
    Ok(())
}

fn parse_feature_csv(text: &str) -> Result<(Vec<FeatureVector>, Vec<bool>), Error> {
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with('f')) {
            continue; // optional header
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 7 {
            return Err(Error::invalid(format!(
                "line {}: expected f0..f5,label (7 columns), got {}",
                lineno + 1,
                cols.len()
            )));
        }
        let mut values = Vec::with_capacity(6);
        for c in &cols[..6] {
            values.push(
                c.parse::<f64>()
                    .map_err(|_| Error::invalid(format!("line {}: bad number '{c}'", lineno + 1)))?,
            );
        }
        let label = match cols[6] {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::invalid(format!(
                    "line {}: label must be 0 or 1, got '{other}'",
                    lineno + 1
                )))
            }
        };
        features.push(FeatureVector::new(values, FEATURE_SCHEMA_VERSION)?);
        labels.push(label);
    }
    if features.is_empty() {
        return Err(Error::invalid("no samples in feature CSV"));
    }
    Ok((features, labels))
}

fn cmd_embed(args: EmbedArgs) -> Result<(), Error> {
    let kind: ManifoldKind = args.kind.parse()?;
    let (ambient, intrinsic) = gen_manifold(kind, args.n, args.seed)?;
    let embedding = lle_embed(&ambient, args.k, args.r, args.reg)?;

    let write_matrix = |suffix: &str, m: &nalgebra::DMatrix<f64>| -> Result<(), Error> {
        let mut out = String::new();
        for i in 0..m.nrows() {
            let row: Vec<String> = (0..m.ncols()).map(|j| format!("{}", m[(i, j)])).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        let path = format!("{}_{suffix}.csv", args.out_prefix.display());
        fs::write(path, out)?;
        Ok(())
    };
    write_matrix("ambient", &ambient)?;
    write_matrix("intrinsic", &intrinsic)?;
    write_matrix("embedding", &embedding.points)?;

    let t = trustworthiness(&intrinsic, &embedding.points, args.k)?;
    println!("trustworthiness {t}");
    if kind == ManifoldKind::LinearSubspace {
        let residual = affine_procrustes_residual(&embedding.points, &intrinsic);
        println!("procrustes_residual {residual}");
    }
    Ok(())
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<(), Error> {
    let rho = match args.detector.as_str() {
        "energy" => {
            calibrate_energy_threshold(args.pfa, args.noise_var, args.n, args.trials, args.seed)?
        }
        "waveform" => {
            let pattern_path = args
                .pattern
                .as_ref()
                .ok_or_else(|| Error::invalid("waveform calibration needs --pattern"))?;
            let pattern = framefile::read_frame(fs::File::open(pattern_path)?)?;
            calibrate_waveform_threshold(
                args.pfa,
                args.noise_var,
                &pattern,
                args.trials,
                args.seed,
            )?
        }
        "cyclic" => calibrate_cyclic_threshold(
            args.pfa,
            args.noise_var,
            args.n,
            &args.alpha_grid,
            &args.tau_set,
            args.trials,
            args.seed,
        )?,
        other => {
            return Err(Error::invalid(format!(
                "unknown detector '{other}' (energy, waveform, cyclic)"
            )))
        }
    };
    println!("rho {rho}");
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), Error> {
    let scenario = args.scenario.load()?;
    let (report, trace) = simharness::run_detailed(&scenario)?;
    print!("{}", trace.cloud_report);
    print!("{}", report.to_text());
    Ok(())
}
