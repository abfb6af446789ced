//! Command-line front end. All logic lives in `wsvm::commands`; this binary
//! only parses arguments and dispatches.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wsvm::commands::{
    cmd_benchmark, cmd_eval, cmd_fit, cmd_predict, cmd_simulate, format_aggregate_table, init_workers,
    BenchmarkConfig, FitConfig,
};
use wsvm::schemes::VoteRule;
use wsvm::train::FitOptions;
use wsvm::tuning::TuneCriterion;
use wsvm::SchemeKind;

#[derive(Parser)]
#[command(name = "wsvm", about = "Multiclass probability estimation with weighted SVMs", version)]
struct Cli {
    /// Worker threads for parallel sections.
    #[arg(long, global = true, default_value_t = num_threads_default())]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

fn num_threads_default() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic benchmark dataset (examples 1-4).
    Simulate {
        /// Example id in 1..=4.
        #[arg(long)]
        example: u8,
        /// Number of points.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output data CSV (columns x1..xp,y).
        #[arg(long)]
        out: PathBuf,
        /// Optional aligned truth CSV (columns p1..pK).
        #[arg(long)]
        truth_out: Option<PathBuf>,
    },
    /// Train a scheme on a train/tune split and save the model bundle.
    Fit(FitArgs),
    /// Predict class probabilities for a data CSV with a saved model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Output CSV (p1..pK, label_maxprob, label_maxvote).
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a prediction CSV against truth probabilities and/or labels.
    Eval {
        #[arg(long)]
        probs: PathBuf,
        /// Truth CSV (p1..pK) for the probability losses.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Labeled data CSV for the misclassification rates.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Optional JSON output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo benchmark: simulate, split, fit, predict and evaluate.
    Benchmark {
        /// Example id in 1..=4.
        #[arg(long)]
        example: u8,
        /// Comma-separated schemes (pairwise,b1,b2,bp1,bp2,ova).
        #[arg(long, value_delimiter = ',')]
        schemes: Vec<SchemeKind>,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        /// Training-set size (the tuning set matches it).
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        test_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "egkl")]
        criterion: TuneCriterion,
        /// Override the weight-grid precision M.
        #[arg(long)]
        m_grid: Option<usize>,
        /// Override the λ candidates.
        #[arg(long, value_delimiter = ',')]
        lambda_grid: Option<Vec<f64>>,
        /// Override the σ candidates.
        #[arg(long, value_delimiter = ',')]
        sigma_grid: Option<Vec<f64>>,
        /// Normalize one-vs-all probabilities onto the simplex.
        #[arg(long)]
        normalize: bool,
        /// Report JSON path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Aggregate CSV path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FitArgs {
    /// Learning scheme: pairwise, b1, b2, bp1, bp2 or ova.
    #[arg(long)]
    scheme: SchemeKind,
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    tune: PathBuf,
    /// True class probabilities aligned with the tuning CSV (GKL only).
    #[arg(long)]
    truth_tune: Option<PathBuf>,
    #[arg(long, default_value = "egkl")]
    criterion: TuneCriterion,
    /// Override the weight-grid precision M (default ⌊√n⌋).
    #[arg(long)]
    m_grid: Option<usize>,
    /// Override the λ candidates (comma-separated).
    #[arg(long, value_delimiter = ',')]
    lambda_grid: Option<Vec<f64>>,
    /// Override the σ candidates (comma-separated).
    #[arg(long, value_delimiter = ',')]
    sigma_grid: Option<Vec<f64>>,
    /// Normalize one-vs-all probabilities onto the simplex.
    #[arg(long)]
    normalize: bool,
    /// Baseline vote rule: gt-half or min-denominator.
    #[arg(long, default_value = "gt-half")]
    vote_rule: String,
    /// Model bundle output path.
    #[arg(long)]
    out: PathBuf,
    /// Optional tuning report JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn run() -> wsvm::Result<()> {
    let cli = Cli::parse();
    init_workers(cli.workers);
    match cli.command {
        Command::Simulate { example, n, seed, out, truth_out } => {
            cmd_simulate(example, n, seed, &out, truth_out.as_deref())?;
            eprintln!("wrote {}", out.display());
        }
        Command::Fit(args) => {
            let options = FitOptions {
                criterion: args.criterion,
                m_override: args.m_grid,
                lambda_override: args.lambda_grid,
                sigma_override: args.sigma_grid,
                normalize_ova: args.normalize,
                vote_rule: args.vote_rule.parse::<VoteRule>()?,
                ..FitOptions::default()
            };
            let cfg = FitConfig {
                scheme: args.scheme,
                train_path: args.train,
                tune_path: args.tune,
                truth_tune_path: args.truth_tune,
                options,
                model_out: args.out.clone(),
                report_out: args.report,
            };
            let fitted = cmd_fit(&cfg)?;
            if let Some(b) = &fitted.model.baseline {
                eprintln!("baseline k* = {}", b.k_star);
            }
            eprintln!(
                "fitted {} ({} ladders) in {:.1}s -> {}",
                args.scheme,
                fitted.model.ladders.len(),
                fitted.fit_seconds,
                args.out.display()
            );
        }
        Command::Predict { model, data, out } => {
            cmd_predict(&model, &data, &out)?;
            eprintln!("wrote {}", out.display());
        }
        Command::Eval { probs, truth, labels, out } => {
            let summary = cmd_eval(&probs, truth.as_deref(), labels.as_deref(), out.as_deref())?;
            println!("{}", summary.table_row());
        }
        Command::Benchmark {
            example,
            schemes,
            runs,
            n,
            test_n,
            seed,
            criterion,
            m_grid,
            lambda_grid,
            sigma_grid,
            normalize,
            out,
            csv,
        } => {
            let cfg = BenchmarkConfig {
                example,
                schemes,
                runs,
                n,
                test_n,
                seed,
                fit: FitOptions {
                    criterion,
                    m_override: m_grid,
                    lambda_override: lambda_grid,
                    sigma_override: sigma_grid,
                    normalize_ova: normalize,
                    ..FitOptions::default()
                },
                out_json: out,
                out_csv: csv,
                verbose: true,
            };
            let report = cmd_benchmark(&cfg)?;
            println!("{}", format_aggregate_table(&report));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
