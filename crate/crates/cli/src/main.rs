use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mvenet::cv::LambdaRule;
use mvenet_cli::{cmd_cv, cmd_demo, cmd_enet, cmd_mlm, cmd_prep, cmd_report, RunConfig};

#[derive(Parser)]
#[command(name = "mvenet", version, about = "Multi-response elastic net and multivariate regression pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Standardize every variable group into TSV files
    Prep(Common),
    /// Fit the regularization path and report coefficients at the selected lambda
    Enet(Common),
    /// Cross-validate the lambda grid
    Cv(Common),
    /// Multivariate regression on the reduced predictor set
    Mlm(Common),
    /// Run prep, enet and mlm in sequence
    Report(Common),
    /// Write the synthetic demo dataset and its subset config
    Demo {
        #[arg(long, default_value = "data")]
        out: PathBuf,
        #[arg(long, default_value_t = mvenet::synth::DEMO_ROWS)]
        rows: usize,
        #[arg(long, default_value_t = mvenet::synth::DEMO_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Min,
    #[value(name = "1se")]
    OneSe,
}

#[derive(Args)]
struct Common {
    /// Input CSV with a header row
    #[arg(long)]
    input: PathBuf,
    /// Subset config naming groups and tagging responses/predictors
    #[arg(long)]
    subsets: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 100)]
    nlambda: usize,
    /// Defaults to 1e-4 when N > p, otherwise 1e-2
    #[arg(long)]
    lambda_min_ratio: Option<f64>,
    #[arg(long, default_value_t = mvenet::cv::DEFAULT_FOLDS)]
    folds: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Rule::Min)]
    rule: Rule,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Comma-separated reduced predictor set (mlm); defaults to the enet selection
    #[arg(long, value_delimiter = ',')]
    predictors: Option<Vec<String>>,
}

impl From<Common> for RunConfig {
    fn from(c: Common) -> Self {
        RunConfig {
            input: c.input,
            subsets: c.subsets,
            alpha: c.alpha,
            nlambda: c.nlambda,
            lambda_min_ratio: c.lambda_min_ratio,
            folds: c.folds,
            seed: c.seed,
            rule: match c.rule {
                Rule::Min => LambdaRule::Min,
                Rule::OneSe => LambdaRule::OneSe,
            },
            out: c.out,
            predictors: c.predictors,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Prep(c) => cmd_prep(&c.into()),
        Command::Enet(c) => cmd_enet(&c.into()),
        Command::Cv(c) => cmd_cv(&c.into()),
        Command::Mlm(c) => cmd_mlm(&c.into()),
        Command::Report(c) => cmd_report(&c.into()),
        Command::Demo { out, rows, seed } => cmd_demo(&out, rows, seed),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
