use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use fakenews::archive::ModelArchive;
use fakenews::config::ExperimentConfig;
use fakenews::experiment::run_experiment;
use fakenews::metrics::compute_metrics;
use fakenews::{Corpus, Error};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_TRAINING: u8 = 3;

#[derive(Parser)]
#[command(
    name = "fakenews",
    version,
    about = "Train and apply fake-news text classifiers"
)]
struct Cli {
    /// Override the experiment seed (models without an explicit seed follow it).
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train the configured models and write report.json plus model archives.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a saved model on a labeled TSV file.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Also write the metrics as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Write `id<TAB>label<TAB>p_fake` predictions for a TSV file.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(err) if err.is_data_error() => EXIT_DATA,
        Some(Error::InvalidConfig(_) | Error::InvalidFractions(_)) => EXIT_USAGE,
        Some(_) => EXIT_TRAINING,
        None => EXIT_DATA,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train { config, out } => {
            let mut cfg = ExperimentConfig::load(&config)
                .with_context(|| format!("loading config {}", config.display()))?;
            if let Some(seed) = cli.seed {
                cfg.override_seed(seed);
            }
            let outcome = run_experiment(&cfg)?;
            outcome
                .write(&out)
                .with_context(|| format!("writing results to {}", out.display()))?;
            print!("{}", outcome.report.table());
            println!("wrote {}", out.display());
        }
        Command::Evaluate { model, data, json } => {
            let archive = ModelArchive::load(&model)?;
            let corpus = Corpus::load_tsv(&data, true)?;
            let predicted = corpus
                .texts()
                .map(|t| archive.predict_text(t).map(|p| p.label))
                .collect::<fakenews::Result<Vec<_>>>()?;
            let metrics = compute_metrics(&corpus.labels()?, &predicted)?;
            println!("{}: {metrics}", archive.name);
            let c = metrics.confusion;
            println!(
                "confusion (fake positive): tp {} fp {} tn {} fn {}",
                c.tp, c.fp, c.tn, c.fn_
            );
            if let Some(path) = json {
                let mut text = serde_json::to_string_pretty(&metrics)?;
                text.push('\n');
                fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
            }
        }
        Command::Predict { model, data, out } => {
            let archive = ModelArchive::load(&model)?;
            let corpus = Corpus::load_tsv_auto(&data)?;
            let mut text = String::from("id\tlabel\tp_fake\n");
            for doc in corpus.documents() {
                let p = archive.predict_text(&doc.text)?;
                let _ = writeln!(text, "{}\t{}\t{:.6}", doc.id, p.label, p.p_fake);
            }
            fs::write(&out, text).map_err(|e| Error::io(&out, e))?;
        }
    }
    Ok(())
}
