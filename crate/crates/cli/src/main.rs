//! `spoofscan`: extract features, select, train, evaluate and score clips.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spoofscan_core::Preset;

#[derive(Parser, Debug)]
#[command(name = "spoofscan", version, about = "Detect synthetic speech from acoustic statistics")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct GlobalArgs {
    /// Run configuration file (`key = value` lines).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Split seed; overrides the configuration file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Model preset to train and save.
    #[arg(long, global = true, value_enum)]
    pub preset: Option<PresetArg>,
    /// Split before selecting features so selection never sees test rows.
    #[arg(long, global = true)]
    pub select_on_train_only: bool,
    /// Evaluate on every row instead of the reconstructed test partition.
    #[arg(long, global = true)]
    pub all_rows: bool,
    /// Decision threshold on the fake probability.
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetArg {
    A,
    B,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::A => Preset::A,
            PresetArg::B => Preset::B,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract a feature table from a `path,label` manifest.
    Extract { manifest: PathBuf, out_table: PathBuf },
    /// Rank features by recursive elimination and keep the best `k`.
    Select {
        table: PathBuf,
        out_selection: PathBuf,
        /// Number of features to keep; overrides `target_k`.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Train both presets, report accuracies and save the chosen one.
    Train {
        table: PathBuf,
        out_model: PathBuf,
        #[arg(long)]
        selection: Option<PathBuf>,
    },
    /// Score a table and write the report and ROC curve.
    Eval {
        model: PathBuf,
        table: PathBuf,
        out_report: PathBuf,
        out_roc: PathBuf,
        #[arg(long)]
        selection: Option<PathBuf>,
    },
    /// Classify a single audio file.
    Infer {
        model: PathBuf,
        audio: PathBuf,
        #[arg(long)]
        selection: Option<PathBuf>,
    },
    /// Render the synthetic real/fake corpus.
    #[command(hide = true)]
    SynthCorpus {
        dir: PathBuf,
        #[arg(long, default_value_t = 100)]
        n_real: usize,
        #[arg(long, default_value_t = 100)]
        n_fake: usize,
        /// Clip length in seconds.
        #[arg(long, default_value_t = 2.0)]
        duration: f64,
        #[arg(long, default_value_t = 16_000)]
        sample_rate: u32,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = commands::load_config(&cli.global)?;
    match cli.command {
        Command::Extract { manifest, out_table } => commands::extract(&manifest, &out_table, &config),
        Command::Select { table, out_selection, k } => commands::select(&table, &out_selection, k, &config),
        Command::Train { table, out_model, selection } => {
            commands::train(&table, selection.as_deref(), &out_model, &config)
        }
        Command::Eval {
            model,
            table,
            out_report,
            out_roc,
            selection,
        } => commands::eval(
            &model,
            &table,
            selection.as_deref(),
            &out_report,
            &out_roc,
            cli.global.all_rows,
            &config,
        ),
        Command::Infer { model, audio, selection } => commands::infer(&model, &audio, selection.as_deref(), &config),
        Command::SynthCorpus {
            dir,
            n_real,
            n_fake,
            duration,
            sample_rate,
        } => commands::synth_corpus(&dir, n_real, n_fake, duration, sample_rate, &config),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
