use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use inflated_argmax::ensemble::BagKind;
use inflated_argmax::experiments::{
    self, loo::LooOutcome, region_map::write_region_csv, ExperimentConfig, LearnerKind,
    OutputFormat,
};
use inflated_argmax::metrics::text_summary;
use inflated_argmax::Result;

#[derive(Parser)]
#[command(version, about = "Stable set-valued classification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mean set sizes of the inflated argmax and the fixed-margin rule.
    SimulateSizes(Flags),
    /// Leave-one-out stability of three pipelines; --out names a directory.
    LooStability(Flags),
    /// Inflated-argmax sets over a grid on the three-class simplex.
    RegionMap(Flags),
    /// Randomized property suites; exits nonzero on the first counterexample.
    Verify {
        #[command(flatten)]
        flags: Flags,
        #[arg(long, hide = true)]
        inject_mutant: bool,
    },
}

/// Every flag overrides the field of the same name in the `--config` file.
#[derive(Args, Default)]
struct Flags {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    class_list: Option<Vec<usize>>,
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long)]
    classes: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    overlap: Option<f64>,
    #[arg(long)]
    n_test: Option<usize>,
    #[arg(long, value_enum)]
    scheme: Option<BagKind>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    bags: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum)]
    learner: Option<LearnerKind>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    label_column: Option<String>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    #[arg(long)]
    out: Option<PathBuf>,
}

macro_rules! apply {
    ($cfg:ident, $flags:ident, $($field:ident),+) => {
        $(if let Some(v) = $flags.$field { $cfg.$field = v; })+
    };
}

impl Flags {
    fn resolve(self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => ExperimentConfig::default(),
        };
        let flags = self;
        apply!(
            cfg,
            flags,
            epsilon,
            class_list,
            draws,
            classes,
            n,
            dim,
            overlap,
            n_test,
            scheme,
            m,
            bags,
            k,
            learner,
            temperature,
            epochs,
            learning_rate,
            label_column,
            grid,
            trials,
            format
        );
        cfg.seed = flags.seed.or(cfg.seed);
        cfg.data = flags.data.or(cfg.data);
        cfg.out = flags.out.or(cfg.out);
        cfg.require_seed()?;
        Ok(cfg)
    }
}

fn open_output(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_rows<T: serde::Serialize>(rows: &[T], cfg: &ExperimentConfig) -> Result<()> {
    let mut out = open_output(cfg.out.as_deref())?;
    match cfg.format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            let mut csv = csv::Writer::from_writer(&mut out);
            for row in rows {
                csv.serialize(row)?;
            }
            csv.flush()?;
        }
    }
    out.flush()?;
    Ok(())
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::SimulateSizes(flags) => {
            let cfg = flags.resolve()?;
            let rows = experiments::simulate_sizes(
                &cfg.class_list,
                cfg.epsilon()?,
                cfg.draws,
                cfg.require_seed()?,
            )?;
            write_rows(&rows, &cfg)?;
        }
        Command::LooStability(flags) => {
            let cfg = flags.resolve()?;
            let outcome: LooOutcome = experiments::run_loo_experiment(&cfg)?;
            if let Some(dir) = &cfg.out {
                outcome.write_to_dir(dir)?;
            }
            print!("{}", text_summary(&outcome.reports));
        }
        Command::RegionMap(flags) => {
            let cfg = flags.resolve()?;
            let points = experiments::region_map(cfg.epsilon()?, cfg.grid)?;
            match cfg.format {
                OutputFormat::Csv => {
                    let mut out = open_output(cfg.out.as_deref())?;
                    write_region_csv(&points, &mut out)?;
                    out.flush()?;
                }
                OutputFormat::Json => write_rows(&points, &cfg)?,
            }
        }
        Command::Verify {
            flags,
            inject_mutant,
        } => {
            let cfg = flags.resolve()?;
            let report = experiments::run_all(cfg.require_seed()?, cfg.trials, inject_mutant);
            print!("{}", report.summary());
            if let Some(path) = &cfg.out {
                let mut out = open_output(Some(path))?;
                serde_json::to_writer_pretty(&mut out, &report)?;
                writeln!(out)?;
                out.flush()?;
            }
            if let Some(failed) = report.first_failure() {
                eprintln!("first counterexample in {}:", failed.name);
                eprintln!("{}", serde_json::to_string_pretty(&failed.counterexample)?);
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
