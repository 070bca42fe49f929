use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{Mode, Overrides, RunConfig};
use crate::error::CliError;
use crate::presets::preset;
use crate::run::{execute, resolve_mode};
use crate::table::ResultTable;

#[derive(Debug, Parser)]
#[command(
    name = "hetnet",
    version,
    about = "Uplink multi-association simulator and analytic evaluator for two-tier cellular networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo sweep; `--mode both` adds analytic rows.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Numerical evaluation of the analytic success probabilities.
    Analytic {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Runs a named preset and writes `<out>/<figure>.csv`.
    Reproduce {
        /// fig2, fig3, fig4 or fig5.
        figure: String,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Realizations per sweep point.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub window_side: Option<f64>,
    /// Output file; a directory for `reproduce`. Standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub mode: Option<Mode>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            trials: self.trials,
            window_side: self.window_side,
            out: self.out.clone(),
            mode: self.mode,
        }
    }
}

fn load(config: Option<&Path>) -> Result<RunConfig, CliError> {
    match config {
        Some(path) => RunConfig::load(path),
        None => Ok(RunConfig::default()),
    }
}

fn emit(table: &ResultTable, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => table.write_path(path),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write_csv(&mut lock)?;
            lock.flush().map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

pub fn cmd_simulate(config: Option<&Path>, common: &CommonArgs) -> Result<ResultTable, CliError> {
    let mut cfg = load(config)?;
    cfg.apply(&common.overrides());
    let table = execute(&cfg, resolve_mode(&cfg, Mode::Simulate))?;
    emit(&table, cfg.out.as_deref())?;
    Ok(table)
}

pub fn cmd_analytic(config: Option<&Path>, common: &CommonArgs) -> Result<ResultTable, CliError> {
    let mut cfg = load(config)?;
    if let Some(m) = common.mode.filter(|&m| m != Mode::Analytic) {
        return Err(CliError::config(format!(
            "--mode {m} is not available for `analytic`; use `simulate --mode {m}`"
        )));
    }
    cfg.apply(&common.overrides());
    let table = execute(&cfg, Mode::Analytic)?;
    emit(&table, cfg.out.as_deref())?;
    Ok(table)
}

/// Runs a preset and returns its table and the file written.
pub fn cmd_reproduce(
    figure: &str,
    common: &CommonArgs,
) -> Result<(ResultTable, PathBuf), CliError> {
    let p = preset(figure)?;
    let mode = common.mode.unwrap_or(p.mode);
    let overrides = Overrides {
        out: None,
        ..common.overrides()
    };
    let mut table = ResultTable::default();
    for mut cfg in p.runs {
        cfg.apply(&overrides);
        table.extend(execute(&cfg, mode)?);
    }
    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let path = dir.join(format!("{}.csv", p.name));
    table.write_path(&path)?;
    Ok((table, path))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config, common } => cmd_simulate(config.as_deref(), &common).map(drop),
        Command::Analytic { config, common } => cmd_analytic(config.as_deref(), &common).map(drop),
        Command::Reproduce { figure, common } => {
            let (table, path) = cmd_reproduce(&figure, &common)?;
            eprintln!("wrote {} rows to {}", table.rows.len(), path.display());
            Ok(())
        }
    }
}
