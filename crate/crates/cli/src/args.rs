use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use cholqr::cost::CostModel;
use cholqr::{Algorithm, Backend};

#[derive(Debug, Parser)]
#[command(name = "cholqr", version, about = "CholeskyQR-family factorizations of tall-skinny matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write an m x n matrix with condition number KAPPA to a TSM1 file.
    Gen(GenArgs),
    /// Factor one matrix and print a CSV row of stability metrics.
    Factor(FactorArgs),
    /// Metrics for several algorithms over a list of condition numbers.
    SweepCond(SweepCondArgs),
    /// Metrics for one algorithm over a list of panel counts.
    SweepPanels(SweepPanelsArgs),
    /// Analytic flop / word / message counts.
    Cost(CostArgs),
}

fn parse_kappa(s: &str) -> Result<f64, String> {
    let k: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !k.is_finite() || k < 1.0 {
        return Err(format!("condition number must be a finite value >= 1, got {s}"));
    }
    Ok(k)
}

fn parse_list<T>(s: &str, item: fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(item)
        .collect()
}

fn parse_kappa_list(s: &str) -> Result<Vec<f64>, String> {
    parse_list(s, parse_kappa)
}

fn parse_panel_list(s: &str) -> Result<Vec<usize>, String> {
    parse_list(s, parse_positive)
}

fn parse_positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(value_parser = parse_positive)]
    pub m: usize,
    #[arg(value_parser = parse_positive)]
    pub n: usize,
    #[arg(value_parser = parse_kappa)]
    pub kappa: f64,
    pub seed: u64,
    /// Output file; metadata goes to `<out>.meta`.
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = 1, value_parser = parse_positive)]
    pub ranks: usize,
    #[arg(long, default_value_t = Backend::Serial)]
    pub backend: Backend,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct FactorArgs {
    #[arg(long)]
    pub algo: Algorithm,
    /// Panel count, for cqrgs / cqr2gs / mcqr2gs only.
    #[arg(long, value_parser = parse_positive)]
    pub panels: Option<usize>,
    #[command(flatten)]
    pub run: RunArgs,
    /// Read the matrix from a TSM1 file instead of generating it.
    #[arg(long, conflicts_with_all = ["m", "n", "kappa"])]
    pub input: Option<PathBuf>,
    #[arg(long, value_parser = parse_positive, required_unless_present = "input")]
    pub m: Option<usize>,
    #[arg(long, value_parser = parse_positive, required_unless_present = "input")]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse_kappa, required_unless_present = "input")]
    pub kappa: Option<f64>,
    /// Write q.tsm and r.tsm here.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Print the CSV header before the row.
    #[arg(long)]
    pub header: bool,
}

#[derive(Debug, Args)]
pub struct SweepCondArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub algos: Vec<Algorithm>,
    #[arg(long, value_parser = parse_positive)]
    pub m: usize,
    #[arg(long, value_parser = parse_positive)]
    pub n: usize,
    /// Comma-separated condition numbers; may be empty.
    #[arg(long, value_parser = parse_kappa_list, default_value = "")]
    pub kappas: std::vec::Vec<f64>,
    /// Panel count used by the panelled algorithms.
    #[arg(long, value_parser = parse_positive)]
    pub panels: Option<usize>,
    #[command(flatten)]
    pub run: RunArgs,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepPanelsArgs {
    #[arg(long)]
    pub algo: Algorithm,
    #[arg(long, value_parser = parse_positive)]
    pub m: usize,
    #[arg(long, value_parser = parse_positive)]
    pub n: usize,
    #[arg(long, value_parser = parse_kappa)]
    pub kappa: f64,
    /// Comma-separated panel counts.
    #[arg(long, value_parser = parse_panel_list)]
    pub panels: std::vec::Vec<usize>,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CostArgs {
    /// One model; all models when omitted.
    #[arg(long)]
    pub model: Option<CostModel>,
    #[arg(long, value_parser = parse_positive)]
    pub m: usize,
    #[arg(long, value_parser = parse_positive)]
    pub n: usize,
    #[arg(long = "ranks", short = 'P', value_parser = parse_positive)]
    pub p: usize,
    /// Panel width for cqr2gs (defaults to n).
    #[arg(long, value_parser = parse_positive)]
    pub b: Option<usize>,
}
