mod commands;
mod data;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ebb::estimation::Model;
use ebb::{EbbParams, QuadratureControl, SeriesControl};

use data::{ColumnRef, DatasetSpec, Format, Numerator};
use error::{exit, CliError, Result};
use report::OutFormat;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  2  invalid arguments or parameter values
  3  file could not be read or written
  4  input file or config could not be parsed
  5  a fit, series or quadrature did not converge (the report is still written)";

#[derive(Debug, Parser)]
#[command(name = "ebb", version, about = "Extended bimodal beta distribution: fitting, sampling and simulation", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit Beta, Kumaraswamy and EBB models to ratio data.
    #[command(after_help = EXIT_CODES)]
    Fit(FitArgs),
    /// Draw an EBB sample, one value per line.
    #[command(after_help = EXIT_CODES)]
    Sample(SampleArgs),
    /// Tabulate the density or distribution function on an interior grid.
    #[command(after_help = EXIT_CODES)]
    Curve(CurveArgs),
    /// Run Monte Carlo studies of the EBB estimator from a JSON config.
    #[command(after_help = EXIT_CODES)]
    Simulate(SimulateArgs),
    /// Fit gamma margins to paired data and estimate rho by moments.
    #[command(after_help = EXIT_CODES)]
    Margins(MarginsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Beta,
    Kumaraswamy,
    Ebb,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Beta => Model::Beta,
            ModelArg::Kumaraswamy => Model::Kumaraswamy,
            ModelArg::Ebb => Model::Ebb,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Pdf,
    Cdf,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Delimited text file.
    #[arg(long)]
    pub data: PathBuf,
    /// Column names or 1-based indices, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<ColumnRef>,
    /// For xy data, which selected column is the numerator of z.
    #[arg(long, value_enum, default_value_t = Numerator::Second)]
    pub numerator: Numerator,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// The file has no header row.
    #[arg(long)]
    pub no_header: bool,
}

impl DataArgs {
    pub fn spec(&self, format: Format) -> Result<DatasetSpec> {
        let delimiter = u8::try_from(self.delimiter)
            .ok()
            .filter(u8::is_ascii)
            .ok_or_else(|| CliError::Validation(format!("delimiter must be ASCII, got '{}'", self.delimiter)))?;
        Ok(DatasetSpec {
            path: self.data.clone(),
            format,
            columns: self.columns.clone(),
            numerator: self.numerator,
            delimiter,
            header: !self.no_header,
        })
    }
}

#[derive(Debug, Args)]
pub struct NumericArgs {
    /// Relative tolerance of hypergeometric series.
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Term cap per series index.
    #[arg(long)]
    pub max_terms: Option<usize>,
    /// Relative tolerance of adaptive quadrature.
    #[arg(long)]
    pub quad_rel_tol: Option<f64>,
    /// Subdivision cap of adaptive quadrature.
    #[arg(long)]
    pub quad_max_subdivisions: Option<usize>,
    /// Significant digits in reports.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=17))]
    pub digits: u8,
}

impl NumericArgs {
    pub fn series(&self) -> Result<SeriesControl> {
        let d = SeriesControl::default();
        Ok(SeriesControl::new(
            self.rel_tol.unwrap_or(d.rel_tol),
            self.max_terms.unwrap_or(d.max_terms),
            d.consecutive_small,
        )?)
    }

    pub fn quadrature(&self) -> Result<QuadratureControl> {
        let d = QuadratureControl::default();
        Ok(QuadratureControl::new(
            self.quad_rel_tol.unwrap_or(d.rel_tol),
            d.abs_tol,
            self.quad_max_subdivisions.unwrap_or(d.max_subdivisions),
            d.endpoint_inset,
        )?)
    }

    pub fn rounder(&self) -> report::Rounder {
        report::Rounder(self.digits as usize)
    }
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub rho: f64,
}

impl ParamArgs {
    pub fn params(&self) -> Result<EbbParams> {
        Ok(EbbParams::new(self.alpha, self.beta, self.rho)?)
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value_t = Format::Z)]
    pub format: Format,
    /// Models to fit, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [ModelArg::Beta, ModelArg::Kumaraswamy, ModelArg::Ebb])]
    pub model: Vec<ModelArg>,
    /// Fit all three EBB parameters jointly instead of profiling rho at the Beta fit.
    #[arg(long)]
    pub joint: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    pub out_format: OutFormat,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, env = "EBB_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value_t = Which::Pdf)]
    pub which: Which,
    /// Grid size; the grid is k / (points + 1) for k = 1..=points.
    #[arg(long, default_value_t = 199)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON scenario or list of scenarios.
    #[arg(long)]
    pub config: PathBuf,
    /// Master seed for scenarios that do not set one.
    #[arg(long, env = "EBB_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Summary CSV, one row per scenario and sample size.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for per-parameter histogram CSVs.
    #[arg(long)]
    pub histograms: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

#[derive(Debug, Args)]
pub struct MarginsArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutFormat::Json)]
    pub out_format: OutFormat,
    #[command(flatten)]
    pub numeric: NumericArgs,
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit(a) => commands::fit(&a),
        Command::Sample(a) => commands::sample(&a),
        Command::Curve(a) => commands::curve(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Margins(a) => commands::margins(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::VALIDATION as u8 } else { exit::SUCCESS as u8 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(exit::SUCCESS as u8),
        Err(e) => {
            eprintln!("ebb: {e}");
            if e.exit_code() == exit::VALIDATION {
                eprintln!("For usage, run 'ebb <COMMAND> --help'.");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
