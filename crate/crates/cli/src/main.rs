mod commands;
mod error;
mod formats;
mod manifest;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use ttess_core::enumerate::DEFAULT_BUDGET;

#[derive(Parser, Debug)]
#[command(name = "ttess", version, about = "T-tessellations on fixed line sets")]
struct Cli {
    /// Where to write the run manifest. Defaults to `<out>.manifest.json`
    /// when the command writes a file; nothing is written for stdout output.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Draw a random line set and write it as JSON
    Sample(SampleArgs),
    /// Stream every T-tessellation of a line set as JSON lines
    Enumerate(EnumerateArgs),
    /// Count tessellations over random line sets (CSV)
    Count(CountArgs),
    /// Grid of horizontal and vertical lines
    Grid(GridArgs),
    /// Rebuild every tessellation from a labelling scheme (CSV report)
    Roundtrip(RoundtripArgs),
    /// Monte-Carlo estimate of the partition function (JSON)
    EstimateZ(EstimateArgs),
    /// Terms of the series bounding the partition function (CSV)
    Bounds(BoundsArgs),
    /// Draw a line set and optionally a tessellation as SVG
    Render(RenderArgs),
    /// Classify a tessellation file and list violated clauses (JSON)
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct SampleArgs {
    /// Mean number of lines of the Poisson line process
    #[arg(long, conflicts_with = "k", required_unless_present = "k")]
    pub tau: Option<f64>,
    /// Fixed number of uniform lines instead of a Poisson count
    #[arg(long)]
    pub k: Option<usize>,
    /// `unit` or vertices `x,y;x,y;...` in counter-clockwise order
    #[arg(long, default_value = "unit")]
    pub window: String,
    #[arg(long, env = "TTESS_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub lines: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Cap on sweep nodes
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct CountArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value = "unit")]
    pub window: String,
    #[arg(long, env = "TTESS_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct GridArgs {
    #[arg(long)]
    pub k: usize,
    /// Number of horizontal lines
    #[arg(long)]
    pub a: usize,
    /// Count the tessellations and check the lower bound instead of
    /// writing the line set
    #[arg(long)]
    pub enumerate: bool,
    #[arg(long, env = "TTESS_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct RoundtripArgs {
    #[arg(long)]
    pub lines: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub scheme: u8,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct EstimateArgs {
    #[arg(long)]
    pub tau: f64,
    /// Comma-separated `nlines:θ`, `length:θ`, `area:θ`, or `zero`
    #[arg(long, default_value = "zero")]
    pub energy: String,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = 9)]
    pub k_cap: usize,
    #[arg(long, default_value = "unit")]
    pub window: String,
    #[arg(long, env = "TTESS_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct BoundsArgs {
    #[arg(long)]
    pub k_max: usize,
    /// Stability constant
    #[arg(long = "C", default_value_t = 0.0, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long)]
    pub tau: f64,
    /// `fourk` or `thm1:EPSILON,CONSTANT`
    #[arg(long, default_value = "fourk")]
    pub bound: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct RenderArgs {
    #[arg(long)]
    pub lines: PathBuf,
    /// Tessellation file, `file.jsonl:INDEX` to pick from a stream
    #[arg(long)]
    pub tess: Option<String>,
    /// Leave cells untinted
    #[arg(long)]
    pub no_cells: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ValidateArgs {
    #[arg(long)]
    pub lines: PathBuf,
    #[arg(long)]
    pub tess: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command, cli.manifest) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.name());
            ExitCode::from(1)
        }
    }
}
