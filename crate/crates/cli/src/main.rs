//! `stencil-dse` command-line front end.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | unparsable arguments or input files |
//! | 3 | invalid stencil, device or accelerator configuration |
//! | 4 | infeasible design or empty tuning result |
//! | 5 | verification failure (grid diff or counter mismatch) |
//! | 6 | I/O error |

mod commands;
mod exit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use exit::CliError;

#[derive(Parser)]
#[command(
    name = "stencil-dse",
    version,
    about = "Design-space exploration for FPGA stencil accelerators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Runs the naive reference executor and writes its output grid.
    Oracle {
        #[command(flatten)]
        grid: GridArgs,
        /// Output grid file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Runs the blocked simulator, writes the output grid and per-pass counters.
    Simulate {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        accel: AccelArgs,
        /// Output grid file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Reference grid to diff the output against bit for bit.
        #[arg(long)]
        oracle: Option<PathBuf>,
        /// Counter report path (stdout when omitted).
        #[arg(long)]
        report: Option<PathBuf>,
        /// Counter report format, `csv` or `json`.
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Predicts the performance of one design point.
    Predict {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        accel: AccelArgs,
        #[arg(long)]
        dims: String,
        #[arg(long, default_value_t = 1.0)]
        efficiency: f64,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Enumerates and ranks feasible design points for a device.
    Tune {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        fmax_mhz: f64,
        /// Fixed input size; by default each candidate gets a block-aligned size.
        #[arg(long)]
        dims: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        efficiency: f64,
        /// Keep only fully aligned candidates.
        #[arg(long)]
        aligned_only: bool,
        /// Number of candidates to report (all when omitted).
        #[arg(long)]
        top: Option<usize>,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Projects a design onto another device from a measured reference.
    Project {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        accel: AccelArgs,
        #[arg(long)]
        dims: String,
        /// Measured reference point (JSON); built-in Arria 10 data otherwise.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Assumed memory efficiency (default 0.85 in 2D, 0.60 in 3D).
        #[arg(long)]
        efficiency: Option<f64>,
        /// Target BSP share of block RAM, in percent.
        #[arg(long)]
        target_bsp: Option<f64>,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Evaluates the pipeline cycle model.
    Pipeline(PipelineArgs),
    /// Simulates and asserts that counters match the analytical traffic and
    /// the output matches the reference executor.
    Validate {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        accel: AccelArgs,
        #[command(flatten)]
        report: ReportArgs,
    },
}

#[derive(Args)]
struct StencilArgs {
    /// Built-in stencil name or path to a stencil JSON file.
    #[arg(long)]
    stencil: String,
    /// Radius of a built-in stencil.
    #[arg(long, default_value_t = 1)]
    rad: usize,
}

#[derive(Args)]
struct ModelArgs {
    #[command(flatten)]
    stencil: StencilArgs,
    /// Built-in device name or path to a device JSON file.
    #[arg(long)]
    device: String,
    #[arg(long, default_value_t = 1000)]
    iter: usize,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    stencil: StencilArgs,
    /// Input grid file; a deterministic field of `--dims` is used otherwise.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Power grid file for Hotspot stencils.
    #[arg(long)]
    power: Option<PathBuf>,
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    iter: usize,
}

#[derive(Args)]
struct AccelArgs {
    #[arg(long)]
    bsize_x: usize,
    /// Block height, required for 3D stencils.
    #[arg(long)]
    bsize_y: Option<usize>,
    #[arg(long, default_value_t = 1)]
    par_time: usize,
    #[arg(long, default_value_t = 1)]
    par_vec: usize,
    /// Kernel clock in MHz.
    #[arg(long)]
    fmax_mhz: Option<f64>,
}

#[derive(Args)]
struct ReportArgs {
    /// Report path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// `csv` or `json`.
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct PipelineArgs {
    /// Pipeline depth in cycles.
    #[arg(long)]
    p: f64,
    /// Trip count.
    #[arg(long)]
    l: f64,
    #[arg(long, default_value_t = 0.0)]
    n_d: f64,
    #[arg(long, default_value_t = 0.0)]
    n_b: f64,
    /// Bytes of external memory accessed per iteration.
    #[arg(long, default_value_t = 0.0)]
    n_m: f64,
    /// External memory bandwidth in bytes per cycle.
    #[arg(long)]
    bw: Option<f64>,
    /// Parallelism of the widened pipeline.
    #[arg(long, default_value_t = 1.0)]
    n_p: f64,
    /// Depth of the widened pipeline (defaults to `--p`).
    #[arg(long)]
    p_prime: Option<f64>,
    #[arg(long)]
    fmax_mhz: f64,
    #[command(flatten)]
    report: ReportArgs,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Oracle { grid, out } => commands::oracle(&grid, &out),
        Command::Simulate {
            grid,
            accel,
            out,
            oracle,
            report,
            format,
        } => commands::simulate(
            &grid,
            &accel,
            out.as_deref(),
            oracle.as_deref(),
            &ReportArgs {
                out: report,
                format,
            },
        ),
        Command::Predict {
            model,
            accel,
            dims,
            efficiency,
            report,
        } => commands::predict(&model, &accel, &dims, efficiency, &report),
        Command::Tune {
            model,
            fmax_mhz,
            dims,
            efficiency,
            aligned_only,
            top,
            report,
        } => commands::tune(
            &model,
            fmax_mhz,
            dims.as_deref(),
            efficiency,
            aligned_only,
            top,
            &report,
        ),
        Command::Project {
            model,
            accel,
            dims,
            reference,
            efficiency,
            target_bsp,
            report,
        } => commands::project(
            &model,
            &accel,
            &dims,
            reference.as_deref(),
            efficiency,
            target_bsp,
            &report,
        ),
        Command::Pipeline(p) => commands::pipeline(&p),
        Command::Validate {
            grid,
            accel,
            report,
        } => commands::validate(&grid, &accel, &report),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::PARSE
            } else {
                exit::OK
            });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(exit::OK),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    #[test]
    fn arguments_are_consistent() {
        super::Cli::command().debug_assert();
    }
}
