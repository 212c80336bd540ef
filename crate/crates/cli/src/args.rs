use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use cuspflow_core::{FlowOptions, SolveOptions};

#[derive(Debug, Parser)]
#[command(
    name = "cuspflow",
    version,
    about = "Combinatorial Yamabe flow and prescribed boundary lengths"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a surface file and print its counts.
    Validate { surface: PathBuf },

    /// Edge lengths, hexagon arcs, boundary lengths and Euler characteristic.
    Lengths {
        surface: PathBuf,
        /// CSV `boundary_index,w`; defaults to w = 0.
        #[arg(long)]
        factors: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },

    /// Integrate the flow dw/dt = B(w) from w = 0.
    Flow {
        surface: PathBuf,
        #[arg(long)]
        t_end: f64,
        #[arg(long, default_value_t = FlowOptions::default().cusp_tol)]
        cusp_tol: f64,
        #[arg(long, default_value_t = FlowOptions::default().length_cap)]
        length_cap: f64,
        #[arg(long, default_value_t = FlowOptions::default().rel_tol)]
        rel_tol: f64,
        #[arg(long, default_value_t = FlowOptions::default().abs_tol)]
        abs_tol: f64,
        /// Resample the trace on this grid instead of writing every accepted step.
        #[arg(long)]
        sample_dt: Option<f64>,
        /// Trace CSV; written to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Solve B(w) = target.
    Prescribe {
        surface: PathBuf,
        /// CSV `boundary_index,target_length`.
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value_t = SolveOptions::default().grad_tol)]
        tol: f64,
        #[arg(long, default_value_t = SolveOptions::default().max_iter)]
        max_iter: usize,
        /// Result CSV `boundary_index,w`; written to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Compare analytic Jacobians with finite differences at random points.
    CheckJacobian {
        surface: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}
