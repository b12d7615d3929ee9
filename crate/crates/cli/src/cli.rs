use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "fracstab", version, about = "Stability of fractional-order Morris-Lecar equilibria")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Parameter file (`key = value` lines); falls back to $FRACSTAB_PARAMS
    #[arg(long, global = true)]
    pub params: Option<PathBuf>,

    /// Override a parameter, e.g. `--set g_K=8.5` (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,

    /// Output directory
    #[arg(long, default_value = ".", global = true)]
    pub out: PathBuf,

    /// Artifacts to write
    #[arg(long, value_delimiter = ',', default_value = "csv", global = true)]
    pub format: Vec<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    B1,
    B3,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a characteristic triple (a, b, c, q)
    Classify {
        #[arg(long = "a", allow_hyphen_values = true)]
        a: f64,
        #[arg(long = "b", allow_hyphen_values = true)]
        b: f64,
        #[arg(long = "c", allow_hyphen_values = true)]
        c: f64,
        /// Defaults to the parameter-file order
        #[arg(long = "q")]
        q: Option<f64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Equilibrium branches over a range of applied currents (uA/cm2)
    Branches {
        #[arg(long = "I-range", value_name = "LO:HI", default_value = "-20:45", allow_hyphen_values = true)]
        i_range: String,
        #[arg(long, default_value_t = 500)]
        steps: usize,
    },
    /// Critical fractional order along B1 or B3
    CriticalQ {
        #[arg(long, value_enum, default_value = "b1")]
        branch: BranchArg,
        /// Voltage range in mV; defaults to [V', V_alpha) for B1 and (V''', V''] for B3
        #[arg(long = "V-range", value_name = "LO:HI", allow_hyphen_values = true)]
        v_range: Option<String>,
        #[arg(long, default_value_t = 200)]
        steps: usize,
    },
    /// Knees, fold currents and the special voltages V', V'', V'''
    SpecialPoints,
    /// Integrate the neuron from rest (or from --v0/--n0)
    Simulate {
        /// Applied current in uA/cm2 (defaults to the parameter file)
        #[arg(long = "I", allow_hyphen_values = true)]
        i_app: Option<f64>,
        #[arg(long = "q")]
        q: Option<f64>,
        /// Horizon, e.g. `2000ms` or `2s` (bare numbers are ms)
        #[arg(long = "t-end", default_value = "2000ms")]
        t_end: String,
        /// Step, same syntax as --t-end
        #[arg(long, default_value = "0.1ms")]
        dt: String,
        /// Initial voltage in mV
        #[arg(long, allow_hyphen_values = true)]
        v0: Option<f64>,
        /// Initial gating fraction
        #[arg(long)]
        n0: Option<f64>,
        #[arg(long, default_value_t = 1)]
        corrector_iters: usize,
        /// Short-memory window in steps (full history when absent)
        #[arg(long)]
        window: Option<usize>,
        /// Write every k-th row
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// Hopf threshold a*(b, c, q) over a range of orders
    HopfScan {
        #[arg(long = "b")]
        b: Option<f64>,
        #[arg(long = "c")]
        c: Option<f64>,
        /// Compare against this a
        #[arg(long = "a", allow_hyphen_values = true)]
        a: Option<f64>,
        /// Take (a, b, c) from the equilibrium at this voltage (mV)
        #[arg(long = "V", allow_hyphen_values = true, conflicts_with_all = ["a", "b", "c"])]
        v: Option<f64>,
        #[arg(long = "q-range", value_name = "LO:HI", default_value = "0.005:1")]
        q_range: String,
        #[arg(long, default_value_t = 200)]
        steps: usize,
    },
    /// Check knee, special-point and oracle fixtures
    Verify {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}
