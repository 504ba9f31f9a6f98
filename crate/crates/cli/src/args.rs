use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Lattice additivity, Dempster-Shafer bounds and CHSH violations on
/// finite-dimensional Hilbert spaces.
#[derive(Debug, Parser)]
#[command(name = "qlds", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Emit JSON (the default).
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,

    /// Emit CSV with 17 significant digits.
    #[arg(long, global = true)]
    pub csv: bool,

    /// Zero tolerance for residual checks; overrides QLDS_TOL.
    #[arg(long, global = true, value_name = "EPS")]
    pub tol: Option<f64>,

    /// Leave the timestamp out of JSON output.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    /// Write to this file instead of standard output.
    #[arg(short, long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probability table and CHSH/Boole sums for the Bell state.
    Chsh(ChshArgs),
    /// The two-subspace example in H(3).
    LatticeDemo,
    /// Coherent-state cross-checks in Z(d).
    Coherent(CoherentArgs),
    /// Classify a subspace pair under a density matrix.
    Classify(ClassifyArgs),
    /// Lower/upper probability property table.
    #[command(name = "ds-table1")]
    DsTable1(DsArgs),
}

#[derive(Debug, Args)]
pub struct ChshArgs {
    /// Setting a = e^{iθ}, b = 0 (radians). Defaults to π/8.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["sweep", "a_re", "a_im", "b_re", "b_im"])]
    pub theta: Option<f64>,

    #[arg(long, allow_hyphen_values = true)]
    pub a_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a_im: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b_im: Option<f64>,

    /// θ grid `lo:hi:steps`, giving steps + 1 rows.
    #[arg(long, value_name = "LO:HI:STEPS", conflicts_with_all = ["a_re", "a_im", "b_re", "b_im"])]
    pub sweep: Option<String>,
}

#[derive(Debug, Args)]
pub struct CoherentArgs {
    /// Odd dimension d ≥ 3.
    #[arg(long, default_value_t = 3)]
    pub d: usize,

    /// Seed for the random fiducial.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Fiducial as `[[re,im],...]`, a `{"d":..,"fiducial":..}` object, or a
    /// path to a file holding either.
    #[arg(long)]
    pub fiducial: Option<String>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// JSON file with `h1`, `h2`, `rho` and optionally `epsilon`; `-` reads
    /// standard input.
    pub input: PathBuf,

    /// Threshold ε for the verdict; defaults to the zero tolerance.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DsArgs {
    /// Employee example with counts n1,n2,n3.
    #[arg(
        long,
        value_name = "N1,N2,N3",
        value_delimiter = ',',
        conflicts_with = "mass"
    )]
    pub employees: Option<Vec<u64>>,

    /// Mass function JSON file.
    #[arg(long)]
    pub mass: Option<PathBuf>,

    /// Seed for a random mass function when neither of the above is given.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Frame size of the random mass function.
    #[arg(long, default_value_t = 5)]
    pub frame: usize,

    /// Random subset pairs to check; all pairs when omitted and the frame
    /// has at most 10 elements.
    #[arg(long)]
    pub trials: Option<usize>,
}
