use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "k2sym", version, about = "Symbol calculus for K2 of localised local rings")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Worker threads for the verification drivers.
    #[arg(long, default_value_t = 1, global = true)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Presents K2 of a finite ring and reports its invariants.
    Compute(ComputeArgs),
    /// Evaluates the tame symbol c(f,g) at t.
    Tame(TameArgs),
    /// Evaluates rho_t(f) = <(f-1)/t, t>.
    Rho(RhoArgs),
    /// Runs a verification check and exits with its status.
    Verify(VerifyArgs),
    /// Checks k-fold (or weak k-fold) stability.
    Stability(StabilityArgs),
    /// Describes a window: its size, unit count and first elements.
    WindowInfo(WindowInfoArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Presentation {
    /// Steinberg symbols {a,b} with bilinearity and {a,1-a} = 0.
    S,
    /// Dennis-Stein symbols <a,b> with relations D1-D3.
    Ds,
}

#[derive(Args, Debug, Clone, Default)]
pub struct WindowArgs {
    /// Degree bound on numerator and denominator (rational-function rings).
    #[arg(long)]
    pub max_deg: Option<u32>,
    /// Separate denominator degree bound; defaults to --max-deg.
    #[arg(long, requires = "max_deg")]
    pub max_den_deg: Option<u32>,
    /// Bound on |numerator| and denominator (rationals).
    #[arg(long, conflicts_with = "max_deg")]
    pub height: Option<u64>,
    /// Explicit window elements, separated by ';'.
    #[arg(long, conflicts_with_all = ["max_deg", "height"])]
    pub elements: Option<String>,
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    #[arg(long)]
    pub ring: String,
    #[arg(long, value_enum)]
    pub presentation: Presentation,
    /// Enumerate elements in a seeded random order.
    #[arg(long)]
    pub shuffle_seed: Option<u64>,
    #[command(flatten)]
    pub window: WindowArgs,
}

#[derive(Args, Debug)]
pub struct TameArgs {
    #[arg(long)]
    pub ring: String,
    #[arg(long)]
    pub t: String,
    #[arg(long, allow_hyphen_values = true)]
    pub f: String,
    #[arg(long, allow_hyphen_values = true)]
    pub g: String,
}

#[derive(Args, Debug)]
pub struct RhoArgs {
    #[arg(long)]
    pub ring: String,
    #[arg(long)]
    pub t: String,
    #[arg(long, allow_hyphen_values = true)]
    pub f: String,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    /// rho_t(c(f,g)) + {u,v} = 0 for f + g = 1.
    RhoLemma,
    /// The co-Cartesian square for R -> R_t.
    Pushout,
    /// The localisation exact sequence in degree two.
    Ses,
    /// k-fold stability; weak with --weak.
    Stability,
    A1,
    A2,
    A3,
    A4,
    /// pi + c(1 + pi^2/t) is never a unit in O((t)).
    Remark35,
    /// {a,-a} = 0.
    Skew,
    /// rho(fg) = rho(f) + rho(g), rho_tt = 2 rho_t and the power identity over a window.
    Rho,
    /// rho_st(f) = rho_s(f) + rho_t(f) for one f.
    RhoFactor,
    /// l rho_t(1 + t^l u) = {-u, 1 + t^l u} for one u.
    RhoPower,
    /// Reciprocity, c(f,-f) = 1, two-route agreement and bimultiplicativity.
    TameLaws,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub check: Check,
    #[arg(long)]
    pub ring: Option<String>,
    #[arg(long)]
    pub t: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub budget: Option<usize>,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Run every case instead of a sample of --budget.
    #[arg(long)]
    pub exhaustive: bool,

    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub weak: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    #[arg(long)]
    pub s: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<String>,
    #[arg(long)]
    pub l: Option<u32>,
    /// Number of seeded random elements (a3).
    #[arg(long)]
    pub random: Option<usize>,
    /// Truncation precision (remark35).
    #[arg(long, default_value_t = 12)]
    pub precision: u32,
    /// t-support [-N, N] of the candidates (remark35).
    #[arg(long, default_value_t = 3)]
    pub support: i64,
    /// Coefficient height of the candidates (remark35).
    #[arg(long, default_value_t = 2)]
    pub coeff_height: i64,
}

#[derive(Args, Debug)]
pub struct StabilityArgs {
    #[arg(long)]
    pub ring: String,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub weak: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub budget: usize,
    #[command(flatten)]
    pub window: WindowArgs,
}

#[derive(Args, Debug)]
pub struct WindowInfoArgs {
    #[arg(long)]
    pub ring: String,
    #[command(flatten)]
    pub window: WindowArgs,
    /// How many elements to list.
    #[arg(long, default_value_t = 10)]
    pub show: usize,
}
