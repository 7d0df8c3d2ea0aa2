use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "padic-prob", version, about = "Exact p-adic probability computations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Digits kept for p-adic inputs such as `--a`.
    #[arg(long, global = true, env = "PADIC_PRECISION", default_value_t = 32)]
    pub precision: u32,

    /// Suppress the config echo and summary on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// v_p(x) and |x|_p of a rational.
    Valuation(ValuationArgs),
    /// Relative frequencies of a label collective along an index sequence.
    Freq(FreqArgs),
    /// Ball probabilities of binomial sums along N_k -> m.
    Thm31(Thm31Args),
    /// Divisibility of binomial sums along N_k -> 1.
    Eq5(Eq5Args),
    /// Ball probabilities of binomial sums along N_k -> p.
    Thm32(Thm32Args),
    /// Mahler coefficients of binomial sums along N_k -> a.
    Lln(LlnArgs),
    /// Coefficients of (cosh(z/√n))^n.
    Clt(CltArgs),
    /// Mahler coefficients of a characteristic series.
    Mahler(MahlerArgs),
    /// Riemann sums of a function on Z_q against the uniform measure.
    Integrate(IntegrateArgs),
    /// The sphere randomness test on a bit sequence.
    Test(TestArgs),
    /// Writes a bit sequence whose partial sums hit the test region at every checkpoint.
    Forge(ForgeArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ValuationArgs {
    #[arg(long)]
    pub prime: u64,
    /// A rational `n` or `n/d`.
    #[arg(allow_hyphen_values = true)]
    pub x: String,
}

#[derive(Debug, Args, Serialize)]
pub struct Source {
    /// Label file (whitespace ignored).
    #[arg(long, conflicts_with = "generator")]
    pub input: Option<PathBuf>,
    /// `alternating`, `periodic:<labels>` or `seeded:<u64>`.
    #[arg(long)]
    pub generator: Option<String>,
    #[arg(long, default_value = "01")]
    pub alphabet: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyArg {
    Padic,
    Real,
}

#[derive(Debug, Args, Serialize)]
pub struct FreqArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub prime: u64,
    /// Index sequence: `m+t*p^k`, `t*p^k`, `trunc(m)` or `list:N1,N2,...`.
    #[arg(long)]
    pub selector: String,
    /// Labels of the event A, e.g. `1`.
    #[arg(long)]
    pub event: String,
    /// Condition on this event (Bayes quotient).
    #[arg(long)]
    pub given: Option<String>,
    #[arg(long, value_enum, default_value_t = TopologyArg::Padic)]
    pub topology: TopologyArg,
    #[arg(long, default_value_t = 8)]
    pub kmax: u32,
    #[arg(long, default_value_t = 8)]
    pub threshold: i64,
    #[arg(long, default_value_t = 3)]
    pub window: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct TraceOpts {
    #[arg(long, default_value_t = 6)]
    pub kmax: u32,
    /// Minimum final valuation (default kmax - 2).
    #[arg(long)]
    pub threshold: Option<i64>,
    #[arg(long, default_value_t = 3)]
    pub window: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct Thm31Args {
    #[arg(long)]
    pub prime: u64,
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub r: u64,
    #[arg(long)]
    pub l: u32,
    /// N_k = m + t p^k unless `--selector` is given.
    #[arg(long, default_value_t = 1)]
    pub t: u64,
    #[arg(long)]
    pub selector: Option<String>,
    #[command(flatten)]
    pub trace: TraceOpts,
}

#[derive(Debug, Args, Serialize)]
pub struct Eq5Args {
    #[arg(long)]
    pub prime: u64,
    #[arg(long, default_value = "1+p^k")]
    pub selector: String,
    /// Emit the complement trace in CSV mode.
    #[arg(long)]
    pub complement: bool,
    #[command(flatten)]
    pub trace: TraceOpts,
}

#[derive(Debug, Args, Serialize)]
pub struct Thm32Args {
    #[arg(long)]
    pub prime: u64,
    #[arg(long)]
    pub r: u64,
    #[arg(long)]
    pub l: u32,
    #[arg(long, default_value_t = 1)]
    pub t: u64,
    #[arg(long)]
    pub selector: Option<String>,
    #[command(flatten)]
    pub trace: TraceOpts,
}

#[derive(Debug, Args, Serialize)]
pub struct LlnArgs {
    #[arg(long)]
    pub prime: u64,
    #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
    pub q: String,
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    /// Defaults to `trunc(a)`.
    #[arg(long)]
    pub selector: Option<String>,
    #[arg(long, default_value_t = 5)]
    pub mmax: u64,
    #[command(flatten)]
    pub trace: TraceOpts,
}

#[derive(Debug, Args, Serialize)]
pub struct CltArgs {
    /// Natural number of summands.
    #[arg(long, conflicts_with = "a")]
    pub n: Option<u64>,
    /// p-adic unit exponent.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long)]
    pub prime: Option<u64>,
    #[arg(long, default_value_t = 8)]
    pub order: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct MahlerArgs {
    /// Check boundedness of the coefficients of cosh z.
    #[arg(long)]
    pub gamma1: bool,
    /// Use the normalized series ψ(z, ·) instead of the Bernoulli sum.
    #[arg(long)]
    pub clt: bool,
    #[arg(long)]
    pub prime: u64,
    #[arg(long, conflicts_with = "a")]
    pub n: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
    pub q: String,
    /// Number of coefficients beyond λ_0.
    #[arg(long, default_value_t = 10)]
    pub m: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct IntegrateArgs {
    /// Base of the sequence space Z_q.
    #[arg(long)]
    pub q: u64,
    /// Prime of the value field Q_p.
    #[arg(long)]
    pub prime: u64,
    #[arg(long)]
    pub depth: usize,
    /// `digit-weight`, `constant:<c>` or `indicator:<words>`.
    #[arg(long, default_value = "digit-weight")]
    pub function: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Sphere,
    Residue,
}

#[derive(Debug, Args, Serialize)]
pub struct TestArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long)]
    pub prime: u64,
    #[arg(long)]
    pub l: u32,
    #[arg(long)]
    pub r: u64,
    /// Index sequence, e.g. `1+p^k`.
    #[arg(long)]
    pub scheme: String,
    /// ε = p^-eps_exp.
    #[arg(long)]
    pub eps_exp: i64,
    #[arg(long, default_value_t = 1)]
    pub kmin: u32,
    #[arg(long)]
    pub kmax: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Sphere)]
    pub mode: ModeArg,
}

#[derive(Debug, Args, Serialize)]
pub struct ForgeArgs {
    #[arg(long)]
    pub prime: u64,
    #[arg(long)]
    pub l: u32,
    #[arg(long)]
    pub r: u64,
    #[arg(long)]
    pub scheme: String,
    #[arg(long)]
    pub kmax: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Sphere)]
    pub mode: ModeArg,
}
