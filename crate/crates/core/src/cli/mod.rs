//! The `banach-gauge` command line.
//!
//! [`dispatch`] parses an argument vector, runs one subcommand and returns
//! the exit code with both output streams, so the binary stays a thin shell
//! and the whole interface is testable in-process. Exit codes: 0 success,
//! 1 domain error (structured JSON on stdout), 2 usage error.

mod commands;
mod input;
mod output;
mod sweep;

use std::ffi::OsString;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

pub use output::{format_f64, render, RunManifest};

use crate::error::Error;

pub const SEED_ENV: &str = "BANACH_GAUGE_SEED";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: String) -> Self {
        Outcome { code: 2, stdout: String::new(), stderr: msg }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "banach-gauge",
    version,
    about = "Exact Tsirelson-type norms, type/cotype estimates, JL experiments and growth calculators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact norm of a finitely supported rational vector
    Norm(NormArgs),
    /// Type-2 or cotype-2 ratio of a vector family
    Ratio(RatioArgs),
    /// Reduce a sum of rank-one tensors to at most d(d+1)/2 terms
    Caratheodory(CaratheodoryArgs),
    /// Gaussian random projection with measured distortion
    JlEmbed(JlEmbedArgs),
    /// Per-trial check that JL embeddability caps the type/cotype ratios
    JlMechanism(MechanismArgs),
    /// Walsh point set of a family and the orthogonality identity
    Walsh(WalshArgs),
    /// log*, the Ackermann hierarchy and its inverses (plain decimal output)
    Growth {
        #[command(subcommand)]
        query: GrowthQuery,
    },
    /// Recursive Euclidean-distortion bound with its argument chain
    DeltaBound(DeltaArgs),
    /// Cutting-plane search for flat vectors supported in [1, N]
    FlatSearch(FlatArgs),
    /// Cotype-2 certificate from a flat witness
    CotypeCert(CertArgs),
    /// Compare the T2 and modified T2 norms on random vectors
    CompareNorms(CompareArgs),
    /// Run a subcommand over a parameter grid and emit CSV
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpaceArg {
    #[value(name = "T")]
    T,
    #[value(name = "T2")]
    T2,
    #[value(name = "mod")]
    Mod,
    #[value(name = "mod2")]
    Mod2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Type,
    Cotype,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Mc,
}

#[derive(Debug, Args)]
struct NormArgs {
    #[arg(long, value_enum)]
    space: SpaceArg,
    /// JSON vector: a dense list or {"v": {"<index>": "<p>/<q>"}}
    #[arg(long = "vec")]
    vec: String,
    /// Use the exhaustive-search oracle instead of the dynamic program
    #[arg(long)]
    brute: bool,
    /// Write the certificate tree here
    #[arg(long)]
    cert_out: Option<String>,
}

#[derive(Debug, Args)]
struct RatioArgs {
    /// l1, l2, linf, l<p>, T, T2 or mod2
    #[arg(long)]
    space: String,
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    /// JSON list of vectors; entries may be "sqrt(q)"
    #[arg(long)]
    vecs: String,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct CaratheodoryArgs {
    #[arg(long)]
    vecs: String,
    #[arg(long)]
    dim: usize,
}

#[derive(Debug, Args)]
struct JlEmbedArgs {
    /// JSON list of points
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    points: Option<String>,
    /// Use this many i.i.d. Gaussian points instead of a file
    #[arg(long, requires = "dim")]
    random: Option<usize>,
    /// Dimension of the random points
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 8.0)]
    constant: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Independent single draws, reported as a success rate
    #[arg(long)]
    trials: Option<usize>,
    /// Write the accepted map as JSON {"scale", "rows"}
    #[arg(long, conflicts_with = "trials")]
    map_out: Option<String>,
    /// Per-trial CSV rows (with --trials)
    #[arg(long, requires = "trials")]
    csv: bool,
}

#[derive(Debug, Args)]
struct MechanismArgs {
    #[arg(long)]
    space: String,
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 8.0)]
    constant: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Args)]
struct WalshArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    family: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Include the point set itself in the output
    #[arg(long)]
    emit_points: bool,
}

#[derive(Debug, Subcommand)]
enum GrowthQuery {
    /// Number of natural logs taking x to at most 1
    LogStar { x: f64 },
    /// g_k(n), or EXCEEDS_CAP
    G {
        k: u32,
        #[arg(value_parser = parse_big)]
        n: BigUint,
        /// Decimal or a^b
        #[arg(long, value_parser = parse_big, default_value = "10^100")]
        cap: BigUint,
    },
    /// min{k : g_k(2) >= n}
    Alpha {
        #[arg(value_parser = parse_big)]
        n: BigUint,
    },
    /// The k with g_k(k) < n <= g_{k+1}(k+1)
    AlphaDiag {
        #[arg(value_parser = parse_big)]
        n: BigUint,
    },
    /// The recursive distortion bound
    DeltaBound(DeltaArgs),
}

#[derive(Debug, Args)]
struct DeltaArgs {
    n: f64,
    #[arg(long = "K", default_value_t = 1.0)]
    k: f64,
    #[arg(long = "D", default_value_t = 1.0)]
    d: f64,
}

#[derive(Debug, Args)]
struct FlatArgs {
    #[arg(long = "N")]
    n: usize,
    #[arg(long, default_value_t = 200)]
    rounds: usize,
}

#[derive(Debug, Args)]
struct CertArgs {
    /// A flat-search report, {"x": vec, "n_bound": N}, or a bare vector
    #[arg(long)]
    witness: String,
    #[arg(long = "N")]
    n: Option<usize>,
    /// Recompute the ratio by sign enumeration on the explicit family
    #[arg(long)]
    cross_check: bool,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Supports lie in [1, support]; at most 12
    #[arg(long, default_value_t = 8)]
    support: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// JSON {"command", "args", "positional", "grid"}
    #[arg(long)]
    config: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the sweep's run manifest here
    #[arg(long)]
    manifest_out: Option<String>,
}

fn parse_big(s: &str) -> Result<BigUint, String> {
    let bad = || format!("expected a nonnegative integer or a^b, got {s:?}");
    match s.split_once('^') {
        Some((b, e)) => {
            let b: BigUint = b.trim().parse().map_err(|_| bad())?;
            let e: u32 = e.trim().parse().map_err(|_| bad())?;
            Ok(num_traits::Pow::pow(b, e))
        }
        None => s.trim().parse().map_err(|_| bad()),
    }
}

/// What a command produced, before rendering.
enum Rendered {
    /// A JSON object, rendered with its manifest.
    Json { body: serde_json::Value, seed: Option<u64> },
    Text(String),
    Csv(String),
}

/// Shared per-invocation state.
struct Ctx {
    env_seed: Option<u64>,
}

impl Ctx {
    fn seed(&self, flag: Option<u64>) -> u64 {
        self.env_seed.or(flag).unwrap_or(0)
    }
}

/// Runs one invocation; `argv[0]` is the program name. Reads
/// `BANACH_GAUGE_SEED` from the environment.
pub fn dispatch<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env = std::env::var(SEED_ENV).ok();
    dispatch_with_seed(argv, env.as_deref())
}

/// [`dispatch`] with the seed override passed explicitly.
pub fn dispatch_with_seed<I, T>(argv: I, env_seed: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let env_seed = match env_seed.map(|s| s.trim().parse::<u64>()) {
        None => None,
        Some(Ok(s)) => Some(s),
        Some(Err(_)) => return Outcome::usage(format!("error: {SEED_ENV} must be an unsigned 64-bit integer\n")),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome::usage(text),
            };
        }
    };
    let args: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let name = args.first().cloned().unwrap_or_default();
    let ctx = Ctx { env_seed };
    let start = Instant::now();
    match commands::run(cli.command, &ctx) {
        Ok(Rendered::Json { body, seed }) => {
            let ms = start.elapsed().as_secs_f64() * 1e3;
            let mut out = output::with_manifest(body, &name, &args, seed, ms);
            out.push('\n');
            Outcome { code: 0, stdout: out, stderr: String::new() }
        }
        Ok(Rendered::Text(t)) => Outcome { code: 0, stdout: format!("{t}\n"), stderr: String::new() },
        Ok(Rendered::Csv(c)) => Outcome { code: 0, stdout: c, stderr: String::new() },
        Err(e) => domain_error(&e),
    }
}

fn domain_error(e: &Error) -> Outcome {
    Outcome { code: 1, stdout: format!("{}\n", output::error_json(e)), stderr: format!("error: {e}\n") }
}
