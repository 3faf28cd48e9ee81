//! `prp`: command-line front end to `prp-core`.
//!
//! Exit status: 0 on success, 2 when a representability verdict is
//! negative, 1 on bad input or a numerical failure, 64 on a usage error.

mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use commands::{RunConfig, Source};
use output::Format;
use prp_core::precision::{MAX_PRECISION_BITS, MIN_PRECISION_BITS};

#[derive(Debug, Parser)]
#[command(name = "prp", version, about = "Poisson representability of binary processes")]
struct Cli {
    /// Working precision in bits for the symmetric inversions.
    #[arg(long, global = true, default_value_t = 256)]
    precision: usize,
    /// Negativity tolerance for verdicts.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct SourceArgs {
    /// Markov chain parameters `p,r`.
    #[arg(long)]
    markov: Option<String>,
    /// JSON file `{"w": [w_1, ..], "singleton": s}`.
    #[arg(long)]
    intervals: Option<PathBuf>,
    /// Extra singleton mass.
    #[arg(long, default_value_t = 0.0)]
    singleton: f64,
    /// Longest interval kept from a Markov chain.
    #[arg(long, default_value_t = 60)]
    max_len: usize,
}

impl From<&SourceArgs> for Source {
    fn from(a: &SourceArgs) -> Self {
        Source {
            markov: a.markov.clone(),
            intervals: a.intervals.clone(),
            singleton: a.singleton,
            max_len: a.max_len,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Invert a distribution to its signed intensity.
    Invert {
        #[arg(long)]
        dist: PathBuf,
    },
    /// Zero probabilities and distribution of a nonnegative intensity.
    Forward {
        #[arg(long)]
        measure: PathBuf,
    },
    /// Decide representability of a distribution.
    Check {
        #[arg(long)]
        dist: PathBuf,
        /// Also test positive association and downward FKG.
        #[arg(long)]
        fkg: bool,
    },
    /// Level intensities of an exchangeable law given by `z_j`.
    SymmetricInvert {
        #[arg(long)]
        pattern: PathBuf,
    },
    /// Interval weights of a stationary two-state Markov chain.
    MarkovNu {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        len: usize,
    },
    /// Log-convexity test and interval weights of a renewal process.
    RenewalCheck {
        #[arg(long)]
        gaps: PathBuf,
        #[arg(long, default_value_t = 20)]
        len: usize,
        #[arg(long, default_value_t = 200)]
        kmax: usize,
    },
    /// Levels of a mixture of product measures.
    MixtureNu {
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long)]
        n: usize,
    },
    /// `Li_{1-k}(z)` from its rational form.
    Polylog {
        #[arg(long)]
        k: usize,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
    },
    /// Second largest root of `Li_{1-n}` and the matching threshold.
    PolylogRoot {
        #[arg(long)]
        n: usize,
        /// Print every `n' = 3..=n`.
        #[arg(long)]
        all: bool,
    },
    /// Sign table of the two-point mixture levels.
    PhaseScan {
        #[arg(long)]
        n: usize,
        /// `A` or `AxB` grid steps for α_1 and x_2.
        #[arg(long, default_value = "200")]
        grid: String,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        /// Write the CSV table here and print a summary.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        unresolved_below: Option<f64>,
    },
    /// Search for a negative Curie-Weiss level.
    CurieWeiss {
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 4096)]
        nmax: usize,
        /// Print the levels at this size instead of searching.
        #[arg(long)]
        n: Option<usize>,
    },
    /// One-sided verdict for a tree-indexed Markov chain.
    TreeVerdict {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        r: f64,
    },
    /// One-sided verdict for the Ising model on `Z^d`.
    IsingVerdict {
        #[arg(long)]
        d: usize,
        #[arg(long = "J", allow_negative_numbers = true)]
        j: f64,
    },
    /// Convert an exchangeable intensity to its Lévy triple, or back.
    ExchConvert {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        from_levy: bool,
    },
    /// Draw de Finetti parameters.
    ExchSample {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, default_value_t = 1)]
        n_draws: usize,
        #[arg(long, default_value_t = 1e-8)]
        trunc_eps: f64,
    },
    /// Laplace transform of the de Finetti variable `Z`.
    ExchLaplace {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
    },
    /// Sample a window of a stationary interval process.
    Sample {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        len: usize,
    },
    /// Empirical pair covariance against the closed form.
    Correlate {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 100_000)]
        draws: usize,
    },
    /// Stochastic domination over a product measure.
    Dominate {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 64)]
        nmax: usize,
    },
}

fn run(cli: &Cli, cfg: &RunConfig) -> commands::CmdResult {
    use Command::*;
    match &cli.command {
        Invert { dist } => commands::invert_cmd(dist),
        Forward { measure } => commands::forward_cmd(measure),
        Check { dist, fkg } => commands::check_cmd(dist, *fkg, cfg),
        SymmetricInvert { pattern } => commands::symmetric_invert_cmd(pattern, cfg),
        MarkovNu { p, r, len } => commands::markov_nu_cmd(*p, *r, *len),
        RenewalCheck { gaps, len, kmax } => commands::renewal_check_cmd(gaps, *len, *kmax),
        MixtureNu { x, alpha, q, n } => commands::mixture_nu_cmd(x, alpha, *q, *n, cfg),
        Polylog { k, z } => commands::polylog_cmd(*k, *z),
        PolylogRoot { n, all } => commands::polylog_root_cmd(*n, *all),
        PhaseScan { n, grid, q, out, unresolved_below } => {
            commands::phase_scan_cmd(*n, grid, *q, out.as_ref(), *unresolved_below, cfg)
        }
        CurieWeiss { beta, nmax, n } => commands::curie_weiss_cmd(*beta, *nmax, *n, cfg),
        TreeVerdict { d, r } => commands::tree_verdict_cmd(*d, *r),
        IsingVerdict { d, j } => commands::ising_verdict_cmd(*d, *j),
        ExchConvert { measure, from_levy } => commands::exch_convert_cmd(measure, *from_levy),
        ExchSample { measure, n_draws, trunc_eps } => commands::exch_sample_cmd(measure, *n_draws, *trunc_eps, cfg),
        ExchLaplace { measure, t } => commands::exch_laplace_cmd(measure, t),
        Sample { source, len } => commands::sample_cmd(&source.into(), *len, cfg),
        Correlate { source, k, draws } => commands::correlate_cmd(&source.into(), *k, *draws, cfg),
        Dominate { source, p, nmax } => commands::dominate_cmd(&source.into(), *p, *nmax),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if !(MIN_PRECISION_BITS..=MAX_PRECISION_BITS).contains(&cli.precision) {
        eprintln!(
            "error: --precision must lie in [{MIN_PRECISION_BITS}, {MAX_PRECISION_BITS}], got {}",
            cli.precision
        );
        return ExitCode::from(1);
    }
    if !(cli.tol.is_finite() && cli.tol >= 0.0) {
        eprintln!("error: --tol must be a nonnegative number");
        return ExitCode::from(1);
    }
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let cfg = RunConfig {
        precision_bits: cli.precision,
        tol: cli.tol,
        seed: cli.seed,
    };
    match run(&cli, &cfg) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(report.render(cli.format).as_bytes());
            let _ = out.flush();
            ExitCode::from(if report.negative { 2 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
