use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sitewise::{EdgeSemantics, LawBuilder, LawFamily};

#[derive(Parser, Debug)]
#[command(name = "sitewise", version, about = "Site-wise comparison of nearest-neighbor percolation models")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Master seed for Monte Carlo commands.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Configuration budget for exact enumeration.
    #[arg(long, global = true, value_parser = parse_count, default_value = "67108864")]
    pub budget: u64,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    /// Left-hand law, e.g. `iid:0.5`.
    #[arg(long)]
    pub p: LawBuilder,
    /// Right-hand law.
    #[arg(long)]
    pub q: LawBuilder,
    #[arg(long)]
    pub d: usize,
    /// Exact rational arithmetic (no tolerance).
    #[arg(long)]
    pub exact: bool,
    /// Float tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    #[arg(long)]
    pub d: usize,
    /// Ball radius.
    #[arg(long)]
    pub n: u64,
    /// `directed`, `union`, `intersection`, `site:<p>` or `bond:<p>`.
    #[arg(long, default_value = "directed")]
    pub sem: EdgeSemantics,
}

#[derive(Args, Debug, Clone)]
pub struct SampleArgs {
    /// Samples per estimate; accepts `1e6`.
    #[arg(long, value_parser = parse_count, default_value = "100000")]
    pub samples: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print A ↦ P[N(o) ∩ A ≠ ∅] for every mask A.
    HittingProfile {
        #[arg(long)]
        law: LawBuilder,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        exact: bool,
        /// Also write the law itself as JSON.
        #[arg(long)]
        emit_law: Option<PathBuf>,
    },
    /// Single-set local domination over proper masks.
    CheckDomination {
        #[command(flatten)]
        pair: PairArgs,
        /// Require strict inequality on every mask.
        #[arg(long)]
        strict: bool,
        /// Include the empty and the full mask.
        #[arg(long)]
        all_masks: bool,
    },
    /// Joint hitting domination over disjoint nonempty pairs.
    CheckPairwise {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Stochastic domination on the subset lattice (d ≤ 3).
    CheckStochastic {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Mass-moving reduction of an exchangeable degree distribution.
    ReduceExchangeable {
        #[arg(long)]
        d: usize,
        /// Degree masses α_0, ..., α_2d.
        #[arg(long)]
        alphas: String,
        #[arg(long)]
        exact: bool,
    },
    /// Monte Carlo one-arm estimate.
    Estimate {
        #[arg(long)]
        law: LawBuilder,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sampling: SampleArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
    },
    /// One estimate per point of a parameter grid.
    Scan {
        /// Law family: iid, dng, aon, corner, soft-opp, soft-perp, mix:<spec>.
        #[arg(long)]
        family: LawFamily,
        /// Comma-separated grid values.
        #[arg(long)]
        grid: String,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sampling: SampleArgs,
        /// Reuse the master seed at every grid point.
        #[arg(long)]
        crn: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
    },
    /// Exponential decay fit of the one-arm probability.
    FitDecay {
        #[arg(long)]
        law: LawBuilder,
        #[arg(long)]
        d: usize,
        /// Comma-separated radii.
        #[arg(long)]
        radii: String,
        #[arg(long, default_value = "directed")]
        sem: EdgeSemantics,
        #[command(flatten)]
        sampling: SampleArgs,
    },
    /// Finite-size pseudo-critical point by bisection.
    PseudoCritical {
        #[arg(long)]
        family: LawFamily,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sampling: SampleArgs,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long, default_value_t = 0.005)]
        tol: f64,
        #[arg(long, requires = "hi")]
        lo: Option<f64>,
        #[arg(long, requires = "lo")]
        hi: Option<f64>,
        #[arg(long)]
        crn: bool,
    },
    /// Exhaustive check of Q_U ≤ Q_{U ∪ {a}} over all (U, a).
    VerifyInterpolation {
        #[arg(long)]
        p: LawBuilder,
        #[arg(long)]
        q: LawBuilder,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "directed")]
        sem: EdgeSemantics,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Exact one-arm probability by enumeration.
    Exact {
        #[arg(long)]
        law: LawBuilder,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        exact: bool,
    },
    /// Threshold lines implied by an upper bound on p_c(d).
    ReportThresholds {
        #[arg(long)]
        d: usize,
        /// Decimal upper bound on p_c(d); required outside d = 2..5.
        #[arg(long)]
        pc_upper: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Run a job described by a TOML file.
    Run {
        config: PathBuf,
    },
}

/// Non-negative integer, also written as `1e6` or `10^6`.
pub fn parse_count(text: &str) -> Result<u64, String> {
    let text = text.trim().replace('_', "");
    if let Ok(v) = text.parse::<u64>() {
        return Ok(v);
    }
    if let Some((base, exp)) = text.split_once('^') {
        let base: u64 = base.parse().map_err(|_| format!("bad count {text:?}"))?;
        let exp: u32 = exp.parse().map_err(|_| format!("bad count {text:?}"))?;
        return base.checked_pow(exp).ok_or_else(|| format!("count {text:?} overflows"));
    }
    match text.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1.8e19 => Ok(v as u64),
        _ => Err(format!("expected a non-negative integer, got {text:?}")),
    }
}

pub fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> anyhow::Result<Vec<T>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<T>().map_err(|_| anyhow::anyhow!("bad {what} value {:?}", s.trim())))
        .collect()
}
