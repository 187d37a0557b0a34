//! Seeded, parallel one-arm estimators built on [`Explorer`].
//!
//! Sample `i` of a run with seed `s` is driven by the stream
//! `StreamKey::new(s).substream(i)`, and only integer success counts are
//! aggregated, so results do not depend on the worker count.

mod critical;
mod fit;

pub use critical::{pseudo_critical, BisectionOptions, PseudoCritical};
pub use fit::{fit_decay, least_squares, DecayFit};

use rayon::prelude::*;
use serde::Serialize;

use crate::builder::LawFamily;
use crate::error::{Error, Result};
use crate::exploration::{EdgeSemantics, Explorer};
use crate::lattice::BallIndex;
use crate::law::LocalLaw;
use crate::rng::{derive_seed, StreamKey};
use crate::VERSION;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

const CHUNK: u64 = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplingConfig {
    pub samples: u64,
    pub seed: u64,
    /// Worker threads; 0 lets rayon decide.
    pub workers: usize,
}

impl SamplingConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        SamplingConfig { samples, seed, workers: 0 }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// One-arm estimate with a Wilson score interval.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub model: String,
    pub d: usize,
    pub n: u64,
    pub semantics: String,
    pub p_hat: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: u64,
    pub successes: u64,
    pub seed: u64,
    pub version: String,
}

impl Estimate {
    pub fn from_counts(successes: u64, samples: u64) -> Self {
        assert!(samples >= 1 && successes <= samples);
        let total = samples as f64;
        let p_hat = successes as f64 / total;
        let (ci_low, ci_high) = wilson_interval(successes, samples, Z95);
        Estimate {
            model: String::new(),
            d: 0,
            n: 0,
            semantics: String::new(),
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / total).sqrt(),
            ci_low,
            ci_high,
            samples,
            successes,
            seed: 0,
            version: VERSION.to_string(),
        }
    }

    pub fn labeled(mut self, model: impl Into<String>) -> Self {
        self.model = model.into();
        self
    }

    /// `sqrt(se1² + se2²)`.
    pub fn pooled_stderr(&self, other: &Estimate) -> f64 {
        self.stderr.hypot(other.stderr)
    }
}

/// Wilson score interval for `successes` out of `samples`.
pub fn wilson_interval(successes: u64, samples: u64, z: f64) -> (f64, f64) {
    let total = samples as f64;
    let p = successes as f64 / total;
    let z2 = z * z;
    let denom = 1.0 + z2 / total;
    let center = (p + z2 / (2.0 * total)) / denom;
    let half = z / denom * (p * (1.0 - p) / total + z2 / (4.0 * total * total)).sqrt();
    let low = if successes == 0 { 0.0 } else { (center - half).clamp(0.0, p) };
    let high = if successes == samples { 1.0 } else { (center + half).clamp(p, 1.0) };
    (low, high)
}

pub(crate) fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::ResourceGuard(format!("cannot start worker pool: {e}")))
}

/// Number of samples `0..samples` whose exploration reaches `∂B_n`.
pub fn count_successes(law: &LocalLaw<f64>, ball: &BallIndex, sem: EdgeSemantics, cfg: &SamplingConfig) -> Result<u64> {
    Explorer::new(law, ball, sem)?;
    let root = StreamKey::new(cfg.seed);
    let chunks = cfg.samples.div_ceil(CHUNK);
    let samples = cfg.samples;
    pool(cfg.workers)?.install(|| {
        Ok((0..chunks)
            .into_par_iter()
            .map_init(
                || Explorer::new(law, ball, sem).expect("validated above"),
                |explorer, chunk| {
                    let start = chunk * CHUNK;
                    let end = (start + CHUNK).min(samples);
                    (start..end)
                        .filter(|&i| explorer.run(root.substream(i)).reached_boundary)
                        .count() as u64
                },
            )
            .sum())
    })
}

/// Monte Carlo estimate of `P[o ⇝ ∂B_n]`.
pub fn estimate_one_arm(law: &LocalLaw<f64>, n: u64, sem: EdgeSemantics, cfg: &SamplingConfig) -> Result<Estimate> {
    if cfg.samples == 0 {
        return Err(Error::domain("samples must be at least 1"));
    }
    let ball = BallIndex::new(law.dim(), n)?;
    let successes = count_successes(law, &ball, sem, cfg)?;
    let mut est = Estimate::from_counts(successes, cfg.samples);
    est.model = "custom".into();
    est.d = law.dim();
    est.n = n;
    est.semantics = sem.to_string();
    est.seed = cfg.seed;
    Ok(est)
}

/// One-arm probability at radius `n`, reported as an upper-bound proxy for
/// the survival probability θ. No extrapolation in `n` is attempted.
pub fn survival_proxy(law: &LocalLaw<f64>, n: u64, sem: EdgeSemantics, cfg: &SamplingConfig, model: &str) -> Result<Estimate> {
    let est = estimate_one_arm(law, n, sem, cfg)?;
    Ok(est.labeled(format!("theta-upper-proxy(n={n}) {model}")))
}

/// Estimates along a sorted parameter grid. With `common_random_numbers`
/// every point reuses `cfg.seed`; otherwise point `i` gets a derived seed.
pub fn scan_parameter(
    family: &LawFamily,
    grid: &[f64],
    dim: usize,
    n: u64,
    sem: EdgeSemantics,
    cfg: &SamplingConfig,
    common_random_numbers: bool,
) -> Result<Vec<Estimate>> {
    if grid.is_empty() {
        return Err(Error::domain("parameter grid is empty"));
    }
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::domain("parameter grid must be sorted"));
    }
    let ball = BallIndex::new(dim, n)?;
    grid.iter()
        .enumerate()
        .map(|(i, &param)| {
            let law = family
                .build(dim, param)
                .map_err(|e| Error::domain(format!("grid point {i} ({family} at {param}): {e}")))?;
            let seed = if common_random_numbers { cfg.seed } else { derive_seed(cfg.seed, i as u64) };
            let cfg = cfg.with_seed(seed);
            if cfg.samples == 0 {
                return Err(Error::domain("samples must be at least 1"));
            }
            let successes = count_successes(&law, &ball, sem, &cfg)?;
            let mut est = Estimate::from_counts(successes, cfg.samples).labeled(family.builder(param).to_string());
            est.d = dim;
            est.n = n;
            est.semantics = sem.to_string();
            est.seed = seed;
            Ok(est)
        })
        .collect()
}
