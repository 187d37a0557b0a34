use serde::Serialize;

use super::{count_successes, Estimate, SamplingConfig};
use crate::builder::LawFamily;
use crate::error::{Error, Result};
use crate::exploration::EdgeSemantics;
use crate::lattice::BallIndex;
use crate::rng::derive_seed;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BisectionOptions {
    pub threshold: f64,
    /// Stop once the bracket is at most this wide.
    pub tol: f64,
    /// Defaults to the family's parameter domain.
    pub bracket: Option<(f64, f64)>,
    /// Reuse one seed for every evaluation instead of fresh derived seeds.
    pub common_random_numbers: bool,
}

impl BisectionOptions {
    pub fn new(threshold: f64, tol: f64) -> Self {
        BisectionOptions { threshold, tol, bracket: None, common_random_numbers: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PseudoCritical {
    pub label: &'static str,
    pub family: String,
    pub d: usize,
    pub n: u64,
    pub semantics: String,
    pub threshold: f64,
    /// Midpoint of the final bracket.
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub evaluations: Vec<(f64, Estimate)>,
}

/// Bisection for the parameter at which the radius-`n` one-arm estimate
/// crosses `threshold`. Assumes the family is monotone increasing in its
/// parameter. The result is a finite-size pseudo-critical point.
pub fn pseudo_critical(
    family: &LawFamily,
    dim: usize,
    n: u64,
    sem: EdgeSemantics,
    cfg: &SamplingConfig,
    opts: &BisectionOptions,
) -> Result<PseudoCritical> {
    if !(opts.threshold > 0.0 && opts.threshold < 1.0) {
        return Err(Error::domain(format!("threshold {} outside (0, 1)", opts.threshold)));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    if cfg.samples == 0 {
        return Err(Error::domain("samples must be at least 1"));
    }
    let (mut lo, mut hi) = opts.bracket.unwrap_or_else(|| family.domain());
    if !(lo < hi) {
        return Err(Error::domain(format!("empty bracket [{lo}, {hi}]")));
    }
    let ball = BallIndex::new(dim, n)?;
    let mut evaluations = Vec::new();
    let mut evaluate = |param: f64| -> Result<Estimate> {
        let index = evaluations.len() as u64;
        let seed = if opts.common_random_numbers { cfg.seed } else { derive_seed(cfg.seed, index) };
        let law = family.build(dim, param)?;
        let successes = count_successes(&law, &ball, sem, &cfg.with_seed(seed))?;
        let mut est = Estimate::from_counts(successes, cfg.samples).labeled(family.builder(param).to_string());
        est.d = dim;
        est.n = n;
        est.semantics = sem.to_string();
        est.seed = seed;
        evaluations.push((param, est.clone()));
        Ok(est)
    };

    let low_est = evaluate(lo)?;
    if low_est.p_hat >= opts.threshold {
        return Err(Error::BracketFailure { endpoint: "lower", param: lo, estimate: low_est.p_hat, threshold: opts.threshold });
    }
    let high_est = evaluate(hi)?;
    if high_est.p_hat < opts.threshold {
        return Err(Error::BracketFailure { endpoint: "upper", param: hi, estimate: high_est.p_hat, threshold: opts.threshold });
    }
    while hi - lo > opts.tol {
        let mid = 0.5 * (lo + hi);
        if evaluate(mid)?.p_hat >= opts.threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(PseudoCritical {
        label: "finite-size pseudo-critical point",
        family: family.to_string(),
        d: dim,
        n,
        semantics: sem.to_string(),
        threshold: opts.threshold,
        estimate: 0.5 * (lo + hi),
        lower: lo,
        upper: hi,
        evaluations,
    })
}
