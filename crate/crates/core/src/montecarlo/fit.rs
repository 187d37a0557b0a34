use serde::Serialize;

use super::{count_successes, Estimate, SamplingConfig};
use crate::error::{Error, Result};
use crate::exploration::EdgeSemantics;
use crate::lattice::BallIndex;
use crate::law::LocalLaw;
use crate::rng::derive_seed;

/// Least-squares fit of `ln p̂(n) = intercept − c_hat·n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub c_hat: f64,
    pub slope: f64,
    pub intercept: f64,
    pub radii: Vec<u64>,
    pub log_estimates: Vec<f64>,
    pub r_squared: f64,
    /// Radii dropped because their estimate was zero.
    pub truncated: Vec<u64>,
    pub estimates: Vec<Estimate>,
}

/// Ordinary least squares `y ≈ slope·x + intercept`, returning
/// `(slope, intercept, r²)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    (slope, intercept, r_squared)
}

/// Fits the exponential decay rate of the one-arm probability. Radius `i`
/// uses a seed derived from `(cfg.seed, i)`. Radii from the first zero
/// estimate onward are dropped.
pub fn fit_decay(law: &LocalLaw<f64>, radii: &[u64], sem: EdgeSemantics, cfg: &SamplingConfig) -> Result<DecayFit> {
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("radii must be strictly increasing"));
    }
    if cfg.samples == 0 {
        return Err(Error::domain("samples must be at least 1"));
    }
    let mut estimates = Vec::new();
    let mut truncated = Vec::new();
    for (i, &n) in radii.iter().enumerate() {
        if !truncated.is_empty() {
            truncated.push(n);
            continue;
        }
        let ball = BallIndex::new(law.dim(), n)?;
        let seed = derive_seed(cfg.seed, i as u64);
        let successes = count_successes(law, &ball, sem, &cfg.with_seed(seed))?;
        if successes == 0 {
            truncated.push(n);
            continue;
        }
        let mut est = Estimate::from_counts(successes, cfg.samples).labeled("custom");
        est.d = law.dim();
        est.n = n;
        est.semantics = sem.to_string();
        est.seed = seed;
        estimates.push(est);
    }
    if estimates.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} radii with a positive estimate, need at least 3",
            estimates.len()
        )));
    }
    let xs: Vec<f64> = estimates.iter().map(|e| e.n as f64).collect();
    let ys: Vec<f64> = estimates.iter().map(|e| e.p_hat.ln()).collect();
    let (slope, intercept, r_squared) = least_squares(&xs, &ys);
    Ok(DecayFit {
        c_hat: -slope,
        slope,
        intercept,
        radii: estimates.iter().map(|e| e.n).collect(),
        log_estimates: ys,
        r_squared,
        truncated,
        estimates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 0.5 * x).collect();
        let (slope, intercept, r2) = least_squares(&xs, &ys);
        assert!((slope + 0.5).abs() < 1e-12 && (intercept - 2.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_rate_d1() {
        // ln(2p^(n+1) − p^(2(n+1))) at p = 1/2 has slope close to −ln 2.
        let xs: Vec<f64> = (1..=8).map(f64::from).collect();
        let ys: Vec<f64> = (1..=8)
            .map(|n| {
                let q = 0.5f64.powi(n + 1);
                (2.0 * q - q * q).ln()
            })
            .collect();
        let (slope, _, _) = least_squares(&xs, &ys);
        assert!((-slope / 2f64.ln() - 1.0).abs() < 0.1);
    }

    #[test]
    fn d1_monte_carlo_rate() {
        let law = LocalLaw::iid(1, 0.5).unwrap();
        let radii: Vec<u64> = (1..=8).collect();
        let fit = fit_decay(&law, &radii, EdgeSemantics::Directed, &SamplingConfig::new(200_000, 3)).unwrap();
        assert!((fit.c_hat / 2f64.ln() - 1.0).abs() < 0.1, "{}", fit.c_hat);
        assert!(fit.r_squared > 0.99);
    }

    #[test]
    fn empty_law_has_no_data() {
        let law = LocalLaw::empty(2).unwrap();
        let err = fit_decay(&law, &[1, 2, 3, 4], EdgeSemantics::Directed, &SamplingConfig::new(1000, 1)).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)));
    }

    #[test]
    fn radii_must_increase() {
        let law = LocalLaw::iid(2, 0.5).unwrap();
        assert!(fit_decay(&law, &[2, 2, 3], EdgeSemantics::Directed, &SamplingConfig::new(10, 1)).is_err());
    }
}
