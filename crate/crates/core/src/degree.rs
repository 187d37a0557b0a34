use serde::Serialize;

use crate::error::{Error, Result};
use crate::weight::Weight;

/// Distribution of the out-degree `|N(o)|`: `alphas[n] = P[|N(o)| = n]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeDistribution<T = f64> {
    dim: usize,
    alphas: Vec<T>,
}

impl<T: Weight> DegreeDistribution<T> {
    pub fn new(dim: usize, alphas: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("dimension must be at least 1"));
        }
        if alphas.len() != 2 * dim + 1 {
            return Err(Error::InvalidLaw(format!(
                "degree distribution in dimension {dim} needs {} entries, got {}",
                2 * dim + 1,
                alphas.len()
            )));
        }
        if let Some(n) = alphas.iter().position(|a| !(*a >= T::zero())) {
            return Err(Error::InvalidLaw(format!("alpha[{n}] = {} is negative", alphas[n])));
        }
        let total = T::total(&alphas);
        if !T::is_unit_total(&total) {
            return Err(Error::InvalidLaw(format!("alphas sum to {total}, not 1")));
        }
        Ok(DegreeDistribution { dim, alphas })
    }

    /// Builds without validation; callers guarantee the invariants.
    pub(crate) fn from_parts(dim: usize, alphas: Vec<T>) -> Self {
        DegreeDistribution { dim, alphas }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphas(&self) -> &[T] {
        &self.alphas
    }

    pub fn alpha(&self, n: usize) -> &T {
        &self.alphas[n]
    }

    pub fn mean(&self) -> T {
        self.alphas
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (n, a)| acc + T::from_u64(n as u64) * a.clone())
    }

    /// Smallest and largest degree carrying positive mass.
    pub fn support_bounds(&self) -> (usize, usize) {
        let positive = |a: &T| *a > T::zero();
        let lo = self.alphas.iter().position(positive).unwrap_or(0);
        let hi = self.alphas.iter().rposition(positive).unwrap_or(0);
        (lo, hi)
    }

    /// The range statistic `max support - min support`.
    pub fn range(&self) -> usize {
        let (lo, hi) = self.support_bounds();
        hi - lo
    }

    pub fn to_f64(&self) -> DegreeDistribution<f64> {
        DegreeDistribution {
            dim: self.dim,
            alphas: self.alphas.iter().map(Weight::to_f64).collect(),
        }
    }
}

/// `C(n, k)` in 64-bit arithmetic; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(20, 10), 184_756);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(0, 0), 1);
    }

    #[test]
    fn range_and_mean() {
        let dd = DegreeDistribution::new(2, vec![0.5, 0.0, 0.0, 0.5, 0.0]).unwrap();
        assert_eq!(dd.support_bounds(), (0, 3));
        assert_eq!(dd.range(), 3);
        assert!((dd.mean() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_alphas() {
        assert!(DegreeDistribution::new(1, vec![0.5, 0.5]).is_err());
        assert!(DegreeDistribution::new(1, vec![0.5, 0.6, -0.1]).is_err());
        assert!(DegreeDistribution::new(1, vec![0.5, 0.6, 0.0]).is_err());
    }
}
