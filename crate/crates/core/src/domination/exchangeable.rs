//! The mass-moving reduction for exchangeable laws and the concavity facts
//! behind the sandwich `aon ≤ P ≤ DnG` for exchangeable `P`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::degree::DegreeDistribution;
use crate::error::{Error, Result};
use crate::law::LocalLaw;
use crate::weight::Weight;

#[derive(Clone, Debug, PartialEq)]
pub enum ReduceStep<T> {
    Reduced(DegreeDistribution<T>),
    /// Range already at most one; nothing to move.
    Terminal,
}

/// One reduction step: removes `m = min(α_{n+}, α_{n-})` from both extreme
/// degrees and puts it back at the midpoint (`2m` at `ñ` when `n+ + n-` is
/// even, `m` at each of `ñ ± 1/2` when odd). Preserves the mean and lowers
/// the range by at least one.
pub fn exchangeable_reduce_step<T: Weight>(dd: &DegreeDistribution<T>) -> ReduceStep<T> {
    let (lo, hi) = dd.support_bounds();
    if hi - lo <= 1 {
        return ReduceStep::Terminal;
    }
    let mut alphas = dd.alphas().to_vec();
    let (a_lo, a_hi) = (alphas[lo].clone(), alphas[hi].clone());
    let moved = if a_lo <= a_hi { a_lo.clone() } else { a_hi.clone() };
    // Zero the exhausted endpoint exactly so the range shrinks despite rounding.
    if a_lo <= a_hi {
        alphas[lo] = T::zero();
        alphas[hi] = a_hi - moved.clone();
    } else {
        alphas[hi] = T::zero();
        alphas[lo] = a_lo - moved.clone();
    }
    if (lo + hi) % 2 == 0 {
        let mid = (lo + hi) / 2;
        alphas[mid] = alphas[mid].clone() + moved.clone() + moved;
    } else {
        let below = (lo + hi) / 2;
        alphas[below] = alphas[below].clone() + moved.clone();
        alphas[below + 1] = alphas[below + 1].clone() + moved;
    }
    ReduceStep::Reduced(DegreeDistribution::from_parts(dd.dim(), alphas))
}

/// Full reduction history, starting with the input distribution.
#[derive(Clone, Debug)]
pub struct ReductionChain<T> {
    pub steps: Vec<DegreeDistribution<T>>,
}

impl<T: Weight> ReductionChain<T> {
    pub fn terminal(&self) -> &DegreeDistribution<T> {
        self.steps.last().expect("chain starts with the input")
    }
}

/// Applies [`exchangeable_reduce_step`] until the range is at most one and
/// checks the result is the degree distribution of the DnG law with the
/// same mean.
pub fn exchangeable_reduce<T: Weight>(dd: &DegreeDistribution<T>) -> Result<ReductionChain<T>> {
    let mut steps = vec![dd.clone()];
    while let ReduceStep::Reduced(next) = exchangeable_reduce_step(steps.last().unwrap()) {
        steps.push(next);
    }
    let terminal = steps.last().unwrap();
    let dim = dd.dim();
    let p = terminal.mean() / T::from_u64(2 * dim as u64);
    let p = if p > T::one() { T::one() } else { p };
    let target = LocalLaw::dng(dim, p)?.degree_distribution();
    let tol = if T::EXACT { T::zero() } else { T::ratio(1, 1_000_000_000) };
    for (n, (got, want)) in terminal.alphas().iter().zip(target.alphas()).enumerate() {
        if got.abs_diff(want) > tol {
            return Err(Error::Precondition(format!(
                "reduction ended with alpha[{n}] = {got}, DnG law with the same mean has {want}"
            )));
        }
    }
    Ok(ReductionChain { steps })
}

fn binomial_big(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::from(1u32);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `f(n, ℓ) = 1 - C(2d-n, ℓ) / C(2d, ℓ)`, the chance that a uniform
/// `n`-subset of the `2d` directions meets a fixed `ℓ`-set.
pub fn f_value(dim: usize, n: usize, l: usize) -> BigRational {
    let m = 2 * dim;
    BigRational::from_integer(BigInt::from(1u32))
        - BigRational::new(binomial_big(m - n, l), binomial_big(m, l))
}

/// Exact check that `n ↦ f(n, ℓ)` has non-positive second differences on
/// `{0, …, 2d}` for every `ℓ ∈ {0, …, 2d}`.
pub fn f_concavity_check(dim: usize) -> bool {
    let m = 2 * dim;
    (0..=m).all(|l| {
        (1..m).all(|n| {
            let second = f_value(dim, n - 1, l) + f_value(dim, n + 1, l)
                - f_value(dim, n, l) * BigRational::from_integer(BigInt::from(2u32));
            second <= BigRational::zero()
        })
    })
}

/// Exact check of the chord-slope inequality for `n ↦ C(n, ℓ)` over all
/// triples `0 ≤ n1 < n2 < n3 ≤ 2d` and all `ℓ`:
/// `(C(n2,ℓ) - C(n1,ℓ)) / (n2 - n1) ≤ (C(n3,ℓ) - C(n2,ℓ)) / (n3 - n2)`.
pub fn binomial_convexity_check(dim: usize) -> bool {
    let m = 2 * dim;
    let c: Vec<Vec<BigInt>> = (0..=m).map(|n| (0..=m).map(|l| binomial_big(n, l)).collect()).collect();
    for l in 0..=m {
        for n1 in 0..=m {
            for n2 in n1 + 1..=m {
                for n3 in n2 + 1..=m {
                    let left = (&c[n2][l] - &c[n1][l]) * BigInt::from(n3 - n2);
                    let right = (&c[n3][l] - &c[n2][l]) * BigInt::from(n2 - n1);
                    if left > right {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Draws a degree distribution from the symmetric Dirichlet with the given
/// concentration, normalizing independent Gamma variates.
pub fn sample_degree_distribution<R: Rng + ?Sized>(
    dim: usize,
    concentration: f64,
    rng: &mut R,
) -> Result<DegreeDistribution<f64>> {
    let gamma = Gamma::new(concentration, 1.0)
        .map_err(|e| Error::domain(format!("bad Dirichlet concentration: {e}")))?;
    let mut alphas: Vec<f64> = (0..=2 * dim).map(|_| gamma.sample(rng)).collect();
    let total: f64 = alphas.iter().sum();
    if total <= 0.0 {
        alphas.iter_mut().for_each(|a| *a = 0.0);
        alphas[0] = 1.0;
    } else {
        alphas.iter_mut().for_each(|a| *a /= total);
    }
    let total = f64::total(&alphas);
    alphas[0] = (alphas[0] + 1.0 - total).max(0.0);
    DegreeDistribution::new(dim, alphas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::rational;

    fn dd(dim: usize, alphas: &[f64]) -> DegreeDistribution<f64> {
        DegreeDistribution::new(dim, alphas.to_vec()).unwrap()
    }

    #[test]
    fn even_case() {
        match exchangeable_reduce_step(&dd(2, &[0.5, 0.0, 0.0, 0.0, 0.5])) {
            ReduceStep::Reduced(next) => assert_eq!(next.alphas(), &[0.0, 0.0, 1.0, 0.0, 0.0]),
            ReduceStep::Terminal => panic!("range 4 must reduce"),
        }
    }

    #[test]
    fn odd_case() {
        match exchangeable_reduce_step(&dd(2, &[0.5, 0.0, 0.0, 0.5, 0.0])) {
            ReduceStep::Reduced(next) => assert_eq!(next.alphas(), &[0.0, 0.5, 0.5, 0.0, 0.0]),
            ReduceStep::Terminal => panic!("range 3 must reduce"),
        }
    }

    #[test]
    fn no_op_when_concentrated() {
        assert_eq!(exchangeable_reduce_step(&dd(1, &[0.0, 1.0, 0.0])), ReduceStep::Terminal);
        assert_eq!(exchangeable_reduce_step(&dd(2, &[0.0, 0.3, 0.7, 0.0, 0.0])), ReduceStep::Terminal);
    }

    #[test]
    fn unequal_endpoints_keep_remainder() {
        let start = DegreeDistribution::new(
            2,
            vec![rational(1, 5), rational(0, 1), rational(1, 5), rational(0, 1), rational(3, 5)],
        )
        .unwrap();
        let chain = exchangeable_reduce(&start).unwrap();
        for w in chain.steps.windows(2) {
            assert_eq!(w[0].mean(), w[1].mean());
            assert!(w[1].range() < w[0].range());
        }
        // Mean 14/5: k = 2, ε = 4/5.
        let terminal = chain.terminal();
        assert_eq!(terminal.alpha(2), &rational(1, 5));
        assert_eq!(terminal.alpha(3), &rational(4, 5));
    }

    #[test]
    fn f_values_for_d2_l2() {
        let expected = [rational(0, 1), rational(1, 2), rational(5, 6), rational(1, 1), rational(1, 1)];
        for (n, want) in expected.iter().enumerate() {
            assert_eq!(&f_value(2, n, 2), want);
        }
        for n in 0..=4 {
            assert!(f_value(2, n, 0).is_zero());
        }
    }

    #[test]
    fn concavity_and_convexity_hold() {
        for dim in 1..=10 {
            assert!(f_concavity_check(dim), "d = {dim}");
        }
        for dim in 1..=6 {
            assert!(binomial_convexity_check(dim), "d = {dim}");
        }
    }

    #[test]
    fn dirichlet_samples_are_valid() {
        let mut rng = rand::rng();
        for dim in 1..=5 {
            let dd = sample_degree_distribution(dim, 1.0, &mut rng).unwrap();
            assert_eq!(dd.alphas().len(), 2 * dim + 1);
        }
    }
}
