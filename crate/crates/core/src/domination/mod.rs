//! Checks of the local comparison conditions between two local laws.
//!
//! * [`check_local_domination`]: `P[N(o) ∩ A != ∅] <= Q[N(o) ∩ A != ∅]` for
//!   every `∅ ⊊ A ⊊ N_o` (weak), or `<` (strict).
//! * [`check_pairwise_domination`]: the same for the joint event of hitting
//!   two disjoint nonempty sets, which governs bidirectional models.
//! * [`flow::check_stochastic_domination`]: monotone coupling via max-flow.
//!
//! With `f64` weights, comparisons use the tolerance passed in; with
//! [`Rational`](crate::weight::Rational) weights pass a zero tolerance for a
//! certified verdict.

pub mod exchangeable;
pub mod flow;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::law::LocalLaw;
use crate::mask::{all_masks, NeighborMask};
use crate::weight::Weight;

pub use exchangeable::{
    binomial_convexity_check, exchangeable_reduce, exchangeable_reduce_step, f_concavity_check,
    ReduceStep, ReductionChain,
};
pub use flow::{check_stochastic_domination, StochasticVerdict, UpSetWitness};

/// Default tolerance for float inequality checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest dimension accepted by the pairwise check.
pub const PAIRWISE_MAX_DIM: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Weak,
    Strict,
}

/// Which sets `A` the comparison ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MaskRange {
    /// `∅ ⊊ A ⊊ N_o`, the local-to-global hypothesis.
    Proper,
    /// Every `A ⊆ N_o`, as in the exchangeable sandwich.
    All,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaskLabel {
    pub mask: u32,
    pub directions: Vec<String>,
}

impl From<NeighborMask> for MaskLabel {
    fn from(mask: NeighborMask) -> Self {
        MaskLabel { mask: mask.bits(), directions: mask.names() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaskComparison {
    #[serde(flatten)]
    pub mask: MaskLabel,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominationReport {
    pub holds: bool,
    pub strict: bool,
    pub mode: Mode,
    pub range: MaskRange,
    pub exact: bool,
    pub masks_checked: usize,
    pub violations: Vec<MaskComparison>,
    pub equalities: Vec<MaskLabel>,
}

impl DominationReport {
    pub fn equality_masks(&self) -> Vec<NeighborMask> {
        self.equalities.iter().map(|l| NeighborMask(l.mask)).collect()
    }

    pub fn violation_masks(&self) -> Vec<NeighborMask> {
        self.violations.iter().map(|v| NeighborMask(v.mask.mask)).collect()
    }
}

fn same_dim<T>(p: &LocalLaw<T>, q: &LocalLaw<T>) -> Result<()>
where
    T: Weight,
{
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch { left: p.dim(), right: q.dim() });
    }
    Ok(())
}

/// Compares hitting probabilities of `p` and `q` over proper nonempty masks.
pub fn check_local_domination<T: Weight>(
    p: &LocalLaw<T>,
    q: &LocalLaw<T>,
    mode: Mode,
    tol: &T,
) -> Result<DominationReport> {
    check_local_domination_over(p, q, mode, tol, MaskRange::Proper)
}

pub fn check_local_domination_over<T: Weight>(
    p: &LocalLaw<T>,
    q: &LocalLaw<T>,
    mode: Mode,
    tol: &T,
    range: MaskRange,
) -> Result<DominationReport> {
    same_dim(p, q)?;
    let dim = p.dim();
    let hp = p.hitting_profile();
    let hq = q.hitting_profile();
    let full = NeighborMask::full(dim);

    let mut violations = Vec::new();
    let mut equalities = Vec::new();
    let mut masks_checked = 0;
    for a in all_masks(dim) {
        if range == MaskRange::Proper && (a.is_empty() || a == full) {
            continue;
        }
        masks_checked += 1;
        let lhs = hp.hit(a);
        let rhs = hq.hit(a);
        let above = *lhs > rhs.clone() + tol.clone();
        let tied = !above && lhs.clone() + tol.clone() >= *rhs;
        let violated = above || (mode == Mode::Strict && tied);
        if violated {
            violations.push(MaskComparison { mask: a.into(), lhs: lhs.to_f64(), rhs: rhs.to_f64() });
        } else if tied {
            equalities.push(a.into());
        }
    }
    let holds = violations.is_empty();
    Ok(DominationReport {
        holds,
        strict: holds && equalities.is_empty(),
        mode,
        range,
        exact: T::EXACT,
        masks_checked,
        violations,
        equalities,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairViolation {
    pub a: MaskLabel,
    pub b: MaskLabel,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairwiseReport {
    pub holds: bool,
    pub exact: bool,
    pub pairs_checked: usize,
    pub equalities: usize,
    pub violations: Vec<PairViolation>,
}

/// Unordered pairs of disjoint nonempty masks `(A, B)` with `A < B`.
pub fn disjoint_pairs(dim: usize) -> impl Iterator<Item = (NeighborMask, NeighborMask)> {
    let full = NeighborMask::full(dim).bits();
    (1..=full).flat_map(move |a| {
        let rest = full & !a;
        // Enumerate nonempty submasks of the complement.
        let mut sub = rest;
        std::iter::from_fn(move || {
            while sub != 0 {
                let b = sub;
                sub = (sub - 1) & rest;
                if b > a {
                    return Some((NeighborMask(a), NeighborMask(b)));
                }
            }
            None
        })
    })
}

/// Compares joint hitting probabilities of two disjoint nonempty sets.
pub fn check_pairwise_domination<T: Weight>(
    p: &LocalLaw<T>,
    q: &LocalLaw<T>,
    tol: &T,
) -> Result<PairwiseReport> {
    same_dim(p, q)?;
    let dim = p.dim();
    if dim > PAIRWISE_MAX_DIM {
        return Err(Error::ResourceGuard(format!(
            "pairwise check limited to d <= {PAIRWISE_MAX_DIM}, got {dim}"
        )));
    }
    let hp = p.hitting_profile();
    let hq = q.hitting_profile();
    let mut violations = Vec::new();
    let mut pairs_checked = 0;
    let mut equalities = 0;
    for (a, b) in disjoint_pairs(dim) {
        pairs_checked += 1;
        let lhs = hp.joint_hit(a, b);
        let rhs = hq.joint_hit(a, b);
        if lhs > rhs.clone() + tol.clone() {
            violations.push(PairViolation {
                a: a.into(),
                b: b.into(),
                lhs: lhs.to_f64(),
                rhs: rhs.to_f64(),
            });
        } else if lhs.clone() + tol.clone() >= rhs {
            equalities += 1;
        }
    }
    Ok(PairwiseReport {
        holds: violations.is_empty(),
        exact: T::EXACT,
        pairs_checked,
        equalities,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::{rational, Rational};
    use num_traits::Zero;

    fn zero() -> Rational {
        Rational::zero()
    }

    #[test]
    fn iid_below_dng_with_singleton_ties() {
        let p = LocalLaw::iid(2, rational(1, 2)).unwrap();
        let q = LocalLaw::dng(2, rational(1, 2)).unwrap();
        let report = check_local_domination(&p, &q, Mode::Weak, &zero()).unwrap();
        assert!(report.holds);
        assert!(!report.strict);
        assert_eq!(report.masks_checked, 14);
        let ties = report.equality_masks();
        assert_eq!(ties.len(), 4);
        assert!(ties.iter().all(|m| m.len() == 1));

        let strict = check_local_domination(&p, &q, Mode::Strict, &zero()).unwrap();
        assert!(!strict.holds);
        assert_eq!(strict.violations.len(), 4);
    }

    #[test]
    fn aon_below_iid() {
        let p = LocalLaw::all_or_nothing(2, 0.5).unwrap();
        let q = LocalLaw::iid(2, 0.5).unwrap();
        assert!(check_local_domination(&p, &q, Mode::Weak, &DEFAULT_TOL).unwrap().holds);
    }

    #[test]
    fn dng_not_below_iid() {
        let p = LocalLaw::dng(2, rational(1, 2)).unwrap();
        let q = LocalLaw::iid(2, rational(1, 2)).unwrap();
        let report = check_local_domination(&p, &q, Mode::Weak, &zero()).unwrap();
        assert!(!report.holds);
        let mut sizes: Vec<usize> = report.violation_masks().iter().map(|m| m.len()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![2, 2, 2, 2, 2, 2, 3, 3, 3, 3]);
    }

    #[test]
    fn dimension_mismatch() {
        let p = LocalLaw::iid(1, 0.5).unwrap();
        let q = LocalLaw::iid(2, 0.5).unwrap();
        assert!(matches!(
            check_local_domination(&p, &q, Mode::Weak, &DEFAULT_TOL),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(check_pairwise_domination(&p, &q, &DEFAULT_TOL).is_err());
    }

    #[test]
    fn disjoint_pair_count() {
        for dim in 1..=3 {
            let m = 2 * dim as u32;
            let expected = (3usize.pow(m) - 2 * 2usize.pow(m) + 1) / 2;
            let pairs: Vec<_> = disjoint_pairs(dim).collect();
            assert_eq!(pairs.len(), expected);
            assert!(pairs.iter().all(|(a, b)| !a.is_empty() && !b.is_empty() && a.is_disjoint(*b)));
        }
    }

    #[test]
    fn pairwise_examples() {
        let p = LocalLaw::iid(2, rational(1, 4)).unwrap();
        let q = LocalLaw::dng(2, rational(1, 2)).unwrap();
        let report = check_pairwise_domination(&p, &q, &zero()).unwrap();
        assert!(report.holds);

        let hp = p.hitting_profile();
        let hq = q.hitting_profile();
        let a = NeighborMask::single(0);
        let b = NeighborMask::single(1);
        assert_eq!(hp.joint_hit(a, b), rational(1, 16));
        assert_eq!(hq.joint_hit(a, b), rational(1, 6));

        let reflexive = check_pairwise_domination(&q, &q, &zero()).unwrap();
        assert!(reflexive.holds);
        assert_eq!(reflexive.equalities, reflexive.pairs_checked);
    }

    #[test]
    fn pairwise_guard() {
        let p = LocalLaw::iid(7, 0.5).unwrap();
        assert!(matches!(
            check_pairwise_domination(&p, &p, &DEFAULT_TOL),
            Err(Error::ResourceGuard(_))
        ));
    }
}
