//! The interpolation family `Q_U`: law `Q` on the sites of `U`, law `P`
//! elsewhere.

use serde::Serialize;

use super::{
    check_budget, configuration_count, for_each_configuration, relevant_sites, rule_for, tree_sum, OracleOptions,
    OracleValue, Rule, Search, Slot,
};
use crate::domination::{check_local_domination, check_pairwise_domination, Mode};
use crate::error::{Error, Result};
use crate::exploration::EdgeSemantics;
use crate::lattice::{BallIndex, LatticePoint};
use crate::law::LocalLaw;
use crate::mask::NeighborMask;
use crate::weight::Weight;

/// Largest `|B_n|` for which all subsets `U` are enumerated.
pub const PROFILE_MAX_SITES: usize = 20;

#[derive(Clone, Debug)]
pub struct InterpolationSpec<T> {
    pub p: LocalLaw<T>,
    pub q: LocalLaw<T>,
    pub u: Vec<LatticePoint>,
    pub n: u64,
}

impl<T: Weight> InterpolationSpec<T> {
    pub fn new(p: LocalLaw<T>, q: LocalLaw<T>, u: Vec<LatticePoint>, n: u64) -> Result<Self> {
        if p.dim() != q.dim() {
            return Err(Error::DimensionMismatch { left: p.dim(), right: q.dim() });
        }
        let dim = p.dim();
        if let Some(bad) = u.iter().find(|x| x.dim() != dim || x.l1_norm() > n) {
            return Err(Error::domain(format!("{bad} is not a site of B_{n}")));
        }
        Ok(InterpolationSpec { p, q, u, n })
    }

    fn in_u(&self, ball: &BallIndex) -> Vec<bool> {
        let mut flags = vec![false; ball.len()];
        for x in &self.u {
            flags[ball.ordinal(x).expect("validated") as usize] = true;
        }
        flags
    }
}

fn law_semantics(sem: EdgeSemantics) -> Result<Rule> {
    match sem {
        EdgeSemantics::SiteIid { .. } | EdgeSemantics::BondIid { .. } => {
            Err(Error::Unsupported(format!("{} semantics do not use a local law", sem.label())))
        }
        _ => Ok(rule_for(sem)),
    }
}

/// Exact one-arm probability under `Q_U`.
pub fn exact_one_arm_interpolated<T: Weight>(
    spec: &InterpolationSpec<T>,
    sem: EdgeSemantics,
    opts: &OracleOptions,
) -> Result<OracleValue<T>> {
    let rule = law_semantics(sem)?;
    let ball = BallIndex::new(spec.p.dim(), spec.n)?;
    let in_u = spec.in_u(&ball);
    let slots: Vec<Slot<T>> = relevant_sites(&ball, rule)
        .into_iter()
        .map(|s| Slot::from_law(s, if in_u[s as usize] { &spec.q } else { &spec.p }))
        .collect();
    let configurations = configuration_count(&slots);
    check_budget(configurations, opts.budget)?;
    let parts = for_each_configuration(
        ball.len(),
        &slots,
        opts.workers,
        || (T::zero(), Search::new(ball.len())),
        |(sum, search), states, _, weight| {
            if search.one_arm(&ball, states, rule, &[]) {
                *sum = sum.clone() + weight.clone();
            }
        },
    )?;
    Ok(OracleValue { value: tree_sum(parts.into_iter().map(|(s, _)| s).collect()), configurations })
}

/// `Q_U[o ⇝ ∂B_n]` for every `U ⊆ B_n`. Bit `i` of the index selects
/// `sites[i]`.
#[derive(Clone, Debug)]
pub struct InterpolationProfile<T> {
    pub sites: Vec<LatticePoint>,
    pub values: Vec<T>,
    pub configurations: u128,
}

impl<T> InterpolationProfile<T> {
    pub fn points(&self, subset: usize) -> Vec<LatticePoint> {
        (0..self.sites.len()).filter(|i| subset >> i & 1 == 1).map(|i| self.sites[i].clone()).collect()
    }
}

/// One enumeration over the union of both supports, reweighted for every `U`.
pub fn interpolation_profile<T: Weight>(
    p: &LocalLaw<T>,
    q: &LocalLaw<T>,
    n: u64,
    sem: EdgeSemantics,
    opts: &OracleOptions,
) -> Result<InterpolationProfile<T>> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch { left: p.dim(), right: q.dim() });
    }
    let rule = law_semantics(sem)?;
    let ball = BallIndex::new(p.dim(), n)?;
    let inner: Vec<u32> = ball.inner_ordinals().collect();
    if inner.len() > PROFILE_MAX_SITES {
        return Err(Error::ResourceGuard(format!(
            "|B_{n}| = {} exceeds {PROFILE_MAX_SITES} sites for subset enumeration",
            inner.len()
        )));
    }
    let k = inner.len();
    // For each slot: P-weights, Q-weights, and the bit of U it answers to.
    let mut slots = Vec::new();
    let mut pq: Vec<(Vec<T>, Vec<T>, Option<usize>)> = Vec::new();
    for s in relevant_sites(&ball, rule) {
        let bit = inner.iter().position(|&o| o == s);
        let masks: Vec<u32> = (0..p.probs().len() as u32)
            .filter(|&m| {
                let m = NeighborMask(m);
                *p.prob(m) > T::zero() || (bit.is_some() && *q.prob(m) > T::zero())
            })
            .collect();
        let pw: Vec<T> = masks.iter().map(|&m| p.prob(NeighborMask(m)).clone()).collect();
        let qw: Vec<T> = masks.iter().map(|&m| q.prob(NeighborMask(m)).clone()).collect();
        slots.push(Slot { slot: s, states: masks, weights: vec![T::one(); pw.len()] });
        pq.push((pw, qw, bit));
    }
    let configurations = configuration_count(&slots);
    check_budget(configurations.saturating_mul(1u128 << k), opts.budget.saturating_mul(1 << 6))?;
    check_budget(configurations, opts.budget)?;
    let subsets = 1usize << k;
    let parts = for_each_configuration(
        ball.len(),
        &slots,
        opts.workers,
        || (vec![T::zero(); subsets], vec![T::zero(); subsets], Search::new(ball.len())),
        |(acc, buf, search), states, digits, _| {
            if !search.one_arm(&ball, states, rule, &[]) {
                return;
            }
            let mut outer = T::one();
            for (j, (pw, _, bit)) in pq.iter().enumerate() {
                if bit.is_none() {
                    outer = outer * pw[digits[j]].clone();
                }
            }
            buf[0] = outer;
            let mut filled = 1usize;
            for (j, (pw, qw, bit)) in pq.iter().enumerate() {
                if let Some(b) = *bit {
                    debug_assert_eq!(filled, 1 << b);
                    let (pv, qv) = (&pw[digits[j]], &qw[digits[j]]);
                    for mask in 0..filled {
                        buf[mask | filled] = buf[mask].clone() * qv.clone();
                        buf[mask] = buf[mask].clone() * pv.clone();
                    }
                    filled <<= 1;
                }
            }
            for (a, b) in acc.iter_mut().zip(buf.iter()) {
                if !b.negligible() || T::EXACT {
                    *a = a.clone() + b.clone();
                }
            }
        },
    )?;
    let mut values = vec![T::zero(); subsets];
    let parts: Vec<Vec<T>> = parts.into_iter().map(|(acc, _, _)| acc).collect();
    for (u, value) in values.iter_mut().enumerate() {
        *value = tree_sum(parts.iter().map(|part| part[u].clone()).collect());
    }
    Ok(InterpolationProfile { sites: inner.iter().map(|&o| ball.point(o)).collect(), values, configurations })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterpolationCounterexample {
    pub u: Vec<LatticePoint>,
    pub a: LatticePoint,
    pub without_a: f64,
    pub with_a: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterpolationVerdict {
    pub holds: bool,
    pub d: usize,
    pub n: u64,
    pub semantics: String,
    /// `(U, a)` pairs compared, `a ∈ U` included.
    pub pairs_checked: u64,
    pub equalities: u64,
    pub violations: u64,
    /// `Q_∅[o ⇝ ∂B_n]`, i.e. the value under `P`.
    pub p_value: f64,
    /// `Q_{B_n}[o ⇝ ∂B_n]`, i.e. the value under `Q`.
    pub q_value: f64,
    pub configurations_enumerated: u128,
    pub first_violation: Option<InterpolationCounterexample>,
}

/// Checks `Q_U ≤ Q_{U ∪ {a}}` for every `U ⊆ B_n` and `a ∈ B_n`. The local
/// hypothesis is checked first: single-set domination over proper masks for
/// directed edges, the disjoint-pair condition for intersection edges.
pub fn verify_interpolation_monotonicity<T: Weight>(
    p: &LocalLaw<T>,
    q: &LocalLaw<T>,
    n: u64,
    sem: EdgeSemantics,
    tol: &T,
    opts: &OracleOptions,
) -> Result<InterpolationVerdict> {
    let hyp_tol = if T::EXACT { T::zero() } else { T::parse_value("1e-9")? };
    match sem {
        EdgeSemantics::Directed => {
            let report = check_local_domination(p, q, Mode::Weak, &hyp_tol)?;
            if !report.holds {
                return Err(Error::Precondition(format!(
                    "the local comparison hypothesis fails: P hits {} more often than Q",
                    report.violation_masks().iter().map(|m| m.to_string()).collect::<Vec<_>>().join(", ")
                )));
            }
        }
        EdgeSemantics::IntersectionBidirectional => {
            let report = check_pairwise_domination(p, q, &hyp_tol)?;
            if !report.holds {
                return Err(Error::Precondition(format!(
                    "the pairwise comparison hypothesis fails on {} disjoint pairs",
                    report.violations.len()
                )));
            }
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "no local comparison hypothesis is available for {} semantics",
                sem.label()
            )))
        }
    }
    verify_interpolation_unchecked(p, q, n, sem, tol, opts)
}

/// As [`verify_interpolation_monotonicity`] without the hypothesis check.
pub fn verify_interpolation_unchecked<T: Weight>(
    p: &LocalLaw<T>,
    q: &LocalLaw<T>,
    n: u64,
    sem: EdgeSemantics,
    tol: &T,
    opts: &OracleOptions,
) -> Result<InterpolationVerdict> {
    let profile = interpolation_profile(p, q, n, sem, opts)?;
    let k = profile.sites.len();
    let full = (1usize << k) - 1;
    let mut verdict = InterpolationVerdict {
        holds: true,
        d: p.dim(),
        n,
        semantics: sem.to_string(),
        pairs_checked: 0,
        equalities: 0,
        violations: 0,
        p_value: profile.values[0].to_f64(),
        q_value: profile.values[full].to_f64(),
        configurations_enumerated: profile.configurations,
        first_violation: None,
    };
    for u in 0..=full {
        for a in 0..k {
            let (lhs, rhs) = (&profile.values[u], &profile.values[u | 1 << a]);
            verdict.pairs_checked += 1;
            if lhs.abs_diff(rhs) <= *tol {
                verdict.equalities += 1;
            } else if lhs > rhs {
                verdict.violations += 1;
                if verdict.first_violation.is_none() {
                    verdict.first_violation = Some(InterpolationCounterexample {
                        u: profile.points(u),
                        a: profile.sites[a].clone(),
                        without_a: lhs.to_f64(),
                        with_a: rhs.to_f64(),
                    });
                }
            }
        }
    }
    verdict.holds = verdict.violations == 0;
    Ok(verdict)
}

/// Classification of a site `a` given every other site's choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "case", content = "mask")]
pub enum PivotCase {
    /// The event holds whatever `N(a)` is.
    ConnectedWithoutA,
    /// The event fails even with `N(a)` full.
    BlockedEvenIfFull,
    /// The event holds iff `N(a) ∩ A ≠ ∅`.
    Pivotal(NeighborMask),
}

/// Directed-edge classification on a configuration indexed by ball ordinal.
/// The entry at `a` is ignored.
pub fn pivotality_case(ball: &BallIndex, masks: &[u32], a: u32) -> PivotCase {
    let mut states = masks.to_vec();
    let mut search = Search::new(ball.len());
    let mut event = |mask: u32, states: &mut Vec<u32>| {
        states[a as usize] = mask;
        search.one_arm(ball, states, Rule::Directed, &[])
    };
    if event(0, &mut states) {
        return PivotCase::ConnectedWithoutA;
    }
    let deg = 2 * ball.dim();
    if !event(NeighborMask::full(ball.dim()).bits(), &mut states) {
        return PivotCase::BlockedEvenIfFull;
    }
    // The event is monotone in N(a), and a simple path leaves a at most once.
    let pivot = NeighborMask::from_directions((0..deg).filter(|&dir| event(1 << dir, &mut states)));
    PivotCase::Pivotal(pivot)
}

/// [`pivotality_case`] for a configuration given as one mask per site of
/// `B_{n+1}` in lexicographic order.
pub fn pivotality_cases(ball: &BallIndex, config: &[NeighborMask], a: &LatticePoint) -> Result<PivotCase> {
    if config.len() != ball.len() {
        return Err(Error::domain(format!("configuration has {} sites, ball has {}", config.len(), ball.len())));
    }
    let ord = ball
        .ordinal(a)
        .filter(|&o| !ball.is_boundary(o))
        .ok_or_else(|| Error::domain(format!("{a} is not a site of B_{}", ball.radius())))?;
    let masks: Vec<u32> = config.iter().map(|m| m.bits()).collect();
    Ok(pivotality_case(ball, &masks, ord))
}

/// `Q_U[o ⇝ ∂B_n]` recomputed by conditioning on every site except `a` and
/// classifying `a` (directed edges).
pub fn conditioned_one_arm<T: Weight>(spec: &InterpolationSpec<T>, a: &LatticePoint, opts: &OracleOptions) -> Result<T> {
    let ball = BallIndex::new(spec.p.dim(), spec.n)?;
    let a_ord = ball
        .ordinal(a)
        .filter(|&o| !ball.is_boundary(o))
        .ok_or_else(|| Error::domain(format!("{a} is not a site of B_{}", spec.n)))?;
    let in_u = spec.in_u(&ball);
    let slots: Vec<Slot<T>> = ball
        .inner_ordinals()
        .filter(|&s| s != a_ord)
        .map(|s| Slot::from_law(s, if in_u[s as usize] { &spec.q } else { &spec.p }))
        .collect();
    check_budget(configuration_count(&slots), opts.budget)?;
    let profile_a = if in_u[a_ord as usize] { spec.q.hitting_profile() } else { spec.p.hitting_profile() };
    let parts = for_each_configuration(ball.len(), &slots, opts.workers, T::zero, |sum, states, _, weight| {
        let conditional = match pivotality_case(&ball, states, a_ord) {
            PivotCase::ConnectedWithoutA => T::one(),
            PivotCase::BlockedEvenIfFull => T::zero(),
            PivotCase::Pivotal(mask) => profile_a.hit(mask).clone(),
        };
        *sum = sum.clone() + weight.clone() * conditional;
    })?;
    Ok(tree_sum(parts))
}
