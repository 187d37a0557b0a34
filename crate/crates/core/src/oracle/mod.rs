//! Exhaustive enumeration of one-arm probabilities on tiny balls.
//!
//! Configurations are mixed-radix counters over the per-site supports of the
//! relevant sites, taken in lexicographic ball order. Connectivity is decided
//! by a depth-first search that shares no code with [`crate::exploration`],
//! so the two can be checked against each other.

mod interpolation;

pub use interpolation::{
    conditioned_one_arm, exact_one_arm_interpolated, interpolation_profile, pivotality_case, pivotality_cases,
    verify_interpolation_monotonicity, verify_interpolation_unchecked, InterpolationCounterexample,
    InterpolationProfile, InterpolationSpec, InterpolationVerdict, PivotCase,
};

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exploration::EdgeSemantics;
use crate::lattice::BallIndex;
use crate::law::LocalLaw;
use crate::mask::opposite;
use crate::montecarlo::pool;
use crate::weight::Weight;

pub const DEFAULT_BUDGET: u128 = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    /// Maximum number of weighted configurations.
    pub budget: u128,
    pub workers: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { budget: DEFAULT_BUDGET, workers: 0 }
    }
}

impl OracleOptions {
    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleValue<T> {
    pub value: T,
    pub configurations: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub model: String,
    pub d: usize,
    pub n: u64,
    pub semantics: String,
    pub exact_value: f64,
    /// Exact fraction when computed in rational arithmetic.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_fraction: Option<String>,
    pub configurations_enumerated: u128,
    pub version: String,
}

impl<T: Weight> OracleValue<T> {
    pub fn report(&self, model: &str, d: usize, n: u64, sem: EdgeSemantics) -> OracleReport {
        OracleReport {
            model: model.to_string(),
            d,
            n,
            semantics: sem.to_string(),
            exact_value: self.value.to_f64(),
            exact_fraction: T::EXACT.then(|| self.value.to_string()),
            configurations_enumerated: self.configurations,
            version: crate::VERSION.to_string(),
        }
    }
}

/// The choices of one enumerated slot (a site, or an edge for bond models).
#[derive(Clone, Debug)]
pub(crate) struct Slot<T> {
    pub slot: u32,
    pub states: Vec<u32>,
    pub weights: Vec<T>,
}

impl<T: Weight> Slot<T> {
    pub fn from_law(slot: u32, law: &LocalLaw<T>) -> Self {
        let (states, weights) = law.support().map(|(m, p)| (m.bits(), p.clone())).unzip();
        Slot { slot, states, weights }
    }

    pub fn coin(slot: u32, p: &T) -> Self {
        let mut states = Vec::new();
        let mut weights = Vec::new();
        let q = T::one() - p.clone();
        if q > T::zero() {
            states.push(0);
            weights.push(q);
        }
        if *p > T::zero() {
            states.push(1);
            weights.push(p.clone());
        }
        Slot { slot, states, weights }
    }
}

pub(crate) fn configuration_count<T>(slots: &[Slot<T>]) -> u128 {
    slots.iter().fold(1u128, |acc, s| acc.saturating_mul(s.states.len() as u128))
}

pub(crate) fn check_budget(count: u128, budget: u128) -> Result<()> {
    if count > budget {
        return Err(Error::BudgetExceeded { count, budget });
    }
    Ok(())
}

pub(crate) fn tree_sum<T: Weight>(mut parts: Vec<T>) -> T {
    if parts.is_empty() {
        return T::zero();
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut iter = parts.into_iter();
        while let Some(a) = iter.next() {
            next.push(match iter.next() {
                Some(b) => a + b,
                None => a,
            });
        }
        parts = next;
    }
    parts.pop().expect("nonempty")
}

/// Visits every configuration of `slots`. `visit` receives the state array
/// (indexed by slot id, length `width`), the digit vector and the product
/// weight. Work is split by the first slot's state; one accumulator per
/// leading state is returned in order.
pub(crate) fn for_each_configuration<T, A, I, V>(
    width: usize,
    slots: &[Slot<T>],
    workers: usize,
    init: I,
    visit: V,
) -> Result<Vec<A>>
where
    T: Weight,
    A: Send,
    I: Fn() -> A + Sync,
    V: Fn(&mut A, &[u32], &[usize], &T) + Sync,
{
    if slots.is_empty() {
        let mut acc = init();
        visit(&mut acc, &vec![0; width], &[], &T::one());
        return Ok(vec![acc]);
    }
    if slots.iter().any(|s| s.states.is_empty()) {
        return Ok(Vec::new());
    }
    let m = slots.len();
    let run = |lead: usize| -> A {
        let mut acc = init();
        let mut states = vec![0u32; width];
        let mut digits = vec![0usize; m];
        let mut prefix: Vec<T> = Vec::with_capacity(m);
        digits[0] = lead;
        states[slots[0].slot as usize] = slots[0].states[lead];
        prefix.push(slots[0].weights[lead].clone());
        for j in 1..m {
            states[slots[j].slot as usize] = slots[j].states[0];
            let w = prefix[j - 1].clone() * slots[j].weights[0].clone();
            prefix.push(w);
        }
        'configs: loop {
            visit(&mut acc, &states, &digits, &prefix[m - 1]);
            let mut i = m - 1;
            loop {
                if i == 0 {
                    break 'configs;
                }
                digits[i] += 1;
                if digits[i] < slots[i].states.len() {
                    break;
                }
                digits[i] = 0;
                i -= 1;
            }
            for j in i..m {
                states[slots[j].slot as usize] = slots[j].states[digits[j]];
                prefix[j] = prefix[j - 1].clone() * slots[j].weights[digits[j]].clone();
            }
        }
        acc
    };
    let leads = slots[0].states.len();
    pool(workers)?.install(|| Ok((0..leads).into_par_iter().map(run).collect()))
}

/// Which edges a state array opens.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Rule {
    Directed,
    Union,
    Intersection,
    Site,
    /// States indexed by edge id through the table.
    Bond,
}

/// Search scratch space reused across configurations.
#[derive(Clone, Debug, Default)]
pub(crate) struct Search {
    seen: Vec<bool>,
    stack: Vec<u32>,
}

impl Search {
    pub fn new(len: usize) -> Self {
        Search { seen: vec![false; len], stack: Vec::new() }
    }

    /// Whether an open path joins the origin to a site of norm `n + 1`.
    pub fn one_arm(&mut self, ball: &BallIndex, states: &[u32], rule: Rule, edges: &[u32]) -> bool {
        let origin = ball.origin();
        if rule == Rule::Site && states[origin as usize] == 0 {
            return false;
        }
        let deg = 2 * ball.dim();
        self.seen.iter_mut().for_each(|s| *s = false);
        self.stack.clear();
        self.seen[origin as usize] = true;
        self.stack.push(origin);
        while let Some(u) = self.stack.pop() {
            let mu = states.get(u as usize).copied().unwrap_or(0);
            for dir in 0..deg {
                let v = ball.neighbor(u, dir);
                if self.seen[v as usize] {
                    continue;
                }
                let open = match rule {
                    Rule::Directed => mu >> dir & 1 == 1,
                    Rule::Union => mu >> dir & 1 == 1 || states[v as usize] >> opposite(dir) & 1 == 1,
                    Rule::Intersection => mu >> dir & 1 == 1 && states[v as usize] >> opposite(dir) & 1 == 1,
                    Rule::Site => states[v as usize] == 1,
                    Rule::Bond => states[edges[u as usize * deg + dir] as usize] == 1,
                };
                if open {
                    if ball.is_boundary(v) {
                        return true;
                    }
                    self.seen[v as usize] = true;
                    self.stack.push(v);
                }
            }
        }
        false
    }
}

/// Ids for the undirected edges with an endpoint in `B_n`, laid out as a
/// table over `(inner ordinal, direction)`; boundary rows are unused.
pub(crate) fn edge_table(ball: &BallIndex) -> (Vec<u32>, usize) {
    let deg = 2 * ball.dim();
    let mut table = vec![u32::MAX; ball.len() * deg];
    let mut ids: HashMap<(u32, u32), u32> = HashMap::new();
    for u in ball.inner_ordinals() {
        for dir in 0..deg {
            let v = ball.neighbor(u, dir);
            let key = (u.min(v), u.max(v));
            let next = ids.len() as u32;
            table[u as usize * deg + dir] = *ids.entry(key).or_insert(next);
        }
    }
    let count = ids.len();
    (table, count)
}

fn weighted_event_sum<T: Weight>(
    ball: &BallIndex,
    width: usize,
    slots: &[Slot<T>],
    rule: Rule,
    edges: &[u32],
    opts: &OracleOptions,
) -> Result<OracleValue<T>> {
    let configurations = configuration_count(slots);
    check_budget(configurations, opts.budget)?;
    let parts = for_each_configuration(
        width,
        slots,
        opts.workers,
        || (T::zero(), Search::new(ball.len())),
        |(sum, search), states, _, weight| {
            if search.one_arm(ball, states, rule, edges) {
                *sum = sum.clone() + weight.clone();
            }
        },
    )?;
    Ok(OracleValue { value: tree_sum(parts.into_iter().map(|(s, _)| s).collect()), configurations })
}

pub(crate) fn rule_for(sem: EdgeSemantics) -> Rule {
    match sem {
        EdgeSemantics::Directed => Rule::Directed,
        EdgeSemantics::UnionUndirected => Rule::Union,
        EdgeSemantics::IntersectionBidirectional => Rule::Intersection,
        EdgeSemantics::SiteIid { .. } => Rule::Site,
        EdgeSemantics::BondIid { .. } => Rule::Bond,
    }
}

/// Sites whose choices can affect the one-arm event: `B_n` for directed
/// edges, `B_{n+1}` when boundary sites can open edges into the ball.
pub(crate) fn relevant_sites(ball: &BallIndex, rule: Rule) -> Vec<u32> {
    match rule {
        Rule::Directed => ball.inner_ordinals().collect(),
        _ => (0..ball.len() as u32).collect(),
    }
}

/// Exact `P[o ⇝ ∂B_n]` under the product measure of `law`. For the i.i.d.
/// site and bond semantics the law only supplies the dimension, and the
/// probability in the semantics is read as the decimal it prints as.
pub fn exact_one_arm<T: Weight>(law: &LocalLaw<T>, n: u64, sem: EdgeSemantics, opts: &OracleOptions) -> Result<OracleValue<T>> {
    sem.validate()?;
    match sem {
        EdgeSemantics::SiteIid { p } => exact_site_one_arm(&T::parse_value(&p.to_string())?, law.dim(), n, opts),
        EdgeSemantics::BondIid { p } => exact_bond_one_arm(&T::parse_value(&p.to_string())?, law.dim(), n, opts),
        _ => {
            let ball = BallIndex::new(law.dim(), n)?;
            let rule = rule_for(sem);
            let slots: Vec<Slot<T>> = relevant_sites(&ball, rule).into_iter().map(|s| Slot::from_law(s, law)).collect();
            weighted_event_sum(&ball, ball.len(), &slots, rule, &[], opts)
        }
    }
}

/// I.i.d. site percolation on `B_{n+1}`: the origin, every intermediate site
/// and the terminal boundary site must all be open.
pub fn exact_site_one_arm<T: Weight>(p: &T, dim: usize, n: u64, opts: &OracleOptions) -> Result<OracleValue<T>> {
    check_probability(p)?;
    let ball = BallIndex::new(dim, n)?;
    let slots: Vec<Slot<T>> = (0..ball.len() as u32).map(|s| Slot::coin(s, p)).collect();
    weighted_event_sum(&ball, ball.len(), &slots, Rule::Site, &[], opts)
}

/// I.i.d. undirected bond percolation; each edge with an endpoint in `B_n`
/// is open with probability `p`.
pub fn exact_bond_one_arm<T: Weight>(p: &T, dim: usize, n: u64, opts: &OracleOptions) -> Result<OracleValue<T>> {
    check_probability(p)?;
    let ball = BallIndex::new(dim, n)?;
    let (table, count) = edge_table(&ball);
    let slots: Vec<Slot<T>> = (0..count as u32).map(|e| Slot::coin(e, p)).collect();
    weighted_event_sum(&ball, count, &slots, Rule::Bond, &table, opts)
}

fn check_probability<T: Weight>(p: &T) -> Result<()> {
    if !(*p >= T::zero() && *p <= T::one()) {
        return Err(Error::domain(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// `(directed one-arm under iid(p), undirected bond one-arm at p)`, by two
/// independent enumerations.
pub fn exact_dir_undir_check<T: Weight>(p: &T, dim: usize, n: u64, opts: &OracleOptions) -> Result<(T, T)> {
    let law = LocalLaw::iid(dim, p.clone())?;
    let directed = exact_one_arm(&law, n, EdgeSemantics::Directed, opts)?;
    let bond = exact_bond_one_arm(p, dim, n, opts)?;
    Ok((directed.value, bond.value))
}

/// `(all-or-nothing one-arm at radius n + 1, site one-arm at radius n)`.
pub fn exact_aon_site_check<T: Weight>(p: &T, dim: usize, n: u64, opts: &OracleOptions) -> Result<(T, T)> {
    let law = LocalLaw::all_or_nothing(dim, p.clone())?;
    let aon = exact_one_arm(&law, n + 1, EdgeSemantics::Directed, opts)?;
    let site = exact_site_one_arm(p, dim, n, opts)?;
    Ok((aon.value, site.value))
}
