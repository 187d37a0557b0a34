//! Stochastic domination on the subset lattice, decided by max-flow.
//!
//! `P ≤_st Q` iff there is a coupling with `S ⊆ T` almost surely, i.e. iff
//! the bipartite network `source → S (cap P[S]) → T for S ⊆ T (cap ∞) →
//! sink (cap Q[T])` carries a flow of value one. When it does not, the
//! source side of a minimum cut yields an up-set `U` with `P[U] > Q[U]`.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::law::LocalLaw;
use crate::mask::NeighborMask;
use crate::weight::Weight;

/// Largest dimension for which the flow network is built (4096 arcs per side at d = 3).
pub const STOCHASTIC_MAX_DIM: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UpSetWitness {
    pub masks: Vec<u32>,
    pub p_mass: f64,
    pub q_mass: f64,
}

impl UpSetWitness {
    pub fn contains(&self, mask: NeighborMask) -> bool {
        self.masks.binary_search(&mask.bits()).is_ok()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StochasticVerdict {
    pub dominated: bool,
    pub flow: f64,
    pub witness: Option<UpSetWitness>,
}

struct Arc<T> {
    to: usize,
    cap: T,
}

/// Dinic's algorithm over an arbitrary [`Weight`].
pub(crate) struct FlowNetwork<T> {
    arcs: Vec<Arc<T>>,
    adjacency: Vec<Vec<usize>>,
}

impl<T: Weight> FlowNetwork<T> {
    pub(crate) fn new(nodes: usize) -> Self {
        FlowNetwork { arcs: Vec::new(), adjacency: vec![Vec::new(); nodes] }
    }

    pub(crate) fn add_arc(&mut self, from: usize, to: usize, cap: T) {
        self.adjacency[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap });
        self.adjacency[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, cap: T::zero() });
    }

    fn open(&self, arc: usize) -> bool {
        let cap = &self.arcs[arc].cap;
        *cap > T::zero() && !cap.negligible()
    }

    fn levels(&self, source: usize) -> Vec<usize> {
        let mut level = vec![usize::MAX; self.adjacency.len()];
        level[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &arc in &self.adjacency[u] {
                let v = self.arcs[arc].to;
                if level[v] == usize::MAX && self.open(arc) {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level
    }

    fn augment(&mut self, u: usize, sink: usize, limit: T, level: &[usize], next: &mut [usize]) -> T {
        if u == sink {
            return limit;
        }
        while next[u] < self.adjacency[u].len() {
            let arc = self.adjacency[u][next[u]];
            let v = self.arcs[arc].to;
            if self.open(arc) && level[v] == level[u] + 1 {
                let cap = self.arcs[arc].cap.clone();
                let bound = if cap < limit { cap } else { limit.clone() };
                let pushed = self.augment(v, sink, bound, level, next);
                if pushed > T::zero() {
                    self.arcs[arc].cap = self.arcs[arc].cap.clone() - pushed.clone();
                    self.arcs[arc ^ 1].cap = self.arcs[arc ^ 1].cap.clone() + pushed.clone();
                    return pushed;
                }
            }
            next[u] += 1;
        }
        T::zero()
    }

    pub(crate) fn max_flow(&mut self, source: usize, sink: usize, unbounded: T) -> T {
        let mut total = T::zero();
        loop {
            let level = self.levels(source);
            if level[sink] == usize::MAX {
                return total;
            }
            let mut next = vec![0; self.adjacency.len()];
            loop {
                let pushed = self.augment(source, sink, unbounded.clone(), &level, &mut next);
                if pushed <= T::zero() {
                    break;
                }
                total = total + pushed;
            }
        }
    }

    /// Nodes reachable from `source` in the residual network.
    pub(crate) fn residual_reachable(&self, source: usize) -> Vec<bool> {
        let level = self.levels(source);
        level.iter().map(|&l| l != usize::MAX).collect()
    }
}

/// Decides whether `p` is stochastically dominated by `q` on the subset lattice.
///
/// `tol` is the slack allowed on the flow value (use zero for exact weights).
pub fn check_stochastic_domination<T: Weight>(
    p: &LocalLaw<T>,
    q: &LocalLaw<T>,
    tol: &T,
) -> Result<StochasticVerdict> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch { left: p.dim(), right: q.dim() });
    }
    let dim = p.dim();
    if dim > STOCHASTIC_MAX_DIM {
        return Err(Error::Unsupported(format!(
            "stochastic domination check limited to d <= {STOCHASTIC_MAX_DIM}, got {dim}"
        )));
    }
    let size = 1usize << (2 * dim);
    let source = 2 * size;
    let sink = source + 1;
    let unbounded = T::from_u64(2);
    let mut net = FlowNetwork::new(2 * size + 2);
    for s in 0..size {
        if *p.prob(NeighborMask(s as u32)) > T::zero() {
            net.add_arc(source, s, p.probs()[s].clone());
        }
        if *q.prob(NeighborMask(s as u32)) > T::zero() {
            net.add_arc(size + s, sink, q.probs()[s].clone());
        }
    }
    for s in 0..size {
        if *p.prob(NeighborMask(s as u32)) <= T::zero() {
            continue;
        }
        // Every superset T of S.
        let free = !s & (size - 1);
        let mut extra = free;
        loop {
            net.add_arc(s, size + (s | extra), unbounded.clone());
            if extra == 0 {
                break;
            }
            extra = (extra - 1) & free;
        }
    }
    let flow = net.max_flow(source, sink, unbounded);
    let total = T::total(p.probs());
    let dominated = flow.clone() + tol.clone() >= total;
    let witness = if dominated {
        None
    } else {
        let reachable = net.residual_reachable(source);
        let mut in_upset = vec![false; size];
        for s in (0..size).filter(|&s| reachable[s]) {
            let free = !s & (size - 1);
            let mut extra = free;
            loop {
                in_upset[s | extra] = true;
                if extra == 0 {
                    break;
                }
                extra = (extra - 1) & free;
            }
        }
        let masks: Vec<u32> = (0..size as u32).filter(|&m| in_upset[m as usize]).collect();
        let mass = |law: &LocalLaw<T>| {
            T::total(masks.iter().map(|&m| law.prob(NeighborMask(m)))).to_f64()
        };
        Some(UpSetWitness { p_mass: mass(p), q_mass: mass(q), masks })
    };
    Ok(StochasticVerdict { dominated, flow: flow.to_f64(), witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::all_masks;
    use crate::weight::{rational, Rational};
    use num_traits::Zero;

    #[test]
    fn iid_vs_dng_fails_with_size_three_upset() {
        let p = LocalLaw::iid(2, rational(1, 2)).unwrap();
        let q = LocalLaw::dng(2, rational(1, 2)).unwrap();
        let verdict = check_stochastic_domination(&p, &q, &Rational::zero()).unwrap();
        assert!(!verdict.dominated);
        let witness = verdict.witness.unwrap();
        let expected: Vec<u32> = all_masks(2).filter(|m| m.len() >= 3).map(|m| m.bits()).collect();
        assert_eq!(witness.masks, expected);
        assert!((witness.p_mass - 5.0 / 16.0).abs() < 1e-15);
        assert_eq!(witness.q_mass, 0.0);
    }

    #[test]
    fn dng_vs_iid_fails_too() {
        let p = LocalLaw::dng(2, rational(1, 2)).unwrap();
        let q = LocalLaw::iid(2, rational(1, 2)).unwrap();
        let verdict = check_stochastic_domination(&p, &q, &Rational::zero()).unwrap();
        assert!(!verdict.dominated);
        let witness = verdict.witness.unwrap();
        assert!(witness.p_mass > witness.q_mass);
        // {S : |S| >= 1} is a witness as well (1 > 15/16).
        let nonempty: Rational = all_masks(2).skip(1).map(|m| p.prob(m).clone()).sum();
        let nonempty_q: Rational = all_masks(2).skip(1).map(|m| q.prob(m).clone()).sum();
        assert!(nonempty > nonempty_q);
    }

    #[test]
    fn monotone_iid_pair_dominated() {
        let p = LocalLaw::iid(2, 0.3).unwrap();
        let q = LocalLaw::iid(2, 0.5).unwrap();
        let verdict = check_stochastic_domination(&p, &q, &1e-9).unwrap();
        assert!(verdict.dominated);
        assert!(verdict.witness.is_none());
        let exact = check_stochastic_domination(
            &LocalLaw::iid(2, rational(3, 10)).unwrap(),
            &LocalLaw::iid(2, rational(1, 2)).unwrap(),
            &Rational::zero(),
        )
        .unwrap();
        assert!(exact.dominated);
    }

    #[test]
    fn dimension_guard() {
        let p = LocalLaw::iid(4, 0.5).unwrap();
        assert!(matches!(
            check_stochastic_domination(&p, &p, &1e-9),
            Err(Error::Unsupported(_))
        ));
    }
}
