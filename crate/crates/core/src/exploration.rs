//! Breadth-first exploration of the origin's cluster inside `B_{n+1}`.
//!
//! Generations follow `C_k = ∪_{u ∈ C_{k-1}} {admissible neighbors of u} \
//! (C_0 ∪ … ∪ C_{k-1})`, stopping as soon as a site of `∂B_n` is reached or a
//! generation comes out empty. Each site's `N(u)` is sampled at most once,
//! on first touch, from a counter-based stream keyed by its ordinal.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::BallIndex;
use crate::law::LocalLaw;
use crate::mask::opposite;
use crate::rng::StreamKey;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum EdgeSemantics {
    /// `u → v` open iff `v ∈ N(u)`.
    Directed,
    /// `{u, v}` open iff `v ∈ N(u)` or `u ∈ N(v)`.
    UnionUndirected,
    /// `{u, v}` open iff `v ∈ N(u)` and `u ∈ N(v)`.
    IntersectionBidirectional,
    /// I.i.d. site percolation; every site on the path, the origin and the
    /// terminal boundary site included, must be open. Ignores the local law.
    SiteIid { p: f64 },
    /// I.i.d. undirected bond percolation. Ignores the local law.
    BondIid { p: f64 },
}

impl EdgeSemantics {
    pub fn label(&self) -> &'static str {
        match self {
            EdgeSemantics::Directed => "directed",
            EdgeSemantics::UnionUndirected => "union",
            EdgeSemantics::IntersectionBidirectional => "intersection",
            EdgeSemantics::SiteIid { .. } => "site",
            EdgeSemantics::BondIid { .. } => "bond",
        }
    }

    /// Whether the local law drives the model.
    pub fn uses_law(&self) -> bool {
        !matches!(self, EdgeSemantics::SiteIid { .. } | EdgeSemantics::BondIid { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            EdgeSemantics::SiteIid { p } | EdgeSemantics::BondIid { p } if !(0.0..=1.0).contains(&p) => {
                Err(Error::domain(format!("{} probability {p} outside [0, 1]", self.label())))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for EdgeSemantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeSemantics::SiteIid { p } | EdgeSemantics::BondIid { p } => {
                write!(f, "{}:{p}", self.label())
            }
            _ => f.write_str(self.label()),
        }
    }
}

impl FromStr for EdgeSemantics {
    type Err = Error;

    /// `directed`, `union`, `intersection`, `site:<p>`, `bond:<p>`.
    fn from_str(text: &str) -> Result<Self> {
        let (name, param) = match text.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (text.trim(), None),
        };
        let prob = || -> Result<f64> {
            let raw = param.ok_or_else(|| Error::Parse(format!("{name} semantics needs `{name}:<p>`")))?;
            raw.parse().map_err(|_| Error::Parse(format!("bad probability {raw:?}")))
        };
        let sem = match name {
            "directed" | "dng" => EdgeSemantics::Directed,
            "union" | "undirected" | "ung" => EdgeSemantics::UnionUndirected,
            "intersection" | "bidirectional" | "bng" => EdgeSemantics::IntersectionBidirectional,
            "site" => EdgeSemantics::SiteIid { p: prob()? },
            "bond" => EdgeSemantics::BondIid { p: prob()? },
            other => return Err(Error::Parse(format!("unknown semantics {other:?}"))),
        };
        sem.validate()?;
        Ok(sem)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExplorationResult {
    pub reached_boundary: bool,
    /// Index of the generation that hit `∂B_n`, or of the last nonempty one.
    pub generations_used: u32,
    /// Sites of the explored cluster at the moment of stopping.
    pub cluster_size: u32,
    /// Site laws (or bond/site coins) revealed.
    pub sites_sampled: u32,
}

/// Inverse-CDF sampler over the support of a local law.
#[derive(Clone, Debug)]
pub struct MaskSampler {
    masks: Vec<u32>,
    cumulative: Vec<f64>,
}

impl MaskSampler {
    pub fn new(law: &LocalLaw<f64>) -> Self {
        let mut masks = Vec::new();
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        for (mask, &p) in law.support() {
            acc += p;
            masks.push(mask.bits());
            cumulative.push(acc);
        }
        MaskSampler { masks, cumulative }
    }

    #[inline]
    pub fn sample(&self, u: f64) -> u32 {
        let i = self.cumulative.partition_point(|&c| c <= u);
        self.masks[i.min(self.masks.len() - 1)]
    }
}

/// Order in which each generation's frontier is scanned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FrontierOrder {
    #[default]
    Forward,
    Reverse,
}

/// Reusable exploration buffers for one ball and one model.
pub struct Explorer<'a> {
    ball: &'a BallIndex,
    sampler: MaskSampler,
    sem: EdgeSemantics,
    order: FrontierOrder,
    masks: Vec<u32>,
    sampled_at: Vec<u32>,
    visited_at: Vec<u32>,
    epoch: u32,
    frontier: Vec<u32>,
    next: Vec<u32>,
    sampled: u32,
}

impl<'a> Explorer<'a> {
    pub fn new(law: &LocalLaw<f64>, ball: &'a BallIndex, sem: EdgeSemantics) -> Result<Self> {
        if law.dim() != ball.dim() {
            return Err(Error::DimensionMismatch { left: law.dim(), right: ball.dim() });
        }
        sem.validate()?;
        let len = ball.len();
        Ok(Explorer {
            ball,
            sampler: MaskSampler::new(law),
            sem,
            order: FrontierOrder::Forward,
            masks: vec![0; len],
            sampled_at: vec![0; len],
            visited_at: vec![0; len],
            epoch: 0,
            frontier: Vec::new(),
            next: Vec::new(),
            sampled: 0,
        })
    }

    pub fn with_order(mut self, order: FrontierOrder) -> Self {
        self.order = order;
        self
    }

    /// `N(site)` as a bitmask, or for site percolation 1/0 for open/closed.
    #[inline]
    fn site_state(&mut self, site: u32, key: StreamKey) -> u32 {
        let s = site as usize;
        if self.sampled_at[s] != self.epoch {
            self.sampled_at[s] = self.epoch;
            self.sampled += 1;
            let u = key.uniform(2 * site as u64);
            self.masks[s] = match self.sem {
                EdgeSemantics::SiteIid { p } => (u < p) as u32,
                _ => self.sampler.sample(u),
            };
        }
        self.masks[s]
    }

    #[inline]
    fn bond_open(&mut self, u: u32, v: u32, dir: usize, p: f64, key: StreamKey) -> bool {
        let (low, dir) = if u < v { (u, dir) } else { (v, opposite(dir)) };
        let edge = low as u64 * 2 * self.ball.dim() as u64 + dir as u64;
        self.sampled += 1;
        key.uniform(2 * edge + 1) < p
    }

    #[inline]
    fn admissible(&mut self, u: u32, v: u32, dir: usize, key: StreamKey) -> bool {
        match self.sem {
            EdgeSemantics::Directed => self.site_state(u, key) >> dir & 1 == 1,
            EdgeSemantics::UnionUndirected => {
                self.site_state(u, key) >> dir & 1 == 1
                    || self.site_state(v, key) >> opposite(dir) & 1 == 1
            }
            EdgeSemantics::IntersectionBidirectional => {
                self.site_state(u, key) >> dir & 1 == 1
                    && self.site_state(v, key) >> opposite(dir) & 1 == 1
            }
            EdgeSemantics::SiteIid { .. } => self.site_state(v, key) == 1,
            EdgeSemantics::BondIid { p } => self.bond_open(u, v, dir, p, key),
        }
    }

    fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.sampled_at.iter_mut().for_each(|e| *e = 0);
            self.visited_at.iter_mut().for_each(|e| *e = 0);
            self.epoch = 1;
        }
    }

    /// One exploration driven by the stream `key`.
    pub fn run(&mut self, key: StreamKey) -> ExplorationResult {
        self.next_epoch();
        self.sampled = 0;
        let ball = self.ball;
        let origin = ball.origin();
        let directions = 2 * ball.dim();

        if matches!(self.sem, EdgeSemantics::SiteIid { .. }) && self.site_state(origin, key) == 0 {
            return ExplorationResult {
                reached_boundary: false,
                generations_used: 0,
                cluster_size: 0,
                sites_sampled: self.sampled,
            };
        }

        self.visited_at[origin as usize] = self.epoch;
        let mut cluster = 1u32;
        let mut frontier = std::mem::take(&mut self.frontier);
        let mut next = std::mem::take(&mut self.next);
        frontier.clear();
        frontier.push(origin);
        let mut generation = 0u32;
        let mut reached = false;

        'generations: while !frontier.is_empty() {
            next.clear();
            let candidate = generation + 1;
            for idx in 0..frontier.len() {
                let u = match self.order {
                    FrontierOrder::Forward => frontier[idx],
                    FrontierOrder::Reverse => frontier[frontier.len() - 1 - idx],
                };
                for step in 0..directions {
                    let dir = match self.order {
                        FrontierOrder::Forward => step,
                        FrontierOrder::Reverse => directions - 1 - step,
                    };
                    let v = ball.neighbor(u, dir);
                    if self.visited_at[v as usize] == self.epoch {
                        continue;
                    }
                    if self.admissible(u, v, dir, key) {
                        self.visited_at[v as usize] = self.epoch;
                        cluster += 1;
                        if ball.is_boundary(v) {
                            generation = candidate;
                            reached = true;
                            break 'generations;
                        }
                        next.push(v);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            generation = candidate;
            std::mem::swap(&mut frontier, &mut next);
        }

        self.frontier = frontier;
        self.next = next;
        ExplorationResult {
            reached_boundary: reached,
            generations_used: generation,
            cluster_size: cluster,
            sites_sampled: self.sampled,
        }
    }
}

/// Single exploration of `B_{n+1}` with the stream derived from `seed`.
pub fn explore(law: &LocalLaw<f64>, n: u64, sem: EdgeSemantics, seed: u64) -> Result<ExplorationResult> {
    let ball = BallIndex::new(law.dim(), n)?;
    let mut explorer = Explorer::new(law, &ball, sem)?;
    Ok(explorer.run(StreamKey::new(seed)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_law_always_reaches() {
        for dim in 1..=3 {
            let law = LocalLaw::all_or_nothing(dim, 1.0).unwrap();
            for n in [0, 1, 5] {
                let r = explore(&law, n, EdgeSemantics::Directed, 3).unwrap();
                assert!(r.reached_boundary);
                assert_eq!(r.generations_used as u64, n + 1);
            }
        }
    }

    #[test]
    fn empty_law_never_reaches() {
        let law = LocalLaw::empty(2).unwrap();
        for sem in [
            EdgeSemantics::Directed,
            EdgeSemantics::UnionUndirected,
            EdgeSemantics::IntersectionBidirectional,
        ] {
            for seed in 0..20 {
                let r = explore(&law, 3, sem, seed).unwrap();
                assert!(!r.reached_boundary);
                assert_eq!(r.cluster_size, 1);
                assert_eq!(r.generations_used, 0);
            }
        }
    }

    #[test]
    fn site_model_with_closed_origin() {
        let law = LocalLaw::empty(2).unwrap();
        let r = explore(&law, 2, EdgeSemantics::SiteIid { p: 0.0 }, 1).unwrap();
        assert!(!r.reached_boundary);
        assert_eq!(r.cluster_size, 0);
        let r = explore(&law, 2, EdgeSemantics::SiteIid { p: 1.0 }, 1).unwrap();
        assert!(r.reached_boundary);
    }

    #[test]
    fn sampler_inverts_cdf() {
        let law = LocalLaw::dng(1, 0.4).unwrap();
        let sampler = MaskSampler::new(&law);
        assert_eq!(sampler.sample(0.0), 0);
        assert_eq!(sampler.sample(0.19), 0);
        assert_eq!(sampler.sample(0.21), 1);
        assert_eq!(sampler.sample(0.61), 2);
        assert_eq!(sampler.sample(0.999_999_999), 2);
    }

    #[test]
    fn semantics_parse() {
        assert_eq!("directed".parse::<EdgeSemantics>().unwrap(), EdgeSemantics::Directed);
        assert_eq!("site:0.3".parse::<EdgeSemantics>().unwrap(), EdgeSemantics::SiteIid { p: 0.3 });
        assert!("site".parse::<EdgeSemantics>().is_err());
        assert!("bond:1.5".parse::<EdgeSemantics>().is_err());
        assert!("sideways".parse::<EdgeSemantics>().is_err());
        assert_eq!(EdgeSemantics::BondIid { p: 0.25 }.to_string(), "bond:0.25");
    }

    #[test]
    fn dimension_mismatch() {
        let law = LocalLaw::iid(1, 0.5).unwrap();
        let ball = BallIndex::new(2, 1).unwrap();
        assert!(Explorer::new(&law, &ball, EdgeSemantics::Directed).is_err());
    }
}
