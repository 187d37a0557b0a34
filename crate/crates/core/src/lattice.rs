//! ℓ1 balls of Z^d with precomputed neighbor tables.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::degree::binomial;
use crate::error::{Error, Result};

/// Default cap on `|B_{n+1}|` for materialized balls.
pub const DEFAULT_POINT_CAP: u128 = 1 << 26;

/// Sentinel for neighbors outside the materialized ball.
pub const OUTSIDE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn origin(dim: usize) -> Self {
        LatticePoint(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn l1_norm(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).sum()
    }

    /// The point one step in `direction` (canonical layout).
    pub fn step(&self, direction: usize) -> Self {
        let mut coords = self.0.clone();
        coords[direction / 2] += if direction % 2 == 0 { 1 } else { -1 };
        LatticePoint(coords)
    }

    /// All `2d` nearest neighbors in canonical direction order.
    pub fn neighbors(&self) -> Vec<LatticePoint> {
        (0..2 * self.dim()).map(|i| self.step(i)).collect()
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `|{x ∈ Z^d : ‖x‖₁ ≤ r}| = Σ_k 2^k C(d,k) C(r,k)`.
pub fn ball_cardinality(dim: usize, radius: u64) -> u128 {
    (0..=dim as u64)
        .map(|k| (1u128 << k) * binomial(dim as u64, k) as u128 * binomial(radius, k) as u128)
        .sum()
}

/// The points of `B_{n+1}` for radius `n`, in lexicographic order, so both
/// the ball `B_n` and its boundary `∂B_n = B_{n+1} \ B_n` are available.
#[derive(Clone, Debug)]
pub struct BallIndex {
    dim: usize,
    radius: u64,
    coords: Vec<i64>,
    norms: Vec<u32>,
    neighbors: Vec<u32>,
    index: HashMap<Vec<i64>, u32>,
    origin: u32,
    inner: usize,
}

impl BallIndex {
    pub fn new(dim: usize, radius: u64) -> Result<Self> {
        Self::with_cap(dim, radius, DEFAULT_POINT_CAP)
    }

    pub fn with_cap(dim: usize, radius: u64, cap: u128) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("dimension must be at least 1"));
        }
        let outer = radius + 1;
        let count = ball_cardinality(dim, outer);
        if count > cap || count >= OUTSIDE as u128 {
            return Err(Error::ResourceGuard(format!(
                "|B_{outer}| = {count} points in dimension {dim} exceeds the cap {cap}"
            )));
        }
        let count = count as usize;
        let mut coords = Vec::with_capacity(count * dim);
        let mut current = vec![0i64; dim];
        enumerate_lex(&mut current, 0, outer as i64, &mut coords);
        debug_assert_eq!(coords.len(), count * dim);

        let mut index = HashMap::with_capacity(count);
        let mut norms = Vec::with_capacity(count);
        for (ord, point) in coords.chunks_exact(dim).enumerate() {
            index.insert(point.to_vec(), ord as u32);
            norms.push(point.iter().map(|c| c.unsigned_abs()).sum::<u64>() as u32);
        }
        let mut neighbors = vec![OUTSIDE; count * 2 * dim];
        let mut probe = vec![0i64; dim];
        for (ord, point) in coords.chunks_exact(dim).enumerate() {
            for dir in 0..2 * dim {
                probe.copy_from_slice(point);
                probe[dir / 2] += if dir % 2 == 0 { 1 } else { -1 };
                if let Some(&j) = index.get(&probe) {
                    neighbors[ord * 2 * dim + dir] = j;
                }
            }
        }
        let origin = index[&vec![0i64; dim]];
        let inner = norms.iter().filter(|&&r| (r as u64) <= radius).count();
        Ok(BallIndex { dim, radius, coords, norms, neighbors, index, origin, inner })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> u64 {
        self.radius
    }

    /// Number of materialized points, `|B_{n+1}|`.
    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    /// `|B_n|`.
    pub fn inner_len(&self) -> usize {
        self.inner
    }

    pub fn origin(&self) -> u32 {
        self.origin
    }

    pub fn point(&self, ordinal: u32) -> LatticePoint {
        let start = ordinal as usize * self.dim;
        LatticePoint(self.coords[start..start + self.dim].to_vec())
    }

    pub fn ordinal(&self, point: &LatticePoint) -> Option<u32> {
        self.index.get(&point.0).copied()
    }

    #[inline]
    pub fn norm(&self, ordinal: u32) -> u32 {
        self.norms[ordinal as usize]
    }

    /// Whether the ordinal lies on `∂B_n`.
    #[inline]
    pub fn is_boundary(&self, ordinal: u32) -> bool {
        self.norms[ordinal as usize] as u64 > self.radius
    }

    /// Neighbor ordinal in `direction`, or [`OUTSIDE`].
    #[inline]
    pub fn neighbor(&self, ordinal: u32, direction: usize) -> u32 {
        self.neighbors[ordinal as usize * 2 * self.dim + direction]
    }

    /// Ordinals of `B_n` in lexicographic order.
    pub fn inner_ordinals(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.len() as u32).filter(move |&o| !self.is_boundary(o))
    }

    /// Points of `B_n`.
    pub fn ball(&self) -> Vec<LatticePoint> {
        self.inner_ordinals().map(|o| self.point(o)).collect()
    }

    /// Points of `∂B_n = B_{n+1} \ B_n`.
    pub fn boundary(&self) -> Vec<LatticePoint> {
        (0..self.len() as u32)
            .filter(|&o| self.is_boundary(o))
            .map(|o| self.point(o))
            .collect()
    }
}

fn enumerate_lex(current: &mut [i64], axis: usize, budget: i64, out: &mut Vec<i64>) {
    if axis == current.len() {
        out.extend_from_slice(current);
        return;
    }
    for c in -budget..=budget {
        current[axis] = c;
        enumerate_lex(current, axis + 1, budget - c.abs(), out);
    }
    current[axis] = 0;
}
