//! Subsets of the `2d` nearest-neighbor directions as bitmasks.
//!
//! Direction `i` has bit `i`, with the fixed layout `+e1, -e1, +e2, -e2, ...`,
//! so `+ej` is bit `2(j-1)` and `-ej` is bit `2(j-1)+1`. The opposite of
//! direction `i` is `i ^ 1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NeighborMask(pub u32);

impl NeighborMask {
    pub const EMPTY: NeighborMask = NeighborMask(0);

    pub fn full(dim: usize) -> Self {
        NeighborMask(((1u64 << (2 * dim)) - 1) as u32)
    }

    pub fn single(direction: usize) -> Self {
        NeighborMask(1 << direction)
    }

    pub fn from_directions(directions: impl IntoIterator<Item = usize>) -> Self {
        NeighborMask(directions.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn contains(self, direction: usize) -> bool {
        self.0 >> direction & 1 == 1
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn complement(self, dim: usize) -> Self {
        NeighborMask(!self.0 & Self::full(dim).0)
    }

    #[inline]
    pub fn is_subset_of(self, other: NeighborMask) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_disjoint(self, other: NeighborMask) -> bool {
        self.0 & other.0 == 0
    }

    #[inline]
    pub fn intersects(self, other: NeighborMask) -> bool {
        self.0 & other.0 != 0
    }

    pub fn union(self, other: NeighborMask) -> Self {
        NeighborMask(self.0 | other.0)
    }

    pub fn with(self, direction: usize) -> Self {
        NeighborMask(self.0 | 1 << direction)
    }

    pub fn directions(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits >> i & 1 == 1)
    }

    /// Human-readable direction names, e.g. `["+x", "-y"]`.
    pub fn names(self) -> Vec<String> {
        self.directions().map(direction_name).collect()
    }

    /// Checks the mask fits the ambient dimension.
    pub fn validate(self, dim: usize) -> Result<Self> {
        if self.0 & !Self::full(dim).0 != 0 {
            return Err(Error::domain(format!(
                "mask {} has bits outside the {} directions of dimension {dim}",
                self.0,
                2 * dim
            )));
        }
        Ok(self)
    }

    /// Parses either an integer or a `+`/`|`-separated direction list such
    /// as `+x|-y` (the empty string or `{}` is the empty set).
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        let text = text.trim();
        if let Ok(bits) = text.parse::<u32>() {
            return NeighborMask(bits).validate(dim);
        }
        let inner = text.trim_start_matches('{').trim_end_matches('}').trim();
        if inner.is_empty() {
            return Ok(NeighborMask::EMPTY);
        }
        let mut mask = NeighborMask::EMPTY;
        for token in inner.split(['|', ',', ' ', ';']).filter(|t| !t.is_empty()) {
            let dir = parse_direction(token, dim)?;
            mask = mask.with(dir);
        }
        Ok(mask)
    }
}

impl fmt::Display for NeighborMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names().join(","))
    }
}

/// Axis label for axis `j` (zero-based): `x`, `y`, `z`, `w`, then `e5`, `e6`, ...
pub fn axis_name(axis: usize) -> String {
    match axis {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        3 => "w".into(),
        _ => format!("e{}", axis + 1),
    }
}

pub fn direction_name(direction: usize) -> String {
    let sign = if direction % 2 == 0 { '+' } else { '-' };
    format!("{sign}{}", axis_name(direction / 2))
}

/// The canonical ordering string, e.g. `+x,-x,+y,-y`.
pub fn ordering_string(dim: usize) -> String {
    (0..2 * dim).map(direction_name).collect::<Vec<_>>().join(",")
}

pub fn parse_direction(token: &str, dim: usize) -> Result<usize> {
    (0..2 * dim)
        .find(|&i| direction_name(i) == token)
        .ok_or_else(|| Error::Parse(format!("unknown direction {token:?} in dimension {dim}")))
}

/// Opposite direction under the canonical layout.
#[inline]
pub fn opposite(direction: usize) -> usize {
    direction ^ 1
}

/// All masks over `2 * dim` directions, in increasing order.
pub fn all_masks(dim: usize) -> impl Iterator<Item = NeighborMask> {
    (0..1u32 << (2 * dim)).map(NeighborMask)
}
