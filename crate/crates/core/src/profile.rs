//! Hitting profiles `A -> P[N(o) ∩ A != ∅]` via the subset-sum (zeta) transform.

use crate::law::LocalLaw;
use crate::mask::NeighborMask;
use crate::weight::Weight;

/// In-place subset-sum transform: afterwards `xs[B] = Σ_{S ⊆ B} xs[S]`.
///
/// Runs in `O(len · log2(len))`; `xs.len()` must be a power of two.
pub fn subset_zeta<T: Weight>(xs: &mut [T]) {
    let len = xs.len();
    assert!(len.is_power_of_two(), "zeta transform needs a power-of-two length");
    let mut bit = 1;
    while bit < len {
        for block in xs.chunks_exact_mut(2 * bit) {
            let (lower, upper) = block.split_at_mut(bit);
            for (lo, hi) in lower.iter().zip(upper.iter_mut()) {
                *hi = hi.clone() + lo.clone();
            }
        }
        bit <<= 1;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HittingProfile<T = f64> {
    dim: usize,
    hit: Vec<T>,
    zeta: Vec<T>,
}

impl<T: Weight> HittingProfile<T> {
    pub fn new(law: &LocalLaw<T>) -> Self {
        let dim = law.dim();
        let mut zeta = law.probs().to_vec();
        subset_zeta(&mut zeta);
        let full = NeighborMask::full(dim).index();
        let mut hit: Vec<T> = (0..zeta.len())
            .map(|a| T::one() - zeta[full ^ a].clone())
            .collect();
        hit[0] = T::zero();
        HittingProfile { dim, hit, zeta }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `P[N(o) ∩ A != ∅]`.
    pub fn hit(&self, a: NeighborMask) -> &T {
        &self.hit[a.index()]
    }

    /// `P[N(o) ⊆ B]`.
    pub fn zeta(&self, b: NeighborMask) -> &T {
        &self.zeta[b.index()]
    }

    pub fn hits(&self) -> &[T] {
        &self.hit
    }

    /// `P[N(o) ∩ A != ∅ and N(o) ∩ B != ∅]` for disjoint `A`, `B`, by
    /// inclusion–exclusion over the zeta values.
    pub fn joint_hit(&self, a: NeighborMask, b: NeighborMask) -> T {
        debug_assert!(a.is_disjoint(b));
        let d = self.dim;
        T::one() - self.zeta(a.complement(d)).clone() - self.zeta(b.complement(d)).clone()
            + self.zeta(a.union(b).complement(d)).clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::all_masks;
    use crate::weight::rational;

    fn direct_hit(law: &LocalLaw<f64>, a: NeighborMask) -> f64 {
        law.support().filter(|(s, _)| s.intersects(a)).map(|(_, p)| *p).sum()
    }

    #[test]
    fn zeta_matches_direct_sums() {
        let law = LocalLaw::corner_stick(0.1).unwrap().mix_with_empty(0.7).unwrap();
        let profile = law.hitting_profile();
        for b in all_masks(2) {
            let direct: f64 = law.support().filter(|(s, _)| s.is_subset_of(b)).map(|(_, p)| *p).sum();
            assert!((profile.zeta(b) - direct).abs() < 1e-12);
            assert!((profile.hit(b) - direct_hit(&law, b)).abs() < 1e-12);
        }
    }

    #[test]
    fn aon_hits_p_everywhere() {
        let profile = LocalLaw::all_or_nothing(2, 0.3).unwrap().hitting_profile();
        assert_eq!(*profile.hit(NeighborMask::EMPTY), 0.0);
        for a in all_masks(2).skip(1) {
            assert!((profile.hit(a) - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn dng_and_iid_pair_hits() {
        let dng = LocalLaw::dng(2, rational(1, 2)).unwrap().hitting_profile();
        let iid = LocalLaw::iid(2, rational(1, 2)).unwrap().hitting_profile();
        for a in all_masks(2).filter(|a| a.len() == 2) {
            assert_eq!(*dng.hit(a), rational(5, 6));
            assert_eq!(*iid.hit(a), rational(3, 4));
        }
    }

    #[test]
    fn endpoint_identities() {
        let law = LocalLaw::dng(3, 0.3).unwrap().mix_with_empty(0.9).unwrap();
        let profile = law.hitting_profile();
        assert_eq!(*profile.hit(NeighborMask::EMPTY), 0.0);
        let full = NeighborMask::full(3);
        assert!((profile.hit(full) - (1.0 - law.probs()[0])).abs() < 1e-12);
    }

    #[test]
    fn joint_hit_matches_direct_summation() {
        let law = LocalLaw::iid(1, 0.25).unwrap();
        let profile = law.hitting_profile();
        let a = NeighborMask::single(0);
        let b = NeighborMask::single(1);
        assert!((profile.joint_hit(a, b) - 0.0625).abs() < 1e-15);
        let dng = LocalLaw::dng(2, 0.5).unwrap().hitting_profile();
        assert!((dng.joint_hit(a, b) - 1.0 / 6.0).abs() < 1e-15);
    }
}
