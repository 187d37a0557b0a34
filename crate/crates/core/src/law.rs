//! Local laws: probability measures on subsets of the neighbor set `N_o`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::degree::{binomial, DegreeDistribution};
use crate::error::{Error, Result};
use crate::mask::{all_masks, ordering_string, NeighborMask};
use crate::profile::HittingProfile;
use crate::weight::{Rational, Weight};

/// Hard limit on the dimension of a dense local law (`2^24` entries).
pub const MAX_DIM: usize = 12;

/// A probability vector of length `2^(2d)` indexed by [`NeighborMask`].
#[derive(Clone, Debug, PartialEq)]
pub struct LocalLaw<T = f64> {
    dim: usize,
    probs: Vec<T>,
}

pub type ExactLaw = LocalLaw<Rational>;

/// Outcome of an exchangeability test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exchangeability {
    Exchangeable,
    /// Two masks of equal size carrying different probabilities.
    Witness(NeighborMask, NeighborMask),
}

impl Exchangeability {
    pub fn is_exchangeable(&self) -> bool {
        matches!(self, Exchangeability::Exchangeable)
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    if dim > MAX_DIM {
        return Err(Error::ResourceGuard(format!(
            "dimension {dim} exceeds the dense-law limit {MAX_DIM}"
        )));
    }
    Ok(())
}

fn check_unit<T: Weight>(name: &str, value: &T, upper: T) -> Result<()> {
    if !(*value >= T::zero() && *value <= upper) {
        return Err(Error::domain(format!("{name} = {value} outside [0, {upper}]")));
    }
    Ok(())
}

impl<T: Weight> LocalLaw<T> {
    /// Validates non-negativity and unit total.
    pub fn from_probs(dim: usize, probs: Vec<T>) -> Result<Self> {
        check_dim(dim)?;
        if probs.len() != 1 << (2 * dim) {
            return Err(Error::InvalidLaw(format!(
                "dimension {dim} needs {} probabilities, got {}",
                1usize << (2 * dim),
                probs.len()
            )));
        }
        if let Some(m) = probs.iter().position(|p| !(*p >= T::zero())) {
            return Err(Error::InvalidLaw(format!("probability of mask {m} is {}", probs[m])));
        }
        let total = T::total(&probs);
        if !T::is_unit_total(&total) {
            return Err(Error::InvalidLaw(format!("probabilities sum to {total}, not 1")));
        }
        Ok(LocalLaw { dim, probs })
    }

    fn zeros(dim: usize) -> Result<Vec<T>> {
        check_dim(dim)?;
        Ok(vec![T::zero(); 1 << (2 * dim)])
    }

    /// Point mass on a single mask.
    pub fn point_mass(dim: usize, mask: NeighborMask) -> Result<Self> {
        let mut probs = Self::zeros(dim)?;
        mask.validate(dim)?;
        probs[mask.index()] = T::one();
        Ok(LocalLaw { dim, probs })
    }

    /// `δ_∅`: no outgoing edges at all.
    pub fn empty(dim: usize) -> Result<Self> {
        Self::point_mass(dim, NeighborMask::EMPTY)
    }

    /// Each direction independently with probability `p`.
    pub fn iid(dim: usize, p: T) -> Result<Self> {
        check_unit("p", &p, T::one())?;
        let mut probs = Self::zeros(dim)?;
        let m = 2 * dim;
        let q = T::one() - p.clone();
        let by_size: Vec<T> = (0..=m)
            .map(|s| p.powu(s as u32) * q.powu((m - s) as u32))
            .collect();
        for (mask, slot) in probs.iter_mut().enumerate() {
            *slot = by_size[(mask as u32).count_ones() as usize].clone();
        }
        Ok(LocalLaw { dim, probs })
    }

    /// The local `2dp`-DnG law: uniform `k`-subset with probability `1-ε`,
    /// uniform `(k+1)`-subset with probability `ε`, where `k = ⌊2dp⌋`.
    pub fn dng(dim: usize, p: T) -> Result<Self> {
        check_unit("p", &p, T::one())?;
        check_dim(dim)?;
        let m = 2 * dim;
        let (k, eps) = (T::from_u64(m as u64) * p).split_integer();
        let k = k as usize;
        let mut alphas = vec![T::zero(); m + 1];
        if k >= m {
            alphas[m] = T::one();
        } else {
            alphas[k] = T::one() - eps.clone();
            alphas[k + 1] = eps;
        }
        Ok(Self::exchangeable(&DegreeDistribution::from_parts(dim, alphas)))
    }

    /// All-or-nothing: the full mask with probability `p`, otherwise nothing.
    pub fn all_or_nothing(dim: usize, p: T) -> Result<Self> {
        check_unit("p", &p, T::one())?;
        let mut probs = Self::zeros(dim)?;
        let full = NeighborMask::full(dim).index();
        probs[0] = T::one() - p.clone();
        probs[full] = probs[full].clone() + p;
        Ok(LocalLaw { dim, probs })
    }

    /// Uniform on each size class, with class masses given by `dd`.
    pub fn exchangeable(dd: &DegreeDistribution<T>) -> Self {
        let dim = dd.dim();
        let m = 2 * dim as u64;
        let per_mask: Vec<T> = (0..=m)
            .map(|s| dd.alpha(s as usize).clone() / T::from_u64(binomial(m, s)))
            .collect();
        let probs = all_masks(dim).map(|mask| per_mask[mask.len()].clone()).collect();
        LocalLaw { dim, probs }
    }

    /// Two-dimensional corner/stick law: each of the four corners with
    /// probability `alpha`, each of the two sticks with `(1 - 4 alpha) / 2`.
    pub fn corner_stick(alpha: T) -> Result<Self> {
        check_unit("alpha", &alpha, T::ratio(1, 4))?;
        let mut probs = Self::zeros(2)?;
        let beta = (T::one() - T::from_u64(4) * alpha.clone()) / T::from_u64(2);
        for mask in corner_masks() {
            probs[mask.index()] = alpha.clone();
        }
        for mask in stick_masks() {
            probs[mask.index()] = beta.clone();
        }
        Ok(LocalLaw { dim: 2, probs })
    }

    /// Soft stick model in d = 2: a uniform direction, plus its opposite
    /// with probability `eps`.
    pub fn soft_opposite(eps: T) -> Result<Self> {
        check_unit("eps", &eps, T::one())?;
        let mut probs = Self::zeros(2)?;
        let single = (T::one() - eps.clone()) / T::from_u64(4);
        for dir in 0..4 {
            probs[1 << dir] = single.clone();
        }
        for mask in stick_masks() {
            probs[mask.index()] = eps.clone() / T::from_u64(2);
        }
        Ok(LocalLaw { dim: 2, probs })
    }

    /// Soft corner model in d = 2: a uniform direction, plus one of its two
    /// perpendicular directions (uniformly) with probability `eps`.
    pub fn soft_perpendicular(eps: T) -> Result<Self> {
        check_unit("eps", &eps, T::one())?;
        let mut probs = Self::zeros(2)?;
        let single = (T::one() - eps.clone()) / T::from_u64(4);
        for dir in 0..4 {
            probs[1 << dir] = single.clone();
        }
        for mask in corner_masks() {
            probs[mask.index()] = eps.clone() / T::from_u64(4);
        }
        Ok(LocalLaw { dim: 2, probs })
    }

    /// `p Q + (1 - p) δ_∅`.
    pub fn mix_with_empty(&self, p: T) -> Result<Self> {
        check_unit("p", &p, T::one())?;
        let mut probs: Vec<T> = self.probs.iter().map(|x| p.clone() * x.clone()).collect();
        probs[0] = probs[0].clone() + (T::one() - p);
        Ok(LocalLaw { dim: self.dim, probs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_directions(&self) -> usize {
        2 * self.dim
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn prob(&self, mask: NeighborMask) -> &T {
        &self.probs[mask.index()]
    }

    /// Masks with positive probability, in increasing mask order.
    pub fn support(&self) -> impl Iterator<Item = (NeighborMask, &T)> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > T::zero())
            .map(|(m, p)| (NeighborMask(m as u32), p))
    }

    pub fn expected_degree(&self) -> T {
        let dd = self.degree_distribution();
        dd.mean()
    }

    pub fn degree_distribution(&self) -> DegreeDistribution<T> {
        let mut alphas = vec![T::zero(); 2 * self.dim + 1];
        for (mask, p) in self.probs.iter().enumerate() {
            let s = (mask as u32).count_ones() as usize;
            alphas[s] = alphas[s].clone() + p.clone();
        }
        DegreeDistribution::from_parts(self.dim, alphas)
    }

    pub fn hitting_profile(&self) -> HittingProfile<T> {
        HittingProfile::new(self)
    }

    /// Checks that each size class is uniform within `tol`.
    pub fn is_exchangeable(&self, tol: &T) -> Exchangeability {
        let mut first: Vec<Option<NeighborMask>> = vec![None; 2 * self.dim + 1];
        for mask in all_masks(self.dim) {
            match first[mask.len()] {
                None => first[mask.len()] = Some(mask),
                Some(reference) => {
                    if self.prob(mask).abs_diff(self.prob(reference)) > *tol {
                        return Exchangeability::Witness(reference, mask);
                    }
                }
            }
        }
        Exchangeability::Exchangeable
    }

    pub fn to_f64(&self) -> LocalLaw<f64> {
        LocalLaw {
            dim: self.dim,
            probs: self.probs.iter().map(Weight::to_f64).collect(),
        }
    }
}

/// The four corner masks `{±x} × {±y}` in d = 2.
pub fn corner_masks() -> [NeighborMask; 4] {
    [
        NeighborMask::from_directions([0, 2]),
        NeighborMask::from_directions([0, 3]),
        NeighborMask::from_directions([1, 2]),
        NeighborMask::from_directions([1, 3]),
    ]
}

/// The two stick masks `{+x, -x}` and `{+y, -y}` in d = 2.
pub fn stick_masks() -> [NeighborMask; 2] {
    [NeighborMask::from_directions([0, 1]), NeighborMask::from_directions([2, 3])]
}

#[derive(Serialize, Deserialize)]
struct LawJson {
    dim: usize,
    probs: Vec<f64>,
    #[serde(default)]
    ordering: Option<String>,
}

impl LocalLaw<f64> {
    pub fn to_json(&self) -> String {
        let doc = LawJson {
            dim: self.dim,
            probs: self.probs.clone(),
            ordering: Some(ordering_string(self.dim)),
        };
        serde_json::to_string_pretty(&doc).expect("law serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: LawJson = serde_json::from_str(text)?;
        if let Some(ordering) = &doc.ordering {
            let expected = ordering_string(doc.dim);
            if ordering.replace(' ', "") != expected {
                return Err(Error::InvalidLaw(format!(
                    "unsupported direction ordering {ordering:?}, expected {expected:?}"
                )));
            }
        }
        Self::from_probs(doc.dim, doc.probs)
    }

    /// `mask,probability` rows with a header; masks as integers.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mask,probability\n");
        for (mask, p) in self.probs.iter().enumerate() {
            writeln!(out, "{mask},{p:e}").expect("write to string");
        }
        out
    }

    /// Reads the CSV form. Masks not listed get probability zero; masks may
    /// be integers or `|`-separated direction names.
    pub fn from_csv(text: &str, dim: usize) -> Result<Self> {
        let mut probs = Self::zeros(dim)?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || (lineno == 0 && line.starts_with("mask")) {
                continue;
            }
            let (mask, p) = line.split_once(',').ok_or_else(|| {
                Error::Parse(format!("line {}: expected `mask,probability`", lineno + 1))
            })?;
            let mask = NeighborMask::parse(mask, dim)
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad probability {p:?}", lineno + 1)))?;
            probs[mask.index()] += p;
        }
        Self::from_probs(dim, probs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::rational;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn iid_examples() {
        assert_eq!(LocalLaw::iid(1, 0.0).unwrap().probs(), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(LocalLaw::iid(1, 0.5).unwrap().probs(), &[0.25; 4]);
        assert!(LocalLaw::iid(2, 0.5).unwrap().probs().iter().all(|&p| p == 1.0 / 16.0));
        assert!(LocalLaw::iid(2, 1.5).is_err());
        assert!(LocalLaw::iid(2, f64::NAN).is_err());
    }

    #[test]
    fn dng_examples() {
        let q = LocalLaw::dng(2, 0.5).unwrap();
        for mask in all_masks(2) {
            let expected = if mask.len() == 2 { 1.0 / 6.0 } else { 0.0 };
            assert!(close(*q.prob(mask), expected), "{mask}");
        }
        let q = LocalLaw::dng(2, 0.625).unwrap();
        for mask in all_masks(2) {
            let expected = match mask.len() {
                2 => 1.0 / 12.0,
                3 => 1.0 / 8.0,
                _ => 0.0,
            };
            assert!(close(*q.prob(mask), expected), "{mask}");
        }
        let q = LocalLaw::dng(1, 0.4).unwrap();
        assert!(close(q.probs()[0], 0.2));
        assert!(close(q.probs()[1], 0.4));
        assert!(close(q.probs()[2], 0.4));
        assert_eq!(q.probs()[3], 0.0);
        let full = LocalLaw::dng(3, 1.0).unwrap();
        assert_eq!(*full.prob(NeighborMask::full(3)), 1.0);
    }

    #[test]
    fn exact_dng_matches_float() {
        let exact = LocalLaw::dng(2, rational(5, 8)).unwrap();
        assert_eq!(*exact.prob(NeighborMask(3)), rational(1, 12));
        assert_eq!(*exact.prob(NeighborMask(7)), rational(1, 8));
        let float = LocalLaw::dng(2, 0.625).unwrap();
        for (a, b) in exact.to_f64().probs().iter().zip(float.probs()) {
            assert!(close(*a, *b));
        }
    }

    #[test]
    fn aon_examples() {
        let law = LocalLaw::all_or_nothing(1, 1.0).unwrap();
        assert_eq!(law.probs(), &[0.0, 0.0, 0.0, 1.0]);
        let law = LocalLaw::all_or_nothing(2, 0.3).unwrap();
        assert!(close(law.probs()[0], 0.7));
        assert!(close(law.probs()[15], 0.3));
        assert!(close(LocalLaw::all_or_nothing(3, 0.5).unwrap().expected_degree(), 3.0));
    }

    #[test]
    fn exchangeable_examples() {
        let dd = DegreeDistribution::new(2, vec![0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(LocalLaw::exchangeable(&dd), LocalLaw::dng(2, 0.5).unwrap());
        let dd = DegreeDistribution::new(1, vec![0.5, 0.0, 0.5]).unwrap();
        assert_eq!(LocalLaw::exchangeable(&dd), LocalLaw::all_or_nothing(1, 0.5).unwrap());
        let dd = DegreeDistribution::new(2, vec![0.5, 0.0, 0.0, 0.0, 0.5]).unwrap();
        let law = LocalLaw::exchangeable(&dd);
        assert_eq!(law.probs()[0], 0.5);
        assert_eq!(law.probs()[15], 0.5);
    }

    #[test]
    fn corner_stick_examples() {
        let cs = LocalLaw::corner_stick(rational(1, 6)).unwrap();
        assert_eq!(cs, LocalLaw::dng(2, rational(1, 2)).unwrap());
        let pure_corner = LocalLaw::corner_stick(0.25).unwrap();
        for m in stick_masks() {
            assert_eq!(*pure_corner.prob(m), 0.0);
        }
        let pure_stick = LocalLaw::corner_stick(0.0).unwrap();
        for m in stick_masks() {
            assert_eq!(*pure_stick.prob(m), 0.5);
        }
        assert!(LocalLaw::corner_stick(0.3).is_err());
        assert!(LocalLaw::corner_stick(-0.01).is_err());
    }

    #[test]
    fn soft_model_examples() {
        let opp = LocalLaw::soft_opposite(0.0).unwrap();
        assert_eq!(opp, LocalLaw::dng(2, 0.25).unwrap());
        let opp = LocalLaw::soft_opposite(1.0).unwrap();
        for m in stick_masks() {
            assert_eq!(*opp.prob(m), 0.5);
        }
        assert!(close(opp.expected_degree(), 2.0));
        let perp = LocalLaw::soft_perpendicular(rational(1, 1)).unwrap();
        assert_eq!(perp, LocalLaw::corner_stick(rational(1, 4)).unwrap());
        let perp = LocalLaw::soft_perpendicular(0.4).unwrap();
        assert!(close(perp.expected_degree(), 1.4));
        assert!(LocalLaw::soft_opposite(1.1).is_err());
    }

    #[test]
    fn mixture_examples() {
        let q = LocalLaw::dng(2, 0.625).unwrap();
        assert_eq!(q.mix_with_empty(1.0).unwrap(), q);
        assert_eq!(q.mix_with_empty(0.0).unwrap(), LocalLaw::empty(2).unwrap());
        let mixed = LocalLaw::dng(1, 0.5).unwrap().mix_with_empty(0.5).unwrap();
        assert_eq!(mixed.probs(), &[0.5, 0.25, 0.25, 0.0]);
        assert!(q.mix_with_empty(2.0).is_err());
    }

    #[test]
    fn expected_degree_examples() {
        assert!(close(LocalLaw::iid(2, 0.5).unwrap().expected_degree(), 2.0));
        assert!(close(LocalLaw::dng(2, 0.625).unwrap().expected_degree(), 2.5));
        assert!(close(LocalLaw::all_or_nothing(3, 0.25).unwrap().expected_degree(), 1.5));
    }

    #[test]
    fn exchangeability_examples() {
        assert!(LocalLaw::dng(2, 0.7).unwrap().is_exchangeable(&1e-12).is_exchangeable());
        match LocalLaw::corner_stick(0.25).unwrap().is_exchangeable(&1e-12) {
            Exchangeability::Witness(a, b) => {
                assert_eq!(a.len(), b.len());
                let corners = corner_masks();
                let sticks = stick_masks();
                let is_corner = |m| corners.contains(&m);
                let is_stick = |m| sticks.contains(&m);
                assert!((is_corner(a) && is_stick(b)) || (is_stick(a) && is_corner(b)));
            }
            Exchangeability::Exchangeable => panic!("pure corner law is not exchangeable"),
        }
        let cs = LocalLaw::corner_stick(rational(1, 6)).unwrap();
        assert!(cs.is_exchangeable(&rational(0, 1)).is_exchangeable());
    }

    #[test]
    fn validation_errors() {
        assert!(LocalLaw::from_probs(1, vec![0.5, 0.5]).is_err());
        assert!(LocalLaw::from_probs(1, vec![0.5, 0.5, 0.5, -0.5]).is_err());
        assert!(LocalLaw::from_probs(1, vec![0.5, 0.5, 0.5, 0.0]).is_err());
        assert!(LocalLaw::<f64>::empty(0).is_err());
        assert!(LocalLaw::<f64>::empty(13).is_err());
    }

    #[test]
    fn json_and_csv_forms_round_trip() {
        let law = LocalLaw::corner_stick(0.2).unwrap();
        let json = law.to_json();
        assert!(json.contains("\"ordering\": \"+x,-x,+y,-y\""));
        assert_eq!(LocalLaw::from_json(&json).unwrap(), law);
        assert_eq!(LocalLaw::from_csv(&law.to_csv(), 2).unwrap(), law);
        let named = "mask,probability\n+x|-x,0.5\n{+y|-y},0.5\n";
        let sticks = LocalLaw::from_csv(named, 2).unwrap();
        assert_eq!(sticks, LocalLaw::corner_stick(0.0).unwrap());
        let bad = r#"{"dim":1,"probs":[1,0,0,0],"ordering":"+x,+y"}"#;
        assert!(LocalLaw::from_json(bad).is_err());
    }
}
