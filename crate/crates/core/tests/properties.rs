use proptest::prelude::*;
use sitewise::domination::{
    check_local_domination, check_local_domination_over, check_stochastic_domination, exchangeable_reduce_step, MaskRange,
    Mode, ReduceStep,
};
use sitewise::exploration::{EdgeSemantics, Explorer, FrontierOrder};
use sitewise::mask::all_masks;
use sitewise::rng::StreamKey;
use sitewise::{BallIndex, DegreeDistribution, LocalLaw, NeighborMask};

fn law_strategy(max_dim: usize) -> impl Strategy<Value = LocalLaw> {
    (1..=max_dim).prop_flat_map(|dim| {
        let size = 1usize << (2 * dim);
        (Just(dim), prop::collection::vec(prop_oneof![Just(0.0), 0.0..1.0f64], size))
    })
    .prop_filter_map("nonzero total", |(dim, mut weights)| {
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return None;
        }
        weights.iter_mut().for_each(|w| *w /= total);
        let rest: f64 = weights[1..].iter().sum();
        weights[0] = (1.0 - rest).max(0.0);
        LocalLaw::from_probs(dim, weights).ok()
    })
}

fn degree_strategy(max_dim: usize) -> impl Strategy<Value = DegreeDistribution> {
    (1..=max_dim).prop_flat_map(|dim| {
        (Just(dim), prop::collection::vec(prop_oneof![Just(0.0), 0.0..1.0f64], 2 * dim + 1))
    })
    .prop_filter_map("nonzero total", |(dim, mut alphas)| {
        let total: f64 = alphas.iter().sum();
        if total <= 0.0 {
            return None;
        }
        alphas.iter_mut().for_each(|a| *a /= total);
        let rest: f64 = alphas[1..].iter().sum();
        alphas[0] = (1.0 - rest).max(0.0);
        DegreeDistribution::new(dim, alphas).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hitting_profile_is_monotone_with_fixed_endpoints(law in law_strategy(3)) {
        let profile = law.hitting_profile();
        let dim = law.dim();
        prop_assert_eq!(*profile.hit(NeighborMask::EMPTY), 0.0);
        prop_assert!((profile.hit(NeighborMask::full(dim)) - (1.0 - law.prob(NeighborMask::EMPTY))).abs() < 1e-12);
        for a in all_masks(dim) {
            for dir in 0..2 * dim {
                let b = a.with(dir);
                prop_assert!(*profile.hit(a) <= profile.hit(b) + 1e-12);
            }
        }
    }

    #[test]
    fn joint_hit_is_inclusion_exclusion(law in law_strategy(2)) {
        let profile = law.hitting_profile();
        let dim = law.dim();
        for a in all_masks(dim) {
            for b in all_masks(dim).filter(|b| b.is_disjoint(a)) {
                let joint = profile.joint_hit(a, b);
                let expected = profile.hit(a) + profile.hit(b) - profile.hit(a.union(b));
                prop_assert!((joint - expected).abs() < 1e-12);
                prop_assert!(joint <= profile.hit(a).min(*profile.hit(b)) + 1e-12);
            }
        }
    }

    #[test]
    fn local_domination_is_reflexive(law in law_strategy(3)) {
        let report = check_local_domination(&law, &law, Mode::Weak, &1e-12).unwrap();
        prop_assert!(report.holds);
        prop_assert_eq!(report.equalities.len(), report.masks_checked);
    }

    #[test]
    fn local_domination_is_transitive(p in law_strategy(1), q in law_strategy(1), r in law_strategy(1)) {
        let pq = check_local_domination_over(&p, &q, Mode::Weak, &0.0, MaskRange::All).unwrap().holds;
        let qr = check_local_domination_over(&q, &r, Mode::Weak, &0.0, MaskRange::All).unwrap().holds;
        if pq && qr {
            prop_assert!(check_local_domination_over(&p, &r, Mode::Weak, &0.0, MaskRange::All).unwrap().holds);
        }
    }

    #[test]
    fn stochastic_domination_implies_local(p in law_strategy(2), shift in 0.0..1.0f64) {
        // A law and its mixture towards the full mask are ordered.
        let dim = p.dim();
        let full = LocalLaw::point_mass(dim, NeighborMask::full(dim)).unwrap();
        let probs: Vec<f64> = p.probs().iter().zip(full.probs()).map(|(a, b)| (1.0 - shift) * a + shift * b).collect();
        let q = LocalLaw::from_probs(dim, probs).unwrap();
        let verdict = check_stochastic_domination(&p, &q, &1e-12).unwrap();
        prop_assert!(verdict.dominated);
        prop_assert!(check_local_domination_over(&p, &q, Mode::Weak, &1e-12, MaskRange::All).unwrap().holds);
    }

    #[test]
    fn reduction_step_preserves_mean_and_raises_hits(dd in degree_strategy(4)) {
        if let ReduceStep::Reduced(next) = exchangeable_reduce_step(&dd) {
            prop_assert!((next.mean() - dd.mean()).abs() <= 1e-12);
            prop_assert!(next.range() < dd.range());
            let before = LocalLaw::exchangeable(&dd).hitting_profile();
            let after = LocalLaw::exchangeable(&next).hitting_profile();
            for a in all_masks(dd.dim()) {
                prop_assert!(*before.hit(a) <= after.hit(a) + 1e-12);
            }
        }
    }

    #[test]
    fn semantics_are_nested_under_common_randomness(law in law_strategy(2), n in 0u64..6, seed in any::<u64>()) {
        let ball = BallIndex::new(law.dim(), n).unwrap();
        let key = StreamKey::new(seed);
        let run = |sem| Explorer::new(&law, &ball, sem).unwrap().run(key).reached_boundary;
        let inter = run(EdgeSemantics::IntersectionBidirectional);
        let dir = run(EdgeSemantics::Directed);
        let union = run(EdgeSemantics::UnionUndirected);
        prop_assert!(!inter || dir);
        prop_assert!(!dir || union);
    }

    #[test]
    fn frontier_order_does_not_change_the_event(law in law_strategy(2), n in 0u64..8, seed in any::<u64>()) {
        let ball = BallIndex::new(law.dim(), n).unwrap();
        let key = StreamKey::new(seed);
        for sem in [EdgeSemantics::Directed, EdgeSemantics::UnionUndirected, EdgeSemantics::IntersectionBidirectional, EdgeSemantics::SiteIid { p: 0.6 }, EdgeSemantics::BondIid { p: 0.5 }] {
            let fwd = Explorer::new(&law, &ball, sem).unwrap().run(key);
            let rev = Explorer::new(&law, &ball, sem).unwrap().with_order(FrontierOrder::Reverse).run(key);
            prop_assert_eq!(fwd.reached_boundary, rev.reached_boundary);
            prop_assert_eq!(fwd.generations_used, rev.generations_used);
            if fwd.reached_boundary {
                prop_assert!(fwd.cluster_size as u64 > fwd.generations_used as u64);
            }
        }
    }

    #[test]
    fn law_files_round_trip(law in law_strategy(2)) {
        let json = LocalLaw::from_json(&law.to_json()).unwrap();
        let csv = LocalLaw::from_csv(&law.to_csv(), law.dim()).unwrap();
        prop_assert_eq!(json.probs(), law.probs());
        prop_assert_eq!(csv.probs(), law.probs());
    }

    #[test]
    fn mask_text_round_trips(dim in 1usize..=4, bits in any::<u32>()) {
        let mask = NeighborMask(bits & NeighborMask::full(dim).bits());
        prop_assert_eq!(NeighborMask::parse(&mask.to_string(), dim).unwrap(), mask);
        prop_assert_eq!(NeighborMask::parse(&mask.names().join("|"), dim).unwrap(), mask);
    }
}
