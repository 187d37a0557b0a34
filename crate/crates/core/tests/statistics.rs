use sitewise::exploration::EdgeSemantics;
use sitewise::montecarlo::estimate_one_arm;
use sitewise::oracle::exact_one_arm;
use sitewise::rng::derive_seed;
use sitewise::{LawBuilder, LocalLaw, OracleOptions, SamplingConfig};

fn law(spec: &str, dim: usize) -> LocalLaw {
    spec.parse::<LawBuilder>().unwrap().build(dim).unwrap()
}

#[test]
fn wilson_intervals_cover_the_exact_value() {
    let target = law("iid:0.5", 1);
    let exact = exact_one_arm(&target, 1, EdgeSemantics::Directed, &OracleOptions::default()).unwrap().value;
    assert_eq!(exact, 0.4375);
    let reps = 200;
    let covered = (0..reps)
        .filter(|&r| {
            let cfg = SamplingConfig::new(10_000, derive_seed(2024, r));
            let est = estimate_one_arm(&target, 1, EdgeSemantics::Directed, &cfg).unwrap();
            est.ci_low <= exact && exact <= est.ci_high
        })
        .count();
    assert!(covered as f64 >= 0.9 * reps as f64, "coverage {covered}/{reps}");
}

#[test]
fn local_domination_transfers_to_the_one_arm_probability() {
    for dim in [2usize, 3] {
        for mean_degree in [1.5, 2.0, 2.5] {
            let p = mean_degree / (2 * dim) as f64;
            let chain = [format!("aon:{p}"), format!("iid:{p}"), format!("dng:{p}")];
            for n in [4u64, 8, 16, 32] {
                let cfg = SamplingConfig::new(20_000, derive_seed(99, n));
                let estimates: Vec<_> = chain
                    .iter()
                    .map(|spec| estimate_one_arm(&law(spec, dim), n, EdgeSemantics::Directed, &cfg).unwrap())
                    .collect();
                for pair in estimates.windows(2) {
                    let slack = 3.0 * pair[0].pooled_stderr(&pair[1]);
                    assert!(
                        pair[0].p_hat <= pair[1].p_hat + slack,
                        "d={dim} p={p} n={n}: {} > {} + {slack}",
                        pair[0].p_hat,
                        pair[1].p_hat
                    );
                }
            }
        }
    }
}

#[test]
fn oracle_and_sampler_agree_on_small_balls() {
    let directed = EdgeSemantics::Directed;
    let union = EdgeSemantics::UnionUndirected;
    let inter = EdgeSemantics::IntersectionBidirectional;
    let site = EdgeSemantics::SiteIid { p: 0.6 };
    let bond = EdgeSemantics::BondIid { p: 0.5 };
    let mut matrix = Vec::new();
    for spec in ["iid:0.5", "dng:0.4", "aon:0.6", "mix:0.7,iid:0.8"] {
        for n in [1u64, 2] {
            for sem in [directed, union, inter] {
                matrix.push((spec, 1usize, n, sem));
            }
        }
    }
    for n in [1u64, 2] {
        matrix.push(("empty", 1, n, site));
        matrix.push(("empty", 1, n, bond));
    }
    matrix.extend([
        ("iid:0.5", 2, 1, directed),
        ("dng:0.5", 2, 1, directed),
        ("corner:0.125", 2, 1, directed),
        ("dng:0.5", 2, 0, union),
        ("dng:0.5", 2, 0, inter),
        ("aon:0.6", 2, 1, union),
        ("aon:0.6", 2, 1, inter),
        ("aon:0.6", 2, 2, directed),
        ("empty", 2, 1, site),
        ("empty", 2, 1, bond),
    ]);
    let opts = OracleOptions::default();
    for (i, &(spec, dim, n, sem)) in matrix.iter().enumerate() {
        let target = law(spec, dim);
        let exact = exact_one_arm(&target, n, sem, &opts).unwrap().value;
        let est = estimate_one_arm(&target, n, sem, &SamplingConfig::new(100_000, derive_seed(7, i as u64))).unwrap();
        let slack = 3.0 * est.stderr.max(1e-12);
        assert!(
            (est.p_hat - exact).abs() <= slack,
            "{spec} d={dim} n={n} {sem}: exact {exact}, sampled {} +- {}",
            est.p_hat,
            est.stderr
        );
    }
}
