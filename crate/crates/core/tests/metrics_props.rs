mod common;

use proptest::prelude::*;

use common::{block_domain, random_graph, random_subset, small_graph};
use spectral_transfer::generators::{generate_sbm, reference_sbm, IntraTopology};
use spectral_transfer::metrics::{self, Conductance, ReportOptions};
use spectral_transfer::{PositivePairGraph, VertexSet};

/// Conductance by listing subsets as bitmasks, each cut summed from scratch.
fn brute_conductance(g: &PositivePairGraph, cluster: &VertexSet) -> f64 {
    let members = cluster.members();
    let s = members.len();
    let total: f64 = members.iter().map(|&x| g.marginal(x)).sum();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << s) - 1 {
        let a = VertexSet::new((0..s).filter(|b| mask >> b & 1 == 1).map(|b| members[b]));
        let rest = VertexSet::new((0..s).filter(|b| mask >> b & 1 == 0).map(|b| members[b]));
        let wa = g.set_weight(&a).unwrap();
        if wa <= total / 2.0 * (1.0 + 1e-12) {
            best = best.min(g.cut_weight(&a, &rest) / wa);
        }
    }
    best
}

#[test]
fn expansion_on_two_pair_graph() {
    let g = common::g4();
    let a = VertexSet::new([0, 1]);
    let b = VertexSet::new([2, 3]);
    assert!((metrics::expansion(&g, &a, &b).unwrap() - 0.1).abs() < 1e-15);
    assert!((metrics::max_expansion(&g, &a, &b).unwrap() - 0.2).abs() < 1e-15);
    assert!(metrics::min_expansion(&g, &a, &b).unwrap().abs() < 1e-15);
    assert!((metrics::compute_alpha(&g, &[a, b]).unwrap() - 0.2).abs() < 1e-15);
}

#[test]
fn single_vertex_cluster_has_infinite_conductance() {
    let g = common::g4();
    assert_eq!(metrics::exact_conductance(&g, &VertexSet::singleton(2)).unwrap(), f64::INFINITY);
}

#[test]
fn weakly_joined_halves_have_small_gamma() {
    let mut p = reference_sbm(0);
    p.cluster_size = 10;
    let mut last = f64::INFINITY;
    for eps in [0.5, 0.1, 0.01, 0.0] {
        p.intra_topology = IntraTopology::TwoCommunities { epsilon: eps };
        let inst = generate_sbm(&p).unwrap();
        let gamma = metrics::conductance_gamma(&inst.graph, inst.domain.clusters(), 22).unwrap();
        assert!(gamma.gamma.lower() < last);
        last = gamma.gamma.lower();
    }
    assert_eq!(last, 0.0);
}

#[test]
fn reference_report_verdicts_hold() {
    let inst = generate_sbm(&reference_sbm(0)).unwrap();
    let stats = metrics::assumption_report(&inst.graph, &inst.domain, 4, &ReportOptions::default()).unwrap();
    let v = stats.verdicts;
    assert!(v.cross_cluster.holds && v.intra_conductance.holds);
    assert!(v.relative_expansion.holds && v.average_relative_expansion.holds);
    assert!(matches!(stats.gamma, Conductance::Bracket { .. }));
    assert_eq!(stats.lambda_spectrum.len(), 200);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn min_avg_max_expansion_ordered(g in small_graph(), sa in any::<u64>(), sb in any::<u64>()) {
        let a = random_subset(g.n() - 1, sa);
        let rest = a.complement(g.n());
        let pick = random_subset(rest.len(), sb);
        let b = VertexSet::new(pick.iter().map(|i| rest.members()[i]));
        let lo = metrics::min_expansion(&g, &a, &b).unwrap();
        let mid = metrics::expansion(&g, &a, &b).unwrap();
        let hi = metrics::max_expansion(&g, &a, &b).unwrap();
        prop_assert!(lo <= mid + 1e-15 && mid <= hi + 1e-15);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&hi));
    }

    #[test]
    fn gray_code_conductance_matches_brute_force(n in 3usize..11, seed in any::<u64>()) {
        let g = random_graph(n + 2, 0.5, seed);
        let cluster = VertexSet::new(0..n);
        let exact = metrics::exact_conductance(&g, &cluster).unwrap();
        prop_assert!((exact - brute_conductance(&g, &cluster)).abs() < 1e-12);
    }

    #[test]
    fn exact_gamma_lies_in_bracket(n in 3usize..12, seed in any::<u64>(), extra in 1usize..6) {
        let g = random_graph(n + extra, 0.5, seed);
        let cluster = VertexSet::new(0..n);
        let exact = metrics::exact_conductance(&g, &cluster).unwrap();
        let bracket = metrics::cheeger_bracket(&g, &cluster).unwrap();
        prop_assert!(bracket.lower() <= exact + 1e-12, "{} > {exact}", bracket.lower());
        prop_assert!(exact <= bracket.upper() + 1e-12, "{exact} > {}", bracket.upper());
    }

    #[test]
    fn restricted_gap_dominates_half_gamma_squared(n in 2usize..12, seed in any::<u64>(), extra in 1usize..6) {
        let g = random_graph(n + extra, 0.5, seed);
        let cluster = VertexSet::new(0..n);
        let gamma = metrics::exact_conductance(&g, &cluster).unwrap();
        let gap = metrics::restricted_gap(&g, &cluster).unwrap();
        prop_assert!(gap >= gamma * gamma / 2.0 - 1e-12, "{gap} < {}", gamma * gamma / 2.0);
    }

    #[test]
    fn alpha_is_largest_leakage(seed in any::<u64>(), m in 2usize..5) {
        let g = random_graph(4 * m, 0.3, seed);
        let domain = block_domain(4 * m, m, 1);
        let leak = metrics::cluster_leakage(&g, domain.clusters()).unwrap();
        let alpha = metrics::compute_alpha(&g, domain.clusters()).unwrap();
        prop_assert_eq!(alpha, leak.iter().copied().fold(0.0, f64::max));
        for (c, l) in domain.clusters().iter().zip(&leak) {
            let rest = c.complement(g.n());
            prop_assert!((metrics::max_expansion(&g, c, &rest).unwrap() - l).abs() < 1e-15);
        }
    }
}
