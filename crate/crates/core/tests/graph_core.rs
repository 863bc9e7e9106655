mod common;

use proptest::prelude::*;

use common::{g4, random_subset, small_graph};
use spectral_transfer::io;
use spectral_transfer::{DomainSpec, Error, Normalization, PositivePairGraph, VertexSet};

#[test]
fn g4_marginals_are_uniform() {
    let g = g4();
    for x in 0..4 {
        assert!((g.marginal(x) - 0.25).abs() < 1e-15);
    }
    assert!((g.total_mass() - 1.0).abs() < 1e-15);
}

#[test]
fn strict_rejects_unnormalized_and_rescale_fixes_it() {
    let edges = [(0, 1, 1.0), (1, 2, 1.0)];
    assert!(matches!(
        PositivePairGraph::from_edges(3, &edges, Normalization::Strict),
        Err(Error::NotNormalized { .. })
    ));
    let g = PositivePairGraph::from_edges(3, &edges, Normalization::Rescale).unwrap();
    assert!((g.weight(0, 1) - 0.25).abs() < 1e-15);
    assert!((g.marginal(1) - 0.5).abs() < 1e-15);
}

#[test]
fn bad_inputs_are_rejected() {
    let strict = Normalization::Strict;
    assert!(PositivePairGraph::from_edges(2, &[(0, 5, 1.0)], strict).is_err());
    assert!(PositivePairGraph::from_edges(2, &[(0, 1, -0.5), (0, 0, 1.5)], strict).is_err());
    assert!(PositivePairGraph::from_edges(3, &[(0, 1, 0.5), (0, 0, 0.5)], strict).is_err());
    assert!(DomainSpec::new(4, vec![VertexSet::new([0, 1]), VertexSet::new([1, 2])], 1).is_err());
    assert!(DomainSpec::new(4, vec![VertexSet::new([0, 1])], 1).is_err());
}

#[test]
fn json_round_trip_with_domain() {
    let g = g4();
    let domain = DomainSpec::new(4, vec![VertexSet::new([0]), VertexSet::new([1]), VertexSet::new([2, 3])], 1).unwrap();
    let text = io::to_json_string(&g, Some(&domain));
    let back = io::from_json_str(&text, Normalization::Strict).unwrap();
    assert_eq!(back.graph, g);
    assert_eq!(back.domain.as_ref(), Some(&domain));
    assert_eq!(io::to_json_string(&back.graph, back.domain.as_ref()), text);
}

#[test]
fn malformed_json_is_a_parse_error() {
    let err = io::from_json_str("{\"version\": 1, \"n\": ", Normalization::Strict).unwrap_err();
    assert!(matches!(err, Error::Parse { .. } | Error::Json(_)), "{err:?}");
    let err = io::from_json_str("{\"version\": 99, \"n\": 2, \"edges\": []}", Normalization::Strict).unwrap_err();
    assert!(matches!(err, Error::SchemaVersionMismatch { .. }), "{err:?}");
}

proptest! {
    #[test]
    fn cut_is_symmetric(g in small_graph(), sa in any::<u64>(), sb in any::<u64>()) {
        let a = random_subset(g.n(), sa);
        let b = random_subset(g.n(), sb);
        prop_assert!((g.cut_weight(&a, &b) - g.cut_weight(&b, &a)).abs() < 1e-14);
    }

    #[test]
    fn set_mass_is_cut_to_everything(g in small_graph(), s in any::<u64>()) {
        let a = random_subset(g.n(), s);
        let full = VertexSet::full(g.n());
        prop_assert!((g.set_weight(&a).unwrap() - g.cut_weight(&a, &full)).abs() < 1e-14);
    }

    #[test]
    fn marginals_sum_to_one(g in small_graph()) {
        prop_assert!((g.marginals().sum() - 1.0).abs() < 1e-12);
        prop_assert!(g.marginals().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn edges_rebuild_the_graph(g in small_graph()) {
        let rebuilt = PositivePairGraph::from_edges(g.n(), &g.edges(), Normalization::Strict).unwrap();
        prop_assert!((rebuilt.weights() - g.weights()).norm() < 1e-15);
    }
}
