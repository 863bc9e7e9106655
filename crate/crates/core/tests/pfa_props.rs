mod common;

use nalgebra::DVector;
use proptest::prelude::*;

use common::{block_domain, random_graph, random_matrix, random_orthogonal};
use spectral_transfer::oracles::{indicator_vector, low_rank_power_naive};
use spectral_transfer::pfa::{self, fit_pfa};
use spectral_transfer::{spectral, Representation};

#[test]
fn argmax_breaks_ties_low() {
    assert_eq!(pfa::argmax(&[1.0, 3.0, 3.0]), 1);
    assert_eq!(pfa::argmax(&[0.0, 0.0]), 0);
}

#[test]
fn bound_shrinks_with_t() {
    let b: Vec<f64> = (1..5).map(|t| pfa::transfer_bound(0.03, 0.03, 0.9, 2, 1.0, t)).collect();
    assert!(b.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(pfa::transfer_t_max(0.1, 0.16), Some(2));
    assert_eq!(pfa::transfer_t_max(0.1, 0.159), Some(1));
    assert_eq!(pfa::transfer_t_max(0.0, 0.16), None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// `⟨f(x), Σ^{t−1}b_i⟩·√w(x)·w(S) = ((F̃F̃ᵀ)^t g_{S_i})_x`.
    #[test]
    fn scores_are_low_rank_powers(seed in any::<u64>(), t in 1u32..6, k in 1usize..6) {
        let n = 16;
        let g = random_graph(n, 0.4, seed);
        let domain = block_domain(n, 4, 2);
        let rep = Representation::from_features(&g, random_matrix(n, k, seed ^ 7)).unwrap();
        let head = fit_pfa(&rep, &g, &domain).unwrap();
        let ws = g.set_weight(&domain.source_union()).unwrap();
        for i in 0..2 {
            let src = domain.source(i);
            let power = low_rank_power_naive(&rep, &indicator_vector(&g, src), t);
            for x in 0..n {
                let score = head.scores(&rep, x, t).unwrap()[i];
                let lhs = score * g.marginal(x).sqrt() * ws;
                prop_assert!((lhs - power[x]).abs() < 1e-9 * (1.0 + power[x].abs()), "{lhs} vs {}", power[x]);
            }
        }
    }

    #[test]
    fn predictions_are_rotation_invariant(seed in any::<u64>(), t in 1u32..5) {
        let n = 16;
        let g = random_graph(n, 0.4, seed);
        let domain = block_domain(n, 4, 2);
        let rep = spectral::minimize_loss(&g, 4, 2.0).unwrap();
        let rotated = rep.transformed(&g, &random_orthogonal(4, seed)).unwrap();
        let a = fit_pfa(&rep, &g, &domain).unwrap();
        let b = fit_pfa(&rotated, &g, &domain).unwrap();
        for x in 0..n {
            let sa = a.scores(&rep, x, t).unwrap();
            let sb = b.scores(&rotated, x, t).unwrap();
            for (u, v) in sa.iter().zip(&sb) {
                prop_assert!((u - v).abs() < 1e-9 * (1.0 + u.abs()));
            }
        }
    }

    #[test]
    fn target_error_is_a_probability(seed in any::<u64>(), t in 1u32..5) {
        let n = 12;
        let g = random_graph(n, 0.5, seed);
        let domain = block_domain(n, 4, 2);
        let rep = spectral::minimize_loss(&g, 3, 2.0).unwrap();
        let report = fit_pfa(&rep, &g, &domain).unwrap().target_error(&rep, &g, &domain, t).unwrap();
        prop_assert!((0.0..=1.0).contains(&report.target_error));
        let total: f64 = report.per_class_errors.iter().sum();
        prop_assert!((total - report.target_error).abs() < 1e-15);
    }
}

#[test]
fn sigma_power_matches_repeated_product() {
    let g = random_graph(10, 0.5, 3);
    let domain = block_domain(10, 2, 1);
    let rep = Representation::from_features(&g, random_matrix(10, 3, 4)).unwrap();
    let head = fit_pfa(&rep, &g, &domain).unwrap();
    let sigma = head.sigma_matrix().clone();
    let cube = &sigma * &sigma * &sigma;
    assert!((head.sigma_power(3) - cube).norm() < 1e-12);
    let v = DVector::from_element(3, 1.0);
    assert!((head.sigma_power(0) * &v - v).norm() < 1e-12);
}
