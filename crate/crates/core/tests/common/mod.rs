#![allow(dead_code)]

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectral_transfer::{DomainSpec, Normalization, PositivePairGraph, VertexSet};

/// Random symmetric weights: a ring (so every marginal is positive) plus
/// each other pair with probability `density`.
pub fn random_graph(n: usize, density: f64, seed: u64) -> PositivePairGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = DMatrix::zeros(n, n);
    for x in 0..n {
        let y = (x + 1) % n;
        let v = 0.5 + rng.random::<f64>();
        w[(x, y)] += v;
        w[(y, x)] += v;
    }
    for x in 0..n {
        for y in x..n {
            if rng.random::<f64>() < density {
                let v = rng.random::<f64>();
                w[(x, y)] += v;
                if x != y {
                    w[(y, x)] += v;
                }
            }
        }
    }
    PositivePairGraph::from_weights(w, Normalization::Rescale).unwrap()
}

/// Contiguous blocks of sizes as equal as possible, the first `2r` split into
/// source and target classes.
pub fn block_domain(n: usize, m: usize, r: usize) -> DomainSpec {
    let clusters = (0..m).map(|c| VertexSet::new(c * n / m..(c + 1) * n / m)).collect();
    DomainSpec::new(n, clusters, r).unwrap()
}

pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(rows, cols, |_, _| 2.0 * rng.random::<f64>() - 1.0)
}

/// Random orthogonal `k×k` matrix from the QR factor of a Gaussian-ish matrix.
pub fn random_orthogonal(k: usize, seed: u64) -> DMatrix<f64> {
    random_matrix(k, k, seed).qr().q()
}

/// The 4-vertex graph with two tight pairs joined by a weak edge and
/// self-loops on the endpoints. All marginals are `1/4`.
pub fn g4() -> PositivePairGraph {
    PositivePairGraph::from_edges(
        4,
        &[(0, 1, 0.2), (2, 3, 0.2), (1, 2, 0.05), (0, 0, 0.05), (3, 3, 0.05)],
        Normalization::Strict,
    )
    .unwrap()
}

/// Strategy for `(n, seed, density)` describing a small random graph.
pub fn small_graph() -> impl Strategy<Value = PositivePairGraph> {
    (4usize..14, any::<u64>(), 0.1f64..0.9).prop_map(|(n, seed, d)| random_graph(n, d, seed))
}

pub fn random_subset(n: usize, seed: u64) -> VertexSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let set = VertexSet::new((0..n).filter(|_| rng.random::<bool>()));
    if set.is_empty() {
        VertexSet::singleton(rng.random_range(0..n))
    } else {
        set
    }
}
