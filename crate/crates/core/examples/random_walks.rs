//! Lazy-walk smoothing and the random-walk reading of powers of the
//! normalized adjacency.

use spectral_transfer::graph::{Normalization, PositivePairGraph, VertexSet};
use spectral_transfer::oracles::{adjacency_power, conjugated_walk_power, indicator_vector, random_walk_probability, smoothed_power};

fn main() -> spectral_transfer::Result<()> {
    let graph = PositivePairGraph::from_edges(
        4,
        &[(0, 1, 0.2), (2, 3, 0.2), (1, 2, 0.05), (0, 0, 0.05), (3, 3, 0.05)],
        Normalization::Strict,
    )?;
    let a = VertexSet::new([0, 1]);
    let g = indicator_vector(&graph, &a);
    for t in 0..4 {
        let v = smoothed_power(&graph, &g, t);
        println!("t = {t}: {:?}", v.as_slice());
    }
    for t in 0..4 {
        println!("Pr[x_{t} in {{0, 1}} | x_0 = 1] = {:.4}", random_walk_probability(&graph, 1, &a, t));
    }
    let gap = (adjacency_power(&graph, 5) - conjugated_walk_power(&graph, 5)).norm();
    println!("conjugation identity gap at t = 5: {gap:.2e}");
    Ok(())
}
