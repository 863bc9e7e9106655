//! Build a small positive-pair graph, attach a domain split and round-trip it
//! through the JSON file format.

use spectral_transfer::io;
use spectral_transfer::{DomainSpec, Normalization, PositivePairGraph, VertexSet};

fn main() -> spectral_transfer::Result<()> {
    // Two classes, each with a source pair and a target pair.
    let edges = [
        (0, 1, 0.1),
        (2, 3, 0.1),
        (4, 5, 0.1),
        (6, 7, 0.1),
        (0, 4, 0.04),
        (1, 5, 0.04),
        (2, 6, 0.04),
        (3, 7, 0.04),
        (1, 2, 0.02),
        (5, 6, 0.02),
    ];
    let graph = PositivePairGraph::from_edges(8, &edges, Normalization::Rescale)?;
    let clusters = vec![
        VertexSet::new([0, 1]),
        VertexSet::new([2, 3]),
        VertexSet::new([4, 5]),
        VertexSet::new([6, 7]),
    ];
    let domain = DomainSpec::new(8, clusters, 2)?;

    println!("total mass {:.6}", graph.total_mass());
    for x in 0..graph.n() {
        println!("w({x}) = {:.4}", graph.marginal(x));
    }
    let s = domain.source_union();
    let t = domain.target_union();
    println!("w(S, T) = {:.4}", graph.cut_weight(&s, &t));

    let text = io::to_json_string(&graph, Some(&domain));
    let back = io::from_json_str(&text, Normalization::Strict)?;
    assert_eq!(back.graph, graph);
    println!("round trip ok ({} bytes)", text.len());
    Ok(())
}
