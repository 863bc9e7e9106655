//! Closed-form minimizers of the generalized loss and how they relate to the
//! spectrum of the normalized adjacency.

use spectral_transfer::generators::{generate_sbm, reference_sbm};
use spectral_transfer::spectral;

fn main() -> spectral_transfer::Result<()> {
    let mut params = reference_sbm(7);
    params.cluster_size = 10;
    let inst = generate_sbm(&params)?;
    let graph = &inst.graph;

    let dec = spectral::decompose(graph)?;
    let head: Vec<String> = dec.eigenvalues().iter().take(6).map(|l| format!("{l:.4}")).collect();
    println!("smallest Laplacian eigenvalues: {}", head.join(" "));

    for sigma in [1.0, 2.0, 4.0] {
        let rep = spectral::minimize_loss(graph, 4, sigma)?;
        let loss = spectral::generalized_loss(graph, rep.features(), sigma)?;
        println!("sigma = {sigma}: minimum loss {loss:.6}");
    }

    let rep = spectral::minimize_loss(graph, 4, 1.0)?;
    let l1 = spectral::generalized_loss(graph, rep.features(), 1.0)?;
    let scl = spectral::spectral_contrastive_loss(graph, rep.features())?;
    println!("sigma = 1 loss minus spectral contrastive loss: {:.6}", l1 - scl);
    Ok(())
}
