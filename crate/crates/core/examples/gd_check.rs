//! Gradient descent on the generalized loss versus the closed-form minimizer.

use spectral_transfer::generators::{generate_sbm, reference_sbm};
use spectral_transfer::harness::{gd_crosscheck, GdConfig};

fn main() -> spectral_transfer::Result<()> {
    let mut params = reference_sbm(1);
    params.cluster_size = 10;
    let inst = generate_sbm(&params)?;
    for k in [2, 4, 40] {
        let report = gd_crosscheck(&inst.graph, &GdConfig { k, ..GdConfig::default() })?;
        println!(
            "k = {k:>2}: loss {:.8} vs closed form {:.8}, product gap {:.2e}",
            report.final_loss, report.closed_form_loss, report.product_gap
        );
    }
    Ok(())
}
