//! Compute the cluster statistics the transfer bounds depend on and print the
//! assumption verdicts for a few block models.

use spectral_transfer::generators::{generate_sbm, reference_sbm, IntraTopology};
use spectral_transfer::metrics::{assumption_report, ReportOptions};

fn main() -> spectral_transfer::Result<()> {
    let mut weak = reference_sbm(0);
    weak.cluster_size = 12;
    weak.intra_topology = IntraTopology::TwoCommunities { epsilon: 0.001 };
    let mut reference = reference_sbm(0);
    reference.cluster_size = 12;

    for (name, params) in [("reference", reference), ("two communities", weak)] {
        let inst = generate_sbm(&params)?;
        let stats = assumption_report(&inst.graph, &inst.domain, 4, &ReportOptions::default())?;
        println!("{name}");
        println!("  alpha {:.5}  rho {:.5}  beta {:.5}  tau {:.3}", stats.alpha, stats.rho, stats.beta_max, stats.tau);
        println!("  gamma in [{:.4}, {:.4}]", stats.gamma.lower(), stats.gamma.upper());
        let v = stats.verdicts;
        println!(
            "  verdicts: cross-cluster {}, conductance {}, relative expansion {}, average {}",
            v.cross_cluster.holds, v.intra_conductance.holds, v.relative_expansion.holds, v.average_relative_expansion.holds
        );
    }
    Ok(())
}
