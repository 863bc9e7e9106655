//! Fit the preconditioned feature-averaging head on the source classes and
//! measure its target error for a range of `t`.

use spectral_transfer::generators::{generate_sbm, reference_sbm};
use spectral_transfer::metrics::{assumption_report_with, ReportOptions};
use spectral_transfer::{pfa, spectral, Representation};

fn main() -> spectral_transfer::Result<()> {
    let inst = generate_sbm(&reference_sbm(0))?;
    let (graph, domain) = (&inst.graph, &inst.domain);
    let dec = spectral::decompose(graph)?;
    let stats = assumption_report_with(graph, domain, &dec, 4, &ReportOptions::default())?;
    let rep = Representation::from_decomposition(graph, &dec, 4, 2.0)?;
    let head = pfa::fit_pfa(&rep, graph, domain)?;

    let t_max = pfa::transfer_t_max(stats.alpha, stats.rho);
    println!("bound applies for t <= {t_max:?}");
    for t in 1..=5 {
        let report = head.target_error(&rep, graph, domain, t)?;
        let bound = pfa::transfer_bound(stats.alpha, stats.rho, stats.lambda_k1, domain.r(), stats.source_target_mass_ratio, t);
        println!("t = {t}: target error {:.4}, bound {bound:.4}", report.target_error);
    }

    let probe = pfa::linear_probe_error(&rep, graph, domain.clusters())?;
    println!("linear probe error {:.2e} (bound {:.2e})", probe.error, probe.bound);
    Ok(())
}
