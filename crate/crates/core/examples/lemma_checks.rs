//! Run every lemma checker on a small block model and print the worst margins.

use spectral_transfer::generators::{generate_sbm, reference_sbm};
use spectral_transfer::oracles::LemmaChecker;
use spectral_transfer::spectral;

fn main() -> spectral_transfer::Result<()> {
    let mut params = reference_sbm(3);
    params.cluster_size = 12;
    let inst = generate_sbm(&params)?;
    let rep = spectral::minimize_loss(&inst.graph, 4, 2.0)?;
    let checker = LemmaChecker::new(&inst.graph, &inst.domain)?.with_representation(&rep);
    println!("t range {:?}", checker.default_t_range());
    for report in checker.check_all()? {
        println!(
            "{:<20} {:?}  instances {:>6}  worst margin {}",
            report.lemma_id.name(),
            report.verdict,
            report.instances,
            report.worst_margin.map_or("n/a".to_string(), |m| format!("{m:.3e}"))
        );
    }
    Ok(())
}
