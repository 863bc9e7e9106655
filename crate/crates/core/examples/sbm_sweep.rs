//! Sweep `t` on the reference block model and write the CSV to stdout.

use spectral_transfer::generators::{generate_sbm, reference_sbm};
use spectral_transfer::harness::{run_sweep, write_sweep_csv, SweepConfig};

fn main() -> spectral_transfer::Result<()> {
    let inst = generate_sbm(&reference_sbm(0))?;
    let config = SweepConfig::new((1..=5).collect(), vec![4, 8])?;
    let rows = run_sweep(&inst.graph, &inst.domain, &config)?;
    write_sweep_csv(&rows, std::io::stdout())?;
    Ok(())
}
