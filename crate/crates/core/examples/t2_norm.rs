//! Induced sup-norm of T^2 for growing complex wavenumbers.
use backscatter::solver::{estimate_t2_norm, Scatterer};
use backscatter::{EtaRule, Grid3, Potential};

fn main() -> backscatter::Result<()> {
    let q = Potential::bump(0.5, 1.0)?;
    let s = Scatterer::new(&q, Grid3::new(1.0, 16)?)?;
    for kappa in [10.0, 20.0, 40.0] {
        let k = EtaRule::AInvLog.wavenumber(kappa, 1.0)?;
        println!("kappa {kappa:4}: ||T^2|| ~ {:.4e}", estimate_t2_norm(&s, k, [0.0, 0.0, 1.0], 1));
    }
    Ok(())
}
