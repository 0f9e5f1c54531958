//! The contraction factor nu along eta = ln(kappa)/a.
use backscatter::harness::nu_sweep;
use backscatter::{EtaRule, Potential};

fn main() -> backscatter::Result<()> {
    let q = Potential::bump(0.5, 1.0)?;
    let rep = nu_sweep(&q, &[20.0, 40.0, 80.0, 160.0], EtaRule::AInvLog)?;
    for p in &rep.sweep {
        println!("kappa {:6.1} eta {:.3} nu {:.4}", p.kappa, p.eta, p.value);
    }
    println!("{:?}: {}", rep.verdict, rep.criterion);
    Ok(())
}
