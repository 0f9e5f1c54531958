//! The weighted shell integrals J and their split.
use backscatter::harness::j_integrals;
use backscatter::EtaRule;

fn main() -> backscatter::Result<()> {
    let (rows, rep) = j_integrals(&[20.0, 80.0, 320.0], EtaRule::AInvLog, 1.0, 4.0)?;
    for r in &rows {
        println!(
            "kappa {:6.1}: kappa*J {:.4} kappa*JJ {:.4} split residual {:.1e}",
            r.kappa,
            r.kappa * r.j,
            r.kappa * r.jj,
            r.split_residual()
        );
    }
    println!("{:?}", rep.verdict);
    Ok(())
}
