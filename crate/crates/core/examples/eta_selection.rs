//! Smallest eta for which the growth envelope reaches its zero-frequency bound.
use backscatter::harness::{find_eta, p_max};
use backscatter::Potential;

fn main() -> backscatter::Result<()> {
    let q = Potential::bump(1.0, 1.0)?;
    let p = p_max(&q);
    println!("P = {p:.6}");
    for kappa in [20.0, 40.0, 80.0] {
        let s = find_eta(&q, kappa, 1e-6, p)?;
        println!("kappa {kappa:5.1}: eta {:.4}, eta / ln kappa {:.3}", s.eta, s.eta / f64::ln(kappa));
    }
    Ok(())
}
