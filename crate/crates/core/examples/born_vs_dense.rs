//! Born series against the dense LU solve on a small grid.
use backscatter::solver::{born_solve, direct_solve};
use backscatter::{ComplexWavenumber, Grid3, Potential};

fn main() -> backscatter::Result<()> {
    let q = Potential::bump(0.5, 1.0)?;
    let grid = Grid3::new(1.0, 12)?;
    let beta = [0.0, 0.0, 1.0];
    for (kappa, eta) in [(4.0, 0.0), (10.0, 10f64.ln())] {
        let k = ComplexWavenumber::new(kappa, eta)?;
        let series = born_solve(&q, &grid, k, beta, 1e-10, 400)?;
        let dense = direct_solve(&q, &grid, k, beta)?.epsilon();
        println!("kappa {kappa:5.1} eta {eta:.3}: sup |eps_series - eps_dense| = {:.3e}", series.sup_diff(&dense));
    }
    Ok(())
}
