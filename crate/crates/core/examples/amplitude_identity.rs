//! Difference of two amplitudes against the volume integral of (q1 - q2) u1 u2.
use backscatter::amplitude::SolverConfig;
use backscatter::cli::{companion_potential, random_pairs};
use backscatter::harness::amplitude_difference_residual;
use backscatter::{ComplexWavenumber, Grid3, Potential};

fn main() -> backscatter::Result<()> {
    let q1 = Potential::bump(0.5, 1.0)?;
    let q2 = companion_potential(&q1)?;
    let grid = Grid3::new(1.0, 16)?;
    let k = ComplexWavenumber::new(6.0, 6f64.ln())?;
    for (beta, alpha) in random_pairs(2, 3) {
        let r = amplitude_difference_residual(&q1, &q2, beta, alpha, k, &grid, SolverConfig::default())?;
        println!("relative residual {r:.3e}");
    }
    Ok(())
}
