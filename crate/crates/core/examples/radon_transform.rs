//! Plane integrals of an off-centre bump and the transform along a complex direction.
use backscatter::radon::{complex_direction_fourier, radon_for};
use backscatter::{Potential, PotentialKind};

fn main() -> backscatter::Result<()> {
    let q = Potential::new(PotentialKind::Bump, 1.0, 0.6, 1.0, [0.2, 0.0, -0.1])?;
    let beta = [0.0, 0.6, 0.8];
    let s = radon_for(&q, beta, 0.0);
    println!("integral over planes {:.10}, volume integral {:.10}", s.integral(), q.integral());
    for (kappa, eta) in [(10.0, 0.0), (10.0, 2.0), (40.0, 40f64.ln())] {
        let v = complex_direction_fourier(&q, kappa, eta, beta);
        let real = q.fourier_real([0.0, 0.6 * kappa, 0.8 * kappa]);
        println!("kappa {kappa:4} eta {eta:.3}: |q~| = {:.4e} (at eta = 0: {:.4e})", v.norm(), real.norm());
    }
    Ok(())
}
