//! Integrals in prolate spheroidal coordinates with foci x and y.
use backscatter::prolate::{i1_integral, prolate_integral, s_max, ProlateFrame, ProlateQuadrature};
use backscatter::{ComplexWavenumber, Potential};

fn main() -> backscatter::Result<()> {
    let q = Potential::bump(1.0, 1.0)?;
    let frame = ProlateFrame::new([-0.3, 0.0, 0.1], [0.4, 0.2, 0.0])?;
    let quad = ProlateQuadrature::default();
    let v = prolate_integral(&frame, |z| q.eval(z), s_max(&frame, &q), quad);
    println!("volume integral: prolate {v:.8}, closed form {:.8}", q.integral());
    for kappa in [10.0, 40.0] {
        let k = ComplexWavenumber::new(kappa, kappa.ln())?;
        let i1 = i1_integral(&q, &frame, k, quad);
        println!("kappa {kappa}: |I1| |kappa + i eta| = {:.4}", i1.norm() * k.zeta().norm());
    }
    Ok(())
}
