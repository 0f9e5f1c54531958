//! Plane-integral identities checked against independent quadratures.

use num_complex::Complex64;

use crate::error::Result;
use crate::geom::{cvec, neg, scale, Vec3};
use crate::kernels::fourier3;
use crate::potential::{sample_on_grid, Grid3, Potential};
use crate::radon::{complex_direction_fourier, plane_integral, radon_for};
use crate::report::{EstimateReport, Verdict};

/// Resolution of the Cartesian oracle for complex-direction transforms.
pub const ORACLE_N: usize = 64;

/// `∫ q e^{iζβ·x} dx` by the cell-centred rule on an `n³` grid.
pub fn cartesian_transform(q: &Potential, xi_re: Vec3, xi_im: Vec3, n: usize) -> Result<Complex64> {
    let grid = Grid3::new(q.support_radius, n)?;
    let samples = sample_on_grid(q, &grid)?;
    // the imaginary part of the frequency becomes a real damping factor
    let damped: Vec<Complex64> = samples
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let x = grid.node(i);
            Complex64::new(v * (-crate::geom::dot(xi_im, x)).exp(), 0.0)
        })
        .collect();
    Ok(fourier3(&damped, &grid, xi_re))
}

/// Integral identity, evenness, and the complex-direction transform against
/// the Cartesian oracle, each as a worst relative deviation over `betas`.
///
/// Passes if the integral identity and oracle agreement are below `1e-3` and
/// evenness holds to `1e-9`.
pub fn radon_identities(q: &Potential, betas: &[Vec3], kappa: f64, eta: f64) -> Result<EstimateReport> {
    let mut rep = EstimateReport::new(
        "radon",
        "integral identity < 1e-3, evenness < 1e-9, complex-direction transform vs Cartesian quadrature < 1e-3",
    );
    let total = q.integral();
    let mut identity = 0.0f64;
    let mut evenness = 0.0f64;
    let mut oracle = 0.0f64;
    for &beta in betas {
        let s = radon_for(q, beta, kappa);
        if total != 0.0 {
            identity = identity.max((s.integral() - total).abs() / total.abs());
        }
        for &l in s.lambdas.iter().step_by(37) {
            let a = plane_integral(q, beta, l);
            let b = plane_integral(q, neg(beta), -l);
            let scale_ = a.abs().max(1e-12 * total.abs()).max(f64::MIN_POSITIVE);
            evenness = evenness.max((a - b).abs() / scale_);
        }
        let via_radon = complex_direction_fourier(q, kappa, eta, beta);
        let direct = cartesian_transform(q, scale(beta, kappa), scale(beta, eta), ORACLE_N)?;
        if direct.norm() > 0.0 {
            oracle = oracle.max((via_radon - direct).norm() / direct.norm());
        }
        // the radial path is a third, independent evaluation
        let radial = q.fourier(cvec(scale(beta, kappa), scale(beta, eta)));
        if radial.norm() > 0.0 {
            rep.extra("radial_agreement", (via_radon - radial).norm() / radial.norm());
        }
    }
    rep.push(kappa, eta, oracle);
    rep.extra("integral_identity", identity);
    rep.extra("evenness", evenness);
    rep.extra("oracle_agreement", oracle);
    rep.verdict = Verdict::from_bool(identity < 1e-3 && evenness < 1e-9 && oracle < 1e-3);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::spiral_directions;
    use crate::potential::PotentialKind;

    #[test]
    fn identities_hold_for_an_offset_bump() {
        let q = Potential::new(PotentialKind::Bump, 1.0, 0.7, 1.0, [0.1, 0.2, -0.1]).unwrap();
        let rep = radon_identities(&q, &spiral_directions(3), 6.0, 1.0).unwrap();
        assert!(rep.verdict.passed(), "{:?}", rep.extras);
    }
}
