//! Spherical quadrature about `β` for integrands carrying the symbol
//! `1/(s² - ζβ·s)`.
//!
//! With `s = r(tβ + √(1-t²)(cos φ e₁ + sin φ e₂))` the symbol becomes
//! `1/(r(r - ζt))`; the `r²` Jacobian cancels the pole at the origin and the
//! remaining near-singular ridge sits at `t* = rκ/γ`, which is used as a
//! breakpoint of the inner integral.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geom::{add, complete_frame, scale, Vec3};
use crate::kernels::ComplexWavenumber;
use crate::quadrature::{adaptive_complex_pieces, clean_breaks};

/// Parameters of [`ridge_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgeQuadrature {
    /// Outer radius of the ball `|s| ≤ r_max`.
    pub r_max: f64,
    /// Inner radius of the shell reported separately (tail estimate).
    pub shell_from: f64,
    /// Trapezoid nodes in `φ`; `1` means the integrand is axially symmetric.
    pub phi_nodes: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

/// Ball and shell parts of a ridge integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgeValue {
    pub inner: Complex64,
    pub shell: Complex64,
}

impl RidgeValue {
    pub fn total(&self) -> Complex64 {
        self.inner + self.shell
    }
}

fn t_breaks(r: f64, k: ComplexWavenumber) -> Vec<f64> {
    let kappa = k.kappa;
    let gamma = k.gamma();
    let mut extra = vec![0.0];
    if gamma > 0.0 {
        let ts = r * kappa / gamma;
        let width = (r * k.eta / gamma).max(1e-9);
        extra.push(ts);
        for c in [1.0, 10.0] {
            extra.push(ts - c * width);
            extra.push(ts + c * width);
        }
    }
    // the forward lobe near s = κβ narrows like 1/(κr) in 1 - t
    for c in [1.0, 10.0, 100.0] {
        extra.push(1.0 - c / (1.0 + kappa * r));
    }
    clean_breaks(-1.0, 1.0, &extra)
}

fn r_breaks(lo: f64, hi: f64, kappa: f64) -> Vec<f64> {
    let mut extra = vec![0.25, 1.0, 4.0, 0.5 * kappa, 2.0 * kappa];
    for d in [0.5, 2.0, 8.0, 32.0] {
        extra.push(kappa - d);
        extra.push(kappa + d);
    }
    extra.push(kappa);
    clean_breaks(lo, hi, &extra)
}

/// `∫_{|s| ≤ r_max} f(r, t, s) r² dr dt dφ` with `f` receiving the radius,
/// the cosine against `β` and the point itself.
pub fn ridge_integral<F>(
    beta: Vec3,
    k: ComplexWavenumber,
    rule: &RidgeQuadrature,
    f: F,
) -> Result<RidgeValue>
where
    F: Fn(f64, f64, Vec3) -> Complex64,
{
    let (e1, e2) = complete_frame(beta);
    let phi_nodes = rule.phi_nodes.max(1);
    let dirs: Vec<(f64, f64)> = (0..phi_nodes)
        .map(|m| {
            let p = 2.0 * PI * m as f64 / phi_nodes as f64;
            (p.cos(), p.sin())
        })
        .collect();
    let phi_weight = 2.0 * PI / phi_nodes as f64;
    let inner_abs = rule.abs_tol / rule.r_max.max(1.0);
    let mut failure: Option<Error> = None;

    let mut radial = |lo: f64, hi: f64| -> Result<Complex64> {
        let outer = adaptive_complex_pieces(
            |r| {
                if failure.is_some() || r == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let inner = adaptive_complex_pieces(
                    |t| {
                        let st = (1.0 - t * t).max(0.0).sqrt();
                        let axial = scale(beta, r * t);
                        let mut acc = Complex64::new(0.0, 0.0);
                        for &(c, s) in &dirs {
                            let perp = add(scale(e1, r * st * c), scale(e2, r * st * s));
                            acc += f(r, t, add(axial, perp));
                        }
                        acc * (phi_weight * r * r)
                    },
                    &t_breaks(r, k),
                    inner_abs,
                    0.1 * rule.rel_tol,
                );
                match inner {
                    Ok(v) => v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        Complex64::new(0.0, 0.0)
                    }
                }
            },
            &r_breaks(lo, hi, k.kappa),
            rule.abs_tol,
            rule.rel_tol,
        )?;
        match failure.take() {
            Some(e) => Err(e),
            None => Ok(outer),
        }
    };
    let split = rule.shell_from.clamp(0.0, rule.r_max);
    let inner = radial(0.0, split)?;
    let shell = radial(split, rule.r_max)?;
    Ok(RidgeValue { inner, shell })
}
