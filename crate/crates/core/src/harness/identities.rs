//! Exact and Born-level identities tying amplitudes to the potential.
//!
//! With `q₂ = 0` the two-potential relations reduce to statements about one
//! potential that can be evaluated term by term: the amplitude difference
//! identity, `∫ e^{2ikβ·x}(1 + ε)q dx = -4πA(-β, β, k)`, and its Fourier form
//! `q̃(ζβ) + (2π)⁻³ (ε̃ ∗ q̃)(ζβ)` with `ε̃` replaced by the free term.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amplitude::{amplitude, far_field_amplitude, SolverConfig};
use crate::error::{Error, Result};
use crate::geom::{cvec, dot, neg, sub, Vec3};
use crate::harness::nu::{default_margin, nu_evaluate};
use crate::harness::ridge::{ridge_integral, RidgeQuadrature};
use crate::kernels::{fourier3, ComplexWavenumber};
use crate::potential::{Grid3, Potential};
use crate::solver::{born_iterate, born_series, Scatterer};

const TWO_PI_CUBED: f64 = 8.0 * PI * PI * PI;

/// Floor for the normalization of [`amplitude_difference_residual`].
pub const RESIDUAL_FLOOR: f64 = 1e-14;

/// `|LHS - RHS| / max(|LHS|, |RHS|, floor)` for
/// `-4π[A₁(β, α, k) - A₂(β, α, k)] = ∫ (q₁ - q₂) u₁(x, α, k) u₂(x, -β, k) dx`.
///
/// `A₂` and the two fields come from separate solves.
pub fn amplitude_difference_residual(
    q1: &Potential,
    q2: &Potential,
    beta: Vec3,
    alpha: Vec3,
    k: ComplexWavenumber,
    grid: &Grid3,
    solver: SolverConfig,
) -> Result<f64> {
    let s1 = Scatterer::new(q1, *grid)?;
    let s2 = Scatterer::new(q2, *grid)?;
    let u1 = solver.solve(&s1, k, alpha)?;
    let a1 = far_field_amplitude(&s1, &u1, beta, k);
    let a2 = amplitude(&s2, beta, alpha, k, solver)?;
    let lhs = -4.0 * PI * (a1 - a2);

    let u2 = solver.solve(&s2, k, neg(beta))?;
    let mut rhs = Complex64::new(0.0, 0.0);
    for i in grid.ball_nodes() {
        let dq = s1.samples[i] - s2.samples[i];
        if dq != 0.0 {
            rhs += u1.u[i] * u2.u[i] * (dq * grid.weight(i));
        }
    }
    let den = lhs.norm().max(rhs.norm()).max(RESIDUAL_FLOOR);
    Ok((lhs - rhs).norm() / den)
}

/// `∫ e^{2ikβ·x}(1 + ε)q dx + 4πA(-β, β, k)` for incidence `β`.
///
/// `ε` comes from the Born series for the phase-stripped field, `A` from a
/// separate solve through the amplitude path.
pub fn orthogonality_residual(
    q: &Potential,
    beta: Vec3,
    k: ComplexWavenumber,
    grid: &Grid3,
    solver: SolverConfig,
) -> Result<Complex64> {
    let s = Scatterer::new(q, *grid)?;
    if s.is_zero() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let eps = born_series(&s, k, beta, solver.tol, solver.max_iter)?;
    let two_k = 2.0 * k.k();
    let mut integral = Complex64::new(0.0, 0.0);
    for &i in &s.support {
        let phase = (Complex64::i() * two_k * dot(beta, grid.node(i))).exp();
        integral += phase * (1.0 + eps.values[i]) * (s.samples[i] * grid.weight(i));
    }
    let a = amplitude(&s, neg(beta), beta, k, solver)?;
    Ok(integral + 4.0 * PI * a)
}

/// `-(2π)⁻³ ∫ q̃(ξ - s) q̃(s) / (s² - ζβ·s) ds`, the transform of `q ε₁` at a
/// real or complex `ξ` along `β` (`xi_im` is the imaginary part `ηβ` or zero).
///
/// Returns the value and the share of the outer shell.
pub fn born_convolution(q: &Potential, k: ComplexWavenumber, beta: Vec3, xi_re: Vec3, xi_im: Vec3) -> Result<(Complex64, f64)> {
    if q.is_zero() {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let zeta = k.zeta();
    let r_max = norm3(xi_re).max(k.kappa) + default_margin(q);
    let on_axis = {
        let p = dot(xi_re, beta);
        norm3(sub(xi_re, crate::geom::scale(beta, p))) < 1e-12
    };
    let rule = RidgeQuadrature {
        r_max,
        shell_from: 0.7 * r_max,
        phi_nodes: if q.is_centered() && on_axis { 1 } else { 48 },
        abs_tol: 1e-10 * q.integral().abs().powi(2),
        rel_tol: 1e-7,
    };
    let v = ridge_integral(beta, k, &rule, |r, t, s| {
        let shifted = cvec(sub(xi_re, s), xi_im);
        q.fourier(shifted) * q.fourier_real(s) / (r * (r - zeta * t))
    })?;
    let total = -v.total() / TWO_PI_CUBED;
    let tail = if total.norm() > 0.0 {
        v.shell.norm() / (TWO_PI_CUBED * total.norm())
    } else {
        0.0
    };
    Ok((total, tail))
}

fn norm3(v: Vec3) -> f64 {
    dot(v, v).sqrt()
}

/// Largest admissible shell share of the truncated convolution.
pub const CONVOLUTION_TAIL_LIMIT: f64 = 0.1;

/// Terms of the Fourier-domain relation at `ζβ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierRelation {
    pub kappa: f64,
    pub eta: f64,
    pub transform: [f64; 2],
    pub convolution: [f64; 2],
    pub amplitude_term: [f64; 2],
    /// `|q̃(ζβ) + (2π)⁻³ ε̃ ∗ q̃ + 4πA| / |q̃(ζβ)|`.
    pub residual: f64,
    pub tail_fraction: f64,
    pub nu: f64,
    /// `|(2π)⁻³ ε̃ ∗ q̃| / ((2π)⁻³ ν 𝒫)`, which the convolution bound keeps below one.
    pub bound_ratio: f64,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Born-level check of `q̃(ζβ) + (2π)⁻³(ε̃ ∗ q̃)(ζβ) = -4πA(-β, β, k)`.
///
/// The left side truncates the exact `ε` at its first Born term, so the
/// residual is of second order in the amplitude of `q`.
pub fn fourier_relation_check(
    q: &Potential,
    beta: Vec3,
    k: ComplexWavenumber,
    grid: &Grid3,
    solver: SolverConfig,
) -> Result<FourierRelation> {
    if !(k.eta > 0.0) {
        return Err(Error::param("eta", "the Fourier relation is checked at eta > 0"));
    }
    let zeta = k.zeta();
    let xi_re = crate::geom::scale(beta, zeta.re);
    let xi_im = crate::geom::scale(beta, zeta.im);
    if q.is_zero() {
        return Ok(FourierRelation {
            kappa: k.kappa,
            eta: k.eta,
            transform: [0.0; 2],
            convolution: [0.0; 2],
            amplitude_term: [0.0; 2],
            residual: 0.0,
            tail_fraction: 0.0,
            nu: 0.0,
            bound_ratio: 0.0,
        });
    }
    let transform = q.fourier(cvec(xi_re, xi_im));
    let (conv, tail) = born_convolution(q, k, beta, xi_re, xi_im)?;
    if tail > CONVOLUTION_TAIL_LIMIT {
        return Err(Error::Inconclusive(format!(
            "convolution tail share {tail:.3} above {CONVOLUTION_TAIL_LIMIT}"
        )));
    }
    let s = Scatterer::new(q, *grid)?;
    let a = amplitude(&s, neg(beta), beta, k, solver)?;
    let amplitude_term = -4.0 * PI * a;
    let residual = (transform + conv - amplitude_term).norm() / transform.norm();
    let nu = nu_evaluate(q, k.kappa, k.eta, k.kappa + default_margin(q))?.value;
    let bound = nu * crate::harness::growth::p_max(q) / TWO_PI_CUBED;
    Ok(FourierRelation {
        kappa: k.kappa,
        eta: k.eta,
        transform: pair(transform),
        convolution: pair(conv),
        amplitude_term: pair(amplitude_term),
        residual,
        tail_fraction: tail,
        nu,
        bound_ratio: conv.norm() / bound,
    })
}

/// One comparison of the grid transform of `q ε₁` with its spectral form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeTermPoint {
    pub xi: Vec3,
    pub grid_value: [f64; 2],
    pub spectral_value: [f64; 2],
    pub relative_error: f64,
}

/// Transform of `q ε₁` (first Born iterate on the grid) against
/// `-(2π)⁻³ ∫ q̃(ξ - s) q̃(s)/(s² - ζβ·s) ds` at real frequencies.
///
/// `ε₁` lives on the support of `q` only, so the product with `q` is the
/// quantity whose transform is available from grid data.
pub fn free_term_check(
    q: &Potential,
    grid: &Grid3,
    k: ComplexWavenumber,
    beta: Vec3,
    xis: &[Vec3],
) -> Result<Vec<FreeTermPoint>> {
    let s = Scatterer::new(q, *grid)?;
    let eps = born_iterate(&s, k, beta, 1);
    let mut field = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (pos, &i) in s.support.iter().enumerate() {
        field[i] = eps[pos] * s.samples[i];
    }
    xis.iter()
        .map(|&xi| {
            let g = fourier3(&field, grid, xi);
            let (c, _) = born_convolution(q, k, beta, xi, [0.0; 3])?;
            Ok(FreeTermPoint {
                xi,
                grid_value: pair(g),
                spectral_value: pair(c),
                relative_error: (g - c).norm() / c.norm().max(RESIDUAL_FLOOR),
            })
        })
        .collect()
}
