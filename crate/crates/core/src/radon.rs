//! Plane integrals and the complex-direction Fourier transform.
//!
//! `p̂(β, λ) = ∫_{β·x = λ} q dσ`. Since `q̃(ζβ) = ∫ e^{iζλ} p̂(β, λ) dλ` for
//! complex `ζ`, the transform at `(κ + iη)β` reduces to a 1D integral of a
//! compactly supported function, with the growth factor `e^{-ηλ}` explicit.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geom::{add, complete_frame, dot, scale, Vec3};
use crate::potential::Potential;
use crate::quadrature::GaussLegendre;

/// `p̂(β, ·)` tabulated on a uniform `λ` list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadonSamples {
    pub beta: Vec3,
    pub lambdas: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadonSamples {
    fn step(&self) -> f64 {
        if self.lambdas.len() < 2 {
            return 0.0;
        }
        (self.lambdas[self.lambdas.len() - 1] - self.lambdas[0]) / (self.lambdas.len() - 1) as f64
    }

    /// Trapezoid rule for `∫ p̂ dλ`.
    pub fn integral(&self) -> f64 {
        self.fourier(0.0, 0.0).re
    }

    /// `∫ e^{iκλ - ηλ} p̂(β, λ) dλ = q̃((κ + iη)β)` by the trapezoid rule,
    /// which is spectrally accurate for smooth compactly supported profiles.
    pub fn fourier(&self, kappa: f64, eta: f64) -> Complex64 {
        let h = self.step();
        let last = self.lambdas.len().saturating_sub(1);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, (&l, &v)) in self.lambdas.iter().zip(&self.values).enumerate() {
            if v == 0.0 {
                continue;
            }
            let w = if i == 0 || i == last { 0.5 * h } else { h };
            acc += Complex64::from_polar(w * v * (-eta * l).exp(), kappa * l);
        }
        acc
    }

    /// CSV rows `beta_x,beta_y,beta_z,lambda,value`.
    pub fn csv_rows(&self) -> Vec<String> {
        self.lambdas
            .iter()
            .zip(&self.values)
            .map(|(l, v)| {
                format!(
                    "{},{},{},{},{}",
                    self.beta[0], self.beta[1], self.beta[2], l, v
                )
            })
            .collect()
    }
}

/// `count` equispaced values covering `[-a, a]` including both ends.
pub fn uniform_lambdas(a: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    (0..count)
        .map(|i| -a + 2.0 * a * i as f64 / (count - 1) as f64)
        .collect()
}

/// Resolution keeping about 40 samples per period of `e^{iκλ}` (at least 401).
pub fn lambda_count(a: f64, kappa: f64) -> usize {
    let per_period = 40.0;
    let n = (2.0 * a * kappa.abs() * per_period / (2.0 * PI)).ceil() as usize + 1;
    n.max(401) | 1
}

const ANGULAR_NODES: usize = 16;

fn radial_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(24))
}

/// Integral of `q` over the plane `β·x = λ`.
///
/// The plane meets the support ball of `q` in a disc about the projection of
/// the centre; the disc is integrated in polar coordinates (Gauss–Legendre in
/// the radius, periodic trapezoid in the angle) in the frame completing `β`.
pub fn plane_integral(q: &Potential, beta: Vec3, lambda: f64) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let d = lambda - dot(beta, q.center);
    let r2 = q.radius * q.radius - d * d;
    if r2 <= 0.0 {
        return 0.0;
    }
    let rmax = r2.sqrt();
    let foot = add(q.center, scale(beta, d));
    let (e1, e2) = complete_frame(beta);
    let rule = radial_rule();
    let panels = 2;
    let mut acc = 0.0;
    for m in 0..ANGULAR_NODES {
        let th = 2.0 * PI * m as f64 / ANGULAR_NODES as f64;
        let dir = add(scale(e1, th.cos()), scale(e2, th.sin()));
        for p in 0..panels {
            let lo = rmax * p as f64 / panels as f64;
            let hi = rmax * (p + 1) as f64 / panels as f64;
            for (r, w) in rule.mapped(lo, hi) {
                acc += w * r * q.eval(add(foot, scale(dir, r)));
            }
        }
    }
    acc * 2.0 * PI / ANGULAR_NODES as f64
}

/// `p̂(β, λ)` for every `λ` in `lambdas`.
pub fn radon_transform(q: &Potential, beta: Vec3, lambdas: &[f64]) -> RadonSamples {
    RadonSamples {
        beta,
        lambdas: lambdas.to_vec(),
        values: lambdas.iter().map(|&l| plane_integral(q, beta, l)).collect(),
    }
}

/// Radon samples on `[-a, a]` resolved for frequencies up to `kappa_max`.
pub fn radon_for(q: &Potential, beta: Vec3, kappa_max: f64) -> RadonSamples {
    let a = q.support_radius;
    radon_transform(q, beta, &uniform_lambdas(a, lambda_count(a, kappa_max)))
}

/// `q̃((κ + iη)β)` through the Radon representation.
pub fn complex_direction_fourier(q: &Potential, kappa: f64, eta: f64, beta: Vec3) -> Complex64 {
    if q.is_zero() {
        return Complex64::new(0.0, 0.0);
    }
    radon_for(q, beta, kappa).fourier(kappa, eta)
}

/// Radon tables for a direction set, reusable across `(κ, η)` pairs.
#[derive(Debug, Clone)]
pub struct DirectionalTransform {
    pub samples: Vec<RadonSamples>,
}

impl DirectionalTransform {
    pub fn new(q: &Potential, directions: &[Vec3], kappa_max: f64) -> Self {
        Self {
            samples: directions
                .iter()
                .map(|&b| radon_for(q, b, kappa_max))
                .collect(),
        }
    }

    /// `max_β |q̃((κ + iη)β)|` over the stored directions.
    pub fn max_abs(&self, kappa: f64, eta: f64) -> f64 {
        self.samples
            .iter()
            .map(|s| s.fourier(kappa, eta).norm())
            .fold(0.0, f64::max)
    }
}
