//! Admissible test potentials and the Cartesian mesh of the support ball.
//!
//! A [`Potential`] is a real, compactly supported radial profile
//! `q(x) = A·p(|x - c| / R)` with `p` vanishing for arguments `≥ 1`. The
//! smooth kinds are `C^∞` with compact support and therefore lie in every
//! Sobolev space `H₀^ℓ`. The ball indicator is discontinuous and is meant for
//! transform oracles only.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{cdot, cdot_real, norm, sub, CVec3, Vec3};
use crate::quadrature::GaussLegendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    /// `exp(-1/(1 - ρ²))`
    Bump,
    /// `exp(-4ρ²)·exp(1 - 1/(1 - ρ²))`, unit peak at the centre.
    TruncatedGaussianBump,
    /// Indicator of the ball `ρ < 1`. Oracle-only.
    BallIndicator,
}

impl PotentialKind {
    pub fn name(self) -> &'static str {
        match self {
            PotentialKind::Bump => "bump",
            PotentialKind::TruncatedGaussianBump => "truncated-gaussian-bump",
            PotentialKind::BallIndicator => "ball-indicator",
        }
    }

    /// Radial profile `p(ρ)` with `ρ = |x - c| / R`.
    #[inline]
    pub fn profile(self, rho: f64) -> f64 {
        if rho >= 1.0 {
            return 0.0;
        }
        match self {
            PotentialKind::Bump => (-1.0 / (1.0 - rho * rho)).exp(),
            PotentialKind::TruncatedGaussianBump => {
                let r2 = rho * rho;
                (-4.0 * r2 + 1.0 - 1.0 / (1.0 - r2)).exp()
            }
            PotentialKind::BallIndicator => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub kind: PotentialKind,
    pub amplitude: f64,
    pub radius: f64,
    pub support_radius: f64,
    pub center: Vec3,
}

impl Potential {
    /// Build a potential, checking that its support fits inside `B_a`.
    pub fn new(
        kind: PotentialKind,
        amplitude: f64,
        radius: f64,
        support_radius: f64,
        center: Vec3,
    ) -> Result<Self> {
        if !amplitude.is_finite() {
            return Err(Error::param("amplitude", "must be finite"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::param("radius", "must be positive"));
        }
        if !(support_radius.is_finite() && support_radius > 0.0) {
            return Err(Error::param("support_radius", "must be positive"));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("center", "must be finite"));
        }
        if norm(center) + radius > support_radius * (1.0 + 1e-12) {
            return Err(Error::InvalidSupport {
                radius: norm(center) + radius,
                support_radius,
            });
        }
        Ok(Self {
            kind,
            amplitude,
            radius,
            support_radius,
            center,
        })
    }

    /// Centred bump with support radius equal to its radius.
    pub fn bump(amplitude: f64, radius: f64) -> Result<Self> {
        Self::new(PotentialKind::Bump, amplitude, radius, radius, [0.0; 3])
    }

    pub fn ball(amplitude: f64, radius: f64) -> Result<Self> {
        Self::new(PotentialKind::BallIndicator, amplitude, radius, radius, [0.0; 3])
    }

    pub fn zero(support_radius: f64) -> Self {
        Self {
            kind: PotentialKind::Bump,
            amplitude: 0.0,
            radius: support_radius,
            support_radius,
            center: [0.0; 3],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0
    }

    /// Smooth kinds satisfy the Sobolev hypothesis; the ball is oracle-only.
    pub fn is_smooth(&self) -> bool {
        self.kind != PotentialKind::BallIndicator
    }

    pub fn is_centered(&self) -> bool {
        self.center == [0.0; 3]
    }

    #[inline]
    pub fn eval(&self, x: Vec3) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        let rho = norm(sub(x, self.center)) / self.radius;
        self.amplitude * self.kind.profile(rho)
    }

    pub fn with_amplitude(&self, amplitude: f64) -> Self {
        Self { amplitude, ..*self }
    }

    /// Same shape dilated by `factor` about the origin: `q(x / factor)`.
    pub fn dilated(&self, factor: f64) -> Self {
        Self {
            radius: self.radius * factor,
            support_radius: self.support_radius * factor,
            center: [
                self.center[0] * factor,
                self.center[1] * factor,
                self.center[2] * factor,
            ],
            ..*self
        }
    }

    pub fn id(&self) -> String {
        format!(
            "{}-A{}-R{}-a{}-c{},{},{}",
            self.kind.name(),
            self.amplitude,
            self.radius,
            self.support_radius,
            self.center[0],
            self.center[1],
            self.center[2]
        )
    }

    /// `∫ q dx` by radial Gauss–Legendre quadrature.
    pub fn integral(&self) -> f64 {
        self.radial_transform(Complex64::new(0.0, 0.0)).re
    }

    /// Elementary closed form of `q̃(ξ) = ∫ q(x) e^{iξ·x} dx`, ball indicator only.
    pub fn closed_form_fourier(&self, xi: Vec3) -> Result<Complex64> {
        if self.kind != PotentialKind::BallIndicator {
            return Err(Error::NoClosedForm(self.kind.name()));
        }
        let rho = norm(xi);
        let phase = Complex64::new(0.0, crate::geom::dot(xi, self.center)).exp();
        Ok(phase * self.amplitude * ball_profile_transform(Complex64::new(rho, 0.0), self.radius))
    }

    /// `q̃(ξ)` for a complex frequency vector `ξ`.
    ///
    /// A radial profile has an even entire transform `F(ζ)` of `ζ = (ξ·ξ)^{1/2}`,
    /// so `q̃(ξ) = e^{iξ·c} F((ξ·ξ)^{1/2})` holds for complex `ξ` as well. `F` is
    /// evaluated by composite Gauss–Legendre quadrature in the radial variable
    /// (closed form for the ball indicator).
    pub fn fourier(&self, xi: CVec3) -> Complex64 {
        if self.amplitude == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let zeta = cdot(xi, xi).sqrt();
        let val = self.radial_transform(zeta);
        if self.is_centered() {
            val
        } else {
            (Complex64::i() * cdot_real(xi, self.center)).exp() * val
        }
    }

    /// `q̃(ξ)` at a real frequency.
    pub fn fourier_real(&self, xi: Vec3) -> Complex64 {
        self.fourier(crate::geom::creal(xi))
    }

    /// `F(ζ) = 4π A ∫_0^R p(r/R) r² sinc(ζ r) dr` (centred transform).
    ///
    /// The integrand is even in `r` and flat at `r = R`, so the trapezoid rule
    /// on the even extension converges spectrally; the step is chosen so the
    /// aliased frequency clears `2|ζ|R` by a wide margin. The ball indicator
    /// uses its closed form.
    pub fn radial_transform(&self, zeta: Complex64) -> Complex64 {
        if self.amplitude == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if self.kind == PotentialKind::BallIndicator {
            return self.amplitude * ball_profile_transform(zeta, self.radius);
        }
        let r = self.radius;
        let zr = zeta * r;
        let needed = (2.0 * zr.norm() + 1200.0) / (2.0 * PI);
        let level = (needed.log2().ceil() as usize).clamp(MIN_LEVEL, MAX_LEVEL);
        let table = profile_table(self.kind, level);
        let n = table.len() - 1;
        let h = 1.0 / n as f64;
        // ρ² p(ρ) sinc(ζRρ), with e^{±iζRρ_j} by recurrence
        let step = (Complex64::i() * zr * h).exp();
        let step_inv = step.inv();
        let mut up = step;
        let mut down = step_inv;
        let mut acc = Complex64::new(0.0, 0.0);
        let small = zr.norm() < 1e-8;
        for (j, &w) in table.iter().enumerate().skip(1) {
            if w != 0.0 {
                let rho = j as f64 * h;
                let sinc = if small {
                    Complex64::new(1.0, 0.0)
                } else {
                    (up - down) / (2.0 * Complex64::i() * zr * rho)
                };
                acc += sinc * w;
            }
            up *= step;
            down *= step_inv;
        }
        acc * (h * 4.0 * PI * self.amplitude * r * r * r)
    }

    /// Composite Gauss–Legendre evaluation of [`Potential::radial_transform`],
    /// kept as an independent reference.
    pub fn radial_transform_gl(&self, zeta: Complex64) -> Complex64 {
        if self.amplitude == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let r = self.radius;
        let rule = radial_rule();
        let panels = ((zeta.norm() * r / 2.0).ceil() as usize).clamp(32, 4096);
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let lo = p as f64 / panels as f64;
            let hi = (p + 1) as f64 / panels as f64;
            for (rho, w) in rule.mapped(lo, hi) {
                let prof = self.kind.profile(rho);
                if prof == 0.0 {
                    continue;
                }
                acc += sinc(zeta * (rho * r)) * (w * prof * rho * rho);
            }
        }
        acc * (4.0 * PI * self.amplitude * r * r * r)
    }
}

const MIN_LEVEL: usize = 6;
const MAX_LEVEL: usize = 16;

/// `ρ_j² p(ρ_j)` at `ρ_j = j / 2^level`, `j = 0..=2^level`.
fn profile_table(kind: PotentialKind, level: usize) -> &'static [f64] {
    static TABLES: OnceLock<Vec<Vec<OnceLock<Vec<f64>>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        (0..3)
            .map(|_| (0..=MAX_LEVEL).map(|_| OnceLock::new()).collect())
            .collect()
    });
    let slot = match kind {
        PotentialKind::Bump => 0,
        PotentialKind::TruncatedGaussianBump => 1,
        PotentialKind::BallIndicator => 2,
    };
    tables[slot][level].get_or_init(|| {
        let n = 1usize << level;
        (0..=n)
            .map(|j| {
                let rho = j as f64 / n as f64;
                rho * rho * kind.profile(rho)
            })
            .collect()
    })
}

fn radial_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16))
}

/// Entire function `sin z / z`.
#[inline]
pub fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        Complex64::new(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// `4π (sin Rζ - Rζ cos Rζ) / ζ³` with the `ζ → 0` limit `4πR³/3`.
fn ball_profile_transform(zeta: Complex64, r: f64) -> Complex64 {
    let z = zeta * r;
    if z.norm() < 1e-3 {
        let z2 = z * z;
        // 3 (sin z - z cos z) / z³ = 1 - z²/10 + z⁴/280
        let series = Complex64::new(1.0, 0.0) - z2 / 10.0 + z2 * z2 / 280.0;
        return series * (4.0 * PI * r * r * r / 3.0);
    }
    (z.sin() - z * z.cos()) / (z * z * z) * (4.0 * PI * r * r * r)
}

/// Uniform cell-centred Cartesian mesh of the cube `[-a, a]³` with
/// quadrature weights clipped to the ball `B_a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid3 {
    pub half_width: f64,
    pub n: usize,
    pub h: f64,
}

impl Grid3 {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::param("half_width", "must be positive"));
        }
        if n < 2 {
            return Err(Error::param("n", "need at least 2 points per axis"));
        }
        Ok(Self {
            half_width,
            n,
            h: 2.0 * half_width / n as f64,
        })
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + self.h * (i as f64 + 0.5)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    #[inline]
    pub fn ijk(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.n;
        (idx / (n * n), (idx / n) % n, idx % n)
    }

    #[inline]
    pub fn node(&self, idx: usize) -> Vec3 {
        let (i, j, k) = self.ijk(idx);
        [self.coord(i), self.coord(j), self.coord(k)]
    }

    pub fn nodes(&self) -> impl Iterator<Item = Vec3> + '_ {
        (0..self.len()).map(|i| self.node(i))
    }

    #[inline]
    pub fn in_ball(&self, idx: usize) -> bool {
        norm(self.node(idx)) <= self.half_width
    }

    /// Membership-clipped weight `h³·[x ∈ B_a]`.
    #[inline]
    pub fn weight(&self, idx: usize) -> f64 {
        if self.in_ball(idx) {
            self.h * self.h * self.h
        } else {
            0.0
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }

    /// Indices of the nodes inside `B_a`.
    pub fn ball_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.in_ball(i)).collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.h * self.h * self.h
    }

    /// Weighted sum `Σ w_j f_j`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| self.weight(i) * v)
            .sum()
    }
}

/// Node-wise samples of `q` on `grid`; nodes outside `B_a` are exactly zero.
pub fn sample_on_grid(q: &Potential, grid: &Grid3) -> Result<Vec<f64>> {
    if grid.half_width < q.support_radius * (1.0 - 1e-12) {
        return Err(Error::SupportClipped {
            half_width: grid.half_width,
            support_radius: q.support_radius,
        });
    }
    Ok((0..grid.len())
        .map(|i| {
            let x = grid.node(i);
            if norm(x) > q.support_radius {
                0.0
            } else {
                q.eval(x)
            }
        })
        .collect())
}
