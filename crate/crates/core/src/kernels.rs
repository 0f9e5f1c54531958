//! Green kernels, their Fourier symbol, and the 3D Fourier transform.
//!
//! The transform convention is `f̃(ξ) = ∫ f(x) e^{+iξ·x} dx` with inverse
//! `f(x) = (2π)^{-3} ∫ f̃(ξ) e^{-iξ·x} dξ`. FFT batch evaluation uses the
//! backward (positive exponent) FFT so the sign matches.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{dot, norm, Vec3};
use crate::potential::Grid3;

/// Complex wavenumber `k = (κ + iη)/2` with `η ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexWavenumber {
    pub kappa: f64,
    pub eta: f64,
}

impl ComplexWavenumber {
    pub fn new(kappa: f64, eta: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::param("kappa", "must be finite and non-negative"));
        }
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(Error::param("eta", "must be finite and non-negative"));
        }
        Ok(Self { kappa, eta })
    }

    /// Real wavenumber `k`, i.e. `κ = 2k`, `η = 0`.
    pub fn real(k: f64) -> Result<Self> {
        Self::new(2.0 * k, 0.0)
    }

    #[inline]
    pub fn k(&self) -> Complex64 {
        Complex64::new(0.5 * self.kappa, 0.5 * self.eta)
    }

    /// `κ + iη = 2k`.
    #[inline]
    pub fn zeta(&self) -> Complex64 {
        Complex64::new(self.kappa, self.eta)
    }

    /// `γ = κ² + η²`.
    #[inline]
    pub fn gamma(&self) -> f64 {
        self.kappa * self.kappa + self.eta * self.eta
    }

    pub fn is_real(&self) -> bool {
        self.eta == 0.0
    }
}

/// Schedule of the imaginary shift `η` along a `κ` sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum EtaRule {
    Fixed { eta: f64 },
    /// `η(κ) = a⁻¹ ln κ`.
    AInvLog,
}

impl EtaRule {
    pub fn eta(&self, kappa: f64, support_radius: f64) -> f64 {
        match *self {
            EtaRule::Fixed { eta } => eta,
            EtaRule::AInvLog => (kappa.ln() / support_radius).max(0.0),
        }
    }

    pub fn wavenumber(&self, kappa: f64, support_radius: f64) -> Result<ComplexWavenumber> {
        ComplexWavenumber::new(kappa, self.eta(kappa, support_radius))
    }
}

/// Free outgoing kernel `g(r, k) = e^{ik|r|} / (4π|r|)`.
pub fn free_green(r: Vec3, k: ComplexWavenumber) -> Result<Complex64> {
    let d = norm(r);
    if d == 0.0 {
        return Err(Error::Singularity);
    }
    Ok(free_green_at(d, k.k()))
}

#[inline]
pub(crate) fn free_green_at(d: f64, k: Complex64) -> Complex64 {
    (Complex64::i() * k * d).exp() / (4.0 * PI * d)
}

/// Phase-stripped kernel `G(r, k) = g(r, k) e^{-ikβ·r}`.
pub fn modified_green(r: Vec3, k: ComplexWavenumber, beta: Vec3) -> Result<Complex64> {
    let d = norm(r);
    if d == 0.0 {
        return Err(Error::Singularity);
    }
    Ok(modified_green_at(d, dot(beta, r), k.k()))
}

#[inline]
pub(crate) fn modified_green_at(d: f64, beta_dot_r: f64, k: Complex64) -> Complex64 {
    (Complex64::i() * k * (d - beta_dot_r)).exp() / (4.0 * PI * d)
}

/// Pole threshold for [`green_symbol`].
pub const NEAR_POLE: f64 = 1e-12;

/// Symbol `1 / (ξ² - 2kβ·ξ)` of the modified kernel.
pub fn green_symbol(xi: Vec3, k: ComplexWavenumber, beta: Vec3) -> Result<Complex64> {
    let den = Complex64::new(dot(xi, xi), 0.0) - k.zeta() * dot(beta, xi);
    if den.norm() < NEAR_POLE {
        return Err(Error::NearPole {
            modulus: den.norm(),
        });
    }
    Ok(den.inv())
}

/// Direct quadrature `Σ_j w_j f_j e^{iξ·x_j}` over the grid.
pub fn fourier3(samples: &[Complex64], grid: &Grid3, xi: Vec3) -> Complex64 {
    debug_assert_eq!(samples.len(), grid.len());
    let n = grid.n;
    // Separable phases per axis.
    let phase = |c: f64| -> Vec<Complex64> {
        (0..n)
            .map(|i| (Complex64::i() * (c * grid.coord(i))).exp())
            .collect()
    };
    let (px, py, pz) = (phase(xi[0]), phase(xi[1]), phase(xi[2]));
    let mut acc = Complex64::new(0.0, 0.0);
    for idx in 0..grid.len() {
        let w = grid.weight(idx);
        if w == 0.0 {
            continue;
        }
        let f = samples[idx];
        if f == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (i, j, k) = grid.ijk(idx);
        acc += f * w * px[i] * py[j] * pz[k];
    }
    acc
}

pub fn fourier3_real(samples: &[f64], grid: &Grid3, xi: Vec3) -> Complex64 {
    let c: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fourier3(&c, grid, xi)
}

/// Transform values on the Cartesian frequency grid `ξ = m·dξ`,
/// `m ∈ [-P/2, P/2)³`, `dξ = 2π/(P h)`.
#[derive(Debug, Clone)]
pub struct SpectralGrid {
    pub size: usize,
    pub spacing: f64,
    pub values: Vec<Complex64>,
}

impl SpectralGrid {
    /// Signed frequency index of storage slot `i` (centred ordering).
    #[inline]
    pub fn freq_index(&self, i: usize) -> i64 {
        i as i64 - (self.size / 2) as i64
    }

    pub fn frequency(&self, i: usize, j: usize, k: usize) -> Vec3 {
        [
            self.freq_index(i) as f64 * self.spacing,
            self.freq_index(j) as f64 * self.spacing,
            self.freq_index(k) as f64 * self.spacing,
        ]
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.values[(i * self.size + j) * self.size + k]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Batch evaluation of [`fourier3`] on the FFT frequency grid of the
/// zero-padded mesh (`pad` times the grid length per axis).
pub fn fourier3_batch(samples: &[Complex64], grid: &Grid3, pad: usize) -> SpectralGrid {
    let n = grid.n;
    let p = n * pad.max(1);
    let mut data = vec![Complex64::new(0.0, 0.0); p * p * p];
    for idx in 0..grid.len() {
        let w = grid.weight(idx);
        if w == 0.0 {
            continue;
        }
        let (i, j, k) = grid.ijk(idx);
        data[(i * p + j) * p + k] = samples[idx] * w;
    }
    let mut planner = FftPlanner::<f64>::new();
    // e^{+iξ·x} is the backward (unnormalised inverse) transform in rustfft.
    let fft = planner.plan_fft_inverse(p);
    fft_axes(&mut data, p, &*fft);

    let spacing = 2.0 * PI / (p as f64 * grid.h);
    let x0 = grid.coord(0);
    // Slot s holds frequency m = s - p/2, stored at FFT bin (m mod p).
    let shift: Vec<Complex64> = (0..p)
        .map(|s| {
            let m = s as i64 - (p / 2) as i64;
            (Complex64::i() * (m as f64 * spacing * x0)).exp()
        })
        .collect();
    let bin = |s: usize| -> usize {
        let m = s as i64 - (p / 2) as i64;
        m.rem_euclid(p as i64) as usize
    };
    let mut values = vec![Complex64::new(0.0, 0.0); p * p * p];
    for i in 0..p {
        for j in 0..p {
            for k in 0..p {
                let v = data[(bin(i) * p + bin(j)) * p + bin(k)];
                values[(i * p + j) * p + k] = v * shift[i] * shift[j] * shift[k];
            }
        }
    }
    SpectralGrid {
        size: p,
        spacing,
        values,
    }
}

fn fft_axes(data: &mut [Complex64], p: usize, fft: &dyn rustfft::Fft<f64>) {
    let mut line = vec![Complex64::new(0.0, 0.0); p];
    // last axis is contiguous
    for chunk in data.chunks_mut(p) {
        fft.process(chunk);
    }
    for i in 0..p {
        for k in 0..p {
            for j in 0..p {
                line[j] = data[(i * p + j) * p + k];
            }
            fft.process(&mut line);
            for j in 0..p {
                data[(i * p + j) * p + k] = line[j];
            }
        }
    }
    for j in 0..p {
        for k in 0..p {
            for i in 0..p {
                line[i] = data[(i * p + j) * p + k];
            }
            fft.process(&mut line);
            for i in 0..p {
                data[(i * p + j) * p + k] = line[i];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{sample_on_grid, Potential};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn static_kernel_value() {
        let k = ComplexWavenumber::new(0.0, 0.0).unwrap();
        let g = free_green([1.0, 0.0, 0.0], k).unwrap();
        assert_relative_eq!(g.re, 1.0 / (4.0 * PI), epsilon = 1e-15);
        assert_eq!(g.im, 0.0);
        assert!(matches!(free_green([0.0; 3], k), Err(Error::Singularity)));
    }

    #[test]
    fn complex_k_kernel_decays() {
        let k = ComplexWavenumber::new(3.0, 2.0).unwrap();
        for &d in &[0.5, 1.0, 2.0] {
            let g = free_green([0.0, d, 0.0], k).unwrap();
            assert_relative_eq!(g.norm(), (-d).exp() / (4.0 * PI * d), epsilon = 1e-14);
        }
    }

    #[test]
    fn modified_kernel_phase_cancels_along_beta() {
        let k = ComplexWavenumber::new(7.0, 1.5).unwrap();
        let beta = [0.0, 0.6, 0.8];
        let r = [0.0, 0.3, 0.4];
        let g = modified_green(r, k, beta).unwrap();
        assert_relative_eq!(g.re, 1.0 / (4.0 * PI * 0.5), epsilon = 1e-13);
        assert!(g.im.abs() < 1e-13);
    }

    #[test]
    fn symbol_values_and_pole() {
        let k = ComplexWavenumber::real(1.5).unwrap();
        let beta = [0.0, 0.0, 1.0];
        let s = green_symbol([1.0, 0.0, 0.0], k, beta).unwrap();
        assert_relative_eq!(s.re, 1.0, epsilon = 1e-15);
        assert!(matches!(
            green_symbol([0.0, 0.0, 3.0], k, beta),
            Err(Error::NearPole { .. })
        ));
    }

    #[test]
    fn symbol_has_no_real_poles_for_positive_eta() {
        // Grid minimisation of |ξ² - (κ+iη)β·ξ| over a box away from ξ = 0.
        let k = ComplexWavenumber::new(4.0, 0.5).unwrap();
        let mut min = f64::INFINITY;
        let steps = 60;
        for a in 0..=steps {
            for b in 0..=steps {
                let xz = -1.0 + 6.0 * a as f64 / steps as f64;
                let xr = 4.0 * b as f64 / steps as f64;
                let xi = [xr, 0.0, xz];
                if norm(xi) < 0.25 {
                    continue;
                }
                let den = Complex64::new(dot(xi, xi), 0.0) - k.zeta() * xz;
                min = min.min(den.norm());
            }
        }
        assert!(min > 1e-2, "min modulus {min}");
    }

    #[test]
    fn fourier3_matches_ball_closed_form() {
        let grid = Grid3::new(1.0, 64).unwrap();
        let q = Potential::ball(1.0, 1.0).unwrap();
        let s: Vec<Complex64> = sample_on_grid(&q, &grid)
            .unwrap()
            .into_iter()
            .map(|v| Complex64::new(v, 0.0))
            .collect();
        let peak = q.closed_form_fourier([0.0; 3]).unwrap().norm();
        for dir in crate::geom::spiral_directions(5) {
            for &m in &[0.0, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0] {
                let xi = crate::geom::scale(dir, m);
                let exact = q.closed_form_fourier(xi).unwrap();
                let err = (fourier3(&s, &grid, xi) - exact).norm();
                // Pointwise relative below the first zero of the transform,
                // relative to the peak beyond it.
                let scale = if m <= 3.0 { exact.norm() } else { peak };
                assert!(err / scale < 1e-3, "{xi:?}: {}", err / scale);
            }
        }
    }

    #[test]
    fn zero_field_has_zero_transform() {
        let grid = Grid3::new(1.0, 6).unwrap();
        let s = vec![Complex64::new(0.0, 0.0); grid.len()];
        assert_eq!(fourier3(&s, &grid, [1.0, 2.0, 3.0]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn damped_kernel_transform_approaches_symbol() {
        // e^{-δ|r|}G has transform 1/((ξ - kβ)² - (k + iδ)²) = 1/(ξ² - 2kβ·ξ - 2ikδ + δ²),
        // which tends to the symbol as δ → 0. Checked by radial quadrature of
        // ∫ e^{iξ·r} G e^{-δ|r|} dr = ∫ r e^{(ik - δ)r} sinc(r√(p·p)) dr, p = ξ - kβ.
        let k = ComplexWavenumber::new(3.0, 1.0).unwrap();
        let beta = [0.0, 0.0, 1.0];
        let xi = [1.2, -0.4, 0.9];
        let kk = k.k();
        let p = [
            Complex64::new(xi[0], 0.0) - kk * beta[0],
            Complex64::new(xi[1], 0.0) - kk * beta[1],
            Complex64::new(xi[2], 0.0) - kk * beta[2],
        ];
        let pn = crate::geom::cdot(p, p).sqrt();
        let symbol = green_symbol(xi, k, beta).unwrap();
        let rule = crate::quadrature::GaussLegendre::new(32);
        let mut last = f64::INFINITY;
        for &delta in &[0.4, 0.1, 0.02, 0.005] {
            let rmax = 60.0 / (delta + k.eta / 2.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for (r, w) in crate::quadrature::composite(&rule, &crate::quadrature::uniform_breaks(0.0, rmax, 400)) {
                let e = ((Complex64::i() * kk - delta) * r).exp();
                acc += w * r * e * crate::potential::sinc(pn * r);
            }
            let num = acc;
            let exact = (Complex64::new(crate::geom::dot(xi, xi) + delta * delta, 0.0)
                - 2.0 * kk * crate::geom::dot(beta, xi)
                - 2.0 * Complex64::i() * kk * delta)
                .inv();
            assert!((num - exact).norm() < 1e-8 * exact.norm(), "delta {delta}");
            let gap = (num - symbol).norm();
            assert!(gap < last);
            last = gap;
        }
        assert!(last < 0.05 * symbol.norm());
    }

    #[test]
    fn batch_transform_matches_direct_sum() {
        let grid = Grid3::new(1.0, 8).unwrap();
        let q = Potential::bump(1.0, 1.0).unwrap().with_amplitude(2.0);
        let s: Vec<Complex64> = sample_on_grid(&q, &grid)
            .unwrap()
            .into_iter()
            .enumerate()
            .map(|(i, v)| Complex64::new(v, 0.1 * v * grid.node(i)[0]))
            .collect();
        let spec = fourier3_batch(&s, &grid, 2);
        for &(i, j, k) in &[(8, 8, 8), (3, 9, 12), (0, 15, 7)] {
            let direct = fourier3(&s, &grid, spec.frequency(i, j, k));
            assert!((spec.at(i, j, k) - direct).norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn real_fields_have_conjugate_symmetric_transform(
            x in -6.0f64..6.0, y in -6.0f64..6.0, z in -6.0f64..6.0,
        ) {
            let grid = Grid3::new(1.0, 10).unwrap();
            let q = Potential::bump(1.0, 0.9).unwrap().dilated(1.0);
            let s = sample_on_grid(&q, &grid).unwrap();
            let a = fourier3_real(&s, &grid, [x, y, z]);
            let b = fourier3_real(&s, &grid, [-x, -y, -z]);
            prop_assert!((a - b.conj()).norm() < 1e-12);
        }

        #[test]
        fn kernel_depends_only_on_distance(
            x in -2.0f64..2.0, y in -2.0f64..2.0, z in -2.0f64..2.0,
        ) {
            prop_assume!(norm([x, y, z]) > 1e-3);
            let k = ComplexWavenumber::new(5.0, 1.0).unwrap();
            let beta = [0.0, 0.0, 1.0];
            let g1 = free_green([x, y, z], k).unwrap();
            let g2 = free_green([-x, -y, -z], k).unwrap();
            prop_assert!((g1 - g2).norm() < 1e-14);
            let m = modified_green([x, y, z], k, beta).unwrap();
            let expected = g1 * (-Complex64::i() * k.k() * z).exp();
            prop_assert!((m - expected).norm() < 1e-13 * g1.norm().max(1.0));
            // |x - y| - β·(x - y) ∈ [0, 2|r|] bounds the modulus.
            prop_assert!(m.norm() <= (k.eta * norm([x, y, z])).exp() / (4.0 * PI * norm([x, y, z])) + 1e-15);
        }
    }
}
