//! Born-approximation reconstruction from backscattering data.
//!
//! Linearising the amplitude in `q` gives `q̃(2kβ) ≈ -4πA(-β, β, k)`, so a
//! backscattering table samples `q̃` on the spheres `|ξ| = 2k`. The samples
//! are spread onto a Cartesian frequency grid by truncated inverse-distance
//! weights and transformed back with the `(2π)⁻³` inverse.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitude::{AmplitudeDataset, DatasetMeta};
use crate::error::{Error, Result};
use crate::geom::{dot, norm, scale, sub, Vec3};
use crate::kernels::{fourier3, ComplexWavenumber};
use crate::potential::{sample_on_grid, Grid3, Potential};

/// Resampling parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InversionConfig {
    /// Frequency-grid spacing.
    pub spacing: f64,
    /// Weight cutoff in units of the cell diagonal.
    pub cutoff_cells: f64,
    /// Minimum covered share of the frequency ball.
    pub min_coverage: f64,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            spacing: 0.5,
            cutoff_cells: 1.5,
            min_coverage: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorMetrics {
    pub l2_rel: f64,
    pub max_abs: f64,
}

/// Real reconstruction on a spatial grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub grid: Grid3,
    pub values: Vec<f64>,
    pub source: String,
    pub interpolation: String,
    /// Covered share of the frequency ball `|ξ| ≤ 2k_max`.
    pub covered_fraction: f64,
    pub uncovered_cells: usize,
    /// `max |Im q_rec| / max |Re q_rec|` before the imaginary part was dropped.
    pub imaginary_residue: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_metrics: Option<ErrorMetrics>,
}

impl Reconstruction {
    /// `x,y,z,q_rec` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,z,q_rec\n");
        for (i, v) in self.values.iter().enumerate() {
            let p = self.grid.node(i);
            let _ = writeln!(out, "{},{},{},{}", p[0], p[1], p[2], v);
        }
        out
    }
}

/// Frequency samples `(2kβ, -4πA)` from the real-`k` entries of a dataset.
pub fn frequency_samples(ds: &AmplitudeDataset) -> Vec<(Vec3, Complex64)> {
    ds.entries
        .iter()
        .filter_map(|e| {
            let k = ds.k_values[e.k_index];
            if !k.is_real() {
                return None;
            }
            e.amplitude()
                .map(|a| (scale(ds.directions[e.direction], k.kappa), -4.0 * PI * a))
        })
        .collect()
}

type Cell = (i64, i64, i64);

fn cell_of(p: Vec3, size: f64) -> Cell {
    (
        (p[0] / size).floor() as i64,
        (p[1] / size).floor() as i64,
        (p[2] / size).floor() as i64,
    )
}

/// [`born_invert_with`] under the default resampling parameters.
pub fn born_invert(ds: &AmplitudeDataset, grid: &Grid3) -> Result<Reconstruction> {
    born_invert_with(ds, grid, InversionConfig::default())
}

pub fn born_invert_with(ds: &AmplitudeDataset, grid: &Grid3, cfg: InversionConfig) -> Result<Reconstruction> {
    if !(cfg.spacing > 0.0 && cfg.cutoff_cells > 0.0) {
        return Err(Error::param("spacing", "spacing and cutoff must be positive"));
    }
    let samples = frequency_samples(ds);
    let radius = samples.iter().map(|s| norm(s.0)).fold(0.0, f64::max);
    if samples.is_empty() || radius == 0.0 {
        return Err(Error::InsufficientCoverage {
            covered: 0.0,
            required: cfg.min_coverage,
        });
    }
    let d = cfg.spacing;
    let cutoff = cfg.cutoff_cells * d * 3f64.sqrt();
    let mut buckets: HashMap<Cell, Vec<usize>> = HashMap::new();
    for (i, s) in samples.iter().enumerate() {
        buckets.entry(cell_of(s.0, cutoff)).or_default().push(i);
    }
    let m = (radius / d).floor() as i64;
    let cells: Vec<Vec3> = (-m..=m)
        .flat_map(|i| (-m..=m).flat_map(move |j| (-m..=m).map(move |k| [i as f64 * d, j as f64 * d, k as f64 * d])))
        .filter(|xi| norm(*xi) <= radius)
        .collect();

    let values: Vec<Option<Complex64>> = cells
        .par_iter()
        .map(|&xi| {
            let (ci, cj, ck) = cell_of(xi, cutoff);
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = 0.0;
            for di in -1..=1 {
                for dj in -1..=1 {
                    for dk in -1..=1 {
                        let Some(list) = buckets.get(&(ci + di, cj + dj, ck + dk)) else { continue };
                        for &s in list {
                            let dist = norm(sub(samples[s].0, xi));
                            if dist > cutoff {
                                continue;
                            }
                            if dist < 1e-12 * d {
                                return Some(samples[s].1);
                            }
                            let w = 1.0 / (dist * dist);
                            num += samples[s].1 * w;
                            den += w;
                        }
                    }
                }
            }
            (den > 0.0).then(|| num / den)
        })
        .collect();

    let uncovered = values.iter().filter(|v| v.is_none()).count();
    let covered_fraction = 1.0 - uncovered as f64 / cells.len() as f64;
    if covered_fraction < cfg.min_coverage {
        return Err(Error::InsufficientCoverage {
            covered: covered_fraction,
            required: cfg.min_coverage,
        });
    }
    let spectrum: Vec<(Vec3, Complex64)> = cells
        .iter()
        .zip(&values)
        .filter_map(|(&xi, v)| v.map(|v| (xi, v)))
        .collect();

    // q(x) = (2π)⁻³ Σ q̃(ξ) e^{-iξ·x} d³
    let factor = d * d * d / (8.0 * PI * PI * PI);
    let complex: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            if !grid.in_ball(i) {
                return Complex64::new(0.0, 0.0);
            }
            let x = grid.node(i);
            spectrum
                .iter()
                .map(|&(xi, v)| v * Complex64::from_polar(1.0, -dot(xi, x)))
                .sum::<Complex64>()
                * factor
        })
        .collect();
    let max_re = complex.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    let max_im = complex.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    Ok(Reconstruction {
        grid: *grid,
        values: complex.iter().map(|z| z.re).collect(),
        source: ds.meta.potential_id.clone(),
        interpolation: format!(
            "inverse-distance weights (power 2) within {} cell diagonals on a frequency grid of spacing {}",
            cfg.cutoff_cells, d
        ),
        covered_fraction,
        uncovered_cells: uncovered,
        imaginary_residue: if max_re > 0.0 { max_im / max_re } else { 0.0 },
        error_metrics: None,
    })
}

/// Relative L2 error and max deviation of a reconstruction against `q`.
pub fn recon_error(q: &Potential, rec: &Reconstruction) -> Result<ErrorMetrics> {
    let truth = sample_on_grid(q, &rec.grid)?;
    let mut diff2 = 0.0;
    let mut ref2 = 0.0;
    let mut max_abs = 0.0f64;
    for (i, (&t, &r)) in truth.iter().zip(&rec.values).enumerate() {
        let w = rec.grid.weight(i);
        diff2 += w * (r - t) * (r - t);
        ref2 += w * t * t;
        max_abs = max_abs.max((r - t).abs());
    }
    if ref2 == 0.0 {
        return Err(Error::UndefinedRelative {
            l2_abs: diff2.sqrt(),
            max_abs,
        });
    }
    Ok(ErrorMetrics {
        l2_rel: (diff2 / ref2).sqrt(),
        max_abs,
    })
}

/// Exact-Born table `A = -(1/4π) q̃(2kβ)` from the transform, bypassing the solver.
pub fn synthetic_born_dataset(q: &Potential, directions: Vec<Vec3>, k_values: Vec<ComplexWavenumber>) -> AmplitudeDataset {
    let meta = DatasetMeta {
        potential_id: q.id(),
        grid_n: 0,
        half_width: q.support_radius,
        solver_mode: "exact-born".into(),
        tol: 0.0,
        max_iter: 0,
        config: None,
    };
    AmplitudeDataset::from_fn(directions, k_values, meta, |b, k| {
        -q.fourier(crate::geom::cvec(scale(b, k.kappa), scale(b, k.eta))) / (4.0 * PI)
    })
}

/// First Born table computed from the grid samples of `q`,
/// `A = -(1/4π) Σ_j w_j q_j e^{2ikβ·x_j}`.
///
/// Differences between this and a solver table are pure linearization error,
/// free of the continuum-versus-grid transform gap.
pub fn grid_born_dataset(
    q: &Potential,
    grid: &Grid3,
    directions: Vec<Vec3>,
    k_values: Vec<ComplexWavenumber>,
) -> Result<AmplitudeDataset> {
    let samples = sample_on_grid(q, grid)?;
    let meta = DatasetMeta {
        potential_id: q.id(),
        grid_n: grid.n,
        half_width: grid.half_width,
        solver_mode: "grid-born".into(),
        tol: 0.0,
        max_iter: 0,
        config: None,
    };
    let field: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok(AmplitudeDataset::from_fn(directions, k_values, meta, |b, k| {
        if k.is_real() {
            -fourier3(&field, grid, scale(b, k.kappa)) / (4.0 * PI)
        } else {
            let two_k = 2.0 * k.k();
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &v) in samples.iter().enumerate() {
                if v != 0.0 {
                    acc += (Complex64::i() * two_k * dot(b, grid.node(i))).exp() * (v * grid.weight(i));
                }
            }
            -acc / (4.0 * PI)
        }
    }))
}

/// Relative L2 distance between two reconstructions on the same grid.
pub fn relative_gap(a: &Reconstruction, b: &Reconstruction) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, (x, y)) in a.values.iter().zip(&b.values).enumerate() {
        let w = a.grid.weight(i);
        num += w * (x - y) * (x - y);
        den += w * y * y;
    }
    if den > 0.0 {
        (num / den).sqrt()
    } else {
        num.sqrt()
    }
}

/// Real wavenumbers with `2k` evenly spaced over `[2k_min, 2k_max]`.
pub fn shell_wavenumbers(two_k_min: f64, two_k_max: f64, count: usize) -> Result<Vec<ComplexWavenumber>> {
    let count = count.max(2);
    (0..count)
        .map(|i| {
            let kappa = two_k_min + (two_k_max - two_k_min) * i as f64 / (count - 1) as f64;
            ComplexWavenumber::new(kappa, 0.0)
        })
        .collect()
}
