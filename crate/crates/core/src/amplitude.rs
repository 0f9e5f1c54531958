//! Scattering amplitudes and backscattering datasets.
//!
//! The far-field coefficient of `u(x, α, k)` in direction `β` follows from the
//! large-`|x|` form of the kernel in the integral equation:
//! `A(β, α, k) = -(1/4π) ∫ e^{-ikβ·y} q(y) u(y, α, k) dy`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{dot, neg, spiral_directions, Vec3};
use crate::kernels::ComplexWavenumber;
use crate::potential::{Grid3, Potential};
use crate::solver::{solve, DirectLimits, ScatteringField, Scatterer, SolveMode};

/// `-(1/4π) Σ_j w_j e^{-ikβ·y_j} q_j u_j`.
pub fn far_field_amplitude(s: &Scatterer, u: &ScatteringField, beta: Vec3, k: ComplexWavenumber) -> Complex64 {
    let grid = &s.grid;
    let kk = k.k();
    let mut acc = Complex64::new(0.0, 0.0);
    for &j in &s.support {
        let phase = (-Complex64::i() * kk * dot(beta, grid.node(j))).exp();
        acc += phase * u.u[j] * (s.samples[j] * grid.weight(j));
    }
    -acc / (4.0 * PI)
}

/// First Born approximation `-(1/4π) q̃(k(α - β))` for real `k`.
pub fn born_amplitude(q: &Potential, beta: Vec3, alpha: Vec3, k: f64) -> Complex64 {
    let xi = [
        k * (alpha[0] - beta[0]),
        k * (alpha[1] - beta[1]),
        k * (alpha[2] - beta[2]),
    ];
    -q.fourier_real(xi) / (4.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub mode: SolveMode,
    #[serde(default)]
    pub limits: DirectLimits,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200,
            mode: SolveMode::BornSeries,
            limits: DirectLimits::default(),
        }
    }
}

impl SolverConfig {
    pub fn solve(&self, s: &Scatterer, k: ComplexWavenumber, alpha: Vec3) -> Result<ScatteringField> {
        solve(s, k, alpha, self.mode, self.tol, self.max_iter, self.limits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryStatus {
    Ok,
    /// Series diverged, dense solve used.
    Fallback,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub direction: usize,
    pub k_index: usize,
    /// `(re, im)` of `A(-β, β, k)`; absent on failure.
    pub value: Option<[f64; 2]>,
    pub status: EntryStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Entry {
    pub fn amplitude(&self) -> Option<Complex64> {
        self.value.map(|[re, im]| Complex64::new(re, im))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub potential_id: String,
    pub grid_n: usize,
    pub half_width: f64,
    pub solver_mode: String,
    pub tol: f64,
    pub max_iter: usize,
    /// Producing configuration, verbatim, when generated by the CLI.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<String>,
}

/// Backscattering table `A(-β, β, k)`, ordered by (direction, k).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeDataset {
    pub directions: Vec<Vec3>,
    pub k_values: Vec<ComplexWavenumber>,
    pub entries: Vec<Entry>,
    pub meta: DatasetMeta,
}

impl AmplitudeDataset {
    /// All-ok dataset from a function of `(β, k)`.
    pub fn from_fn<F: Fn(Vec3, ComplexWavenumber) -> Complex64>(
        directions: Vec<Vec3>,
        k_values: Vec<ComplexWavenumber>,
        meta: DatasetMeta,
        f: F,
    ) -> Self {
        let mut entries = Vec::with_capacity(directions.len() * k_values.len());
        for (d, &b) in directions.iter().enumerate() {
            for (ki, &k) in k_values.iter().enumerate() {
                let v = f(b, k);
                entries.push(Entry {
                    direction: d,
                    k_index: ki,
                    value: Some([v.re, v.im]),
                    status: EntryStatus::Ok,
                    error: None,
                });
            }
        }
        Self {
            directions,
            k_values,
            entries,
            meta,
        }
    }

    pub fn get(&self, direction: usize, k_index: usize) -> Option<Complex64> {
        self.entries
            .get(direction * self.k_values.len() + k_index)
            .and_then(|e| e.amplitude())
    }

    pub fn failures(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.status == EntryStatus::Failed)
            .count()
    }

    /// Same dataset with every entry multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            if let Some(v) = &mut e.value {
                v[0] *= c;
                v[1] *= c;
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.len() != self.directions.len() * self.k_values.len() {
            return Err(Error::Parse(format!(
                "dataset has {} entries for {} directions x {} wavenumbers",
                self.entries.len(),
                self.directions.len(),
                self.k_values.len()
            )));
        }
        for (i, e) in self.entries.iter().enumerate() {
            if e.direction * self.k_values.len() + e.k_index != i {
                return Err(Error::Parse(format!("entry {i} is out of order")));
            }
            if let Some(v) = e.value {
                if !(v[0].is_finite() && v[1].is_finite()) {
                    return Err(Error::Parse(format!("entry {i} is not finite")));
                }
            }
        }
        if self.k_values.iter().any(|k| k.eta < 0.0) {
            return Err(Error::Parse("negative eta in k_values".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ds: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        ds.validate()?;
        Ok(ds)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// `beta_x,beta_y,beta_z,kappa,eta,re_A,im_A`; failed entries are `NaN`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("beta_x,beta_y,beta_z,kappa,eta,re_A,im_A\n");
        for e in &self.entries {
            let b = self.directions[e.direction];
            let k = self.k_values[e.k_index];
            let [re, im] = e.value.unwrap_or([f64::NAN, f64::NAN]);
            let _ = writeln!(out, "{},{},{},{},{},{},{}", b[0], b[1], b[2], k.kappa, k.eta, re, im);
        }
        out
    }
}

/// `A(-β, β, k)` for `β` in a spiral set of `direction_count` points and every `k`.
pub fn backscatter_dataset(
    q: &Potential,
    grid: &Grid3,
    direction_count: usize,
    k_list: &[ComplexWavenumber],
    solver: SolverConfig,
) -> Result<AmplitudeDataset> {
    if direction_count == 0 {
        return Err(Error::param("direction_count", "must be at least 1"));
    }
    backscatter_on(q, grid, spiral_directions(direction_count), k_list, solver)
}

/// [`backscatter_dataset`] on an explicit direction set.
pub fn backscatter_on(
    q: &Potential,
    grid: &Grid3,
    directions: Vec<Vec3>,
    k_list: &[ComplexWavenumber],
    solver: SolverConfig,
) -> Result<AmplitudeDataset> {
    let s = Scatterer::new(q, *grid)?;
    let nk = k_list.len();
    let jobs: Vec<(usize, usize)> = (0..directions.len())
        .flat_map(|d| (0..nk).map(move |k| (d, k)))
        .collect();
    let entries: Vec<Entry> = jobs
        .par_iter()
        .map(|&(d, ki)| {
            let beta = directions[d];
            let k = k_list[ki];
            if s.is_zero() {
                return Entry {
                    direction: d,
                    k_index: ki,
                    value: Some([0.0, 0.0]),
                    status: EntryStatus::Ok,
                    error: None,
                };
            }
            match solver.solve(&s, k, beta) {
                Ok(u) => {
                    let a = far_field_amplitude(&s, &u, neg(beta), k);
                    let status = if u.mode != solver.mode {
                        EntryStatus::Fallback
                    } else {
                        EntryStatus::Ok
                    };
                    Entry {
                        direction: d,
                        k_index: ki,
                        value: Some([a.re, a.im]),
                        status,
                        error: None,
                    }
                }
                Err(e) => Entry {
                    direction: d,
                    k_index: ki,
                    value: None,
                    status: EntryStatus::Failed,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(AmplitudeDataset {
        directions,
        k_values: k_list.to_vec(),
        entries,
        meta: DatasetMeta {
            potential_id: q.id(),
            grid_n: grid.n,
            half_width: grid.half_width,
            solver_mode: format!("{:?}", solver.mode),
            tol: solver.tol,
            max_iter: solver.max_iter,
            config: None,
        },
    })
}

/// Amplitude `A(β, α, k)` from one solve.
pub fn amplitude(s: &Scatterer, beta: Vec3, alpha: Vec3, k: ComplexWavenumber, solver: SolverConfig) -> Result<Complex64> {
    if s.is_zero() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let u = solver.solve(s, k, alpha)?;
    Ok(far_field_amplitude(s, &u, beta, k))
}

/// `max |A(β, α, k) - A(-α, -β, k)| / max |A|` over the pairs `(β, α)`.
pub fn check_reciprocity(
    q: &Potential,
    grid: &Grid3,
    pairs: &[(Vec3, Vec3)],
    k: ComplexWavenumber,
    solver: SolverConfig,
) -> Result<f64> {
    let s = Scatterer::new(q, *grid)?;
    if s.is_zero() {
        return Ok(0.0);
    }
    let mut max_dev = 0.0f64;
    let mut max_abs = 0.0f64;
    for &(beta, alpha) in pairs {
        let a = amplitude(&s, beta, alpha, k, solver)?;
        let b = amplitude(&s, neg(alpha), neg(beta), k, solver)?;
        max_dev = max_dev.max((a - b).norm());
        max_abs = max_abs.max(a.norm()).max(b.norm());
    }
    Ok(if max_abs > 0.0 { max_dev / max_abs } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::normalize;

    fn grid() -> Grid3 {
        Grid3::new(1.0, 12).unwrap()
    }

    #[test]
    fn zero_potential_gives_zero_data() {
        let k = [ComplexWavenumber::real(2.0).unwrap()];
        let ds = backscatter_dataset(&Potential::zero(1.0), &grid(), 5, &k, SolverConfig::default()).unwrap();
        assert!(ds.entries.iter().all(|e| e.amplitude() == Some(Complex64::new(0.0, 0.0))));
        let dev = check_reciprocity(&Potential::zero(1.0), &grid(), &[([0.0, 0.0, 1.0], [1.0, 0.0, 0.0])], k[0], SolverConfig::default()).unwrap();
        assert_eq!(dev, 0.0);
    }

    #[test]
    fn weak_coupling_approaches_born() {
        let q = Potential::bump(0.05, 1.0).unwrap();
        let g = Grid3::new(1.0, 16).unwrap();
        let s = Scatterer::new(&q, g).unwrap();
        let k = 1.5;
        let alpha = [0.0, 0.0, 1.0];
        for beta in [normalize([1.0, 0.0, 1.0]), neg(alpha)] {
            let a = amplitude(&s, beta, alpha, ComplexWavenumber::real(k).unwrap(), SolverConfig::default()).unwrap();
            let b = born_amplitude(&q, beta, alpha, k);
            assert!((a - b).norm() / a.norm() < 0.05, "{a} vs {b}");
        }
    }

    #[test]
    fn radial_potential_data_is_isotropic() {
        let q = Potential::bump(1.0, 1.0).unwrap();
        let k = [ComplexWavenumber::real(2.0).unwrap()];
        let ds = backscatter_dataset(&q, &grid(), 8, &k, SolverConfig::default()).unwrap();
        let vals: Vec<Complex64> = (0..8).map(|d| ds.get(d, 0).unwrap()).collect();
        let mean: Complex64 = vals.iter().sum::<Complex64>() / 8.0;
        let spread = vals.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);
        assert!(spread / mean.norm() < 1e-2, "spread {}", spread / mean.norm());
    }

    #[test]
    fn backscattering_pair_is_self_reciprocal() {
        let q = Potential::bump(1.0, 1.0).unwrap();
        let alpha = normalize([0.3, -0.2, 0.9]);
        let dev = check_reciprocity(&q, &grid(), &[(neg(alpha), alpha)], ComplexWavenumber::real(2.0).unwrap(), SolverConfig::default()).unwrap();
        assert!(dev < 1e-6);
    }

    #[test]
    fn dataset_round_trips_through_json() {
        let q = Potential::bump(1.0, 1.0).unwrap();
        let k = [ComplexWavenumber::real(1.0).unwrap(), ComplexWavenumber::new(3.0, 0.5).unwrap()];
        let ds = backscatter_dataset(&q, &Grid3::new(1.0, 8).unwrap(), 3, &k, SolverConfig::default()).unwrap();
        let back = AmplitudeDataset::from_json(&ds.to_json().unwrap()).unwrap();
        assert_eq!(back, ds);
        assert_eq!(ds.to_csv().lines().count(), 1 + 6);
        assert!(matches!(AmplitudeDataset::from_json("{\"directions\": 3"), Err(Error::Parse(_))));
    }

    #[test]
    fn divergent_entries_are_isolated() {
        let q = Potential::bump(400.0, 1.0).unwrap();
        let solver = SolverConfig {
            max_iter: 20,
            limits: DirectLimits { max_n: 4, max_unknowns: 10 },
            ..SolverConfig::default()
        };
        let k = [ComplexWavenumber::real(0.5).unwrap()];
        let ds = backscatter_dataset(&q, &Grid3::new(1.0, 8).unwrap(), 2, &k, solver).unwrap();
        assert_eq!(ds.failures(), 2);
        assert!(ds.entries[0].error.as_deref().unwrap().contains("converge"));
    }
}
