//! Discrete Lippmann–Schwinger equation, the `T` operator and its solvers.
//!
//! With `u = e^{ikα·x}(1 + ε)` the equation `u = e^{ikα·x} - ∫ g q u dy`
//! becomes `ε = f₀ - Tε`, `f₀ = -T1`, where `T` integrates against the
//! phase-stripped kernel `G(x - y) = g(x - y)e^{-ikα·(x - y)}`. Both forms are
//! discretized with the same collocation rule (node values, weights `h³`, and
//! the cube mean of `1/(4π|r|)` on the diagonal), so they are algebraically
//! equivalent and the discrete amplitudes satisfy exact reciprocity.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{dot, norm, sub, Vec3};
use crate::kernels::{free_green_at, modified_green_at, ComplexWavenumber};
use crate::potential::{sample_on_grid, Grid3, Potential};

/// `∫_{[-1/2,1/2]³} |r|⁻¹ dr`.
pub const CUBE_MEAN_INV_R: f64 = 2.380_077_363_979_553;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    BornSeries,
    Direct,
}

/// Potential sampled on a grid, with its support and the ball nodes.
#[derive(Debug, Clone)]
pub struct Scatterer {
    pub grid: Grid3,
    pub samples: Vec<f64>,
    /// Nodes with `q ≠ 0` and nonzero weight.
    pub support: Vec<usize>,
    /// All nodes inside `B_a`.
    pub ball: Vec<usize>,
}

impl Scatterer {
    pub fn new(q: &Potential, grid: Grid3) -> Result<Self> {
        Ok(Self::from_samples(sample_on_grid(q, &grid)?, grid))
    }

    pub fn from_samples(samples: Vec<f64>, grid: Grid3) -> Self {
        let ball = grid.ball_nodes();
        let support = ball
            .iter()
            .copied()
            .filter(|&i| samples[i] != 0.0)
            .collect();
        Self {
            grid,
            samples,
            support,
            ball,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }
}

/// Kernel values on every node offset, shared by all target/source pairs.
#[derive(Debug, Clone)]
struct OffsetTable {
    n: usize,
    values: Vec<Complex64>,
}

impl OffsetTable {
    /// `phase = None` gives the free kernel `g`, `Some(β)` the modified `G`.
    fn new(grid: &Grid3, k: Complex64, beta: Option<Vec3>) -> Self {
        let n = grid.n;
        let m = 2 * n - 1;
        let h = grid.h;
        let diag = CUBE_MEAN_INV_R / (4.0 * PI * h);
        let values = (0..m * m * m)
            .into_par_iter()
            .map(|idx| {
                let di = (idx / (m * m)) as f64 - (n - 1) as f64;
                let dj = ((idx / m) % m) as f64 - (n - 1) as f64;
                let dk = (idx % m) as f64 - (n - 1) as f64;
                if di == 0.0 && dj == 0.0 && dk == 0.0 {
                    return Complex64::new(diag, 0.0);
                }
                let r = [di * h, dj * h, dk * h];
                let d = norm(r);
                match beta {
                    None => free_green_at(d, k),
                    Some(b) => modified_green_at(d, dot(b, r), k),
                }
            })
            .collect();
        Self { n, values }
    }

    #[inline]
    fn target_base(&self, grid: &Grid3, idx: usize) -> usize {
        let n = self.n;
        let m = 2 * n - 1;
        let (i, j, k) = grid.ijk(idx);
        ((i + n - 1) * m + (j + n - 1)) * m + (k + n - 1)
    }

    #[inline]
    fn source_offset(&self, grid: &Grid3, idx: usize) -> usize {
        let m = 2 * self.n - 1;
        let (i, j, k) = grid.ijk(idx);
        (i * m + j) * m + k
    }
}

/// Discrete integral operator `(Kf)(x_i) = Σ_j K(x_i - x_j) q_j w_j f_j`
/// with sources on the support of `q`.
#[derive(Debug, Clone)]
pub struct ScatteringOperator {
    pub grid: Grid3,
    pub k: ComplexWavenumber,
    /// `Some(β)` for `T`, `None` for the free kernel of the `u`-form.
    pub beta: Option<Vec3>,
    table: OffsetTable,
    sources: Vec<usize>,
    source_offsets: Vec<usize>,
    coeff: Vec<f64>,
}

impl ScatteringOperator {
    pub fn new(s: &Scatterer, k: ComplexWavenumber, beta: Option<Vec3>) -> Self {
        let table = OffsetTable::new(&s.grid, k.k(), beta);
        let sources = s.support.clone();
        let source_offsets = sources
            .iter()
            .map(|&i| table.source_offset(&s.grid, i))
            .collect();
        let coeff = sources
            .iter()
            .map(|&i| s.samples[i] * s.grid.weight(i))
            .collect();
        Self {
            grid: s.grid,
            k,
            beta,
            table,
            sources,
            source_offsets,
            coeff,
        }
    }

    /// The phase-stripped operator `T` for direction `β`.
    pub fn t_operator(s: &Scatterer, k: ComplexWavenumber, beta: Vec3) -> Self {
        Self::new(s, k, Some(beta))
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn dim(&self) -> usize {
        self.sources.len()
    }

    /// Kernel value for a target and the `j`-th source.
    #[inline]
    fn kernel(&self, base: usize, j: usize) -> Complex64 {
        self.table.values[base - self.source_offsets[j]]
    }

    /// `(Kf)` at one grid node, `f` given on the sources.
    pub fn apply_at(&self, target: usize, f: &[Complex64]) -> Complex64 {
        let base = self.table.target_base(&self.grid, target);
        let mut acc = ZERO;
        for j in 0..self.sources.len() {
            acc += self.kernel(base, j) * (f[j] * self.coeff[j]);
        }
        acc
    }

    /// `(Kf)` at the given grid nodes.
    pub fn apply_targets(&self, f: &[Complex64], targets: &[usize]) -> Vec<Complex64> {
        let cf: Vec<Complex64> = f.iter().zip(&self.coeff).map(|(v, c)| v * c).collect();
        targets
            .par_iter()
            .map(|&t| {
                let base = self.table.target_base(&self.grid, t);
                let mut acc = ZERO;
                for (j, v) in cf.iter().enumerate() {
                    acc += self.kernel(base, j) * v;
                }
                acc
            })
            .collect()
    }

    /// `(Kf)` on the sources themselves (the square system).
    pub fn apply(&self, f: &[Complex64]) -> Vec<Complex64> {
        self.apply_targets(f, &self.sources)
    }

    /// Transpose product `(Kᵀa)_j = c_j Σ_m a_m K(x_m - x_j)` on the sources.
    pub fn apply_transpose(&self, a: &[Complex64]) -> Vec<Complex64> {
        let bases: Vec<usize> = self
            .sources
            .iter()
            .map(|&m| self.table.target_base(&self.grid, m))
            .collect();
        (0..self.sources.len())
            .into_par_iter()
            .map(|j| {
                let off = self.source_offsets[j];
                let mut acc = ZERO;
                for (m, &b) in bases.iter().enumerate() {
                    acc += a[m] * self.table.values[b - off];
                }
                acc * self.coeff[j]
            })
            .collect()
    }

    /// Row `i` (a source position) of `K` as coefficients on the sources.
    pub fn row(&self, i: usize) -> Vec<Complex64> {
        let base = self.table.target_base(&self.grid, self.sources[i]);
        (0..self.sources.len())
            .map(|j| self.kernel(base, j) * self.coeff[j])
            .collect()
    }

    /// Dense matrix `I + K` on the sources.
    fn dense_system(&self) -> DMatrix<Complex64> {
        let n = self.sources.len();
        let mut m = DMatrix::from_element(n, n, ZERO);
        for i in 0..n {
            let base = self.table.target_base(&self.grid, self.sources[i]);
            for j in 0..n {
                m[(i, j)] = self.kernel(base, j) * self.coeff[j];
            }
            m[(i, i)] += Complex64::new(1.0, 0.0);
        }
        m
    }
}

/// `(Tf)` on every grid node for a full-grid field `f` (zero outside `B_a`).
pub fn apply_t(
    f: &[Complex64],
    q_samples: &[f64],
    grid: &Grid3,
    k: ComplexWavenumber,
    beta: Vec3,
) -> Vec<Complex64> {
    let s = Scatterer::from_samples(q_samples.to_vec(), *grid);
    let mut out = vec![ZERO; grid.len()];
    if s.is_zero() {
        return out;
    }
    let op = ScatteringOperator::t_operator(&s, k, beta);
    let fs: Vec<Complex64> = s.support.iter().map(|&i| f[i]).collect();
    let vals = op.apply_targets(&fs, &s.ball);
    for (&i, v) in s.ball.iter().zip(vals) {
        out[i] = v;
    }
    out
}

fn plane_wave(grid: &Grid3, k: ComplexWavenumber, alpha: Vec3, idx: usize) -> Complex64 {
    (Complex64::i() * k.k() * dot(alpha, grid.node(idx))).exp()
}

fn sup(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `ε(x, β, k)` on the grid (zero outside `B_a`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpsilonField {
    pub grid: Grid3,
    pub beta: Vec3,
    pub k: ComplexWavenumber,
    pub values: Vec<Complex64>,
    pub mode: SolveMode,
    /// Sup-norm residual of `ε + Tε - f₀` on the support.
    pub residual: f64,
    pub iterations: usize,
}

impl EpsilonField {
    pub fn sup_diff(&self, other: &EpsilonField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `u = e^{ikβ·x}(1 + ε)` on the ball nodes.
    pub fn to_solution(&self) -> ScatteringField {
        let u = (0..self.grid.len())
            .map(|i| {
                if self.grid.in_ball(i) {
                    plane_wave(&self.grid, self.k, self.beta, i) * (1.0 + self.values[i])
                } else {
                    ZERO
                }
            })
            .collect();
        ScatteringField {
            grid: self.grid,
            alpha: self.beta,
            k: self.k,
            u,
            mode: self.mode,
            residual: self.residual,
            iterations: self.iterations,
        }
    }

    pub fn csv_rows(&self) -> Vec<String> {
        field_rows(&self.grid, &self.values)
    }
}

/// Scattering solution `u(x, α, k)` on the ball nodes (zero outside).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScatteringField {
    pub grid: Grid3,
    pub alpha: Vec3,
    pub k: ComplexWavenumber,
    pub u: Vec<Complex64>,
    pub mode: SolveMode,
    pub residual: f64,
    pub iterations: usize,
}

impl ScatteringField {
    /// `ε = e^{-ikα·x}u - 1` on the ball nodes.
    pub fn epsilon(&self) -> EpsilonField {
        let values = (0..self.grid.len())
            .map(|i| {
                if self.grid.in_ball(i) {
                    self.u[i] / plane_wave(&self.grid, self.k, self.alpha, i) - 1.0
                } else {
                    ZERO
                }
            })
            .collect();
        EpsilonField {
            grid: self.grid,
            beta: self.alpha,
            k: self.k,
            values,
            mode: self.mode,
            residual: self.residual,
            iterations: self.iterations,
        }
    }

    pub fn csv_rows(&self) -> Vec<String> {
        field_rows(&self.grid, &self.u)
    }
}

fn field_rows(grid: &Grid3, values: &[Complex64]) -> Vec<String> {
    (0..grid.len())
        .filter(|&i| grid.in_ball(i))
        .map(|i| {
            let x = grid.node(i);
            format!("{},{},{},{},{}", x[0], x[1], x[2], values[i].re, values[i].im)
        })
        .collect()
}

/// Born series for `ε = f₀ - Tε` on a prepared scatterer.
///
/// Starts from `ε₀ = 0`, so the first iterate is the free term. Updates are
/// checked after every second application of `T`.
pub fn born_series(
    s: &Scatterer,
    k: ComplexWavenumber,
    beta: Vec3,
    tol: f64,
    max_iter: usize,
) -> Result<EpsilonField> {
    let grid = s.grid;
    let mut values = vec![ZERO; grid.len()];
    if s.is_zero() {
        return Ok(EpsilonField {
            grid,
            beta,
            k,
            values,
            mode: SolveMode::BornSeries,
            residual: 0.0,
            iterations: 1,
        });
    }
    let op = ScatteringOperator::t_operator(s, k, beta);
    let ones = vec![Complex64::new(1.0, 0.0); op.dim()];
    let f0: Vec<Complex64> = op.apply(&ones).into_iter().map(|v| -v).collect();

    let step = |e: &[Complex64]| -> Vec<Complex64> {
        op.apply(e)
            .into_iter()
            .zip(&f0)
            .map(|(te, f)| f - te)
            .collect()
    };
    let mut eps = f0.clone();
    let mut iterations = 1;
    let mut prev_update = f64::INFINITY;
    let mut growth = 0;
    loop {
        let next = step(&step(&eps));
        iterations += 2;
        let update = eps
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        eps = next;
        if !update.is_finite() {
            return Err(Error::Divergence {
                iterations,
                last_update: update,
            });
        }
        if update < tol {
            break;
        }
        if update >= prev_update {
            growth += 1;
        } else {
            growth = 0;
        }
        if iterations >= max_iter || growth >= 3 {
            return Err(Error::Divergence {
                iterations,
                last_update: update,
            });
        }
        prev_update = update;
    }
    let teps = op.apply(&eps);
    let residual = eps
        .iter()
        .zip(&teps)
        .zip(&f0)
        .map(|((e, t), f)| (e + t - f).norm())
        .fold(0.0, f64::max);

    for (pos, &i) in s.support.iter().enumerate() {
        values[i] = eps[pos];
    }
    let rest: Vec<usize> = s
        .ball
        .iter()
        .copied()
        .filter(|&i| s.samples[i] == 0.0)
        .collect();
    if !rest.is_empty() {
        let v: Vec<Complex64> = eps.iter().map(|e| 1.0 + e).collect();
        for (&i, t) in rest.iter().zip(op.apply_targets(&v, &rest)) {
            values[i] = -t;
        }
    }
    Ok(EpsilonField {
        grid,
        beta,
        k,
        values,
        mode: SolveMode::BornSeries,
        residual,
        iterations,
    })
}

/// The iterate `ε_m` of `ε_{m+1} = f₀ - Tε_m`, `ε₀ = 0`, on the support.
pub fn born_iterate(s: &Scatterer, k: ComplexWavenumber, beta: Vec3, m: usize) -> Vec<Complex64> {
    let op = ScatteringOperator::t_operator(s, k, beta);
    let ones = vec![Complex64::new(1.0, 0.0); op.dim()];
    let f0: Vec<Complex64> = op.apply(&ones).into_iter().map(|v| -v).collect();
    let mut eps = vec![ZERO; op.dim()];
    for _ in 0..m {
        eps = op
            .apply(&eps)
            .into_iter()
            .zip(&f0)
            .map(|(te, f)| f - te)
            .collect();
    }
    eps
}

/// [`born_series`] for a potential.
pub fn born_solve(
    q: &Potential,
    grid: &Grid3,
    k: ComplexWavenumber,
    beta: Vec3,
    tol: f64,
    max_iter: usize,
) -> Result<EpsilonField> {
    born_series(&Scatterer::new(q, *grid)?, k, beta, tol, max_iter)
}

/// Limits on the dense oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectLimits {
    pub max_n: usize,
    pub max_unknowns: usize,
}

impl Default for DirectLimits {
    fn default() -> Self {
        Self {
            max_n: 32,
            max_unknowns: 6000,
        }
    }
}

/// Dense LU solve of `u + ∫ g q u dy = e^{ikα·x}` on a prepared scatterer.
pub fn direct(
    s: &Scatterer,
    k: ComplexWavenumber,
    alpha: Vec3,
    limits: DirectLimits,
) -> Result<ScatteringField> {
    let grid = s.grid;
    if grid.n > limits.max_n {
        return Err(Error::Solver(format!(
            "grid n = {} exceeds the dense-solve limit {}",
            grid.n, limits.max_n
        )));
    }
    if s.support.len() > limits.max_unknowns {
        return Err(Error::Solver(format!(
            "{} unknowns exceed the dense-solve limit {}",
            s.support.len(),
            limits.max_unknowns
        )));
    }
    let mut u = vec![ZERO; grid.len()];
    for &i in &s.ball {
        u[i] = plane_wave(&grid, k, alpha, i);
    }
    if s.is_zero() {
        return Ok(ScatteringField {
            grid,
            alpha,
            k,
            u,
            mode: SolveMode::Direct,
            residual: 0.0,
            iterations: 0,
        });
    }
    let op = ScatteringOperator::new(s, k, None);
    let rhs: Vec<Complex64> = s.support.iter().map(|&i| u[i]).collect();
    let lu = op.dense_system().lu();
    let sol = lu
        .solve(&DVector::from_vec(rhs.clone()))
        .ok_or_else(|| Error::Solver("singular Lippmann-Schwinger matrix".into()))?;
    let us: Vec<Complex64> = sol.iter().copied().collect();
    if us.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solver("non-finite solution".into()));
    }
    for (pos, &i) in s.support.iter().enumerate() {
        u[i] = us[pos];
    }
    let rest: Vec<usize> = s
        .ball
        .iter()
        .copied()
        .filter(|&i| s.samples[i] == 0.0)
        .collect();
    for (&i, t) in rest.iter().zip(op.apply_targets(&us, &rest)) {
        u[i] -= t;
    }
    let residual = lippmann_schwinger_residual(s, k, alpha, &u);
    Ok(ScatteringField {
        grid,
        alpha,
        k,
        u,
        mode: SolveMode::Direct,
        residual,
        iterations: 0,
    })
}

/// [`direct`] for a potential, with the default size guard.
pub fn direct_solve(
    q: &Potential,
    grid: &Grid3,
    k: ComplexWavenumber,
    alpha: Vec3,
) -> Result<ScatteringField> {
    direct(&Scatterer::new(q, *grid)?, k, alpha, DirectLimits::default())
}

/// Sup-norm residual of `u + ∫ g q u dy - e^{ikα·x}` on the support,
/// evaluated by direct kernel summation (no offset table).
pub fn lippmann_schwinger_residual(
    s: &Scatterer,
    k: ComplexWavenumber,
    alpha: Vec3,
    u: &[Complex64],
) -> f64 {
    let grid = s.grid;
    let kk = k.k();
    let diag = grid.h * grid.h * CUBE_MEAN_INV_R / (4.0 * PI);
    s.support
        .par_iter()
        .map(|&i| {
            let x = grid.node(i);
            let mut acc = ZERO;
            for &j in &s.support {
                let c = s.samples[j] * u[j];
                if i == j {
                    acc += c * diag;
                } else {
                    let d = norm(sub(x, grid.node(j)));
                    acc += free_green_at(d, kk) * (c * grid.weight(j));
                }
            }
            (u[i] + acc - plane_wave(&grid, k, alpha, i)).norm()
        })
        .reduce(|| 0.0, f64::max)
}

/// Solve with the fallback policy: Born series first, dense solve if the
/// series diverges and the grid permits.
pub fn solve(
    s: &Scatterer,
    k: ComplexWavenumber,
    alpha: Vec3,
    mode: SolveMode,
    tol: f64,
    max_iter: usize,
    limits: DirectLimits,
) -> Result<ScatteringField> {
    match mode {
        SolveMode::Direct => direct(s, k, alpha, limits),
        SolveMode::BornSeries => match born_series(s, k, alpha, tol, max_iter) {
            Ok(e) => Ok(e.to_solution()),
            Err(Error::Divergence {
                iterations,
                last_update,
            }) => direct(s, k, alpha, limits).map_err(|_| Error::Divergence {
                iterations,
                last_update,
            }),
            Err(e) => Err(e),
        },
    }
}

/// `u(x, α, k)` for a potential in the requested mode (no fallback).
pub fn scattering_solution(
    q: &Potential,
    grid: &Grid3,
    k: ComplexWavenumber,
    alpha: Vec3,
    mode: SolveMode,
    tol: f64,
    max_iter: usize,
) -> Result<ScatteringField> {
    let s = Scatterer::new(q, *grid)?;
    match mode {
        SolveMode::Direct => direct(&s, k, alpha, DirectLimits::default()),
        SolveMode::BornSeries => Ok(born_series(&s, k, alpha, tol, max_iter)?.to_solution()),
    }
}

/// Number of random start fields for [`estimate_t2_norm`].
pub const NORM_STARTS: usize = 8;
/// `T²` applications per start field.
pub const NORM_STEPS: usize = 3;

/// Lower estimate of `‖T²‖` on the sup-norm space over the support of `q`.
///
/// Each start field has unit-modulus entries with phases drawn from ChaCha8
/// seeded by `seed`. After every application the field is replaced by the
/// phase of the conjugated row of `T²` at the maximising node, which is the
/// dual step of the Hager–Higham estimator for the `∞`-norm.
pub fn estimate_t2_norm(s: &Scatterer, k: ComplexWavenumber, beta: Vec3, seed: u64) -> f64 {
    if s.is_zero() {
        return 0.0;
    }
    let op = ScatteringOperator::t_operator(s, k, beta);
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for _ in 0..NORM_STARTS {
        let mut f: Vec<Complex64> = (0..n)
            .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI)))
            .collect();
        for step in 0..NORM_STEPS {
            let g = op.apply(&op.apply(&f));
            let (imax, gmax) = g
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.norm()))
                .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            best = best.max(gmax / sup(&f));
            if step + 1 == NORM_STEPS {
                break;
            }
            let row = op.apply_transpose(&op.row(imax));
            f = row
                .iter()
                .map(|r| {
                    if r.norm() > 0.0 {
                        r.conj() / r.norm()
                    } else {
                        Complex64::new(1.0, 0.0)
                    }
                })
                .collect();
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialKind;
    use proptest::prelude::*;

    fn weak() -> Potential {
        Potential::bump(0.5, 1.0).unwrap()
    }

    #[test]
    fn cube_constant_matches_closed_form() {
        // 3 ln(2 + √3) - π/2 for the unit cube centred at the origin.
        let exact = 3.0 * (2.0 + 3f64.sqrt()).ln() - PI / 2.0;
        assert!((CUBE_MEAN_INV_R - exact).abs() < 1e-12);
    }

    #[test]
    fn t_vanishes_for_zero_potential() {
        let grid = Grid3::new(1.0, 8).unwrap();
        let f = vec![Complex64::new(1.0, 2.0); grid.len()];
        let k = ComplexWavenumber::new(4.0, 1.0).unwrap();
        let out = apply_t(&f, &vec![0.0; grid.len()], &grid, k, [0.0, 0.0, 1.0]);
        assert!(out.iter().all(|v| *v == ZERO));
    }

    #[test]
    fn static_ball_potential_at_the_centre() {
        let grid = Grid3::new(1.0, 48).unwrap();
        let q = Potential::ball(1.0, 1.0).unwrap();
        let samples = sample_on_grid(&q, &grid).unwrap();
        let s = Scatterer::from_samples(samples, grid);
        let op = ScatteringOperator::t_operator(&s, ComplexWavenumber::new(0.0, 0.0).unwrap(), [0.0, 0.0, 1.0]);
        let ones = vec![Complex64::new(1.0, 0.0); op.dim()];
        let c = grid.index(24, 24, 24);
        let x = grid.node(c);
        // (3R² - |x|²)/6 from the radial integral
        let exact = (3.0 - dot(x, x)) / 6.0;
        let v = op.apply_at(c, &ones);
        assert!((v.re - exact).abs() < 1e-2 * exact, "{} vs {exact}", v.re);
        assert!((v.re - 0.5).abs() < 1e-2 * 0.5);
    }

    #[test]
    fn zero_potential_gives_plane_wave() {
        let grid = Grid3::new(1.0, 8).unwrap();
        let k = ComplexWavenumber::new(6.0, 0.5).unwrap();
        let alpha = [0.0, 0.6, 0.8];
        let q = Potential::zero(1.0);
        let e = born_solve(&q, &grid, k, alpha, 1e-10, 50).unwrap();
        assert!(e.values.iter().all(|v| *v == ZERO));
        assert_eq!(e.iterations, 1);
        let u = direct_solve(&q, &grid, k, alpha).unwrap();
        for i in grid.ball_nodes() {
            assert_eq!(u.u[i], plane_wave(&grid, k, alpha, i));
        }
    }

    #[test]
    fn first_iterate_is_the_free_term() {
        let grid = Grid3::new(1.0, 10).unwrap();
        let s = Scatterer::new(&weak(), grid).unwrap();
        let k = ComplexWavenumber::new(5.0, 0.0).unwrap();
        let beta = [1.0, 0.0, 0.0];
        let e1 = born_iterate(&s, k, beta, 1);
        // -∫ G q dy by direct kernel calls
        let diag = grid.h * grid.h * CUBE_MEAN_INV_R / (4.0 * PI);
        for (pos, &i) in s.support.iter().enumerate().step_by(17) {
            let mut f0 = ZERO;
            for &j in &s.support {
                let w = if i == j {
                    Complex64::new(diag, 0.0)
                } else {
                    crate::kernels::modified_green(sub(grid.node(i), grid.node(j)), k, beta).unwrap()
                        * grid.cell_volume()
                };
                f0 -= w * s.samples[j];
            }
            assert!((e1[pos] - f0).norm() < 1e-13 * f0.norm());
        }
        // With an infinite tolerance the solver stops after one pair.
        let e = born_series(&s, k, beta, f64::INFINITY, 10).unwrap();
        assert_eq!(e.iterations, 3);
        let e3 = born_iterate(&s, k, beta, 3);
        for (pos, &i) in s.support.iter().enumerate() {
            assert!((e.values[i] - e3[pos]).norm() < 1e-14);
        }
    }

    #[test]
    fn born_series_matches_direct_solve() {
        let grid = Grid3::new(1.0, 12).unwrap();
        let s = Scatterer::new(&weak(), grid).unwrap();
        let k = ComplexWavenumber::new(20.0, 0.0).unwrap();
        let alpha = [0.0, 0.0, 1.0];
        let tol = 1e-9;
        let born = born_series(&s, k, alpha, tol, 200).unwrap();
        let dense = direct(&s, k, alpha, DirectLimits::default()).unwrap();
        assert!(dense.residual < 1e-8, "residual {}", dense.residual);
        let diff = born.sup_diff(&dense.epsilon());
        assert!(diff < 1e-4, "sup diff {diff}");
        assert!(diff < 10.0 * tol);
    }

    #[test]
    fn complex_k_solution_is_bounded() {
        let grid = Grid3::new(1.0, 10).unwrap();
        let k = ComplexWavenumber::new(10.0, 2.0).unwrap();
        let u = scattering_solution(&weak(), &grid, k, [0.0, 1.0, 0.0], SolveMode::BornSeries, 1e-10, 200)
            .unwrap();
        let bound = (k.eta / 2.0).exp() * 2.0;
        assert!(u.u.iter().all(|v| v.is_finite() && v.norm() < bound));
    }

    #[test]
    fn divergent_series_is_reported() {
        let grid = Grid3::new(1.0, 8).unwrap();
        let strong = Potential::bump(400.0, 1.0).unwrap();
        let k = ComplexWavenumber::new(1.0, 0.0).unwrap();
        let r = born_solve(&strong, &grid, k, [0.0, 0.0, 1.0], 1e-10, 40);
        assert!(matches!(r, Err(Error::Divergence { .. })));
    }

    #[test]
    fn norm_estimate_is_quadratic_in_amplitude() {
        let grid = Grid3::new(1.0, 10).unwrap();
        let k = ComplexWavenumber::new(8.0, 1.0).unwrap();
        let beta = [0.0, 0.0, 1.0];
        let s1 = Scatterer::new(&weak(), grid).unwrap();
        let s2 = Scatterer::new(&weak().with_amplitude(1.0), grid).unwrap();
        let n1 = estimate_t2_norm(&s1, k, beta, 7);
        let n2 = estimate_t2_norm(&s2, k, beta, 7);
        let ratio = n2 / n1;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        let zero = Scatterer::new(&Potential::zero(1.0), grid).unwrap();
        assert_eq!(estimate_t2_norm(&zero, k, beta, 7), 0.0);
    }

    #[test]
    fn transpose_is_consistent_with_apply() {
        let grid = Grid3::new(1.0, 6).unwrap();
        let q = Potential::new(PotentialKind::TruncatedGaussianBump, 2.0, 0.7, 1.0, [0.1, 0.0, 0.0]).unwrap();
        let s = Scatterer::new(&q, grid).unwrap();
        let op = ScatteringOperator::t_operator(&s, ComplexWavenumber::new(3.0, 0.5).unwrap(), [0.6, 0.8, 0.0]);
        let n = op.dim();
        let a: Vec<Complex64> = (0..n).map(|i| Complex64::new((i as f64).sin(), 0.3)).collect();
        let f: Vec<Complex64> = (0..n).map(|i| Complex64::new(0.2, (i as f64).cos())).collect();
        let lhs: Complex64 = a.iter().zip(op.apply(&f)).map(|(x, y)| x * y).sum();
        let rhs: Complex64 = op.apply_transpose(&a).iter().zip(&f).map(|(x, y)| x * y).sum();
        assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn t_is_linear(ar in -2.0f64..2.0, ai in -2.0f64..2.0, seed in 0u64..1000) {
            let grid = Grid3::new(1.0, 6).unwrap();
            let s = Scatterer::new(&weak(), grid).unwrap();
            let op = ScatteringOperator::t_operator(&s, ComplexWavenumber::new(4.0, 1.0).unwrap(), [0.0, 0.0, 1.0]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = op.dim();
            let f: Vec<Complex64> = (0..n).map(|_| Complex64::new(rand::Rng::random::<f64>(&mut rng), rand::Rng::random::<f64>(&mut rng))).collect();
            let g: Vec<Complex64> = (0..n).map(|_| Complex64::new(rand::Rng::random::<f64>(&mut rng), rand::Rng::random::<f64>(&mut rng))).collect();
            let alpha = Complex64::new(ar, ai);
            let comb: Vec<Complex64> = f.iter().zip(&g).map(|(x, y)| alpha * x + y).collect();
            let lhs = op.apply(&comb);
            let tf = op.apply(&f);
            let tg = op.apply(&g);
            for i in 0..n {
                prop_assert!((lhs[i] - (alpha * tf[i] + tg[i])).norm() < 1e-12);
            }
        }
    }
}
