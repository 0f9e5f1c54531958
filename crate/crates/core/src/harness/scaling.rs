//! Operator-norm scaling of `T²` and the Born/direct cross-check.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geom::Vec3;
use crate::kernels::{ComplexWavenumber, EtaRule};
use crate::potential::{Grid3, Potential};
use crate::report::{loglog_slope, EstimateReport, Verdict};
use crate::solver::{born_series, direct, estimate_t2_norm, DirectLimits, Scatterer};

/// Slope window for `‖T²‖` against `√γ`.
pub const T2_SLOPE_WINDOW: (f64, f64) = (-1.4, -0.6);

/// `‖T²‖` estimates along a `κ` sweep, fitted against `√γ` on log axes.
pub fn t2_scaling(
    q: &Potential,
    grid: &Grid3,
    kappas: &[f64],
    rule: EtaRule,
    beta: Vec3,
    seed: u64,
) -> Result<EstimateReport> {
    let s = Scatterer::new(q, *grid)?;
    let mut rep = EstimateReport::new("t2-norm", "log-log slope of ||T^2|| against sqrt(gamma) in [-1.4, -0.6]");
    let mut roots = Vec::new();
    for &kappa in kappas {
        let k = rule.wavenumber(kappa, q.support_radius)?;
        rep.push(kappa, k.eta, estimate_t2_norm(&s, k, beta, seed));
        roots.push(k.gamma().sqrt());
    }
    if s.is_zero() {
        rep.verdict = Verdict::Pass;
        return Ok(rep);
    }
    let slope = loglog_slope(&roots, &rep.values());
    rep.fitted_slope = Some(slope);
    rep.verdict = Verdict::from_bool(slope >= T2_SLOPE_WINDOW.0 && slope <= T2_SLOPE_WINDOW.1);
    Ok(rep)
}

/// One point of [`born_direct_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalencePoint {
    pub kappa: f64,
    pub eta: f64,
    pub t2_norm: f64,
    /// Sup-norm gap between the two `ε` fields; `None` if the point was skipped.
    pub gap: Option<f64>,
}

/// Largest `‖T²‖` estimate at which the equivalence is required.
pub const EQUIVALENCE_NORM: f64 = 0.5;

/// Born series against the dense solve at each `(κ, η)` with `‖T²‖ < 0.5`.
///
/// Passes if every compared point agrees to `10·tol` in sup norm and at least
/// one point was compared.
pub fn born_direct_sweep(
    q: &Potential,
    grid: &Grid3,
    points: &[(f64, f64)],
    beta: Vec3,
    tol: f64,
    seed: u64,
) -> Result<(Vec<EquivalencePoint>, EstimateReport)> {
    let s = Scatterer::new(q, *grid)?;
    let mut rep = EstimateReport::new("born-vs-direct", "sup |eps_born - eps_direct| < 10 tol wherever ||T^2|| < 0.5");
    let mut rows = Vec::new();
    for &(kappa, eta) in points {
        let k = ComplexWavenumber::new(kappa, eta)?;
        let t2 = estimate_t2_norm(&s, k, beta, seed);
        let gap = if t2 < EQUIVALENCE_NORM {
            let born = born_series(&s, k, beta, tol, 10_000)?;
            let dense = direct(&s, k, beta, DirectLimits::default())?.epsilon();
            Some(born.sup_diff(&dense))
        } else {
            None
        };
        if let Some(g) = gap {
            rep.push(kappa, eta, g);
        }
        rows.push(EquivalencePoint { kappa, eta, t2_norm: t2, gap });
    }
    let compared = rep.sweep.len();
    let worst = rep.values().into_iter().fold(0.0, f64::max);
    rep.extra("compared_points", compared as f64);
    rep.extra("worst_gap", worst);
    rep.verdict = if compared == 0 {
        Verdict::Inconclusive
    } else {
        Verdict::from_bool(worst < 10.0 * tol)
    };
    Ok((rows, rep))
}
