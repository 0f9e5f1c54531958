//! Growth of `q̃` along complex directions: decay in `κ`, the `e^{a|η|}`
//! envelope, and the shift `η(κ)` at which the growth catches up with the
//! real maximum `𝒫`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{symmetric_directions, Vec3};
use crate::potential::Potential;
use crate::radon::DirectionalTransform;
use crate::report::{loglog_slope, EstimateReport, Verdict};

/// Direction count used for suprema over `β` when the caller gives none.
pub const DEFAULT_DIRECTIONS: usize = 13;

fn directions_for(q: &Potential) -> Vec<Vec3> {
    if q.is_centered() {
        vec![[0.0, 0.0, 1.0]]
    } else {
        symmetric_directions(DEFAULT_DIRECTIONS)
    }
}

/// `𝒫 = max |q̃(ξ)|` on a cube of real frequencies `[-L, L]³` with `n` points per axis.
pub fn p_max_on_grid(q: &Potential, extent: f64, n: usize) -> f64 {
    let n = n.max(2);
    let mut best = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let c = |m: usize| -extent + 2.0 * extent * m as f64 / (n - 1) as f64;
                best = best.max(q.fourier_real([c(i), c(j), c(k)]).norm());
            }
        }
    }
    best
}

/// `𝒫` on a grid resolving the main lobe (odd point count, so `ξ = 0` is a node).
pub fn p_max(q: &Potential) -> f64 {
    p_max_on_grid(q, 8.0 / q.radius, 33)
}

/// Decay of `sup_β |q̃((κ + iη)β)|` along a `κ` sweep at fixed `η`.
///
/// The log of the values is fitted against `ln(1 + κ² + η²)` over the last
/// three points; passes if the slope is at most `-ℓ/2`.
pub fn decay_estimate_check(
    q: &Potential,
    betas: &[Vec3],
    kappas: &[f64],
    eta: f64,
    ell: f64,
) -> Result<EstimateReport> {
    let mut rep = EstimateReport::new(
        "decay",
        &format!("tail slope of sup|q~| against ln(1+kappa^2+eta^2) <= -{}", ell / 2.0),
    );
    if !q.is_smooth() {
        return Err(Error::param("q", "decay check needs a smooth potential"));
    }
    let kmax = kappas.iter().copied().fold(0.0, f64::max);
    let table = DirectionalTransform::new(q, betas, kmax);
    for &kappa in kappas {
        rep.push(kappa, eta, table.max_abs(kappa, eta));
    }
    if q.is_zero() {
        rep.verdict = Verdict::Pass;
        return Ok(rep);
    }
    let tail = &rep.sweep[rep.sweep.len().saturating_sub(3)..];
    let xs: Vec<f64> = tail.iter().map(|p| 1.0 + p.kappa * p.kappa + p.eta * p.eta).collect();
    let ys: Vec<f64> = tail.iter().map(|p| p.value).collect();
    let slope = loglog_slope(&xs, &ys);
    rep.fitted_slope = Some(slope);
    rep.verdict = Verdict::from_bool(slope <= -ell / 2.0);
    Ok(rep)
}

/// `e^{-a|η|} sup_β |q̃((κ + iη)β)|` along an `η` sweep at fixed `κ`.
///
/// For `q ≥ 0`, `|q̃(ζβ)| ≤ e^{a|η|} ∫ q`, so the normalized values must stay
/// below `𝒫`; they must also not grow along the sweep.
pub fn envelope_check(q: &Potential, betas: &[Vec3], kappa: f64, etas: &[f64]) -> Result<EstimateReport> {
    let mut rep = EstimateReport::new("decay-envelope", "exp(-a|eta|) sup|q~| <= P and non-increasing in |eta|");
    let a = q.support_radius;
    let table = DirectionalTransform::new(q, betas, kappa);
    for &eta in etas {
        rep.push(kappa, eta, (-a * eta.abs()).exp() * table.max_abs(kappa, eta));
    }
    let bound = p_max(q) * (1.0 + 1e-6);
    let v = rep.values();
    let bounded = v.iter().all(|&x| x <= bound);
    let monotone = v.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    rep.extra("bound", bound);
    rep.verdict = Verdict::from_bool(bounded && monotone);
    Ok(rep)
}

/// Solution of `max_β |q̃((κ + iη)β)| = 𝒫`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaSolution {
    pub kappa: f64,
    pub eta: f64,
    pub objective: f64,
    pub p_max: f64,
    pub bisections: usize,
}

/// Largest `η` tried while bracketing, in units of `1/a`.
pub const ETA_MAX_FACTOR: f64 = 64.0;

/// Bisection for `η(κ)` on `f(η) = max_β |q̃((κ + iη)β)| - 𝒫`.
///
/// The bracket starts at `η = 0` (where `f ≤ 0`) and doubles from `1/a`.
pub fn find_eta(q: &Potential, kappa: f64, tol: f64, p_max: f64) -> Result<EtaSolution> {
    find_eta_on(q, &directions_for(q), kappa, tol, p_max)
}

pub fn find_eta_on(q: &Potential, betas: &[Vec3], kappa: f64, tol: f64, p_max: f64) -> Result<EtaSolution> {
    if q.is_zero() || p_max <= 0.0 {
        return Err(Error::param("q", "eta selection needs a nonzero potential"));
    }
    let a = q.support_radius;
    let eta_max = ETA_MAX_FACTOR / a;
    let table = DirectionalTransform::new(q, betas, kappa);
    let f = |eta: f64| table.max_abs(kappa, eta) - p_max;
    let f0 = f(0.0);
    if f0 > tol * p_max {
        return Err(Error::Bracket { kappa, eta_max: 0.0 });
    }
    let mut lo = 0.0;
    let mut hi = 1.0 / a;
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > eta_max {
            return Err(Error::Bracket { kappa, eta_max });
        }
    }
    let mut bisections = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        bisections += 1;
        if v.abs() < tol * p_max || bisections >= 200 {
            return Ok(EtaSolution {
                kappa,
                eta: mid,
                objective: v,
                p_max,
                bisections,
            });
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Least-squares fit `η = c ln κ + d`.
pub fn fit_log_law(kappas: &[f64], etas: &[f64]) -> (f64, f64) {
    let xs: Vec<f64> = kappas.iter().map(|k| k.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = etas.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(etas).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let c = sxy / sxx;
    (c, my - c * mx)
}

/// Relative deviation of `η(κ)/ln κ` from `1/a` allowed at the largest `κ`.
pub const ETA_LAW_TOL: f64 = 0.25;
/// Allowed window for the dilation ratio of the fitted coefficients.
pub const DILATION_WINDOW: (f64, f64) = (0.35, 0.65);

/// `η(κ)` sweep for `q` and its dilation by two.
///
/// Passes if `η/ln κ` is within 25% of `1/a` at the last point and the fitted
/// coefficient of `ln κ` halves (±30%) for the dilated potential.
pub fn eta_law(q: &Potential, kappas: &[f64], tol: f64) -> Result<EstimateReport> {
    let mut rep = EstimateReport::new(
        "eta-law",
        "|eta/ln(kappa) - 1/a| < 0.25/a at the largest kappa; fitted coefficient ratio under a -> 2a in [0.35, 0.65]",
    );
    let a = q.support_radius;
    let sweep = |p: &Potential| -> Result<Vec<f64>> {
        let pm = p_max(p);
        kappas.iter().map(|&k| find_eta(p, k, tol, pm).map(|s| s.eta)).collect()
    };
    let etas = sweep(q)?;
    let wide = q.dilated(2.0);
    let etas_wide = sweep(&wide)?;
    for (&k, &e) in kappas.iter().zip(&etas) {
        rep.push(k, e, e / k.ln());
    }
    let (c, d) = fit_log_law(kappas, &etas);
    let (c2, d2) = fit_log_law(kappas, &etas_wide);
    let last = *rep.values().last().expect("non-empty sweep");
    let deviation = (last - 1.0 / a).abs() * a;
    let ratio = c2 / c;
    rep.fitted_slope = Some(c);
    rep.extra("intercept", d);
    rep.extra("coefficient_dilated", c2);
    rep.extra("intercept_dilated", d2);
    rep.extra("dilation_ratio", ratio);
    rep.extra("relative_deviation_at_last", deviation);
    for (&k, &e) in kappas.iter().zip(&etas_wide) {
        rep.extra(&format!("eta_dilated@{k}"), e);
    }
    rep.verdict = Verdict::from_bool(
        deviation < ETA_LAW_TOL && ratio >= DILATION_WINDOW.0 && ratio <= DILATION_WINDOW.1,
    );
    rep.notes.push("sweep values are eta/ln(kappa)".into());
    Ok(rep)
}

/// Finite proxy for unbounded growth in `η`: `max_β |q̃((κ + iη)β)|` over
/// `η ∈ {1, 2, 4, 8}/a` must increase.
pub fn growth_trend(q: &Potential, kappa: f64) -> EstimateReport {
    let mut rep = EstimateReport::new("growth-trend", "sup|q~| strictly increasing over eta in {1,2,4,8}/a");
    let a = q.support_radius;
    let table = DirectionalTransform::new(q, &directions_for(q), kappa);
    for m in [1.0, 2.0, 4.0, 8.0] {
        rep.push(kappa, m / a, table.max_abs(kappa, m / a));
    }
    let v = rep.values();
    rep.verdict = Verdict::from_bool(q.is_zero() || v.windows(2).all(|w| w[1] > w[0]));
    rep.notes.push("finite proxy for the unbounded growth".into());
    rep
}
