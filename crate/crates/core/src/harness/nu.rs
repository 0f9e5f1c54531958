//! `ν(κ, η) = sup_β ∫ |ε̃((κ + iη)β - s)| ds` with `ε̃(ξ) = q̃(ξ)/(ξ² - ζβ·ξ)`.
//!
//! At `ξ = ζβ - s` the symbol denominator is `s² - ζβ·s`, so the integrand is
//! `|q̃(ζβ - s)| / |s² - ζ s·β|`, concentrated near `s = κβ` and carrying the
//! ridge handled in [`ridge_integral`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{cvec, symmetric_directions, Vec3};
use crate::harness::ridge::{ridge_integral, RidgeQuadrature};
use crate::kernels::{ComplexWavenumber, EtaRule};
use crate::potential::Potential;
use crate::report::{strictly_decreasing, EstimateReport, Verdict};

/// Largest admissible share of the outer shell in the computed value.
pub const NU_TAIL_LIMIT: f64 = 0.05;

/// Frequency margin beyond `κ` kept by the default truncation.
pub fn default_margin(q: &Potential) -> f64 {
    60.0 / q.radius
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuValue {
    pub kappa: f64,
    pub eta: f64,
    pub value: f64,
    pub tail_fraction: f64,
    pub beta: Vec3,
}

/// Integral for one direction over `|s| ≤ truncation`.
pub fn nu_direction(q: &Potential, k: ComplexWavenumber, beta: Vec3, truncation: f64) -> Result<NuValue> {
    if q.is_zero() {
        return Ok(NuValue {
            kappa: k.kappa,
            eta: k.eta,
            value: 0.0,
            tail_fraction: 0.0,
            beta,
        });
    }
    if truncation <= k.kappa {
        return Err(Error::Inconclusive(format!(
            "truncation radius {truncation} does not clear kappa = {}",
            k.kappa
        )));
    }
    let zeta = k.zeta();
    let scale = q.integral().abs();
    let rule = RidgeQuadrature {
        r_max: truncation,
        shell_from: truncation - 0.3 * (truncation - k.kappa),
        phi_nodes: if q.is_centered() { 1 } else { 48 },
        abs_tol: 1e-9 * scale,
        rel_tol: 1e-6,
    };
    let v = ridge_integral(beta, k, &rule, |r, t, s| {
        let xi = cvec(
            [zeta.re * beta[0] - s[0], zeta.re * beta[1] - s[1], zeta.re * beta[2] - s[2]],
            [zeta.im * beta[0], zeta.im * beta[1], zeta.im * beta[2]],
        );
        let den = r * (r - zeta * t).norm();
        Complex64::new(q.fourier(xi).norm() / den, 0.0)
    })?;
    let value = v.total().re;
    let tail_fraction = if value > 0.0 { v.shell.re / value } else { 0.0 };
    if tail_fraction > NU_TAIL_LIMIT {
        return Err(Error::Inconclusive(format!(
            "nu tail share {tail_fraction:.3} above {NU_TAIL_LIMIT} at kappa = {}",
            k.kappa
        )));
    }
    Ok(NuValue {
        kappa: k.kappa,
        eta: k.eta,
        value,
        tail_fraction,
        beta,
    })
}

/// `ν(κ, η)`: supremum over directions (a single direction for centred,
/// radially symmetric `q`, where the integral does not depend on `β`).
pub fn nu_evaluate(q: &Potential, kappa: f64, eta: f64, truncation: f64) -> Result<NuValue> {
    let k = ComplexWavenumber::new(kappa, eta)?;
    if eta <= 0.0 {
        return Err(Error::param("eta", "nu requires eta > 0"));
    }
    let dirs: Vec<Vec3> = if q.is_centered() {
        vec![[0.0, 0.0, 1.0]]
    } else {
        symmetric_directions(6)
    };
    let mut best: Option<NuValue> = None;
    for beta in dirs {
        let v = nu_direction(q, k, beta, truncation)?;
        if best.is_none_or(|b| v.value > b.value) {
            best = Some(v);
        }
    }
    Ok(best.expect("at least one direction"))
}

/// `ν` along a `κ` sweep; passes if strictly decreasing and the last value is below one.
pub fn nu_sweep(q: &Potential, kappas: &[f64], rule: EtaRule) -> Result<EstimateReport> {
    let mut rep = EstimateReport::new(
        "nu",
        "nu strictly decreasing along the sweep, final value < 1",
    );
    for &kappa in kappas {
        let eta = rule.eta(kappa, q.support_radius);
        let v = nu_evaluate(q, kappa, eta, kappa + default_margin(q))?;
        rep.push(kappa, eta, v.value);
        rep.extra(&format!("tail_fraction@{kappa}"), v.tail_fraction);
    }
    let vals = rep.values();
    let last = vals.last().copied().unwrap_or(0.0);
    rep.verdict = if q.is_zero() {
        Verdict::Pass
    } else {
        Verdict::from_bool(strictly_decreasing(&vals) && last < 1.0)
    };
    rep.extra("final", last);
    Ok(rep)
}

/// `ν` at fixed `κ` for `η` and `2η`; passes if the larger shift gives the larger value.
pub fn nu_eta_response(q: &Potential, kappa: f64, eta: f64) -> Result<EstimateReport> {
    let mut rep = EstimateReport::new("nu-eta-response", "nu(kappa, 2 eta) > nu(kappa, eta)");
    let truncation = kappa + default_margin(q);
    for e in [eta, 2.0 * eta] {
        rep.push(kappa, e, nu_evaluate(q, kappa, e, truncation)?.value);
    }
    let v = rep.values();
    rep.verdict = Verdict::from_bool(q.is_zero() || v[1] > v[0]);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_potential_gives_zero() {
        let v = nu_evaluate(&Potential::zero(1.0), 20.0, 3.0, 80.0).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn nu_is_linear_in_amplitude() {
        let q = Potential::bump(1.0, 1.0).unwrap();
        let a = nu_evaluate(&q, 10.0, 2.0, 70.0).unwrap();
        let b = nu_evaluate(&q.with_amplitude(0.5), 10.0, 2.0, 70.0).unwrap();
        assert!((a.value - 2.0 * b.value).abs() < 1e-5 * a.value);
        assert!(a.tail_fraction < 1e-3);
    }

    #[test]
    fn truncation_must_clear_the_lobe() {
        let q = Potential::bump(1.0, 1.0).unwrap();
        assert!(matches!(nu_evaluate(&q, 20.0, 3.0, 15.0), Err(Error::Inconclusive(_))));
    }
}
