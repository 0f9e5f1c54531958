//! The model integrals bounding `ν` for large `κ`.
//!
//! With `w² = 1 + γ`, `W² = 1 + η²` and `b = ℓ/2 - 1`:
//!
//! * `J = 2π ∫_0^∞ r dr ∫_{-1}^{1} dt / ([(r - κt)² + η²t²]^{1/2} (w² + r² - 2rκt)^{ℓ/2})`
//! * `𝒥 = ∫_0^∞ r^{-1} [(W² + (r - κ)²)^{-b} - (W² + (r + κ)²)^{-b}] dr`
//!
//! `𝒥` is split as `J₁ = ∫_0^1`, `J₂ = ∫_1^∞ = J₂₁ - J₂₂`, and
//! `J₂₁ = j₁ + j₂` at `r = κ/2`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::EtaRule;
use crate::quadrature::{adaptive, adaptive_pieces, clean_breaks};
use crate::report::{strictly_decreasing, EstimateReport, Verdict};

const REL_TOL: f64 = 1e-10;

/// Evaluated pieces at one `(κ, η)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralValues {
    pub kappa: f64,
    pub eta: f64,
    pub j: f64,
    pub jj: f64,
    pub j1: f64,
    pub j2: f64,
    pub j21: f64,
    pub j22: f64,
    pub small_j1: f64,
    pub small_j2: f64,
}

impl IntegralValues {
    /// `|𝒥 - (J₁ + J₂)| / 𝒥`.
    pub fn split_residual(&self) -> f64 {
        (self.jj - (self.j1 + self.j2)).abs() / self.jj.abs()
    }
}

fn check_ell(ell: f64) -> Result<f64> {
    if !(ell > 3.0) {
        return Err(Error::param("ell", "declared smoothness must exceed 3"));
    }
    Ok(0.5 * ell - 1.0)
}

/// `∫_lo^∞ f` with breakpoints below `2κ` and `r = 2κ/u` above.
fn half_line<F: Fn(f64) -> f64>(f: F, lo: f64, kappa: f64, marks: &[f64]) -> Result<f64> {
    let cut = (2.0 * kappa).max(lo + 1.0);
    let near = adaptive_pieces(&f, &clean_breaks(lo, cut, marks), 0.0, REL_TOL)?;
    let far = adaptive(
        |u| {
            if u <= 0.0 {
                0.0
            } else {
                f(cut / u) * cut / (u * u)
            }
        },
        0.0,
        1.0,
        0.0,
        REL_TOL,
    )?;
    Ok(near + far)
}

fn ridge_marks(kappa: f64, eta: f64) -> Vec<f64> {
    let w = (1.0 + eta * eta).sqrt();
    let mut m = vec![0.5 * kappa, kappa];
    for c in [1.0, 4.0, 16.0] {
        m.push(kappa - c * w);
        m.push(kappa + c * w);
    }
    m
}

/// `J` by nested adaptive quadrature; the inner integral is split at the
/// ridge `t* = rκ/γ`.
pub fn j_integral(kappa: f64, eta: f64, ell: f64) -> Result<f64> {
    check_ell(ell)?;
    let gamma = kappa * kappa + eta * eta;
    let w2 = 1.0 + gamma;
    let failure = std::cell::RefCell::new(None);
    let inner = |r: f64| -> f64 {
        let ts = r * kappa / gamma;
        let width = r * eta / gamma;
        let breaks = clean_breaks(-1.0, 1.0, &[0.0, ts, ts - width, ts + width, ts - 10.0 * width, ts + 10.0 * width]);
        let g = |t: f64| {
            let d = ((r - kappa * t).powi(2) + eta * eta * t * t).sqrt();
            1.0 / (d * (w2 + r * r - 2.0 * r * kappa * t).powf(0.5 * ell))
        };
        match adaptive_pieces(g, &breaks, 0.0, 0.1 * REL_TOL) {
            Ok(v) => r * v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let v = half_line(inner, 0.0, kappa, &ridge_marks(kappa, eta))?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(2.0 * PI * v)
}

/// All pieces of `𝒥` plus `J`.
pub fn integral_values(kappa: f64, eta: f64, ell: f64) -> Result<IntegralValues> {
    let b = check_ell(ell)?;
    let w2 = 1.0 + eta * eta;
    let minus = |r: f64| (w2 + (r - kappa).powi(2)).powf(-b) / r;
    let plus = |r: f64| (w2 + (r + kappa).powi(2)).powf(-b) / r;
    let marks = ridge_marks(kappa, eta);

    // the bracketed difference is O(r) at the origin, so J₁ has no singularity
    let diff = |r: f64| {
        if r == 0.0 {
            0.0
        } else {
            minus(r) - plus(r)
        }
    };
    let jj = half_line(diff, 0.0, kappa, &[&marks[..], &[1.0]].concat())?;
    let j1 = adaptive(diff, 0.0, 1.0, 0.0, REL_TOL)?;
    let half = (0.5 * kappa).max(1.0);
    let small_j1 = adaptive_pieces(minus, &clean_breaks(1.0, half, &marks), 0.0, REL_TOL)?;
    let small_j2 = half_line(minus, half, kappa, &marks)?;
    let j21 = small_j1 + small_j2;
    let j22 = half_line(plus, 1.0, kappa, &[])?;
    Ok(IntegralValues {
        kappa,
        eta,
        j: j_integral(kappa, eta, ell)?,
        jj,
        j1,
        j2: j21 - j22,
        j21,
        j22,
        small_j1,
        small_j2,
    })
}

/// Report on `κ·J` and `κ·𝒥` along a sweep.
///
/// Passes if both products decrease over the last three points and the
/// split identity holds to `1e-6`.
pub fn j_integrals(kappas: &[f64], rule: EtaRule, support_radius: f64, ell: f64) -> Result<(Vec<IntegralValues>, EstimateReport)> {
    let mut rows = Vec::new();
    let mut rep = EstimateReport::new(
        "j-integrals",
        "kappa*J and kappa*JJ decreasing over the last three points; split residual < 1e-6",
    );
    for &kappa in kappas {
        let eta = rule.eta(kappa, support_radius);
        let v = integral_values(kappa, eta, ell)?;
        rep.push(kappa, eta, kappa * v.jj);
        rows.push(v);
    }
    let kj: Vec<f64> = rows.iter().map(|v| v.kappa * v.j).collect();
    let kjj: Vec<f64> = rows.iter().map(|v| v.kappa * v.jj).collect();
    let tail = |v: &[f64]| v[v.len().saturating_sub(3)..].to_vec();
    let split = rows.iter().map(|v| v.split_residual()).fold(0.0, f64::max);
    let ok = strictly_decreasing(&tail(&kj)) && strictly_decreasing(&tail(&kjj)) && split < 1e-6;
    rep.verdict = Verdict::from_bool(ok);
    rep.extra("max_split_residual", split);
    for (v, p) in rows.iter().zip(&kj) {
        rep.extra(&format!("kappa_J@{}", v.kappa), *p);
    }
    rep.notes.push("sweep values are kappa*JJ; kappa*J listed in extras".into());
    Ok((rows, rep))
}
