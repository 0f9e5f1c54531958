//! Prolate spheroidal coordinates about two foci and the `T²` kernel integral.
//!
//! With foci `x`, `y`, half-distance `ℓ` and midpoint `m`,
//! `z = m + ℓst·e₁ + ℓ√((s²-1)(1-t²))(cos ψ e₂ + sin ψ e₃)` gives
//! `|x - z| + |z - y| = 2ℓs`, `|x - z| - |z - y| = 2ℓt`,
//! `|x - z||z - y| = ℓ²(s² - t²)` and the Jacobian `ℓ³(s² - t²)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{add, complete_frame, norm, normalize, scale, sub, Vec3};
use crate::kernels::{EtaRule, ComplexWavenumber};
use crate::potential::Potential;
use crate::quadrature::{composite, uniform_breaks, GaussLegendre};
use crate::report::{loglog_slope, EstimateReport, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProlateFrame {
    pub x: Vec3,
    pub y: Vec3,
    pub mid: Vec3,
    /// `ℓ = |x - y| / 2`.
    pub half: f64,
    pub e1: Vec3,
    pub e2: Vec3,
    pub e3: Vec3,
}

impl ProlateFrame {
    pub fn new(x: Vec3, y: Vec3) -> Result<Self> {
        let d = sub(y, x);
        let len = norm(d);
        if len == 0.0 {
            return Err(Error::param("foci", "x and y must differ"));
        }
        // e₁ points from x to y so that t = -1 at x and t = 1 at y.
        let e1 = normalize(d);
        let (e2, e3) = complete_frame(e1);
        Ok(Self {
            x,
            y,
            mid: scale(add(x, y), 0.5),
            half: 0.5 * len,
            e1,
            e2,
            e3,
        })
    }

    pub fn map(&self, s: f64, t: f64, psi: f64) -> Vec3 {
        let l = self.half;
        let rho = l * ((s * s - 1.0).max(0.0) * (1.0 - t * t).max(0.0)).sqrt();
        let along = scale(self.e1, l * s * t);
        let across = add(scale(self.e2, rho * psi.cos()), scale(self.e3, rho * psi.sin()));
        add(self.mid, add(along, across))
    }

    pub fn jacobian(&self, s: f64, t: f64) -> f64 {
        self.half.powi(3) * (s * s - t * t)
    }
}

/// `z(s, t, ψ)` and the Jacobian at that point.
pub fn prolate_map(frame: &ProlateFrame, s: f64, t: f64, psi: f64) -> (Vec3, f64) {
    (frame.map(s, t, psi), frame.jacobian(s, t))
}

/// Quadrature resolution for integrals in prolate coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProlateQuadrature {
    pub s_panels: usize,
    pub t_panels: usize,
    pub psi_nodes: usize,
}

impl Default for ProlateQuadrature {
    fn default() -> Self {
        Self {
            s_panels: 48,
            t_panels: 4,
            psi_nodes: 16,
        }
    }
}

fn rule() -> GaussLegendre {
    GaussLegendre::new(16)
}

/// `s` beyond which the spheroid no longer meets the support of `q`.
pub fn s_max(frame: &ProlateFrame, q: &Potential) -> f64 {
    let d = norm(sub(frame.mid, q.center));
    let reach = (d + q.radius) / frame.half;
    (1.0 + reach * reach).sqrt()
}

/// `Q(s) = ∫₀^{2π} dψ ∫₋₁¹ dt q(z(s, t, ψ))`.
pub fn q_profile(q: &Potential, frame: &ProlateFrame, s: f64, quad: ProlateQuadrature) -> f64 {
    let r = rule();
    let tn = composite(&r, &uniform_breaks(-1.0, 1.0, quad.t_panels));
    let m = if q.is_centered() && norm(sub(frame.mid, q.center)) == 0.0 {
        1
    } else {
        quad.psi_nodes
    };
    let mut acc = 0.0;
    for a in 0..m {
        let psi = 2.0 * PI * a as f64 / m as f64;
        for &(t, w) in &tn {
            acc += w * q.eval(frame.map(s, t, psi));
        }
    }
    acc * 2.0 * PI / m as f64
}

/// `∫ f dz` over the support of `q`-like integrands using `(s, t, ψ)`.
pub fn prolate_integral<F: Fn(Vec3) -> f64>(
    frame: &ProlateFrame,
    f: F,
    s_end: f64,
    quad: ProlateQuadrature,
) -> f64 {
    let r = rule();
    let sn = composite(&r, &uniform_breaks(1.0, s_end, quad.s_panels));
    let tn = composite(&r, &uniform_breaks(-1.0, 1.0, quad.t_panels));
    let mut acc = 0.0;
    for &(s, ws) in &sn {
        for &(t, wt) in &tn {
            let jac = frame.jacobian(s, t);
            let mut ring = 0.0;
            for a in 0..quad.psi_nodes {
                let psi = 2.0 * PI * a as f64 / quad.psi_nodes as f64;
                ring += f(frame.map(s, t, psi));
            }
            acc += ws * wt * jac * ring * 2.0 * PI / quad.psi_nodes as f64;
        }
    }
    acc
}

/// `I₁ = ℓ ∫₁^∞ e^{2ikℓs} Q(s) ds` with `k = (κ + iη)/2`.
pub fn i1_integral(q: &Potential, frame: &ProlateFrame, k: ComplexWavenumber, quad: ProlateQuadrature) -> Complex64 {
    if q.is_zero() {
        return Complex64::new(0.0, 0.0);
    }
    let r = rule();
    let end = s_max(frame, q);
    let l = frame.half;
    let phase = 2.0 * Complex64::i() * k.k() * l;
    // Resolve the oscillation e^{iκℓs} with a few panels per period.
    let periods = (k.kappa * l * (end - 1.0) / (2.0 * PI)).ceil() as usize;
    let panels = quad.s_panels.max(4 * periods);
    let mut acc = Complex64::new(0.0, 0.0);
    for (s, w) in composite(&r, &uniform_breaks(1.0, end, panels)) {
        acc += (phase * s).exp() * (w * q_profile(q, frame, s, quad));
    }
    acc * l
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct I1Row {
    pub kappa: f64,
    pub eta: f64,
    pub abs_i1: f64,
    /// `|I₁|·|κ + iη|`
    pub scaled: f64,
}

/// `|I₁|` and `|I₁|·|κ + iη|` over a `κ` sweep.
///
/// Passes when the scaled values have max/min below 10 and do not increase
/// over the last three sweep points.
pub fn i1_decay_check(
    q: &Potential,
    x: Vec3,
    y: Vec3,
    kappas: &[f64],
    eta_rule: EtaRule,
) -> Result<(Vec<I1Row>, EstimateReport)> {
    let frame = ProlateFrame::new(x, y)?;
    let quad = ProlateQuadrature::default();
    let mut rows = Vec::new();
    let mut report = EstimateReport::new(
        "i1-decay",
        "|I1|*|kappa+i eta| bounded: max/min < 10 and non-increasing over the tail",
    );
    for &kappa in kappas {
        let k = eta_rule.wavenumber(kappa, q.support_radius)?;
        let v = i1_integral(q, &frame, k, quad).norm();
        let scaled = v * k.zeta().norm();
        rows.push(I1Row {
            kappa,
            eta: k.eta,
            abs_i1: v,
            scaled,
        });
        report.push(kappa, k.eta, scaled);
    }
    if q.is_zero() {
        report.verdict = Verdict::Pass;
        report.notes.push("zero potential: I1 vanishes identically".into());
        return Ok((rows, report));
    }
    let scaled: Vec<f64> = rows.iter().map(|r| r.scaled).collect();
    let max = scaled.iter().cloned().fold(0.0, f64::max);
    let min = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let ratio = max / min;
    let tail = &scaled[scaled.len().saturating_sub(3)..];
    let non_increasing = tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    let decreasing_abs = rows.windows(2).all(|w| w[1].abs_i1 < w[0].abs_i1);
    report.extra("max_min_ratio", ratio);
    report.extra("abs_decreasing", decreasing_abs as u8 as f64);
    report.fitted_slope = Some(loglog_slope(
        &rows.iter().map(|r| r.kappa).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.abs_i1).collect::<Vec<_>>(),
    ));
    report.verdict = Verdict::from_bool(ratio < 10.0 && non_increasing);
    Ok((rows, report))
}
