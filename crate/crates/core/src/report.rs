//! Verdict records shared by the estimate checks and the CLI.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Combined verdict: any inconclusive entry dominates, then any failure.
    pub fn combine<I: IntoIterator<Item = Verdict>>(items: I) -> Self {
        let mut out = Verdict::Pass;
        for v in items {
            match v {
                Verdict::Inconclusive => return Verdict::Inconclusive,
                Verdict::Fail => out = Verdict::Fail,
                Verdict::Pass => {}
            }
        }
        out
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub kappa: f64,
    pub eta: f64,
    pub value: f64,
}

/// Outcome of one estimate over a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub name: String,
    pub sweep: Vec<SweepPoint>,
    pub verdict: Verdict,
    pub criterion: String,
    pub fitted_slope: Option<f64>,
    /// Further named scalar outputs (ratios, auxiliary columns).
    #[serde(default)]
    pub extras: Vec<(String, f64)>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl EstimateReport {
    pub fn new(name: &str, criterion: &str) -> Self {
        Self {
            name: name.to_string(),
            sweep: Vec::new(),
            verdict: Verdict::Inconclusive,
            criterion: criterion.to_string(),
            fitted_slope: None,
            extras: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, kappa: f64, eta: f64, value: f64) {
        self.sweep.push(SweepPoint { kappa, eta, value });
    }

    pub fn extra(&mut self, key: &str, value: f64) {
        self.extras.push((key.to_string(), value));
    }

    pub fn get_extra(&self, key: &str) -> Option<f64> {
        self.extras.iter().find(|(k, _)| k == key).map(|e| e.1)
    }

    pub fn values(&self) -> Vec<f64> {
        self.sweep.iter().map(|p| p.value).collect()
    }

    pub fn csv_rows(&self) -> Vec<String> {
        self.sweep
            .iter()
            .map(|p| format!("{},{},{},{}", self.name, p.kappa, p.eta, p.value))
            .collect()
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}
