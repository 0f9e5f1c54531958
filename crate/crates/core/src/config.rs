//! Experiment configuration: one TOML file per run, validated up front and
//! carried verbatim into every output.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::amplitude::SolverConfig;
use crate::error::{Error, Result};
use crate::kernels::{ComplexWavenumber, EtaRule};
use crate::potential::{Grid3, Potential, PotentialKind};
use crate::solver::{DirectLimits, SolveMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub amplitude: f64,
    pub radius: f64,
    pub support_radius: f64,
    #[serde(default)]
    pub center: [f64; 3],
}

impl PotentialSpec {
    pub fn build(&self) -> Result<Potential> {
        Potential::new(self.kind, self.amplitude, self.radius, self.support_radius, self.center)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    /// Defaults to the support radius of the potential.
    #[serde(default)]
    pub half_width: Option<f64>,
}

/// `κ` values as an explicit list or an evenly spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KappaList {
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl KappaList {
    pub fn values(&self) -> Vec<f64> {
        match self {
            KappaList::List(v) => v.clone(),
            KappaList::Range { start, stop, count } => {
                let n = (*count).max(1);
                if n == 1 {
                    return vec![*start];
                }
                (0..n)
                    .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KSweep {
    pub kappa: KappaList,
    pub eta: EtaRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub tol: f64,
    pub max_iter: usize,
    pub mode: SolveMode,
    #[serde(default)]
    pub max_direct_n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarnessSpec {
    pub estimates: Vec<String>,
    #[serde(default = "default_ell")]
    pub ell: f64,
}

fn default_ell() -> f64 {
    4.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub potential: PotentialSpec,
    pub grid: GridSpec,
    pub direction_count: usize,
    pub k_sweep: KSweep,
    pub solver: SolverSpec,
    #[serde(default)]
    pub harness: Option<HarnessSpec>,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

/// Estimate names accepted by `verify`.
pub const ESTIMATES: &[&str] = &[
    "amplitude-difference",
    "orthogonality",
    "fourier-relation",
    "free-term",
    "reciprocity",
    "born-direct",
    "t2-norm",
    "i1-decay",
    "decay",
    "envelope",
    "eta-law",
    "growth",
    "nu",
    "nu-eta",
    "j-integrals",
    "radon",
];

fn field(name: &str, reason: impl std::fmt::Display) -> Error {
    Error::Config(format!("{name}: {reason}"))
}

impl ExperimentConfig {
    /// Parse and validate; nothing is computed before this succeeds.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Ok((Self::from_toml(&text)?, text))
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.potential;
        if !p.amplitude.is_finite() {
            return Err(field("potential.amplitude", "must be finite"));
        }
        if !(p.radius > 0.0 && p.radius.is_finite()) {
            return Err(field("potential.radius", "must be positive"));
        }
        if !(p.support_radius > 0.0 && p.support_radius.is_finite()) {
            return Err(field("potential.support_radius", "must be positive"));
        }
        p.build().map_err(|e| field("potential", e))?;
        if self.grid.n < 2 {
            return Err(field("grid.n", "need at least 2 points per axis"));
        }
        if let Some(h) = self.grid.half_width {
            if h < p.support_radius {
                return Err(field("grid.half_width", "smaller than potential.support_radius"));
            }
        }
        if self.direction_count == 0 {
            return Err(field("direction_count", "must be at least 1"));
        }
        let kappas = self.k_sweep.kappa.values();
        if kappas.is_empty() {
            return Err(field("k_sweep.kappa", "empty sweep"));
        }
        if kappas.iter().any(|k| !(k.is_finite() && *k >= 0.0)) {
            return Err(field("k_sweep.kappa", "values must be finite and non-negative"));
        }
        if let KappaList::Range { count: 0, .. } = self.k_sweep.kappa {
            return Err(field("k_sweep.kappa.count", "must be at least 1"));
        }
        if let EtaRule::Fixed { eta } = self.k_sweep.eta {
            if !(eta.is_finite() && eta >= 0.0) {
                return Err(field("k_sweep.eta.eta", "must be finite and non-negative"));
            }
        }
        if !(self.solver.tol > 0.0 && self.solver.tol.is_finite()) {
            return Err(field("solver.tol", "must be positive"));
        }
        if self.solver.max_iter == 0 {
            return Err(field("solver.max_iter", "must be at least 1"));
        }
        if let Some(h) = &self.harness {
            if h.estimates.is_empty() {
                return Err(field("harness.estimates", "name at least one estimate"));
            }
            for name in &h.estimates {
                if !ESTIMATES.contains(&name.as_str()) {
                    return Err(field(
                        "harness.estimates",
                        format!("unknown estimate `{name}`; valid names: {}", ESTIMATES.join(", ")),
                    ));
                }
            }
            if !(h.ell > 3.0) {
                return Err(field("harness.ell", "must exceed 3"));
            }
        }
        if self.output_dir.as_os_str().is_empty() {
            return Err(field("output_dir", "must not be empty"));
        }
        Ok(())
    }

    pub fn potential(&self) -> Result<Potential> {
        self.potential.build()
    }

    pub fn grid(&self) -> Result<Grid3> {
        Grid3::new(self.grid.half_width.unwrap_or(self.potential.support_radius), self.grid.n)
    }

    pub fn kappas(&self) -> Vec<f64> {
        self.k_sweep.kappa.values()
    }

    pub fn wavenumbers(&self) -> Result<Vec<ComplexWavenumber>> {
        let a = self.potential.support_radius;
        self.kappas()
            .iter()
            .map(|&k| self.k_sweep.eta.wavenumber(k, a))
            .collect()
    }

    pub fn solver(&self) -> SolverConfig {
        let mut limits = DirectLimits::default();
        if let Some(n) = self.solver.max_direct_n {
            limits.max_n = n;
        }
        SolverConfig {
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
            mode: self.solver.mode,
            limits,
        }
    }

    pub fn estimates(&self) -> Vec<String> {
        self.harness.as_ref().map(|h| h.estimates.clone()).unwrap_or_default()
    }

    pub fn ell(&self) -> f64 {
        self.harness.as_ref().map(|h| h.ell).unwrap_or_else(default_ell)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
direction_count = 4
output_dir = "out"
seed = 3

[potential]
kind = "bump"
amplitude = 0.5
radius = 1.0
support_radius = 1.0

[grid]
n = 8

[k_sweep]
kappa = [10.0, 20.0]
eta = { rule = "a_inv_log" }

[solver]
tol = 1e-8
max_iter = 200
mode = "born-series"

[harness]
estimates = ["reciprocity", "nu"]
"#;

    #[test]
    fn parses_a_complete_config() {
        let c = ExperimentConfig::from_toml(GOOD).unwrap();
        assert_eq!(c.kappas(), vec![10.0, 20.0]);
        assert_eq!(c.k_sweep.eta, EtaRule::AInvLog);
        assert_eq!(c.estimates().len(), 2);
        assert!((c.wavenumbers().unwrap()[1].eta - 20f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn range_sweep() {
        let text = GOOD.replace("kappa = [10.0, 20.0]", "kappa = { start = 10.0, stop = 40.0, count = 4 }");
        let c = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(c.kappas(), vec![10.0, 20.0, 30.0, 40.0]);
    }

    #[test]
    fn missing_field_is_reported() {
        let text = GOOD.replace("direction_count = 4\n", "");
        let err = ExperimentConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("direction_count"), "{err}");
    }

    #[test]
    fn unknown_estimate_lists_valid_names() {
        let text = GOOD.replace("\"nu\"]", "\"nope\"]");
        let err = ExperimentConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("nope") && err.contains("j-integrals"), "{err}");
    }

    #[test]
    fn support_violation_is_field_level() {
        let text = GOOD.replace("radius = 1.0\nsupport", "radius = 2.0\nsupport");
        let err = ExperimentConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.starts_with("invalid configuration: potential"), "{err}");
    }

    #[test]
    fn fixed_eta_rule() {
        let text = GOOD.replace("{ rule = \"a_inv_log\" }", "{ rule = \"fixed\", eta = 2.5 }");
        let c = ExperimentConfig::from_toml(&text).unwrap();
        assert!(c.wavenumbers().unwrap().iter().all(|k| k.eta == 2.5));
    }
}
