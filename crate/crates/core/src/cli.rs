//! Subcommands behind the `backscatter` binary.
//!
//! Exit status: 0 pass, 1 verdict failure, 2 input error, 3 inconclusive.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::amplitude::{backscatter_dataset, backscatter_on, check_reciprocity, AmplitudeDataset};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::geom::{normalize, spiral_directions, symmetric_directions, Vec3};
use crate::harness::{self, identities, nu};
use crate::inversion::{born_invert, recon_error, Reconstruction};
use crate::kernels::ComplexWavenumber;
use crate::potential::{Grid3, Potential};
use crate::prolate::i1_decay_check;
use crate::report::{EstimateReport, Verdict};
use crate::solver::Scatterer;

/// Process exit status for a verdict.
pub fn exit_status(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Inconclusive => 3,
    }
}

/// Process exit status for an error.
pub fn error_status(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::Parse(_)
        | Error::Io(_)
        | Error::InvalidParameter { .. }
        | Error::InvalidSupport { .. }
        | Error::SupportClipped { .. }
        | Error::InsufficientCoverage { .. } => 2,
        Error::Inconclusive(_) => 3,
        _ => 1,
    }
}

/// An estimate report together with the configuration that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub config: String,
    pub report: EstimateReport,
}

/// Reconstruction metrics with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionMetrics {
    pub config: String,
    pub dataset: String,
    pub covered_fraction: f64,
    pub uncovered_cells: usize,
    pub imaginary_residue: f64,
    pub interpolation: String,
    pub l2_rel: Option<f64>,
    pub max_abs: Option<f64>,
    pub note: String,
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Parse(e.to_string()))
}

/// Random unit vector from the seeded stream.
fn random_direction(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v: Vec3 = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if n2 > 1e-4 && n2 <= 1.0 {
            return normalize(v);
        }
    }
}

/// `count` seeded `(β, α)` pairs.
pub fn random_pairs(seed: u64, count: usize) -> Vec<(Vec3, Vec3)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (random_direction(&mut rng), random_direction(&mut rng)))
        .collect()
}

/// Second potential for the amplitude-difference identity: same kind,
/// smaller, weaker and off centre.
pub fn companion_potential(q: &Potential) -> Result<Potential> {
    let r = 0.7 * q.radius;
    let c = [0.1 * q.radius, -0.1 * q.radius, 0.05 * q.radius];
    Potential::new(q.kind, 0.6 * q.amplitude, r, q.support_radius, c)
}

/// Write the dataset and the scattering fields for the first direction.
pub fn cmd_forward(cfg: &ExperimentConfig, raw: &str, out: &Path) -> Result<Verdict> {
    let q = cfg.potential()?;
    let grid = cfg.grid()?;
    let ks = cfg.wavenumbers()?;
    let solver = cfg.solver();
    // Antipodal pairs cancel the odd part of the data in the inversion sum.
    let mut ds = if cfg.direction_count % 2 == 0 {
        backscatter_on(&q, &grid, symmetric_directions(cfg.direction_count / 2), &ks, solver)?
    } else {
        backscatter_dataset(&q, &grid, cfg.direction_count, &ks, solver)?
    };
    ds.meta.config = Some(raw.to_string());

    let s = Scatterer::new(&q, grid)?;
    let beta = ds.directions[0];
    let mut fields = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        match solver.solve(&s, k, beta) {
            Ok(u) => fields.push((i, u)),
            Err(_) => continue,
        }
    }

    write(&out.join("dataset.json"), &ds.to_json()?)?;
    write(&out.join("dataset.csv"), &ds.to_csv())?;
    for (i, u) in fields {
        let mut csv = String::from("x,y,z,re,im\n");
        for row in u.csv_rows() {
            csv.push_str(&row);
            csv.push('\n');
        }
        write(&out.join(format!("fields/u_k{i}.csv")), &csv)?;
        let side = serde_json::json!({
            "config": raw,
            "grid": grid,
            "k": u.k,
            "beta": u.alpha,
            "mode": u.mode,
            "residual": u.residual,
            "iterations": u.iterations,
        });
        write(&out.join(format!("fields/u_k{i}.json")), &json(&side)?)?;
    }
    Ok(Verdict::from_bool(ds.failures() == 0))
}

fn sweep_report(name: &str, criterion: &str, points: Vec<(ComplexWavenumber, f64)>, limit: f64) -> EstimateReport {
    let mut rep = EstimateReport::new(name, criterion);
    for (k, v) in points {
        rep.push(k.kappa, k.eta, v);
    }
    let worst = rep.values().into_iter().fold(0.0, f64::max);
    rep.extra("worst", worst);
    rep.verdict = Verdict::from_bool(worst < limit);
    rep
}

/// Run one named estimate.
pub fn run_estimate(name: &str, cfg: &ExperimentConfig, seed: u64) -> Result<EstimateReport> {
    let q = cfg.potential()?;
    let grid = cfg.grid()?;
    let ks = cfg.wavenumbers()?;
    let kappas = cfg.kappas();
    let rule = cfg.k_sweep.eta;
    let solver = cfg.solver();
    let a = q.support_radius;
    let axis = [0.0, 0.0, 1.0];
    let rep = match name {
        "amplitude-difference" => {
            let q2 = companion_potential(&q)?;
            let pairs = random_pairs(seed, 5);
            let mut pts = Vec::new();
            for &k in &ks {
                let mut worst = 0.0f64;
                for &(b, al) in &pairs {
                    worst = worst.max(identities::amplitude_difference_residual(&q, &q2, b, al, k, &grid, solver)?);
                }
                pts.push((k, worst));
            }
            sweep_report(name, "relative residual of the amplitude-difference identity < 1e-2", pts, 1e-2)
        }
        "orthogonality" => {
            let s = Scatterer::new(&q, grid)?;
            let mut pts = Vec::new();
            for &k in &ks {
                let mut worst = 0.0f64;
                for b in spiral_directions(cfg.direction_count.min(4)) {
                    let r = identities::orthogonality_residual(&q, b, k, &grid, solver)?;
                    let amp = crate::amplitude::amplitude(&s, crate::geom::neg(b), b, k, solver)?;
                    if amp.norm() > 0.0 {
                        worst = worst.max(r.norm() / amp.norm());
                    }
                }
                pts.push((k, worst));
            }
            sweep_report(name, "|residual| / |A| < 1e-2", pts, 1e-2)
        }
        "fourier-relation" => {
            let mut rep = EstimateReport::new(
                name,
                "Born-level residual < 0.1 and residual(A/2)/residual(A) < 0.6",
            );
            let half = q.with_amplitude(0.5 * q.amplitude);
            let mut ok = true;
            for &k in ks.iter().filter(|k| k.eta > 0.0) {
                let full = identities::fourier_relation_check(&q, axis, k, &grid, solver)?;
                let weak = identities::fourier_relation_check(&half, axis, k, &grid, solver)?;
                let ratio = if full.residual > 0.0 { weak.residual / full.residual } else { 0.0 };
                rep.push(k.kappa, k.eta, full.residual);
                rep.extra(&format!("halving_ratio@{}", k.kappa), ratio);
                rep.extra(&format!("bound_ratio@{}", k.kappa), full.bound_ratio);
                ok &= q.is_zero() || (full.residual < 0.1 && ratio < 0.6);
            }
            rep.notes.push("single-potential form; the convolution uses the first Born term of eps".into());
            rep.verdict = if rep.sweep.is_empty() { Verdict::Inconclusive } else { Verdict::from_bool(ok) };
            rep
        }
        "free-term" => {
            let xis = [[0.0, 0.0, 0.0], [0.0, 0.0, 2.0], [1.5, 0.0, 0.5]];
            let mut pts = Vec::new();
            for &k in ks.iter().filter(|k| k.eta > 0.0) {
                let rows = identities::free_term_check(&q, &grid, k, axis, &xis)?;
                pts.push((k, rows.iter().map(|r| r.relative_error).fold(0.0, f64::max)));
            }
            let empty = pts.is_empty();
            let mut rep = sweep_report(name, "transform of q*eps1 matches the spectral free term to 1e-2", pts, 1e-2);
            if empty {
                rep.verdict = Verdict::Inconclusive;
            }
            rep
        }
        "reciprocity" => {
            let pairs = random_pairs(seed, 10);
            let mut pts = Vec::new();
            for &k in &ks {
                pts.push((k, check_reciprocity(&q, &grid, &pairs, k, solver)?));
            }
            sweep_report(name, "normalized reciprocity deviation < 1e-2", pts, 1e-2)
        }
        "born-direct" => {
            let points: Vec<(f64, f64)> = ks.iter().map(|k| (k.kappa, k.eta)).collect();
            harness::born_direct_sweep(&q, &grid, &points, axis, solver.tol, seed)?.1
        }
        "t2-norm" => harness::t2_scaling(&q, &grid, &kappas, rule, axis, seed)?,
        "i1-decay" => {
            let x = [-0.3 * a, 0.0, 0.1 * a];
            let y = [0.4 * a, 0.2 * a, 0.0];
            i1_decay_check(&q, x, y, &kappas, rule)?.1
        }
        "decay" => harness::decay_estimate_check(
            &q,
            &symmetric_directions(cfg.direction_count),
            &kappas,
            0.0,
            cfg.ell(),
        )?,
        "envelope" => {
            let etas: Vec<f64> = [0.0, 1.0, 2.0, 4.0, 8.0].iter().map(|m| m / a).collect();
            harness::envelope_check(&q, &symmetric_directions(cfg.direction_count), kappas[0], &etas)?
        }
        "eta-law" => harness::eta_law(&q, &kappas, 1e-6)?,
        "growth" => harness::growth_trend(&q, *kappas.last().expect("validated non-empty")),
        "nu" => harness::nu_sweep(&q, &kappas, rule)?,
        "nu-eta" => {
            let eta = rule.eta(kappas[0], a).max(1.0 / a);
            nu::nu_eta_response(&q, kappas[0], eta)?
        }
        "j-integrals" => harness::j_integrals(&kappas, rule, a, cfg.ell())?.1,
        "radon" => {
            let k = ks[0];
            harness::radon_identities(&q, &spiral_directions(cfg.direction_count.min(6)), k.kappa, k.eta)?
        }
        other => {
            return Err(Error::Config(format!(
                "harness.estimates: unknown estimate `{other}`; valid names: {}",
                crate::config::ESTIMATES.join(", ")
            )))
        }
    };
    Ok(rep)
}

/// Turn a computation failure into a report; input errors pass through.
fn settle(name: &str, r: Result<EstimateReport>) -> Result<EstimateReport> {
    match r {
        Ok(rep) => Ok(rep),
        Err(e) if error_status(&e) == 2 => Err(e),
        Err(e) => {
            let mut rep = EstimateReport::new(name, "estimate could not be evaluated");
            rep.verdict = if error_status(&e) == 3 { Verdict::Inconclusive } else { Verdict::Fail };
            rep.notes.push(e.to_string());
            Ok(rep)
        }
    }
}

/// Summary table `estimate,kappa,eta,value,verdict`.
pub fn summary_csv(reports: &[EstimateReport]) -> String {
    let mut out = String::from("estimate,kappa,eta,value,verdict\n");
    for r in reports {
        let v = serde_json::to_value(r.verdict).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        if r.sweep.is_empty() {
            let _ = writeln!(out, "{},,,,{}", r.name, v);
        }
        for p in &r.sweep {
            let _ = writeln!(out, "{},{},{},{},{}", r.name, p.kappa, p.eta, p.value, v);
        }
    }
    out
}

/// Run every configured estimate; one JSON report each plus `summary.csv`.
pub fn cmd_verify(cfg: &ExperimentConfig, raw: &str, out: &Path, seed: u64) -> Result<Verdict> {
    let names = cfg.estimates();
    if names.is_empty() {
        return Err(Error::Config("harness.estimates: name at least one estimate".into()));
    }
    let mut reports = Vec::new();
    for name in &names {
        reports.push(settle(name, run_estimate(name, cfg, seed))?);
    }
    for r in &reports {
        let file = ReportFile {
            config: raw.to_string(),
            report: r.clone(),
        };
        write(&out.join(format!("report-{}.json", r.name)), &json(&file)?)?;
    }
    write(&out.join("summary.csv"), &summary_csv(&reports))?;
    Ok(Verdict::combine(reports.iter().map(|r| r.verdict)))
}

/// Born inversion of a dataset file onto the configured grid.
pub fn cmd_invert(cfg: &ExperimentConfig, raw: &str, dataset: &Path, out: &Path) -> Result<Verdict> {
    let ds = AmplitudeDataset::load(dataset)?;
    let grid: Grid3 = cfg.grid()?;
    let rec: Reconstruction = born_invert(&ds, &grid)?;
    let q = cfg.potential()?;
    let metrics = match recon_error(&q, &rec) {
        Ok(m) => Some(m),
        Err(Error::UndefinedRelative { .. }) => None,
        Err(e) => return Err(e),
    };
    let report = InversionMetrics {
        config: raw.to_string(),
        dataset: dataset.display().to_string(),
        covered_fraction: rec.covered_fraction,
        uncovered_cells: rec.uncovered_cells,
        imaginary_residue: rec.imaginary_residue,
        interpolation: rec.interpolation.clone(),
        l2_rel: metrics.map(|m| m.l2_rel),
        max_abs: metrics.map(|m| m.max_abs),
        note: "first-order Born reconstruction from backscattering data".into(),
    };
    write(&out.join("reconstruction.csv"), &rec.to_csv())?;
    write(&out.join("metrics.json"), &json(&report)?)?;
    Ok(Verdict::Pass)
}

/// Collect the reports in a directory and return the rendered table and the
/// combined verdict.
pub fn cmd_report(dir: &Path) -> Result<(String, Verdict)> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("report-") && n.ends_with(".json"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Config(format!("{}: no report files", dir.display())));
    }
    let mut reports = Vec::new();
    for p in &paths {
        let text = fs::read_to_string(p)?;
        let f: ReportFile = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
        reports.push(f.report);
    }
    let mut table = String::new();
    for r in &reports {
        let _ = writeln!(
            table,
            "{:<18} {:<12} {}",
            r.name,
            format!("{:?}", r.verdict).to_lowercase(),
            r.criterion
        );
    }
    Ok((table, Verdict::combine(reports.iter().map(|r| r.verdict))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses() {
        assert_eq!(exit_status(Verdict::Pass), 0);
        assert_eq!(exit_status(Verdict::Fail), 1);
        assert_eq!(exit_status(Verdict::Inconclusive), 3);
        assert_eq!(error_status(&Error::Config("x".into())), 2);
        assert_eq!(error_status(&Error::Inconclusive("x".into())), 3);
        assert_eq!(error_status(&Error::Solver("x".into())), 1);
    }

    #[test]
    fn pairs_are_seeded() {
        assert_eq!(random_pairs(5, 3), random_pairs(5, 3));
        assert_ne!(random_pairs(5, 3), random_pairs(6, 3));
    }

    #[test]
    fn companion_fits_the_support() {
        let q = Potential::bump(0.5, 1.0).unwrap();
        assert!(companion_potential(&q).is_ok());
    }
}
