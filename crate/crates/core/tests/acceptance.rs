//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use backscatter::amplitude::{backscatter_on, check_reciprocity, SolverConfig};
use backscatter::cli::{companion_potential, random_pairs};
use backscatter::geom::{norm, spiral_directions, sub, symmetric_directions};
use backscatter::harness::{self, identities};
use backscatter::inversion::{born_invert, grid_born_dataset, recon_error, relative_gap, shell_wavenumbers, synthetic_born_dataset};
use backscatter::prolate::{i1_decay_check, prolate_integral, s_max, ProlateFrame, ProlateQuadrature};
use backscatter::radon::{complex_direction_fourier, plane_integral, radon_for};
use backscatter::{sample_on_grid, ComplexWavenumber, EtaRule, Grid3, Potential, PotentialKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);

fn weak_bump() -> Potential {
    Potential::bump(0.5, 1.0).unwrap()
}

fn amplitude_difference() -> Outcome {
    let q1 = weak_bump();
    let q2 = companion_potential(&q1).unwrap();
    let grid = Grid3::new(1.0, 32).unwrap();
    let solver = SolverConfig { tol: 1e-9, ..SolverConfig::default() };
    let ks = [
        ComplexWavenumber::new(4.0, 0.0).unwrap(),
        ComplexWavenumber::new(10.0, 0.0).unwrap(),
        ComplexWavenumber::new(6.0, 6f64.ln()).unwrap(),
        ComplexWavenumber::new(12.0, 12f64.ln()).unwrap(),
    ];
    let mut worst = 0.0f64;
    for k in ks {
        for (b, a) in random_pairs(11, 5) {
            worst = worst.max(identities::amplitude_difference_residual(&q1, &q2, b, a, k, &grid, solver).unwrap());
        }
    }
    (worst < 1e-2, format!("max relative residual {worst:.3e} over 5 pairs x 4 k at n = 32 (limit 1e-2)"))
}

fn reciprocity() -> Outcome {
    let q = Potential::new(PotentialKind::Bump, 0.5, 0.8, 1.0, [0.1, 0.05, -0.1]).unwrap();
    let grid = Grid3::new(1.0, 16).unwrap();
    let pairs = random_pairs(23, 10);
    let mut worst = 0.0f64;
    for k in [
        ComplexWavenumber::new(3.0, 0.0).unwrap(),
        ComplexWavenumber::new(8.0, 0.0).unwrap(),
        ComplexWavenumber::new(6.0, 6f64.ln()).unwrap(),
    ] {
        worst = worst.max(check_reciprocity(&q, &grid, &pairs, k, SolverConfig::default()).unwrap());
    }
    (worst < 1e-2, format!("normalized deviation {worst:.3e} over 10 pairs x 3 k (limit 1e-2)"))
}

fn born_vs_direct() -> Outcome {
    let q = weak_bump();
    let grid = Grid3::new(1.0, 12).unwrap();
    let mut points = Vec::new();
    for kappa in [2.0f64, 5.0, 10.0, 20.0] {
        points.push((kappa, 0.0));
        points.push((kappa, kappa.ln().max(0.5)));
    }
    let tol = 1e-10;
    let (rows, rep) = harness::born_direct_sweep(&q, &grid, &points, [0.0, 0.0, 1.0], tol, 5).unwrap();
    let compared = rows.iter().filter(|r| r.gap.is_some()).count();
    let worst = rep.get_extra("worst_gap").unwrap();
    (
        rep.verdict.passed() && compared >= 8,
        format!("{compared} points compared, worst sup gap {worst:.3e} (limit {:.0e})", 10.0 * tol),
    )
}

fn t2_scaling() -> Outcome {
    let grid = Grid3::new(1.0, 20).unwrap();
    let rep = harness::t2_scaling(&weak_bump(), &grid, &[10.0, 20.0, 40.0, 80.0], EtaRule::AInvLog, [0.0, 0.0, 1.0], 7).unwrap();
    let slope = rep.fitted_slope.unwrap();
    (rep.verdict.passed(), format!("slope of ||T^2|| vs sqrt(gamma) {slope:.3} (window [-1.4, -0.6])"))
}

fn eta_law() -> Outcome {
    let rep = harness::eta_law(&weak_bump(), &[20.0, 40.0, 80.0, 160.0], 1e-6).unwrap();
    let last = *rep.values().last().unwrap();
    (
        rep.verdict.passed(),
        format!(
            "eta/ln(kappa) at kappa = 160: {last:.3} (target 1 +- 0.25); dilation ratio {:.3} (window [0.35, 0.65])",
            rep.get_extra("dilation_ratio").unwrap()
        ),
    )
}

fn nu() -> Outcome {
    let rep = harness::nu_sweep(&weak_bump(), &[20.0, 40.0, 80.0, 160.0], EtaRule::AInvLog).unwrap();
    let v = rep.values();
    (rep.verdict.passed(), format!("nu = {:.4?}; strictly decreasing, final < 1", v))
}

fn integrals() -> Outcome {
    let (rows, rep) = harness::j_integrals(&[20.0, 40.0, 80.0, 160.0, 320.0], EtaRule::AInvLog, 1.0, 4.0).unwrap();
    let kj: Vec<f64> = rows.iter().map(|r| r.kappa * r.jj).collect();
    let kjs: Vec<f64> = rows.iter().map(|r| r.kappa * r.j).collect();
    (
        rep.verdict.passed(),
        format!(
            "kappa*JJ = {kj:.4?}, kappa*J = {kjs:.4?}, split residual {:.1e}",
            rep.get_extra("max_split_residual").unwrap()
        ),
    )
}

fn decay() -> Outcome {
    let q = Potential::bump(1.0, 1.0).unwrap();
    let dirs = symmetric_directions(6);
    let rep = harness::decay_estimate_check(&q, &dirs, &[10.0, 20.0, 40.0, 80.0], 0.0, 4.0).unwrap();
    let env = harness::envelope_check(&q, &dirs, 10.0, &[0.0, 1.0, 2.0, 4.0, 8.0]).unwrap();
    (
        rep.verdict.passed() && env.verdict.passed(),
        format!(
            "tail slope {:.3} (limit -2); max exp(-a eta)-normalized value {:.3e} <= P = {:.4}",
            rep.fitted_slope.unwrap(),
            env.values().iter().cloned().fold(0.0, f64::max),
            env.get_extra("bound").unwrap()
        ),
    )
}

fn prolate() -> Outcome {
    let x = [-0.3, 0.0, 0.1];
    let y = [0.4, 0.2, 0.0];
    let frame = ProlateFrame::new(x, y).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut sum_err = 0.0f64;
    for _ in 0..1000 {
        let s = rng.random_range(1.0..5.0);
        let t = rng.random_range(-1.0..1.0);
        let psi = rng.random_range(0.0..2.0 * PI);
        let z = frame.map(s, t, psi);
        let e = (norm(sub(x, z)) + norm(sub(z, y)) - 2.0 * frame.half * s).abs();
        sum_err = sum_err.max(e);
    }
    let q = Potential::bump(1.0, 1.0).unwrap();
    let f = |z: [f64; 3]| q.eval(z) * (1.0 + 0.5 * z[0] - 0.3 * z[1] * z[2]);
    let via_prolate = prolate_integral(&frame, f, s_max(&frame, &q), ProlateQuadrature::default());
    let grid = Grid3::new(1.0, 64).unwrap();
    let cartesian: f64 = (0..grid.len()).map(|i| grid.weight(i) * f(grid.node(i))).sum();
    let cov = (via_prolate - cartesian).abs() / cartesian.abs();
    let (_, rep) = i1_decay_check(&q, x, y, &[10.0, 20.0, 40.0, 80.0], EtaRule::AInvLog).unwrap();
    let ratio = rep.get_extra("max_min_ratio").unwrap();
    (
        sum_err < 1e-10 && cov < 1e-3 && ratio < 10.0,
        format!("focal-sum error {sum_err:.1e} (1e-10); change of variables {cov:.1e} (1e-3); |I1||kappa+i eta| max/min {ratio:.3} (10)"),
    )
}

fn inversion() -> Outcome {
    let grid = Grid3::new(1.0, 12).unwrap();
    let dirs = symmetric_directions(200);
    let ks = shell_wavenumbers(0.2, 16.0, 17).unwrap();
    let q = Potential::bump(1.0, 1.0).unwrap();
    let exact = recon_error(&q, &born_invert(&synthetic_born_dataset(&q, dirs.clone(), ks.clone()), &grid).unwrap()).unwrap().l2_rel;

    let solver = SolverConfig::default();
    let mut full = Vec::new();
    let mut linear = Vec::new();
    for amp in [0.05, 0.025] {
        let qa = q.with_amplitude(amp);
        let ds = backscatter_on(&qa, &grid, dirs.clone(), &ks, solver).unwrap();
        let rec = born_invert(&ds, &grid).unwrap();
        full.push(recon_error(&qa, &rec).unwrap().l2_rel);
        let born = born_invert(&grid_born_dataset(&qa, &grid, dirs.clone(), ks.clone()).unwrap(), &grid).unwrap();
        linear.push(relative_gap(&rec, &born));
    }
    let ratio = full[1] / full[0];
    (
        exact < 0.1 && full[0] < 0.2 && ratio < 0.7,
        format!(
            "exact-Born l2 {exact:.4} (0.1); A = 0.05 l2 {:.4} (0.2); error(A/2)/error(A) {ratio:.3} (0.7); linearization-only ratio {:.3}",
            full[0],
            linear[1] / linear[0]
        ),
    )
}

fn radon() -> Outcome {
    let q = Potential::new(PotentialKind::Bump, 1.0, 0.7, 1.0, [0.1, 0.2, -0.1]).unwrap();
    let mut identity = 0.0f64;
    let mut evenness = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for beta in spiral_directions(8) {
        let s = radon_for(&q, beta, 0.0);
        identity = identity.max((s.integral() - q.integral()).abs() / q.integral());
        for _ in 0..20 {
            let l = rng.random_range(-0.8..0.8);
            let a = plane_integral(&q, beta, l);
            let b = plane_integral(&q, [-beta[0], -beta[1], -beta[2]], -l);
            evenness = evenness.max((a - b).abs() / a.abs().max(1e-12));
        }
    }
    let mut oracle = 0.0f64;
    let grid = Grid3::new(1.0, 64).unwrap();
    let samples = sample_on_grid(&q, &grid).unwrap();
    for beta in spiral_directions(4) {
        for (kappa, eta) in [(4.0, 1.0), (8.0, 8f64.ln())] {
            let via = complex_direction_fourier(&q, kappa, eta, beta);
            let mut direct = num_complex::Complex64::new(0.0, 0.0);
            for (i, &v) in samples.iter().enumerate() {
                if v != 0.0 {
                    let x = grid.node(i);
                    let bx = beta[0] * x[0] + beta[1] * x[1] + beta[2] * x[2];
                    direct += num_complex::Complex64::from_polar(v * grid.weight(i) * (-eta * bx).exp(), kappa * bx);
                }
            }
            oracle = oracle.max((via - direct).norm() / direct.norm());
        }
    }
    (
        identity < 1e-3 && evenness < 1e-9 && oracle < 1e-3,
        format!("integral identity {identity:.1e} (1e-3); evenness {evenness:.1e}; Radon vs 3D quadrature {oracle:.1e} (1e-3)"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("amplitude-difference identity", amplitude_difference),
        ("reciprocity", reciprocity),
        ("Born series vs dense solve", born_vs_direct),
        ("T^2 norm scaling", t2_scaling),
        ("eta(kappa) law", eta_law),
        ("nu below one and decreasing", nu),
        ("J integral asymptotics", integrals),
        ("decay estimate", decay),
        ("prolate coordinates", prolate),
        ("Born inversion closure", inversion),
        ("Radon identities", radon),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = check();
        if !ok {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {detail} [{:.1}s]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            t.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
