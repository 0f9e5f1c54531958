use backscatter::amplitude::{born_amplitude, AmplitudeDataset, DatasetMeta};
use backscatter::geom::{neg, normalize};
use backscatter::kernels::{free_green, modified_green};
use backscatter::radon::complex_direction_fourier;
use backscatter::{ComplexWavenumber, Potential, PotentialKind};
use num_complex::Complex64;
use proptest::prelude::*;

fn unit() -> impl Strategy<Value = [f64; 3]> {
    (0.0f64..std::f64::consts::PI, 0.0f64..(2.0 * std::f64::consts::PI))
        .prop_map(|(t, p)| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()])
}

fn meta() -> DatasetMeta {
    DatasetMeta {
        potential_id: "test".into(),
        grid_n: 8,
        half_width: 1.0,
        solver_mode: "born-series".into(),
        tol: 1e-8,
        max_iter: 10,
        config: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn born_amplitude_is_linear_in_the_amplitude(a in 0.01f64..3.0, k in 0.1f64..20.0, beta in unit()) {
        let q1 = Potential::bump(a, 1.0).unwrap();
        let q2 = Potential::bump(2.0 * a, 1.0).unwrap();
        let x = born_amplitude(&q1, neg(beta), beta, k);
        let y = born_amplitude(&q2, neg(beta), beta, k);
        prop_assert!((y - 2.0 * x).norm() <= 1e-12 * y.norm().max(1e-300));
    }

    #[test]
    fn green_functions_are_even(r in unit(), len in 0.05f64..3.0, kappa in 0.5f64..30.0, eta in 0.0f64..5.0, beta in unit()) {
        let k = ComplexWavenumber::new(kappa, eta).unwrap();
        let x = [r[0] * len, r[1] * len, r[2] * len];
        let g = free_green(x, k).unwrap();
        prop_assert!((g - free_green(neg(x), k).unwrap()).norm() <= 1e-14 * g.norm());
        // The modified kernel is not even; it picks up the conjugate phase.
        let m = modified_green(x, k, beta).unwrap();
        let back = modified_green(neg(x), k, neg(beta)).unwrap();
        prop_assert!((m - back).norm() <= 1e-12 * m.norm().max(1e-300));
    }

    #[test]
    fn antipodal_transform_flips_eta(kappa in 1.0f64..30.0, eta in 0.0f64..4.0, beta in unit(), c in unit()) {
        let q = Potential::new(PotentialKind::Bump, 1.0, 0.5, 1.0, [0.3 * c[0], 0.3 * c[1], 0.3 * c[2]]).unwrap();
        // q real: q~((κ + iη)β) equals the conjugate of q~((κ - iη)(-β)).
        let a = complex_direction_fourier(&q, kappa, eta, beta);
        let b = complex_direction_fourier(&q, kappa, -eta, neg(beta)).conj();
        prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1e-12));
    }

    #[test]
    fn dataset_json_round_trips(re in proptest::collection::vec(-1.0f64..1.0, 6), d in unit()) {
        let dirs = vec![normalize(d), neg(normalize(d))];
        let ks = vec![ComplexWavenumber::real(1.0).unwrap(), ComplexWavenumber::new(3.0, 0.5).unwrap(), ComplexWavenumber::real(5.0).unwrap()];
        let ds = AmplitudeDataset::from_fn(dirs, ks, meta(), |b, k| Complex64::new(re[0] * b[0] + re[1] * k.kappa, re[2] * b[2] - re[3] * k.eta));
        let back = AmplitudeDataset::from_json(&ds.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.to_csv(), ds.to_csv());
    }
}
