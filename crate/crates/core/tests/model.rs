//! Network construction checks: default rates, generator matrices, the
//! classical mean field, and stability flags, against independently computed
//! reference values.

use approx::assert_relative_eq;
use cvgn::model::{default_drive_e, default_g0, default_gamma, default_kappa, default_omega_m};
use cvgn::{
    build_full_linearized, build_simplified, mean_field, optical_residual, stability,
    DriftDiffusion, Error, FullParams, SimplifiedParams,
};
use nalgebra::DMatrix;

#[test]
fn default_rates_match_the_reference_setup() {
    assert_relative_eq!(default_omega_m(), 5950176.485899068, max_relative = 1e-12);
    assert_relative_eq!(default_gamma(), 879.645943005142, max_relative = 1e-12);
    assert_relative_eq!(default_kappa(), 1350884.841043611, max_relative = 1e-12);
    // Single-photon coupling from (omega_L / L) sqrt(hbar / (m omega_M)).
    assert_relative_eq!(default_g0(), 24.75757425297276, max_relative = 1e-12);
    // Drive amplitude from sqrt(2 P kappa / (hbar omega_L)).
    assert_relative_eq!(default_drive_e(), 398981677969.65857, max_relative = 1e-12);

    let p = FullParams::default();
    assert_eq!(p.delta0, -p.omega_m);
    assert_eq!(p.eta, 0.0);
    assert_eq!(p.n_m, 0.0);
    assert_eq!(p.n_in, 0.0);
}

#[test]
fn parameter_validation() {
    let ok = SimplifiedParams {
        eta: 0.5,
        n_in: 1.0,
        ..Default::default()
    };
    assert!(ok.validate().is_ok());
    assert!(SimplifiedParams { eta: -0.1, ..ok }.validate().is_err());
    assert!(SimplifiedParams { eta: 1.2, ..ok }.validate().is_err());
    assert!(SimplifiedParams { n_in: -1.0, ..ok }.validate().is_err());
    assert!(SimplifiedParams { kappa: 0.0, ..ok }.validate().is_err());
    assert!(SimplifiedParams {
        omega_c: f64::NAN,
        ..ok
    }
    .validate()
    .is_err());

    let okf = FullParams {
        eta: 0.25,
        n_m: 240.0,
        ..Default::default()
    };
    assert!(okf.validate().is_ok());
    assert!(FullParams { omega_m: 0.0, ..okf }.validate().is_err());
    assert!(FullParams { gamma: -1.0, ..okf }.validate().is_err());
    assert!(FullParams { eta: 1.01, ..okf }.validate().is_err());
    assert!(FullParams { n_m: -0.5, ..okf }.validate().is_err());
    // Zero coupling and zero drive are legitimate degenerate corners.
    assert!(FullParams { g0: 0.0, ..okf }.validate().is_ok());
    assert!(FullParams {
        drive_e: 0.0,
        ..okf
    }
    .validate()
    .is_ok());
}

#[test]
fn passive_network_generator_reference_values() {
    let p = SimplifiedParams {
        eta: 0.25,
        n_in: 2.0,
        ..Default::default()
    };
    let dd = build_simplified(&p).unwrap();
    let a = dd.drift();
    let d = dd.diffusion();
    let kappa = p.kappa;

    for i in 0..4 {
        assert_relative_eq!(a[(i, i)], -1350884.841043611, max_relative = 1e-12);
        assert_relative_eq!(d[(i, i)], 4728096.943652639, max_relative = 1e-12);
    }
    for i in 0..2 {
        // Like-quadrature fiber coupling, -kappa sqrt(eta).
        assert_relative_eq!(a[(i, i + 2)], -675442.4205218055, max_relative = 1e-12);
        assert_relative_eq!(a[(i + 2, i)], -675442.4205218055, max_relative = 1e-12);
        // Correlated input noise, kappa sqrt(eta) (2 n_in + 1).
        assert_relative_eq!(d[(i, i + 2)], 3377212.1026090276, max_relative = 1e-12);
    }
    // No rotation terms at omega_c = 0.
    assert_eq!(a[(0, 1)], 0.0);
    assert_eq!(dd.mode_labels(), ["O1".to_string(), "O2".to_string()]);

    // A detuned frame adds the rotation block but leaves damping alone.
    let rot = SimplifiedParams {
        omega_c: 3.0 * kappa,
        ..p
    };
    let ddr = build_simplified(&rot).unwrap();
    assert_relative_eq!(ddr.drift()[(0, 1)], 3.0 * kappa, max_relative = 1e-12);
    assert_relative_eq!(ddr.drift()[(1, 0)], -3.0 * kappa, max_relative = 1e-12);
    assert_eq!(ddr.drift()[(0, 0)], a[(0, 0)]);
}

#[test]
fn mean_field_reference_values() {
    let p0 = FullParams::default(); // eta = 0
    let mf = mean_field(&p0).unwrap();
    assert_relative_eq!(mf.a_bar_1.re, 17240.373573852816, max_relative = 1e-9);
    assert_relative_eq!(mf.a_bar_1.im, -69243.67328268063, max_relative = 1e-9);
    assert_relative_eq!(mf.q_bar_1, 21186.515700490745, max_relative = 1e-9);
    assert_eq!(mf.a_bar_1, mf.a_bar_2);
    assert_eq!(mf.p_bar_1, 0.0);
    assert!(optical_residual(&p0, mf.a_bar_1) <= 1e-11 * p0.drive_e);

    let p25 = FullParams {
        eta: 0.25,
        ..Default::default()
    };
    let mf = mean_field(&p25).unwrap();
    assert_relative_eq!(mf.a_bar_1.re, 23775.372856036818, max_relative = 1e-9);
    assert_relative_eq!(mf.a_bar_1.im, -64156.6615332197, max_relative = 1e-9);
    assert_relative_eq!(mf.q_bar_1, 19478.20554822145, max_relative = 1e-9);

    // Zero drive short-circuits to the origin.
    let quiet = FullParams {
        drive_e: 0.0,
        ..Default::default()
    };
    let mf = mean_field(&quiet).unwrap();
    assert_eq!(mf.a_bar_1.norm(), 0.0);
    assert_eq!(mf.q_bar_1, 0.0);
}

#[test]
fn linearized_drift_carries_effective_couplings() {
    // The linearized generator holds the effective detuning and couplings:
    // rows (q, p, x, y) per cavity with G_R = A[(1,2)], G_I = A[(1,3)],
    // Delta = A[(3,2)].
    let p = FullParams::default();
    let mf = mean_field(&p).unwrap();
    let dd = build_full_linearized(&p, &mf).unwrap();
    let a = dd.drift();
    assert_relative_eq!(a[(1, 2)], 603628.5328609301, max_relative = 1e-9);
    assert_relative_eq!(a[(1, 3)], -2424393.9224679656, max_relative = 1e-9);
    assert_relative_eq!(a[(3, 2)], -5425649.750282396, max_relative = 1e-9);

    let p = FullParams {
        eta: 0.25,
        ..Default::default()
    };
    let mf = mean_field(&p).unwrap();
    let dd = build_full_linearized(&p, &mf).unwrap();
    let a = dd.drift();
    assert_relative_eq!(a[(1, 2)], 832435.1774532845, max_relative = 1e-9);
    assert_relative_eq!(a[(1, 3)], -2246284.937426571, max_relative = 1e-9);
    assert_relative_eq!(a[(3, 2)], -5467943.36572431, max_relative = 1e-9);
    // Mirror cavity carries identical blocks.
    assert_eq!(a[(1, 2)], a[(5, 6)]);
    assert_eq!(a[(3, 2)], a[(7, 6)]);
    // Fiber coupling between the optical quadratures only.
    assert_relative_eq!(
        a[(2, 6)],
        -p.kappa * p.eta.sqrt(),
        max_relative = 1e-12
    );
    assert_eq!(a[(0, 4)], 0.0);
    assert_eq!(
        dd.mode_labels(),
        ["M1".to_string(), "O1".into(), "M2".into(), "O2".into()]
    );

    // Mechanical thermal noise and correlated optical noise.
    let p = FullParams {
        eta: 0.25,
        n_m: 240.0,
        n_in: 2.0,
        ..Default::default()
    };
    let mf = mean_field(&p).unwrap();
    let dd = build_full_linearized(&p, &mf).unwrap();
    let d = dd.diffusion();
    assert_relative_eq!(d[(1, 1)], p.gamma * 481.0, max_relative = 1e-12);
    assert_eq!(d[(0, 0)], 0.0);
    assert_relative_eq!(d[(2, 2)], p.kappa * 3.5, max_relative = 1e-12);
    assert_relative_eq!(
        d[(2, 6)],
        p.kappa * p.eta.sqrt() * 5.0,
        max_relative = 1e-12
    );
}

#[test]
fn stale_mean_field_is_rejected() {
    let p0 = FullParams::default();
    let mf = mean_field(&p0).unwrap();
    let p25 = FullParams {
        eta: 0.25,
        ..Default::default()
    };
    let err = build_full_linearized(&p25, &mf).unwrap_err();
    match err {
        Error::InvalidInput(msg) => assert!(
            msg.contains("fixed point"),
            "unexpected message: {msg}"
        ),
        other => panic!("expected InvalidInput, got {other:?}"),
    }
}

#[test]
fn stability_flags_reference_values() {
    // Lossless fiber leaves the antisymmetric optical mode undamped in the
    // passive network: no steady state there.
    let dd = build_simplified(&SimplifiedParams {
        eta: 1.0,
        ..Default::default()
    })
    .unwrap();
    let (stable, max_re) = stability(&dd);
    assert!(!stable);
    assert!(max_re.abs() < 1.0, "marginal mode should sit at zero, got {max_re}");

    let dd = build_simplified(&SimplifiedParams {
        eta: 0.95,
        ..Default::default()
    })
    .unwrap();
    assert!(stability(&dd).0);

    // The optomechanical network stays damped even on a lossless fiber.
    let p = FullParams {
        eta: 1.0,
        ..Default::default()
    };
    let dd = build_full_linearized(&p, &mean_field(&p).unwrap()).unwrap();
    let (stable, max_re) = stability(&dd);
    assert!(stable);
    assert!(max_re < -100.0, "expected hundreds of Hz of damping, got {max_re}");

    // Reference spectral abscissas at the operating points.
    let p = FullParams {
        eta: 0.25,
        n_m: 240.0,
        ..Default::default()
    };
    let dd = build_full_linearized(&p, &mean_field(&p).unwrap()).unwrap();
    assert_relative_eq!(stability(&dd).1, -268691.919394976, max_relative = 1e-6);

    let p = FullParams {
        n_m: 240.0,
        ..Default::default()
    };
    let dd = build_full_linearized(&p, &mean_field(&p).unwrap()).unwrap();
    assert_relative_eq!(stability(&dd).1, -513669.8703978227, max_relative = 1e-6);
}

#[test]
fn drift_diffusion_construction_validates() {
    let a = DMatrix::identity(4, 4) * -1.0;
    let d_ok = DMatrix::identity(4, 4);
    let labels = vec!["O1".to_string(), "O2".into()];
    assert!(DriftDiffusion::new(a.clone(), d_ok.clone(), labels.clone()).is_ok());

    // Odd dimension.
    assert!(DriftDiffusion::new(
        DMatrix::identity(3, 3),
        DMatrix::identity(3, 3),
        vec!["O1".into()]
    )
    .is_err());
    // Asymmetric diffusion.
    let mut d_bad = d_ok.clone();
    d_bad[(0, 1)] = 0.7;
    assert!(DriftDiffusion::new(a.clone(), d_bad, labels.clone()).is_err());
    // Indefinite diffusion.
    assert!(DriftDiffusion::new(a.clone(), -d_ok.clone(), labels.clone()).is_err());
    // Label count mismatch.
    assert!(DriftDiffusion::new(a, d_ok, vec!["O1".into()]).is_err());
}

#[test]
fn mean_field_residual_definition() {
    // The residual measures |i Delta a + E - kappa a - kappa sqrt(eta) a|
    // with the self-consistent Delta; it vanishes only at the fixed point.
    let p = FullParams::default();
    let mf = mean_field(&p).unwrap();
    assert!(optical_residual(&p, mf.a_bar_1) < 1e-11 * p.drive_e);
    assert!(optical_residual(&p, mf.a_bar_1 * 1.01) > 1e-6 * p.drive_e);
}
