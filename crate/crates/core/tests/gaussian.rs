//! State construction, symplectic spectra, entanglement and discord checks
//! against independently computed reference values.

use approx::{assert_abs_diff_eq, assert_relative_eq};
use cvgn::{
    entropy_f, gaussian_discord, log_negativity_bipartition, log_negativity_two_mode,
    partial_transpose, reduce_modes, rotate_basis, symplectic_eigenvalues, two_mode_invariants,
    BipartitionSpec, CovarianceMatrix, Error,
};
use nalgebra::DMatrix;

fn state(n: usize, data: &[f64]) -> CovarianceMatrix {
    CovarianceMatrix::new(DMatrix::from_row_slice(2 * n, 2 * n, data)).unwrap()
}

/// Mildly squeezed-and-rotated two-mode state, x-p correlated.
fn asym_state_1() -> CovarianceMatrix {
    state(
        2,
        &[
            1.20, 0.00, 0.30, 0.05, //
            0.00, 1.10, 0.05, -0.25, //
            0.30, 0.05, 0.90, 0.00, //
            0.05, -0.25, 0.00, 0.95,
        ],
    )
}

/// Slightly colder companion state with both quadrature cross blocks active.
fn asym_state_2() -> CovarianceMatrix {
    state(
        2,
        &[
            0.75, 0.10, 0.20, 0.00, //
            0.10, 0.80, 0.00, -0.20, //
            0.20, 0.00, 0.70, 0.05, //
            0.00, -0.20, 0.05, 0.65,
        ],
    )
}

/// Asymmetric thermal state whose conditional covariance sits on the second
/// branch of the discord formula.
fn branch2_state_1() -> CovarianceMatrix {
    state(
        2,
        &[
            1.3, 0.0, 0.4, 0.0, //
            0.0, 1.3, 0.0, 0.1, //
            0.4, 0.0, 1.7, 0.0, //
            0.0, 0.1, 0.0, 1.7,
        ],
    )
}

/// Second-branch state with a single active cross element.
fn branch2_state_2() -> CovarianceMatrix {
    state(
        2,
        &[
            1.5, 0.0, 0.3, 0.0, //
            0.0, 1.5, 0.0, 0.0, //
            0.3, 0.0, 2.5, 0.0, //
            0.0, 0.0, 0.0, 2.5,
        ],
    )
}

/// First-branch state used as the start of the branch-crossing path.
fn branch1_state() -> CovarianceMatrix {
    state(
        2,
        &[
            1.5, 0.0, 0.5, 0.0, //
            0.0, 1.5, 0.0, 0.5, //
            0.5, 0.0, 1.5, 0.0, //
            0.0, 0.5, 0.0, 1.5,
        ],
    )
}

#[test]
fn vacuum_and_thermal_spectra() {
    let vac = CovarianceMatrix::vacuum(3);
    let nu = symplectic_eigenvalues(&vac).unwrap();
    for v in &nu {
        assert_abs_diff_eq!(*v, 0.5, epsilon = 1e-12);
    }
    assert!(vac.is_physical().unwrap());
    assert_abs_diff_eq!(vac.min_symplectic_eigenvalue().unwrap(), 0.5, epsilon = 1e-12);

    let th = CovarianceMatrix::thermal(&[0.0, 1.5, 240.0]).unwrap();
    let nu = symplectic_eigenvalues(&th).unwrap();
    let want = [0.5, 2.0, 240.5];
    for (v, w) in nu.iter().zip(want) {
        assert_relative_eq!(*v, w, max_relative = 1e-12);
    }
    assert!(CovarianceMatrix::thermal(&[1.0, -0.1]).is_err());
}

#[test]
fn construction_rejects_malformed_matrices() {
    // Odd dimension.
    assert!(CovarianceMatrix::new(DMatrix::identity(3, 3)).is_err());
    // Asymmetric beyond tolerance.
    let mut m = DMatrix::identity(4, 4);
    m[(0, 1)] = 0.5;
    assert!(CovarianceMatrix::new(m).is_err());
    // Non-finite entries.
    let mut m = DMatrix::identity(2, 2);
    m[(0, 0)] = f64::NAN;
    assert!(CovarianceMatrix::new(m).is_err());
    // Sub-vacuum noise constructs but is flagged unphysical.
    let c = CovarianceMatrix::new(DMatrix::identity(4, 4) * 0.3).unwrap();
    assert!(!c.is_physical().unwrap());
}

#[test]
fn two_mode_squeezed_state_matches_closed_form() {
    let r = 0.5_f64;
    let c = CovarianceMatrix::two_mode_squeezed(r).unwrap();
    let m = c.matrix();
    let ch = (2.0 * r).cosh();
    let sh = (2.0 * r).sinh();
    assert_relative_eq!(m[(0, 0)], 0.5 * ch, max_relative = 1e-14);
    assert_relative_eq!(m[(0, 2)], 0.5 * sh, max_relative = 1e-14);
    assert_relative_eq!(m[(1, 3)], -0.5 * sh, max_relative = 1e-14);

    // Pure state: both symplectic eigenvalues at the vacuum floor.
    let nu = symplectic_eigenvalues(&c).unwrap();
    for v in &nu {
        assert_abs_diff_eq!(*v, 0.5, epsilon = 1e-12);
    }

    let inv = two_mode_invariants(&c).unwrap();
    assert_relative_eq!(inv.i1, ch * ch, max_relative = 1e-12);
    assert_relative_eq!(inv.i2, ch * ch, max_relative = 1e-12);
    assert_relative_eq!(inv.i3, -sh * sh, max_relative = 1e-12);
    assert_abs_diff_eq!(inv.i4, 1.0, epsilon = 1e-12);

    // E = 2 r log2 e.
    let e = log_negativity_two_mode(&c).unwrap();
    assert_relative_eq!(e, 2.0 * r * std::f64::consts::LOG2_E, max_relative = 1e-12);
}

#[test]
fn entropy_function_reference_values() {
    assert_eq!(entropy_f(1.0).unwrap(), 0.0);
    assert_relative_eq!(entropy_f(2.0).unwrap(), 1.3774437510817343, max_relative = 1e-14);
    assert_relative_eq!(entropy_f(3.0).unwrap(), 2.0, max_relative = 1e-14);
    assert_relative_eq!(entropy_f(4.0).unwrap(), 2.427376486136672, max_relative = 1e-14);
    assert_relative_eq!(entropy_f(2.75).unwrap(), 1.8689843099655685, max_relative = 1e-14);
    assert_relative_eq!(
        entropy_f(1.0_f64.cosh()).unwrap(),
        0.9513895138912786,
        max_relative = 1e-14
    );
    // Round-off just below 1 clamps to zero; genuine violations error out.
    assert_eq!(entropy_f(1.0 - 5e-10).unwrap(), 0.0);
    assert!(entropy_f(0.99).is_err());
    assert!(entropy_f(f64::NAN).is_err());
}

#[test]
fn discord_reference_values_first_branch() {
    let c = asym_state_1();
    let nu = symplectic_eigenvalues(&c).unwrap();
    assert_relative_eq!(nu[0], 0.8838313218392497, max_relative = 1e-10);
    assert_relative_eq!(nu[1], 1.1130328811566559, max_relative = 1e-10);
    assert_relative_eq!(
        gaussian_discord(&c, 0).unwrap(),
        0.03540186208613738,
        max_relative = 1e-10
    );
    assert_relative_eq!(
        gaussian_discord(&c, 1).unwrap(),
        0.044746107235560384,
        max_relative = 1e-10
    );
    assert_eq!(log_negativity_two_mode(&c).unwrap(), 0.0);

    let c = asym_state_2();
    let nu = symplectic_eigenvalues(&c).unwrap();
    assert_relative_eq!(nu[0], 0.6439857009974242, max_relative = 1e-10);
    assert_relative_eq!(nu[1], 0.7401232444065358, max_relative = 1e-10);
    assert_relative_eq!(
        gaussian_discord(&c, 0).unwrap(),
        0.05544688431889189,
        max_relative = 1e-10
    );
    assert_relative_eq!(
        gaussian_discord(&c, 1).unwrap(),
        0.06725687674662117,
        max_relative = 1e-10
    );
    assert_eq!(log_negativity_two_mode(&c).unwrap(), 0.0);
}

#[test]
fn discord_reference_values_second_branch() {
    let c = branch2_state_1();
    assert_relative_eq!(
        gaussian_discord(&c, 0).unwrap(),
        0.008095966056999693,
        max_relative = 1e-10
    );
    assert_relative_eq!(
        gaussian_discord(&c, 1).unwrap(),
        0.006748844385841446,
        max_relative = 1e-10
    );
    assert_eq!(log_negativity_two_mode(&c).unwrap(), 0.0);

    let c = branch2_state_2();
    assert_relative_eq!(
        gaussian_discord(&c, 0).unwrap(),
        0.0007233404862829751,
        max_relative = 1e-10
    );
    assert_relative_eq!(
        gaussian_discord(&c, 1).unwrap(),
        0.00026055878229991336,
        max_relative = 1e-10
    );
    assert_eq!(log_negativity_two_mode(&c).unwrap(), 0.0);
}

#[test]
fn discord_is_continuous_across_the_branch_boundary() {
    // Interpolating between a first-branch and a second-branch state crosses
    // the branch condition at t_star; discord must not jump there.
    let a = branch1_state();
    let b = branch2_state_2();
    let t_star = 0.7643644305752596;
    let blend = |t: f64| -> CovarianceMatrix {
        CovarianceMatrix::new(a.matrix() * (1.0 - t) + b.matrix() * t).unwrap()
    };
    let eps = 1e-6;
    let below = gaussian_discord(&blend(t_star - eps), 0).unwrap();
    let above = gaussian_discord(&blend(t_star + eps), 0).unwrap();
    assert!(
        (below - above).abs() <= 1e-6,
        "discord jumps across the branch boundary: {below} vs {above}"
    );
}

#[test]
fn product_states_have_exactly_zero_discord() {
    let c = CovarianceMatrix::thermal(&[1.0, 2.0]).unwrap();
    assert_eq!(gaussian_discord(&c, 0).unwrap(), 0.0);
    assert_eq!(gaussian_discord(&c, 1).unwrap(), 0.0);
    assert_eq!(log_negativity_two_mode(&c).unwrap(), 0.0);
}

#[test]
fn discord_of_pure_squeezed_states_is_symmetric() {
    // For a pure two-mode squeezed state the discord from either side equals
    // the entropy of the reduced thermal state, f(cosh 2r).
    for r in [0.1, 0.3, 0.5, 0.8] {
        let c = CovarianceMatrix::two_mode_squeezed(r).unwrap();
        let want = entropy_f((2.0 * r).cosh()).unwrap();
        assert_relative_eq!(gaussian_discord(&c, 0).unwrap(), want, max_relative = 1e-8);
        assert_relative_eq!(gaussian_discord(&c, 1).unwrap(), want, max_relative = 1e-8);
    }
}

#[test]
fn noisy_squeezed_state_reference_values() {
    let tm = CovarianceMatrix::two_mode_squeezed(0.5).unwrap();
    let c = CovarianceMatrix::new(tm.matrix() + DMatrix::identity(4, 4) * 0.05).unwrap();
    let nu = symplectic_eigenvalues(&c).unwrap();
    for v in &nu {
        assert_relative_eq!(*v, 0.57415505896992865, max_relative = 1e-10);
    }
    assert_relative_eq!(
        log_negativity_two_mode(&c).unwrap(),
        1.0957912574514515,
        max_relative = 1e-10
    );
    assert_relative_eq!(
        gaussian_discord(&c, 0).unwrap(),
        0.613299067069081,
        max_relative = 1e-10
    );
    // The general bipartition negativity agrees with the two-mode formula.
    let e_bi =
        log_negativity_bipartition(&c, &BipartitionSpec::new(vec![0], vec![1])).unwrap();
    assert_relative_eq!(
        e_bi,
        log_negativity_two_mode(&c).unwrap(),
        max_relative = 1e-10
    );
}

#[test]
fn partial_transpose_is_an_involution() {
    let c = CovarianceMatrix::two_mode_squeezed(0.3).unwrap();
    let twice = partial_transpose(&partial_transpose(&c, &[0]).unwrap(), &[0]).unwrap();
    assert_eq!((twice.matrix() - c.matrix()).amax(), 0.0);

    assert!(partial_transpose(&c, &[2]).is_err());
    assert!(partial_transpose(&c, &[0, 0]).is_err());
}

#[test]
fn entanglement_and_discord_are_phase_rotation_invariant() {
    let tm = CovarianceMatrix::two_mode_squeezed(0.5).unwrap();
    let c = CovarianceMatrix::new(tm.matrix() + DMatrix::identity(4, 4) * 0.05).unwrap();
    let d0 = gaussian_discord(&c, 0).unwrap();
    let e0 = log_negativity_two_mode(&c).unwrap();

    let mut s = DMatrix::zeros(4, 4);
    for (mode, theta) in [(0usize, 0.7_f64), (1, -1.3)] {
        let (sin, cos) = theta.sin_cos();
        s[(2 * mode, 2 * mode)] = cos;
        s[(2 * mode, 2 * mode + 1)] = sin;
        s[(2 * mode + 1, 2 * mode)] = -sin;
        s[(2 * mode + 1, 2 * mode + 1)] = cos;
    }
    let rotated = rotate_basis(&c, &s).unwrap();
    assert_abs_diff_eq!(gaussian_discord(&rotated, 0).unwrap(), d0, epsilon = 1e-9);
    assert_abs_diff_eq!(log_negativity_two_mode(&rotated).unwrap(), e0, epsilon = 1e-9);
}

#[test]
fn basis_rotation_rejects_non_symplectic_matrices() {
    let c = CovarianceMatrix::vacuum(1);
    let err = rotate_basis(&c, &(DMatrix::identity(2, 2) * 2.0)).unwrap_err();
    assert!(matches!(err, Error::InvalidInput(_)));
}

#[test]
fn mode_reduction_orders_blocks_and_validates() {
    let c = asym_state_1();
    let swapped = reduce_modes(&c, &[1, 0]).unwrap();
    let m = c.matrix();
    let s = swapped.matrix();
    assert_eq!(s[(0, 0)], m[(2, 2)]);
    assert_eq!(s[(2, 2)], m[(0, 0)]);
    assert_eq!(s[(0, 2)], m[(2, 0)]);

    let first = reduce_modes(&c, &[0]).unwrap();
    assert_eq!(first.n_modes(), 1);
    assert_eq!(first.matrix()[(0, 0)], m[(0, 0)]);

    assert!(reduce_modes(&c, &[0, 0]).is_err());
    assert!(reduce_modes(&c, &[0, 2]).is_err());
}

#[test]
fn bipartition_validation() {
    let c = CovarianceMatrix::vacuum(3);
    // Must cover all modes exactly once.
    assert!(log_negativity_bipartition(&c, &BipartitionSpec::new(vec![0], vec![1])).is_err());
    assert!(
        log_negativity_bipartition(&c, &BipartitionSpec::new(vec![0, 1], vec![1, 2])).is_err()
    );
    assert!(log_negativity_bipartition(&c, &BipartitionSpec::new(vec![], vec![0, 1, 2])).is_err());
    let ok = log_negativity_bipartition(&c, &BipartitionSpec::new(vec![0, 2], vec![1])).unwrap();
    assert_eq!(ok, 0.0);
}

#[test]
fn discord_validates_its_inputs() {
    let c = CovarianceMatrix::vacuum(2);
    assert!(gaussian_discord(&c, 2).is_err());
    assert!(gaussian_discord(&CovarianceMatrix::vacuum(3), 0).is_err());
    let sub = CovarianceMatrix::new(DMatrix::identity(4, 4) * 0.3).unwrap();
    assert!(gaussian_discord(&sub, 0).is_err());
}
