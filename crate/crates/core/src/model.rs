//! Drift/diffusion builders for the two fiber-coupled cavity models: the
//! passive two-cavity network (thermal light through a lossy fiber link) and
//! the full linearized optomechanical network, including the classical
//! mean-field fixed point and stability classification.
//!
//! All rates are angular frequencies (rad/s). Quadrature ordering follows
//! gaussian-core; mode labels record the physical identity of each slot.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TAU: f64 = std::f64::consts::TAU;

/// Reduced Planck constant (J s).
const HBAR: f64 = 1.054571817e-34;
/// Speed of light (m/s).
const SPEED_OF_LIGHT: f64 = 299792458.0;

// Reference experimental setup behind the default coupling and drive rates:
// a 1064 nm laser driving a 25 mm cavity with an effective mirror mass of
// 145 ng at 11 mW input power.
const SETUP_WAVELENGTH: f64 = 1064e-9;
const SETUP_CAVITY_LENGTH: f64 = 25e-3;
const SETUP_EFFECTIVE_MASS: f64 = 145e-12;
const SETUP_LASER_POWER: f64 = 11e-3;

/// Default mechanical frequency: 2 pi * 947 kHz.
pub fn default_omega_m() -> f64 {
    TAU * 947.0e3
}

/// Default mechanical damping: 2 pi * 140 Hz.
pub fn default_gamma() -> f64 {
    TAU * 140.0
}

/// Default cavity linewidth: 2 pi * 215 kHz.
pub fn default_kappa() -> f64 {
    TAU * 215.0e3
}

/// Default single-photon optomechanical coupling, from the reference setup:
/// g0 = (omega_L / L) sqrt(hbar / (m omega_M)) ~= 24.76 s^-1.
pub fn default_g0() -> f64 {
    let omega_l = TAU * SPEED_OF_LIGHT / SETUP_WAVELENGTH;
    (omega_l / SETUP_CAVITY_LENGTH) * (HBAR / (SETUP_EFFECTIVE_MASS * default_omega_m())).sqrt()
}

/// Default drive amplitude, from the reference setup:
/// E = sqrt(2 P kappa / (hbar omega_L)) ~= 3.99e11 s^-1.
pub fn default_drive_e() -> f64 {
    let omega_l = TAU * SPEED_OF_LIGHT / SETUP_WAVELENGTH;
    (2.0 * SETUP_LASER_POWER * default_kappa() / (HBAR * omega_l)).sqrt()
}

/// Parameters of the passive two-cavity network: two cavities of equal
/// frequency and linewidth, coupled through a fiber of transmissivity `eta`
/// carrying thermal light of occupation `n_in` in both directions.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SimplifiedParams {
    /// Common cavity frequency (rad/s). The steady state is independent of
    /// it; 0 means the co-rotating frame.
    pub omega_c: f64,
    /// Cavity linewidth (rad/s).
    pub kappa: f64,
    /// Fiber transmissivity in [0, 1].
    pub eta: f64,
    /// Thermal occupation of the two directional fiber inputs.
    pub n_in: f64,
}

impl Default for SimplifiedParams {
    fn default() -> Self {
        Self {
            omega_c: 0.0,
            kappa: default_kappa(),
            eta: 0.0,
            n_in: 0.0,
        }
    }
}

impl SimplifiedParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega_c", self.omega_c),
            ("kappa", self.kappa),
            ("eta", self.eta),
            ("n_in", self.n_in),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be finite")));
            }
        }
        if self.kappa <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "kappa must be > 0 (got {})",
                self.kappa
            )));
        }
        if self.omega_c < 0.0 {
            return Err(Error::InvalidInput(format!(
                "omega_c must be >= 0 (got {})",
                self.omega_c
            )));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::InvalidInput(format!(
                "eta must be in [0, 1] (got {})",
                self.eta
            )));
        }
        if self.n_in < 0.0 {
            return Err(Error::InvalidInput(format!(
                "n_in must be >= 0 (got {})",
                self.n_in
            )));
        }
        Ok(())
    }

    /// Default integration step: 0.01 of the fastest timescale.
    pub fn default_timestep(&self) -> f64 {
        let mut rate = self.kappa;
        if self.omega_c > 0.0 {
            rate = rate.max(self.omega_c);
        }
        0.01 / rate
    }
}

/// Parameters of the full optomechanical network: two identical laser-driven
/// optomechanical cavities whose optical outputs couple through the fiber.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FullParams {
    /// Mechanical frequency (rad/s).
    pub omega_m: f64,
    /// Mechanical damping (rad/s).
    pub gamma: f64,
    /// Bare laser-cavity detuning (rad/s); any sign.
    pub delta0: f64,
    /// Cavity linewidth (rad/s).
    pub kappa: f64,
    /// Single-photon optomechanical coupling (rad/s).
    pub g0: f64,
    /// Drive amplitude (rad/s).
    pub drive_e: f64,
    /// Fiber transmissivity in [0, 1].
    pub eta: f64,
    /// Mechanical bath occupation.
    pub n_m: f64,
    /// Optical input occupation (0 for vacuum fiber inputs).
    pub n_in: f64,
}

impl Default for FullParams {
    fn default() -> Self {
        Self {
            omega_m: default_omega_m(),
            gamma: default_gamma(),
            delta0: -default_omega_m(),
            kappa: default_kappa(),
            g0: default_g0(),
            drive_e: default_drive_e(),
            eta: 0.0,
            n_m: 0.0,
            n_in: 0.0,
        }
    }
}

impl FullParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega_m", self.omega_m),
            ("gamma", self.gamma),
            ("delta0", self.delta0),
            ("kappa", self.kappa),
            ("g0", self.g0),
            ("drive_e", self.drive_e),
            ("eta", self.eta),
            ("n_m", self.n_m),
            ("n_in", self.n_in),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be finite")));
            }
        }
        for (name, v) in [
            ("omega_m", self.omega_m),
            ("gamma", self.gamma),
            ("kappa", self.kappa),
        ] {
            if v <= 0.0 {
                return Err(Error::InvalidInput(format!("{name} must be > 0 (got {v})")));
            }
        }
        for (name, v) in [
            ("g0", self.g0),
            ("drive_e", self.drive_e),
            ("n_m", self.n_m),
            ("n_in", self.n_in),
        ] {
            if v < 0.0 {
                return Err(Error::InvalidInput(format!("{name} must be >= 0 (got {v})")));
            }
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::InvalidInput(format!(
                "eta must be in [0, 1] (got {})",
                self.eta
            )));
        }
        Ok(())
    }

    /// Default integration step: 0.01 of the fastest timescale.
    pub fn default_timestep(&self) -> f64 {
        0.01 * (1.0 / self.kappa).min(1.0 / self.omega_m).min(1.0 / self.gamma)
    }
}

/// Classical steady amplitudes of the driven network.
#[derive(Clone, Copy, Debug)]
pub struct MeanFieldState {
    pub a_bar_1: Complex64,
    pub a_bar_2: Complex64,
    pub q_bar_1: f64,
    pub q_bar_2: f64,
    pub p_bar_1: f64,
    pub p_bar_2: f64,
}

impl MeanFieldState {
    pub fn zero() -> Self {
        Self {
            a_bar_1: Complex64::new(0.0, 0.0),
            a_bar_2: Complex64::new(0.0, 0.0),
            q_bar_1: 0.0,
            q_bar_2: 0.0,
            p_bar_1: 0.0,
            p_bar_2: 0.0,
        }
    }
}

/// A drift/diffusion pair (A, D) defining dC/dt = A C + C A^T + D, plus the
/// physical identity of each mode slot.
#[derive(Clone, Debug)]
pub struct DriftDiffusion {
    a: DMatrix<f64>,
    d: DMatrix<f64>,
    mode_labels: Vec<String>,
}

impl DriftDiffusion {
    /// Validates dimensions and that `d` is symmetric positive semidefinite
    /// to 1e-12 (relative).
    pub fn new(a: DMatrix<f64>, d: DMatrix<f64>, mode_labels: Vec<String>) -> Result<Self> {
        let n = mode_labels.len();
        if a.shape() != (2 * n, 2 * n) || d.shape() != (2 * n, 2 * n) {
            return Err(Error::InvalidInput(format!(
                "drift/diffusion must be {0}x{0} for {n} modes",
                2 * n
            )));
        }
        if a.iter().chain(d.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "drift/diffusion entries must be finite".into(),
            ));
        }
        let scale = d.amax().max(1.0);
        if (&d - d.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidInput("diffusion matrix is not symmetric".into()));
        }
        let sym = (&d + d.transpose()) * 0.5;
        let min_eig = sym
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -1e-12 * scale {
            return Err(Error::InvalidInput(format!(
                "diffusion matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})"
            )));
        }
        Ok(Self {
            a,
            d: sym,
            mode_labels,
        })
    }

    pub fn drift(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn diffusion(&self) -> &DMatrix<f64> {
        &self.d
    }

    pub fn mode_labels(&self) -> &[String] {
        &self.mode_labels
    }

    pub fn n_modes(&self) -> usize {
        self.mode_labels.len()
    }

    pub fn dim(&self) -> usize {
        2 * self.mode_labels.len()
    }
}

/// Drift and diffusion of the passive two-cavity network over
/// (x1, y1, x2, y2). The fiber couples like quadratures of the two cavities
/// with strength kappa*sqrt(eta); its two directional thermal inputs and the
/// loss port set the diffusion:
///   D = kappa [ ((1+eta) n_in + 1) I + sqrt(eta) (2 n_in + 1) Sigma ]
/// with Sigma the like-quadrature swap.
pub fn build_simplified(params: &SimplifiedParams) -> Result<DriftDiffusion> {
    params.validate()?;
    let (k, w) = (params.kappa, params.omega_c);
    let se = params.eta.sqrt();
    let mut a = DMatrix::zeros(4, 4);
    for j in 0..2 {
        let o = 2 * j;
        a[(o, o + 1)] = w;
        a[(o + 1, o)] = -w;
        a[(o, o)] = -k;
        a[(o + 1, o + 1)] = -k;
        let other = 2 * (1 - j);
        a[(o, other)] = -k * se;
        a[(o + 1, other + 1)] = -k * se;
    }
    let diag = k * ((1.0 + params.eta) * params.n_in + 1.0);
    let cross = k * se * (2.0 * params.n_in + 1.0);
    let mut d = DMatrix::zeros(4, 4);
    for q in 0..2 {
        d[(q, q)] = diag;
        d[(q + 2, q + 2)] = diag;
        d[(q, q + 2)] = cross;
        d[(q + 2, q)] = cross;
    }
    DriftDiffusion::new(a, d, vec!["O1".into(), "O2".into()])
}

/// Residual of the classical fixed-point equations at a symmetric amplitude.
pub fn optical_residual(params: &FullParams, a: Complex64) -> f64 {
    let q = params.g0 * a.norm_sqr() / params.omega_m;
    let delta = params.delta0 + params.g0 * q;
    (Complex64::new(0.0, delta) * a + params.drive_e
        - params.kappa * a
        - params.kappa * params.eta.sqrt() * a)
        .norm()
}

fn mean_field_from_amplitude(params: &FullParams, a: Complex64) -> MeanFieldState {
    let q = params.g0 * a.norm_sqr() / params.omega_m;
    MeanFieldState {
        a_bar_1: a,
        a_bar_2: a,
        q_bar_1: q,
        q_bar_2: q,
        p_bar_1: 0.0,
        p_bar_2: 0.0,
    }
}

/// Classical mean-field fixed point of the driven network. The symmetric
/// solution (equal amplitudes in both cavities) is found by damped
/// fixed-point iteration on
///   a = E / (kappa (1 + sqrt(eta)) - i (delta0 + g0^2 |a|^2 / omega_m)),
/// falling back to integrating the classical equations of motion when the
/// iteration stalls. Residual tolerance: 1e-12 * max(E, 1).
pub fn mean_field(params: &FullParams) -> Result<MeanFieldState> {
    params.validate()?;
    if params.drive_e == 0.0 {
        return Ok(MeanFieldState::zero());
    }
    let tol = 1e-12 * params.drive_e.max(1.0);
    let loss = params.kappa * (1.0 + params.eta.sqrt());
    let step = |a: Complex64| -> Complex64 {
        let q = params.g0 * a.norm_sqr() / params.omega_m;
        let delta = params.delta0 + params.g0 * q;
        params.drive_e / Complex64::new(loss, -delta)
    };
    let mut a = params.drive_e / Complex64::new(loss, -params.delta0);
    const DAMPING: f64 = 0.5;
    const MAX_ITERS: usize = 20_000;
    for _ in 0..MAX_ITERS {
        if optical_residual(params, a) <= tol {
            return Ok(mean_field_from_amplitude(params, a));
        }
        a = a * (1.0 - DAMPING) + step(a) * DAMPING;
    }
    // Fallback: ride the classical dynamics into the attractor, then polish.
    let horizon = 10.0 / params.gamma.min(params.kappa);
    let dt = params.default_timestep();
    let settled = crate::dynamics::evolve_mean(params, &MeanFieldState::zero(), horizon, dt)?;
    a = 0.5 * (settled.a_bar_1 + settled.a_bar_2);
    let mut last = optical_residual(params, a);
    for _ in 0..MAX_ITERS {
        if last <= tol {
            return Ok(mean_field_from_amplitude(params, a));
        }
        a = a * (1.0 - DAMPING) + step(a) * DAMPING;
        last = optical_residual(params, a);
    }
    Err(Error::Convergence(format!(
        "mean-field iteration stalled at residual {last:.6e} (tolerance {tol:.6e})"
    )))
}

/// Recheck tolerance for a caller-supplied mean field.
fn mean_field_recheck_tol(params: &FullParams) -> f64 {
    1e-9 * params.drive_e.max(1.0)
}

/// Linearized fluctuation dynamics around a mean-field fixed point: an 8x8
/// system over (q1, p1, x1, y1, q2, p2, x2, y2) with labels M1, O1, M2, O2.
/// Per cavity j: effective detuning Delta_j = delta0 + g0 q_j and effective
/// couplings (G_R, G_I) = sqrt(2) g0 (Re a_j, Im a_j); the fiber couples the
/// optical quadratures exactly as in the passive network.
pub fn build_full_linearized(params: &FullParams, mf: &MeanFieldState) -> Result<DriftDiffusion> {
    params.validate()?;
    let tol = mean_field_recheck_tol(params);
    let se = params.eta.sqrt();
    // Stale-input check: the supplied amplitudes must still be a fixed point.
    for (a, other, q, p) in [
        (mf.a_bar_1, mf.a_bar_2, mf.q_bar_1, mf.p_bar_1),
        (mf.a_bar_2, mf.a_bar_1, mf.q_bar_2, mf.p_bar_2),
    ] {
        let delta = params.delta0 + params.g0 * q;
        let ra = (Complex64::new(0.0, delta) * a + params.drive_e
            - params.kappa * a
            - params.kappa * se * other)
            .norm();
        let rq = (params.omega_m * p).abs();
        let rp = (-params.omega_m * q - params.gamma * p + params.g0 * a.norm_sqr()).abs();
        if ra.max(rq).max(rp) > tol {
            return Err(Error::InvalidInput(format!(
                "mean field is not a fixed point of these parameters \
                 (residual {:.6e} > {tol:.6e})",
                ra.max(rq).max(rp)
            )));
        }
    }

    let (wm, g, k) = (params.omega_m, params.gamma, params.kappa);
    let mut a = DMatrix::zeros(8, 8);
    for (j, (ab, qb)) in [(mf.a_bar_1, mf.q_bar_1), (mf.a_bar_2, mf.q_bar_2)]
        .iter()
        .enumerate()
    {
        let delta = params.delta0 + params.g0 * qb;
        let gr = std::f64::consts::SQRT_2 * params.g0 * ab.re;
        let gi = std::f64::consts::SQRT_2 * params.g0 * ab.im;
        let (q, p, x, y) = (4 * j, 4 * j + 1, 4 * j + 2, 4 * j + 3);
        a[(q, p)] = wm;
        a[(p, q)] = -wm;
        a[(p, p)] = -g;
        a[(p, x)] = gr;
        a[(p, y)] = gi;
        a[(x, x)] = -k;
        a[(x, y)] = -delta;
        a[(x, q)] = -gi;
        a[(y, x)] = delta;
        a[(y, y)] = -k;
        a[(y, q)] = gr;
        let (xo, yo) = (4 * (1 - j) + 2, 4 * (1 - j) + 3);
        a[(x, xo)] = -k * se;
        a[(y, yo)] = -k * se;
    }

    let mut d = DMatrix::zeros(8, 8);
    let opt_diag = k * ((1.0 + params.eta) * params.n_in + 1.0);
    let opt_cross = k * se * (2.0 * params.n_in + 1.0);
    for j in 0..2 {
        d[(4 * j + 1, 4 * j + 1)] = g * (2.0 * params.n_m + 1.0);
        d[(4 * j + 2, 4 * j + 2)] = opt_diag;
        d[(4 * j + 3, 4 * j + 3)] = opt_diag;
    }
    for q in 0..2 {
        d[(2 + q, 6 + q)] = opt_cross;
        d[(6 + q, 2 + q)] = opt_cross;
    }
    DriftDiffusion::new(
        a,
        d,
        vec!["M1".into(), "O1".into(), "M2".into(), "O2".into()],
    )
}

/// Spectral abscissa test: the system is stable iff the largest real part of
/// the drift eigenvalues is below -1e-12.
pub fn stability(dd: &DriftDiffusion) -> (bool, f64) {
    let eig = dd.drift().complex_eigenvalues();
    let max_re = eig.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    (max_re < -1e-12, max_re)
}
