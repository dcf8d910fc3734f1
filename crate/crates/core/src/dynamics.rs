//! Steady-state and transient solutions of the covariance equation
//! dC/dt = A C + C A^T + D and of the classical mean-field equations.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;
use crate::model::{stability, DriftDiffusion, FullParams, MeanFieldState};

/// Physicality slack allowed for intermediate states of a time integration;
/// looser than the static bound to absorb accumulated integration error.
const TRAJECTORY_SLACK: f64 = 1e-6;

/// Covariance snapshots along a time integration. Times are in the inverse
/// units of the drift/diffusion rates (seconds when rates are rad/s).
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CovarianceMatrix>,
}

/// Steady covariance of a stable system: the solution of
/// A C + C A^T + D = 0 via the dense vectorized linear system
/// (I (x) A + A (x) I) vec(C) = -vec(D).
pub fn solve_steady(dd: &DriftDiffusion) -> Result<CovarianceMatrix> {
    let (stable, max_re) = stability(dd);
    if !stable {
        return Err(Error::NoSteadyState(format!(
            "drift spectral abscissa {max_re:.6e} is not negative"
        )));
    }
    let n = dd.dim();
    let id = DMatrix::<f64>::identity(n, n);
    let k = id.kronecker(dd.drift()) + dd.drift().kronecker(&id);
    let rhs = DVector::from_iterator(n * n, dd.diffusion().iter().map(|v| -v));
    let lu = k.lu();
    let sol = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular vectorized Lyapunov system".into()))?;
    let c = DMatrix::from_column_slice(n, n, sol.as_slice());
    let c = (&c + c.transpose()) * 0.5;
    let residual = (dd.drift() * &c + &c * dd.drift().transpose() + dd.diffusion()).norm();
    let bound = 1e-10 * dd.diffusion().norm().max(1.0);
    if residual > bound {
        return Err(Error::Numerical(format!(
            "steady-state residual {residual:.6e} exceeds bound {bound:.6e}"
        )));
    }
    let cov = CovarianceMatrix::new(c)?;
    cov.assert_physical("steady state")?;
    Ok(cov)
}

fn rk4_step(a: &DMatrix<f64>, d: &DMatrix<f64>, c: &DMatrix<f64>, dt: f64) -> DMatrix<f64> {
    let f = |m: &DMatrix<f64>| a * m + m * a.transpose() + d;
    let k1 = f(c);
    let k2 = f(&(c + &k1 * (dt / 2.0)));
    let k3 = f(&(c + &k2 * (dt / 2.0)));
    let k4 = f(&(c + &k3 * dt));
    c + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

/// Fixed-step RK4 integration of the covariance equation from `c0`, with a
/// snapshot recorded every `sample_every` steps (and always at t = 0 and
/// t = t_final). Each step is symmetrized; sampled states are checked for
/// physicality.
pub fn evolve_covariance(
    dd: &DriftDiffusion,
    c0: &CovarianceMatrix,
    t_final: f64,
    dt: f64,
    sample_every: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!("dt must be > 0 (got {dt})")));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "t_final must be >= 0 (got {t_final})"
        )));
    }
    if sample_every == 0 {
        return Err(Error::InvalidInput("sample_every must be >= 1".into()));
    }
    if c0.dim() != dd.dim() {
        return Err(Error::InvalidInput(format!(
            "initial state has dimension {} but the system has {}",
            c0.dim(),
            dd.dim()
        )));
    }
    c0.assert_physical("initial state")?;

    let expected = (t_final / dt).ceil() as usize / sample_every + 2;
    let mut times = Vec::with_capacity(expected);
    let mut states = Vec::with_capacity(expected);
    times.push(0.0);
    states.push(c0.clone());

    let mut c = c0.matrix().clone();
    let mut t = 0.0;
    let mut step: usize = 0;
    while t < t_final {
        let remaining = t_final - t;
        let h = dt.min(remaining);
        c = rk4_step(dd.drift(), dd.diffusion(), &c, h);
        c = (&c + c.transpose()) * 0.5;
        step += 1;
        // Full steps land on exact multiples of dt to avoid accumulation drift.
        t = if remaining <= dt { t_final } else { step as f64 * dt };
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::Blowup(format!(
                "non-finite covariance at t = {t:.6e}; reduce dt"
            )));
        }
        if step % sample_every == 0 || t >= t_final {
            let snap = CovarianceMatrix::new(c.clone())?;
            let min_nu = snap.min_symplectic_eigenvalue()?;
            if min_nu < 0.5 - TRAJECTORY_SLACK {
                return Err(Error::Blowup(format!(
                    "non-physical state at t = {t:.6e} (min symplectic eigenvalue \
                     {min_nu:.6e}); reduce dt"
                )));
            }
            times.push(t);
            states.push(snap);
        }
    }
    Ok(Trajectory { times, states })
}

/// Classical mean-field equations of motion as a flat 8-vector
/// (q1, p1, Re a1, Im a1, q2, p2, Re a2, Im a2).
fn mean_rhs(p: &FullParams, y: &[f64; 8]) -> [f64; 8] {
    let se = p.eta.sqrt();
    let mut dy = [0.0; 8];
    for j in 0..2 {
        let o = 4 * j;
        let oo = 4 * (1 - j);
        let (q, pm, ar, ai) = (y[o], y[o + 1], y[o + 2], y[o + 3]);
        let (br, bi) = (y[oo + 2], y[oo + 3]);
        let delta = p.delta0 + p.g0 * q;
        dy[o] = p.omega_m * pm;
        dy[o + 1] = -p.omega_m * q - p.gamma * pm + p.g0 * (ar * ar + ai * ai);
        // da/dt = i delta a + E - kappa a - kappa sqrt(eta) a_other
        dy[o + 2] = -delta * ai + p.drive_e - p.kappa * ar - p.kappa * se * br;
        dy[o + 3] = delta * ar - p.kappa * ai - p.kappa * se * bi;
    }
    dy
}

/// Fixed-step RK4 integration of the classical mean-field equations.
pub fn evolve_mean(
    params: &FullParams,
    initial: &MeanFieldState,
    t_final: f64,
    dt: f64,
) -> Result<MeanFieldState> {
    params.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!("dt must be > 0 (got {dt})")));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "t_final must be >= 0 (got {t_final})"
        )));
    }
    let mut y = [
        initial.q_bar_1,
        initial.p_bar_1,
        initial.a_bar_1.re,
        initial.a_bar_1.im,
        initial.q_bar_2,
        initial.p_bar_2,
        initial.a_bar_2.re,
        initial.a_bar_2.im,
    ];
    let mut t = 0.0;
    let mut step: usize = 0;
    while t < t_final {
        let remaining = t_final - t;
        let h = dt.min(remaining);
        let k1 = mean_rhs(params, &y);
        let mut y2 = y;
        for i in 0..8 {
            y2[i] = y[i] + 0.5 * h * k1[i];
        }
        let k2 = mean_rhs(params, &y2);
        for i in 0..8 {
            y2[i] = y[i] + 0.5 * h * k2[i];
        }
        let k3 = mean_rhs(params, &y2);
        for i in 0..8 {
            y2[i] = y[i] + h * k3[i];
        }
        let k4 = mean_rhs(params, &y2);
        for i in 0..8 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Blowup(format!(
                "non-finite mean field at t = {t:.6e}; reduce dt"
            )));
        }
        step += 1;
        t = if remaining <= dt { t_final } else { step as f64 * dt };
    }
    Ok(MeanFieldState {
        a_bar_1: Complex64::new(y[2], y[3]),
        a_bar_2: Complex64::new(y[6], y[7]),
        q_bar_1: y[0],
        q_bar_2: y[4],
        p_bar_1: y[1],
        p_bar_2: y[5],
    })
}
