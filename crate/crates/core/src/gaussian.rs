//! Covariance-matrix algebra for Gaussian continuous-variable states:
//! symplectic spectra, partial transposition, Gaussian discord and
//! logarithmic negativity, basis rotations and mode reduction.
//!
//! Conventions: hbar = 1, quadrature ordering (x1, y1, ..., xn, yn) with
//! x = (a' + a)/sqrt(2), y = i(a' - a)/sqrt(2); C_ij = <v_i v_j + v_j v_i>/2.
//! The vacuum covariance is I/2. Two-mode invariants are scaled so the vacuum
//! gives I1 = I2 = I4 = 1 (I1 = 4 Det C1 etc.), and the corresponding
//! symplectic eigenvalues are the 2*nu-scaled ones with entanglement
//! threshold at 1. All logarithms are base 2.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative tolerance for the symmetry check on covariance matrices.
const SYMMETRY_TOL: f64 = 1e-12;
/// Physicality bound: every symplectic eigenvalue must be >= 1/2 - this slack.
pub const PHYSICALITY_SLACK: f64 = 1e-9;
/// Matching tolerance for the +/- eigenvalue pair structure of Omega*C.
const PAIR_TOL: f64 = 1e-8;
/// Below this Frobenius norm the cross block is treated as exactly zero and
/// the state as a product state.
const PRODUCT_TOL: f64 = 1e-12;

/// Symmetrized second moments of the quadrature fluctuations of `n_modes`
/// bosonic modes, stored as a 2n x 2n symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    n_modes: usize,
    m: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Validates shape, finiteness and symmetry (relative tolerance 1e-12),
    /// then stores the exactly symmetrized matrix.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let (r, c) = m.shape();
        if r != c || r == 0 || r % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "covariance matrix must be square with even dimension, got {r}x{c}"
            )));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "covariance matrix has non-finite entries".into(),
            ));
        }
        let scale = m.amax().max(1.0);
        let asym = (&m - m.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::InvalidInput(format!(
                "covariance matrix is not symmetric (max asymmetry {asym:.3e})"
            )));
        }
        let sym = (&m + m.transpose()) * 0.5;
        Ok(Self {
            n_modes: r / 2,
            m: sym,
        })
    }

    /// Vacuum state of `n_modes` modes: I/2.
    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            n_modes,
            m: DMatrix::identity(2 * n_modes, 2 * n_modes) * 0.5,
        }
    }

    /// Product of thermal states with the given mean occupations.
    pub fn thermal(occupations: &[f64]) -> Result<Self> {
        if occupations.is_empty() {
            return Err(Error::InvalidInput("need at least one mode".into()));
        }
        if occupations.iter().any(|n| !n.is_finite() || *n < 0.0) {
            return Err(Error::InvalidInput(
                "thermal occupations must be finite and >= 0".into(),
            ));
        }
        let n = occupations.len();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for (k, nbar) in occupations.iter().enumerate() {
            m[(2 * k, 2 * k)] = nbar + 0.5;
            m[(2 * k + 1, 2 * k + 1)] = nbar + 0.5;
        }
        Ok(Self { n_modes: n, m })
    }

    /// Two-mode squeezed vacuum with squeezing parameter `r`: diagonal blocks
    /// cosh(2r)/2 * I, off-diagonal block sinh(2r)/2 * diag(1, -1).
    pub fn two_mode_squeezed(r: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::InvalidInput("squeezing parameter must be finite".into()));
        }
        let ch = 0.5 * (2.0 * r).cosh();
        let sh = 0.5 * (2.0 * r).sinh();
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[
                ch, 0.0, sh, 0.0, //
                0.0, ch, 0.0, -sh, //
                sh, 0.0, ch, 0.0, //
                0.0, -sh, 0.0, ch,
            ],
        );
        Ok(Self { n_modes: 2, m })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Matrix dimension (2 * n_modes).
    pub fn dim(&self) -> usize {
        2 * self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn min_symplectic_eigenvalue(&self) -> Result<f64> {
        let nus = symplectic_eigenvalues(self)?;
        Ok(nus[0])
    }

    /// A state is physical iff every symplectic eigenvalue is >= 1/2 - 1e-9.
    pub fn is_physical(&self) -> Result<bool> {
        Ok(self.min_symplectic_eigenvalue()? >= 0.5 - PHYSICALITY_SLACK)
    }

    pub(crate) fn assert_physical(&self, context: &str) -> Result<()> {
        let min = self.min_symplectic_eigenvalue()?;
        if min < 0.5 - PHYSICALITY_SLACK {
            return Err(Error::Unphysical(format!(
                "{context}: min symplectic eigenvalue {min:.6e} < 1/2"
            )));
        }
        Ok(())
    }
}

/// The symplectic form: block-diagonal with 2x2 blocks [[0, 1], [-1, 0]].
#[derive(Clone, Debug)]
pub struct SymplecticForm {
    n_modes: usize,
    m: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn new(n_modes: usize) -> Self {
        let mut m = DMatrix::zeros(2 * n_modes, 2 * n_modes);
        for k in 0..n_modes {
            m[(2 * k, 2 * k + 1)] = 1.0;
            m[(2 * k + 1, 2 * k)] = -1.0;
        }
        Self { n_modes, m }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }
}

/// An ordered split of the modes of a state into two parties.
#[derive(Clone, Debug)]
pub struct BipartitionSpec {
    pub party_a: Vec<usize>,
    pub party_b: Vec<usize>,
}

impl BipartitionSpec {
    pub fn new(party_a: Vec<usize>, party_b: Vec<usize>) -> Self {
        Self { party_a, party_b }
    }

    /// Both parties non-empty, disjoint, and together covering exactly the
    /// modes 0..n_modes.
    pub fn validate_covering(&self, n_modes: usize) -> Result<()> {
        if self.party_a.is_empty() || self.party_b.is_empty() {
            return Err(Error::InvalidInput("bipartition parties must be non-empty".into()));
        }
        let mut seen = vec![false; n_modes];
        for &i in self.party_a.iter().chain(self.party_b.iter()) {
            if i >= n_modes {
                return Err(Error::InvalidInput(format!(
                    "bipartition mode index {i} out of range for {n_modes} modes"
                )));
            }
            if seen[i] {
                return Err(Error::InvalidInput(format!(
                    "bipartition lists mode {i} twice"
                )));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidInput(
                "bipartition must cover all modes of the state".into(),
            ));
        }
        Ok(())
    }
}

/// Scaled two-mode symplectic invariants: I1 = 4 Det C1, I2 = 4 Det C2,
/// I3 = 4 Det C3, I4 = 16 Det C, I_delta = I1 + I2 + 2 I3.
#[derive(Clone, Copy, Debug)]
pub struct TwoModeInvariants {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    pub i_delta: f64,
}

impl TwoModeInvariants {
    /// I_delta of the partially transposed state: I1 + I2 - 2 I3.
    pub fn i_delta_tilde(&self) -> f64 {
        self.i1 + self.i2 - 2.0 * self.i3
    }
}

/// Symplectic eigenvalues on matrices that are structurally valid covariance
/// matrices but need not be wrapped (e.g. partially transposed ones).
fn symplectic_eigenvalues_raw(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = m.nrows() / 2;
    let oc = SymplecticForm::new(n).matrix() * m;
    let eig = oc.complex_eigenvalues();
    let mut mods: Vec<f64> = eig.iter().map(|z| z.norm()).collect();
    mods.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut nus = Vec::with_capacity(n);
    for k in 0..n {
        let (lo, hi) = (mods[2 * k], mods[2 * k + 1]);
        if hi - lo > PAIR_TOL * hi.max(1.0) {
            return Err(Error::Degenerate(format!(
                "eigenvalues of Omega*C do not pair up (moduli {lo:.12e} vs {hi:.12e})"
            )));
        }
        nus.push(0.5 * (lo + hi));
    }
    Ok(nus)
}

/// Symplectic eigenvalues of a covariance matrix, ascending. These are the
/// moduli of the (purely imaginary, +/- paired) eigenvalues of Omega*C;
/// every physical state gives values >= 1/2.
pub fn symplectic_eigenvalues(c: &CovarianceMatrix) -> Result<Vec<f64>> {
    symplectic_eigenvalues_raw(c.matrix())
}

fn require_two_modes(c: &CovarianceMatrix, what: &str) -> Result<()> {
    if c.n_modes() != 2 {
        return Err(Error::InvalidInput(format!(
            "{what} requires a two-mode state, got {} modes",
            c.n_modes()
        )));
    }
    Ok(())
}

fn det2(m: &DMatrix<f64>, r0: usize, c0: usize) -> f64 {
    m[(r0, c0)] * m[(r0 + 1, c0 + 1)] - m[(r0, c0 + 1)] * m[(r0 + 1, c0)]
}

/// The five scaled invariants of a two-mode covariance matrix.
pub fn two_mode_invariants(c: &CovarianceMatrix) -> Result<TwoModeInvariants> {
    require_two_modes(c, "two_mode_invariants")?;
    let m = c.matrix();
    let i1 = 4.0 * det2(m, 0, 0);
    let i2 = 4.0 * det2(m, 2, 2);
    let i3 = 4.0 * det2(m, 0, 2);
    let i4 = 16.0 * m.determinant();
    Ok(TwoModeInvariants {
        i1,
        i2,
        i3,
        i4,
        i_delta: i1 + i2 + 2.0 * i3,
    })
}

/// 2*nu-scaled symplectic eigenvalues (lambda_minus, lambda_plus) from the
/// invariants: lambda_pm = sqrt[(I_delta pm sqrt(I_delta^2 - 4 I4)) / 2].
/// Small negative discriminants (>= -1e-9) are clamped to zero.
pub fn symplectic_eigenvalues_two_mode(inv: &TwoModeInvariants) -> Result<(f64, f64)> {
    let disc = inv.i_delta * inv.i_delta - 4.0 * inv.i4;
    if disc < -PHYSICALITY_SLACK {
        return Err(Error::Unphysical(format!(
            "negative symplectic discriminant {disc:.6e}"
        )));
    }
    let root = disc.max(0.0).sqrt();
    let lm = (0.5 * (inv.i_delta - root)).max(0.0).sqrt();
    let lp = (0.5 * (inv.i_delta + root)).max(0.0).sqrt();
    Ok((lm, lp))
}

/// The entropic function f(x) = ((x+1)/2) log2((x+1)/2) - ((x-1)/2) log2((x-1)/2).
/// Arguments in [1 - 1e-9, 1] clamp to f(1) = 0; smaller ones are a domain error.
pub fn entropy_f(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 1.0 - PHYSICALITY_SLACK {
        return Err(Error::InvalidInput(format!(
            "entropy argument {x} below domain [1, inf)"
        )));
    }
    if x <= 1.0 {
        return Ok(0.0);
    }
    let a = 0.5 * (x + 1.0);
    let b = 0.5 * (x - 1.0);
    let bterm = if b > 0.0 { b * b.log2() } else { 0.0 };
    Ok(a * a.log2() - bterm)
}

/// Gaussian discord D(B|A) of a two-mode state, with A the measured party:
/// f(sqrt(I1)) - f(lambda_minus) - f(lambda_plus) + f(sqrt(W)), where W has
/// two branches depending on the invariants. Product states return exactly 0.
pub fn gaussian_discord(c: &CovarianceMatrix, measured_party: usize) -> Result<f64> {
    require_two_modes(c, "gaussian_discord")?;
    if measured_party > 1 {
        return Err(Error::InvalidInput(format!(
            "measured_party must be 0 or 1, got {measured_party}"
        )));
    }
    c.assert_physical("gaussian_discord")?;
    // I1 must belong to the measured party; swap mode roles if needed.
    let oriented;
    let state = if measured_party == 1 {
        oriented = reduce_modes(c, &[1, 0])?;
        &oriented
    } else {
        c
    };
    let inv = two_mode_invariants(state)?;
    let cross_norm = state.matrix().view((0, 2), (2, 2)).norm();
    if cross_norm < PRODUCT_TOL {
        return Ok(0.0);
    }
    let (lm, lp) = symplectic_eigenvalues_two_mode(&inv)?;
    let (i1, i2, i3, i4) = (inv.i1, inv.i2, inv.i3, inv.i4);
    let lhs = (i4 - i2 * i1) * (i4 - i2 * i1);
    let rhs = (1.0 + i1) * i3 * i3 * (i2 + i4);
    let w = if lhs <= rhs {
        let s = (i3 * i3 + (i1 - 1.0) * (i4 - i2)).max(0.0);
        (2.0 * i3 * i3 + (i1 - 1.0) * (i4 - i2) + 2.0 * i3.abs() * s.sqrt())
            / ((i1 - 1.0) * (i1 - 1.0))
    } else {
        let s = (i3.powi(4) + (i4 - i1 * i2) * (i4 - i1 * i2)
            - 2.0 * i3 * i3 * (i4 + i1 * i2))
            .max(0.0);
        (i1 * i2 - i3 * i3 + i4 - s.sqrt()) / (2.0 * i1)
    };
    if !w.is_finite() {
        return Err(Error::Numerical(
            "conditional-covariance invariant W is not finite".into(),
        ));
    }
    // At pure states and on the branch boundary the entropy arguments equal 1
    // up to a cancellation error of order sqrt(machine epsilon), and f has an
    // infinite slope at 1, so that noise would be amplified into the result.
    // Snap a tight window around 1 (physicality was already checked).
    let boundary = |x: f64| if (x - 1.0).abs() <= 1e-6 { 1.0 } else { x };
    let d = entropy_f(i1.sqrt())? - entropy_f(boundary(lm))? - entropy_f(boundary(lp))?
        + entropy_f(boundary(w.sqrt()))?;
    if d < -PHYSICALITY_SLACK {
        return Err(Error::Numerical(format!(
            "discord evaluated to {d:.6e} < 0 beyond tolerance"
        )));
    }
    Ok(d.max(0.0))
}

/// Partial transposition: flips the sign of the momentum quadrature of each
/// listed mode (P C P with P the corresponding diagonal sign matrix).
pub fn partial_transpose(c: &CovarianceMatrix, transposed_modes: &[usize]) -> Result<CovarianceMatrix> {
    let n = c.n_modes();
    let mut flip = vec![false; n];
    for &i in transposed_modes {
        if i >= n {
            return Err(Error::InvalidInput(format!(
                "mode index {i} out of range for {n} modes"
            )));
        }
        if flip[i] {
            return Err(Error::InvalidInput(format!("mode index {i} listed twice")));
        }
        flip[i] = true;
    }
    let mut m = c.matrix().clone();
    for (i, &f) in flip.iter().enumerate() {
        if !f {
            continue;
        }
        let y = 2 * i + 1;
        for k in 0..m.nrows() {
            m[(y, k)] = -m[(y, k)];
        }
        for k in 0..m.nrows() {
            m[(k, y)] = -m[(k, y)];
        }
    }
    CovarianceMatrix::new(m)
}

/// Two-mode logarithmic negativity E = max{0, -log2(lambda_tilde_minus)} with
/// lambda_tilde_minus the smaller 2*nu-scaled symplectic eigenvalue of the
/// partial transpose, obtained from the invariants with I3 -> -I3.
pub fn log_negativity_two_mode(c: &CovarianceMatrix) -> Result<f64> {
    require_two_modes(c, "log_negativity_two_mode")?;
    c.assert_physical("log_negativity_two_mode")?;
    let inv = two_mode_invariants(c)?;
    let pt = TwoModeInvariants {
        i1: inv.i1,
        i2: inv.i2,
        i3: -inv.i3,
        i4: inv.i4,
        i_delta: inv.i_delta_tilde(),
    };
    let (lm, _) = symplectic_eigenvalues_two_mode(&pt)?;
    Ok((-lm.log2()).max(0.0))
}

/// Logarithmic negativity across an arbitrary bipartition that covers all
/// modes: E = sum_j max{0, -log2(2 nu_tilde_j)} over the symplectic spectrum
/// of the partial transpose. For bipartitions beyond 1x1 this is a lower
/// bound on the entanglement, not a faithful measure.
pub fn log_negativity_bipartition(c: &CovarianceMatrix, partition: &BipartitionSpec) -> Result<f64> {
    partition.validate_covering(c.n_modes())?;
    c.assert_physical("log_negativity_bipartition")?;
    let pt = partial_transpose(c, &partition.party_a)?;
    let nus = symplectic_eigenvalues_raw(pt.matrix())?;
    Ok(nus
        .iter()
        .map(|nu| (-(2.0 * nu).log2()).max(0.0))
        .sum())
}

/// Principal submatrix on the kept modes, in the order given. Repeated
/// indices are rejected; order permutations are allowed.
pub fn reduce_modes(c: &CovarianceMatrix, keep: &[usize]) -> Result<CovarianceMatrix> {
    let n = c.n_modes();
    if keep.is_empty() {
        return Err(Error::InvalidInput("keep list must be non-empty".into()));
    }
    let mut seen = vec![false; n];
    for &i in keep {
        if i >= n {
            return Err(Error::InvalidInput(format!(
                "mode index {i} out of range for {n} modes"
            )));
        }
        if seen[i] {
            return Err(Error::InvalidInput(format!("mode index {i} listed twice")));
        }
        seen[i] = true;
    }
    let k = keep.len();
    let mut m = DMatrix::zeros(2 * k, 2 * k);
    for (a, &i) in keep.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate() {
            for qa in 0..2 {
                for qb in 0..2 {
                    m[(2 * a + qa, 2 * b + qb)] = c.matrix()[(2 * i + qa, 2 * j + qb)];
                }
            }
        }
    }
    CovarianceMatrix::new(m)
}

/// Congruence transform C -> S C S^T by a symplectic matrix S
/// (S Omega S^T = Omega to 1e-10). Symplectic eigenvalues are invariant.
pub fn rotate_basis(c: &CovarianceMatrix, s: &DMatrix<f64>) -> Result<CovarianceMatrix> {
    let d = c.dim();
    if s.nrows() != d || s.ncols() != d {
        return Err(Error::InvalidInput(format!(
            "rotation must be {d}x{d}, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    let omega = SymplecticForm::new(c.n_modes());
    let dev = (s * omega.matrix() * s.transpose() - omega.matrix()).amax();
    if dev > 1e-10 {
        return Err(Error::InvalidInput(format!(
            "matrix is not symplectic (max |S Omega S^T - Omega| = {dev:.3e})"
        )));
    }
    CovarianceMatrix::new(s * c.matrix() * s.transpose())
}
