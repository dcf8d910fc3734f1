//! Parameter sweeps, entanglement-threshold search, the +/- collective-mode
//! decomposition, and ready-to-plot dataset assembly.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde_json::json;

use crate::dynamics::{evolve_covariance, solve_steady};
use crate::error::{Error, Result};
use crate::gaussian::{
    gaussian_discord, log_negativity_bipartition, log_negativity_two_mode, reduce_modes,
    rotate_basis, BipartitionSpec, CovarianceMatrix,
};
use crate::model::{
    build_full_linearized, build_simplified, mean_field, stability, DriftDiffusion, FullParams,
    SimplifiedParams,
};

/// Entanglement-positivity cutoff for threshold searches: negativities below
/// this sit in the solver's residual noise floor and count as zero.
pub const ENTANGLEMENT_CUTOFF: f64 = 1e-8;

/// Which model a sweep or figure runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Simplified,
    Full,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Simplified => write!(f, "simplified"),
            ModelKind::Full => write!(f, "full"),
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simplified" => Ok(ModelKind::Simplified),
            "full" => Ok(ModelKind::Full),
            other => Err(Error::InvalidInput(format!(
                "unknown model '{other}' (expected 'simplified' or 'full')"
            ))),
        }
    }
}

/// Parameter set for either model.
#[derive(Clone, Copy, Debug)]
pub enum ModelParams {
    Simplified(SimplifiedParams),
    Full(FullParams),
}

impl ModelParams {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Simplified(_) => ModelKind::Simplified,
            ModelParams::Full(_) => ModelKind::Full,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelParams::Simplified(p) => p.validate(),
            ModelParams::Full(p) => p.validate(),
        }
    }

    /// Parameter names recognized by `set` for this model.
    pub fn variable_names(&self) -> &'static [&'static str] {
        match self {
            ModelParams::Simplified(_) => &["omega_c", "kappa", "eta", "n_in"],
            ModelParams::Full(_) => &[
                "omega_m", "gamma", "delta0", "kappa", "g0", "drive_e", "eta", "n_m", "n_in",
            ],
        }
    }

    /// Returns a copy with the named parameter set to `value`.
    pub fn with_value(&self, name: &str, value: f64) -> Result<ModelParams> {
        let mut out = *self;
        match &mut out {
            ModelParams::Simplified(p) => match name {
                "omega_c" => p.omega_c = value,
                "kappa" => p.kappa = value,
                "eta" => p.eta = value,
                "n_in" => p.n_in = value,
                other => {
                    return Err(Error::InvalidInput(format!(
                        "unknown simplified-model parameter '{other}'"
                    )))
                }
            },
            ModelParams::Full(p) => match name {
                "omega_m" => p.omega_m = value,
                "gamma" => p.gamma = value,
                "delta0" => p.delta0 = value,
                "kappa" => p.kappa = value,
                "g0" => p.g0 = value,
                "drive_e" => p.drive_e = value,
                "eta" => p.eta = value,
                "n_m" => p.n_m = value,
                "n_in" => p.n_in = value,
                other => {
                    return Err(Error::InvalidInput(format!(
                        "unknown full-model parameter '{other}'"
                    )))
                }
            },
        }
        Ok(out)
    }

    pub fn kappa(&self) -> f64 {
        match self {
            ModelParams::Simplified(p) => p.kappa,
            ModelParams::Full(p) => p.kappa,
        }
    }

    pub fn default_timestep(&self) -> f64 {
        match self {
            ModelParams::Simplified(p) => p.default_timestep(),
            ModelParams::Full(p) => p.default_timestep(),
        }
    }

    /// Initial condition of transient runs: cavities in vacuum, and for the
    /// full model the mirrors thermal at the bath occupation.
    pub fn initial_state(&self) -> Result<CovarianceMatrix> {
        match self {
            ModelParams::Simplified(_) => Ok(CovarianceMatrix::vacuum(2)),
            ModelParams::Full(p) => initial_state_full(p),
        }
    }

    pub fn metadata(&self) -> serde_json::Value {
        match self {
            ModelParams::Simplified(p) => json!({
                "model": "simplified",
                "omega_c": p.omega_c, "kappa": p.kappa, "eta": p.eta, "n_in": p.n_in,
            }),
            ModelParams::Full(p) => json!({
                "model": "full",
                "omega_m": p.omega_m, "gamma": p.gamma, "delta0": p.delta0,
                "kappa": p.kappa, "g0": p.g0, "drive_e": p.drive_e,
                "eta": p.eta, "n_m": p.n_m, "n_in": p.n_in,
            }),
        }
    }
}

/// Assemble the drift/diffusion pair for either model (solving the classical
/// mean field first for the full one).
pub fn build_model(params: &ModelParams) -> Result<DriftDiffusion> {
    match params {
        ModelParams::Simplified(p) => build_simplified(p),
        ModelParams::Full(p) => {
            let mf = mean_field(p)?;
            build_full_linearized(p, &mf)
        }
    }
}

/// Steady covariance of either model; errors when the drift is not strictly
/// stable.
pub fn steady_state(params: &ModelParams) -> Result<CovarianceMatrix> {
    params.validate()?;
    let dd = build_model(params)?;
    solve_steady(&dd)
}

/// Steady-state observables derivable from a solved covariance matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    /// Gaussian discord between the two cavity fields.
    DiscordO1O2,
    /// Two-mode log-negativity between the cavity fields.
    LnO1O2,
    /// Log-negativity across the optical/mechanical bipartition O1O2|M1M2.
    LnOpticalMechanical,
    /// Two-mode log-negativity of the first cavity and its mirror.
    LnO1M1,
    /// Log-negativity of the (M+, O+) collective pair.
    LnPlus,
    /// Log-negativity of the (M-, O-) collective pair.
    LnMinus,
    /// Log-negativity of the cross pair (M+, O-).
    LnCrossPm,
}

impl Metric {
    pub const ALL_SIMPLIFIED: &'static [Metric] = &[Metric::DiscordO1O2, Metric::LnO1O2];
    pub const ALL_FULL: &'static [Metric] = &[
        Metric::DiscordO1O2,
        Metric::LnO1O2,
        Metric::LnOpticalMechanical,
        Metric::LnO1M1,
        Metric::LnPlus,
        Metric::LnMinus,
        Metric::LnCrossPm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::DiscordO1O2 => "discord_o1o2",
            Metric::LnO1O2 => "ln_o1o2",
            Metric::LnOpticalMechanical => "ln_oooo_mm",
            Metric::LnO1M1 => "ln_o1m1",
            Metric::LnPlus => "ln_plus",
            Metric::LnMinus => "ln_minus",
            Metric::LnCrossPm => "ln_cross_pm",
        }
    }

    pub fn defaults_for(kind: ModelKind) -> &'static [Metric] {
        match kind {
            ModelKind::Simplified => Metric::ALL_SIMPLIFIED,
            ModelKind::Full => Metric::ALL_FULL,
        }
    }

    pub fn supported_by(&self, kind: ModelKind) -> bool {
        Metric::defaults_for(kind).contains(self)
    }

    /// Evaluate on a steady (or snapshot) covariance matrix of the given model.
    pub fn evaluate(&self, kind: ModelKind, c: &CovarianceMatrix) -> Result<f64> {
        let optical = match kind {
            ModelKind::Simplified => [0usize, 1],
            ModelKind::Full => [1, 3],
        };
        match self {
            Metric::DiscordO1O2 => gaussian_discord(&reduce_modes(c, &optical)?, 0),
            Metric::LnO1O2 => log_negativity_two_mode(&reduce_modes(c, &optical)?),
            Metric::LnOpticalMechanical => {
                if kind != ModelKind::Full {
                    return Err(Error::InvalidInput(
                        "ln_oooo_mm needs the full model".into(),
                    ));
                }
                log_negativity_bipartition(c, &BipartitionSpec::new(vec![1, 3], vec![0, 2]))
            }
            Metric::LnO1M1 => {
                if kind != ModelKind::Full {
                    return Err(Error::InvalidInput("ln_o1m1 needs the full model".into()));
                }
                log_negativity_two_mode(&reduce_modes(c, &[0, 1])?)
            }
            Metric::LnPlus | Metric::LnMinus | Metric::LnCrossPm => {
                if kind != ModelKind::Full {
                    return Err(Error::InvalidInput(format!(
                        "{} needs the full model",
                        self.name()
                    )));
                }
                let (ep, em, ec) = plus_minus_decomposition(c)?;
                Ok(match self {
                    Metric::LnPlus => ep,
                    Metric::LnMinus => em,
                    _ => ec,
                })
            }
        }
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discord_o1o2" => Ok(Metric::DiscordO1O2),
            "ln_o1o2" => Ok(Metric::LnO1O2),
            "ln_oooo_mm" => Ok(Metric::LnOpticalMechanical),
            "ln_o1m1" => Ok(Metric::LnO1M1),
            "ln_plus" => Ok(Metric::LnPlus),
            "ln_minus" => Ok(Metric::LnMinus),
            "ln_cross_pm" => Ok(Metric::LnCrossPm),
            other => Err(Error::InvalidInput(format!("unknown metric '{other}'"))),
        }
    }
}

/// One named column of a sweep, aligned with the grid. Entries are absent at
/// grid points whose drift was not stable.
#[derive(Clone, Debug)]
pub struct SweepColumn {
    pub name: String,
    pub values: Vec<Option<f64>>,
}

/// The outcome of a one-parameter sweep.
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub variable_name: String,
    pub grid: Vec<f64>,
    pub columns: Vec<SweepColumn>,
    /// Stability flag per grid point; false entries have absent metric values.
    pub stable: Vec<bool>,
    /// Complete parameter record, sufficient to rerun the sweep.
    pub metadata: serde_json::Value,
}

/// Steady state of one sweep point, with instability reported as `None`
/// rather than as an error so the sweep can flag the point and move on.
fn steady_or_unstable(params: &ModelParams) -> Result<Option<CovarianceMatrix>> {
    let dd = build_model(params)?;
    let (stable, _) = stability(&dd);
    if !stable {
        return Ok(None);
    }
    solve_steady(&dd).map(Some)
}

/// Sweep one recognized parameter over a grid, computing the requested
/// steady-state metrics at every point. Unstable grid points are recorded
/// with `stable = false` and absent values instead of being dropped. Points
/// are evaluated in parallel; the output ordering and values are independent
/// of the level of parallelism.
pub fn sweep(
    params: &ModelParams,
    variable: &str,
    grid: &[f64],
    metrics: &[Metric],
) -> Result<SweepResult> {
    params.validate()?;
    if grid.is_empty() {
        return Err(Error::InvalidInput("sweep grid must be non-empty".into()));
    }
    if metrics.is_empty() {
        return Err(Error::InvalidInput("sweep needs at least one metric".into()));
    }
    if !params.variable_names().contains(&variable) {
        return Err(Error::InvalidInput(format!(
            "unknown sweep variable '{variable}' for the {} model (expected one of {})",
            params.kind(),
            params.variable_names().join(", ")
        )));
    }
    for m in metrics {
        if !m.supported_by(params.kind()) {
            return Err(Error::InvalidInput(format!(
                "metric '{}' is not defined for the {} model",
                m.name(),
                params.kind()
            )));
        }
    }

    let kind = params.kind();
    let rows: Vec<(bool, Vec<Option<f64>>)> = grid
        .par_iter()
        .map(|&value| -> Result<(bool, Vec<Option<f64>>)> {
            let point = params.with_value(variable, value)?;
            point.validate()?;
            match steady_or_unstable(&point)? {
                None => Ok((false, vec![None; metrics.len()])),
                Some(c) => {
                    let vals = metrics
                        .iter()
                        .map(|m| m.evaluate(kind, &c).map(Some))
                        .collect::<Result<Vec<_>>>()?;
                    Ok((true, vals))
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let stable: Vec<bool> = rows.iter().map(|(s, _)| *s).collect();
    let columns = metrics
        .iter()
        .enumerate()
        .map(|(i, m)| SweepColumn {
            name: m.name().to_string(),
            values: rows.iter().map(|(_, vals)| vals[i]).collect(),
        })
        .collect();
    let mut metadata = params.metadata();
    metadata["variable"] = json!(variable);
    metadata["metrics"] = json!(metrics.iter().map(|m| m.name()).collect::<Vec<_>>());
    Ok(SweepResult {
        variable_name: variable.to_string(),
        grid: grid.to_vec(),
        columns,
        stable,
        metadata,
    })
}

/// Largest mechanical occupation at which the steady O1O2|M1M2 entanglement
/// survives, located by bisection on the indicator "negativity > 1e-8" to a
/// half-integer bracket. The indicator must be positive at `interval.0` and
/// zero at `interval.1`; a coarse prescan validates that it flips exactly
/// once, and the result is post-validated at +/- 1.
pub fn find_threshold(params: &FullParams, interval: (f64, f64)) -> Result<f64> {
    params.validate()?;
    let (lo0, hi0) = interval;
    if !(lo0.is_finite() && hi0.is_finite() && lo0 >= 0.0 && lo0 < hi0) {
        return Err(Error::InvalidInput(format!(
            "threshold interval must satisfy 0 <= low < high (got {lo0}, {hi0})"
        )));
    }
    // The classical mean field does not depend on n_m; solve it once.
    let mf = mean_field(params)?;
    let indicator = |n_m: f64| -> Result<bool> {
        let p = FullParams { n_m, ..*params };
        let dd = build_full_linearized(&p, &mf)?;
        let (stable, max_re) = stability(&dd);
        if !stable {
            return Err(Error::Numerical(format!(
                "drift unstable at n_m = {n_m} (spectral abscissa {max_re:.3e})"
            )));
        }
        let c = solve_steady(&dd)?;
        let e = Metric::LnOpticalMechanical.evaluate(ModelKind::Full, &c)?;
        Ok(e > ENTANGLEMENT_CUTOFF)
    };

    // Coarse prescan: the indicator must be monotone (one true->false flip).
    const PRESCAN: usize = 11;
    let mut flips = Vec::new();
    let mut prev: Option<bool> = None;
    let mut scan = Vec::with_capacity(PRESCAN);
    for i in 0..PRESCAN {
        let x = lo0 + (hi0 - lo0) * i as f64 / (PRESCAN - 1) as f64;
        let ind = indicator(x)?;
        if let Some(p) = prev {
            if p != ind {
                flips.push(i);
            }
        }
        prev = Some(ind);
        scan.push((x, ind));
    }
    if !scan[0].1 {
        return Err(Error::InvalidInput(format!(
            "entanglement indicator is already zero at interval start n_m = {lo0}; \
             threshold not bracketed"
        )));
    }
    if scan[PRESCAN - 1].1 {
        return Err(Error::InvalidInput(format!(
            "entanglement indicator is still positive at interval end n_m = {hi0}; \
             threshold not bracketed"
        )));
    }
    if flips.len() != 1 {
        return Err(Error::Numerical(format!(
            "entanglement indicator is not monotone over the prescan ({} flips)",
            flips.len()
        )));
    }
    let (mut lo, mut hi) = (scan[flips[0] - 1].0, scan[flips[0]].0);
    while hi - lo > 0.5 {
        let mid = 0.5 * (lo + hi);
        if indicator(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let threshold = 0.5 * (lo + hi);
    if !indicator((threshold - 1.0).max(lo0))? || indicator(threshold + 1.0)? {
        return Err(Error::Numerical(format!(
            "threshold {threshold:.3} failed post-validation at +/- 1"
        )));
    }
    Ok(threshold)
}

/// Symplectic rotation to the collective +/- modes of a symmetric 4-mode
/// state ordered (M1, O1, M2, O2): new modes (M+, O+, M-, O-) with
/// v_pm = (v_1 +/- v_2)/sqrt(2) quadrature-wise.
fn plus_minus_rotation() -> DMatrix<f64> {
    let mut s = DMatrix::zeros(8, 8);
    let c = std::f64::consts::FRAC_1_SQRT_2;
    // (new mode, old mode, sign): M+ <- M1 + M2, O+ <- O1 + O2, M- <- M1 - M2, O- <- O1 - O2
    for (new, old, sign) in [
        (0usize, 0usize, 1.0),
        (0, 2, 1.0),
        (1, 1, 1.0),
        (1, 3, 1.0),
        (2, 0, 1.0),
        (2, 2, -1.0),
        (3, 1, 1.0),
        (3, 3, -1.0),
    ] {
        s[(2 * new, 2 * old)] = sign * c;
        s[(2 * new + 1, 2 * old + 1)] = sign * c;
    }
    s
}

/// Log-negativities of the collective pairs of a cavity-swap-symmetric
/// 4-mode state ordered (M1, O1, M2, O2): returns (e_plus, e_minus,
/// e_cross_pm) for the (M+, O+), (M-, O-) and (M+, O-) two-mode blocks.
pub fn plus_minus_decomposition(c: &CovarianceMatrix) -> Result<(f64, f64, f64)> {
    if c.n_modes() != 4 {
        return Err(Error::InvalidInput(format!(
            "plus/minus decomposition needs a 4-mode state, got {} modes",
            c.n_modes()
        )));
    }
    let swapped = reduce_modes(c, &[2, 3, 0, 1])?;
    let scale = c.matrix().amax().max(1.0);
    let dev = (c.matrix() - swapped.matrix()).amax();
    if dev > 1e-8 * scale {
        return Err(Error::InvalidInput(format!(
            "state is not symmetric under the cavity swap (max deviation {dev:.3e})"
        )));
    }
    let rotated = rotate_basis(c, &plus_minus_rotation())?;
    let e_plus = log_negativity_two_mode(&reduce_modes(&rotated, &[0, 1])?)?;
    let e_minus = log_negativity_two_mode(&reduce_modes(&rotated, &[2, 3])?)?;
    let e_cross = log_negativity_two_mode(&reduce_modes(&rotated, &[0, 3])?)?;
    Ok((e_plus, e_minus, e_cross))
}

/// Identifiers of the precanned datasets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureId {
    Fig2a,
    Fig2b,
    Fig3,
    Fig4a,
    Fig4b,
    Fig5,
    Fig6,
    FigA7,
    FigA8,
    FigA9,
}

impl FigureId {
    pub const ALL: &'static [FigureId] = &[
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig3,
        FigureId::Fig4a,
        FigureId::Fig4b,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::FigA7,
        FigureId::FigA8,
        FigureId::FigA9,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4a => "fig4a",
            FigureId::Fig4b => "fig4b",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::FigA7 => "figA7",
            FigureId::FigA8 => "figA8",
            FigureId::FigA9 => "figA9",
        }
    }

    /// Which model the dataset is computed on.
    pub fn model_kind(&self) -> ModelKind {
        match self {
            FigureId::Fig2a | FigureId::Fig2b => ModelKind::Simplified,
            _ => ModelKind::Full,
        }
    }

    /// Whether the dataset is a time series rather than a steady-state sweep.
    pub fn is_transient(&self) -> bool {
        matches!(
            self,
            FigureId::Fig5 | FigureId::FigA7 | FigureId::FigA8 | FigureId::FigA9
        )
    }
}

impl FromStr for FigureId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        FigureId::ALL
            .iter()
            .find(|id| id.name().to_ascii_lowercase() == lower)
            .copied()
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "unknown figure id '{s}' (expected one of {})",
                    FigureId::ALL
                        .iter()
                        .map(|f| f.name())
                        .collect::<Vec<_>>()
                        .join(", ")
                ))
            })
    }
}

/// A generic rectangular dataset: named columns, one row per grid point or
/// time sample, with absent entries at unstable points.
#[derive(Clone, Debug)]
pub struct DataTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub metadata: serde_json::Value,
}

impl DataTable {
    pub fn from_sweep(s: &SweepResult) -> Self {
        let mut headers = vec![s.variable_name.clone()];
        headers.extend(s.columns.iter().map(|c| c.name.clone()));
        headers.push("stable".into());
        let rows = s
            .grid
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let mut row = vec![Some(x)];
                row.extend(s.columns.iter().map(|c| c.values[i]));
                row.push(Some(if s.stable[i] { 1.0 } else { 0.0 }));
                row
            })
            .collect();
        DataTable {
            headers,
            rows,
            metadata: s.metadata.clone(),
        }
    }
}

/// Tunable knobs of `figure_dataset`: the base parameter sets (already
/// carrying any user overrides) plus optional grid/time resolution.
#[derive(Clone, Debug)]
pub struct FigureOptions {
    pub full: FullParams,
    pub simplified: SimplifiedParams,
    /// Number of grid points for sweep-based figures.
    pub grid_points: Option<usize>,
    /// Horizon of time-series figures, in units of 1/kappa.
    pub t_final_kappa: Option<f64>,
    /// Sampling stride of time-series figures, in integrator steps.
    pub sample_every: Option<usize>,
}

/// Per-figure parameter pinning. Figures that study a specific operating
/// point fix eta and n_m; user overrides are applied on top by the caller.
pub fn figure_defaults(id: FigureId) -> FigureOptions {
    let mut opts = FigureOptions {
        full: FullParams::default(),
        simplified: SimplifiedParams::default(),
        grid_points: None,
        t_final_kappa: None,
        sample_every: None,
    };
    match id {
        FigureId::Fig5 | FigureId::FigA7 | FigureId::FigA9 => {
            opts.full.eta = 0.25;
            opts.full.n_m = 240.0;
        }
        FigureId::FigA8 => {
            opts.full.n_m = 240.0;
        }
        FigureId::Fig6 => {
            opts.full.eta = 0.25;
        }
        _ => {}
    }
    opts
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

fn logspace(a_exp: f64, b_exp: f64, n: usize) -> Vec<f64> {
    linspace(a_exp, b_exp, n)
        .into_iter()
        .map(|e| 10f64.powf(e))
        .collect()
}

/// Merge several single-metric sweeps over the same grid into one table.
fn merged_sweep_table(
    base: &ModelParams,
    curve_param: &str,
    curve_values: &[f64],
    curve_tag: &str,
    variable: &str,
    grid: &[f64],
    metrics: &[Metric],
) -> Result<DataTable> {
    let mut headers = vec![variable.to_string()];
    let mut columns: Vec<Vec<Option<f64>>> = Vec::new();
    let mut meta_curves = Vec::new();
    for &cv in curve_values {
        let params = base.with_value(curve_param, cv)?;
        let s = sweep(&params, variable, grid, metrics)?;
        for col in &s.columns {
            headers.push(format!("{}_{}{}", col.name, curve_tag, trim_float(cv)));
            columns.push(col.values.clone());
        }
        meta_curves.push(s.metadata);
    }
    let rows = grid
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let mut row = vec![Some(x)];
            row.extend(columns.iter().map(|c| c[i]));
            row
        })
        .collect();
    Ok(DataTable {
        headers,
        rows,
        metadata: json!({ "curves": meta_curves }),
    })
}

/// Compact float tag for column names: 0.25 -> "0.25", 240 -> "240".
fn trim_float(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Time-series dataset: evolve the full model from cavities in vacuum and
/// mirrors at their bath occupation, tracking discord and the 4-mode
/// negativity for each parameter variant.
fn transient_table(
    variants: &[(String, FullParams)],
    t_final_kappa: f64,
    sample_every: Option<usize>,
) -> Result<DataTable> {
    let kappa = variants[0].1.kappa;
    let dt = variants[0].1.default_timestep();
    let t_final = t_final_kappa / kappa;
    let n_steps = (t_final / dt).ceil() as usize;
    let stride = sample_every.unwrap_or_else(|| (n_steps / 1200).max(1));

    let series: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = variants
        .par_iter()
        .map(|(_, p)| -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
            let mf = mean_field(p)?;
            let dd = build_full_linearized(p, &mf)?;
            let c0 = initial_state_full(p)?;
            let traj = evolve_covariance(&dd, &c0, t_final, dt, stride)?;
            let mut discord = Vec::with_capacity(traj.states.len());
            let mut ln4 = Vec::with_capacity(traj.states.len());
            for c in &traj.states {
                discord.push(Metric::DiscordO1O2.evaluate(ModelKind::Full, c)?);
                ln4.push(Metric::LnOpticalMechanical.evaluate(ModelKind::Full, c)?);
            }
            let t_kappa = traj.times.iter().map(|t| t * kappa).collect();
            Ok((t_kappa, discord, ln4))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut headers = vec!["t_kappa".to_string()];
    for (tag, _) in variants {
        headers.push(format!("discord_o1o2{tag}"));
        headers.push(format!("ln_oooo_mm{tag}"));
    }
    let n_rows = series[0].0.len();
    let rows = (0..n_rows)
        .map(|i| {
            let mut row = vec![Some(series[0].0[i])];
            for (_, d, e) in &series {
                row.push(Some(d[i]));
                row.push(Some(e[i]));
            }
            row
        })
        .collect();
    let meta = variants
        .iter()
        .map(|(tag, p)| {
            let mut m = ModelParams::Full(*p).metadata();
            m["curve"] = json!(tag);
            m
        })
        .collect::<Vec<_>>();
    Ok(DataTable {
        headers,
        rows,
        metadata: json!({ "curves": meta, "t_final_kappa": t_final_kappa, "dt": dt,
                          "sample_every": stride }),
    })
}

/// Cavities in vacuum, mirrors thermal at the bath occupation.
pub fn initial_state_full(params: &FullParams) -> Result<CovarianceMatrix> {
    let mut m = DMatrix::identity(8, 8) * 0.5;
    for j in 0..2 {
        m[(4 * j, 4 * j)] = params.n_m + 0.5;
        m[(4 * j + 1, 4 * j + 1)] = params.n_m + 0.5;
    }
    CovarianceMatrix::new(m)
}

/// Assemble the dataset behind one of the precanned figures. Sweep-based
/// figures return steady-state curves; time-series figures return sampled
/// trajectories of discord and the 4-mode negativity.
pub fn figure_dataset(id: FigureId, opts: &FigureOptions) -> Result<DataTable> {
    let simplified = ModelParams::Simplified(opts.simplified);
    let full = ModelParams::Full(opts.full);
    match id {
        // Discord between the cavity fields against transmissivity, one curve
        // per input occupation. eta = 1 is excluded: the passive network's
        // antisymmetric mode is undamped there and has no steady state.
        FigureId::Fig2a => merged_sweep_table(
            &simplified,
            "n_in",
            &[1.0, 2.0, 5.0],
            "nin",
            "eta",
            &linspace(0.0, 0.95, opts.grid_points.unwrap_or(96)),
            &[Metric::DiscordO1O2],
        ),
        // Discord against input occupation (log grid), one curve per eta.
        FigureId::Fig2b => merged_sweep_table(
            &simplified,
            "eta",
            &[0.1, 0.25, 0.5],
            "eta",
            "n_in",
            &logspace(-2.0, 4.0, opts.grid_points.unwrap_or(121)),
            &[Metric::DiscordO1O2],
        ),
        // Entanglement-survival threshold against transmissivity.
        FigureId::Fig3 => {
            let grid = linspace(0.0, 0.5, opts.grid_points.unwrap_or(21));
            let rows: Vec<Vec<Option<f64>>> = grid
                .par_iter()
                .map(|&eta| -> Result<Vec<Option<f64>>> {
                    let p = FullParams { eta, ..opts.full };
                    let th = find_threshold(&p, (0.0, 400.0))?;
                    Ok(vec![Some(eta), Some(th)])
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(DataTable {
                headers: vec!["eta".into(), "n_th".into()],
                rows,
                metadata: full.metadata(),
            })
        }
        // 4-mode negativity against mechanical occupation, eta in {0, 0.25},
        // zoomed on the interval where the two curves cross.
        FigureId::Fig4a => merged_sweep_table(
            &full,
            "eta",
            &[0.0, 0.25],
            "eta",
            "n_m",
            &linspace(190.0, 260.0, opts.grid_points.unwrap_or(141)),
            &[Metric::LnOpticalMechanical],
        ),
        // Local-pair negativity O1/M1 against mechanical occupation.
        FigureId::Fig4b => merged_sweep_table(
            &full,
            "eta",
            &[0.0, 0.25],
            "eta",
            "n_m",
            &linspace(0.0, 250.0, opts.grid_points.unwrap_or(126)),
            &[Metric::LnO1M1],
        ),
        // Activation transient at the reference operating point.
        FigureId::Fig5 => transient_table(
            &[(String::new(), opts.full)],
            opts.t_final_kappa.unwrap_or(60.0),
            opts.sample_every,
        ),
        // Collective-pair negativities and their sum against mechanical
        // occupation.
        FigureId::Fig6 => {
            let grid = linspace(0.0, 260.0, opts.grid_points.unwrap_or(131));
            let s = sweep(
                &full,
                "n_m",
                &grid,
                &[
                    Metric::LnPlus,
                    Metric::LnMinus,
                    Metric::LnCrossPm,
                    Metric::LnOpticalMechanical,
                ],
            )?;
            let mut table = DataTable::from_sweep(&s);
            // Append the plus+minus sum for direct comparison with the 4-mode
            // negativity.
            table.headers.insert(4, "ln_plus_minus_sum".into());
            for row in &mut table.rows {
                let sum = match (row[1], row[2]) {
                    (Some(a), Some(b)) => Some(a + b),
                    _ => None,
                };
                row.insert(4, sum);
            }
            Ok(table)
        }
        // Transient at several bath occupations.
        FigureId::FigA7 => {
            let variants = [150.0, 240.0, 244.0, 248.0]
                .iter()
                .map(|&n_m| (format!("_nm{}", trim_float(n_m)), FullParams { n_m, ..opts.full }))
                .collect::<Vec<_>>();
            transient_table(&variants, opts.t_final_kappa.unwrap_or(60.0), opts.sample_every)
        }
        // Transient at several transmissivities.
        FigureId::FigA8 => {
            let variants = [0.1, 0.25, 0.5, 0.75, 0.9]
                .iter()
                .map(|&eta| (format!("_eta{}", trim_float(eta)), FullParams { eta, ..opts.full }))
                .collect::<Vec<_>>();
            transient_table(&variants, opts.t_final_kappa.unwrap_or(60.0), opts.sample_every)
        }
        // Transient at several couplings, as fractions of the default g0.
        FigureId::FigA9 => {
            let variants = [1.0, 0.8, 0.6, 0.4, 0.2]
                .iter()
                .map(|&frac| {
                    (
                        format!("_g0x{}", trim_float(frac)),
                        FullParams {
                            g0: opts.full.g0 * frac,
                            ..opts.full
                        },
                    )
                })
                .collect::<Vec<_>>();
            transient_table(&variants, opts.t_final_kappa.unwrap_or(60.0), opts.sample_every)
        }
    }
}
