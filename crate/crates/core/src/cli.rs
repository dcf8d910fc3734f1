//! Command-line front end: configuration resolution, CSV/metadata output,
//! and the subcommands steady / evolve / sweep / threshold / figure /
//! selftest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::{
    build_model, figure_dataset, figure_defaults, find_threshold, initial_state_full, steady_state,
    sweep, DataTable, FigureId, Metric, ModelKind, ModelParams, SweepResult,
};
use crate::dynamics::evolve_covariance;
use crate::error::{Error, Result};
use crate::gaussian::{
    entropy_f, gaussian_discord, log_negativity_two_mode, partial_transpose, rotate_basis,
    symplectic_eigenvalues, CovarianceMatrix,
};
use crate::model::{
    build_simplified, mean_field, optical_residual, stability, FullParams, SimplifiedParams,
};

/// Parameters expressed as ordinary frequencies when `angular: false`; they
/// are converted to angular rates on load. Couplings, drives and
/// occupations are never rescaled.
const RATE_KEYS: &[&str] = &["omega_m", "gamma", "delta0", "kappa", "omega_c"];

const DEFAULT_PRECISION: usize = 12;
const DEFAULT_T_FINAL_KAPPA: f64 = 60.0;
const DEFAULT_THRESHOLD_INTERVAL: (f64, f64) = (0.0, 400.0);

#[derive(Parser, Debug)]
#[command(
    name = "cvgn",
    version,
    about = "Gaussian network simulator for fiber-coupled optomechanical cavities"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// JSON configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Parameter override, repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Model: 'simplified' or 'full'.
    #[arg(long, global = true)]
    model: Option<String>,
    /// Output CSV path; stdout when absent. With --out, a .meta.json sidecar
    /// records the fully resolved configuration.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads (falls back to the CVGN_JOBS environment variable,
    /// then to all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the steady state and report its metrics.
    Steady,
    /// Integrate the covariance from a cold start, reporting sampled metrics.
    Evolve {
        /// Horizon, in units of 1/kappa.
        #[arg(long = "t-final", value_name = "T")]
        t_final: Option<f64>,
        /// Integrator step, in units of 1/kappa.
        #[arg(long, value_name = "DT")]
        dt: Option<f64>,
        /// Keep every Nth integrator step.
        #[arg(long = "sample-every", value_name = "N")]
        sample_every: Option<usize>,
    },
    /// Sweep one parameter over a grid of steady states.
    Sweep {
        /// Parameter to vary.
        #[arg(long = "var", value_name = "NAME")]
        variable: Option<String>,
        /// Grid: comma-separated values, or START:STOP:COUNT.
        #[arg(long, value_name = "SPEC")]
        grid: Option<String>,
        /// Comma-separated metric names.
        #[arg(long, value_name = "LIST")]
        metrics: Option<String>,
    },
    /// Locate the bath occupation where collective entanglement dies.
    Threshold {
        /// Lower end of the bracketing interval.
        #[arg(long, value_name = "N_M")]
        low: Option<f64>,
        /// Upper end of the bracketing interval.
        #[arg(long, value_name = "N_M")]
        high: Option<f64>,
    },
    /// Emit the dataset behind one of the built-in figures.
    Figure {
        /// Figure identifier, e.g. fig2a or figA7.
        id: String,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Steady => "steady",
            Command::Evolve { .. } => "evolve",
            Command::Sweep { .. } => "sweep",
            Command::Threshold { .. } => "threshold",
            Command::Figure { .. } => "figure",
            Command::Selftest => "selftest",
        }
    }
}

/// On-disk configuration. The .meta.json sidecar uses the same shape with
/// every field resolved, so it can be fed back through --config to reproduce
/// a run exactly.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<String>,
    /// When false, rate-like parameters (omega_m, gamma, delta0, kappa,
    /// omega_c) are given as ordinary frequencies in Hz and are multiplied
    /// by 2 pi on load. Defaults to true (angular rates in rad/s).
    #[serde(skip_serializing_if = "Option::is_none")]
    angular: Option<bool>,
    /// Significant digits in CSV output (default 12).
    #[serde(skip_serializing_if = "Option::is_none")]
    precision: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    parameters: Option<BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    command: Option<CommandConfig>,
}

#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CommandConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    variable: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    metrics: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_final_kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dt_kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sample_every: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    interval: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    figure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid_points: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum GridSpec {
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl GridSpec {
    fn resolve(&self) -> Result<Vec<f64>> {
        match self {
            GridSpec::List(v) => {
                if v.is_empty() {
                    return Err(Error::InvalidInput("grid must be non-empty".into()));
                }
                Ok(v.clone())
            }
            GridSpec::Range { start, stop, count } => {
                if *count == 0 {
                    return Err(Error::InvalidInput("grid count must be positive".into()));
                }
                if count == &1 {
                    return Ok(vec![*start]);
                }
                Ok((0..*count)
                    .map(|i| start + (stop - start) * i as f64 / (*count as f64 - 1.0))
                    .collect())
            }
        }
    }
}

/// Entry point used by the binary: parses `argv`, runs the command, and
/// returns the process exit code (0 success, 1 invalid input, 2 runtime
/// failure).
pub fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let jobs = match resolve_jobs(&cli.global) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let result = match jobs {
        Some(n) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: failed to build a {n}-thread worker pool: {e}");
                    return 2;
                }
            };
            pool.install(|| dispatch(&cli))
        }
        None => dispatch(&cli),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn resolve_jobs(global: &GlobalArgs) -> Result<Option<usize>> {
    let jobs = match global.jobs {
        Some(n) => Some(n),
        None => match std::env::var("CVGN_JOBS") {
            Ok(v) => Some(v.parse::<usize>().map_err(|_| {
                Error::Config(format!("CVGN_JOBS must be a positive integer, got '{v}'"))
            })?),
            Err(_) => None,
        },
    };
    if jobs == Some(0) {
        return Err(Error::InvalidInput("--jobs must be positive".into()));
    }
    Ok(jobs)
}

fn load_config(global: &GlobalArgs) -> Result<FileConfig> {
    match &global.config {
        None => Ok(FileConfig::default()),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Error::Config(format!("cannot read config '{}': {e}", path.display()))
            })?;
            serde_json::from_str(&text).map_err(|e| {
                Error::Config(format!("config '{}': {e}", path.display()))
            })
        }
    }
}

fn check_command_name(cfg: &FileConfig, invoked: &str) -> Result<()> {
    if let Some(name) = cfg.command.as_ref().and_then(|c| c.name.as_deref()) {
        if name != invoked {
            return Err(Error::InvalidInput(format!(
                "config command.name is '{name}' but the invoked subcommand is '{invoked}'"
            )));
        }
    }
    Ok(())
}

fn resolve_kind(global: &GlobalArgs, cfg: &FileConfig) -> Result<ModelKind> {
    match global.model.as_deref().or(cfg.model.as_deref()) {
        Some(s) => s.parse(),
        None => Ok(ModelKind::Full),
    }
}

fn default_params(kind: ModelKind) -> ModelParams {
    match kind {
        ModelKind::Simplified => ModelParams::Simplified(SimplifiedParams::default()),
        ModelKind::Full => ModelParams::Full(FullParams::default()),
    }
}

/// Apply config-file parameters, then --set overrides, converting rate-like
/// keys from Hz when angular is false.
fn apply_overrides(
    mut params: ModelParams,
    cfg: &FileConfig,
    set: &[String],
    angular: bool,
) -> Result<ModelParams> {
    let convert = |key: &str, value: f64| -> f64 {
        if !angular && RATE_KEYS.contains(&key) {
            value * std::f64::consts::TAU
        } else {
            value
        }
    };
    if let Some(map) = &cfg.parameters {
        for (key, &value) in map {
            params = params.with_value(key, convert(key, value))?;
        }
    }
    for entry in set {
        let (key, raw) = entry.split_once('=').ok_or_else(|| {
            Error::InvalidInput(format!("--set expects KEY=VALUE, got '{entry}'"))
        })?;
        let value: f64 = raw.parse().map_err(|_| {
            Error::InvalidInput(format!("invalid numeric value for '{key}': '{raw}'"))
        })?;
        params = params.with_value(key, convert(key, value))?;
    }
    params.validate()?;
    Ok(params)
}

fn resolve_precision(cfg: &FileConfig) -> Result<usize> {
    let p = cfg.precision.unwrap_or(DEFAULT_PRECISION);
    if !(1..=17).contains(&p) {
        return Err(Error::Config(format!(
            "precision must lie between 1 and 17 significant digits (got {p})"
        )));
    }
    Ok(p)
}

fn parameters_map(params: &ModelParams) -> BTreeMap<String, f64> {
    let meta = params.metadata();
    let mut map = BTreeMap::new();
    for (k, v) in meta.as_object().expect("parameter metadata is an object") {
        if let Some(x) = v.as_f64() {
            map.insert(k.clone(), x);
        }
    }
    map
}

fn command_config(cfg: &FileConfig) -> CommandConfig {
    cfg.command.clone().unwrap_or_default()
}

fn parse_metrics(kind: ModelKind, names: Option<Vec<String>>) -> Result<Vec<Metric>> {
    match names {
        None => Ok(Metric::defaults_for(kind).to_vec()),
        Some(names) => {
            if names.is_empty() {
                return Err(Error::InvalidInput("metrics list must be non-empty".into()));
            }
            names
                .iter()
                .map(|n| {
                    let m = Metric::from_str(n)?;
                    if !m.supported_by(kind) {
                        return Err(Error::InvalidInput(format!(
                            "metric '{}' is not defined for the {kind} model",
                            m.name()
                        )));
                    }
                    Ok(m)
                })
                .collect()
        }
    }
}

fn parse_grid_arg(spec: &str) -> Result<Vec<f64>> {
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidInput(format!(
                "grid range must be START:STOP:COUNT, got '{spec}'"
            )));
        }
        let start: f64 = parts[0].parse().map_err(|_| {
            Error::InvalidInput(format!("invalid grid start '{}'", parts[0]))
        })?;
        let stop: f64 = parts[1].parse().map_err(|_| {
            Error::InvalidInput(format!("invalid grid stop '{}'", parts[1]))
        })?;
        let count: usize = parts[2].parse().map_err(|_| {
            Error::InvalidInput(format!("invalid grid count '{}'", parts[2]))
        })?;
        GridSpec::Range { start, stop, count }.resolve()
    } else {
        spec.split(',')
            .map(|s| {
                s.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidInput(format!("invalid grid value '{}'", s.trim()))
                })
            })
            .collect()
    }
}

fn format_cell(value: f64, precision: usize) -> String {
    format!("{:.*e}", precision - 1, value)
}

/// CSV with LF line endings. Absent values render as empty cells; the
/// stability flag column renders as true/false.
fn render_csv(table: &DataTable, precision: usize) -> String {
    let mut out = String::new();
    out.push_str(&table.headers.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(i, cell)| match cell {
                None => String::new(),
                Some(v) => {
                    if table.headers[i] == "stable" {
                        if *v != 0.0 { "true".into() } else { "false".into() }
                    } else {
                        format_cell(*v, precision)
                    }
                }
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn meta_path_for(out: &Path) -> PathBuf {
    out.with_extension("meta.json")
}

fn emit(table: &DataTable, meta: &FileConfig, global: &GlobalArgs, precision: usize) -> Result<()> {
    let csv = render_csv(table, precision);
    match &global.out {
        None => {
            print!("{csv}");
        }
        Some(path) => {
            fs::write(path, &csv)?;
            let text = serde_json::to_string_pretty(meta)
                .map_err(|e| Error::Config(format!("cannot serialize metadata: {e}")))?;
            fs::write(meta_path_for(path), text + "\n")?;
        }
    }
    Ok(())
}

fn resolved_meta(
    kind: ModelKind,
    params: &ModelParams,
    precision: usize,
    command: CommandConfig,
) -> FileConfig {
    FileConfig {
        model: Some(kind.to_string()),
        angular: Some(true),
        precision: Some(precision),
        parameters: Some(parameters_map(params)),
        command: Some(command),
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let cfg = load_config(&cli.global)?;
    check_command_name(&cfg, cli.command.name())?;
    let precision = resolve_precision(&cfg)?;
    let angular = cfg.angular.unwrap_or(true);
    let cmd_cfg = command_config(&cfg);

    match &cli.command {
        Command::Selftest => return run_selftest(),
        Command::Figure { id } => {
            let id: FigureId = id.parse()?;
            if let Some(cfg_fig) = &cmd_cfg.figure {
                let cfg_id: FigureId = cfg_fig.parse()?;
                if cfg_id != id {
                    return Err(Error::InvalidInput(format!(
                        "config command.figure is '{}' but the argument is '{}'",
                        cfg_id.name(),
                        id.name()
                    )));
                }
            }
            let kind = id.model_kind();
            if let Some(requested) = cli.global.model.as_deref().or(cfg.model.as_deref()) {
                if requested.parse::<ModelKind>()? != kind {
                    return Err(Error::InvalidInput(format!(
                        "figure {} runs on the {kind} model",
                        id.name()
                    )));
                }
            }
            let mut opts = figure_defaults(id);
            match apply_overrides(
                match kind {
                    ModelKind::Simplified => ModelParams::Simplified(opts.simplified),
                    ModelKind::Full => ModelParams::Full(opts.full),
                },
                &cfg,
                &cli.global.set,
                angular,
            )? {
                ModelParams::Simplified(p) => opts.simplified = p,
                ModelParams::Full(p) => opts.full = p,
            }
            opts.grid_points = cmd_cfg.grid_points;
            opts.t_final_kappa = cmd_cfg.t_final_kappa;
            opts.sample_every = cmd_cfg.sample_every;
            let table = figure_dataset(id, &opts)?;
            let params = match kind {
                ModelKind::Simplified => ModelParams::Simplified(opts.simplified),
                ModelKind::Full => ModelParams::Full(opts.full),
            };
            let meta = resolved_meta(
                kind,
                &params,
                precision,
                CommandConfig {
                    name: Some("figure".into()),
                    figure: Some(id.name().into()),
                    grid_points: cmd_cfg.grid_points,
                    t_final_kappa: cmd_cfg.t_final_kappa,
                    sample_every: cmd_cfg.sample_every,
                    ..Default::default()
                },
            );
            emit(&table, &meta, &cli.global, precision)?;
            return Ok(0);
        }
        _ => {}
    }

    let kind = resolve_kind(&cli.global, &cfg)?;
    let params = apply_overrides(default_params(kind), &cfg, &cli.global.set, angular)?;

    match &cli.command {
        Command::Steady => {
            let metrics = parse_metrics(kind, cmd_cfg.metrics.clone())?;
            let c = steady_state(&params)?;
            let mut row = Vec::with_capacity(metrics.len());
            for m in &metrics {
                row.push(Some(m.evaluate(kind, &c)?));
            }
            let table = DataTable {
                headers: metrics.iter().map(|m| m.name().to_string()).collect(),
                rows: vec![row],
                metadata: params.metadata(),
            };
            let meta = resolved_meta(
                kind,
                &params,
                precision,
                CommandConfig {
                    name: Some("steady".into()),
                    metrics: Some(metrics.iter().map(|m| m.name().to_string()).collect()),
                    ..Default::default()
                },
            );
            emit(&table, &meta, &cli.global, precision)?;
        }
        Command::Evolve {
            t_final,
            dt,
            sample_every,
        } => {
            let metrics = parse_metrics(kind, cmd_cfg.metrics.clone())?;
            let kappa = params.kappa();
            let t_final_kappa = t_final
                .or(cmd_cfg.t_final_kappa)
                .unwrap_or(DEFAULT_T_FINAL_KAPPA);
            // Resolve the step in 1/kappa units first so the sidecar value
            // reproduces the run exactly when fed back through --config.
            let dt_kappa = dt
                .or(cmd_cfg.dt_kappa)
                .unwrap_or_else(|| params.default_timestep() * kappa);
            if !(dt_kappa.is_finite() && dt_kappa > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "dt must be positive and finite (got {dt_kappa})"
                )));
            }
            if !(t_final_kappa.is_finite() && t_final_kappa >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "t-final must be non-negative and finite (got {t_final_kappa})"
                )));
            }
            let t_fin = t_final_kappa / kappa;
            let step = dt_kappa / kappa;
            let n_steps = (t_fin / step).ceil() as usize;
            let stride = sample_every
                .or(cmd_cfg.sample_every)
                .unwrap_or_else(|| (n_steps / 1200).max(1));
            let dd = build_model(&params)?;
            let c0 = params.initial_state()?;
            let traj = evolve_covariance(&dd, &c0, t_fin, step, stride)?;
            let mut headers = vec!["t_kappa".to_string()];
            headers.extend(metrics.iter().map(|m| m.name().to_string()));
            let mut rows = Vec::with_capacity(traj.states.len());
            for (t, c) in traj.times.iter().zip(&traj.states) {
                let mut row = vec![Some(t * kappa)];
                for m in &metrics {
                    row.push(Some(m.evaluate(kind, c)?));
                }
                rows.push(row);
            }
            let table = DataTable {
                headers,
                rows,
                metadata: params.metadata(),
            };
            let meta = resolved_meta(
                kind,
                &params,
                precision,
                CommandConfig {
                    name: Some("evolve".into()),
                    metrics: Some(metrics.iter().map(|m| m.name().to_string()).collect()),
                    t_final_kappa: Some(t_final_kappa),
                    dt_kappa: Some(dt_kappa),
                    sample_every: Some(stride),
                    ..Default::default()
                },
            );
            emit(&table, &meta, &cli.global, precision)?;
        }
        Command::Sweep {
            variable,
            grid,
            metrics,
        } => {
            let variable = variable
                .clone()
                .or_else(|| cmd_cfg.variable.clone())
                .ok_or_else(|| {
                    Error::InvalidInput(
                        "sweep needs --var or command.variable in the config".into(),
                    )
                })?;
            let grid_values = match (grid, &cmd_cfg.grid) {
                (Some(spec), _) => parse_grid_arg(spec)?,
                (None, Some(spec)) => spec.resolve()?,
                (None, None) => {
                    return Err(Error::InvalidInput(
                        "sweep needs --grid or command.grid in the config".into(),
                    ))
                }
            };
            let metric_names = metrics
                .as_ref()
                .map(|s| s.split(',').map(|m| m.trim().to_string()).collect())
                .or_else(|| cmd_cfg.metrics.clone());
            let metric_list = parse_metrics(kind, metric_names)?;
            let s: SweepResult = sweep(&params, &variable, &grid_values, &metric_list)?;
            let table = DataTable::from_sweep(&s);
            let meta = resolved_meta(
                kind,
                &params,
                precision,
                CommandConfig {
                    name: Some("sweep".into()),
                    variable: Some(variable),
                    grid: Some(GridSpec::List(grid_values)),
                    metrics: Some(metric_list.iter().map(|m| m.name().to_string()).collect()),
                    ..Default::default()
                },
            );
            emit(&table, &meta, &cli.global, precision)?;
        }
        Command::Threshold { low, high } => {
            let full = match &params {
                ModelParams::Full(p) => *p,
                ModelParams::Simplified(_) => {
                    return Err(Error::InvalidInput(
                        "threshold search needs the full model".into(),
                    ))
                }
            };
            let interval = (
                low.unwrap_or_else(|| {
                    cmd_cfg
                        .interval
                        .map(|i| i.0)
                        .unwrap_or(DEFAULT_THRESHOLD_INTERVAL.0)
                }),
                high.unwrap_or_else(|| {
                    cmd_cfg
                        .interval
                        .map(|i| i.1)
                        .unwrap_or(DEFAULT_THRESHOLD_INTERVAL.1)
                }),
            );
            let n_th = find_threshold(&full, interval)?;
            let table = DataTable {
                headers: vec!["n_th".into()],
                rows: vec![vec![Some(n_th)]],
                metadata: params.metadata(),
            };
            let meta = resolved_meta(
                kind,
                &params,
                precision,
                CommandConfig {
                    name: Some("threshold".into()),
                    interval: Some(interval),
                    ..Default::default()
                },
            );
            emit(&table, &meta, &cli.global, precision)?;
        }
        Command::Figure { .. } | Command::Selftest => unreachable!("handled above"),
    }
    Ok(0)
}

/// Cheap invariant battery: prints one PASS/FAIL line per check and returns
/// exit code 0 when everything passes, 2 otherwise.
fn run_selftest() -> Result<i32> {
    let mut all_pass = true;
    let mut check = |name: &str, outcome: Result<bool>| {
        let line = match outcome {
            Ok(true) => format!("PASS  {name}"),
            Ok(false) => {
                all_pass = false;
                format!("FAIL  {name}")
            }
            Err(e) => {
                all_pass = false;
                format!("FAIL  {name} ({e})")
            }
        };
        println!("{line}");
    };

    check("vacuum symplectic eigenvalues are 1/2", {
        symplectic_eigenvalues(&CovarianceMatrix::vacuum(3))
            .map(|nu| nu.iter().all(|v| (v - 0.5).abs() < 1e-12))
    });
    check("physicality gate rejects sub-vacuum noise", {
        CovarianceMatrix::new(nalgebra::DMatrix::identity(4, 4) * 0.3)
            .and_then(|c| c.is_physical().map(|p| !p))
    });
    check("thermal occupations set the symplectic spectrum", {
        CovarianceMatrix::thermal(&[0.0, 1.5, 240.0])
            .and_then(|c| symplectic_eigenvalues(&c))
            .map(|nu| {
                let want = [0.5, 2.0, 240.5];
                nu.iter().zip(want).all(|(v, w)| (v - w).abs() < 1e-9 * w)
            })
    });
    check("two-mode squeezing entangles by 2 r log2 e", {
        CovarianceMatrix::two_mode_squeezed(0.5)
            .and_then(|c| log_negativity_two_mode(&c))
            .map(|e| (e - std::f64::consts::LOG2_E).abs() < 1e-9)
    });
    check(
        "entropy function vanishes at the vacuum point",
        (|| {
            Ok(entropy_f(1.0)? == 0.0
                && (entropy_f(1.0_f64.cosh())? - 0.9513895138912786).abs() < 1e-12)
        })(),
    );
    check("product states carry no discord", {
        CovarianceMatrix::thermal(&[1.0, 2.0]).and_then(|c| gaussian_discord(&c, 0).map(|d| d == 0.0))
    });
    check("partial transposition is an involution", {
        CovarianceMatrix::two_mode_squeezed(0.3).and_then(|c| {
            let twice = partial_transpose(&partial_transpose(&c, &[0])?, &[0])?;
            Ok((twice.matrix() - c.matrix()).amax() == 0.0)
        })
    });
    check("passive network steady state matches the analytic form", {
        let p = SimplifiedParams {
            eta: 0.25,
            n_in: 2.0,
            ..Default::default()
        };
        steady_state(&ModelParams::Simplified(p)).map(|c| {
            // C = [(n_in + 1) I + sqrt(eta) n_in Sigma] / 2 with Sigma the
            // like-quadrature swap; here diagonal 1.5 and cross 0.5.
            let mut want = nalgebra::DMatrix::identity(4, 4) * 1.5;
            want[(0, 2)] = 0.5;
            want[(2, 0)] = 0.5;
            want[(1, 3)] = 0.5;
            want[(3, 1)] = 0.5;
            (c.matrix() - want).amax() < 1e-9
        })
    });
    check(
        "passive network discord matches its invariant form",
        (|| {
            let p = SimplifiedParams {
                eta: 0.25,
                n_in: 2.0,
                ..Default::default()
            };
            let want = entropy_f(3.0)? - entropy_f(2.0)? - entropy_f(4.0)? + entropy_f(2.75)?;
            let d = gaussian_discord(&steady_state(&ModelParams::Simplified(p))?, 0)?;
            Ok((d - want).abs() < 1e-12)
        })(),
    );
    check("cavity fields remain separable in the passive network", {
        let p = SimplifiedParams {
            eta: 0.25,
            n_in: 2.0,
            ..Default::default()
        };
        steady_state(&ModelParams::Simplified(p))
            .and_then(|c| log_negativity_two_mode(&c))
            .map(|e| e == 0.0)
    });
    check("lossless splitter leaves an undamped collective mode", {
        let unstable = build_simplified(&SimplifiedParams {
            eta: 1.0,
            ..Default::default()
        })
        .map(|dd| !stability(&dd).0);
        let stable = build_simplified(&SimplifiedParams {
            eta: 0.5,
            ..Default::default()
        })
        .map(|dd| stability(&dd).0);
        unstable.and_then(|a| stable.map(|b| a && b))
    });
    check("default drive has a consistent classical fixed point", {
        let p = FullParams {
            eta: 0.25,
            ..Default::default()
        };
        mean_field(&p).map(|mf| {
            let tol = 1e-6 * p.drive_e.max(1.0);
            optical_residual(&p, mf.a_bar_1) < tol && optical_residual(&p, mf.a_bar_2) < tol
        })
    });
    check("basis rotations require symplectic matrices", {
        let c = CovarianceMatrix::vacuum(1);
        Ok(rotate_basis(&c, &(nalgebra::DMatrix::identity(2, 2) * 2.0)).is_err())
    });
    check("transient runs start from a physical cold state", {
        initial_state_full(&FullParams {
            n_m: 240.0,
            ..Default::default()
        })
        .and_then(|c| c.is_physical())
    });

    if all_pass {
        println!("selftest: all checks passed");
        Ok(0)
    } else {
        println!("selftest: FAILURES detected");
        Ok(2)
    }
}
