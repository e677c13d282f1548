//! Command-line front end. Every subcommand is a thin adapter over the
//! library; numbers in reports are library outputs copied verbatim.
//!
//! Exit codes: 0 ok, 2 validation, 3 instability or heating, 4 simulation
//! abort, 5 optimization or fit failure.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use photocool_core::fitting::{fit, FreeSet};
use photocool_core::model::occupation_budget;
use photocool_core::optimizer::{
    classical_bound, coupling_a, joint_optimize, large_qc_limit, noise_bound, noise_floor,
    noise_population_a, optimal_a, optimal_detuning, FreeParameter, Objective, OptInputs,
};
use photocool_core::simulator::{estimate_occupancy, SimConfig, RNG_ALGORITHM};
use photocool_core::spectral::{displacement_psd, quadrature_occupancy, resonance_grid};
use photocool_core::{Error, SystemParams};

use crate::config::{self, ConfigError, LoadedConfig};
use crate::dataset::{self, DatasetError};
use crate::ensemble::run_ensemble;
use crate::report::{sha256_hex, Provenance, Report};
use crate::spectrum_io::write_spectrum_csv;
use crate::table1;
use crate::trajectory_io::{sidecar_path, write_binary, write_csv, Sidecar};
use crate::welch::welch_psd;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_UNSTABLE: i32 = 3;
pub const EXIT_SIMULATION: i32 = 4;
pub const EXIT_FAILURE: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "photocool", version, about = "Photothermal self-cooling of micromirrors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Occupation budget, stability margin, bounds and regime conditions.
    Analyze(AnalyzeArgs),
    /// Thermal and minimal classical populations of several devices.
    Table1(Table1Args),
    /// Langevin simulation with trajectory, spectrum and occupancy output.
    Simulate(SimulateArgs),
    /// Closed-form noise optimum and numerical parameter search.
    Optimize(OptimizeArgs),
    /// Estimate χ from temperature-versus-power data.
    Fit(FitArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the JSON report here.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Print JSON instead of the text table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Also integrate the model spectrum for the occupation.
    #[arg(long)]
    pub spectral: bool,
    /// Write the model spectrum as CSV.
    #[arg(long, value_name = "PATH")]
    pub spectrum: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    /// Device configs, one row each.
    #[arg(long = "config", value_name = "PATH", required = true)]
    pub configs: Vec<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    #[arg(long, env = "PHOTOCOOL_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Time step, s; defaults to the largest step the config allows.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Total time including burn-in, s.
    #[arg(long)]
    pub t_total: Option<f64>,
    /// Burn-in, s; defaults to 10 relaxation times.
    #[arg(long)]
    pub t_burn_in: Option<f64>,
    /// Recorded span in relaxation times when --t-total is absent.
    #[arg(long, default_value_t = 300.0)]
    pub relaxation_times: f64,
    #[arg(long, default_value_t = 1)]
    pub ensemble: usize,
    #[arg(long)]
    pub record_stride: Option<usize>,
    /// Use the full cavity response instead of its linearization.
    #[arg(long)]
    pub nonlinear: bool,
    /// Worker threads for the ensemble; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Binary trajectory file; members beyond the first get a `.k` suffix.
    #[arg(long, value_name = "PATH")]
    pub trajectory: Option<PathBuf>,
    /// CSV trajectory file, same naming rule.
    #[arg(long, value_name = "PATH")]
    pub trajectory_csv: Option<PathBuf>,
    /// Welch spectrum CSV.
    #[arg(long, value_name = "PATH")]
    pub spectrum: Option<PathBuf>,
    #[arg(long, default_value_t = 16)]
    pub segments: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ObjectiveArg {
    Approximate,
    RateEquation,
    Noise,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Free parameter as NAME or NAME=LO:HI (tau, chi, detuning, power,
    /// alpha). Detuning bounds are in units of Γ_c.
    #[arg(long = "free", value_name = "SPEC")]
    pub free: Vec<String>,
    #[arg(long, value_enum, default_value = "approximate")]
    pub objective: ObjectiveArg,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FreeSetArg {
    Chi,
    ChiEpsilon,
    ChiEpsilonLossRatio,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// CSV with header power_w,temperature_k[,sigma_k].
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value = "chi")]
    pub free: FreeSetArg,
    /// Starting χ, s/m; defaults to the config value.
    #[arg(long)]
    pub initial_chi: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Instability { .. }
        | Error::HeatingRegime { .. }
        | Error::HeatingDetuning { .. }
        | Error::DegenerateDetuning => EXIT_UNSTABLE,
        Error::InstabilityDetected { .. }
        | Error::NanDetected { .. }
        | Error::Nonstationary { .. }
        | Error::InsufficientSamples { .. }
        | Error::NegativeOccupancy { .. } => EXIT_SIMULATION,
        Error::NoFeasiblePoint | Error::FitDiverged { .. } => EXIT_FAILURE,
        _ => EXIT_VALIDATION,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::new(exit_code(&e), e.to_string())
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::new(EXIT_VALIDATION, e.to_string())
    }
}

impl From<DatasetError> for Failure {
    fn from(e: DatasetError) -> Self {
        Failure::new(EXIT_VALIDATION, e.to_string())
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::new(EXIT_VALIDATION, format!("{}: {e}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io_failure(path, e))
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), Failure> {
    let mut w = create(path)?;
    f(&mut w).and_then(|_| w.flush()).map_err(|e| io_failure(path, e))
}

fn emit(report: &Report, out: &Output) -> Result<(), Failure> {
    if let Some(path) = &out.report {
        write_file(path, |w| w.write_all(report.to_json().as_bytes()))?;
    }
    if out.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_table());
    }
    Ok(())
}

fn device_name(cfg: &LoadedConfig, path: &Path) -> String {
    cfg.config.name.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    })
}

pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Analyze(a) => analyze(&a),
        Command::Table1(a) => cmd_table1(&a),
        Command::Simulate(a) => simulate(&a),
        Command::Optimize(a) => optimize(&a),
        Command::Fit(a) => cmd_fit(&a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// Report of `analyze` without printing; errors carry their exit code.
pub fn analyze_report(cfg: &LoadedConfig, name: &str, spectral: bool) -> Result<Report, Failure> {
    let p = &cfg.params;
    let mut r = Report::new("analyze", Provenance::new().with_input("config", &cfg.bytes));
    r.device = Some(name.to_string());
    let d = occupation_budget(p)?;
    r.add_derived(&d);
    r.set("classical_bound", classical_bound(p)?, "1");
    let inp = OptInputs::from_params(p);
    let cooling_detuning = inp.validate().is_ok();
    if let Ok(b) = noise_bound(inp.gamma_c_over_alpha, inp.omega_m_tau) {
        r.set("noise_bound", b, "1");
    }
    r.set("coupling_a", coupling_a(p), "1");
    if cooling_detuning {
        r.set("a_opt", optimal_a(&inp)?, "1");
        r.set("noise_floor", noise_floor(&inp)?, "1");
        r.set("large_qc_limit", large_qc_limit(&inp)?, "1");
    }
    if spectral && p.cavity.power > 0.0 {
        r.set("n_quadrature", quadrature_occupancy(p, 1e-6)?, "1");
    }
    // Regime conditions for the quantum regime.
    r.flag("classical_bound_below_one", r.quantities["classical_bound"].value < 1.0);
    if cooling_detuning {
        let at_a = noise_population_a(&inp, coupling_a(p))?;
        r.flag("coupling_near_optimum", at_a <= 1.25 * noise_floor(&inp)?);
        r.flag(
            "floor_at_large_qc_limit",
            (noise_floor(&inp)? / large_qc_limit(&inp)? - 1.0).abs() <= 1e-2,
        );
    }
    r.flag("quantum_regime", d.n_tot < 1.0);
    r.notes.push(
        "frequencies and damping rates in rad/s; one-sided PSD with <x²> = (1/2π)∫S dω".into(),
    );
    Ok(r)
}

fn analyze(a: &AnalyzeArgs) -> Result<(), Failure> {
    let cfg = config::load(&a.config)?;
    let r = analyze_report(&cfg, &device_name(&cfg, &a.config), a.spectral)?;
    if let Some(path) = &a.spectrum {
        let p = &cfg.params;
        let spec = displacement_psd(p, &resonance_grid(p, 40)?)?;
        write_file(path, |w| write_spectrum_csv(&spec, w))?;
    }
    emit(&r, &a.output)
}

pub fn table1_report(configs: &[(String, LoadedConfig)]) -> Result<(Report, Vec<table1::Row>), Failure> {
    let mut prov = Provenance::new();
    let mut rows = Vec::new();
    for (name, cfg) in configs {
        prov = prov.with_input(&format!("config:{name}"), &cfg.bytes);
        let reference = cfg.config.reference.as_ref();
        rows.push(table1::row(
            name,
            &cfg.params,
            (reference.and_then(|r| r.n_th), reference.and_then(|r| r.n_c_min)),
        )?);
    }
    let mut r = Report::new("table1", prov);
    for row in &rows {
        for c in &row.cells {
            let tag = format!(
                "{}[{}K,{}]",
                row.device,
                c.convention.temperature_k,
                match c.convention.frequency {
                    table1::FrequencyReading::Angular => "angular",
                    table1::FrequencyReading::Literal => "literal",
                }
            );
            r.set(&format!("{tag}.n_th"), c.n_th, "1");
            r.set(&format!("{tag}.n_c_min"), c.n_c_min, "1");
        }
    }
    if let Some((i, factor)) = table1::best_convention(&rows) {
        let c = table1::Convention::ALL[i];
        r.notes.push(format!(
            "closest convention to the published columns: {} (worst-case factor {factor:.2})",
            c.label()
        ));
        r.set("worst_case_factor", factor, "1");
        r.flag("within_factor_3", factor < table1::AGREEMENT_FACTOR);
        for (j, conv) in table1::Convention::ALL.iter().enumerate() {
            if let Some(w) = table1::worst_log_ratio(&rows, j) {
                r.notes.push(format!("{}: worst-case factor {:.2}", conv.label(), w.exp()));
            }
        }
    }
    r.details = serde_json::to_value(&rows).expect("rows serialize");
    Ok((r, rows))
}

fn cmd_table1(a: &Table1Args) -> Result<(), Failure> {
    let mut configs = Vec::new();
    for path in &a.configs {
        let cfg = config::load(path)?;
        configs.push((device_name(&cfg, path), cfg));
    }
    let (r, rows) = table1_report(&configs)?;
    if let Some(path) = &a.output.report {
        write_file(path, |w| w.write_all(r.to_json().as_bytes()))?;
    }
    if a.output.json {
        println!("{}", r.to_json());
    } else {
        print!("{}", table1::render(&rows));
        for n in &r.notes {
            println!("note: {n}");
        }
    }
    Ok(())
}

fn member_path(base: &Path, member: u64) -> PathBuf {
    if member == 0 {
        base.to_path_buf()
    } else {
        let mut s = base.as_os_str().to_owned();
        s.push(format!(".{member}"));
        PathBuf::from(s)
    }
}

fn digest_file(path: &Path) -> Result<String, Failure> {
    std::fs::read(path)
        .map(|b| sha256_hex(&b))
        .map_err(|e| io_failure(path, e))
}

pub fn sim_config(a: &SimulateArgs, p: &SystemParams) -> Result<SimConfig, Failure> {
    let mut cfg = SimConfig::recommended(p, a.seed, a.relaxation_times)?;
    if let Some(dt) = a.dt {
        cfg.dt = dt;
        if a.record_stride.is_none() {
            cfg.record_stride = 1;
        }
    }
    if let Some(b) = a.t_burn_in {
        let span = cfg.t_total - cfg.t_burn_in;
        cfg.t_burn_in = b;
        cfg.t_total = b + span;
    }
    if let Some(t) = a.t_total {
        cfg.t_total = t;
    }
    if let Some(s) = a.record_stride {
        cfg.record_stride = s;
    }
    cfg.ensemble = a.ensemble;
    cfg.nonlinear_cavity = a.nonlinear;
    cfg.validate(p)?;
    Ok(cfg)
}

fn simulate(a: &SimulateArgs) -> Result<(), Failure> {
    let loaded = config::load(&a.config)?;
    let p = loaded.params;
    let cfg = sim_config(a, &p)?;
    let trajs = run_ensemble(&p, &cfg, a.jobs)?;

    let mut prov = Provenance::new().with_input("config", &loaded.bytes);
    prov.seed = Some(cfg.seed);
    prov.rng = Some(RNG_ALGORITHM.to_string());
    let mut r = Report::new("simulate", prov);
    r.device = Some(device_name(&loaded, &a.config));

    let mut outputs = serde_json::Map::new();
    for t in &trajs {
        if let Some(base) = &a.trajectory {
            let path = member_path(base, t.member);
            write_file(&path, |w| write_binary(t, w))?;
            let side = sidecar_path(&path);
            let json = serde_json::to_string_pretty(&Sidecar::new(t, &p)).expect("sidecar");
            write_file(&side, |w| w.write_all(json.as_bytes()))?;
            outputs.insert(path.display().to_string(), digest_file(&path)?.into());
        }
        if let Some(base) = &a.trajectory_csv {
            let path = member_path(base, t.member);
            write_file(&path, |w| write_csv(t, w))?;
            outputs.insert(path.display().to_string(), digest_file(&path)?.into());
        }
    }

    let est = estimate_occupancy(&trajs, &p)?;
    r.set("n_hat", est.n_hat, "1");
    r.set("n_hat_stderr", est.stderr, "1");
    r.set("blocks", est.blocks as f64, "1");
    r.set("dt", cfg.dt, "s");
    r.set("t_total", cfg.t_total, "s");
    r.set("t_burn_in", cfg.t_burn_in, "s");
    if let Ok(d) = occupation_budget(&p) {
        r.set("n_tot", d.n_tot, "1");
        r.flag("agrees_with_rate_equation", (est.n_hat - d.n_tot).abs() <= 3.0 * est.stderr);
    }
    if let Some(path) = &a.spectrum {
        let spec = welch_psd(&trajs, &p, a.segments)?;
        write_file(path, |w| write_spectrum_csv(&spec, w))?;
        outputs.insert(path.display().to_string(), digest_file(path)?.into());
    }
    r.details = serde_json::json!({ "config": cfg, "outputs": outputs });
    emit(&r, &a.output)
}

fn parse_free(spec: &str, p: &SystemParams) -> Result<(FreeParameter, (f64, f64)), Failure> {
    let (name, range) = match spec.split_once('=') {
        Some((n, r)) => (n, Some(r)),
        None => (spec, None),
    };
    let f = FreeParameter::from_name(name.trim()).ok_or_else(|| {
        Failure::new(
            EXIT_VALIDATION,
            format!("unknown free parameter `{name}` (tau, chi, detuning, power, alpha)"),
        )
    })?;
    let bounds = match range {
        Some(r) => {
            let (lo, hi) = r.split_once(':').ok_or_else(|| {
                Failure::new(EXIT_VALIDATION, format!("`{spec}`: expected NAME=LO:HI"))
            })?;
            let num = |s: &str| {
                s.trim().parse::<f64>().map_err(|_| {
                    Failure::new(EXIT_VALIDATION, format!("`{spec}`: `{s}` is not a number"))
                })
            };
            (num(lo)?, num(hi)?)
        }
        None => default_bounds(f, p)?,
    };
    Ok((f, bounds))
}

/// Two decades either side of the current value; the cooling interval for
/// the detuning; α capped at Γ_c.
fn default_bounds(f: FreeParameter, p: &SystemParams) -> Result<(f64, f64), Failure> {
    let v = f.get(p);
    match f {
        FreeParameter::Detuning => {
            let (lo, hi) = OptInputs::cooling_detunings(p.cavity.q_c())
                .ok_or(Error::HeatingDetuning { denominator: -0.25 })?;
            Ok((lo * 1.001, hi * 0.999))
        }
        _ if !(v > 0.0) => Err(Failure::new(
            EXIT_VALIDATION,
            format!("`{}` is zero in the config; give explicit bounds NAME=LO:HI", f.name()),
        )),
        FreeParameter::Alpha => Ok((v / 100.0, (v * 100.0).min(p.cavity.gamma_c))),
        _ => Ok((v / 100.0, v * 100.0)),
    }
}

pub fn optimize_report(
    cfg: &LoadedConfig,
    free: &[String],
    objective: ObjectiveArg,
) -> Result<Report, Failure> {
    let p = &cfg.params;
    let mut r = Report::new("optimize", Provenance::new().with_input("config", &cfg.bytes));
    let inp = OptInputs::from_params(p);
    r.set("classical_bound", classical_bound(p)?, "1");
    r.set("noise_bound", noise_bound(inp.gamma_c_over_alpha, inp.omega_m_tau)?, "1");
    if inp.validate().is_ok() {
        r.set("a_opt", optimal_a(&inp)?, "1");
        r.set("noise_floor", noise_floor(&inp)?, "1");
        r.set("large_qc_limit", large_qc_limit(&inp)?, "1");
        let (d_star, floor) = optimal_detuning(inp.gamma_c_over_alpha, inp.omega_m_tau, inp.q_c)?;
        r.set("optimal_detuning_tilde", d_star, "1");
        r.set("noise_floor_at_optimal_detuning", floor, "1");
    }
    if free.is_empty() {
        return Ok(r);
    }
    let mut params = Vec::new();
    let mut bounds = Vec::new();
    for s in free {
        let (f, b) = parse_free(s, p)?;
        params.push(f);
        bounds.push(b);
    }
    let objective = match objective {
        ObjectiveArg::Approximate => Objective::Approximate,
        ObjectiveArg::RateEquation => Objective::RateEquation,
        ObjectiveArg::Noise => Objective::Noise,
    };
    let opt = joint_optimize(p, &params, &bounds, objective)?;
    for (f, v) in opt.free.iter().zip(&opt.values) {
        let unit = match f {
            FreeParameter::Tau => "s",
            FreeParameter::Chi => "s/m",
            FreeParameter::Detuning => "1",
            FreeParameter::Power => "W",
            FreeParameter::Alpha => "rad/s",
        };
        r.set(&format!("optimum.{}", f.name()), *v, unit);
    }
    r.set("optimum.omega_m_tau", opt.params.cantilever.omega_m * opt.params.cantilever.tau, "1");
    r.set("optimum.objective", opt.objective_value, "1");
    r.set("optimum.n_tot", opt.n_tot, "1");
    r.set("optimum.n_classical", opt.n_classical, "1");
    r.set("optimum.n_noise", opt.n_noise, "1");
    r.set("optimum.a", opt.a, "1");
    r.set("optimum.a_opt", opt.noise.a_opt, "1");
    r.flag("classical_bound_active", opt.noise.limit_flags.classical_bound);
    r.flag("noise_bound_active", opt.noise.limit_flags.noise_bound);
    r.flag("large_qc_limit_active", opt.noise.limit_flags.large_qc);
    r.details = serde_json::json!({ "input": config::DeviceConfig::from_params(p), "result": opt });
    Ok(r)
}

fn optimize(a: &OptimizeArgs) -> Result<(), Failure> {
    let cfg = config::load(&a.config)?;
    let mut r = optimize_report(&cfg, &a.free, a.objective)?;
    r.device = Some(device_name(&cfg, &a.config));
    emit(&r, &a.output)
}

pub fn fit_report(
    cfg: &LoadedConfig,
    data_path: &Path,
    free: FreeSetArg,
    initial_chi: Option<f64>,
) -> Result<Report, Failure> {
    let bytes = std::fs::read(data_path).map_err(|e| io_failure(data_path, e))?;
    let data = dataset::to_dataset(dataset::parse_rows(bytes.as_slice())?, cfg.params)?;
    let free = match free {
        FreeSetArg::Chi => FreeSet::Chi,
        FreeSetArg::ChiEpsilon => FreeSet::ChiEpsilon,
        FreeSetArg::ChiEpsilonLossRatio => FreeSet::ChiEpsilonLossRatio,
    };
    let res = fit(&data, free, initial_chi.unwrap_or(cfg.params.cantilever.chi))?;
    let prov = Provenance::new()
        .with_input("config", &cfg.bytes)
        .with_input("data", &bytes);
    let mut r = Report::new("fit", prov);
    r.set("chi_hat", res.chi_hat, "s/m");
    r.set("epsilon_hat", res.epsilon_hat, "1");
    r.set("gamma_c_over_alpha_hat", res.loss_ratio_hat, "1");
    r.set("n_noise_implied", res.n_noise_implied, "1");
    r.set("chi2_per_dof", res.chi2_per_dof, "1");
    r.set("iterations", res.iterations as f64, "1");
    r.set("max_power", data.max_power(), "W");
    for (name, se) in free.names().iter().zip(res.std_errors.iter().flatten()) {
        let unit = if *name == "chi" { "s/m" } else { "1" };
        r.set(&format!("std_error.{name}"), *se, unit);
    }
    r.flag("weakly_identifiable", res.weakly_identifiable);
    r.details = serde_json::json!({ "result": res });
    Ok(r)
}

fn cmd_fit(a: &FitArgs) -> Result<(), Failure> {
    let cfg = config::load(&a.config)?;
    let mut r = fit_report(&cfg, &a.data, a.free, a.initial_chi)?;
    r.device = Some(device_name(&cfg, &a.config));
    emit(&r, &a.output)
}
