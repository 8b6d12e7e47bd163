//! Command-line front end. `run` parses arguments, dispatches to the library
//! and maps failures to exit codes.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::dynamics::fock::{evolve_fock, FockState};
use crate::dynamics::{
    default_horizon, integrate_elementwise, integrate_linear, integrate_reduced, step_bound, Integrator, Trajectory,
};
use crate::error::{Error, Result};
use crate::liouvillian::{build_reduced, pack, LinearSystem, ReducedSystem};
use crate::observables::ObservableSet;
use crate::output::fmt_num;
use crate::params::{ParamFile, SystemParams};
use crate::statespace::{from_bd, to_bd, BdDensity, XDensityMatrix, X_STATE_COLUMNS};
use crate::steadystate::{analytic, numeric_steady, steady_csv_header, SteadyStateResult};
use crate::sweep::{figure_spec, run_sweep, Axis, FigureId, FigureRanges, SweepSpec, SweepTable};
use crate::validation::{run_validation, DEFAULT_SEED};

pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "modecoupler", version, about = "Two dissipative bosonic modes with resonant and pair-creation coupling")]
pub struct Cli {
    /// Interpret rates as multiples of ω (ω = 1); parameter files are rescaled.
    #[arg(long, global = true)]
    pub normalized: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steady state from the closed forms and from the linear solve.
    Steady(SteadyArgs),
    /// Time evolution from p|d><d| + (1-p)|00><00|.
    Evolve(EvolveArgs),
    /// Steady states and observables over one or two parameter axes.
    Sweep(SweepArgs),
    /// Dataset behind one of the published figures (ω = 1).
    Figure(FigureArgs),
    /// Built-in consistency checks.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// JSON parameter file; flags given alongside override its entries.
    #[arg(long = "params", value_name = "FILE")]
    pub file: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    #[arg(long = "gamma-a", allow_negative_numbers = true)]
    pub gamma_a: Option<f64>,
    #[arg(long = "gamma-b", allow_negative_numbers = true)]
    pub gamma_b: Option<f64>,
    /// Cross-damping rate.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Angle between the dipoles; sets γ = sqrt(γA γB) cos θ.
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SteadyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Initial |d> population, needed when γA = γB = γ.
    #[arg(long)]
    pub pdd0: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Linear,
    Elementwise,
    Reduced,
    Fock,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Defaults to 50 times the slowest relaxation time.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Defaults to the stability bound 0.05 / max(ω, κ, ε, γ0).
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Initial |d> population; the rest starts in the vacuum.
    #[arg(long, default_value_t = 0.0)]
    pub pdd0: f64,
    #[arg(long, value_enum, default_value = "linear")]
    pub method: Method,
    /// Fock truncation for `--method fock`.
    #[arg(long, default_value_t = 1)]
    pub n_max: usize,
    /// Stop once max |dY/dt| drops below this.
    #[arg(long)]
    pub stop_tol: Option<f64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// `name=min:max:count[:log]`; give one or two.
    #[arg(long = "axis", required = true, num_args = 1)]
    pub axes: Vec<String>,
    /// Comma-separated observable columns (default: all).
    #[arg(long, value_delimiter = ',')]
    pub outputs: Vec<String>,
    /// Initial |d> population for singular points.
    #[arg(long, default_value_t = 0.0, conflicts_with = "skip_singular")]
    pub pdd0: f64,
    /// Leave singular points unevaluated instead of using --pdd0.
    #[arg(long)]
    pub skip_singular: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    /// fig2, fig3a-c, fig4a-c, fig5 or fig6a-c.
    pub id: String,
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
    /// `min:max` of the first axis.
    #[arg(long, allow_hyphen_values = true)]
    pub range_first: Option<String>,
    /// `min:max` of the second axis.
    #[arg(long, allow_hyphen_values = true)]
    pub range_second: Option<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Print the full report as JSON.
    #[arg(long)]
    pub json: bool,
}

impl ParamArgs {
    pub fn resolve(&self, normalized: bool) -> Result<SystemParams> {
        let mut file = match &self.file {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                serde_json::from_str::<ParamFile>(&text).map_err(|e| Error::domain("parameter file", e.to_string()))?
            }
            None => {
                let need = |v: Option<f64>, name: &str| {
                    v.ok_or_else(|| Error::domain(name, "missing; pass the flag or --params FILE"))
                };
                ParamFile {
                    omega: self.omega.unwrap_or(1.0),
                    kappa: need(self.kappa, "kappa")?,
                    epsilon: need(self.epsilon, "epsilon")?,
                    gamma_a: need(self.gamma_a, "gamma_a")?,
                    gamma_b: need(self.gamma_b, "gamma_b")?,
                    theta: None,
                    gamma: None,
                }
            }
        };
        if normalized && self.file.is_none() && self.omega.is_some_and(|w| w != 1.0) {
            return Err(Error::domain("omega", "with --normalized ω is the unit and must be 1"));
        }
        for (slot, flag) in [
            (&mut file.omega, self.omega),
            (&mut file.kappa, self.kappa),
            (&mut file.epsilon, self.epsilon),
            (&mut file.gamma_a, self.gamma_a),
            (&mut file.gamma_b, self.gamma_b),
        ] {
            if let Some(v) = flag {
                *slot = v;
            }
        }
        if let Some(t) = self.theta {
            file.theta = Some(t);
            file.gamma = None;
        }
        if let Some(g) = self.gamma {
            file.gamma = Some(g);
        }
        let params = SystemParams::try_from(file)?;
        Ok(if normalized { params.in_units_of_omega() } else { params })
    }
}

/// Rounds every number to 12 significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => fmt_num(x).parse::<f64>().map(Value::from).unwrap_or(Value::Null),
            _ => Value::Number(n),
        },
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn json_bytes(v: Value) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(&round_json(v))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn emit(bytes: &[u8], path: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

fn steady(args: &SteadyArgs, normalized: bool, stdout: &mut dyn Write) -> Result<()> {
    let params = args.params.resolve(normalized)?;
    let closed = analytic(&params, args.pdd0)?;
    let solved = numeric_steady(&params, args.pdd0)?;
    let dev = closed.rho.max_abs_diff(&solved.rho);
    let bytes = match args.out.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["method"];
            header.extend(steady_csv_header());
            header.push("max_abs_deviation");
            w.write_record(&header)?;
            for (name, r) in [("analytic", &closed), ("numeric", &solved)] {
                let mut rec = vec![name.to_string()];
                rec.extend(r.csv_record(fmt_num));
                rec.push(fmt_num(dev));
                w.write_record(&rec)?;
            }
            w.into_inner().map_err(|e| Error::Io(e.into_error()))?
        }
        Format::Json => json_bytes(json!({
            "params": params,
            "analytic": steady_json(&closed),
            "numeric": steady_json(&solved),
            "max_abs_deviation": dev,
            "observables": ObservableSet::from_state(&closed.rho),
        }))?,
    };
    emit(&bytes, args.out.output.as_deref(), stdout)
}

fn steady_json(r: &SteadyStateResult) -> Value {
    let mut v = json!({
        "regime": r.regime,
        "denominator": r.denominator,
        "singular": r.singular,
        "initial_pdd": r.initial_pdd,
    });
    for (k, x) in X_STATE_COLUMNS.iter().zip(r.rho.csv_values()) {
        v[*k] = json!(x);
    }
    v
}

fn initial_state(params: &SystemParams, pdd0: f64) -> Result<XDensityMatrix> {
    if !(0.0..=1.0).contains(&pdd0) {
        return Err(Error::domain("pdd0", format!("must lie in [0, 1], got {pdd0}")));
    }
    if pdd0 == 0.0 {
        return Ok(XDensityMatrix::vacuum());
    }
    let vac = to_bd(&XDensityMatrix::vacuum(), params.gamma_a(), params.gamma_b())?;
    from_bd(&BdDensity { p11: 1.0 - pdd0, p_dd: pdd0, ..vac }, params.gamma_a(), params.gamma_b())
}

fn evolve(args: &EvolveArgs, normalized: bool, stdout: &mut dyn Write) -> Result<()> {
    let params = args.params.resolve(normalized)?;
    let sys = LinearSystem::build(&params);
    let t_end = match args.t_end {
        Some(t) => t,
        None => default_horizon(&sys)?,
    };
    let dt = args.dt.unwrap_or_else(|| step_bound(&params));
    if args.samples == 0 {
        return Err(Error::domain("samples", "must be positive"));
    }
    let mut opts = Integrator::sampled(dt, t_end, args.samples);
    if let Some(tol) = args.stop_tol {
        opts = opts.with_stop_tol(tol);
    }
    let rho0 = initial_state(&params, args.pdd0)?;
    let traj = match args.method {
        Method::Linear => integrate_linear(&sys, &pack(&rho0), t_end, &opts)?,
        Method::Elementwise => integrate_elementwise(&params, &rho0, t_end, &opts)?,
        Method::Reduced => {
            let reduced = build_reduced(&params)?;
            let z0 = ReducedSystem::pack(&to_bd(&rho0, params.gamma_a(), params.gamma_b())?);
            integrate_reduced(&reduced, &z0, t_end, &opts)?
        }
        Method::Fock => {
            if args.stop_tol.is_some() {
                return Err(Error::domain("stop_tol", "not supported with --method fock"));
            }
            let f0 = FockState::from_x(&rho0, args.n_max, params.omega(), 0.0);
            let f = evolve_fock(&params, args.n_max, &f0, t_end, &opts)?;
            let states = f.times.iter().zip(&f.states).map(|(t, s)| s.to_x(params.omega(), *t)).collect();
            Trajectory { times: f.times, states, params, dt: f.dt, method: "rk4-fock" }
        }
    };
    let bytes = match args.out.format {
        Format::Csv => {
            let mut buf = Vec::new();
            traj.write_csv(&mut buf, fmt_num)?;
            buf
        }
        Format::Json => {
            let states: Vec<Value> = traj
                .states
                .iter()
                .map(|s| {
                    let mut v = json!({});
                    for (k, x) in X_STATE_COLUMNS.iter().zip(s.csv_values()) {
                        v[*k] = json!(x);
                    }
                    v
                })
                .collect();
            json_bytes(json!({
                "params": params,
                "method": traj.method,
                "dt": traj.dt,
                "times": traj.times,
                "states": states,
            }))?
        }
    };
    emit(&bytes, args.out.output.as_deref(), stdout)
}

fn table_json(table: &SweepTable) -> Result<Value> {
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    let mut reader = csv::Reader::from_reader(buf.as_slice());
    let header = reader.headers()?.clone();
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let mut row = serde_json::Map::new();
        for (k, v) in header.iter().zip(rec.iter()) {
            let cell = if v.is_empty() {
                Value::Null
            } else if let Ok(x) = v.parse::<f64>() {
                json!(x)
            } else {
                json!(v)
            };
            row.insert(k.to_string(), cell);
        }
        rows.push(Value::Object(row));
    }
    let meta: Value = serde_json::from_str(&table.sidecar_json()?)?;
    Ok(json!({ "meta": meta, "rows": rows }))
}

fn write_table(table: &SweepTable, out: &OutputArgs, stdout: &mut dyn Write) -> Result<()> {
    match (out.format, &out.output) {
        (Format::Csv, Some(path)) => {
            table.write_files(path)?;
        }
        (Format::Csv, None) => table.write_csv(stdout)?,
        (Format::Json, path) => emit(&json_bytes(table_json(table)?)?, path.as_deref(), stdout)?,
    }
    Ok(())
}

fn sweep(args: &SweepArgs, normalized: bool, stdout: &mut dyn Write) -> Result<()> {
    let base = args.params.resolve(normalized)?;
    let axes = args.axes.iter().map(|a| a.parse::<Axis>()).collect::<Result<Vec<_>>>()?;
    let mut spec = SweepSpec::new(base, axes)?;
    if !args.outputs.is_empty() {
        let cols: Vec<&str> = args.outputs.iter().map(|s| s.trim()).collect();
        spec = spec.with_outputs(&cols)?;
    }
    spec = spec.with_pdd0(if args.skip_singular { None } else { Some(args.pdd0) })?;
    write_table(&run_sweep(&spec)?, &args.out, stdout)
}

fn parse_range(text: Option<&str>, flag: &str) -> Result<Option<(f64, f64)>> {
    let Some(t) = text else { return Ok(None) };
    let bad = || Error::domain(flag, format!("expected min:max, got `{t}`"));
    let (a, b) = t.split_once(':').ok_or_else(bad)?;
    Ok(Some((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)))
}

fn figure(args: &FigureArgs, stdout: &mut dyn Write) -> Result<()> {
    let id: FigureId = args.id.parse()?;
    let ranges = FigureRanges {
        first: parse_range(args.range_first.as_deref(), "range_first")?,
        second: parse_range(args.range_second.as_deref(), "range_second")?,
    };
    let table = run_sweep(&figure_spec(id, args.resolution, ranges)?)?;
    write_table(&table, &args.out, stdout)
}

fn validate(args: &ValidateArgs, stdout: &mut dyn Write) -> Result<bool> {
    let report = run_validation(args.seed);
    if args.json {
        stdout.write_all(&json_bytes(serde_json::to_value(&report)?)?)?;
    } else {
        writeln!(stdout, "seed {}", report.seed)?;
        for s in &report.suites {
            let status = if s.failed == 0 { "PASS" } else { "FAIL" };
            writeln!(
                stdout,
                "[{status}] {}: {} passed, {} failed (worst {}, tolerance {})",
                s.name,
                s.passed,
                s.failed,
                fmt_num(s.worst),
                fmt_num(s.tolerance)
            )?;
            for f in &s.failures {
                writeln!(stdout, "    {f}")?;
            }
        }
    }
    Ok(report.passed())
}

fn exit_code(e: &Error) -> i32 {
    if e.is_domain() {
        EXIT_DOMAIN
    } else {
        EXIT_IO
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_DOMAIN
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let outcome = match &cli.command {
        Command::Steady(a) => steady(a, cli.normalized, stdout).map(|_| true),
        Command::Evolve(a) => evolve(a, cli.normalized, stdout).map(|_| true),
        Command::Sweep(a) => sweep(a, cli.normalized, stdout).map(|_| true),
        Command::Figure(a) => figure(a, stdout).map(|_| true),
        Command::Validate(a) => validate(a, stdout),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => EXIT_VALIDATION,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
