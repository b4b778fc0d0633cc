//! Command-line front end: regenerates the reference-figure data as CSV,
//! runs the cross-verification suite, evolves arbitrary parameter sets and
//! prints stationary values.
//!
//! Exit status contract: 0 success, 1 verification failure, 2 usage error,
//! 3 I/O error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::closedform::{self, ClosedFormError};
use crate::dynamics::{self, SpectralPropagator};
use crate::entanglement::{self, EntanglementError};
use crate::linalg::{ComplexMatrix, DensityMatrix, LinalgError};
use crate::model::{self, FockAtomBasis, InitialKind, ModelError, ModelParams};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Dynamics(#[from] dynamics::DynamicsError),
    #[error(transparent)]
    Entanglement(#[from] EntanglementError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
    #[error("at t = {time}: {source}")]
    AtTime {
        time: f64,
        #[source]
        source: Box<CliError>,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            _ => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "cavity-dephasing",
    version,
    about = "Two cavity modes and a two-level atom under pure phase decoherence"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Regenerate the data behind one of the six reference figures as CSV
    Figure(FigureArgs),
    /// Run the cross-verification suite and exit nonzero on any failure
    Verify(VerifyArgs),
    /// Evolve one parameter set and emit observables over a time grid
    Evolve(EvolveArgs),
    /// Print the long-time values (requires γ > 0)
    Steady(SteadyArgs),
}

#[derive(Args, Clone)]
struct ParamArgs {
    /// Coupling of the atom to mode a
    #[arg(long = "ga", default_value_t = 1.0)]
    g_a: f64,
    /// Coupling of the atom to mode b
    #[arg(long = "gb", default_value_t = 1.0)]
    g_b: f64,
    /// Detuning Δ = ω₀ − ω
    #[arg(long)]
    delta: Option<f64>,
    /// Phase decoherence rate γ
    #[arg(long)]
    gamma: Option<f64>,
    /// Common mode frequency ω (the atomic frequency is ω + Δ)
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Initial ground-state admixture of the atom, in [0, 1]
    #[arg(long = "delta-mix", default_value_t = 0.0)]
    delta_mix: f64,
}

impl ParamArgs {
    fn build(
        &self,
        default_delta: f64,
        default_gamma: f64,
    ) -> Result<(ModelParams, f64), CliError> {
        if !(0.0..=1.0).contains(&self.delta_mix) {
            return Err(CliError::Usage(format!(
                "--delta-mix must lie in [0, 1], got {}",
                self.delta_mix
            )));
        }
        let delta = self.delta.unwrap_or(default_delta);
        let gamma = self.gamma.unwrap_or(default_gamma);
        let params = ModelParams::from_detuning(self.omega, delta, self.g_a, self.g_b, gamma)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok((params, self.delta_mix))
    }
}

#[derive(Args, Clone)]
struct GridArgs {
    /// End of the time grid; for figures 3 and 6 the fixed evaluation time
    #[arg(long)]
    tmax: Option<f64>,
    /// Grid points per axis (endpoints included)
    #[arg(long)]
    points: Option<usize>,
    /// Upper end of the γ axis on figure surfaces
    #[arg(long = "gamma-max", default_value_t = 1.0)]
    gamma_max: f64,
    /// Upper end of the Δ axis on figures 3 and 4
    #[arg(long = "delta-max", default_value_t = 10.0)]
    delta_max: f64,
    /// Integrator step for --method rk4
    #[arg(long, default_value_t = 1e-4)]
    dt: f64,
}

impl GridArgs {
    fn check(&self) -> Result<(), CliError> {
        if let Some(n) = self.points {
            if n < 2 {
                return Err(CliError::Usage(format!("--points must be ≥ 2, got {n}")));
            }
        }
        if let Some(t) = self.tmax {
            if t <= 0.0 {
                return Err(CliError::Usage(format!("--tmax must be positive, got {t}")));
            }
        }
        if self.dt <= 0.0 {
            return Err(CliError::Usage(format!(
                "--dt must be positive, got {}",
                self.dt
            )));
        }
        if self.gamma_max < 0.0 || self.delta_max < 0.0 {
            return Err(CliError::Usage("axis maxima must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum Method {
    /// Closed-form solution (default, fast)
    Closed,
    /// Exact propagation in the Hamiltonian eigenbasis (reference)
    Spectral,
    /// Fixed-step RK4 integration of the master equation
    Rk4,
}

impl Method {
    fn name(&self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::Spectral => "spectral",
            Method::Rk4 => "rk4",
        }
    }
}

#[derive(Args)]
struct FigureArgs {
    /// Figure number, 1 through 6
    id: u8,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Evaluation engine
    #[arg(long, value_enum, default_value_t = Method::Closed)]
    method: Method,
    /// Output CSV path (default figure_<id>.csv)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Flip the oscillatory coherence sign in the closed form (mutation test)
    #[arg(long, hide = true)]
    inject_sign_flip: bool,
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Evaluation engine
    #[arg(long, value_enum, default_value_t = Method::Closed)]
    method: Method,
    /// Output CSV path
    #[arg(long, default_value = "evolve.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct SteadyArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Optional CSV output path
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses the process arguments and runs the selected command, returning the
/// process exit code.
pub fn main_entry() -> u8 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Figure(args) => cmd_figure(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Evolve(args) => cmd_evolve(args),
        Command::Steady(args) => cmd_steady(args),
    }
}

// ---------------------------------------------------------------------------
// shared helpers

fn linspace(from: f64, to: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| from + (to - from) * i as f64 / (n - 1) as f64)
        .collect()
}

/// 12 significant digits, deterministic.
fn fmt(x: f64) -> String {
    format!("{x:.11e}")
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    println!("wrote {}", path.display());
    Ok(())
}

fn param_comment(p: &ModelParams, delta_mix: f64, method: Method) -> String {
    format!(
        "# ga={} gb={} delta={} gamma={} omega={} delta_mix={} method={}\n",
        p.g_a(),
        p.g_b(),
        p.delta(),
        p.gamma(),
        p.omega(),
        delta_mix,
        method.name()
    )
}

/// All per-sample observables of one state.
struct Observables {
    ground_probability: f64,
    atom_fields: f64,
    fields: f64,
    atom_mode_a: f64,
    atom_mode_b: f64,
    purity: f64,
    trace: f64,
}

fn observables_closed(p: &ModelParams, t: f64, delta_mix: f64) -> Observables {
    let c_ab = closedform::concurrence_atom_fields(p, t, delta_mix);
    let g = p.g();
    let state = closedform::closed_state(p, t, delta_mix);
    Observables {
        ground_probability: closedform::ground_probability(p, t, delta_mix),
        atom_fields: c_ab,
        fields: closedform::concurrence_fields(p, t, delta_mix),
        atom_mode_a: p.g_a().abs() / g * c_ab,
        atom_mode_b: p.g_b().abs() / g * c_ab,
        purity: state.purity(),
        trace: state.trace_re(),
    }
}

fn observables_from_state(
    state: &DensityMatrix,
    p: &ModelParams,
    basis: &FockAtomBasis,
) -> Result<Observables, CliError> {
    let pairwise = entanglement::pairwise_concurrences(state, p, basis)?;
    Ok(Observables {
        ground_probability: model::ground_population(state.matrix(), basis),
        atom_fields: pairwise.atom_fields,
        fields: entanglement::field_concurrence(state, basis)?,
        atom_mode_a: pairwise.atom_mode_a,
        atom_mode_b: pairwise.atom_mode_b,
        purity: state.purity(),
        trace: state.trace_re(),
    })
}

/// Observables over a time grid for one parameter set and engine.
fn observables_over_grid(
    p: &ModelParams,
    delta_mix: f64,
    ts: &[f64],
    method: Method,
    dt: f64,
) -> Result<Vec<Observables>, CliError> {
    match method {
        Method::Closed => Ok(ts
            .iter()
            .map(|&t| observables_closed(p, t, delta_mix))
            .collect()),
        Method::Spectral => {
            let basis = FockAtomBasis::new(2);
            let h = model::build_hamiltonian(p, &basis);
            let rho0 = model::initial_state(InitialKind::ThermalVacuum(delta_mix), &basis)?;
            let prop = SpectralPropagator::new(&h)?;
            ts.iter()
                .map(|&t| {
                    let state = prop.propagate(&rho0, p.gamma(), t).map_err(CliError::from);
                    state
                        .and_then(|s| observables_from_state(&s, p, &basis))
                        .map_err(|e| at_time(t, e))
                })
                .collect()
        }
        Method::Rk4 => {
            let basis = FockAtomBasis::new(2);
            let h = model::build_hamiltonian(p, &basis);
            let rho0 = model::initial_state(InitialKind::ThermalVacuum(delta_mix), &basis)?;
            let traj = dynamics::integrate_master_equation(&h, &rho0, p.gamma(), ts, dt)?;
            traj.iter()
                .map(|(t, state)| {
                    observables_from_state(state, p, &basis).map_err(|e| at_time(t, e))
                })
                .collect()
        }
    }
}

fn at_time(time: f64, source: CliError) -> CliError {
    CliError::AtTime {
        time,
        source: Box::new(source),
    }
}

// ---------------------------------------------------------------------------
// figure command

fn cmd_figure(args: FigureArgs) -> Result<(), CliError> {
    args.grid.check()?;
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("figure_{}.csv", args.id)));
    let content = match args.id {
        1 => figure_probability_curves(&args)?,
        2 => figure_surface(&args, SurfaceKind::AtomFieldsVsTime)?,
        3 => figure_surface(&args, SurfaceKind::AtomFieldsVsDetuning)?,
        4 => figure_stationary_curve(&args)?,
        5 => figure_surface(&args, SurfaceKind::FieldsVsTime)?,
        6 => figure_field_concurrence_curves(&args)?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown figure id {other}; expected 1..6"
            )))
        }
    };
    write_file(&out, &content)
}

/// Figure 1: P_g(t) for γ ∈ {1, 0, 0.01, 0.05} at Δ=0, g_a=g_b=1.
fn figure_probability_curves(args: &FigureArgs) -> Result<String, CliError> {
    const GAMMAS: [f64; 4] = [1.0, 0.0, 0.01, 0.05];
    let (base, delta_mix) = args.params.build(0.0, 0.0)?;
    let t_max = args.grid.tmax.unwrap_or(10.0);
    let n = args.grid.points.unwrap_or(1001);
    let ts = linspace(0.0, t_max, n);

    let mut columns = Vec::new();
    for gamma in GAMMAS {
        let p =
            ModelParams::from_detuning(base.omega(), base.delta(), base.g_a(), base.g_b(), gamma)
                .map_err(|e| CliError::Usage(e.to_string()))?;
        let obs = observables_over_grid(&p, delta_mix, &ts, args.method, args.grid.dt)?;
        columns.push(
            obs.into_iter()
                .map(|o| o.ground_probability)
                .collect::<Vec<_>>(),
        );
    }

    let mut out = String::from("# figure 1: ground-state probability vs time\n");
    out.push_str(&param_comment(&base, delta_mix, args.method));
    let _ = writeln!(out, "# tmax={t_max} points={n} curves gamma={GAMMAS:?}");
    out.push_str("t,Pg_gamma1,Pg_gamma0,Pg_gamma0.01,Pg_gamma0.05\n");
    for (i, &t) in ts.iter().enumerate() {
        let row: Vec<String> = std::iter::once(fmt(t))
            .chain(columns.iter().map(|c| fmt(c[i])))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

enum SurfaceKind {
    /// Figure 2: C_AB over (t, γ) at Δ=5.
    AtomFieldsVsTime,
    /// Figure 3: C_AB over (Δ, γ) at fixed t=10.
    AtomFieldsVsDetuning,
    /// Figure 5: C_B over (t, γ) at Δ=0.
    FieldsVsTime,
}

fn figure_surface(args: &FigureArgs, kind: SurfaceKind) -> Result<String, CliError> {
    let n = args.grid.points.unwrap_or(101);
    let gammas = linspace(0.0, args.grid.gamma_max, n);
    let (title, default_delta) = match kind {
        SurfaceKind::AtomFieldsVsTime => {
            ("# figure 2: atom-fields concurrence over (t, gamma)", 5.0)
        }
        SurfaceKind::AtomFieldsVsDetuning => (
            "# figure 3: atom-fields concurrence over (delta, gamma)",
            0.0,
        ),
        SurfaceKind::FieldsVsTime => ("# figure 5: field-field concurrence over (t, gamma)", 0.0),
    };
    let (base, delta_mix) = args.params.build(default_delta, 0.0)?;

    let mut out = String::new();
    let _ = writeln!(out, "{title}");
    out.push_str(&param_comment(&base, delta_mix, args.method));

    match kind {
        SurfaceKind::AtomFieldsVsTime | SurfaceKind::FieldsVsTime => {
            let t_max = args.grid.tmax.unwrap_or(10.0);
            let ts = linspace(0.0, t_max, n);
            let _ = writeln!(
                out,
                "# tmax={t_max} gamma_max={} points={n}",
                args.grid.gamma_max
            );
            let field_kind = matches!(kind, SurfaceKind::FieldsVsTime);
            out.push_str(if field_kind {
                "t,gamma,C_B\n"
            } else {
                "t,gamma,C_AB\n"
            });
            // grid[γ][t], computed per γ so rk4 integrates each row once
            let mut grid = vec![vec![0.0_f64; ts.len()]; gammas.len()];
            for (gi, &gamma) in gammas.iter().enumerate() {
                let p = ModelParams::from_detuning(
                    base.omega(),
                    base.delta(),
                    base.g_a(),
                    base.g_b(),
                    gamma,
                )
                .map_err(|e| CliError::Usage(e.to_string()))?;
                let obs = observables_over_grid(&p, delta_mix, &ts, args.method, args.grid.dt)?;
                for (ti, o) in obs.into_iter().enumerate() {
                    grid[gi][ti] = if field_kind { o.fields } else { o.atom_fields };
                }
            }
            for (ti, &t) in ts.iter().enumerate() {
                for (gi, &gamma) in gammas.iter().enumerate() {
                    let _ = writeln!(out, "{},{},{}", fmt(t), fmt(gamma), fmt(grid[gi][ti]));
                }
            }
        }
        SurfaceKind::AtomFieldsVsDetuning => {
            let t_eval = args.grid.tmax.unwrap_or(10.0);
            let deltas = linspace(0.0, args.grid.delta_max, n);
            let _ = writeln!(
                out,
                "# t={t_eval} delta_max={} gamma_max={} points={n}",
                args.grid.delta_max, args.grid.gamma_max
            );
            out.push_str("delta,gamma,C_AB\n");
            for &delta in &deltas {
                let row_grid = [0.0, t_eval];
                for &gamma in &gammas {
                    let p = ModelParams::from_detuning(
                        base.omega(),
                        delta,
                        base.g_a(),
                        base.g_b(),
                        gamma,
                    )
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                    let value = match args.method {
                        Method::Closed => {
                            closedform::concurrence_atom_fields(&p, t_eval, delta_mix)
                        }
                        _ => {
                            let obs = observables_over_grid(
                                &p,
                                delta_mix,
                                &row_grid,
                                args.method,
                                args.grid.dt,
                            )?;
                            obs.last().unwrap().atom_fields
                        }
                    };
                    let _ = writeln!(out, "{},{},{}", fmt(delta), fmt(gamma), fmt(value));
                }
            }
        }
    }
    Ok(out)
}

/// Figure 4: long-time C_AB vs Δ at γ=0.1.
fn figure_stationary_curve(args: &FigureArgs) -> Result<String, CliError> {
    if args.method == Method::Rk4 {
        return Err(CliError::Usage(
            "figure 4 evaluates the long-time limit; use --method closed or spectral".into(),
        ));
    }
    let (base, delta_mix) = args.params.build(0.0, 0.1)?;
    if base.gamma() <= 0.0 {
        return Err(CliError::Usage(
            "figure 4 needs γ > 0: no stationary state exists for γ = 0".into(),
        ));
    }
    let n = args.grid.points.unwrap_or(1001);
    let deltas = linspace(0.0, args.grid.delta_max, n);

    let mut out = String::from("# figure 4: long-time atom-fields concurrence vs detuning\n");
    out.push_str(&param_comment(&base, delta_mix, args.method));
    let _ = writeln!(out, "# delta_max={} points={n}", args.grid.delta_max);
    out.push_str("delta,C_AB\n");
    for &delta in &deltas {
        let p =
            ModelParams::from_detuning(base.omega(), delta, base.g_a(), base.g_b(), base.gamma())
                .map_err(|e| CliError::Usage(e.to_string()))?;
        let value = match args.method {
            Method::Closed => closedform::stationary_values(&p, delta_mix)?.concurrence_atom_fields,
            _ => {
                let basis = FockAtomBasis::new(2);
                let h = model::build_hamiltonian(&p, &basis);
                let rho0 = model::initial_state(InitialKind::ThermalVacuum(delta_mix), &basis)?;
                let t = closedform::stationary_time_proxy(&p);
                let state = dynamics::spectral_propagate(&h, &rho0, p.gamma(), t)?;
                entanglement::extract_atom_field_qubits(&state, &p, &basis)?.concurrence()?
            }
        };
        let _ = writeln!(out, "{},{}", fmt(delta), fmt(value));
    }
    Ok(out)
}

/// Figure 6: C_B(γ) at t=2 for Δ ∈ {0, 1, 2}.
fn figure_field_concurrence_curves(args: &FigureArgs) -> Result<String, CliError> {
    const DELTAS: [f64; 3] = [0.0, 1.0, 2.0];
    let (base, delta_mix) = args.params.build(0.0, 0.0)?;
    let t_eval = args.grid.tmax.unwrap_or(2.0);
    let n = args.grid.points.unwrap_or(1001);
    let gammas = linspace(0.0, args.grid.gamma_max, n);

    let mut columns = Vec::new();
    for delta in DELTAS {
        let mut column = Vec::with_capacity(n);
        for &gamma in &gammas {
            let p = ModelParams::from_detuning(base.omega(), delta, base.g_a(), base.g_b(), gamma)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let value = match args.method {
                Method::Closed => closedform::concurrence_fields(&p, t_eval, delta_mix),
                _ => {
                    let obs = observables_over_grid(
                        &p,
                        delta_mix,
                        &[0.0, t_eval],
                        args.method,
                        args.grid.dt,
                    )?;
                    obs.last().unwrap().fields
                }
            };
            column.push(value);
        }
        columns.push(column);
    }

    let mut out = String::from("# figure 6: field-field concurrence vs gamma at fixed time\n");
    out.push_str(&param_comment(&base, delta_mix, args.method));
    let _ = writeln!(
        out,
        "# t={t_eval} gamma_max={} points={n} curves delta={DELTAS:?}",
        args.grid.gamma_max
    );
    out.push_str("gamma,CB_delta0,CB_delta1,CB_delta2\n");
    for (i, &gamma) in gammas.iter().enumerate() {
        let row: Vec<String> = std::iter::once(fmt(gamma))
            .chain(columns.iter().map(|c| fmt(c[i])))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// evolve command

fn cmd_evolve(args: EvolveArgs) -> Result<(), CliError> {
    args.grid.check()?;
    let (p, delta_mix) = args.params.build(0.0, 0.1)?;
    let t_max = args.grid.tmax.unwrap_or(10.0);
    let n = args.grid.points.unwrap_or(101);
    let ts = linspace(0.0, t_max, n);
    let obs = observables_over_grid(&p, delta_mix, &ts, args.method, args.grid.dt)?;

    let mut out = String::from("# observable trajectory\n");
    out.push_str(&param_comment(&p, delta_mix, args.method));
    let _ = writeln!(out, "# tmax={t_max} points={n} dt={}", args.grid.dt);
    out.push_str("t,P_g,C_AB,C_B,C_a,C_b,purity,trace\n");
    for (t, o) in ts.iter().zip(&obs) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt(*t),
            fmt(o.ground_probability),
            fmt(o.atom_fields),
            fmt(o.fields),
            fmt(o.atom_mode_a),
            fmt(o.atom_mode_b),
            fmt(o.purity),
            fmt(o.trace)
        );
    }
    write_file(&args.out, &out)
}

// ---------------------------------------------------------------------------
// steady command

fn cmd_steady(args: SteadyArgs) -> Result<(), CliError> {
    let (p, delta_mix) = args.params.build(0.0, 0.1)?;
    let values =
        closedform::stationary_values(&p, delta_mix).map_err(|e| CliError::Usage(e.to_string()))?;
    println!(
        "stationary values (ga={}, gb={}, delta={}, gamma={}, delta_mix={}):",
        p.g_a(),
        p.g_b(),
        p.delta(),
        p.gamma(),
        delta_mix
    );
    println!("  C_AB = {}", fmt(values.concurrence_atom_fields));
    println!("  C_B  = {}", fmt(values.concurrence_fields));
    println!("  P_g  = {}", fmt(values.ground_probability));
    if let Some(out) = args.out {
        let mut content = String::from("# stationary values\n");
        content.push_str(&param_comment(&p, delta_mix, Method::Closed));
        content.push_str("C_AB,C_B,P_g\n");
        let _ = writeln!(
            content,
            "{},{},{}",
            fmt(values.concurrence_atom_fields),
            fmt(values.concurrence_fields),
            fmt(values.ground_probability)
        );
        write_file(&out, &content)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// verify command

/// One verification check: the largest observed deviation against its bound.
pub struct CheckResult {
    pub name: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let results = run_verification(args.inject_sign_flip)?;
    let mut failed = Vec::new();
    for r in &results {
        println!(
            "{:<44} max deviation {:.3e}  tolerance {:.1e}  {}",
            r.name,
            r.deviation,
            r.tolerance,
            if r.passed() { "PASS" } else { "FAIL" }
        );
        if !r.passed() {
            failed.push(r.name);
        }
    }
    let total = results.len();
    println!(
        "verification: {}/{} checks passed",
        total - failed.len(),
        total
    );
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(failed.join(", ")))
    }
}

/// Runs every cross-check and reports maximum deviations. With
/// `inject_sign_flip` the closed form used in the propagator comparison has
/// its coherence sign flipped, which must make that check fail.
pub fn run_verification(inject_sign_flip: bool) -> Result<Vec<CheckResult>, CliError> {
    let coupling_sets: [(f64, f64, f64); 3] = [(1.0, 1.0, 0.0), (1.0, 2.0, 1.0), (2.0, 3.0, 5.0)];
    let basis = FockAtomBasis::new(2);
    let mut results = Vec::new();

    // (a) the two Hamiltonian constructions agree
    let mut dev = 0.0_f64;
    for &(ga, gb, delta) in &coupling_sets {
        let p = ModelParams::from_detuning(1.0, delta, ga, gb, 0.1)?;
        let direct = model::build_hamiltonian(&p, &basis);
        let algebraic = model::algebraic_hamiltonian(&p, &basis)?;
        dev = dev.max(direct.max_abs_diff(&algebraic));
    }
    results.push(CheckResult {
        name: "(a) direct vs algebraic hamiltonian",
        deviation: dev,
        tolerance: 1e-10,
    });

    // (b) conserved excitation counters commute with H
    let mut dev = 0.0_f64;
    for &(ga, gb, delta) in &coupling_sets {
        let p = ModelParams::from_detuning(1.0, delta, ga, gb, 0.1)?;
        let h = model::build_hamiltonian(&p, &basis);
        let (bright, dark) = model::conserved_excitations(&p, &basis);
        for k in [bright, dark] {
            let comm = &(&h * &k) - &(&k * &h);
            dev = dev.max(comm.max_abs());
        }
    }
    results.push(CheckResult {
        name: "(b) conserved-counter commutators",
        deviation: dev,
        tolerance: 1e-12,
    });

    // (c) spin-algebra commutators away from the kernel
    let mut dev = 0.0_f64;
    for &(ga, gb, delta) in &coupling_sets {
        let p = ModelParams::from_detuning(1.0, delta, ga, gb, 0.1)?;
        let spin = model::spin_operators(&p, &basis)?;
        let (bright, _) = model::conserved_excitations(&p, &basis);
        let proj = crate::linalg::hermitian_matrix_function(&bright, |l| {
            if l > crate::linalg::KERNEL_TOL {
                crate::linalg::c64(1.0, 0.0)
            } else {
                crate::linalg::c64(0.0, 0.0)
            }
        })?;
        let comm = |a: &ComplexMatrix, b: &ComplexMatrix| &(a * b) - &(b * a);
        let identities = [
            &comm(&spin.zero, &spin.plus) - &spin.plus,
            &comm(&spin.zero, &spin.minus) + &spin.minus,
            &comm(&spin.plus, &spin.minus) - &spin.zero.scale(crate::linalg::c64(2.0, 0.0)),
        ];
        for m in identities {
            dev = dev.max((&(&proj * &m) * &proj).max_abs());
        }
    }
    results.push(CheckResult {
        name: "(c) spin-algebra commutators off kernel",
        deviation: dev,
        tolerance: 1e-10,
    });

    // (d) spectral vs algebraic series operators
    let mut dev = 0.0_f64;
    for &delta in &[0.0, 1.0, 5.0] {
        let p = ModelParams::from_detuning(1.0, delta, 1.0, 1.0, 0.0)?;
        let h = model::build_hamiltonian(&p, &basis);
        for k in 0..=3 {
            for &t in &[0.7, 2.0] {
                for &gamma in &[0.0, 0.1] {
                    let spectral = dynamics::series_term_operator_spectral(&h, k, t, gamma)?;
                    let algebraic =
                        dynamics::series_term_operator_algebraic(&p, &basis, k, t, gamma)?;
                    dev = dev.max(spectral.max_abs_diff(&algebraic));
                }
            }
        }
    }
    results.push(CheckResult {
        name: "(d) spectral vs algebraic series operators",
        deviation: dev,
        tolerance: 1e-9,
    });

    // (e) three-way propagator comparison
    let sign = if inject_sign_flip { -1.0 } else { 1.0 };
    let grid = [0.0, 0.5, 1.0, 1.5, 2.0];
    let mut closed_dev = 0.0_f64;
    let mut rk4_dev = 0.0_f64;
    for &delta in &[0.0, 5.0] {
        for &gamma in &[0.01, 0.1] {
            let p = ModelParams::from_detuning(1.0, delta, 1.0, 1.0, gamma)?;
            let h = model::build_hamiltonian(&p, &basis);
            let rho0 = model::initial_state(InitialKind::ExcitedVacuum, &basis)?;
            let prop = SpectralPropagator::new(&h)?;
            let traj = dynamics::integrate_master_equation(&h, &rho0, gamma, &grid, 1e-4)?;
            for (i, &t) in grid.iter().enumerate() {
                let exact = prop.propagate(&rho0, gamma, t)?;
                let closed = closedform::closed_state_with_coherence_sign(&p, t, 0.0, sign)
                    .to_full(&basis)?;
                closed_dev = closed_dev.max(closed.matrix().max_abs_diff(exact.matrix()));
                rk4_dev = rk4_dev.max(traj.states()[i].matrix().max_abs_diff(exact.matrix()));
            }
        }
    }
    results.push(CheckResult {
        name: "(e) closed form vs spectral propagator",
        deviation: closed_dev,
        tolerance: 1e-9,
    });
    results.push(CheckResult {
        name: "(e) rk4 vs spectral propagator",
        deviation: rk4_dev,
        tolerance: 1e-6,
    });

    // (f) concurrence formulas vs the Wootters pipeline
    let mut dev = 0.0_f64;
    for &delta in &[0.0, 1.0, 5.0] {
        for &gamma in &[0.01, 0.1] {
            let p = ModelParams::from_detuning(1.0, delta, 1.0, 1.0, gamma)?;
            let h = model::build_hamiltonian(&p, &basis);
            let rho0 = model::initial_state(InitialKind::ExcitedVacuum, &basis)?;
            let prop = SpectralPropagator::new(&h)?;
            for &t in &[0.4, 1.0, 3.0] {
                let state = prop.propagate(&rho0, gamma, t)?;
                let ab =
                    entanglement::extract_atom_field_qubits(&state, &p, &basis)?.concurrence()?;
                dev = dev.max((ab - closedform::concurrence_atom_fields(&p, t, 0.0)).abs());
                let fields = entanglement::field_concurrence(&state, &basis)?;
                dev = dev.max((fields - closedform::concurrence_fields(&p, t, 0.0)).abs());
            }
        }
    }
    results.push(CheckResult {
        name: "(f) concurrence formulas vs wootters",
        deviation: dev,
        tolerance: 1e-8,
    });

    // (g) monogamy equality and coupling ratio
    let mut monogamy_dev = 0.0_f64;
    let mut ratio_dev = 0.0_f64;
    for &(ga, gb, delta) in &coupling_sets {
        let p = ModelParams::from_detuning(1.0, delta, ga, gb, 0.05)?;
        let h = model::build_hamiltonian(&p, &basis);
        let rho0 = model::initial_state(InitialKind::ExcitedVacuum, &basis)?;
        let prop = SpectralPropagator::new(&h)?;
        for &t in &[0.5, 1.5, 3.0] {
            let state = prop.propagate(&rho0, p.gamma(), t)?;
            let c = entanglement::pairwise_concurrences(&state, &p, &basis)?;
            monogamy_dev = monogamy_dev.max(
                (c.atom_mode_a * c.atom_mode_a + c.atom_mode_b * c.atom_mode_b
                    - c.atom_fields * c.atom_fields)
                    .abs(),
            );
            if c.atom_mode_b > 1e-6 {
                ratio_dev = ratio_dev.max((c.atom_mode_a / c.atom_mode_b - ga / gb).abs());
            }
        }
    }
    results.push(CheckResult {
        name: "(g) monogamy equality",
        deviation: monogamy_dev,
        tolerance: 1e-8,
    });
    results.push(CheckResult {
        name: "(g) coupling ratio of pair concurrences",
        deviation: ratio_dev,
        tolerance: 1e-6,
    });

    // (h) long-time limits against the propagated state
    let mut dev = 0.0_f64;
    for &(ga, gb, delta) in &[(1.0, 1.0, 0.0), (1.0, 1.0, 5.0), (1.0, 2.0, 2.0)] {
        let p = ModelParams::from_detuning(1.0, delta, ga, gb, 0.1)?;
        let expect = closedform::stationary_values(&p, 0.0)?;
        let h = model::build_hamiltonian(&p, &basis);
        let rho0 = model::initial_state(InitialKind::ExcitedVacuum, &basis)?;
        let t = closedform::stationary_time_proxy(&p);
        let state = dynamics::spectral_propagate(&h, &rho0, p.gamma(), t)?;
        let ab = entanglement::extract_atom_field_qubits(&state, &p, &basis)?.concurrence()?;
        let fields = entanglement::field_concurrence(&state, &basis)?;
        let pg = model::ground_population(state.matrix(), &basis);
        dev = dev.max((ab - expect.concurrence_atom_fields).abs());
        dev = dev.max((fields - expect.concurrence_fields).abs());
        dev = dev.max((pg - expect.ground_probability).abs());
    }
    results.push(CheckResult {
        name: "(h) long-time limits",
        deviation: dev,
        tolerance: 1e-4,
    });

    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_includes_endpoints() {
        let xs = linspace(0.0, 10.0, 11);
        assert_eq!(xs.len(), 11);
        assert_eq!(xs[0], 0.0);
        assert_eq!(xs[10], 10.0);
    }

    #[test]
    fn number_format_has_12_significant_digits() {
        assert_eq!(fmt(0.9570298231511163), "9.57029823151e-1");
        assert_eq!(fmt(0.0), "0.00000000000e0");
        assert_eq!(fmt(-2.5), "-2.50000000000e0");
    }

    #[test]
    fn verification_passes_clean_and_fails_injected() {
        let clean = run_verification(false).unwrap();
        assert!(clean.iter().all(|r| r.passed()), "clean run must pass");

        let injected = run_verification(true).unwrap();
        let flipped: Vec<&CheckResult> = injected.iter().filter(|r| !r.passed()).collect();
        assert_eq!(flipped.len(), 1);
        assert_eq!(flipped[0].name, "(e) closed form vs spectral propagator");
        assert!(flipped[0].deviation > 1e-3);
    }

    #[test]
    fn closed_and_spectral_observables_agree_cellwise() {
        let (p, _) = ParamArgs {
            g_a: 1.0,
            g_b: 2.0,
            delta: Some(1.0),
            gamma: Some(0.1),
            omega: 1.0,
            delta_mix: 0.0,
        }
        .build(0.0, 0.1)
        .unwrap();
        let ts = linspace(0.0, 3.0, 7);
        let closed = observables_over_grid(&p, 0.0, &ts, Method::Closed, 1e-4).unwrap();
        let spectral = observables_over_grid(&p, 0.0, &ts, Method::Spectral, 1e-4).unwrap();
        for (a, b) in closed.iter().zip(&spectral) {
            assert!((a.ground_probability - b.ground_probability).abs() <= 1e-8);
            assert!((a.atom_fields - b.atom_fields).abs() <= 1e-8);
            assert!((a.fields - b.fields).abs() <= 1e-8);
            assert!((a.atom_mode_a - b.atom_mode_a).abs() <= 1e-8);
            assert!((a.atom_mode_b - b.atom_mode_b).abs() <= 1e-8);
            assert!((a.purity - b.purity).abs() <= 1e-8);
            assert!((a.trace - b.trace).abs() <= 1e-8);
        }
    }

    #[test]
    fn evolve_initial_row_values() {
        let (p, _) = ParamArgs {
            g_a: 1.0,
            g_b: 1.0,
            delta: Some(0.0),
            gamma: Some(0.1),
            omega: 1.0,
            delta_mix: 0.5,
        }
        .build(0.0, 0.1)
        .unwrap();
        let o = observables_closed(&p, 0.0, 0.5);
        assert!((o.ground_probability - 0.5).abs() < 1e-15);
        assert!(o.atom_fields.abs() < 1e-15);
        assert!(o.fields.abs() < 1e-15);
        assert!((o.purity - 0.5).abs() < 1e-15);
        assert!((o.trace - 1.0).abs() < 1e-15);
    }
}
