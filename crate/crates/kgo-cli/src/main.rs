//! `kgo` — bound states of the generalized Klein-Gordon oscillator in a
//! rotating Gödel-type background, from the command line.

mod config;
mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use kgo::oracle::{self, GridSpec};
use kgo::params::{ParamError, Scenario};
use kgo::spectrum::{self, BoundState, SolveConfig, SpectrumError};
use kgo::wavefunction::{self, WaveError};

use config::{default_energy_guess, parse_selector, selector_name, selector_value, Settings};
use output::{format_num, write_table, Cell, Format, Table};

const EXIT_CONFIG: i32 = 2;
const EXIT_NO_ROOT: i32 = 3;
const EXIT_NO_CONVERGENCE: i32 = 4;
const EXIT_VERIFY_FAILED: i32 = 5;

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(EXIT_CONFIG, message)
    }

    pub fn param(err: ParamError) -> Self {
        Self::new(EXIT_CONFIG, err.to_string())
    }
}

impl From<SpectrumError> for CliError {
    fn from(err: SpectrumError) -> Self {
        let code = match &err {
            SpectrumError::NoRootFound { .. } => EXIT_NO_ROOT,
            SpectrumError::NoConvergence { .. } => EXIT_NO_CONVERGENCE,
            SpectrumError::InvalidConfig(_) | SpectrumError::Param(_) => EXIT_CONFIG,
            SpectrumError::Heun(_) => EXIT_NO_CONVERGENCE,
            SpectrumError::NegativeDiscriminant(_) => EXIT_CONFIG,
        };
        Self::new(code, err.to_string())
    }
}

impl From<WaveError> for CliError {
    fn from(err: WaveError) -> Self {
        let code = match &err {
            WaveError::TooFewSamples(_) | WaveError::InvalidXMax(_) => EXIT_CONFIG,
            WaveError::EvalError { .. } | WaveError::ZeroNorm => EXIT_NO_CONVERGENCE,
        };
        Self::new(code, err.to_string())
    }
}

impl From<oracle::OracleError> for CliError {
    fn from(err: oracle::OracleError) -> Self {
        let code = match &err {
            oracle::OracleError::NoRootFound { .. } => EXIT_NO_ROOT,
            _ => EXIT_CONFIG,
        };
        Self::new(code, err.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "kgo",
    version,
    about = "Bound states of the generalized Klein-Gordon oscillator in a Godel-type background"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the energy quantization condition and list every root.
    Spectrum(ScenarioArgs),
    /// Solve both truncation conditions jointly for the energy and one free parameter.
    Joint(JointArgs),
    /// Emit the normalized radial wave function of one bound state.
    Wavefunction(WaveArgs),
    /// Cross-check a bound state against the finite-difference eigensolver.
    Verify(VerifyArgs),
    /// Sweep one parameter and tabulate the spectrum per value and level.
    Scan(ScanArgs),
    /// Run the built-in quick consistency checks.
    Selftest,
}

#[derive(Args, Clone)]
struct ScenarioArgs {
    /// Plain-text key=value configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Coupling kind: cornell | pdm.
    #[arg(long)]
    kind: Option<String>,
    /// Rotation parameter of the background (>= 0).
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Rest mass (> 0).
    #[arg(long, allow_negative_numbers = true)]
    mass: Option<f64>,
    /// Oscillator frequency (>= 0).
    #[arg(long, allow_negative_numbers = true)]
    omega_osc: Option<f64>,
    /// Cornell linear coefficient A.
    #[arg(long, allow_negative_numbers = true)]
    a_lin: Option<f64>,
    /// Cornell Coulomb coefficient B.
    #[arg(long, allow_negative_numbers = true)]
    b_coul: Option<f64>,
    /// Linear potential coefficient (pdm kind, > 0).
    #[arg(long, allow_negative_numbers = true)]
    xi: Option<f64>,
    /// Position-dependent-mass strength (pdm kind, >= 0).
    #[arg(long, allow_negative_numbers = true)]
    kc: Option<f64>,
    /// Transverse separation constant.
    #[arg(long, allow_negative_numbers = true)]
    l: Option<f64>,
    /// Longitudinal momentum.
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    /// Level (polynomial degree, >= 0).
    #[arg(long)]
    n: Option<u32>,
    /// Lower edge of the energy search bracket.
    #[arg(long, allow_negative_numbers = true)]
    e_min: Option<f64>,
    /// Upper edge of the energy search bracket.
    #[arg(long, allow_negative_numbers = true)]
    e_max: Option<f64>,
    /// Number of grid cells used to bracket roots.
    #[arg(long)]
    grid_points: Option<usize>,
    /// Solver tolerance.
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
    /// Iteration cap for the refinement loops.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Output format: csv | json.
    #[arg(long)]
    format: Option<String>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Clone)]
struct JointOpts {
    /// Free parameter adjusted by the coefficient condition:
    /// omega-osc | alpha | a-lin | b-coul | xi | kc.
    #[arg(long)]
    free: Option<String>,
    /// Starting energy for the joint solve.
    #[arg(long, allow_negative_numbers = true)]
    guess_e: Option<f64>,
    /// Starting value of the free parameter.
    #[arg(long, allow_negative_numbers = true)]
    guess_p: Option<f64>,
}

#[derive(Args, Clone)]
struct JointArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    joint: JointOpts,
}

#[derive(Args, Clone)]
struct WaveArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Grid extent; defaults to three classical turning points.
    #[arg(long, allow_negative_numbers = true)]
    x_max: Option<f64>,
    /// Number of samples on (0, x_max] (>= 16).
    #[arg(long)]
    samples: Option<usize>,
    /// Energy branch when solving the spectrum: positive | negative.
    #[arg(long, default_value = "positive")]
    branch: String,
    /// Solve both conditions jointly first (requires --free).
    #[arg(long)]
    joint: bool,
    #[command(flatten)]
    joint_opts: JointOpts,
}

#[derive(Args, Clone)]
struct VerifyArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Finite-difference grid points (default 20000).
    #[arg(long)]
    fd_points: Option<usize>,
    /// Finite-difference domain end (defaults to the wave-function extent).
    #[arg(long, allow_negative_numbers = true)]
    fd_x_max: Option<f64>,
    /// Energy branch when solving the spectrum: positive | negative.
    #[arg(long, default_value = "positive")]
    branch: String,
    /// Verify a jointly solved state (requires --free).
    #[arg(long)]
    joint: bool,
    #[command(flatten)]
    joint_opts: JointOpts,
}

#[derive(Args, Clone)]
struct ScanArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Swept parameter: omega-osc | alpha | a-lin | b-coul | xi | kc.
    #[arg(long)]
    param: String,
    /// First parameter value.
    #[arg(long, allow_negative_numbers = true)]
    from: f64,
    /// Last parameter value.
    #[arg(long, allow_negative_numbers = true)]
    to: f64,
    /// Number of values (>= 1).
    #[arg(long)]
    steps: usize,
    /// Comma-separated levels (defaults to the configured n).
    #[arg(long)]
    levels: Option<String>,
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = cap_threads() {
        eprintln!("error: {}", err.message);
        std::process::exit(err.code);
    }
    let result = match cli.command {
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Joint(args) => cmd_joint(args),
        Command::Wavefunction(args) => cmd_wavefunction(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Selftest => cmd_selftest(),
    };
    if let Err(err) = result {
        eprintln!("error: {}", err.message);
        std::process::exit(err.code);
    }
}

/// KGO_THREADS caps the rayon pool used by parameter sweeps.
fn cap_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("KGO_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&t| t >= 1)
        .ok_or_else(|| CliError::config(format!("KGO_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::config(format!("cannot configure thread pool: {e}")))
}

fn merged_settings(args: &ScenarioArgs) -> Result<Settings, CliError> {
    let base = match &args.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    let flags = Settings {
        kind: args.kind.clone(),
        alpha: args.alpha,
        mass: args.mass,
        omega_osc: args.omega_osc,
        a_lin: args.a_lin,
        b_coul: args.b_coul,
        xi: args.xi,
        kc: args.kc,
        l: args.l,
        k: args.k,
        n: args.n,
        e_min: args.e_min,
        e_max: args.e_max,
        grid_points: args.grid_points,
        tol: args.tol,
        max_iter: args.max_iter,
        format: args.format.clone(),
        out: args.out.clone(),
        ..Settings::default()
    };
    Ok(base.overridden_by(flags))
}

struct Prepared {
    scenario: Scenario,
    solve: SolveConfig,
    format: Format,
    out: Option<String>,
    settings: Settings,
}

fn prepare(args: &ScenarioArgs) -> Result<Prepared, CliError> {
    let settings = merged_settings(args)?;
    let scenario = settings.build_scenario()?;
    let solve = settings.build_solve_config(&scenario)?;
    let format = Format::parse(settings.format.as_deref().unwrap_or("csv"))?;
    let out = settings.out.clone();
    Ok(Prepared { scenario, solve, format, out, settings })
}

fn cmd_spectrum(args: ScenarioArgs) -> Result<(), CliError> {
    let prep = prepare(&args)?;
    let states = spectrum::solve_energy(&prep.scenario, &prep.solve)?;
    let mut table = Table::new(vec!["n", "E", "residual_energy", "residual_coeff"]);
    for bs in &states {
        table.push(vec![
            Cell::Int(bs.n as i64),
            Cell::Num(bs.energy),
            Cell::Num(bs.residual_energy),
            Cell::Num(bs.residual_coeff),
        ]);
    }
    write_table(&table, prep.format, prep.out.as_deref())
}

fn solve_joint_state(prep: &Prepared, joint: &JointOpts) -> Result<BoundState, CliError> {
    let free_name = joint
        .free
        .as_deref()
        .ok_or_else(|| CliError::config("missing required key: free"))?;
    let selector = parse_selector(free_name)?;
    let p0 = match joint.guess_p {
        Some(p) => p,
        None => selector_value(&prep.scenario, selector)?,
    };
    let e0 = joint.guess_e.unwrap_or_else(|| default_energy_guess(&prep.scenario));
    spectrum::solve_joint(&prep.scenario, selector, &prep.solve, (e0, p0)).map_err(CliError::from)
}

fn cmd_joint(args: JointArgs) -> Result<(), CliError> {
    let prep = prepare(&args.scenario)?;
    let bs = solve_joint_state(&prep, &args.joint)?;
    let (selector, value) = bs.free_param.expect("joint solve sets the free parameter");
    let mut table = Table::new(vec![
        "n",
        "E",
        "free_param",
        "free_value",
        "residual_energy",
        "residual_coeff",
    ]);
    table.push(vec![
        Cell::Int(bs.n as i64),
        Cell::Num(bs.energy),
        Cell::Text(selector_name(selector).to_string()),
        Cell::Num(value),
        Cell::Num(bs.residual_energy),
        Cell::Num(bs.residual_coeff),
    ]);
    write_table(&table, prep.format, prep.out.as_deref())
}

/// Bound state selected by the common scenario/branch/joint options.
fn pick_state(prep: &Prepared, joint: bool, opts: &JointOpts, branch: &str) -> Result<BoundState, CliError> {
    if joint {
        return solve_joint_state(prep, opts);
    }
    let states = spectrum::solve_energy(&prep.scenario, &prep.solve)?;
    let picked = match branch {
        "positive" => states.iter().rev().find(|bs| bs.energy > 0.0),
        "negative" => states.iter().find(|bs| bs.energy < 0.0),
        other => {
            return Err(CliError::config(format!(
                "branch must be positive or negative, got {other:?}"
            )));
        }
    };
    picked.copied().ok_or_else(|| {
        CliError::new(EXIT_NO_ROOT, format!("no {branch} root inside the bracket"))
    })
}

fn cmd_wavefunction(args: WaveArgs) -> Result<(), CliError> {
    let prep = prepare(&args.scenario)?;
    let bs = pick_state(&prep, args.joint, &args.joint_opts, &args.branch)?;
    let x_max = args
        .x_max
        .or(prep.settings.x_max)
        .unwrap_or_else(|| wavefunction::default_x_max(&bs.reduced));
    let samples = args
        .samples
        .or(prep.settings.samples)
        .unwrap_or(wavefunction::DEFAULT_SAMPLES);
    let table = wavefunction::normalize(wavefunction::assemble(&bs, x_max, samples)?)?;
    let mut out = Table::new(vec!["x", "psi"]);
    for (x, psi) in table.xs().iter().zip(table.psi()) {
        out.push(vec![Cell::Num(*x), Cell::Num(*psi)]);
    }
    write_table(&out, prep.format, prep.out.as_deref())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let prep = prepare(&args.scenario)?;
    let bs = pick_state(&prep, args.joint, &args.joint_opts, &args.branch)?;
    let mut grid = GridSpec::default_for(&bs.reduced);
    if let Some(points) = args.fd_points.or(prep.settings.fd_points) {
        grid.points = points;
    }
    if let Some(x_max) = args.fd_x_max.or(prep.settings.x_max) {
        grid.x_max = x_max;
    }
    let report = oracle::verify(&bs, &prep.scenario, &grid)?;
    let relative = report.relative_mismatch(bs.reduced.beta0);
    let mut table = Table::new(vec![
        "E",
        "eig_index",
        "mismatch",
        "relative_mismatch",
        "overlap",
    ]);
    table.push(vec![
        Cell::Num(report.energy),
        Cell::Int(report.eig_index as i64),
        Cell::Num(report.mismatch),
        Cell::Num(relative),
        Cell::Num(report.overlap),
    ]);
    write_table(&table, prep.format, prep.out.as_deref())?;
    if relative <= 1e-3 && report.overlap >= 0.999 {
        Ok(())
    } else {
        Err(CliError::new(
            EXIT_VERIFY_FAILED,
            format!(
                "verification failed: relative mismatch {relative:.3e}, overlap {:.6}",
                report.overlap
            ),
        ))
    }
}

fn cmd_scan(args: ScanArgs) -> Result<(), CliError> {
    let prep = prepare(&args.scenario)?;
    if args.steps == 0 {
        return Err(CliError::config("steps must be at least 1"));
    }
    if !(args.from.is_finite() && args.to.is_finite()) {
        return Err(CliError::config("scan range must be finite"));
    }
    let selector = parse_selector(&args.param)?;
    // reject kind-incompatible selectors up front
    selector_value(&prep.scenario, selector)?;
    let values: Vec<f64> = if args.steps == 1 {
        vec![args.from]
    } else {
        (0..args.steps)
            .map(|i| args.from + (args.to - args.from) * i as f64 / (args.steps - 1) as f64)
            .collect()
    };
    let levels: Vec<u32> = match &args.levels {
        None => vec![prep.scenario.level()],
        Some(text) => text
            .split(',')
            .map(|part| {
                part.trim().parse().map_err(|_| {
                    CliError::config(format!("levels: invalid entry {part:?}"))
                })
            })
            .collect::<Result<_, _>>()?,
    };

    // the default bracket depends on the swept parameter, so let each row
    // derive its own unless the user pinned one explicitly
    let explicit_bracket = prep.settings.e_min.is_some()
        || prep.settings.e_max.is_some()
        || prep.settings.grid_points.is_some()
        || prep.settings.tol.is_some()
        || prep.settings.max_iter.is_some();
    let cfg = explicit_bracket.then_some(&prep.solve);
    let scan_table = spectrum::scan(&prep.scenario, selector, &values, &levels, cfg);

    let mut table = Table::new(vec!["param", "n", "E", "residual_coeff"]);
    for row in &scan_table.rows {
        match &row.outcome {
            Ok(roots) => {
                for root in roots {
                    table.push(vec![
                        Cell::Num(row.value),
                        Cell::Int(row.n as i64),
                        Cell::Num(root.energy),
                        Cell::Num(root.residual_coeff),
                    ]);
                }
            }
            Err(_) => {
                table.push(vec![
                    Cell::Num(row.value),
                    Cell::Int(row.n as i64),
                    Cell::Num(f64::NAN),
                    Cell::Num(f64::NAN),
                ]);
            }
        }
    }
    write_table(&table, prep.format, prep.out.as_deref())
}

fn cmd_selftest() -> Result<(), CliError> {
    use kgo::heun::{self, HeunParams};
    use kgo::params::*;

    let mut failures = Vec::new();
    let mut check = |name: &str, ok: bool, detail: String| {
        println!("selftest {name}: {} ({detail})", if ok { "ok" } else { "FAILED" });
        if !ok {
            failures.push(name.to_string());
        }
    };

    // flat-background closed form
    let sc = Scenario::pdm_linear(
        SpacetimeParams::minkowski(),
        ParticleParams::new(1.0, 1.0).unwrap(),
        LinearPotential::new(1.0).unwrap(),
        PdmParams::constant_mass(),
        QuantumNumbers::new(0, 0.0, 0.0).unwrap(),
    )
    .unwrap();
    let cfg = SolveConfig::for_scenario(&sc);
    let top = spectrum::solve_energy(&sc, &cfg)
        .map(|s| s.last().unwrap().energy)
        .unwrap_or(f64::NAN);
    check(
        "closed-form energy",
        (top - 5.0_f64.sqrt()).abs() < 1e-10,
        format!("E = {}", format_num(top)),
    );

    // indicial identity on a deterministic sweep
    let mut worst: f64 = 0.0;
    for i in 0..2000 {
        let b = -3.0 + 6.0 * i as f64 / 1999.0;
        let sc = Scenario::cornell(
            SpacetimeParams::new(1.0).unwrap(),
            ParticleParams::new(1.0, 1.0).unwrap(),
            CornellPotential::new(1.0, b).unwrap(),
            QuantumNumbers::new(0, 0.2, 0.0).unwrap(),
        )
        .unwrap();
        if let Ok(red) = sc.reduce(1.7) {
            worst = worst.max((red.root_index - (2.0 * b - 1.0).abs()).abs());
        }
    }
    check("indicial identity", worst <= 1e-12, format!("worst deviation {worst:e}"));

    // termination lemma sample
    let params = HeunParams::new(1.0, 0.0, 7.0, 0.0); // c - a - 2 = 4, n = 2, b = 0
    let series = heun::series_coefficients(params, 13).unwrap();
    let max = series.coeffs().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tail_ok = series.coeffs()[3..].iter().all(|v| v.abs() <= 1e-10 * max);
    check(
        "series truncation",
        tail_ok && series.truncated_at() == Some(2),
        format!("truncated_at = {:?}", series.truncated_at()),
    );

    // finite-difference oscillator levels
    let grid = GridSpec::new(1e-6, 12.0, 1500).unwrap();
    let eigs = oracle::fd_eigs(|x| x * x, &grid, 2).unwrap();
    check(
        "finite-difference levels",
        (eigs[0] - 3.0).abs() < 5e-3 && (eigs[1] - 7.0).abs() < 5e-3,
        format!("lowest = {}, {}", format_num(eigs[0]), format_num(eigs[1])),
    );

    if failures.is_empty() {
        println!("selftest: all checks passed");
        Ok(())
    } else {
        Err(CliError::new(
            EXIT_VERIFY_FAILED,
            format!("selftest failures: {}", failures.join(", ")),
        ))
    }
}
