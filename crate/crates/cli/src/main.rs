//! `vortex-forces` command-line driver. Every quantity is computed by the
//! library; this file only wires arguments, files and exit codes.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};
use vortex_forces::scan::{self, RawConfig, SweepKind, SweepResult, SweepSpec, PRESETS};
use vortex_forces::validate::{self, ValidationOptions};
use vortex_forces::{Error, PhysicalConstants};

const EXIT_CONFIG: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_VALIDATION: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "vortex-forces",
    version,
    about = "Optical forces on a two-level atom in higher-order Poincare vortex beams",
    long_about = None
)]
struct Cli {
    /// Sweep configuration file ([mode], [atom], [detuning], [sweep] sections)
    #[arg(long, short = 'c', global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Override a configuration key, e.g. --set mode.m=5 (repeatable, applied in order after the file)
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Write the CSV dataset here instead of standard output
    #[arg(long, short = 'o', global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    /// Worker threads for the sweep (the output does not depend on it)
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Increase log verbosity on stderr (-v info, -vv debug)
    #[arg(long, short = 'v', global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Radial force profiles for several winding numbers (radial-profile sweep)
    Profile,
    /// Profiles along a Poincare-sphere meridian (theta-scan sweep)
    SphereScan,
    /// Profiles on the planes z = -lambda, 0, +lambda with parity columns (zplane-compare sweep)
    Zplane {
        /// Parameter preset: default (w0 = 5 lambda) or tight (w0 = lambda)
        #[arg(long, value_name = "NAME")]
        preset: Option<String>,
    },
    /// Phases, transverse amplitudes and axial flux over a (rho, phi) grid (field-map sweep)
    FieldMap,
    /// Full force breakdown at one point
    Point {
        /// Radial coordinate, e.g. 1.2um, 0.5w0 (bare number: metres)
        #[arg(long, allow_hyphen_values = true)]
        rho: String,
        /// Azimuth, e.g. 0, pi/4, 30deg
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        phi: String,
        /// Axial coordinate, e.g. 0, -1lambda, 0.5zR
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        z: String,
        /// Atom velocity as v_rho,v_phi,v_z in m/s
        #[arg(long, value_name = "VRHO,VPHI,VZ", allow_hyphen_values = true)]
        velocity: Option<String>,
        /// Also write the point as a one-row CSV dataset
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Run the oracle suite and print a pass/fail table
    Validate(ValidateArgs),
    /// List the built-in parameter presets
    Presets,
}

#[derive(Debug, clap::Args)]
struct ValidateArgs {
    /// Run only the named check (repeatable)
    #[arg(long, value_name = "CHECK")]
    only: Vec<String>,
    /// Test hook: relative error injected into the analytic d(xi)/dz
    #[arg(long, hide = true, allow_hyphen_values = true)]
    perturb_xi_dz: Option<f64>,
    /// Test hook: coarse Gauss-Legendre order for the power check
    #[arg(long, hide = true)]
    quad_nodes: Option<usize>,
}

/// A failure and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidParameter { .. } | Error::Config(_) => EXIT_CONFIG,
            Error::Io { .. } | Error::CsvFormat { .. } => EXIT_IO,
            Error::QuadratureNotConverged { .. } | Error::Consistency { .. } | Error::NonFinite { .. } => {
                EXIT_NUMERICAL
            }
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<vortex_forces::ConfigError> for Failure {
    fn from(e: vortex_forces::ConfigError) -> Self {
        Error::from(e).into()
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Error::Io { path: path.to_path_buf(), source: e }.into()
}

fn raw_config(cli: &Cli, extra: &[String]) -> Result<RawConfig, Failure> {
    let mut raw = match &cli.config {
        Some(path) => scan::read_config(path)?,
        None => RawConfig::default(),
    };
    if let Some(n) = cli.threads {
        raw.set_override(&format!("sweep.threads={n}"))?;
    }
    for o in cli.overrides.iter().chain(extra) {
        raw.set_override(o)?;
    }
    Ok(raw)
}

fn emit(result: &SweepResult, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => scan::write_csv(result, path)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(scan::to_csv_string(result).as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| io_failure(Path::new("<stdout>"), e))?;
        }
    }
    Ok(())
}

fn summary(spec: &SweepSpec, result: &SweepResult) -> String {
    match result.peak_force() {
        Some(peak) => format!(
            "{}: {} rows; peak |F| = {:.6e} zN at rho/w0 = {:.4} (row {})",
            spec.kind,
            result.rows.len(),
            peak.magnitude_zn,
            peak.rho_over_w0,
            peak.row
        ),
        None => format!("{}: {} rows", spec.kind, result.rows.len()),
    }
}

fn cmd_sweep(cli: &Cli, kind: SweepKind, extra: &[String]) -> Result<(), Failure> {
    let consts = PhysicalConstants::from_env_or_default()?;
    let spec = scan::resolve(&raw_config(cli, extra)?, Some(kind), consts)?;
    log::info!("running {} with {} m value(s)", spec.kind, spec.m_values.len());
    let result = scan::run(&spec)?;
    emit(&result, cli.output.as_deref())?;
    // the dataset may occupy stdout, so the summary goes to stderr there
    if cli.output.is_some() {
        println!("{}", summary(&spec, &result));
    } else {
        eprintln!("{}", summary(&spec, &result));
    }
    Ok(())
}

fn cmd_point(
    cli: &Cli,
    rho: &str,
    phi: &str,
    z: &str,
    velocity: Option<&str>,
    csv: Option<&Path>,
) -> Result<(), Failure> {
    let mut extra = Vec::new();
    if let Some(v) = velocity {
        let parts: Vec<&str> = v.split(',').map(str::trim).collect();
        let [v_rho, v_phi, v_z] = parts[..] else {
            return Err(vortex_forces::ConfigError::new("velocity", "expected three values v_rho,v_phi,v_z").into());
        };
        extra.push(format!("detuning.v_rho={v_rho}"));
        extra.push(format!("detuning.v_phi={v_phi}"));
        extra.push(format!("detuning.v_z={v_z}"));
    }
    let consts = PhysicalConstants::from_env_or_default()?;
    let spec = scan::resolve_point(&raw_config(cli, &extra)?, consts)?;
    let point = scan::parse_point(&spec, rho, phi, z)?;
    let (mode, eval) = scan::evaluate_spec_point(&spec, &point)?;
    print!("{}", scan::point_table(&mode, &eval));
    if let Some(path) = csv.or(cli.output.as_deref()) {
        scan::write_csv(&scan::point_result(&spec, &mode, &eval), path)?;
    }
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), Failure> {
    let only = &args.only;
    let defaults = ValidationOptions::default();
    let opts = ValidationOptions {
        xi_dz_perturbation: args.perturb_xi_dz.unwrap_or(defaults.xi_dz_perturbation),
        quadrature_nodes: args.quad_nodes.unwrap_or(defaults.quadrature_nodes),
        ..defaults
    };
    if let Some(unknown) = only.iter().find(|n| !validate::check_names().any(|c| c == n.as_str())) {
        let known: Vec<&str> = validate::check_names().collect();
        return Err(Failure {
            code: EXIT_CONFIG,
            message: format!("unknown check '{unknown}' (known: {})", known.join(", ")),
        });
    }
    let consts = PhysicalConstants::from_env_or_default()?;
    let report = validate::run_selected(&opts, &consts, |name| only.is_empty() || only.iter().any(|o| o == name));
    print!("{}", report.table());
    if report.all_passed() {
        return Ok(());
    }
    for f in report.failures() {
        eprintln!("FAILED {}: {}", f.name, f.detail);
    }
    Err(Failure {
        code: EXIT_VALIDATION,
        message: "validation failed".into(),
    })
}

fn cmd_presets() {
    for p in PRESETS {
        println!("{:<16} {:<8} {}", p.kind.name(), p.preset.name(), p.description);
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Profile => cmd_sweep(cli, SweepKind::RadialProfile, &[]),
        Command::SphereScan => cmd_sweep(cli, SweepKind::ThetaScan, &[]),
        Command::Zplane { preset } => {
            let extra: Vec<String> = preset.iter().map(|p| format!("sweep.preset={p}")).collect();
            cmd_sweep(cli, SweepKind::ZPlaneCompare, &extra)
        }
        Command::FieldMap => cmd_sweep(cli, SweepKind::FieldMap, &[]),
        Command::Point { rho, phi, z, velocity, csv } => {
            cmd_point(cli, rho, phi, z, velocity.as_deref(), csv.as_deref())
        }
        Command::Validate(args) => cmd_validate(args),
        Command::Presets => {
            cmd_presets();
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let matches = Cli::command().after_help(scan::config_key_help()).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
