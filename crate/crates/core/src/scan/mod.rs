//! Parameter sweeps over the standard scenarios and their CSV datasets.

mod config;
mod csv;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

pub use self::config::{
    config_key_help, load_config, parse_config, parse_point, read_config, resolve, resolve_point, ConfigEntry, KeyDoc,
    RawConfig, CONFIG_KEYS,
};
pub use self::csv::{from_csv_str, read_csv, to_csv_string, write_csv};

use crate::atom::{AtomSpec, DetuningSpec};
use crate::beam::{self, CylPoint, ModeSpec};
use crate::constants::{PhysicalConstants, ZN_PER_NEWTON};
use crate::error::{Error, Result};
use crate::force::{evaluate_point, phase_psi, PointEvaluation};

/// Version of the CSV column layout. Any column change bumps it.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    RadialProfile,
    ThetaScan,
    ZPlaneCompare,
    FieldMap,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::RadialProfile => "radial-profile",
            SweepKind::ThetaScan => "theta-scan",
            SweepKind::ZPlaneCompare => "zplane-compare",
            SweepKind::FieldMap => "field-map",
        }
    }

    pub const ALL: [SweepKind; 4] = [
        SweepKind::RadialProfile,
        SweepKind::ThetaScan,
        SweepKind::ZPlaneCompare,
        SweepKind::FieldMap,
    ];
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        SweepKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown sweep kind '{s}' (expected radial-profile, theta-scan, zplane-compare or field-map)"))
    }
}

/// Named parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preset {
    /// w₀ = 5λ, the default for every sweep.
    #[default]
    Default,
    /// w₀ = λ, the tight-focus variant of the focal-plane crossing study.
    Tight,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Default => "default",
            Preset::Tight => "tight",
        }
    }

    /// Waist in units of the mode wavelength.
    pub fn waist_in_wavelengths(self) -> f64 {
        match self {
            Preset::Default => 5.0,
            Preset::Tight => 1.0,
        }
    }
}

impl FromStr for Preset {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "default" => Ok(Preset::Default),
            "tight" => Ok(Preset::Tight),
            other => Err(format!("unknown preset '{other}' (expected default or tight)")),
        }
    }
}

/// One line of the preset catalogue.
#[derive(Debug, Clone, Copy)]
pub struct PresetInfo {
    pub kind: SweepKind,
    pub preset: Preset,
    pub description: &'static str,
}

pub const PRESETS: &[PresetInfo] = &[
    PresetInfo {
        kind: SweepKind::RadialProfile,
        preset: Preset::Default,
        description: "m in {0,1,2,5,20}, p=0, z=0, north pole; delta0=10 Gamma, P=2.5 uW, lambda=589 nm, w0=5 lambda",
    },
    PresetInfo {
        kind: SweepKind::ThetaScan,
        preset: Preset::Default,
        description: "m=2, p=0, z=0, theta_p in {0, pi/4, pi/2, 3pi/4, pi}, phi_p=0; other parameters as radial-profile",
    },
    PresetInfo {
        kind: SweepKind::ZPlaneCompare,
        preset: Preset::Default,
        description: "m=2, p=0, z in {-lambda, 0, +lambda}, w0=5 lambda, parity columns",
    },
    PresetInfo {
        kind: SweepKind::ZPlaneCompare,
        preset: Preset::Tight,
        description: "as zplane-compare default with w0=lambda",
    },
    PresetInfo {
        kind: SweepKind::FieldMap,
        preset: Preset::Default,
        description: "m=2 phase and transverse field map over (rho, phi) at z=0",
    },
];

/// Radial extent of a sweep, in units of w₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoRange {
    pub min: f64,
    /// `None` selects `3` for `m ≤ 5` and `sqrt(2m) + 3` above.
    pub max: Option<f64>,
}

impl RhoRange {
    pub fn upper_for(&self, m: i32) -> f64 {
        self.max.unwrap_or_else(|| default_rho_max(m))
    }
}

pub fn default_rho_max(m: i32) -> f64 {
    let m = m.unsigned_abs();
    if m <= 5 {
        3.0
    } else {
        (2.0 * f64::from(m)).sqrt() + 3.0
    }
}

/// Fully resolved sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub preset: Preset,
    /// Template mode; its `m` is replaced by each entry of `m_values`.
    pub mode: ModeSpec,
    pub m_values: Vec<i32>,
    pub atom: AtomSpec,
    pub detuning: DetuningSpec,
    pub rho_range: RhoRange,
    pub samples: usize,
    /// Axial positions, m.
    pub z_values: Vec<f64>,
    /// Poincaré polar angles, rad.
    pub theta_values: Vec<f64>,
    /// Evaluation azimuth, rad.
    pub phi: f64,
    /// Azimuth samples over [0, 2π) for field maps.
    pub phi_samples: usize,
    /// Worker threads; `None` uses the global pool. Never affects output.
    pub threads: Option<usize>,
    pub consts: PhysicalConstants,
}

impl SweepSpec {
    /// Built-in parameter set for a sweep kind.
    pub fn defaults(kind: SweepKind, preset: Preset, consts: PhysicalConstants) -> Self {
        let wavelength = 589e-9;
        let mut mode = ModeSpec::sodium_reference(2);
        mode.wavelength = wavelength;
        mode.waist = preset.waist_in_wavelengths() * wavelength;
        let atom = AtomSpec::sodium_d2(&consts);
        let detuning = DetuningSpec::in_linewidths(10.0, &atom);
        let (m_values, z_values, theta_values) = match kind {
            SweepKind::RadialProfile => (vec![0, 1, 2, 5, 20], vec![0.0], vec![0.0]),
            SweepKind::ThetaScan => (
                vec![2],
                vec![0.0],
                vec![0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, PI],
            ),
            SweepKind::ZPlaneCompare => (vec![2], vec![-wavelength, 0.0, wavelength], vec![0.0]),
            SweepKind::FieldMap => (vec![2], vec![0.0], vec![0.0]),
        };
        mode.m = m_values[0];
        SweepSpec {
            kind,
            preset,
            mode,
            m_values,
            atom,
            detuning,
            rho_range: RhoRange { min: 0.0, max: None },
            samples: if kind == SweepKind::FieldMap { 128 } else { 512 },
            z_values,
            theta_values,
            phi: 0.0,
            phi_samples: 64,
            threads: None,
            consts,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::invalid("sweep.samples", "need at least 2 samples"));
        }
        if self.kind == SweepKind::FieldMap && self.phi_samples < 1 {
            return Err(Error::invalid("sweep.phi_samples", "need at least 1 azimuth sample"));
        }
        if !(self.rho_range.min.is_finite() && self.rho_range.min >= 0.0) {
            return Err(Error::invalid("sweep.rho_min", "must be finite and >= 0"));
        }
        if self.m_values.is_empty() {
            return Err(Error::invalid("sweep.m_values", "empty list"));
        }
        if self.z_values.is_empty() || self.z_values.iter().any(|z| !z.is_finite()) {
            return Err(Error::invalid("sweep.z", "need at least one finite axial position"));
        }
        if self.theta_values.is_empty() {
            return Err(Error::invalid("sweep.theta", "empty list"));
        }
        if !self.phi.is_finite() {
            return Err(Error::invalid("sweep.phi", "must be finite"));
        }
        if let Some(max) = self.rho_range.max {
            if !(max.is_finite() && max > self.rho_range.min) {
                return Err(Error::invalid("sweep.rho_max", "must be finite and above rho_min"));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("sweep.threads", "must be at least 1"));
        }
        for &m in &self.m_values {
            for &theta_p in &self.theta_values {
                ModeSpec { m, theta_p, ..self.mode }.validate()?;
            }
        }
        if !self.detuning.delta0.is_finite() {
            return Err(Error::invalid("detuning.delta0", "must be finite"));
        }
        Ok(())
    }

    /// Uniform ρ grid in units of w₀ with exact endpoints.
    pub fn rho_grid(&self, m: i32) -> Vec<f64> {
        let lo = self.rho_range.min;
        let hi = self.rho_range.upper_for(m);
        let n = self.samples;
        let mut grid: Vec<f64> = (0..n)
            .map(|i| lo + (hi - lo) * (i as f64) / ((n - 1) as f64))
            .collect();
        grid[n - 1] = hi;
        grid
    }

    /// Resolved parameters echoed into the dataset header.
    pub fn header(&self) -> Vec<(String, String)> {
        let f = format_float;
        let list = |v: &[f64]| v.iter().map(|x| f(*x)).collect::<Vec<_>>().join(",");
        let mut h: Vec<(String, String)> = vec![
            ("schema_version".into(), SCHEMA_VERSION.to_string()),
            ("generator".into(), format!("vortex-forces {}", env!("CARGO_PKG_VERSION"))),
            ("kind".into(), self.kind.name().into()),
            ("preset".into(), self.preset.name().into()),
            ("mode.p".into(), self.mode.p.to_string()),
            ("mode.lambda_m".into(), f(self.mode.wavelength)),
            ("mode.w0_m".into(), f(self.mode.waist)),
            ("mode.power_w".into(), f(self.mode.power)),
            ("mode.phi_p_rad".into(), f(self.mode.phi_p)),
            ("mode.direction".into(), format!("{:+}", self.mode.direction.sign() as i32)),
            (
                "sweep.m_values".into(),
                self.m_values.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(","),
            ),
            ("sweep.rho_min_w0".into(), f(self.rho_range.min)),
            (
                "sweep.rho_max_w0".into(),
                self.rho_range.max.map_or_else(|| "auto".to_string(), f),
            ),
            ("sweep.samples".into(), self.samples.to_string()),
            ("sweep.z_m".into(), list(&self.z_values)),
            ("sweep.theta_rad".into(), list(&self.theta_values)),
            ("sweep.phi_rad".into(), f(self.phi)),
        ];
        if self.kind == SweepKind::FieldMap {
            h.push(("sweep.phi_samples".into(), self.phi_samples.to_string()));
        }
        h.extend([
            ("atom.lambda_m".into(), f(self.atom.wavelength)),
            ("atom.gamma_per_s".into(), f(self.atom.gamma)),
            ("atom.d_eg_cm".into(), f(self.atom.dipole)),
            ("detuning.delta0_rad_s".into(), f(self.detuning.delta0)),
            ("detuning.delta0_gamma".into(), f(self.detuning.delta0 / self.atom.gamma)),
            ("detuning.v_rho_m_s".into(), f(self.detuning.velocity.v_rho)),
            ("detuning.v_phi_m_s".into(), f(self.detuning.velocity.v_phi)),
            ("detuning.v_z_m_s".into(), f(self.detuning.velocity.v_z)),
        ]);
        for (name, value) in self.consts.entries() {
            h.push((format!("const.{name}"), f(value)));
        }
        h.push(("units".into(), units_note(self.kind).into()));
        h
    }
}

fn units_note(kind: SweepKind) -> &'static str {
    match kind {
        SweepKind::FieldMap => "lengths m; angles rad; phases rad; amplitudes V/m; flux W/m^2",
        _ => "lengths m; angles rad; forces zN; omega rad/s; delta rad/s; potentials J",
    }
}

/// 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Output dataset of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub header: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Largest total-force magnitude in a dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakForce {
    pub magnitude_zn: f64,
    pub rho_over_w0: f64,
    pub row: usize,
}

impl SweepResult {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Peak `|F|` of the grand-total force, if the dataset carries forces.
    pub fn peak_force(&self) -> Option<PeakForce> {
        let ir = self.column_index("total_rho_zn")?;
        let ip = self.column_index("total_phi_zn")?;
        let iz = self.column_index("total_z_zn")?;
        let irho = self.column_index("rho_over_w0")?;
        let mut best: Option<PeakForce> = None;
        for (row, r) in self.rows.iter().enumerate() {
            let mag = (r[ir] * r[ir] + r[ip] * r[ip] + r[iz] * r[iz]).sqrt();
            if best.is_none_or(|b| mag > b.magnitude_zn) {
                best = Some(PeakForce {
                    magnitude_zn: mag,
                    rho_over_w0: r[irho],
                    row,
                });
            }
        }
        best
    }

    fn check_finite(&self) -> Result<()> {
        for (row, r) in self.rows.iter().enumerate() {
            if let Some(c) = r.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    row,
                    column: self.columns[c].clone(),
                });
            }
        }
        Ok(())
    }
}

const POINT_COLUMNS: [&str; 18] = [
    "m",
    "p",
    "rho_over_w0",
    "rho_m",
    "phi",
    "z_m",
    "theta_p",
    "phi_p",
    "omega_mp",
    "omega_plus",
    "omega_minus",
    "s_mp",
    "s_plus",
    "s_minus",
    "delta_plus",
    "delta_minus",
    "u_plus",
    "u_minus",
];

const FORCE_NAMES: [&str; 7] = [
    "sca_plus",
    "sca_minus",
    "dip_plus",
    "dip_minus",
    "sca_total",
    "dip_total",
    "total",
];

/// Components whose z-parity is reported by the focal-plane comparison.
const PARITY_COMPONENTS: [&str; 5] = [
    "sca_total_rho",
    "sca_total_phi",
    "sca_total_z",
    "dip_total_rho",
    "dip_total_z",
];

/// Integer-valued columns, written without a fractional part.
pub(crate) const INTEGER_COLUMNS: [&str; 2] = ["m", "p"];

/// Column layout for force datasets.
pub fn force_columns(with_parity: bool) -> Vec<String> {
    let mut cols: Vec<String> = POINT_COLUMNS.iter().map(|s| s.to_string()).collect();
    for name in FORCE_NAMES {
        for comp in ["rho", "phi", "z"] {
            cols.push(format!("{name}_{comp}_zn"));
        }
    }
    if with_parity {
        for c in PARITY_COMPONENTS {
            cols.push(format!("{c}_psum_zn"));
            cols.push(format!("{c}_pdiff_zn"));
        }
    }
    cols
}

pub const FIELD_MAP_COLUMNS: [&str; 16] = [
    "m",
    "p",
    "rho_over_w0",
    "rho_m",
    "phi",
    "z_m",
    "theta_p",
    "phi_p",
    "psi_plus",
    "psi_minus",
    "xi",
    "ux_re",
    "ux_im",
    "uy_re",
    "uy_im",
    "flux_w_m2",
];

/// One evaluation as a force-dataset row (forces in zN).
pub fn point_row(mode: &ModeSpec, eval: &PointEvaluation) -> Vec<f64> {
    let pt = eval.point;
    let mut row = vec![
        f64::from(mode.m),
        f64::from(mode.p),
        pt.rho / mode.waist,
        pt.rho,
        pt.phi,
        pt.z,
        mode.theta_p,
        mode.phi_p,
        eval.rabi_base,
        eval.rabi.plus,
        eval.rabi.minus,
        eval.saturation_base,
        eval.saturation.plus,
        eval.saturation.minus,
        eval.detuning.plus,
        eval.detuning.minus,
        eval.potential.plus,
        eval.potential.minus,
    ];
    for (_, v) in eval.forces.named() {
        row.extend([v.rho * ZN_PER_NEWTON, v.phi * ZN_PER_NEWTON, v.z * ZN_PER_NEWTON]);
    }
    row
}

fn parity_values(here: &PointEvaluation, mirror: &PointEvaluation) -> [f64; 10] {
    let (a, b) = (&here.forces, &mirror.forces);
    let pairs = [
        (a.sca_total.rho, b.sca_total.rho),
        (a.sca_total.phi, b.sca_total.phi),
        (a.sca_total.z, b.sca_total.z),
        (a.dip_total.rho, b.dip_total.rho),
        (a.dip_total.z, b.dip_total.z),
    ];
    let mut out = [0.0; 10];
    for (i, (x, y)) in pairs.into_iter().enumerate() {
        out[2 * i] = (x + y) * ZN_PER_NEWTON;
        out[2 * i + 1] = (x - y) * ZN_PER_NEWTON;
    }
    out
}

/// Runs `f` over `tasks` in order, in parallel, optionally on a dedicated
/// pool. Output order follows `tasks`.
fn par_rows<T, F>(threads: Option<usize>, tasks: &[T], f: F) -> Vec<Vec<f64>>
where
    T: Sync,
    F: Fn(&T) -> Vec<f64> + Sync + Send,
{
    let run = || tasks.par_iter().map(&f).collect::<Vec<_>>();
    match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                log::warn!("could not build a {n}-thread pool ({e}); using the global pool");
                run()
            }
        },
        None => run(),
    }
}

#[derive(Debug, Clone, Copy)]
struct Task {
    mode: ModeSpec,
    point: CylPoint,
}

/// Row order: m slowest, then Θ_P, then z, then ρ fastest.
fn force_tasks(spec: &SweepSpec) -> Vec<Task> {
    let mut tasks = Vec::new();
    for &m in &spec.m_values {
        let grid = spec.rho_grid(m);
        for &theta_p in &spec.theta_values {
            let mode = ModeSpec { m, theta_p, ..spec.mode };
            for &z in &spec.z_values {
                for &r in &grid {
                    tasks.push(Task {
                        mode,
                        point: CylPoint::new(r * mode.waist, spec.phi, z),
                    });
                }
            }
        }
    }
    tasks
}

fn run_forces(spec: &SweepSpec, with_parity: bool) -> Result<SweepResult> {
    spec.validate()?;
    let tasks = force_tasks(spec);
    let rows = par_rows(spec.threads, &tasks, |t| {
        let eval = evaluate_point(&t.mode, &spec.atom, &spec.detuning, &t.point, &spec.consts);
        let mut row = point_row(&t.mode, &eval);
        if with_parity {
            let mirror_pt = CylPoint::new(t.point.rho, t.point.phi, -t.point.z);
            let mirror = evaluate_point(&t.mode, &spec.atom, &spec.detuning, &mirror_pt, &spec.consts);
            row.extend(parity_values(&eval, &mirror));
        }
        row
    });
    let result = SweepResult {
        header: spec.header(),
        columns: force_columns(with_parity),
        rows,
    };
    result.check_finite()?;
    if spec.detuning.velocity.is_zero() {
        check_branch_sums(&result)?;
    }
    Ok(result)
}

/// `S₊ + S₋ = S_{m,p}` on every row of a zero-velocity dataset.
fn check_branch_sums(result: &SweepResult) -> Result<()> {
    let (Some(i0), Some(ip), Some(im)) = (
        result.column_index("s_mp"),
        result.column_index("s_plus"),
        result.column_index("s_minus"),
    ) else {
        return Ok(());
    };
    for (row, r) in result.rows.iter().enumerate() {
        let sum = r[ip] + r[im];
        if (sum - r[i0]).abs() > 1e-12 * r[i0].abs() {
            return Err(Error::Consistency {
                row,
                message: format!("s_plus + s_minus = {sum:e} but s_mp = {:e}", r[i0]),
            });
        }
    }
    Ok(())
}

/// Radial profiles at fixed z for each requested winding number.
pub fn run_radial_profile(spec: &SweepSpec) -> Result<SweepResult> {
    expect_kind(spec, SweepKind::RadialProfile)?;
    run_forces(spec, false)
}

/// Profiles along a Poincaré-sphere meridian.
pub fn run_theta_scan(spec: &SweepSpec) -> Result<SweepResult> {
    expect_kind(spec, SweepKind::ThetaScan)?;
    run_forces(spec, false)
}

/// Profiles on several planes with z-parity columns `c(z) ± c(-z)`.
pub fn run_zplane_compare(spec: &SweepSpec) -> Result<SweepResult> {
    expect_kind(spec, SweepKind::ZPlaneCompare)?;
    run_forces(spec, true)
}

/// Phases, transverse amplitudes and axial flux on a (ρ, φ) grid.
/// Row order: m, Θ_P, z, φ, ρ (fastest).
pub fn run_field_map(spec: &SweepSpec) -> Result<SweepResult> {
    expect_kind(spec, SweepKind::FieldMap)?;
    spec.validate()?;
    let mut tasks = Vec::new();
    for &m in &spec.m_values {
        let grid = spec.rho_grid(m);
        for &theta_p in &spec.theta_values {
            let mode = ModeSpec { m, theta_p, ..spec.mode };
            for &z in &spec.z_values {
                for j in 0..spec.phi_samples {
                    let phi = 2.0 * PI * (j as f64) / (spec.phi_samples as f64);
                    for &r in &grid {
                        tasks.push(Task {
                            mode,
                            point: CylPoint::new(r * mode.waist, phi, z),
                        });
                    }
                }
            }
        }
    }
    let rows = par_rows(spec.threads, &tasks, |t| {
        let (mode, pt) = (&t.mode, &t.point);
        let psi = phase_psi(mode, pt);
        let (ux, uy) = beam::transverse_amplitudes(mode, pt, &spec.consts);
        vec![
            f64::from(mode.m),
            f64::from(mode.p),
            pt.rho / mode.waist,
            pt.rho,
            pt.phi,
            pt.z,
            mode.theta_p,
            mode.phi_p,
            psi.plus,
            psi.minus,
            beam::xi_phase(mode, pt),
            ux.re,
            ux.im,
            uy.re,
            uy.im,
            beam::axial_poynting(mode, pt, &spec.consts),
        ]
    });
    let result = SweepResult {
        header: spec.header(),
        columns: FIELD_MAP_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows,
    };
    result.check_finite()?;
    Ok(result)
}

/// Dispatches on `spec.kind`.
pub fn run(spec: &SweepSpec) -> Result<SweepResult> {
    match spec.kind {
        SweepKind::RadialProfile => run_radial_profile(spec),
        SweepKind::ThetaScan => run_theta_scan(spec),
        SweepKind::ZPlaneCompare => run_zplane_compare(spec),
        SweepKind::FieldMap => run_field_map(spec),
    }
}

fn expect_kind(spec: &SweepSpec, kind: SweepKind) -> Result<()> {
    if spec.kind != kind {
        return Err(Error::invalid(
            "sweep.kind",
            format!("expected {kind}, got {}", spec.kind),
        ));
    }
    Ok(())
}

/// Single-point evaluation with the sweep's atom, detuning and template mode.
pub fn evaluate_spec_point(spec: &SweepSpec, point: &CylPoint) -> Result<(ModeSpec, PointEvaluation)> {
    let mode = ModeSpec { m: spec.m_values[0], theta_p: spec.theta_values[0], ..spec.mode };
    mode.validate()?;
    if !(point.rho.is_finite() && point.rho >= 0.0 && point.phi.is_finite() && point.z.is_finite()) {
        return Err(Error::invalid("point", "coordinates must be finite with rho >= 0"));
    }
    let eval = evaluate_point(&mode, &spec.atom, &spec.detuning, point, &spec.consts);
    let all_finite = eval.forces.named().iter().all(|(_, v)| v.is_finite())
        && eval.potential.plus.is_finite()
        && eval.potential.minus.is_finite();
    if !all_finite {
        return Err(Error::NonFinite { row: 0, column: "point".into() });
    }
    Ok((mode, eval))
}

/// Single-row dataset for one point.
pub fn point_result(spec: &SweepSpec, mode: &ModeSpec, eval: &PointEvaluation) -> SweepResult {
    let mut header = spec.header();
    header.push(("point.rho_m".into(), format_float(eval.point.rho)));
    header.push(("point.phi_rad".into(), format_float(eval.point.phi)));
    header.push(("point.z_m".into(), format_float(eval.point.z)));
    SweepResult {
        header,
        columns: force_columns(false),
        rows: vec![point_row(mode, eval)],
    }
}

/// Aligned text table of a point evaluation, forces in zN.
pub fn point_table(mode: &ModeSpec, eval: &PointEvaluation) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let pt = eval.point;
    let _ = writeln!(
        s,
        "point: rho = {:.6e} m ({:.6} w0), phi = {:.6} rad, z = {:.6e} m; m = {}, p = {}, theta_p = {:.6}, phi_p = {:.6}",
        pt.rho,
        pt.rho / mode.waist,
        pt.phi,
        pt.z,
        mode.m,
        mode.p,
        mode.theta_p,
        mode.phi_p
    );
    if eval.singular_axis {
        let _ = writeln!(s, "note: vortex axis; azimuthal phase gradient taken as its regularised limit");
    }
    let _ = writeln!(s, "{:<22} {:>24} {:>24} {:>24}", "quantity", "plus", "minus", "total / base");
    // adding 0.0 drops the sign of negative zeros
    let mut line = |name: &str, a: f64, b: f64, c: Option<f64>| {
        let (a, b) = (a + 0.0, b + 0.0);
        let c = c.map_or_else(|| "".to_string(), |v| format!("{:.10e}", v + 0.0));
        let _ = writeln!(s, "{name:<22} {a:>24.10e} {b:>24.10e} {c:>24}");
    };
    line("Omega [rad/s]", eval.rabi.plus, eval.rabi.minus, Some(eval.rabi_base));
    line("S", eval.saturation.plus, eval.saturation.minus, Some(eval.saturation_base));
    line("Delta [rad/s]", eval.detuning.plus, eval.detuning.minus, None);
    line("U_dip [J]", eval.potential.plus, eval.potential.minus, Some(eval.potential.plus + eval.potential.minus));
    line("Psi [rad]", eval.phase.plus, eval.phase.minus, None);
    let f = &eval.forces;
    let zn = |x: f64| x * ZN_PER_NEWTON;
    for (label, p, m, t) in [
        ("F_sca", f.sca_plus, f.sca_minus, f.sca_total),
        ("F_dip", f.dip_plus, f.dip_minus, f.dip_total),
    ] {
        line(&format!("{label}.rho [zN]"), zn(p.rho), zn(m.rho), Some(zn(t.rho)));
        line(&format!("{label}.phi [zN]"), zn(p.phi), zn(m.phi), Some(zn(t.phi)));
        line(&format!("{label}.z [zN]"), zn(p.z), zn(m.z), Some(zn(t.z)));
    }
    let g = f.grand_total;
    let _ = writeln!(
        s,
        "{:<22} rho = {:.10e}  phi = {:.10e}  z = {:.10e}",
        "F_total [zN]",
        zn(g.rho) + 0.0,
        zn(g.phi) + 0.0,
        zn(g.z) + 0.0
    );
    s
}
