//! Sweep configuration files.
//!
//! Grammar:
//!
//! ```text
//! file    := line*
//! line    := blank | comment | section | pair
//! comment := '#' text
//! section := '[' ("mode" | "atom" | "detuning" | "sweep") ']'
//! pair    := key '=' value [comment]
//! value   := item (',' item)*
//! item    := number [unit]  |  word
//! ```
//!
//! Keys must appear inside a section. A key given twice keeps the last
//! value. Quantities take a unit suffix, with or without a space:
//!
//! * lengths: `m`, `mm`, `um`/`µm`, `nm`, `pm`, `lambda` (mode wavelength),
//!   `w0` (mode waist), `zR` (Rayleigh range); a bare number is metres,
//!   except for `sweep.rho_min`/`sweep.rho_max` where it is units of w0
//! * power: `W`, `mW`, `uW`/`µW`, `nW`, `pW`, `kW`; bare is watts
//! * detuning: `Gamma`/`Γ` or `rad/s`; bare is units of Γ
//! * angles: `rad`, `deg`, or multiples of `pi` such as `pi/4`, `3pi/4`;
//!   bare is radians
//! * rates: `1/s`, `/s`; bare is s⁻¹
//! * velocities: `m/s`; bare is m/s

use std::f64::consts::PI;
use std::path::Path;

use super::{Preset, SweepKind, SweepSpec};
use crate::atom::{dipole_from_linewidth, Velocity};
use crate::beam::{CylPoint, Propagation};
use crate::constants::PhysicalConstants;
use crate::error::{ConfigError, Error, Result};

/// Documentation for one configuration key.
#[derive(Debug, Clone, Copy)]
pub struct KeyDoc {
    pub key: &'static str,
    pub units: &'static str,
    pub help: &'static str,
}

pub const CONFIG_KEYS: &[KeyDoc] = &[
    KeyDoc { key: "mode.m", units: "integer >= 0", help: "winding number; shorthand for sweep.m_values with one entry" },
    KeyDoc { key: "mode.p", units: "integer >= 0", help: "radial number (default 0)" },
    KeyDoc { key: "mode.lambda", units: "length: m, nm, um", help: "beam wavelength (default 589 nm)" },
    KeyDoc { key: "mode.w0", units: "length: m, nm, um, lambda", help: "waist at focus (default 5 lambda; 1 lambda with preset tight)" },
    KeyDoc { key: "mode.power", units: "power: W, mW, uW, nW, pW", help: "beam power (default 2.5 uW)" },
    KeyDoc { key: "mode.theta_p", units: "angle: rad, deg, pi/n", help: "Poincare polar angle; shorthand for sweep.theta with one entry" },
    KeyDoc { key: "mode.phi_p", units: "angle: rad, deg, pi/n", help: "Poincare azimuth (default 0)" },
    KeyDoc { key: "mode.direction", units: "+1 | -1 | forward | backward", help: "propagation direction along z (default +1)" },
    KeyDoc { key: "atom.lambda", units: "length: m, nm, um", help: "transition wavelength (default 589 nm)" },
    KeyDoc { key: "atom.gamma", units: "rate: 1/s", help: "spontaneous emission rate (default 6.15e7)" },
    KeyDoc { key: "detuning.delta0", units: "Gamma | rad/s (bare: Gamma)", help: "static detuning (default 10 Gamma)" },
    KeyDoc { key: "detuning.v_rho", units: "velocity: m/s", help: "radial atom velocity (default 0)" },
    KeyDoc { key: "detuning.v_phi", units: "velocity: m/s", help: "azimuthal atom velocity (default 0)" },
    KeyDoc { key: "detuning.v_z", units: "velocity: m/s", help: "axial atom velocity (default 0)" },
    KeyDoc { key: "sweep.kind", units: "radial-profile | theta-scan | zplane-compare | field-map", help: "sweep type (set by the subcommand)" },
    KeyDoc { key: "sweep.preset", units: "default | tight", help: "parameter preset; tight sets w0 = lambda" },
    KeyDoc { key: "sweep.m_values", units: "list of integers", help: "winding numbers to sweep" },
    KeyDoc { key: "sweep.rho_min", units: "w0 units (bare) or length", help: "first radial sample (default 0)" },
    KeyDoc { key: "sweep.rho_max", units: "w0 units (bare), length, or auto", help: "last radial sample (auto: 3, or sqrt(2m)+3 for m > 5)" },
    KeyDoc { key: "sweep.samples", units: "integer >= 2", help: "radial samples (default 512; field-map 128)" },
    KeyDoc { key: "sweep.z", units: "list of lengths: m, nm, um, lambda, w0, zR", help: "axial planes" },
    KeyDoc { key: "sweep.theta", units: "list of angles: rad, deg, pi/n", help: "Poincare polar angles" },
    KeyDoc { key: "sweep.phi", units: "angle: rad, deg, pi/n", help: "evaluation azimuth (default 0)" },
    KeyDoc { key: "sweep.phi_samples", units: "integer >= 1", help: "azimuth samples for field-map (default 64)" },
    KeyDoc { key: "sweep.threads", units: "integer >= 1", help: "worker threads; output does not depend on it" },
];

const SECTIONS: [&str; 4] = ["mode", "atom", "detuning", "sweep"];

/// One `section.key = value` assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigEntry {
    /// Dotted key, e.g. `mode.m`.
    pub key: String,
    pub value: String,
    /// Source line, `None` for command-line overrides.
    pub line: Option<usize>,
}

/// Parsed but unresolved configuration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub entries: Vec<ConfigEntry>,
}

fn known_key(key: &str) -> bool {
    CONFIG_KEYS.iter().any(|k| k.key == key)
}

impl RawConfig {
    /// Applies a `section.key=value` override after the file contents.
    pub fn set_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::new(assignment, "override must look like section.key=value"))?;
        let key = key.trim();
        if !known_key(key) {
            return Err(ConfigError::new(key, "unknown key"));
        }
        self.entries.push(ConfigEntry {
            key: key.to_string(),
            value: value.trim().to_string(),
            line: None,
        });
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&ConfigEntry> {
        self.entries.iter().rev().find(|e| e.key == key)
    }
}

pub fn parse_config(text: &str) -> Result<RawConfig, ConfigError> {
    let mut section: Option<&str> = None;
    let mut out = RawConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::at(line_no, line, "unterminated section header"))?
                .trim();
            section = Some(
                SECTIONS
                    .iter()
                    .copied()
                    .find(|s| *s == name)
                    .ok_or_else(|| ConfigError::at(line_no, name, "unknown section (expected mode, atom, detuning or sweep)"))?,
            );
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::at(line_no, line, "expected `key = value`"))?;
        let key = key.trim();
        let sect = section.ok_or_else(|| ConfigError::at(line_no, key, "key outside of any section"))?;
        let full = format!("{sect}.{key}");
        if !known_key(&full) {
            return Err(ConfigError::at(line_no, full, "unknown key"));
        }
        let value = value.trim();
        if value.is_empty() {
            return Err(ConfigError::at(line_no, full, "missing value"));
        }
        out.entries.push(ConfigEntry {
            key: full,
            value: value.to_string(),
            line: Some(line_no),
        });
    }
    Ok(out)
}

/// Reads, parses and resolves a configuration file.
pub fn load_config(path: &Path) -> Result<SweepSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let raw = parse_config(&text)?;
    let consts = PhysicalConstants::from_env_or_default()?;
    Ok(resolve(&raw, None, consts)?)
}

/// Reads and parses a configuration file without resolving it, so that
/// overrides can be applied first.
pub fn read_config(path: &Path) -> Result<RawConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_config(&text)?)
}

/// Resolution for single-point evaluation: as [`resolve`], with `m = 2`
/// unless the configuration names a winding number.
pub fn resolve_point(raw: &RawConfig, consts: PhysicalConstants) -> Result<SweepSpec, ConfigError> {
    let mut spec = resolve(raw, None, consts)?;
    if raw.get("mode.m").is_none() && raw.get("sweep.m_values").is_none() {
        spec.m_values = vec![2];
        spec.mode.m = 2;
        spec.validate().map_err(|e| ConfigError::new("mode.m", e.to_string()))?;
    }
    Ok(spec)
}

/// Evaluation point from unit-tagged strings. Lengths accept every length
/// unit including `w0` and `zR` of the resolved mode; a bare number is metres.
pub fn parse_point(spec: &SweepSpec, rho: &str, phi: &str, z: &str) -> Result<CylPoint, ConfigError> {
    let scales = LengthScales {
        lambda: spec.mode.wavelength,
        w0: Some(spec.mode.waist),
        zr: Some(spec.mode.rayleigh_range()),
    };
    let rho = parse_length(rho, &scales).map_err(|m| ConfigError::new("rho", m))?;
    if rho.is_nan() || rho < 0.0 {
        return Err(ConfigError::new("rho", "must be >= 0"));
    }
    let phi = parse_angle(phi).map_err(|m| ConfigError::new("phi", m))?;
    let z = parse_length(z, &scales).map_err(|m| ConfigError::new("z", m))?;
    Ok(CylPoint::new(rho, phi, z))
}

/// Key reference for help output: one key per line with units and meaning.
pub fn config_key_help() -> String {
    let mut out = String::from("Configuration keys (config file sections or --set section.key=value):\n");
    let width = CONFIG_KEYS.iter().map(|k| k.key.len()).max().unwrap_or(0);
    for k in CONFIG_KEYS {
        out.push_str(&format!("  {:<width$}  {}\n  {:<width$}    [{}]\n", k.key, k.help, "", k.units));
    }
    out
}

/// Splits `"2.5 uW"`, `"5lambda"`, `"-1e-6"` into number and unit.
fn split_quantity(s: &str) -> Option<(f64, &str)> {
    let s = s.trim();
    let mut ends: Vec<usize> = s.char_indices().map(|(i, _)| i).skip(1).collect();
    ends.push(s.len());
    for &end in ends.iter().rev() {
        if let Ok(v) = s[..end].trim().parse::<f64>() {
            if !v.is_finite() {
                return None;
            }
            return Some((v, s[end..].trim()));
        }
    }
    None
}

#[derive(Debug, Clone, Copy)]
struct LengthScales {
    lambda: f64,
    w0: Option<f64>,
    zr: Option<f64>,
}

fn parse_length(value: &str, scales: &LengthScales) -> Result<f64, String> {
    let (v, unit) = split_quantity(value).ok_or_else(|| format!("not a length: '{value}'"))?;
    let factor = match unit {
        "" | "m" => 1.0,
        "mm" => 1e-3,
        "um" | "µm" | "μm" => 1e-6,
        "nm" => 1e-9,
        "pm" => 1e-12,
        "lambda" | "λ" => scales.lambda,
        "w0" => scales.w0.ok_or("w0 cannot be used to define w0 itself")?,
        "zR" | "zr" => scales.zr.ok_or("zR is not available here")?,
        other => return Err(format!("expected a length unit (m, mm, um, nm, lambda, w0, zR), got '{other}'")),
    };
    Ok(v * factor)
}

fn parse_power(value: &str) -> Result<f64, String> {
    let (v, unit) = split_quantity(value).ok_or_else(|| format!("not a power: '{value}'"))?;
    let factor = match unit {
        "" | "W" => 1.0,
        "kW" => 1e3,
        "mW" => 1e-3,
        "uW" | "µW" | "μW" => 1e-6,
        "nW" => 1e-9,
        "pW" => 1e-12,
        other => return Err(format!("expected a power unit (W, mW, uW, nW, pW), got '{other}'")),
    };
    Ok(v * factor)
}

fn parse_detuning(value: &str, gamma: f64) -> Result<f64, String> {
    let (v, unit) = split_quantity(value).ok_or_else(|| format!("not a detuning: '{value}'"))?;
    match unit {
        "" | "Gamma" | "gamma" | "Γ" => Ok(v * gamma),
        "rad/s" => Ok(v),
        other => Err(format!("expected a detuning unit (Gamma or rad/s), got '{other}'")),
    }
}

fn parse_rate(value: &str) -> Result<f64, String> {
    let (v, unit) = split_quantity(value).ok_or_else(|| format!("not a rate: '{value}'"))?;
    match unit {
        "" | "1/s" | "/s" | "s^-1" => Ok(v),
        other => Err(format!("expected a rate unit (1/s), got '{other}'")),
    }
}

fn parse_velocity(value: &str) -> Result<f64, String> {
    let (v, unit) = split_quantity(value).ok_or_else(|| format!("not a velocity: '{value}'"))?;
    match unit {
        "" | "m/s" => Ok(v),
        other => Err(format!("expected a velocity unit (m/s), got '{other}'")),
    }
}

/// Accepts `1.2`, `1.2 rad`, `45 deg`, `pi`, `-pi/2`, `3pi/4`, `3*pi/4`, `0.5 pi`.
pub(crate) fn parse_angle(value: &str) -> Result<f64, String> {
    let compact: String = value.chars().filter(|c| !c.is_whitespace()).collect();
    let compact = compact.replace('π', "pi");
    if let Some((coef, rest)) = compact.split_once("pi") {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let c = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other.parse::<f64>().map_err(|_| format!("bad angle coefficient in '{value}'"))?,
        };
        let d = match rest {
            "" => 1.0,
            r => r
                .strip_prefix('/')
                .and_then(|n| n.parse::<f64>().ok())
                .filter(|n| *n != 0.0)
                .ok_or_else(|| format!("bad angle '{value}' (expected forms like pi/4 or 3pi/4)"))?,
        };
        return Ok(c * PI / d);
    }
    let (v, unit) = split_quantity(value).ok_or_else(|| format!("not an angle: '{value}'"))?;
    match unit {
        "" | "rad" => Ok(v),
        "deg" => Ok(v.to_radians()),
        other => Err(format!("expected an angle unit (rad, deg, pi/n), got '{other}'")),
    }
}

fn parse_int(value: &str) -> Result<i64, String> {
    value
        .trim()
        .parse::<i64>()
        .map_err(|_| format!("expected an integer, got '{}'", value.trim()))
}

fn parse_list<T>(value: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    let items: Vec<&str> = value.split(',').map(str::trim).collect();
    if items.iter().any(|s| s.is_empty()) {
        return Err("empty list item".into());
    }
    items.into_iter().map(f).collect()
}

struct Resolver<'a> {
    raw: &'a RawConfig,
}

impl Resolver<'_> {
    fn with<T>(&self, key: &str, f: impl FnOnce(&str) -> Result<T, String>) -> Result<Option<T>, ConfigError> {
        match self.raw.get(key) {
            None => Ok(None),
            Some(e) => f(&e.value)
                .map(Some)
                .map_err(|msg| ConfigError { line: e.line, key: key.to_string(), message: msg }),
        }
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.raw.get(key).and_then(|e| e.line)
    }

    fn exclusive(&self, a: &str, b: &str) -> Result<(), ConfigError> {
        if self.raw.get(a).is_some() && self.raw.get(b).is_some() {
            return Err(ConfigError::new(b, format!("conflicts with {a}; set only one")).with_line(self.line(b)));
        }
        Ok(())
    }
}

fn non_negative_u32(v: i64) -> Result<u32, String> {
    u32::try_from(v).map_err(|_| format!("must be a non-negative integer, got {v}"))
}

fn count(v: i64, min: i64) -> Result<usize, String> {
    if v < min {
        return Err(format!("must be at least {min}, got {v}"));
    }
    usize::try_from(v).map_err(|_| format!("out of range: {v}"))
}

/// Resolves a raw configuration into a sweep. `kind` comes from the caller
/// (the CLI subcommand); a conflicting `sweep.kind` is an error.
pub fn resolve(raw: &RawConfig, kind: Option<SweepKind>, consts: PhysicalConstants) -> Result<SweepSpec, ConfigError> {
    let r = Resolver { raw };
    let file_kind = r.with("sweep.kind", |v| v.parse::<SweepKind>())?;
    let kind = match (kind, file_kind) {
        (Some(k), Some(f)) if k != f => {
            return Err(ConfigError::new("sweep.kind", format!("config selects {f} but {k} was requested"))
                .with_line(r.line("sweep.kind")));
        }
        (Some(k), _) => k,
        (None, Some(f)) => f,
        (None, None) => SweepKind::RadialProfile,
    };
    let preset = r.with("sweep.preset", |v| v.parse::<Preset>())?.unwrap_or_default();
    let mut spec = SweepSpec::defaults(kind, preset, consts);

    let no_scales = LengthScales { lambda: spec.mode.wavelength, w0: None, zr: None };
    if let Some(l) = r.with("mode.lambda", |v| {
        parse_length(v, &LengthScales { lambda: f64::NAN, ..no_scales }).and_then(|x| {
            if x.is_nan() {
                Err("the wavelength cannot be given in units of lambda".into())
            } else {
                Ok(x)
            }
        })
    })? {
        spec.mode.wavelength = l;
        spec.mode.waist = preset.waist_in_wavelengths() * l;
    }
    let lambda_scales = LengthScales { lambda: spec.mode.wavelength, w0: None, zr: None };
    if let Some(w) = r.with("mode.w0", |v| parse_length(v, &lambda_scales))? {
        spec.mode.waist = w;
    }
    if let Some(p) = r.with("mode.power", parse_power)? {
        spec.mode.power = p;
    }
    if let Some(p) = r.with("mode.p", |v| parse_int(v).and_then(non_negative_u32))? {
        spec.mode.p = p;
    }
    if let Some(phi) = r.with("mode.phi_p", parse_angle)? {
        spec.mode.phi_p = phi;
    }
    if let Some(d) = r.with("mode.direction", |v| match v {
        "forward" | "+1" | "1" => Ok(Propagation::Forward),
        "backward" | "-1" => Ok(Propagation::Backward),
        other => Err(format!("expected +1, -1, forward or backward, got '{other}'")),
    })? {
        spec.mode.direction = d;
    }

    r.exclusive("mode.m", "sweep.m_values")?;
    let to_m = |v: i64| i32::try_from(v).map_err(|_| format!("winding number out of range: {v}"));
    if let Some(m) = r.with("mode.m", |v| parse_int(v).and_then(to_m))? {
        spec.m_values = vec![m];
    }
    if let Some(ms) = r.with("sweep.m_values", |v| parse_list(v, |s| parse_int(s).and_then(to_m)))? {
        spec.m_values = ms;
    }
    spec.mode.m = spec.m_values[0];

    r.exclusive("mode.theta_p", "sweep.theta")?;
    if let Some(t) = r.with("mode.theta_p", parse_angle)? {
        spec.theta_values = vec![t];
    }
    if let Some(ts) = r.with("sweep.theta", |v| parse_list(v, parse_angle))? {
        spec.theta_values = ts;
    }
    spec.mode.theta_p = spec.theta_values[0];

    let atom_lambda = r.with("atom.lambda", |v| parse_length(v, &lambda_scales))?;
    let gamma = r.with("atom.gamma", parse_rate)?;
    if atom_lambda.is_some() || gamma.is_some() {
        let lambda = atom_lambda.unwrap_or(spec.atom.wavelength);
        let gamma = gamma.unwrap_or(spec.atom.gamma);
        for (key, v) in [("atom.lambda", lambda), ("atom.gamma", gamma)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::new(key, "must be positive").with_line(r.line(key)));
            }
        }
        spec.atom.wavelength = lambda;
        spec.atom.gamma = gamma;
        spec.atom.dipole = dipole_from_linewidth(lambda, gamma, &consts);
    }
    let gamma = spec.atom.gamma;
    spec.detuning.delta0 = r
        .with("detuning.delta0", |v| parse_detuning(v, gamma))?
        .unwrap_or(10.0 * gamma);
    spec.detuning.velocity = Velocity {
        v_rho: r.with("detuning.v_rho", parse_velocity)?.unwrap_or(0.0),
        v_phi: r.with("detuning.v_phi", parse_velocity)?.unwrap_or(0.0),
        v_z: r.with("detuning.v_z", parse_velocity)?.unwrap_or(0.0),
    };

    let w0 = spec.mode.waist;
    let full_scales = LengthScales {
        lambda: spec.mode.wavelength,
        w0: Some(w0),
        zr: Some(spec.mode.rayleigh_range()),
    };
    let in_waists = |v: &str| -> Result<f64, String> {
        match split_quantity(v) {
            Some((x, "")) => Ok(x),
            _ => parse_length(v, &full_scales).map(|l| l / w0),
        }
    };
    if let Some(min) = r.with("sweep.rho_min", in_waists)? {
        spec.rho_range.min = min;
    }
    if let Some(max) = r.with("sweep.rho_max", |v| if v == "auto" { Ok(None) } else { in_waists(v).map(Some) })? {
        spec.rho_range.max = max;
    }
    if let Some(n) = r.with("sweep.samples", |v| parse_int(v).and_then(|n| count(n, 2)))? {
        spec.samples = n;
    }
    if let Some(zs) = r.with("sweep.z", |v| parse_list(v, |s| parse_length(s, &full_scales)))? {
        spec.z_values = zs;
    } else if kind == SweepKind::ZPlaneCompare {
        let l = spec.mode.wavelength;
        spec.z_values = vec![-l, 0.0, l];
    }
    if let Some(phi) = r.with("sweep.phi", parse_angle)? {
        spec.phi = phi;
    }
    if let Some(n) = r.with("sweep.phi_samples", |v| parse_int(v).and_then(|n| count(n, 1)))? {
        spec.phi_samples = n;
    }
    if let Some(n) = r.with("sweep.threads", |v| parse_int(v).and_then(|n| count(n, 1)))? {
        spec.threads = Some(n);
    }

    spec.validate().map_err(|e| match e {
        Error::InvalidParameter { field, reason } => {
            // map the validation field back to whichever key set it
            let line = r.line(field).or_else(|| match field {
                "mode.m" => r.line("sweep.m_values"),
                "mode.theta_p" => r.line("sweep.theta"),
                _ => None,
            });
            ConfigError::new(field, reason).with_line(line)
        }
        other => ConfigError::new("config", other.to_string()),
    })?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k() -> PhysicalConstants {
        PhysicalConstants::codata_2018()
    }

    fn resolve_text(text: &str, kind: Option<SweepKind>) -> Result<SweepSpec, ConfigError> {
        resolve(&parse_config(text)?, kind, k())
    }

    #[test]
    fn empty_file_gives_radial_defaults() {
        let s = resolve_text("", Some(SweepKind::RadialProfile)).unwrap();
        assert_eq!(s, SweepSpec::defaults(SweepKind::RadialProfile, Preset::Default, k()));
        assert_eq!(s.m_values, vec![0, 1, 2, 5, 20]);
        assert!((s.detuning.delta0 - 10.0 * 6.15e7).abs() < 1e-6);
        assert_eq!(s.mode.power, 2.5e-6);
        assert_eq!(s.mode.waist, 5.0 * 589e-9);
    }

    #[test]
    fn quantities_with_units() {
        let s = resolve_text(
            "[mode]\nw0 = 5 lambda\npower = 2.5uW\n[detuning]\ndelta0 = 10 Gamma\n[sweep]\nz = -1 lambda, 0, 0.5zR\ntheta = 0, pi/4, 3pi/4, 90 deg\n",
            None,
        )
        .unwrap();
        assert!((s.mode.waist - 2.945e-6).abs() < 1e-18);
        assert!((s.mode.power - 2.5e-6).abs() < 1e-20);
        assert_eq!(s.detuning.delta0, 10.0 * 6.15e7);
        assert_eq!(s.z_values[0], -589e-9);
        assert!((s.z_values[2] - 0.5 * s.mode.rayleigh_range()).abs() < 1e-18);
        assert_eq!(s.theta_values[1], PI / 4.0);
        assert_eq!(s.theta_values[2], 3.0 * PI / 4.0);
        assert!((s.theta_values[3] - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn angle_forms() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_angle("3*pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("0.5 pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_angle("1.25 rad").unwrap(), 1.25);
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("3 W").is_err());
    }

    #[test]
    fn diagnostics_carry_line_and_key() {
        let e = resolve_text("[mode]\n\npower = 5 lambda\n", None).unwrap_err();
        assert_eq!(e.line, Some(3));
        assert_eq!(e.key, "mode.power");
        let e = parse_config("[mode]\ncolour = red\n").unwrap_err();
        assert_eq!((e.line, e.key.as_str()), (Some(2), "mode.colour"));
        let e = parse_config("m = 2\n").unwrap_err();
        assert!(e.message.contains("outside"));
        let e = parse_config("[beam]\n").unwrap_err();
        assert!(e.message.contains("unknown section"));
        let e = resolve_text("[sweep]\nsamples = 1\n", None).unwrap_err();
        assert_eq!(e.key, "sweep.samples");
    }

    #[test]
    fn validation_failures_point_at_the_key() {
        let e = resolve_text("[mode]\nw0 = 0.5 lambda\n", None).unwrap_err();
        assert_eq!((e.key.as_str(), e.line), ("mode.w0", Some(2)));
        let e = resolve_text("[sweep]\nm_values = 1, -2\n", None).unwrap_err();
        assert_eq!((e.key.as_str(), e.line), ("mode.m", Some(2)));
    }

    #[test]
    fn kind_conflict_and_exclusive_keys() {
        let e = resolve_text("[sweep]\nkind = theta-scan\n", Some(SweepKind::RadialProfile)).unwrap_err();
        assert_eq!(e.key, "sweep.kind");
        let e = resolve_text("[mode]\nm = 2\n[sweep]\nm_values = 1,2\n", None).unwrap_err();
        assert_eq!(e.key, "sweep.m_values");
    }

    #[test]
    fn overrides_win_and_are_checked() {
        let mut raw = parse_config("[mode]\nm = 1\n").unwrap();
        raw.set_override("mode.m=5").unwrap();
        let s = resolve(&raw, None, k()).unwrap();
        assert_eq!(s.m_values, vec![5]);
        assert!(raw.set_override("mode.colour=1").is_err());
        assert!(raw.set_override("mode.m").is_err());
    }

    #[test]
    fn tight_preset_and_zplane_defaults() {
        let s = resolve_text("[sweep]\npreset = tight\n", Some(SweepKind::ZPlaneCompare)).unwrap();
        assert_eq!(s.mode.waist, s.mode.wavelength);
        assert_eq!(s.z_values, vec![-589e-9, 0.0, 589e-9]);
        let s = resolve_text("[mode]\nlambda = 1 um\n", Some(SweepKind::ZPlaneCompare)).unwrap();
        assert_eq!(s.z_values, vec![-1e-6, 0.0, 1e-6]);
        assert!((s.mode.waist - 5e-6).abs() < 1e-20);
    }

    #[test]
    fn atom_overrides_rederive_dipole() {
        let s = resolve_text("[atom]\ngamma = 2.46e8 /s\n", None).unwrap();
        let base = SweepSpec::defaults(SweepKind::RadialProfile, Preset::Default, k());
        assert!((s.atom.dipole / base.atom.dipole - 2.0).abs() < 1e-14);
        assert_eq!(s.detuning.delta0, 10.0 * 2.46e8);
    }

    #[test]
    fn rho_range_in_waists_or_lengths() {
        let s = resolve_text("[sweep]\nrho_min = 0.1\nrho_max = 2 lambda\n", None).unwrap();
        assert_eq!(s.rho_range.min, 0.1);
        assert!((s.rho_range.max.unwrap() - 0.4).abs() < 1e-15);
        let s = resolve_text("[sweep]\nrho_max = auto\n", None).unwrap();
        assert_eq!(s.rho_range.max, None);
    }

    #[test]
    fn every_key_is_documented_once() {
        for (i, a) in CONFIG_KEYS.iter().enumerate() {
            assert!(CONFIG_KEYS[i + 1..].iter().all(|b| b.key != a.key));
            let (sect, _) = a.key.split_once('.').unwrap();
            assert!(SECTIONS.contains(&sect));
        }
    }

    #[test]
    fn point_resolution() {
        let spec = resolve_point(&RawConfig::default(), k()).unwrap();
        assert_eq!(spec.m_values, vec![2]);
        let pt = parse_point(&spec, "0.5 w0", "pi/2", "-1 lambda").unwrap();
        assert_eq!(pt.rho, 0.5 * spec.mode.waist);
        assert_eq!(pt.phi, PI / 2.0);
        assert_eq!(pt.z, -589e-9);
        assert!(parse_point(&spec, "-1um", "0", "0").is_err());
        let mut raw = RawConfig::default();
        raw.set_override("mode.m=5").unwrap();
        assert_eq!(resolve_point(&raw, k()).unwrap().m_values, vec![5]);
    }

    #[test]
    fn key_help_lists_every_key() {
        let help = config_key_help();
        for key in CONFIG_KEYS {
            assert!(help.contains(key.key) && help.contains(key.units));
        }
    }
}
