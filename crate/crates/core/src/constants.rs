//! Physical constants (CODATA 2018).
//!
//! | symbol | value | unit |
//! |--------|-------|------|
//! | c      | 299 792 458 (exact) | m s⁻¹ |
//! | μ₀     | 1.256 637 062 12 × 10⁻⁶ | N A⁻² |
//! | ε₀     | 1 / (μ₀ c²) ≈ 8.854 187 8128 × 10⁻¹² | F m⁻¹ |
//! | ħ      | 1.054 571 817 × 10⁻³⁴ | J s |
//!
//! ε₀ is derived from μ₀ and c rather than taken from the rounded table entry
//! so that `c² μ₀ ε₀ = 1` holds to the last bit.
//!
//! A replacement table can be loaded from a file for testing, see
//! [`PhysicalConstants::from_env_or_default`].

use std::path::Path;

use crate::error::{ConfigError, Error};

/// Environment variable naming an alternative constants table.
pub const CONSTANTS_ENV_VAR: &str = "VORTEX_FORCES_CONSTANTS";

/// Zeptonewtons per newton.
pub const ZN_PER_NEWTON: f64 = 1e21;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Speed of light in vacuum, m/s.
    pub c: f64,
    /// Vacuum permeability, N/A².
    pub mu0: f64,
    /// Vacuum permittivity, F/m.
    pub eps0: f64,
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata_2018()
    }
}

impl PhysicalConstants {
    pub fn codata_2018() -> Self {
        let c = 299_792_458.0;
        let mu0 = 1.256_637_062_12e-6;
        PhysicalConstants {
            c,
            mu0,
            eps0: 1.0 / (mu0 * c * c),
            hbar: 1.054_571_817e-34,
        }
    }

    /// `c² μ₀ ε₀ - 1`; zero for a consistent table.
    pub fn consistency_residual(&self) -> f64 {
        self.c * self.c * self.mu0 * self.eps0 - 1.0
    }

    /// Named values in table order, used for CSV headers.
    pub fn entries(&self) -> [(&'static str, f64); 4] {
        [
            ("c", self.c),
            ("mu0", self.mu0),
            ("eps0", self.eps0),
            ("hbar", self.hbar),
        ]
    }

    /// Parses a `name = value` table. Missing names keep their CODATA value;
    /// if `eps0` is absent it is re-derived from the (possibly overridden)
    /// `mu0` and `c`.
    pub fn parse_table(text: &str) -> Result<Self, ConfigError> {
        let mut out = Self::codata_2018();
        let mut eps0_given = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError::at(line_no, "constants", "expected `name = value`")
            })?;
            let key = key.trim();
            let value: f64 = value.trim().parse().map_err(|_| {
                ConfigError::at(line_no, key, format!("not a number: '{}'", value.trim()))
            })?;
            if !(value.is_finite() && value > 0.0) {
                return Err(ConfigError::at(line_no, key, "must be positive and finite"));
            }
            match key {
                "c" => out.c = value,
                "mu0" => out.mu0 = value,
                "eps0" => {
                    out.eps0 = value;
                    eps0_given = true;
                }
                "hbar" => out.hbar = value,
                other => {
                    return Err(ConfigError::at(line_no, other, "unknown constant"));
                }
            }
        }
        if !eps0_given {
            out.eps0 = 1.0 / (out.mu0 * out.c * out.c);
        }
        Ok(out)
    }

    pub fn load_table(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_table(&text).map_err(Error::from)
    }

    /// CODATA values unless [`CONSTANTS_ENV_VAR`] points at a table file.
    pub fn from_env_or_default() -> Result<Self, Error> {
        match std::env::var_os(CONSTANTS_ENV_VAR) {
            Some(path) if !path.is_empty() => Self::load_table(Path::new(&path)),
            _ => Ok(Self::codata_2018()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codata_table_is_self_consistent() {
        let k = PhysicalConstants::codata_2018();
        assert!(k.consistency_residual().abs() < 1e-15);
        assert_eq!(k.c, 299_792_458.0);
        assert!((k.eps0 / 8.854_187_812_8e-12 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn table_override_rederives_eps0() {
        let k = PhysicalConstants::parse_table("# test table\nmu0 = 1.0e-6\nhbar=2e-34\n").unwrap();
        assert_eq!(k.mu0, 1.0e-6);
        assert_eq!(k.hbar, 2e-34);
        assert!(k.consistency_residual().abs() < 1e-15);
    }

    #[test]
    fn table_rejects_unknown_names() {
        let err = PhysicalConstants::parse_table("c = 3e8\nplanck = 1\n").unwrap_err();
        assert_eq!(err.line, Some(2));
        assert!(err.to_string().contains("planck"));
    }
}
