//! Optical forces on two-level atoms in Laguerre-Gaussian vortex beams with
//! arbitrary polarization on the Poincaré sphere.
//!
//! The crate is organised bottom up:
//!
//! * [`beam`]: paraxial LG modes, Poincaré weights, the Gouy and curvature
//!   phase, and power normalization checked by quadrature
//! * [`atom`]: dipole coupling, Rabi frequencies per σ± branch, and
//!   Doppler-shifted detuning
//! * [`force`]: scattering and dipole forces, the optical potential, and
//!   per-point breakdowns
//! * [`scan`]: named sweeps, configuration files and CSV datasets
//! * [`validate`]: runtime oracle checks used by the `validate` command
//!
//! All quantities are SI unless a name says otherwise; datasets report
//! forces in zeptonewtons.

pub mod atom;
pub mod beam;
pub mod constants;
pub mod error;
pub mod force;
pub mod quadrature;
pub mod scan;
pub mod special;
pub mod validate;

pub use atom::{AtomSpec, DetuningSpec, TransitionPair, Velocity};
pub use beam::{CylPoint, ModeSpec, Propagation, QuadratureSettings};
pub use constants::PhysicalConstants;
pub use error::{ConfigError, Error, Result};
pub use force::{evaluate_point, force_breakdown, ForceBreakdown, PointEvaluation};
pub use scan::{SweepKind, SweepResult, SweepSpec};
