//! Two-level atom coupled to a Poincaré mode through the Δm = ±1 dipole
//! transitions.
//!
//! The `+` branch couples to the `𝒰_P` (right-circular, winding `+m`) part
//! of the field and the `-` branch to the `𝒱_P` part. Both share one
//! linewidth Γ and equal transition probability.

use std::f64::consts::{PI, SQRT_2};
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;

use crate::beam::{lg_envelope, CylPoint, ModeSpec};
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// Sodium D2 transition wavelength, m.
pub const SODIUM_D2_WAVELENGTH: f64 = 589e-9;
/// Sodium D2 spontaneous emission rate Γ, s⁻¹.
pub const SODIUM_D2_GAMMA: f64 = 6.15e7;

/// A quantity carried separately by the Δm = +1 and Δm = -1 branches.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TransitionPair<T> {
    pub plus: T,
    pub minus: T,
}

impl<T> TransitionPair<T> {
    pub fn new(plus: T, minus: T) -> Self {
        TransitionPair { plus, minus }
    }

    pub fn map<U>(self, mut f: impl FnMut(T) -> U) -> TransitionPair<U> {
        TransitionPair {
            plus: f(self.plus),
            minus: f(self.minus),
        }
    }

    pub fn zip<U>(self, other: TransitionPair<U>) -> TransitionPair<(T, U)> {
        TransitionPair {
            plus: (self.plus, other.plus),
            minus: (self.minus, other.minus),
        }
    }

    /// Applies `f(branch_sign, value)` with sign `+1.0` / `-1.0`.
    pub fn map_signed<U>(self, mut f: impl FnMut(f64, T) -> U) -> TransitionPair<U> {
        TransitionPair {
            plus: f(1.0, self.plus),
            minus: f(-1.0, self.minus),
        }
    }
}

impl<T: Add<Output = T>> TransitionPair<T> {
    pub fn sum(self) -> T {
        self.plus + self.minus
    }
}

/// Two-level atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSpec {
    /// Transition wavelength, m.
    pub wavelength: f64,
    /// Spontaneous emission rate Γ, s⁻¹.
    pub gamma: f64,
    /// Dipole matrix element d_eg, C·m.
    pub dipole: f64,
}

impl AtomSpec {
    /// Builds the atom with `d_eg` fixed by the linewidth.
    pub fn from_linewidth(wavelength: f64, gamma: f64, consts: &PhysicalConstants) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::invalid("atom.lambda", "transition wavelength must be positive"));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::invalid("atom.gamma", "linewidth must be positive"));
        }
        Ok(AtomSpec {
            wavelength,
            gamma,
            dipole: dipole_from_linewidth(wavelength, gamma, consts),
        })
    }

    pub fn sodium_d2(consts: &PhysicalConstants) -> Self {
        AtomSpec {
            wavelength: SODIUM_D2_WAVELENGTH,
            gamma: SODIUM_D2_GAMMA,
            dipole: dipole_from_linewidth(SODIUM_D2_WAVELENGTH, SODIUM_D2_GAMMA, consts),
        }
    }

    /// Transition angular frequency `2πc/λ`.
    pub fn omega(&self, consts: &PhysicalConstants) -> f64 {
        2.0 * PI * consts.c / self.wavelength
    }
}

/// `d_eg = sqrt(3π ε₀ ħ c³ Γ / ω_a³)`, inverting the Weisskopf-Wigner rate.
pub fn dipole_from_linewidth(wavelength: f64, gamma: f64, consts: &PhysicalConstants) -> f64 {
    let omega = 2.0 * PI * consts.c / wavelength;
    (3.0 * PI * consts.eps0 * consts.hbar * consts.c.powi(3) * gamma / omega.powi(3)).sqrt()
}

/// Atom velocity in cylindrical unit-vector components, m/s.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Velocity {
    pub v_rho: f64,
    pub v_phi: f64,
    pub v_z: f64,
}

impl Velocity {
    pub fn is_zero(&self) -> bool {
        self.v_rho == 0.0 && self.v_phi == 0.0 && self.v_z == 0.0
    }
}

/// Static detuning and atom velocity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DetuningSpec {
    /// Δ₀ = ω - ω_a, rad/s.
    pub delta0: f64,
    pub velocity: Velocity,
}

impl DetuningSpec {
    /// Δ₀ given as a multiple of Γ, atom at rest.
    pub fn in_linewidths(multiple: f64, atom: &AtomSpec) -> Self {
        DetuningSpec {
            delta0: multiple * atom.gamma,
            velocity: Velocity::default(),
        }
    }
}

/// Vector in the local cylindrical frame (ρ̂, φ̂, ẑ).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CylVector {
    pub rho: f64,
    pub phi: f64,
    pub z: f64,
}

impl CylVector {
    pub const ZERO: CylVector = CylVector { rho: 0.0, phi: 0.0, z: 0.0 };

    pub fn new(rho: f64, phi: f64, z: f64) -> Self {
        CylVector { rho, phi, z }
    }

    pub fn scale(self, s: f64) -> Self {
        CylVector::new(s * self.rho, s * self.phi, s * self.z)
    }

    pub fn dot(self, other: CylVector) -> f64 {
        self.rho * other.rho + self.phi * other.phi + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.rho.is_finite() && self.phi.is_finite() && self.z.is_finite()
    }
}

impl Add for CylVector {
    type Output = CylVector;
    fn add(self, o: CylVector) -> CylVector {
        CylVector::new(self.rho + o.rho, self.phi + o.phi, self.z + o.z)
    }
}

impl Sub for CylVector {
    type Output = CylVector;
    fn sub(self, o: CylVector) -> CylVector {
        CylVector::new(self.rho - o.rho, self.phi - o.phi, self.z - o.z)
    }
}

impl Neg for CylVector {
    type Output = CylVector;
    fn neg(self) -> CylVector {
        CylVector::new(-self.rho, -self.phi, -self.z)
    }
}

/// Gradient in the ρ-z plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlaneGradient {
    pub d_rho: f64,
    pub d_z: f64,
}

/// `√2 k_z c d_eg / ħ`, the factor taking `|F̃|` to `Ω_{m,p}`.
pub(crate) fn rabi_scale(mode: &ModeSpec, atom: &AtomSpec, consts: &PhysicalConstants) -> f64 {
    SQRT_2 * mode.k_z() * consts.c * atom.dipole / consts.hbar
}

/// `Ω_{m,p} = √2 k_z c d_eg |F̃_{m,p}| / ħ`.
pub fn rabi_base(mode: &ModeSpec, atom: &AtomSpec, point: &CylPoint, consts: &PhysicalConstants) -> f64 {
    rabi_scale(mode, atom, consts) * lg_envelope(mode, point, consts).value.abs()
}

/// `(Ω₊, Ω₋) = Ω_{m,p} (cos Θ_P/2, sin Θ_P/2)`.
pub fn rabi_pair(
    mode: &ModeSpec,
    atom: &AtomSpec,
    point: &CylPoint,
    consts: &PhysicalConstants,
) -> TransitionPair<f64> {
    let base = rabi_base(mode, atom, point, consts);
    let (c, s) = mode.half_angle_weights();
    TransitionPair::new(base * c, base * s)
}

/// Analytic `∇Ω_±` in the ρ-z plane.
///
/// Where the envelope vanishes (the vortex core) the modulus has a one-sided
/// derivative; the radial slope is reported as `|∂F̃/∂ρ|` scaled, which is
/// the finite `m = 1` limit and zero for `m ≥ 2`.
pub fn rabi_gradient(
    mode: &ModeSpec,
    atom: &AtomSpec,
    point: &CylPoint,
    consts: &PhysicalConstants,
) -> TransitionPair<PlaneGradient> {
    let scale = rabi_scale(mode, atom, consts);
    let env = lg_envelope(mode, point, consts);
    let base = if env.value == 0.0 {
        PlaneGradient {
            d_rho: scale * env.d_rho.abs(),
            d_z: 0.0,
        }
    } else {
        let sign = env.value.signum();
        PlaneGradient {
            d_rho: scale * sign * env.d_rho,
            d_z: scale * sign * env.d_z,
        }
    };
    let (c, s) = mode.half_angle_weights();
    TransitionPair::new(
        PlaneGradient { d_rho: base.d_rho * c, d_z: base.d_z * c },
        PlaneGradient { d_rho: base.d_rho * s, d_z: base.d_z * s },
    )
}

/// `Ω_± ∇Ω_±`, smooth everywhere including the vortex core.
pub(crate) fn rabi_times_gradient(
    mode: &ModeSpec,
    atom: &AtomSpec,
    point: &CylPoint,
    consts: &PhysicalConstants,
) -> TransitionPair<PlaneGradient> {
    let scale = rabi_scale(mode, atom, consts);
    let env = lg_envelope(mode, point, consts);
    let k2 = scale * scale;
    let (c, s) = mode.half_angle_weights();
    let base = PlaneGradient {
        d_rho: k2 * env.value * env.d_rho,
        d_z: k2 * env.value * env.d_z,
    };
    TransitionPair::new(
        PlaneGradient { d_rho: base.d_rho * c * c, d_z: base.d_z * c * c },
        PlaneGradient { d_rho: base.d_rho * s * s, d_z: base.d_z * s * s },
    )
}

/// Dipole projections `(d·E)_± = d_eg (u_x ± i u_y)`, without the common
/// axial phase.
pub fn selection_projection(ux: Complex64, uy: Complex64, dipole: f64) -> TransitionPair<Complex64> {
    let i = Complex64::i();
    TransitionPair::new(dipole * (ux + i * uy), dipole * (ux - i * uy))
}

/// The Δm = 0 coupling `d_eg u_z`, taken as zero because the axial field
/// component is neglected in the paraxial model.
pub fn axial_coupling() -> Complex64 {
    log::debug!("Δm = 0 coupling requested; the paraxial model treats it as zero");
    Complex64::new(0.0, 0.0)
}

/// `S = (Ω²/2) / (Δ² + Γ²/4)`.
pub fn saturation(omega: f64, delta: f64, gamma: f64) -> f64 {
    0.5 * omega * omega / (delta * delta + 0.25 * gamma * gamma)
}

/// Per-branch saturation, each branch with its own detuning.
pub fn saturation_pair(
    rabi: TransitionPair<f64>,
    detuning: TransitionPair<f64>,
    gamma: f64,
) -> TransitionPair<f64> {
    TransitionPair::new(
        saturation(rabi.plus, detuning.plus, gamma),
        saturation(rabi.minus, detuning.minus, gamma),
    )
}

/// `Δ = Δ₀ - v·∇Ψ`, with `∇Ψ` in cylindrical unit-vector components.
pub fn dynamic_detuning(detuning: &DetuningSpec, grad_psi: &CylVector) -> f64 {
    let v = detuning.velocity;
    if v.is_zero() {
        return detuning.delta0;
    }
    detuning.delta0 - (v.v_rho * grad_psi.rho + v.v_phi * grad_psi.phi + v.v_z * grad_psi.z)
}
