//! Higher-order Poincaré Laguerre-Gaussian modes.
//!
//! A mode of order `m` is the superposition of a right-circular LG vortex
//! with winding `+m` weighted by `𝒰_P` and a left-circular one with winding
//! `-m` weighted by `𝒱_P`. Both share the scalar amplitude
//!
//! ```text
//! F̃(ρ,z) = A₀ C/σ (ρ√2 / w₀σ)^|m| exp(-ρ²/w₀²σ²) L_p^|m|(2ρ²/w₀²σ²) e^{iξ}
//! ```
//!
//! with `σ = sqrt(1 + z²/z_R²)`. All amplitudes here drop the `e^{-iωt}`
//! time factor.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::special::{assoc_laguerre, assoc_laguerre_derivative, lg_norm_coefficient, ln_factorial_ratio};

/// Complex field amplitude, V/m for electric fields.
pub type ComplexAmplitude = Complex64;

/// Propagation direction along the optical axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Propagation {
    #[default]
    Forward,
    Backward,
}

impl Propagation {
    pub fn sign(self) -> f64 {
        match self {
            Propagation::Forward => 1.0,
            Propagation::Backward => -1.0,
        }
    }

    pub fn from_sign(s: i32) -> Option<Self> {
        match s {
            1 => Some(Propagation::Forward),
            -1 => Some(Propagation::Backward),
            _ => None,
        }
    }
}

/// One Poincaré vortex mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    /// Winding number.
    pub m: i32,
    /// Radial number.
    pub p: u32,
    /// Wavelength, m.
    pub wavelength: f64,
    /// Beam waist at focus, m.
    pub waist: f64,
    /// Beam power, W.
    pub power: f64,
    /// Poincaré polar angle Θ_P, rad.
    pub theta_p: f64,
    /// Poincaré azimuth Φ_P, rad.
    pub phi_p: f64,
    pub direction: Propagation,
}

impl ModeSpec {
    /// Doughnut mode on the north pole with λ = 589 nm, w₀ = 5λ, 𝒫 = 2.5 μW.
    pub fn sodium_reference(m: i32) -> Self {
        let wavelength = 589e-9;
        ModeSpec {
            m,
            p: 0,
            wavelength,
            waist: 5.0 * wavelength,
            power: 2.5e-6,
            theta_p: 0.0,
            phi_p: 0.0,
            direction: Propagation::Forward,
        }
    }

    /// Checks the domain invariants, including the paraxial requirement
    /// `w₀ ≥ λ`.
    pub fn validate(&self) -> Result<()> {
        if self.m < 0 {
            return Err(Error::invalid("mode.m", format!("winding number must be >= 0, got {}", self.m)));
        }
        if !(self.wavelength.is_finite() && self.wavelength > 0.0) {
            return Err(Error::invalid("mode.lambda", "wavelength must be positive"));
        }
        if !(self.power.is_finite() && self.power > 0.0) {
            return Err(Error::invalid("mode.power", "power must be positive"));
        }
        if !(self.waist.is_finite() && self.waist > 0.0) {
            return Err(Error::invalid("mode.w0", "waist must be positive"));
        }
        if self.waist < self.wavelength {
            return Err(Error::invalid(
                "mode.w0",
                format!(
                    "waist {:e} m is below the wavelength {:e} m; the paraxial field model needs w0 >= lambda",
                    self.waist, self.wavelength
                ),
            ));
        }
        if !(self.theta_p.is_finite() && (0.0..=PI).contains(&self.theta_p)) {
            return Err(Error::invalid("mode.theta_p", "polar angle must lie in [0, pi]"));
        }
        if !self.phi_p.is_finite() {
            return Err(Error::invalid("mode.phi_p", "azimuth must be finite"));
        }
        Ok(())
    }

    pub fn abs_m(&self) -> u32 {
        self.m.unsigned_abs()
    }

    /// Axial wavenumber `2π/λ`.
    pub fn k_z(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// Rayleigh range `w₀² k_z / 2`.
    pub fn rayleigh_range(&self) -> f64 {
        0.5 * self.waist * self.waist * self.k_z()
    }

    /// Gouy order `2p + |m| + 1`.
    pub fn gouy_order(&self) -> f64 {
        f64::from(2 * self.p + self.abs_m() + 1)
    }

    pub fn weights(&self) -> PoincareWeights {
        poincare_weights(self.theta_p, self.phi_p)
    }

    /// `(cos Θ_P/2, sin Θ_P/2)` evaluated so that Θ_P → π - Θ_P swaps the
    /// pair exactly.
    pub fn half_angle_weights(&self) -> (f64, f64) {
        half_angle_cos_sin(self.theta_p)
    }
}

/// Cylindrical evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylPoint {
    /// Radial distance, m (≥ 0).
    pub rho: f64,
    /// Azimuth, rad.
    pub phi: f64,
    /// Axial position, m.
    pub z: f64,
}

impl CylPoint {
    pub fn new(rho: f64, phi: f64, z: f64) -> Self {
        debug_assert!(rho >= 0.0, "negative radial coordinate {rho}");
        CylPoint { rho, phi, z }
    }
}

/// Complex Poincaré weights. `|𝒰_P|² + |𝒱_P|² = 1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareWeights {
    pub u_p: Complex64,
    pub v_p: Complex64,
}

/// `cos(θ/2)` and `sin(θ/2)`, expanded about the nearest of the poles and
/// the equator so that both poles give an exact zero, the equator gives two
/// equal values, and `θ → π - θ` swaps the pair.
pub(crate) fn half_angle_cos_sin(theta: f64) -> (f64, f64) {
    use std::f64::consts::FRAC_PI_4;
    if theta <= FRAC_PI_4 {
        let h = 0.5 * theta;
        (h.cos(), h.sin())
    } else if theta >= 3.0 * FRAC_PI_4 {
        let h = 0.5 * (PI - theta);
        (h.sin(), h.cos())
    } else {
        let d = 0.5 * (theta - 0.5 * PI);
        ((FRAC_PI_4 + d).cos(), (FRAC_PI_4 - d).cos())
    }
}

pub fn poincare_weights(theta_p: f64, phi_p: f64) -> PoincareWeights {
    let (c, s) = half_angle_cos_sin(theta_p);
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    PoincareWeights {
        u_p: Complex64::from_polar(amp * c, -0.5 * phi_p),
        v_p: Complex64::from_polar(amp * s, 0.5 * phi_p),
    }
}

/// Gouy plus curvature phase ξ(ρ, z).
pub fn xi_phase(mode: &ModeSpec, point: &CylPoint) -> f64 {
    let zr = mode.rayleigh_range();
    let z = point.z;
    -mode.gouy_order() * (z / zr).atan()
        + mode.k_z() * z * point.rho * point.rho / (2.0 * (z * z + zr * zr))
}

/// `(∂ξ/∂ρ, ∂ξ/∂z)`.
pub fn xi_gradient(mode: &ModeSpec, point: &CylPoint) -> (f64, f64) {
    let zr = mode.rayleigh_range();
    let k = mode.k_z();
    let (rho, z) = (point.rho, point.z);
    let q = z * z + zr * zr;
    let d_rho = k * z * rho / q;
    let d_z = -mode.gouy_order() * zr / q + k * rho * rho * (zr * zr - z * z) / (2.0 * q * q);
    (d_rho, d_z)
}

/// Amplitude scale `A₀ = sqrt(4 μ₀ 𝒫 / (π c k_z² w₀²))`.
pub fn normalization_a0(mode: &ModeSpec, consts: &PhysicalConstants) -> f64 {
    let k = mode.k_z();
    (4.0 * consts.mu0 * mode.power / (PI * consts.c * k * k * mode.waist * mode.waist)).sqrt()
}

/// The real (signed) envelope of `F̃` without its phase factor, and its
/// gradient in the ρ-z plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub value: f64,
    pub d_rho: f64,
    pub d_z: f64,
}

/// `C t^k e^{-t²/2}`; log space above `m = 20`.
fn scaled_power(m: u32, p: u32, k: u32, t: f64) -> f64 {
    if k > 0 && t == 0.0 {
        return 0.0;
    }
    if m <= 20 {
        lg_norm_coefficient(m, p) * t.powi(k as i32) * (-0.5 * t * t).exp()
    } else {
        let log_t = if k == 0 { 0.0 } else { f64::from(k) * t.ln() };
        (0.5 * ln_factorial_ratio(p, m) + log_t - 0.5 * t * t).exp()
    }
}

/// `h(t) = C t^m e^{-t²/2} L_p^m(t²)` and `dh/dt`.
fn radial_profile(m: u32, p: u32, t: f64) -> (f64, f64) {
    let x = t * t;
    let lag = assoc_laguerre(p, m, x);
    let dlag = assoc_laguerre_derivative(p, m, x);
    let h = scaled_power(m, p, m, t) * lag;
    let leading = if m == 0 {
        0.0
    } else {
        f64::from(m) * scaled_power(m, p, m - 1, t) * lag
    };
    let dh = leading + scaled_power(m, p, m + 1, t) * (2.0 * dlag - lag);
    (h, dh)
}

/// Signed envelope of `F̃_{m,p}` and its analytic ρ and z derivatives.
pub fn lg_envelope(mode: &ModeSpec, point: &CylPoint, consts: &PhysicalConstants) -> Envelope {
    let zr = mode.rayleigh_range();
    let z = point.z;
    let sigma = (1.0 + (z / zr).powi(2)).sqrt();
    let w = mode.waist * sigma;
    let t = SQRT_2 * point.rho / w;
    let (h, dh) = radial_profile(mode.abs_m(), mode.p, t);
    let prefactor = normalization_a0(mode, consts) / sigma;
    // d(ln σ)/dz
    let dlog_sigma = z / (z * z + zr * zr);
    Envelope {
        value: prefactor * h,
        d_rho: prefactor * dh * SQRT_2 / w,
        d_z: -dlog_sigma * prefactor * (h + t * dh),
    }
}

/// `F̃_{m,p}(ρ, z)` including the phase `e^{iξ}`.
pub fn lg_amplitude(mode: &ModeSpec, point: &CylPoint, consts: &PhysicalConstants) -> ComplexAmplitude {
    let env = lg_envelope(mode, point, consts);
    Complex64::from_polar(1.0, xi_phase(mode, point)) * env.value
}

/// Cartesian transverse amplitudes `(u_x, u_y)`.
pub fn transverse_amplitudes(
    mode: &ModeSpec,
    point: &CylPoint,
    consts: &PhysicalConstants,
) -> (ComplexAmplitude, ComplexAmplitude) {
    let w = mode.weights();
    let f = lg_amplitude(mode, point, consts);
    let mphi = f64::from(mode.m) * point.phi;
    let right = w.u_p * Complex64::from_polar(1.0, mphi);
    let left = w.v_p * Complex64::from_polar(1.0, -mphi);
    let kc = mode.k_z() * consts.c;
    let ux = Complex64::i() * kc * (right + left) * f;
    let uy = kc * (right - left) * f;
    (ux, uy)
}

/// Full transverse E and B vectors (Cartesian x, y) with the axial phase
/// `e^{i s k_z z}`. Only the power normalisation needs B.
pub(crate) struct TransverseFields {
    pub e: [Complex64; 2],
    pub b: [Complex64; 2],
}

pub(crate) fn mode_fields(mode: &ModeSpec, point: &CylPoint, consts: &PhysicalConstants) -> TransverseFields {
    let i = Complex64::i();
    let w = mode.weights();
    let f = lg_amplitude(mode, point, consts);
    let axial = Complex64::from_polar(1.0, mode.direction.sign() * mode.k_z() * point.z);
    let mphi = f64::from(mode.m) * point.phi;
    let k = mode.k_z();
    let amp1 = i * k * w.u_p * Complex64::from_polar(1.0, mphi) * f * axial;
    let amp2 = i * k * w.v_p * Complex64::from_polar(1.0, -mphi) * f * axial;
    // E₁ ∝ c(x̂ - iŷ), B₁ ∝ (ŷ + ix̂); E₂ ∝ c(x̂ + iŷ), B₂ ∝ (ŷ - ix̂)
    let e = [consts.c * (amp1 + amp2), consts.c * (-i * amp1 + i * amp2)];
    let b = [i * amp1 - i * amp2, amp1 + amp2];
    TransverseFields { e, b }
}

/// `(1/2μ₀)|(E* × B)_z|` at a point, W/m².
pub(crate) fn axial_poynting(mode: &ModeSpec, point: &CylPoint, consts: &PhysicalConstants) -> f64 {
    let TransverseFields { e, b } = mode_fields(mode, point, consts);
    let sz = e[0].conj() * b[1] - e[1].conj() * b[0];
    sz.norm() / (2.0 * consts.mu0)
}

/// Settings for [`power_quadrature`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    /// Gauss-Legendre order of the coarse pass; the check pass doubles it.
    pub nodes: usize,
    pub rel_tolerance: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            nodes: 400,
            rel_tolerance: 1e-6,
        }
    }
}

/// Outer radius of the power integration, `w₀ (6 + sqrt(2|m|))`.
pub fn quadrature_radius(mode: &ModeSpec) -> f64 {
    mode.waist * (6.0 + (2.0 * f64::from(mode.abs_m())).sqrt())
}

/// Beam power recovered by integrating the axial Poynting flux over the
/// focal plane. The azimuthal integral is `2π` times the φ = 0 value, since
/// the flux magnitude does not depend on φ.
pub fn power_quadrature(
    mode: &ModeSpec,
    consts: &PhysicalConstants,
    settings: &QuadratureSettings,
) -> Result<f64> {
    let r_max = quadrature_radius(mode);
    let flux = |rho: f64| 2.0 * PI * rho * axial_poynting(mode, &CylPoint::new(rho, 0.0, 0.0), consts);
    let coarse = GaussLegendre::new(settings.nodes).integrate(0.0, r_max, flux);
    let fine = GaussLegendre::new(2 * settings.nodes).integrate(0.0, r_max, flux);
    let relative = ((fine - coarse) / fine).abs();
    if relative.is_nan() || relative > settings.rel_tolerance {
        return Err(Error::QuadratureNotConverged {
            nodes: settings.nodes,
            coarse,
            fine,
            relative,
            tolerance: settings.rel_tolerance,
        });
    }
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn consts() -> PhysicalConstants {
        PhysicalConstants::codata_2018()
    }

    #[test]
    fn poincare_weights_at_poles_and_equator() {
        let n = poincare_weights(0.0, 0.0);
        assert!((n.u_p.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-16);
        assert_eq!(n.v_p.norm(), 0.0);
        let s = poincare_weights(PI, 1.3);
        assert!(s.u_p.norm() < 1e-16);
        assert!((s.v_p.norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-16);
        let e = poincare_weights(0.5 * PI, 0.0);
        assert!((e.u_p - Complex64::new(0.5, 0.0)).norm() < 2e-16);
        assert_eq!(e.u_p, e.v_p);
    }

    #[test]
    fn xi_vanishes_on_focal_plane() {
        let mode = ModeSpec::sodium_reference(3);
        for rho in [0.0, 1e-6, 5e-6] {
            assert_eq!(xi_phase(&mode, &CylPoint::new(rho, 0.0, 0.0)), 0.0);
        }
    }

    #[test]
    fn xi_at_rayleigh_range_on_axis() {
        let mode = ModeSpec::sodium_reference(0);
        let zr = mode.rayleigh_range();
        let xi = xi_phase(&mode, &CylPoint::new(0.0, 0.0, zr));
        assert!((xi + PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn xi_golden_value() {
        // 40-digit evaluation of the closed form: m=2, p=0, ρ=w₀, z=z_R/2.
        let mode = ModeSpec::sodium_reference(2);
        let pt = CylPoint::new(mode.waist, 0.0, 0.5 * mode.rayleigh_range());
        let xi = xi_phase(&mode, &pt);
        assert!((xi - (-0.990_942_827_002_418_3)).abs() < 1e-14, "{xi}");
    }

    #[test]
    fn xi_gradient_special_points() {
        let mode = ModeSpec::sodium_reference(0);
        let zr = mode.rayleigh_range();
        let (dr, dz) = xi_gradient(&mode, &CylPoint::new(0.0, 0.0, 0.0));
        assert_eq!(dr, 0.0);
        assert!((dz + 1.0 / zr).abs() < 1e-12 / zr);
        let (dr, _) = xi_gradient(&ModeSpec::sodium_reference(4), &CylPoint::new(2e-6, 0.0, 0.0));
        assert_eq!(dr, 0.0);
    }

    #[test]
    fn a0_golden_and_scaling() {
        let mode = ModeSpec::sodium_reference(0);
        let a0 = normalization_a0(&mode, &consts());
        assert!((a0 / 3.676_798_007_204_667e-12 - 1.0).abs() < 1e-13, "{a0:e}");
        let doubled = ModeSpec { power: 2.0 * mode.power, ..mode };
        assert!((normalization_a0(&doubled, &consts()) / a0 - SQRT_2).abs() < 1e-14);
        let other = ModeSpec { m: 5, p: 2, theta_p: 1.0, phi_p: 2.0, ..mode };
        assert_eq!(normalization_a0(&other, &consts()), a0);
    }

    #[test]
    fn amplitude_on_axis() {
        let k = consts();
        let mode = ModeSpec::sodium_reference(0);
        let f = lg_amplitude(&mode, &CylPoint::new(0.0, 0.0, 0.0), &k);
        assert!((f.re - normalization_a0(&mode, &k)).abs() < 1e-28);
        assert_eq!(f.im, 0.0);
        for m in [1, 2, 7] {
            let mode = ModeSpec::sodium_reference(m);
            for z in [0.0, 1e-6, -3e-5] {
                assert_eq!(lg_amplitude(&mode, &CylPoint::new(0.0, 0.3, z), &k).norm(), 0.0);
            }
        }
    }

    #[test]
    fn doughnut_peaks_at_expected_radius() {
        let k = consts();
        for m in [1, 2, 5, 20] {
            let mode = ModeSpec::sodium_reference(m);
            let peak = mode.waist * (f64::from(m) / 2.0).sqrt();
            let here = lg_amplitude(&mode, &CylPoint::new(peak, 0.0, 0.0), &k).norm();
            for off in [0.99, 1.01] {
                let there = lg_amplitude(&mode, &CylPoint::new(peak * off, 0.0, 0.0), &k).norm();
                assert!(there < here, "m={m}");
            }
            let env = lg_envelope(&mode, &CylPoint::new(peak, 0.0, 0.0), &k);
            assert!(env.d_rho.abs() < 1e-9 * env.value.abs() / mode.waist);
        }
    }

    #[test]
    fn large_order_stays_finite() {
        let k = consts();
        let mode = ModeSpec::sodium_reference(150);
        let ring = mode.waist * 75f64.sqrt();
        let env = lg_envelope(&mode, &CylPoint::new(ring, 0.0, 1e-6), &k);
        assert!(env.value.is_finite() && env.value > 0.0);
        assert!(env.d_rho.is_finite() && env.d_z.is_finite());
    }

    #[test]
    fn circular_polarisation_at_poles() {
        let k = consts();
        let pt = CylPoint::new(2e-6, 0.7, 1e-6);
        let north = ModeSpec::sodium_reference(2);
        let (ux, uy) = transverse_amplitudes(&north, &pt, &k);
        assert!((uy + Complex64::i() * ux).norm() < 1e-12 * ux.norm());
        let south = ModeSpec { theta_p: PI, ..north };
        let (ux, uy) = transverse_amplitudes(&south, &pt, &k);
        assert!((uy - Complex64::i() * ux).norm() < 1e-12 * ux.norm());
    }

    #[test]
    fn validation_rejects_bad_modes() {
        let ok = ModeSpec::sodium_reference(2);
        assert!(ok.validate().is_ok());
        assert!(ModeSpec { waist: 0.5 * ok.wavelength, ..ok }.validate().is_err());
        assert!(ModeSpec { waist: ok.wavelength, ..ok }.validate().is_ok());
        assert!(ModeSpec { power: 0.0, ..ok }.validate().is_err());
        assert!(ModeSpec { m: -1, ..ok }.validate().is_err());
        assert!(ModeSpec { theta_p: 4.0, ..ok }.validate().is_err());
    }

    #[test]
    fn power_quadrature_recovers_power() {
        let k = consts();
        let mode = ModeSpec { m: 3, p: 1, theta_p: 1.1, phi_p: 0.4, ..ModeSpec::sodium_reference(3) };
        let p = power_quadrature(&mode, &k, &QuadratureSettings::default()).unwrap();
        assert!((p / mode.power - 1.0).abs() < 1e-9, "{p:e}");
    }

    #[test]
    fn power_quadrature_flags_too_few_nodes() {
        let k = consts();
        let mode = ModeSpec::sodium_reference(2);
        let settings = QuadratureSettings { nodes: 8, ..Default::default() };
        match power_quadrature(&mode, &k, &settings) {
            Err(Error::QuadratureNotConverged { nodes, .. }) => assert_eq!(nodes, 8),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
