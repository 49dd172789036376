//! Scattering and dipole forces, phase gradients and optical potentials.
//!
//! Per branch,
//!
//! ```text
//! F_sca± = (ħΓ/2) S±/(1+S±) ∇Ψ±
//! F_dip± = -(ħΔ±/Ω±) S±/(1+S±) ∇Ω±
//! U±     = (ħΔ±/2) ln(1+S±)
//! ```
//!
//! with `Ψ± = s k_z z ± mφ + ξ`. The dipole force is evaluated as
//! `-ħΔ Ω∇Ω / (2(Δ² + Γ²/4)(1+S))`, which has no `1/Ω` at the vortex core,
//! and the azimuthal scattering term `S/(1+S) · m/ρ` is given its on-axis
//! limit of zero.
//!
//! Parities in z at fixed ρ, φ and zero velocity: scattering `f_rho` is odd,
//! scattering `f_phi` and `f_z` are even, dipole `f_rho` is even and dipole
//! `f_z` odd. In particular the azimuthal scattering force does not vanish on
//! the focal plane for `m ≥ 1`; it is the radial scattering component that
//! does.

use crate::atom::{
    dynamic_detuning, rabi_base, rabi_pair, rabi_times_gradient, saturation, AtomSpec, CylVector,
    DetuningSpec, TransitionPair,
};
use crate::beam::{xi_gradient, xi_phase, CylPoint, ModeSpec};
use crate::constants::PhysicalConstants;

/// Force in the local cylindrical frame, N.
pub type ForceVector = CylVector;

/// `Ψ± = s k_z z ± mφ + ξ(ρ, z)`.
pub fn phase_psi(mode: &ModeSpec, point: &CylPoint) -> TransitionPair<f64> {
    let common = mode.direction.sign() * mode.k_z() * point.z + xi_phase(mode, point);
    let winding = f64::from(mode.m) * point.phi;
    TransitionPair::new(common + winding, common - winding)
}

/// `∇Ψ±` in unit-vector components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGradient {
    pub gradient: TransitionPair<CylVector>,
    /// Set on the axis of a vortex (`ρ = 0`, `m ≠ 0`), where `±m/ρ` is
    /// singular. The azimuthal components are then reported as zero.
    pub singular_axis: bool,
}

pub fn grad_psi(mode: &ModeSpec, point: &CylPoint) -> PhaseGradient {
    let (d_rho, d_xi_z) = xi_gradient(mode, point);
    let axial = mode.direction.sign() * mode.k_z() + d_xi_z;
    let singular_axis = point.rho == 0.0 && mode.m != 0;
    let azimuthal = if point.rho > 0.0 {
        f64::from(mode.m) / point.rho
    } else {
        0.0
    };
    PhaseGradient {
        gradient: TransitionPair::new(
            CylVector::new(d_rho, azimuthal, axial),
            CylVector::new(d_rho, -azimuthal, axial),
        ),
        singular_axis,
    }
}

/// Per-branch forces and their vector sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchForces {
    pub branches: TransitionPair<ForceVector>,
    pub total: ForceVector,
}

impl BranchForces {
    fn from_pair(branches: TransitionPair<ForceVector>) -> Self {
        BranchForces {
            total: branches.plus + branches.minus,
            branches,
        }
    }
}

/// All quantities needed for the forces at one point.
#[derive(Debug, Clone, Copy)]
struct Local {
    rabi: TransitionPair<f64>,
    detuning: TransitionPair<f64>,
    saturation: TransitionPair<f64>,
    phase: PhaseGradient,
}

fn local(
    mode: &ModeSpec,
    atom: &AtomSpec,
    detuning: &DetuningSpec,
    point: &CylPoint,
    consts: &PhysicalConstants,
) -> Local {
    let phase = grad_psi(mode, point);
    let rabi = rabi_pair(mode, atom, point, consts);
    let det = phase.gradient.map(|g| dynamic_detuning(detuning, &g));
    let sat = rabi.zip(det).map(|(o, d)| saturation(o, d, atom.gamma));
    Local {
        rabi,
        detuning: det,
        saturation: sat,
        phase,
    }
}

fn scattering_from(atom: &AtomSpec, l: &Local, consts: &PhysicalConstants) -> BranchForces {
    let prefactor = 0.5 * consts.hbar * atom.gamma;
    let branches = l.saturation.zip(l.phase.gradient).map(|(s, g)| {
        let weight = prefactor * s / (1.0 + s);
        g.scale(weight)
    });
    BranchForces::from_pair(branches)
}

fn dipole_from(mode: &ModeSpec, atom: &AtomSpec, point: &CylPoint, l: &Local, consts: &PhysicalConstants) -> BranchForces {
    let omega_grad = rabi_times_gradient(mode, atom, point, consts);
    let quarter_gamma_sq = 0.25 * atom.gamma * atom.gamma;
    let branches = omega_grad
        .zip(l.detuning)
        .zip(l.saturation)
        .map(|((og, delta), s)| {
            let denom = 2.0 * (delta * delta + quarter_gamma_sq) * (1.0 + s);
            let c = -consts.hbar * delta / denom;
            ForceVector::new(c * og.d_rho, 0.0, c * og.d_z)
        });
    BranchForces::from_pair(branches)
}

/// Scattering (dissipative) forces.
pub fn scattering_force(
    mode: &ModeSpec,
    atom: &AtomSpec,
    detuning: &DetuningSpec,
    point: &CylPoint,
    consts: &PhysicalConstants,
) -> BranchForces {
    let l = local(mode, atom, detuning, point, consts);
    scattering_from(atom, &l, consts)
}

/// Dipole (gradient) forces. The azimuthal component is identically zero.
pub fn dipole_force(
    mode: &ModeSpec,
    atom: &AtomSpec,
    detuning: &DetuningSpec,
    point: &CylPoint,
    consts: &PhysicalConstants,
) -> BranchForces {
    let l = local(mode, atom, detuning, point, consts);
    dipole_from(mode, atom, point, &l, consts)
}

/// `U± = (ħΔ±/2) ln(1 + S±)`, J.
pub fn optical_potential(
    mode: &ModeSpec,
    atom: &AtomSpec,
    detuning: &DetuningSpec,
    point: &CylPoint,
    consts: &PhysicalConstants,
) -> TransitionPair<f64> {
    let l = local(mode, atom, detuning, point, consts);
    potential_from(&l, consts)
}

fn potential_from(l: &Local, consts: &PhysicalConstants) -> TransitionPair<f64> {
    l.detuning
        .zip(l.saturation)
        .map(|(delta, s)| 0.5 * consts.hbar * delta * s.ln_1p())
}

/// Far-detuned potential and whether the far-detuning regime holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeDetuningPotential {
    pub potential: TransitionPair<f64>,
    /// `|Δ±| ≥ 10 max(Ω±, Γ)` on both branches.
    pub regime_valid: bool,
}

/// First-order expansion of the potential in `S`: `ħΩ±²/(4Δ±)`.
pub fn potential_large_detuning(
    mode: &ModeSpec,
    atom: &AtomSpec,
    detuning: &DetuningSpec,
    point: &CylPoint,
    consts: &PhysicalConstants,
) -> LargeDetuningPotential {
    let l = local(mode, atom, detuning, point, consts);
    let potential = l
        .rabi
        .zip(l.detuning)
        .map(|(o, d)| consts.hbar * o * o / (4.0 * d));
    let ok = |o: f64, d: f64| d.abs() >= 10.0 * o.max(atom.gamma);
    let regime_valid = ok(l.rabi.plus, l.detuning.plus) && ok(l.rabi.minus, l.detuning.minus);
    if !regime_valid {
        log::warn!(
            "far-detuned potential used outside its regime: |Δ| = ({:e}, {:e}) rad/s, Ω = ({:e}, {:e}) rad/s",
            l.detuning.plus.abs(),
            l.detuning.minus.abs(),
            l.rabi.plus,
            l.rabi.minus
        );
    }
    LargeDetuningPotential {
        potential,
        regime_valid,
    }
}

/// Every branch force and the three totals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceBreakdown {
    pub sca_plus: ForceVector,
    pub sca_minus: ForceVector,
    pub dip_plus: ForceVector,
    pub dip_minus: ForceVector,
    pub sca_total: ForceVector,
    pub dip_total: ForceVector,
    pub grand_total: ForceVector,
}

impl ForceBreakdown {
    fn assemble(sca: BranchForces, dip: BranchForces) -> Self {
        ForceBreakdown {
            sca_plus: sca.branches.plus,
            sca_minus: sca.branches.minus,
            dip_plus: dip.branches.plus,
            dip_minus: dip.branches.minus,
            sca_total: sca.total,
            dip_total: dip.total,
            grand_total: sca.total + dip.total,
        }
    }

    /// `(name, vector)` in reporting order.
    pub fn named(&self) -> [(&'static str, ForceVector); 7] {
        [
            ("sca_plus", self.sca_plus),
            ("sca_minus", self.sca_minus),
            ("dip_plus", self.dip_plus),
            ("dip_minus", self.dip_minus),
            ("sca_total", self.sca_total),
            ("dip_total", self.dip_total),
            ("total", self.grand_total),
        ]
    }
}

pub fn force_breakdown(
    mode: &ModeSpec,
    atom: &AtomSpec,
    detuning: &DetuningSpec,
    point: &CylPoint,
    consts: &PhysicalConstants,
) -> ForceBreakdown {
    evaluate_point(mode, atom, detuning, point, consts).forces
}

/// Everything reported for one evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEvaluation {
    pub point: CylPoint,
    pub rabi_base: f64,
    pub rabi: TransitionPair<f64>,
    /// `S_{m,p}` with the static detuning Δ₀.
    pub saturation_base: f64,
    pub detuning: TransitionPair<f64>,
    pub saturation: TransitionPair<f64>,
    pub potential: TransitionPair<f64>,
    pub phase: TransitionPair<f64>,
    pub singular_axis: bool,
    pub forces: ForceBreakdown,
}

pub fn evaluate_point(
    mode: &ModeSpec,
    atom: &AtomSpec,
    detuning: &DetuningSpec,
    point: &CylPoint,
    consts: &PhysicalConstants,
) -> PointEvaluation {
    let l = local(mode, atom, detuning, point, consts);
    let sca = scattering_from(atom, &l, consts);
    let dip = dipole_from(mode, atom, point, &l, consts);
    let omega = rabi_base(mode, atom, point, consts);
    PointEvaluation {
        point: *point,
        rabi_base: omega,
        rabi: l.rabi,
        saturation_base: saturation(omega, detuning.delta0, atom.gamma),
        detuning: l.detuning,
        saturation: l.saturation,
        potential: potential_from(&l, consts),
        phase: phase_psi(mode, point),
        singular_axis: l.phase.singular_axis,
        forces: ForceBreakdown::assemble(sca, dip),
    }
}
