//! Runtime oracle suite behind the `validate` command.
//!
//! Every check draws its sample points from a ChaCha stream seeded by the
//! check's position in the suite, so a report is reproducible bit for bit.
//! Each check records its worst offender: the normalized error (error over
//! the allowed error) and where it occurred.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::atom::{
    rabi_base, rabi_gradient, rabi_pair, selection_projection, AtomSpec, DetuningSpec, Velocity,
};
use crate::beam::{
    lg_envelope, poincare_weights, power_quadrature, transverse_amplitudes, xi_gradient, xi_phase, CylPoint,
    ModeSpec, QuadratureSettings,
};
use crate::constants::PhysicalConstants;
use crate::force::{evaluate_point, force_breakdown, optical_potential, ForceBreakdown};
use crate::scan::{Preset, SweepKind, SweepSpec};
use crate::special::assoc_laguerre;

/// Test hooks. The defaults run the suite as shipped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions {
    /// Relative error injected into the analytic `∂ξ/∂z` before it is
    /// compared with finite differences.
    pub xi_dz_perturbation: f64,
    /// Coarse Gauss-Legendre order for the power check.
    pub quadrature_nodes: usize,
    pub seed: u64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            xi_dz_perturbation: 0.0,
            quadrature_nodes: QuadratureSettings::default().nodes,
            seed: 0x5eed_f0c5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub samples: usize,
    /// Worst error divided by its allowance; `<= 1` passes.
    pub worst: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Pass/fail table, one check per line.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<6} {:<24} {:>8} {:>11}  worst offender", "status", "check", "samples", "err/allow");
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{:<6} {:<24} {:>8} {:>11.3e}  {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.samples,
                c.worst,
                c.detail
            );
        }
        let failed = self.failures().count();
        let _ = writeln!(s, "{} of {} checks passed", self.checks.len() - failed, self.checks.len());
        s
    }
}

/// Running worst-offender record for one check.
struct Tracker {
    name: &'static str,
    samples: usize,
    worst: f64,
    detail: String,
    error: Option<String>,
}

impl Tracker {
    fn new(name: &'static str) -> Self {
        Tracker {
            name,
            samples: 0,
            worst: 0.0,
            detail: "no samples".into(),
            error: None,
        }
    }

    /// Records `err` against the allowance `allow`; NaN counts as a failure.
    fn record(&mut self, err: f64, allow: f64, at: impl FnOnce() -> String) {
        self.samples += 1;
        let ratio = if err.is_nan() || allow.is_nan() {
            f64::INFINITY
        } else if err == 0.0 {
            0.0
        } else {
            err / allow
        };
        if ratio > self.worst || self.samples == 1 {
            self.worst = ratio;
            self.detail = format!("err {err:.3e} vs allowed {allow:.3e} at {}", at());
        }
    }

    /// Relative comparison `|a - b| <= tol |b|`; equal values always pass.
    fn relative(&mut self, a: f64, b: f64, tol: f64, at: impl FnOnce() -> String) {
        self.record((a - b).abs(), tol * b.abs(), at);
    }

    fn fail(&mut self, message: String) {
        self.samples += 1;
        self.worst = f64::INFINITY;
        self.error = Some(message);
    }

    fn finish(self) -> CheckResult {
        let passed = self.error.is_none() && self.samples > 0 && self.worst <= 1.0;
        CheckResult {
            name: self.name,
            passed,
            samples: self.samples,
            worst: self.worst,
            detail: self.error.unwrap_or(self.detail),
        }
    }
}

struct Ctx {
    opts: ValidationOptions,
    consts: PhysicalConstants,
    atom: AtomSpec,
}

impl Ctx {
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.opts.seed.wrapping_add(stream))
    }

    fn detuning(&self, multiple: f64) -> DetuningSpec {
        DetuningSpec::in_linewidths(multiple, &self.atom)
    }
}

fn describe(mode: &ModeSpec, pt: &CylPoint) -> String {
    format!(
        "m={} p={} w0={:.3e} theta_p={:.4} rho={:.4e} z={:.4e}",
        mode.m, mode.p, mode.waist, mode.theta_p, pt.rho, pt.z
    )
}

/// A random mode: m ≤ 5, p ≤ 2, w₀ ∈ [1, 6]λ, random polarization and power.
fn random_mode(rng: &mut ChaCha8Rng) -> ModeSpec {
    let mut mode = ModeSpec::sodium_reference(rng.gen_range(0..=5));
    mode.p = rng.gen_range(0..=2);
    mode.waist = mode.wavelength * rng.gen_range(1.0..6.0);
    mode.theta_p = rng.gen_range(0.0..=PI);
    mode.phi_p = rng.gen_range(0.0..2.0 * PI);
    mode.power = rng.gen_range(0.1e-6..10e-6);
    mode
}

fn random_point(rng: &mut ChaCha8Rng, mode: &ModeSpec, rho_lo: f64) -> CylPoint {
    let rho = mode.waist * rng.gen_range(rho_lo..3.0);
    let zr = mode.rayleigh_range();
    let z = zr * rng.gen_range(0.01..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    CylPoint::new(rho, rng.gen_range(0.0..2.0 * PI), z)
}

fn central<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

fn poincare_norm(_: &Ctx, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut t = Tracker::new("poincare-norm");
    for _ in 0..1000 {
        let (theta, phi) = (rng.gen_range(0.0..=PI), rng.gen_range(-PI..PI));
        let w = poincare_weights(theta, phi);
        let sum = w.u_p.norm_sqr() + w.v_p.norm_sqr();
        t.record((sum - 0.5).abs(), 1e-14, || format!("theta={theta:.6} phi={phi:.6}"));
    }
    t.finish()
}

/// Term-by-term series in exact rational arithmetic.
fn laguerre_series(p: u32, alpha: u32, x: f64) -> f64 {
    let x = BigRational::from_float(x).unwrap_or_else(BigRational::zero);
    let mut sum = BigRational::zero();
    let mut power = BigRational::one();
    let mut factorial = BigInt::one();
    for j in 0..=p {
        if j > 0 {
            power *= &x;
            factorial *= BigInt::from(j);
        }
        let term = BigRational::new(binomial(p + alpha, p - j), factorial.clone()) * &power;
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum.to_f64().unwrap_or(f64::NAN)
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut out = BigInt::one();
    for i in 0..k {
        out = out * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    out
}

/// Relative error against the exact series. Near a polynomial root the
/// allowance is floored at the rounding scale of the largest series term,
/// since a relative error at a root is not defined.
fn laguerre(_: &Ctx, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut t = Tracker::new("laguerre-series");
    let mut xs: Vec<f64> = (0..=50).map(f64::from).collect();
    xs.extend((0..20).map(|_| rng.gen_range(0.0..50.0)));
    for p in 0..=10u32 {
        for alpha in 0..=10u32 {
            for &x in &xs {
                let exact = laguerre_series(p, alpha, x);
                let got = assoc_laguerre(p, alpha, x);
                let largest_term = (0..=p)
                    .map(|j| {
                        let b = binomial(p + alpha, p - j).to_f64().unwrap_or(f64::INFINITY);
                        b * x.powi(j as i32) / (1..=j).map(f64::from).product::<f64>()
                    })
                    .fold(0.0f64, f64::max);
                let allow = 1e-10 * exact.abs().max(1e-6 * largest_term);
                t.record((got - exact).abs(), allow, || format!("p={p} alpha={alpha} x={x:.6}"));
            }
        }
    }
    t.finish()
}

/// Analytic `∇ξ` against central differences. `∂ξ/∂z` changes sign where
/// the curvature term balances the Gouy term, so its allowance is floored
/// at 1e-6 of the Gouy rate `(2p+|m|+1)/z_R`.
fn xi_gradient_check(ctx: &Ctx, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut t = Tracker::new("xi-gradient");
    for _ in 0..100 {
        let mode = random_mode(rng);
        let pt = random_point(rng, &mode, 0.01);
        let (d_rho, d_z) = xi_gradient(&mode, &pt);
        let d_z = d_z * (1.0 + ctx.opts.xi_dz_perturbation);
        let zr = mode.rayleigh_range();
        let fd_rho = central(|r| xi_phase(&mode, &CylPoint { rho: r, ..pt }), pt.rho, 1e-5 * mode.waist);
        let fd_z = central(|z| xi_phase(&mode, &CylPoint { z, ..pt }), pt.z, 1e-5 * zr);
        let gouy_rate = mode.gouy_order() / zr;
        t.record((d_rho - fd_rho).abs(), 1e-6 * fd_rho.abs(), || format!("d/drho {}", describe(&mode, &pt)));
        t.record((d_z - fd_z).abs(), 1e-6 * fd_z.abs().max(gouy_rate), || {
            format!("d/dz {}", describe(&mode, &pt))
        });
    }
    t.finish()
}

/// Largest `|∂Ω_{m,p}/∂ρ|` and `|∂Ω_{m,p}/∂z|` on the radial line through `pt`.
fn gradient_scale(mode: &ModeSpec, atom: &AtomSpec, pt: &CylPoint, consts: &PhysicalConstants) -> (f64, f64) {
    let unweighted = ModeSpec { theta_p: 0.0, ..*mode };
    (0..=300).fold((0.0f64, 0.0f64), |(gr, gz), i| {
        let rho = mode.waist * 3.5 * f64::from(i) / 300.0;
        let g = rabi_gradient(&unweighted, atom, &CylPoint { rho, ..*pt }, consts).plus;
        (gr.max(g.d_rho.abs()), gz.max(g.d_z.abs()))
    })
}

/// Analytic `∇Ω±` against central differences of `Ω±`. Near a zero of the
/// derivative the allowance is 1e-6 of the largest slope on the line.
fn rabi_gradient_check(ctx: &Ctx, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut t = Tracker::new("rabi-gradient");
    let k = &ctx.consts;
    for _ in 0..100 {
        let mode = random_mode(rng);
        let pt = random_point(rng, &mode, 0.05);
        let an = rabi_gradient(&mode, &ctx.atom, &pt, k);
        let (hr, hz) = (1e-5 * mode.waist, 1e-5 * mode.rayleigh_range());
        let fd_r = |f: fn(&crate::atom::TransitionPair<f64>) -> f64| {
            central(|r| f(&rabi_pair(&mode, &ctx.atom, &CylPoint { rho: r, ..pt }, k)), pt.rho, hr)
        };
        let fd_z = |f: fn(&crate::atom::TransitionPair<f64>) -> f64| {
            central(|z| f(&rabi_pair(&mode, &ctx.atom, &CylPoint { z, ..pt }, k)), pt.z, hz)
        };
        let (scale_r, scale_z) = gradient_scale(&mode, &ctx.atom, &pt, k);
        let (c, s) = mode.half_angle_weights();
        let branches: [(&str, f64, f64, f64, f64, f64); 2] = [
            ("plus", an.plus.d_rho, an.plus.d_z, fd_r(|p| p.plus), fd_z(|p| p.plus), c),
            ("minus", an.minus.d_rho, an.minus.d_z, fd_r(|p| p.minus), fd_z(|p| p.minus), s),
        ];
        for (name, ar, az, fr, fz, w) in branches {
            t.record((ar - fr).abs(), 1e-6 * fr.abs().max(w * scale_r), || {
                format!("dOmega_{name}/drho {}", describe(&mode, &pt))
            });
            t.record((az - fz).abs(), 1e-6 * fz.abs().max(w * scale_z), || {
                format!("dOmega_{name}/dz {}", describe(&mode, &pt))
            });
        }
    }
    t.finish()
}

fn power_check(ctx: &Ctx, _: &mut ChaCha8Rng) -> CheckResult {
    let mut t = Tracker::new("power-quadrature");
    let settings = QuadratureSettings {
        nodes: ctx.opts.quadrature_nodes,
        ..QuadratureSettings::default()
    };
    for m in [0, 1, 2, 5] {
        for p in [0, 1, 2] {
            for theta_p in [0.0, PI / 4.0, PI / 2.0, PI] {
                let mode = ModeSpec { p, theta_p, ..ModeSpec::sodium_reference(m) };
                match power_quadrature(&mode, &ctx.consts, &settings) {
                    Ok(power) => t.relative(power, mode.power, 1e-3, || {
                        format!("m={m} p={p} theta_p={theta_p:.4}")
                    }),
                    Err(e) => {
                        t.fail(format!("m={m} p={p} theta_p={theta_p:.4}: {e}"));
                        return t.finish();
                    }
                }
            }
        }
    }
    t.finish()
}

/// `F_dip± = -∇U±` per branch with steps of 1e-6 w₀ (and 1e-6 z_R axially).
fn force_potential(ctx: &Ctx, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut t = Tracker::new("force-potential");
    let k = &ctx.consts;
    let mut accepted = 0;
    while accepted < 50 {
        let mut mode = random_mode(rng);
        mode.theta_p = rng.gen_range(0.1..PI - 0.1);
        let pt = random_point(rng, &mode, 0.05);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let det = ctx.detuning(sign * rng.gen_range(1.0..20.0));
        let rabi = rabi_pair(&mode, &ctx.atom, &pt, k);
        if !(rabi.plus > 0.0 && rabi.minus > 0.0) {
            continue;
        }
        accepted += 1;
        let b = force_breakdown(&mode, &ctx.atom, &det, &pt, k);
        let (hr, hz) = (1e-6 * mode.waist, 1e-6 * mode.rayleigh_range());
        let u = |p: &CylPoint| optical_potential(&mode, &ctx.atom, &det, p, k);
        for (name, f, pick) in [
            ("plus", b.dip_plus, (|p: crate::atom::TransitionPair<f64>| p.plus) as fn(_) -> f64),
            ("minus", b.dip_minus, |p: crate::atom::TransitionPair<f64>| p.minus),
        ] {
            let gr = central(|r| pick(u(&CylPoint { rho: r, ..pt })), pt.rho, hr);
            let gz = central(|z| pick(u(&CylPoint { z, ..pt })), pt.z, hz);
            let err = ((f.rho + gr).powi(2) + (f.z + gz).powi(2) + f.phi.powi(2)).sqrt();
            t.record(err, 1e-5 * f.norm(), || format!("{name} {} delta0={:.2}G", describe(&mode, &pt), det.delta0 / ctx.atom.gamma));
        }
    }
    t.finish()
}

/// Signed parity comparison of one component; `odd` expects `a(z) = -a(-z)`.
fn parity(t: &mut Tracker, a: f64, b: f64, odd: bool, tol: f64, at: impl FnOnce() -> String) {
    let expected = if odd { -b } else { b };
    t.record((a - expected).abs(), tol * a.abs().max(b.abs()), at);
}

fn z_parity(ctx: &Ctx, _: &mut ChaCha8Rng) -> CheckResult {
    let mut t = Tracker::new("z-parity");
    let k = &ctx.consts;
    let det = ctx.detuning(10.0);
    for preset in [Preset::Default, Preset::Tight] {
        for m in [0, 1, 2, 5] {
            let mut mode = ModeSpec::sodium_reference(m);
            mode.waist = preset.waist_in_wavelengths() * mode.wavelength;
            mode.theta_p = PI / 3.0;
            for z in [mode.wavelength, 0.5 * mode.rayleigh_range()] {
                for i in 1..=24 {
                    let rho = mode.waist * 3.0 * f64::from(i) / 24.0;
                    let a = force_breakdown(&mode, &ctx.atom, &det, &CylPoint::new(rho, 0.3, z), k);
                    let b = force_breakdown(&mode, &ctx.atom, &det, &CylPoint::new(rho, 0.3, -z), k);
                    let at = |c: &str| format!("{c} preset={} m={m} rho={rho:.3e} z={z:.3e}", preset.name());
                    parity(&mut t, a.sca_total.rho, b.sca_total.rho, true, 1e-10, || at("sca_rho"));
                    parity(&mut t, a.sca_total.phi, b.sca_total.phi, false, 1e-10, || at("sca_phi"));
                    parity(&mut t, a.sca_total.z, b.sca_total.z, false, 1e-10, || at("sca_z"));
                    parity(&mut t, a.dip_total.rho, b.dip_total.rho, false, 1e-10, || at("dip_rho"));
                    parity(&mut t, a.dip_total.z, b.dip_total.z, true, 1e-10, || at("dip_z"));
                }
            }
        }
    }
    t.finish()
}

fn xi_and_envelope_parity(ctx: &Ctx, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut t = Tracker::new("field-parity");
    for _ in 0..200 {
        let mode = random_mode(rng);
        let pt = random_point(rng, &mode, 0.0);
        let mirror = CylPoint { z: -pt.z, ..pt };
        let inverse = ModeSpec { m: -mode.m, ..mode };
        let at = || describe(&mode, &pt);
        t.relative(-xi_phase(&mode, &mirror), xi_phase(&mode, &pt), 1e-14, at);
        let env = lg_envelope(&mode, &pt, &ctx.consts).value.abs();
        t.relative(lg_envelope(&mode, &mirror, &ctx.consts).value.abs(), env, 1e-14, at);
        t.relative(lg_envelope(&inverse, &pt, &ctx.consts).value.abs(), env, 0.0, at);
    }
    t.finish()
}

fn reflect(b: &ForceBreakdown) -> [f64; 5] {
    [b.sca_total.rho, -b.sca_total.phi, b.sca_total.z, b.dip_total.rho, b.dip_total.z]
}

fn theta_reflection(ctx: &Ctx, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut t = Tracker::new("theta-reflection");
    let k = &ctx.consts;
    let det = ctx.detuning(10.0);
    let mut thetas = vec![0.0, PI / 4.0, PI / 2.0];
    thetas.extend((0..20).map(|_| rng.gen_range(0.0..PI)));
    for theta_p in thetas {
        for m in [0, 1, 2, 5] {
            let mode = ModeSpec { theta_p, ..ModeSpec::sodium_reference(m) };
            let flipped = ModeSpec { theta_p: PI - theta_p, ..mode };
            for i in 0..=16 {
                let pt = CylPoint::new(mode.waist * 0.2 * f64::from(i), 0.0, 0.0);
                let a = force_breakdown(&mode, &ctx.atom, &det, &pt, k);
                let b = force_breakdown(&flipped, &ctx.atom, &det, &pt, k);
                let (ra, rb) = ([a.sca_total.rho, a.sca_total.phi, a.sca_total.z, a.dip_total.rho, a.dip_total.z], reflect(&b));
                for (x, y) in ra.into_iter().zip(rb) {
                    t.record((x - y).abs(), 1e-12 * x.abs().max(y.abs()), || {
                        format!("theta_p={theta_p:.6} m={m} rho={:.3e}", pt.rho)
                    });
                }
            }
        }
    }
    t.finish()
}

fn branch_algebra(ctx: &Ctx, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut t = Tracker::new("branch-algebra");
    let k = &ctx.consts;
    for _ in 0..1000 {
        let mode = random_mode(rng);
        let pt = random_point(rng, &mode, 0.0);
        let det = ctx.detuning(rng.gen_range(-20.0..20.0));
        let e = evaluate_point(&mode, &ctx.atom, &det, &pt, k);
        let at = || describe(&mode, &pt);
        let omega2 = e.rabi_base * e.rabi_base;
        t.relative(e.rabi.plus.powi(2) + e.rabi.minus.powi(2), omega2, 1e-12, at);
        t.relative(e.saturation.plus + e.saturation.minus, e.saturation_base, 1e-12, at);
        let swapped = rabi_pair(&ModeSpec { theta_p: PI - mode.theta_p, ..mode }, &ctx.atom, &pt, k);
        t.relative(swapped.plus, e.rabi.minus, 1e-12, at);
        t.relative(swapped.minus, e.rabi.plus, 1e-12, at);
        // the selection-rule projections of the transverse field reproduce Ω±
        let (ux, uy) = transverse_amplitudes(&mode, &pt, k);
        let proj = selection_projection(ux, uy, ctx.atom.dipole);
        t.relative(proj.plus.norm() / k.hbar, e.rabi.plus, 1e-12, at);
        t.relative(proj.minus.norm() / k.hbar, e.rabi.minus, 1e-12, at);
    }
    t.finish()
}

/// Ω± and every force component are unchanged by φ and Φ_P.
fn azimuth_invariance(ctx: &Ctx, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut t = Tracker::new("azimuth-invariance");
    let k = &ctx.consts;
    let det = ctx.detuning(10.0);
    for _ in 0..20 {
        let mode = random_mode(rng);
        let pt = random_point(rng, &mode, 0.05);
        let reference = evaluate_point(&mode, &ctx.atom, &det, &CylPoint { phi: 0.0, ..pt }, k);
        let ref_mode = ModeSpec { phi_p: 0.0, ..mode };
        let reference_p = evaluate_point(&ref_mode, &ctx.atom, &det, &pt, k);
        for j in 0..16 {
            let angle = 2.0 * PI * f64::from(j) / 16.0;
            let by_phi = evaluate_point(&mode, &ctx.atom, &det, &CylPoint { phi: angle, ..pt }, k);
            let by_phi_p = evaluate_point(&ModeSpec { phi_p: angle, ..mode }, &ctx.atom, &det, &pt, k);
            for (e, r) in [(&by_phi, &reference), (&by_phi_p, &reference_p)] {
                let at = || format!("angle={angle:.4} {}", describe(&mode, &pt));
                t.relative(e.rabi.plus, r.rabi.plus, 1e-12, at);
                t.relative(e.rabi.minus, r.rabi.minus, 1e-12, at);
                for ((_, a), (_, b)) in e.forces.named().into_iter().zip(r.forces.named()) {
                    for (x, y) in [(a.rho, b.rho), (a.phi, b.phi), (a.z, b.z)] {
                        t.record((x - y).abs(), 1e-12 * x.abs().max(y.abs()), at);
                    }
                }
            }
        }
    }
    t.finish()
}

fn saturation_monotone(ctx: &Ctx, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut t = Tracker::new("saturation-vs-power");
    let det = ctx.detuning(10.0);
    for _ in 0..50 {
        let mode = random_mode(rng);
        let pt = random_point(rng, &mode, 0.05);
        let mut previous: Option<crate::atom::TransitionPair<f64>> = None;
        for i in 1..=10 {
            let m = ModeSpec { power: mode.power * f64::from(i), ..mode };
            let s = evaluate_point(&m, &ctx.atom, &det, &pt, &ctx.consts).saturation;
            if let Some(p) = previous {
                for (now, before) in [(s.plus, p.plus), (s.minus, p.minus)] {
                    // a branch with zero weight stays at zero
                    let bad = if before == 0.0 { now != 0.0 } else { now <= before };
                    t.record(if bad { 1.0 } else { 0.0 }, 0.5, || describe(&m, &pt));
                }
            }
            previous = Some(s);
        }
    }
    t.finish()
}

fn focal_zeros(ctx: &Ctx, _: &mut ChaCha8Rng) -> CheckResult {
    let mut t = Tracker::new("focal-plane-zeros");
    let spec = SweepSpec::defaults(SweepKind::RadialProfile, Preset::Default, ctx.consts);
    for &m in &spec.m_values {
        let mode = ModeSpec { m, ..spec.mode };
        for r in spec.rho_grid(m) {
            let pt = CylPoint::new(r * mode.waist, spec.phi, 0.0);
            let b = force_breakdown(&mode, &spec.atom, &spec.detuning, &pt, &ctx.consts);
            for (name, v) in [("sca_rho", b.sca_total.rho), ("dip_z", b.dip_total.z), ("dip_phi", b.dip_total.phi)] {
                t.record(v.abs(), 1e-30, || format!("{name} m={m} rho/w0={r:.4}"));
            }
        }
    }
    t.finish()
}

fn dipole_zero_crossing(ctx: &Ctx, _: &mut ChaCha8Rng) -> CheckResult {
    let mut t = Tracker::new("dipole-zero-crossing");
    let spec = SweepSpec::defaults(SweepKind::RadialProfile, Preset::Default, ctx.consts);
    for m in [1, 2, 5, 20] {
        let mode = ModeSpec { m, ..spec.mode };
        let grid = spec.rho_grid(m);
        let target = (f64::from(m) / 2.0).sqrt();
        let Some(i) = grid.windows(2).position(|w| w[0] <= target && target <= w[1]) else {
            t.fail(format!("m={m}: ring radius outside the grid"));
            continue;
        };
        let f = |r: f64| {
            force_breakdown(&mode, &spec.atom, &spec.detuning, &CylPoint::new(r * mode.waist, 0.0, 0.0), &ctx.consts)
                .dip_total
                .rho
        };
        let (a, b) = (f(grid[i]), f(grid[i + 1]));
        let crosses = a * b <= 0.0 && (a != 0.0 || b != 0.0);
        t.record(if crosses { 0.0 } else { 1.0 }, 0.5, || {
            format!("m={m}: f({:.5}) = {a:.3e}, f({:.5}) = {b:.3e}", grid[i], grid[i + 1])
        });
    }
    t.finish()
}

/// On the axis every component is finite, azimuthal scattering vanishes for
/// m ≥ 1, and m = 0 never has an azimuthal force.
fn axis_and_m0(ctx: &Ctx, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut t = Tracker::new("axis-regularity");
    let det = ctx.detuning(10.0);
    for m in 0..=20 {
        for theta_p in [0.0, PI / 3.0, PI] {
            let mode = ModeSpec { theta_p, ..ModeSpec::sodium_reference(m) };
            for z in [0.0, mode.wavelength, -0.7 * mode.rayleigh_range()] {
                let b = force_breakdown(&mode, &ctx.atom, &det, &CylPoint::new(0.0, 0.0, z), &ctx.consts);
                let finite = b.named().iter().all(|(_, v)| v.is_finite());
                t.record(if finite { 0.0 } else { f64::INFINITY }, 1.0, || format!("m={m} z={z:.3e}"));
                t.record(b.sca_total.phi.abs(), 0.0, || format!("axis sca_phi m={m} z={z:.3e}"));
            }
        }
    }
    for _ in 0..100 {
        let mode = ModeSpec { m: 0, ..random_mode(rng) };
        let pt = random_point(rng, &mode, 0.0);
        let b = force_breakdown(&mode, &ctx.atom, &det, &pt, &ctx.consts);
        t.record(b.grand_total.phi.abs(), 0.0, || format!("m=0 {}", describe(&mode, &pt)));
    }
    t.finish()
}

/// Weak-drive scaling at w₀ = 5λ, where a 2.5 nW beam keeps S below 0.015:
/// halving the power halves every component, and
/// flipping the detuning flips the dipole force and preserves scattering.
fn weak_drive(ctx: &Ctx, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut t = Tracker::new("weak-drive-scaling");
    let k = &ctx.consts;
    for _ in 0..50 {
        let base = random_mode(rng);
        let mode = ModeSpec { power: 2.5e-9, waist: 5.0 * base.wavelength, ..base };
        let half = ModeSpec { power: 0.5 * mode.power, ..mode };
        let pt = random_point(rng, &mode, 0.05);
        let det = ctx.detuning(10.0);
        let red = DetuningSpec { delta0: -det.delta0, ..det };
        let full = force_breakdown(&mode, &ctx.atom, &det, &pt, k);
        let halved = force_breakdown(&half, &ctx.atom, &det, &pt, k);
        let flipped = force_breakdown(&mode, &ctx.atom, &red, &pt, k);
        let at = || describe(&mode, &pt);
        for ((_, a), (_, b)) in full.named().into_iter().zip(halved.named()) {
            for (x, y) in [(a.rho, b.rho), (a.phi, b.phi), (a.z, b.z)] {
                t.record((0.5 * x - y).abs(), 0.01 * (0.5 * x).abs(), at);
            }
        }
        for (x, y) in [(full.dip_total.rho, flipped.dip_total.rho), (full.dip_total.z, flipped.dip_total.z)] {
            t.record((x + y).abs(), 0.01 * x.abs(), at);
        }
        for (x, y) in [(full.sca_total.rho, flipped.sca_total.rho), (full.sca_total.phi, flipped.sca_total.phi), (full.sca_total.z, flipped.sca_total.z)] {
            t.record((x - y).abs(), 0.0, at);
        }
    }
    t.finish()
}

fn doppler_limit(ctx: &Ctx, rng: &mut ChaCha8Rng) -> CheckResult {
    let mut t = Tracker::new("doppler-limit");
    let k = &ctx.consts;
    for _ in 0..100 {
        let mode = random_mode(rng);
        let pt = random_point(rng, &mode, 0.0);
        let det = ctx.detuning(rng.gen_range(-20.0..20.0));
        let e = evaluate_point(&mode, &ctx.atom, &det, &pt, k);
        for d in [e.detuning.plus, e.detuning.minus] {
            t.record((d - det.delta0).abs(), 0.0, || describe(&mode, &pt));
        }
    }
    // a red-detuned beam pushes harder on an atom moving against it
    let mode = ModeSpec::sodium_reference(2);
    let pt = CylPoint::new(mode.waist, 0.0, 0.0);
    let fz = |v_z: f64| {
        let det = DetuningSpec { velocity: Velocity { v_z, ..Velocity::default() }, ..ctx.detuning(-10.0) };
        force_breakdown(&mode, &ctx.atom, &det, &pt, k).sca_total.z
    };
    let (rest, toward, away) = (fz(0.0), fz(-1.0), fz(1.0));
    let ordered = away < rest && rest < toward;
    t.record(if ordered { 0.0 } else { 1.0 }, 0.5, || {
        format!("f_z(v_z = +1, 0, -1 m/s) = ({away:.6e}, {rest:.6e}, {toward:.6e}) N")
    });
    t.finish()
}

fn rabi_on_axis(ctx: &Ctx, _: &mut ChaCha8Rng) -> CheckResult {
    // vortex cores are dark; m = 0 is bright on the axis
    let mut t = Tracker::new("vortex-core");
    for m in 0..=20 {
        let mode = ModeSpec::sodium_reference(m);
        let omega = rabi_base(&mode, &ctx.atom, &CylPoint::new(0.0, 0.0, 0.0), &ctx.consts);
        let ok = if m == 0 { omega > 0.0 } else { omega == 0.0 };
        t.record(if ok { 0.0 } else { 1.0 }, 0.5, || format!("m={m}: Omega(0) = {omega:e}"));
    }
    t.finish()
}

type Check = fn(&Ctx, &mut ChaCha8Rng) -> CheckResult;

/// Registered checks by name, in suite order.
const CHECKS: [(&str, Check); 18] = [
    ("poincare-norm", poincare_norm),
    ("laguerre-series", laguerre),
    ("xi-gradient", xi_gradient_check),
    ("rabi-gradient", rabi_gradient_check),
    ("power-quadrature", power_check),
    ("force-potential", force_potential),
    ("z-parity", z_parity),
    ("field-parity", xi_and_envelope_parity),
    ("theta-reflection", theta_reflection),
    ("branch-algebra", branch_algebra),
    ("azimuth-invariance", azimuth_invariance),
    ("saturation-vs-power", saturation_monotone),
    ("focal-plane-zeros", focal_zeros),
    ("dipole-zero-crossing", dipole_zero_crossing),
    ("axis-regularity", axis_and_m0),
    ("weak-drive-scaling", weak_drive),
    ("doppler-limit", doppler_limit),
    ("vortex-core", rabi_on_axis),
];

pub fn check_names() -> impl Iterator<Item = &'static str> {
    CHECKS.iter().map(|(name, _)| *name)
}

/// Runs the checks whose names pass `select`. Seeds depend on a check's
/// position in the full suite, not on the selection.
pub fn run_selected(
    opts: &ValidationOptions,
    consts: &PhysicalConstants,
    select: impl Fn(&str) -> bool,
) -> ValidationReport {
    let ctx = Ctx {
        opts: *opts,
        consts: *consts,
        atom: AtomSpec::sodium_d2(consts),
    };
    let checks = CHECKS
        .iter()
        .enumerate()
        .filter(|(_, (name, _))| select(name))
        .map(|(i, (_, check))| check(&ctx, &mut ctx.rng(i as u64)))
        .collect();
    ValidationReport { checks }
}

/// Runs every check; a failed invariant is reported, never panicked on.
pub fn run_validation(opts: &ValidationOptions, consts: &PhysicalConstants) -> ValidationReport {
    run_selected(opts, consts, |_| true)
}
