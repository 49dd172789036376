//! Acceptance run: one PASS/FAIL line per criterion, exit status nonzero if
//! any criterion fails. Runs without the libtest harness so the lines are
//! always printed.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vortex_forces::atom::{rabi_gradient, rabi_pair, AtomSpec, DetuningSpec, TransitionPair};
use vortex_forces::beam::{power_quadrature, xi_gradient, xi_phase, CylPoint, ModeSpec, QuadratureSettings};
use vortex_forces::force::{evaluate_point, force_breakdown, optical_potential};
use vortex_forces::scan::{self, to_csv_string, Preset, SweepKind, SweepResult, SweepSpec};
use vortex_forces::PhysicalConstants;

const ZN: f64 = 1e21;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn consts() -> PhysicalConstants {
    PhysicalConstants::codata_2018()
}

fn defaults(kind: SweepKind, preset: Preset) -> SweepSpec {
    SweepSpec::defaults(kind, preset, consts())
}

fn col(r: &SweepResult, name: &str) -> Vec<f64> {
    r.column(name).unwrap_or_else(|| panic!("column {name}"))
}

fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

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
    let z = mode.rayleigh_range() * rng.gen_range(0.01..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    CylPoint::new(rho, rng.gen_range(0.0..2.0 * PI), z)
}

fn power_normalization() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for m in [0, 1, 2, 5] {
        for p in [0, 1, 2] {
            for theta_p in [0.0, PI / 4.0, PI / 2.0, PI] {
                let mode = ModeSpec { p, theta_p, ..ModeSpec::sodium_reference(m) };
                match power_quadrature(&mode, &consts(), &QuadratureSettings::default()) {
                    Ok(power) => worst = worst.max((power / mode.power - 1.0).abs()),
                    Err(e) => return outcome(false, format!("m={m} p={p}: {e}")),
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < 1e-3 && secs < 10.0,
        format!("48 modes, worst relative error {worst:.2e} (limit 1e-3), {secs:.2} s (limit 10 s)"),
    )
}

/// Where `∂Ω/∂ρ` or `∂Ω/∂z` passes through zero the error is compared with
/// 1e-6 of the largest slope on the same radial line instead.
fn gradient_oracles() -> Outcome {
    let start = Instant::now();
    let k = consts();
    let atom = AtomSpec::sodium_d2(&k);
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let (mut worst_xi, mut worst_omega): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let mode = random_mode(&mut rng);
        let pt = random_point(&mut rng, &mode, 0.05);
        let (hr, hz) = (1e-5 * mode.waist, 1e-5 * mode.rayleigh_range());
        let (xr, xz) = xi_gradient(&mode, &pt);
        let fr = central(|r| xi_phase(&mode, &CylPoint { rho: r, ..pt }), pt.rho, hr);
        let fz = central(|z| xi_phase(&mode, &CylPoint { z, ..pt }), pt.z, hz);
        worst_xi = worst_xi.max(((xr - fr) / fr).abs()).max(((xz - fz) / fz).abs());

        let unweighted = ModeSpec { theta_p: 0.0, ..mode };
        let (scale_r, scale_z) = (0..=300).fold((0.0f64, 0.0f64), |(a, b), i| {
            let p = CylPoint { rho: mode.waist * 3.5 * f64::from(i) / 300.0, ..pt };
            let g = rabi_gradient(&unweighted, &atom, &p, &k).plus;
            (a.max(g.d_rho.abs()), b.max(g.d_z.abs()))
        });
        let an = rabi_gradient(&mode, &atom, &pt, &k);
        let (c, s) = ((0.5 * mode.theta_p).cos(), (0.5 * mode.theta_p).sin());
        type Pick = fn(&TransitionPair<f64>) -> f64;
        let picks: [(Pick, f64, f64, f64); 2] = [
            (|p| p.plus, an.plus.d_rho, an.plus.d_z, c),
            (|p| p.minus, an.minus.d_rho, an.minus.d_z, s),
        ];
        for (pick, ar, az, w) in picks {
            let fr = central(|r| pick(&rabi_pair(&mode, &atom, &CylPoint { rho: r, ..pt }, &k)), pt.rho, hr);
            let fz = central(|z| pick(&rabi_pair(&mode, &atom, &CylPoint { z, ..pt }, &k)), pt.z, hz);
            let er = (ar - fr).abs() / fr.abs().max(w * scale_r);
            let ez = (az - fz).abs() / fz.abs().max(w * scale_z);
            if !(er.is_nan() || ez.is_nan()) {
                worst_omega = worst_omega.max(er).max(ez);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_xi < 1e-6 && worst_omega < 1e-6 && secs < 1.0,
        format!("100 points, worst xi {worst_xi:.2e}, worst Omega {worst_omega:.2e} (limit 1e-6), {secs:.2} s (limit 1 s)"),
    )
}

fn force_potential_identity() -> Outcome {
    let k = consts();
    let atom = AtomSpec::sodium_d2(&k);
    let mut rng = ChaCha8Rng::seed_from_u64(7_331);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 50 {
        let mut mode = random_mode(&mut rng);
        mode.theta_p = rng.gen_range(0.1..PI - 0.1);
        let pt = random_point(&mut rng, &mode, 0.05);
        let det = DetuningSpec::in_linewidths(rng.gen_range(-20.0..20.0), &atom);
        let rabi = rabi_pair(&mode, &atom, &pt, &k);
        if !(rabi.plus > 0.0 && rabi.minus > 0.0) {
            continue;
        }
        n += 1;
        let f = force_breakdown(&mode, &atom, &det, &pt, &k);
        let h = 1e-6 * mode.waist;
        let u = |p: CylPoint| optical_potential(&mode, &atom, &det, &p, &k);
        for (force, pick) in [
            (f.dip_plus, (|t: TransitionPair<f64>| t.plus) as fn(TransitionPair<f64>) -> f64),
            (f.dip_minus, |t: TransitionPair<f64>| t.minus),
        ] {
            let gr = central(|r| pick(u(CylPoint { rho: r, ..pt })), pt.rho, h);
            let gz = central(|z| pick(u(CylPoint { z, ..pt })), pt.z, h);
            let err = ((force.rho + gr).powi(2) + force.phi.powi(2) + (force.z + gz).powi(2)).sqrt();
            worst = worst.max(err / force.norm());
        }
    }
    outcome(worst < 1e-5, format!("50 points x 2 branches, worst relative error {worst:.2e} (limit 1e-5)"))
}

fn focal_plane_zeros(profile: &SweepResult) -> Outcome {
    let mut worst: f64 = 0.0;
    let names = [
        "sca_plus_rho_zn", "sca_minus_rho_zn", "sca_total_rho_zn",
        "dip_plus_z_zn", "dip_minus_z_zn", "dip_total_z_zn",
        "dip_plus_phi_zn", "dip_minus_phi_zn", "dip_total_phi_zn",
    ];
    for name in names {
        for v in col(profile, name) {
            worst = worst.max(v.abs() / ZN);
        }
    }
    outcome(worst < 1e-30, format!("{} rows, largest |component| {worst:.1e} N (limit 1e-30 N)", profile.rows.len()))
}

fn dipole_zero_crossing(profile: &SweepResult) -> Outcome {
    let (m, rho, f) = (col(profile, "m"), col(profile, "rho_over_w0"), col(profile, "dip_total_rho_zn"));
    let mut notes = Vec::new();
    let mut ok = true;
    for target_m in [1.0, 2.0, 5.0, 20.0] {
        let idx: Vec<usize> = (0..m.len()).filter(|&i| m[i] == target_m).collect();
        let ring: f64 = (target_m / 2.0).sqrt();
        let Some(w) = idx.windows(2).find(|w| rho[w[0]] <= ring && ring <= rho[w[1]]) else {
            ok = false;
            notes.push(format!("m={target_m}: not bracketed"));
            continue;
        };
        let crosses = f[w[0]] * f[w[1]] <= 0.0 && (f[w[0]] != 0.0 || f[w[1]] != 0.0);
        ok &= crosses;
        notes.push(format!("m={target_m}: {}", if crosses { "sign change" } else { "no sign change" }));
    }
    outcome(ok, notes.join(", "))
}

/// Rows of a theta-scan dataset for one Θ_P, in ρ order.
fn at_theta(r: &SweepResult, theta: f64, name: &str) -> Vec<f64> {
    let t = col(r, "theta_p");
    let c = col(r, name);
    t.iter().zip(c).filter(|(x, _)| **x == theta).map(|(_, v)| v).collect()
}

fn poincare_symmetries(scan: &SweepResult) -> Outcome {
    let thetas = [0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, PI];
    let mut worst: f64 = 0.0;
    let mut compare = |a: &[f64], b: &[f64], sign: f64| {
        for (x, y) in a.iter().zip(b) {
            let scale = x.abs().max(y.abs());
            if scale > 0.0 {
                worst = worst.max((x - sign * y).abs() / scale);
            }
        }
    };
    for name in ["sca_total_z_zn", "total_z_zn", "dip_total_rho_zn", "sca_total_rho_zn"] {
        compare(&at_theta(scan, thetas[3], name), &at_theta(scan, thetas[1], name), 1.0);
        compare(&at_theta(scan, thetas[4], name), &at_theta(scan, thetas[0], name), 1.0);
    }
    let mut phi_exact = true;
    for name in ["sca_total_phi_zn", "total_phi_zn"] {
        let (a, b) = (at_theta(scan, thetas[3], name), at_theta(scan, thetas[1], name));
        phi_exact &= a.iter().zip(&b).all(|(x, y)| *x == -*y);
        let (a, b) = (at_theta(scan, thetas[4], name), at_theta(scan, thetas[0], name));
        phi_exact &= a.iter().zip(&b).all(|(x, y)| *x == -*y);
    }
    let equator_zero = at_theta(scan, thetas[2], "total_phi_zn").iter().all(|v| *v == 0.0)
        && at_theta(scan, thetas[2], "sca_total_phi_zn").iter().all(|v| *v == 0.0);
    outcome(
        worst <= 1e-12 && phi_exact && equator_zero,
        format!(
            "f_z, f_rho: worst relative mismatch {worst:.1e} (limit 1e-12); f_phi negated exactly: {phi_exact}; f_phi at pi/2 zero: {equator_zero}"
        ),
    )
}

fn z_parity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut rows = 0;
    for preset in [Preset::Default, Preset::Tight] {
        let r = scan::run(&defaults(SweepKind::ZPlaneCompare, preset)).expect("zplane sweep");
        let z = col(&r, "z_m");
        // component, parity column that must vanish
        for (c, vanishing) in [
            ("sca_total_rho", "psum"),
            ("sca_total_z", "pdiff"),
            ("dip_total_rho", "pdiff"),
            ("dip_total_z", "psum"),
        ] {
            let value = col(&r, &format!("{c}_zn"));
            let parity = col(&r, &format!("{c}_{vanishing}_zn"));
            let other = col(&r, &format!("{c}_{}_zn", if vanishing == "psum" { "pdiff" } else { "psum" }));
            for i in 0..z.len() {
                if z[i] == 0.0 {
                    continue;
                }
                rows += 1;
                let scale = value[i].abs().max((other[i] - value[i]).abs());
                if scale > 0.0 {
                    worst = worst.max(parity[i].abs() / scale);
                }
            }
        }
    }
    outcome(
        worst <= 1e-10,
        format!("both presets, {rows} component rows at z = +-lambda, worst relative parity defect {worst:.1e} (limit 1e-10)"),
    )
}

fn branch_algebra() -> Outcome {
    let k = consts();
    let atom = AtomSpec::sodium_d2(&k);
    let mut rng = ChaCha8Rng::seed_from_u64(1_000);
    let (mut worst_sum, mut worst_phi): (f64, f64) = (0.0, 0.0);
    for _ in 0..1000 {
        let mode = random_mode(&mut rng);
        let pt = random_point(&mut rng, &mode, 0.0);
        let det = DetuningSpec::in_linewidths(rng.gen_range(-20.0..20.0), &atom);
        let e = evaluate_point(&mode, &atom, &det, &pt, &k);
        let o2 = e.rabi_base * e.rabi_base;
        if o2 > 0.0 {
            worst_sum = worst_sum
                .max(((e.rabi.plus.powi(2) + e.rabi.minus.powi(2)) / o2 - 1.0).abs())
                .max(((e.saturation.plus + e.saturation.minus) / e.saturation_base - 1.0).abs());
        }
        let turned = evaluate_point(&ModeSpec { phi_p: rng.gen_range(0.0..2.0 * PI), ..mode }, &atom, &det, &pt, &k);
        for ((_, a), (_, b)) in e.forces.named().into_iter().zip(turned.forces.named()) {
            for (x, y) in [(a.rho, b.rho), (a.phi, b.phi), (a.z, b.z)] {
                let scale = x.abs().max(y.abs());
                if scale > 0.0 {
                    worst_phi = worst_phi.max((x - y).abs() / scale);
                }
            }
        }
    }
    outcome(
        worst_sum <= 1e-12 && worst_phi <= 1e-12,
        format!("1000 samples, branch sums {worst_sum:.1e}, Phi_P invariance {worst_phi:.1e} (limit 1e-12)"),
    )
}

fn doppler_limit(datasets: &[&SweepResult]) -> Outcome {
    let mut rows = 0;
    let mut exact = true;
    for r in datasets {
        let delta0: f64 = r.header_value("detuning.delta0_rad_s").unwrap().parse().unwrap();
        for name in ["delta_plus", "delta_minus"] {
            for v in col(r, name) {
                exact &= v == delta0;
                rows += 1;
            }
        }
    }
    let run_vz = |v_z: f64| {
        let mut s = defaults(SweepKind::ThetaScan, Preset::Default);
        s.samples = 128;
        s.detuning = DetuningSpec::in_linewidths(-10.0, &s.atom);
        s.detuning.velocity.v_z = v_z;
        col(&scan::run(&s).expect("theta sweep"), "sca_total_z_zn")
    };
    let (f0, f1, f2) = (run_vz(0.0), run_vz(1.0), run_vz(2.0));
    // moving along the beam pushes a red-detuned atom further from resonance
    let lit: Vec<usize> = (0..f0.len()).filter(|&i| f0[i] > 0.0).collect();
    let monotone = !lit.is_empty() && lit.iter().all(|&i| f2[i] < f1[i] && f1[i] < f0[i]);
    outcome(
        exact && monotone,
        format!(
            "{rows} branch detunings equal delta0: {exact}; v_z = 0, 1, 2 m/s at delta0 = -10 Gamma lowers f_z on all {} lit rows: {monotone}",
            lit.len()
        ),
    )
}

fn determinism() -> Outcome {
    let mut texts = Vec::new();
    for kind in [SweepKind::RadialProfile, SweepKind::ZPlaneCompare] {
        for threads in [Some(1), Some(8), Some(8), None] {
            let mut s = defaults(kind, Preset::Default);
            s.threads = threads;
            texts.push((kind, to_csv_string(&scan::run(&s).expect("sweep"))));
        }
    }
    let dir = tempfile::tempdir().expect("tempdir");
    let mut files = Vec::new();
    for (i, threads) in [Some(1), Some(8)].into_iter().enumerate() {
        let mut s = defaults(SweepKind::ThetaScan, Preset::Default);
        s.threads = threads;
        let path = dir.path().join(format!("run{i}.csv"));
        scan::write_csv(&scan::run(&s).expect("sweep"), &path).expect("write");
        files.push(std::fs::read(&path).expect("read"));
    }
    let same = texts.chunks(4).all(|c| c.iter().all(|(_, t)| *t == c[0].1)) && files[0] == files[1];
    outcome(same, "radial-profile, zplane-compare, theta-scan at threads 1 and 8, repeated: byte-identical")
}

fn main() {
    let profile = scan::run(&defaults(SweepKind::RadialProfile, Preset::Default)).expect("radial sweep");
    let theta = scan::run(&defaults(SweepKind::ThetaScan, Preset::Default)).expect("theta sweep");
    let zplane = scan::run(&defaults(SweepKind::ZPlaneCompare, Preset::Default)).expect("zplane sweep");

    let results: Vec<(&str, Outcome)> = vec![
        ("power normalization", power_normalization()),
        ("gradient oracles", gradient_oracles()),
        ("force-potential identity", force_potential_identity()),
        ("focal-plane zeros", focal_plane_zeros(&profile)),
        ("dipole zero crossing", dipole_zero_crossing(&profile)),
        ("Poincare symmetries", poincare_symmetries(&theta)),
        ("z-parity", z_parity()),
        ("branch algebra", branch_algebra()),
        ("Doppler-free limit", doppler_limit(&[&profile, &theta, &zplane])),
        ("determinism", determinism()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("{} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
