//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Numeric gates are pinned in the constants below; the CREATOR inputs come
//! from the shipped configs.

use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, Vector3};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cdpr_core::control::{ControllerGains, FrictionParams};
use cdpr_core::model::{mass_matrix, natural_frequencies, stiffness_matrix};
use cdpr_core::shaping::{insensitivity, residual_vibration, zv, zvd, ModeSpec, ShaperKind};
use cdpr_core::sim::{equilibrium_state, simulate, simulate_from, SimulationConfig};
use cdpr_core::tension::{solve_tensions, wrench_matrix, TensionLimits};
use cdpr_core::trajectory::{bang_bang_line, bang_bang_state};
use cdpr_core::workspace::{
    frequency_field, in_band, robustness_index, GridSpec, ShaperBand,
};
use cdpr_core::{Pose, RobotModel};

use cdpr_cli::config::{RobotConfig, ShaperVariant};
use cdpr_cli::formats::write_field_binary;
use cdpr_cli::parallel::frequency_field_parallel;
use cdpr_cli::report::{build_report, render_table};
use cdpr_cli::runner::{load_scenario, run_variants, LoadedScenario, VariantRun};

const F_M1: f64 = 3.67;

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn creator_model() -> RobotModel {
    RobotConfig::load(&configs_dir().join("creator.json"))
        .unwrap()
        .to_model()
        .unwrap()
}

fn random_pose(rng: &mut ChaCha8Rng) -> Pose {
    Pose::at(Vector3::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.2..0.4),
        rng.gen_range(0.3..2.0),
    ))
}

#[test]
fn criterion_1_shaper_zeros() {
    let t0 = Instant::now();
    let mode = ModeSpec::undamped(F_M1);
    let v_zv = residual_vibration(&zv(&mode), &mode);
    let v_zvd = residual_vibration(&zvd(&mode), &mode);
    assert!(v_zv <= 1e-10, "ZV residual at tuning: {v_zv:e}");
    assert!(v_zvd <= 1e-10, "ZVD residual at tuning: {v_zvd:e}");

    let h = 1e-5 * F_M1;
    let s = zvd(&mode);
    let dv = (residual_vibration(&s, &ModeSpec::undamped(F_M1 + h))
        - residual_vibration(&s, &ModeSpec::undamped(F_M1 - h)))
        / (2.0 * h);
    assert!(dv.abs() <= 1e-4, "ZVD dV/df at tuning: {dv:e}");

    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "PASS criterion 1: shaper zeros (V_zv = {v_zv:.2e}, V_zvd = {v_zvd:.2e}, \
         |dV/df|_zvd = {:.2e}) in {elapsed:?}",
        dv.abs()
    );
}

fn computed_insensitivities() -> (f64, f64) {
    let mode = ModeSpec::undamped(F_M1);
    (
        insensitivity(ShaperKind::Zv, &mode, 0.05),
        insensitivity(ShaperKind::Zvd, &mode, 0.05),
    )
}

#[test]
fn criterion_2_insensitivity_widths() {
    let t0 = Instant::now();
    let (i_zv, i_zvd) = computed_insensitivities();
    assert!((i_zv - 0.0636).abs() <= 0.001, "I_zv = {i_zv}");
    assert!((i_zvd - 0.287).abs() <= 0.002, "I_zvd = {i_zvd}");
    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!("PASS criterion 2: insensitivities I_zv = {i_zv:.4}, I_zvd = {i_zvd:.4} in {elapsed:?}");
}

#[test]
fn criterion_3_frequency_bands() {
    let (i_zv, i_zvd) = computed_insensitivities();
    let edges = |i: f64| (F_M1 * (1.0 - i / 2.0), F_M1 * (1.0 + i / 2.0));
    let (zv_lo, zv_hi) = edges(i_zv);
    let (zvd_lo, zvd_hi) = edges(i_zvd);
    // computed bands land on [3.55, 3.79] and [3.14, 4.20]
    assert!((zv_lo - 3.55).abs() <= 0.01 && (zv_hi - 3.79).abs() <= 0.01);
    // 3.14 is a band edge in Hz, not a circle constant
    #[allow(clippy::approx_constant)]
    let zvd_lo_gate = 3.14;
    assert!((zvd_lo - zvd_lo_gate).abs() <= 0.01 && (zvd_hi - 4.20).abs() <= 0.01);
    // and stay within 0.05 Hz of the quoted prototype ranges
    assert!((zv_lo - 3.57).abs() <= 0.05 && (zv_hi - 3.79).abs() <= 0.05);
    assert!((zvd_lo - 3.17).abs() <= 0.05 && (zvd_hi - 4.21).abs() <= 0.05);
    println!(
        "PASS criterion 3: bands ZV [{zv_lo:.3}, {zv_hi:.3}] Hz, ZVD [{zvd_lo:.3}, {zvd_hi:.3}] Hz"
    );
}

/// Real roots of `x^3 + c2 x^2 + c1 x + c0`, ascending (trigonometric form;
/// the modal problem always has real non-negative roots).
fn cubic_roots(c2: f64, c1: f64, c0: f64) -> [f64; 3] {
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2.powi(3) / 27.0 - c2 * c1 / 3.0 + c0;
    let shift = -c2 / 3.0;
    if p >= -1e-300 {
        return [shift, shift, shift];
    }
    let r = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
    let phi = arg.acos() / 3.0;
    let mut roots = [
        shift + r * phi.cos(),
        shift + r * (phi - 2.0 * std::f64::consts::PI / 3.0).cos(),
        shift + r * (phi - 4.0 * std::f64::consts::PI / 3.0).cos(),
    ];
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

#[test]
fn criterion_4_modal_oracle_and_calibrated_triple() {
    let model = creator_model();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut checked = 0;
    while checked < 100 {
        let pose = random_pose(&mut rng);
        let Ok(modal) = natural_frequencies(&model, &pose) else {
            continue;
        };
        let m = mass_matrix(&model);
        let k = stiffness_matrix(&model, &pose).unwrap();
        let b: DMatrix<f64> = m.lu().solve(&k).unwrap();
        let tr = b[(0, 0)] + b[(1, 1)] + b[(2, 2)];
        let minors = b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)]
            + b[(0, 0)] * b[(2, 2)]
            - b[(0, 2)] * b[(2, 0)]
            + b[(1, 1)] * b[(2, 2)]
            - b[(1, 2)] * b[(2, 1)];
        let det = b[(0, 0)] * (b[(1, 1)] * b[(2, 2)] - b[(1, 2)] * b[(2, 1)])
            - b[(0, 1)] * (b[(1, 0)] * b[(2, 2)] - b[(1, 2)] * b[(2, 0)])
            + b[(0, 2)] * (b[(1, 0)] * b[(2, 1)] - b[(1, 1)] * b[(2, 0)]);
        let lambda = cubic_roots(-tr, minors, -det);
        for (f, l) in modal.frequencies_hz.iter().zip(lambda.iter()) {
            let expected = l.max(0.0).sqrt() / two_pi;
            let rel = (f - expected).abs() / expected.max(1e-30);
            assert!(rel < 1e-8, "{f} vs {expected} at {pose:?}");
        }
        checked += 1;
    }

    // calibrated stiffness reproduces the identified triple at the start pose
    let modal = natural_frequencies(&model, &Pose::at(Vector3::new(0.29, -0.047, 0.62))).unwrap();
    let f = &modal.frequencies_hz;
    assert!((f[0] - 3.67).abs() <= 0.05, "f1 = {}", f[0]);
    assert!((f[1] - 6.34).abs() <= 0.05, "f2 = {}", f[1]);
    assert!((f[2] - 7.82).abs() <= 0.05, "f3 = {}", f[2]);

    // the raw catalog EA does not (and is expected not to)
    let mut raw = model.clone();
    raw.effective_ea = None;
    let raw_f1 =
        natural_frequencies(&raw, &Pose::at(Vector3::new(0.29, -0.047, 0.62))).unwrap()
            .frequencies_hz[0];
    assert!(raw_f1 > 20.0, "raw EA f1 = {raw_f1}");
    println!(
        "PASS criterion 4: 100-pose characteristic-polynomial agreement; calibrated triple \
         ({:.3}, {:.3}, {:.3}) Hz; raw-EA f1 = {raw_f1:.1} Hz as expected off-scale",
        f[0], f[1], f[2]
    );
}

#[test]
fn criterion_5_trajectory_contract() {
    let p1 = Vector3::new(0.29, -0.047, 0.62);
    let p2 = Vector3::new(0.29, -0.047, 1.62);
    let tf = 3.0;
    let traj = bang_bang_line(&p1, &p2, tf, 1e-3).unwrap();
    assert_eq!(traj.samples[0].pose.position, p1, "start endpoint exact");
    assert_eq!(
        traj.samples.last().unwrap().pose.position,
        p2,
        "final endpoint exact"
    );
    let (mid, _, _) = bang_bang_state(&p1, &p2, tf, tf / 2.0);
    assert!((mid - (p1 + p2) / 2.0).norm() <= 1e-12, "midpoint");
    let eps = 1e-9;
    let (_, v_minus, _) = bang_bang_state(&p1, &p2, tf, tf / 2.0 - eps);
    let (_, v_plus, _) = bang_bang_state(&p1, &p2, tf, tf / 2.0 + eps);
    assert!((v_plus - v_minus).norm() < 1e-6, "velocity continuity");
    for t in [tf, tf + 0.5, tf + 2.0] {
        let (_, v, _) = bang_bang_state(&p1, &p2, tf, t);
        assert_eq!(v, Vector3::zeros(), "zero twist at t >= tf");
    }
    let peak = traj
        .samples
        .iter()
        .map(|s| s.twist.linear.norm())
        .fold(0.0, f64::max);
    let expected = 2.0 * (p2 - p1).norm() / tf;
    assert!((peak - expected).abs() <= 1e-9, "peak speed {peak}");
    println!("PASS criterion 5: trajectory contract (peak speed {peak:.10} m/s)");
}

#[test]
fn criterion_6_tension_solver() {
    let limits = TensionLimits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let base = creator_model();

    // 500 square instances: residual + direct-inverse oracle agreement
    let mut done = 0;
    while done < 500 {
        let model = perturbed_model(&base, &mut rng, 3);
        let pose = random_pose(&mut rng);
        let Ok(w) = wrench_matrix(&model, &pose) else {
            continue;
        };
        if w.determinant().abs() < 1e-6 {
            continue;
        }
        let tau_true = nalgebra::DVector::from_fn(3, |_, _| rng.gen_range(5.0..50.0));
        let w_f = -(&w * &tau_true);
        let sp = solve_tensions(&model, &pose, &w_f, &limits).unwrap();
        assert!(sp.feasible);
        let residual = (&w * &sp.tensions + &w_f).amax();
        assert!(residual <= 1e-9, "residual {residual:e}");
        let oracle = w.clone().try_inverse().unwrap() * (-&w_f);
        for i in 0..3 {
            assert!(
                (sp.tensions[i] - oracle[i]).abs() <= 1e-10,
                "solver vs inverse oracle"
            );
        }
        done += 1;
    }

    // 500 redundant instances (n = 4, m = 3): residual only
    let mut done = 0;
    while done < 500 {
        let model = perturbed_model(&base, &mut rng, 4);
        let pose = random_pose(&mut rng);
        let Ok(w) = wrench_matrix(&model, &pose) else {
            continue;
        };
        let tau_true = nalgebra::DVector::from_fn(4, |_, _| rng.gen_range(5.0..50.0));
        let w_f = -(&w * &tau_true);
        let sp = solve_tensions(&model, &pose, &w_f, &limits).unwrap();
        assert!(sp.feasible);
        let residual = (&w * &sp.tensions + &w_f).amax();
        assert!(residual <= 1e-9, "residual {residual:e}");
        done += 1;
    }
    println!("PASS criterion 6: 1000 random instances within 1e-9 N residual, square solves match the inverse oracle to 1e-10");
}

fn perturbed_model(base: &RobotModel, rng: &mut ChaCha8Rng, cables: usize) -> RobotModel {
    let mut model = base.clone();
    model.exit_points.truncate(3);
    model.anchor_points.truncate(3);
    model.winding_ratios.truncate(3);
    if cables == 4 {
        model.exit_points.push(Vector3::new(1.2, -1.85, 2.73));
        model.anchor_points.push(Vector3::zeros());
        model.winding_ratios.push(0.06);
    }
    for b in &mut model.exit_points {
        *b += Vector3::new(
            rng.gen_range(-0.2..0.2),
            rng.gen_range(-0.2..0.2),
            rng.gen_range(-0.1..0.1),
        );
    }
    model
}

struct CompareFixture {
    ls: LoadedScenario,
    runs: Vec<VariantRun>,
    elapsed: Duration,
}

fn compare_runs() -> &'static CompareFixture {
    static RUNS: OnceLock<CompareFixture> = OnceLock::new();
    RUNS.get_or_init(|| {
        let ls = load_scenario(&configs_dir().join("creator_line.json")).unwrap();
        let t0 = Instant::now();
        let runs = run_variants(&ls, &ShaperVariant::ALL, 5).unwrap();
        let elapsed = t0.elapsed();
        CompareFixture { ls, runs, elapsed }
    })
}

#[test]
fn criterion_7_closed_loop_attenuation() {
    let fixture = compare_runs();
    let p2p = |variant: ShaperVariant| {
        fixture
            .runs
            .iter()
            .find(|r| r.variant == variant)
            .unwrap()
            .metrics
            .peak_to_peak
    };
    let unshaped = p2p(ShaperVariant::None);
    let (zv, zvd) = (p2p(ShaperVariant::Zv), p2p(ShaperVariant::Zvd));
    let (zvzv, zvdzvd) = (p2p(ShaperVariant::Zvzv), p2p(ShaperVariant::Zvdzvd));
    assert!(
        zvdzvd < zvd && zvd < unshaped,
        "ordering zvdzvd < zvd < unshaped: {zvdzvd:e}, {zvd:e}, {unshaped:e}"
    );
    assert!(
        zvzv < zv && zv < unshaped,
        "ordering zvzv < zv < unshaped: {zvzv:e}, {zv:e}, {unshaped:e}"
    );
    let reduction = (1.0 - zvdzvd / unshaped) * 100.0;
    assert!(reduction >= 70.0, "zvdzvd reduction {reduction:.1}%");
    assert!(
        fixture.elapsed < Duration::from_secs(120),
        "five variants took {:?}",
        fixture.elapsed
    );
    println!(
        "PASS criterion 7: p2p [m/s] none {unshaped:.3e} > zvd {zvd:.3e} > zvdzvd {zvdzvd:.3e}; \
         none > zv {zv:.3e} > zvzv {zvzv:.3e}; zvdzvd reduction {reduction:.1}% (runs took {:?})",
        fixture.elapsed
    );
}

#[test]
fn criterion_8_simulation_numerics() {
    let model = creator_model();
    let p1 = Vector3::new(0.29, -0.047, 0.62);
    let p2 = Vector3::new(0.29, -0.047, 1.62);

    // energy drift of the undriven frictionless rig (linear springs)
    let mut cfg = SimulationConfig {
        gains: ControllerGains {
            kp: 0.0,
            kd: 0.0,
            ki: 0.0,
        },
        friction: FrictionParams::frictionless(3),
        limits: TensionLimits::default(),
        dt: 1e-4,
        duration: 2.0,
        lock_winches: true,
        bilateral_cables: true,
    };
    let (mut state, base) = equilibrium_state(&model, &Pose::at(p1), &cfg.limits).unwrap();
    state.pose.position.z += 2e-3;
    let hold = bang_bang_line(&p1, &p1, 1.9, 1e-3).unwrap();
    let trace = simulate_from(&model, &cfg, &hold, state, &base).unwrap();
    let ea = model.cable_ea();
    let energy = |r: &cdpr_core::sim::TraceRecord| {
        0.5 * model.platform_mass * r.actual_twist.linear.norm_squared()
            + r.tensions
                .iter()
                .zip(&base)
                .map(|(&tau, &l_un)| 0.5 * tau * tau * l_un / ea)
                .sum::<f64>()
            + model.platform_mass * 9.81 * r.actual_pose.position.z
    };
    let e0 = energy(&trace.records[0]);
    let (mut emin, mut emax) = (e0, e0);
    for r in &trace.records {
        let e = energy(r);
        emin = emin.min(e);
        emax = emax.max(e);
    }
    let drift = (emax - emin) / e0.abs();
    assert!(drift < 1e-3, "energy drift {drift:e}");

    // halving dt moves the final position by less than 1e-5 m
    let traj = bang_bang_line(&p1, &p2, 3.0, 1e-3).unwrap();
    cfg = SimulationConfig {
        gains: ControllerGains {
            kp: 1125.8,
            kd: 58.12,
            ki: 7269.60,
        },
        friction: FrictionParams::uniform(3, 0.14, 2.0),
        limits: TensionLimits::default(),
        dt: 1e-4,
        duration: 5.0,
        lock_winches: false,
        bilateral_cables: false,
    };
    cfg.friction.smooth = true;
    let coarse = simulate(&model, &cfg, &traj).unwrap();
    cfg.dt = 5e-5;
    let fine = simulate(&model, &cfg, &traj).unwrap();
    let dt_shift = (coarse.records.last().unwrap().actual_pose.position
        - fine.records.last().unwrap().actual_pose.position)
        .norm();
    assert!(dt_shift < 1e-5, "dt halving moved endpoint {dt_shift:e} m");

    // bit-identical reruns
    cfg.dt = 1e-4;
    cfg.friction.smooth = false;
    let a = simulate(&model, &cfg, &traj).unwrap();
    let b = simulate(&model, &cfg, &traj).unwrap();
    assert_eq!(a.records.len(), b.records.len());
    for (ra, rb) in a.records.iter().zip(&b.records) {
        assert_eq!(
            ra.actual_pose.position.map(f64::to_bits),
            rb.actual_pose.position.map(f64::to_bits)
        );
        assert_eq!(ra.velocity_error_z.to_bits(), rb.velocity_error_z.to_bits());
    }
    println!(
        "PASS criterion 8: energy drift {drift:.2e}, dt-halving shift {dt_shift:.2e} m, \
         reruns bit-identical"
    );
}

#[test]
fn criterion_9_workspace_consistency() {
    let t0 = Instant::now();
    let model = creator_model();
    let limits = TensionLimits::default();
    let grid = GridSpec::from_bounds(
        Vector3::new(-1.0, -1.2, 0.3),
        Vector3::new(1.0, 0.4, 2.0),
        [20, 20, 10],
    );
    let (i_zv, i_zvd) = computed_insensitivities();
    let zv_band = ShaperBand {
        f_m1: F_M1,
        insensitivity: i_zv,
        kind: ShaperKind::Zv,
    };
    let zvd_band = ShaperBand {
        f_m1: F_M1,
        insensitivity: i_zvd,
        kind: ShaperKind::Zvd,
    };

    let serial = frequency_field(&model, &grid, &limits).unwrap();
    let mut zv_members = 0usize;
    for &v in &serial.values {
        if v.is_nan() {
            continue;
        }
        if in_band(v, &zv_band) {
            zv_members += 1;
            assert!(in_band(v, &zvd_band), "W_zv must be inside W_zvd (f1 = {v})");
        }
    }
    assert!(zv_members > 0, "grid should intersect the ZV band");

    for band in [&zv_band, &zvd_band] {
        let (lo, hi) = band.bounds();
        assert!(robustness_index(lo, band).abs() <= 1e-9);
        assert!(robustness_index(hi, band).abs() <= 1e-9);
    }

    // parallel evaluation must serialize byte-identically for any workers
    let mut serial_bytes = Vec::new();
    write_field_binary(&mut serial_bytes, &serial).unwrap();
    for threads in [2, 5, 16] {
        let par = frequency_field_parallel(&model, &grid, &limits, threads).unwrap();
        let mut par_bytes = Vec::new();
        write_field_binary(&mut par_bytes, &par).unwrap();
        assert_eq!(serial_bytes, par_bytes, "threads = {threads}");
    }
    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    println!(
        "PASS criterion 9: 20x20x10 field ({} masked), W_zv subset of W_zvd ({zv_members} members), \
         edge nu = 0, parallel runs byte-identical in {elapsed:?}",
        serial.masked_count()
    );
}

#[test]
fn criterion_10_reference_constants_in_reports() {
    use cdpr_core::sim::reference as gold;
    assert_eq!(gold::PEAK_TO_PEAK_UNSHAPED, 0.0097);
    assert_eq!(gold::PEAK_TO_PEAK_ZV, 0.0061);
    assert_eq!(gold::PEAK_TO_PEAK_ZVD, 0.0045);
    assert_eq!(gold::PEAK_TO_PEAK_ZVZV, 0.0056);
    assert_eq!(gold::PEAK_TO_PEAK_ZVDZVD, 0.0028);
    assert_eq!(gold::MAX_TORQUE_REDUCTION_PCT, 25.71);

    let fixture = compare_runs();
    let report = build_report(&fixture.runs, fixture.ls.scenario.trajectory.tf);
    let table = render_table(&report);
    for needle in ["0.0097", "0.0061", "0.0045", "0.0056", "0.0028", "25.71"] {
        assert!(table.contains(needle), "table lacks {needle}:\n{table}");
    }
    assert!(table.contains("context only"));
    // simulated values appear beside the reference column
    for row in &report.rows {
        assert!(row.peak_to_peak_mps > 0.0);
        assert!(row.prototype_peak_to_peak_mps > 0.0);
    }
    println!("PASS criterion 10: prototype reference constants ship in compare reports, flagged as context-only");
}
