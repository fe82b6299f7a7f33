//! Exit criteria for the prototype scenario, one line per criterion.
//!
//! Run with `cargo test -p orthoglide-balance --test acceptance -- --nocapture`
//! to see the report.

use std::time::{Duration, Instant};

use orthoglide_balance::batch;
use orthoglide_balance::dynamics;
use orthoglide_balance::geometry::{self, GeometryParams, PlatformPose};
use orthoglide_balance::mass_model::MassParams;
use orthoglide_balance::par::Execution;
use orthoglide_balance::planner::{self, PlanMode, PlanRequest};
use orthoglide_balance::profiles::{
    self, line_trajectory, peak_acceleration, LineSegment3, ProfileKind, ProfileSpec,
};
use orthoglide_balance::scenario::{self, RunOptions, ScenarioConfig};
use orthoglide_balance::Vec3;

const SEED: u64 = 0x0b1a_5eed;
const POSES: usize = 1000;
/// Smallest radicand of the random poses, as a fraction of L².
const POSE_MARGIN: f64 = 0.01;

/// COM of the prototype at a feasible pose, written out scalar by scalar
/// without the library: S_i = [s(m1/2 + m2)√r_i + (2m1 + m2 + m3)p_i + m2 l] / M.
fn oracle_com(p: [f64; 3]) -> [f64; 3] {
    let (l_leg, l_off, m1, m2, m3) = (0.31f64, 0.1, 0.396, 0.248, 0.905);
    let total = 3.0 * (m1 + m2) + m3;
    let r = [
        l_leg * l_leg - p[1] * p[1] - p[2] * p[2],
        l_leg * l_leg - p[0] * p[0] - p[2] * p[2],
        l_leg * l_leg - p[0] * p[0] - p[1] * p[1],
    ];
    [0, 1, 2]
        .map(|i| ((m1 / 2.0 + m2) * r[i].sqrt() + (2.0 * m1 + m2 + m3) * p[i] + m2 * l_off) / total)
}

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within_runtime(start: Instant, limit: Duration, mut out: Outcome) -> Outcome {
    let took = start.elapsed();
    out.detail = format!(
        "{} [{:.0} ms, limit {} ms]",
        out.detail,
        took.as_secs_f64() * 1e3,
        limit.as_millis()
    );
    out.pass &= took < limit;
    out
}

fn ik_regression() -> Outcome {
    let g = GeometryParams::prototype();
    let home = geometry::inverse_kinematics(&PlatformPose::origin(), &g).unwrap();
    let fin = geometry::inverse_kinematics(&PlatformPose::new(-0.1, 0.07, -0.11), &g).unwrap();
    let expected = Vec3::new(0.1812472, 0.3420294, 0.1749561);
    let err = (fin.0 - expected).amax();
    check(
        home.0 == Vec3::repeat(0.31) && err <= 1e-6,
        format!(
            "home {:?}, final error {err:.2e} m (tol 1e-6)",
            home.0.as_slice()
        ),
    )
}

fn kinematic_round_trip() -> Outcome {
    let g = GeometryParams::prototype();
    let poses = batch::sample_poses(POSES, SEED, &g, POSE_MARGIN);
    let start = Instant::now();
    let errors =
        batch::round_trip_errors(&poses, &vec![Vec3::zeros(); POSES], &g, Execution::Parallel);
    let failures = errors.iter().filter(|e| e.is_err()).count();
    let worst = errors
        .iter()
        .filter_map(|e| e.as_ref().ok())
        .fold(0.0f64, |a, b| a.max(*b));

    // From a 1 mm-perturbed guess FK may land on the other assembly mode near
    // the forward-kinematic singularity; it must still be a valid solution.
    let offsets = batch::sample_offsets(POSES, SEED + 4, 1e-3);
    let mut other_mode = 0;
    let mut worst_joint = 0.0f64;
    for (p, off) in poses.iter().zip(&offsets) {
        let rho = geometry::inverse_kinematics(p, &g).unwrap();
        if let Ok(q) = geometry::forward_kinematics(&rho, &g, &PlatformPose(p.0 + off)) {
            worst_joint =
                worst_joint.max((geometry::inverse_kinematics(&q, &g).unwrap().0 - rho.0).amax());
            if (q.0 - p.0).amax() > 1e-9 {
                other_mode += 1;
            }
        } else {
            other_mode += 1;
        }
    }
    within_runtime(
        start,
        Duration::from_secs(1),
        check(
            failures == 0 && worst <= 1e-9 && worst_joint <= 1e-9,
            format!(
                "{POSES} poses, {failures} failures, worst {worst:.2e} m (tol 1e-9); perturbed guesses: {other_mode} reached another solution, worst IK residual {worst_joint:.1e} m"
            ),
        ),
    )
}

fn com_equivalence() -> Outcome {
    let g = GeometryParams::prototype();
    let mp = MassParams::prototype();
    let poses = batch::sample_poses(POSES, SEED + 1, &g, POSE_MARGIN);
    let spread = batch::com_route_spread(&poses, &g, &mp, Execution::Parallel);
    let failures = spread.iter().filter(|e| e.is_err()).count();
    let worst = spread
        .iter()
        .filter_map(|e| e.as_ref().ok())
        .fold(0.0f64, |a, b| a.max(*b));
    check(
        failures == 0 && worst <= 1e-12,
        format!("{POSES} poses, worst route disagreement {worst:.2e} m (tol 1e-12)"),
    )
}

fn profile_constants() -> Outcome {
    let mut worst_exact = 0.0f64;
    let mut worst_grid = 0.0f64;
    for &(distance, tf) in &[
        (1.0, 1.0),
        (0.115_770_909_987_847, 1.0),
        (2.5, 0.4),
        (0.03, 3.0),
    ] {
        let bb = ProfileSpec::new(ProfileKind::BangBang, tf).unwrap();
        let q = ProfileSpec::new(ProfileKind::Quintic, tf).unwrap();
        let exact_bb = 4.0 * distance / (tf * tf);
        let exact_q = 10.0 * distance / (3f64.sqrt() * tf * tf);
        worst_exact = worst_exact
            .max(((peak_acceleration(&bb, distance) - exact_bb) / exact_bb).abs())
            .max(((peak_acceleration(&q, distance) - exact_q) / exact_q).abs());

        let n = 100_000;
        for (spec, exact) in [(bb, exact_bb), (q, exact_q)] {
            let grid = (0..=n)
                .map(|k| {
                    spec.eval(tf * k as f64 / n as f64)
                        .unwrap()
                        .acceleration
                        .abs()
                        * distance
                })
                .fold(0.0, f64::max);
            worst_grid = worst_grid.max(((grid - exact) / exact).abs());
        }
    }
    check(
        worst_exact <= 4.0 * f64::EPSILON && worst_grid <= 1e-4,
        format!("closed-form rel. error {worst_exact:.1e}, grid-max rel. error {worst_grid:.2e} (tol 1e-4)"),
    )
}

fn analytic_reduction() -> Outcome {
    let closed = profiles::bang_bang_peak_reduction() * 100.0;
    // The same figure measured on sampled straight lines.
    let seg = LineSegment3::between(Vec3::new(0.05, -0.01, 0.02), Vec3::new(-0.04, 0.06, -0.03));
    let peak = |kind| {
        let spec = ProfileSpec::new(kind, 1.0).unwrap();
        (0..=100_000)
            .map(|k| {
                line_trajectory(&seg, &spec, k as f64 / 100_000.0)
                    .unwrap()
                    .acceleration
                    .norm()
            })
            .fold(0.0, f64::max)
    };
    let sampled = (1.0 - peak(ProfileKind::BangBang) / peak(ProfileKind::Quintic)) * 100.0;
    let target = (1.0 - 4.0 * 3f64.sqrt() / 10.0) * 100.0;
    check(
        (closed - 30.72).abs() <= 0.05
            && (sampled - 30.72).abs() <= 0.05
            && (closed - target).abs() < 1e-12,
        format!("closed form {closed:.4} %, sampled {sampled:.4} % (target 30.72 ± 0.05)"),
    )
}

fn com_line_fidelity() -> Outcome {
    let start = Instant::now();
    let req = PlanRequest::prototype(PlanMode::ComLineBangbang);
    let traj = planner::plan(&req).unwrap();

    let s_i = Vec3::from(oracle_com([0.0, 0.0, 0.0]));
    let s_f = Vec3::from(oracle_com([-0.1, 0.07, -0.11]));
    let d = s_f - s_i;
    let d_norm = d.norm();
    let axis = d / d_norm;

    let transverse = traj
        .samples
        .iter()
        .map(|s| {
            let rel = s.com.0 - s_i;
            (rel - axis * rel.dot(&axis)).norm()
        })
        .fold(0.0, f64::max);

    let forces = dynamics::shaking_force_series(&traj, &req.masses).unwrap();
    let peak_accel = forces
        .iter()
        .map(|f| f.com_accel.norm())
        .fold(0.0, f64::max);
    let peak_force = forces.iter().map(|f| f.force.norm()).fold(0.0, f64::max);
    let analytic_accel = 4.0 * d_norm / (req.duration * req.duration);

    let d_ok = (d_norm - 0.115771).abs() < 5e-7;
    let accel_ok = ((peak_accel - analytic_accel) / analytic_accel).abs() <= 0.01;
    let force_ok = ((peak_force - 1.314) / 1.314).abs() <= 0.01;
    within_runtime(
        start,
        Duration::from_secs(5),
        check(
            d_ok && transverse <= 1e-8 && accel_ok && force_ok,
            format!(
                "|D| = {d_norm:.6} m, transverse {transverse:.1e} m (tol 1e-8), peak |S''| {peak_accel:.6} vs {analytic_accel:.6} m/s^2, peak |Fsh| {peak_force:.4} N (1.314 ± 1%)"
            ),
        ),
    )
}

fn end_to_end_comparison() -> Outcome {
    let cfg = ScenarioConfig::prototype();
    let valid = scenario::validate_config(&cfg).unwrap();
    let cases = scenario::evaluate(&valid, &PlanMode::ALL, Execution::Parallel).unwrap();
    let (u, b) = (&cases[0].1, &cases[1].1);
    let cmp =
        dynamics::compare(&u.trajectory, &b.trajectory, &valid.geometry, &valid.masses).unwrap();
    let f = cmp.force_reduction_percent;
    let m = cmp.moment_reduction_percent;
    check(
        (25.0..=40.0).contains(&f) && m > 0.0,
        format!(
            "force {:.4} -> {:.4} N ({f:.2} % reduction, band 25..40), moment {:.5} -> {:.5} N·m ({m:.2} %, must be > 0)",
            cmp.unbalanced.peak_force, cmp.balanced.peak_force, cmp.unbalanced.peak_moment, cmp.balanced.peak_moment
        ),
    )
}

fn solver_robustness() -> Outcome {
    let g = GeometryParams::prototype();
    let mp = MassParams::prototype();
    let poses = batch::sample_poses(POSES, SEED + 2, &g, POSE_MARGIN);
    let offsets = batch::sample_offsets(POSES, SEED + 3, 1e-3);
    let results = batch::self_inversion(&poses, &offsets, &g, &mp, Execution::Parallel);
    let failures = results.iter().filter(|r| r.is_err()).count();
    let ok: Vec<_> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
    let max_iter = ok.iter().map(|o| o.report.iterations).max().unwrap_or(0);
    let max_res = ok.iter().map(|o| o.report.residual).fold(0.0, f64::max);
    let max_err = ok.iter().map(|o| o.error).fold(0.0, f64::max);
    check(
        failures == 0 && max_res <= 1e-10 && max_iter <= 10 && max_err <= 1e-9,
        format!("{POSES} poses, {failures} failures, max residual {max_res:.1e} m, max iterations {max_iter}, max pose error {max_err:.1e} m"),
    )
}

fn grid_convergence() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for mode in PlanMode::ALL {
        let peaks = batch::peak_force_sweep(
            &PlanRequest::prototype(mode),
            &[1e-3, 5e-4],
            Execution::Parallel,
        );
        let (coarse, fine) = (*peaks[0].as_ref().unwrap(), *peaks[1].as_ref().unwrap());
        let change = ((fine - coarse) / coarse).abs() * 100.0;
        pass &= change < 0.5;
        details.push(format!(
            "{mode}: {coarse:.6} -> {fine:.6} N ({change:.4} %)"
        ));
    }
    check(pass, format!("{} (tol < 0.5 %)", details.join(", ")))
}

fn determinism() -> Outcome {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        let opts = RunOptions {
            output_dir: Some(dir.path().to_path_buf()),
            ..Default::default()
        };
        scenario::run_scenario(&ScenarioConfig::prototype(), &opts).unwrap();
    }
    let mut files: Vec<String> = PlanMode::ALL
        .iter()
        .map(|m| scenario::csv_file_name(*m))
        .collect();
    files.push(scenario::SUMMARY_TEXT.into());
    files.push(scenario::SUMMARY_JSON.into());
    let identical = files.iter().all(|f| {
        let a = std::fs::read(dirs[0].path().join(f)).unwrap();
        let b = std::fs::read(dirs[1].path().join(f)).unwrap();
        !a.is_empty() && a == b
    });
    check(
        identical,
        format!("{} files compared byte for byte", files.len()),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("1  IK regression", ik_regression),
        ("2  kinematic round trip", kinematic_round_trip),
        ("3  COM model equivalence", com_equivalence),
        ("4  profile constants", profile_constants),
        ("5  analytic reduction", analytic_reduction),
        ("6  COM-line planning fidelity", com_line_fidelity),
        ("7  end-to-end comparison", end_to_end_comparison),
        ("8  solver robustness", solver_robustness),
        ("9  grid convergence", grid_convergence),
        ("10 determinism", determinism),
    ];

    let mut failed = Vec::new();
    for (name, run) in criteria {
        let out = run();
        println!(
            "[{}] {name}: {}",
            if out.pass { "PASS" } else { "FAIL" },
            out.detail
        );
        if !out.pass {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
