//! Scenario files and batch runs.
//!
//! A scenario is a JSON document naming the mechanism, its masses, one
//! platform move and the planning modes to run. A run writes one CSV per mode
//! plus `summary.txt` and `summary.json` into the output directory. Output is
//! a pure function of the config: no timestamps, fixed number formatting.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{self, DynamicsSample, ShakingSummary};
use crate::geometry::{self, ConfigIndex, GeometryParams, PlatformPose};
use crate::mass_model::{com_of_pose, MassParams};
use crate::par::{self, Execution};
use crate::planner::{self, PlanMode, PlanRequest, Trajectory, MIN_STEPS};

/// Column header of every per-mode CSV file.
pub const CSV_HEADER: [&str; 18] = [
    "t", "p_x", "p_y", "p_z", "ρ_x", "ρ_y", "ρ_z", "S_x", "S_y", "S_z", "Fsh_x", "Fsh_y", "Fsh_z",
    "|Fsh|", "Msh_x", "Msh_y", "Msh_z", "|Msh|",
];

pub const SUMMARY_TEXT: &str = "summary.txt";
pub const SUMMARY_JSON: &str = "summary.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(rename = "L")]
    pub leg_length: f64,
    #[serde(rename = "l")]
    pub slider_offset: f64,
    pub s_x: f64,
    pub s_y: f64,
    pub s_z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassConfig {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub p_i: [f64; 3],
    pub p_f: [f64; 3],
    pub t_f: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub geometry: GeometryConfig,
    pub masses: MassConfig,
    pub trajectory: TrajectoryConfig,
    pub modes: Vec<PlanMode>,
    pub output_dir: PathBuf,
}

impl ScenarioConfig {
    /// The LS2N prototype moving from home to (−0.1, 0.07, −0.11) m in 1 s.
    pub fn prototype() -> Self {
        Self {
            geometry: GeometryConfig {
                leg_length: 0.31,
                slider_offset: 0.1,
                s_x: 1.0,
                s_y: 1.0,
                s_z: 1.0,
            },
            masses: MassConfig {
                m1: 0.396,
                m2: 0.248,
                m3: 0.905,
            },
            trajectory: TrajectoryConfig {
                p_i: [0.0, 0.0, 0.0],
                p_f: [-0.1, 0.07, -0.11],
                t_f: 1.0,
                dt: 0.001,
            },
            modes: PlanMode::ALL.to_vec(),
            output_dir: PathBuf::from("out"),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ScenarioError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// One violated config invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// A config that passed [`validate_config`], converted to domain types.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidScenario {
    pub geometry: GeometryParams,
    pub masses: MassParams,
    pub start: PlatformPose,
    pub end: PlatformPose,
    pub duration: f64,
    pub dt: f64,
    pub modes: Vec<PlanMode>,
    pub output_dir: PathBuf,
}

impl ValidScenario {
    pub fn request(&self, mode: PlanMode) -> PlanRequest {
        PlanRequest {
            start: self.start,
            end: self.end,
            duration: self.duration,
            dt: self.dt,
            mode,
            geometry: self.geometry,
            masses: self.masses,
        }
    }
}

fn finite_positive(out: &mut Vec<Violation>, field: &str, v: f64) {
    if !(v.is_finite() && v > 0.0) {
        out.push(Violation::new(field, format!("must be > 0, got {v}")));
    }
}

fn finite_nonnegative(out: &mut Vec<Violation>, field: &str, v: f64) {
    if !(v.is_finite() && v >= 0.0) {
        out.push(Violation::new(field, format!("must be >= 0, got {v}")));
    }
}

/// Checks every invariant and reports all violations at once.
pub fn validate_config(cfg: &ScenarioConfig) -> Result<ValidScenario, Vec<Violation>> {
    let mut v = Vec::new();

    let geo = &cfg.geometry;
    finite_positive(&mut v, "geometry.L", geo.leg_length);
    finite_nonnegative(&mut v, "geometry.l", geo.slider_offset);
    let mut config = [ConfigIndex::Plus; 3];
    for (i, (name, s)) in [("s_x", geo.s_x), ("s_y", geo.s_y), ("s_z", geo.s_z)]
        .into_iter()
        .enumerate()
    {
        match ConfigIndex::from_sign(s) {
            Some(c) => config[i] = c,
            None => v.push(Violation::new(
                format!("geometry.{name}"),
                format!("{name} must be ±1"),
            )),
        }
    }

    let m = &cfg.masses;
    finite_nonnegative(&mut v, "masses.m1", m.m1);
    finite_nonnegative(&mut v, "masses.m2", m.m2);
    finite_nonnegative(&mut v, "masses.m3", m.m3);
    if 3.0 * (m.m1 + m.m2) + m.m3 <= 0.0 {
        v.push(Violation::new("masses", "total moving mass must be > 0"));
    }

    let tr = &cfg.trajectory;
    finite_positive(&mut v, "trajectory.t_f", tr.t_f);
    finite_positive(&mut v, "trajectory.dt", tr.dt);
    if tr.t_f.is_finite()
        && tr.t_f > 0.0
        && tr.dt.is_finite()
        && tr.dt > 0.0
        && planner::time_grid(tr.t_f, tr.dt).is_err()
    {
        v.push(Violation::new(
            "trajectory.dt",
            format!("dt too large: need ≥ {MIN_STEPS} samples"),
        ));
    }
    for (name, p) in [("trajectory.p_i", tr.p_i), ("trajectory.p_f", tr.p_f)] {
        if p.iter().any(|c| !c.is_finite()) {
            v.push(Violation::new(name, "coordinates must be finite"));
        }
    }

    if cfg.modes.is_empty() {
        v.push(Violation::new("modes", "at least one mode is required"));
    }
    let mut seen = HashSet::new();
    for mode in &cfg.modes {
        if !seen.insert(*mode) {
            v.push(Violation::new("modes", format!("{mode} listed twice")));
        }
    }
    if cfg.output_dir.as_os_str().is_empty() {
        v.push(Violation::new("output_dir", "must not be empty"));
    }

    let geometry = GeometryParams::new(geo.leg_length, geo.slider_offset, config);
    let masses = MassParams::new(m.m1, m.m2, m.m3);
    let start = PlatformPose::new(tr.p_i[0], tr.p_i[1], tr.p_i[2]);
    let end = PlatformPose::new(tr.p_f[0], tr.p_f[1], tr.p_f[2]);

    if let Ok(g) = &geometry {
        for (name, p) in [("trajectory.p_i", &start), ("trajectory.p_f", &end)] {
            if p.0.iter().all(|c| c.is_finite()) {
                if let Err(e) = geometry::is_feasible(p, g).check() {
                    v.push(Violation::new(name, e.to_string()));
                }
            }
        }
    }

    match (geometry, masses) {
        (Ok(geometry), Ok(masses)) if v.is_empty() => Ok(ValidScenario {
            geometry,
            masses,
            start,
            end,
            duration: tr.t_f,
            dt: tr.dt,
            modes: cfg.modes.clone(),
            output_dir: cfg.output_dir.clone(),
        }),
        _ => Err(v),
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read config: {0}")]
    Parse(String),

    #[error("invalid config:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Violation>),

    #[error("{mode}: {source}")]
    Planning {
        mode: PlanMode,
        source: crate::Error,
    },

    #[error("cannot write {}: {message}", path.display())]
    Output { path: PathBuf, message: String },
}

impl ScenarioError {
    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Parse(_) | ScenarioError::Invalid(_) => 1,
            ScenarioError::Planning { .. } | ScenarioError::Output { .. } => 2,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Replaces `output_dir` from the config.
    pub output_dir: Option<PathBuf>,
    /// Replaces `modes` from the config.
    pub modes: Option<Vec<PlanMode>>,
    pub execution: Execution,
}

/// One planned and evaluated mode.
#[derive(Debug, Clone)]
pub struct CaseResult {
    pub trajectory: Trajectory,
    pub series: Vec<DynamicsSample>,
    pub summary: ShakingSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseReport {
    pub mode: PlanMode,
    pub csv: String,
    pub samples: usize,
    pub max_newton_iterations: usize,
    #[serde(flatten)]
    pub summary: ShakingSummary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Reductions {
    pub force_reduction_percent: f64,
    pub moment_reduction_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryReport {
    pub total_mass: f64,
    pub com_start: [f64; 3],
    pub com_end: [f64; 3],
    pub com_displacement: f64,
    pub duration: f64,
    pub dt: f64,
    pub cases: Vec<CaseReport>,
    /// Present when both modes ran.
    pub comparison: Option<Reductions>,
}

pub fn evaluate_mode(
    scenario: &ValidScenario,
    mode: PlanMode,
) -> Result<CaseResult, ScenarioError> {
    let wrap = |source| ScenarioError::Planning { mode, source };
    let trajectory = planner::plan(&scenario.request(mode)).map_err(wrap)?;
    let series = dynamics::shaking_series(&trajectory, &scenario.geometry, &scenario.masses)
        .map_err(wrap)?;
    let summary = dynamics::summarize(&series);
    Ok(CaseResult {
        trajectory,
        series,
        summary,
    })
}

/// Plans and evaluates every requested mode, in the order given.
pub fn evaluate(
    scenario: &ValidScenario,
    modes: &[PlanMode],
    exec: Execution,
) -> Result<Vec<(PlanMode, CaseResult)>, ScenarioError> {
    par::map(exec, modes, |&mode| {
        evaluate_mode(scenario, mode).map(|c| (mode, c))
    })
    .into_iter()
    .collect()
}

fn num(v: f64) -> String {
    // Adding 0.0 folds −0 into +0.
    format!("{:.14e}", v + 0.0)
}

pub fn csv_file_name(mode: PlanMode) -> String {
    format!("{mode}.csv")
}

/// Writes the per-sample time series of one mode.
pub fn write_csv(path: &Path, case: &CaseResult) -> Result<(), ScenarioError> {
    let err = |e: csv::Error| ScenarioError::Output {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    w.write_record(CSV_HEADER).map_err(err)?;
    for (s, d) in case.trajectory.samples.iter().zip(&case.series) {
        let mut row = Vec::with_capacity(CSV_HEADER.len());
        row.push(num(s.t));
        row.extend(s.pose.0.iter().map(|v| num(*v)));
        row.extend(s.joints.0.iter().map(|v| num(*v)));
        row.extend(s.com.0.iter().map(|v| num(*v)));
        row.extend(d.force.iter().map(|v| num(*v)));
        row.push(num(d.force_norm()));
        row.extend(d.moment.iter().map(|v| num(*v)));
        row.push(num(d.moment_norm()));
        w.write_record(&row).map_err(err)?;
    }
    w.flush().map_err(|e| ScenarioError::Output {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn render_text(report: &SummaryReport) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "Orthoglide shaking-force summary");
    let _ = writeln!(out, "total moving mass      {:.6} kg", report.total_mass);
    let _ = writeln!(
        out,
        "COM start              ({:.7}, {:.7}, {:.7}) m",
        report.com_start[0], report.com_start[1], report.com_start[2]
    );
    let _ = writeln!(
        out,
        "COM end                ({:.7}, {:.7}, {:.7}) m",
        report.com_end[0], report.com_end[1], report.com_end[2]
    );
    let _ = writeln!(
        out,
        "COM displacement |D|   {:.9} m",
        report.com_displacement
    );
    let _ = writeln!(
        out,
        "duration / step        {} s / {} s",
        report.duration, report.dt
    );
    for case in &report.cases {
        let s = &case.summary;
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "[{}]  ({} samples, file {})",
            case.mode, case.samples, case.csv
        );
        let _ = writeln!(
            out,
            "  peak |Fsh|   {:.6} N at t = {:.4} s",
            s.peak_force, s.peak_force_time
        );
        let _ = writeln!(out, "  RMS  |Fsh|   {:.6} N", s.rms_force);
        let _ = writeln!(
            out,
            "  peak |Msh|   {:.6} N·m at t = {:.4} s",
            s.peak_moment, s.peak_moment_time
        );
        let _ = writeln!(out, "  RMS  |Msh|   {:.6} N·m", s.rms_moment);
        if case.max_newton_iterations > 0 {
            let _ = writeln!(
                out,
                "  max Newton iterations per waypoint  {}",
                case.max_newton_iterations
            );
        }
    }
    if let Some(c) = &report.comparison {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "peak shaking force reduction   {:.2} %",
            c.force_reduction_percent
        );
        let _ = writeln!(
            out,
            "peak shaking moment reduction  {:.2} %",
            c.moment_reduction_percent
        );
    }
    out
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub output_dir: PathBuf,
    pub summary: SummaryReport,
    pub cases: Vec<(PlanMode, CaseResult)>,
}

/// Validates, plans, evaluates and writes all artifacts.
pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunReport, ScenarioError> {
    let mut scenario = validate_config(cfg).map_err(ScenarioError::Invalid)?;
    if let Some(dir) = &opts.output_dir {
        scenario.output_dir = dir.clone();
    }
    if let Some(modes) = &opts.modes {
        scenario.modes = modes.clone();
    }
    let dir = scenario.output_dir.clone();

    let cases = evaluate(&scenario, &scenario.modes, opts.execution)?;

    let com_start =
        com_of_pose(&scenario.start, &scenario.geometry, &scenario.masses).map_err(|source| {
            ScenarioError::Planning {
                mode: scenario.modes[0],
                source,
            }
        })?;
    let com_end =
        com_of_pose(&scenario.end, &scenario.geometry, &scenario.masses).map_err(|source| {
            ScenarioError::Planning {
                mode: scenario.modes[0],
                source,
            }
        })?;

    let find = |mode| cases.iter().find(|(m, _)| *m == mode).map(|(_, c)| c);
    let comparison = match (
        find(PlanMode::PlatformLineQuintic),
        find(PlanMode::ComLineBangbang),
    ) {
        (Some(u), Some(b)) => {
            let cmp = dynamics::compare(
                &u.trajectory,
                &b.trajectory,
                &scenario.geometry,
                &scenario.masses,
            )
            .map_err(|source| ScenarioError::Planning {
                mode: PlanMode::ComLineBangbang,
                source,
            })?;
            Some(Reductions {
                force_reduction_percent: cmp.force_reduction_percent,
                moment_reduction_percent: cmp.moment_reduction_percent,
            })
        }
        _ => None,
    };

    let summary = SummaryReport {
        total_mass: scenario.masses.total(),
        com_start: com_start.0.into(),
        com_end: com_end.0.into(),
        com_displacement: (com_end.0 - com_start.0).norm(),
        duration: scenario.duration,
        dt: scenario.dt,
        cases: cases
            .iter()
            .map(|(mode, c)| CaseReport {
                mode: *mode,
                csv: csv_file_name(*mode),
                samples: c.trajectory.len(),
                max_newton_iterations: c.trajectory.max_iterations(),
                summary: c.summary,
            })
            .collect(),
        comparison,
    };

    let io_err = |path: &Path, e: std::io::Error| ScenarioError::Output {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    for (mode, case) in &cases {
        write_csv(&dir.join(csv_file_name(*mode)), case)?;
    }
    let text_path = dir.join(SUMMARY_TEXT);
    fs::write(&text_path, render_text(&summary)).map_err(|e| io_err(&text_path, e))?;
    let json_path = dir.join(SUMMARY_JSON);
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
    fs::write(&json_path, json).map_err(|e| io_err(&json_path, e))?;

    Ok(RunReport {
        output_dir: dir,
        summary,
        cases,
    })
}
