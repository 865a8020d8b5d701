//! Solver pipelines behind the CLI verbs and the artifacts they write.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use curvepipe::fronttrack::{
    glimm_potential, l1_distance_window, weak_solution_residual, Bump, FrontKind, FrontTracker, InitialDatum,
    Snapshot, SourceModel, TestFunction, WeakResidual,
};
use curvepipe::refsolver::{fv_run, FvGrid};
use curvepipe::{stationary, PressureLaw, State};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{InitialSpec, PerturbationSpec, RiemannSpec, Scenario, Setup, StationarySpec};
use crate::CliError;

/// Options shared by every verb.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub out: Option<PathBuf>,
    pub level: Option<u32>,
    pub quiet: bool,
}

/// A loaded scenario with the raw bytes it came from.
pub struct Loaded {
    pub scenario: Scenario,
    pub base_dir: PathBuf,
    pub sha256: String,
    pub path: PathBuf,
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    use sha2::{Digest, Sha256};
    let bytes = std::fs::read(path).map_err(|e| CliError::Config { path: String::new(), message: format!("cannot read {}: {e}", path.display()) })?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Config { path: String::new(), message: "scenario is not UTF-8".into() })?;
    let scenario = crate::config::parse(&text)?;
    scenario.validate()?;
    let digest = Sha256::digest(&bytes);
    let sha256 = digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    });
    Ok(Loaded {
        scenario,
        base_dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        sha256,
        path: path.to_path_buf(),
    })
}

fn level(loaded: &Loaded, opts: &Options) -> u32 {
    opts.level.unwrap_or(loaded.scenario.params.level)
}

pub fn output_dir(loaded: &Loaded, opts: &Options) -> PathBuf {
    if let Some(o) = &opts.out {
        return o.clone();
    }
    if let Some(o) = &loaded.scenario.params.output_dir {
        return loaded.base_dir.join(o);
    }
    let stem = loaded.path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "scenario".into());
    PathBuf::from("out").join(stem)
}

struct Writer {
    dir: PathBuf,
    artifacts: Vec<String>,
}

impl Writer {
    fn new(dir: PathBuf) -> Result<Self, CliError> {
        std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Writer { dir, artifacts: Vec::new() })
    }

    fn text(&mut self, name: &str, content: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, content).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    fn json(&mut self, name: &str, value: &Value) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        s.push('\n');
        self.text(name, &s)
    }

    fn csv<R: Serialize>(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(header).map_err(|e| CliError::Io(e.to_string()))?;
        for r in rows {
            w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        self.text(name, &String::from_utf8_lossy(&bytes))
    }
}

const PROFILE_HEADER: &[&str] = &["x", "rho", "q", "v", "P"];

#[derive(Serialize)]
struct ProfileRow {
    x: f64,
    rho: f64,
    q: f64,
    v: f64,
    #[serde(rename = "P")]
    big_p: f64,
}

fn row(law: &PressureLaw, x: f64, u: &State) -> ProfileRow {
    ProfileRow { x, rho: u.rho, q: u.q, v: u.velocity(), big_p: law.dynamic_pressure(u).unwrap_or(f64::NAN) }
}

/// Step-function rows of a piecewise-constant profile on `[lo, hi]`: both
/// one-sided values at each breakpoint.
fn step_rows(law: &PressureLaw, s: &Snapshot, lo: f64, hi: f64) -> Vec<ProfileRow> {
    let mut rows = vec![row(law, lo, &s.state_at(lo))];
    for (i, &x) in s.breakpoints.iter().enumerate() {
        if x > lo && x < hi {
            rows.push(row(law, x, &s.states[i]));
            rows.push(row(law, x, &s.states[i + 1]));
        }
    }
    rows.push(row(law, hi, &s.state_at(hi)));
    rows
}

fn cell_rows(law: &PressureLaw, grid: &FvGrid, s: &Snapshot) -> Vec<ProfileRow> {
    s.states.iter().enumerate().map(|(i, u)| row(law, grid.center(i), u)).collect()
}

#[derive(Serialize)]
struct EventRow {
    t: f64,
    x: f64,
    kind: &'static str,
    incoming: String,
    outgoing: String,
}

fn joined(v: &[f64]) -> String {
    v.iter().map(|s| format!("{s:e}")).collect::<Vec<_>>().join(";")
}

#[derive(Serialize)]
struct SegmentRow {
    id: u64,
    kind: &'static str,
    t0: f64,
    x0: f64,
    t1: f64,
    x1: f64,
}

const WAVE_SCRIPT: &str = "\
set datafile separator ','
set xlabel 'x'
set ylabel 't'
set key off
plot 'wave_diagram.csv' every ::1 using 4:3:($6-$4):($5-$3) with vectors nohead lw 0.5
";

/// Symmetric dyadic window containing every feature of the data and every
/// wave that can reach it before `t_end`.
fn auto_window(setup: &Setup, initial: &Snapshot, max_speed: f64) -> (f64, f64) {
    let mut span: f64 = 0.0;
    for x in initial.breakpoints.iter().chain(setup.geometry.boundaries().iter()) {
        if x.is_finite() {
            span = span.max(x.abs());
        }
    }
    let reach = span + max_speed * setup.params.t_end + 0.5;
    let k = reach.log2().ceil().max(0.0);
    let r = k.exp2();
    (-r, r)
}

fn window(loaded: &Loaded, setup: &Setup, initial: &Snapshot, lambda_np: f64) -> (f64, f64) {
    match loaded.scenario.params.window {
        Some([lo, hi]) => (lo, hi),
        None => auto_window(setup, initial, 0.5 * lambda_np),
    }
}

fn fv_grid(loaded: &Loaded, n: u32, (lo, hi): (f64, f64)) -> FvGrid {
    let per_unit = loaded.scenario.params.fv.cells_per_unit.unwrap_or(4usize << n);
    let cells = (((hi - lo) * per_unit as f64).round() as usize).max(2);
    FvGrid { lo, hi, cells, cfl: loaded.scenario.params.fv.cfl }
}

/// Result of a front-tracking run with the series needed for metrics.
struct TrackedRun {
    snapshots: Vec<Snapshot>,
    tv: Vec<f64>,
    interaction: Vec<f64>,
    mass: Vec<f64>,
    mass_drift: f64,
    junction_residual: f64,
    lambda_np: f64,
    tracker: FrontTracker,
}

fn times(setup: &Setup) -> Vec<f64> {
    let mut t = setup.params.snapshot_times.clone();
    t.push(0.0);
    t.push(setup.params.t_end);
    t.sort_by(f64::total_cmp);
    t.dedup();
    t
}

fn track(setup: &Setup, datum: &InitialDatum, n: u32) -> Result<TrackedRun, CliError> {
    let grid = setup.grid(n)?;
    let mut tracker = FrontTracker::new(&setup.law, &grid, datum, &setup.params)?;
    let (mut snapshots, mut tv, mut interaction, mut mass) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for tau in times(setup) {
        tracker.run_until(tau)?;
        let p = glimm_potential(&tracker.fronts());
        tv.push(p.moving_variation);
        interaction.push(p.interaction);
        mass.push(tracker.mass());
        snapshots.push(tracker.snapshot());
    }
    let junction_residual = tracker
        .fronts()
        .iter()
        .filter_map(|f| match f.kind {
            FrontKind::Zero { junction, .. } => Some(junction.residual(&setup.law, &f.left, &f.right).abs()),
            _ => None,
        })
        .fold(0.0, f64::max);
    Ok(TrackedRun {
        snapshots,
        tv,
        interaction,
        mass,
        mass_drift: tracker.mass_drift(),
        junction_residual,
        lambda_np: tracker.lambda_np(),
        tracker,
    })
}

fn initial_profile(setup: &Setup, datum: &InitialDatum, n: u32) -> Result<(Snapshot, f64), CliError> {
    let grid = setup.grid(n)?;
    let tracker = FrontTracker::new(&setup.law, &grid, datum, &setup.params)?;
    Ok((tracker.snapshot(), tracker.lambda_np()))
}

/// Same datum with a density perturbation of size `delta` near the middle
/// of the window.
fn perturbed(datum: &InitialDatum, delta: f64, (lo, hi): (f64, f64)) -> InitialDatum {
    let center = 0.5 * (lo + hi);
    let half = 0.125 * (hi - lo);
    let bump = Bump { center, half_width: half, rho: delta, q: 0.0 };
    match datum {
        InitialDatum::Stationary { left } => InitialDatum::StationaryPerturbation { left: *left, bumps: vec![bump] },
        InitialDatum::StationaryPerturbation { left, bumps } => {
            let mut bumps = bumps.clone();
            bumps.push(bump);
            InitialDatum::StationaryPerturbation { left: *left, bumps }
        }
        InitialDatum::Riemann { x0, left, right } => perturbed(
            &InitialDatum::Piecewise { breakpoints: vec![*x0], states: vec![*left, *right] },
            delta,
            (lo, hi),
        ),
        InitialDatum::Piecewise { breakpoints, states } => {
            let (a, b) = (center - half, center + half);
            let mut bps: Vec<f64> = breakpoints.iter().copied().chain([a, b]).collect();
            bps.sort_by(f64::total_cmp);
            bps.dedup();
            let profile = Snapshot { t: 0.0, breakpoints: breakpoints.clone(), states: states.clone() };
            let states = (0..=bps.len())
                .map(|i| {
                    let probe = match i {
                        0 => bps[0] - 1.0,
                        i if i == bps.len() => bps[i - 1] + 1.0,
                        i => 0.5 * (bps[i - 1] + bps[i]),
                    };
                    let mut u = profile.state_at(probe);
                    if probe > a && probe < b {
                        u.rho += delta;
                    }
                    u
                })
                .collect();
            InitialDatum::Piecewise { breakpoints: bps, states }
        }
    }
}

fn residual_json(r: &WeakResidual) -> Value {
    json!({
        "mass": r.mass,
        "momentum": r.momentum,
        "entropy_production": r.entropy_production,
        "entropy_production_all": r.entropy_production_all,
    })
}

fn manifest(loaded: &Loaded, command: &str, n: u32, artifacts: &[String]) -> Value {
    let p = &loaded.scenario.params;
    json!({
        "command": command,
        "config": loaded.path.file_name().map(|s| s.to_string_lossy().into_owned()),
        "config_sha256": loaded.sha256,
        "versions": {"curvepipe": curvepipe::VERSION, "curvepipe-cli": env!("CARGO_PKG_VERSION")},
        "solver": loaded.scenario.solver,
        "level": n,
        "seed": loaded.scenario.seed,
        "tolerances": {
            "eps_rarefaction": p.eps_rarefaction,
            "eps_nonphysical": p.eps_nonphysical,
            "delta_domain": p.delta_domain,
            "tv_cap_factor": p.tv_cap_factor,
            "fv_cfl": p.fv.cfl,
        },
        "artifacts": artifacts,
    })
}

/// Writes the diagnostics file and manifest after a failed solve.
pub fn record_failure(loaded: &Loaded, opts: &Options, command: &str, err: &CliError) {
    if matches!(err, CliError::Config { .. }) {
        return;
    }
    let Ok(mut w) = Writer::new(output_dir(loaded, opts)) else { return };
    let text = format!("command: {command}\nexit code: {}\nerror: {err}\n", err.exit_code());
    let _ = w.text("diagnostics.txt", &text);
    let artifacts = w.artifacts.clone();
    let _ = w.json("manifest.json", &manifest(loaded, command, level(loaded, opts), &artifacts));
}

/// `run`: evolves the scenario and writes every artifact. Returns the
/// summary.
pub fn run(loaded: &Loaded, opts: &Options) -> Result<Value, CliError> {
    let n = level(loaded, opts);
    let setup = loaded.scenario.setup(&loaded.base_dir, true)?;
    let solver = loaded.scenario.solver;
    let (initial, lambda_np) = initial_profile(&setup, &setup.datum, n)?;
    let win = window(loaded, &setup, &initial, lambda_np);
    let mut w = Writer::new(output_dir(loaded, opts))?;
    let mut summary = json!({
        "command": "run",
        "status": "ok",
        "solver": solver,
        "level": n,
        "t_end": setup.params.t_end,
        "window": [win.0, win.1],
    });
    let mut metrics = json!({});
    let mut ft_final = None;

    if solver.front_tracking() {
        let tracked = track(&setup, &setup.datum, n)?;
        let mut snaps = Vec::new();
        for (i, s) in tracked.snapshots.iter().enumerate() {
            let name = format!("fronttrack_snapshot_{i:03}.csv");
            w.csv(&name, PROFILE_HEADER, step_rows(&setup.law, s, win.0, win.1))?;
            snaps.push(json!({"t": s.t, "file": name}));
        }
        let events = tracked.tracker.events().iter().map(|e| EventRow {
            t: e.t,
            x: e.x,
            kind: e.kind,
            incoming: joined(&e.incoming),
            outgoing: joined(&e.outgoing),
        });
        w.csv("events.csv", &["t", "x", "kind", "incoming", "outgoing"], events)?;
        let history = tracked.tracker.history();
        w.csv(
            "wave_diagram.csv",
            &["id", "kind", "t0", "x0", "t1", "x1"],
            history.iter().map(|s| SegmentRow {
                id: s.front.id,
                kind: s.front.kind.label(),
                t0: s.front.t0,
                x0: s.front.position(s.front.t0),
                t1: s.t_end,
                x1: s.front.position(s.t_end),
            }),
        )?;
        w.text("wave_diagram.gp", WAVE_SCRIPT)?;

        let t_end = setup.params.t_end;
        let (discrete, continuous) = if history.is_empty() {
            // Constant solution: every residual vanishes.
            let zero = WeakResidual { mass: 0.0, momentum: 0.0, entropy_production: 0.0, entropy_production_all: 0.0 };
            (residual_json(&zero), residual_json(&zero))
        } else if t_end > 0.0 {
            let test = TestFunction {
                t_center: 0.5 * t_end,
                t_half: 0.45 * t_end,
                x_center: 0.5 * (win.0 + win.1),
                x_half: 0.45 * (win.1 - win.0),
            };
            let d = weak_solution_residual(&setup.law, &history, &test, SourceModel::Discrete)?;
            let c = weak_solution_residual(
                &setup.law,
                &history,
                &test,
                SourceModel::Continuous { geometry: &setup.geometry, coeffs: &setup.coeffs },
            )?;
            (residual_json(&d), residual_json(&c))
        } else {
            (Value::Null, Value::Null)
        };

        let lipschitz = match loaded.scenario.params.lipschitz_delta {
            Some(delta) => {
                let other = perturbed(&setup.datum, delta, win);
                let (other_initial, _) = initial_profile(&setup, &other, n)?;
                let d0 = l1_distance_window(&initial, &other_initial, win.0, win.1);
                let moved = track(&setup, &other, n)?;
                let a = tracked.snapshots.last().expect("final snapshot");
                let b = moved.snapshots.last().expect("final snapshot");
                let d1 = l1_distance_window(a, b, win.0, win.1);
                json!({"delta": delta, "initial_l1": d0, "final_l1": d1, "ratio": if d0 > 0.0 { d1 / d0 } else { f64::NAN }})
            }
            None => Value::Null,
        };

        let stats = tracked.tracker.stats();
        metrics["fronttrack"] = json!({
            "times": tracked.snapshots.iter().map(|s| s.t).collect::<Vec<_>>(),
            "total_variation": tracked.tv,
            "interaction_potential": tracked.interaction,
            "mass": tracked.mass,
            "mass_drift": tracked.mass_drift,
            "junction_residual": tracked.junction_residual,
            "weak_residual_discrete": discrete,
            "weak_residual_continuous": continuous,
            "lipschitz": lipschitz,
        });
        summary["fronttrack"] = json!({
            "snapshots": snaps,
            "lambda_np": tracked.lambda_np,
            "fronts_final": tracked.tracker.fronts().len(),
            "interactions": stats.interactions,
            "simplified": stats.simplified,
            "max_fronts": stats.max_fronts,
            "fronts_created": stats.fronts_created,
            "mass_drift": tracked.mass_drift,
        });
        ft_final = tracked.snapshots.last().cloned();
    }

    if solver.finite_volume() {
        let grid = fv_grid(loaded, n, win);
        let u0 = grid.averages_of(&initial);
        let snap_times: Vec<f64> = times(&setup);
        let out = fv_run(&setup.law, &setup.geometry, &setup.coeffs, &grid, u0, setup.params.t_end, &snap_times)?;
        let mut snaps = Vec::new();
        for (i, s) in out.iter().enumerate() {
            let name = format!("fv_snapshot_{i:03}.csv");
            w.csv(&name, PROFILE_HEADER, cell_rows(&setup.law, &grid, s))?;
            snaps.push(json!({"t": s.t, "file": name}));
        }
        let h = grid.spacing();
        let mass: Vec<f64> = out.iter().map(|s| s.states.iter().map(|u| u.rho).sum::<f64>() * h).collect();
        let tv: Vec<f64> = out.iter().map(Snapshot::total_variation).collect();
        let fv_final = out.last().expect("final snapshot");
        let mut fv_metrics = json!({"times": out.iter().map(|s| s.t).collect::<Vec<_>>(), "total_variation": tv, "mass": mass});
        if let Some(ft) = &ft_final {
            fv_metrics["l1_to_fronttrack"] = json!(l1_distance_window(ft, fv_final, win.0, win.1));
        }
        metrics["fv"] = fv_metrics;
        summary["fv"] = json!({"cells": grid.cells, "cfl": grid.cfl, "snapshots": snaps});
    }

    w.json("metrics.json", &metrics)?;
    summary["metrics"] = metrics;
    w.json("summary.json", &summary)?;
    let artifacts = w.artifacts.clone();
    w.json("manifest.json", &manifest(loaded, "run", n, &artifacts))?;
    Ok(summary)
}

#[derive(Serialize)]
struct ConvergenceRow {
    level: u32,
    next_level: Option<u32>,
    l1_to_next: Option<f64>,
    ratio: Option<f64>,
    l1_to_fv: Option<f64>,
}

/// `converge`: runs the level cascade in parallel and tabulates distances
/// between successive levels.
pub fn converge(loaded: &Loaded, opts: &Options) -> Result<Value, CliError> {
    let setup = loaded.scenario.setup(&loaded.base_dir, false)?;
    let mut levels = loaded.scenario.params.levels.clone();
    if levels.is_empty() {
        levels = vec![3, 4, 5, 6];
    }
    levels.sort_unstable();
    levels.dedup();
    let coarsest = levels[0];
    let (initial, lambda_np) = initial_profile(&setup, &setup.datum, coarsest)?;
    let win = window(loaded, &setup, &initial, lambda_np);
    let with_fv = loaded.scenario.solver.finite_volume();
    let finals: Vec<(Snapshot, Option<Snapshot>)> = levels
        .par_iter()
        .map(|&n| -> Result<_, CliError> {
            let ft = track(&setup, &setup.datum, n)?.snapshots.pop().expect("final snapshot");
            let fv = if with_fv {
                let (init, _) = initial_profile(&setup, &setup.datum, n)?;
                let grid = fv_grid(loaded, n, win);
                let u0 = grid.averages_of(&init);
                fv_run(&setup.law, &setup.geometry, &setup.coeffs, &grid, u0, setup.params.t_end, &[])?.pop()
            } else {
                None
            };
            Ok((ft, fv))
        })
        .collect::<Result<_, _>>()?;
    let dist: Vec<f64> = finals.windows(2).map(|p| l1_distance_window(&p[0].0, &p[1].0, win.0, win.1)).collect();
    let rows: Vec<ConvergenceRow> = levels
        .iter()
        .enumerate()
        .map(|(i, &level)| ConvergenceRow {
            level,
            next_level: levels.get(i + 1).copied(),
            l1_to_next: dist.get(i).copied(),
            ratio: (i > 0 && i < dist.len()).then(|| dist[i - 1] / dist[i]),
            l1_to_fv: finals[i].1.as_ref().map(|fv| l1_distance_window(&finals[i].0, fv, win.0, win.1)),
        })
        .collect();
    let mut w = Writer::new(output_dir(loaded, opts))?;
    let summary = json!({
        "command": "converge",
        "status": "ok",
        "levels": levels,
        "window": [win.0, win.1],
        "l1_successive": dist,
        "table": "convergence.csv",
    });
    w.csv("convergence.csv", &["level", "next_level", "l1_to_next", "ratio", "l1_to_fv"], rows)?;
    w.json("summary.json", &summary)?;
    let artifacts = w.artifacts.clone();
    w.json("manifest.json", &manifest(loaded, "converge", coarsest, &artifacts))?;
    Ok(summary)
}

/// `stationary`: builds the exact and the discrete stationary profile for
/// the far-left state of the scenario.
pub fn stationary_profile(loaded: &Loaded, opts: &Options) -> Result<Value, CliError> {
    let n = level(loaded, opts);
    let setup = loaded.scenario.setup(&loaded.base_dir, false)?;
    let left: State = match &loaded.scenario.initial {
        InitialSpec::Riemann(RiemannSpec { left, .. })
        | InitialSpec::Stationary(StationarySpec { left })
        | InitialSpec::StationaryPerturbation(PerturbationSpec { left, .. }) => (*left).into(),
        InitialSpec::File(_) => match &setup.datum {
            InitialDatum::Piecewise { states, .. } => states[0],
            _ => unreachable!("file data are piecewise"),
        },
    };
    let profile = stationary::build(&setup.law, &setup.geometry, &setup.coeffs, left.q, left.rho)?;
    let residuals = profile.residuals(&setup.law, &setup.geometry, &setup.coeffs);
    let grid = setup.grid(n)?;
    let discrete = InitialDatum::Stationary { left };
    let (snap, lambda_np) = initial_profile(&setup, &discrete, n)?;
    let win = window(loaded, &setup, &snap, lambda_np);
    let mut w = Writer::new(output_dir(loaded, opts))?;
    w.text("stationary_profile.csv", &profile.to_csv(&setup.law))?;
    w.text("source_grid.csv", &grid.to_csv())?;
    w.csv("stationary_discrete.csv", PROFILE_HEADER, step_rows(&setup.law, &snap, win.0, win.1))?;
    let summary = json!({
        "command": "stationary",
        "status": "ok",
        "level": n,
        "q": profile.q(),
        "rho_left": profile.rho_at_left_infinity(),
        "rho_right": profile.rho_at_right_infinity(),
        "residuals": {"ode": residuals.ode, "jump": residuals.jump},
        "source_points": grid.points.len(),
    });
    w.json("summary.json", &summary)?;
    let artifacts = w.artifacts.clone();
    w.json("manifest.json", &manifest(loaded, "stationary", n, &artifacts))?;
    Ok(summary)
}

/// `validate`: schema, physical parameters, geometry and source grid.
pub fn validate(loaded: &Loaded, opts: &Options) -> Result<Value, CliError> {
    let n = level(loaded, opts);
    let setup = loaded.scenario.setup(&loaded.base_dir, false)?;
    let grid = setup.grid(n)?;
    setup.params.validate().map_err(|e| CliError::Config { path: "params".into(), message: e.to_string() })?;
    Ok(json!({"command": "validate", "status": "ok", "level": n, "source_points": grid.points.len()}))
}

#[cfg(test)]
mod tests {
    use super::*;
    use curvepipe::fronttrack::SolverParams;
    use curvepipe::geometry::{PipeGeometry, SourceCoefficients};

    #[test]
    fn perturbation_changes_only_the_window_middle() {
        let d = InitialDatum::Riemann { x0: -3.0, left: State { rho: 1.0, q: 0.0 }, right: State { rho: 2.0, q: 0.0 } };
        let InitialDatum::Piecewise { breakpoints, states } = perturbed(&d, 0.01, (-4.0, 4.0)) else { panic!() };
        assert_eq!(breakpoints, vec![-3.0, -1.0, 1.0]);
        assert_eq!(states.iter().map(|u| u.rho).collect::<Vec<_>>(), vec![1.0, 2.0, 2.01, 2.0]);
    }

    #[test]
    fn auto_window_is_dyadic_and_covers_waves() {
        let setup = Setup {
            law: PressureLaw::gamma_law(1.4).unwrap(),
            geometry: PipeGeometry::straight(),
            coeffs: SourceCoefficients::none(),
            datum: InitialDatum::Stationary { left: State { rho: 1.0, q: 0.0 } },
            params: SolverParams { t_end: 2.0, ..SolverParams::default() },
        };
        let s = Snapshot { t: 0.0, breakpoints: vec![-1.5, 0.7], states: vec![State { rho: 1.0, q: 0.0 }; 3] };
        assert_eq!(auto_window(&setup, &s, 1.0), (-4.0, 4.0));
    }

    #[test]
    fn step_rows_list_both_sides() {
        let law = PressureLaw::gamma_law(2.0).unwrap();
        let s = Snapshot { t: 0.0, breakpoints: vec![0.0], states: vec![State { rho: 1.0, q: 0.0 }, State { rho: 2.0, q: 1.0 }] };
        let rows = step_rows(&law, &s, -1.0, 1.0);
        assert_eq!(rows.iter().map(|r| (r.x, r.rho)).collect::<Vec<_>>(), vec![(-1.0, 1.0), (0.0, 1.0), (0.0, 2.0), (1.0, 2.0)]);
        assert_eq!(rows[3].big_p, 0.5 + 4.0);
    }
}
