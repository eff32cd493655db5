//! Parameter sweeps: run the selected solver on every parameter
//! point, compare against the exact quasi-static layer, and emit one
//! deterministic CSV row per point plus a directory of artifacts.
//!
//! Points run concurrently up to a worker count taken from the
//! environment (see [`defaults::WORKERS_ENV`]); each point writes only
//! inside its own directory, and rows are assembled by index so the
//! result never depends on scheduling.  A failing point records its
//! error in the `status` column and the sweep continues.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use crate::analysis::{
    bln_series, weak_star_error, young_measure, DiagnosticsReport, TestDictionary,
    WindowGeometry,
};
use crate::defaults;
use crate::error::{Error, Result};
use crate::field::{GridSpec, Trajectory};
use crate::flux::FluxModel;
use crate::harness::config::{ExperimentConfig, SolverKind};
use crate::harness::io;
use crate::hyperbolic;
use crate::quasistatic::{self, BoundaryPath, RegionTag};
use crate::viscous::{self, ViscousParams};

/// One row of the sweep table.
#[derive(Debug, Clone)]
pub struct PointOutcome {
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub n_cells: usize,
    /// Space-time L¹ distance to the exact quasi-static profile over
    /// the second half of the run (absent on the critical set, where
    /// no single profile is selected).
    pub l1_error: Option<f64>,
    pub weak_star_error: Option<f64>,
    /// `|F̄ − 𝒥̄|`: time-averaged boundary flux vs the exact current.
    pub current_error: Option<f64>,
    pub energy: Option<f64>,
    pub bln_pass: Option<usize>,
    pub bln_total: Option<usize>,
    pub atoms: Option<usize>,
    pub young_residual: Option<f64>,
    pub young_flux: Option<f64>,
    pub status: String,
    pub wall_s: f64,
}

pub const SWEEP_HEADER: &str = "epsilon,delta,n_cells,l1_error,weak_star_error,\
current_error,energy,bln_pass,bln_total,atoms,young_residual,young_flux,status,wall_s";

fn opt_f(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_u(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl PointOutcome {
    fn pending(spec: &PointSpec) -> Self {
        PointOutcome {
            epsilon: spec.epsilon,
            delta: spec.delta,
            n_cells: spec.n_cells,
            l1_error: None,
            weak_star_error: None,
            current_error: None,
            energy: None,
            bln_pass: None,
            bln_total: None,
            atoms: None,
            young_residual: None,
            young_flux: None,
            status: "pending".to_string(),
            wall_s: 0.0,
        }
    }

    pub fn csv_row(&self) -> String {
        // Status must not break the CSV shape.
        let status = self.status.replace([',', '\n', '\r'], ";");
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{:.3}",
            opt_f(self.epsilon),
            opt_f(self.delta),
            self.n_cells,
            opt_f(self.l1_error),
            opt_f(self.weak_star_error),
            opt_f(self.current_error),
            opt_f(self.energy),
            opt_u(self.bln_pass),
            opt_u(self.bln_total),
            opt_u(self.atoms),
            opt_f(self.young_residual),
            opt_f(self.young_flux),
            status,
            self.wall_s
        )
    }
}

/// All rows of a finished sweep, in parameter-point order.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<PointOutcome>,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.csv_row());
            out.push('\n');
        }
        out
    }

    /// The CSV with the wall-time column removed — the part that must
    /// be byte-identical across reruns of the same config.
    pub fn deterministic_csv(&self) -> String {
        let mut out = String::new();
        for line in self.to_csv().lines() {
            let cut = line.rfind(',').unwrap_or(line.len());
            out.push_str(&line[..cut]);
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone)]
struct PointSpec {
    epsilon: Option<f64>,
    delta: Option<f64>,
    n_cells: usize,
    dir: PathBuf,
}

fn point_specs(config: &ExperimentConfig) -> Vec<PointSpec> {
    let mut specs = Vec::new();
    let dir_name = |eps: Option<f64>, delta: Option<f64>, n: usize| {
        let mut name = String::new();
        if let Some(e) = eps {
            name.push_str(&format!("eps{e}_"));
        }
        if let Some(d) = delta {
            name.push_str(&format!("delta{d}_"));
        }
        name.push_str(&format!("n{n}"));
        name
    };
    let push = |eps: Option<f64>, delta: Option<f64>, n: usize, specs: &mut Vec<PointSpec>| {
        specs.push(PointSpec {
            epsilon: eps,
            delta,
            n_cells: n,
            dir: config.out_dir.join(dir_name(eps, delta, n)),
        });
    };
    match config.solver {
        SolverKind::Hyperbolic => {
            for &e in &config.epsilons {
                for &n in &config.n_cells {
                    push(Some(e), None, n, &mut specs);
                }
            }
        }
        SolverKind::Viscous => {
            for &e in &config.epsilons {
                for &d in &config.deltas {
                    for &n in &config.n_cells {
                        push(Some(e), Some(d), n, &mut specs);
                    }
                }
            }
        }
        SolverKind::Stationary => {
            for &d in &config.deltas {
                for &n in &config.n_cells {
                    push(None, Some(d), n, &mut specs);
                }
            }
        }
        SolverKind::QuasistaticExact => {
            for &n in &config.n_cells {
                push(None, None, n, &mut specs);
            }
        }
    }
    specs
}

fn worker_count(n_points: usize) -> usize {
    let configured = std::env::var(defaults::WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&w| w >= 1);
    let fallback = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    configured.unwrap_or(fallback).min(n_points.max(1))
}

/// Run every parameter point of `config`, write per-point artifact
/// directories and the top-level `sweep.csv`, and return the table.
pub fn run_experiment(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    std::fs::create_dir_all(&config.out_dir)
        .map_err(|e| Error::Io(format!("{}: {e}", config.out_dir.display())))?;
    let specs = point_specs(config);
    let results: Mutex<Vec<Option<PointOutcome>>> = Mutex::new(vec![None; specs.len()]);
    let next = AtomicUsize::new(0);
    let workers = worker_count(specs.len());

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= specs.len() {
                    break;
                }
                let spec = &specs[i];
                let started = Instant::now();
                let outcome = catch_unwind(AssertUnwindSafe(|| run_point(config, spec)));
                let mut row = match outcome {
                    Ok(Ok(row)) => row,
                    Ok(Err(e)) => {
                        let mut r = PointOutcome::pending(spec);
                        r.status = format!("error: {e}");
                        r
                    }
                    Err(payload) => {
                        let msg = payload
                            .downcast_ref::<&str>()
                            .map(|s| s.to_string())
                            .or_else(|| payload.downcast_ref::<String>().cloned())
                            .unwrap_or_else(|| "opaque panic".to_string());
                        let mut r = PointOutcome::pending(spec);
                        r.status = format!("panic: {msg}");
                        r
                    }
                };
                row.wall_s = started.elapsed().as_secs_f64();
                results.lock().unwrap()[i] = Some(row);
            });
        }
    });

    let rows: Vec<PointOutcome> = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every point index was visited"))
        .collect();
    let result = SweepResult { rows };
    io::write_text(&config.out_dir.join("sweep.csv"), &result.to_csv())?;
    Ok(result)
}

fn run_point(config: &ExperimentConfig, spec: &PointSpec) -> Result<PointOutcome> {
    std::fs::create_dir_all(&spec.dir)
        .map_err(|e| Error::Io(format!("{}: {e}", spec.dir.display())))?;
    match config.solver {
        SolverKind::Hyperbolic | SolverKind::Viscous => run_evolution_point(config, spec),
        SolverKind::Stationary => run_stationary_point(config, spec),
        SolverKind::QuasistaticExact => run_exact_point(config, spec),
    }
}

fn write_meta(config: &ExperimentConfig, spec: &PointSpec) -> Result<()> {
    let mut meta = DiagnosticsReport::new();
    let (minus, plus) = config.path.describe();
    meta.set("run", "solver", config.solver.name());
    meta.set("run", "flux", config.flux.name());
    meta.set("run", "minus", &minus);
    meta.set("run", "plus", &plus);
    meta.set("run", "initial", config.initial.describe());
    meta.set("run", "cfl", config.cfl);
    meta.set("run", "horizon", config.horizon);
    meta.set("run", "n_cells", spec.n_cells);
    if let Some(e) = spec.epsilon {
        meta.set("run", "epsilon", e);
    }
    if let Some(d) = spec.delta {
        meta.set("run", "delta", d);
    }
    io::write_text(&spec.dir.join("meta.txt"), &meta.render())
}

/// Shared diagnostics for hyperbolic and viscous trajectories.
#[allow(clippy::too_many_arguments)]
fn evolution_diagnostics(
    f: &FluxModel,
    path: &BoundaryPath,
    traj: &Trajectory,
    config: &ExperimentConfig,
    spec: &PointSpec,
    epsilon: f64,
    report: &mut DiagnosticsReport,
    row: &mut PointOutcome,
) -> Result<()> {
    let t1 = config.horizon;
    let t0 = 0.5 * t1;

    // Classify the boundary pair at every snapshot time in the window.
    let mut on_theta = false;
    let mut tags: Vec<String> = Vec::new();
    for snap in traj.snapshots_in(t0, t1) {
        let t = snap.time();
        let tag = quasistatic::classify(
            f,
            path.rho_minus(t),
            path.rho_plus(t),
            defaults::CRITICAL_ETA,
        )?;
        if tag == RegionTag::Critical {
            on_theta = true;
        }
        let name = format!("{tag:?}");
        if !tags.contains(&name) {
            tags.push(name);
        }
    }
    report.set("classification", "window", format!("[{t0}, {t1}]"));
    report.set("classification", "regions", tags.join(","));
    report.set("classification", "on_critical_set", on_theta);

    // Strong and weak errors against the exact layer (off Θ only: on
    // the critical set no single profile is selected).
    if !on_theta {
        let exact_fn = |t: f64, x: f64| -> f64 {
            quasistatic::exact_profile(f, path, t)
                .and_then(|p| p.value_at(x))
                .unwrap_or(f64::NAN)
        };
        if let Ok(l1) = traj.space_time_l1_vs(&exact_fn, t0, t1) {
            row.l1_error = Some(l1);
        }
        if let Ok(dict) = TestDictionary::v1(t0, t1) {
            if let Ok(err) = weak_star_error(traj, &exact_fn, &dict, t0, t1) {
                row.weak_star_error = Some(err.weak);
                report.set("errors", "weak_worst_function", &err.worst_function);
            }
        }
    }

    // Time-averaged boundary flux vs the exact current (well defined
    // on Θ as well — the current is selected even when the profile is
    // not).
    let snaps = traj.snapshots_in(t0, t1);
    if let Ok((f0, f1)) = traj.time_averaged_fluxes(t0, t1) {
        let mut current_sum = 0.0;
        let mut count = 0;
        for snap in &snaps {
            let prof = quasistatic::exact_profile(f, path, snap.time())?;
            current_sum += prof.current();
            count += 1;
        }
        if count > 0 {
            let jbar = current_sum / count as f64;
            row.current_error = Some((f0 - jbar).abs().max((f1 - jbar).abs()));
            report.set("errors", "flux_left_avg", f0);
            report.set("errors", "flux_right_avg", f1);
            report.set("errors", "current_exact_avg", jbar);
        }
    }

    // Boundary-trace admissibility after the startup transient.
    let series = bln_series(f, traj, path, config.bln_tol)?;
    let transient = 2.0 * epsilon;
    let mut pass = 0;
    let mut total = 0;
    for (t, left, right) in &series {
        if *t >= transient {
            total += 1;
            if left.pass && right.pass {
                pass += 1;
            }
        }
    }
    row.bln_pass = Some(pass);
    row.bln_total = Some(total);
    report.set("bln", "pass", pass);
    report.set("bln", "total", total);
    report.set("bln", "tolerance", config.bln_tol);
    report.set("bln", "transient_end", transient);

    // Young-measure window over the second half, hinted by the exact
    // profile's two states.
    let hint = quasistatic::exact_profile(f, path, t1)
        .map(|p| (p.z_low(), p.z_high()))
        .ok();
    if let Ok(window) = WindowGeometry::new(t0, t1, 0.0, 1.0) {
        if let Ok(est) = young_measure(&[traj], window, hint, f) {
            row.atoms = Some(est.atoms.len());
            row.young_residual = Some(est.residual_mass);
            row.young_flux = Some(est.mean_flux);
            let atoms: Vec<String> = est
                .atoms
                .iter()
                .map(|(z, m)| format!("{z}@{m}"))
                .collect();
            report.set("young", "atoms", atoms.join(" "));
            report.set("young", "upper_fraction", est.upper_fraction);
            report.set("young", "residual_mass", est.residual_mass);
            report.set("young", "mean_flux", est.mean_flux);
            report.set("young", "samples", est.sample_count);
        }
    }

    report.set("ledger", "max_residual", traj.max_ledger_residual());
    write_meta(config, spec)?;
    io::write_snapshots(&spec.dir.join("snapshots.csv"), traj)?;
    io::write_fluxes(&spec.dir.join("fluxes.csv"), traj.flux_series())?;
    Ok(())
}

fn run_evolution_point(config: &ExperimentConfig, spec: &PointSpec) -> Result<PointOutcome> {
    let f = config.flux.build()?;
    let path = config.path.build(&f)?;
    let grid = GridSpec::new(spec.n_cells)?;
    let u0 = config.initial.build(grid, 0.0)?;
    let epsilon = spec
        .epsilon
        .ok_or_else(|| Error::InvalidParameter("evolution point without epsilon".into()))?;

    let mut row = PointOutcome::pending(spec);
    let mut report = DiagnosticsReport::new();

    let traj = match config.solver {
        SolverKind::Hyperbolic => {
            let traj = hyperbolic::run(
                &f,
                &path,
                &u0,
                epsilon,
                config.cfl,
                config.horizon,
                &config.output_times,
            )?;
            let last = traj.final_field()?;
            let dx = last.grid().dx();
            let l2sq: f64 = last.values().iter().map(|u| u * u).sum::<f64>() * dx;
            row.energy = Some(epsilon * l2sq);
            traj
        }
        SolverKind::Viscous => {
            let delta = spec.delta.ok_or_else(|| {
                Error::InvalidParameter("viscous point without delta".into())
            })?;
            let params = ViscousParams {
                epsilon,
                delta,
                cfl: config.cfl,
            };
            let run = viscous::run_viscous(
                &f,
                &path,
                &u0,
                &params,
                config.horizon,
                &config.output_times,
            )?;
            let (final_energy, series) = viscous::energy_functional(&run, epsilon, delta);
            row.energy = Some(final_energy);
            io::write_series(&spec.dir.join("energy.csv"), "t,energy", &series)?;
            report.set("energy", "total_dissipation", run.total_dissipation);
            run.trajectory
        }
        _ => unreachable!("evolution point with non-evolution solver"),
    };
    report.set("energy", "final", row.energy.unwrap_or(f64::NAN));

    evolution_diagnostics(&f, &path, &traj, config, spec, epsilon, &mut report, &mut row)?;
    io::write_text(&spec.dir.join("report.txt"), &report.render())?;
    row.status = "ok".to_string();
    Ok(row)
}

fn run_stationary_point(config: &ExperimentConfig, spec: &PointSpec) -> Result<PointOutcome> {
    let f = config.flux.build()?;
    let path = config.path.build(&f)?;
    let grid = GridSpec::new(spec.n_cells)?;
    let delta = spec
        .delta
        .ok_or_else(|| Error::InvalidParameter("stationary point without delta".into()))?;
    let rm = path.rho_minus(0.0);
    let rp = path.rho_plus(0.0);

    let mut row = PointOutcome::pending(spec);
    let mut report = DiagnosticsReport::new();

    let (profile, k) = viscous::stationary_profile_with_current(&f, rm, rp, delta, grid)?;
    let exact_current = quasistatic::variational_current(&f, rm, rp)?;
    row.current_error = Some((k - exact_current).abs());
    report.set("stationary", "current", k);
    report.set("stationary", "current_exact", exact_current);

    let tag = quasistatic::classify(&f, rm, rp, defaults::CRITICAL_ETA)?;
    report.set("classification", "regions", format!("{tag:?}"));
    report.set("classification", "on_critical_set", tag == RegionTag::Critical);
    if tag != RegionTag::Critical {
        let prof = quasistatic::exact_profile(&f, &path, 0.0)?;
        row.l1_error = Some(profile.l1_distance_to(|x| prof.value_at(x).unwrap_or(f64::NAN)));
    }

    write_meta(config, spec)?;
    io::write_profile(&spec.dir.join("profile.csv"), &profile)?;
    io::write_text(&spec.dir.join("report.txt"), &report.render())?;
    row.status = "ok".to_string();
    Ok(row)
}

fn run_exact_point(config: &ExperimentConfig, spec: &PointSpec) -> Result<PointOutcome> {
    let f = config.flux.build()?;
    let path = config.path.build(&f)?;
    let grid = GridSpec::new(spec.n_cells)?;

    let mut row = PointOutcome::pending(spec);
    let mut report = DiagnosticsReport::new();

    let mut table = String::from("t,kind,z_low,z_high,current\n");
    let mut worst = 0.0_f64;
    let mut any_critical = false;
    let mut snapshots = Vec::new();
    for &t in &config.output_times {
        let prof = quasistatic::exact_profile(&f, &path, t)?;
        let direct = quasistatic::variational_current(&f, path.rho_minus(t), path.rho_plus(t))?;
        worst = worst.max((prof.current() - direct).abs());
        use std::fmt::Write as _;
        let _ = writeln!(
            table,
            "{t},{:?},{},{},{}",
            prof.kind(),
            prof.z_low(),
            prof.z_high(),
            prof.current()
        );
        if prof.constant_value().is_some() {
            snapshots.push(prof.sample(grid)?);
        } else {
            any_critical = true;
        }
    }
    row.current_error = Some(worst);
    report.set("exact", "current_vs_variational_max_gap", worst);
    report.set("exact", "any_critical_time", any_critical);

    write_meta(config, spec)?;
    io::write_text(&spec.dir.join("exact.csv"), &table)?;
    if !any_critical && !snapshots.is_empty() {
        let traj = Trajectory::from_parts(1.0, config.cfl, snapshots, Vec::new())?;
        io::write_snapshots(&spec.dir.join("snapshots.csv"), &traj)?;
    }
    io::write_text(&spec.dir.join("report.txt"), &report.render())?;
    row.status = "ok".to_string();
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ExperimentConfig;

    fn unique_dir(tag: &str) -> PathBuf {
        let pid = std::process::id();
        std::env::temp_dir().join(format!("qslab-sweep-{tag}-{pid}"))
    }

    fn small_config(out: &std::path::Path) -> String {
        format!(
            "[path]\npreset = constant 0.3 0.2\n\
             [initial]\npreset = constant 0.5\n\
             [sweep]\nepsilons = 0.2 0.1\ndeltas = 0.1\nn_cells = 50\n\
             horizon = 0.6\noutput_times = linspace 0 0.6 13\n\
             [output]\ndir = {}\n",
            out.display()
        )
    }

    #[test]
    fn hyperbolic_sweep_relaxes_and_is_deterministic() {
        let dir_a = unique_dir("det-a");
        let dir_b = unique_dir("det-b");
        let res_a = run_experiment(&ExperimentConfig::from_text(&small_config(&dir_a)).unwrap())
            .unwrap();
        let res_b = run_experiment(&ExperimentConfig::from_text(&small_config(&dir_b)).unwrap())
            .unwrap();

        assert_eq!(res_a.rows.len(), 2);
        for row in &res_a.rows {
            assert_eq!(row.status, "ok", "{}", row.status);
            assert!(row.l1_error.is_some());
            assert_eq!(row.bln_total.map(|t| t > 0), Some(true));
            assert_eq!(row.bln_pass, row.bln_total);
        }
        // Slower driving (smaller ε) relaxes harder.
        let e0 = res_a.rows[0].l1_error.unwrap();
        let e1 = res_a.rows[1].l1_error.unwrap();
        assert!(e1 < e0, "l1 errors {e0} -> {e1} did not decrease");

        // Byte-identical apart from wall time, across runs and dirs.
        assert_eq!(res_a.deterministic_csv(), res_b.deterministic_csv());
        let snaps_a =
            std::fs::read(dir_a.join("eps0.2_n50").join("snapshots.csv")).unwrap();
        let snaps_b =
            std::fs::read(dir_b.join("eps0.2_n50").join("snapshots.csv")).unwrap();
        assert_eq!(snaps_a, snaps_b);
        // sweep.csv exists and carries the header.
        let csv = std::fs::read_to_string(dir_a.join("sweep.csv")).unwrap();
        assert!(csv.starts_with(SWEEP_HEADER));

        std::fs::remove_dir_all(&dir_a).ok();
        std::fs::remove_dir_all(&dir_b).ok();
    }

    #[test]
    fn failing_points_do_not_abort_the_sweep() {
        let dir = unique_dir("isolate");
        std::fs::create_dir_all(&dir).unwrap();
        // An initial-datum file with 50 rows: fine on the 50-cell grid,
        // a config error on the 80-cell grid.
        let datum = dir.join("datum.csv");
        let mut text = String::from("x,u\n");
        for k in 0..50 {
            text.push_str(&format!("{},0.5\n", (k as f64 + 0.5) / 50.0));
        }
        std::fs::write(&datum, text).unwrap();
        let cfg = format!(
            "[path]\npreset = constant 0.3 0.2\n\
             [initial]\npreset = from-file {}\n\
             [sweep]\nepsilons = 0.2\ndeltas = 0.1\nn_cells = 50 80\n\
             horizon = 0.4\noutput_times = linspace 0 0.4 9\n\
             [output]\ndir = {}\n",
            datum.display(),
            dir.display()
        );
        let res = run_experiment(&ExperimentConfig::from_text(&cfg).unwrap()).unwrap();
        assert_eq!(res.rows.len(), 2);
        assert_eq!(res.rows[0].status, "ok");
        assert!(res.rows[1].status.starts_with("error:"), "{}", res.rows[1].status);
        assert!(res.rows[1].l1_error.is_none());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn exact_solver_cross_checks_the_current() {
        let dir = unique_dir("exact");
        let cfg = format!(
            "[path]\npreset = constant 0.3 0.2\n\
             [solver]\nkind = quasistatic-exact\n\
             [sweep]\nn_cells = 50\nhorizon = 1\noutput_times = linspace 0 1 11\n\
             [output]\ndir = {}\n",
            dir.display()
        );
        let res = run_experiment(&ExperimentConfig::from_text(&cfg).unwrap()).unwrap();
        assert_eq!(res.rows.len(), 1);
        assert_eq!(res.rows[0].status, "ok");
        assert!(res.rows[0].current_error.unwrap() <= 1e-12);
        let table = std::fs::read_to_string(dir.join("n50").join("exact.csv")).unwrap();
        assert!(table.starts_with("t,kind,z_low,z_high,current\n"));
        assert!(table.contains("0.21"), "missing current value:\n{table}");
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn stationary_solver_reports_current_agreement() {
        let dir = unique_dir("stationary");
        let cfg = format!(
            "[path]\npreset = constant 0.3 0.2\n\
             [solver]\nkind = stationary\n\
             [sweep]\ndeltas = 0.05\nn_cells = 100\n\
             [output]\ndir = {}\n",
            dir.display()
        );
        let res = run_experiment(&ExperimentConfig::from_text(&cfg).unwrap()).unwrap();
        assert_eq!(res.rows.len(), 1);
        assert_eq!(res.rows[0].status, "ok", "{}", res.rows[0].status);
        // δ-viscous current approaches 𝒥 = 0.21.
        assert!(res.rows[0].current_error.unwrap() <= 0.05);
        assert!(dir.join("delta0.05_n100").join("profile.csv").exists());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn critical_sweep_reports_two_atoms() {
        let dir = unique_dir("critical");
        let cfg = format!(
            "[path]\npreset = critical-of-minus constant 0.3\n\
             [initial]\npreset = riemann 0.3 0.7 0.5\n\
             [sweep]\nepsilons = 0.1\ndeltas = 0.1\nn_cells = 100\n\
             horizon = 0.6\noutput_times = linspace 0 0.6 13\n\
             [output]\ndir = {}\n",
            dir.display()
        );
        let res = run_experiment(&ExperimentConfig::from_text(&cfg).unwrap()).unwrap();
        assert_eq!(res.rows[0].status, "ok", "{}", res.rows[0].status);
        let row = &res.rows[0];
        // On Θ no profile is selected: strong errors are absent.
        assert!(row.l1_error.is_none());
        assert_eq!(row.atoms, Some(2));
        assert!(row.young_residual.unwrap() <= 0.05);
        assert!((row.young_flux.unwrap() - 0.21).abs() <= 0.01);
        std::fs::remove_dir_all(&dir).ok();
    }
}
