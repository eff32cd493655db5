//! `qslab` — command-line front end for the quasi-static conservation-law
//! laboratory.
//!
//! Subcommands:
//! * `quasistatic` — tabulate the exact slow-time profile family and its
//!   current over a time grid.
//! * `solve`       — run a single solver configuration (the first entry of
//!   each parameter list in the config file).
//! * `stationary`  — solve the viscous two-point boundary-value profile on
//!   a frozen boundary pair and dump it as `x,v` CSV.
//! * `sweep`       — run the full parameter sweep described by a config
//!   file, with per-point crash isolation.
//! * `verify`      — re-check a stored run directory: entropy-residual
//!   admissibility, boundary traces, and range bounds.
//!
//! Exit codes: 0 on success, 1 when a run or verification check fails,
//! 2 on configuration errors (bad flags, unreadable or malformed files).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qslab_core::analysis::{bln_series, entropy_residual, DiagnosticsReport, EntropyPair};
use qslab_core::defaults;
use qslab_core::harness::{
    parse_key_values, parse_side_preset, run_experiment, ExperimentConfig, FluxSpec, PathSpec,
    SweepResult,
};
use qslab_core::quasistatic::{exact_profile, BoundaryPath};
use qslab_core::viscous::stationary_profile_with_current;
use qslab_core::{Error, FluxModel, GridSpec};

#[derive(Parser)]
#[command(
    name = "qslab",
    version,
    about = "Quasi-static scalar conservation-law laboratory",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by the subcommands that build a flux model directly.
#[derive(Args)]
struct FluxArgs {
    /// Flux model: `traffic`, `sine`, or a path to a two-column `u,J` CSV
    /// table.
    #[arg(long, default_value = "traffic")]
    flux: String,
}

impl FluxArgs {
    fn build(&self) -> Result<FluxModel, Error> {
        let spec = match self.flux.as_str() {
            "traffic" => FluxSpec::Traffic,
            "sine" => FluxSpec::Sine,
            other => FluxSpec::Custom(PathBuf::from(other)),
        };
        spec.build()
    }
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the exact quasi-static profile family over a time grid.
    Quasistatic {
        #[command(flatten)]
        flux: FluxArgs,
        /// Left boundary datum: a number or a side preset
        /// (`constant a` | `ramp from to t0 t1` | `sine mean amp omega phase`).
        #[arg(long)]
        minus: String,
        /// Right boundary datum (same grammar), or `critical-of-minus` to
        /// pin the pair to the critical set.
        #[arg(long)]
        plus: String,
        /// Start of the time grid.
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        /// End of the time grid.
        #[arg(long, default_value_t = 1.0)]
        t1: f64,
        /// Number of sample times (inclusive of both ends).
        #[arg(long, default_value_t = 101)]
        samples: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one solver configuration from a config file.
    ///
    /// Uses the first entry of each parameter list (`sweep.epsilons`,
    /// `sweep.deltas`, `sweep.n_cells`) and writes the usual per-point
    /// artifacts under `output.dir`.
    Solve {
        /// Config file (flat key-value text).
        #[arg(long)]
        config: PathBuf,
    },
    /// Solve the viscous stationary boundary-value profile.
    Stationary {
        #[command(flatten)]
        flux: FluxArgs,
        /// Left boundary value (number or side preset, evaluated at t = 0).
        #[arg(long)]
        minus: String,
        /// Right boundary value (same grammar).
        #[arg(long)]
        plus: String,
        /// Viscosity parameter.
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        /// Number of grid cells.
        #[arg(long, default_value_t = defaults::N_CELLS)]
        n_cells: usize,
        /// Write the `x,v` CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full parameter sweep described by a config file.
    Sweep {
        /// Config file (flat key-value text).
        #[arg(long)]
        config: PathBuf,
    },
    /// Re-check a stored run directory for admissibility.
    Verify {
        /// Run directory holding `meta.txt` and `snapshots.csv`.
        #[arg(long)]
        traj: PathBuf,
        /// Entropy family for the residual check: `kruzhkov` (a spread of
        /// thresholds) or `quadratic`.
        #[arg(long, default_value = "kruzhkov")]
        entropy: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::Config(_) | Error::Io(_) => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Quasistatic {
            flux,
            minus,
            plus,
            t0,
            t1,
            samples,
            out,
        } => cmd_quasistatic(&flux, &minus, &plus, t0, t1, samples, out.as_deref()),
        Command::Solve { config } => cmd_solve(&config),
        Command::Stationary {
            flux,
            minus,
            plus,
            delta,
            n_cells,
            out,
        } => cmd_stationary(&flux, &minus, &plus, delta, n_cells, out.as_deref()),
        Command::Sweep { config } => cmd_sweep(&config),
        Command::Verify { traj, entropy } => cmd_verify(&traj, &entropy),
    }
}

/// Print to `out` if given, else to stdout.
fn emit(text: &str, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => qslab_core::harness::io::write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn build_path(f: &FluxModel, minus: &str, plus: &str) -> Result<BoundaryPath, Error> {
    let spec = PathSpec {
        minus: minus.to_string(),
        plus: if plus == "critical-of-minus" {
            None
        } else {
            Some(plus.to_string())
        },
    };
    spec.build(f)
}

fn cmd_quasistatic(
    flux: &FluxArgs,
    minus: &str,
    plus: &str,
    t0: f64,
    t1: f64,
    samples: usize,
    out: Option<&Path>,
) -> Result<u8, Error> {
    if !(t0.is_finite() && t1.is_finite() && t1 >= t0) {
        return Err(Error::Config(format!(
            "time grid needs finite t1 >= t0, got [{t0}, {t1}]"
        )));
    }
    if samples < 1 {
        return Err(Error::Config("samples must be at least 1".into()));
    }
    let f = flux.build()?;
    let path = build_path(&f, minus, plus)?;

    let mut csv = String::from("t,kind,z_low,z_high,value,current\n");
    for i in 0..samples {
        let t = if samples == 1 {
            t0
        } else {
            t0 + (t1 - t0) * i as f64 / (samples - 1) as f64
        };
        let prof = exact_profile(&f, &path, t)?;
        let value = prof
            .constant_value()
            .map(|v| v.to_string())
            .unwrap_or_default();
        csv.push_str(&format!(
            "{},{:?},{},{},{},{}\n",
            t,
            prof.kind(),
            prof.z_low(),
            prof.z_high(),
            value,
            prof.current()
        ));
    }
    emit(&csv, out)?;
    Ok(0)
}

fn cmd_solve(config: &Path) -> Result<u8, Error> {
    let mut cfg = ExperimentConfig::from_file(config)?;
    cfg.epsilons.truncate(1);
    cfg.deltas.truncate(1);
    cfg.n_cells.truncate(1);
    report_sweep(run_experiment(&cfg)?, &cfg.out_dir)
}

fn cmd_sweep(config: &Path) -> Result<u8, Error> {
    let cfg = ExperimentConfig::from_file(config)?;
    report_sweep(run_experiment(&cfg)?, &cfg.out_dir)
}

fn report_sweep(result: SweepResult, out_dir: &Path) -> Result<u8, Error> {
    print!("{}", result.to_csv());
    println!("# artifacts under {}", out_dir.display());
    let all_ok = result.rows.iter().all(|row| row.status == "ok");
    Ok(if all_ok { 0 } else { 1 })
}

fn cmd_stationary(
    flux: &FluxArgs,
    minus: &str,
    plus: &str,
    delta: f64,
    n_cells: usize,
    out: Option<&Path>,
) -> Result<u8, Error> {
    let f = flux.build()?;
    let rho_minus = parse_side_preset(minus)?.value(0.0);
    let rho_plus = parse_side_preset(plus)?.value(0.0);
    let grid = GridSpec::new(n_cells)?;
    let (profile, current) = stationary_profile_with_current(&f, rho_minus, rho_plus, delta, grid)?;
    let mut csv = qslab_core::harness::io::profile_csv(&profile);
    csv.push_str(&format!("# current = {current}\n"));
    emit(&csv, out)?;
    Ok(0)
}

/// Checks a stored run against the admissibility battery:
/// value range, entropy-residual sign up to the mesh-scale allowance,
/// and boundary-trace conditions after the initial transient.
fn cmd_verify(dir: &Path, entropy: &str) -> Result<u8, Error> {
    let meta_text = fs::read_to_string(dir.join("meta.txt"))?;
    let mut meta = parse_key_values(&meta_text)?;
    let epsilon = meta
        .take_f64("run.epsilon")?
        .ok_or_else(|| Error::Config("meta.txt lacks run.epsilon".into()))?;
    let cfl = meta.take_f64("run.cfl")?.unwrap_or(defaults::CFL);
    let flux_kind = meta.take("run.flux").unwrap_or_else(|| "traffic".into());
    let minus = meta
        .take("run.minus")
        .ok_or_else(|| Error::Config("meta.txt lacks run.minus".into()))?;
    let plus = meta
        .take("run.plus")
        .ok_or_else(|| Error::Config("meta.txt lacks run.plus".into()))?;

    let f = match flux_kind.as_str() {
        "traffic" => FluxModel::traffic(),
        "sine" => FluxModel::sine(),
        other => {
            return Err(Error::Config(format!(
                "verify supports flux `traffic` or `sine`, meta.txt says `{other}`"
            )))
        }
    };
    let path = build_path(&f, &minus, &plus)?;
    let traj = qslab_core::harness::io::read_snapshots(&dir.join("snapshots.csv"), epsilon, cfl)?;
    let dx = traj.grid()?.dx();

    let mut report = DiagnosticsReport::new();
    report.set("run", "directory", dir.display().to_string());
    report.set("run", "epsilon", epsilon);
    report.set("run", "flux", f.name());
    report.set("run", "snapshots", traj.snapshots().len());
    let mut all_pass = true;

    // Range: cell averages must stay inside the invariant interval [0, 1].
    let lo = traj
        .snapshots()
        .iter()
        .map(|s| s.min_value())
        .fold(f64::INFINITY, f64::min);
    let hi = traj
        .snapshots()
        .iter()
        .map(|s| s.max_value())
        .fold(f64::NEG_INFINITY, f64::max);
    let range_ok = lo >= -1e-9 && hi <= 1.0 + 1e-9;
    all_pass &= range_ok;
    report.set("range", "min", lo);
    report.set("range", "max", hi);
    report.set("range", "pass", range_ok);

    // Entropy residuals: the largest positive density must stay below the
    // mesh-scale production allowance.
    let pairs: Vec<(String, EntropyPair)> = match entropy {
        "kruzhkov" => (1..=9)
            .map(|k| {
                let w = k as f64 / 10.0;
                EntropyPair::kruzhkov(&f, w).map(|p| (format!("kruzhkov_{w}"), p))
            })
            .collect::<Result<_, _>>()?,
        "quadratic" => vec![("quadratic".to_string(), EntropyPair::quadratic(&f))],
        other => {
            return Err(Error::Config(format!(
                "unknown entropy family `{other}` (expected `kruzhkov` or `quadratic`)"
            )))
        }
    };
    let bound = defaults::ENTROPY_C * dx;
    let mut worst_positive: f64 = 0.0;
    for (name, pair) in &pairs {
        let field = entropy_residual(&traj, pair, epsilon)?;
        worst_positive = worst_positive.max(field.max_positive);
        report.set(
            "entropy",
            &format!("max_positive_{name}"),
            field.max_positive,
        );
    }
    let entropy_ok = worst_positive <= bound;
    all_pass &= entropy_ok;
    report.set("entropy", "allowance", bound);
    report.set("entropy", "pass", entropy_ok);

    // Boundary traces after the relaxation transient.
    let transient = 2.0 * epsilon;
    let series = bln_series(&f, &traj, &path, defaults::BLN_TOL)?;
    let mut checked = 0usize;
    let mut bln_ok = true;
    for (t, left, right) in &series {
        if *t < transient {
            continue;
        }
        checked += 1;
        bln_ok &= left.pass && right.pass;
    }
    all_pass &= bln_ok;
    report.set("bln", "checked_times", checked);
    report.set("bln", "transient", transient);
    report.set("bln", "pass", bln_ok);

    report.set("verdict", "pass", all_pass);
    print!("{}", report.render());
    Ok(if all_pass { 0 } else { 1 })
}
