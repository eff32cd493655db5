//! Experiment configuration: flat `key = value` text with `[section]`
//! headers, parsed with no dependencies so config files stay
//! diff-friendly and the format stays trivial to audit.
//!
//! ```text
//! [flux]
//! kind = traffic              # traffic | sine | custom
//! # table = flux.csv          # 2-column u,J file, only for custom
//!
//! [path]
//! preset = constant 0.3 0.2   # pair presets, see below
//! # or per side:
//! # minus = ramp 0.3 0.6 0.2 0.8
//! # plus  = critical-of-minus
//!
//! [initial]
//! preset = constant 0.5       # constant v | riemann l r x0 | from-file data.csv
//!
//! [solver]
//! kind = hyperbolic           # hyperbolic | viscous | stationary | quasistatic-exact
//! cfl  = 0.9
//!
//! [sweep]
//! epsilons     = 0.2 0.1 0.05 0.025
//! deltas       = 0.1 0.05 0.025 0.0125
//! n_cells      = 400
//! horizon      = 1
//! output_times = linspace 0 1 101
//!
//! [output]
//! dir = out/experiment
//!
//! [tolerances]
//! bln  = 1e-3
//! atom = 0.02
//! ```
//!
//! Pair presets: `constant a b` (both sides constant), `ramp a0 b0 a1
//! b1 t0 t1` (each side ramps over `[t0,t1]`), `critical-of-minus
//! <side-preset>` (the plus side rides the conjugate of the minus
//! side).  Side presets: a bare number, `constant a`, `ramp from to t0
//! t1`, `sine mean amp omega phase`.  Unknown keys are errors, not
//! warnings.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::defaults;
use crate::error::{Error, Result};
use crate::field::{CellField, GridSpec};
use crate::flux::FluxModel;
use crate::quasistatic::{BoundaryPath, SidePath};

/// Parsed key-value entries addressed as `section.key`.  `take_*`
/// accessors consume entries; [`KeyValues::reject_unknown`] then turns
/// any leftovers into a configuration error.
#[derive(Debug, Clone)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

/// Parse `[section] / key = value` text.  `#` starts a comment, blank
/// lines are skipped, duplicate keys are rejected.
pub fn parse_key_values(text: &str) -> Result<KeyValues> {
    let mut entries = BTreeMap::new();
    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        if let Some(inner) = line.strip_prefix('[') {
            let Some(name) = inner.strip_suffix(']') else {
                return Err(Error::Config(format!(
                    "line {lineno}: malformed section header `{line}`"
                )));
            };
            let name = name.trim();
            if name.is_empty() {
                return Err(Error::Config(format!(
                    "line {lineno}: empty section name"
                )));
            }
            section = name.to_string();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {lineno}: expected `key = value`, got `{line}`"
            )));
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(Error::Config(format!("line {lineno}: empty key")));
        }
        let full = if section.is_empty() {
            key.to_string()
        } else {
            format!("{section}.{key}")
        };
        if entries.insert(full.clone(), value.to_string()).is_some() {
            return Err(Error::Config(format!(
                "line {lineno}: duplicate key `{full}`"
            )));
        }
    }
    Ok(KeyValues { entries })
}

impl KeyValues {
    /// Remove and return the raw value for `section.key`.
    pub fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    pub fn take_f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => parse_f64(&v)
                .map(Some)
                .map_err(|e| Error::Config(format!("key `{key}`: {e}"))),
        }
    }

    pub fn take_usize(&mut self, key: &str) -> Result<Option<usize>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v.parse::<usize>().map(Some).map_err(|_| {
                Error::Config(format!("key `{key}`: `{v}` is not a whole number"))
            }),
        }
    }

    /// Whitespace-separated list of floats.
    pub fn take_f64_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => {
                let mut out = Vec::new();
                for tok in v.split_whitespace() {
                    out.push(
                        parse_f64(tok)
                            .map_err(|e| Error::Config(format!("key `{key}`: {e}")))?,
                    );
                }
                if out.is_empty() {
                    return Err(Error::Config(format!("key `{key}`: empty list")));
                }
                Ok(Some(out))
            }
        }
    }

    pub fn take_usize_list(&mut self, key: &str) -> Result<Option<Vec<usize>>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => {
                let mut out = Vec::new();
                for tok in v.split_whitespace() {
                    out.push(tok.parse::<usize>().map_err(|_| {
                        Error::Config(format!("key `{key}`: `{tok}` is not a whole number"))
                    })?);
                }
                if out.is_empty() {
                    return Err(Error::Config(format!("key `{key}`: empty list")));
                }
                Ok(Some(out))
            }
        }
    }

    /// Error out if any keys were never consumed.
    pub fn reject_unknown(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Ok(());
        }
        let keys: Vec<&str> = self.entries.keys().map(String::as_str).collect();
        Err(Error::Config(format!("unknown keys: {}", keys.join(", "))))
    }
}

fn parse_f64(tok: &str) -> std::result::Result<f64, String> {
    tok.parse::<f64>()
        .map_err(|_| format!("`{tok}` is not a number"))
        .and_then(|v| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("`{tok}` is not finite"))
            }
        })
}

/// One boundary side: bare number, `constant a`, `ramp from to t0 t1`,
/// or `sine mean amp omega phase`.
pub fn parse_side_preset(s: &str) -> Result<SidePath> {
    let toks: Vec<&str> = s.split_whitespace().collect();
    let num = |t: &str| parse_f64(t).map_err(Error::Config);
    match toks.as_slice() {
        [v] if parse_f64(v).is_ok() => Ok(SidePath::Constant(num(v)?)),
        ["constant", v] => Ok(SidePath::Constant(num(v)?)),
        ["ramp", from, to, t0, t1] => Ok(SidePath::Ramp {
            from: num(from)?,
            to: num(to)?,
            t0: num(t0)?,
            t1: num(t1)?,
        }),
        ["sine", mean, amp, omega, phase] => Ok(SidePath::Sine {
            mean: num(mean)?,
            amp: num(amp)?,
            omega: num(omega)?,
            phase: num(phase)?,
        }),
        _ => Err(Error::Config(format!(
            "unrecognized side preset `{s}` (expected `constant a`, \
             `ramp from to t0 t1`, `sine mean amp omega phase`, or a bare number)"
        ))),
    }
}

/// Boundary-path description, kept as preset strings so it can be
/// echoed verbatim into metadata files; `plus = None` means the plus
/// side rides the conjugate of the minus side (the critical set).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSpec {
    pub minus: String,
    pub plus: Option<String>,
}

impl PathSpec {
    pub fn build(&self, f: &FluxModel) -> Result<BoundaryPath> {
        let minus = parse_side_preset(&self.minus)?;
        match &self.plus {
            Some(p) => BoundaryPath::pair(minus, parse_side_preset(p)?),
            None => BoundaryPath::critical_of_minus(minus, f),
        }
    }

    /// `(minus, plus)` preset strings for metadata echoing.
    pub fn describe(&self) -> (String, String) {
        (
            self.minus.clone(),
            self.plus
                .clone()
                .unwrap_or_else(|| "critical-of-minus".to_string()),
        )
    }
}

/// A pair-level preset: `constant a b`, `ramp a0 b0 a1 b1 t0 t1`, or
/// `critical-of-minus <side-preset>`.
pub fn parse_pair_preset(s: &str) -> Result<PathSpec> {
    let toks: Vec<&str> = s.split_whitespace().collect();
    match toks.as_slice() {
        ["constant", a, b] => Ok(PathSpec {
            minus: format!("constant {a}"),
            plus: Some(format!("constant {b}")),
        }),
        ["ramp", a0, b0, a1, b1, t0, t1] => Ok(PathSpec {
            minus: format!("ramp {a0} {a1} {t0} {t1}"),
            plus: Some(format!("ramp {b0} {b1} {t0} {t1}")),
        }),
        ["critical-of-minus", rest @ ..] if !rest.is_empty() => Ok(PathSpec {
            minus: rest.join(" "),
            plus: None,
        }),
        _ => Err(Error::Config(format!(
            "unrecognized path preset `{s}` (expected `constant a b`, \
             `ramp a0 b0 a1 b1 t0 t1`, or `critical-of-minus <side-preset>`)"
        ))),
    }
}

/// Flux selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FluxSpec {
    Traffic,
    Sine,
    Custom(PathBuf),
}

impl FluxSpec {
    pub fn name(&self) -> &str {
        match self {
            FluxSpec::Traffic => "traffic",
            FluxSpec::Sine => "sine",
            FluxSpec::Custom(_) => "custom",
        }
    }

    pub fn build(&self) -> Result<FluxModel> {
        match self {
            FluxSpec::Traffic => Ok(FluxModel::traffic()),
            FluxSpec::Sine => Ok(FluxModel::sine()),
            FluxSpec::Custom(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::Io(format!("flux table {}: {e}", path.display()))
                })?;
                let (us, js) = read_two_columns(&text)?;
                FluxModel::from_table("custom", &us, &js)
            }
        }
    }
}

/// Two-column numeric CSV (`u,J`); a non-numeric first line is treated
/// as a header and skipped.
fn read_two_columns(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut us = Vec::new();
    let mut js = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Config(format!(
                "line {}: expected two comma-separated columns, got `{line}`",
                idx + 1
            )));
        };
        match (parse_f64(a.trim()), parse_f64(b.trim())) {
            (Ok(u), Ok(j)) => {
                us.push(u);
                js.push(j);
            }
            _ if idx == 0 => continue, // header row
            _ => {
                return Err(Error::Config(format!(
                    "line {}: non-numeric entry in `{line}`",
                    idx + 1
                )))
            }
        }
    }
    Ok((us, js))
}

/// Initial datum selection.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    Constant(f64),
    Riemann { left: f64, right: f64, x0: f64 },
    FromFile(PathBuf),
}

impl InitialSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        let num = |t: &str| parse_f64(t).map_err(Error::Config);
        match toks.as_slice() {
            ["constant", v] => Ok(InitialSpec::Constant(num(v)?)),
            ["riemann", l, r, x0] => Ok(InitialSpec::Riemann {
                left: num(l)?,
                right: num(r)?,
                x0: num(x0)?,
            }),
            ["from-file", path] => Ok(InitialSpec::FromFile(PathBuf::from(path))),
            _ => Err(Error::Config(format!(
                "unrecognized initial datum `{s}` (expected `constant v`, \
                 `riemann left right x0`, or `from-file path`)"
            ))),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            InitialSpec::Constant(v) => format!("constant {v}"),
            InitialSpec::Riemann { left, right, x0 } => {
                format!("riemann {left} {right} {x0}")
            }
            InitialSpec::FromFile(p) => format!("from-file {}", p.display()),
        }
    }

    /// Materialize on a grid at time `t0`.  `from-file` expects a CSV
    /// with columns `x,u` and exactly one row per cell.
    pub fn build(&self, grid: GridSpec, t0: f64) -> Result<CellField> {
        match self {
            InitialSpec::Constant(v) => {
                if !(0.0..=1.0).contains(v) {
                    return Err(Error::domain("initial constant", *v, 0.0, 1.0));
                }
                Ok(CellField::constant(grid, t0, *v))
            }
            InitialSpec::Riemann { left, right, x0 } => {
                if !(0.0..=1.0).contains(left) {
                    return Err(Error::domain("riemann left state", *left, 0.0, 1.0));
                }
                if !(0.0..=1.0).contains(right) {
                    return Err(Error::domain("riemann right state", *right, 0.0, 1.0));
                }
                Ok(CellField::riemann(grid, t0, *left, *right, *x0))
            }
            InitialSpec::FromFile(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::Io(format!("initial datum {}: {e}", path.display()))
                })?;
                let (_, values) = read_two_columns(&text)?;
                if values.len() != grid.n_cells() {
                    return Err(Error::Config(format!(
                        "initial datum {} has {} rows but the grid has {} cells",
                        path.display(),
                        values.len(),
                        grid.n_cells()
                    )));
                }
                CellField::from_values(grid, t0, values)
            }
        }
    }
}

/// Which layer the experiment exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Hyperbolic,
    Viscous,
    Stationary,
    QuasistaticExact,
}

impl SolverKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "hyperbolic" => Ok(SolverKind::Hyperbolic),
            "viscous" => Ok(SolverKind::Viscous),
            "stationary" => Ok(SolverKind::Stationary),
            "quasistatic-exact" => Ok(SolverKind::QuasistaticExact),
            _ => Err(Error::Config(format!(
                "unknown solver `{s}` (expected hyperbolic, viscous, stationary, \
                 or quasistatic-exact)"
            ))),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            SolverKind::Hyperbolic => "hyperbolic",
            SolverKind::Viscous => "viscous",
            SolverKind::Stationary => "stationary",
            SolverKind::QuasistaticExact => "quasistatic-exact",
        }
    }
}

/// A fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub flux: FluxSpec,
    pub path: PathSpec,
    pub initial: InitialSpec,
    pub solver: SolverKind,
    pub cfl: f64,
    pub epsilons: Vec<f64>,
    pub deltas: Vec<f64>,
    pub n_cells: Vec<usize>,
    pub horizon: f64,
    pub output_times: Vec<f64>,
    pub out_dir: PathBuf,
    pub bln_tol: f64,
    pub atom_tol: f64,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut kv = parse_key_values(text)?;

        let flux = match kv.take("flux.kind").as_deref() {
            None | Some("traffic") => FluxSpec::Traffic,
            Some("sine") => FluxSpec::Sine,
            Some("custom") => {
                let table = kv.take("flux.table").ok_or_else(|| {
                    Error::Config("flux.kind = custom requires flux.table".into())
                })?;
                FluxSpec::Custom(PathBuf::from(table))
            }
            Some(other) => {
                return Err(Error::Config(format!(
                    "unknown flux kind `{other}` (expected traffic, sine, or custom)"
                )))
            }
        };

        let path = match (kv.take("path.preset"), kv.take("path.minus"), kv.take("path.plus")) {
            (Some(preset), None, None) => parse_pair_preset(&preset)?,
            (None, Some(minus), Some(plus)) => {
                if plus == "critical-of-minus" {
                    PathSpec { minus, plus: None }
                } else {
                    PathSpec {
                        minus,
                        plus: Some(plus),
                    }
                }
            }
            (None, None, None) => {
                return Err(Error::Config(
                    "missing boundary path (set path.preset, or path.minus and path.plus)"
                        .into(),
                ))
            }
            _ => {
                return Err(Error::Config(
                    "set either path.preset or both path.minus and path.plus, not a mix"
                        .into(),
                ))
            }
        };

        let initial = match kv.take("initial.preset") {
            Some(s) => InitialSpec::parse(&s)?,
            None => InitialSpec::Constant(0.5),
        };

        let solver = match kv.take("solver.kind") {
            Some(s) => SolverKind::parse(&s)?,
            None => SolverKind::Hyperbolic,
        };
        let cfl = kv.take_f64("solver.cfl")?.unwrap_or(defaults::CFL);

        let epsilons = kv
            .take_f64_list("sweep.epsilons")?
            .unwrap_or_else(|| defaults::EPSILONS.to_vec());
        let deltas = kv
            .take_f64_list("sweep.deltas")?
            .unwrap_or_else(|| defaults::DELTAS.to_vec());
        let n_cells = kv
            .take_usize_list("sweep.n_cells")?
            .unwrap_or_else(|| vec![defaults::N_CELLS]);
        let horizon = kv.take_f64("sweep.horizon")?.unwrap_or(defaults::HORIZON);
        let output_times = match kv.take("sweep.output_times") {
            Some(s) => parse_output_times(&s)?,
            None => linspace(0.0, horizon, 101),
        };

        let out_dir = PathBuf::from(kv.take("output.dir").ok_or_else(|| {
            Error::Config("missing output.dir (where the sweep writes its files)".into())
        })?);

        let bln_tol = kv.take_f64("tolerances.bln")?.unwrap_or(defaults::BLN_TOL);
        let atom_tol = kv
            .take_f64("tolerances.atom")?
            .unwrap_or(defaults::ATOM_TOL);

        kv.reject_unknown()?;

        let config = ExperimentConfig {
            flux,
            path,
            initial,
            solver,
            cfl,
            epsilons,
            deltas,
            n_cells,
            horizon,
            output_times,
            out_dir,
            bln_tol,
            atom_tol,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0) {
            return Err(Error::Config(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!(
                "cfl must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        for &e in &self.epsilons {
            if !(e > 0.0) {
                return Err(Error::Config(format!("epsilon must be positive, got {e}")));
            }
        }
        for &d in &self.deltas {
            if !(d > 0.0) {
                return Err(Error::Config(format!("delta must be positive, got {d}")));
            }
        }
        if self.epsilons.is_empty() || self.deltas.is_empty() || self.n_cells.is_empty() {
            return Err(Error::Config("parameter lists must be nonempty".into()));
        }
        if self.output_times.len() < 2 {
            return Err(Error::Config("need at least two output times".into()));
        }
        let mut prev = f64::NEG_INFINITY;
        for &t in &self.output_times {
            if !(t >= 0.0 && t <= self.horizon + 1e-12) {
                return Err(Error::Config(format!(
                    "output time {t} outside [0, {}]",
                    self.horizon
                )));
            }
            if t <= prev {
                return Err(Error::Config(
                    "output times must be strictly increasing".into(),
                ));
            }
            prev = t;
        }
        // Presets must resolve (flux-table and datum files are checked
        // when the point actually runs).
        let f = match &self.flux {
            FluxSpec::Custom(_) => FluxModel::traffic(),
            other => other.build()?,
        };
        self.path.build(&f)?;
        if let InitialSpec::Constant(v) = self.initial {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!(
                    "initial constant {v} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// `linspace a b n` or an explicit whitespace-separated list.
fn parse_output_times(s: &str) -> Result<Vec<f64>> {
    let toks: Vec<&str> = s.split_whitespace().collect();
    if toks.first() == Some(&"linspace") {
        if toks.len() != 4 {
            return Err(Error::Config(format!(
                "expected `linspace t0 t1 count`, got `{s}`"
            )));
        }
        let t0 = parse_f64(toks[1]).map_err(Error::Config)?;
        let t1 = parse_f64(toks[2]).map_err(Error::Config)?;
        let count: usize = toks[3]
            .parse()
            .map_err(|_| Error::Config(format!("`{}` is not a whole number", toks[3])))?;
        if count < 2 || !(t1 > t0) {
            return Err(Error::Config(format!(
                "linspace needs t1 > t0 and count ≥ 2, got `{s}`"
            )));
        }
        Ok(linspace(t0, t1, count))
    } else {
        let mut out = Vec::new();
        for tok in toks {
            out.push(parse_f64(tok).map_err(Error::Config)?);
        }
        if out.is_empty() {
            return Err(Error::Config("empty output_times".into()));
        }
        Ok(out)
    }
}

pub(crate) fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    let n = count.max(2);
    (0..n)
        .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
        .collect()
}
