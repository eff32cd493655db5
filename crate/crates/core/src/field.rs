//! Grids, cell-averaged fields and time-indexed trajectories.
//!
//! Space is always the unit interval `[0,1]`, discretized into `n`
//! equal finite-volume cells with centers `xᵢ = (i + ½)·dx`, `dx = 1/n`.
//! A [`CellField`] is one time slice of cell averages; a [`Trajectory`]
//! is the recorded history of a run: snapshot fields at selected output
//! times plus the per-step boundary-flux series.

use crate::error::{Error, Result};

/// A uniform finite-volume grid on `[0,1]`.
///
/// Only the cell count is stored; `dx` is derived as `1/n` on demand so
/// that `dx · n = 1` holds in the stored (rational) sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    n_cells: usize,
}

impl GridSpec {
    /// A grid with `n ≥ 4` cells.
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells < 4 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 4 cells, got {n_cells}"
            )));
        }
        Ok(GridSpec { n_cells })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.n_cells as f64
    }

    /// Center of cell `i`.
    pub fn center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx()
    }

    /// All cell centers, left to right.
    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_cells).map(|i| self.center(i))
    }

    /// Index of the cell containing `x` (clamped to the grid).
    pub fn cell_of(&self, x: f64) -> usize {
        ((x * self.n_cells as f64).floor() as isize).clamp(0, self.n_cells as isize - 1) as usize
    }
}

/// One time slice of cell averages.
#[derive(Debug, Clone)]
pub struct CellField {
    grid: GridSpec,
    time: f64,
    values: Vec<f64>,
}

impl CellField {
    /// Wrap an existing value vector (must match the grid size).
    pub fn from_values(grid: GridSpec, time: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::InvalidParameter(format!(
                "field has {} values for a {}-cell grid",
                values.len(),
                grid.n_cells()
            )));
        }
        Ok(CellField { grid, time, values })
    }

    /// Constant field `u ≡ c`.
    pub fn constant(grid: GridSpec, time: f64, c: f64) -> Self {
        CellField {
            grid,
            time,
            values: vec![c; grid.n_cells()],
        }
    }

    /// Project a function of `x` onto the grid by midpoint sampling.
    pub fn from_fn(grid: GridSpec, time: f64, f: impl Fn(f64) -> f64) -> Self {
        CellField {
            grid,
            time,
            values: grid.centers().map(f).collect(),
        }
    }

    /// Riemann data: `left` for `x < x0`, `right` for `x ≥ x0`
    /// (midpoint sampling).
    pub fn riemann(grid: GridSpec, time: f64, left: f64, right: f64, x0: f64) -> Self {
        Self::from_fn(grid, time, |x| if x < x0 { left } else { right })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Spatial mean (equals `∫₀¹ u dx` for cell averages).
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `∫₀¹ |u − v| dx` against another field on the same grid.
    pub fn l1_distance(&self, other: &CellField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::InvalidParameter(format!(
                "fields on different grids: {} vs {} cells",
                self.grid.n_cells(),
                other.grid.n_cells()
            )));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * self.grid.dx())
    }

    /// `max |u − v|` over cells of two fields on the same grid.
    pub fn linf_distance(&self, other: &CellField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::InvalidParameter(format!(
                "fields on different grids: {} vs {} cells",
                self.grid.n_cells(),
                other.grid.n_cells()
            )));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// `∫₀¹ |u − g(x)| dx` with `g` midpoint-sampled.
    pub fn l1_distance_to(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.grid
            .centers()
            .zip(&self.values)
            .map(|(x, &v)| (v - g(x)).abs())
            .sum::<f64>()
            * self.grid.dx()
    }

    /// `max |u − g(x)|` over cell centers.
    pub fn linf_distance_to(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.grid
            .centers()
            .zip(&self.values)
            .map(|(x, &v)| (v - g(x)).abs())
            .fold(0.0, f64::max)
    }
}

/// One recorded time step's boundary fluxes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxSample {
    /// Beginning-of-step time.
    pub t: f64,
    /// Step size actually taken.
    pub dt: f64,
    /// Flux through the left boundary `x = 0`.
    pub f_left: f64,
    /// Flux through the right boundary `x = 1`.
    pub f_right: f64,
}

/// The recorded history of a run: snapshots at output times plus the
/// per-step boundary-flux series.
#[derive(Debug, Clone)]
pub struct Trajectory {
    epsilon: f64,
    cfl: f64,
    snapshots: Vec<CellField>,
    fluxes: Vec<FluxSample>,
    max_ledger_residual: f64,
}

impl Trajectory {
    pub fn new(epsilon: f64, cfl: f64) -> Self {
        Trajectory {
            epsilon,
            cfl,
            snapshots: Vec::new(),
            fluxes: Vec::new(),
            max_ledger_residual: 0.0,
        }
    }

    /// Rebuild a trajectory from stored parts (snapshot times must be
    /// strictly increasing and share one grid).
    pub fn from_parts(
        epsilon: f64,
        cfl: f64,
        snapshots: Vec<CellField>,
        fluxes: Vec<FluxSample>,
    ) -> Result<Self> {
        let mut t = Trajectory::new(epsilon, cfl);
        for s in snapshots {
            t.push_snapshot(s)?;
        }
        t.fluxes = fluxes;
        Ok(t)
    }

    pub fn push_snapshot(&mut self, field: CellField) -> Result<()> {
        if let Some(last) = self.snapshots.last() {
            if field.time() <= last.time() {
                return Err(Error::InvalidParameter(format!(
                    "snapshot times must increase: {} after {}",
                    field.time(),
                    last.time()
                )));
            }
            if field.grid() != last.grid() {
                return Err(Error::InvalidParameter(
                    "all snapshots must share one grid".into(),
                ));
            }
        }
        self.snapshots.push(field);
        Ok(())
    }

    pub fn push_flux(&mut self, sample: FluxSample) {
        self.fluxes.push(sample);
    }

    pub fn record_ledger_residual(&mut self, r: f64) {
        if r > self.max_ledger_residual {
            self.max_ledger_residual = r;
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn cfl(&self) -> f64 {
        self.cfl
    }

    pub fn snapshots(&self) -> &[CellField] {
        &self.snapshots
    }

    pub fn flux_series(&self) -> &[FluxSample] {
        &self.fluxes
    }

    /// Worst per-step relative violation of the discrete conservation
    /// ledger `ε·dx·Σδu = dt·(F₀ − F₁)` seen during the run.
    pub fn max_ledger_residual(&self) -> f64 {
        self.max_ledger_residual
    }

    pub fn grid(&self) -> Result<GridSpec> {
        self.snapshots
            .first()
            .map(|s| s.grid())
            .ok_or_else(|| Error::InvalidParameter("trajectory has no snapshots".into()))
    }

    pub fn final_field(&self) -> Result<&CellField> {
        self.snapshots
            .last()
            .ok_or_else(|| Error::InvalidParameter("trajectory has no snapshots".into()))
    }

    /// Value at `(t, x)` by nearest-snapshot, containing-cell lookup —
    /// the conservative restriction used when comparing trajectories.
    pub fn eval_nearest(&self, t: f64, x: f64) -> Result<f64> {
        if self.snapshots.is_empty() {
            return Err(Error::InvalidParameter("trajectory has no snapshots".into()));
        }
        let mut best = 0;
        let mut best_gap = f64::INFINITY;
        for (k, s) in self.snapshots.iter().enumerate() {
            let gap = (s.time() - t).abs();
            if gap < best_gap {
                best_gap = gap;
                best = k;
            }
        }
        let snap = &self.snapshots[best];
        Ok(snap.values()[snap.grid().cell_of(x)])
    }

    /// Snapshots with time in `[t0, t1]` (inclusive).
    pub fn snapshots_in(&self, t0: f64, t1: f64) -> Vec<&CellField> {
        self.snapshots
            .iter()
            .filter(|s| s.time() >= t0 && s.time() <= t1)
            .collect()
    }

    /// Space-time `L¹` distance to a reference `g(t,x)` over the time
    /// window `[t0, t1]`, trapezoidal in time over the snapshots there.
    pub fn space_time_l1_vs(
        &self,
        g: impl Fn(f64, f64) -> f64,
        t0: f64,
        t1: f64,
    ) -> Result<f64> {
        let snaps = self.snapshots_in(t0, t1);
        if snaps.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "need ≥ 2 snapshots in [{t0}, {t1}], found {}",
                snaps.len()
            )));
        }
        let dist: Vec<f64> = snaps
            .iter()
            .map(|s| s.l1_distance_to(|x| g(s.time(), x)))
            .collect();
        let mut total = 0.0;
        for k in 0..snaps.len() - 1 {
            let dt = snaps[k + 1].time() - snaps[k].time();
            total += 0.5 * (dist[k] + dist[k + 1]) * dt;
        }
        Ok(total)
    }

    /// Time-averaged boundary fluxes `(F̄₀, F̄₁)` over `[t0, t1]`,
    /// weighted by the step sizes.
    pub fn time_averaged_fluxes(&self, t0: f64, t1: f64) -> Result<(f64, f64)> {
        let mut w = 0.0;
        let mut s0 = 0.0;
        let mut s1 = 0.0;
        for f in &self.fluxes {
            if f.t >= t0 && f.t + f.dt <= t1 + 1e-12 {
                w += f.dt;
                s0 += f.dt * f.f_left;
                s1 += f.dt * f.f_right;
            }
        }
        if w == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "no flux samples inside [{t0}, {t1}]"
            )));
        }
        Ok((s0 / w, s1 / w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_geometry() {
        let g = GridSpec::new(8).unwrap();
        assert_eq!(g.dx(), 0.125);
        assert_eq!(g.center(0), 0.0625);
        assert_eq!(g.center(7), 0.9375);
        assert_eq!(g.cell_of(0.0), 0);
        assert_eq!(g.cell_of(0.999), 7);
        assert_eq!(g.cell_of(1.0), 7);
        assert!(GridSpec::new(3).is_err());
    }

    #[test]
    fn midpoint_sampling_and_norms() {
        let g = GridSpec::new(100).unwrap();
        let f = CellField::from_fn(g, 0.0, |x| x);
        assert!((f.mean() - 0.5).abs() < 1e-14);
        assert!((f.l1_distance_to(|x| x)).abs() < 1e-15);
        let c = CellField::constant(g, 0.0, 0.5);
        // ∫|x − ½|dx = ¼, and midpoint sampling is exact for this integrand.
        assert!((f.l1_distance(&c).unwrap() - 0.25).abs() < 1e-12);
        assert!(f.linf_distance_to(|_| 0.5) <= 0.5);
    }

    #[test]
    fn riemann_projection_splits_at_interface() {
        let g = GridSpec::new(10).unwrap();
        let f = CellField::riemann(g, 0.0, 0.3, 0.7, 0.4);
        assert_eq!(&f.values()[..4], &[0.3; 4]);
        assert_eq!(&f.values()[4..], &[0.7; 6]);
    }

    #[test]
    fn trajectory_enforces_increasing_times() {
        let g = GridSpec::new(4).unwrap();
        let mut t = Trajectory::new(1.0, 0.9);
        t.push_snapshot(CellField::constant(g, 0.0, 0.1)).unwrap();
        t.push_snapshot(CellField::constant(g, 1.0, 0.2)).unwrap();
        assert!(t.push_snapshot(CellField::constant(g, 0.5, 0.3)).is_err());
        assert_eq!(t.snapshots().len(), 2);
    }

    #[test]
    fn space_time_l1_of_constant_gap() {
        let g = GridSpec::new(10).unwrap();
        let mut t = Trajectory::new(1.0, 0.9);
        for k in 0..=4 {
            t.push_snapshot(CellField::constant(g, k as f64, 0.8)).unwrap();
        }
        // |0.8 − 0.5| integrated over x∈[0,1], t∈[0,4].
        let d = t.space_time_l1_vs(|_, _| 0.5, 0.0, 4.0).unwrap();
        assert!((d - 1.2).abs() < 1e-12, "got {d}");
    }

    #[test]
    fn flux_averaging_weights_by_dt() {
        let mut t = Trajectory::new(1.0, 0.9);
        t.push_flux(FluxSample {
            t: 0.0,
            dt: 1.0,
            f_left: 1.0,
            f_right: 3.0,
        });
        t.push_flux(FluxSample {
            t: 1.0,
            dt: 3.0,
            f_left: 2.0,
            f_right: 3.0,
        });
        let (f0, f1) = t.time_averaged_fluxes(0.0, 4.0).unwrap();
        assert!((f0 - 1.75).abs() < 1e-15);
        assert!((f1 - 3.0).abs() < 1e-15);
        assert!(t.time_averaged_fluxes(10.0, 11.0).is_err());
    }
}
