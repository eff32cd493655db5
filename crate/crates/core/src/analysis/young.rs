//! Young-measure estimation from space-time windows of trajectories.
//!
//! In the vanishing-ε limit the solution family converges only
//! weak-star; the persistent object is the Young measure ν_{t,x}, a
//! probability measure over states.  Near a free shock the limit is a
//! two-atom mixture (1−f)·δ_{z_low} + f·δ_{z_high}.  The estimator
//! histograms all cell values inside a window, locates at most two
//! atoms (hinted or found as separated histogram modes), and reports
//! atom positions, masses, the upper-atom fraction, and the windowed
//! mean flux (the estimate of ∫J dν).
//!
//! The estimate is a function of the multiset of sampled values only:
//! samples are sorted before any accumulation, so permuting the input
//! trajectories changes nothing, bit for bit.

use crate::defaults;
use crate::error::{Error, Result};
use crate::field::Trajectory;
use crate::flux::FluxModel;

/// A closed space-time window `[t0,t1] × [x0,x1]`.
#[derive(Debug, Clone, Copy)]
pub struct WindowGeometry {
    pub t0: f64,
    pub t1: f64,
    pub x0: f64,
    pub x1: f64,
}

impl WindowGeometry {
    pub fn new(t0: f64, t1: f64, x0: f64, x1: f64) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite() && x0.is_finite() && x1.is_finite()) {
            return Err(Error::InvalidParameter(
                "window bounds must be finite".into(),
            ));
        }
        if t1 < t0 {
            return Err(Error::InvalidParameter(format!(
                "window time range is empty: [{t0}, {t1}]"
            )));
        }
        if x1 < x0 {
            return Err(Error::InvalidParameter(format!(
                "window space range is empty: [{x0}, {x1}]"
            )));
        }
        Ok(Self { t0, t1, x0, x1 })
    }

    fn contains_time(&self, t: f64) -> bool {
        t >= self.t0 && t <= self.t1
    }

    fn contains_point(&self, x: f64) -> bool {
        x >= self.x0 && x <= self.x1
    }
}

/// Estimated one-point statistics of the state distribution in a window.
#[derive(Debug, Clone)]
pub struct YoungMeasureEstimate {
    /// Mass per bin on a uniform partition of `[0,1]`; sums to 1.
    pub histogram: Vec<f64>,
    /// Detected atoms as `(position, mass)`, sorted by position.
    pub atoms: Vec<(f64, f64)>,
    /// Fraction of atom mass sitting at the upper atom.
    pub upper_fraction: f64,
    /// Sample mass not captured by any atom window.
    pub residual_mass: f64,
    pub sample_count: usize,
    /// Sample mean of `J(u)` — the estimate of the measure's flux.
    pub mean_flux: f64,
}

/// Estimate the Young measure of `trajs` restricted to `window`.
///
/// `atom_hint` supplies the two expected atom locations (low, high)
/// when the exact profile is known; without it the two strongest
/// histogram modes at least three bins apart are used.  Mass within
/// [`defaults::ATOM_TOL`] of a candidate is assigned to it (nearest
/// candidate wins) and the atom position is refined to the mean of the
/// assigned samples.
pub fn young_measure(
    trajs: &[&Trajectory],
    window: WindowGeometry,
    atom_hint: Option<(f64, f64)>,
    f: &FluxModel,
) -> Result<YoungMeasureEstimate> {
    let mut samples: Vec<f64> = Vec::new();
    for traj in trajs {
        let centers: Vec<f64> = traj.grid()?.centers().collect();
        for snap in traj.snapshots() {
            if !window.contains_time(snap.time()) {
                continue;
            }
            for (value, center) in snap.values().iter().zip(centers.iter()) {
                if window.contains_point(*center) {
                    if !value.is_finite() {
                        return Err(Error::InvalidParameter(
                            "trajectory contains a non-finite value".into(),
                        ));
                    }
                    samples.push(*value);
                }
            }
        }
    }
    if samples.len() < defaults::YOUNG_MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "window holds {} samples; at least {} are required",
            samples.len(),
            defaults::YOUNG_MIN_SAMPLES
        )));
    }
    // Permutation invariance: reduce to the sorted multiset of values
    // before any floating-point accumulation.
    samples.sort_by(f64::total_cmp);
    let n = samples.len();
    let weight = 1.0 / n as f64;

    let bins = defaults::YOUNG_BINS;
    let mut histogram = vec![0.0; bins];
    let mut flux_sum = 0.0;
    for &u in &samples {
        let idx = ((u.clamp(0.0, 1.0) * bins as f64) as usize).min(bins - 1);
        histogram[idx] += weight;
        flux_sum += f.j(u.clamp(0.0, 1.0));
    }
    let mean_flux = flux_sum / n as f64;

    let candidates = match atom_hint {
        Some((a, b)) => {
            for (label, v) in [("atom hint (low)", a), ("atom hint (high)", b)] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::domain(label, v, 0.0, 1.0));
                }
            }
            if a <= b {
                vec![a, b]
            } else {
                vec![b, a]
            }
        }
        None => histogram_modes(&histogram, bins),
    };

    // Assign each sample to the nearest candidate within the capture
    // radius; refine every non-empty candidate to its sample mean.
    let mut mass = vec![0.0_f64; candidates.len()];
    let mut mean = vec![0.0_f64; candidates.len()];
    for &u in &samples {
        let mut best: Option<(usize, f64)> = None;
        for (i, &c) in candidates.iter().enumerate() {
            let d = (u - c).abs();
            if d <= defaults::ATOM_TOL && best.map_or(true, |(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        if let Some((i, _)) = best {
            mass[i] += weight;
            mean[i] += u;
        }
    }
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    for i in 0..candidates.len() {
        if mass[i] > 0.0 {
            let count = (mass[i] * n as f64).round().max(1.0);
            atoms.push((mean[i] / count, mass[i]));
        }
    }
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));

    let captured: f64 = atoms.iter().map(|&(_, m)| m).sum();
    let residual_mass = (1.0 - captured).max(0.0);
    let upper_fraction = match atoms.len() {
        0 => 0.0,
        1 => {
            if atoms[0].0 >= f.maximizer() {
                1.0
            } else {
                0.0
            }
        }
        _ => {
            let upper = atoms[atoms.len() - 1].1;
            if captured > 0.0 {
                upper / captured
            } else {
                0.0
            }
        }
    };

    Ok(YoungMeasureEstimate {
        histogram,
        atoms,
        upper_fraction,
        residual_mass,
        sample_count: n,
        mean_flux,
    })
}

/// Strongest mode, then the strongest mode at least three bins away.
/// Returns bin centers; a vanishing second mode is dropped later by
/// the zero-mass filter.
fn histogram_modes(histogram: &[f64], bins: usize) -> Vec<f64> {
    let center = |i: usize| (i as f64 + 0.5) / bins as f64;
    let mut first = 0;
    for i in 1..bins {
        if histogram[i] > histogram[first] {
            first = i;
        }
    }
    let mut second: Option<usize> = None;
    for i in 0..bins {
        if i.abs_diff(first) >= 3 && histogram[i] > 0.0 {
            if second.map_or(true, |s| histogram[i] > histogram[s]) {
                second = Some(i);
            }
        }
    }
    let mut out = vec![center(first)];
    if let Some(s) = second {
        out.push(center(s));
    }
    out.sort_by(f64::total_cmp);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{CellField, GridSpec};

    fn traffic() -> FluxModel {
        FluxModel::traffic()
    }

    /// A frozen trajectory: the same values pushed at several times.
    fn frozen(field: &CellField, times: &[f64]) -> Trajectory {
        let mut traj = Trajectory::new(0.1, 0.9);
        for &t in times {
            let snap =
                CellField::from_values(field.grid(), t, field.values().to_vec()).unwrap();
            traj.push_snapshot(snap).unwrap();
        }
        traj
    }

    fn times() -> Vec<f64> {
        (0..=10).map(|k| 0.1 * k as f64).collect()
    }

    #[test]
    fn constant_field_is_a_single_atom() {
        let f = traffic();
        let grid = GridSpec::new(100).unwrap();
        let field = CellField::constant(grid, 0.0, 0.4);
        let traj = frozen(&field, &times());
        let window = WindowGeometry::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let est = young_measure(&[&traj], window, None, &f).unwrap();
        assert_eq!(est.sample_count, 1100);
        assert_eq!(est.atoms.len(), 1);
        assert!((est.atoms[0].0 - 0.4).abs() <= 1e-12);
        assert!((est.atoms[0].1 - 1.0).abs() <= 1e-12);
        assert!(est.residual_mass <= 1e-12);
        assert_eq!(est.upper_fraction, 0.0);
        assert!((est.mean_flux - 0.24).abs() <= 1e-12);
        let total: f64 = est.histogram.iter().sum();
        assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn shock_window_sides_give_pure_atoms() {
        let f = traffic();
        let grid = GridSpec::new(100).unwrap();
        let field = CellField::riemann(grid, 0.0, 0.3, 0.7, 0.4);
        let traj = frozen(&field, &times());
        let left = WindowGeometry::new(0.0, 1.0, 0.0, 0.35).unwrap();
        let est = young_measure(&[&traj], left, Some((0.3, 0.7)), &f).unwrap();
        assert_eq!(est.atoms.len(), 1);
        assert!((est.atoms[0].0 - 0.3).abs() <= 1e-12);
        assert_eq!(est.upper_fraction, 0.0);

        let right = WindowGeometry::new(0.0, 1.0, 0.45, 1.0).unwrap();
        let est = young_measure(&[&traj], right, Some((0.3, 0.7)), &f).unwrap();
        assert_eq!(est.atoms.len(), 1);
        assert!((est.atoms[0].0 - 0.7).abs() <= 1e-12);
        assert_eq!(est.upper_fraction, 1.0);
    }

    #[test]
    fn straddling_window_recovers_the_mixture_and_its_flux() {
        let f = traffic();
        let grid = GridSpec::new(100).unwrap();
        // Jump at x = 0.4: 40 cells low, 60 cells high.
        let field = CellField::riemann(grid, 0.0, 0.3, 0.7, 0.4);
        let traj = frozen(&field, &times());
        let window = WindowGeometry::new(0.0, 1.0, 0.0, 1.0).unwrap();
        for hint in [Some((0.3, 0.7)), None] {
            let est = young_measure(&[&traj], window, hint, &f).unwrap();
            assert_eq!(est.atoms.len(), 2, "hint = {hint:?}");
            assert!((est.atoms[0].0 - 0.3).abs() <= 1e-12);
            assert!((est.atoms[1].0 - 0.7).abs() <= 1e-12);
            assert!((est.atoms[0].1 - 0.4).abs() <= 1e-12);
            assert!((est.atoms[1].1 - 0.6).abs() <= 1e-12);
            assert!((est.upper_fraction - 0.6).abs() <= 1e-12);
            assert!(est.residual_mass <= 1e-12);
            // Both atoms share the flux value 0.21, so the measure's
            // flux equals it regardless of the mixture fraction.
            assert!((est.mean_flux - 0.21).abs() <= 1e-12);
        }
    }

    #[test]
    fn estimate_is_invariant_under_trajectory_permutation() {
        let f = traffic();
        let grid = GridSpec::new(60).unwrap();
        let a = frozen(
            &CellField::riemann(grid, 0.0, 0.3, 0.7, 0.5),
            &times(),
        );
        let b = frozen(
            &CellField::riemann(grid, 0.0, 0.3, 0.7, 0.2),
            &times(),
        );
        let window = WindowGeometry::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let e1 = young_measure(&[&a, &b], window, Some((0.3, 0.7)), &f).unwrap();
        let e2 = young_measure(&[&b, &a], window, Some((0.3, 0.7)), &f).unwrap();
        assert_eq!(e1.sample_count, e2.sample_count);
        assert_eq!(e1.mean_flux.to_bits(), e2.mean_flux.to_bits());
        assert_eq!(e1.upper_fraction.to_bits(), e2.upper_fraction.to_bits());
        assert_eq!(e1.atoms.len(), e2.atoms.len());
        for (x, y) in e1.atoms.iter().zip(e2.atoms.iter()) {
            assert_eq!(x.0.to_bits(), y.0.to_bits());
            assert_eq!(x.1.to_bits(), y.1.to_bits());
        }
        for (x, y) in e1.histogram.iter().zip(e2.histogram.iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn atom_positions_are_refined_within_the_capture_radius() {
        let f = traffic();
        let grid = GridSpec::new(100).unwrap();
        // States sit 0.01 off the hinted locations.
        let field = CellField::riemann(grid, 0.0, 0.31, 0.69, 0.5);
        let traj = frozen(&field, &times());
        let window = WindowGeometry::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let est = young_measure(&[&traj], window, Some((0.3, 0.7)), &f).unwrap();
        assert_eq!(est.atoms.len(), 2);
        assert!((est.atoms[0].0 - 0.31).abs() <= 1e-12);
        assert!((est.atoms[1].0 - 0.69).abs() <= 1e-12);
        assert!(est.residual_mass <= 1e-12);
    }

    #[test]
    fn sparse_windows_are_rejected() {
        let f = traffic();
        let grid = GridSpec::new(10).unwrap();
        let field = CellField::constant(grid, 0.0, 0.4);
        let traj = frozen(&field, &[0.0]);
        let window = WindowGeometry::new(0.0, 1.0, 0.0, 1.0).unwrap();
        assert!(young_measure(&[&traj], window, None, &f).is_err());
    }

    #[test]
    fn degenerate_windows_are_rejected() {
        assert!(WindowGeometry::new(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(WindowGeometry::new(0.0, 1.0, 0.5, 0.2).is_err());
        assert!(WindowGeometry::new(0.0, f64::NAN, 0.0, 1.0).is_err());
    }
}
