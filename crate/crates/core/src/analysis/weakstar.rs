//! Weak-star distance between a trajectory and a reference field.
//!
//! Strong (L¹) distance cannot converge for solutions that develop
//! ε-scale oscillations or free shock positions; the meaningful
//! notion is convergence of space-time averages against a fixed
//! dictionary of test functions.  `weak_star_error` reports both the
//! dictionary seminorm and the raw space-time L¹ distance so the two
//! topologies can be compared side by side: an oscillatory field has
//! an O(1) L¹ distance to its local average while its dictionary
//! error vanishes with the oscillation scale.

use crate::error::{Error, Result};
use crate::field::Trajectory;

type TestFn = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A fixed family of space-time test functions on `[t0,t1] × [0,1]`.
pub struct TestDictionary {
    names: Vec<String>,
    functions: Vec<TestFn>,
}

impl std::fmt::Debug for TestDictionary {
    fn fmt(&self, fmt: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fmt.debug_struct("TestDictionary")
            .field("size", &self.functions.len())
            .field("names", &self.names)
            .finish()
    }
}

fn hat(x: f64, center: f64, half_width: f64) -> f64 {
    (1.0 - (x - center).abs() / half_width).max(0.0)
}

impl TestDictionary {
    /// The standard 25-function dictionary on the window `[t0, t1]`:
    /// 15 tensor hats (5 spatial centers × 3 temporal centers) and the
    /// 10 space-time monomials of total degree ≤ 3 in `(x, t̂)`, where
    /// `t̂ = (t − t0)/(t1 − t0)`.
    pub fn v1(t0: f64, t1: f64) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(Error::InvalidParameter(format!(
                "test dictionary needs a nonempty window, got [{t0}, {t1}]"
            )));
        }
        let span = t1 - t0;
        let mut names = Vec::new();
        let mut functions: Vec<TestFn> = Vec::new();

        for i in 1..=5_usize {
            for j in 1..=3_usize {
                let xc = i as f64 / 6.0;
                let tc = j as f64 / 4.0;
                names.push(format!("hat_x{i}_t{j}"));
                functions.push(Box::new(move |t: f64, x: f64| {
                    let th = (t - t0) / span;
                    hat(x, xc, 1.0 / 6.0) * hat(th, tc, 0.25)
                }));
            }
        }
        let monomials: [(&str, u32, u32); 10] = [
            ("one", 0, 0),
            ("x", 1, 0),
            ("t", 0, 1),
            ("x2", 2, 0),
            ("xt", 1, 1),
            ("t2", 0, 2),
            ("x3", 3, 0),
            ("x2t", 2, 1),
            ("xt2", 1, 2),
            ("t3", 0, 3),
        ];
        for (name, px, pt) in monomials {
            names.push(name.to_string());
            functions.push(Box::new(move |t: f64, x: f64| {
                let th = (t - t0) / span;
                x.powi(px as i32) * th.powi(pt as i32)
            }));
        }
        Ok(TestDictionary { names, functions })
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn eval(&self, i: usize, t: f64, x: f64) -> f64 {
        (self.functions[i])(t, x)
    }
}

/// Weak-star and strong distances of a trajectory to a reference.
#[derive(Debug, Clone)]
pub struct WeakStarError {
    /// `max_φ |∬ (u − ref) φ dx dt|` over the dictionary.
    pub weak: f64,
    /// Raw space-time L¹ distance `∬ |u − ref| dx dt`.
    pub l1: f64,
    /// Dictionary entry realizing the maximum.
    pub worst_function: String,
}

/// Evaluate both distances over `[t0, t1]` (midpoint rule in space,
/// trapezoidal in time over the snapshots found in the window).
pub fn weak_star_error(
    traj: &Trajectory,
    reference: impl Fn(f64, f64) -> f64,
    dict: &TestDictionary,
    t0: f64,
    t1: f64,
) -> Result<WeakStarError> {
    if dict.is_empty() {
        return Err(Error::InvalidParameter("empty test dictionary".into()));
    }
    let snaps = traj.snapshots_in(t0, t1);
    if snaps.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 snapshots in [{t0}, {t1}], found {}",
            snaps.len()
        )));
    }
    let grid = snaps[0].grid();
    let dx = grid.dx();
    let centers: Vec<f64> = grid.centers().collect();
    let times: Vec<f64> = snaps.iter().map(|s| s.time()).collect();
    let diffs: Vec<Vec<f64>> = snaps
        .iter()
        .map(|s| {
            s.values()
                .iter()
                .zip(centers.iter())
                .map(|(u, &x)| u - reference(s.time(), x))
                .collect()
        })
        .collect();

    let mut weak = 0.0_f64;
    let mut worst = 0;
    for i in 0..dict.len() {
        // Spatial pairing at each snapshot, then trapezoid in time.
        let inner: Vec<f64> = times
            .iter()
            .zip(diffs.iter())
            .map(|(&t, row)| {
                row.iter()
                    .zip(centers.iter())
                    .map(|(d, &x)| d * dict.eval(i, t, x))
                    .sum::<f64>()
                    * dx
            })
            .collect();
        let mut total = 0.0;
        for k in 0..times.len() - 1 {
            total += 0.5 * (inner[k] + inner[k + 1]) * (times[k + 1] - times[k]);
        }
        if total.abs() > weak {
            weak = total.abs();
            worst = i;
        }
    }
    let l1 = traj.space_time_l1_vs(&reference, t0, t1)?;
    Ok(WeakStarError {
        weak,
        l1,
        worst_function: dict.name(worst).to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{CellField, GridSpec};

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
    fn dictionary_has_the_advertised_shape() {
        let dict = TestDictionary::v1(0.0, 1.0).unwrap();
        assert_eq!(dict.len(), 25);
        // Hats vanish at the window boundary and peak at their knot.
        assert_eq!(dict.eval(0, 0.0, 1.0 / 6.0), 0.0); // t̂ = 0 kills the time hat
        assert!((dict.eval(0, 0.25, 1.0 / 6.0) - 1.0).abs() <= 1e-15);
        // Monomial `one` is identically 1.
        let one = (0..dict.len()).find(|&i| dict.name(i) == "one").unwrap();
        assert_eq!(dict.eval(one, 0.37, 0.88), 1.0);
        assert!(TestDictionary::v1(1.0, 1.0).is_err());
    }

    #[test]
    fn identical_fields_have_zero_error() {
        let grid = GridSpec::new(50).unwrap();
        let field = CellField::constant(grid, 0.0, 0.4);
        let traj = frozen(&field, &times());
        let dict = TestDictionary::v1(0.0, 1.0).unwrap();
        let err = weak_star_error(&traj, |_, _| 0.4, &dict, 0.0, 1.0).unwrap();
        assert!(err.weak <= 1e-14);
        assert!(err.l1 <= 1e-14);
    }

    #[test]
    fn oscillations_vanish_weakly_but_not_strongly() {
        let scale = 0.01;
        let grid = GridSpec::new(2000).unwrap();
        let field = CellField::from_fn(grid, 0.0, |x| 0.5 + 0.5 * (x / scale).sin());
        let traj = frozen(&field, &times());
        let dict = TestDictionary::v1(0.0, 1.0).unwrap();
        let err = weak_star_error(&traj, |_, _| 0.5, &dict, 0.0, 1.0).unwrap();
        assert!(
            err.weak <= 4.0 * scale,
            "weak error {} exceeds 4·scale = {}",
            err.weak,
            4.0 * scale
        );
        // Strong distance stays at the mean of |0.5 sin| = 1/π.
        assert!(err.l1 >= 0.25, "l1 = {}", err.l1);
        assert!((err.l1 - std::f64::consts::FRAC_1_PI).abs() <= 0.02);
    }

    #[test]
    fn weak_error_shrinks_with_the_oscillation_scale() {
        let dict = TestDictionary::v1(0.0, 1.0).unwrap();
        let mut errors = Vec::new();
        for &scale in &[0.04, 0.02, 0.01, 0.005] {
            let grid = GridSpec::new(4000).unwrap();
            let field = CellField::from_fn(grid, 0.0, |x| 0.5 + 0.5 * (x / scale).sin());
            let traj = frozen(&field, &times());
            let err = weak_star_error(&traj, |_, _| 0.5, &dict, 0.0, 1.0).unwrap();
            assert!(err.weak <= 4.0 * scale, "scale {scale}: weak {}", err.weak);
            assert!(err.l1 >= 0.25, "scale {scale}: l1 {}", err.l1);
            errors.push(err.weak);
        }
        assert!(
            errors[3] < errors[0],
            "weak errors failed to shrink: {errors:?}"
        );
    }

    #[test]
    fn too_few_snapshots_fail() {
        let grid = GridSpec::new(50).unwrap();
        let field = CellField::constant(grid, 0.0, 0.4);
        let traj = frozen(&field, &[0.0]);
        let dict = TestDictionary::v1(0.0, 1.0).unwrap();
        assert!(weak_star_error(&traj, |_, _| 0.4, &dict, 0.0, 1.0).is_err());
    }
}
