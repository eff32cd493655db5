//! Concave flux models on the unit interval.
//!
//! A flux `J : [0,1] → ℝ` enters every layer of the laboratory.  The
//! standing assumptions are `J ∈ C²`, strict concavity (`J″ < 0`) and
//! `J(0) = J(1) = 0`; they force a unique interior maximizer `m` with
//! peak value `jmax = J(m)`.  Each `u ≠ m` then has a *conjugate* value
//! `u*` on the other side of `m` carrying the same flux, `J(u*) = J(u)`,
//! and each level `y ∈ [0, jmax]` has exactly two branch preimages
//! `u₁(y) ≤ m ≤ u₂(y)`.
//!
//! The reference model is the traffic flux `J(u) = u(1−u)` with
//! `m = 1/2`, `jmax = 1/4` and `u* = 1 − u`; under the affine change of
//! variables `v = 1 − 2u` it is equivalent to the Burgers flux.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{bisect, CubicSpline};

/// Number of sample panels used by the validation scans.
const VALIDATION_PANELS: usize = 1024;
/// Absolute tolerance on the root conditions `J(0) = J(1) = 0`.
const ROOT_TOL: f64 = 1e-12;
/// Bracket width for the internal bisections (maximizer, conjugates,
/// branch inverses).
const BISECT_XTOL: f64 = 1e-14;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A validated concave flux model.  Immutable after construction and
/// cheap to clone/share across threads.
#[derive(Clone)]
pub struct FluxModel {
    name: String,
    eval: ScalarFn,
    deriv: ScalarFn,
    maximizer: f64,
    max_value: f64,
    max_char_speed: f64,
    /// Closed-form conjugate map when the model has one (the built-in
    /// symmetric fluxes use `u* = 1 − u` exactly); `None` falls back
    /// to branch-inverse bisection.
    conjugate_exact: Option<ScalarFn>,
}

impl fmt::Debug for FluxModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FluxModel")
            .field("name", &self.name)
            .field("maximizer", &self.maximizer)
            .field("max_value", &self.max_value)
            .field("max_char_speed", &self.max_char_speed)
            .finish()
    }
}

impl FluxModel {
    /// The traffic flux `J(u) = u(1−u)` with exact `m = 1/2`,
    /// `jmax = 1/4`.
    pub fn traffic() -> Self {
        FluxModel {
            name: "traffic".into(),
            eval: Arc::new(|u: f64| u * (1.0 - u)),
            deriv: Arc::new(|u: f64| 1.0 - 2.0 * u),
            maximizer: 0.5,
            max_value: 0.25,
            max_char_speed: 1.0,
            conjugate_exact: Some(Arc::new(|u: f64| 1.0 - u)),
        }
    }

    /// The sine flux `J(u) = sin(πu)` with exact `m = 1/2`, `jmax = 1`.
    pub fn sine() -> Self {
        FluxModel {
            name: "sine".into(),
            eval: Arc::new(|u: f64| (std::f64::consts::PI * u).sin()),
            deriv: Arc::new(|u: f64| {
                std::f64::consts::PI * (std::f64::consts::PI * u).cos()
            }),
            maximizer: 0.5,
            max_value: 1.0,
            max_char_speed: std::f64::consts::PI,
            conjugate_exact: Some(Arc::new(|u: f64| 1.0 - u)),
        }
    }

    /// Build a flux model from user closures for `J` and `J′`, running
    /// the full validation: roots at 0 and 1 within `1e−12`, strict
    /// concavity on a 1024-triple midpoint scan, derivative/value
    /// consistency, and an interior maximizer.
    pub fn concave(
        name: &str,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::validated(name.to_string(), Arc::new(eval), Arc::new(deriv))
    }

    /// Build a flux model from a tabulated `(u, J)` relation via a
    /// not-a-knot cubic spline, then validate like [`FluxModel::concave`].
    /// The table must be strictly increasing in `u` and cover `[0,1]`.
    pub fn from_table(name: &str, us: &[f64], js: &[f64]) -> Result<Self> {
        if us.is_empty() || (us[0]).abs() > 1e-9 || (us[us.len() - 1] - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidFlux(format!(
                "flux table must cover [0,1]; got u range [{:?}, {:?}]",
                us.first(),
                us.last()
            )));
        }
        let spline = Arc::new(
            CubicSpline::new(us, js)
                .map_err(|e| Error::InvalidFlux(format!("flux table rejected: {e}")))?,
        );
        let sp_eval = Arc::clone(&spline);
        let sp_deriv = spline;
        Self::validated(
            name.to_string(),
            Arc::new(move |u: f64| sp_eval.eval(u)),
            Arc::new(move |u: f64| sp_deriv.eval_deriv(u)),
        )
    }

    fn validated(name: String, eval: ScalarFn, deriv: ScalarFn) -> Result<Self> {
        let j = |u: f64| (eval)(u);
        let jp = |u: f64| (deriv)(u);

        for (label, v) in [("J(0)", j(0.0)), ("J(1)", j(1.0))] {
            if !(v.abs() <= ROOT_TOL) {
                return Err(Error::InvalidFlux(format!(
                    "{label} = {v} but roots at 0 and 1 are required (tol {ROOT_TOL})"
                )));
            }
        }

        let h = 1.0 / VALIDATION_PANELS as f64;
        for k in 0..=VALIDATION_PANELS {
            let u = k as f64 * h;
            let v = j(u);
            if !v.is_finite() || v < -ROOT_TOL {
                return Err(Error::InvalidFlux(format!(
                    "J({u}) = {v}; the flux must be finite and nonnegative on [0,1]"
                )));
            }
        }
        // Strict concavity: every midpoint lies strictly above the chord.
        for k in 0..VALIDATION_PANELS {
            let a = k as f64 * h;
            let b = a + h;
            let mid = 0.5 * (a + b);
            let uplift = j(mid) - 0.5 * (j(a) + j(b));
            if !(uplift > 0.0) {
                return Err(Error::InvalidFlux(format!(
                    "concavity scan failed on [{a}, {b}]: midpoint uplift {uplift} ≤ 0"
                )));
            }
        }
        // Light consistency check between the supplied derivative and a
        // difference quotient of the values.
        for k in 1..8 {
            let u = k as f64 / 8.0;
            let fd = (j(u + 1e-6) - j(u - 1e-6)) / 2e-6;
            let d = jp(u);
            if (d - fd).abs() > 1e-4 * (1.0 + d.abs()) {
                return Err(Error::InvalidFlux(format!(
                    "derivative inconsistent with values at u = {u}: J′ = {d}, difference quotient = {fd}"
                )));
            }
        }

        let (d0, d1) = (jp(0.0), jp(1.0));
        if !(d0 > 0.0 && d1 < 0.0) {
            return Err(Error::InvalidFlux(format!(
                "maximizer must be interior: J′(0) = {d0}, J′(1) = {d1}"
            )));
        }
        // J′ is strictly decreasing, so bisection pins the maximizer.
        let maximizer = bisect(&jp, 0.0, 1.0, BISECT_XTOL, 200)
            .map_err(|e| Error::InvalidFlux(format!("maximizer search failed: {e}")))?;
        let max_value = j(maximizer);

        let mut max_char_speed = d0.abs().max(d1.abs());
        for k in 0..=VALIDATION_PANELS {
            max_char_speed = max_char_speed.max(jp(k as f64 * h).abs());
        }

        Ok(FluxModel {
            name,
            eval,
            deriv,
            maximizer,
            max_value,
            max_char_speed,
            conjugate_exact: None,
        })
    }

    /// Model name (used in configs and reports).
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Evaluate `J(u)`.  Arguments outside `[0,1]` are clamped to the
    /// nearest endpoint; use [`FluxModel::j_checked`] to treat that as
    /// an error instead.
    pub fn j(&self, u: f64) -> f64 {
        (self.eval)(u.clamp(0.0, 1.0))
    }

    /// Evaluate `J(u)`, rejecting arguments outside `[0,1]`.
    pub fn j_checked(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::domain("flux argument", u, 0.0, 1.0));
        }
        Ok((self.eval)(u))
    }

    /// Evaluate `J′(u)` (clamped like [`FluxModel::j`]).
    pub fn j_prime(&self, u: f64) -> f64 {
        (self.deriv)(u.clamp(0.0, 1.0))
    }

    /// The unique interior maximizer `m` of `J`.
    pub fn maximizer(&self) -> f64 {
        self.maximizer
    }

    /// The peak flux value `jmax = J(m)`.
    pub fn max_value(&self) -> f64 {
        self.max_value
    }

    /// `max |J′|` over `[0,1]` — the CFL speed bound.
    pub fn max_char_speed(&self) -> f64 {
        self.max_char_speed
    }

    /// The conjugate value `u*` on the other side of the maximizer with
    /// `J(u*) = J(u)`; `m* = m`.
    pub fn conjugate(&self, u: f64) -> Result<f64> {
        if !(-1e-12..=1.0 + 1e-12).contains(&u) {
            return Err(Error::domain("conjugate argument", u, 0.0, 1.0));
        }
        let u = u.clamp(0.0, 1.0);
        if let Some(conj) = &self.conjugate_exact {
            return Ok(conj(u).clamp(0.0, 1.0));
        }
        if u < self.maximizer {
            self.branch_high(self.j(u))
        } else if u > self.maximizer {
            self.branch_low(self.j(u))
        } else {
            Ok(self.maximizer)
        }
    }

    /// Lower branch inverse `u₁(y) ∈ [0, m]` of `J`.
    pub fn branch_low(&self, y: f64) -> Result<f64> {
        let y = self.check_level(y)?;
        // J − y changes sign from J(0) − y ≤ 0 to jmax − y ≥ 0.
        if y <= self.j(0.0) {
            return Ok(0.0);
        }
        bisect(
            |u| self.j(u) - y,
            0.0,
            self.maximizer,
            BISECT_XTOL,
            200,
        )
    }

    /// Upper branch inverse `u₂(y) ∈ [m, 1]` of `J`.
    pub fn branch_high(&self, y: f64) -> Result<f64> {
        let y = self.check_level(y)?;
        if y <= self.j(1.0) {
            return Ok(1.0);
        }
        bisect(
            |u| y - self.j(u),
            self.maximizer,
            1.0,
            BISECT_XTOL,
            200,
        )
    }

    /// Both branch inverses `(u₁(y), u₂(y))` of a flux level
    /// `y ∈ [0, jmax]`.
    pub fn branches(&self, y: f64) -> Result<(f64, f64)> {
        Ok((self.branch_low(y)?, self.branch_high(y)?))
    }

    fn check_level(&self, y: f64) -> Result<f64> {
        if !(-1e-12..=self.max_value + 1e-12).contains(&y) {
            return Err(Error::domain("flux level", y, 0.0, self.max_value));
        }
        Ok(y.clamp(0.0, self.max_value))
    }
}

/// Map a Burgers-variable state `v = 1 − 2u` back to a traffic-variable
/// state `u ∈ [0,1]`.
pub fn burgers_to_traffic(v: f64) -> f64 {
    0.5 * (1.0 - v)
}

/// Map a traffic-variable state to the Burgers variable `v = 1 − 2u`.
pub fn traffic_to_burgers(u: f64) -> f64 {
    1.0 - 2.0 * u
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Closed-form branch inverses of the traffic flux: the roots of
    /// `u(1−u) = y` are `(1 ± √(1−4y))/2`.
    fn traffic_branches_closed_form(y: f64) -> (f64, f64) {
        let s = (1.0 - 4.0 * y).max(0.0).sqrt();
        (0.5 * (1.0 - s), 0.5 * (1.0 + s))
    }

    #[test]
    fn traffic_reference_values() {
        let f = FluxModel::traffic();
        assert_eq!(f.j(0.3), 0.21);
        assert_eq!(f.maximizer(), 0.5);
        assert_eq!(f.max_value(), 0.25);
        assert_eq!(f.max_char_speed(), 1.0);
        assert_eq!(f.j(0.0), 0.0);
        assert_eq!(f.j(1.0), 0.0);
    }

    #[test]
    fn traffic_conjugate_is_reflection() {
        let f = FluxModel::traffic();
        assert!((f.conjugate(0.3).unwrap() - 0.7).abs() < 1e-12);
        assert!((f.conjugate(0.9).unwrap() - 0.1).abs() < 1e-12);
        assert_eq!(f.conjugate(0.5).unwrap(), 0.5);
        assert_eq!(f.conjugate(0.0).unwrap(), 1.0);
        assert!(f.conjugate(1.2).is_err());
    }

    #[test]
    fn sine_flux_basics() {
        let f = FluxModel::sine();
        assert_eq!(f.maximizer(), 0.5);
        assert_eq!(f.max_value(), 1.0);
        assert!((f.conjugate(0.25).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn branches_match_quadratic_roots() {
        let f = FluxModel::traffic();
        for k in 0..=50 {
            let y = 0.25 * k as f64 / 50.0;
            let (lo, hi) = f.branches(y).unwrap();
            let (elo, ehi) = traffic_branches_closed_form(y);
            assert!((lo - elo).abs() < 1e-9, "y = {y}: low {lo} vs {elo}");
            assert!((hi - ehi).abs() < 1e-9, "y = {y}: high {hi} vs {ehi}");
        }
        let (lo, hi) = f.branches(0.21).unwrap();
        assert!((lo - 0.3).abs() < 1e-9 && (hi - 0.7).abs() < 1e-9);
        assert!(f.branches(0.26).is_err());
        assert!(f.branches(-0.01).is_err());
        assert_eq!(f.branches(0.0).unwrap(), (0.0, 1.0));
    }

    #[test]
    fn clamped_and_checked_evaluation() {
        let f = FluxModel::traffic();
        assert_eq!(f.j(-0.5), 0.0);
        assert_eq!(f.j(1.5), 0.0);
        assert!(f.j_checked(0.5).is_ok());
        assert!(f.j_checked(-0.5).is_err());
        assert!(f.j_checked(1.5).is_err());
    }

    #[test]
    fn concave_constructor_accepts_traffic_closures() {
        let f = FluxModel::concave("quadratic", |u| u * (1.0 - u), |u| 1.0 - 2.0 * u).unwrap();
        let reference = FluxModel::traffic();
        for k in 0..=100 {
            let u = k as f64 / 100.0;
            assert!((f.j(u) - reference.j(u)).abs() < 1e-14);
        }
        assert!((f.maximizer() - 0.5).abs() < 1e-12);
        assert!((f.max_value() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn concave_constructor_rejects_bad_roots() {
        let err = FluxModel::concave("shifted", |u| u * (1.0 - u) + 0.1 * u, |u| 1.1 - 2.0 * u);
        assert!(matches!(err, Err(Error::InvalidFlux(_))), "{err:?}");
    }

    #[test]
    fn concave_constructor_rejects_non_concave_flux() {
        // u(1−u) + sin(2πu)/(2π) vanishes at 0 and 1 but is convex near
        // u = 3/4, so the midpoint scan must reject it.
        let tau = 2.0 * std::f64::consts::PI;
        let err = FluxModel::concave(
            "wavy",
            move |u| u * (1.0 - u) + (tau * u).sin() / tau,
            move |u| 1.0 - 2.0 * u + (tau * u).cos(),
        );
        assert!(matches!(err, Err(Error::InvalidFlux(_))), "{err:?}");
    }

    #[test]
    fn table_flux_reproduces_quadratic() {
        let us: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let js: Vec<f64> = us.iter().map(|&u| u * (1.0 - u)).collect();
        let f = FluxModel::from_table("tabulated", &us, &js).unwrap();
        let reference = FluxModel::traffic();
        for k in 0..=200 {
            let u = k as f64 / 200.0;
            assert!(
                (f.j(u) - reference.j(u)).abs() < 1e-12,
                "u = {u}: {} vs {}",
                f.j(u),
                reference.j(u)
            );
        }
        assert!((f.maximizer() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn table_flux_rejects_partial_coverage() {
        let us = [0.1, 0.4, 0.7, 1.0];
        let js = [0.09, 0.24, 0.21, 0.0];
        assert!(FluxModel::from_table("partial", &us, &js).is_err());
    }

    #[test]
    fn burgers_change_of_variables() {
        assert_eq!(burgers_to_traffic(1.0), 0.0);
        assert_eq!(burgers_to_traffic(-1.0), 1.0);
        assert_eq!(traffic_to_burgers(0.5), 0.0);
        for k in 0..=20 {
            let u = k as f64 / 20.0;
            assert!((burgers_to_traffic(traffic_to_burgers(u)) - u).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn conjugate_is_an_involution(u in 0.0f64..=1.0) {
            let f = FluxModel::traffic();
            let c = f.conjugate(u).unwrap();
            prop_assert!((f.j(c) - f.j(u)).abs() < 1e-10);
            // The conjugate lands on the other side of the maximizer.
            prop_assert!((u - 0.5) * (c - 0.5) <= 1e-12);
            let back = f.conjugate(c).unwrap();
            prop_assert!((back - u).abs() < 1e-9, "u = {u}, back = {back}");
        }

        #[test]
        fn branch_inverses_are_consistent(y in 0.0f64..=0.25) {
            let f = FluxModel::traffic();
            let (lo, hi) = f.branches(y).unwrap();
            prop_assert!(lo <= 0.5 + 1e-12 && hi >= 0.5 - 1e-12);
            prop_assert!((f.j(lo) - y).abs() < 1e-10);
            prop_assert!((f.j(hi) - y).abs() < 1e-10);
            let (elo, ehi) = traffic_branches_closed_form(y);
            prop_assert!((lo - elo).abs() < 1e-8);
            prop_assert!((hi - ehi).abs() < 1e-8);
        }
    }
}
