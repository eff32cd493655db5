//! Exact quasi-static states and the variational current.
//!
//! When the boundary data vary slowly, the solution of the conservation
//! law relaxes at almost every time onto a solution of the quasi-static
//! equation `∂ₓJ(u) = 0` selected by the boundary pair
//! `(ρ₋, ρ₊) = (u(·,0), u(·,1))`.  Such a state takes at most two
//! values `z₁ ∈ [0,m]`, `z₂ ∈ [m,1]` with `J(z₁) = J(z₂)`, with at most
//! one upward jump between them, and the case analysis of the boundary
//! pair is a partition of the unit square:
//!
//! * **Case 1** — `ρ₋ < m` and `ρ₊ < ρ₋*`: the state is `≡ ρ₋`;
//! * **Case 2** — `ρ₊ > m` and `ρ₋ > ρ₊*`: the state is `≡ ρ₊`;
//! * **Case 3** — `ρ₋ ≥ m` and `ρ₊ ≤ m`: the state is `≡ m`;
//! * **critical** — `ρ₊ = ρ₋*` with `ρ₋ < m`: every single upward shock
//!   `z₁ → z₂ = z₁*` at any position `X ∈ [0,1]` is admissible, so the
//!   limit state is determined only up to the family parameter `X`.
//!
//! The flux carried by the state is the *variational current*
//!
//! ```text
//!     𝒥(ρ₋, ρ₊) = sup { J(ρ) : ρ ∈ [ρ₊, ρ₋] }   if ρ₋ ≥ ρ₊,
//!                 inf { J(ρ) : ρ ∈ [ρ₋, ρ₊] }   if ρ₋ < ρ₊,
//! ```
//!
//! which by concavity is attained at the clamp of `m` into the interval
//! (sup) or at an endpoint (inf).

use crate::defaults;
use crate::error::{Error, Result};
use crate::field::{CellField, GridSpec};
use crate::flux::FluxModel;
use crate::numerics::{smoothstep, smoothstep_deriv};

/// One side of the boundary data as a function of time.
///
/// Values are validated to stay inside `[0,1]` by the [`BoundaryPath`]
/// constructors.
#[derive(Debug, Clone, PartialEq)]
pub enum SidePath {
    /// `ρ(t) ≡ c`.
    Constant(f64),
    /// Smoothstep ramp from `from` (for `t ≤ t0`) to `to` (for
    /// `t ≥ t1`); C¹ everywhere with vanishing slope at both knots.
    Ramp {
        from: f64,
        to: f64,
        t0: f64,
        t1: f64,
    },
    /// `ρ(t) = mean + amp · sin(omega·t + phase)`.
    Sine {
        mean: f64,
        amp: f64,
        omega: f64,
        phase: f64,
    },
}

impl SidePath {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            SidePath::Constant(c) => c,
            SidePath::Ramp { from, to, t0, t1 } => {
                from + (to - from) * smoothstep((t - t0) / (t1 - t0))
            }
            SidePath::Sine {
                mean,
                amp,
                omega,
                phase,
            } => mean + amp * (omega * t + phase).sin(),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            SidePath::Constant(_) => 0.0,
            SidePath::Ramp { from, to, t0, t1 } => {
                (to - from) * smoothstep_deriv((t - t0) / (t1 - t0)) / (t1 - t0)
            }
            SidePath::Sine {
                amp, omega, phase, ..
            } => amp * omega * (omega * t + phase).cos(),
        }
    }

    /// Range `(min, max)` of the side over all times.
    pub fn range(&self) -> (f64, f64) {
        match *self {
            SidePath::Constant(c) => (c, c),
            SidePath::Ramp { from, to, .. } => (from.min(to), from.max(to)),
            SidePath::Sine { mean, amp, .. } => (mean - amp.abs(), mean + amp.abs()),
        }
    }

    fn check_well_formed(&self) -> Result<()> {
        if let SidePath::Ramp { t0, t1, .. } = *self {
            if !(t0 < t1) {
                return Err(Error::InvalidParameter(format!(
                    "ramp needs t0 < t1, got [{t0}, {t1}]"
                )));
            }
        }
        let (lo, hi) = self.range();
        if !(lo >= 0.0 && hi <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "boundary side leaves [0,1]: range [{lo}, {hi}]"
            )));
        }
        Ok(())
    }
}

/// Time-dependent boundary data `(ρ₋(t), ρ₊(t))`, both sides C¹.
#[derive(Debug, Clone)]
pub enum BoundaryPath {
    /// Independent prescriptions for the two sides.
    Pair { minus: SidePath, plus: SidePath },
    /// A dwell on the critical set: `ρ₊(t) = ρ₋(t)*` rides the
    /// conjugate of the minus side, which must stay below the flux
    /// maximizer.
    CriticalOfMinus { minus: SidePath, flux: FluxModel },
}

impl BoundaryPath {
    /// Constant pair `(a, b)`.
    pub fn constants(a: f64, b: f64) -> Result<Self> {
        Self::pair(SidePath::Constant(a), SidePath::Constant(b))
    }

    /// Independent sides, validated to stay in `[0,1]`.
    pub fn pair(minus: SidePath, plus: SidePath) -> Result<Self> {
        minus.check_well_formed()?;
        plus.check_well_formed()?;
        Ok(BoundaryPath::Pair { minus, plus })
    }

    /// Critical dwell: `ρ₊ = ρ₋*`.  The minus side must stay below
    /// `m − η` so the pair is classified critical at every time.
    pub fn critical_of_minus(minus: SidePath, flux: &FluxModel) -> Result<Self> {
        minus.check_well_formed()?;
        let (_, hi) = minus.range();
        let cap = flux.maximizer() - defaults::CRITICAL_ETA;
        if !(hi <= cap) {
            return Err(Error::InvalidParameter(format!(
                "critical dwell needs the minus side below m − η = {cap}, got max {hi}"
            )));
        }
        Ok(BoundaryPath::CriticalOfMinus {
            minus,
            flux: flux.clone(),
        })
    }

    pub fn rho_minus(&self, t: f64) -> f64 {
        match self {
            BoundaryPath::Pair { minus, .. } | BoundaryPath::CriticalOfMinus { minus, .. } => {
                minus.value(t)
            }
        }
    }

    pub fn rho_plus(&self, t: f64) -> f64 {
        match self {
            BoundaryPath::Pair { plus, .. } => plus.value(t),
            BoundaryPath::CriticalOfMinus { minus, flux } => flux
                .conjugate(minus.value(t))
                .expect("validated side stays in [0,1]"),
        }
    }

    pub fn derivative_minus(&self, t: f64) -> f64 {
        match self {
            BoundaryPath::Pair { minus, .. } | BoundaryPath::CriticalOfMinus { minus, .. } => {
                minus.derivative(t)
            }
        }
    }

    pub fn derivative_plus(&self, t: f64) -> f64 {
        match self {
            BoundaryPath::Pair { plus, .. } => plus.derivative(t),
            BoundaryPath::CriticalOfMinus { minus, flux } => {
                // d/dt ρ₋* = ρ̇₋ · J′(ρ₋)/J′(ρ₋*); the ratio tends to −1
                // as ρ₋ → m, so guard the vanishing denominator.
                let u = minus.value(t);
                let conj = flux
                    .conjugate(u)
                    .expect("validated side stays in [0,1]");
                let denom = flux.j_prime(conj);
                let ratio = if denom.abs() < 1e-9 {
                    -1.0
                } else {
                    flux.j_prime(u) / denom
                };
                minus.derivative(t) * ratio
            }
        }
    }
}

/// Which member of the quasi-static case analysis a boundary pair
/// belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionTag {
    /// `ρ₋ < m`, `ρ₊ < ρ₋*` — the state is the left datum.
    Case1,
    /// `ρ₊ > m`, `ρ₋ > ρ₊*` — the state is the right datum.
    Case2,
    /// `ρ₋ ≥ m`, `ρ₊ ≤ m` — the state saturates at the maximizer.
    Case3,
    /// `ρ₊ = ρ₋*` with `ρ₋ < m` — the one-parameter shock family.
    Critical,
}

/// Classify the boundary pair.  Critical membership is tested with the
/// tolerance `eta` on `|J(ρ₊) − J(ρ₋)|` together with `ρ₋ < m − eta`;
/// pass [`defaults::CRITICAL_ETA`] unless a study overrides it.
pub fn classify(f: &FluxModel, rho_minus: f64, rho_plus: f64, eta: f64) -> Result<RegionTag> {
    for (label, v) in [("rho_minus", rho_minus), ("rho_plus", rho_plus)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::domain(label, v, 0.0, 1.0));
        }
    }
    let m = f.maximizer();
    if rho_minus < m - eta
        && rho_plus > m
        && (f.j(rho_plus) - f.j(rho_minus)).abs() <= eta
    {
        return Ok(RegionTag::Critical);
    }
    if rho_minus >= m {
        if rho_plus <= m {
            Ok(RegionTag::Case3)
        } else {
            // ρ₊ > m forces ρ₊* < m ≤ ρ₋.
            Ok(RegionTag::Case2)
        }
    } else if rho_plus <= m || f.j(rho_plus) > f.j(rho_minus) {
        // Either side of m, the right datum stays below the conjugate
        // ρ₋* (for ρ₊ > m this is J(ρ₊) > J(ρ₋)).
        Ok(RegionTag::Case1)
    } else {
        Ok(RegionTag::Case2)
    }
}

/// The shape a quasi-static state can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    /// Constant at the left datum (`< m`).
    ConstantLow,
    /// Constant at the right datum (`> m`).
    ConstantHigh,
    /// Constant at the flux maximizer.
    ConstantMax,
    /// The critical one-shock family `z₁ → z₂ = z₁*`.
    CriticalShockFamily,
}

/// A quasi-static state at one time: the equal-flux pair
/// `(z₁, z₂)`, the current it carries, and — on the critical set — an
/// optional materialized shock position.
#[derive(Debug, Clone)]
pub struct QuasiStaticProfile {
    kind: ProfileKind,
    time: f64,
    z_low: f64,
    z_high: f64,
    current: f64,
    shock_position: Option<f64>,
}

impl QuasiStaticProfile {
    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Lower member `z₁ ∈ [0, m]` of the equal-flux pair.
    pub fn z_low(&self) -> f64 {
        self.z_low
    }

    /// Upper member `z₂ ∈ [m, 1]` of the equal-flux pair.
    pub fn z_high(&self) -> f64 {
        self.z_high
    }

    /// The flux `J` carried by the state.
    pub fn current(&self) -> f64 {
        self.current
    }

    /// The family parameter, when one has been materialized.
    pub fn shock_position(&self) -> Option<f64> {
        self.shock_position
    }

    /// The single value of a constant state (`None` on the critical
    /// family).
    pub fn constant_value(&self) -> Option<f64> {
        match self.kind {
            ProfileKind::ConstantLow => Some(self.z_low),
            ProfileKind::ConstantHigh => Some(self.z_high),
            ProfileKind::ConstantMax => Some(self.z_low),
            ProfileKind::CriticalShockFamily => None,
        }
    }

    /// Materialize a member of the critical family by fixing the shock
    /// position `x ∈ [0,1]` (no-op copy for constant states).
    pub fn with_shock_position(&self, x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::domain("shock position", x, 0.0, 1.0));
        }
        let mut p = self.clone();
        p.shock_position = Some(x);
        Ok(p)
    }

    /// Pointwise value.  Constant states ignore the shock position;
    /// the critical family requires one to have been materialized.
    pub fn value_at(&self, x: f64) -> Result<f64> {
        if let Some(c) = self.constant_value() {
            return Ok(c);
        }
        match self.shock_position {
            Some(xs) => Ok(if x < xs { self.z_low } else { self.z_high }),
            None => Err(Error::InvalidParameter(
                "critical profile has no materialized shock position; use with_shock_position"
                    .into(),
            )),
        }
    }

    /// Midpoint-sample the state onto a grid.
    pub fn sample(&self, grid: GridSpec) -> Result<CellField> {
        let values: Result<Vec<f64>> = grid.centers().map(|x| self.value_at(x)).collect();
        CellField::from_values(grid, self.time, values?)
    }
}

/// The exact quasi-static state selected by the boundary pair at time
/// `t`.  On the critical set the shock position is left unset — it is
/// the family parameter, not a function of the data.
pub fn exact_profile(f: &FluxModel, path: &BoundaryPath, t: f64) -> Result<QuasiStaticProfile> {
    let rm = path.rho_minus(t);
    let rp = path.rho_plus(t);
    let m = f.maximizer();
    let tag = classify(f, rm, rp, defaults::CRITICAL_ETA)?;
    let profile = match tag {
        RegionTag::Case1 => QuasiStaticProfile {
            kind: ProfileKind::ConstantLow,
            time: t,
            z_low: rm,
            z_high: f.conjugate(rm)?,
            current: f.j(rm),
            shock_position: None,
        },
        RegionTag::Case2 => QuasiStaticProfile {
            kind: ProfileKind::ConstantHigh,
            time: t,
            z_low: f.conjugate(rp)?,
            z_high: rp,
            current: f.j(rp),
            shock_position: None,
        },
        RegionTag::Case3 => QuasiStaticProfile {
            kind: ProfileKind::ConstantMax,
            time: t,
            z_low: m,
            z_high: m,
            current: f.max_value(),
            shock_position: None,
        },
        RegionTag::Critical => QuasiStaticProfile {
            kind: ProfileKind::CriticalShockFamily,
            time: t,
            z_low: rm,
            // Use the exact conjugate rather than the supplied right
            // datum so the equal-flux structure holds to solver
            // precision even when the pair is only η-close to critical.
            z_high: f.conjugate(rm)?,
            current: f.j(rm),
            shock_position: None,
        },
    };
    Ok(profile)
}

/// Value of the constant quasi-static state at time `t`; errors on the
/// critical set where no single value exists.
pub fn exact_constant_value(f: &FluxModel, path: &BoundaryPath, t: f64) -> Result<f64> {
    exact_profile(f, path, t)?.constant_value().ok_or_else(|| {
        Error::InvalidParameter(format!(
            "boundary pair at t = {t} is critical; the state is a shock family"
        ))
    })
}

/// The variational current `𝒥(ρ₋, ρ₊)`: the supremum of `J` over
/// `[ρ₊, ρ₋]` when `ρ₋ ≥ ρ₊`, the infimum over `[ρ₋, ρ₊]` otherwise.
/// Closed form by concavity: the sup sits at the clamp of the
/// maximizer into the interval, the inf at an endpoint.
pub fn variational_current(f: &FluxModel, rho_minus: f64, rho_plus: f64) -> Result<f64> {
    for (label, v) in [("rho_minus", rho_minus), ("rho_plus", rho_plus)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::domain(label, v, 0.0, 1.0));
        }
    }
    if rho_minus >= rho_plus {
        Ok(f.j(f.maximizer().clamp(rho_plus, rho_minus)))
    } else {
        Ok(f.j(rho_minus).min(f.j(rho_plus)))
    }
}
