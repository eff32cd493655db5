//! Numerical laboratory for slowly driven scalar conservation laws
//!
//! The object of study is the initial-boundary value problem
//!
//! ```text
//!     ε ∂ₜu + ∂ₓ J(u) = 0          on (0,T) × (0,1),
//!     u(t,0) = ρ₋(t),  u(t,1) = ρ₊(t),
//! ```
//!
//! with a strictly concave flux `J` vanishing at both ends of `[0,1]`
//! (the traffic flux `J(u) = u(1−u)` is the reference model), together
//! with its viscous regularisation `ε ∂ₜu + ∂ₓJ(u) = δ ∂ₓₓu`.  As the
//! driving becomes slow (`ε → 0`) the solution relaxes, at almost every
//! time, onto a quasi-static state determined by the boundary pair
//! `(ρ₋, ρ₊)` alone — except on a critical set of boundary pairs where
//! a one-parameter family of shock profiles survives and only
//! statistical (Young-measure) information is determined.
//!
//! The crate provides three solution layers and the diagnostics that
//! cross-validate them:
//!
//! * [`quasistatic`] — the exact limiting profiles, the case analysis of
//!   the boundary pair, and the variational current formula;
//! * [`hyperbolic`] — a Godunov finite-volume solver for the rescaled
//!   conservation law with boundary data imposed through ghost values;
//! * [`viscous`] — an IMEX solver for the viscous equation plus a
//!   shooting solver for the stationary viscous profile;
//! * [`analysis`] — entropy residuals, boundary-trace admissibility
//!   checks, energy functionals, Young-measure estimation and weak-star
//!   comparison errors;
//! * [`harness`] — experiment configuration, parameter sweeps, rate
//!   fitting and the CSV/report output layer.

pub mod analysis;
pub mod defaults;
pub mod error;
pub mod field;
pub mod flux;
pub mod harness;
pub mod hyperbolic;
pub mod numerics;
pub mod quasistatic;
pub mod viscous;

pub use error::{Error, Result};
pub use field::{CellField, GridSpec, Trajectory};
pub use flux::FluxModel;
pub use quasistatic::{BoundaryPath, ProfileKind, QuasiStaticProfile, RegionTag, SidePath};
