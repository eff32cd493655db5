//! Viscous approximations: IMEX time stepping and the stationary
//! two-point boundary-value profile.
//!
//! The time-dependent problem `ε ∂ₜu + ∂ₓJ(u) = δ ∂ₓₓu` with Dirichlet
//! data `u(t,0) = ρ₋(t)`, `u(t,1) = ρ₊(t)` is advanced by an IMEX
//! split: the advective part goes explicit through Godunov fluxes
//! exactly as in the inviscid solver, the diffusive part goes implicit
//! through a tridiagonal solve, so the time step carries the advective
//! CFL restriction only.
//!
//! The stationary problem `∂ₓJ(v) = δ ∂ₓₓv`, `v(0) = ρ₋`, `v(1) = ρ₊`
//! integrates to the first-order form
//!
//! ```text
//!     δ v′ = J(v) − K,
//! ```
//!
//! where the constant `K` (the viscous current) is pinned by a scalar
//! shooting problem: integrate from `v(0) = ρ₋` and root-find `K` so
//! the trajectory lands on `ρ₊` at `x = 1`.  The endpoint is strictly
//! decreasing in `K`, and `K ∈ [−2δ, J(m) + 2δ]` always brackets.
//!
//! For the traffic flux on a conjugate boundary pair the stationary
//! profile has the closed form `v(x) = ½ + δC·tanh(C(x−½))`, with the
//! amplitude `C` fixed by the boundary value, `δC·tanh(C/2) = ρ₊ − ½`;
//! it doubles as a high-accuracy oracle for the shooting solver.

use crate::error::{Error, Result};
use crate::field::{CellField, FluxSample, GridSpec, Trajectory};
use crate::flux::FluxModel;
use crate::hyperbolic::{cfl_dt, godunov_flux};
use crate::numerics::{bisect, solve_tridiagonal};
use crate::quasistatic::BoundaryPath;

/// Parameters of a viscous time-stepping run.
#[derive(Debug, Clone, Copy)]
pub struct ViscousParams {
    /// Slow time scale of the drive (must be positive for stepping;
    /// the stationary problem is solved by [`stationary_profile`]).
    pub epsilon: f64,
    /// Viscosity δ > 0.
    pub delta: f64,
    /// Advective CFL number in (0, 1].
    pub cfl: f64,
}

impl ViscousParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.delta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::domain("cfl", self.cfl, 0.0, 1.0));
        }
        Ok(())
    }
}

/// A viscous trajectory plus the dissipation bookkeeping needed by the
/// energy functional.
#[derive(Debug, Clone)]
pub struct ViscousRun {
    pub trajectory: Trajectory,
    /// Cumulative `∫₀ᵗ ∫ (∂ₓu)² dx ds` at each snapshot time,
    /// aligned with `trajectory.snapshots()`.
    pub dissipation: Vec<(f64, f64)>,
    /// Cumulative dissipation at the end of the run.
    pub total_dissipation: f64,
    pub params: ViscousParams,
}

/// `∫ (∂ₓu)² dx` by midpoint quadrature of centered differences
/// (one-sided at the two boundary cells).
pub fn dissipation_rate(field: &CellField) -> f64 {
    let v = field.values();
    let n = v.len();
    let dx = field.grid().dx();
    if n < 2 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let g = if i == 0 {
            (v[1] - v[0]) / dx
        } else if i == n - 1 {
            (v[n - 1] - v[n - 2]) / dx
        } else {
            (v[i + 1] - v[i - 1]) / (2.0 * dx)
        };
        acc += g * g;
    }
    acc * dx
}

/// Blend the two outermost cells on each side linearly toward the
/// boundary values, enforcing the compatibility of the initial datum
/// with the Dirichlet data.
fn blend_initial(field: &CellField, rho_minus: f64, rho_plus: f64) -> Result<CellField> {
    let mut v = field.values().to_vec();
    let n = v.len();
    if n >= 3 {
        // Interpolate between the boundary value at the wall and the
        // first untouched cell average at its center.
        let anchor_l = v[2];
        v[0] = rho_minus + (anchor_l - rho_minus) * 0.2;
        v[1] = rho_minus + (anchor_l - rho_minus) * 0.6;
        let anchor_r = v[n - 3];
        v[n - 1] = rho_plus + (anchor_r - rho_plus) * 0.2;
        v[n - 2] = rho_plus + (anchor_r - rho_plus) * 0.6;
    }
    CellField::from_values(field.grid(), field.time(), v)
}

/// Workspace reused across implicit solves.
struct DiffusionWorkspace {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
    rhs: Vec<f64>,
    flux: Vec<f64>,
}

impl DiffusionWorkspace {
    fn new(n: usize) -> Self {
        DiffusionWorkspace {
            sub: vec![0.0; n],
            diag: vec![0.0; n],
            sup: vec![0.0; n],
            rhs: vec![0.0; n],
            flux: vec![0.0; n + 1],
        }
    }
}

/// One IMEX step on a raw value slice.  Advection is explicit with
/// ghost states `(rm_adv, rp_adv)` (begin-of-step data); diffusion is
/// implicit with Dirichlet values `(rm_dir, rp_dir)` (end-of-step
/// data) imposed through ghost cells `u_ghost = 2ρ − u_inner`.
#[allow(clippy::too_many_arguments)]
fn imex_step_in_place(
    f: &FluxModel,
    values: &mut Vec<f64>,
    rm_adv: f64,
    rp_adv: f64,
    rm_dir: f64,
    rp_dir: f64,
    dt: f64,
    params: &ViscousParams,
    dx: f64,
    ws: &mut DiffusionWorkspace,
) -> Result<(f64, f64)> {
    let n = values.len();
    ws.flux[0] = godunov_flux(f, rm_adv, values[0]);
    for i in 0..n - 1 {
        ws.flux[i + 1] = godunov_flux(f, values[i], values[i + 1]);
    }
    ws.flux[n] = godunov_flux(f, values[n - 1], rp_adv);
    let lambda = dt / (params.epsilon * dx);
    let mu = dt * params.delta / (params.epsilon * dx * dx);
    for i in 0..n {
        ws.rhs[i] = values[i] - lambda * (ws.flux[i + 1] - ws.flux[i]);
    }
    ws.rhs[0] += 2.0 * mu * rm_dir;
    ws.rhs[n - 1] += 2.0 * mu * rp_dir;
    for i in 0..n {
        ws.diag[i] = 1.0 + 2.0 * mu;
    }
    // Dirichlet ghosts strengthen the wall rows: the ghost value
    // 2ρ − u₀ turns the Laplacian row into (u₁ − 3u₀ + 2ρ)/dx².
    ws.diag[0] = 1.0 + 3.0 * mu;
    ws.diag[n - 1] = 1.0 + 3.0 * mu;
    // Padded band convention: `sub[i]` multiplies `x[i−1]` (entry 0
    // unused), `sup[i]` multiplies `x[i+1]` (entry n−1 unused).
    for i in 0..n {
        ws.sub[i] = -mu;
        ws.sup[i] = -mu;
    }
    ws.sub[0] = 0.0;
    ws.sup[n - 1] = 0.0;
    let solved = solve_tridiagonal(&ws.sub, &ws.diag, &ws.sup, &ws.rhs)?;
    for (dst, src) in values.iter_mut().zip(&solved) {
        *dst = *src;
        if !dst.is_finite() {
            return Err(Error::SolverFailure(
                "viscous step produced a non-finite value".into(),
            ));
        }
    }
    Ok((ws.flux[0], ws.flux[n]))
}

/// One public IMEX step from the state's own time stamp.  `dt_cap`
/// may only shorten the CFL step.
pub fn viscous_step(
    f: &FluxModel,
    state: &CellField,
    path: &BoundaryPath,
    params: &ViscousParams,
    dt_cap: Option<f64>,
) -> Result<CellField> {
    params.validate()?;
    let dx = state.grid().dx();
    let mut dt = cfl_dt(f, params.epsilon, params.cfl, dx);
    if let Some(cap) = dt_cap {
        if !(cap > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dt cap must be positive, got {cap}"
            )));
        }
        dt = dt.min(cap);
    }
    let t = state.time();
    let mut values = state.values().to_vec();
    let mut ws = DiffusionWorkspace::new(values.len());
    imex_step_in_place(
        f,
        &mut values,
        path.rho_minus(t),
        path.rho_plus(t),
        path.rho_minus(t + dt),
        path.rho_plus(t + dt),
        dt,
        params,
        dx,
        &mut ws,
    )?;
    CellField::from_values(state.grid(), t + dt, values)
}

/// March the viscous problem to `horizon`, blending the initial datum
/// to the boundary values over the two outermost cells, recording a
/// snapshot at the step nearest each requested time together with the
/// cumulative dissipation integral.
pub fn run_viscous(
    f: &FluxModel,
    path: &BoundaryPath,
    u0: &CellField,
    params: &ViscousParams,
    horizon: f64,
    snapshot_times: &[f64],
) -> Result<ViscousRun> {
    params.validate()?;
    if !(horizon >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "horizon must be nonnegative, got {horizon}"
        )));
    }
    for &v in u0.values() {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::domain("initial value", v, 0.0, 1.0));
        }
    }
    let mut targets: Vec<f64> = snapshot_times.to_vec();
    targets.sort_by(|a, b| a.partial_cmp(b).expect("snapshot times must be ordered"));
    targets.dedup();
    let slack = 1e-9 * (1.0 + horizon);
    for &tau in &targets {
        if !(tau >= -slack && tau <= horizon + slack) {
            return Err(Error::domain("snapshot time", tau, 0.0, horizon));
        }
    }

    let grid = u0.grid();
    let dx = grid.dx();
    let blended = blend_initial(u0, path.rho_minus(0.0), path.rho_plus(0.0))?;
    let dt_nominal = cfl_dt(f, params.epsilon, params.cfl, dx);

    let mut traj = Trajectory::new(params.epsilon, params.cfl);
    let mut dissipation_marks: Vec<(f64, f64)> = Vec::new();
    let mut pending = targets.into_iter().peekable();
    let mut last_pushed = f64::NEG_INFINITY;
    let mut values = blended.values().to_vec();
    let mut ws = DiffusionWorkspace::new(values.len());
    let mut cum_dissipation = 0.0_f64;
    let mut t = 0.0_f64;

    let push = |traj: &mut Trajectory,
                    marks: &mut Vec<(f64, f64)>,
                    t: f64,
                    vals: &[f64],
                    cum: f64,
                    last: &mut f64|
     -> Result<()> {
        if t > *last {
            traj.push_snapshot(CellField::from_values(grid, t, vals.to_vec())?)?;
            marks.push((t, cum));
            *last = t;
        }
        Ok(())
    };

    while pending.peek().is_some_and(|&tau| tau <= slack) {
        pending.next();
        push(
            &mut traj,
            &mut dissipation_marks,
            0.0,
            &values,
            0.0,
            &mut last_pushed,
        )?;
    }

    let t_tol = 1e-12 * (1.0 + horizon);
    while t < horizon - t_tol {
        let remaining = horizon - t;
        let (dt, is_last) = if dt_nominal >= remaining {
            (remaining, true)
        } else {
            (dt_nominal, false)
        };
        let t_next = if is_last { horizon } else { t + dt };
        let (f_left, f_right) = imex_step_in_place(
            f,
            &mut values,
            path.rho_minus(t),
            path.rho_plus(t),
            path.rho_minus(t_next),
            path.rho_plus(t_next),
            dt,
            params,
            dx,
            &mut ws,
        )?;
        traj.push_flux(FluxSample {
            t,
            dt,
            f_left,
            f_right,
        });
        // End-of-step gradient, rectangle rule in time.
        let snap = CellField::from_values(grid, t_next, values.clone())?;
        cum_dissipation += dt * dissipation_rate(&snap);
        while let Some(&tau) = pending.peek() {
            if tau > t_next + t_tol {
                break;
            }
            pending.next();
            push(
                &mut traj,
                &mut dissipation_marks,
                t_next,
                &values,
                cum_dissipation,
                &mut last_pushed,
            )?;
        }
        t = t_next;
    }

    let final_time = if horizon == 0.0 { 0.0 } else { horizon };
    while pending.next().is_some() {
        push(
            &mut traj,
            &mut dissipation_marks,
            final_time,
            &values,
            cum_dissipation,
            &mut last_pushed,
        )?;
    }
    if traj.snapshots().is_empty() {
        push(
            &mut traj,
            &mut dissipation_marks,
            final_time,
            &values,
            cum_dissipation,
            &mut last_pushed,
        )?;
    }
    Ok(ViscousRun {
        trajectory: traj,
        dissipation: dissipation_marks,
        total_dissipation: cum_dissipation,
        params: *params,
    })
}

/// The a priori energy functional
/// `E(t) = ε ∫ u²(t,x) dx + δ ∫₀ᵗ ∫ (∂ₓu)² dx ds`
/// of a viscous run: returns the value at the final time and the
/// history at the run's snapshot times.
pub fn energy_functional(run: &ViscousRun, epsilon: f64, delta: f64) -> (f64, Vec<(f64, f64)>) {
    let history: Vec<(f64, f64)> = run
        .trajectory
        .snapshots()
        .iter()
        .zip(&run.dissipation)
        .map(|(snap, &(t, cum))| {
            let dx = snap.grid().dx();
            let l2: f64 = snap.values().iter().map(|u| u * u).sum::<f64>() * dx;
            (t, epsilon * l2 + delta * cum)
        })
        .collect();
    let value = match run.trajectory.final_field() {
        Ok(snap) => {
            let dx = snap.grid().dx();
            let l2: f64 = snap.values().iter().map(|u| u * u).sum::<f64>() * dx;
            epsilon * l2 + delta * run.total_dissipation
        }
        Err(_) => f64::NAN,
    };
    (value, history)
}

/// The positive root of `C·tanh(C/2) = target` for `target ≥ 0`.
/// The left side is strictly increasing from 0, so the root is unique;
/// it behaves like `√(2·target)` near 0 and like `target` for large
/// arguments.
pub fn tanh_amplitude_root(target: f64) -> Result<f64> {
    if !(target >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "amplitude equation needs a nonnegative target, got {target}"
        )));
    }
    if target == 0.0 {
        return Ok(0.0);
    }
    let g = |c: f64| c * (0.5 * c).tanh() - target;
    bisect(g, 0.0, target + 2.0, 1e-14, 200)
}

/// Amplitude constant of the critical stationary layer for the traffic
/// flux, from the relation `C·tanh(C/2) = (2ρ₊ − 1)/δ`.
/// Requires `ρ₊ > 1/2` (a conjugate pair with `ρ₋ = 1 − ρ₊ < 1/2`);
/// the residual of the returned root is at most 1e−12.
pub fn solve_c(delta: f64, rho_plus: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if !(rho_plus > 0.5) {
        return Err(Error::domain("rho_plus", rho_plus, 0.5, 1.0));
    }
    tanh_amplitude_root((2.0 * rho_plus - 1.0) / delta)
}

/// Closed-form stationary layer for the traffic flux on the conjugate
/// pair `(1 − ρ₊, ρ₊)` with `ρ₊ > 1/2`:
///
/// ```text
///     v(x) = ½ + δ C tanh(C (x − ½)),
/// ```
///
/// an exact solution of `δ v′ = J(v) − K` with `K = ¼ − δ²C²`.  The
/// boundary value pins the amplitude: `v(1) = ρ₊` forces
/// `δ C tanh(C/2) = ρ₊ − ½`.
pub fn critical_tanh_profile(delta: f64, rho_plus: f64, grid: GridSpec) -> Result<CellField> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if !(rho_plus > 0.5 && rho_plus <= 1.0) {
        return Err(Error::domain("rho_plus", rho_plus, 0.5, 1.0));
    }
    let c = tanh_amplitude_root((rho_plus - 0.5) / delta)?;
    Ok(CellField::from_fn(grid, 0.0, |x| {
        0.5 + delta * c * (c * (x - 0.5)).tanh()
    }))
}

/// Amplitude constant used by [`critical_tanh_profile`].
pub fn critical_tanh_constant(delta: f64, rho_plus: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if !(rho_plus > 0.5 && rho_plus <= 1.0) {
        return Err(Error::domain("rho_plus", rho_plus, 0.5, 1.0));
    }
    tanh_amplitude_root((rho_plus - 0.5) / delta)
}

/// Integrate `δ v′ = J(v) − K` from `v(0) = rho_minus` across the
/// grid with classical RK4, recording the value at every cell center.
/// Returns `(cell values, endpoint v(1))`.
fn shoot(
    f: &FluxModel,
    rho_minus: f64,
    delta: f64,
    k: f64,
    grid: GridSpec,
    record: bool,
) -> (Vec<f64>, f64) {
    let n = grid.n_cells();
    let dx = grid.dx();
    // Resolve the layer scale: RK4 needs h ≲ δ/|J′| for stability and
    // far less for accuracy; halving twice beyond the bound is cheap.
    let per_cell = ((dx / (0.25 * delta)).ceil() as usize).max(8);
    let per_cell = per_cell + (per_cell % 2); // even, so centers land on nodes
    let h = dx / per_cell as f64;
    let slope = |v: f64| (f.j(v) - k) / delta;
    let mut v = rho_minus;
    let mut out = if record { Vec::with_capacity(n) } else { Vec::new() };
    let total = n * per_cell;
    for step in 0..total {
        if record && step % per_cell == per_cell / 2 {
            out.push(v);
        }
        let k1 = slope(v);
        let k2 = slope(v + 0.5 * h * k1);
        let k3 = slope(v + 0.5 * h * k2);
        let k4 = slope(v + h * k3);
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    (out, v)
}

/// Solve the stationary viscous boundary-value problem by shooting on
/// the first-integral constant `K`; returns the profile sampled at
/// cell centers together with the viscous current `K`.
pub fn stationary_profile_with_current(
    f: &FluxModel,
    rho_minus: f64,
    rho_plus: f64,
    delta: f64,
    grid: GridSpec,
) -> Result<(CellField, f64)> {
    for (label, v) in [("rho_minus", rho_minus), ("rho_plus", rho_plus)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::domain(label, v, 0.0, 1.0));
        }
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    // K below −2δ forces v′ ≥ 2 everywhere, overshooting any ρ₊;
    // K above J(m) + 2δ forces v′ ≤ −2, undershooting: the bracket
    // always straddles.
    let k_lo = -2.0 * delta;
    let k_hi = f.max_value() + 2.0 * delta;
    let endpoint = |k: f64| shoot(f, rho_minus, delta, k, grid, false).1 - rho_plus;
    let (e_lo, e_hi) = (endpoint(k_lo), endpoint(k_hi));
    if !(e_lo >= 0.0 && e_hi <= 0.0) {
        return Err(Error::RootFind(format!(
            "shooting bracket failed: v(1) − ρ₊ is {e_lo} at K = {k_lo} and {e_hi} at K = {k_hi}"
        )));
    }
    // The endpoint is strictly decreasing in K; bisect on −endpoint.
    let k = bisect(|k| -endpoint(k), k_lo, k_hi, 1e-14, 200)?;
    let (values, _) = shoot(f, rho_minus, delta, k, grid, true);
    let field = CellField::from_values(grid, 0.0, values)?;
    if !field.all_finite() {
        return Err(Error::SolverFailure(
            "stationary profile integration produced non-finite values".into(),
        ));
    }
    Ok((field, k))
}

/// Stationary viscous profile on the grid (see
/// [`stationary_profile_with_current`] for the companion current).
pub fn stationary_profile(
    f: &FluxModel,
    rho_minus: f64,
    rho_plus: f64,
    delta: f64,
    grid: GridSpec,
) -> Result<CellField> {
    stationary_profile_with_current(f, rho_minus, rho_plus, delta, grid).map(|(p, _)| p)
}
