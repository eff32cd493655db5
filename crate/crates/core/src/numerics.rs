//! Small numerical kernel shared by the physics modules.
//!
//! Nothing here knows about fluxes or grids: plain bisection, composite
//! Simpson quadrature, cumulative integrals with Hermite read-back, a
//! not-a-knot cubic spline, a tridiagonal (Thomas) solve, the C¹
//! smoothstep, and an ordinary least-squares line fit.

use crate::error::{Error, Result};

/// Find a root of `f` in `[lo, hi]` by bisection.
///
/// Requires a sign change (or an exact zero) on the bracket.  Iterates
/// until the bracket width drops below `xtol` or `max_iter` halvings
/// have been spent, then returns the midpoint.
pub fn bisect(f: impl Fn(f64) -> f64, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Result<f64> {
    if !(lo < hi) {
        return Err(Error::RootFind(format!("empty bracket [{lo}, {hi}]")));
    }
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::RootFind(format!(
            "no sign change on bracket: f({a}) = {fa}, f({b}) = {fb}"
        )));
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (a + b);
        if b - a < xtol || mid <= a || mid >= b {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Composite Simpson rule for `∫ₐᵇ f` with `n ≥ 1` panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n.max(1);
    let h = (b - a) / n as f64;
    let mut total = 0.0;
    for k in 0..n {
        let x0 = a + k as f64 * h;
        let x1 = x0 + h;
        let xm = 0.5 * (x0 + x1);
        total += (h / 6.0) * (f(x0) + 4.0 * f(xm) + f(x1));
    }
    total
}

/// Antiderivative table `F(x) = ∫ₓ₀ˣ g` on a uniform grid, read back by
/// cubic Hermite interpolation (the integrand supplies exact slopes at
/// the nodes, so the read-back error is O(h⁴)).
#[derive(Debug, Clone)]
pub struct CumulativeIntegral {
    x0: f64,
    h: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl CumulativeIntegral {
    /// Tabulate `∫ₓ₀ˣ g` on `[x0, x1]` with `n` uniform panels of
    /// cumulative Simpson.
    pub fn tabulate(g: impl Fn(f64) -> f64, x0: f64, x1: f64, n: usize) -> Self {
        let n = n.max(1);
        let h = (x1 - x0) / n as f64;
        let mut values = Vec::with_capacity(n + 1);
        let mut slopes = Vec::with_capacity(n + 1);
        values.push(0.0);
        slopes.push(g(x0));
        let mut acc = 0.0;
        for k in 0..n {
            let a = x0 + k as f64 * h;
            let b = a + h;
            let gm = g(0.5 * (a + b));
            let gb = g(b);
            acc += (h / 6.0) * (slopes[k] + 4.0 * gm + gb);
            values.push(acc);
            slopes.push(gb);
        }
        CumulativeIntegral {
            x0,
            h,
            values,
            slopes,
        }
    }

    /// Evaluate the antiderivative at `x` (clamped to the tabulated range).
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len() - 1;
        let s = ((x - self.x0) / self.h).clamp(0.0, n as f64);
        let i = (s.floor() as usize).min(n - 1);
        let t = s - i as f64;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i] * self.h, self.slopes[i + 1] * self.h);
        // Cubic Hermite basis on [0,1].
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + d0 * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + d1 * (t3 - t2)
    }
}

/// Not-a-knot cubic spline through `(x, y)` pairs with strictly
/// increasing abscissae.  Reproduces cubic polynomials exactly, which
/// keeps strictly concave tables strictly concave in practice.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(xs: &[f64], ys: &[f64]) -> Result<Self> {
        let n = xs.len();
        if n != ys.len() {
            return Err(Error::InvalidParameter(format!(
                "spline needs matching lengths, got {} and {}",
                n,
                ys.len()
            )));
        }
        if n < 4 {
            return Err(Error::InvalidParameter(format!(
                "spline needs at least 4 knots, got {n}"
            )));
        }
        for w in xs.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "spline abscissae must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        // Unknowns: interior second derivatives M₁..M_{n−2}.  The
        // not-a-knot conditions express M₀ and M_{n−1} through their
        // neighbours:
        //   M₀ = M₁ + (h₀/h₁)(M₁ − M₂),
        //   M_{n−1} = M_{n−2} + (h_{n−2}/h_{n−3})(M_{n−2} − M_{n−3}).
        let k = n - 2;
        let mut sub = vec![0.0; k];
        let mut diag = vec![0.0; k];
        let mut sup = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for j in 0..k {
            let i = j + 1; // grid index of this unknown
            let hl = h[i - 1];
            let hr = h[i];
            let d = (ys[i + 1] - ys[i]) / hr - (ys[i] - ys[i - 1]) / hl;
            sub[j] = hl / 6.0;
            diag[j] = (hl + hr) / 3.0;
            sup[j] = hr / 6.0;
            rhs[j] = d;
        }
        // Fold the boundary expressions into the first and last rows.
        let r0 = h[0] / h[1];
        diag[0] += (h[0] / 6.0) * (1.0 + r0);
        sup[0] -= (h[0] / 6.0) * r0;
        sub[0] = 0.0;
        let rn = h[n - 2] / h[n - 3];
        diag[k - 1] += (h[n - 2] / 6.0) * (1.0 + rn);
        sub[k - 1] -= (h[n - 2] / 6.0) * rn;
        sup[k - 1] = 0.0;

        let interior = solve_tridiagonal(&sub, &diag, &sup, &rhs)?;
        let mut m = vec![0.0; n];
        m[1..=(k)].copy_from_slice(&interior);
        m[0] = m[1] + r0 * (m[1] - m[2]);
        m[n - 1] = m[n - 2] + rn * (m[n - 2] - m[n - 3]);
        Ok(CubicSpline {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            m,
        })
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.xs.len();
        match self.xs.partition_point(|&t| t <= x) {
            0 => 0,
            p => (p - 1).min(n - 2),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let (a, b) = (x1 - x, x - x0);
        self.m[i] * a * a * a / (6.0 * h)
            + self.m[i + 1] * b * b * b / (6.0 * h)
            + (self.ys[i] / h - self.m[i] * h / 6.0) * a
            + (self.ys[i + 1] / h - self.m[i + 1] * h / 6.0) * b
    }

    pub fn eval_deriv(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let (a, b) = (x1 - x, x - x0);
        -self.m[i] * a * a / (2.0 * h)
            + self.m[i + 1] * b * b / (2.0 * h)
            + (self.ys[i + 1] - self.ys[i]) / h
            - (self.m[i + 1] - self.m[i]) * h / 6.0
    }
}

/// Solve a tridiagonal system by the Thomas algorithm.
///
/// Row `i` reads `sub[i]·x[i−1] + diag[i]·x[i] + sup[i]·x[i+1] = rhs[i]`
/// (`sub[0]` and `sup[n−1]` are ignored).  No pivoting: callers supply
/// diagonally dominant systems.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if sub.len() != n || sup.len() != n || rhs.len() != n || n == 0 {
        return Err(Error::InvalidParameter(
            "tridiagonal solve needs four equal-length non-empty bands".into(),
        ));
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom == 0.0 {
        return Err(Error::SolverFailure("tridiagonal pivot vanished".into()));
    }
    c[0] = sup[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - sub[i] * c[i - 1];
        if denom == 0.0 {
            return Err(Error::SolverFailure(format!(
                "tridiagonal pivot vanished at row {i}"
            )));
        }
        c[i] = sup[i] / denom;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

/// C¹ smoothstep: 0 for `t ≤ 0`, 1 for `t ≥ 1`, `3t² − 2t³` between.
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * (3.0 - 2.0 * t)
    }
}

/// Derivative of [`smoothstep`] (zero outside `(0,1)`).
pub fn smoothstep_deriv(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        6.0 * t * (1.0 - t)
    }
}

/// Ordinary least-squares line `y ≈ slope·x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len();
    if n != ys.len() || n < 2 {
        return Err(Error::InvalidParameter(format!(
            "line fit needs ≥ 2 matching points, got {} and {}",
            n,
            ys.len()
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "line fit abscissae are all equal".into(),
        ));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}
