//! Entropy–entropy flux pairs.
//!
//! A pair `(S, Q)` with convex `S` and `Q′ = J′S′` turns the
//! conservation law into the entropy inequality `ε∂ₜS(u) + ∂ₓQ(u) ≤ 0`
//! selecting admissible shocks.  Beyond the classical pairs this module
//! carries the one-sided *boundary* pair
//!
//! ```text
//!     S(u; w) = (w∧m − u)⁺,
//!     Q(u; w) = (J(w∧m) − J(u)) · 1_{u < w∧m},
//! ```
//!
//! and its C¹ smoothing `S_a(u; w) = a·s((u − w∧m)/a)` with
//! `s(x) = −x` below −1, `(1−x)²/4` on `[−1,1]`, `0` above — a convex
//! ramp converging uniformly to the kink at rate `a/4`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::flux::FluxModel;
use crate::numerics::{simpson, CumulativeIntegral};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const QUADRATURE_PANELS: usize = 2048;
const CONVEXITY_SAMPLES: usize = 512;

/// An entropy `S` with its flux `Q` (satisfying `Q′ = J′S′`).
#[derive(Clone)]
pub struct EntropyPair {
    name: String,
    s: ScalarFn,
    q: ScalarFn,
}

impl std::fmt::Debug for EntropyPair {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("EntropyPair")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

impl EntropyPair {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Entropy value `S(u)`.
    pub fn s(&self, u: f64) -> f64 {
        (self.s)(u)
    }

    /// Entropy flux `Q(u)`.
    pub fn q(&self, u: f64) -> f64 {
        (self.q)(u)
    }

    /// The pair `S(u) = u²` with `Q` built by quadrature of `2uJ′(u)`
    /// from `Q(0) = 0`.
    pub fn quadratic(f: &FluxModel) -> EntropyPair {
        let fq = f.clone();
        let table = CumulativeIntegral::tabulate(
            move |u| 2.0 * u * fq.j_prime(u),
            0.0,
            1.0,
            QUADRATURE_PANELS,
        );
        EntropyPair {
            name: "quadratic".into(),
            s: Arc::new(|u| u * u),
            q: Arc::new(move |u| table.eval(u)),
        }
    }

    /// A pair from a user-supplied convex entropy; `Q` is built by
    /// quadrature of `J′S′`.  Convexity of `S` is checked by sampled
    /// midpoint inequalities.
    pub fn from_convex(
        f: &FluxModel,
        name: &str,
        s: impl Fn(f64) -> f64 + Send + Sync + 'static,
        s_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<EntropyPair> {
        for k in 0..CONVEXITY_SAMPLES {
            let a = k as f64 / CONVEXITY_SAMPLES as f64;
            let b = a + 1.0 / CONVEXITY_SAMPLES as f64;
            let mid = 0.5 * (a + b);
            if s(mid) > 0.5 * (s(a) + s(b)) + 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "entropy '{name}' is not convex near u = {mid}"
                )));
            }
        }
        let fq = f.clone();
        let table = CumulativeIntegral::tabulate(
            move |u| fq.j_prime(u) * s_prime(u),
            0.0,
            1.0,
            QUADRATURE_PANELS,
        );
        Ok(EntropyPair {
            name: name.into(),
            s: Arc::new(s),
            q: Arc::new(move |u| table.eval(u)),
        })
    }

    /// The Kruzhkov pair at threshold `w`:
    /// `S = |u − w|`, `Q = sign(u − w)(J(u) − J(w))`.
    pub fn kruzhkov(f: &FluxModel, w: f64) -> Result<EntropyPair> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::domain("threshold", w, 0.0, 1.0));
        }
        let fq = f.clone();
        Ok(EntropyPair {
            name: format!("kruzhkov(w={w})"),
            s: Arc::new(move |u| (u - w).abs()),
            q: Arc::new(move |u| {
                let sign = if u > w {
                    1.0
                } else if u < w {
                    -1.0
                } else {
                    0.0
                };
                sign * (fq.j(u) - fq.j(w))
            }),
        })
    }

    /// The kinked boundary pair at datum `w`: `S = (w∧m − u)⁺` with
    /// flux `Q = (J(w∧m) − J(u))·1_{u < w∧m}`; both vanish above the
    /// cap `w∧m`, and `Q ≥ 0` everywhere.
    pub fn boundary(f: &FluxModel, w: f64) -> Result<EntropyPair> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::domain("boundary datum", w, 0.0, 1.0));
        }
        let cap = w.min(f.maximizer());
        let j_cap = f.j(cap);
        let fq = f.clone();
        Ok(EntropyPair {
            name: format!("boundary(w={w})"),
            s: Arc::new(move |u| (cap - u).max(0.0)),
            q: Arc::new(move |u| if u < cap { j_cap - fq.j(u) } else { 0.0 }),
        })
    }

    /// The smoothed boundary pair at scale `a`: the kink of
    /// [`EntropyPair::boundary`] is replaced by the C¹ convex ramp
    /// `S_a(u) = a·s((u − w∧m)/a)`, which converges uniformly,
    /// `max |S_a − S| = a/4`.  The flux is assembled so `Q_a′ = J′S_a′`
    /// exactly, closed-form outside the smoothing band and by a single
    /// smooth Simpson quadrature inside it, normalized to vanish above
    /// the band.
    pub fn boundary_smoothed(f: &FluxModel, w: f64, a: f64) -> Result<EntropyPair> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::domain("boundary datum", w, 0.0, 1.0));
        }
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::domain("smoothing scale", a, 0.0, 1.0));
        }
        let cap = w.min(f.maximizer());
        // s′(x) = −1 below −1, −(1−x)/2 on [−1,1], 0 above.
        fn ramp_slope(x: f64) -> f64 {
            if x <= -1.0 {
                -1.0
            } else if x >= 1.0 {
                0.0
            } else {
                -(1.0 - x) / 2.0
            }
        }
        fn ramp(x: f64) -> f64 {
            if x <= -1.0 {
                -x
            } else if x >= 1.0 {
                0.0
            } else {
                (1.0 - x) * (1.0 - x) / 4.0
            }
        }
        let fq = f.clone();
        // ∫ over the band [cap−a, cap+a] of J′(v)·s′((v−cap)/a) dv,
        // with J′ clamped to its domain where the band pokes outside.
        let band_lo = cap - a;
        let band_hi = cap + a;
        let jp = {
            let fq = f.clone();
            move |v: f64| fq.j_prime(v.clamp(0.0, 1.0))
        };
        let band_integral = {
            let jp = jp.clone();
            simpson(
                |v| jp(v) * ramp_slope((v - cap) / a),
                band_lo,
                band_hi,
                256,
            )
        };
        let q = {
            let jp = jp.clone();
            let fq = fq.clone();
            move |u: f64| {
                // Q_a(u) = −∫ᵤ^{band_hi} J′ S_a′ dv, so Q_a ≡ 0 above.
                if u >= band_hi {
                    0.0
                } else if u >= band_lo {
                    -simpson(|v| jp(v) * ramp_slope((v - cap) / a), u, band_hi, 256)
                } else {
                    // S_a′ = −1 below the band.
                    (fq.j(band_lo.clamp(0.0, 1.0)) - fq.j(u)) - band_integral
                }
            }
        };
        Ok(EntropyPair {
            name: format!("boundary-smoothed(w={w}, a={a})"),
            s: Arc::new(move |u| a * ramp((u - cap) / a)),
            q: Arc::new(q),
        })
    }
}
