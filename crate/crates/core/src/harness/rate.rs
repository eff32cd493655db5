//! Convergence-rate fitting: least-squares slope of `log e` vs `log h`.

use crate::error::{Error, Result};
use crate::numerics::linear_fit;

/// Fit the algebraic rate `p` in `e ≈ C·hᵖ` from `(h, e)` samples.
/// Requires at least three points with positive `h` and `e`.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "rate fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(h, e) in points {
        if !(h > 0.0 && e > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rate fit needs positive samples, got (h, e) = ({h}, {e})"
            )));
        }
        xs.push(h.ln());
        ys.push(e.ln());
    }
    let (slope, _intercept) = linear_fit(&xs, &ys)?;
    Ok(slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hs() -> Vec<f64> {
        vec![0.1, 0.05, 0.025, 0.0125]
    }

    #[test]
    fn first_order_data_fits_slope_one() {
        let pts: Vec<(f64, f64)> = hs().into_iter().map(|h| (h, h)).collect();
        assert!((fit_rate(&pts).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn second_order_data_fits_slope_two() {
        let pts: Vec<(f64, f64)> = hs().into_iter().map(|h| (h, h * h)).collect();
        assert!((fit_rate(&pts).unwrap() - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn prefactors_do_not_bias_the_slope() {
        let pts: Vec<(f64, f64)> = hs()
            .into_iter()
            .map(|h| (h, 7.3 * h.powf(1.5)))
            .collect();
        assert!((fit_rate(&pts).unwrap() - 1.5).abs() <= 1e-10);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        assert!(fit_rate(&[(0.1, 0.1), (0.05, 0.05)]).is_err());
        assert!(fit_rate(&[(0.1, 0.1), (0.05, 0.05), (0.025, 0.0)]).is_err());
        assert!(fit_rate(&[(0.1, 0.1), (-0.05, 0.05), (0.025, 0.01)]).is_err());
    }
}
