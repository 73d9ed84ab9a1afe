//! Grid-based peak detection, golden-section refinement, and threshold
//! crossings for sensitivity curves.

use crate::error::{Error, Result};

/// A refined local maximum of a scanned curve.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Peak {
    /// Abscissa of the maximum.
    pub x: f64,
    /// Curve value at the maximum.
    pub value: f64,
}

/// Strict interior local maxima of `values` over `grid`: index `i` with
/// `values[i] > values[i-1]` and `values[i] > values[i+1]`. Non-finite
/// samples never qualify and never act as neighbors worth beating.
pub fn local_maxima(grid: &[f64], values: &[f64]) -> Vec<usize> {
    assert_eq!(grid.len(), values.len(), "grid and values must pair up");
    let mut out = Vec::new();
    for i in 1..values.len().saturating_sub(1) {
        let v = values[i];
        if !v.is_finite() {
            continue;
        }
        let left = if values[i - 1].is_finite() { values[i - 1] } else { f64::NEG_INFINITY };
        let right = if values[i + 1].is_finite() { values[i + 1] } else { f64::NEG_INFINITY };
        if v > left && v > right {
            out.push(i);
        }
    }
    out
}

/// Golden-section maximization of a unimodal `f` on `[lo, hi]` to relative
/// abscissa tolerance `rel_tol`.
pub fn golden_max<F>(mut f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<Peak>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidInput(format!(
            "golden-section bracket must be finite with lo < hi, got [{lo}, {hi}]"
        )));
    }
    if !(rel_tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {rel_tol}")));
    }
    const INVPHI: f64 = 0.618_033_988_749_894_9; // (√5 - 1)/2
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..400 {
        if (b - a).abs() <= rel_tol * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok(Peak { x, value: f(x)? })
}

/// Refine every interior grid maximum of `f` sampled at `grid` by a
/// golden-section pass over its bracketing neighbors. Returned peaks are
/// ordered by ascending abscissa.
pub fn refined_maxima<F>(mut f: F, grid: &[f64], values: &[f64], rel_tol: f64) -> Result<Vec<Peak>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut peaks = Vec::new();
    for i in local_maxima(grid, values) {
        peaks.push(golden_max(&mut f, grid[i - 1], grid[i + 1], rel_tol)?);
    }
    Ok(peaks)
}

/// Smallest abscissa in `[lo, hi]` where a decreasing-through-threshold `f`
/// first satisfies `f(x) <= threshold`, found by bisection on the sign of
/// `f - threshold`. Requires `f(lo) > threshold >= f(hi)`.
pub fn first_crossing<F>(mut f: F, lo: f64, hi: f64, threshold: f64, rel_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidInput(format!(
            "crossing bracket must be finite with lo < hi, got [{lo}, {hi}]"
        )));
    }
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if !(flo > threshold) || !(fhi <= threshold) {
        return Err(Error::NonConvergence(format!(
            "threshold {threshold} is not bracketed: f({lo}) = {flo}, f({hi}) = {fhi}"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..400 {
        if (b - a).abs() <= rel_tol * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        let mid = 0.5 * (a + b);
        if f(mid)? > threshold {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_maxima_are_strict_and_interior() {
        let grid: Vec<f64> = (0..7).map(|i| i as f64).collect();
        // plateaus and endpoints never count
        let values = [5.0, 1.0, 2.0, 2.0, 1.0, 3.0, 9.0];
        assert_eq!(local_maxima(&grid, &values), vec![] as Vec<usize>);
        let values = [0.0, 1.0, 0.5, 2.0, 0.0, 1.0, 0.0];
        assert_eq!(local_maxima(&grid, &values), vec![1, 3, 5]);
    }

    #[test]
    fn non_finite_samples_never_qualify() {
        let grid: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let values = [0.0, f64::INFINITY, 1.0, f64::NAN, 0.0];
        assert_eq!(local_maxima(&grid, &values), vec![2]);
    }

    #[test]
    fn golden_section_finds_a_quadratic_vertex() {
        let peak = golden_max(|x| Ok(-(x - 0.3).powi(2)), 0.0, 1.0, 1e-12).unwrap();
        assert_relative_eq!(peak.x, 0.3, max_relative = 1e-9);
        assert!(peak.value > -1e-18);
    }

    #[test]
    fn refined_maxima_recovers_two_bumps() {
        let f = |x: f64| {
            Ok((-(x - 0.2f64).powi(2) / 1e-3).exp() + 0.5 * (-(x - 0.7f64).powi(2) / 1e-3).exp())
        };
        let grid: Vec<f64> = (0..101).map(|i| i as f64 / 100.0).collect();
        let values: Vec<f64> = grid.iter().map(|&x| f(x).unwrap()).collect();
        let peaks = refined_maxima(f, &grid, &values, 1e-10).unwrap();
        assert_eq!(peaks.len(), 2);
        assert_relative_eq!(peaks[0].x, 0.2, max_relative = 1e-6);
        assert_relative_eq!(peaks[1].x, 0.7, max_relative = 1e-6);
    }

    #[test]
    fn crossing_finds_the_threshold() {
        let x = first_crossing(|x| Ok(1.0 / x), 0.1, 10.0, 2.0, 1e-12).unwrap();
        assert_relative_eq!(x, 0.5, max_relative = 1e-9);
        assert!(first_crossing(|x| Ok(1.0 / x), 0.1, 10.0, 100.0, 1e-12).is_err());
    }
}
