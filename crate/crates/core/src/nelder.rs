//! Deterministic Nelder–Mead simplex minimization over a box, with a few
//! fixed-pattern restarts to shake off premature collapse. No randomness:
//! identical inputs give bit-identical results.

use crate::error::{Error, Result};

/// Controls for [`minimize`].
#[derive(Debug, Clone, Copy)]
pub struct NelderOptions {
    /// Iteration budget per restart.
    pub max_iters: usize,
    /// Stop when the simplex diameter falls below this, relative to the
    /// box size.
    pub x_tol: f64,
    /// Stop when the objective spread across the simplex falls below this,
    /// relative to the best value.
    pub f_tol: f64,
    /// Additional restarts from the incumbent with rescaled simplices.
    pub restarts: usize,
    /// First simplex edge length, relative to the box size per dimension.
    pub initial_scale: f64,
}

impl Default for NelderOptions {
    fn default() -> Self {
        NelderOptions {
            max_iters: 2000,
            x_tol: 1e-10,
            f_tol: 1e-12,
            restarts: 3,
            initial_scale: 0.05,
        }
    }
}

/// Minimize `f` over the box `[lower, upper]`, starting at `x0`. Points
/// outside the box are never evaluated (they count as `+∞`). Returns the
/// best point and its value.
pub fn minimize<F>(
    mut f: F,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: &NelderOptions,
) -> Result<(Vec<f64>, f64)>
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    if n == 0 || lower.len() != n || upper.len() != n {
        return Err(Error::InvalidInput(
            "start point and bounds must share a positive dimension".into(),
        ));
    }
    for i in 0..n {
        if !(lower[i] < upper[i]) || !x0[i].is_finite() {
            return Err(Error::InvalidInput(format!(
                "bad box or start in dimension {i}: x0 = {}, bounds [{}, {}]",
                x0[i], lower[i], upper[i]
            )));
        }
        if x0[i] < lower[i] || x0[i] > upper[i] {
            return Err(Error::InvalidInput(format!(
                "start point {} outside [{}, {}] in dimension {i}",
                x0[i], lower[i], upper[i]
            )));
        }
    }
    let mut eval = |x: &[f64]| -> f64 {
        for i in 0..n {
            if x[i] < lower[i] || x[i] > upper[i] || !x[i].is_finite() {
                return f64::INFINITY;
            }
        }
        f(x)
    };
    // Fixed rescale pattern for restarts; no RNG so runs are reproducible.
    const RESCALE: [f64; 8] = [1.0, 0.37, 1.9, 0.13, 0.71, 2.6, 0.052, 1.3];
    let mut best_x = x0.to_vec();
    let mut best_f = eval(&best_x);
    for restart in 0..=opts.restarts {
        let scale = opts.initial_scale * RESCALE[restart % RESCALE.len()];
        let (x, fx) = run_simplex(&mut eval, &best_x, lower, upper, scale, opts);
        if fx < best_f {
            best_f = fx;
            best_x = x;
        }
    }
    if !best_f.is_finite() {
        return Err(Error::NonConvergence(
            "simplex search never found a finite objective value inside the box".into(),
        ));
    }
    Ok((best_x, best_f))
}

fn run_simplex<F>(
    eval: &mut F,
    start: &[f64],
    lower: &[f64],
    upper: &[f64],
    scale: f64,
    opts: &NelderOptions,
) -> (Vec<f64>, f64)
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut v = start.to_vec();
        let span = upper[i] - lower[i];
        let mut step = scale * span;
        if v[i] + step > upper[i] {
            step = -step;
        }
        v[i] = (v[i] + step).clamp(lower[i], upper[i]);
        if v[i] == start[i] {
            v[i] = (v[i] + 0.5 * span * scale).clamp(lower[i], upper[i]);
        }
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();
    for _ in 0..opts.max_iters {
        // order best → worst
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        let reorder: Vec<Vec<f64>> = idx.iter().map(|&i| simplex[i].clone()).collect();
        let revals: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
        simplex = reorder;
        values = revals;
        let f_best = values[0];
        let f_worst = values[n];
        let mut diameter: f64 = 0.0;
        for v in &simplex[1..] {
            for i in 0..n {
                diameter = diameter.max((v[i] - simplex[0][i]).abs() / (upper[i] - lower[i]));
            }
        }
        let spread_ok = if f_worst.is_finite() {
            (f_worst - f_best).abs() <= opts.f_tol * (f_best.abs() + 1e-300)
        } else {
            false
        };
        if diameter <= opts.x_tol && (spread_ok || !f_worst.is_finite()) {
            break;
        }
        if spread_ok && diameter <= opts.x_tol.max(1e-14) {
            break;
        }
        // centroid of all but worst
        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for i in 0..n {
                centroid[i] += v[i] / n as f64;
            }
        }
        let line = |t: f64| -> Vec<f64> {
            (0..n).map(|i| centroid[i] + t * (centroid[i] - simplex[n][i])).collect()
        };
        let reflected = line(1.0);
        let f_ref = eval(&reflected);
        if f_ref < values[0] {
            let expanded = line(2.0);
            let f_exp = eval(&expanded);
            if f_exp < f_ref {
                simplex[n] = expanded;
                values[n] = f_exp;
            } else {
                simplex[n] = reflected;
                values[n] = f_ref;
            }
        } else if f_ref < values[n - 1] {
            simplex[n] = reflected;
            values[n] = f_ref;
        } else {
            let contracted = if f_ref < values[n] { line(0.5) } else { line(-0.5) };
            let f_con = eval(&contracted);
            if f_con < values[n].min(f_ref) {
                simplex[n] = contracted;
                values[n] = f_con;
            } else {
                // shrink toward the best vertex
                for v in 1..=n {
                    for i in 0..n {
                        simplex[v][i] = 0.5 * (simplex[v][i] + simplex[0][i]);
                    }
                    values[v] = eval(&simplex[v]);
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..=n {
        if values[i] < values[best] {
            best = i;
        }
    }
    (simplex[best].clone(), values[best])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quadratic_bowl_is_found_to_high_precision() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + 2.0 * (x[1] + 0.1).powi(2);
        let (x, v) =
            minimize(f, &[0.9, 0.9], &[-1.0, -1.0], &[1.0, 1.0], &NelderOptions::default())
                .unwrap();
        assert_relative_eq!(x[0], 0.3, epsilon = 1e-6);
        assert_relative_eq!(x[1], -0.1, epsilon = 1e-6);
        assert!(v < 1e-12);
    }

    #[test]
    fn runs_are_bit_reproducible() {
        let f = |x: &[f64]| (x[0] * 3.7).sin() + (x[0] - 0.2).powi(2);
        let a = minimize(f, &[0.5], &[-2.0], &[2.0], &NelderOptions::default()).unwrap();
        let b = minimize(f, &[0.5], &[-2.0], &[2.0], &NelderOptions::default()).unwrap();
        assert_eq!(a.0[0].to_bits(), b.0[0].to_bits());
        assert_eq!(a.1.to_bits(), b.1.to_bits());
    }

    #[test]
    fn box_is_respected() {
        // unconstrained optimum at 2.0, box caps at 1.0
        let f = |x: &[f64]| (x[0] - 2.0).powi(2);
        let (x, _) = minimize(f, &[0.0], &[-1.0], &[1.0], &NelderOptions::default()).unwrap();
        assert!(x[0] <= 1.0 && x[0] > 0.97, "got {}", x[0]);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let f = |_: &[f64]| 0.0;
        assert!(minimize(f, &[], &[], &[], &NelderOptions::default()).is_err());
        let f = |_: &[f64]| 0.0;
        assert!(minimize(f, &[2.0], &[0.0], &[1.0], &NelderOptions::default()).is_err());
        let f = |_: &[f64]| f64::INFINITY;
        assert!(matches!(
            minimize(f, &[0.5], &[0.0], &[1.0], &NelderOptions::default()),
            Err(Error::NonConvergence(_))
        ));
    }

    #[test]
    fn restarts_escape_a_shallow_trap() {
        // narrow deep well at 0.8 next to a broad shallow one at -0.5
        let f = |x: &[f64]| {
            let broad = 0.5 * (x[0] + 0.5).powi(2);
            let deep = -2.0 * (-(x[0] - 0.8).powi(2) / 0.002).exp();
            broad + deep
        };
        let (x, _) = minimize(
            f,
            &[0.75],
            &[-2.0],
            &[2.0],
            &NelderOptions { initial_scale: 0.02, ..NelderOptions::default() },
        )
        .unwrap();
        assert_relative_eq!(x[0], 0.8, epsilon = 1e-3);
    }
}
