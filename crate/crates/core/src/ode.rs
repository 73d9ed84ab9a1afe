//! Adaptive embedded Runge–Kutta (Cash–Karp 4/5) integration over complex
//! state vectors, with per-component mixed absolute/relative error control.

use crate::error::{Error, Result};
use nalgebra::Complex;

type C64 = Complex<f64>;

/// Integration controls.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub atol: f64,
    pub rtol: f64,
    /// First trial step; `None` picks `(t1 - t0)/1000`.
    pub h_initial: Option<f64>,
    /// Abort with a non-convergence error beyond this many accepted steps.
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { atol: 1e-12, rtol: 1e-10, h_initial: None, max_steps: 50_000_000 }
    }
}

// Cash–Karp tableau.
const A2: f64 = 1.0 / 5.0;
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0];
const A5: [f64; 4] = [-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0];
const A6: [f64; 5] =
    [1631.0 / 55296.0, 175.0 / 512.0, 575.0 / 13824.0, 44275.0 / 110592.0, 253.0 / 4096.0];
const B5: [f64; 6] = [37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0];
const B4: [f64; 6] =
    [2825.0 / 27648.0, 0.0, 18575.0 / 48384.0, 13525.0 / 55296.0, 277.0 / 14336.0, 1.0 / 4.0];

/// Integrate `dy/dt = rhs(t, y)` from `t0` to `t1` (forward only), stepping
/// adaptively. Returns the state at `t1` and the number of accepted steps.
pub fn integrate<F>(
    mut rhs: F,
    y0: Vec<C64>,
    t0: f64,
    t1: f64,
    opts: &OdeOptions,
) -> Result<(Vec<C64>, usize)>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    if !(t1 > t0 && t0.is_finite() && t1.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "integration needs finite t0 < t1, got [{t0}, {t1}]"
        )));
    }
    let dim = y0.len();
    let mut y = y0;
    let mut t = t0;
    let mut h = opts.h_initial.unwrap_or((t1 - t0) / 1000.0).min(t1 - t0);
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("initial step must be positive, got {h}")));
    }
    let mut k = vec![vec![C64::new(0.0, 0.0); dim]; 6];
    let mut stage = vec![C64::new(0.0, 0.0); dim];
    let mut y5 = vec![C64::new(0.0, 0.0); dim];
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    while t < t1 {
        h = h.min(t1 - t);
        attempts += 1;
        if attempts > 4 * opts.max_steps {
            return Err(Error::NonConvergence(format!(
                "step-size control thrashed past {} attempts near t = {t}",
                4 * opts.max_steps
            )));
        }
        rhs(t, &y, &mut k[0]);
        for i in 0..dim {
            stage[i] = y[i] + k[0][i] * (A2 * h);
        }
        rhs(t + A2 * h, &stage, &mut k[1]);
        for i in 0..dim {
            stage[i] = y[i] + (k[0][i] * A3[0] + k[1][i] * A3[1]) * h;
        }
        rhs(t + 0.3 * h, &stage, &mut k[2]);
        for i in 0..dim {
            stage[i] = y[i] + (k[0][i] * A4[0] + k[1][i] * A4[1] + k[2][i] * A4[2]) * h;
        }
        rhs(t + 0.6 * h, &stage, &mut k[3]);
        for i in 0..dim {
            stage[i] = y[i]
                + (k[0][i] * A5[0] + k[1][i] * A5[1] + k[2][i] * A5[2] + k[3][i] * A5[3]) * h;
        }
        rhs(t + h, &stage, &mut k[4]);
        for i in 0..dim {
            stage[i] = y[i]
                + (k[0][i] * A6[0]
                    + k[1][i] * A6[1]
                    + k[2][i] * A6[2]
                    + k[3][i] * A6[3]
                    + k[4][i] * A6[4])
                    * h;
        }
        rhs(t + 0.875 * h, &stage, &mut k[5]);
        let mut err: f64 = 0.0;
        for i in 0..dim {
            let mut acc5 = C64::new(0.0, 0.0);
            let mut acc4 = C64::new(0.0, 0.0);
            for s in 0..6 {
                acc5 += k[s][i] * B5[s];
                acc4 += k[s][i] * B4[s];
            }
            y5[i] = y[i] + acc5 * h;
            let e = (acc5 - acc4) * h;
            let scale = opts.atol + opts.rtol * y[i].norm().max(y5[i].norm());
            err = err.max(e.norm() / scale);
        }
        if err <= 1.0 {
            t += h;
            std::mem::swap(&mut y, &mut y5);
            accepted += 1;
            if accepted > opts.max_steps {
                return Err(Error::NonConvergence(format!(
                    "integration exceeded {} accepted steps before reaching t = {t1}",
                    opts.max_steps
                )));
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if !(h > 0.0) || !h.is_finite() || t + h == t {
            return Err(Error::NonConvergence(format!(
                "step size underflowed at t = {t} (h = {h}); the system is too stiff for this \
                 tolerance"
            )));
        }
    }
    Ok((y, accepted))
}
