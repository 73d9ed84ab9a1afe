//! Integer-order Bessel functions of the first kind.
//!
//! The sideband-weight formulas only ever need `J_n(x)` for the small
//! arguments set by modulation depths (`|x| ≲ 1` in practice; everything
//! below `|x| ≤ 8` is comfortably covered). In that range the ascending
//! power series is the method of choice: its terms decay factorially after
//! the first few, the leading term already carries the correct scale for
//! high orders, and no downward recurrence bookkeeping is needed.

/// `J_n(x)` for any integer order; negative orders use `J_{-n} = (-1)^n J_n`.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    let order = n.unsigned_abs();
    let sign = if n < 0 && order % 2 == 1 { -1.0 } else { 1.0 };
    sign * bessel_j_series(order, x)
}

fn bessel_j_series(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    let q = half * half;
    // Leading term (x/2)^n / n!, built as a running product so large orders
    // underflow gracefully to zero instead of overflowing intermediates.
    let mut term = 1.0_f64;
    for j in 1..=n {
        term *= half / f64::from(j);
    }
    if term == 0.0 {
        return 0.0;
    }
    let mut sum = term;
    for k in 1..=300u32 {
        term *= -q / (f64::from(k) * f64::from(n + k));
        sum += term;
        if term.abs() < 1e-320 || term.abs() <= f64::EPSILON * 1e-4 * (sum.abs() + 1e-300) {
            break;
        }
    }
    sum
}
