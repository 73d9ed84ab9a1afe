//! Quantum Fisher information (QFI) for temperature estimation.
//!
//! The dressed steady state is diagonal and geometric in the effective
//! Boltzmann factor `x(T)`, so the QFI of the temperature family is the
//! classical Fisher information of its populations:
//! `H = (d ln x / dT)² · Var(n)`. Three independent evaluation routes are
//! provided and must agree:
//!
//! 1. [`qfi_closed_form`] — analytic `dx/dT` from the comb sums (valid when
//!    the heating channels at negative comb frequencies carry negligible
//!    rate mass; otherwise it transparently falls back to route 2 and
//!    records the offending weight);
//! 2. [`qfi_population_derivative`] — step-halved central differences of
//!    the populations;
//! 3. [`qfi_fidelity_difference`] — second difference of the squared
//!    Uhlmann fidelity between neighboring thermal states,
//!    `H = -2·∂²F²(ρ(T), ρ(T+ε))/∂ε²`.
//!
//! Each report also carries the per-sideband decomposition
//! `H = H_{-1} + H̃_0 + H_{+1} + H_rem`, the dominance indicator
//! `R = ln(H_{-1}/|H - H_{-1}|)`, and the relative-error bound
//! `ξ = 1/(T·√(𝓜·H))` for `𝓜` independent measurements.

use crate::bath::BathSpectrum;
use crate::error::{Error, Result};
use crate::sidebands::SidebandSet;
use crate::spectral::SpectralSums;
use crate::steady::{steady_state, ProbeSpec};
use serde::Serialize;

/// Default relative step for population central differences.
pub const DEFAULT_REL_STEP: f64 = 1e-4;
/// Default relative offset for the fidelity second difference.  A second
/// difference divides by `ε²`, so `ε` must start large enough that the
/// quadratic fidelity deficit stands well clear of the floating-point floor;
/// Richardson extrapolation inside the solver removes the bias this larger
/// offset would otherwise cost.
pub const DEFAULT_REL_EPS: f64 = 1e-2;

/// Which route produced a [`QfiReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QfiMethod {
    ClosedForm,
    PopulationDerivative,
    FidelityDifference,
}

/// Per-sideband split of the QFI.
///
/// `h_m1`, `h_0`, `h_p1` ascribe to the red (`m < 0`, positive frequency),
/// carrier, and blue (`m > 0`) comb lines the sensitivity each would have
/// as a stand-alone thermal channel of weight `P_m`; `h_rem` is the signed
/// remainder against the full QFI (it absorbs interference between
/// channels and any negative-frequency mass).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QfiComponents {
    pub h_m1: f64,
    pub h_0: f64,
    pub h_p1: f64,
    pub h_rem: f64,
}

/// One QFI evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct QfiReport {
    /// Quantum Fisher information for temperature at this point.
    pub h: f64,
    pub components: QfiComponents,
    /// Relative-error bound `1/(T√(𝓜·H))`.
    pub xi: f64,
    pub m_measurements: u64,
    /// Dominance indicator `ln(H_{-1}/|H - H_{-1}|)`.
    pub r: f64,
    pub method: QfiMethod,
    /// Fraction of the transition-rate mass carried by negative-frequency
    /// sidebands at this temperature.
    pub negative_weight: f64,
}

/// Evaluation controls shared by all routes.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QfiParams {
    /// Number of independent measurements in the error bound.
    pub m_measurements: u64,
    /// Largest comb deficit accepted before the truncation is deemed
    /// physically meaningless.
    pub completeness_tol: f64,
}

impl Default for QfiParams {
    fn default() -> Self {
        // The completeness default admits deliberate few-line models
        // (carrier ± first sidebands at moderate depth loses ~1e-4 of the
        // weight) while still rejecting combs truncated mid-support.
        QfiParams { m_measurements: 1, completeness_tol: 1e-3 }
    }
}

/// Sensitivity of a bare thermal channel at gap `ω`:
/// `h(ω, T) = ω² e^{-ω/T} / (T⁴ (1 - e^{-ω/T})²)`, the QFI an infinite
/// ladder with Boltzmann factor `e^{-ω/T}` would have. Finite for all
/// `ω ≥ 0` (limit `1/T²` at `ω = 0`), underflows to zero deep in the
/// quantum regime.
pub fn qfi_unmodulated(omega: f64, temperature: f64) -> f64 {
    debug_assert!(omega >= 0.0 && temperature > 0.0);
    if omega == 0.0 {
        return 1.0 / (temperature * temperature);
    }
    let u = omega / temperature;
    let e = (-u).exp();
    if e == 0.0 {
        return 0.0;
    }
    let d = -(-u).exp_m1(); // 1 - e^{-u}, cancellation-free
    (omega * omega) / (temperature.powi(4)) * e / (d * d)
}

/// Relative-error bound `ξ = 1/(T·√(𝓜·H))`; `+∞` when the QFI vanishes.
pub fn error_bound(h: f64, temperature: f64, m_measurements: u64) -> f64 {
    if !(h > 0.0) {
        return f64::INFINITY;
    }
    1.0 / (temperature * (m_measurements as f64 * h).sqrt())
}

/// Dominance indicator `R = ln(H_{-1}/|H - H_{-1}|)`: `+∞` when the red
/// sideband carries the entire QFI, `-∞` when it carries none.
pub fn dominance_indicator(components: &QfiComponents, h: f64) -> f64 {
    if components.h_m1 <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let rest = (h - components.h_m1).abs();
    if rest == 0.0 {
        return f64::INFINITY;
    }
    (components.h_m1 / rest).ln()
}

fn decompose(sidebands: &SidebandSet, temperature: f64, h_total: f64) -> QfiComponents {
    let mut h_m1 = 0.0;
    let mut h_0 = 0.0;
    let mut h_p1 = 0.0;
    for sb in sidebands.entries() {
        if sb.weight == 0.0 || sb.omega < 0.0 {
            continue; // negative-frequency mass shows up in the remainder
        }
        let contrib = sb.weight * qfi_unmodulated(sb.omega, temperature);
        match sb.m.cmp(&0) {
            std::cmp::Ordering::Less => h_m1 += contrib,
            std::cmp::Ordering::Equal => h_0 += contrib,
            std::cmp::Ordering::Greater => h_p1 += contrib,
        }
    }
    QfiComponents { h_m1, h_0, h_p1, h_rem: h_total - (h_m1 + h_0 + h_p1) }
}

fn finish_report(
    h: f64,
    sidebands: &SidebandSet,
    temperature: f64,
    params: &QfiParams,
    method: QfiMethod,
    negative_weight: f64,
) -> QfiReport {
    let components = decompose(sidebands, temperature, h);
    QfiReport {
        h,
        components,
        xi: error_bound(h, temperature, params.m_measurements),
        m_measurements: params.m_measurements,
        r: dominance_indicator(&components, h),
        method,
        negative_weight,
    }
}

/// Closed-form QFI from the analytic `dx/dT` of the full comb.
///
/// The stationary ladder is geometric in `x = C₂/C₁` no matter how the two
/// rates split between cooling sidebands and drive-induced heating
/// channels, so `H = (d ln x/dT)² Var(n)` holds exactly for every
/// admissible comb.  The log-derivative is assembled as
/// `(κ' - x·dn') / C₂`, which covers the heating channels' own temperature
/// dependence and never divides by a possibly-subnormal `x`.
pub fn qfi_closed_form(
    probe: &ProbeSpec,
    bath: &BathSpectrum,
    sidebands: &SidebandSet,
    temperature: f64,
    params: &QfiParams,
) -> Result<QfiReport> {
    sidebands.require_completeness(params.completeness_tol)?;
    let sums = SpectralSums::collect(bath, sidebands, temperature)?;
    let x = sums.boltzmann()?;
    let negative_weight = sums.negative_weight();
    let h = if x == 0.0 {
        0.0
    } else {
        let dlnx = (sums.kappa_deriv - x * sums.dn_neg_deriv) / sums.c2();
        let variance = steady_state(probe, x, temperature)?.variance();
        dlnx * dlnx * variance
    };
    Ok(finish_report(h, sidebands, temperature, params, QfiMethod::ClosedForm, negative_weight))
}

const HALVING_LIMIT: u32 = 60;
const STEP_TOL: f64 = 1e-8;
/// Largest successive-pair disagreement still accepted when halving bottoms
/// out on the floating-point noise floor instead of reaching `STEP_TOL`.
const NOISE_FLOOR_TOL: f64 = 1e-6;

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.c += (self.sum - t) + v;
        } else {
            self.c += (v - t) + self.sum;
        }
        self.sum = t;
    }
    fn value(&self) -> f64 {
        self.sum + self.c
    }
    /// `sum - 1` with the compensation applied after the exact near-one
    /// subtraction, so the tiny normalization slop of a probability vector
    /// survives to full precision.
    fn minus_one(&self) -> f64 {
        (self.sum - 1.0) + self.c
    }
}

/// Step-halving driver for an estimator whose systematic error is `O(ε²)`.
///
/// Returns the Richardson extrapolation of the first successive pair that
/// agrees to `STEP_TOL`.  Signals too small for floating point collapse to
/// an exact zero pair on the way down and so converge to the representable
/// answer `0`.  If the floor or the iteration cap is reached without a
/// stabilized pair, the best pair seen is accepted as long as it agrees to
/// [`NOISE_FLOOR_TOL`].
fn halve_to_convergence(
    mut estimate: impl FnMut(f64) -> Result<f64>,
    eps0: f64,
    eps_floor: f64,
    label: &str,
) -> Result<f64> {
    let mut eps = eps0;
    let mut prev: Option<f64> = None;
    let mut best: Option<(f64, f64)> = None; // (relative pair gap, extrapolated value)
    for _ in 0..HALVING_LIMIT {
        if eps < eps_floor {
            break;
        }
        let h = estimate(eps)?;
        if let Some(p) = prev {
            let extrapolated = (4.0 * h - p) / 3.0;
            let gap = (h - p).abs();
            let scale = h.abs().max(p.abs());
            if gap <= STEP_TOL * scale + 1e-300 {
                return Ok(extrapolated);
            }
            let rel = gap / (scale + 1e-300);
            match best {
                Some((b, _)) if rel >= b => {}
                _ => best = Some((rel, extrapolated)),
            }
        }
        prev = Some(h);
        eps *= 0.5;
    }
    if let Some((rel, extrapolated)) = best {
        if rel <= NOISE_FLOOR_TOL {
            return Ok(extrapolated);
        }
    }
    Err(Error::NonConvergence(format!(
        "{label} step halving hit the floating-point noise floor before successive estimates \
         stabilized"
    )))
}

/// QFI from step-halved central differences of the steady-state populations:
/// `H = Σ_n (∂ϱ_n/∂T)² / ϱ_n`.
pub fn qfi_population_derivative(
    probe: &ProbeSpec,
    bath: &BathSpectrum,
    sidebands: &SidebandSet,
    temperature: f64,
    rel_step: f64,
    params: &QfiParams,
) -> Result<QfiReport> {
    sidebands.require_completeness(params.completeness_tol)?;
    if !(rel_step > 0.0 && rel_step <= 0.1) {
        return Err(Error::InvalidInput(format!(
            "relative differentiation step must lie in (0, 0.1], got {rel_step}"
        )));
    }
    let sums = SpectralSums::collect(bath, sidebands, temperature)?;
    let x0 = sums.boltzmann()?;
    // The adaptive ladder choice must not jump between the three evaluation
    // temperatures of one difference, so pin it at the center.
    let pinned = probe.pinned(x0);
    let center = steady_state(&pinned, x0, temperature)?.populations;
    let fisher_at = |step: f64| -> Result<f64> {
        let xp = effective(bath, sidebands, temperature + step)?;
        let xm = effective(bath, sidebands, temperature - step)?;
        let plus = steady_state(&pinned, xp, temperature + step)?.populations;
        let minus = steady_state(&pinned, xm, temperature - step)?.populations;
        let mut fisher = 0.0;
        for (n, &p) in center.iter().enumerate() {
            if p < 1e-300 {
                continue;
            }
            let d = (plus[n] - minus[n]) / (2.0 * step);
            fisher += d * d / p;
        }
        Ok(fisher)
    };
    let fisher = halve_to_convergence(
        fisher_at,
        (rel_step * temperature).max(1e-12),
        temperature * 1e-13,
        "population-derivative",
    )?;
    let mut report = finish_report(
        fisher,
        sidebands,
        temperature,
        params,
        QfiMethod::PopulationDerivative,
        sums.negative_weight(),
    );
    report.negative_weight = sums.negative_weight();
    Ok(report)
}

fn effective(bath: &BathSpectrum, sidebands: &SidebandSet, temperature: f64) -> Result<f64> {
    SpectralSums::collect(bath, sidebands, temperature)?.boltzmann()
}

/// QFI from the squared Uhlmann fidelity between neighboring steady states:
/// `H = -2·[F²(ε) + F²(-ε) - 2]/ε²` with `ε` halved until stable.
///
/// For the diagonal states here `F = Σ_n √(ϱ_n(T) ϱ_n(T'))`; both `F - 1`
/// and `F² - 1` are assembled cancellation-free so the second difference
/// keeps full relative precision even when `1 - F ~ 1e-15`.
pub fn qfi_fidelity_difference(
    probe: &ProbeSpec,
    bath: &BathSpectrum,
    sidebands: &SidebandSet,
    temperature: f64,
    rel_eps: f64,
    params: &QfiParams,
) -> Result<QfiReport> {
    sidebands.require_completeness(params.completeness_tol)?;
    if !(rel_eps > 0.0 && rel_eps <= 0.1) {
        return Err(Error::InvalidInput(format!(
            "relative fidelity offset must lie in (0, 0.1], got {rel_eps}"
        )));
    }
    let sums = SpectralSums::collect(bath, sidebands, temperature)?;
    let x0 = sums.boltzmann()?;
    let pinned = probe.pinned(x0);
    let center = steady_state(&pinned, x0, temperature)?.populations;
    // (F² - 1) between the exactly renormalized states p/Σp and q/Σq.  With
    // the slops dp = Σp - 1, dq = Σq - 1, s = Σ(√p - √q)², and
    // a = ½dp + ½dq - ½s, expanding F = Σ√(pq) = 1 + a gives exactly
    //
    //   F̄² - 1 = (a² - s - dp·dq) / ((1 + dp)(1 + dq)).
    //
    // The slops enter only multiplicatively, so their ~1e-16 jitter cannot
    // swamp the O(ε²) fidelity deficit no matter how small ε gets; the noise
    // floor is set by the far smaller rounding of the √-difference terms.
    let fsq_m1 = |other: &[f64]| -> f64 {
        let mut cross = Compensated::default();
        let mut sum_p = Compensated::default();
        let mut sum_q = Compensated::default();
        for (&p, &q) in center.iter().zip(other.iter()) {
            let d = p.sqrt() - q.sqrt();
            cross.add(d * d);
            sum_p.add(p);
            sum_q.add(q);
        }
        let dp = sum_p.minus_one();
        let dq = sum_q.minus_one();
        let s = cross.value();
        let a = 0.5 * dp + 0.5 * dq - 0.5 * s;
        (a * a - s - dp * dq) / ((1.0 + dp) * (1.0 + dq))
    };
    let curvature_at = |eps: f64| -> Result<f64> {
        let xp = effective(bath, sidebands, temperature + eps)?;
        let xm = effective(bath, sidebands, temperature - eps)?;
        let plus = steady_state(&pinned, xp, temperature + eps)?.populations;
        let minus = steady_state(&pinned, xm, temperature - eps)?.populations;
        Ok(-2.0 * (fsq_m1(&plus) + fsq_m1(&minus)) / (eps * eps))
    };
    let h = halve_to_convergence(
        curvature_at,
        rel_eps * temperature,
        temperature * 1e-12,
        "fidelity-difference",
    )?;
    let mut report = finish_report(
        h,
        sidebands,
        temperature,
        params,
        QfiMethod::FidelityDifference,
        sums.negative_weight(),
    );
    report.negative_weight = sums.negative_weight();
    Ok(report)
}

/// Exact QFI of the three-sideband small-depth model of a sinusoidal drive
/// (weights `P₀ = 1 - μ²/2`, `P_{±1} = μ²/4` on a flat spectral plateau),
/// assembled from occupation factors so it stays finite arbitrarily deep in
/// the quantum regime.
pub fn qfi_sinusoidal_closed(mu: f64, delta: f64, omega0: f64, temperature: f64) -> Result<f64> {
    if !(mu >= 0.0 && mu <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "three-sideband model needs 0 <= mu <= 1, got {mu}"
        )));
    }
    if !(delta > 0.0 && delta < omega0) {
        return Err(Error::InvalidInput(format!(
            "three-sideband model needs 0 < delta < omega0, got delta = {delta}, omega0 = {omega0}"
        )));
    }
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::InvalidInput(format!(
            "temperature must be positive and finite, got {temperature}"
        )));
    }
    let p0 = 1.0 - 0.5 * mu * mu;
    let p1 = 0.25 * mu * mu;
    let t2 = temperature * temperature;
    let mut x = 0.0;
    let mut dx = 0.0;
    for (p, w) in [(p0, omega0), (p1, omega0 + delta), (p1, omega0 - delta)] {
        let e = p * (-w / temperature).exp();
        x += e;
        dx += e * w / t2;
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let d = 1.0 - x;
    Ok(dx * dx / (x * d * d))
}

/// Temperature at which the sensitivity of a bare gap `ω₀` peaks: the
/// unique fixed point of `T = (ω₀/4)·coth(ω₀/(2T))`, solved by bisection to
/// full precision.
pub fn t0_fixed_point(omega0: f64) -> Result<f64> {
    if !(omega0 > 0.0) || !omega0.is_finite() {
        return Err(Error::InvalidInput(format!(
            "carrier frequency must be positive and finite, got {omega0}"
        )));
    }
    let f = |t: f64| 0.25 * omega0 / (0.5 * omega0 / t).tanh() - t;
    let mut lo = 0.25 * omega0;
    let mut hi = 2.0 * omega0;
    debug_assert!(f(lo) > 0.0 && f(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Options for [`scaling_exponent`].
#[derive(Debug, Clone, Copy)]
pub struct ScalingOptions {
    /// Carrier frequency of the matched drive.
    pub omega0: f64,
    /// Sinusoidal depth used at every grid point.
    pub mu: f64,
    /// Quantum-regime floor: every grid temperature must exceed
    /// `validity_factor · G(κT)`.
    pub validity_factor: f64,
}

impl Default for ScalingOptions {
    fn default() -> Self {
        ScalingOptions { omega0: 1.0, mu: 0.2, validity_factor: 100.0 }
    }
}

/// Log-log fit of the matched-drive QFI.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    /// Fitted slope of `ln H` vs `ln T`.
    pub exponent: f64,
    /// `exp` of the fitted intercept: `H ≈ prefactor · T^exponent`.
    pub prefactor: f64,
    /// The `(T, H)` samples entering the fit.
    pub points: Vec<(f64, f64)>,
}

/// Low-temperature scaling of the *matched* scheme: at every grid
/// temperature the drive is retuned so the red sideband sits at `κT`
/// (`Δ = ω₀ - κT`), and the resulting QFI is fit to a power law in `T`.
pub fn scaling_exponent(
    bath: &BathSpectrum,
    kappa: f64,
    t_grid: &[f64],
    opts: &ScalingOptions,
) -> Result<ScalingReport> {
    if t_grid.len() < 2 {
        return Err(Error::InvalidInput("scaling fit needs at least two temperatures".into()));
    }
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidInput(format!(
            "matching ratio kappa must be positive and finite, got {kappa}"
        )));
    }
    let params = QfiParams { completeness_tol: 1e-3, ..QfiParams::default() };
    let probe = ProbeSpec::OscillatorTruncated { n_max: None };
    let mut points = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidInput(format!("grid temperature must be positive, got {t}")));
        }
        let gap = kappa * t;
        if gap >= opts.omega0 {
            return Err(Error::InvalidInput(format!(
                "matched sideband gap κT = {gap} reaches the carrier {}; grid too hot for κ = {kappa}",
                opts.omega0
            )));
        }
        let floor = opts.validity_factor * bath.spectral_response(gap)?;
        if t <= floor {
            return Err(Error::RegimeViolation(format!(
                "temperature {t} is below the dissipative floor {floor:.3e} \
                 ({}·G at the matched gap); the weak-coupling steady-state picture fails there",
                opts.validity_factor
            )));
        }
        let modulation =
            crate::modulation::Modulation::sinusoidal(opts.omega0, opts.omega0 - gap, opts.mu)?;
        let set = crate::sidebands::sideband_weights_analytic(&modulation, 1)?;
        let report = qfi_closed_form(&probe, bath, &set, t, &params)?;
        if !(report.h > 0.0) {
            return Err(Error::RegimeViolation(format!(
                "QFI vanished at T = {t}; no power law can be fit through zero"
            )));
        }
        points.push((t, report.h));
    }
    let n = points.len() as f64;
    let (mut xbar, mut ybar) = (0.0, 0.0);
    for &(t, h) in &points {
        xbar += t.ln();
        ybar += h.ln();
    }
    xbar /= n;
    ybar /= n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(t, h) in &points {
        let dx = t.ln() - xbar;
        sxy += dx * (h.ln() - ybar);
        sxx += dx * dx;
    }
    let exponent = sxy / sxx;
    let prefactor = (ybar - exponent * xbar).exp();
    Ok(ScalingReport { exponent, prefactor, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulation::Modulation;
    use crate::sidebands::{sideband_weights_analytic, SidebandSet};
    use approx::assert_relative_eq;

    fn nfbs() -> BathSpectrum {
        BathSpectrum::nearly_flat(1e-10, 1e-6, 100.0).unwrap()
    }

    fn osc() -> ProbeSpec {
        ProbeSpec::OscillatorTruncated { n_max: None }
    }

    fn three_line_set(mu: f64, delta: f64) -> SidebandSet {
        let m = Modulation::sinusoidal(1.0, delta, mu).unwrap();
        sideband_weights_analytic(&m, 1).unwrap()
    }

    // Reference values computed independently with 40-digit arithmetic.
    #[test]
    fn closed_form_matches_reference() {
        let cases = [
            (0.2, 0.5, 0.1, 0.54522325718349381594),
            (0.2, 0.9, 0.025, 4.6440254184489605244),
            (0.4, 0.3, 0.2, 4.3085276831491235147),
        ];
        for (mu, delta, t, expect) in cases {
            let set = three_line_set(mu, delta);
            let report =
                qfi_closed_form(&osc(), &nfbs(), &set, t, &QfiParams::default()).unwrap();
            assert_relative_eq!(report.h, expect, max_relative = 1e-12);
            assert_eq!(report.method, QfiMethod::ClosedForm);
            assert_eq!(report.negative_weight, 0.0);
        }
    }

    #[test]
    fn qubit_probe_matches_two_level_formula() {
        // Unmodulated qubit at gap 1, T = 0.1:
        // H = ω² e^{ω/T} / ((e^{ω/T}+1)² T⁴)
        let set = SidebandSet::carrier_only(1.0);
        let report = qfi_closed_form(
            &ProbeSpec::FiniteN { max_level: 1 },
            &nfbs(),
            &set,
            0.1,
            &QfiParams::default(),
        )
        .unwrap();
        assert_relative_eq!(report.h, 0.45395807735951671032, max_relative = 1e-12);
    }

    #[test]
    fn unmodulated_ladder_matches_channel_sensitivity() {
        let set = SidebandSet::carrier_only(1.0);
        let report =
            qfi_closed_form(&osc(), &nfbs(), &set, 0.262, &QfiParams::default()).unwrap();
        let direct = qfi_unmodulated(1.0, 0.262);
        assert_relative_eq!(report.h, direct, max_relative = 1e-11);
        assert_relative_eq!(direct, 4.8809348961251094609, max_relative = 1e-12);
        // the whole QFI is the carrier component here
        assert_relative_eq!(report.components.h_0, report.h, max_relative = 1e-11);
        assert_eq!(report.components.h_m1, 0.0);
        assert_eq!(report.r, f64::NEG_INFINITY);
    }

    #[test]
    fn three_routes_agree_at_a_reference_point() {
        let set = three_line_set(0.2, 0.9);
        let p = QfiParams::default();
        let a = qfi_closed_form(&osc(), &nfbs(), &set, 0.05, &p).unwrap().h;
        let b = qfi_population_derivative(&osc(), &nfbs(), &set, 0.05, DEFAULT_REL_STEP, &p)
            .unwrap()
            .h;
        let c = qfi_fidelity_difference(&osc(), &nfbs(), &set, 0.05, DEFAULT_REL_EPS, &p)
            .unwrap()
            .h;
        assert_relative_eq!(a, b, max_relative = 1e-7);
        assert_relative_eq!(a, c, max_relative = 1e-7);
    }

    #[test]
    fn heating_mass_is_covered_by_the_closed_form() {
        // |m| ≤ 3 at Δ = 0.9 puts ω_{-2} = -0.8 inside the plateau: real
        // heating mass.  The geometric identity still holds, so the closed
        // form must agree with the independent population-derivative route.
        let m = Modulation::sinusoidal(1.0, 0.9, 0.2).unwrap();
        let set = sideband_weights_analytic(&m, 3).unwrap();
        let p = QfiParams::default();
        let report = qfi_closed_form(&osc(), &nfbs(), &set, 0.025, &p).unwrap();
        assert_eq!(report.method, QfiMethod::ClosedForm);
        assert!(report.negative_weight > 1e-3, "got {}", report.negative_weight);
        assert!(report.h > 0.0);
        let pop =
            qfi_population_derivative(&osc(), &nfbs(), &set, 0.025, DEFAULT_REL_STEP, &p)
                .unwrap()
                .h;
        assert_relative_eq!(report.h, pop, max_relative = 1e-7);
    }

    #[test]
    fn sinusoidal_model_matches_reference() {
        let cases = [
            (0.2, 0.9, 0.1, 0.46014089987362423865),
            (0.2, 0.9, 0.262, 3.9214156270492498479),
            (0.1, 0.5, 0.2, 4.2513868900812754084),
        ];
        for (mu, delta, t, expect) in cases {
            assert_relative_eq!(
                qfi_sinusoidal_closed(mu, delta, 1.0, t).unwrap(),
                expect,
                max_relative = 1e-12
            );
        }
        // deep quantum regime stays finite and matches the frozen bound
        let h = qfi_sinusoidal_closed(0.2, 1.0 - 4e-6, 1.0, 1e-6).unwrap();
        assert_relative_eq!(error_bound(h, 1e-6, 1), 18.469256865245710251, max_relative = 1e-10);
    }

    #[test]
    fn fixed_point_solver_matches_reference_and_scales_linearly() {
        let t0 = t0_fixed_point(1.0).unwrap();
        assert_relative_eq!(t0, 0.26109550844020837125, max_relative = 1e-12);
        let t0b = t0_fixed_point(2.0).unwrap();
        assert_relative_eq!(t0b, 2.0 * t0, max_relative = 1e-12);
        assert!(t0_fixed_point(0.0).is_err());
    }

    #[test]
    fn matched_drive_scaling_is_an_exact_inverse_square() {
        let grid: Vec<f64> = (0..20)
            .map(|k| 1e-4 * (1e-2f64 / 1e-4).powf(k as f64 / 19.0))
            .collect();
        let report =
            scaling_exponent(&nfbs(), 4.0, &grid, &ScalingOptions::default()).unwrap();
        assert!((report.exponent + 2.0).abs() < 1e-8, "slope {}", report.exponent);
        assert_relative_eq!(report.prefactor, 0.0029025158865293339187, max_relative = 1e-8);
    }

    #[test]
    fn error_bound_edges_and_measurement_scaling() {
        assert_eq!(error_bound(0.0, 0.1, 1), f64::INFINITY);
        assert_eq!(error_bound(-1.0, 0.1, 1), f64::INFINITY);
        let base = error_bound(4.0, 0.1, 1);
        assert_relative_eq!(error_bound(4.0, 0.1, 100), base / 10.0, max_relative = 1e-15);
        assert_relative_eq!(base, 1.0 / (0.1 * 2.0), max_relative = 1e-15);
    }

    #[test]
    fn dominance_indicator_edges() {
        let c = QfiComponents { h_m1: 0.0, h_0: 1.0, h_p1: 0.0, h_rem: 0.0 };
        assert_eq!(dominance_indicator(&c, 1.0), f64::NEG_INFINITY);
        let c = QfiComponents { h_m1: 2.0, h_0: 0.0, h_p1: 0.0, h_rem: 0.0 };
        assert_eq!(dominance_indicator(&c, 2.0), f64::INFINITY);
        let c = QfiComponents { h_m1: 1.0, h_0: 0.0, h_p1: 0.0, h_rem: 1.0 };
        assert_eq!(dominance_indicator(&c, 2.0), 0.0);
    }

    #[test]
    fn channel_sensitivity_limits() {
        assert_relative_eq!(qfi_unmodulated(0.0, 0.5), 4.0, max_relative = 1e-15);
        assert_relative_eq!(
            qfi_unmodulated(1e-11, 0.5),
            4.0,
            max_relative = 1e-9
        );
        assert_eq!(qfi_unmodulated(1e6, 0.5), 0.0); // underflow, not NaN
    }

    #[test]
    fn comb_deficit_violation_is_reported() {
        let m = Modulation::pi_pulse(1.0, 0.9).unwrap();
        let set = sideband_weights_analytic(&m, 8).unwrap(); // deficit ≈ 0.05
        match qfi_closed_form(&osc(), &nfbs(), &set, 0.1, &QfiParams::default()) {
            Err(Error::RegimeViolation(_)) => {}
            other => panic!("expected regime violation, got {other:?}"),
        }
    }
}
