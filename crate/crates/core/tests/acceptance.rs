//! Acceptance gate: the eight headline checks this library is built to
//! satisfy, each printing one PASS/FAIL line (visible under
//! `cargo test --test acceptance -- --nocapture`).
//!
//! Two checks fail honestly at their stated bars and are kept that way
//! rather than loosened:
//!
//! * criterion 3 — the upper sensitivity maximum of the driven scan sits
//!   ~14% above the undriven fixed point, outside the 10% proximity band;
//! * criterion 5 — the two-tone drive moves the ξ ≤ 50 frontier down by a
//!   factor ~42, short of the required 50.
//!
//! Each failing assert carries the measured numbers so the record is in
//! the test output itself.

use std::sync::Mutex;
use std::time::Instant;

use dcqt::lindblad::{build_rates, evolve, ground_state, EvolveOptions};
use dcqt::modulation::Modulation;
use dcqt::optimizer::{design_single_peak, DesignOptions};
use dcqt::peaks::{first_crossing, golden_max, local_maxima, refined_maxima};
use dcqt::presets::{
    matched_sideband_study, nfbs_bath, single_tone_modulation, single_tone_study,
    two_tone_params, two_tone_sidebands, two_tone_study,
};
use dcqt::qfi::{
    error_bound, qfi_closed_form, qfi_fidelity_difference, qfi_population_derivative,
    qfi_unmodulated, scaling_exponent, t0_fixed_point, QfiParams, ScalingOptions,
    DEFAULT_REL_EPS, DEFAULT_REL_STEP,
};
use dcqt::sidebands::{sideband_weights_analytic, sideband_weights_quadrature, SidebandSet};
use dcqt::steady::ProbeSpec;

const OSC: ProbeSpec = ProbeSpec::OscillatorTruncated { n_max: None };

/// Serializes the criteria so each wall-clock budget is measured alone.
static GATE: Mutex<()> = Mutex::new(());

fn run_alone() -> std::sync::MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(name: &str, pass: bool, detail: &str) {
    println!("criterion {name}: {} — {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {name}: {detail}");
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// 1. Quadrature sideband weights agree with the squared-Bessel values to
///    relative 1e-10 (with a 1e-14 absolute floor for weights that are
///    themselves at the double-precision floor), and the |m| ≤ 8 comb
///    carries all but 1e-8 of the weight.  Budget: 1 s.
#[test]
fn criterion_1_sideband_weights() {
    let _g = run_alone();
    let clock = Instant::now();
    let mut worst = 0.0_f64;
    let mut complete = true;
    for mu in [0.05, 0.1, 0.2, 0.4] {
        let m = Modulation::sinusoidal(1.0, 0.9, mu).unwrap();
        let analytic = sideband_weights_analytic(&m, 5).unwrap();
        let quad = sideband_weights_quadrature(&m, 5).unwrap();
        for idx in -5..=5_i32 {
            let (pa, pq) = (analytic.weight(idx), quad.weight(idx));
            worst = worst.max((pa - pq).abs() / (1e-10 * pa + 1e-14));
        }
        let wide = sideband_weights_analytic(&m, 8).unwrap();
        complete &= wide.require_completeness(1e-8).is_ok();
    }
    let dt = clock.elapsed().as_secs_f64();
    let pass = worst <= 1.0 && complete && dt < 1.0;
    verdict(
        "1",
        pass,
        &format!(
            "worst weight deviation {worst:.3}× the 1e-10-relative bar; \
             |m|≤8 completeness {complete}; {dt:.2} s (budget 1 s)"
        ),
    );
}

/// 2. Closed-form, population-derivative, and fidelity-difference QFI agree
///    to relative 1e-6 on a 20×20 grid of temperatures (log in
///    [0.02, 0.5]) and tones (linear in [0.05, 0.95]) at depth 0.2 with
///    first sidebands only.  Budget: 10 s.
#[test]
fn criterion_2_three_route_agreement() {
    let _g = run_alone();
    let clock = Instant::now();
    let bath = nfbs_bath();
    let params = QfiParams::default();
    let temps = log_grid(0.02, 0.5, 20);
    let mut worst = 0.0_f64;
    let mut worst_at = (0.0, 0.0);
    for j in 0..20 {
        let delta = 0.05 + 0.9 * j as f64 / 19.0;
        let m = Modulation::sinusoidal(1.0, delta, 0.2).unwrap();
        let set = sideband_weights_analytic(&m, 1).unwrap();
        for &t in &temps {
            let closed = qfi_closed_form(&OSC, &bath, &set, t, &params).unwrap().h;
            let pop = qfi_population_derivative(&OSC, &bath, &set, t, DEFAULT_REL_STEP, &params)
                .unwrap()
                .h;
            let fid = qfi_fidelity_difference(&OSC, &bath, &set, t, DEFAULT_REL_EPS, &params)
                .unwrap()
                .h;
            let hi = closed.max(pop).max(fid);
            let lo = closed.min(pop).min(fid);
            let spread = (hi - lo) / hi;
            if spread > worst {
                worst = spread;
                worst_at = (t, delta);
            }
        }
    }
    let dt = clock.elapsed().as_secs_f64();
    let pass = worst < 1e-6 && dt < 10.0;
    verdict(
        "2",
        pass,
        &format!(
            "worst three-route spread {worst:.3e} at (T, Δ) = ({:.4}, {:.2}) \
             over 400 points (bar 1e-6); {dt:.2} s (budget 10 s)",
            worst_at.0, worst_at.1
        ),
    );
}

/// 3. The depth-0.2, tone-0.9 scan over T ∈ [1e-3, 1] shows exactly two
///    sensitivity maxima, near the matched-line temperature 0.025 and near
///    the undriven fixed point T₀ (both within 10%), while the undriven
///    scan has a single maximum at T₀.  Budget: 5 s.
///
///    Known honest failure: the upper maximum sits ~14% above T₀ — the red
///    sideband's low-temperature channel keeps pushing sensitivity upward
///    past the carrier's own peak, displacing the maximum to ~0.298.  The
///    10% band is kept as designed; the assert records the measured spot.
#[test]
fn criterion_3_two_peak_landscape() {
    let _g = run_alone();
    let clock = Instant::now();
    let study = single_tone_study(400).unwrap();
    let h: Vec<f64> = study.rows.iter().map(|r| r.h).collect();

    let bath = nfbs_bath();
    let params = QfiParams::default();
    let set = sideband_weights_analytic(&single_tone_modulation(), 3).unwrap();
    let f = |t: f64| qfi_closed_form(&OSC, &bath, &set, t, &params).map(|r| r.h);
    let peaks = refined_maxima(f, &study.grid, &h, 1e-6).unwrap();

    let t0 = t0_fixed_point(1.0).unwrap();
    let two = peaks.len() == 2;
    let (low, high) = if two { (peaks[0].x, peaks[1].x) } else { (f64::NAN, f64::NAN) };
    let low_ok = two && rel_dev(low, 0.025) <= 0.10;
    let high_ok = two && rel_dev(high, t0) <= 0.10;

    let bare = local_maxima(&study.grid, &study.h_unmodulated);
    let bare_single = bare.len() == 1;
    let bare_peak = if bare_single {
        let i = bare[0];
        golden_max(
            |t: f64| Ok(qfi_unmodulated(1.0, t)),
            study.grid[i - 1],
            study.grid[i + 1],
            1e-6,
        )
        .unwrap()
        .x
    } else {
        f64::NAN
    };
    let bare_ok = bare_single && rel_dev(bare_peak, t0) <= 0.10;

    let dt = clock.elapsed().as_secs_f64();
    let pass = two && low_ok && high_ok && bare_ok && dt < 5.0;
    verdict(
        "3",
        pass,
        &format!(
            "driven maxima n={} at T = {low:.6} ({:+.1}% of 0.025) and \
             T = {high:.6} ({:+.1}% of T₀ = {t0:.6}, bar ±10%); undriven: \
             n={} at T = {bare_peak:.6} ({:+.1}% of T₀); {dt:.2} s (budget 5 s)",
            peaks.len(),
            100.0 * (low / 0.025 - 1.0),
            100.0 * (high / t0 - 1.0),
            bare.len(),
            100.0 * (bare_peak / t0 - 1.0),
        ),
    );
}

/// 4. Pinning the red line to 4T while T sweeps [1e-4, 1e-2] holds the
///    single-shot error bound on the e²/(2μ) plateau: within 5% with first
///    sidebands only, within 10% with |m| ≤ 3, while the undriven bound at
///    T = 1e-2 is astronomically larger (> 1e15).  Budget: 5 s.
#[test]
fn criterion_4_matched_drive_plateau() {
    let _g = run_alone();
    let clock = Instant::now();
    let study = matched_sideband_study(40).unwrap();
    let plateau = (2.0_f64).exp() / (2.0 * study.mu);
    let mut worst_first = 0.0_f64;
    let mut worst_third = 0.0_f64;
    for row in &study.rows {
        worst_first = worst_first.max(rel_dev(row.xi_first, plateau));
        worst_third = worst_third.max(rel_dev(row.xi_third, plateau));
    }
    let contrast = study.xi_unmodulated_hot > 1e15;
    let dt = clock.elapsed().as_secs_f64();
    let pass = worst_first <= 0.05 && worst_third <= 0.10 && contrast && dt < 5.0;
    verdict(
        "4",
        pass,
        &format!(
            "ξ vs e²/(2μ) = {plateau:.4}: worst first-sideband deviation \
             {:.2}% (bar 5%), worst |m|≤3 deviation {:.2}% (bar 10%); \
             undriven ξ(1e-2) = {:.2e} (> 1e15: {contrast}); {dt:.2} s (budget 5 s)",
            100.0 * worst_first,
            100.0 * worst_third,
            study.xi_unmodulated_hot
        ),
    );
}

/// 5. The two-tone drive (harmonics 80 and 99 on base tone 0.01) opens at
///    least three sensitivity maxima across T ∈ [1e-4, 1], reaches
///    H(1e-3) = 14.3 ± 25%, and moves the lowest temperature with ξ ≤ 50
///    down by ≥ 50× relative to no drive.  Budget: 30 s.
///
///    Known honest failure: the frontier ratio comes out ≈ 41.8 — the
///    undriven bound already crosses 50 at T ≈ 0.0772 (not far above the
///    engineered windows), while the driven frontier lands at
///    T ≈ 0.00185.  The factor-50 bar is kept as designed.
#[test]
fn criterion_5_two_tone_windows() {
    let _g = run_alone();
    let clock = Instant::now();
    let study = two_tone_study(400).unwrap();
    let h: Vec<f64> = study.rows.iter().map(|r| r.h).collect();
    let xi: Vec<f64> = study.rows.iter().map(|r| r.xi).collect();
    let n_max = local_maxima(&study.grid, &h).len();

    let bath = nfbs_bath();
    let params = two_tone_params();
    let set = two_tone_sidebands().unwrap();
    let h_cold = qfi_closed_form(&OSC, &bath, &set, 1e-3, &params).unwrap().h;

    // driven frontier: bisect inside the first grid cell where ξ dips
    // through 50
    let i = xi.iter().position(|&v| v <= 50.0).unwrap();
    let xi_f = |t: f64| qfi_closed_form(&OSC, &bath, &set, t, &params).map(|r| r.xi);
    let t_mod = first_crossing(xi_f, study.grid[i - 1], study.grid[i], 50.0, 1e-9).unwrap();

    // undriven frontier on the same interval
    let xi_bare =
        |t: f64| -> dcqt::Result<f64> { Ok(error_bound(qfi_unmodulated(1.0, t), t, 1)) };
    let t_bare = first_crossing(xi_bare, 1e-4, 1.0, 50.0, 1e-9).unwrap();
    let ratio = t_bare / t_mod;

    let dt = clock.elapsed().as_secs_f64();
    let maxima_ok = n_max >= 3;
    let h_ok = rel_dev(h_cold, 14.3) <= 0.25;
    let ratio_ok = ratio >= 50.0;
    let pass = maxima_ok && h_ok && ratio_ok && dt < 30.0;
    verdict(
        "5",
        pass,
        &format!(
            "maxima n={n_max} (need ≥3); H(1e-3) = {h_cold:.4} \
             ({:+.1}% of 14.3, bar ±25%); ξ≤50 frontier {t_mod:.6e} vs \
             undriven {t_bare:.6e}: ratio {ratio:.2} (bar ≥50); \
             {dt:.2} s (budget 30 s)",
            100.0 * (h_cold / 14.3 - 1.0)
        ),
    );
}

/// 6. With the red line held at 4T, the peak sensitivity obeys H ∝ T⁻²:
///    the log-log slope over T ∈ [1e-4, 1e-2] is −2 ± 0.05.  Budget: 2 s.
#[test]
fn criterion_6_inverse_square_scaling() {
    let _g = run_alone();
    let clock = Instant::now();
    let bath = nfbs_bath();
    let grid = log_grid(1e-4, 1e-2, 20);
    let report = scaling_exponent(&bath, 4.0, &grid, &ScalingOptions::default()).unwrap();
    let dt = clock.elapsed().as_secs_f64();
    let pass = (report.exponent + 2.0).abs() <= 0.05 && dt < 2.0;
    verdict(
        "6",
        pass,
        &format!(
            "fitted exponent {:.6} (bar −2 ± 0.05), prefactor {:.6e}; \
             {dt:.2} s (budget 2 s)",
            report.exponent, report.prefactor
        ),
    );
}

/// 7. Integrating the master equation from the ground state on a 61-level
///    ladder (six configurations: depth 0 and 0.2 × T ∈ {0.025, 0.1, 0.5},
///    tone 0.9) relaxes to the analytic stationary state within trace
///    distance 1e-8, preserving the trace to 1e-10 and positivity to
///    −1e-9 at every checkpoint.  Budget: 60 s total.
#[test]
fn criterion_7_master_equation_relaxation() {
    let _g = run_alone();
    let clock = Instant::now();
    // stationary Boltzmann ratios pinned from an independent evaluation, so
    // a mis-built comb cannot silently shift the target the run relaxes to
    let frozen_x = [
        (0.0, 0.025, 4.2483542552915890e-18),
        (0.0, 0.1, 4.5399929762484852e-5),
        (0.0, 0.5, 0.13533528323661269),
        (0.2, 0.025, 2.0619904025854203e-4),
        (0.2, 0.1, 0.0037116118853702622),
        (0.2, 0.5, 0.14100380936476848),
    ];
    let bath = nfbs_bath();
    let opts = EvolveOptions { n_checkpoints: 20, ..Default::default() };
    let mut worst_dist = 0.0_f64;
    let mut worst_trace = 0.0_f64;
    let mut worst_eig = 0.0_f64;
    let mut routes_ok = true;
    for &(mu, t, x_ref) in &frozen_x {
        let set = if mu == 0.0 {
            SidebandSet::carrier_only(1.0)
        } else {
            let m = Modulation::sinusoidal(1.0, 0.9, mu).unwrap();
            sideband_weights_analytic(&m, 8).unwrap()
        };
        let rates = build_rates(&bath, &set, t).unwrap();
        routes_ok &= rel_dev(rates.boltzmann(), x_ref) < 1e-10;
        let run = evolve(&rates, &ground_state(61), &opts).unwrap();
        worst_dist = worst_dist.max(run.final_trace_distance);
        for cp in &run.checkpoints {
            worst_trace = worst_trace.max((cp.trace - 1.0).abs());
            worst_eig = worst_eig.max(-cp.min_eig);
        }
    }
    let dt = clock.elapsed().as_secs_f64();
    let pass = worst_dist < 1e-8
        && worst_trace <= 1e-10
        && worst_eig <= 1e-9
        && routes_ok
        && dt < 60.0;
    verdict(
        "7",
        pass,
        &format!(
            "six runs: worst final trace distance {worst_dist:.2e} (bar 1e-8), \
             worst trace drift {worst_trace:.2e} (bar 1e-10), worst negative \
             eigenvalue {worst_eig:.2e} (bar 1e-9), stationary ratios pinned: \
             {routes_ok}; {dt:.1} s (budget 60 s)"
        ),
    );
}

/// 8. Asking the designer for peak sensitivity at T* = 0.025 on the flat
///    band recovers the matched single-tone drive: tone within 1% of 0.9
///    and sensitivity at T* no worse than 1% below the analytic seed.
///    Budget: 10 s.
#[test]
fn criterion_8_designer_recovers_matched_tone() {
    let _g = run_alone();
    let clock = Instant::now();
    let bath = nfbs_bath();
    let result = design_single_peak(&bath, 1.0, 0.025, &DesignOptions::default()).unwrap();
    let delta = result.modulation.delta();
    let seed = result.seed.expect("single-peak design always records its seed");
    let achieved = result.achievements[0].h;
    let dt = clock.elapsed().as_secs_f64();
    let tone_ok = rel_dev(delta, 0.9) <= 0.01;
    let h_ok = achieved >= 0.99 * seed.h;
    let pass = tone_ok && h_ok && dt < 10.0;
    verdict(
        "8",
        pass,
        &format!(
            "tone Δ = {delta:.6} ({:+.3}% of 0.9, bar ±1%); H(T*) = {achieved:.4} \
             vs seed {:.4} ({:+.2}%, bar ≥ −1%); {dt:.2} s (budget 10 s)",
            100.0 * (delta / 0.9 - 1.0),
            seed.h,
            100.0 * (achieved / seed.h - 1.0)
        ),
    );
}
