//! Modulation design: pick drive parameters that concentrate thermometric
//! sensitivity at requested target temperatures.
//!
//! The single-peak designer works inside a *three-line design model*
//! (carrier and first sidebands only): that is the regime the red-sideband
//! matching rule is derived in, and scoring candidates there keeps the
//! optimum pinned to the physical matching condition instead of drifting
//! toward configurations whose extra comb lines game the raw objective.
//! Achieved sensitivities are reported in the same model they were
//! optimized in.

use crate::bath::BathSpectrum;
use crate::error::{Error, Result};
use crate::modulation::Modulation;
use crate::nelder::{minimize, NelderOptions};
use crate::peaks::golden_max;
use crate::qfi::{error_bound, qfi_closed_form, t0_fixed_point, QfiParams};
use crate::sidebands::sideband_weights_analytic;
use crate::spectral::SpectralSums;
use crate::steady::ProbeSpec;
use serde::Serialize;

/// Drive families the designers can propose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DesignFamily {
    Sinusoidal,
    MultiHarmonic,
    PiPulse,
}

/// Sensitivity the returned design reaches at one requested temperature.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TargetAchievement {
    pub t_target: f64,
    pub h: f64,
    /// Single-measurement relative-error bound at the target.
    pub xi: f64,
}

/// Score of one candidate family at the (first) target temperature.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FamilyScore {
    pub family: DesignFamily,
    pub h_at_target: f64,
}

/// The analytic starting point the search was seeded with.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeedDesign {
    pub delta: f64,
    pub mu: f64,
    pub h: f64,
}

/// Outcome of a design run.
#[derive(Debug, Clone, Serialize)]
pub struct DesignResult {
    pub family: DesignFamily,
    pub modulation: Modulation,
    /// Final (maximized) objective value.
    pub objective: f64,
    pub achievements: Vec<TargetAchievement>,
    pub family_scores: Vec<FamilyScore>,
    pub seed: Option<SeedDesign>,
}

/// Tunables shared by both designers.
#[derive(Debug, Clone, Copy)]
pub struct DesignOptions {
    /// Largest admissible depth per harmonic.
    pub mu_max: f64,
    /// Matching ratio: a target `T` wants a comb line at `κT`.
    pub kappa: f64,
    /// Regime guard: targets must exceed `floor_factor · G` at the matched
    /// gap.
    pub floor_factor: f64,
    /// Comb cutoff used when scoring the kick-train family.
    pub pi_cutoff: u32,
    /// Largest fraction of the upward rate a scored comb may draw from
    /// heating (negative-frequency) lines.  The design picture — matched
    /// cooling sidebands dressing a thermal ladder — stops describing a
    /// thermometer once the drive mostly pumps the probe up, so candidates
    /// beyond this fraction are disqualified instead of scored.  On broad
    /// spectra this is what keeps the dense kick-train comb out of the
    /// running; inside an engineered band gap it passes untouched.
    pub max_heating_fraction: f64,
    /// Largest harmonic index the multi-line designer may use.
    pub max_harmonic: u32,
    pub nelder: NelderOptions,
}

impl Default for DesignOptions {
    fn default() -> Self {
        DesignOptions {
            mu_max: 0.4,
            kappa: 4.0,
            floor_factor: 100.0,
            pi_cutoff: 199,
            max_heating_fraction: 1e-3,
            max_harmonic: 12,
            nelder: NelderOptions::default(),
        }
    }
}

const OSC: ProbeSpec = ProbeSpec::OscillatorTruncated { n_max: None };
const PEAK_TOL: f64 = 1e-6;

fn check_target(bath: &BathSpectrum, omega0: f64, t: f64, opts: &DesignOptions) -> Result<()> {
    if !(omega0 > 0.0) || !omega0.is_finite() {
        return Err(Error::InvalidInput(format!(
            "carrier frequency must be positive and finite, got {omega0}"
        )));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!(
            "target temperature must be positive and finite, got {t}"
        )));
    }
    let gap = opts.kappa * t;
    if gap >= omega0 {
        return Err(Error::InvalidInput(format!(
            "target temperature {t} needs a sideband at {gap}, beyond the carrier {omega0}; \
             the probe is already most sensitive near such temperatures undriven"
        )));
    }
    let floor = opts.floor_factor * bath.spectral_response(gap)?;
    if t <= floor {
        return Err(Error::RegimeViolation(format!(
            "target temperature {t} is below the dissipative floor {floor:.3e} \
             ({}·G at the matched gap); steady-state thermometry is unreliable there",
            opts.floor_factor
        )));
    }
    Ok(())
}

/// QFI of the three-line design model at `(delta, mu, t)`.
fn h_three_line(bath: &BathSpectrum, omega0: f64, delta: f64, mu: f64, t: f64) -> Result<f64> {
    let m = Modulation::sinusoidal(omega0, delta, mu)?;
    let set = sideband_weights_analytic(&m, 1)?;
    Ok(qfi_closed_form(&OSC, bath, &set, t, &QfiParams::default())?.h)
}

/// QFI of the full kick-train comb at `(delta, t)`.
fn h_kick_train(
    bath: &BathSpectrum,
    omega0: f64,
    delta: f64,
    t: f64,
    opts: &DesignOptions,
) -> Result<f64> {
    let m = Modulation::pi_pulse(omega0, delta)?;
    let set = sideband_weights_analytic(&m, opts.pi_cutoff)?;
    let params = QfiParams { completeness_tol: 0.01, ..QfiParams::default() };
    Ok(qfi_closed_form(&OSC, bath, &set, t, &params)?.h)
}

/// Fraction of the kick-train comb's upward rate carried by heating lines
/// at `(delta, t)`; `false` from the wrapper means "not admissible".
fn kick_train_admissible(
    bath: &BathSpectrum,
    omega0: f64,
    delta: f64,
    t: f64,
    opts: &DesignOptions,
) -> bool {
    let heating = Modulation::pi_pulse(omega0, delta)
        .and_then(|m| sideband_weights_analytic(&m, opts.pi_cutoff))
        .and_then(|set| SpectralSums::collect(bath, &set, t))
        .map(|sums| sums.negative_weight());
    matches!(heating, Ok(w) if w <= opts.max_heating_fraction)
}

/// Objective for one family: sensitivity at the target, with a stiff
/// penalty for letting the sensitivity *peak* drift off the target. The
/// penalty is what makes the recovered `Δ` land on the matching condition
/// rather than on a slightly hotter compromise.
fn placement_objective<H>(h_of_t: H, t_target: f64, weight: f64) -> Result<f64>
where
    H: Fn(f64) -> Result<f64>,
{
    let peak = golden_max(&h_of_t, t_target / 4.0, 4.0 * t_target, PEAK_TOL)?;
    let miss = (peak.x - t_target) / t_target;
    Ok(h_of_t(t_target)? - weight * miss * miss)
}

/// Design a drive whose sensitivity peaks at `t_target`.
///
/// Both the sinusoidal family (searched over depth and tone) and the
/// kick-train family (searched over tone, where the bath admits its dense
/// comb without significant heating) are scored; the stronger one at the
/// target wins. The sinusoidal search is seeded at the analytic matching
/// point `Δ = ω₀ - κT`, full depth.
pub fn design_single_peak(
    bath: &BathSpectrum,
    omega0: f64,
    t_target: f64,
    opts: &DesignOptions,
) -> Result<DesignResult> {
    check_target(bath, omega0, t_target, opts)?;
    if !(opts.mu_max > 0.0 && opts.mu_max <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "depth cap must lie in (0, 1], got {}",
            opts.mu_max
        )));
    }
    let delta_seed = omega0 - opts.kappa * t_target;
    let mu_seed = 0.999 * opts.mu_max;
    let h_seed = h_three_line(bath, omega0, delta_seed, mu_seed, t_target)?;
    let window = 2.0 * opts.kappa * t_target;
    let d_lo = (delta_seed - window).max(omega0 * 1e-9);
    let d_hi = (delta_seed + window).min(omega0 * (1.0 - 1e-9));

    // -- sinusoidal family ------------------------------------------------
    let weight = (1000.0 * h_seed).max(1e-6);
    let sin_objective = |x: &[f64]| -> f64 {
        let (delta, mu) = (x[0], x[1]);
        match placement_objective(
            |t| h_three_line(bath, omega0, delta, mu, t),
            t_target,
            weight,
        ) {
            Ok(j) => -j,
            Err(_) => f64::INFINITY,
        }
    };
    let (sin_x, sin_neg_j) = minimize(
        sin_objective,
        &[delta_seed, mu_seed],
        &[d_lo, 1e-3],
        &[d_hi, opts.mu_max],
        &opts.nelder,
    )?;
    let (sin_delta, sin_mu) = (sin_x[0], sin_x[1]);
    let sin_score = h_three_line(bath, omega0, sin_delta, sin_mu, t_target)?;

    // -- kick-train family -------------------------------------------------
    // Admissibility is checked both at the seed tone (skipping the whole
    // search where the bath drowns the comb in heating lines) and at the
    // candidate the search returns.
    let mut pi_best: Option<(f64, f64, f64)> = None; // (delta, score, objective)
    if kick_train_admissible(bath, omega0, delta_seed, t_target, opts) {
        if let Ok(h_pi_seed) = h_kick_train(bath, omega0, delta_seed, t_target, opts) {
            let weight_pi = (1000.0 * h_pi_seed).max(1e-6);
            let pi_objective = |x: &[f64]| -> f64 {
                match placement_objective(
                    |t| h_kick_train(bath, omega0, x[0], t, opts),
                    t_target,
                    weight_pi,
                ) {
                    Ok(j) => -j,
                    Err(_) => f64::INFINITY,
                }
            };
            if let Ok((pi_x, pi_neg_j)) =
                minimize(pi_objective, &[delta_seed], &[d_lo], &[d_hi], &opts.nelder)
            {
                if let Ok(score) = h_kick_train(bath, omega0, pi_x[0], t_target, opts) {
                    if kick_train_admissible(bath, omega0, pi_x[0], t_target, opts) {
                        pi_best = Some((pi_x[0], score, -pi_neg_j));
                    }
                }
            }
        }
    }

    let pi_score = pi_best.map(|(_, s, _)| s).unwrap_or(0.0);
    let family_scores = vec![
        FamilyScore { family: DesignFamily::Sinusoidal, h_at_target: sin_score },
        FamilyScore { family: DesignFamily::PiPulse, h_at_target: pi_score },
    ];
    let seed = Some(SeedDesign { delta: delta_seed, mu: mu_seed, h: h_seed });

    if pi_score > sin_score {
        let (pi_delta, score, objective) = pi_best.unwrap();
        let modulation = Modulation::pi_pulse(omega0, pi_delta)?;
        return Ok(DesignResult {
            family: DesignFamily::PiPulse,
            modulation,
            objective,
            achievements: vec![TargetAchievement {
                t_target,
                h: score,
                xi: error_bound(score, t_target, 1),
            }],
            family_scores,
            seed,
        });
    }
    let modulation = Modulation::sinusoidal(omega0, sin_delta, sin_mu)?;
    Ok(DesignResult {
        family: DesignFamily::Sinusoidal,
        modulation,
        objective: -sin_neg_j,
        achievements: vec![TargetAchievement {
            t_target,
            h: sin_score,
            xi: error_bound(sin_score, t_target, 1),
        }],
        family_scores,
        seed,
    })
}

/// Design a two-tone drive whose sensitivity is usable at every target in
/// `targets` simultaneously (two engineered sidebands plus, optionally, the
/// bare carrier for the warmest target).
///
/// Harmonic indices are chosen by exact placement of the coldest line and
/// least relative mismatch of the second; depths are then tuned to
/// maximize the *worst* `H·T²` across the targets.
pub fn design_multi_peak(
    bath: &BathSpectrum,
    omega0: f64,
    targets: &[f64],
    opts: &DesignOptions,
) -> Result<DesignResult> {
    if targets.len() < 2 || targets.len() > 3 {
        return Err(Error::InvalidInput(format!(
            "multi-peak design takes 2 or 3 target temperatures, got {}",
            targets.len()
        )));
    }
    for w in targets.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidInput(
                "target temperatures must be strictly ascending".into(),
            ));
        }
    }
    let t_carrier = t0_fixed_point(omega0)?;
    // The warmest target rides the bare carrier when it already sits near
    // the carrier's own sensitivity peak; only colder ones get lines.
    let cold = match targets.last() {
        Some(&last) if last >= 0.5 * t_carrier => &targets[..targets.len() - 1],
        _ => targets,
    };
    if cold.is_empty() || cold.len() > 2 {
        return Err(Error::InvalidInput(format!(
            "need one or two targets below the carrier's own sensitivity peak near {t_carrier:.3}, \
             got {}",
            cold.len()
        )));
    }
    for &t in cold {
        check_target(bath, omega0, t, opts)?;
    }

    // Choose harmonic indices: exact line on the coldest target, best
    // relative fit for the second; ties resolve to the lowest indices.
    let (indices, delta) = if cold.len() == 1 {
        (vec![1u32], omega0 - opts.kappa * cold[0])
    } else {
        let mut best: Option<(u32, u32, f64, f64)> = None; // (l, l', mismatch, delta)
        for l in 1..opts.max_harmonic {
            for lp in (l + 1)..=opts.max_harmonic {
                let d = (omega0 - opts.kappa * cold[0]) / lp as f64;
                let mid_gap = omega0 - l as f64 * d;
                if !(mid_gap > 0.0) {
                    continue;
                }
                let mismatch = (mid_gap - opts.kappa * cold[1]).abs() / (opts.kappa * cold[1]);
                if best.map_or(true, |(_, _, m, _)| mismatch < m) {
                    best = Some((l, lp, mismatch, d));
                }
            }
        }
        let (l, lp, _, d) = best.ok_or_else(|| {
            Error::NonConvergence("no harmonic pair fits the requested targets".into())
        })?;
        (vec![l, lp], d)
    };
    let cutoff = indices.last().copied().unwrap_or(1) + 8;
    let params = QfiParams { completeness_tol: 0.01, ..QfiParams::default() };

    let eval_targets = |amps: &[f64]| -> Result<Vec<(f64, f64)>> {
        let depths: Vec<(u32, f64)> =
            indices.iter().copied().zip(amps.iter().copied()).collect();
        let m = Modulation::multi_harmonic(omega0, delta, &depths)?;
        let set = sideband_weights_analytic(&m, cutoff)?;
        let mut out = Vec::with_capacity(targets.len());
        for &t in targets {
            let h = qfi_closed_form(&OSC, bath, &set, t, &params)?.h;
            out.push((t, h));
        }
        Ok(out)
    };
    let worst_ht2 = |rows: &[(f64, f64)]| {
        rows.iter().map(|&(t, h)| h * t * t).fold(f64::INFINITY, f64::min)
    };
    let objective = |amps: &[f64]| -> f64 {
        match eval_targets(amps) {
            Ok(rows) => -worst_ht2(&rows),
            Err(_) => f64::INFINITY,
        }
    };
    let dim = indices.len();
    let seed_amps: Vec<f64> = if dim == 1 {
        vec![0.7 * opts.mu_max]
    } else {
        vec![0.7 * opts.mu_max, 0.4 * opts.mu_max]
    };
    let (amps, neg_obj) = minimize(
        objective,
        &seed_amps,
        &vec![1e-3; dim],
        &vec![opts.mu_max; dim],
        &opts.nelder,
    )?;
    let rows = eval_targets(&amps)?;
    let depths: Vec<(u32, f64)> = indices.iter().copied().zip(amps.iter().copied()).collect();
    let modulation = Modulation::multi_harmonic(omega0, delta, &depths)?;
    let achievements = rows
        .iter()
        .map(|&(t, h)| TargetAchievement { t_target: t, h, xi: error_bound(h, t, 1) })
        .collect();
    Ok(DesignResult {
        family: DesignFamily::MultiHarmonic,
        modulation,
        objective: -neg_obj,
        achievements,
        family_scores: vec![FamilyScore {
            family: DesignFamily::MultiHarmonic,
            h_at_target: rows[0].1,
        }],
        seed: None,
    })
}
