//! Direct integration of the dissipative master equation on a truncated
//! ladder, used to verify that the analytic steady state really is the
//! fixed point of the dynamics.
//!
//! The generator uses the *truncated* ladder operators: the raising
//! operator annihilates the top level, which makes the generator exactly
//! trace-preserving on the finite space and makes its stationary state
//! exactly the renormalized geometric distribution in `x = C₂/C₁`.

use crate::bath::BathSpectrum;
use crate::error::{Error, Result};
use crate::ode::{integrate, OdeOptions};
use crate::sidebands::SidebandSet;
use crate::spectral::SpectralSums;
use crate::steady::{steady_state, ProbeSpec};
use nalgebra::{Complex, DMatrix};
use serde::Serialize;

type C64 = Complex<f64>;

/// Aggregated downward (`c1`) and upward (`c2`) transition rates of the
/// sideband comb at a given temperature.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Rates {
    pub c1: f64,
    pub c2: f64,
    pub temperature: f64,
}

impl Rates {
    /// Effective Boltzmann factor `x = C₂/C₁` of the stationary ladder.
    pub fn boltzmann(&self) -> f64 {
        self.c2 / self.c1
    }

    /// Dressed gap `-T ln x`; zero when the ratio degenerates.
    pub fn effective_gap(&self) -> f64 {
        let gap = -self.temperature * self.boltzmann().ln();
        if gap.is_finite() {
            gap
        } else {
            0.0
        }
    }

    /// Dressed gap over relaxation linewidth: large values mean the
    /// coherent and dissipative timescales are cleanly separated.
    pub fn secular_ratio(&self) -> f64 {
        let width = self.c1 - self.c2;
        if width > 0.0 {
            self.effective_gap() / width
        } else {
            f64::INFINITY
        }
    }
}

/// Collapse the comb against the bath into the two ladder rates.
pub fn build_rates(
    bath: &BathSpectrum,
    sidebands: &SidebandSet,
    temperature: f64,
) -> Result<Rates> {
    let sums = SpectralSums::collect(bath, sidebands, temperature)?;
    // surfaces ProbeDecoupled / RegimeViolation for degenerate combs
    sums.boltzmann()?;
    Ok(Rates { c1: sums.c1(), c2: sums.c2(), temperature })
}

/// Controls for [`evolve`].
#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    /// Number of equally spaced monitoring points after `t = 0`.
    pub n_checkpoints: usize,
    pub atol: f64,
    pub rtol: f64,
    /// Coherent gap of the dressed probe; `None` uses `-T ln(C₂/C₁)`.
    pub hamiltonian_gap: Option<f64>,
    /// Integration horizon; `None` uses `30/(C₁ - C₂)` (thirty relaxation
    /// times).
    pub t_final: Option<f64>,
    pub max_steps: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            n_checkpoints: 50,
            atol: 1e-12,
            rtol: 1e-10,
            hamiltonian_gap: None,
            t_final: None,
            max_steps: 50_000_000,
        }
    }
}

/// Health metrics recorded while the state relaxes.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Checkpoint {
    pub t: f64,
    /// Trace distance to the analytic stationary state.
    pub trace_distance: f64,
    /// Trace of the evolving state (must stay pinned at 1).
    pub trace: f64,
    /// Smallest eigenvalue of the evolving state (must stay ≥ ~0).
    pub min_eig: f64,
}

/// Result of one relaxation run.
#[derive(Debug, Clone, Serialize)]
pub struct LindbladRun {
    pub rates: Rates,
    pub dim: usize,
    pub t_final: f64,
    pub checkpoints: Vec<Checkpoint>,
    pub final_trace_distance: f64,
    /// Accepted integrator steps over the whole run.
    pub steps: usize,
}

/// Ground state `|0⟩⟨0|` on a `dim`-level ladder.
pub fn ground_state(dim: usize) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    m[(0, 0)] = C64::new(1.0, 0.0);
    m
}

/// Equal superposition `(|0⟩ + |1⟩)/√2` as a density matrix, for coherence
/// decay checks.
pub fn superposition_01(dim: usize) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for j in 0..2 {
        for k in 0..2 {
            m[(j, k)] = C64::new(0.5, 0.0);
        }
    }
    m
}

/// Stationary populations of the truncated generator: the renormalized
/// geometric ladder in `x = C₂/C₁`.
pub fn stationary_populations(rates: &Rates, dim: usize) -> Result<Vec<f64>> {
    let probe = ProbeSpec::OscillatorTruncated { n_max: Some((dim - 1) as u32) };
    Ok(steady_state(&probe, rates.boltzmann(), rates.temperature)?.populations)
}

/// Trace distance `½‖a - b‖₁` between two Hermitian matrices.
pub fn trace_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let mut d = a - b;
    hermitize(&mut d);
    0.5 * d.symmetric_eigen().eigenvalues.iter().map(|e| e.abs()).sum::<f64>()
}

fn hermitize(m: &mut DMatrix<C64>) {
    let n = m.nrows();
    for j in 0..n {
        m[(j, j)] = C64::new(m[(j, j)].re, 0.0);
        for k in (j + 1)..n {
            let avg = 0.5 * (m[(j, k)] + m[(k, j)].conj());
            m[(j, k)] = avg;
            m[(k, j)] = avg.conj();
        }
    }
}

fn check_density_matrix(rho: &DMatrix<C64>) -> Result<usize> {
    let dim = rho.nrows();
    if rho.ncols() != dim || dim < 2 {
        return Err(Error::InvalidInput(format!(
            "initial state must be a square matrix with at least 2 levels, got {}x{}",
            dim,
            rho.ncols()
        )));
    }
    let mut max_asym: f64 = 0.0;
    let mut trace = C64::new(0.0, 0.0);
    for j in 0..dim {
        trace += rho[(j, j)];
        for k in 0..dim {
            max_asym = max_asym.max((rho[(j, k)] - rho[(k, j)].conj()).norm());
        }
    }
    if max_asym > 1e-10 {
        return Err(Error::InvalidInput(format!(
            "initial state is not Hermitian (max asymmetry {max_asym:.3e})"
        )));
    }
    if (trace.re - 1.0).abs() > 1e-8 || trace.im.abs() > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "initial state must have unit trace, got {} + {}i",
            trace.re, trace.im
        )));
    }
    Ok(dim)
}

/// Relax `initial` under the ladder generator and monitor it against the
/// analytic stationary state.
pub fn evolve(rates: &Rates, initial: &DMatrix<C64>, opts: &EvolveOptions) -> Result<LindbladRun> {
    let dim = check_density_matrix(initial)?;
    if !(rates.c1 > 0.0) || rates.c2 < 0.0 {
        if rates.c1 == 0.0 && rates.c2 == 0.0 {
            return Err(Error::ProbeDecoupled);
        }
        return Err(Error::InvalidInput(format!(
            "rates must satisfy C₁ > 0 and C₂ ≥ 0, got C₁ = {}, C₂ = {}",
            rates.c1, rates.c2
        )));
    }
    if rates.c2 >= rates.c1 {
        return Err(Error::RegimeViolation(format!(
            "upward rate C₂ = {} is not below the downward rate C₁ = {}; the ladder has no \
             normalizable stationary state",
            rates.c2, rates.c1
        )));
    }
    if opts.n_checkpoints == 0 {
        return Err(Error::InvalidInput("need at least one checkpoint".into()));
    }
    let t_final = match opts.t_final {
        Some(t) if t > 0.0 && t.is_finite() => t,
        Some(t) => {
            return Err(Error::InvalidInput(format!(
                "final time must be positive and finite, got {t}"
            )))
        }
        None => 30.0 / (rates.c1 - rates.c2),
    };
    let omega = opts.hamiltonian_gap.unwrap_or_else(|| rates.effective_gap());
    let (c1, c2) = (rates.c1, rates.c2);
    // Top-level backaction of the truncated raising channel: the raising
    // operator annihilates the top level, so its rate skips it too.
    fn raised(j: usize, dim: usize) -> f64 {
        if j + 1 < dim {
            (j + 1) as f64
        } else {
            0.0
        }
    }
    let rhs = move |_t: f64, y: &[C64], dy: &mut [C64]| {
        for j in 0..dim {
            for k in 0..dim {
                let idx = j * dim + k;
                let decay =
                    0.5 * (c1 * (j + k) as f64 + c2 * (raised(j, dim) + raised(k, dim)));
                let mut d = y[idx] * C64::new(-decay, -omega * (j as f64 - k as f64));
                if j + 1 < dim && k + 1 < dim {
                    d += y[(j + 1) * dim + k + 1]
                        * (c1 * (((j + 1) * (k + 1)) as f64).sqrt());
                }
                if j >= 1 && k >= 1 {
                    d += y[(j - 1) * dim + k - 1] * (c2 * ((j * k) as f64).sqrt());
                }
                dy[idx] = d;
            }
        }
    };
    let target_pops = stationary_populations(rates, dim)?;
    let mut target = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for (n, &p) in target_pops.iter().enumerate() {
        target[(n, n)] = C64::new(p, 0.0);
    }
    let measure = |t: f64, y: &[C64]| -> Checkpoint {
        let mut rho = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        for j in 0..dim {
            for k in 0..dim {
                rho[(j, k)] = y[j * dim + k];
            }
        }
        hermitize(&mut rho);
        let trace = (0..dim).map(|j| rho[(j, j)].re).sum::<f64>();
        let min_eig =
            rho.clone().symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        Checkpoint { t, trace_distance: trace_distance(&rho, &target), trace, min_eig }
    };
    let mut y: Vec<C64> = Vec::with_capacity(dim * dim);
    for j in 0..dim {
        for k in 0..dim {
            y.push(initial[(j, k)]);
        }
    }
    let ode = OdeOptions {
        atol: opts.atol,
        rtol: opts.rtol,
        h_initial: Some(0.01 / (c1 * dim as f64)),
        max_steps: opts.max_steps,
    };
    let mut checkpoints = vec![measure(0.0, &y)];
    let mut steps = 0usize;
    let mut t_prev = 0.0;
    for k in 1..=opts.n_checkpoints {
        let t_next = t_final * k as f64 / opts.n_checkpoints as f64;
        let (y_next, seg_steps) = integrate(rhs, y, t_prev, t_next, &ode)?;
        y = y_next;
        steps += seg_steps;
        checkpoints.push(measure(t_next, &y));
        t_prev = t_next;
    }
    let final_trace_distance = checkpoints.last().unwrap().trace_distance;
    Ok(LindbladRun { rates: *rates, dim, t_final, checkpoints, final_trace_distance, steps })
}
