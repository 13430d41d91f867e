//! Time evolution under the non-Hermitian conditional Hamiltonian and the
//! statistics that come with it: no-emission probability, emission intensity,
//! first-emission waiting times (sampled and by deterministic quadrature),
//! full jump trajectories, and decay rates of the non-DFS complement.

use alloc::vec::Vec;

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use crate::hilbert::{Operator, StateVector};
use crate::linalg;
use crate::model::JumpChannel;
use crate::{Error, Result, C64};

/// Squared-norm overshoot beyond 1 tolerated before reporting an integrator
/// inconsistency.
pub const NORM_TOLERANCE: f64 = 1e-8;

/// Propagation backend.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PropagationMethod {
    /// Dense `exp(−iHt)` by scaling-and-squaring; the reference method.
    ExactExponential,
    /// Embedded Dormand–Prince 5(4) adaptive stepper; the workhorse.
    AdaptiveStepper,
}

/// Settings for [`propagate`].
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PropagationConfig {
    pub method: PropagationMethod,
    pub dt_initial: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl PropagationConfig {
    pub fn new(method: PropagationMethod, dt_initial: f64, rel_tol: f64, abs_tol: f64) -> Result<Self> {
        if !dt_initial.is_finite() || dt_initial <= 0.0 {
            return Err(Error::InvalidParameter("dt_initial must be positive"));
        }
        if !rel_tol.is_finite() || rel_tol <= 0.0 || !abs_tol.is_finite() || abs_tol <= 0.0 {
            return Err(Error::InvalidParameter("tolerances must be positive"));
        }
        Ok(PropagationConfig {
            method,
            dt_initial,
            rel_tol,
            abs_tol,
        })
    }

    pub fn exact() -> Self {
        PropagationConfig {
            method: PropagationMethod::ExactExponential,
            dt_initial: 1e-2,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
        }
    }

    pub fn adaptive() -> Self {
        PropagationConfig {
            method: PropagationMethod::AdaptiveStepper,
            dt_initial: 1e-2,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
        }
    }

    /// Tight tolerances for cross-validation against the exact backend.
    pub fn strict() -> Self {
        PropagationConfig {
            method: PropagationMethod::AdaptiveStepper,
            dt_initial: 1e-3,
            rel_tol: 1e-11,
            abs_tol: 1e-13,
        }
    }
}

impl Default for PropagationConfig {
    fn default() -> Self {
        PropagationConfig::adaptive()
    }
}

/// Conditionally evolve: `ψ(t) = exp(−iHt) ψ₀`, unnormalized.
///
/// The norm is non-increasing whenever `i(H − H†)` is positive
/// semi-definite, which holds for every conditional Hamiltonian built by
/// this crate.
pub fn propagate(
    h: &Operator,
    psi0: &StateVector,
    t: f64,
    cfg: &PropagationConfig,
) -> Result<StateVector> {
    if h.dim() != psi0.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: psi0.dim(),
        });
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidParameter("propagation time must be nonnegative"));
    }
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    match cfg.method {
        PropagationMethod::ExactExponential => {
            let u = linalg::expm(&h.scaled(C64::new(0.0, -t)));
            Ok(u.apply(psi0))
        }
        PropagationMethod::AdaptiveStepper => {
            let generator = h.scaled(C64::new(0.0, -1.0));
            rk45(&generator, psi0, t, cfg)
        }
    }
}

/// Dormand–Prince 5(4) with FSAL and a standard step controller.
fn rk45(m: &Operator, psi0: &StateVector, t_end: f64, cfg: &PropagationConfig) -> Result<StateVector> {
    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B5: f64 = -2187.0 / 6784.0;
    const B6: f64 = 11.0 / 84.0;
    const E1: f64 = 5179.0 / 57600.0;
    const E3: f64 = 7571.0 / 16695.0;
    const E4: f64 = 393.0 / 640.0;
    const E5: f64 = -92097.0 / 339200.0;
    const E6: f64 = 187.0 / 2100.0;
    const E7: f64 = 1.0 / 40.0;

    let dim = psi0.dim();
    let combine = |base: &StateVector, terms: &[(f64, &StateVector)], dt: f64| {
        let mut out = base.clone();
        for (coeff, k) in terms {
            let w = C64::new(coeff * dt, 0.0);
            for (o, v) in out.amps_mut().iter_mut().zip(k.amps()) {
                *o += w * v;
            }
        }
        out
    };

    let mut t = 0.0_f64;
    let mut y = psi0.clone();
    let mut dt = cfg.dt_initial.min(t_end);
    let mut k1 = m.apply(&y);
    let min_dt = t_end * 1e-14 + f64::MIN_POSITIVE;

    while t < t_end {
        dt = dt.min(t_end - t);
        let k2 = m.apply(&combine(&y, &[(A21, &k1)], dt));
        let k3 = m.apply(&combine(&y, &[(A31, &k1), (A32, &k2)], dt));
        let k4 = m.apply(&combine(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], dt));
        let k5 = m.apply(&combine(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], dt));
        let k6 = m.apply(&combine(
            &y,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            dt,
        ));
        let y5 = combine(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], dt);
        let k7 = m.apply(&y5);
        let y4 = combine(
            &y,
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
            dt,
        );

        let mut err_sq = 0.0_f64;
        for i in 0..dim {
            let e = (y5.amp(i) - y4.amp(i)).norm();
            let scale = cfg.abs_tol + cfg.rel_tol * y.amp(i).norm().max(y5.amp(i).norm());
            let ratio = e / scale;
            err_sq += ratio * ratio;
        }
        let err = libm::sqrt(err_sq / dim as f64);

        if err <= 1.0 {
            t += dt;
            y = y5;
            k1 = k7;
        } else if dt <= min_dt {
            return Err(Error::StepperFailure {
                t_reached: t,
                step_size: dt,
                error_estimate: err,
            });
        }
        let factor = if err > 0.0 {
            0.9 * libm::pow(err, -0.2)
        } else {
            5.0
        };
        dt *= factor.clamp(0.2, 5.0);
        if dt < min_dt {
            dt = min_dt;
        }
    }
    Ok(y)
}

/// No-emission probability `P₀ = ⟨ψ(t)|ψ(t)⟩` of a conditionally evolved
/// state whose initial norm was 1.
///
/// Values above 1 within [`NORM_TOLERANCE`] are clamped; larger violations
/// indicate a broken integrator and are reported as an error.
pub fn no_emission_probability(psi_t: &StateVector) -> Result<f64> {
    let n2 = psi_t.norm_sq();
    if n2 > 1.0 + NORM_TOLERANCE {
        return Err(Error::NormExceedsUnity { norm_sq: n2 });
    }
    Ok(n2.min(1.0))
}

/// Instantaneous photon-emission probability density
/// `I(ψ) = i ⟨ψ| H − H† |ψ⟩`; equals `−dP₀/dt` at `t = 0` for normalized `ψ`.
pub fn emission_intensity(h: &Operator, psi: &StateVector) -> f64 {
    let anti = h.sub(&h.adjoint());
    let val = anti.expectation(psi) * C64::new(0.0, 1.0);
    debug_assert!(val.im.abs() < 1e-10 * (1.0 + val.re.abs()));
    val.re
}

/// Renormalize a conditionally evolved state to unit norm.
pub fn conditional_state(psi_t: &StateVector) -> Result<StateVector> {
    psi_t.normalized()
}

/// Per-trajectory RNG: a counter-based ChaCha stream keyed by
/// `(seed, trajectory id)`, so ensembles reproduce bit-identically under any
/// execution order.
pub fn trajectory_rng(seed: u64, trajectory: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(trajectory);
    rng
}

/// Uniform draw in the open interval (0, 1).
fn uniform_open(rng: &mut ChaCha12Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Ensemble settings for waiting-time sampling and jump trajectories.
#[derive(Clone, Debug)]
pub struct TrajectoryConfig {
    pub seed: u64,
    pub n_trajectories: u64,
    pub t_max: f64,
    pub channels: Vec<JumpChannel>,
}

/// Outcome of a single first-emission draw.
#[derive(Clone, Debug, PartialEq)]
pub enum EmissionOutcome {
    Emitted { time: f64, channel: usize },
    NoEmissionWithinHorizon { horizon: f64 },
}

/// A first-emission draw tagged with its trajectory id.
#[derive(Clone, Debug, PartialEq)]
pub struct EmissionRecord {
    pub trajectory: u64,
    pub outcome: EmissionOutcome,
}

/// Number of dyadic bisection levels used to refine waiting times inside one
/// grid cell (relative time accuracy ~1e-10 with margin).
const BISECTION_LEVELS: usize = 42;

/// Default number of grid cells in the cached no-emission curve.
pub const SAMPLER_GRID_STEPS: usize = 2048;

/// Waiting-time engine: caches the conditional evolution of one initial state
/// on a uniform grid over `[0, t_max]` plus dyadic half-step propagators, so
/// each sample costs a bracket lookup and ~40 matrix–vector products.
///
/// Sampling inverts `P₀(t) = u` for `u` uniform in (0, 1): the grid gives a
/// bracket (P₀ is monotone non-increasing) and bisection with the cached
/// half-step propagators refines it.
pub struct EmissionSampler {
    grid_dt: f64,
    t_max: f64,
    states: Vec<StateVector>,
    p0: Vec<f64>,
    half_steps: Vec<Operator>,
    channels: Vec<JumpChannel>,
}

struct SampleDetail {
    outcome: EmissionOutcome,
    /// Unnormalized conditional state at the emission time.
    state_at_emission: Option<StateVector>,
}

impl EmissionSampler {
    /// Cache the no-emission curve of `psi0` (must be normalized) under `h`.
    pub fn new(
        h: &Operator,
        psi0: &StateVector,
        channels: &[JumpChannel],
        t_max: f64,
        grid_steps: usize,
    ) -> Result<Self> {
        if h.dim() != psi0.dim() {
            return Err(Error::DimensionMismatch {
                expected: h.dim(),
                actual: psi0.dim(),
            });
        }
        let norm_sq = psi0.norm_sq();
        if (norm_sq - 1.0).abs() > 1e-8 {
            return Err(Error::NotNormalized { norm_sq });
        }
        if !t_max.is_finite() || t_max <= 0.0 {
            return Err(Error::InvalidParameter("t_max must be positive and finite"));
        }
        if grid_steps < 2 {
            return Err(Error::InvalidParameter("grid must have at least 2 steps"));
        }
        for ch in channels {
            if ch.operator.dim() != h.dim() {
                return Err(Error::DimensionMismatch {
                    expected: h.dim(),
                    actual: ch.operator.dim(),
                });
            }
        }
        let grid_dt = t_max / grid_steps as f64;
        let step = linalg::expm(&h.scaled(C64::new(0.0, -grid_dt)));
        let mut states = Vec::with_capacity(grid_steps + 1);
        let mut p0 = Vec::with_capacity(grid_steps + 1);
        states.push(psi0.clone());
        p0.push(1.0);
        for k in 0..grid_steps {
            let next = step.apply(&states[k]);
            p0.push(next.norm_sq());
            states.push(next);
        }
        let mut half_steps = Vec::with_capacity(BISECTION_LEVELS);
        let mut dt = grid_dt;
        for _ in 0..BISECTION_LEVELS {
            dt *= 0.5;
            half_steps.push(linalg::expm(&h.scaled(C64::new(0.0, -dt))));
        }
        Ok(EmissionSampler {
            grid_dt,
            t_max,
            states,
            p0,
            half_steps,
            channels: channels.to_vec(),
        })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// No-emission probability at the end of the cached horizon.
    pub fn p0_horizon(&self) -> f64 {
        *self.p0.last().expect("grid is nonempty")
    }

    /// Unnormalized conditional state at an arbitrary `t ∈ [0, t_max]`,
    /// reconstructed from the cached grid and dyadic propagators.
    pub fn state_at(&self, t: f64) -> Result<StateVector> {
        if !(0.0..=self.t_max * (1.0 + 1e-12)).contains(&t) {
            return Err(Error::InvalidParameter("time outside cached horizon"));
        }
        let k = ((t / self.grid_dt) as usize).min(self.states.len() - 1);
        let mut state = self.states[k].clone();
        let mut remainder = t - k as f64 * self.grid_dt;
        let mut dt = self.grid_dt;
        for op in &self.half_steps {
            dt *= 0.5;
            if remainder >= dt {
                state = op.apply(&state);
                remainder -= dt;
            }
        }
        Ok(state)
    }

    /// No-emission probability at an arbitrary `t ∈ [0, t_max]`.
    pub fn p0_at(&self, t: f64) -> Result<f64> {
        Ok(self.state_at(t)?.norm_sq())
    }

    /// Draw one first-emission record.
    pub fn sample(&self, rng: &mut ChaCha12Rng) -> EmissionOutcome {
        self.sample_detailed(rng).outcome
    }

    fn sample_detailed(&self, rng: &mut ChaCha12Rng) -> SampleDetail {
        let u = uniform_open(rng);
        if self.p0_horizon() > u {
            return SampleDetail {
                outcome: EmissionOutcome::NoEmissionWithinHorizon {
                    horizon: self.t_max,
                },
                state_at_emission: None,
            };
        }
        // First grid index where P₀ dropped to u or below.
        let k = self.p0.partition_point(|&p| p > u).min(self.p0.len() - 1);
        debug_assert!(k >= 1);
        let mut t_lo = (k - 1) as f64 * self.grid_dt;
        let mut state = self.states[k - 1].clone();
        let mut width = self.grid_dt;
        for op in &self.half_steps {
            let half = width * 0.5;
            let trial = op.apply(&state);
            if trial.norm_sq() > u {
                state = trial;
                t_lo += half;
            }
            width = half;
            if width <= 1e-10 * t_lo && t_lo > 0.0 {
                break;
            }
        }
        let time = t_lo + width * 0.5;

        // Channel draw weighted by ⟨ψ|c†c|ψ⟩ at the emission time.
        let weights: Vec<f64> = self
            .channels
            .iter()
            .map(|ch| ch.operator.apply(&state).norm_sq())
            .collect();
        let total: f64 = weights.iter().sum();
        let channel = if total > 0.0 {
            let mut draw = uniform_open(rng) * total;
            let mut picked = weights.len() - 1;
            for (i, w) in weights.iter().enumerate() {
                if draw < *w {
                    picked = i;
                    break;
                }
                draw -= w;
            }
            picked
        } else {
            debug_assert!(false, "emission with zero channel weights");
            0
        };
        SampleDetail {
            outcome: EmissionOutcome::Emitted { time, channel },
            state_at_emission: Some(state),
        }
    }
}


/// Draw a single first-emission record for one trajectory id.
///
/// For ensembles prefer building one [`EmissionSampler`] and drawing from it
/// with per-trajectory RNGs; this convenience wrapper rebuilds the cache.
pub fn sample_first_emission_time(
    h: &Operator,
    psi0: &StateVector,
    channels: &[JumpChannel],
    t_max: f64,
    rng: &mut ChaCha12Rng,
) -> Result<EmissionOutcome> {
    let sampler = EmissionSampler::new(h, psi0, channels, t_max, SAMPLER_GRID_STEPS)?;
    Ok(sampler.sample(rng))
}

/// Deterministic first-emission ensemble: one record per trajectory id in
/// `0..n_trajectories`, each from its own RNG substream. The result is
/// independent of evaluation order.
pub fn emission_records(
    h: &Operator,
    psi0: &StateVector,
    cfg: &TrajectoryConfig,
) -> Result<Vec<EmissionRecord>> {
    if cfg.n_trajectories < 1 {
        return Err(Error::InvalidParameter("need at least one trajectory"));
    }
    let sampler = EmissionSampler::new(h, psi0, &cfg.channels, cfg.t_max, SAMPLER_GRID_STEPS)?;
    Ok((0..cfg.n_trajectories)
        .map(|id| {
            let mut rng = trajectory_rng(cfg.seed, id);
            EmissionRecord {
                trajectory: id,
                outcome: sampler.sample(&mut rng),
            }
        })
        .collect())
}

/// Settings for the deterministic mean-waiting-time quadrature.
#[derive(Copy, Clone, Debug)]
pub struct QuadratureConfig {
    /// Integration horizon; choose via [`default_pulse_horizon`] or
    /// [`default_decay_horizon`].
    pub horizon: f64,
    /// Relative convergence target for the Romberg table.
    pub rel_tol: f64,
    /// log2 of the initial interval count.
    pub min_level: u32,
    /// log2 of the maximum interval count.
    pub max_level: u32,
    /// `P₀(horizon)` above this flags the result as a lower bound.
    pub tail_threshold: f64,
}

impl QuadratureConfig {
    pub fn with_horizon(horizon: f64) -> Self {
        QuadratureConfig {
            horizon,
            rel_tol: 1e-9,
            min_level: 6,
            max_level: 18,
            tail_threshold: 1e-3,
        }
    }
}

/// Result of the mean-waiting-time quadrature `∫₀^∞ P₀(t) dt`.
#[derive(Copy, Clone, Debug)]
pub struct MeanEmissionTime {
    pub value: f64,
    pub error_estimate: f64,
    /// Set when `P₀` had not decayed below the tail threshold at the horizon;
    /// the value is then only a lower bound on the true mean.
    pub lower_bound: bool,
    /// `P₀` remaining at the horizon.
    pub p0_at_horizon: f64,
}

/// Mean first-emission time by deterministic quadrature of the no-emission
/// probability: Romberg integration of `P₀` over `[0, horizon]` plus an
/// exponential tail estimate from the slowest observed decay rate.
///
/// Requires `P₀(t) → 0` at the horizon; otherwise the result is flagged as a
/// lower bound rather than silently truncated (a decoherence-free component
/// makes the integral diverge).
pub fn mean_first_emission_time(
    h: &Operator,
    psi0: &StateVector,
    cfg: &QuadratureConfig,
) -> Result<MeanEmissionTime> {
    if h.dim() != psi0.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: psi0.dim(),
        });
    }
    let norm_sq = psi0.norm_sq();
    if (norm_sq - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized { norm_sq });
    }
    if !cfg.horizon.is_finite() || cfg.horizon <= 0.0 {
        return Err(Error::InvalidParameter("quadrature horizon must be positive"));
    }
    if cfg.min_level > cfg.max_level || cfg.max_level > 26 {
        return Err(Error::InvalidParameter("invalid quadrature levels"));
    }

    // Trapezoid sums on dyadically refined grids; each level is an
    // independent walk with a fresh step propagator.
    let mut romberg: Vec<Vec<f64>> = Vec::new();
    let mut p_end = 0.0_f64;
    let mut p_late = 0.0_f64; // P₀ at 3/4 of the horizon, for the tail rate
    let mut level = cfg.min_level;
    while level <= cfg.max_level {
        let n = 1usize << level;
        let dt = cfg.horizon / n as f64;
        let step = linalg::expm(&h.scaled(C64::new(0.0, -dt)));
        let mut state = psi0.clone();
        let mut sum = 0.5 * state.norm_sq();
        let late_index = n - n / 4;
        for k in 1..=n {
            state = step.apply(&state);
            let p = state.norm_sq();
            sum += if k == n { 0.5 * p } else { p };
            if k == late_index {
                p_late = p;
            }
        }
        p_end = state.norm_sq();

        let rows = romberg.len();
        let mut row = Vec::with_capacity(rows + 1);
        row.push(sum * dt);
        for j in 1..=rows {
            let pow4 = libm::exp2(2.0 * j as f64);
            let extrap = (pow4 * row[j - 1] - romberg[rows - 1][j - 1]) / (pow4 - 1.0);
            row.push(extrap);
        }
        if rows >= 1 {
            let best = row[rows];
            let prev = romberg[rows - 1][rows - 1];
            if (best - prev).abs() <= cfg.rel_tol * best.abs() {
                romberg.push(row);
                break;
            }
        }
        romberg.push(row);
        level += 1;
    }
    let table_rows = romberg.len();
    let best = romberg[table_rows - 1][table_rows - 1];
    let prev_best = if table_rows >= 2 {
        romberg[table_rows - 2][table_rows - 2]
    } else {
        best
    };
    let quad_error = (best - prev_best).abs();

    // Exponential tail from the slowest decay visible near the horizon.
    let lower_bound = p_end > cfg.tail_threshold;
    let quarter = cfg.horizon / 4.0;
    let (tail, tail_error) = if p_end > 0.0 && p_late > p_end && !lower_bound {
        let rate = libm::log(p_late / p_end) / quarter;
        let tail = p_end / rate;
        (tail, 0.1 * tail)
    } else {
        (0.0, 0.0)
    };

    Ok(MeanEmissionTime {
        value: best + tail,
        error_estimate: quad_error + tail_error,
        lower_bound,
        p0_at_horizon: p_end,
    })
}

/// Default horizon while a pulse of Rabi magnitude `|Ω|` drives the system:
/// `50 (g/|Ω|)²`, comfortably past the expected mean emission time.
pub fn default_pulse_horizon(g: f64, omega_abs: f64) -> f64 {
    50.0 * (g / omega_abs) * (g / omega_abs)
}

/// Default horizon for undriven decay: `50 / rate` of the slowest channel.
pub fn default_decay_horizon(min_rate: f64) -> f64 {
    50.0 / min_rate
}

/// One conditional-evolution segment of a jump trajectory, starting from a
/// normalized state.
#[derive(Clone, Debug)]
pub struct TrajectorySegment {
    pub t_start: f64,
    pub initial_state: StateVector,
}

/// A jump with its absolute time and emitting channel.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpEvent {
    pub time: f64,
    pub channel: usize,
}

/// Piecewise record of one quantum-jump trajectory: conditional segments
/// alternate with instantaneous jumps `ψ → cψ/‖cψ‖`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub segments: Vec<TrajectorySegment>,
    pub jumps: Vec<JumpEvent>,
    /// Normalized conditional state at `t_max`.
    pub final_state: StateVector,
    pub t_max: f64,
}

/// Run one jump trajectory to `t_max` under `h` with the given channels.
pub fn run_trajectory(
    h: &Operator,
    psi0: &StateVector,
    channels: &[JumpChannel],
    t_max: f64,
    rng: &mut ChaCha12Rng,
) -> Result<Trajectory> {
    let mut t = 0.0_f64;
    let mut state = psi0.normalized()?;
    let mut segments = Vec::new();
    let mut jumps: Vec<JumpEvent> = Vec::new();
    segments.push(TrajectorySegment {
        t_start: 0.0,
        initial_state: state.clone(),
    });
    loop {
        let remaining = t_max - t;
        let sampler = EmissionSampler::new(h, &state, channels, remaining, SAMPLER_GRID_STEPS)?;
        let detail = sampler.sample_detailed(rng);
        match detail.outcome {
            EmissionOutcome::NoEmissionWithinHorizon { .. } => {
                let final_state = sampler.state_at(remaining)?.normalized()?;
                return Ok(Trajectory {
                    segments,
                    jumps,
                    final_state,
                    t_max,
                });
            }
            EmissionOutcome::Emitted { time, channel } => {
                let at_emission = detail
                    .state_at_emission
                    .expect("emitted samples carry their state");
                let jumped = channels[channel].operator.apply(&at_emission).normalized()?;
                t += time;
                debug_assert!(jumps.last().is_none_or(|j| j.time < t));
                jumps.push(JumpEvent { time: t, channel });
                segments.push(TrajectorySegment {
                    t_start: t,
                    initial_state: jumped.clone(),
                });
                state = jumped;
            }
        }
    }
}

/// Decay rates of the orthogonal complement of the DFS: eigenvalues `λ` of
/// `H` restricted to the complement give population decay rates `−2 Im λ`,
/// returned sorted ascending.
///
/// The inverse of the smallest rate estimates the measurement time ΔT after
/// which any non-DF state has certainly emitted; see [`delta_t_estimate`].
pub fn non_dfs_decay_rates(h: &Operator, dfs: &[StateVector]) -> Result<Vec<f64>> {
    let dim = h.dim();
    for s in dfs {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: s.dim(),
            });
        }
    }
    // Orthonormal complement: extend the DFS basis by canonical vectors and
    // keep what survives Gram–Schmidt.
    let mut candidates: Vec<StateVector> = dfs.to_vec();
    for i in 0..dim {
        let mut e = StateVector::zeros(dim);
        e.amps_mut()[i] = C64::new(1.0, 0.0);
        candidates.push(e);
    }
    let full = linalg::orthonormalize(&candidates, 1e-8);
    debug_assert_eq!(full.len(), dim);
    let complement = &full[dfs.len()..];

    let k = complement.len();
    let mut restricted = Operator::zeros(k);
    for (c, ec) in complement.iter().enumerate() {
        let h_ec = h.apply(ec);
        for (r, er) in complement.iter().enumerate() {
            restricted.set(r, c, crate::hilbert::inner_product(er, &h_ec)?);
        }
    }
    let mut rates: Vec<f64> = linalg::eigenvalues(&restricted)?
        .into_iter()
        .map(|l| -2.0 * l.im)
        .collect();
    rates.sort_by(|a, b| a.partial_cmp(b).expect("rates are finite"));
    Ok(rates)
}

/// `ΔT = 1 / min positive rate`, if any rate is positive.
pub fn delta_t_estimate(rates: &[f64]) -> Option<f64> {
    rates
        .iter()
        .copied()
        .find(|&r| r > 0.0)
        .map(|r| 1.0 / r)
}
