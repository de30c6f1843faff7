// SPDX-License-Identifier: Apache-2.0
//! Macrospin stochastic Landau-Lifshitz-Gilbert model of a low-barrier
//! circular nanomagnet, in CGS-Gaussian units.
//!
//! ```text
//! (1 + a^2) dm/dt = -g m x H - a g m x (m x H)
//!                   + m x (I_s x m) / (qN) + a m x I_s / (qN)
//! H = -4 pi Ms m_x x^ + H_n
//! ```
//!
//! The out-of-plane axis is `x`; the fixed layer and spin current point
//! along `z`. Integration uses stochastic Heun with one noise draw per step,
//! followed by renormalization.

use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Electron gyromagnetic ratio, rad s^-1 Oe^-1.
pub const GYROMAGNETIC_RATIO: f64 = 1.76e7;
/// Bohr magneton, erg/G.
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-21;
/// Boltzmann constant, erg/K.
pub const BOLTZMANN: f64 = 1.380_649e-16;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// `k_B T` at 300 K, erg.
pub const THERMAL_ENERGY_300K: f64 = BOLTZMANN * 300.0;
/// Default integration step, s.
pub const DEFAULT_TIME_STEP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3<S> {
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S: Scalar> Vec3<S> {
    pub fn new(x: S, y: S, z: S) -> Self {
        Vec3 { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero(), S::zero())
    }

    pub fn unit_x() -> Self {
        Self::new(S::one(), S::zero(), S::zero())
    }

    pub fn unit_y() -> Self {
        Self::new(S::zero(), S::one(), S::zero())
    }

    pub fn unit_z() -> Self {
        Self::new(S::zero(), S::zero(), S::one())
    }

    pub fn dot(self, o: Self) -> S {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> S {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Self {
        self * self.norm().recip()
    }
}

impl<S: Scalar> Add for Vec3<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<S: Scalar> Sub for Vec3<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<S: Scalar> Mul<S> for Vec3<S> {
    type Output = Self;
    fn mul(self, k: S) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }
}

impl<S: Scalar> Neg for Vec3<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Free-layer parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnetParams<S> {
    /// Gilbert damping.
    pub alpha: S,
    /// `Ms`, emu/cm^3.
    pub saturation_magnetization: S,
    /// cm^3.
    pub volume: S,
    /// K. Zero disables the thermal field.
    pub temperature: S,
    /// rad s^-1 Oe^-1.
    pub gamma: S,
    /// Fixed-layer spin polarization, relating charge to spin current.
    pub polarization: S,
    n_spins: S,
}

impl<S: Scalar> MagnetParams<S> {
    pub fn new(
        alpha: S,
        saturation_magnetization: S,
        volume: S,
        temperature: S,
        gamma: S,
        polarization: S,
    ) -> Result<Self> {
        for (label, v) in [
            ("alpha", alpha),
            ("Ms", saturation_magnetization),
            ("volume", volume),
            ("gamma", gamma),
            ("polarization", polarization),
        ] {
            if !(v.is_finite() && v > S::zero()) {
                return Err(Error::Input(format!("{label} must be positive, got {v}")));
            }
        }
        if !(temperature.is_finite() && temperature >= S::zero()) {
            return Err(Error::Input(format!("temperature must be >= 0, got {temperature}")));
        }
        Ok(MagnetParams {
            alpha,
            saturation_magnetization,
            volume,
            temperature,
            gamma,
            polarization,
            n_spins: saturation_magnetization * volume / S::lit(BOHR_MAGNETON),
        })
    }

    /// Circular in-plane magnet, 22 nm diameter, 2 nm thick, `alpha = 0.01`,
    /// `Ms = 1100 emu/cc`, 300 K, polarization 0.5.
    pub fn low_barrier_disk() -> Self {
        let radius = S::lit(11e-7);
        let volume = S::PI() * radius * radius * S::lit(2e-7);
        Self::new(
            S::lit(0.01),
            S::lit(1100.0),
            volume,
            S::lit(300.0),
            S::lit(GYROMAGNETIC_RATIO),
            S::lit(0.5),
        )
        .expect("reference parameters are valid")
    }

    pub fn with_temperature(mut self, temperature: S) -> Result<Self> {
        if !(temperature.is_finite() && temperature >= S::zero()) {
            return Err(Error::Input(format!("temperature must be >= 0, got {temperature}")));
        }
        self.temperature = temperature;
        Ok(self)
    }

    /// `N = Ms V / mu_B`.
    pub fn n_spins(&self) -> S {
        self.n_spins
    }

    /// `k_B T` in erg.
    pub fn thermal_energy(&self) -> S {
        S::lit(BOLTZMANN) * self.temperature
    }

    /// Spin current `P I_c` for a charge current in amperes.
    pub fn spin_current(&self, charge_current: S) -> S {
        self.polarization * charge_current
    }

    /// Per-component, per-step thermal field deviation in Oe:
    /// `sqrt(2 alpha k_B T / (|gamma| Ms V dt))`.
    pub fn thermal_field_std(&self, dt: S) -> S {
        (S::lit(2.0) * self.alpha * self.thermal_energy()
            / (self.gamma.abs() * self.saturation_magnetization * self.volume * dt))
            .sqrt()
    }

    /// Out-of-plane demagnetization energy `2 pi Ms^2 V m_x^2`, erg.
    pub fn demag_energy(&self, m: Vec3<S>) -> S {
        S::lit(2.0) * S::PI() * self.saturation_magnetization * self.saturation_magnetization
            * self.volume
            * m.x
            * m.x
    }
}

/// Unit magnetization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnetState<S> {
    m: Vec3<S>,
}

impl<S: Scalar> MagnetState<S> {
    /// Rejects vectors whose norm differs from one by more than `1e-9`
    /// (or 100 ulps in single precision).
    pub fn new(m: Vec3<S>) -> Result<Self> {
        let tol = S::lit(1e-9).max(S::epsilon() * S::lit(100.0));
        let norm = m.norm();
        if !((norm - S::one()).abs() <= tol) {
            return Err(Error::Input(format!("magnetization norm {norm} is not 1")));
        }
        Ok(MagnetState { m })
    }

    pub fn normalized(m: Vec3<S>) -> Result<Self> {
        let norm = m.norm();
        if !(norm.is_finite() && norm > S::zero()) {
            return Err(Error::Input("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(MagnetState { m: m.normalized() })
    }

    pub fn vector(&self) -> Vec3<S> {
        self.m
    }
}

/// MTJ read-out parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MtjParams<S> {
    /// Mean conductance, S.
    pub conductance: S,
    /// Tunneling magnetoresistance ratio (1.10 for 110%).
    pub tmr: S,
}

impl<S: Scalar> MtjParams<S> {
    pub fn new(conductance: S, tmr: S) -> Result<Self> {
        if !(conductance.is_finite() && conductance > S::zero()) {
            return Err(Error::Input(format!("G0 must be positive, got {conductance}")));
        }
        if !(tmr.is_finite() && tmr >= S::zero()) {
            return Err(Error::Input(format!("TMR must be >= 0, got {tmr}")));
        }
        Ok(MtjParams { conductance, tmr })
    }
}

/// `G0 [1 + m_z TMR / (2 + TMR)]`.
pub fn mtj_conductance<S: Scalar>(m_z: S, mtj: &MtjParams<S>) -> Result<S> {
    if !(m_z >= -S::one() && m_z <= S::one()) {
        return Err(Error::Input(format!("m_z = {m_z} outside [-1, 1]")));
    }
    Ok(mtj.conductance * (S::one() + m_z * mtj.tmr / (S::lit(2.0) + mtj.tmr)))
}

/// One draw of the thermal field, Oe.
pub fn thermal_field<S: Scalar, R: Rng + ?Sized>(params: &MagnetParams<S>, dt: S, rng: &mut R) -> Vec3<S> {
    if params.temperature == S::zero() {
        return Vec3::zero();
    }
    let sigma = params.thermal_field_std(dt);
    let mut draw = || S::lit(rng.sample::<f64, _>(StandardNormal)) * sigma;
    Vec3::new(draw(), draw(), draw())
}

/// Demagnetization field plus `noise`.
pub fn effective_field<S: Scalar>(m: Vec3<S>, params: &MagnetParams<S>, noise: Vec3<S>) -> Vec3<S> {
    let demag = -S::lit(4.0) * S::PI() * params.saturation_magnetization * m.x;
    Vec3::new(demag, S::zero(), S::zero()) + noise
}

/// `dm/dt` for field `h` and spin current `i_s` (A, vector).
fn torque<S: Scalar>(m: Vec3<S>, h: Vec3<S>, i_s: Vec3<S>, params: &MagnetParams<S>) -> Vec3<S> {
    let gamma = params.gamma.abs();
    let alpha = params.alpha;
    let m_x_h = m.cross(h);
    let m_x_m_x_h = m.cross(m_x_h);
    let rate = (S::lit(ELEMENTARY_CHARGE) * params.n_spins).recip();
    let damping_like = m.cross(i_s.cross(m)) * rate;
    let field_like = m.cross(i_s) * (alpha * rate);
    (m_x_h * (-gamma) - m_x_m_x_h * (alpha * gamma) + damping_like + field_like)
        * (S::one() + alpha * alpha).recip()
}

fn heun_step<S: Scalar>(
    m: Vec3<S>,
    spin_current: S,
    params: &MagnetParams<S>,
    dt: S,
    noise: Vec3<S>,
) -> Vec3<S> {
    let i_s = Vec3::unit_z() * spin_current;
    let k0 = torque(m, effective_field(m, params, noise), i_s, params);
    let predicted = m + k0 * dt;
    let k1 = torque(predicted, effective_field(predicted, params, noise), i_s, params);
    (m + (k0 + k1) * (dt * S::lit(0.5))).normalized()
}

/// Advances a unit magnetization by one stochastic Heun step.
pub fn sllg_step<S: Scalar, R: Rng + ?Sized>(
    m: Vec3<S>,
    spin_current: S,
    params: &MagnetParams<S>,
    dt: S,
    rng: &mut R,
) -> Result<MagnetState<S>> {
    let state = MagnetState::new(m)?;
    if !(dt.is_finite() && dt > S::zero()) {
        return Err(Error::Input(format!("time step must be positive, got {dt}")));
    }
    let noise = thermal_field(params, dt, rng);
    Ok(MagnetState {
        m: heun_step(state.m, spin_current, params, dt, noise),
    })
}

/// Stateful integrator with its own random stream.
#[derive(Debug, Clone)]
pub struct MacrospinSimulator<S> {
    params: MagnetParams<S>,
    spin_current: S,
    dt: S,
    state: MagnetState<S>,
    steps: u64,
    rng: ChaCha8Rng,
}

impl<S: Scalar> MacrospinSimulator<S> {
    pub fn new(
        params: MagnetParams<S>,
        spin_current: S,
        dt: S,
        initial: MagnetState<S>,
        seed: u64,
    ) -> Result<Self> {
        Self::with_stream(params, spin_current, dt, initial, seed, 0)
    }

    /// Uses ChaCha stream `stream` of `seed`, for independent replicas.
    pub fn with_stream(
        params: MagnetParams<S>,
        spin_current: S,
        dt: S,
        initial: MagnetState<S>,
        seed: u64,
        stream: u64,
    ) -> Result<Self> {
        if !(dt.is_finite() && dt > S::zero()) {
            return Err(Error::Input(format!("time step must be positive, got {dt}")));
        }
        if !spin_current.is_finite() {
            return Err(Error::Input("spin current is not finite".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Ok(MacrospinSimulator {
            params,
            spin_current,
            dt,
            state: initial,
            steps: 0,
            rng,
        })
    }

    pub fn state(&self) -> MagnetState<S> {
        self.state
    }

    pub fn time(&self) -> S {
        S::lit(self.steps as f64) * self.dt
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn step(&mut self) -> Vec3<S> {
        let noise = thermal_field(&self.params, self.dt, &mut self.rng);
        self.state.m = heun_step(self.state.m, self.spin_current, &self.params, self.dt, noise);
        self.steps += 1;
        self.state.m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint<S> {
    pub time: S,
    pub m: Vec3<S>,
}

/// Integrates for `duration` and records `m` after every step.
pub fn run_trajectory<S: Scalar>(
    params: &MagnetParams<S>,
    spin_current: S,
    duration: S,
    dt: S,
    seed: u64,
    initial: MagnetState<S>,
) -> Result<Vec<TrajectoryPoint<S>>> {
    if !(duration >= dt) {
        return Err(Error::Input(format!("duration {duration} shorter than step {dt}")));
    }
    let steps = (duration / dt).round().as_f64() as u64;
    let mut sim = MacrospinSimulator::new(*params, spin_current, dt, initial, seed)?;
    Ok((0..steps)
        .map(|_| {
            let m = sim.step();
            TrajectoryPoint { time: sim.time(), m }
        })
        .collect())
}

/// Result of [`sigmoid_response`].
#[derive(Debug, Clone, PartialEq)]
pub struct SigmoidSweep<S> {
    /// `(I_s, <sgn m_z>)` per sweep point.
    pub points: Vec<(S, S)>,
    /// Batch-means standard error of each point's average.
    pub std_errors: Vec<S>,
    /// Fitted `I_scale` of `tanh(I_s / I_scale)`.
    pub current_scale: S,
    pub r_squared: S,
    /// Sum of squared residuals of the fit.
    pub residual: S,
    /// Sign changes of `m_z` at the sweep point nearest zero current.
    pub zero_bias_flips: u64,
    /// Set when fewer than 100 flips occurred at zero bias.
    pub insufficient_flips: bool,
}

pub const MIN_ZERO_BIAS_FLIPS: u64 = 100;
const ERROR_BATCHES: u64 = 20;

/// Time-averages `sgn(m_z)` (with `sgn 0 = +1`) at each current and fits a
/// tanh. Each point runs on its own random stream and starts along `+y`.
pub fn sigmoid_response<S: Scalar>(
    params: &MagnetParams<S>,
    currents: &[S],
    averaging_time: S,
    dt: S,
    seed: u64,
) -> Result<SigmoidSweep<S>> {
    if currents.is_empty() {
        return Err(Error::Input("empty current sweep".into()));
    }
    if !(averaging_time >= dt) {
        return Err(Error::Input("averaging time shorter than one step".into()));
    }
    let steps = (averaging_time / dt).round().as_f64() as u64;
    let start = MagnetState::new(Vec3::unit_y())?;
    let results = currents
        .par_iter()
        .enumerate()
        .map(|(k, &current)| {
            let mut sim =
                MacrospinSimulator::with_stream(*params, current, dt, start, seed, k as u64)?;
            let batch_len = (steps / ERROR_BATCHES).max(1);
            let mut batches = Vec::with_capacity(ERROR_BATCHES as usize + 1);
            let mut batch_sum = 0i64;
            let mut sum = 0i64;
            let mut flips = 0u64;
            let mut last = 1i8;
            for step in 1..=steps {
                let s = if sim.step().z >= S::zero() { 1i8 } else { -1 };
                if s != last {
                    flips += 1;
                }
                last = s;
                sum += s as i64;
                batch_sum += s as i64;
                if step % batch_len == 0 {
                    batches.push(batch_sum as f64 / batch_len as f64);
                    batch_sum = 0;
                }
            }
            let mean = sum as f64 / steps as f64;
            let nb = batches.len() as f64;
            let std_error = if batches.len() > 1 {
                let var = batches.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (nb - 1.0);
                (var / nb).sqrt()
            } else {
                f64::NAN
            };
            Ok((current, S::lit(mean), S::lit(std_error), flips))
        })
        .collect::<Result<Vec<_>>>()?;
    let zero_idx = (0..currents.len())
        .min_by(|&a, &b| {
            currents[a]
                .abs()
                .partial_cmp(&currents[b].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap_or(0);
    let zero_bias_flips = results[zero_idx].3;
    let points: Vec<(S, S)> = results.iter().map(|&(i, y, _, _)| (i, y)).collect();
    let std_errors = results.iter().map(|&(_, _, e, _)| e).collect();
    let fit = fit_tanh_scale(&points);
    Ok(SigmoidSweep {
        points,
        std_errors,
        current_scale: fit.scale,
        r_squared: fit.r_squared,
        residual: fit.sse,
        zero_bias_flips,
        insufficient_flips: zero_bias_flips < MIN_ZERO_BIAS_FLIPS,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TanhFit<S> {
    pub scale: S,
    pub sse: S,
    pub r_squared: S,
}

/// Least-squares `y = tanh(x / scale)`: log-spaced scan followed by a
/// golden-section refinement in `ln scale`.
pub fn fit_tanh_scale<S: Scalar>(points: &[(S, S)]) -> TanhFit<S> {
    let sse = |ln_scale: f64| -> f64 {
        let scale = ln_scale.exp();
        points
            .iter()
            .map(|&(x, y)| {
                let r = y.as_f64() - (x.as_f64() / scale).tanh();
                r * r
            })
            .sum()
    };
    let magnitudes: Vec<f64> = points
        .iter()
        .map(|&(x, _)| x.as_f64().abs())
        .filter(|&x| x > 0.0)
        .collect();
    let (lo, hi) = match (
        magnitudes.iter().cloned().fold(f64::INFINITY, f64::min),
        magnitudes.iter().cloned().fold(0.0, f64::max),
    ) {
        (lo, hi) if lo.is_finite() && hi > 0.0 => ((lo * 1e-3).ln(), (hi * 1e3).ln()),
        _ => (0.0, 0.0),
    };
    let grid = 400;
    let step = (hi - lo) / grid as f64;
    let best = (0..=grid)
        .map(|k| lo + step * k as f64)
        .min_by(|a, b| sse(*a).partial_cmp(&sse(*b)).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(lo);
    let (mut a, mut b) = (best - step, best + step);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if sse(c) < sse(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let ln_scale = 0.5 * (a + b);
    let residual = sse(ln_scale);
    let mean = points.iter().map(|&(_, y)| y.as_f64()).sum::<f64>() / points.len().max(1) as f64;
    let total: f64 = points
        .iter()
        .map(|&(_, y)| (y.as_f64() - mean).powi(2))
        .sum();
    let r_squared = if total > 0.0 { 1.0 - residual / total } else { 0.0 };
    TanhFit {
        scale: S::lit(ln_scale.exp()),
        sse: S::lit(residual),
        r_squared: S::lit(r_squared),
    }
}
