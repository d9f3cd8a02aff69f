//! Exact dephasing dynamics of the qubit.
//!
//! Free evolution: the qubit's off-diagonal element decays by the
//! decoherence factor
//!
//! ```text
//! F(t) = e^{i2ft} ∏_{k>0} (1/z_k) { e^{2JβΛ_k − i g_k} [cos g̃_k + i sin g̃_k cos 2α_k]
//!                                 + e^{−2JβΛ_k + i g_k} [cos g̃_k − i sin g̃_k cos 2α_k] }
//! ```
//!
//! with `z_k = 2 cosh(2JβΛ_k)`, `g_k = 2JΛ_k(h) t` and `g̃_k = 2JΛ_k(h̃) t`.
//! Each mode factor is evaluated in the rebalanced form
//!
//! ```text
//! cos g cos g̃ + cos 2α sin g̃ sin g + i tanh(2JβΛ) (cos 2α sin g̃ cos g − cos g̃ sin g),
//! ```
//!
//! which divides through by the dominant exponential: the thermal weights
//! enter only through `tanh`, so arbitrarily large `βΛ` cannot overflow,
//! and each factor has modulus at most one. The Loschmidt echo is
//! `L(t) = |F(t)|²`.
//!
//! Pulsed evolution: a periodic train of instantaneous spin flips on the
//! qubit (cycle time 𝒯) replaces the generator by an effective one whose
//! decoherence factor is
//!
//! ```text
//! F_eff(t) = ∏_{k>0} [1 − 2n_x² sin²g_p + 2i n_x sin²g_p (n_y cos θ_k − n_z sin θ_k) tanh(2JβΛ_k)]
//! ```
//!
//! with `g_p = 2JΛ_p t`, `Λ_p = √((cos k + h̄)² + (1 + ε²𝒯²/4) sin²k)`,
//! `h̄ = h + εJ/2`, and the unit Bloch axis
//! `n = (ε𝒯 sin k, 2 sin k, 2(cos k + h̄)) / (2Λ_p)`.
//!
//! The product over modes always accumulates sequentially in ascending
//! `k`; parallel evaluation happens across time samples only, so results
//! are bit-reproducible at any worker count.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bath::{self, BathParams};
use crate::error::{Error, Result};

/// Magnitudes may exceed one by at most this much before the evaluation
/// is treated as broken.
pub const MAGNITUDE_SLACK: f64 = 1e-9;

/// Time grid in units of `1/J`, starting at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    t_max: f64,
    samples: Vec<f64>,
}

impl TimeGrid {
    /// Uniform grid of `n_points` samples covering `[0, t_max]`.
    pub fn uniform(t_max: f64, n_points: usize) -> Result<Self> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::Config(format!("t_max must be positive, got {t_max}")));
        }
        if n_points < 2 {
            return Err(Error::Config(format!("n_points must be >= 2, got {n_points}")));
        }
        let dt = t_max / (n_points - 1) as f64;
        let mut samples: Vec<f64> = (0..n_points).map(|i| i as f64 * dt).collect();
        samples[n_points - 1] = t_max;
        Ok(Self { t_max, samples })
    }

    /// Grid from explicit samples; they must start at zero and increase.
    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Config("time grid must not be empty".into()));
        }
        if samples[0] != 0.0 {
            return Err(Error::Config(format!(
                "time grid must start at t = 0, got {}",
                samples[0]
            )));
        }
        if samples.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("time grid samples must strictly increase".into()));
        }
        let t_max = *samples.last().unwrap();
        Ok(Self { t_max, samples })
    }

    /// Default horizon for revival accounting: two traversal times of the
    /// finite bath (`t_max = 2N/J`) sampled at 20 points per unit `Jt`.
    pub fn default_for(params: &BathParams) -> Self {
        let t_max = 2.0 * params.n_spins() as f64 / params.j();
        let n_points = (20.0 * t_max).round() as usize;
        Self::uniform(t_max, n_points.max(2)).expect("default grid is valid")
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Periodic instant-flip pulse train on the qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseConfig {
    enabled: bool,
    period: f64,
}

impl PulseConfig {
    /// No pulses; the trajectory follows the free decoherence factor.
    pub fn off() -> Self {
        Self { enabled: false, period: 0.0 }
    }

    /// Pulses with cycle time `period` (two flips per cycle).
    pub fn with_period(period: f64) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::Config(format!(
                "pulse period must be positive, got {period}"
            )));
        }
        Ok(Self { enabled: true, period })
    }

    pub fn enabled(&self) -> bool {
        self.enabled
    }

    pub fn period(&self) -> f64 {
        self.period
    }
}

/// Which field the thermal weights `tanh(2JβΛ_k)` and rotation angles
/// `θ_k` of the pulsed factor are evaluated at. The bath thermalized at
/// the bare field before the pulses started, so [`ThermalReference::Bare`]
/// is the default; the shifted variant exists for sensitivity studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThermalReference {
    Bare,
    Shifted,
}

struct FreeMode {
    g_rate: f64,
    g_tilde_rate: f64,
    cos_2alpha: f64,
    thermal: f64,
}

/// Precomputed per-mode data for evaluating the free `F(t)` at many times.
pub struct Dephasing {
    phase_rate: f64,
    modes: Vec<FreeMode>,
}

impl Dephasing {
    pub fn new(params: &BathParams) -> Result<Self> {
        let two_j = 2.0 * params.j();
        let beta = params.beta();
        let modes = bath::modes(params)?
            .into_iter()
            .map(|m| FreeMode {
                g_rate: two_j * m.lambda,
                g_tilde_rate: two_j * m.lambda_tilde,
                cos_2alpha: (2.0 * m.alpha).cos(),
                thermal: (two_j * beta * m.lambda).tanh(),
            })
            .collect();
        Ok(Self { phase_rate: 2.0 * params.f(), modes })
    }

    /// `F(t)`.
    pub fn factor(&self, t: f64) -> Result<Complex64> {
        if !(t >= 0.0) {
            return Err(Error::Config(format!("time must be nonnegative, got {t}")));
        }
        let mut prod = Complex64::new(1.0, 0.0);
        for m in &self.modes {
            let (sg, cg) = (m.g_rate * t).sin_cos();
            let (sgt, cgt) = (m.g_tilde_rate * t).sin_cos();
            let re = cg * cgt + m.cos_2alpha * sgt * sg;
            let im = m.thermal * (m.cos_2alpha * sgt * cg - cgt * sg);
            prod *= Complex64::new(re, im);
        }
        if !prod.is_finite() {
            return Err(Error::Computation {
                t,
                message: "non-finite mode product in decoherence factor".into(),
            });
        }
        Ok(Complex64::from_polar(1.0, self.phase_rate * t) * prod)
    }

    pub fn magnitude(&self, t: f64) -> Result<f64> {
        self.factor(t).map(|f| f.norm())
    }
}

struct PulsedMode {
    g_rate: f64,
    two_nx2: f64,
    backaction: f64,
    bloch: [f64; 3],
}

/// Precomputed per-mode data for the pulse-protected effective evolution.
pub struct PulsedDephasing {
    modes: Vec<PulsedMode>,
}

impl PulsedDephasing {
    pub fn new(params: &BathParams, pulses: &PulseConfig) -> Result<Self> {
        Self::with_thermal_reference(params, pulses, ThermalReference::Bare)
    }

    pub fn with_thermal_reference(
        params: &BathParams,
        pulses: &PulseConfig,
        reference: ThermalReference,
    ) -> Result<Self> {
        if !pulses.enabled() {
            return Err(Error::Config(
                "effective decoherence factor requires pulses to be enabled".into(),
            ));
        }
        let j = params.j();
        let eps = params.epsilon();
        let period = pulses.period();
        let h_bar = params.h() + eps * j / 2.0;
        let thermal_field = match reference {
            ThermalReference::Bare => params.h(),
            ThermalReference::Shifted => h_bar,
        };
        let transverse = 1.0 + eps * eps * period * period / 4.0;
        let modes = bath::mode_grid(params.n_spins())?
            .into_iter()
            .map(|k| {
                let (sk, ck) = k.sin_cos();
                let lambda_p = ((ck + h_bar) * (ck + h_bar) + transverse * sk * sk).sqrt();
                let nx = eps * period * sk / (2.0 * lambda_p);
                let ny = sk / lambda_p;
                let nz = (ck + h_bar) / lambda_p;
                let theta = bath::bogoliubov_angle(k, thermal_field);
                let thermal = (2.0 * j * params.beta() * bath::dispersion(k, thermal_field)).tanh();
                PulsedMode {
                    g_rate: 2.0 * j * lambda_p,
                    two_nx2: 2.0 * nx * nx,
                    backaction: 2.0 * nx * (ny * theta.cos() - nz * theta.sin()) * thermal,
                    bloch: [nx, ny, nz],
                }
            })
            .collect();
        Ok(Self { modes })
    }

    /// `F_eff(t)`. Valid at any `t >= 0`, not only stroboscopic points:
    /// the effective generator is time independent.
    pub fn factor(&self, t: f64) -> Result<Complex64> {
        if !(t >= 0.0) {
            return Err(Error::Config(format!("time must be nonnegative, got {t}")));
        }
        let mut prod = Complex64::new(1.0, 0.0);
        for m in &self.modes {
            let s = (m.g_rate * t).sin();
            let s2 = s * s;
            prod *= Complex64::new(1.0 - m.two_nx2 * s2, m.backaction * s2);
        }
        if !prod.is_finite() {
            return Err(Error::Computation {
                t,
                message: "non-finite mode product in effective decoherence factor".into(),
            });
        }
        Ok(prod)
    }

    pub fn magnitude(&self, t: f64) -> Result<f64> {
        self.factor(t).map(|f| f.norm())
    }

    /// Per-mode Bloch axes `(n_x, n_y, n_z)` of the effective generator.
    pub fn bloch_vectors(&self) -> Vec<[f64; 3]> {
        self.modes.iter().map(|m| m.bloch).collect()
    }
}

/// Free or pulsed factor evaluator behind one interface.
pub enum Engine {
    Free(Dephasing),
    Pulsed(PulsedDephasing),
}

impl Engine {
    pub fn new(params: &BathParams, pulses: &PulseConfig) -> Result<Self> {
        if pulses.enabled() {
            Ok(Engine::Pulsed(PulsedDephasing::new(params, pulses)?))
        } else {
            Ok(Engine::Free(Dephasing::new(params)?))
        }
    }

    pub fn factor(&self, t: f64) -> Result<Complex64> {
        match self {
            Engine::Free(d) => d.factor(t),
            Engine::Pulsed(p) => p.factor(t),
        }
    }

    pub fn magnitude(&self, t: f64) -> Result<f64> {
        self.factor(t).map(|f| f.norm())
    }
}

/// Complex `F` sampled on a grid, with `|F|` and the echo `L = |F|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceTrajectory {
    grid: TimeGrid,
    values: Vec<Complex64>,
    magnitude: Vec<f64>,
    echo: Vec<f64>,
}

impl DecoherenceTrajectory {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        self.grid.samples()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn magnitude(&self) -> &[f64] {
        &self.magnitude
    }

    /// `L(t) = |F(t)|²`, elementwise.
    pub fn loschmidt_echo(&self) -> &[f64] {
        &self.echo
    }
}

/// Free decoherence factor `F(t)` for one time.
pub fn decoherence_factor(params: &BathParams, t: f64) -> Result<Complex64> {
    Dephasing::new(params)?.factor(t)
}

/// Effective decoherence factor `F_eff(t)` under the pulse train.
pub fn effective_decoherence_factor(
    params: &BathParams,
    pulses: &PulseConfig,
    t: f64,
) -> Result<Complex64> {
    PulsedDephasing::new(params, pulses)?.factor(t)
}

/// Evaluates `F` on the grid — the free factor when pulses are off, the
/// effective factor when they are on. Time samples are evaluated in
/// parallel; the output ordering is that of the grid.
pub fn trajectory(
    params: &BathParams,
    grid: &TimeGrid,
    pulses: &PulseConfig,
) -> Result<DecoherenceTrajectory> {
    let engine = Engine::new(params, pulses)?;
    let values: Vec<Complex64> = grid
        .samples()
        .par_iter()
        .map(|&t| engine.factor(t))
        .collect::<Result<_>>()?;
    let magnitude: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    for (&t, &m) in grid.samples().iter().zip(&magnitude) {
        if m > 1.0 + MAGNITUDE_SLACK {
            return Err(Error::Computation {
                t,
                message: format!("|F| = {m} exceeds 1 beyond tolerance"),
            });
        }
    }
    let echo = magnitude.iter().map(|m| m * m).collect();
    Ok(DecoherenceTrajectory { grid: grid.clone(), values, magnitude, echo })
}
