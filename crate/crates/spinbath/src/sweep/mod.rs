//! Parameter sweeps: configuration documents, the parallel runner, and
//! deterministic CSV/JSON emission.
//!
//! A sweep varies one axis (`h`, `temperature`, `n_spins` or
//! `pulse_period`) over explicit values, optionally fanning out into
//! labelled series that override individual parameters (temperature,
//! field, initial state, pulse settings). Each (axis value, series)
//! point computes a full trajectory and one observable; points are
//! independent, run in parallel, and land in preassigned table slots, so
//! the emitted files are byte-identical at any worker count.

mod config;
mod emit;
mod presets;

pub use config::{metadata_string, parse_config};
pub use emit::{csv_string, emit, fmt_value, json_string, sidecar_path, OutputFormat};
pub use presets::{preset, preset_names};

use rayon::prelude::*;

use crate::bath::BathParams;
use crate::decoherence::{trajectory, PulseConfig, TimeGrid};
use crate::error::{Error, Result};
use crate::nonmarkov::{i_q, n_q, normalized_n};
use crate::quantumness::{quantumness_series, BellDiagonalState};

/// Default extrema-detection threshold, in quantumness units.
pub const DEFAULT_THRESHOLD: f64 = 1e-6;

/// Parameter varied by the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Field,
    Temperature,
    BathSize,
    PulsePeriod,
}

impl SweepAxis {
    pub fn token(&self) -> &'static str {
        match self {
            SweepAxis::Field => "h",
            SweepAxis::Temperature => "temperature",
            SweepAxis::BathSize => "n_spins",
            SweepAxis::PulsePeriod => "pulse_period",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s {
            "h" => Some(SweepAxis::Field),
            "temperature" => Some(SweepAxis::Temperature),
            "n_spins" => Some(SweepAxis::BathSize),
            "pulse_period" => Some(SweepAxis::PulsePeriod),
            _ => None,
        }
    }
}

/// Quantity recorded per sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    /// Loschmidt echo `L(t)` — a time series per point.
    Echo,
    /// Negativity of quantumness `Q(t)` — a time series per point.
    Quantumness,
    /// Total backflow of `√L` — one scalar per point.
    NQ,
    /// `n_q/(n_q+1)` — one scalar per point.
    IQ,
    /// Largest recovered quantumness fraction — one scalar per point.
    NormalizedN,
}

impl Observable {
    pub fn token(&self) -> &'static str {
        match self {
            Observable::Echo => "echo",
            Observable::Quantumness => "quantumness",
            Observable::NQ => "n_q",
            Observable::IQ => "i_q",
            Observable::NormalizedN => "normalized_n",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s {
            "echo" => Some(Observable::Echo),
            "quantumness" => Some(Observable::Quantumness),
            "n_q" => Some(Observable::NQ),
            "i_q" => Some(Observable::IQ),
            "normalized_n" => Some(Observable::NormalizedN),
            _ => None,
        }
    }

    /// Whether the observable is a time series (one row per sample)
    /// rather than a scalar per axis value.
    pub fn is_series(&self) -> bool {
        matches!(self, Observable::Echo | Observable::Quantumness)
    }
}

/// Time grid request: explicit, or derived per point from the bath size
/// (`t_max = 2N/J` at 20 samples per unit `Jt`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridSpec {
    Auto,
    Explicit { t_max: f64, points: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    pub period: f64,
    pub enabled: bool,
}

/// Per-series parameter overrides.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SeriesSpec {
    pub label: String,
    pub h: Option<f64>,
    pub temperature: Option<f64>,
    pub state: Option<(f64, f64, f64)>,
    pub period: Option<f64>,
    pub pulses_enabled: Option<bool>,
}

/// Fully resolved sweep description. All defaults are materialized:
/// `j = 1`, `f = 0`, Boltzmann constant 1 (temperatures convert to
/// `beta = 1/T`), threshold `1e-6`, grid auto.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub n_spins: usize,
    pub h: f64,
    pub j: f64,
    pub epsilon: f64,
    pub f: f64,
    pub temperature: f64,
    pub state: Option<(f64, f64, f64)>,
    pub grid: GridSpec,
    pub pulses: Option<PulseSpec>,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub observable: Observable,
    pub threshold: f64,
    pub series: Vec<SeriesSpec>,
}

impl SweepSpec {
    /// The series list actually run: the configured ones, or a single
    /// anonymous series named `value`.
    pub fn effective_series(&self) -> Vec<SeriesSpec> {
        if self.series.is_empty() {
            vec![SeriesSpec { label: "value".into(), ..Default::default() }]
        } else {
            self.series.clone()
        }
    }

    /// Cross-field validation; resolves nothing, only rejects.
    pub fn validate(&self) -> Result<()> {
        // base parameters must already form a valid model
        BathParams::with_temperature(
            self.n_spins,
            self.h,
            self.j,
            self.epsilon,
            self.f,
            self.temperature,
        )?;
        if let Some((c1, c2, c3)) = self.state {
            BellDiagonalState::new(c1, c2, c3)?;
        }
        if self.values.is_empty() {
            return Err(Error::Config("[sweep] values: list must not be empty".into()));
        }
        if !(self.threshold >= 0.0) {
            return Err(Error::Config(format!(
                "[sweep] threshold: must be nonnegative, got {}",
                self.threshold
            )));
        }
        if let GridSpec::Explicit { t_max, points } = self.grid {
            TimeGrid::uniform(t_max, points)?;
        }
        if let Some(p) = self.pulses {
            if p.enabled {
                PulseConfig::with_period(p.period)?;
            }
        }
        for v in &self.values {
            match self.axis {
                SweepAxis::Field => {
                    if !v.is_finite() {
                        return Err(Error::Config(format!(
                            "[sweep] values: field must be finite, got {v}"
                        )));
                    }
                }
                SweepAxis::Temperature => {
                    if !(*v > 0.0) {
                        return Err(Error::Config(format!(
                            "[sweep] values: temperature must be positive, got {v}"
                        )));
                    }
                }
                SweepAxis::BathSize => {
                    if v.fract() != 0.0 || *v < 2.0 || (*v as u64) % 2 != 0 {
                        return Err(Error::Config(format!(
                            "[sweep] values: bath size must be a positive even integer, got {v}"
                        )));
                    }
                }
                SweepAxis::PulsePeriod => {
                    if !(*v > 0.0) {
                        return Err(Error::Config(format!(
                            "[sweep] values: pulse period must be positive, got {v}"
                        )));
                    }
                }
            }
        }
        for s in &self.series {
            if let Some(t) = s.temperature {
                if !(t > 0.0) {
                    return Err(Error::Config(format!(
                        "[series] {}: temperature must be positive, got {t}",
                        s.label
                    )));
                }
            }
            if let Some((c1, c2, c3)) = s.state {
                BellDiagonalState::new(c1, c2, c3).map_err(|e| {
                    Error::Config(format!("[series] {}: {e}", s.label))
                })?;
            }
            if let Some(p) = s.period {
                PulseConfig::with_period(p).map_err(|e| {
                    Error::Config(format!("[series] {}: {e}", s.label))
                })?;
            }
        }
        if self.observable == Observable::Quantumness && self.state.is_none() {
            let every_series_has_state =
                !self.series.is_empty() && self.series.iter().all(|s| s.state.is_some());
            if !every_series_has_state {
                return Err(Error::Config(
                    "observable 'quantumness' requires an initial [state] \
                     (or c1, c2, c3 in every [series])"
                        .into(),
                ));
            }
        }
        Ok(())
    }
}

/// One point of a sweep, fully resolved.
struct PointSetup {
    params: BathParams,
    pulses: PulseConfig,
    state: Option<BellDiagonalState>,
    grid: TimeGrid,
    threshold: f64,
}

fn resolve_point(spec: &SweepSpec, series: &SeriesSpec, axis_value: f64) -> Result<PointSetup> {
    let mut n_spins = spec.n_spins;
    let mut h = series.h.unwrap_or(spec.h);
    let mut temperature = series.temperature.unwrap_or(spec.temperature);
    let mut pulse_period = series.period.or(spec.pulses.map(|p| p.period));
    let mut pulses_on = series
        .pulses_enabled
        .or(spec.pulses.map(|p| p.enabled))
        .unwrap_or(false)
        || series.period.is_some() && series.pulses_enabled != Some(false);
    match spec.axis {
        SweepAxis::Field => h = axis_value,
        SweepAxis::Temperature => temperature = axis_value,
        SweepAxis::BathSize => n_spins = axis_value as usize,
        SweepAxis::PulsePeriod => {
            pulse_period = Some(axis_value);
            pulses_on = series.pulses_enabled != Some(false);
        }
    }
    let params =
        BathParams::with_temperature(n_spins, h, spec.j, spec.epsilon, spec.f, temperature)?;
    let pulses = if pulses_on {
        let period = pulse_period.ok_or_else(|| {
            Error::Config(format!(
                "[series] {}: pulses enabled but no period given",
                series.label
            ))
        })?;
        PulseConfig::with_period(period)?
    } else {
        PulseConfig::off()
    };
    let state = match series.state.or(spec.state) {
        Some((c1, c2, c3)) => Some(BellDiagonalState::new(c1, c2, c3)?),
        None => None,
    };
    let grid = match spec.grid {
        GridSpec::Auto => TimeGrid::default_for(&params),
        GridSpec::Explicit { t_max, points } => TimeGrid::uniform(t_max, points)?,
    };
    Ok(PointSetup { params, pulses, state, grid, threshold: spec.threshold })
}

fn evaluate_point(spec: &SweepSpec, setup: &PointSetup) -> Result<Vec<f64>> {
    let traj = trajectory(&setup.params, &setup.grid, &setup.pulses)?;
    match spec.observable {
        Observable::Echo => Ok(traj.loschmidt_echo().to_vec()),
        Observable::Quantumness => {
            let state = setup.state.as_ref().ok_or_else(|| {
                Error::Config("quantumness observable requires an initial state".into())
            })?;
            Ok(quantumness_series(state, traj.magnitude()))
        }
        Observable::NQ => Ok(vec![n_q(traj.loschmidt_echo(), setup.threshold)]),
        Observable::IQ => Ok(vec![i_q(n_q(traj.loschmidt_echo(), setup.threshold))?]),
        Observable::NormalizedN => {
            // with an explicit initial state the quantumness series is
            // used; otherwise the maximally entangled probe, Q = sqrt(L)
            let q = match &setup.state {
                Some(state) => quantumness_series(state, traj.magnitude()),
                None => traj.magnitude().to_vec(),
            };
            Ok(vec![normalized_n(&q, setup.threshold)?])
        }
    }
}

/// Results for one axis value across all series.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisGroup {
    pub axis_value: f64,
    /// Sample times; `None` for scalar observables.
    pub times: Option<Vec<f64>>,
    /// One value vector per series (length = samples, or 1 for scalars);
    /// empty when that series failed at this axis value.
    pub values: Vec<Vec<f64>>,
    /// Per-series failure messages.
    pub errors: Vec<Option<String>>,
}

/// Assembled sweep output, ordered by axis value then time.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub axis: SweepAxis,
    pub observable: Observable,
    pub series_labels: Vec<String>,
    pub groups: Vec<AxisGroup>,
}

/// Runs every (axis value, series) point of the sweep in parallel and
/// gathers the observable values into a [`ResultTable`]. Point failures
/// are recorded in the table; the run continues.
pub fn run_sweep(spec: &SweepSpec) -> Result<ResultTable> {
    spec.validate()?;
    let series = spec.effective_series();
    let n_series = series.len();

    let jobs: Vec<(usize, usize)> = (0..spec.values.len())
        .flat_map(|a| (0..n_series).map(move |s| (a, s)))
        .collect();
    let outcomes: Vec<std::result::Result<Vec<f64>, String>> = jobs
        .par_iter()
        .map(|&(a, s)| {
            resolve_point(spec, &series[s], spec.values[a])
                .and_then(|setup| evaluate_point(spec, &setup))
                .map_err(|e| e.to_string())
        })
        .collect();

    let mut groups = Vec::with_capacity(spec.values.len());
    let mut outcome_iter = outcomes.into_iter();
    for &axis_value in &spec.values {
        let times = if spec.observable.is_series() {
            Some(resolve_point(spec, &series[0], axis_value)?.grid.samples().to_vec())
        } else {
            None
        };
        let mut values = Vec::with_capacity(n_series);
        let mut errors = Vec::with_capacity(n_series);
        for _ in 0..n_series {
            match outcome_iter.next().expect("one outcome per job") {
                Ok(v) => {
                    values.push(v);
                    errors.push(None);
                }
                Err(msg) => {
                    values.push(Vec::new());
                    errors.push(Some(msg));
                }
            }
        }
        groups.push(AxisGroup { axis_value, times, values, errors });
    }
    Ok(ResultTable {
        axis: spec.axis,
        observable: spec.observable,
        series_labels: series.iter().map(|s| s.label.clone()).collect(),
        groups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn minimal_spec() -> SweepSpec {
        SweepSpec {
            n_spins: 8,
            h: 0.5,
            j: 1.0,
            epsilon: 0.0,
            f: 0.0,
            temperature: 1.0,
            state: None,
            grid: GridSpec::Explicit { t_max: 2.0, points: 5 },
            pulses: None,
            axis: SweepAxis::Field,
            values: vec![0.1],
            observable: Observable::Echo,
            threshold: DEFAULT_THRESHOLD,
            series: vec![],
        }
    }

    #[test]
    fn decoupled_echo_is_flat_one() {
        let table = run_sweep(&minimal_spec()).unwrap();
        assert_eq!(table.groups.len(), 1);
        let g = &table.groups[0];
        assert_eq!(g.values[0].len(), 5);
        for v in &g.values[0] {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-12);
        }
        assert!(g.errors[0].is_none());
    }

    #[test]
    fn series_row_count_matches_axis_times_samples() {
        let mut spec = minimal_spec();
        spec.epsilon = 0.2;
        spec.values = vec![0.4, 0.8, 1.2];
        let table = run_sweep(&spec).unwrap();
        let rows: usize = table.groups.iter().map(|g| g.times.as_ref().unwrap().len()).sum();
        assert_eq!(rows, 3 * 5);
    }

    #[test]
    fn scalar_observable_gives_one_row_per_axis_value() {
        let mut spec = minimal_spec();
        spec.epsilon = 0.3;
        spec.observable = Observable::NormalizedN;
        spec.values = vec![0.5, 1.0];
        spec.grid = GridSpec::Explicit { t_max: 16.0, points: 321 };
        let table = run_sweep(&spec).unwrap();
        assert_eq!(table.groups.len(), 2);
        for g in &table.groups {
            assert!(g.times.is_none());
            assert_eq!(g.values[0].len(), 1);
            let v = g.values[0][0];
            assert!((0.0..=1.0).contains(&v), "normalized measure {v} out of range");
        }
    }

    #[test]
    fn bath_size_axis_rejects_odd_values() {
        let mut spec = minimal_spec();
        spec.axis = SweepAxis::BathSize;
        spec.values = vec![100.0, 101.0];
        assert!(run_sweep(&spec).is_err());
    }

    #[test]
    fn quantumness_requires_a_state() {
        let mut spec = minimal_spec();
        spec.observable = Observable::Quantumness;
        assert!(spec.validate().is_err());
        spec.state = Some((0.6, 0.6, 0.8));
        assert!(spec.validate().is_ok());
    }

    #[test]
    fn series_overrides_apply() {
        let mut spec = minimal_spec();
        spec.epsilon = 0.2;
        spec.observable = Observable::Quantumness;
        spec.grid = GridSpec::Explicit { t_max: 4.0, points: 9 };
        spec.series = vec![
            SeriesSpec {
                label: "cold".into(),
                temperature: Some(0.001),
                state: Some((1.0, -1.0, 1.0)),
                ..Default::default()
            },
            SeriesSpec {
                label: "hot".into(),
                temperature: Some(5.0),
                state: Some((1.0, -1.0, 1.0)),
                ..Default::default()
            },
        ];
        let table = run_sweep(&spec).unwrap();
        assert_eq!(table.series_labels, vec!["cold", "hot"]);
        let g = &table.groups[0];
        // hotter bath dephases faster: quantumness at the last sample is lower
        let cold_final = *g.values[0].last().unwrap();
        let hot_final = *g.values[1].last().unwrap();
        assert!(hot_final < cold_final, "hot {hot_final} vs cold {cold_final}");
    }

    #[test]
    fn pulse_period_axis_enables_pulses() {
        let mut spec = minimal_spec();
        spec.epsilon = 0.25;
        spec.h = 1.0;
        spec.axis = SweepAxis::PulsePeriod;
        spec.values = vec![0.1, 0.4];
        spec.observable = Observable::Echo;
        spec.grid = GridSpec::Explicit { t_max: 10.0, points: 201 };
        let table = run_sweep(&spec).unwrap();
        // faster pulses protect better
        let final_01 = *table.groups[0].values[0].last().unwrap();
        let final_04 = *table.groups[1].values[0].last().unwrap();
        assert!(final_01 > final_04, "{final_01} vs {final_04}");
    }

    #[test]
    fn auto_grid_scales_with_bath_size() {
        let mut spec = minimal_spec();
        spec.axis = SweepAxis::BathSize;
        spec.values = vec![10.0, 20.0];
        spec.grid = GridSpec::Auto;
        let table = run_sweep(&spec).unwrap();
        let len0 = table.groups[0].times.as_ref().unwrap().len();
        let len1 = table.groups[1].times.as_ref().unwrap().len();
        assert_eq!(len0, 400);
        assert_eq!(len1, 800);
    }

    #[test]
    fn repeated_runs_are_identical() {
        let mut spec = minimal_spec();
        spec.epsilon = 0.15;
        spec.values = vec![0.7, 1.0, 1.3];
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        assert_eq!(a, b);
    }
}
