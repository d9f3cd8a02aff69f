//! Revival detection and non-Markovianity measures.
//!
//! A monotone decay of the echo (or of any quantumness series) signals
//! memoryless dynamics; every rebound is backflow. Three numbers
//! summarize a series:
//!
//! * [`n_q`] — the total rebound of `√L` summed over all (min, max)
//!   pairs of its local extrema,
//! * [`i_q`] — the normalization `n_q / (n_q + 1)` mapping `[0, ∞)` onto
//!   `[0, 1)`,
//! * [`normalized_n`] — the largest recovered fraction
//!   `(Q(t_max) − Q(t_min)) / (Q(0) − Q(t_min))` over all pairs with the
//!   maximum after the minimum.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Minimum,
    Maximum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub time: f64,
    pub value: f64,
    pub kind: ExtremumKind,
}

/// Ordered local extrema of a sampled series, plus its initial value.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremaList {
    pub initial: f64,
    pub events: Vec<Extremum>,
}

// (plateau start, plateau end, value, kind) in sample indices
type IndexedEvent = (usize, usize, f64, ExtremumKind);

/// Core detector on raw samples. A candidate extremum is confirmed only
/// once the series moves the other way by more than `threshold`; exact
/// plateaus extend the candidate and are later collapsed to their
/// midpoint. The first sample is never an extremum; the final sample
/// closes a confirmed rise still in progress, and an unfinished fall is
/// dropped.
fn extrema_indices(values: &[f64], threshold: f64) -> Vec<IndexedEvent> {
    let n = values.len();
    if n < 3 {
        return Vec::new();
    }
    let mut events = Vec::new();
    let mut trend: i8 = 0;
    let (mut cs, mut ce, mut cv) = (0usize, 0usize, values[0]);
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > cv {
            if trend == 1 {
                (cs, ce, cv) = (i, i, v);
            } else if v - cv > threshold {
                if trend == -1 && cs > 0 {
                    events.push((cs, ce, cv, ExtremumKind::Minimum));
                }
                trend = 1;
                (cs, ce, cv) = (i, i, v);
            }
        } else if v < cv {
            if trend == -1 {
                (cs, ce, cv) = (i, i, v);
            } else if cv - v > threshold {
                if trend == 1 && cs > 0 {
                    events.push((cs, ce, cv, ExtremumKind::Maximum));
                }
                trend = -1;
                (cs, ce, cv) = (i, i, v);
            }
        } else if ce == i - 1 {
            ce = i;
        }
    }
    if trend == 1 && cs > 0 {
        events.push((cs, ce, cv, ExtremumKind::Maximum));
    }
    events
}

/// Local extrema of `values` sampled at `times`.
pub fn find_extrema(times: &[f64], values: &[f64], threshold: f64) -> Result<ExtremaList> {
    if times.len() != values.len() {
        return Err(Error::Config(format!(
            "times ({}) and values ({}) must have the same length",
            times.len(),
            values.len()
        )));
    }
    if threshold < 0.0 {
        return Err(Error::Config(format!(
            "threshold must be nonnegative, got {threshold}"
        )));
    }
    let events = extrema_indices(values, threshold)
        .into_iter()
        .map(|(s, e, value, kind)| Extremum {
            time: 0.5 * (times[s] + times[e]),
            value,
            kind,
        })
        .collect();
    Ok(ExtremaList {
        initial: values.first().copied().unwrap_or(f64::NAN),
        events,
    })
}

/// Total quantumness backflow of the maximally entangled probe: the sum
/// of `√L(t_max) − √L(t_min)` over successive (min, max) pairs of the
/// extrema of `√L`.
pub fn n_q(echo: &[f64], threshold: f64) -> f64 {
    let sqrt_l: Vec<f64> = echo.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let mut total = 0.0;
    let mut pending_min: Option<f64> = None;
    for (_, _, value, kind) in extrema_indices(&sqrt_l, threshold) {
        match kind {
            ExtremumKind::Minimum => pending_min = Some(value),
            ExtremumKind::Maximum => {
                if let Some(min) = pending_min.take() {
                    total += value - min;
                }
            }
        }
    }
    total
}

/// `n_q / (n_q + 1)`: zero for no backflow, approaching one as the total
/// backflow diverges.
pub fn i_q(nq: f64) -> Result<f64> {
    if !(nq >= 0.0) {
        return Err(Error::Config(format!("n_q must be nonnegative, got {nq}")));
    }
    Ok(nq / (nq + 1.0))
}

/// Largest recovered fraction of previously lost quantumness:
/// `max over pairs (Q(t_j^max) − Q(t_i^min)) / (Q(0) − Q(t_i^min))` with
/// `t_j ≥ t_i`, every minimum paired with all later maxima. Pairs whose
/// denominator is below 1e−12 are skipped; the result is clamped to
/// `[0, 1]` and is zero when there are no extrema.
pub fn normalized_n(q_series: &[f64], threshold: f64) -> Result<f64> {
    let q0 = match q_series.first() {
        Some(&q) if q > 0.0 => q,
        Some(&q) => {
            return Err(Error::Config(format!(
                "normalized measure needs Q(0) > 0, got {q}"
            )))
        }
        None => return Err(Error::Config("empty quantumness series".into())),
    };
    let events = extrema_indices(q_series, threshold);
    let mut best = 0.0_f64;
    for (i, &(_, _, q_min, kind)) in events.iter().enumerate() {
        if kind != ExtremumKind::Minimum {
            continue;
        }
        let denom = q0 - q_min;
        if denom <= 1e-12 {
            continue;
        }
        for &(_, _, q_max, kind_j) in &events[i + 1..] {
            if kind_j == ExtremumKind::Maximum {
                best = best.max((q_max - q_min) / denom);
            }
        }
    }
    Ok(best.clamp(0.0, 1.0))
}
