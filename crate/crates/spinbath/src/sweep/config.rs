//! The sweep configuration format.
//!
//! Flat `key = value` pairs under bracketed sections, `#` starts a
//! comment, all keys lower_snake_case:
//!
//! ```text
//! [bath]                  # required: n_spins, h, epsilon, temperature
//! n_spins = 1200          # defaults: j = 1, f = 0
//! h = 1.0
//! j = 1.0
//! epsilon = 0.05
//! f = 0.0
//! temperature = 0.5       # Boltzmann constant 1; beta = 1/temperature
//!
//! [state]                 # optional initial system-ancilla state
//! c1 = 0.9
//! c2 = 0.3
//! c3 = 0.5
//!
//! [grid]                  # optional; default auto (t_max = 2N/J,
//! t_max = 50.0            # 20 samples per unit Jt)
//! points = 2001
//!
//! [pulses]                # optional; omitted means no pulses
//! period = 0.1
//! enabled = true
//!
//! [sweep]                 # required: axis, observable, values or range
//! axis = h                # h | temperature | n_spins | pulse_period
//! values = 0.1, 1.0, 2.0  # or: range = start, stop, count
//! observable = quantumness
//! threshold = 1e-6
//!
//! [series]                # zero or more labelled parameter overrides
//! label = T=0.5
//! temperature = 0.5       # overridable: h, temperature, c1/c2/c3,
//! ```                     # period, pulses = on|off
//!
//! [`metadata_string`] renders a resolved [`SweepSpec`] back into this
//! format; parsing that text reproduces the spec exactly.

use super::{
    GridSpec, Observable, PulseSpec, SeriesSpec, SweepAxis, SweepSpec, DEFAULT_THRESHOLD,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Bath,
    State,
    Grid,
    Pulses,
    Sweep,
    Series,
}

impl Section {
    fn name(&self) -> &'static str {
        match self {
            Section::Bath => "bath",
            Section::State => "state",
            Section::Grid => "grid",
            Section::Pulses => "pulses",
            Section::Sweep => "sweep",
            Section::Series => "series",
        }
    }
}

#[derive(Default)]
struct RawSeries {
    label: Option<String>,
    h: Option<f64>,
    temperature: Option<f64>,
    c1: Option<f64>,
    c2: Option<f64>,
    c3: Option<f64>,
    period: Option<f64>,
    pulses: Option<bool>,
}

#[derive(Default)]
struct Builder {
    n_spins: Option<usize>,
    h: Option<f64>,
    j: Option<f64>,
    epsilon: Option<f64>,
    f: Option<f64>,
    temperature: Option<f64>,
    c1: Option<f64>,
    c2: Option<f64>,
    c3: Option<f64>,
    state_section: bool,
    t_max: Option<f64>,
    points: Option<usize>,
    grid_auto: Option<bool>,
    pulse_period: Option<f64>,
    pulse_enabled: Option<bool>,
    pulses_section: bool,
    axis: Option<SweepAxis>,
    values: Option<Vec<f64>>,
    range: Option<(f64, f64, usize)>,
    observable: Option<Observable>,
    threshold: Option<f64>,
    series: Vec<RawSeries>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_f64(value: &str, key: &str, line: usize) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("key '{key}': expected a number, got '{value}'")))
}

fn parse_usize(value: &str, key: &str, line: usize) -> Result<usize> {
    value.parse::<usize>().map_err(|_| {
        parse_err(line, format!("key '{key}': expected a nonnegative integer, got '{value}'"))
    })
}

fn parse_bool(value: &str, key: &str, line: usize) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(parse_err(
            line,
            format!("key '{key}': expected true or false, got '{value}'"),
        )),
    }
}

fn parse_list(value: &str, key: &str, line: usize) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|item| parse_f64(item.trim(), key, line))
        .collect()
}

/// Parses a configuration document into a fully resolved [`SweepSpec`].
pub fn parse_config(text: &str) -> Result<SweepSpec> {
    let mut b = Builder::default();
    let mut section: Option<Section> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line_no, "unterminated section header"))?
                .trim();
            section = Some(match name {
                "bath" => Section::Bath,
                "state" => {
                    b.state_section = true;
                    Section::State
                }
                "grid" => Section::Grid,
                "pulses" => {
                    b.pulses_section = true;
                    Section::Pulses
                }
                "sweep" => Section::Sweep,
                "series" => {
                    b.series.push(RawSeries::default());
                    Section::Series
                }
                _ => return Err(parse_err(line_no, format!("unknown section [{name}]"))),
            });
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, format!("expected 'key = value', got '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let section = section
            .ok_or_else(|| parse_err(line_no, format!("key '{key}' appears before any section")))?;
        apply_key(&mut b, section, key, value, line_no)?;
    }
    finish(b)
}

fn apply_key(b: &mut Builder, section: Section, key: &str, value: &str, line: usize) -> Result<()> {
    match (section, key) {
        (Section::Bath, "n_spins") => b.n_spins = Some(parse_usize(value, key, line)?),
        (Section::Bath, "h") => b.h = Some(parse_f64(value, key, line)?),
        (Section::Bath, "j") => b.j = Some(parse_f64(value, key, line)?),
        (Section::Bath, "epsilon") => b.epsilon = Some(parse_f64(value, key, line)?),
        (Section::Bath, "f") => b.f = Some(parse_f64(value, key, line)?),
        (Section::Bath, "temperature") => b.temperature = Some(parse_f64(value, key, line)?),
        (Section::State, "c1") => b.c1 = Some(parse_f64(value, key, line)?),
        (Section::State, "c2") => b.c2 = Some(parse_f64(value, key, line)?),
        (Section::State, "c3") => b.c3 = Some(parse_f64(value, key, line)?),
        (Section::Grid, "t_max") => b.t_max = Some(parse_f64(value, key, line)?),
        (Section::Grid, "points") => b.points = Some(parse_usize(value, key, line)?),
        (Section::Grid, "auto") => b.grid_auto = Some(parse_bool(value, key, line)?),
        (Section::Pulses, "period") => b.pulse_period = Some(parse_f64(value, key, line)?),
        (Section::Pulses, "enabled") => b.pulse_enabled = Some(parse_bool(value, key, line)?),
        (Section::Sweep, "axis") => {
            b.axis = Some(SweepAxis::from_token(value).ok_or_else(|| {
                parse_err(
                    line,
                    format!(
                        "key 'axis': expected h, temperature, n_spins or pulse_period, \
                         got '{value}'"
                    ),
                )
            })?)
        }
        (Section::Sweep, "values") => b.values = Some(parse_list(value, key, line)?),
        (Section::Sweep, "range") => {
            let items = parse_list(value, key, line)?;
            if items.len() != 3 {
                return Err(parse_err(
                    line,
                    format!("key 'range': expected 'start, stop, count', got '{value}'"),
                ));
            }
            let count = items[2];
            if count.fract() != 0.0 || count < 2.0 {
                return Err(parse_err(
                    line,
                    format!("key 'range': count must be an integer >= 2, got {count}"),
                ));
            }
            b.range = Some((items[0], items[1], count as usize));
        }
        (Section::Sweep, "observable") => {
            b.observable = Some(Observable::from_token(value).ok_or_else(|| {
                parse_err(
                    line,
                    format!(
                        "key 'observable': expected echo, quantumness, n_q, i_q or \
                         normalized_n, got '{value}'"
                    ),
                )
            })?)
        }
        (Section::Sweep, "threshold") => b.threshold = Some(parse_f64(value, key, line)?),
        (Section::Series, _) => {
            let s = b.series.last_mut().expect("series section pushed on entry");
            match key {
                "label" => s.label = Some(value.to_string()),
                "h" => s.h = Some(parse_f64(value, key, line)?),
                "temperature" => s.temperature = Some(parse_f64(value, key, line)?),
                "c1" => s.c1 = Some(parse_f64(value, key, line)?),
                "c2" => s.c2 = Some(parse_f64(value, key, line)?),
                "c3" => s.c3 = Some(parse_f64(value, key, line)?),
                "period" => s.period = Some(parse_f64(value, key, line)?),
                "pulses" => {
                    s.pulses = Some(match value {
                        "on" => true,
                        "off" => false,
                        _ => {
                            return Err(parse_err(
                                line,
                                format!("key 'pulses': expected on or off, got '{value}'"),
                            ))
                        }
                    })
                }
                _ => {
                    return Err(parse_err(
                        line,
                        format!("unknown key '{key}' in [series]"),
                    ))
                }
            }
        }
        (section, key) => {
            return Err(parse_err(
                line,
                format!("unknown key '{key}' in [{}]", section.name()),
            ))
        }
    }
    Ok(())
}

fn series_state(s: &RawSeries, index: usize) -> Result<Option<(f64, f64, f64)>> {
    match (s.c1, s.c2, s.c3) {
        (Some(c1), Some(c2), Some(c3)) => Ok(Some((c1, c2, c3))),
        (None, None, None) => Ok(None),
        _ => Err(Error::Config(format!(
            "[series] #{index}: c1, c2 and c3 must be given together"
        ))),
    }
}

fn finish(b: Builder) -> Result<SweepSpec> {
    let mut missing = Vec::new();
    for (present, name) in [
        (b.n_spins.is_some(), "[bath] n_spins"),
        (b.h.is_some(), "[bath] h"),
        (b.epsilon.is_some(), "[bath] epsilon"),
        (b.temperature.is_some(), "[bath] temperature"),
        (b.axis.is_some(), "[sweep] axis"),
        (b.observable.is_some(), "[sweep] observable"),
        (b.values.is_some() || b.range.is_some(), "[sweep] values (or range)"),
    ] {
        if !present {
            missing.push(name);
        }
    }
    if !missing.is_empty() {
        return Err(Error::Config(format!(
            "missing required keys: {}",
            missing.join(", ")
        )));
    }
    if b.values.is_some() && b.range.is_some() {
        return Err(Error::Config(
            "[sweep] give either 'values' or 'range', not both".into(),
        ));
    }
    let values = match (b.values, b.range) {
        (Some(v), None) => v,
        (None, Some((start, stop, count))) => {
            let step = (stop - start) / (count - 1) as f64;
            let mut v: Vec<f64> = (0..count).map(|i| start + i as f64 * step).collect();
            v[count - 1] = stop;
            v
        }
        _ => unreachable!("checked above"),
    };
    let state = match (b.c1, b.c2, b.c3) {
        (Some(c1), Some(c2), Some(c3)) => Some((c1, c2, c3)),
        (None, None, None) if !b.state_section => None,
        _ => {
            return Err(Error::Config(
                "[state] requires all of c1, c2 and c3".into(),
            ))
        }
    };
    let grid = match (b.grid_auto, b.t_max, b.points) {
        (Some(true), None, None) | (None, None, None) => GridSpec::Auto,
        (None | Some(false), Some(t_max), Some(points)) => GridSpec::Explicit { t_max, points },
        _ => {
            return Err(Error::Config(
                "[grid] needs both t_max and points, or 'auto = true'".into(),
            ))
        }
    };
    let pulses = if b.pulses_section {
        let period = b.pulse_period.ok_or_else(|| {
            Error::Config("[pulses] requires a period".into())
        })?;
        Some(PulseSpec { period, enabled: b.pulse_enabled.unwrap_or(true) })
    } else {
        None
    };
    let series = b
        .series
        .iter()
        .enumerate()
        .map(|(i, s)| {
            Ok(SeriesSpec {
                label: s.label.clone().unwrap_or_else(|| format!("series{}", i + 1)),
                h: s.h,
                temperature: s.temperature,
                state: series_state(s, i + 1)?,
                period: s.period,
                pulses_enabled: s.pulses,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let spec = SweepSpec {
        n_spins: b.n_spins.unwrap(),
        h: b.h.unwrap(),
        j: b.j.unwrap_or(1.0),
        epsilon: b.epsilon.unwrap(),
        f: b.f.unwrap_or(0.0),
        temperature: b.temperature.unwrap(),
        state,
        grid,
        pulses,
        axis: b.axis.unwrap(),
        values,
        observable: b.observable.unwrap(),
        threshold: b.threshold.unwrap_or(DEFAULT_THRESHOLD),
        series,
    };
    spec.validate()?;
    Ok(spec)
}

fn fmt(x: f64) -> String {
    // shortest representation that round-trips
    format!("{x:?}")
}

/// Renders a resolved spec in the configuration format, prefixed with the
/// artifact version. Parsing the output reproduces the spec.
pub fn metadata_string(spec: &SweepSpec, version: &str) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "# spinbath {version} resolved sweep configuration");
    let _ = writeln!(out, "[bath]");
    let _ = writeln!(out, "n_spins = {}", spec.n_spins);
    let _ = writeln!(out, "h = {}", fmt(spec.h));
    let _ = writeln!(out, "j = {}", fmt(spec.j));
    let _ = writeln!(out, "epsilon = {}", fmt(spec.epsilon));
    let _ = writeln!(out, "f = {}", fmt(spec.f));
    let _ = writeln!(out, "temperature = {}", fmt(spec.temperature));
    if let Some((c1, c2, c3)) = spec.state {
        let _ = writeln!(out, "\n[state]");
        let _ = writeln!(out, "c1 = {}", fmt(c1));
        let _ = writeln!(out, "c2 = {}", fmt(c2));
        let _ = writeln!(out, "c3 = {}", fmt(c3));
    }
    match spec.grid {
        GridSpec::Auto => {
            let _ = writeln!(out, "\n[grid]");
            let _ = writeln!(out, "auto = true");
        }
        GridSpec::Explicit { t_max, points } => {
            let _ = writeln!(out, "\n[grid]");
            let _ = writeln!(out, "t_max = {}", fmt(t_max));
            let _ = writeln!(out, "points = {points}");
        }
    }
    if let Some(p) = spec.pulses {
        let _ = writeln!(out, "\n[pulses]");
        let _ = writeln!(out, "period = {}", fmt(p.period));
        let _ = writeln!(out, "enabled = {}", p.enabled);
    }
    let _ = writeln!(out, "\n[sweep]");
    let _ = writeln!(out, "axis = {}", spec.axis.token());
    let values: Vec<String> = spec.values.iter().map(|&v| fmt(v)).collect();
    let _ = writeln!(out, "values = {}", values.join(", "));
    let _ = writeln!(out, "observable = {}", spec.observable.token());
    let _ = writeln!(out, "threshold = {}", fmt(spec.threshold));
    for s in &spec.series {
        let _ = writeln!(out, "\n[series]");
        let _ = writeln!(out, "label = {}", s.label);
        if let Some(h) = s.h {
            let _ = writeln!(out, "h = {}", fmt(h));
        }
        if let Some(t) = s.temperature {
            let _ = writeln!(out, "temperature = {}", fmt(t));
        }
        if let Some((c1, c2, c3)) = s.state {
            let _ = writeln!(out, "c1 = {}", fmt(c1));
            let _ = writeln!(out, "c2 = {}", fmt(c2));
            let _ = writeln!(out, "c3 = {}", fmt(c3));
        }
        if let Some(p) = s.period {
            let _ = writeln!(out, "period = {}", fmt(p));
        }
        if let Some(enabled) = s.pulses_enabled {
            let _ = writeln!(out, "pulses = {}", if enabled { "on" } else { "off" });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "
[bath]
n_spins = 8
h = 0.5
epsilon = 0.1
temperature = 1.0

[sweep]
axis = h
values = 0.5, 1.0
observable = echo
";

    #[test]
    fn minimal_document_with_defaults() {
        let spec = parse_config(MINIMAL).unwrap();
        assert_eq!(spec.n_spins, 8);
        assert_eq!(spec.j, 1.0);
        assert_eq!(spec.f, 0.0);
        assert_eq!(spec.threshold, DEFAULT_THRESHOLD);
        assert_eq!(spec.grid, GridSpec::Auto);
        assert_eq!(spec.values, vec![0.5, 1.0]);
        assert!(spec.series.is_empty());
    }

    #[test]
    fn empty_document_lists_required_keys() {
        let err = parse_config("").unwrap_err().to_string();
        for needle in [
            "[bath] n_spins",
            "[bath] h",
            "[bath] epsilon",
            "[bath] temperature",
            "[sweep] axis",
            "[sweep] observable",
            "[sweep] values",
        ] {
            assert!(err.contains(needle), "missing '{needle}' in: {err}");
        }
    }

    #[test]
    fn unknown_key_is_rejected_with_line_number() {
        // MINIMAL spans lines 1-11, the blank joiner is 12, [bath] is 13
        let doc = format!("{MINIMAL}\n[bath]\nbogus = 1\n");
        let err = parse_config(&doc).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus"), "{msg}");
        assert!(msg.contains("line 14"), "{msg}");
    }

    #[test]
    fn unknown_section_is_rejected() {
        let doc = format!("{MINIMAL}\n[extras]\nx = 1\n");
        assert!(parse_config(&doc).unwrap_err().to_string().contains("[extras]"));
    }

    #[test]
    fn key_outside_section_is_rejected() {
        let err = parse_config("n_spins = 8\n").unwrap_err().to_string();
        assert!(err.contains("before any section"), "{err}");
    }

    #[test]
    fn range_resolves_inclusive_endpoints() {
        let doc = MINIMAL.replace("values = 0.5, 1.0", "range = 0.5, 1.5, 101");
        let spec = parse_config(&doc).unwrap();
        assert_eq!(spec.values.len(), 101);
        assert_eq!(spec.values[0], 0.5);
        assert_eq!(spec.values[100], 1.5);
        assert!((spec.values[1] - 0.51).abs() < 1e-12);
    }

    #[test]
    fn values_and_range_conflict() {
        let doc = format!("{MINIMAL}\n[sweep]\nrange = 0.0, 1.0, 5\n");
        assert!(parse_config(&doc).is_err());
    }

    #[test]
    fn partial_state_is_rejected() {
        let doc = format!("{MINIMAL}\n[state]\nc1 = 0.5\n");
        let err = parse_config(&doc).unwrap_err().to_string();
        assert!(err.contains("c1, c2 and c3") || err.contains("all of"), "{err}");
    }

    #[test]
    fn odd_bath_size_axis_value_is_rejected() {
        let doc = MINIMAL
            .replace("axis = h", "axis = n_spins")
            .replace("values = 0.5, 1.0", "values = 100, 101");
        assert!(parse_config(&doc).is_err());
    }

    #[test]
    fn quantumness_without_state_is_rejected() {
        let doc = MINIMAL.replace("observable = echo", "observable = quantumness");
        let err = parse_config(&doc).unwrap_err().to_string();
        assert!(err.contains("state"), "{err}");
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let doc = format!("# leading comment\n\n{MINIMAL}  # trailing\n");
        assert!(parse_config(&doc).is_ok());
    }

    #[test]
    fn metadata_round_trips() {
        let doc = format!(
            "{MINIMAL}
[state]
c1 = 0.9
c2 = 0.3
c3 = 0.5

[grid]
t_max = 50.0
points = 2001

[pulses]
period = 0.1

[series]
label = cold T=1e-3
temperature = 0.001
pulses = off

[series]
label = warm
temperature = 0.9
period = 0.4
"
        );
        let spec = parse_config(&doc).unwrap();
        let meta = metadata_string(&spec, "0.1.0");
        let reparsed = parse_config(&meta).unwrap();
        assert_eq!(spec, reparsed);
    }

    #[test]
    fn metadata_round_trips_auto_grid_and_awkward_floats() {
        let doc = MINIMAL.replace("values = 0.5, 1.0", "range = 0.1, 0.30000000000000004, 7");
        let spec = parse_config(&doc).unwrap();
        let reparsed = parse_config(&metadata_string(&spec, "x")).unwrap();
        assert_eq!(spec, reparsed);
    }
}
