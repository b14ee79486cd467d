//! Sectioned `key = value` configuration files.
//!
//! ```text
//! [interferometer]
//! channel = squeezing
//! r = 1.0
//! theta = pi/8
//! optimal_phases = true
//!
//! [sweep]
//! theta = linspace(0, pi/2, 50)
//!
//! [output]
//! outputs = h_numeric, h_closed, f0
//! path = theta.csv
//! ```
//!
//! Numbers may be written as products and quotients of decimal literals
//! and `pi`. `#` starts a comment.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use su11_core::gw::{GwDetectorParams, Resonance, DEFAULT_RESONANCE_TOL, HBAR};
use su11_core::metrology::{TurningMode, DEFAULT_SENSITIVITY_EPS0};
use su11_core::{ChannelKind, ChannelSpec, InterferometerConfig, Regime};

use crate::error::{CliError, Result};

pub const DEFAULT_STEP: f64 = su11_core::diff::DEFAULT_STEP;
pub const DEFAULT_MAX_POINTS: usize = 1_000_000;
pub const DEFAULT_TOTAL_PARTICLES: f64 = 1e6;

/// Interferometer parameters as written in the config file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferometerParams {
    pub channel: ChannelKind,
    pub strength: f64,
    pub channel_phase: f64,
    pub epsilon: f64,
    pub total_particles: f64,
    pub r: f64,
    pub theta: f64,
    pub pump_phase: f64,
    pub squeezing_phase: f64,
    pub tritter_phase: f64,
}

impl InterferometerParams {
    pub fn new(channel: ChannelKind) -> Self {
        Self {
            channel,
            strength: 1.0,
            channel_phase: 0.0,
            epsilon: 0.0,
            total_particles: DEFAULT_TOTAL_PARTICLES,
            r: 0.0,
            theta: 0.0,
            pump_phase: 0.0,
            squeezing_phase: 0.0,
            tritter_phase: 0.0,
        }
    }

    pub fn config(&self) -> su11_core::Result<InterferometerConfig> {
        let config = InterferometerConfig {
            total_particles: self.total_particles,
            pump_phase: self.pump_phase,
            squeezing: self.r,
            squeezing_phase: self.squeezing_phase,
            tritter_angle: self.theta,
            tritter_phase: self.tritter_phase,
            channel: ChannelSpec::new(self.channel, self.strength, self.channel_phase, self.epsilon)?,
        };
        config.validate()?;
        Ok(config)
    }

    fn field_mut(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "strength" => &mut self.strength,
            "channel_phase" => &mut self.channel_phase,
            "epsilon" => &mut self.epsilon,
            "total_particles" => &mut self.total_particles,
            "r" => &mut self.r,
            "theta" => &mut self.theta,
            "pump_phase" => &mut self.pump_phase,
            "squeezing_phase" => &mut self.squeezing_phase,
            "tritter_phase" => &mut self.tritter_phase,
            _ => return None,
        })
    }
}

fn gw_field_mut<'a>(p: &'a mut GwDetectorParams, name: &str) -> Option<&'a mut f64> {
    Some(match name {
        "omega_n" => &mut p.omega_n,
        "omega_m" => &mut p.omega_m,
        "sound_speed" => &mut p.sound_speed,
        "atom_mass" => &mut p.atom_mass,
        "hbar" => &mut p.hbar,
        "t" => &mut p.t,
        "epsilon" => &mut p.epsilon,
        "omega_gw" => &mut p.omega_gw,
        "resonance_tol" => &mut p.resonance_tol,
        "total_particles" => &mut p.total_particles,
        "r" => &mut p.squeezing,
        "theta" => &mut p.tritter_angle,
        "pump_phase" => &mut p.pump_phase,
        "squeezing_phase" => &mut p.squeezing_phase,
        "tritter_phase" => &mut p.tritter_phase,
        "channel_phase" => &mut p.channel_phase,
        "n_detectors" => &mut p.n_detectors,
        "tau" => &mut p.tau,
        _ => return None,
    })
}

/// The physical system being evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Base {
    Interferometer(InterferometerParams),
    Gw(GwDetectorParams),
}

impl Base {
    fn field_mut(&mut self, name: &str) -> Option<&mut f64> {
        match self {
            Base::Interferometer(p) => p.field_mut(name),
            Base::Gw(p) => gw_field_mut(p, name),
        }
    }

    pub fn is_gw(&self) -> bool {
        matches!(self, Base::Gw(_))
    }
}

/// Step sizes and evaluation points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    pub fd_step: f64,
    /// ε at which the QFI is evaluated.
    pub qfi_eps0: f64,
    /// ε at which the number-sum sensitivity is evaluated.
    pub eps0: f64,
    pub max_points: usize,
    pub workers: Option<usize>,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            fd_step: DEFAULT_STEP,
            qfi_eps0: 0.0,
            eps0: DEFAULT_SENSITIVITY_EPS0,
            max_points: DEFAULT_MAX_POINTS,
            workers: None,
        }
    }
}

impl Numerics {
    fn field_mut(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "fd_step" => &mut self.fd_step,
            "qfi_eps0" => &mut self.qfi_eps0,
            "eps0" => &mut self.eps0,
            _ => return None,
        })
    }
}

/// Quantities a row can report, in column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Output {
    HNumeric,
    HClosed,
    F0,
    Moments,
    ThetaT,
    Comparison,
    Qcrb,
}

impl Output {
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Output::HNumeric => &["H_numeric"],
            Output::HClosed => &["H_closed"],
            Output::F0 => &["F0"],
            Output::Moments => &["mean_S", "var_S"],
            Output::ThetaT => &["theta_t"],
            Output::Comparison => &["H_original", "H_pumped", "ratio"],
            Output::Qcrb => &["delta_eps"],
        }
    }

    fn needs_gw(self) -> bool {
        matches!(self, Output::Comparison | Output::Qcrb)
    }
}

impl FromStr for Output {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "h_numeric" => Output::HNumeric,
            "h_closed" => Output::HClosed,
            "f0" => Output::F0,
            "moments" => Output::Moments,
            "theta_t" => Output::ThetaT,
            "comparison" => Output::Comparison,
            "qcrb" => Output::Qcrb,
            _ => return Err(format!("unknown output `{s}`")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}`")),
        }
    }
}

/// One swept parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: Base,
    pub optimal_phases: bool,
    pub numerics: Numerics,
    pub axes: Vec<Axis>,
    pub outputs: Vec<Output>,
    pub regime: Regime,
    pub turning_point: TurningMode,
    pub path: Option<PathBuf>,
    pub format: Format,
}

impl SweepSpec {
    pub fn grid_size(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Sets a base or numerics parameter by its config name.
    pub fn set(&mut self, name: &str, value: f64) -> std::result::Result<(), String> {
        let slot = match self.numerics.field_mut(name) {
            Some(s) => s,
            None => self
                .base
                .field_mut(name)
                .ok_or_else(|| format!("`{name}` is not a numeric parameter"))?,
        };
        *slot = value;
        Ok(())
    }

    /// Column names in output order, without the trailing error column.
    pub fn columns(&self) -> Vec<String> {
        self.axes
            .iter()
            .map(|a| a.name.clone())
            .chain(
                self.outputs
                    .iter()
                    .flat_map(|o| o.columns().iter().map(|c| c.to_string())),
            )
            .collect()
    }
}

/// Parses a number: a product/quotient of decimal literals and `pi`.
pub fn parse_number(text: &str) -> Option<f64> {
    let text = text.trim();
    let (sign, body) = match text.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, text.strip_prefix('+').unwrap_or(text)),
    };
    let mut acc = sign;
    let mut op = b'*';
    let mut rest = body;
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let token = rest[..end].trim();
        let v = if token.eq_ignore_ascii_case("pi") {
            PI
        } else if token.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
            token.parse::<f64>().ok()?
        } else {
            return None;
        };
        acc = if op == b'*' { acc * v } else { acc / v };
        if end == rest.len() {
            break;
        }
        op = rest.as_bytes()[end];
        rest = &rest[end + 1..];
    }
    acc.is_finite().then_some(acc)
}

fn number(line: usize, key: &str, value: &str) -> Result<f64> {
    parse_number(value).ok_or_else(|| CliError::at(line, format!("`{key}`: cannot parse `{value}` as a number")))
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(CliError::at(
            line,
            format!("`{key}`: expected true or false, got `{value}`"),
        )),
    }
}

fn parse_with<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| CliError::at(line, format!("`{key}`: {e}")))
}

fn parse_count(line: usize, key: &str, value: &str) -> Result<usize> {
    match value.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(CliError::at(
            line,
            format!("`{key}`: expected a positive integer, got `{value}`"),
        )),
    }
}

fn parse_axis(line: usize, name: &str, value: &str) -> Result<Vec<f64>> {
    if let Some(inner) = value.strip_prefix("linspace(").and_then(|v| v.strip_suffix(')')) {
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        let [lo, hi, count] = parts[..] else {
            return Err(CliError::at(
                line,
                format!("`{name}`: linspace takes (min, max, count)"),
            ));
        };
        let (lo, hi) = (number(line, name, lo)?, number(line, name, hi)?);
        let count = parse_count(line, name, count)?;
        if count == 1 {
            return Ok(vec![lo]);
        }
        let step = (hi - lo) / (count - 1) as f64;
        return Ok((0..count)
            .map(|i| if i + 1 == count { hi } else { lo + step * i as f64 })
            .collect());
    }
    if let Some(inner) = value.strip_prefix('[').and_then(|v| v.strip_suffix(']')) {
        let values = inner
            .split(',')
            .map(|v| number(line, name, v))
            .collect::<Result<Vec<_>>>()?;
        return Ok(values);
    }
    Err(CliError::at(
        line,
        format!("`{name}`: expected linspace(min, max, count) or [v1, v2, ...]"),
    ))
}

struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
}

struct Section<'a> {
    name: &'a str,
    line: usize,
    entries: Vec<Entry<'a>>,
}

const SECTIONS: [&str; 5] = ["interferometer", "gw", "numerics", "sweep", "output"];

fn split_sections(text: &str) -> Result<Vec<Section<'_>>> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|c| c.strip_suffix(']')) {
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                return Err(CliError::at(line, format!("unknown section [{name}]")));
            }
            if sections.iter().any(|s| s.name == name) {
                return Err(CliError::at(line, format!("section [{name}] appears twice")));
            }
            sections.push(Section {
                name,
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(CliError::at(line, format!("expected `key = value`, got `{content}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(section) = sections.last_mut() else {
            return Err(CliError::at(line, format!("`{key}` appears before any section")));
        };
        if key.is_empty() {
            return Err(CliError::at(line, "empty key"));
        }
        if section.entries.iter().any(|e| e.key == key) {
            return Err(CliError::at(
                line,
                format!("duplicate key `{key}` in [{}]", section.name),
            ));
        }
        section.entries.push(Entry { line, key, value });
    }
    Ok(sections)
}

fn unknown(e: &Entry, section: &str) -> CliError {
    CliError::at(e.line, format!("unknown key `{}` in [{section}]", e.key))
}

fn parse_interferometer(s: &Section, optimal: &mut bool) -> Result<InterferometerParams> {
    let channel = s
        .entries
        .iter()
        .find(|e| e.key == "channel")
        .ok_or_else(|| CliError::at(s.line, "[interferometer] needs `channel`"))?;
    let mut p = InterferometerParams::new(parse_with(channel.line, "channel", channel.value)?);
    for e in s.entries.iter().filter(|e| e.key != "channel") {
        if e.key == "optimal_phases" {
            *optimal = parse_bool(e.line, e.key, e.value)?;
        } else if let Some(slot) = p.field_mut(e.key) {
            *slot = number(e.line, e.key, e.value)?;
        } else {
            return Err(unknown(e, s.name));
        }
    }
    Ok(p)
}

const GW_REQUIRED: [&str; 10] = [
    "n",
    "m",
    "omega_n",
    "omega_m",
    "sound_speed",
    "atom_mass",
    "t",
    "omega_gw",
    "total_particles",
    "r",
];

fn parse_gw(s: &Section, optimal: &mut bool) -> Result<GwDetectorParams> {
    for key in GW_REQUIRED {
        if !s.entries.iter().any(|e| e.key == key) {
            return Err(CliError::at(s.line, format!("[gw] needs `{key}`")));
        }
    }
    let mut p = GwDetectorParams {
        n: 0,
        m: 0,
        omega_n: 0.0,
        omega_m: 0.0,
        sound_speed: 0.0,
        atom_mass: 0.0,
        hbar: HBAR,
        t: 0.0,
        epsilon: 0.0,
        omega_gw: 0.0,
        resonance: Resonance::Sum,
        resonance_tol: DEFAULT_RESONANCE_TOL,
        total_particles: 0.0,
        squeezing: 0.0,
        tritter_angle: 0.0,
        pump_phase: 0.0,
        squeezing_phase: 0.0,
        tritter_phase: 0.0,
        channel_phase: 0.0,
        n_detectors: 1.0,
        tau: f64::NAN,
    };
    for e in &s.entries {
        match e.key {
            "n" => p.n = parse_count(e.line, e.key, e.value)? as u32,
            "m" => p.m = parse_count(e.line, e.key, e.value)? as u32,
            "resonance" => p.resonance = parse_with(e.line, e.key, e.value)?,
            "optimal_phases" => *optimal = parse_bool(e.line, e.key, e.value)?,
            key => match gw_field_mut(&mut p, key) {
                Some(slot) => *slot = number(e.line, key, e.value)?,
                None => return Err(unknown(e, s.name)),
            },
        }
    }
    if p.tau.is_nan() {
        // a single run
        p.tau = p.t;
    }
    Ok(p)
}

fn parse_numerics(s: &Section, n: &mut Numerics) -> Result<()> {
    for e in &s.entries {
        match e.key {
            "max_points" => n.max_points = parse_count(e.line, e.key, e.value)?,
            "workers" => n.workers = Some(parse_count(e.line, e.key, e.value)?),
            key => match n.field_mut(key) {
                Some(slot) => *slot = number(e.line, key, e.value)?,
                None => return Err(unknown(e, s.name)),
            },
        }
    }
    Ok(())
}

/// Parses and validates a config file's contents.
pub fn parse_config(text: &str) -> Result<SweepSpec> {
    let sections = split_sections(text)?;
    let find = |name: &str| sections.iter().find(|s| s.name == name);

    let mut optimal_phases = false;
    let base = match (find("interferometer"), find("gw")) {
        (Some(_), Some(g)) => {
            return Err(CliError::at(g.line, "[interferometer] and [gw] are mutually exclusive"));
        }
        (Some(s), None) => Base::Interferometer(parse_interferometer(s, &mut optimal_phases)?),
        (None, Some(s)) => Base::Gw(parse_gw(s, &mut optimal_phases)?),
        (None, None) => return Err(CliError::Invalid("need an [interferometer] or [gw] section".into())),
    };

    let mut numerics = Numerics::default();
    if let Some(s) = find("numerics") {
        parse_numerics(s, &mut numerics)?;
    }

    let mut spec = SweepSpec {
        base,
        optimal_phases,
        numerics,
        axes: Vec::new(),
        outputs: Vec::new(),
        regime: Regime::Exact,
        turning_point: TurningMode::Exact,
        path: None,
        format: Format::Csv,
    };

    if let Some(s) = find("sweep") {
        for e in &s.entries {
            let values = parse_axis(e.line, e.key, e.value)?;
            let mut probe = spec.clone();
            probe.set(e.key, values[0]).map_err(|_| {
                CliError::at(
                    e.line,
                    format!("cannot sweep `{}`: not a numeric parameter of this config", e.key),
                )
            })?;
            spec.axes.push(Axis {
                name: e.key.to_string(),
                values,
            });
        }
    }

    let mut outputs: Option<Vec<Output>> = None;
    if let Some(s) = find("output") {
        for e in &s.entries {
            match e.key {
                "outputs" => {
                    let mut list = e
                        .value
                        .split(',')
                        .map(|o| parse_with::<Output>(e.line, e.key, o.trim()))
                        .collect::<Result<Vec<_>>>()?;
                    if let Some(o) = list.iter().find(|o| o.needs_gw() && !spec.base.is_gw()) {
                        return Err(CliError::at(e.line, format!("output `{o:?}` needs a [gw] section")));
                    }
                    list.sort();
                    list.dedup();
                    outputs = Some(list);
                }
                "path" => spec.path = Some(PathBuf::from(e.value)),
                "format" => spec.format = parse_with(e.line, e.key, e.value)?,
                "regime" => spec.regime = parse_with(e.line, e.key, e.value)?,
                "turning_point" => {
                    spec.turning_point = match e.value {
                        "exact" => TurningMode::Exact,
                        "approx" => TurningMode::Approx,
                        v => {
                            return Err(CliError::at(
                                e.line,
                                format!("`turning_point`: expected exact or approx, got `{v}`"),
                            ))
                        }
                    }
                }
                _ => return Err(unknown(e, s.name)),
            }
        }
    }
    spec.outputs = outputs.unwrap_or_else(|| {
        let mut o = vec![
            Output::HNumeric,
            Output::HClosed,
            Output::F0,
            Output::Moments,
            Output::ThetaT,
        ];
        if spec.base.is_gw() {
            o.extend([Output::Comparison, Output::Qcrb]);
        }
        o
    });

    validate(&spec)?;
    Ok(spec)
}

fn validate(spec: &SweepSpec) -> Result<()> {
    let n = &spec.numerics;
    if !(n.fd_step > 0.0) {
        return Err(CliError::Invalid(format!(
            "fd_step must be positive, got {}",
            n.fd_step
        )));
    }
    if !(n.eps0 > 0.0) {
        return Err(CliError::Invalid(format!("eps0 must be positive, got {}", n.eps0)));
    }
    let mut seen = HashSet::new();
    for a in &spec.axes {
        if !seen.insert(a.name.as_str()) {
            return Err(CliError::Invalid(format!("`{}` swept twice", a.name)));
        }
    }
    let size = spec
        .axes
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.values.len()))
        .unwrap_or(usize::MAX);
    if size > n.max_points {
        return Err(CliError::Invalid(format!(
            "grid has {size} points, above the cap of {}",
            n.max_points
        )));
    }
    match &spec.base {
        Base::Interferometer(p) if spec.axes.is_empty() => {
            p.config()?;
        }
        Base::Gw(p) if spec.axes.is_empty() => {
            p.interferometer()?;
        }
        _ => {}
    }
    Ok(())
}

pub fn parse_config_file(path: &Path) -> Result<SweepSpec> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}
