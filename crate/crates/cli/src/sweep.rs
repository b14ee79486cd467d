//! Grid evaluation.

use rayon::prelude::*;
use su11_core::gw::{compare_schemes, qcrb_sensitivity};
use su11_core::metrology::{optimal_tritter_angle, qfi_closed_form, qfi_numeric, sensitivity_number_sum};
use su11_core::pipeline::side_population;
use su11_core::InterferometerConfig;

use crate::config::{Base, Output, SweepSpec};
use crate::error::{CliError, Result};
use crate::table::{Row, Table};

/// Grid coordinates of point `index`, last axis fastest.
fn coordinates(spec: &SweepSpec, mut index: usize) -> Vec<f64> {
    let mut coords = vec![0.0; spec.axes.len()];
    for (c, axis) in coords.iter_mut().zip(&spec.axes).rev() {
        let n = axis.values.len();
        *c = axis.values[index % n];
        index /= n;
    }
    coords
}

/// Resolved configuration of one grid point.
struct Point {
    config: InterferometerConfig,
    /// Finite differences run on a unit-strength channel; QFI and F0 are
    /// rescaled by the squared strength afterwards. Detector strengths are
    /// so large that a step in ε would otherwise leave the linear regime.
    scale: f64,
    unit: InterferometerConfig,
}

fn resolve(spec: &SweepSpec) -> su11_core::Result<Point> {
    let (config, rescale) = match &spec.base {
        Base::Interferometer(p) => (p.config()?, false),
        Base::Gw(p) => (p.interferometer()?, true),
    };
    let config = if spec.optimal_phases {
        config.with_optimal_phases()
    } else {
        config
    };
    if !rescale {
        return Ok(Point {
            config,
            scale: 1.0,
            unit: config,
        });
    }
    let mut unit = config;
    unit.channel.strength = 1.0;
    Ok(Point {
        config,
        scale: config.channel.strength.powi(2),
        unit,
    })
}

fn finite(label: &str, v: f64) -> std::result::Result<f64, String> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{label}: non-finite result {v}"))
    }
}

fn evaluate_outputs(spec: &SweepSpec, values: &mut Vec<Option<f64>>, errors: &mut Vec<String>) {
    let point = match resolve(spec) {
        Ok(p) => p,
        Err(e) => {
            let n: usize = spec.outputs.iter().map(|o| o.columns().len()).sum();
            values.extend(std::iter::repeat_n(None, n));
            errors.push(e.to_string());
            return;
        }
    };
    let n = &spec.numerics;
    let mut push = |label: &str, result: std::result::Result<Vec<f64>, String>, width: usize| match result
        .map_err(|e| format!("{label}: {e}"))
        .and_then(|vs| {
            vs.into_iter()
                .map(|v| finite(label, v))
                .collect::<std::result::Result<Vec<_>, _>>()
        }) {
        Ok(vs) => values.extend(vs.into_iter().map(Some)),
        Err(e) => {
            values.extend(std::iter::repeat_n(None, width));
            errors.push(e);
        }
    };
    let mut sensitivity = None;
    for &output in &spec.outputs {
        let width = output.columns().len();
        let result = match output {
            Output::HNumeric => text(qfi_numeric(&point.unit, n.qfi_eps0, n.fd_step).map(|h| vec![h * point.scale])),
            Output::HClosed => text(qfi_closed_form(&point.config, spec.regime).map(|h| vec![h])),
            Output::F0 | Output::Moments => sensitivity
                .get_or_insert_with(|| text(sensitivity_number_sum(&point.unit, n.eps0, n.fd_step)))
                .clone()
                .map(|s| match output {
                    Output::F0 => vec![s.f0 * point.scale],
                    _ => vec![s.mean, s.var],
                }),
            Output::ThetaT => text(
                optimal_tritter_angle(
                    point.config.total_particles,
                    side_population(point.config.squeezing),
                    spec.turning_point,
                )
                .map(|t| vec![t]),
            ),
            Output::Comparison => match &spec.base {
                Base::Gw(p) => {
                    text(compare_schemes(p).map(|c| vec![c.original, c.pumped_small_angle, c.ratio_small_angle]))
                }
                Base::Interferometer(_) => unreachable!("rejected by the parser"),
            },
            Output::Qcrb => match &spec.base {
                Base::Gw(p) => text(
                    qfi_closed_form(&point.config, spec.regime)
                        .and_then(|h| qcrb_sensitivity(h, p.n_detectors, p.tau, p.t))
                        .map(|d| vec![d]),
                ),
                Base::Interferometer(_) => unreachable!("rejected by the parser"),
            },
        };
        push(output_label(output), result, width);
    }
}

fn text<T>(r: su11_core::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn output_label(o: Output) -> &'static str {
    o.columns()[0]
}

/// Evaluates the sweep's base point with the given parameters overridden.
pub fn evaluate_point(spec: &SweepSpec, overrides: &[(&str, f64)]) -> Row {
    let mut local = spec.clone();
    let mut values = Vec::with_capacity(overrides.len());
    let mut errors = Vec::new();
    for &(name, v) in overrides {
        values.push(Some(v));
        if let Err(e) = local.set(name, v) {
            errors.push(e);
        }
    }
    if errors.is_empty() {
        evaluate_outputs(&local, &mut values, &mut errors);
    } else {
        let n: usize = spec.outputs.iter().map(|o| o.columns().len()).sum();
        values.extend(std::iter::repeat_n(None, n));
    }
    Row {
        values,
        error: (!errors.is_empty()).then(|| errors.join("; ")),
    }
}

/// Evaluates every grid point. Rows come back in grid order whatever the
/// schedule; failed points carry their message in the error column.
pub fn run_sweep(spec: &SweepSpec, workers: Option<usize>) -> Result<Table> {
    let size = spec.grid_size();
    let eval = |i: usize| {
        let coords = coordinates(spec, i);
        let overrides: Vec<(&str, f64)> = spec.axes.iter().map(|a| a.name.as_str()).zip(coords).collect();
        evaluate_point(spec, &overrides)
    };
    let workers = workers.or(spec.numerics.workers);
    let rows: Vec<Row> = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Invalid(format!("cannot start {n} workers: {e}")))?
            .install(|| (0..size).into_par_iter().map(eval).collect()),
        None => (0..size).into_par_iter().map(eval).collect(),
    };
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        log::warn!("{failed} of {size} grid points failed; see the error column");
    }
    Ok(Table {
        columns: spec.columns(),
        rows,
    })
}
