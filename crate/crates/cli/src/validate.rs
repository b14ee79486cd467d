//! The Fock-space reference suite behind `su11 validate`.

use su11_core::fock::{
    channel_generator, generator_variance, interferometer_sequence, number_difference_fock, number_moments_fock,
    prepare_state_fock, FockOperatorSpec, LEAKAGE_THRESHOLD,
};
use su11_core::metrology::{heterodyne_moments, number_sum_moments, qfi_numeric};
use su11_core::pipeline::{output_side_modes, side_population};
use su11_core::{ChannelKind, ChannelSpec, InterferometerConfig};

pub const CUTOFF: usize = 25;
pub const TOLERANCE: f64 = 1e-3;

/// Outcome of one reference comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub worst: f64,
    pub passed: bool,
    pub detail: Option<String>,
}

fn agree(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOLERANCE * a.abs().max(b.abs()) || (a.abs() < 1e-9 && b.abs() < 1e-9)
}

/// Small states the truncated reference can hold below the leakage bound.
pub fn reference_configs() -> Vec<InterferometerConfig> {
    let mut out = Vec::new();
    for kind in [ChannelKind::Squeezing, ChannelKind::ModeMixing, ChannelKind::Phase] {
        for &(r, theta, pump, eps) in &[(0.5, 0.4, 2.0, 0.3), (0.3, 0.1, 1.0, 0.6)] {
            out.push(InterferometerConfig {
                total_particles: pump + side_population(r),
                pump_phase: 0.3,
                squeezing: r,
                squeezing_phase: 0.9,
                tritter_angle: theta,
                tritter_phase: 1.1,
                channel: ChannelSpec::new(kind, 1.0, 0.7, eps).expect("valid channel"),
            });
        }
    }
    out
}

fn compare(c: &InterferometerConfig, step: f64) -> su11_core::Result<Vec<(&'static str, f64, f64)>> {
    let probe = prepare_state_fock(&interferometer_sequence(c, false)?, 3, CUTOFF)?;
    let full = prepare_state_fock(&interferometer_sequence(c, true)?, 3, CUTOFF)?;
    let leak = probe.leakage().max(full.leakage());
    if leak >= LEAKAGE_THRESHOLD {
        return Err(su11_core::Error::InvalidArgument(format!(
            "leakage {leak:.1e} at cutoff {CUTOFF}"
        )));
    }
    let gaussian = output_side_modes(c)?;
    let spec = FockOperatorSpec::new(3, CUTOFF, channel_generator(&c.channel, (1, 2)))?;
    let (mean, var) = number_moments_fock(&full, &[1, 2])?;
    let (g_mean, g_var) = number_sum_moments(&gaussian)?;
    let (d_mean, d_var) = number_difference_fock(&full, 1, 2)?;
    let (h_mean, h_var) = heterodyne_moments(&gaussian)?;
    Ok(vec![
        ("mean N", mean, g_mean),
        ("var N", var, g_var),
        ("heterodyne mean", d_mean, h_mean),
        ("heterodyne var", d_var, h_var),
        (
            "QFI",
            generator_variance(&probe, &spec)?,
            qfi_numeric(c, c.channel.epsilon, step)?,
        ),
    ])
}

/// Compares the Gaussian pipeline with the Fock reference on `configs`.
pub fn run_reference_suite(configs: &[InterferometerConfig], step: f64) -> Vec<Check> {
    configs
        .iter()
        .map(|c| {
            let label = format!(
                "{} r={} θ={} |α|²={:.3} ε={}",
                c.channel.kind,
                c.squeezing,
                c.tritter_angle,
                c.total_particles - side_population(c.squeezing),
                c.channel.epsilon
            );
            match compare(c, step) {
                Ok(pairs) => {
                    let worst = pairs
                        .iter()
                        .filter(|(_, _, b)| b.abs() > 1e-9)
                        .map(|(_, a, b)| (a - b).abs() / b.abs())
                        .fold(0.0, f64::max);
                    let bad: Vec<String> = pairs
                        .iter()
                        .filter(|(_, a, b)| !agree(*a, *b))
                        .map(|(name, a, b)| format!("{name}: {a} vs {b}"))
                        .collect();
                    Check {
                        label,
                        worst,
                        passed: bad.is_empty(),
                        detail: (!bad.is_empty()).then(|| bad.join(", ")),
                    }
                }
                Err(e) => Check {
                    label,
                    worst: f64::NAN,
                    passed: false,
                    detail: Some(e.to_string()),
                },
            }
        })
        .collect()
}
