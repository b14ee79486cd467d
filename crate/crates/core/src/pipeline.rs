//! The full interferometer `S = S₋ S_ε S₊` with undepleted-pump bookkeeping.

use std::f64::consts::FRAC_PI_2;

use crate::channels::{pumped_two_mode_squeezer, tritter, ChannelKind, ChannelSpec};
use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, SymplecticOp};

/// Side-mode population created by the source squeezer, `N = 2 sinh² r`.
pub fn side_population(r: f64) -> f64 {
    2.0 * r.sinh().powi(2)
}

/// `(N₀, N)` with `N₀ = N̄ − 2 sinh² r` and `N = 2 sinh² r`.
pub fn pump_depletion(total_particles: f64, r: f64) -> Result<(f64, f64)> {
    if !total_particles.is_finite() || !r.is_finite() {
        return Err(Error::NonFinite("pump depletion inputs"));
    }
    let side = side_population(r);
    let pump = total_particles - side;
    if !(pump > 0.0) {
        return Err(Error::DepletedPump {
            total: total_particles,
            side,
        });
    }
    Ok((pump, side))
}

/// Pump and side-mode populations after a tritter of angle `θ`.
pub fn particle_numbers_after_tritter(pump: f64, side: f64, theta: f64) -> (f64, f64) {
    let (s2, c2) = (theta.sin().powi(2), theta.cos().powi(2));
    (pump * c2 + 0.5 * side * s2, pump * s2 + 0.5 * side * (1.0 + c2))
}

/// Largest tritter angle keeping `N(θ) ≤ δ N₀(θ)` when `N = γ N₀`.
pub fn max_tritter_angle(gamma: f64, delta: f64) -> Result<f64> {
    if !(gamma >= 0.0) || !(delta > 0.0) || !(delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 ≤ γ and 0 < δ < 1, got γ = {gamma}, δ = {delta}"
        )));
    }
    if delta < gamma {
        return Err(Error::InvalidArgument(format!(
            "need δ ≥ γ, got γ = {gamma}, δ = {delta}"
        )));
    }
    let z = (delta * gamma + 2.0 * delta - 3.0 * gamma - 2.0) / (delta * gamma - 2.0 * delta + gamma - 2.0);
    if !(-1.0..=1.0).contains(&z) {
        return Err(Error::InvalidArgument(format!("arccos argument {z} outside [-1, 1]")));
    }
    Ok(0.5 * z.acos())
}

/// Every physical parameter of one interferometer instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferometerConfig {
    /// `N̄`, total particle number entering in the pump.
    pub total_particles: f64,
    /// `ϑ₀`.
    pub pump_phase: f64,
    /// `r`.
    pub squeezing: f64,
    /// `ϑ_sq`.
    pub squeezing_phase: f64,
    /// `θ`, restricted to `[0, π/2]`.
    pub tritter_angle: f64,
    /// `ϑ`.
    pub tritter_phase: f64,
    pub channel: ChannelSpec,
}

impl InterferometerConfig {
    pub fn validate(&self) -> Result<()> {
        let vals = [
            self.total_particles,
            self.pump_phase,
            self.squeezing,
            self.squeezing_phase,
            self.tritter_angle,
            self.tritter_phase,
        ];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("interferometer configuration"));
        }
        if !(0.0..=FRAC_PI_2).contains(&self.tritter_angle) {
            return Err(Error::InvalidArgument(format!(
                "tritter angle {} outside [0, π/2]",
                self.tritter_angle
            )));
        }
        pump_depletion(self.total_particles, self.squeezing)?;
        Ok(())
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self {
            channel: self.channel.with_epsilon(epsilon),
            ..*self
        }
    }

    pub fn with_tritter_angle(&self, theta: f64) -> Self {
        Self {
            tritter_angle: theta,
            ..*self
        }
    }

    /// `(N₀, N)` for this configuration.
    pub fn populations(&self) -> Result<(f64, f64)> {
        pump_depletion(self.total_particles, self.squeezing)
    }

    /// Phase relations that maximise the pump contribution to the QFI,
    /// keeping `ϑ₀` and the channel phase fixed where they are free.
    ///
    /// * squeezing: `ϑ_sq = φ_B + π/2` and `2ϑ = 2ϑ₀ + ϑ_sq − 2φ_B`
    /// * mode mixing: `φ_A = 0` and `2ϑ = 2ϑ₀ − ϑ_sq + π`
    /// * phase: unchanged
    pub fn with_optimal_phases(&self) -> Self {
        let mut c = *self;
        match c.channel.kind {
            ChannelKind::Squeezing => {
                c.squeezing_phase = c.channel.phase + FRAC_PI_2;
                c.tritter_phase = c.pump_phase + 0.5 * c.squeezing_phase - c.channel.phase;
            }
            ChannelKind::ModeMixing => {
                c.channel.phase = 0.0;
                c.tritter_phase = c.pump_phase - 0.5 * c.squeezing_phase + FRAC_PI_2;
            }
            ChannelKind::Phase => {}
        }
        c
    }
}

/// `S₊ = S_t(θ) S_s(r)` and `S₋ = S_s(−r) S_t(−θ)`.
pub fn build_half_pipelines(config: &InterferometerConfig) -> Result<(SymplecticOp, SymplecticOp)> {
    let source = pumped_two_mode_squeezer(config.squeezing, config.squeezing_phase);
    let unsource = pumped_two_mode_squeezer(-config.squeezing, config.squeezing_phase);
    let split = tritter(config.tritter_angle, config.tritter_phase);
    let unsplit = tritter(-config.tritter_angle, config.tritter_phase);
    Ok((split.compose(&source)?, unsource.compose(&unsplit)?))
}

/// State after the source squeezer with the pump amplitude replaced by
/// `α₀`, `|α₀|² = N₀`.
pub fn source_state(config: &InterferometerConfig) -> Result<GaussianState> {
    config.validate()?;
    let (pump, _) = config.populations()?;
    let input = GaussianState::pumped_input(config.total_particles, config.pump_phase)?;
    let squeezed = input.apply(&pumped_two_mode_squeezer(config.squeezing, config.squeezing_phase))?;
    let mut d = squeezed.displacement().clone();
    let scale = if config.total_particles > 0.0 {
        (pump / config.total_particles).sqrt()
    } else {
        0.0
    };
    d[0] *= scale;
    d[1] *= scale;
    GaussianState::new(d, squeezed.covariance().clone())
}

/// Pre-measurement state `S_ε S₊` applied to the input.
pub fn probe_state(config: &InterferometerConfig) -> Result<GaussianState> {
    let split = tritter(config.tritter_angle, config.tritter_phase);
    source_state(config)?
        .apply(&split)?
        .apply(&config.channel.symplectic()?)
}

/// Final three-mode state of the interferometer.
pub fn run_interferometer(config: &InterferometerConfig) -> Result<GaussianState> {
    let (_, minus) = build_half_pipelines(config)?;
    probe_state(config)?.apply(&minus)
}

/// Final side-mode state (pump traced out).
pub fn output_side_modes(config: &InterferometerConfig) -> Result<GaussianState> {
    run_interferometer(config)?.reduce(&[1, 2])
}

/// A configuration with the `ε`-independent stages precomputed, for
/// evaluating the interferometer at many channel parameters.
#[derive(Debug, Clone)]
pub struct PreparedInterferometer {
    config: InterferometerConfig,
    split_state: GaussianState,
    minus: SymplecticOp,
}

impl PreparedInterferometer {
    pub fn new(config: &InterferometerConfig) -> Result<Self> {
        let split = tritter(config.tritter_angle, config.tritter_phase);
        let split_state = source_state(config)?.apply(&split)?;
        let (_, minus) = build_half_pipelines(config)?;
        Ok(Self {
            config: *config,
            split_state,
            minus,
        })
    }

    pub fn config(&self) -> &InterferometerConfig {
        &self.config
    }

    /// `S_ε S₊` applied to the input at channel parameter `epsilon`.
    pub fn probe(&self, epsilon: f64) -> Result<GaussianState> {
        self.split_state
            .apply(&self.config.channel.with_epsilon(epsilon).symplectic()?)
    }

    pub fn output(&self, epsilon: f64) -> Result<GaussianState> {
        self.probe(epsilon)?.apply(&self.minus)
    }

    pub fn output_side_modes(&self, epsilon: f64) -> Result<GaussianState> {
        self.output(epsilon)?.reduce(&[1, 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn config(kind: ChannelKind, eps: f64) -> InterferometerConfig {
        InterferometerConfig {
            total_particles: 50.0,
            pump_phase: 0.3,
            squeezing: 1.0,
            squeezing_phase: 0.7,
            tritter_angle: 0.5,
            tritter_phase: 1.1,
            channel: ChannelSpec::new(kind, 1.0, 0.4, eps).unwrap(),
        }
    }

    #[test]
    fn depletion() {
        assert_eq!(pump_depletion(7.0, 0.0).unwrap(), (7.0, 0.0));
        let (n0, n) = pump_depletion(1e6, 2.0).unwrap();
        assert!((n - 26.308232836016483).abs() < 1e-9);
        assert!((n0 - 999_973.691_767_164).abs() < 1e-6);
        assert!((n0 + n - 1e6).abs() < 1e-9);
        assert!(matches!(pump_depletion(10.0, 2.0), Err(Error::DepletedPump { .. })));
    }

    #[test]
    fn half_pipelines_invert() {
        let mut c = config(ChannelKind::Squeezing, 0.0);
        c.squeezing = 0.0;
        c.tritter_angle = 0.0;
        let (p, m) = build_half_pipelines(&c).unwrap();
        assert_eq!(p, SymplecticOp::identity(3));
        assert_eq!(m, SymplecticOp::identity(3));
        let c = config(ChannelKind::Squeezing, 0.0);
        let (p, m) = build_half_pipelines(&c).unwrap();
        assert!((m.compose(&p).unwrap().matrix() - DMatrix::identity(6, 6)).amax() < 1e-10);
        assert!(crate::gaussian::check_symplectic(p.matrix(), 1e-10));
    }

    #[test]
    fn zero_epsilon_leaves_side_modes_empty() {
        for kind in [ChannelKind::Squeezing, ChannelKind::ModeMixing, ChannelKind::Phase] {
            let side = output_side_modes(&config(kind, 0.0)).unwrap();
            assert!(side.mean_particle_number().abs() < 1e-10);
        }
    }

    #[test]
    fn theta_zero_phase_channel_is_plain_su11() {
        let mut c = config(ChannelKind::Phase, 0.3);
        c.tritter_angle = 0.0;
        let side = output_side_modes(&c).unwrap();
        // bare SU(1,1): two-mode squeezed vacuum, phase shift, unsqueeze
        let bare = GaussianState::vacuum(2)
            .unwrap()
            .apply(&crate::channels::squeezing_channel(c.squeezing, c.squeezing_phase))
            .unwrap();
        let sp = crate::channels::phase_channel(c.channel.argument());
        let rot = SymplecticOp::new_unchecked(sp.matrix().view((2, 2), (4, 4)).into_owned()).unwrap();
        let bare = bare
            .apply(&rot)
            .unwrap()
            .apply(&crate::channels::squeezing_channel(-c.squeezing, c.squeezing_phase))
            .unwrap();
        assert!((side.covariance() - bare.covariance()).amax() < 1e-10);
        assert!(side.displacement().amax() < 1e-10);
    }

    #[test]
    fn tritter_populations() {
        assert_eq!(particle_numbers_after_tritter(10.0, 2.0, 0.0), (10.0, 2.0));
        let (a, b) = particle_numbers_after_tritter(10.0, 2.0, FRAC_PI_2);
        assert!((a - 1.0).abs() < 1e-12 && (b - 11.0).abs() < 1e-12);
    }

    #[test]
    fn max_angle_examples() {
        let t = max_tritter_angle(0.0, 0.1).unwrap();
        assert!((t * t - 0.0938).abs() < 2e-4);
        assert!((t * t / t.sin().powi(2) - 1.03).abs() < 5e-3);
        assert!(max_tritter_angle(0.2, 0.1).is_err());
        assert!(max_tritter_angle(0.0, 0.0).is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = config(ChannelKind::Squeezing, 0.0);
        c.tritter_angle = 2.0;
        assert!(c.validate().is_err());
        let mut c = config(ChannelKind::Squeezing, 0.0);
        c.total_particles = 1.0;
        assert!(matches!(c.validate(), Err(Error::DepletedPump { .. })));
    }

    #[test]
    fn optimal_phase_relations() {
        let c = config(ChannelKind::Squeezing, 0.0).with_optimal_phases();
        let arg = 2.0 * c.tritter_phase - 2.0 * c.pump_phase - c.squeezing_phase + 2.0 * c.channel.phase;
        assert!(arg.abs() < 1e-12);
        assert!(((c.squeezing_phase - c.channel.phase).sin() - 1.0).abs() < 1e-12);
        let c = config(ChannelKind::ModeMixing, 0.0).with_optimal_phases();
        let arg = 2.0 * c.tritter_phase - 2.0 * c.pump_phase + c.squeezing_phase;
        assert!((arg.cos() + 1.0).abs() < 1e-12);
    }
}
