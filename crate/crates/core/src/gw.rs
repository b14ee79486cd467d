//! Gravitational-wave detection with phonons in a Bose-Einstein condensate.
//!
//! SI units throughout. A gravitational wave resonant with the sum of two
//! phonon frequencies squeezes them; one resonant with their difference
//! mixes them. The strength constant excludes the strain `ε`, which enters
//! only through the channel argument `εK/4`.

use std::fmt;
use std::str::FromStr;

use crate::channels::{ChannelKind, ChannelSpec};
use crate::error::{Error, Result};
use crate::metrology::{qfi_closed_form, Regime, UNDEPLETED_DELTA};
use crate::pipeline::{max_tritter_angle, side_population, InterferometerConfig};

/// Reduced Planck constant in J·s.
pub const HBAR: f64 = 1.054571817e-34;
/// Relative detuning `|Ω − ω_res| / Ω` tolerated by default.
pub const DEFAULT_RESONANCE_TOL: f64 = 1e-6;
/// `ξ` at or below which a mode is not treated as phononic.
pub const PHONON_XI_WARN: f64 = 10.0;
// same slack on θ² as the undepleted-pump regimes of the metrology module
const ANGLE_SLACK: f64 = 1.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resonance {
    /// `Ω = ω_n + ω_m`: squeezing channel.
    Sum,
    /// `Ω = ω_n − ω_m`: mode-mixing channel.
    Difference,
}

impl Resonance {
    pub fn channel_kind(self) -> ChannelKind {
        match self {
            Resonance::Sum => ChannelKind::Squeezing,
            Resonance::Difference => ChannelKind::ModeMixing,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Resonance::Sum => "sum",
            Resonance::Difference => "difference",
        }
    }
}

impl fmt::Display for Resonance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Resonance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sum" => Ok(Resonance::Sum),
            "difference" => Ok(Resonance::Difference),
            other => Err(Error::InvalidArgument(format!("unknown resonance '{other}'"))),
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")))
    }
}

/// `ξ = m c_s² / (ħ ω)`. Logs a warning when `ξ ≤ 10`, where the mode is
/// not safely in the phonon part of the spectrum.
pub fn phonon_xi(atom_mass: f64, sound_speed: f64, omega: f64, hbar: f64) -> Result<f64> {
    positive("atom mass", atom_mass)?;
    positive("sound speed", sound_speed)?;
    positive("mode frequency", omega)?;
    positive("ħ", hbar)?;
    let xi = atom_mass * sound_speed * sound_speed / (hbar * omega);
    if xi <= PHONON_XI_WARN {
        log::warn!("ξ = {xi:.4} ≤ {PHONON_XI_WARN}: mode at ω = {omega:e} rad/s is not phononic");
    }
    Ok(xi)
}

/// Dimensionless coupling `ξ_n ξ_m (n² + m²) / (n ∓ m)²`.
pub fn coupling_constant(n: u32, m: u32, xi_n: f64, xi_m: f64, resonance: Resonance) -> Result<f64> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("mode indices must be positive".into()));
    }
    positive("ξ_n", xi_n)?;
    positive("ξ_m", xi_m)?;
    let (n, m) = (n as f64, m as f64);
    let denom = match resonance {
        Resonance::Sum => (n - m).powi(2),
        Resonance::Difference => (n + m).powi(2),
    };
    if denom == 0.0 {
        return Err(Error::InvalidArgument(
            "sum resonance needs distinct mode indices".into(),
        ));
    }
    Ok(xi_n * xi_m * (n * n + m * m) / denom)
}

/// `K = √(ω_m ω_n) c t`, the channel strength without the strain.
pub fn strength_constant(omega_n: f64, omega_m: f64, coupling: f64, t: f64) -> f64 {
    (omega_m * omega_n).sqrt() * coupling * t
}

/// Every input of a detector with an interferometer attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GwDetectorParams {
    pub n: u32,
    pub m: u32,
    /// rad/s
    pub omega_n: f64,
    /// rad/s
    pub omega_m: f64,
    /// m/s
    pub sound_speed: f64,
    /// kg
    pub atom_mass: f64,
    /// J·s
    pub hbar: f64,
    /// Interaction time, s.
    pub t: f64,
    /// Strain amplitude.
    pub epsilon: f64,
    /// Wave angular frequency, rad/s.
    pub omega_gw: f64,
    pub resonance: Resonance,
    pub resonance_tol: f64,
    pub total_particles: f64,
    pub squeezing: f64,
    pub tritter_angle: f64,
    pub pump_phase: f64,
    pub squeezing_phase: f64,
    pub tritter_phase: f64,
    pub channel_phase: f64,
    pub n_detectors: f64,
    /// Total integration time, s.
    pub tau: f64,
}

impl GwDetectorParams {
    /// Relative detuning from the configured resonance.
    pub fn detuning(&self) -> f64 {
        let target = match self.resonance {
            Resonance::Sum => self.omega_n + self.omega_m,
            Resonance::Difference => self.omega_n - self.omega_m,
        };
        (self.omega_gw - target).abs() / self.omega_gw.abs()
    }

    pub fn check_resonance(&self) -> Result<()> {
        positive("wave frequency", self.omega_gw)?;
        let detuning = self.detuning();
        if detuning < self.resonance_tol {
            Ok(())
        } else {
            Err(Error::OffResonance {
                detuning,
                tolerance: self.resonance_tol,
            })
        }
    }

    pub fn coupling(&self) -> Result<f64> {
        let xi_n = phonon_xi(self.atom_mass, self.sound_speed, self.omega_n, self.hbar)?;
        let xi_m = phonon_xi(self.atom_mass, self.sound_speed, self.omega_m, self.hbar)?;
        coupling_constant(self.n, self.m, xi_n, xi_m, self.resonance)
    }

    /// Interferometer configuration with the wave as its channel.
    pub fn interferometer(&self) -> Result<InterferometerConfig> {
        let config = InterferometerConfig {
            total_particles: self.total_particles,
            pump_phase: self.pump_phase,
            squeezing: self.squeezing,
            squeezing_phase: self.squeezing_phase,
            tritter_angle: self.tritter_angle,
            tritter_phase: self.tritter_phase,
            channel: channel_strength(self)?,
        };
        config.validate()?;
        Ok(config)
    }
}

/// Channel produced by the wave on modes `n` and `m`.
pub fn channel_strength(params: &GwDetectorParams) -> Result<ChannelSpec> {
    params.check_resonance()?;
    positive("interaction time", params.t)?;
    let c = params.coupling()?;
    let k = strength_constant(params.omega_n, params.omega_m, c, params.t);
    ChannelSpec::new(params.resonance.channel_kind(), k, params.channel_phase, params.epsilon)
}

/// QFI of the bare SU(1,1) scheme with the wave as a squeezing channel,
/// `¼K²[1 + sin²(ϑ_sq − φ_B) N_P²]` with `N_P = 2 sinh² r`. `N_P²` stands
/// for `sinh² 2r = N_P² + 2N_P`, which it approaches for `r ≫ 1`.
pub fn original_scheme_qfi(r: f64, squeezing_phase: f64, channel_phase: f64, strength: f64) -> f64 {
    let np = side_population(r);
    0.25 * strength * strength * (1.0 + (squeezing_phase - channel_phase).sin().powi(2) * np * np)
}

/// Smallest detectable strain `1/√(M H)` with `M = N_d τ / t` repetitions.
pub fn qcrb_sensitivity(qfi: f64, n_detectors: f64, tau: f64, t: f64) -> Result<f64> {
    positive("QFI", qfi)?;
    positive("detector count", n_detectors)?;
    positive("integration time", tau)?;
    positive("interaction time", t)?;
    Ok(1.0 / (n_detectors * tau / t * qfi).sqrt())
}

/// Bare versus pumped-up QFI for the same channel strength, both at
/// optimal phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeComparison {
    /// Bare scheme at `r_original`.
    pub original: f64,
    /// Pumped-up scheme at small `θ`, keeping the `θ⁰` terms.
    pub pumped_small_angle: f64,
    /// Leading pumped-up term `½K²θ²N₀N`.
    pub pumped_leading: f64,
    pub ratio_small_angle: f64,
    pub ratio_leading: f64,
}

/// Compares the bare scheme at `r_original` with the pumped-up scheme at
/// `r_pumped` and tritter angle `θ`, for pump population `N₀`. `θ` must
/// keep the pump undepleted after the tritter.
pub fn compare_at(strength: f64, pump: f64, r_original: f64, r_pumped: f64, theta: f64) -> Result<SchemeComparison> {
    positive("pump population", pump)?;
    if !(theta >= 0.0) || !r_original.is_finite() || !r_pumped.is_finite() {
        return Err(Error::InvalidArgument("need θ ≥ 0 and finite r".into()));
    }
    let n = side_population(r_pumped);
    let bound = max_tritter_angle(n / pump, UNDEPLETED_DELTA)?;
    if theta * theta > bound * bound * ANGLE_SLACK {
        return Err(Error::Regime(format!(
            "θ = {theta} exceeds the undepleted-pump bound {bound}"
        )));
    }
    let k2 = strength * strength;
    let original = original_scheme_qfi(r_original, std::f64::consts::FRAC_PI_2, 0.0, strength);
    let pumped_small_angle =
        0.25 * k2 * (1.0 + n * n + theta * theta * (pump * (2.0 * r_pumped).exp() + 0.5 * n - n * n));
    let pumped_leading = 0.5 * k2 * theta * theta * pump * n;
    Ok(SchemeComparison {
        original,
        pumped_small_angle,
        pumped_leading,
        ratio_small_angle: pumped_small_angle / original,
        ratio_leading: pumped_leading / original,
    })
}

/// [`compare_at`] for a detector, with both schemes at the detector's `r`.
pub fn compare_schemes(params: &GwDetectorParams) -> Result<SchemeComparison> {
    let spec = channel_strength(params)?;
    let side = side_population(params.squeezing);
    compare_at(
        spec.strength,
        params.total_particles - side,
        params.squeezing,
        params.squeezing,
        params.tritter_angle,
    )
}

/// Exact closed-form QFI of the detector's interferometer.
pub fn detector_qfi(params: &GwDetectorParams) -> Result<f64> {
    qfi_closed_form(&params.interferometer()?, Regime::Exact)
}
