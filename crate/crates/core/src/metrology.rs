//! Quantum Fisher information, number-sum and heterodyne moments, and
//! measurement sensitivity.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::channels::ChannelKind;
use crate::diff::{derivative, matrix_derivative, DEFAULT_STEP};
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::pipeline::{max_tritter_angle, InterferometerConfig, PreparedInterferometer};

/// Largest accepted condition number of the covariance matrix.
pub const MAX_CONDITION: f64 = 1e12;
/// Default evaluation point for the number-sum sensitivity.
pub const DEFAULT_SENSITIVITY_EPS0: f64 = 1e-3;
/// Smallest `N̄` for which large-`N̄` expressions are accepted.
pub const LARGE_N_MIN: f64 = 1e4;
/// Side-to-pump population ratio allowed after the tritter in the
/// undepleted-pump regimes.
pub const UNDEPLETED_DELTA: f64 = 0.1;

const PURE_TOL: f64 = 1e-9;
const ANGLE_TOL: f64 = 1e-9;
const TURNING_TOL: f64 = 1e-6;
const PHASE_TOL: f64 = 1e-9;
// θ² may exceed the undepleted bound by this factor; quoted working
// points round θ² up in the third digit.
const ANGLE_SLACK: f64 = 1.01;

/// Which closed-form expression to evaluate. Never inferred from the
/// parameters; each label checks its own preconditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    /// Full expression, valid everywhere.
    Exact,
    /// `θ = 0`, exact.
    ThetaZero,
    /// `θ = 0` with `sinh² 2r` replaced by `N²`.
    ThetaZeroLargeR,
    /// `θ = π/2` (mode mixing additionally `φ_A = π/2`), exact.
    ThetaHalfPi,
    /// `θ = π/2` with `sinh² 2r` replaced by `N²`.
    ThetaHalfPiLargeR,
    /// Optimal working angle at large `N̄`: `θ = θ_t` for squeezing,
    /// `θ = π/2, φ_A = 0` for mode mixing. Optimal phases required.
    TurningPoint,
    /// [`Regime::TurningPoint`] further simplified for `r ≫ 1`.
    TurningPointLargeR,
    /// Leading order in `N̄`.
    LargeN,
    /// Leading order in `N̄` at optimal phases and `N ≫ 1`.
    LargeNOptimal,
    /// Small tritter angle keeping the pump undepleted.
    Undepleted,
    /// Undepleted pump, `r ≫ 1`, `N̄ ≫ 1`: `½ K² θ² N₀ N`.
    Pumped,
}

impl Regime {
    pub const ALL: [Regime; 11] = [
        Regime::Exact,
        Regime::ThetaZero,
        Regime::ThetaZeroLargeR,
        Regime::ThetaHalfPi,
        Regime::ThetaHalfPiLargeR,
        Regime::TurningPoint,
        Regime::TurningPointLargeR,
        Regime::LargeN,
        Regime::LargeNOptimal,
        Regime::Undepleted,
        Regime::Pumped,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Exact => "exact",
            Regime::ThetaZero => "theta-zero",
            Regime::ThetaZeroLargeR => "theta-zero-large-r",
            Regime::ThetaHalfPi => "theta-half-pi",
            Regime::ThetaHalfPiLargeR => "theta-half-pi-large-r",
            Regime::TurningPoint => "turning-point",
            Regime::TurningPointLargeR => "turning-point-large-r",
            Regime::LargeN => "large-n",
            Regime::LargeNOptimal => "large-n-optimal",
            Regime::Undepleted => "undepleted",
            Regime::Pumped => "pumped",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Regime::ALL
            .into_iter()
            .find(|r| r.as_str() == s.trim())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown regime '{s}'")))
    }
}

/// Exact or large-`N̄` optimal tritter angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TurningMode {
    Exact,
    Approx,
}

fn invert_covariance(sigma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = sigma.clone().symmetric_eigen();
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if !(min > 0.0) {
        return Err(Error::IllConditioned { cond: f64::INFINITY });
    }
    let cond = max / min;
    if cond > MAX_CONDITION {
        return Err(Error::IllConditioned { cond });
    }
    sigma
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or(Error::IllConditioned { cond })
}

fn check_eval_point(eps0: f64) -> Result<()> {
    if eps0 >= 0.0 && eps0.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "evaluation point ε₀ must be non-negative, got {eps0}"
        )))
    }
}

/// `[σ | d]` stacked column-wise so one finite difference covers both.
fn stacked(state: &GaussianState) -> DMatrix<f64> {
    let n = state.covariance().nrows();
    let mut m = DMatrix::zeros(n, n + 1);
    m.view_mut((0, 0), (n, n)).copy_from(state.covariance());
    m.column_mut(n).copy_from(state.displacement());
    m
}

/// QFI of the pre-measurement family `S_ε S₊` with respect to `ε`,
/// evaluated at `ε₀` with finite-difference step `h`.
pub fn qfi_numeric(config: &InterferometerConfig, eps0: f64, h: f64) -> Result<f64> {
    check_eval_point(eps0)?;
    let prepared = PreparedInterferometer::new(config)?;
    qfi_prepared(&prepared, eps0, h)
}

fn qfi_prepared(prepared: &PreparedInterferometer, eps0: f64, h: f64) -> Result<f64> {
    let state = prepared.probe(eps0)?;
    let n = state.covariance().nrows();
    let inv = invert_covariance(state.covariance())?;
    let dot = matrix_derivative(|e| Ok(stacked(&prepared.probe(e)?)), eps0, h)?;
    let sigma_dot = dot.view((0, 0), (n, n)).into_owned();
    let d_dot: DVector<f64> = dot.column(n).into_owned();

    let mu = state.purity()?;
    let a = &inv * &sigma_dot;
    let mut qfi = 0.5 * (&a * &a).trace() / (1.0 + mu * mu) + (d_dot.transpose() * &inv * &d_dot)[(0, 0)];
    if (1.0 - mu).abs() >= PURE_TOL {
        let mu_dot = derivative(|e| prepared.probe(e)?.purity(), eps0, h)?;
        qfi += 2.0 * mu_dot * mu_dot / (1.0 - mu.powi(4));
    }
    if qfi.is_finite() {
        Ok(qfi)
    } else {
        Err(Error::NonFinite("quantum Fisher information"))
    }
}

/// The combinations of angles and populations shared by the closed forms.
struct Terms {
    total: f64,
    pump: f64,
    side: f64,
    r: f64,
    theta: f64,
    k2: f64,
    eta1: f64,
    eta2: f64,
    eta3: f64,
    phi1: f64,
    sin2_phase: f64,
}

impl Terms {
    fn new(c: &InterferometerConfig) -> Self {
        let r = c.squeezing;
        let side = 2.0 * r.sinh().powi(2);
        let (sh2, ch2) = ((2.0 * r).sinh(), (2.0 * r).cosh());
        let phi = c.channel.phase;
        let s2t = c.tritter_angle.sin().powi(2);
        Self {
            total: c.total_particles,
            pump: c.total_particles - side,
            side,
            r,
            theta: c.tritter_angle,
            k2: c.channel.strength * c.channel.strength,
            eta1: sh2 * squeezing_phase_arg(c).cos() + ch2,
            eta2: (c.squeezing_phase - phi).sin().powi(2),
            eta3: sh2 * mixing_phase_arg(c).cos() - ch2,
            phi1: s2t * phi.sin().powi(2) - 1.0,
            sin2_phase: phi.sin().powi(2),
        }
    }

    fn sinh2_2r(&self) -> f64 {
        (2.0 * self.r).sinh().powi(2)
    }
}

fn squeezing_phase_arg(c: &InterferometerConfig) -> f64 {
    2.0 * c.tritter_phase - 2.0 * c.pump_phase - c.squeezing_phase + 2.0 * c.channel.phase
}

fn mixing_phase_arg(c: &InterferometerConfig) -> f64 {
    2.0 * c.tritter_phase - 2.0 * c.pump_phase + c.squeezing_phase
}

/// Full squeezing-channel QFI. No validation, so it can be evaluated
/// slightly outside `[0, π/2]` for derivatives at the boundary.
pub fn squeezing_qfi_formula(c: &InterferometerConfig) -> f64 {
    let t = Terms::new(c);
    let th = t.theta;
    let s2 = (2.0 * th).sin().powi(2);
    t.k2 / 16.0
        * (4.0
            + s2 * t.r.sinh().powi(2)
            + 2.0 * (1.0 + th.cos().powi(4)) * t.eta2 * t.sinh2_2r()
            + t.pump * (4.0 * th.sin().powi(4) + t.eta1 * s2))
}

/// Full mode-mixing-channel QFI, unvalidated like [`squeezing_qfi_formula`].
pub fn mode_mixing_qfi_formula(c: &InterferometerConfig) -> f64 {
    let t = Terms::new(c);
    let s2 = t.theta.sin().powi(2);
    t.k2 / 8.0
        * ((1.0 + t.theta.cos().powi(2)) * t.sinh2_2r()
            + s2 * t.phi1 * (t.sinh2_2r() - t.side)
            + 2.0 * t.pump * s2 * (s2 * t.sin2_phase + t.phi1 * t.eta3))
}

/// Full closed-form QFI for the configured channel, unvalidated.
pub fn qfi_formula(c: &InterferometerConfig) -> Result<f64> {
    match c.channel.kind {
        ChannelKind::Squeezing => Ok(squeezing_qfi_formula(c)),
        ChannelKind::ModeMixing => Ok(mode_mixing_qfi_formula(c)),
        ChannelKind::Phase => Err(Error::InvalidArgument(
            "no closed form is provided for the phase channel".into(),
        )),
    }
}

/// Whether the phases satisfy the optimal relations of
/// [`InterferometerConfig::with_optimal_phases`] (mode mixing: the tritter
/// relation only; `φ_A` is checked separately where it matters).
pub fn has_optimal_phases(c: &InterferometerConfig) -> bool {
    match c.channel.kind {
        ChannelKind::Squeezing => {
            let t = Terms::new(c);
            (t.eta2 - 1.0).abs() <= PHASE_TOL && (squeezing_phase_arg(c).cos() - 1.0).abs() <= PHASE_TOL
        }
        ChannelKind::ModeMixing => (mixing_phase_arg(c).cos() + 1.0).abs() <= PHASE_TOL,
        ChannelKind::Phase => false,
    }
}

fn regime_error(regime: Regime, why: impl fmt::Display) -> Error {
    Error::Regime(format!("{regime}: {why}"))
}

fn require_angle(regime: Regime, theta: f64, want: f64, tol: f64) -> Result<()> {
    if (theta - want).abs() <= tol {
        Ok(())
    } else {
        Err(regime_error(regime, format!("requires θ = {want}, got {theta}")))
    }
}

fn require_large_n(regime: Regime, c: &InterferometerConfig) -> Result<()> {
    if c.total_particles >= LARGE_N_MIN {
        Ok(())
    } else {
        Err(regime_error(
            regime,
            format!("requires N̄ ≥ {LARGE_N_MIN:e}, got {}", c.total_particles),
        ))
    }
}

fn require_optimal(regime: Regime, c: &InterferometerConfig) -> Result<()> {
    if has_optimal_phases(c) {
        Ok(())
    } else {
        Err(regime_error(regime, "requires the optimal phase relations"))
    }
}

fn require_undepleted(regime: Regime, c: &InterferometerConfig) -> Result<()> {
    let (pump, side) = c.populations()?;
    let bound = max_tritter_angle(side / pump, UNDEPLETED_DELTA).map_err(|e| regime_error(regime, e))?;
    if c.tritter_angle.powi(2) <= bound.powi(2) * ANGLE_SLACK {
        Ok(())
    } else {
        Err(regime_error(
            regime,
            format!("θ = {} exceeds the undepleted-pump bound {bound}", c.tritter_angle),
        ))
    }
}

fn require_turning_point(regime: Regime, c: &InterferometerConfig) -> Result<()> {
    require_large_n(regime, c)?;
    require_optimal(regime, c)?;
    match c.channel.kind {
        ChannelKind::Squeezing => {
            let (_, side) = c.populations()?;
            if !(side > 0.0) {
                return Err(regime_error(regime, "requires r > 0"));
            }
            let theta_t = optimal_tritter_angle(c.total_particles, side, TurningMode::Exact)?;
            require_angle(regime, c.tritter_angle, theta_t, TURNING_TOL)
        }
        _ => {
            require_angle(regime, c.tritter_angle, FRAC_PI_2, ANGLE_TOL)?;
            if c.channel.phase.sin().abs() > PHASE_TOL {
                return Err(regime_error(regime, "requires φ_A = 0"));
            }
            Ok(())
        }
    }
}

fn check_regime(c: &InterferometerConfig, regime: Regime) -> Result<()> {
    match regime {
        Regime::Exact => Ok(()),
        Regime::ThetaZero | Regime::ThetaZeroLargeR => require_angle(regime, c.tritter_angle, 0.0, ANGLE_TOL),
        Regime::ThetaHalfPi | Regime::ThetaHalfPiLargeR => {
            require_angle(regime, c.tritter_angle, FRAC_PI_2, ANGLE_TOL)?;
            if c.channel.kind == ChannelKind::ModeMixing && c.channel.phase.cos().abs() > PHASE_TOL {
                return Err(regime_error(regime, "requires φ_A = π/2"));
            }
            Ok(())
        }
        Regime::TurningPoint | Regime::TurningPointLargeR => require_turning_point(regime, c),
        Regime::LargeN => require_large_n(regime, c),
        Regime::LargeNOptimal => {
            require_large_n(regime, c)?;
            require_optimal(regime, c)
        }
        Regime::Undepleted => {
            require_optimal(regime, c)?;
            require_undepleted(regime, c)
        }
        Regime::Pumped => {
            require_large_n(regime, c)?;
            require_optimal(regime, c)?;
            require_undepleted(regime, c)
        }
    }
}

fn squeezing_regime(t: &Terms, regime: Regime) -> f64 {
    let b2 = t.k2;
    let (n, n0, nb) = (t.side, t.pump, t.total);
    let th = t.theta;
    match regime {
        Regime::ThetaZero => 0.25 * b2 * (1.0 + t.eta2 * t.sinh2_2r()),
        Regime::ThetaZeroLargeR => 0.25 * b2 * (1.0 + t.eta2 * n * n),
        Regime::ThetaHalfPi => 0.25 * b2 * (1.0 + n0 + 0.5 * t.eta2 * t.sinh2_2r()),
        Regime::ThetaHalfPiLargeR => 0.25 * b2 * (1.0 + n0 + 0.5 * t.eta2 * n * n),
        Regime::TurningPoint => b2 / 32.0 * nb * (2.0 * t.r).exp() * (1.0 + 1.0 / t.r.tanh()),
        Regime::TurningPointLargeR => b2 / 8.0 * nb * n,
        Regime::LargeN => 0.25 * b2 * nb * (th.sin().powi(4) + 0.25 * (2.0 * th).sin().powi(2) * t.eta1),
        Regime::LargeNOptimal => b2 / 8.0 * (2.0 * th).sin().powi(2) * n * nb,
        Regime::Undepleted => 0.25 * b2 * (1.0 + n * n + th * th * (n0 * (2.0 * t.r).exp() + 0.5 * n - n * n)),
        Regime::Pumped => 0.5 * b2 * th * th * n0 * n,
        Regime::Exact => unreachable!("handled by the caller"),
    }
}

fn mixing_regime(t: &Terms, regime: Regime) -> f64 {
    let a2 = t.k2;
    let (n, n0, nb) = (t.side, t.pump, t.total);
    let th = t.theta;
    let s2 = th.sin().powi(2);
    match regime {
        Regime::ThetaZero => 0.25 * a2 * t.sinh2_2r(),
        Regime::ThetaZeroLargeR => 0.25 * a2 * n * n,
        Regime::ThetaHalfPi => 0.25 * a2 * (n0 + 0.5 * t.sinh2_2r()),
        Regime::ThetaHalfPiLargeR => 0.25 * a2 * (n0 + 0.5 * n * n),
        Regime::TurningPoint => 0.25 * a2 * (nb * (2.0 * t.r).exp() + n),
        Regime::TurningPointLargeR => 0.5 * a2 * nb * n,
        Regime::LargeN => 0.25 * a2 * nb * s2 * (s2 * t.sin2_phase + t.phi1 * t.eta3),
        Regime::LargeNOptimal => 0.5 * a2 * s2 * (1.0 - s2 * t.sin2_phase) * nb * n,
        Regime::Undepleted => 0.25 * a2 * (n * n + th * th * (n0 * (2.0 * t.r).exp() + 0.5 * n - n * n)),
        Regime::Pumped => 0.5 * a2 * th * th * n0 * n,
        Regime::Exact => unreachable!("handled by the caller"),
    }
}

/// Closed-form QFI in the requested regime, after checking that the
/// configuration satisfies the regime's preconditions.
pub fn qfi_closed_form(c: &InterferometerConfig, regime: Regime) -> Result<f64> {
    c.validate()?;
    check_regime(c, regime)?;
    if regime == Regime::Exact {
        return qfi_formula(c);
    }
    let t = Terms::new(c);
    match c.channel.kind {
        ChannelKind::Squeezing => Ok(squeezing_regime(&t, regime)),
        ChannelKind::ModeMixing => Ok(mixing_regime(&t, regime)),
        ChannelKind::Phase => qfi_formula(c),
    }
}

/// Turning point `θ_t` of the squeezing-channel QFI at optimal phases.
pub fn optimal_tritter_angle(total: f64, side: f64, mode: TurningMode) -> Result<f64> {
    if !(side > 0.0) || !(total > side) || !total.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need N̄ > N > 0, got N̄ = {total}, N = {side}"
        )));
    }
    let root = (side * (side + 2.0)).sqrt();
    match mode {
        TurningMode::Exact => {
            let z = (side * (side + 4.0) - 2.0 * total)
                / (side * (2.0 * total - 3.0 * side - 1.0) + 2.0 * (total - side) * root);
            if !(-1.0..=1.0).contains(&z) {
                return Err(Error::InvalidArgument(format!(
                    "turning-point cosine {z} outside [-1, 1]"
                )));
            }
            Ok(0.5 * z.acos())
        }
        TurningMode::Approx => Ok(FRAC_PI_4 + 0.5 * (1.0 / (side + root)).asin()),
    }
}

fn require_two_modes(state: &GaussianState) -> Result<()> {
    if state.n_modes() == 2 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: 2,
            found: state.n_modes(),
        })
    }
}

/// Mean and variance of the total side-mode number `N̂ = n̂₁ + n̂₂`.
pub fn number_sum_moments(state: &GaussianState) -> Result<(f64, f64)> {
    require_two_modes(state)?;
    let (d, s) = (state.displacement(), state.covariance());
    let n = 2.0;
    let mean = 0.25 * (s.trace() + d.dot(d) - 2.0 * n);
    let var = 0.125 * ((s * s).trace() + 2.0 * (d.transpose() * s * d)[(0, 0)] - 2.0 * n);
    Ok((mean, var))
}

/// Mean and variance of the number difference `n̂₁ − n̂₂`.
pub fn heterodyne_moments(state: &GaussianState) -> Result<(f64, f64)> {
    require_two_modes(state)?;
    let jz = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, -1.0, -1.0]));
    let (d, s) = (state.displacement(), state.covariance());
    let sj = s * &jz;
    let jd = &jz * d;
    let mean = 0.25 * (sj.trace() + d.dot(&jd));
    let var = 0.125 * ((&sj * &sj).trace() + 2.0 * (jd.transpose() * s * &jd)[(0, 0)] - 4.0);
    Ok((mean, var))
}

/// Number-sum measurement at one evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensitivity {
    /// `Δ²ε = Var(Ŝ) / (∂_ε⟨Ŝ⟩)²`.
    pub delta2: f64,
    /// `F₀ = 1 / Δ²ε`.
    pub f0: f64,
    pub mean: f64,
    pub var: f64,
    /// `∂_ε⟨Ŝ⟩`.
    pub slope: f64,
}

fn side_moments(p: &PreparedInterferometer, eps: f64) -> Result<(f64, f64)> {
    number_sum_moments(&p.output_side_modes(eps)?)
}

fn sensitivity_prepared(p: &PreparedInterferometer, eps0: f64, h: f64) -> Result<Sensitivity> {
    let (mean, var) = side_moments(p, eps0)?;
    let slope = derivative(|e| Ok(side_moments(p, e)?.0), eps0, h)?;
    // roundoff floor of the difference quotient
    let scale = side_moments(p, eps0 + h)?.0.abs().max(mean.abs()).max(1.0);
    if slope.abs() <= 100.0 * f64::EPSILON * scale / h {
        return Err(Error::VanishingSignal);
    }
    if !(var > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let delta2 = var / (slope * slope);
    Ok(Sensitivity {
        delta2,
        f0: 1.0 / delta2,
        mean,
        var,
        slope,
    })
}

/// Sensitivity of the number-sum measurement on the side modes at `ε₀`.
pub fn sensitivity_number_sum(c: &InterferometerConfig, eps0: f64, h: f64) -> Result<Sensitivity> {
    check_eval_point(eps0)?;
    sensitivity_prepared(&PreparedInterferometer::new(c)?, eps0, h)
}

/// `F₀` extrapolated to `ε₀ → 0`, `2 F₀(ε₀/2) − F₀(ε₀)`, removing the
/// linear bias of evaluating at a finite `ε₀`.
pub fn f0_extrapolated(c: &InterferometerConfig, eps0: f64, h: f64) -> Result<f64> {
    if !(eps0 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "extrapolation needs ε₀ > 0, got {eps0}"
        )));
    }
    let p = PreparedInterferometer::new(c)?;
    let full = sensitivity_prepared(&p, eps0, h)?.f0;
    let half = sensitivity_prepared(&p, 0.5 * eps0, h)?.f0;
    Ok(2.0 * half - full)
}

/// Closed-form `F₀` of the number-sum measurement in the limit `ε → 0`.
/// Supports [`Regime::Exact`], [`Regime::LargeN`] and [`Regime::Pumped`].
pub fn f0_closed_form(c: &InterferometerConfig, regime: Regime) -> Result<f64> {
    c.validate()?;
    check_regime(c, regime)?;
    let t = Terms::new(c);
    let th = t.theta;
    match (c.channel.kind, regime) {
        (ChannelKind::Squeezing, Regime::Exact) => {
            let p = (t.pump * t.eta1 + t.r.cosh().powi(2)) * (2.0 * th).sin().powi(2);
            let q = (1.0 + th.cos().powi(4)) * (t.sinh2_2r() * t.eta2 + 1.0);
            Ok(t.k2 / 16.0 * (p + 4.0 * q).powi(2) / (p + 8.0 * q))
        }
        (ChannelKind::ModeMixing, Regime::Exact) => {
            let (mean, var) = mixing_moment_coefficients(&t);
            Ok(0.25 * t.k2 * mean * mean / var)
        }
        (ChannelKind::Squeezing, Regime::LargeN) => Ok(t.k2 / 16.0 * (2.0 * th).sin().powi(2) * t.eta1 * t.total),
        (ChannelKind::ModeMixing, Regime::LargeN) => Ok(0.25 * t.k2 * th.sin().powi(2) * t.phi1 * t.eta3 * t.total),
        (ChannelKind::Squeezing | ChannelKind::ModeMixing, Regime::Pumped) => {
            Ok(0.5 * t.k2 * th * th * t.pump * t.side)
        }
        (kind, regime) => Err(Error::InvalidArgument(format!(
            "no closed-form F₀ for the {kind} channel in regime {regime}"
        ))),
    }
}

/// `(⟨Ŝ⟩, Var Ŝ)` of the mode-mixing interferometer divided by `m²`, to
/// leading order in `m`.
fn mixing_moment_coefficients(t: &Terms) -> (f64, f64) {
    let s2t = t.theta.sin().powi(2);
    let sh2r = t.r.sinh().powi(2);
    let sh22 = t.sinh2_2r();
    let mean = s2t * (t.phi1 * t.pump * t.eta3 - t.phi1 * sh2r + (t.phi1 - 1.0) * sh22) + 2.0 * sh22;
    let var = t.phi1 * s2t * (t.pump * t.eta3 - sh2r + 2.0 * sh22) + 2.0 * (1.0 + t.theta.cos().powi(2)) * sh22;
    (mean, var)
}

/// Leading-order side-mode number-sum moments `(⟨Ŝ⟩, Var Ŝ)` for a
/// squeezing or mode-mixing channel at the configured `ε`.
pub fn number_sum_moments_closed_form(c: &InterferometerConfig) -> Result<(f64, f64)> {
    c.validate()?;
    let t = Terms::new(c);
    let x = c.channel.argument();
    match c.channel.kind {
        ChannelKind::Squeezing => {
            let th = t.theta;
            let p = (t.pump * t.eta1 + t.r.cosh().powi(2)) * (2.0 * th).sin().powi(2);
            let q = (1.0 + th.cos().powi(4)) * (t.sinh2_2r() * t.eta2 + 1.0);
            Ok((0.25 * x * x * (p + 4.0 * q), 0.25 * x * x * (p + 8.0 * q)))
        }
        ChannelKind::ModeMixing => {
            let (mean, var) = mixing_moment_coefficients(&t);
            Ok((x * x * mean, x * x * var))
        }
        ChannelKind::Phase => Err(Error::InvalidArgument(
            "no closed-form moments for the phase channel".into(),
        )),
    }
}

/// Gaussian Fisher information of the number-sum measurement built from
/// its first two moments, `F₀ + 2(∂_ε √Var)² / Var`.
pub fn fisher_from_moments(c: &InterferometerConfig, eps0: f64, h: f64) -> Result<f64> {
    check_eval_point(eps0)?;
    let p = PreparedInterferometer::new(c)?;
    let sens = sensitivity_prepared(&p, eps0, h)?;
    let sd_slope = derivative(|e| Ok(side_moments(&p, e)?.1.max(0.0).sqrt()), eps0, h)?;
    Ok(sens.f0 + 2.0 * sd_slope * sd_slope / sens.var)
}

/// Settings for [`metrology_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub qfi_eps0: f64,
    pub sensitivity_eps0: f64,
    pub step: f64,
    pub regime: Regime,
    pub turning_point: Option<TurningMode>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            qfi_eps0: 0.0,
            sensitivity_eps0: DEFAULT_SENSITIVITY_EPS0,
            step: DEFAULT_STEP,
            regime: Regime::Exact,
            turning_point: None,
        }
    }
}

/// Everything known about one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct MetrologyReport {
    pub h_numeric: f64,
    pub h_closed_form: f64,
    pub f0: f64,
    pub mean_s: f64,
    pub var_s: f64,
    pub theta_t: Option<f64>,
    pub regime_labels: Vec<Regime>,
}

pub fn metrology_report(c: &InterferometerConfig, opts: &ReportOptions) -> Result<MetrologyReport> {
    check_eval_point(opts.qfi_eps0)?;
    check_eval_point(opts.sensitivity_eps0)?;
    let p = PreparedInterferometer::new(c)?;
    let h_numeric = qfi_prepared(&p, opts.qfi_eps0, opts.step)?;
    let h_closed_form = qfi_closed_form(c, opts.regime)?;
    let sens = sensitivity_prepared(&p, opts.sensitivity_eps0, opts.step)?;
    let theta_t = match opts.turning_point {
        Some(mode) => {
            let (_, side) = c.populations()?;
            Some(optimal_tritter_angle(c.total_particles, side, mode)?)
        }
        None => None,
    };
    Ok(MetrologyReport {
        h_numeric,
        h_closed_form,
        f0: sens.f0,
        mean_s: sens.mean,
        var_s: sens.var,
        theta_t,
        regime_labels: vec![opts.regime],
    })
}
