//! Symplectic matrices for the interferometer elements and the estimation
//! channels.
//!
//! Mode layout is pump first (rows 0–1), then side modes 1 and 2. The 4×4
//! channel constructors act on the side modes only; use
//! [`embed_on_side_modes`] to place them in the three-mode pipeline.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::gaussian::{check_symplectic, SymplecticOp, SYMPLECTIC_TOL};

/// Reflection `[[cos φ, sin φ], [sin φ, −cos φ]]` used by squeezers.
pub fn reflection(phi: f64) -> [[f64; 2]; 2] {
    [[phi.cos(), phi.sin()], [phi.sin(), -phi.cos()]]
}

/// Rotation `[[cos φ, sin φ], [−sin φ, cos φ]]` used by mode mixers.
pub fn rotation(phi: f64) -> [[f64; 2]; 2] {
    [[phi.cos(), phi.sin()], [-phi.sin(), phi.cos()]]
}

fn set_block(m: &mut DMatrix<f64>, row: usize, col: usize, b: [[f64; 2]; 2], scale: f64) {
    for i in 0..2 {
        for j in 0..2 {
            m[(row + i, col + j)] = scale * b[i][j];
        }
    }
}

fn transpose2(b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [[b[0][0], b[1][0]], [b[0][1], b[1][1]]]
}

const I2: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 1.0]];

/// Two-mode block matrix `[[diag·1, off·B], [off_lower·C, diag·1]]`.
fn two_mode_block(
    diag: f64,
    upper: [[f64; 2]; 2],
    upper_scale: f64,
    lower: [[f64; 2]; 2],
    lower_scale: f64,
) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(4, 4);
    set_block(&mut m, 0, 0, I2, diag);
    set_block(&mut m, 2, 2, I2, diag);
    set_block(&mut m, 0, 2, upper, upper_scale);
    set_block(&mut m, 2, 0, lower, lower_scale);
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelKind {
    Squeezing,
    ModeMixing,
    Phase,
}

impl ChannelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ChannelKind::Squeezing => "squeezing",
            ChannelKind::ModeMixing => "mode_mixing",
            ChannelKind::Phase => "phase",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "squeezing" => Ok(ChannelKind::Squeezing),
            "mode_mixing" | "modemixing" => Ok(ChannelKind::ModeMixing),
            "phase" => Ok(ChannelKind::Phase),
            other => Err(Error::InvalidArgument(format!("unknown channel kind '{other}'"))),
        }
    }
}

/// The estimation channel acting on the side modes.
///
/// The channel argument is `s = εB/4` (squeezing) or `m = εA/4` (mode
/// mixing), with `strength` the constant `B` or `A`, which does not include
/// `ε`. For the phase channel the rotation angle is `φ = ε·strength` and
/// `phase` is not used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub strength: f64,
    pub phase: f64,
    pub epsilon: f64,
}

impl ChannelSpec {
    /// Negative strengths of the squeezing and mode-mixing channels are
    /// folded into a phase shift of π.
    pub fn new(kind: ChannelKind, strength: f64, phase: f64, epsilon: f64) -> Result<Self> {
        if !strength.is_finite() || !phase.is_finite() || !epsilon.is_finite() {
            return Err(Error::NonFinite("channel parameters"));
        }
        let (strength, phase) = if strength < 0.0 {
            match kind {
                ChannelKind::Phase => {
                    return Err(Error::InvalidArgument(
                        "phase channel strength must be non-negative".into(),
                    ))
                }
                _ => (-strength, phase + std::f64::consts::PI),
            }
        } else {
            (strength, phase)
        };
        Ok(Self {
            kind,
            strength,
            phase,
            epsilon,
        })
    }

    pub fn squeezing(strength: f64, phase: f64, epsilon: f64) -> Result<Self> {
        Self::new(ChannelKind::Squeezing, strength, phase, epsilon)
    }

    pub fn mode_mixing(strength: f64, phase: f64, epsilon: f64) -> Result<Self> {
        Self::new(ChannelKind::ModeMixing, strength, phase, epsilon)
    }

    pub fn phase_shift(strength: f64, epsilon: f64) -> Result<Self> {
        Self::new(ChannelKind::Phase, strength, 0.0, epsilon)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self { epsilon, ..*self }
    }

    /// `s`, `m` or `φ` for the current `ε`.
    pub fn argument(&self) -> f64 {
        match self.kind {
            ChannelKind::Squeezing | ChannelKind::ModeMixing => 0.25 * self.epsilon * self.strength,
            ChannelKind::Phase => self.epsilon * self.strength,
        }
    }

    /// Three-mode symplectic matrix of the channel (identity on the pump).
    pub fn symplectic(&self) -> Result<SymplecticOp> {
        let x = self.argument();
        match self.kind {
            ChannelKind::Squeezing => embed_on_side_modes(&squeezing_channel(x, self.phase)),
            ChannelKind::ModeMixing => embed_on_side_modes(&mode_mixing_channel(x, self.phase)),
            ChannelKind::Phase => Ok(phase_channel(x)),
        }
    }
}

/// Source squeezer on the side modes with parameter `r` and phase `ϑ_sq`.
pub fn pumped_two_mode_squeezer(r: f64, phase: f64) -> SymplecticOp {
    let block = two_mode_block(r.cosh(), reflection(phase), r.sinh(), reflection(phase), r.sinh());
    embed_unchecked(&block)
}

/// Three-way beam splitter between the pump and both side modes.
pub fn tritter(theta: f64, phase: f64) -> SymplecticOp {
    let c = theta.cos();
    let st = FRAC_1_SQRT_2 * theta.sin();
    let (sv, cv) = phase.sin_cos();
    let diag = (0.5 * theta).cos().powi(2);
    let cross = 0.5 * (c - 1.0);
    #[rustfmt::skip]
    let rows = [
        c,        0.0,      st * sv,  st * cv,  st * sv,  st * cv,
        0.0,      c,       -st * cv,  st * sv, -st * cv,  st * sv,
       -st * sv,  st * cv,  diag,     0.0,      cross,    0.0,
       -st * cv, -st * sv,  0.0,      diag,     0.0,      cross,
       -st * sv,  st * cv,  cross,    0.0,      diag,     0.0,
       -st * cv, -st * sv,  0.0,      cross,    0.0,      diag,
    ];
    SymplecticOp::new_unchecked(DMatrix::from_row_slice(6, 6, &rows)).expect("6x6 shape is valid")
}

/// Real generator `K` of the tritter in `q,p` form, so that
/// `tritter(θ, ϑ) = exp(θK)`.
///
/// Derived from the Heisenberg equations of
/// `H = (G/√2)[e^{iϑ} a₀†(a₁ + a₂) + h.c.]`:
/// `ȧ₀ = c (a₁ + a₂)` with `c = −i e^{iϑ}/√2` and `ȧⱼ = c' a₀` with
/// `c' = −i e^{−iϑ}/√2`. A linear map `ȧ = z a` becomes
/// `q̇ = Re z q − Im z p`, `ṗ = Im z q + Re z p` on the quadratures.
pub fn tritter_generator(phase: f64) -> DMatrix<f64> {
    let (sv, cv) = phase.sin_cos();
    // c = (sin ϑ − i cos ϑ)/√2, c' = (−sin ϑ − i cos ϑ)/√2
    let (c_re, c_im) = (FRAC_1_SQRT_2 * sv, -FRAC_1_SQRT_2 * cv);
    let (cp_re, cp_im) = (-FRAC_1_SQRT_2 * sv, -FRAC_1_SQRT_2 * cv);
    let mut k = DMatrix::zeros(6, 6);
    for side in [2usize, 4] {
        k[(0, side)] += c_re;
        k[(0, side + 1)] += -c_im;
        k[(1, side)] += c_im;
        k[(1, side + 1)] += c_re;
        k[(side, 0)] = cp_re;
        k[(side, 1)] = -cp_im;
        k[(side + 1, 0)] = cp_im;
        k[(side + 1, 1)] = cp_re;
    }
    k
}

/// Tritter obtained by exponentiating its Hamiltonian generator.
pub fn tritter_from_generator(theta: f64, phase: f64) -> Result<SymplecticOp> {
    let s = expm(&(tritter_generator(phase) * theta))?;
    SymplecticOp::new(s)
}

/// Two-mode squeezing channel `U(ξ)`, `ξ = s e^{iφ_B}`, on the side modes.
pub fn squeezing_channel(s: f64, phase: f64) -> SymplecticOp {
    let b = two_mode_block(s.cosh(), reflection(phase), s.sinh(), reflection(phase), s.sinh());
    SymplecticOp::new_unchecked(b).expect("4x4 shape is valid")
}

/// Mode-mixing channel with mixing angle `m` and phase `φ_A`.
pub fn mode_mixing_channel(m: f64, phase: f64) -> SymplecticOp {
    let r = rotation(phase);
    let b = two_mode_block(m.cos(), r, m.sin(), transpose2(r), -m.sin());
    SymplecticOp::new_unchecked(b).expect("4x4 shape is valid")
}

/// Phase evolution `exp(−iφN̂/2)` of the side modes (identity on the pump).
pub fn phase_channel(phi: f64) -> SymplecticOp {
    let mut m = DMatrix::identity(6, 6);
    let r = rotation(0.5 * phi);
    set_block(&mut m, 2, 2, r, 1.0);
    set_block(&mut m, 4, 4, r, 1.0);
    SymplecticOp::new_unchecked(m).expect("6x6 shape is valid")
}

/// Truncation order of the gravitational-wave channel matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GwChannelForm {
    /// `[1 + s²/2]` diagonal blocks and `s R` off-diagonal blocks; symplectic
    /// only up to terms of third order in `s`.
    SecondOrder,
    /// The resummed channel.
    Exact,
}

/// Sum-frequency resonance of a gravitational wave on two phonon modes.
pub fn gw_squeezing_channel(s_nm: f64, phase: f64, form: GwChannelForm) -> SymplecticOp {
    match form {
        GwChannelForm::Exact => squeezing_channel(s_nm, phase),
        GwChannelForm::SecondOrder => {
            let diag = 1.0 + 0.5 * s_nm * s_nm;
            let r = reflection(phase);
            let b = two_mode_block(diag, r, s_nm, r, s_nm);
            SymplecticOp::new_unchecked(b).expect("4x4 shape is valid")
        }
    }
}

/// Difference-frequency resonance: a mode-mixing channel.
pub fn gw_mode_mixing_channel(s_nm: f64, phase: f64, form: GwChannelForm) -> SymplecticOp {
    match form {
        GwChannelForm::Exact => mode_mixing_channel(s_nm, phase),
        GwChannelForm::SecondOrder => {
            let diag = 1.0 - 0.5 * s_nm * s_nm;
            let r = rotation(phase);
            let b = two_mode_block(diag, r, s_nm, transpose2(r), -s_nm);
            SymplecticOp::new_unchecked(b).expect("4x4 shape is valid")
        }
    }
}

fn embed_unchecked(block: &DMatrix<f64>) -> SymplecticOp {
    let mut m = DMatrix::identity(6, 6);
    m.view_mut((2, 2), (4, 4)).copy_from(block);
    SymplecticOp::new_unchecked(m).expect("6x6 shape is valid")
}

/// `I₂ ⊕ op` for a symplectic side-mode channel.
pub fn embed_on_side_modes(op: &SymplecticOp) -> Result<SymplecticOp> {
    if op.n_modes() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: op.n_modes(),
        });
    }
    if !check_symplectic(op.matrix(), SYMPLECTIC_TOL) {
        return Err(Error::NotSymplectic {
            residual: op.residual(),
        });
    }
    Ok(embed_unchecked(op.matrix()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn max_diff(a: &SymplecticOp, b: &DMatrix<f64>) -> f64 {
        (a.matrix() - b).amax()
    }

    #[test]
    fn squeezer_entries() {
        assert_eq!(pumped_two_mode_squeezer(0.0, 0.4).matrix(), &DMatrix::identity(6, 6));
        let s = pumped_two_mode_squeezer(1.0, 0.0);
        assert!((s.matrix()[(2, 2)] - 1.0f64.cosh()).abs() < 1e-15);
        assert!((s.matrix()[(2, 4)] - 1.0f64.sinh()).abs() < 1e-15);
        assert!((s.matrix()[(2, 2)] - 1.5431).abs() < 1e-4);
        assert!((s.matrix()[(2, 4)] - 1.1752).abs() < 1e-4);
        let inv = pumped_two_mode_squeezer(0.8, 1.3)
            .compose(&pumped_two_mode_squeezer(-0.8, 1.3))
            .unwrap();
        assert!(max_diff(&inv, &DMatrix::identity(6, 6)) < 1e-12);
    }

    #[test]
    fn tritter_entries() {
        for v in [0.0, 0.7, 2.0] {
            assert!(max_diff(&tritter(0.0, v), &DMatrix::identity(6, 6)) < 1e-15);
            let t = tritter(PI, v);
            assert!((t.matrix()[(2, 4)] + 1.0).abs() < 1e-12);
            assert!((t.matrix()[(0, 0)] + 1.0).abs() < 1e-12);
            assert!((t.matrix()[(1, 1)] + 1.0).abs() < 1e-12);
        }
        let back = tritter(0.6, 0.3).compose(&tritter(-0.6, 0.3)).unwrap();
        assert!(max_diff(&back, &DMatrix::identity(6, 6)) < 1e-12);
        assert!(check_symplectic(tritter(0.7, 1.1).matrix(), 1e-10));
    }

    #[test]
    fn tritter_generator_route() {
        assert!(max_diff(&tritter_from_generator(0.0, 0.5).unwrap(), &DMatrix::identity(6, 6)) < 1e-15);
        let g = tritter_from_generator(0.6, 0.3).unwrap();
        assert!(max_diff(&g, tritter(0.6, 0.3).matrix()) < 1e-8);
        assert!(check_symplectic(g.matrix(), 1e-10));
    }

    #[test]
    fn squeezing_channel_entries() {
        assert_eq!(squeezing_channel(0.0, 1.0).matrix(), &DMatrix::identity(4, 4));
        let s = squeezing_channel(0.5, 0.0);
        assert!((s.matrix()[(0, 2)] - 0.52110).abs() < 1e-5);
        assert!((s.matrix()[(0, 0)] - 1.12763).abs() < 1e-5);
        let back = squeezing_channel(0.4, 2.2)
            .compose(&squeezing_channel(-0.4, 2.2))
            .unwrap();
        assert!(max_diff(&back, &DMatrix::identity(4, 4)) < 1e-12);
    }

    #[test]
    fn mode_mixing_entries() {
        assert_eq!(mode_mixing_channel(0.0, 1.0).matrix(), &DMatrix::identity(4, 4));
        let m = mode_mixing_channel(FRAC_PI_2, 0.0);
        #[rustfmt::skip]
        let want = DMatrix::from_row_slice(4, 4, &[
            0.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
           -1.0, 0.0, 0.0, 0.0,
            0.0, -1.0, 0.0, 0.0,
        ]);
        assert!(max_diff(&m, &want) < 1e-15);
        let o = mode_mixing_channel(0.3, 0.8);
        let ortho = o.matrix() * o.matrix().transpose();
        assert!((ortho - DMatrix::identity(4, 4)).amax() < 1e-14);
    }

    #[test]
    fn phase_channel_entries() {
        assert!(max_diff(&phase_channel(0.0), &DMatrix::identity(6, 6)) < 1e-15);
        let p = phase_channel(PI);
        assert!((p.matrix()[(2, 3)] - 1.0).abs() < 1e-15);
        assert!((p.matrix()[(3, 2)] + 1.0).abs() < 1e-15);
        assert!(p.matrix()[(2, 2)].abs() < 1e-15);
    }

    #[test]
    fn gw_channels() {
        for form in [GwChannelForm::SecondOrder, GwChannelForm::Exact] {
            assert!(max_diff(&gw_squeezing_channel(0.0, 0.2, form), &DMatrix::identity(4, 4)) < 1e-15);
            assert!(max_diff(&gw_mode_mixing_channel(0.0, 0.2, form), &DMatrix::identity(4, 4)) < 1e-15);
        }
        let ex = gw_squeezing_channel(0.2, 0.7, GwChannelForm::Exact);
        assert_eq!(ex, squeezing_channel(0.2, 0.7));
        let s = 0.01;
        let so = gw_squeezing_channel(s, 0.7, GwChannelForm::SecondOrder);
        assert!(max_diff(&so, squeezing_channel(s, 0.7).matrix()) < s * s * s);
        let mm = gw_mode_mixing_channel(0.3, 1.1, GwChannelForm::Exact);
        assert_eq!(mm, mode_mixing_channel(0.3, 1.1));
        assert!(check_symplectic(mm.matrix(), 1e-10));
        let mo = gw_mode_mixing_channel(s, 1.1, GwChannelForm::SecondOrder);
        assert!(max_diff(&mo, mode_mixing_channel(s, 1.1).matrix()) < s * s * s);
    }

    #[test]
    fn embedding() {
        assert_eq!(
            embed_on_side_modes(&SymplecticOp::identity(2)).unwrap(),
            SymplecticOp::identity(3)
        );
        let e = embed_on_side_modes(&squeezing_channel(0.3, 0.4)).unwrap();
        assert!(check_symplectic(e.matrix(), 1e-10));
        assert_eq!(e.matrix()[(0, 0)], 1.0);
        assert_eq!(e.matrix()[(2, 4)], 0.3f64.sinh() * 0.4f64.cos());
        let mut bad = DMatrix::identity(4, 4);
        bad[(0, 0)] = 2.0;
        assert!(embed_on_side_modes(&SymplecticOp::new_unchecked(bad).unwrap()).is_err());
        assert!(embed_on_side_modes(&SymplecticOp::identity(3)).is_err());
    }

    #[test]
    fn negative_strength_folds_into_phase() {
        let a = ChannelSpec::squeezing(-2.0, 0.3, 0.1).unwrap();
        assert_eq!(a.strength, 2.0);
        let b = ChannelSpec::squeezing(2.0, 0.3, -0.1).unwrap();
        assert!((a.symplectic().unwrap().matrix() - b.symplectic().unwrap().matrix()).amax() < 1e-14);
        assert!(ChannelSpec::phase_shift(-1.0, 0.1).is_err());
        assert_eq!("mode-mixing".parse::<ChannelKind>().unwrap(), ChannelKind::ModeMixing);
    }
}
