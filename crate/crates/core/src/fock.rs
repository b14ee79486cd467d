//! Brute-force truncated Fock-space reference for small Gaussian states.
//!
//! Quadratic generators act on dense state vectors through sparse ladder
//! operators, and `exp(X)|ψ⟩` is summed as a Taylor series over enough
//! substeps that each step has norm below one half. Truncated generators
//! stay anti-Hermitian, so the evolution is exactly unitary on the
//! truncated space and norm loss shows up as weight on the top level.

use num_complex::Complex64;

use crate::channels::{ChannelKind, ChannelSpec};
use crate::error::{Error, Result};
use crate::pipeline::InterferometerConfig;

pub const LEAKAGE_THRESHOLD: f64 = 1e-6;
pub const MIN_CUTOFF: usize = 10;
pub const MAX_DIMENSION: usize = 64_000;

const MAX_TAYLOR_TERMS: usize = 200;

/// An anti-Hermitian quadratic (or linear) generator `X`; the unitary is
/// `exp(X)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    /// `α a† − α* a`.
    Displacement { mode: usize, alpha: Complex64 },
    /// `ξ a_i† a_j† − ξ* a_i a_j` with `ξ = r e^{iφ}`.
    TwoModeSqueeze { modes: (usize, usize), r: f64, phase: f64 },
    /// `ζ a_i† a_j − ζ* a_j† a_i` with `ζ = m e^{−iφ}`.
    ModeMix { modes: (usize, usize), m: f64, phase: f64 },
    /// `−iθ/√2 [e^{iϑ} a_p†(a_1 + a_2) + h.c.]`.
    Tritter {
        pump: usize,
        sides: (usize, usize),
        theta: f64,
        phase: f64,
    },
    /// `−iφ/2 (n̂_i + n̂_j)`.
    Phase { modes: (usize, usize), phi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ladder {
    Create,
    Annihilate,
}

/// `coef · ops[0] ops[1] …`, applied right to left.
#[derive(Debug, Clone)]
struct Term {
    coef: Complex64,
    ops: Vec<(usize, Ladder)>,
}

use Ladder::{Annihilate as A, Create as C};

fn term(coef: Complex64, ops: &[(usize, Ladder)]) -> Term {
    Term {
        coef,
        ops: ops.to_vec(),
    }
}

impl Generator {
    fn modes(&self) -> Vec<usize> {
        match *self {
            Generator::Displacement { mode, .. } => vec![mode],
            Generator::TwoModeSqueeze { modes, .. }
            | Generator::ModeMix { modes, .. }
            | Generator::Phase { modes, .. } => vec![modes.0, modes.1],
            Generator::Tritter { pump, sides, .. } => vec![pump, sides.0, sides.1],
        }
    }

    fn terms(&self) -> Vec<Term> {
        let i = Complex64::i();
        match *self {
            Generator::Displacement { mode, alpha } => {
                vec![term(alpha, &[(mode, C)]), term(-alpha.conj(), &[(mode, A)])]
            }
            Generator::TwoModeSqueeze {
                modes: (a, b),
                r,
                phase,
            } => {
                let xi = Complex64::from_polar(r, phase);
                vec![term(xi, &[(a, C), (b, C)]), term(-xi.conj(), &[(a, A), (b, A)])]
            }
            Generator::ModeMix {
                modes: (a, b),
                m,
                phase,
            } => {
                let zeta = Complex64::from_polar(m, -phase);
                vec![term(zeta, &[(a, C), (b, A)]), term(-zeta.conj(), &[(b, C), (a, A)])]
            }
            Generator::Tritter {
                pump,
                sides: (a, b),
                theta,
                phase,
            } => {
                let k = -i * theta / std::f64::consts::SQRT_2;
                let e = Complex64::from_polar(1.0, phase);
                vec![
                    term(k * e, &[(pump, C), (a, A)]),
                    term(k * e, &[(pump, C), (b, A)]),
                    term(k * e.conj(), &[(a, C), (pump, A)]),
                    term(k * e.conj(), &[(b, C), (pump, A)]),
                ]
            }
            Generator::Phase { modes: (a, b), phi } => {
                let k = -i * phi * 0.5;
                vec![term(k, &[(a, C), (a, A)]), term(k, &[(b, C), (b, A)])]
            }
        }
    }
}

/// A generator bound to a particular truncated space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockOperatorSpec {
    pub n_modes: usize,
    pub cutoff: usize,
    pub generator: Generator,
}

impl FockOperatorSpec {
    pub fn new(n_modes: usize, cutoff: usize, generator: Generator) -> Result<Self> {
        check_space(n_modes, cutoff)?;
        if generator.modes().iter().any(|&m| m >= n_modes) {
            return Err(Error::InvalidArgument(format!(
                "generator acts on a mode outside 0..{n_modes}"
            )));
        }
        Ok(Self {
            n_modes,
            cutoff,
            generator,
        })
    }
}

fn check_space(n_modes: usize, cutoff: usize) -> Result<usize> {
    if !(2..=3).contains(&n_modes) {
        return Err(Error::InvalidArgument(format!(
            "Fock reference supports 2 or 3 modes, got {n_modes}"
        )));
    }
    if cutoff < MIN_CUTOFF {
        return Err(Error::InvalidArgument(format!(
            "cutoff {cutoff} below minimum {MIN_CUTOFF}"
        )));
    }
    let dim = cutoff
        .checked_pow(n_modes as u32)
        .filter(|&d| d <= MAX_DIMENSION)
        .ok_or_else(|| Error::InvalidArgument(format!("dimension {cutoff}^{n_modes} exceeds {MAX_DIMENSION}")))?;
    Ok(dim)
}

/// Normalized truncated state with its top-level weight.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    n_modes: usize,
    cutoff: usize,
    amps: Vec<Complex64>,
}

impl FockState {
    pub fn vacuum(n_modes: usize, cutoff: usize) -> Result<Self> {
        let dim = check_space(n_modes, cutoff)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_modes, cutoff, amps })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amps).sqrt()
    }

    fn occupations(&self, index: usize) -> [usize; 3] {
        let mut occ = [0; 3];
        let mut rest = index;
        for k in (0..self.n_modes).rev() {
            occ[k] = rest % self.cutoff;
            rest /= self.cutoff;
        }
        occ
    }

    fn index(&self, occ: &[usize; 3]) -> usize {
        occ[..self.n_modes].iter().fold(0, |acc, &n| acc * self.cutoff + n)
    }

    /// Probability weight on basis states with any mode at the top level.
    pub fn leakage(&self) -> f64 {
        let top = self.cutoff - 1;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| self.occupations(*i)[..self.n_modes].contains(&top))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    fn check_leakage(&self) -> Result<()> {
        let leakage = self.leakage();
        if leakage > LEAKAGE_THRESHOLD {
            Err(Error::FockLeakage {
                leakage,
                threshold: LEAKAGE_THRESHOLD,
            })
        } else {
            Ok(())
        }
    }

    fn check_modes(&self, g: &Generator) -> Result<()> {
        if g.modes().iter().any(|&m| m >= self.n_modes) {
            Err(Error::InvalidArgument(format!(
                "generator acts on a mode outside 0..{}",
                self.n_modes
            )))
        } else {
            Ok(())
        }
    }

    /// `X|ψ⟩` in the truncated space.
    fn apply_terms(&self, terms: &[Term], psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for (idx, &amp) in psi.iter().enumerate() {
            if amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            let occ0 = self.occupations(idx);
            'terms: for t in terms {
                let mut occ = occ0;
                let mut factor = 1.0;
                for &(mode, op) in t.ops.iter().rev() {
                    match op {
                        Ladder::Create => {
                            if occ[mode] + 1 >= self.cutoff {
                                continue 'terms;
                            }
                            occ[mode] += 1;
                            factor *= (occ[mode] as f64).sqrt();
                        }
                        Ladder::Annihilate => {
                            if occ[mode] == 0 {
                                continue 'terms;
                            }
                            factor *= (occ[mode] as f64).sqrt();
                            occ[mode] -= 1;
                        }
                    }
                }
                out[self.index(&occ)] += t.coef * amp * factor;
            }
        }
        out
    }

    fn generator_bound(&self, terms: &[Term]) -> f64 {
        let top = (self.cutoff - 1) as f64;
        terms
            .iter()
            .map(|t| t.coef.norm() * top.powf(0.5 * t.ops.len() as f64))
            .sum()
    }

    /// `exp(X)|ψ⟩`.
    pub fn evolve(&self, g: &Generator) -> Result<FockState> {
        self.check_modes(g)?;
        let terms = g.terms();
        let steps = (self.generator_bound(&terms) / 0.5).ceil().max(1.0) as usize;
        let scaled: Vec<Term> = terms
            .into_iter()
            .map(|t| Term {
                coef: t.coef / steps as f64,
                ops: t.ops,
            })
            .collect();
        let mut psi = self.amps.clone();
        for _ in 0..steps {
            let mut sum = psi.clone();
            let mut term_vec = psi;
            let mut converged = false;
            for k in 1..=MAX_TAYLOR_TERMS {
                term_vec = self.apply_terms(&scaled, &term_vec);
                let inv = 1.0 / k as f64;
                term_vec.iter_mut().for_each(|a| *a *= inv);
                for (s, t) in sum.iter_mut().zip(&term_vec) {
                    *s += t;
                }
                if norm_sqr(&term_vec) <= 1e-34 * norm_sqr(&sum) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::ExpmNotConverged {
                    terms: MAX_TAYLOR_TERMS,
                });
            }
            psi = sum;
        }
        Ok(FockState {
            n_modes: self.n_modes,
            cutoff: self.cutoff,
            amps: psi,
        })
    }

    /// `⟨ψ|ψ'⟩`.
    pub fn overlap(&self, other: &FockState) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Mean and variance of `Σ_k w_k n̂_k` for integer weights.
    fn weighted_number_moments(&self, weights: &[(usize, f64)]) -> Result<(f64, f64)> {
        if weights.iter().any(|&(m, _)| m >= self.n_modes) {
            return Err(Error::InvalidArgument("mode index out of range".into()));
        }
        let (mut m1, mut m2) = (0.0, 0.0);
        for (idx, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let occ = self.occupations(idx);
            let n: f64 = weights.iter().map(|&(m, w)| w * occ[m] as f64).sum();
            m1 += p * n;
            m2 += p * n * n;
        }
        Ok((m1, m2 - m1 * m1))
    }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// Applies `exp(X_k)` for each generator in order, starting from vacuum.
/// Fails if the top Fock level carries more than [`LEAKAGE_THRESHOLD`].
pub fn prepare_state_fock(seq: &[Generator], n_modes: usize, cutoff: usize) -> Result<FockState> {
    let mut state = FockState::vacuum(n_modes, cutoff)?;
    for g in seq {
        state = state.evolve(g)?;
    }
    state.check_leakage()?;
    Ok(state)
}

/// [`prepare_state_fock`] at the smallest cutoff, starting from
/// `min_cutoff`, that meets the leakage bound within the dimension guard.
pub fn prepare_state_adaptive(seq: &[Generator], n_modes: usize, min_cutoff: usize) -> Result<FockState> {
    let mut cutoff = min_cutoff.max(MIN_CUTOFF);
    loop {
        match prepare_state_fock(seq, n_modes, cutoff) {
            Err(Error::FockLeakage { .. }) if check_space(n_modes, cutoff + 1).is_ok() => cutoff += 1,
            other => return other,
        }
    }
}

/// `4 Var(G)` with `G = iX`, the pure-state QFI of `exp(εX)|ψ⟩`.
pub fn generator_variance(state: &FockState, spec: &FockOperatorSpec) -> Result<f64> {
    if spec.n_modes != state.n_modes || spec.cutoff != state.cutoff {
        return Err(Error::InvalidArgument(
            "generator does not match the state space".into(),
        ));
    }
    state.check_modes(&spec.generator)?;
    state.check_leakage()?;
    let x_psi = state.apply_terms(&spec.generator.terms(), &state.amps);
    let mean = state
        .amps
        .iter()
        .zip(&x_psi)
        .map(|(a, b)| a.conj() * b)
        .sum::<Complex64>();
    Ok(4.0 * (norm_sqr(&x_psi) - mean.norm_sqr()))
}

/// Mean and variance of the total number in `modes`.
pub fn number_moments_fock(state: &FockState, modes: &[usize]) -> Result<(f64, f64)> {
    state.check_leakage()?;
    let w: Vec<(usize, f64)> = modes.iter().map(|&m| (m, 1.0)).collect();
    state.weighted_number_moments(&w)
}

/// Mean and variance of `n̂_a − n̂_b`.
pub fn number_difference_fock(state: &FockState, a: usize, b: usize) -> Result<(f64, f64)> {
    state.check_leakage()?;
    state.weighted_number_moments(&[(a, 1.0), (b, -1.0)])
}

/// `∂X/∂ε` of a channel acting on `sides`, so that the channel unitary
/// is `exp(ε X)`.
pub fn channel_generator(channel: &ChannelSpec, sides: (usize, usize)) -> Generator {
    match channel.kind {
        ChannelKind::Squeezing => Generator::TwoModeSqueeze {
            modes: sides,
            r: 0.25 * channel.strength,
            phase: channel.phase,
        },
        ChannelKind::ModeMixing => Generator::ModeMix {
            modes: sides,
            m: 0.25 * channel.strength,
            phase: channel.phase,
        },
        ChannelKind::Phase => Generator::Phase {
            modes: sides,
            phi: channel.strength,
        },
    }
}

fn scale(g: Generator, k: f64) -> Generator {
    match g {
        Generator::Displacement { mode, alpha } => Generator::Displacement { mode, alpha: alpha * k },
        Generator::TwoModeSqueeze { modes, r, phase } => Generator::TwoModeSqueeze { modes, r: r * k, phase },
        Generator::ModeMix { modes, m, phase } => Generator::ModeMix { modes, m: m * k, phase },
        Generator::Tritter {
            pump,
            sides,
            theta,
            phase,
        } => Generator::Tritter {
            pump,
            sides,
            theta: theta * k,
            phase,
        },
        Generator::Phase { modes, phi } => Generator::Phase { modes, phi: phi * k },
    }
}

/// Preparation sequence of the interferometer on modes (pump, 1, 2):
/// coherent pump `√N₀ e^{iϑ₀}`, source squeezer, tritter and channel, and
/// with `full` also the reversed tritter and squeezer.
pub fn interferometer_sequence(config: &InterferometerConfig, full: bool) -> Result<Vec<Generator>> {
    config.validate()?;
    let (pump, _) = config.populations()?;
    let squeeze = Generator::TwoModeSqueeze {
        modes: (1, 2),
        r: config.squeezing,
        phase: config.squeezing_phase,
    };
    let split = Generator::Tritter {
        pump: 0,
        sides: (1, 2),
        theta: config.tritter_angle,
        phase: config.tritter_phase,
    };
    let mut seq = vec![
        Generator::Displacement {
            mode: 0,
            alpha: Complex64::from_polar(pump.sqrt(), config.pump_phase),
        },
        squeeze,
        split,
        scale(channel_generator(&config.channel, (1, 2)), config.channel.epsilon),
    ];
    if full {
        seq.push(scale(split, -1.0));
        seq.push(scale(squeeze, -1.0));
    }
    Ok(seq)
}
