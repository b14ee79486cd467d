//! Gaussian states in the real `q,p` representation.
//!
//! Quadratures are `x_{2i} = a_i + a_i†` and `x_{2i+1} = i(a_i† - a_i)`
//! (zero-based), so the vacuum covariance matrix is the identity and a
//! coherent amplitude `α` maps to the displacement `(2 Re α, 2 Im α)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const DET_TOL: f64 = 1e-9;
/// Residual accepted by [`SymplecticOp::new`].
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Standard symplectic form: block diagonal with `[[0, 1], [-1, 0]]` blocks.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Max-norm of `S Ω Sᵀ - Ω`, or `None` if `s` is not square with even size.
pub fn symplectic_residual(s: &DMatrix<f64>) -> Option<f64> {
    if !s.is_square() || !s.nrows().is_multiple_of(2) || s.nrows() == 0 {
        return None;
    }
    let omega = symplectic_form(s.nrows() / 2);
    Some((s * &omega * s.transpose() - omega).amax())
}

pub fn check_symplectic(s: &DMatrix<f64>, tol: f64) -> bool {
    matches!(symplectic_residual(s), Some(r) if r < tol)
}

/// Phase-space image of a Gaussian unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticOp {
    matrix: DMatrix<f64>,
}

impl SymplecticOp {
    /// Validates `S Ω Sᵀ = Ω` to [`SYMPLECTIC_TOL`].
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        match symplectic_residual(&matrix) {
            None => Err(Error::InvalidArgument(format!(
                "symplectic matrix must be square with even size, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            ))),
            Some(r) if !(r < SYMPLECTIC_TOL) => Err(Error::NotSymplectic { residual: r }),
            Some(_) => Ok(Self { matrix }),
        }
    }

    /// Skips the symplecticity check (shape is still checked). Used by the
    /// closed-form constructors and by truncated expansions that are
    /// symplectic only to finite order.
    pub fn new_unchecked(matrix: DMatrix<f64>) -> Result<Self> {
        if symplectic_residual(&matrix).is_none() {
            return Err(Error::InvalidArgument(format!(
                "symplectic matrix must be square with even size, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { matrix })
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// `self · other`, i.e. `other` acts first.
    pub fn compose(&self, other: &SymplecticOp) -> Result<SymplecticOp> {
        if self.n_modes() != other.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes(),
                found: other.n_modes(),
            });
        }
        Ok(SymplecticOp {
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn residual(&self) -> f64 {
        symplectic_residual(&self.matrix).unwrap_or(f64::INFINITY)
    }
}

/// Displacement vector and covariance matrix of an `n`-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    d: DVector<f64>,
    sigma: DMatrix<f64>,
}

impl GaussianState {
    /// Validates shape, finiteness, symmetry and `det σ ≥ 1 - 1e-9`.
    pub fn new(d: DVector<f64>, sigma: DMatrix<f64>) -> Result<Self> {
        let dim = d.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "displacement length must be a positive even number, got {dim}"
            )));
        }
        if sigma.nrows() != dim || sigma.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: sigma.nrows().max(sigma.ncols()),
            });
        }
        if d.iter().chain(sigma.iter()).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("Gaussian state"));
        }
        let asym = (&sigma - sigma.transpose()).amax();
        let scale = sigma.amax().max(1.0);
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::Unphysical(format!(
                "covariance matrix is not symmetric (max asymmetry {asym:.3e})"
            )));
        }
        let det = sigma.determinant();
        if !(det >= 1.0 - DET_TOL) {
            return Err(Error::Unphysical(format!("det(sigma) = {det:.6e} is below 1")));
        }
        Ok(Self { d, sigma })
    }

    pub fn vacuum(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidArgument("vacuum needs at least one mode".into()));
        }
        Ok(Self {
            d: DVector::zeros(2 * n_modes),
            sigma: DMatrix::identity(2 * n_modes, 2 * n_modes),
        })
    }

    /// Three-mode interferometer input: coherent pump `α = √N̄ e^{iϑ₀}` in
    /// mode 0 and vacuum side modes 1 and 2.
    pub fn pumped_input(total_particles: f64, pump_phase: f64) -> Result<Self> {
        if !(total_particles >= 0.0) || !total_particles.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "total particle number must be finite and non-negative, got {total_particles}"
            )));
        }
        let amp = total_particles.sqrt();
        let mut d = DVector::zeros(6);
        d[0] = 2.0 * amp * pump_phase.cos();
        d[1] = 2.0 * amp * pump_phase.sin();
        Ok(Self {
            d,
            sigma: DMatrix::identity(6, 6),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.d.len() / 2
    }

    pub fn displacement(&self) -> &DVector<f64> {
        &self.d
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    /// `d' = S d`, `σ' = S σ Sᵀ`, re-validated.
    pub fn apply(&self, op: &SymplecticOp) -> Result<Self> {
        if op.n_modes() != self.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes(),
                found: op.n_modes(),
            });
        }
        let s = op.matrix();
        let d = s * &self.d;
        let mut sigma = s * &self.sigma * s.transpose();
        // kill rounding asymmetry before validation
        sigma = (&sigma + sigma.transpose()) * 0.5;
        Self::new(d, sigma)
    }

    /// Keeps the listed modes, in the given order.
    pub fn reduce(&self, modes: &[usize]) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidArgument("no modes to keep".into()));
        }
        let n = self.n_modes();
        for (i, &m) in modes.iter().enumerate() {
            if m >= n {
                return Err(Error::InvalidArgument(format!(
                    "mode index {m} out of range for a {n}-mode state"
                )));
            }
            if modes[..i].contains(&m) {
                return Err(Error::InvalidArgument(format!("mode index {m} repeated")));
            }
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let k = idx.len();
        let d = DVector::from_fn(k, |i, _| self.d[idx[i]]);
        let sigma = DMatrix::from_fn(k, k, |i, j| self.sigma[(idx[i], idx[j])]);
        Self::new(d, sigma)
    }

    /// `μ = 1/√det σ`.
    pub fn purity(&self) -> Result<f64> {
        let det = self.sigma.determinant();
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::Unphysical(format!(
                "non-positive covariance determinant {det:.3e}"
            )));
        }
        Ok(1.0 / det.sqrt())
    }

    /// Total mean particle number `¼[Tr σ + dᵀd − 2n]` over all modes.
    pub fn mean_particle_number(&self) -> f64 {
        0.25 * (self.sigma.trace() + self.d.norm_squared() - 2.0 * self.n_modes() as f64)
    }
}
