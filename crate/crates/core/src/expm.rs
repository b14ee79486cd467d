//! Dense matrix exponential by scaling and squaring with a Taylor kernel.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const MAX_TERMS: usize = 64;

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(a)` for a square real matrix.
///
/// The matrix is scaled by `2^-s` until its 1-norm is at most 1/2, the
/// Taylor series is summed until the next term is below machine precision
/// relative to the partial sum, and the result is squared `s` times.
pub fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("matrix exponential argument"));
    }
    let n = a.nrows();
    let norm = norm1(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings);

    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut converged = false;
    for k in 1..=MAX_TERMS {
        term = &term * &scaled / k as f64;
        sum += &term;
        if norm1(&term) <= f64::EPSILON * 0.25 * norm1(&sum) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ExpmNotConverged { terms: MAX_TERMS });
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gives_identity() {
        let z = DMatrix::<f64>::zeros(4, 4);
        assert_eq!(expm(&z).unwrap(), DMatrix::identity(4, 4));
    }

    #[test]
    fn rotation_generator() {
        let t = 2.7;
        let g = DMatrix::from_row_slice(2, 2, &[0.0, t, -t, 0.0]);
        let e = expm(&g).unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[t.cos(), t.sin(), -t.sin(), t.cos()]);
        assert!((e - want).amax() < 1e-13);
    }

    #[test]
    fn diagonal_large_norm() {
        let g = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -5.0, 0.25]));
        let e = expm(&g).unwrap();
        for (i, v) in [3.0f64, -5.0, 0.25].iter().enumerate() {
            assert!((e[(i, i)] - v.exp()).abs() < 1e-12 * v.exp().max(1.0));
        }
    }

    #[test]
    fn rejects_non_square() {
        assert!(expm(&DMatrix::<f64>::zeros(2, 3)).is_err());
    }
}
