//! Central finite differences with one level of Richardson extrapolation.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub const DEFAULT_STEP: f64 = 1e-4;

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "finite-difference step must be positive, got {h}"
        )))
    }
}

/// `(4 D(h/2) − D(h)) / 3` with `D(h) = (f(x+h) − f(x−h)) / 2h`.
pub fn derivative<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    check_step(h)?;
    let wide = (f(x + h)? - f(x - h)?) / (2.0 * h);
    let narrow = (f(x + 0.5 * h)? - f(x - 0.5 * h)?) / h;
    let d = (4.0 * narrow - wide) / 3.0;
    if d.is_finite() {
        Ok(d)
    } else {
        Err(Error::NonFinite("finite-difference derivative"))
    }
}

/// Entrywise [`derivative`] of a matrix-valued function.
pub fn matrix_derivative<F>(f: F, x: f64, h: f64) -> Result<DMatrix<f64>>
where
    F: Fn(f64) -> Result<DMatrix<f64>>,
{
    check_step(h)?;
    let wide = (f(x + h)? - f(x - h)?) / (2.0 * h);
    let narrow = (f(x + 0.5 * h)? - f(x - 0.5 * h)?) / h;
    let d = (narrow * 4.0 - wide) / 3.0;
    if d.iter().all(|v| v.is_finite()) {
        Ok(d)
    } else {
        Err(Error::NonFinite("finite-difference derivative"))
    }
}
