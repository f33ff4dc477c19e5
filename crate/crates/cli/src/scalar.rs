use pingpong_core::io::JsonScalar;
use pingpong_core::{CartanField, Error, LocalField, Matrix, Padic, Result, C64};
use serde::Serialize;

/// Scalars the command line accepts.
pub trait CliScalar: CartanField + JsonScalar + Serialize {
    /// Accepts `g` as an element of `SL_n` if `|det g - 1| ≤ tol·max(1, max|g_ij|)^n`
    /// and rescales it to determinant one. Exact over ℚ_p.
    fn into_special_linear(g: Matrix<Self>, tol: f64) -> Result<Matrix<Self>>;
}

fn det_error<T: LocalField>(g: &Matrix<T>, tol: f64) -> Result<T> {
    if !g.is_square() || g.dim() < 2 {
        return Err(Error::Dimension(
            "SL_n needs a square matrix with n >= 2".into(),
        ));
    }
    let det = g.det()?;
    let err = (det - T::one_in(&g.ctx())).abs_value();
    if err > tol * g.max_abs().max(1.0).powi(g.dim() as i32) {
        return Err(Error::NotSpecialLinear(err));
    }
    Ok(det)
}

impl CliScalar for f64 {
    fn into_special_linear(g: Matrix<f64>, tol: f64) -> Result<Matrix<f64>> {
        let det = det_error(&g, tol)?;
        let s = det.abs().powf(-1.0 / g.dim() as f64) * det.signum();
        Ok(g.scale(s))
    }
}

impl CliScalar for C64 {
    fn into_special_linear(g: Matrix<C64>, tol: f64) -> Result<Matrix<C64>> {
        let det = det_error(&g, tol)?;
        let s = det.powf(-1.0 / g.dim() as f64);
        Ok(g.scale(s))
    }
}

impl CliScalar for Padic {
    fn into_special_linear(g: Matrix<Padic>, _tol: f64) -> Result<Matrix<Padic>> {
        g.check_special_linear(0.0)?;
        Ok(g)
    }
}
