use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::LocalField;
use crate::matrix::Matrix;
use crate::words::{for_each_level, Word};

/// Relative tolerance of the archimedean projective identity test.
pub const FALSIFIER_TOL: f64 = 1e-7;

/// Whether `g` is a scalar matrix: relative to `max |g_ij|` within `tol` over
/// ℝ/ℂ, to tracked precision over ℚ_p.
pub fn is_projective_identity<T: LocalField>(g: &Matrix<T>, tol: f64) -> bool {
    let n = g.dim();
    let scale = g.max_abs();
    let small = |x: T| {
        if T::is_archimedean() {
            x.abs_value() <= tol * scale
        } else {
            x.is_zero_value()
        }
    };
    (0..n).all(|i| {
        (0..n).all(|j| {
            if i == j {
                small(g[(i, i)] - g[(0, 0)])
            } else {
                small(g[(i, j)])
            }
        })
    })
}

/// First reduced word of length `≤ max_len` (by length, then lexicographic
/// with `a < a⁻¹ < b < …`) whose value is a projective identity.
pub fn freeness_falsifier<T: LocalField>(
    gens: &[Matrix<T>],
    max_len: usize,
) -> Result<Option<Word>> {
    if max_len == 0 {
        return Err(Error::Precondition("max_len must be at least 1".into()));
    }
    if gens.is_empty() {
        return Err(Error::EmptySet);
    }
    let inverses = gens
        .iter()
        .map(|g| g.sl_inverse())
        .collect::<Result<Vec<_>>>()?;
    let mut found = None;
    for_each_level(gens, &inverses, max_len, |_, level| {
        if let Some(i) = level
            .par_iter()
            .position_first(|(_, g)| is_projective_identity(g, FALSIFIER_TOL))
        {
            found = Some(level[i].0.clone());
            return false;
        }
        true
    });
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commuting_pair_has_a_commutator_relation() {
        let a = Matrix::<f64>::diagonal(&[2.0, 0.5], &());
        let b = Matrix::<f64>::diagonal(&[3.0, 1.0 / 3.0], &());
        let w = freeness_falsifier(&[a, b], 4).unwrap().unwrap();
        assert_eq!(w.to_string(), "aba⁻¹b⁻¹");
    }

    #[test]
    fn eighth_turn_rotation_has_order_four_projectively() {
        let (s, c) = std::f64::consts::FRAC_PI_4.sin_cos();
        let r = Matrix::from_rows(vec![vec![c, -s], vec![s, c]]).unwrap();
        assert_eq!(
            freeness_falsifier(&[r], 8).unwrap().unwrap().to_string(),
            "a⁴"
        );
    }

    #[test]
    fn zero_length_is_rejected() {
        assert!(freeness_falsifier(&[Matrix::<f64>::identity(2, &())], 0).is_err());
    }
}
