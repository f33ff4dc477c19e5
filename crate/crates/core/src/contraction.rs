//! Contraction and proximality certificates read off the Cartan decomposition.
//!
//! If `|a₂(g)/a₁(g)| ≤ ε²` with `ε < 1/4`, then `[g]` maps every point at
//! distance `≥ ε` from `H_g = ker(e₁ᵀ k′)` into the `ε`-ball around
//! `v_g = [k e₁]`.

use rayon::prelude::*;
use serde::Serialize;

use crate::cartan::{cartan_decompose, CartanField, CartanTriple};
use crate::error::{Error, Result};
use crate::field::{FieldKind, FieldSpec, LocalField, DEFAULT_REL_TOL};
use crate::matrix::Matrix;
use crate::projective::{dist_to_hyperplane, proj_dist, ProjHyperplane, ProjPoint};
use crate::sampling::chunk_rng;

/// Largest contraction coefficient the sufficient criterion accepts.
pub const CONTRACTION_LIMIT: f64 = 0.25;

/// Absolute margin demanded by strict archimedean inequalities.
pub const STRICT_MARGIN: f64 = 1e-9;

const SAMPLE_CHUNK: usize = 1024;

/// Relative slack for non-strict comparisons: roundoff over ℝ/ℂ, float
/// representation of exact powers of `p` over ℚ_p.
fn slack<T: LocalField>() -> f64 {
    if T::is_archimedean() {
        DEFAULT_REL_TOL
    } else {
        1e-12
    }
}

/// `x ≤ y` up to roundoff.
pub fn at_most<T: LocalField>(x: f64, y: f64) -> bool {
    x <= y + slack::<T>() * y.abs().max(f64::MIN_POSITIVE)
}

/// `x ≥ y` up to roundoff.
pub fn at_least<T: LocalField>(x: f64, y: f64) -> bool {
    x >= y - slack::<T>() * y.abs()
}

/// `x > y`, with an absolute margin of [`STRICT_MARGIN`] over ℝ/ℂ.
pub fn strictly_above<T: LocalField>(x: f64, y: f64) -> bool {
    if T::is_archimedean() {
        x - y >= STRICT_MARGIN
    } else {
        x > y * (1.0 + 1e-12)
    }
}

/// Attracting point, repelling hyperplane and contraction parameter of `[g]`.
#[derive(Clone, Debug, Serialize)]
pub struct ContractionCert<T: LocalField> {
    pub epsilon: f64,
    #[serde(rename = "v_g")]
    pub attracting: ProjPoint<T>,
    #[serde(rename = "H_g")]
    pub repelling: ProjHyperplane<T>,
    /// `|a₂(g)/a₁(g)|`.
    pub ratio: f64,
}

impl<T: LocalField> ContractionCert<T> {
    /// `d(v_g, H_g)`.
    pub fn separation(&self) -> f64 {
        dist_to_hyperplane(&self.attracting, &self.repelling)
    }
}

/// `√|a₂/a₁|` from an existing decomposition; `1` when `|a₂| = |a₁|`.
pub fn coefficient_of<T: LocalField>(c: &CartanTriple<T>) -> f64 {
    let ratio = c.ratio();
    if at_least::<T>(ratio, 1.0) {
        1.0
    } else {
        ratio.sqrt()
    }
}

/// The smallest `ε` certified by the sufficient criterion, `√|a₂/a₁|`.
pub fn contraction_coefficient<T: CartanField>(g: &Matrix<T>) -> Result<f64> {
    Ok(coefficient_of(&cartan_decompose(g)?))
}

fn cert_from<T: LocalField>(c: &CartanTriple<T>, epsilon: f64) -> Result<ContractionCert<T>> {
    Ok(ContractionCert {
        epsilon,
        attracting: c.attracting_point()?,
        repelling: c.repelling_hyperplane()?,
        ratio: c.ratio(),
    })
}

/// Certificate with `ε = √|a₂/a₁|`; fails unless `ε < 1/4`.
pub fn contraction_data<T: CartanField>(g: &Matrix<T>) -> Result<ContractionCert<T>> {
    let c = cartan_decompose(g)?;
    let eps = coefficient_of(&c);
    if eps >= CONTRACTION_LIMIT {
        return Err(Error::NotContracting {
            coefficient: eps,
            bound: CONTRACTION_LIMIT,
        });
    }
    cert_from(&c, eps)
}

/// Certificate for a declared `ε`: checks `|a₂/a₁| ≤ ε²` and `ε < 1/4`.
pub fn contraction_cert_with<T: CartanField>(
    g: &Matrix<T>,
    epsilon: f64,
) -> Result<ContractionCert<T>> {
    let c = cartan_decompose(g)?;
    if !(epsilon < CONTRACTION_LIMIT) {
        return Err(Error::NotContracting {
            coefficient: epsilon,
            bound: CONTRACTION_LIMIT,
        });
    }
    if !at_most::<T>(c.ratio(), epsilon * epsilon) {
        return Err(Error::NotContracting {
            coefficient: coefficient_of(&c),
            bound: epsilon,
        });
    }
    cert_from(&c, epsilon)
}

/// Samples points and checks the defining property of `ε`-contraction:
/// whenever `d(P, H_g) ≥ ε`, `d([g]P, v_g) ≤ ε`.
pub fn verify_contracting<T: LocalField>(
    cert: &ContractionCert<T>,
    g: &Matrix<T>,
    samples: usize,
    seed: u64,
) -> bool {
    if samples == 0 {
        return true;
    }
    let n = g.dim();
    let ctx = g.ctx();
    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    (0..chunks).into_par_iter().all(|c| {
        let mut rng = chunk_rng(seed, c as u64);
        let count = SAMPLE_CHUNK.min(samples - c * SAMPLE_CHUNK);
        (0..count).all(|_| {
            let p = ProjPoint::random(n, &ctx, &mut rng);
            if dist_to_hyperplane(&p, &cert.repelling) < cert.epsilon {
                return true;
            }
            match p.apply(g) {
                Ok(q) => at_most::<T>(proj_dist(&q, &cert.attracting), cert.epsilon),
                Err(_) => false,
            }
        })
    })
}

/// Converse bound: an `ε`-contracting `[g]` has `|a₂/a₁| ≤ 4ε²` over ℝ/ℂ and
/// `≤ ε²/|π| = pε²` over ℚ_p.
pub fn ratio_upper_bound_from_contraction(epsilon: f64, field: &FieldSpec) -> f64 {
    field.proximality_constant() * epsilon * epsilon
}

/// Lipschitz constant `|a₂/a₁| / r²` of `[g]` outside the `r`-neighbourhood of `H_g`.
pub fn lipschitz_outside<T: CartanField>(g: &Matrix<T>, r: f64) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Precondition(format!("radius {r} is not in (0, 1]")));
    }
    Ok(cartan_decompose(g)?.ratio() / (r * r))
}

/// If `[g]` is `ε`-Lipschitz on an open set with `ε < 1`, then `|a₂/a₁|` is at
/// most `ε/√(1-ε²)` over ℝ/ℂ and `ε` over ℚ_p.
pub fn ratio_from_lipschitz(epsilon: f64, field: &FieldSpec) -> f64 {
    match field.kind {
        FieldKind::Padic => epsilon,
        _ => epsilon / (1.0 - epsilon * epsilon).sqrt(),
    }
}

/// `(r, ε)`-proximality of `[g]` and, when `backward` is present, of `[g]⁻¹`.
#[derive(Clone, Debug, Serialize)]
pub struct ProximalCert<T: LocalField> {
    pub r: f64,
    pub epsilon: f64,
    pub forward: ContractionCert<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backward: Option<ContractionCert<T>>,
}

impl<T: LocalField> ProximalCert<T> {
    pub fn is_very_proximal(&self) -> bool {
        self.backward.is_some()
    }

    /// The certificates of `g` and, if present, `g⁻¹`.
    pub fn sides(&self) -> impl Iterator<Item = &ContractionCert<T>> {
        std::iter::once(&self.forward).chain(self.backward.as_ref())
    }
}

/// Very-proximality certificate from the Cartan data of `g` and `g⁻¹`, with
/// `ε` the larger coefficient and `r` the smaller `d(v, H)`. Absent unless
/// `r > 2ε` and `ε < 1/4`.
pub fn proximal_cert<T: CartanField>(g: &Matrix<T>) -> Result<Option<ProximalCert<T>>> {
    let fwd = cartan_decompose(g)?;
    let bwd = cartan_decompose(&g.sl_inverse()?)?;
    let epsilon = coefficient_of(&fwd).max(coefficient_of(&bwd));
    if epsilon >= CONTRACTION_LIMIT {
        return Ok(None);
    }
    let forward = cert_from(&fwd, epsilon)?;
    let backward = cert_from(&bwd, epsilon)?;
    let r = forward.separation().min(backward.separation());
    if !strictly_above::<T>(r, 2.0 * epsilon) {
        return Ok(None);
    }
    Ok(Some(ProximalCert {
        r,
        epsilon,
        forward,
        backward: Some(backward),
    }))
}

/// Certificate for declared parameters `(r, ε)`; checks every inequality of
/// the definition against the Cartan data of `g` (and `g⁻¹` if `two_sided`).
pub fn proximal_cert_with<T: CartanField>(
    g: &Matrix<T>,
    r: f64,
    epsilon: f64,
    two_sided: bool,
) -> Result<ProximalCert<T>> {
    if !strictly_above::<T>(r, 2.0 * epsilon) {
        return Err(Error::CertificationFailed(format!(
            "r = {r} is not above 2ε = {}",
            2.0 * epsilon
        )));
    }
    let fail = |side: &str, e: Error| Error::CertificationFailed(format!("{side}: {e}"));
    let forward = contraction_cert_with(g, epsilon).map_err(|e| fail("forward", e))?;
    let backward = if two_sided {
        Some(contraction_cert_with(&g.sl_inverse()?, epsilon).map_err(|e| fail("backward", e))?)
    } else {
        None
    };
    let cert = ProximalCert {
        r,
        epsilon,
        forward,
        backward,
    };
    for (side, c) in ["forward", "backward"].iter().zip(cert.sides()) {
        if !at_least::<T>(c.separation(), r) {
            return Err(Error::CertificationFailed(format!(
                "{side}: d(v, H) = {} is below r = {r}",
                c.separation()
            )));
        }
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PadicField;

    fn diag(a: f64) -> Matrix<f64> {
        Matrix::diagonal(&[a, 1.0 / a], &())
    }

    #[test]
    fn coefficient_examples() {
        assert!((contraction_coefficient(&diag(100.0)).unwrap() - 0.01).abs() < 1e-15);
        let rot = Matrix::from_rows(vec![vec![0.6, -0.8], vec![0.8, 0.6]]).unwrap();
        assert_eq!(contraction_coefficient(&rot).unwrap(), 1.0);
        let f = PadicField::new(5, 12).unwrap();
        let g = Matrix::diagonal(&[f.uniformizer_pow(-3), f.uniformizer_pow(3)], &f);
        assert!((contraction_coefficient(&g).unwrap() - 0.008).abs() < 1e-15);
    }

    #[test]
    fn data_examples() {
        let c = contraction_data(&diag(100.0)).unwrap();
        assert!(c.attracting.approx_eq(&ProjPoint::basis(2, 0, &()), 1e-15));
        assert_eq!(c.repelling, ProjHyperplane::coordinate(2, 0, &()));
        let r90 = Matrix::from_rows(vec![vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let c = contraction_data(&(&r90 * &diag(100.0))).unwrap();
        assert!(c.attracting.approx_eq(&ProjPoint::basis(2, 1, &()), 1e-15));
        assert!(c.repelling.form()[1].abs() < 1e-15);
        assert!(matches!(
            contraction_data(&diag(2.0)),
            Err(Error::NotContracting { .. })
        ));
    }

    #[test]
    fn verification_examples() {
        let g = diag(100.0);
        let c = contraction_data(&g).unwrap();
        assert!(verify_contracting(&c, &g, 10_000, 1));
        let mut tight = c.clone();
        tight.epsilon = c.ratio.powf(0.6);
        assert!(!verify_contracting(&tight, &g, 10_000, 1));
        assert!(verify_contracting(&tight, &g, 0, 1));
    }

    #[test]
    fn converse_bounds() {
        assert!((ratio_upper_bound_from_contraction(0.1, &FieldSpec::real()) - 0.04).abs() < 1e-15);
        let q5 = FieldSpec::padic(5, 10).unwrap();
        assert!((ratio_upper_bound_from_contraction(0.04, &q5) - 0.008).abs() < 1e-15);
        assert_eq!(ratio_upper_bound_from_contraction(0.0, &q5), 0.0);
        assert!((ratio_from_lipschitz(0.6, &FieldSpec::real()) - 0.75).abs() < 1e-15);
        assert_eq!(ratio_from_lipschitz(0.6, &q5), 0.6);
        assert_eq!(ratio_from_lipschitz(0.0, &FieldSpec::real()), 0.0);
    }

    #[test]
    fn lipschitz_outside_examples() {
        assert!((lipschitz_outside(&diag(100.0), 1.0).unwrap() - 1e-4).abs() < 1e-15);
        assert!((lipschitz_outside(&diag(100.0), 0.1).unwrap() - 1e-2).abs() < 1e-14);
        assert!(lipschitz_outside(&diag(100.0), 0.0).is_err());
    }

    #[test]
    fn proximal_examples() {
        let p = proximal_cert(&diag(100.0)).unwrap().unwrap();
        assert!((p.r - 1.0).abs() < 1e-15 && (p.epsilon - 0.01).abs() < 1e-15);
        assert!(p.is_very_proximal());
        let u = Matrix::from_rows(vec![vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(proximal_cert(&u).unwrap().is_none());
        let rot = Matrix::from_rows(vec![vec![0.6, -0.8], vec![0.8, 0.6]]).unwrap();
        assert!(proximal_cert(&rot).unwrap().is_none());
    }

    #[test]
    fn declared_parameters_are_checked() {
        let g = diag(100.0);
        assert!(proximal_cert_with(&g, 0.9, 0.02, true).is_ok());
        assert!(proximal_cert_with(&g, 0.9, 0.005, true).is_err());
        assert!(proximal_cert_with(&g, 0.03, 0.02, true).is_err());
    }
}
