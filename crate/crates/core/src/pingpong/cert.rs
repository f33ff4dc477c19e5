use serde::Serialize;

use super::Flags;
use crate::cartan::CartanField;
use crate::contraction::{
    at_least, proximal_cert, proximal_cert_with, strictly_above, ProximalCert,
};
use crate::error::Result;
use crate::field::LocalField;
use crate::matrix::Matrix;
use crate::projective::dist_to_hyperplane;

/// `d(attracting point of x_from^{±1}, repelling hyperplane of x_to^{±1})`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CrossEntry {
    pub from: usize,
    pub from_inverse: bool,
    pub to: usize,
    pub to_inverse: bool,
    pub distance: f64,
}

/// Generators that are `(r, ε)`-very proximal with pairwise separated flags.
#[derive(Clone, Debug, Serialize)]
pub struct PingPongCert<T: LocalField> {
    pub generators: Vec<Matrix<T>>,
    pub r: f64,
    pub epsilon: f64,
    pub proximal: Vec<ProximalCert<T>>,
    pub cross: Vec<CrossEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

pub(crate) fn cross_table<T: LocalField>(flags: &[Flags<T>]) -> Vec<CrossEntry> {
    let mut out = Vec::new();
    for (i, fi) in flags.iter().enumerate() {
        for (j, fj) in flags.iter().enumerate() {
            if i == j {
                continue;
            }
            for (si, v) in fi.points().into_iter().enumerate() {
                for (sj, h) in fj.hyperplanes().into_iter().enumerate() {
                    out.push(CrossEntry {
                        from: i,
                        from_inverse: si == 1,
                        to: j,
                        to_inverse: sj == 1,
                        distance: dist_to_hyperplane(v, h),
                    });
                }
            }
        }
    }
    out
}

/// Recomputes every inequality from the generators alone and lists the ones
/// that fail; an empty list means the certificate is valid.
pub fn verify_pingpong_report<T: CartanField>(cert: &PingPongCert<T>) -> Vec<String> {
    let mut problems = Vec::new();
    let (r, eps) = (cert.r, cert.epsilon);
    if cert.generators.is_empty() {
        problems.push("no generators".to_string());
        return problems;
    }
    if !(eps > 0.0) || !strictly_above::<T>(r, 2.0 * eps) {
        problems.push(format!("r = {r} is not above 2ε = {}", 2.0 * eps));
    }
    let mut flags = Vec::new();
    for (i, g) in cert.generators.iter().enumerate() {
        if let Err(e) = proximal_cert_with(g, r, eps, true) {
            problems.push(format!("generator {i}: {e}"));
        }
        match Flags::of(g) {
            Ok(f) => flags.push(f),
            Err(e) => {
                problems.push(format!("generator {i}: {e}"));
                return problems;
            }
        }
    }
    for c in cross_table(&flags) {
        if !at_least::<T>(c.distance, r) {
            problems.push(format!(
                "attracting point of generator {}{} is {} from the repelling hyperplane of generator {}{}",
                c.from,
                if c.from_inverse { "⁻¹" } else { "" },
                c.distance,
                c.to,
                if c.to_inverse { "⁻¹" } else { "" },
            ));
        }
    }
    problems
}

/// Whether the ping-pong conditions hold for the declared `(r, ε)`.
pub fn verify_pingpong<T: CartanField>(cert: &PingPongCert<T>) -> bool {
    verify_pingpong_report(cert).is_empty()
}

/// Certificate for given generators with the best parameters their Cartan
/// data supports: `ε` the largest contraction coefficient, `r` the smallest
/// of all `d(v, H)` and cross distances. Absent if `r > 2ε` fails.
pub fn certify_tuple<T: CartanField>(generators: &[Matrix<T>]) -> Result<Option<PingPongCert<T>>> {
    let mut certs = Vec::new();
    for g in generators {
        match proximal_cert(g)? {
            Some(c) => certs.push(c),
            None => return Ok(None),
        }
    }
    let flags = generators
        .iter()
        .map(Flags::of)
        .collect::<Result<Vec<_>>>()?;
    let cross = cross_table(&flags);
    let epsilon = certs.iter().map(|c| c.epsilon).fold(0.0, f64::max);
    let r = certs
        .iter()
        .map(|c| c.r)
        .chain(cross.iter().map(|c| c.distance))
        .fold(1.0, f64::min);
    if !strictly_above::<T>(r, 2.0 * epsilon) {
        return Ok(None);
    }
    let proximal = generators
        .iter()
        .map(|g| proximal_cert_with(g, r, epsilon, true))
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(PingPongCert {
        generators: generators.to_vec(),
        r,
        epsilon,
        proximal,
        cross,
        warnings: Vec::new(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot(theta: f64) -> Matrix<f64> {
        let (s, c) = theta.sin_cos();
        Matrix::from_rows(vec![vec![c, -s], vec![s, c]]).unwrap()
    }

    #[test]
    fn hyperbolic_pair_certifies() {
        let a = Matrix::diagonal(&[10.0, 0.1], &());
        let q = rot(std::f64::consts::FRAC_PI_4);
        let b = &(&q * &a) * &q.inverse().unwrap();
        let cert = certify_tuple(&[a, b]).unwrap().unwrap();
        assert!(verify_pingpong(&cert));
        assert!((cert.r - 0.5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn repeated_generator_fails() {
        let a = Matrix::diagonal(&[10.0, 0.1], &());
        assert!(certify_tuple(&[a.clone(), a.clone()]).unwrap().is_none());
        let single = certify_tuple(std::slice::from_ref(&a)).unwrap().unwrap();
        let forged = PingPongCert {
            generators: vec![a.clone(), a],
            ..single
        };
        assert!(!verify_pingpong(&forged));
    }

    #[test]
    fn unipotent_pair_is_not_certified_by_cartan_flags() {
        let a = Matrix::from_rows(vec![vec![1.0, 10.0], vec![0.0, 1.0]]).unwrap();
        let b = Matrix::from_rows(vec![vec![1.0, 0.0], vec![10.0, 1.0]]).unwrap();
        assert!(certify_tuple(&[a, b]).unwrap().is_none());
    }

    #[test]
    fn products_of_the_unipotent_pair_certify() {
        let a = Matrix::from_rows(vec![vec![1.0, 10.0], vec![0.0, 1.0]]).unwrap();
        let b = Matrix::from_rows(vec![vec![1.0, 0.0], vec![10.0, 1.0]]).unwrap();
        let cert = certify_tuple(&[&a * &b, &b * &a]).unwrap().unwrap();
        assert!(verify_pingpong(&cert));
        assert!(cert.r > 0.19 && cert.epsilon < 0.01);
        assert!(crate::pingpong::freeness_falsifier(&cert.generators, 6)
            .unwrap()
            .is_none());
    }
}
