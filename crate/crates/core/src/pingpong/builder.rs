use std::collections::BTreeMap;

use serde::Serialize;

use super::cert::{cross_table, PingPongCert};
use super::Flags;
use crate::cartan::{bilip_constant, cartan_decompose, CartanField};
use crate::contraction::{
    at_least, contraction_cert_with, proximal_cert_with, strictly_above, ContractionCert,
    ProximalCert,
};
use crate::error::{Error, Result};
use crate::field::LocalField;
use crate::matrix::Matrix;
use crate::projective::{dist_to_hyperplane, ProjHyperplane, ProjPoint};
use crate::sampling::chunk_rng;
use crate::separation::SeparatingSet;

/// Probe points tried by [`make_very_contracting`] before giving up.
pub const PROBE_ATTEMPTS: usize = 32;

/// A product `f·g` (or `g·f`) with its proximality certificate; `chosen` is
/// the index of `f` in the separating set.
#[derive(Clone, Debug, Serialize)]
pub struct Proximal<T: LocalField> {
    pub element: Matrix<T>,
    pub chosen: usize,
    pub cert: ProximalCert<T>,
}

pub type VeryProximal<T> = Proximal<T>;

/// `g·f·g⁻¹` with contraction certificates in both directions.
#[derive(Clone, Debug, Serialize)]
pub struct VeryContracting<T: LocalField> {
    pub element: Matrix<T>,
    pub chosen: usize,
    pub epsilon: f64,
    pub forward: ContractionCert<T>,
    pub backward: ContractionCert<T>,
    pub probe: ProjPoint<T>,
    pub attempts: usize,
}

/// Indices into the separating set of the factors of `x_i = g_i·γ·a_i·h_i`
/// (`g` is absent for the first generator).
#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub struct TupleFactors {
    pub g: Option<usize>,
    pub h: usize,
}

fn far<T: LocalField>(p: &ProjPoint<T>, g: &Matrix<T>, h: &ProjHyperplane<T>, r: f64) -> bool {
    p.apply(g)
        .is_ok_and(|q| strictly_above::<T>(dist_to_hyperplane(&q, h), r))
}

/// Finds `f ∈ F` with `d([f]v_g, H_g) > r`; then `f·g` is `(r, Cε)`-proximal.
pub fn make_proximal<T: CartanField>(
    g: &Matrix<T>,
    epsilon: f64,
    set: &SeparatingSet<T>,
) -> Result<Proximal<T>> {
    let (r, c) = (set.r(), set.bilip());
    if !(epsilon < r / (2.0 * c)) {
        return Err(Error::Precondition(format!(
            "ε = {epsilon} is not below r/(2C) = {}",
            r / (2.0 * c)
        )));
    }
    let cert = contraction_cert_with(g, epsilon)?;
    for (i, f) in set.elements().iter().enumerate() {
        if !far(&cert.attracting, f, &cert.repelling, r) {
            continue;
        }
        let fg = f * g;
        if let Ok(pc) = proximal_cert_with(&fg, r, c * epsilon, false) {
            return Ok(Proximal {
                element: fg,
                chosen: i,
                cert: pc,
            });
        }
    }
    Err(Error::NoSeparator("d([f]v_g, H_g) > r".into()))
}

fn perturbation_scale<T: LocalField>(ctx: &T::Ctx) -> Result<T> {
    if T::is_archimedean() {
        T::from_ratio(1, 100, ctx)
    } else {
        let p = T::spec(ctx).prime.unwrap_or(2) as i64;
        T::from_ratio(p * p, 1, ctx)
    }
}

/// Finds `f ∈ F` such that `g·f·g⁻¹` is `√(2Cd)·ε/r`-very contracting.
///
/// A probe `u` near the attracting point of `g⁻¹` is drawn from the stream
/// `seed`; it must lie where `[g⁻¹]` is `√2`-Lipschitz. Then `f` must move
/// `[g⁻¹u]` under both `f` and `f⁻¹` more than `r` away from `H_g`.
pub fn make_very_contracting<T: CartanField>(
    g: &Matrix<T>,
    epsilon: f64,
    set: &SeparatingSet<T>,
    seed: u64,
) -> Result<VeryContracting<T>> {
    let (r, c) = (set.r(), set.bilip());
    let ctx = g.ctx();
    let d = T::spec(&ctx).proximality_constant();
    let k = (2.0 * c * d).sqrt();
    if !(epsilon < r / k) {
        return Err(Error::Precondition(format!(
            "ε = {epsilon} is not below r/√(2Cd) = {}",
            r / k
        )));
    }
    let eps_out = (2.0 * c * d).sqrt() * epsilon / r;
    let cert = contraction_cert_with(g, epsilon)?;
    let g_inv = g.sl_inverse()?;
    let back = cartan_decompose(&g_inv)?;
    let (v_back, h_back) = (back.attracting_point()?, back.repelling_hyperplane()?);
    let ratio_back = back.ratio();
    let scale = perturbation_scale::<T>(&ctx)?;
    let n = g.dim();

    for attempt in 0..PROBE_ATTEMPTS {
        let mut rng = chunk_rng(seed, attempt as u64);
        let noise: Vec<T> = (0..n).map(|_| T::sample(&ctx, &mut rng) * scale).collect();
        let raw: Vec<T> = v_back
            .rep()
            .iter()
            .zip(&noise)
            .map(|(&a, &b)| a + b)
            .collect();
        let Ok(u) = ProjPoint::new(&raw) else {
            continue;
        };
        let s = dist_to_hyperplane(&u, &h_back) / 2.0;
        if s <= 0.0 || ratio_back / (s * s) > std::f64::consts::SQRT_2 {
            continue;
        }
        let Ok(w) = u.apply(&g_inv) else { continue };
        for (i, (f, fi)) in set.elements().iter().zip(set.inverses()).enumerate() {
            if !far(&w, f, &cert.repelling, r) || !far(&w, fi, &cert.repelling, r) {
                continue;
            }
            let x = &(g * f) * &g_inv;
            let Ok(x_inv) = x.sl_inverse() else { continue };
            if let (Ok(forward), Ok(backward)) = (
                contraction_cert_with(&x, eps_out),
                contraction_cert_with(&x_inv, eps_out),
            ) {
                return Ok(VeryContracting {
                    element: x,
                    chosen: i,
                    epsilon: eps_out,
                    forward,
                    backward,
                    probe: u,
                    attempts: attempt + 1,
                });
            }
        }
    }
    Err(Error::NoSeparator(format!(
        "d([f g⁻¹u], H_g) > r and d([f⁻¹g⁻¹u], H_g) > r for {PROBE_ATTEMPTS} probe points"
    )))
}

fn select_very_proximal<T: CartanField>(
    g: &Matrix<T>,
    epsilon: f64,
    set: &SeparatingSet<T>,
    r_cert: f64,
    eps_cert: f64,
) -> Result<Proximal<T>> {
    let r = set.r();
    contraction_cert_with(g, epsilon)?;
    contraction_cert_with(&g.sl_inverse()?, epsilon)?;
    let fl = Flags::of(g)?;
    for (i, (f, fi)) in set.elements().iter().zip(set.inverses()).enumerate() {
        if !far(&fl.v, f, &fl.h, r) || !far(&fl.v_inv, fi, &fl.h_inv, r) {
            continue;
        }
        let gf = g * f;
        if let Ok(cert) = proximal_cert_with(&gf, r_cert, eps_cert, true) {
            return Ok(Proximal {
                element: gf,
                chosen: i,
                cert,
            });
        }
    }
    Err(Error::NoSeparator(
        "d([f]v_g, H_g) > r and d([f⁻¹]v_{g⁻¹}, H_{g⁻¹}) > r".into(),
    ))
}

/// Finds `f ∈ F` such that `g·f` is `(r/C, Cε)`-very proximal, for an
/// `ε`-very contracting `g`.
pub fn make_very_proximal<T: CartanField>(
    g: &Matrix<T>,
    epsilon: f64,
    set: &SeparatingSet<T>,
) -> Result<Proximal<T>> {
    let (r, c) = (set.r(), set.bilip());
    if !(epsilon < r / (2.0 * c * c)) {
        return Err(Error::Precondition(format!(
            "ε = {epsilon} is not below r/(2C²) = {}",
            r / (2.0 * c * c)
        )));
    }
    select_very_proximal(g, epsilon, set, r / c, c * epsilon)
}

#[derive(Default)]
struct Failures(BTreeMap<&'static str, usize>);

impl Failures {
    fn note(&mut self, what: &'static str) {
        *self.0.entry(what).or_default() += 1;
    }

    fn most_common(&self) -> String {
        self.0
            .iter()
            .max_by_key(|(_, &n)| n)
            .map(|(k, _)| k.to_string())
            .unwrap_or_default()
    }
}

/// Builds `x₁ = γa₁h₁, x_i = g_iγa_ih_i` forming a ping-pong `m`-tuple of
/// `(r/c, c³ε)`-very proximal elements, where `c` is the largest bi-Lipschitz
/// constant of `{a_i} ∪ F`.
pub fn build_pingpong_tuple<T: CartanField>(
    a: &[Matrix<T>],
    set: &SeparatingSet<T>,
    gamma: &Matrix<T>,
    epsilon: f64,
) -> Result<(PingPongCert<T>, Vec<TupleFactors>)> {
    let m = a.len();
    if m == 0 {
        return Err(Error::EmptySet);
    }
    if set.m() < m {
        return Err(Error::Precondition(format!(
            "F is {}-separating, {m} generators requested",
            set.m()
        )));
    }
    let r = set.r();
    let c = a
        .iter()
        .map(bilip_constant)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(set.bilip(), f64::max);
    if !(epsilon < r / (2.0 * c.powi(4))) {
        return Err(Error::Precondition(format!(
            "ε = {epsilon} is not below r/(2c⁴) = {}",
            r / (2.0 * c.powi(4))
        )));
    }
    contraction_cert_with(gamma, epsilon)?;
    contraction_cert_with(&gamma.sl_inverse()?, epsilon)?;
    let mut warnings = Vec::new();
    let gamma_bilip = bilip_constant(gamma)?;
    if gamma_bilip > c {
        warnings.push(format!(
            "bi-Lipschitz constant of γ ({gamma_bilip:e}) exceeds c = {c}"
        ));
    }
    let (r_out, eps_out) = (r / c, c.powi(3) * epsilon);

    let first =
        select_very_proximal(&(gamma * &a[0]), c * epsilon, set, r_out, eps_out).map_err(|e| {
            Error::SelectionFailure {
                step: 1,
                role: "h",
                constraint: e.to_string(),
            }
        })?;
    let mut xs = vec![first.element];
    let mut certs = vec![first.cert];
    let mut factors = vec![TupleFactors {
        g: None,
        h: first.chosen,
    }];
    let mut flags = vec![Flags::of(&xs[0])?];

    for (i, ai) in a.iter().enumerate().skip(1) {
        let ga = gamma * ai;
        let fl_ga = Flags::of(&ga)?;
        let mut h_fail = Failures::default();
        let mut g_fail = Failures::default();
        let mut any_h = false;
        let mut found = None;
        'h: for (hi, (h, h_inv)) in set.elements().iter().zip(set.inverses()).enumerate() {
            if !flags
                .iter()
                .flat_map(|f| f.hyperplanes())
                .all(|hp| far(&fl_ga.v_inv, h_inv, hp, r))
            {
                h_fail.note("h⁻¹ moves the attracting point of (γa)⁻¹ away from the earlier repelling hyperplanes");
                continue;
            }
            if !flags
                .iter()
                .flat_map(|f| f.points())
                .all(|p| far(p, h, &fl_ga.h, r))
            {
                h_fail.note("h moves the earlier attracting points away from the repelling hyperplane of γa");
                continue;
            }
            any_h = true;
            let gah = &ga * h;
            let fl = Flags::of(&gah)?;
            for (gi, (g, g_inv)) in set.elements().iter().zip(set.inverses()).enumerate() {
                let targets = flags
                    .iter()
                    .flat_map(|f| f.hyperplanes())
                    .chain(std::iter::once(&fl.h));
                if !targets.into_iter().all(|hp| far(&fl.v, g, hp, r)) {
                    g_fail.note(
                        "g moves the attracting point of γah away from the repelling hyperplanes",
                    );
                    continue;
                }
                if !flags
                    .iter()
                    .flat_map(|f| f.points())
                    .all(|p| far(p, g_inv, &fl.h_inv, r))
                {
                    g_fail.note("g⁻¹ moves the earlier attracting points away from the repelling hyperplane of (γah)⁻¹");
                    continue;
                }
                if !far(&fl.v_inv, g_inv, &fl.h_inv, r) {
                    g_fail.note("g⁻¹ moves the attracting point of (γah)⁻¹ away from its repelling hyperplane");
                    continue;
                }
                let x = g * &gah;
                let Ok(cert) = proximal_cert_with(&x, r_out, eps_out, true) else {
                    g_fail.note("Cartan flags of the product are (r/c, c³ε)-very proximal");
                    continue;
                };
                let fx = Flags::of(&x)?;
                let mut all = flags.clone();
                all.push(fx.clone());
                if !cross_table(&all)
                    .iter()
                    .all(|e| at_least::<T>(e.distance, r_out))
                {
                    g_fail.note(
                        "Cartan flags of the product are r/c-separated from the earlier generators",
                    );
                    continue;
                }
                found = Some((x, cert, fx, TupleFactors { g: Some(gi), h: hi }));
                break 'h;
            }
        }
        let Some((x, cert, fx, fac)) = found else {
            let (role, f) = if any_h { ("g", g_fail) } else { ("h", h_fail) };
            return Err(Error::SelectionFailure {
                step: i + 1,
                role,
                constraint: f.most_common(),
            });
        };
        xs.push(x);
        certs.push(cert);
        flags.push(fx);
        factors.push(fac);
    }

    let cross = cross_table(&flags);
    Ok((
        PingPongCert {
            generators: xs,
            r: r_out,
            epsilon: eps_out,
            proximal: certs,
            cross,
            warnings,
        },
        factors,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pingpong::{freeness_falsifier, verify_pingpong};
    use std::f64::consts::PI;

    fn rot(theta: f64) -> Matrix<f64> {
        let (s, c) = theta.sin_cos();
        Matrix::from_rows(vec![vec![c, -s], vec![s, c]]).unwrap()
    }

    fn rotations(r: f64) -> SeparatingSet<f64> {
        SeparatingSet::new((0..8).map(|k| rot(k as f64 * PI / 8.0)).collect(), 2, r).unwrap()
    }

    fn diag(t: f64) -> Matrix<f64> {
        Matrix::diagonal(&[t, 1.0 / t], &())
    }

    #[test]
    fn proximal_keeps_an_already_proximal_element() {
        let g = diag(100.0);
        let p = make_proximal(&g, 0.01, &rotations(0.3)).unwrap();
        assert_eq!(p.chosen, 0);
        assert_eq!(p.element, g);
        assert_eq!(
            (p.cert.r, p.cert.epsilon),
            (0.3, rotations(0.3).bilip() * 0.01)
        );
    }

    #[test]
    fn proximal_moves_the_attracting_point_off_the_hyperplane() {
        let g = &rot(PI / 2.0) * &diag(100.0);
        let set =
            SeparatingSet::new(vec![Matrix::identity(2, &()), rot(PI / 4.0)], 1, 0.5).unwrap();
        let p = make_proximal(&g, 0.01, &set).unwrap();
        assert_eq!(p.chosen, 1);
        assert!(make_proximal(&g, 0.4, &set).is_err());
    }

    #[test]
    fn very_contracting_conjugate() {
        let set = rotations(0.3);
        let g = diag(1e3);
        let vc = make_very_contracting(&g, 1e-3, &set, 7).unwrap();
        assert_ne!(vc.chosen, 0, "the identity never qualifies");
        assert_eq!(vc.epsilon, (2.0 * set.bilip() * 4.0).sqrt() * 1e-3 / 0.3);
        assert!(crate::contraction::verify_contracting(
            &vc.forward,
            &vc.element,
            10_000,
            1
        ));
        assert!(crate::contraction::verify_contracting(
            &vc.backward,
            &vc.element.inverse().unwrap(),
            10_000,
            2
        ));
        assert!(matches!(
            make_very_contracting(&g, 0.2, &set, 7),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn very_proximal_parameters() {
        let set = rotations(0.3);
        let vc = make_very_contracting(&diag(1e3), 1e-3, &set, 7).unwrap();
        let vp = make_very_proximal(&vc.element, vc.epsilon, &set).unwrap();
        let c = set.bilip();
        assert_eq!((vp.cert.r, vp.cert.epsilon), (0.3 / c, c * vc.epsilon));
        assert!(vp.cert.is_very_proximal());
        assert!(matches!(
            make_very_proximal(&vc.element, 0.2, &set),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn pipeline_over_the_reals() {
        let set = rotations(0.3);
        let vc = make_very_contracting(&diag(1e3), 1e-3, &set, 7).unwrap();
        let id = Matrix::identity(2, &());
        let (cert, factors) =
            build_pingpong_tuple(&[id.clone(), id], &set, &vc.element, vc.epsilon).unwrap();
        assert!(verify_pingpong(&cert));
        assert_eq!(factors.len(), 2);
        assert!(freeness_falsifier(&cert.generators, 6).unwrap().is_none());
    }
}
