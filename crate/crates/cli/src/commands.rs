use std::path::Path;

use pingpong_core::cartan::CartanTriple;
use pingpong_core::contraction::{
    contraction_cert_with, contraction_data, proximal_cert, verify_contracting, CONTRACTION_LIMIT,
};
use pingpong_core::field::AbsValue;
use pingpong_core::io::Document;
use pingpong_core::lie;
use pingpong_core::pingpong::{
    build_pingpong_tuple, certify_tuple, freeness_falsifier, make_very_contracting,
    verify_pingpong_report, PingPongCert, FALSIFIER_TOL,
};
use pingpong_core::separation::{estimate_radius, SeparatingSet};
use pingpong_core::{
    bilip_constant, cartan_decompose, Error, FieldKind, FieldSpec, Matrix, Padic, Result, C64,
};
use serde_json::json;

use crate::report::{exact, tagged, Input, Provenance, Report};
use crate::scalar::CliScalar;
use crate::CertifyArgs;

/// Runs `$body` with `$T` bound to the scalar type of `$spec`.
macro_rules! with_field {
    ($spec:expr, $T:ident => $body:expr) => {
        match $spec.kind {
            FieldKind::Real => {
                type $T = f64;
                $body
            }
            FieldKind::Complex => {
                type $T = C64;
                $body
            }
            FieldKind::Padic => {
                type $T = Padic;
                $body
            }
        }
    };
}

fn schema(path: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

fn load(role: &'static str, path: &Path) -> Result<(Input, Document)> {
    let input = Input::read(role, path)?;
    let doc = Document::parse(&input.text).map_err(|e| match e {
        Error::Schema { path, message } => schema(&path, format!("{role}: {message}")),
        e => e,
    })?;
    Ok((input, doc))
}

fn same_field(a: &FieldSpec, b: &FieldSpec, role: &str) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::FieldMismatch(format!(
            "{role} uses a different field from the generators"
        )))
    }
}

fn special_linear<T: CliScalar>(g: Matrix<T>, tol: f64, path: &str) -> Result<Matrix<T>> {
    T::into_special_linear(g, tol).map_err(|e| match e {
        Error::NotSpecialLinear(_) | Error::Dimension(_) => schema(path, e.to_string()),
        e => e,
    })
}

fn matrix<T: CliScalar>(doc: &Document, tol: f64) -> Result<Matrix<T>> {
    special_linear(doc.matrix::<T>()?, tol, "/matrix")
}

fn matrices<T: CliScalar>(doc: &Document, tol: f64) -> Result<Vec<(String, Matrix<T>)>> {
    doc.matrices::<T>()?
        .into_iter()
        .map(|(k, m)| {
            Ok((
                k.clone(),
                special_linear(m, tol, &format!("/matrices/{k}"))?,
            ))
        })
        .collect()
}

fn cartan_payload<T: CliScalar>(c: &CartanTriple<T>) -> Result<serde_json::Value> {
    let p = Provenance::computed::<T>();
    Ok(json!({
        "k": tagged(&c.k, p),
        "a": tagged(&c.a, p),
        "k_prime": tagged(&c.k_prime, p),
        "abs_a": tagged((0..c.dim()).map(|i| c.abs_a(i).to_f64()).collect::<Vec<_>>(), p),
        "ratio_table": tagged(c.ratio_table(), p),
        "attracting_point": tagged(c.attracting_point()?, p),
        "repelling_hyperplane": tagged(c.repelling_hyperplane()?, p),
        "precision_loss": exact(c.precision_loss),
    }))
}

pub fn cartan(path: &Path, tol: f64) -> Result<Report> {
    let (input, doc) = load("in", path)?;
    let mut report = Report::new("cartan", &[&input]);
    report.param("field", doc.field);
    with_field!(doc.field, T => {
        let g = matrix::<T>(&doc, tol)?;
        report.result = cartan_payload(&cartan_decompose(&g)?)?;
    });
    report.pass = true;
    Ok(report)
}

fn contract_generic<T: CliScalar>(
    doc: &Document,
    samples: usize,
    seed: u64,
    epsilon: Option<f64>,
    tol: f64,
) -> Result<(serde_json::Value, bool)> {
    let g = matrix::<T>(doc, tol)?;
    let p = Provenance::computed::<T>();
    let c = cartan_decompose(&g)?;
    let cert = match epsilon {
        Some(e) => contraction_cert_with(&g, e),
        None => contraction_data(&g),
    };
    let cert = match cert {
        Ok(cert) => cert,
        Err(Error::NotContracting { coefficient, bound }) => {
            let result = json!({
                "contracting": false,
                "ratio": tagged(c.ratio(), p),
                "coefficient": tagged(coefficient, p),
                "bound": exact(bound),
            });
            return Ok((result, false));
        }
        Err(e) => return Err(e),
    };
    let verified = verify_contracting(&cert, &g, samples, seed);
    let eps_provenance = if epsilon.is_some() {
        Provenance::Exact
    } else {
        p
    };
    let proximal = proximal_cert(&g)?.map(|pc| {
        json!({
            "r": tagged(pc.r, p),
            "epsilon": tagged(pc.epsilon, p),
            "very_proximal": pc.is_very_proximal(),
        })
    });
    let result = json!({
        "contracting": true,
        "epsilon": tagged(cert.epsilon, eps_provenance),
        "ratio": tagged(cert.ratio, p),
        "limit": exact(CONTRACTION_LIMIT),
        "v_g": tagged(&cert.attracting, p),
        "H_g": tagged(&cert.repelling, p),
        "separation": tagged(cert.separation(), p),
        "proximal": proximal,
        "empirical": {
            "samples": exact(samples),
            "verified": tagged(verified, Provenance::Estimate),
        },
    });
    Ok((result, verified))
}

pub fn contract_analyze(
    path: &Path,
    samples: usize,
    seed: u64,
    epsilon: Option<f64>,
    tol: f64,
) -> Result<Report> {
    let (input, doc) = load("in", path)?;
    let mut report = Report::new("contract-analyze", &[&input]);
    report.param("field", doc.field);
    report.param("samples", samples);
    if let Some(e) = epsilon {
        report.param("epsilon", e);
    }
    report.seed = Some(seed);
    let (result, pass) =
        with_field!(doc.field, T => contract_generic::<T>(&doc, samples, seed, epsilon, tol)?);
    report.result = result;
    report.pass = pass;
    Ok(report)
}

fn separate_generic<T: CliScalar>(
    doc: &Document,
    m: usize,
    trials: usize,
    seed: u64,
    r: Option<f64>,
    tol: f64,
) -> Result<(serde_json::Value, bool)> {
    let named = matrices::<T>(doc, tol)?;
    let els: Vec<Matrix<T>> = named.iter().map(|(_, g)| g.clone()).collect();
    let set = SeparatingSet::new(els.clone(), m, 1.0)?;
    let est = estimate_radius(&els, m, trials, seed)?;
    let p = Provenance::computed::<T>();
    let elements = named
        .iter()
        .zip(&est.wins)
        .map(|((name, g), wins)| {
            Ok(json!({
                "name": name,
                "bilip": tagged(bilip_constant(g)?, p),
                "wins": tagged(wins, Provenance::Estimate),
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = !est.failed && r.is_none_or(|r| est.r_estimate >= r);
    let result = json!({
        "r_estimate": tagged(est.r_estimate, Provenance::Estimate),
        "failed": tagged(est.failed, Provenance::Estimate),
        "C": tagged(set.bilip(), p),
        "elements": elements,
    });
    Ok((result, pass))
}

pub fn separate(
    path: &Path,
    m: usize,
    trials: usize,
    seed: u64,
    r: Option<f64>,
    tol: f64,
) -> Result<Report> {
    let (input, doc) = load("set", path)?;
    let mut report = Report::new("separate", &[&input]);
    report.param("field", doc.field);
    report.param("m", m);
    report.param("trials", trials);
    if let Some(r) = r {
        report.param("r", r);
    }
    report.seed = Some(seed);
    let (result, pass) =
        with_field!(doc.field, T => separate_generic::<T>(&doc, m, trials, seed, r, tol)?);
    report.result = result;
    report.pass = pass;
    Ok(report)
}

fn cert_payload<T: CliScalar>(cert: &PingPongCert<T>, problems: &[String]) -> serde_json::Value {
    let p = Provenance::computed::<T>();
    json!({
        "certified": problems.is_empty(),
        "r": tagged(cert.r, p),
        "epsilon": tagged(cert.epsilon, p),
        "generators": tagged(&cert.generators, p),
        "cross": tagged(&cert.cross, p),
        "problems": problems,
        "warnings": cert.warnings,
    })
}

fn verify_generic<T: CliScalar>(doc: &Document, tol: f64) -> Result<(serde_json::Value, bool)> {
    let gens: Vec<Matrix<T>> = matrices::<T>(doc, tol)?
        .into_iter()
        .map(|(_, g)| g)
        .collect();
    let declared = (doc.f64_param("r")?, doc.f64_param("epsilon")?);
    let cert = match declared {
        (Some(r), Some(epsilon)) => PingPongCert {
            generators: gens,
            r,
            epsilon,
            proximal: Vec::new(),
            cross: Vec::new(),
            warnings: Vec::new(),
        },
        (None, None) => match certify_tuple(&gens)? {
            Some(c) => c,
            None => {
                let result = json!({
                    "certified": false,
                    "problems": ["the Cartan data of the generators support no (r, ε) with r > 2ε"],
                });
                return Ok((result, false));
            }
        },
        (Some(_), None) => return Err(schema("/epsilon", "r is declared without epsilon")),
        (None, Some(_)) => return Err(schema("/r", "epsilon is declared without r")),
    };
    let problems = verify_pingpong_report(&cert);
    Ok((cert_payload(&cert, &problems), problems.is_empty()))
}

fn build_generic<T: CliScalar>(
    gens: &Document,
    sep: &Document,
    gamma: &Document,
    seed: u64,
    tol: f64,
) -> Result<(serde_json::Value, bool)> {
    let a: Vec<Matrix<T>> = matrices::<T>(gens, tol)?
        .into_iter()
        .map(|(_, g)| g)
        .collect();
    let els: Vec<Matrix<T>> = matrices::<T>(sep, tol)?
        .into_iter()
        .map(|(_, g)| g)
        .collect();
    let r = sep
        .f64_param("r")?
        .ok_or_else(|| schema("/r", "separating set needs a radius r"))?;
    let m = sep.usize_param("m")?.unwrap_or(a.len());
    let set = SeparatingSet::new(els, m, r)?;
    let gamma0 = matrix::<T>(gamma, tol)?;
    let eps0 = gamma
        .f64_param("epsilon")?
        .ok_or_else(|| schema("/epsilon", "gamma needs its contraction epsilon"))?;
    let vc = make_very_contracting(&gamma0, eps0, &set, seed)?;
    let (cert, factors) = build_pingpong_tuple(&a, &set, &vc.element, vc.epsilon)?;
    let problems = verify_pingpong_report(&cert);
    let mut result = cert_payload(&cert, &problems);
    let p = Provenance::computed::<T>();
    result["gamma"] = json!({
        "element": tagged(&vc.element, p),
        "chosen": exact(vc.chosen),
        "epsilon": exact(vc.epsilon),
        "probe_attempts": exact(vc.attempts),
    });
    result["factors"] = exact(&factors);
    result["C"] = tagged(set.bilip(), p);
    Ok((result, problems.is_empty()))
}

pub fn certify_free(args: &CertifyArgs, tol: f64) -> Result<Report> {
    let (gi, gens) = load("gens", &args.gens)?;
    if !args.build {
        let mut report = Report::new("certify-free", &[&gi]);
        report.param("field", gens.field);
        report.param("mode", "verify-only");
        let (result, pass) = with_field!(gens.field, T => verify_generic::<T>(&gens, tol)?);
        report.seed = args.seed;
        report.result = result;
        report.pass = pass;
        return Ok(report);
    }
    let seed = args
        .seed
        .ok_or_else(|| schema("", "--build samples probe points and needs --seed"))?;
    let sep_path = args
        .sep
        .as_ref()
        .ok_or_else(|| schema("", "--build needs --sep"))?;
    let gamma_path = args
        .gamma
        .as_ref()
        .ok_or_else(|| schema("", "--build needs --gamma"))?;
    let (si, sep) = load("sep", sep_path)?;
    let (ci, gamma) = load("gamma", gamma_path)?;
    same_field(&gens.field, &sep.field, "the separating set")?;
    same_field(&gens.field, &gamma.field, "gamma")?;
    let mut report = Report::new("certify-free", &[&gi, &si, &ci]);
    report.param("field", gens.field);
    report.param("mode", "build");
    report.seed = Some(seed);
    let (result, pass) =
        with_field!(gens.field, T => build_generic::<T>(&gens, &sep, &gamma, seed, tol)?);
    report.result = result;
    report.pass = pass;
    Ok(report)
}

/// Reduced words of length `1..=max_len` in `m` generators.
fn word_count(m: usize, max_len: usize) -> u128 {
    let k = 2 * m as u128;
    (1..=max_len as u32).map(|l| k * (k - 1).pow(l - 1)).sum()
}

pub fn falsify(path: &Path, max_len: usize, tol: f64) -> Result<Report> {
    if max_len == 0 {
        return Err(schema("", "--max-len must be at least 1"));
    }
    let (input, doc) = load("gens", path)?;
    let mut report = Report::new("falsify", &[&input]);
    report.param("field", doc.field);
    report.param("max_len", max_len);
    let (word, m) = with_field!(doc.field, T => {
        let gens: Vec<Matrix<T>> = matrices::<T>(&doc, tol)?.into_iter().map(|(_, g)| g).collect();
        (freeness_falsifier(&gens, max_len)?, gens.len())
    });
    let identity_tol = if doc.field.kind.is_archimedean() {
        FALSIFIER_TOL
    } else {
        0.0
    };
    report.param("identity_tolerance", identity_tol);
    report.pass = word.is_none();
    report.result = json!({
        "relation": word.as_ref().map(|w| w.to_string()),
        "relation_letters": word.as_ref().map(|w| exact(w.pairs())),
        "words_in_search_space": exact(word_count(m, max_len).to_string()),
    });
    Ok(report)
}

fn dense_generic<T: CliScalar + pingpong_core::field::Archimedean>(
    doc: &Document,
    tol: f64,
) -> Result<(serde_json::Value, bool)> {
    let gens: Vec<Matrix<T>> = matrices::<T>(doc, tol)?
        .into_iter()
        .map(|(_, g)| g)
        .collect();
    let r = lie::dense_check(&gens)?;
    let result = json!({
        "generates_full": tagged(r.generates_full, Provenance::Tolerance),
        "dimension": tagged(r.dimension, Provenance::Tolerance),
        "target": exact(r.target),
        "rank_threshold": exact(lie::RANK_THRESHOLD),
        "warnings": r.warnings,
    });
    Ok((result, r.generates_full))
}

pub fn dense_check(path: &Path, tol: f64) -> Result<Report> {
    let (input, doc) = load("gens", path)?;
    let mut report = Report::new("dense-check", &[&input]);
    report.param("field", doc.field);
    let (result, pass) = match doc.field.kind {
        FieldKind::Real => dense_generic::<f64>(&doc, tol)?,
        FieldKind::Complex => dense_generic::<C64>(&doc, tol)?,
        FieldKind::Padic => {
            return Err(schema(
                "/field",
                "dense-check needs a real or complex field",
            ))
        }
    };
    report.result = result;
    report.pass = pass;
    Ok(report)
}
