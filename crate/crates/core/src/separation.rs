//! Separating sets: finite `F ⊂ SL_n` such that for every choice of `2m`
//! points and `2m` hyperplanes some `γ ∈ F` moves all points, under both `γ`
//! and `γ⁻¹`, more than `r` away from all hyperplanes.

use rayon::prelude::*;
use serde::Serialize;

use crate::cartan::{bilip_constant, CartanField};
use crate::error::{Error, Result};
use crate::field::LocalField;
use crate::matrix::Matrix;
use crate::projective::{dist_to_hyperplane, ProjHyperplane, ProjPoint};
use crate::sampling::chunk_rng;
use crate::words::{extend_level, Word};

#[derive(Clone, Debug, Serialize)]
pub struct SeparatingSet<T: LocalField> {
    elements: Vec<Matrix<T>>,
    #[serde(skip)]
    inverses: Vec<Matrix<T>>,
    m: usize,
    r: f64,
    /// Largest bi-Lipschitz constant `|a₁/a_n|²` over the elements.
    #[serde(rename = "C")]
    c: f64,
}

impl<T: CartanField> SeparatingSet<T> {
    /// `r` is the declared separation margin; it is not checked here.
    pub fn new(elements: Vec<Matrix<T>>, m: usize, r: f64) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptySet);
        }
        if !(r > 0.0) || m == 0 {
            return Err(Error::Precondition(format!(
                "need r > 0 and m >= 1, got r = {r}, m = {m}"
            )));
        }
        let n = elements[0].dim();
        if elements.iter().any(|g| !g.is_square() || g.dim() != n) {
            return Err(Error::Dimension(
                "separating set elements differ in size".into(),
            ));
        }
        let inverses = elements
            .iter()
            .map(|g| g.sl_inverse())
            .collect::<Result<Vec<_>>>()?;
        let c = elements
            .iter()
            .map(bilip_constant)
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(1.0, f64::max);
        Ok(SeparatingSet {
            elements,
            inverses,
            m,
            r,
            c,
        })
    }
}

impl<T: LocalField> SeparatingSet<T> {
    pub fn elements(&self) -> &[Matrix<T>] {
        &self.elements
    }

    pub fn inverses(&self) -> &[Matrix<T>] {
        &self.inverses
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// The uniform bi-Lipschitz constant `C`.
    pub fn bilip(&self) -> f64 {
        self.c
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }
}

/// Up to `2m` points and `2m` hyperplanes.
#[derive(Clone, Debug, Serialize)]
pub struct Configuration<T: LocalField> {
    pub points: Vec<ProjPoint<T>>,
    pub hyperplanes: Vec<ProjHyperplane<T>>,
}

impl<T: LocalField> Configuration<T> {
    pub fn new(points: Vec<ProjPoint<T>>, hyperplanes: Vec<ProjHyperplane<T>>) -> Self {
        Configuration {
            points,
            hyperplanes,
        }
    }

    /// `2m` random points and hyperplanes. In an adversarial configuration the
    /// `j`-th hyperplane passes through the `j`-th point.
    pub fn random<R: rand::Rng + ?Sized>(
        n: usize,
        m: usize,
        ctx: &T::Ctx,
        adversarial: bool,
        rng: &mut R,
    ) -> Self {
        let points: Vec<ProjPoint<T>> =
            (0..2 * m).map(|_| ProjPoint::random(n, ctx, rng)).collect();
        let hyperplanes = points
            .iter()
            .map(|p| {
                if adversarial {
                    loop {
                        let i = rng.random_range(0..n);
                        let j = (i + rng.random_range(1..n)) % n;
                        if let Ok(h) = ProjHyperplane::through(p, i.min(j), i.max(j)) {
                            return h;
                        }
                    }
                } else {
                    ProjHyperplane::random(n, ctx, rng)
                }
            })
            .collect();
        Configuration {
            points,
            hyperplanes,
        }
    }
}

/// `min_{i,j} min(d(γ v_i, H_j), d(γ⁻¹ v_i, H_j))`; `1` for an empty configuration.
pub fn separation_margin<T: LocalField>(
    gamma: &Matrix<T>,
    gamma_inv: &Matrix<T>,
    cfg: &Configuration<T>,
) -> f64 {
    let mut worst: f64 = 1.0;
    for p in &cfg.points {
        for g in [gamma, gamma_inv] {
            let Ok(q) = p.apply(g) else {
                return 0.0;
            };
            for h in &cfg.hyperplanes {
                worst = worst.min(dist_to_hyperplane(&q, h));
            }
        }
    }
    worst
}

/// The element of `F` with the largest margin on `cfg` (first on ties) and
/// that margin.
pub fn best_separator<T: LocalField>(
    set: &SeparatingSet<T>,
    cfg: &Configuration<T>,
) -> Result<(usize, f64)> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let bound = 2 * set.m;
    if cfg.points.len() > bound || cfg.hyperplanes.len() > bound {
        return Err(Error::Dimension(format!(
            "configuration exceeds 2m = {bound} points or hyperplanes"
        )));
    }
    let mut best = (0, f64::NEG_INFINITY);
    for (i, (g, gi)) in set.elements.iter().zip(&set.inverses).enumerate() {
        let margin = separation_margin(g, gi, cfg);
        if margin > best.1 {
            best = (i, margin);
        }
    }
    Ok(best)
}

/// Whether some element achieves margin strictly above the declared `r`.
pub fn verify_separating_for<T: LocalField>(
    set: &SeparatingSet<T>,
    cfg: &Configuration<T>,
) -> bool {
    best_separator(set, cfg).is_ok_and(|(_, margin)| margin > set.r)
}

/// Monte-Carlo estimate of the separation radius. This is an upper estimate
/// of the true infimum, not a certified bound.
#[derive(Clone, Debug, Serialize)]
pub struct RadiusEstimate {
    pub r_estimate: f64,
    /// Some sampled configuration had margin 0 for every element.
    pub failed: bool,
    pub trials: usize,
    /// How often each element was the best separator.
    pub wins: Vec<usize>,
}

/// Minimum over `trials` sampled configurations of the best margin. Trial `t`
/// draws from its own stream of `seed` and is adversarial when `t` is even,
/// so the estimate is antitone in `trials`.
pub fn estimate_radius<T: CartanField>(
    elements: &[Matrix<T>],
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<RadiusEstimate> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let set = SeparatingSet::new(elements.to_vec(), m, 1.0)?;
    let n = set.dim();
    let ctx = elements[0].ctx();
    let results: Vec<(usize, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = chunk_rng(seed, t as u64);
            let cfg = Configuration::random(n, m, &ctx, t % 2 == 0, &mut rng);
            best_separator(&set, &cfg).expect("configuration has 2m entries")
        })
        .collect();
    let mut wins = vec![0; set.len()];
    let mut r_estimate: f64 = 1.0;
    for &(i, margin) in &results {
        wins[i] += 1;
        r_estimate = r_estimate.min(margin);
    }
    Ok(RadiusEstimate {
        r_estimate,
        failed: r_estimate <= 0.0,
        trials,
        wins,
    })
}

/// Greedy heuristic for a separating set built from short words in
/// `generators`: repeatedly adds the word that most improves the worst margin
/// over a fixed sample of configurations, stopping at `target_r` or when no
/// word strictly improves it. The returned `r` is the sampled worst margin.
pub fn greedy_separating_set<T: CartanField>(
    generators: &[Matrix<T>],
    m: usize,
    max_word_len: usize,
    target_r: f64,
    trials: usize,
    seed: u64,
) -> Result<(SeparatingSet<T>, Vec<Word>)> {
    if generators.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = generators[0].dim();
    let ctx = generators[0].ctx();
    let inverses = generators
        .iter()
        .map(|g| g.sl_inverse())
        .collect::<Result<Vec<_>>>()?;
    let mut words = vec![Word::empty()];
    let mut level = vec![Word::empty()];
    for _ in 0..max_word_len {
        level = extend_level(&level, generators.len());
        words.extend(level.iter().cloned());
    }
    let candidates: Vec<(Word, Matrix<T>, Matrix<T>)> = words
        .into_iter()
        .map(|w| {
            let g = w.evaluate(generators, &inverses);
            let gi = g.sl_inverse()?;
            Ok((w, g, gi))
        })
        .collect::<Result<_>>()?;
    let configs: Vec<Configuration<T>> = (0..trials)
        .map(|t| Configuration::random(n, m, &ctx, t % 2 == 0, &mut chunk_rng(seed, t as u64)))
        .collect();
    let margins: Vec<Vec<f64>> = candidates
        .par_iter()
        .map(|(_, g, gi)| {
            configs
                .iter()
                .map(|c| separation_margin(g, gi, c))
                .collect()
        })
        .collect();

    let mut current = vec![0.0f64; configs.len()];
    let mut worst = 0.0f64;
    let mut chosen: Vec<usize> = Vec::new();
    while worst < target_r {
        let best = (0..candidates.len())
            .filter(|i| !chosen.contains(i))
            .map(|i| {
                let w = current
                    .iter()
                    .zip(&margins[i])
                    .map(|(a, b)| a.max(*b))
                    .fold(1.0, f64::min);
                (i, w)
            })
            .fold(None, |acc: Option<(usize, f64)>, x| match acc {
                Some(a) if a.1 >= x.1 => Some(a),
                _ => Some(x),
            });
        match best {
            Some((i, w)) if w > worst || chosen.is_empty() => {
                chosen.push(i);
                for (c, v) in current.iter_mut().zip(&margins[i]) {
                    *c = c.max(*v);
                }
                worst = w;
            }
            _ => break,
        }
    }
    if worst <= 0.0 {
        return Err(Error::NoSeparator(
            "no sampled word set separates the configurations".into(),
        ));
    }
    let elements = chosen.iter().map(|&i| candidates[i].1.clone()).collect();
    let chosen_words = chosen.iter().map(|&i| candidates[i].0.clone()).collect();
    Ok((SeparatingSet::new(elements, m, worst)?, chosen_words))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot(theta: f64) -> Matrix<f64> {
        let (s, c) = theta.sin_cos();
        Matrix::from_rows(vec![vec![c, -s], vec![s, c]]).unwrap()
    }

    fn cfg(h: usize) -> Configuration<f64> {
        Configuration::new(
            vec![ProjPoint::basis(2, 0, &())],
            vec![ProjHyperplane::coordinate(2, h, &())],
        )
    }

    #[test]
    fn best_separator_examples() {
        let id = SeparatingSet::new(vec![Matrix::identity(2, &())], 1, 0.5).unwrap();
        assert_eq!(best_separator(&id, &cfg(0)).unwrap(), (0, 1.0));
        assert_eq!(best_separator(&id, &cfg(1)).unwrap(), (0, 0.0));
        let two = SeparatingSet::new(
            vec![Matrix::identity(2, &()), rot(std::f64::consts::FRAC_PI_4)],
            1,
            0.5,
        )
        .unwrap();
        let (i, margin) = best_separator(&two, &cfg(1)).unwrap();
        assert_eq!(i, 1);
        assert!((margin - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn verify_is_strict() {
        let id = SeparatingSet::new(vec![Matrix::identity(2, &())], 1, 0.5).unwrap();
        assert!(verify_separating_for(&id, &cfg(0)));
        assert!(!verify_separating_for(&id, &cfg(1)));
        let boundary = SeparatingSet::new(vec![Matrix::identity(2, &())], 1, 1.0).unwrap();
        assert!(!verify_separating_for(&boundary, &cfg(0)));
    }

    #[test]
    fn identity_does_not_separate() {
        let e = estimate_radius(&[Matrix::<f64>::identity(2, &())], 1, 10, 1).unwrap();
        assert_eq!(e.r_estimate, 0.0);
        assert!(e.failed);
    }

    #[test]
    fn single_trial_is_that_configuration() {
        let f = vec![Matrix::identity(2, &()), rot(0.4)];
        let e = estimate_radius(&f, 1, 1, 9).unwrap();
        let set = SeparatingSet::new(f, 1, 1.0).unwrap();
        let c = Configuration::random(2, 1, &(), true, &mut chunk_rng(9, 0));
        assert_eq!(e.r_estimate, best_separator(&set, &c).unwrap().1);
    }

    #[test]
    fn empty_set_is_an_error() {
        assert!(matches!(
            SeparatingSet::<f64>::new(vec![], 1, 0.5),
            Err(Error::EmptySet)
        ));
    }

    #[test]
    fn greedy_set_from_rotations() {
        let (set, words) = greedy_separating_set(&[rot(0.3), rot(1.1)], 1, 3, 0.2, 200, 4).unwrap();
        assert_eq!(set.len(), words.len());
        assert!(set.r() > 0.0);
    }
}
