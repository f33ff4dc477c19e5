//! Reduced words in free generators and their evaluation on matrices.

use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::LocalField;
use crate::matrix::Matrix;

/// A letter `x_i^{±1}` encoded as `2i` (positive) or `2i + 1` (inverse), so
/// that letters sort as `a < a⁻¹ < b < b⁻¹ < …`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter(2 * generator as u32 + inverse as u32)
    }

    pub fn generator(self) -> usize {
        (self.0 / 2) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 % 2 == 1
    }

    pub fn exponent(self) -> i32 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }
}

/// A reduced word: no letter is followed by its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    /// Builds a word from `(generator, ±1)` pairs, failing if it is not reduced.
    pub fn from_pairs(pairs: &[(usize, i32)]) -> Result<Self> {
        let mut w = Word::empty();
        for &(g, e) in pairs {
            if e != 1 && e != -1 {
                return Err(Error::InvalidScalar(format!("exponent {e} is not ±1")));
            }
            let l = Letter::new(g, e < 0);
            if !w.can_extend(l) {
                return Err(Error::Precondition("word is not reduced".into()));
            }
            w.letters.push(l);
        }
        Ok(w)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn pairs(&self) -> Vec<(usize, i32)> {
        self.letters
            .iter()
            .map(|l| (l.generator(), l.exponent()))
            .collect()
    }

    pub fn can_extend(&self, l: Letter) -> bool {
        self.letters.last().is_none_or(|&last| last != l.inverse())
    }

    pub fn extended(&self, l: Letter) -> Word {
        let mut letters = self.letters.clone();
        letters.push(l);
        Word { letters }
    }

    /// `x_{i₁}^{e₁} ⋯ x_{i_k}^{e_k}` given the generators and their inverses.
    pub fn evaluate<T: LocalField>(&self, gens: &[Matrix<T>], inverses: &[Matrix<T>]) -> Matrix<T> {
        let n = gens[0].dim();
        let mut acc = Matrix::identity(n, &gens[0].ctx());
        for l in &self.letters {
            let m = if l.is_inverse() {
                &inverses[l.generator()]
            } else {
                &gens[l.generator()]
            };
            acc = &acc * m;
        }
        acc
    }
}

fn letter_name(g: usize) -> String {
    if g < 26 {
        ((b'a' + g as u8) as char).to_string()
    } else {
        format!("x{g}")
    }
}

fn superscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

impl fmt::Display for Word {
    /// Runs of a letter are written as powers: `a⁴`, `aba⁻¹b⁻¹`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut j = i;
            while j < self.letters.len() && self.letters[j] == l {
                j += 1;
            }
            let run = j - i;
            write!(f, "{}", letter_name(l.generator()))?;
            match (l.is_inverse(), run) {
                (false, 1) => {}
                (false, k) => write!(f, "{}", superscript(k))?,
                (true, k) => write!(f, "⁻{}", superscript(k))?,
            }
            i = j;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// All reduced words of length exactly `len` in `m` generators, in
/// lexicographic order.
pub fn reduced_words(m: usize, len: usize) -> Vec<Word> {
    let mut level = vec![Word::empty()];
    for _ in 0..len {
        level = extend_level(&level, m);
    }
    level
}

pub(crate) fn extend_level(level: &[Word], m: usize) -> Vec<Word> {
    level
        .iter()
        .flat_map(|w| {
            (0..2 * m as u32)
                .map(Letter)
                .filter(|&l| w.can_extend(l))
                .map(move |l| w.extended(l))
        })
        .collect()
}

/// Words of length `1..=max_len` in enumeration order, each with its value.
/// Levels are built in parallel from the previous level's products.
pub fn for_each_level<T: LocalField>(
    gens: &[Matrix<T>],
    inverses: &[Matrix<T>],
    max_len: usize,
    mut visit: impl FnMut(usize, &[(Word, Matrix<T>)]) -> bool,
) {
    let m = gens.len();
    let n = gens[0].dim();
    let mut level = vec![(Word::empty(), Matrix::identity(n, &gens[0].ctx()))];
    for len in 1..=max_len {
        level = level
            .par_iter()
            .flat_map_iter(|(w, g)| {
                (0..2 * m as u32)
                    .map(Letter)
                    .filter(|&l| w.can_extend(l))
                    .map(move |l| {
                        let step = if l.is_inverse() {
                            &inverses[l.generator()]
                        } else {
                            &gens[l.generator()]
                        };
                        (w.extended(l), g * step)
                    })
            })
            .collect();
        if !visit(len, &level) {
            return;
        }
    }
}
