use std::collections::BTreeMap;
use std::sync::Arc;

use super::{AlgebraError, Alphabet, FreePoly, GeneratorId, Word};

/// A derivation of the free algebra, given by the images of generators and
/// extended by Leibniz's law.
#[derive(Clone, Debug)]
pub struct Derivation {
    alphabet: Arc<Alphabet>,
    images: BTreeMap<GeneratorId, FreePoly>,
}

impl Derivation {
    pub fn new(alphabet: &Arc<Alphabet>) -> Self {
        Derivation { alphabet: alphabet.clone(), images: BTreeMap::new() }
    }

    pub fn with_image(mut self, g: GeneratorId, image: FreePoly) -> Result<Self, AlgebraError> {
        if !self.alphabet.contains(g) {
            return Err(AlgebraError::UnknownGenerator(g.to_string()));
        }
        let image = image.to_alphabet(&self.alphabet)?;
        self.images.insert(g, image);
        Ok(self)
    }

    pub fn image(&self, g: GeneratorId) -> Option<&FreePoly> {
        self.images.get(&g)
    }

    /// Applies the derivation: linear, and on a word `x1…xk` it is
    /// `Σ x1…x(i−1)·d(xi)·x(i+1)…xk`.
    pub fn derive(&self, p: &FreePoly) -> Result<FreePoly, AlgebraError> {
        if p.alphabet() != &self.alphabet {
            return Err(AlgebraError::AlphabetMismatch {
                left: self.alphabet.to_string(),
                right: p.alphabet().to_string(),
            });
        }
        let mut out = FreePoly::zero(&self.alphabet);
        for (w, c) in p.iter() {
            for i in 0..w.len() {
                let g = self.alphabet.generator(w.letter_at(i));
                let img = self.images.get(&g).ok_or_else(|| AlgebraError::MissingImage(g.to_string()))?;
                let left = w.prefix(i);
                let right = w.suffix(w.len() - i - 1);
                for (m, a) in img.iter() {
                    let word = left
                        .concat(*m)
                        .and_then(|x| x.concat(right))
                        .ok_or(AlgebraError::WordTooLong(w.len() - 1 + m.len()))?;
                    out.add_term(word, &(c * a));
                }
            }
        }
        Ok(out)
    }
}

/// The inner derivation `z ↦ [a, z]`.
pub fn make_inner_derivation(a: &FreePoly, alphabet: &Arc<Alphabet>) -> Result<Derivation, AlgebraError> {
    let a = a.to_alphabet(alphabet)?;
    let mut d = Derivation::new(alphabet);
    for (i, g) in alphabet.generators().iter().enumerate() {
        let x = FreePoly::monomial(alphabet, Word::letter(i as u8), super::Scalar::one());
        d.images.insert(*g, a.try_commutator(&x)?);
    }
    Ok(d)
}

/// Free function form of [`Derivation::derive`].
pub fn derive(d: &Derivation, p: &FreePoly) -> Result<FreePoly, AlgebraError> {
    d.derive(p)
}
