use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::{AlgebraError, Alphabet, GeneratorId, Scalar, Word};

/// An element of the free associative algebra ℚ⟨alphabet⟩: a finite map from
/// words to nonzero rationals, kept sorted by the deglex word order.
#[derive(Clone)]
pub struct FreePoly {
    alphabet: Arc<Alphabet>,
    terms: BTreeMap<Word, Scalar>,
}

pub(crate) fn same_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn mismatch(a: &Alphabet, b: &Alphabet) -> AlgebraError {
    AlgebraError::AlphabetMismatch { left: a.to_string(), right: b.to_string() }
}

impl FreePoly {
    pub fn zero(alphabet: &Arc<Alphabet>) -> Self {
        FreePoly { alphabet: alphabet.clone(), terms: BTreeMap::new() }
    }

    pub fn one(alphabet: &Arc<Alphabet>) -> Self {
        Self::constant(alphabet, Scalar::one())
    }

    pub fn constant(alphabet: &Arc<Alphabet>, c: Scalar) -> Self {
        Self::monomial(alphabet, Word::empty(), c)
    }

    pub fn monomial(alphabet: &Arc<Alphabet>, w: Word, c: Scalar) -> Self {
        let mut p = Self::zero(alphabet);
        if !c.is_zero() {
            p.terms.insert(w, c);
        }
        p
    }

    pub fn generator(alphabet: &Arc<Alphabet>, g: GeneratorId) -> Result<Self, AlgebraError> {
        let l = alphabet.letter_of(g).ok_or_else(|| AlgebraError::UnknownGenerator(g.to_string()))?;
        Ok(Self::monomial(alphabet, Word::letter(l), Scalar::one()))
    }

    /// The product of the given generators, in order.
    pub fn word_of(alphabet: &Arc<Alphabet>, gens: &[GeneratorId]) -> Result<Self, AlgebraError> {
        let letters = gens
            .iter()
            .map(|g| alphabet.letter_of(*g).ok_or_else(|| AlgebraError::UnknownGenerator(g.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::monomial(alphabet, Word::from_letters(&letters)?, Scalar::one()))
    }

    /// Sums the given terms, dropping zeros.
    pub fn from_terms(alphabet: &Arc<Alphabet>, terms: impl IntoIterator<Item = (Word, Scalar)>) -> Self {
        let mut p = Self::zero(alphabet);
        for (w, c) in terms {
            p.add_term(w, &c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, w: Word, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            Entry::Occupied(mut e) => {
                let s = e.get() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing word order.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    /// Terms from the leading word down.
    pub fn iter_desc(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    /// Largest word with its coefficient.
    pub fn leading_term(&self) -> Option<(Word, &Scalar)> {
        self.terms.iter().next_back().map(|(w, c)| (*w, c))
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.leading_term().map(|(w, _)| w.len())
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().next().map(|w| w.len())
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degree() == self.min_degree()
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> FreePoly {
        match self.leading_term() {
            None => self.clone(),
            Some((_, c)) => self.scale(&c.recip().expect("nonzero")),
        }
    }

    pub fn scale(&self, c: &Scalar) -> FreePoly {
        if c.is_zero() {
            return Self::zero(&self.alphabet);
        }
        let terms = self.terms.iter().map(|(w, a)| (*w, a * c)).collect();
        FreePoly { alphabet: self.alphabet.clone(), terms }
    }

    fn check(&self, other: &FreePoly) -> Result<(), AlgebraError> {
        if same_alphabet(&self.alphabet, &other.alphabet) {
            Ok(())
        } else {
            Err(mismatch(&self.alphabet, &other.alphabet))
        }
    }

    pub fn try_add(&self, other: &FreePoly) -> Result<FreePoly, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(*w, c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &FreePoly) -> Result<FreePoly, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(*w, &-c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &FreePoly) -> Result<FreePoly, AlgebraError> {
        self.check(other)?;
        let mut out = Self::zero(&self.alphabet);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let w = a.concat(*b).ok_or(AlgebraError::WordTooLong(a.len() + b.len()))?;
                out.add_term(w, &(x * y));
            }
        }
        Ok(out)
    }

    /// `ab − ba`.
    pub fn try_commutator(&self, other: &FreePoly) -> Result<FreePoly, AlgebraError> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    pub fn pow(&self, e: u32) -> Result<FreePoly, AlgebraError> {
        let mut acc = Self::one(&self.alphabet);
        for _ in 0..e {
            acc = acc.try_mul(self)?;
        }
        Ok(acc)
    }

    /// Multiplies every word by `a` on the left and `b` on the right.
    pub fn sandwich(&self, a: Word, b: Word) -> Result<FreePoly, AlgebraError> {
        let mut terms = BTreeMap::new();
        for (w, c) in &self.terms {
            let m =
                a.concat(*w).and_then(|x| x.concat(b)).ok_or(AlgebraError::WordTooLong(a.len() + w.len() + b.len()))?;
            terms.insert(m, c.clone());
        }
        Ok(FreePoly { alphabet: self.alphabet.clone(), terms })
    }

    /// Bidegree-free homogeneous component of the given degree.
    pub fn homogeneous_part(&self, d: usize) -> FreePoly {
        let terms = self.terms.iter().filter(|(w, _)| w.len() == d).map(|(w, c)| (*w, c.clone())).collect();
        FreePoly { alphabet: self.alphabet.clone(), terms }
    }

    /// Re-expresses the polynomial over another alphabet that contains every
    /// generator used here.
    pub fn to_alphabet(&self, target: &Arc<Alphabet>) -> Result<FreePoly, AlgebraError> {
        if same_alphabet(&self.alphabet, target) {
            return Ok(self.clone());
        }
        let map = self
            .alphabet
            .generators()
            .iter()
            .map(|g| target.letter_of(*g).ok_or_else(|| AlgebraError::UnknownGenerator(g.to_string())))
            .collect::<Result<Vec<u8>, _>>()?;
        Ok(FreePoly::from_terms(target, self.terms.iter().map(|(w, c)| (w.map_letters(&map), c.clone()))))
    }

    /// Substitutes generators through `f` (generator -> generator) into `target`.
    pub fn rename(
        &self,
        target: &Arc<Alphabet>,
        f: impl Fn(GeneratorId) -> GeneratorId,
    ) -> Result<FreePoly, AlgebraError> {
        let map = self
            .alphabet
            .generators()
            .iter()
            .map(|g| {
                let img = f(*g);
                target.letter_of(img).ok_or_else(|| AlgebraError::UnknownGenerator(img.to_string()))
            })
            .collect::<Result<Vec<u8>, _>>()?;
        Ok(FreePoly::from_terms(target, self.terms.iter().map(|(w, c)| (w.map_letters(&map), c.clone()))))
    }

    /// Generators that occur in some term.
    pub fn support(&self) -> Vec<GeneratorId> {
        let mut seen = vec![false; self.alphabet.len()];
        for w in self.terms.keys() {
            for l in w.letters() {
                seen[l as usize] = true;
            }
        }
        seen.iter().enumerate().filter(|(_, s)| **s).map(|(i, _)| self.alphabet.generator(i as u8)).collect()
    }
}

/// `ab − ba`; errors when the alphabets differ.
pub fn commutator(a: &FreePoly, b: &FreePoly) -> Result<FreePoly, AlgebraError> {
    a.try_commutator(b)
}

/// Exact product; errors when the alphabets differ.
pub fn poly_mul(a: &FreePoly, b: &FreePoly) -> Result<FreePoly, AlgebraError> {
    a.try_mul(b)
}

impl PartialEq for FreePoly {
    fn eq(&self, other: &Self) -> bool {
        same_alphabet(&self.alphabet, &other.alphabet) && self.terms == other.terms
    }
}

impl Eq for FreePoly {}

impl std::hash::Hash for FreePoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        for (w, c) in &self.terms {
            w.hash(state);
            c.hash(state);
        }
    }
}

impl fmt::Display for FreePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.iter_desc().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if w.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", w.display(&self.alphabet))?;
            } else {
                write!(f, "{mag}*{}", w.display(&self.alphabet))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for FreePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreePoly({self})")
    }
}

// Operator forms panic on alphabet mismatch; use the `try_*` methods to
// handle that case as an error.
impl Add for &FreePoly {
    type Output = FreePoly;
    fn add(self, rhs: &FreePoly) -> FreePoly {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Sub for &FreePoly {
    type Output = FreePoly;
    fn sub(self, rhs: &FreePoly) -> FreePoly {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul for &FreePoly {
    type Output = FreePoly;
    fn mul(self, rhs: &FreePoly) -> FreePoly {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &FreePoly {
    type Output = FreePoly;
    fn neg(self) -> FreePoly {
        self.scale(&Scalar::from_int(-1))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<FreePoly> for FreePoly {
            type Output = FreePoly;
            fn $m(self, rhs: FreePoly) -> FreePoly {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a FreePoly> for FreePoly {
            type Output = FreePoly;
            fn $m(self, rhs: &'a FreePoly) -> FreePoly {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<FreePoly> for &'a FreePoly {
            type Output = FreePoly;
            fn $m(self, rhs: FreePoly) -> FreePoly {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FreePoly {
    type Output = FreePoly;
    fn neg(self) -> FreePoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uv() -> Arc<Alphabet> {
        Alphabet::uv(2)
    }

    fn p(s: &str) -> FreePoly {
        FreePoly::parse(s, &uv()).unwrap()
    }

    #[test]
    fn unit_is_identity() {
        let q = p("u1.v2 - 3*u2 + 1/2");
        assert_eq!(&FreePoly::one(&uv()) * &q, q);
        assert_eq!(&q * &FreePoly::one(&uv()), q);
    }

    #[test]
    fn distributivity_keeps_cross_terms_apart() {
        let s = p("u1 + u2");
        assert_eq!(&s * &s, p("u1.u1 + u1.u2 + u2.u1 + u2.u2"));
    }

    #[test]
    fn linear_factor_product() {
        assert_eq!(&p("1 + u2") * &p("1 + u1"), p("1 + u1 + u2 + u2.u1"));
    }

    #[test]
    fn commutator_examples() {
        assert!(commutator(&p("u1"), &p("u1")).unwrap().is_zero());
        assert_eq!(commutator(&p("u1"), &p("v1")).unwrap(), p("u1.v1 - v1.u1"));
        let lhs = commutator(&p("u1.u2"), &p("v1")).unwrap();
        let rhs =
            &p("u1") * &commutator(&p("u2"), &p("v1")).unwrap() + &commutator(&p("u1"), &p("v1")).unwrap() * &p("u2");
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = FreePoly::one(&Alphabet::uv(1));
        let b = FreePoly::one(&Alphabet::uv(2));
        let err = a.try_mul(&b).unwrap_err();
        assert!(err.to_string().contains("{u1,v1}"));
        assert!(err.to_string().contains("{u1,u2,v1,v2}"));
    }

    #[test]
    fn leading_term_and_degree() {
        let q = p("v1.u1 + u1.v1 + 5");
        assert_eq!(q.leading_term().unwrap().0.display(&uv()), "u1.v1");
        assert_eq!(q.degree(), Some(2));
        assert!(!q.is_homogeneous());
        assert_eq!(FreePoly::zero(&uv()).degree(), None);
    }

    #[test]
    fn display_is_leading_first() {
        assert_eq!(p("v1.u1 - u1.v1").to_string(), "-u1.v1 + v1.u1");
        assert_eq!(p("1/2*u2 - 3").to_string(), "1/2*u2 - 3");
        assert_eq!(FreePoly::zero(&uv()).to_string(), "0");
    }

    #[test]
    fn alphabet_embedding() {
        let small = Alphabet::uv(1);
        let q = FreePoly::parse("u1.v1", &small).unwrap();
        let big = q.to_alphabet(&uv()).unwrap();
        assert_eq!(big, p("u1.v1"));
        assert!(p("u2").to_alphabet(&small).is_err());
    }
}
