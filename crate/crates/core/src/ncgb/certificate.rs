use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::free_algebra::{AlgebraError, Alphabet, FreePoly, Scalar, Word};

use super::engine::{Engine, Source, Step};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CertSource {
    /// An input generator, by position.
    Generator(usize),
    /// An earlier lemma of the same certificate.
    Lemma(usize),
}

/// `coeff · left · source · right`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertStep {
    pub coeff: Scalar,
    pub left: Word,
    pub source: CertSource,
    pub right: Word,
}

/// A straight-line proof of ideal membership: each lemma is a two-sided
/// combination of generators and earlier lemmas, and the query is a
/// two-sided combination of generators and lemmas.
#[derive(Debug, Clone)]
pub struct Certificate {
    alphabet: Arc<Alphabet>,
    generators: Vec<FreePoly>,
    lemmas: Vec<Vec<CertStep>>,
    steps: Vec<CertStep>,
    query: FreePoly,
    available: bool,
}

impl Certificate {
    pub(crate) fn extract(
        engine: &Engine,
        inputs: &[FreePoly],
        alphabet: &Arc<Alphabet>,
        query: FreePoly,
        steps: &[Step],
    ) -> Self {
        let mut needed = BTreeSet::new();
        let mut stack: Vec<u32> = steps.iter().map(|s| s.rec).collect();
        while let Some(r) = stack.pop() {
            if let Source::Derived(st) = &engine.records[r as usize].source {
                if needed.insert(r) {
                    stack.extend(st.iter().map(|s| s.rec));
                }
            }
        }
        let lemma_of: BTreeMap<u32, usize> = needed.iter().enumerate().map(|(i, r)| (*r, i)).collect();
        let conv = |s: &Step| CertStep {
            coeff: s.coeff.clone(),
            left: s.left,
            source: match engine.records[s.rec as usize].source {
                Source::Input(i) => CertSource::Generator(i),
                Source::Derived(_) => CertSource::Lemma(lemma_of[&s.rec]),
            },
            right: s.right,
        };
        let lemmas = needed
            .iter()
            .map(|r| match &engine.records[*r as usize].source {
                Source::Derived(st) => st.iter().map(conv).collect(),
                Source::Input(_) => unreachable!(),
            })
            .collect();
        Certificate {
            alphabet: alphabet.clone(),
            generators: inputs.to_vec(),
            lemmas,
            steps: steps.iter().map(conv).collect(),
            query,
            available: true,
        }
    }

    pub(crate) fn unavailable(inputs: &[FreePoly], alphabet: &Arc<Alphabet>, query: FreePoly) -> Self {
        Certificate {
            alphabet: alphabet.clone(),
            generators: inputs.to_vec(),
            lemmas: Vec::new(),
            steps: Vec::new(),
            query,
            available: false,
        }
    }

    /// `false` when the basis was computed without provenance tracking.
    pub fn is_available(&self) -> bool {
        self.available
    }

    pub fn query(&self) -> &FreePoly {
        &self.query
    }

    pub fn generators(&self) -> &[FreePoly] {
        &self.generators
    }

    pub fn lemmas(&self) -> &[Vec<CertStep>] {
        &self.lemmas
    }

    pub fn steps(&self) -> &[CertStep] {
        &self.steps
    }

    fn combine(&self, steps: &[CertStep], lemma_polys: &[FreePoly]) -> Result<FreePoly, AlgebraError> {
        let mut acc = FreePoly::zero(&self.alphabet);
        for s in steps {
            let base = match s.source {
                CertSource::Generator(i) => &self.generators[i],
                CertSource::Lemma(j) => &lemma_polys[j],
            };
            acc = acc.try_add(&base.sandwich(s.left, s.right)?.scale(&s.coeff))?;
        }
        Ok(acc)
    }

    /// Expands every lemma and checks that the final combination equals the
    /// query exactly.
    pub fn verify(&self) -> Result<bool, AlgebraError> {
        if !self.available {
            return Ok(false);
        }
        let mut polys: Vec<FreePoly> = Vec::with_capacity(self.lemmas.len());
        for (j, l) in self.lemmas.iter().enumerate() {
            if l.iter().any(|s| matches!(s.source, CertSource::Lemma(k) if k >= j)) {
                return Ok(false);
            }
            let p = self.combine(l, &polys)?;
            polys.push(p);
        }
        Ok(self.combine(&self.steps, &polys)? == self.query)
    }

    /// Rewrites the certificate as `Σ c · a · generator_i · b` with like terms
    /// merged, or `None` if that would exceed `max_terms`.
    pub fn flatten(&self, max_terms: usize) -> Option<Vec<(Scalar, Word, usize, Word)>> {
        type Flat = BTreeMap<(Word, usize, Word), Scalar>;
        fn push(out: &mut Flat, key: (Word, usize, Word), c: Scalar) {
            let e = out.entry(key).or_insert_with(Scalar::zero);
            *e = &*e + &c;
        }
        fn expand(steps: &[CertStep], lemmas: &[Flat], max: usize) -> Option<Flat> {
            let mut out = Flat::new();
            for s in steps {
                match s.source {
                    CertSource::Generator(i) => push(&mut out, (s.left, i, s.right), s.coeff.clone()),
                    CertSource::Lemma(j) => {
                        for ((a, i, b), c) in &lemmas[j] {
                            let key = (s.left.concat(*a)?, *i, b.concat(s.right)?);
                            push(&mut out, key, &s.coeff * c);
                        }
                    }
                }
                if out.len() > max {
                    return None;
                }
            }
            out.retain(|_, c| !c.is_zero());
            Some(out)
        }
        if !self.available {
            return None;
        }
        let mut flat: Vec<Flat> = Vec::with_capacity(self.lemmas.len());
        for l in &self.lemmas {
            let f = expand(l, &flat, max_terms)?;
            flat.push(f);
        }
        let top = expand(&self.steps, &flat, max_terms)?;
        Some(top.into_iter().map(|((a, i, b), c)| (c, a, i, b)).collect())
    }
}
