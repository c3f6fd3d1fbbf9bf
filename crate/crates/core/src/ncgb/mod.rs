//! Degree-truncated two-sided Gröbner bases in free algebras, with ideal
//! membership and checkable certificates.

mod certificate;
pub(crate) mod engine;
mod io;
mod oracle;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use certificate::{CertSource, CertStep, Certificate};
pub use io::BasisFile;
pub use oracle::oracle_membership;

use crate::free_algebra::{AlgebraError, Alphabet, FreePoly, GeneratorId, Scalar, Word};
use engine::{Engine, Limits, Terms};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NcgbError {
    #[error("polynomial of degree {degree} exceeds the basis bound {bound}")]
    DegreeAboveBound { degree: usize, bound: u32 },
    #[error("zero polynomial given as a generator")]
    ZeroGenerator,
    #[error("bound {0} exceeds the maximum word length")]
    BoundTooLarge(u32),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("basis file: {0}")]
    Format(String),
}

/// Deglex order; `precedence[0]` is the largest letter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialOrder {
    pub precedence: Vec<GeneratorId>,
}

impl MonomialOrder {
    /// The alphabet's own precedence.
    pub fn deglex(alphabet: &Alphabet) -> Self {
        MonomialOrder { precedence: alphabet.generators().to_vec() }
    }

    /// Same generators with precedence reversed.
    pub fn reversed(alphabet: &Alphabet) -> Self {
        let mut precedence = alphabet.generators().to_vec();
        precedence.reverse();
        MonomialOrder { precedence }
    }

    pub fn alphabet(&self) -> Result<Arc<Alphabet>, AlgebraError> {
        Alphabet::with_order(self.precedence.clone())
    }
}

/// Resource caps on a completion run.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompletionOptions {
    pub max_basis: Option<usize>,
    pub time_limit: Option<Duration>,
    /// Record provenance so membership can return certificates.
    pub certificates: bool,
    /// Stop after this degree; [`GroebnerBasis::extend_through`] resumes.
    pub through: Option<u32>,
}

impl CompletionOptions {
    pub fn new() -> Self {
        CompletionOptions { certificates: true, ..Default::default() }
    }
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Member(Box<Certificate>),
    NotMemberUpToBound(u32),
    Inconclusive(u32),
}

impl Verdict {
    pub fn is_member(&self) -> bool {
        matches!(self, Verdict::Member(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Member(_) => "Member",
            Verdict::NotMemberUpToBound(_) => "NotMemberUpToBound",
            Verdict::Inconclusive(_) => "Inconclusive",
        }
    }
}

/// A truncated Gröbner basis together with the provenance needed for
/// certificates.
pub struct GroebnerBasis {
    alphabet: Arc<Alphabet>,
    order: MonomialOrder,
    bound: u32,
    source: String,
    homogeneous: bool,
    complete_below: u32,
    truncated: bool,
    inputs: Vec<FreePoly>,
    engine: Engine,
}

fn to_terms(p: &FreePoly) -> Terms {
    p.iter_desc().map(|(w, c)| (*w, c.clone())).collect()
}

impl GroebnerBasis {
    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn set_source(&mut self, s: impl Into<String>) {
        self.source = s.into();
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    /// Degree up to which every obstruction has been resolved.
    pub fn complete_below(&self) -> u32 {
        self.complete_below
    }

    /// `true` if a resource limit stopped completion early.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn inputs(&self) -> &[FreePoly] {
        &self.inputs
    }

    pub fn len(&self) -> usize {
        self.engine.alive_rules().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Leading words of the basis elements, ascending.
    pub fn leading_words(&self) -> Vec<Word> {
        let mut v: Vec<Word> = self.engine.alive_rules().map(|r| self.engine.lead(r)).collect();
        v.sort();
        v
    }

    /// The reduced basis: monic, tails in normal form, sorted by leading word.
    pub fn elements(&self) -> Vec<FreePoly> {
        let mut rules: Vec<u32> = self.engine.alive_rules().collect();
        rules.sort_by_key(|&r| self.engine.lead(r));
        rules
            .into_iter()
            .map(|r| {
                let terms = self.engine.rule_terms(r);
                let tail: BTreeMap<Word, Scalar> = terms[1..].iter().cloned().collect();
                let mut scratch = Vec::new();
                let nf = self.engine.reduce(tail, &mut scratch);
                let mut p = FreePoly::from_terms(&self.alphabet, nf);
                p.add_term(terms[0].0, &Scalar::one());
                p
            })
            .collect()
    }

    fn check_degree(&self, p: &FreePoly) -> Result<(), NcgbError> {
        match p.degree() {
            Some(d) if d > self.bound as usize => Err(NcgbError::DegreeAboveBound { degree: d, bound: self.bound }),
            _ => Ok(()),
        }
    }

    fn reduce_with_steps(&self, p: &FreePoly) -> Result<(FreePoly, Vec<engine::Step>), NcgbError> {
        self.check_degree(p)?;
        let q = p.to_alphabet(&self.alphabet)?;
        let mut steps = Vec::new();
        let nf = self.engine.reduce(q.iter().map(|(w, c)| (*w, c.clone())).collect(), &mut steps);
        Ok((FreePoly::from_terms(&self.alphabet, nf), steps))
    }

    /// Continues completion through degree `degree` (capped at the bound).
    /// Returns `false` if a resource limit stopped it first.
    pub fn extend_through(&mut self, degree: u32, opts: &CompletionOptions) -> bool {
        let degree = degree.min(self.bound);
        if !self.truncated || degree <= self.complete_below && self.complete_below > 0 {
            return true;
        }
        let start = Instant::now();
        let limits = Limits { max_basis: opts.max_basis, deadline: opts.time_limit.map(|t| start + t) };
        let stopped = self.engine.run(degree as usize, limits);
        let next = self.engine.pending_degree();
        self.complete_below = match next {
            None => self.bound,
            Some(d) => (d as u32).saturating_sub(1).min(self.bound),
        };
        self.truncated = next.is_some();
        !stopped
    }

    /// Normal form over the basis alphabet.
    pub fn normal_form(&self, p: &FreePoly) -> Result<FreePoly, NcgbError> {
        let (nf, _) = self.reduce_with_steps(p)?;
        Ok(nf)
    }

    pub fn membership(&self, q: &FreePoly) -> Result<Verdict, NcgbError> {
        let (nf, steps) = self.reduce_with_steps(q)?;
        if nf.is_zero() {
            let query = q.to_alphabet(&self.alphabet)?;
            let cert = if self.engine.track {
                Certificate::extract(&self.engine, &self.inputs, &self.alphabet, query, &steps)
            } else {
                Certificate::unavailable(&self.inputs, &self.alphabet, query)
            };
            return Ok(Verdict::Member(Box::new(cert)));
        }
        let d = q.degree().unwrap_or(0) as u32;
        if self.homogeneous && d <= self.complete_below {
            Ok(Verdict::NotMemberUpToBound(self.bound))
        } else {
            Ok(Verdict::Inconclusive(self.bound))
        }
    }
}

/// Completes `generators` under `order` up to word length `bound`.
pub fn complete(
    generators: &[FreePoly],
    order: &MonomialOrder,
    bound: u32,
    opts: &CompletionOptions,
) -> Result<GroebnerBasis, NcgbError> {
    if bound as usize > crate::free_algebra::MAX_WORD_LEN {
        return Err(NcgbError::BoundTooLarge(bound));
    }
    let alphabet = order.alphabet()?;
    let mut inputs = Vec::with_capacity(generators.len());
    for g in generators {
        if g.is_zero() {
            return Err(NcgbError::ZeroGenerator);
        }
        let d = g.degree().unwrap_or(0);
        if d > bound as usize {
            return Err(NcgbError::DegreeAboveBound { degree: d, bound });
        }
        inputs.push(g.to_alphabet(&alphabet)?);
    }
    let homogeneous = inputs.iter().all(FreePoly::is_homogeneous);
    let mut engine = Engine::new(bound as usize, opts.certificates);
    for (i, g) in inputs.iter().enumerate() {
        engine.add_input(to_terms(g), i);
    }
    let mut gb = GroebnerBasis {
        alphabet,
        order: order.clone(),
        bound,
        source: String::new(),
        homogeneous,
        complete_below: 0,
        truncated: true,
        inputs,
        engine,
    };
    gb.extend_through(opts.through.unwrap_or(bound), opts);
    Ok(gb)
}

/// Free function form of [`GroebnerBasis::normal_form`].
pub fn normal_form(p: &FreePoly, gb: &GroebnerBasis) -> Result<FreePoly, NcgbError> {
    gb.normal_form(p)
}

/// Free function form of [`GroebnerBasis::membership`].
pub fn membership(q: &FreePoly, gb: &GroebnerBasis) -> Result<Verdict, NcgbError> {
    gb.membership(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uv1() -> Arc<Alphabet> {
        Alphabet::uv(1)
    }

    fn gb_of(gens: &[&str], al: &Arc<Alphabet>, bound: u32) -> GroebnerBasis {
        let gens: Vec<FreePoly> = gens.iter().map(|s| FreePoly::parse(s, al).unwrap()).collect();
        complete(&gens, &MonomialOrder::deglex(al), bound, &CompletionOptions::new()).unwrap()
    }

    #[test]
    fn single_commutator() {
        let al = uv1();
        let gb = gb_of(&["u1.v1 - v1.u1"], &al, 6);
        assert_eq!(gb.len(), 1);
        assert_eq!(gb.elements()[0].to_string(), "u1.v1 - v1.u1");
        let nf = gb.normal_form(&FreePoly::parse("u1.v1", &al).unwrap()).unwrap();
        assert_eq!(nf.to_string(), "v1.u1");
        let g = FreePoly::parse("u1.v1 - v1.u1", &al).unwrap();
        assert!(gb.normal_form(&g).unwrap().is_zero());
    }

    #[test]
    fn leibniz_reduces_to_zero() {
        let al = Alphabet::uv(2);
        let p = |s: &str| FreePoly::parse(s, &al).unwrap();
        let gb = gb_of(&["u1.v1 - v1.u1", "u2.v1 - v1.u2"], &al, 6);
        let q = p("u1.u2").try_commutator(&p("v1")).unwrap();
        match gb.membership(&q).unwrap() {
            Verdict::Member(c) => {
                assert!(c.verify().unwrap());
                assert_eq!(c.query(), &q);
            }
            v => panic!("{v:?}"),
        }
        let not = p("u1.v2 - v2.u1");
        assert!(matches!(gb.membership(&not).unwrap(), Verdict::NotMemberUpToBound(6)));
        assert!(matches!(gb.membership(&FreePoly::zero(&al)).unwrap(), Verdict::Member(_)));
    }

    #[test]
    fn overlap_generates_new_element() {
        // x·y = y·x and x·x = y: the overlap x·x·y gives y·y·x... well-defined
        // closure; membership checked against the oracle.
        let al = Alphabet::u(2);
        let p = |s: &str| FreePoly::parse(s, &al).unwrap();
        let gens = vec![p("u1.u2 - u2.u1"), p("u1.u1 - u2.u2")];
        let gb = complete(&gens, &MonomialOrder::deglex(&al), 5, &CompletionOptions::new()).unwrap();
        for q in ["u2.u2.u1 - u2.u1.u2", "u1.u1.u1 - u2.u2.u1", "u1.u2.u1 - u2.u1.u1", "u2.u1.u2.u1 - u1.u2.u1.u2"] {
            let q = p(q);
            let m = gb.membership(&q).unwrap().is_member();
            assert_eq!(m, oracle_membership(&gens, &q, 5).unwrap(), "{q}");
        }
    }

    #[test]
    fn degree_above_bound_is_error() {
        let al = uv1();
        let gb = gb_of(&["u1.v1 - v1.u1"], &al, 3);
        let q = FreePoly::parse("u1.u1.u1.u1", &al).unwrap();
        assert!(matches!(gb.normal_form(&q), Err(NcgbError::DegreeAboveBound { .. })));
        let gens = vec![q];
        assert!(complete(&gens, &MonomialOrder::deglex(&al), 3, &CompletionOptions::new()).is_err());
    }

    #[test]
    fn inhomogeneous_gives_inconclusive() {
        let al =
            Alphabet::new([GeneratorId::g(1), GeneratorId::inverse_of(GeneratorId::g(1)), GeneratorId::h(1)]).unwrap();
        let gb = gb_of(&["g1.g1^-1 - 1", "g1^-1.g1 - 1"], &al, 6);
        assert!(!gb.is_homogeneous());
        let q = FreePoly::parse("g1.h1.g1^-1 - h1", &al).unwrap();
        assert!(matches!(gb.membership(&q).unwrap(), Verdict::Inconclusive(6)));
        let q = FreePoly::parse("g1.g1.g1^-1.g1^-1 - 1", &al).unwrap();
        assert!(gb.membership(&q).unwrap().is_member());
    }

    #[test]
    fn reversed_order_same_verdicts() {
        let al = Alphabet::uv(2);
        let p = |s: &str| FreePoly::parse(s, &al).unwrap();
        let gens = vec![p("u1.v1 - v1.u1"), p("u2.v2 - v2.u2"), p("u1.v2 + u2.v1 - v2.u1 - v1.u2")];
        let a = complete(&gens, &MonomialOrder::deglex(&al), 5, &CompletionOptions::new()).unwrap();
        let b = complete(&gens, &MonomialOrder::reversed(&al), 5, &CompletionOptions::new()).unwrap();
        let q = p("u1.u2.v1.v2 - v1.v2.u1.u2");
        assert_eq!(a.membership(&q).unwrap().is_member(), b.membership(&q).unwrap().is_member());
        let q = p("u1.u2 - u2.u1");
        assert_eq!(a.membership(&q).unwrap().label(), b.membership(&q).unwrap().label());
    }
}
