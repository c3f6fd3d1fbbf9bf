//! JSON export and import of bases, including provenance.

use serde::{Deserialize, Serialize};

use crate::free_algebra::{FreePoly, Scalar, Word};

use super::engine::{Engine, Record, Rule, Source, Step};
use super::{GroebnerBasis, MonomialOrder, NcgbError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct StepFile(Scalar, Vec<u8>, u32, Vec<u8>);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum SourceFile {
    Input(usize),
    Derived(Vec<StepFile>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct RecordFile {
    poly: String,
    source: SourceFile,
}

/// Serialized form of a [`GroebnerBasis`]. `elements` is the reduced basis
/// for reading; `records` and `rules` carry what is needed to resume
/// certificate extraction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisFile {
    pub source: String,
    pub order: MonomialOrder,
    pub bound: u32,
    pub homogeneous: bool,
    pub complete_below: u32,
    pub truncated: bool,
    pub inputs: Vec<String>,
    pub elements: Vec<String>,
    records: Vec<RecordFile>,
    rules: Vec<(u32, bool)>,
}

fn word_from(letters: &[u8]) -> Result<Word, NcgbError> {
    Word::from_letters(letters).map_err(NcgbError::from)
}

impl GroebnerBasis {
    pub fn to_file(&self) -> BasisFile {
        let e = &self.engine;
        let records = e
            .records
            .iter()
            .map(|r| RecordFile {
                poly: FreePoly::from_terms(&self.alphabet, r.terms.iter().cloned()).to_string(),
                source: match &r.source {
                    Source::Input(i) => SourceFile::Input(*i),
                    Source::Derived(st) => SourceFile::Derived(
                        st.iter()
                            .map(|s| StepFile(s.coeff.clone(), s.left.to_vec(), s.rec, s.right.to_vec()))
                            .collect(),
                    ),
                },
            })
            .collect();
        BasisFile {
            source: self.source.clone(),
            order: self.order.clone(),
            bound: self.bound,
            homogeneous: self.homogeneous,
            complete_below: self.complete_below,
            truncated: self.truncated,
            inputs: self.inputs.iter().map(|p| p.to_string()).collect(),
            elements: self.elements().iter().map(|p| p.to_string()).collect(),
            records,
            rules: e.rules.iter().map(|r| (r.rec, r.alive)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("basis serializes")
    }

    pub fn from_file(f: &BasisFile) -> Result<GroebnerBasis, NcgbError> {
        let alphabet = f.order.alphabet()?;
        let inputs = f.inputs.iter().map(|s| FreePoly::parse(s, &alphabet)).collect::<Result<Vec<_>, _>>()?;
        let mut records = Vec::with_capacity(f.records.len());
        let mut track = true;
        for (idx, r) in f.records.iter().enumerate() {
            let poly = FreePoly::parse(&r.poly, &alphabet)?;
            let source = match &r.source {
                SourceFile::Input(i) if *i < inputs.len() => Source::Input(*i),
                SourceFile::Input(i) => return Err(NcgbError::Format(format!("input {i} out of range"))),
                SourceFile::Derived(st) => {
                    track &= !st.is_empty();
                    let mut steps = Vec::with_capacity(st.len());
                    for StepFile(c, a, rec, b) in st {
                        if *rec as usize >= idx {
                            return Err(NcgbError::Format(format!("record {idx} refers forward to {rec}")));
                        }
                        steps.push(Step { coeff: c.clone(), left: word_from(a)?, rec: *rec, right: word_from(b)? });
                    }
                    Source::Derived(steps)
                }
            };
            records.push(Record { terms: poly.iter_desc().map(|(w, c)| (*w, c.clone())).collect(), source });
        }
        let mut rules = Vec::with_capacity(f.rules.len());
        for &(rec, alive) in &f.rules {
            match records.get(rec as usize) {
                Some(r) if r.terms.first().is_some_and(|t| t.1.is_one()) => rules.push(Rule { rec, alive }),
                _ => return Err(NcgbError::Format(format!("rule refers to missing or non-monic record {rec}"))),
            }
        }
        let engine = Engine::from_parts(records, rules, f.bound as usize, track);
        Ok(GroebnerBasis {
            alphabet,
            order: f.order.clone(),
            bound: f.bound,
            source: f.source.clone(),
            homogeneous: f.homogeneous,
            complete_below: f.complete_below,
            truncated: f.truncated,
            inputs,
            engine,
        })
    }

    pub fn from_json(s: &str) -> Result<GroebnerBasis, NcgbError> {
        let f: BasisFile = serde_json::from_str(s).map_err(|e| NcgbError::Format(e.to_string()))?;
        Self::from_file(&f)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{complete, CompletionOptions, Verdict};
    use super::*;
    use crate::free_algebra::Alphabet;

    #[test]
    fn round_trip_keeps_certificates() {
        let al = Alphabet::uv(2);
        let p = |s: &str| FreePoly::parse(s, &al).unwrap();
        let gens = vec![p("u1.v1 - v1.u1"), p("u2.v1 - v1.u2"), p("u1.u2 - u2.u2")];
        let gb = complete(&gens, &MonomialOrder::deglex(&al), 5, &CompletionOptions::new()).unwrap();
        let back = GroebnerBasis::from_json(&gb.to_json()).unwrap();
        assert_eq!(back.elements(), gb.elements());
        let q = p("u1.u2").try_commutator(&p("v1")).unwrap();
        match back.membership(&q).unwrap() {
            Verdict::Member(c) => assert!(c.verify().unwrap()),
            v => panic!("{v:?}"),
        }
        assert!(GroebnerBasis::from_json("{").is_err());
    }
}
