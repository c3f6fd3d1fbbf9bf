//! Membership by exhaustive linear algebra, for cross-checking the engine on
//! small systems.

use std::collections::BTreeMap;

use rustc_hash::FxHashMap;

use crate::free_algebra::{FreePoly, Scalar, Word};

use super::engine::add_into;
use super::NcgbError;

fn words_up_to(letters: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::EMPTY];
    let mut layer = vec![Word::EMPTY];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * letters);
        for w in &layer {
            for l in 0..letters {
                next.push(w.concat_unchecked(Word::letter(l as u8)));
            }
        }
        out.extend_from_slice(&next);
        layer = next;
    }
    out
}

/// Row-echelon span keyed by leading word.
struct Echelon {
    rows: FxHashMap<Word, BTreeMap<Word, Scalar>>,
}

impl Echelon {
    fn reduce(&self, mut v: BTreeMap<Word, Scalar>) -> BTreeMap<Word, Scalar> {
        let mut out = BTreeMap::new();
        while let Some((w, c)) = v.pop_last() {
            match self.rows.get(&w) {
                Some(row) => {
                    for (t, k) in row.iter().rev().skip(1) {
                        add_into(&mut v, *t, -(&c * k));
                    }
                }
                None => {
                    out.insert(w, c);
                }
            }
        }
        out
    }

    fn insert(&mut self, v: BTreeMap<Word, Scalar>) {
        let r = self.reduce(v);
        if let Some((&lead, lc)) = r.last_key_value() {
            let inv = lc.recip().expect("nonzero");
            self.rows.insert(lead, r.into_iter().map(|(w, c)| (w, &c * &inv)).collect());
        }
    }
}

/// Decides whether `q` lies in the span of all `a·g·b` of degree at most
/// `bound`. For homogeneous generators this is ideal membership in degrees up
/// to `bound`.
pub fn oracle_membership(generators: &[FreePoly], q: &FreePoly, bound: u32) -> Result<bool, NcgbError> {
    let Some(first) = generators.first() else {
        return Ok(q.is_zero());
    };
    let alphabet = first.alphabet().clone();
    let q = q.to_alphabet(&alphabet)?;
    let bound = bound as usize;
    if let Some(d) = q.degree().filter(|&d| d > bound) {
        return Err(NcgbError::DegreeAboveBound { degree: d, bound: bound as u32 });
    }
    let words = words_up_to(alphabet.len(), bound);
    let mut ech = Echelon { rows: FxHashMap::default() };
    for g in generators {
        let g = g.to_alphabet(&alphabet)?;
        let dg = g.degree().unwrap_or(0);
        if dg > bound {
            continue;
        }
        let room = bound - dg;
        for a in words.iter().filter(|w| w.len() <= room) {
            for b in words.iter().filter(|w| w.len() + a.len() <= room) {
                let v = g.iter().map(|(w, c)| (a.concat_unchecked(*w).concat_unchecked(*b), c.clone())).collect();
                ech.insert(v);
            }
        }
    }
    Ok(ech.reduce(q.iter().map(|(w, c)| (*w, c.clone())).collect()).is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_algebra::Alphabet;

    #[test]
    fn commutation_span() {
        let al = Alphabet::uv(1);
        let p = |s: &str| FreePoly::parse(s, &al).unwrap();
        let gens = vec![p("u1.v1 - v1.u1")];
        assert!(oracle_membership(&gens, &p("u1.u1.v1 - v1.u1.u1"), 3).unwrap());
        assert!(!oracle_membership(&gens, &p("u1.v1"), 3).unwrap());
        assert!(oracle_membership(&gens, &p("0"), 3).unwrap());
    }

    #[test]
    fn word_count() {
        assert_eq!(words_up_to(2, 3).len(), 15);
    }
}
