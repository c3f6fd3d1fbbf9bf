//! Batch Buchberger completion over packed words.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::free_algebra::{Scalar, Word};

/// `coeff · left · record · right`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Step {
    pub coeff: Scalar,
    pub left: Word,
    pub rec: u32,
    pub right: Word,
}

/// Where a stored polynomial came from.
#[derive(Debug, Clone)]
pub(crate) enum Source {
    Input(usize),
    /// The polynomial equals `Σ steps` over earlier records.
    Derived(Vec<Step>),
}

/// A polynomial with its terms in decreasing word order.
pub(crate) type Terms = Vec<(Word, Scalar)>;

#[derive(Debug, Clone)]
pub(crate) struct Record {
    pub terms: Terms,
    pub source: Source,
}

/// A basis element: monic, `terms[0]` is the leading word.
#[derive(Debug, Clone)]
pub(crate) struct Rule {
    pub rec: u32,
    pub alive: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Limits {
    pub max_basis: Option<usize>,
    pub deadline: Option<Instant>,
}

struct Candidate {
    terms: BTreeMap<Word, Scalar>,
    steps: Vec<Step>,
}

enum Pending {
    /// Overlap of rule leads `lead_i = a·s`, `lead_j = s·b` with `|s| = k`.
    Pair { i: u32, j: u32, k: u8 },
    /// A record to be reduced and inserted (inputs and evicted rules).
    Record(u32),
}

pub(crate) struct Engine {
    pub records: Vec<Record>,
    pub rules: Vec<Rule>,
    pub bound: usize,
    pub track: bool,
    lead_index: FxHashMap<Word, u32>,
    lead_lengths: BTreeSet<usize>,
    prefixes: FxHashMap<Word, Vec<u32>>,
    suffixes: FxHashMap<Word, Vec<u32>>,
    queue: BTreeMap<usize, Vec<Pending>>,
}

pub(crate) fn add_into(map: &mut BTreeMap<Word, Scalar>, w: Word, c: Scalar) {
    use std::collections::btree_map::Entry;
    match map.entry(w) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            let s = e.get() + &c;
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

fn to_terms(map: BTreeMap<Word, Scalar>) -> Terms {
    map.into_iter().rev().collect()
}

impl Engine {
    pub fn new(bound: usize, track: bool) -> Self {
        Engine {
            records: Vec::new(),
            rules: Vec::new(),
            bound,
            track,
            lead_index: FxHashMap::default(),
            lead_lengths: BTreeSet::new(),
            prefixes: FxHashMap::default(),
            suffixes: FxHashMap::default(),
            queue: BTreeMap::new(),
        }
    }

    /// Rebuilds lookup tables for a finished basis (no pending work).
    pub fn from_parts(records: Vec<Record>, rules: Vec<Rule>, bound: usize, track: bool) -> Self {
        let mut e = Engine::new(bound, track);
        e.records = records;
        e.rules = rules;
        for id in 0..e.rules.len() as u32 {
            if e.rules[id as usize].alive {
                let lead = e.lead(id);
                e.lead_index.insert(lead, id);
                e.lead_lengths.insert(lead.len());
            }
        }
        e
    }

    pub fn lead(&self, rule: u32) -> Word {
        self.records[self.rules[rule as usize].rec as usize].terms[0].0
    }

    pub fn rule_terms(&self, rule: u32) -> &Terms {
        &self.records[self.rules[rule as usize].rec as usize].terms
    }

    pub fn alive_rules(&self) -> impl Iterator<Item = u32> + '_ {
        self.rules.iter().enumerate().filter(|(_, r)| r.alive).map(|(i, _)| i as u32)
    }

    pub fn add_input(&mut self, terms: Terms, index: usize) {
        let deg = terms.first().map_or(0, |t| t.0.len());
        let rec = self.records.len() as u32;
        self.records.push(Record { terms, source: Source::Input(index) });
        self.queue.entry(deg).or_default().push(Pending::Record(rec));
    }

    /// Rule whose leading word divides `w`, and its position.
    #[inline]
    pub fn find_divisor(&self, w: Word) -> Option<(u32, usize)> {
        let n = w.len();
        for &l in &self.lead_lengths {
            if l > n {
                break;
            }
            for i in 0..=n - l {
                if let Some(&r) = self.lead_index.get(&w.subword(i, l)) {
                    return Some((r, i));
                }
            }
        }
        None
    }

    /// Full reduction; the result equals `p − Σ steps`.
    pub fn reduce(&self, work: BTreeMap<Word, Scalar>, steps: &mut Vec<Step>) -> BTreeMap<Word, Scalar> {
        self.reduce_with(work, steps, false)
    }

    /// With `top_only`, stops at the first irreducible leading word.
    pub fn reduce_with(
        &self,
        mut work: BTreeMap<Word, Scalar>,
        steps: &mut Vec<Step>,
        top_only: bool,
    ) -> BTreeMap<Word, Scalar> {
        let mut out = BTreeMap::new();
        while let Some((w, c)) = work.pop_last() {
            match self.find_divisor(w) {
                Some((r, pos)) => {
                    let terms = self.rule_terms(r);
                    let ll = terms[0].0.len();
                    let a = w.prefix(pos);
                    let b = w.suffix(w.len() - pos - ll);
                    for (t, k) in &terms[1..] {
                        add_into(&mut work, a.concat_unchecked(*t).concat_unchecked(b), -(&c * k));
                    }
                    if self.track {
                        steps.push(Step { coeff: c, left: a, rec: self.rules[r as usize].rec, right: b });
                    }
                }
                None => {
                    out.insert(w, c);
                    if top_only {
                        out.append(&mut work);
                        break;
                    }
                }
            }
        }
        out
    }

    fn materialize(&self, p: &Pending) -> Option<Candidate> {
        match *p {
            Pending::Pair { i, j, k } => {
                if !self.rules[i as usize].alive || !self.rules[j as usize].alive {
                    return None;
                }
                let (ti, tj) = (self.rule_terms(i), self.rule_terms(j));
                let (li, lj) = (ti[0].0, tj[0].0);
                let a = li.prefix(li.len() - k as usize);
                let b = lj.suffix(lj.len() - k as usize);
                let mut terms = BTreeMap::new();
                for (w, c) in &ti[1..] {
                    add_into(&mut terms, w.concat_unchecked(b), c.clone());
                }
                for (w, c) in &tj[1..] {
                    add_into(&mut terms, a.concat_unchecked(*w), -c);
                }
                let steps = if self.track {
                    vec![
                        Step { coeff: Scalar::one(), left: Word::EMPTY, rec: self.rules[i as usize].rec, right: b },
                        Step {
                            coeff: Scalar::from_int(-1),
                            left: a,
                            rec: self.rules[j as usize].rec,
                            right: Word::EMPTY,
                        },
                    ]
                } else {
                    Vec::new()
                };
                Some(Candidate { terms, steps })
            }
            Pending::Record(rec) => {
                let terms = self.records[rec as usize].terms.iter().cloned().collect();
                let steps = if self.track {
                    vec![Step { coeff: Scalar::one(), left: Word::EMPTY, rec, right: Word::EMPTY }]
                } else {
                    Vec::new()
                };
                Some(Candidate { terms, steps })
            }
        }
    }

    /// Reduces `c` and returns it as a monic record source if nonzero.
    fn finish(&self, c: Candidate, extra: Vec<Step>) -> Option<(Terms, Vec<Step>)> {
        let mut red = extra;
        let nf = self.reduce_with(c.terms, &mut red, true);
        if nf.is_empty() {
            return None;
        }
        let lc = nf.last_key_value().unwrap().1.clone();
        let inv = lc.recip().expect("nonzero");
        let terms: Terms = to_terms(nf).into_iter().map(|(w, c)| (w, &c * &inv)).collect();
        let mut steps = Vec::new();
        if self.track {
            steps.reserve(c.steps.len() + red.len());
            for s in c.steps {
                steps.push(Step { coeff: &s.coeff * &inv, ..s });
            }
            let neg = -&inv;
            for s in red {
                steps.push(Step { coeff: &s.coeff * &neg, ..s });
            }
        }
        Some((terms, steps))
    }

    fn insert_rule(&mut self, terms: Terms, steps: Vec<Step>) {
        let lead = terms[0].0;
        let rec = self.records.len() as u32;
        self.records.push(Record { terms, source: Source::Derived(steps) });
        let id = self.rules.len() as u32;
        self.rules.push(Rule { rec, alive: true });

        // Evict rules whose lead is now reducible.
        let shorter = self.lead_lengths.last().is_some_and(|&m| m > lead.len());
        let evict: Vec<u32> = self
            .alive_rules()
            .filter(|_| shorter)
            .filter(|&r| r != id && self.lead(r).len() > lead.len() && self.lead(r).find(lead).is_some())
            .collect();
        for r in evict {
            self.kill(r);
            let rrec = self.rules[r as usize].rec;
            let deg = self.records[rrec as usize].terms[0].0.len();
            self.queue.entry(deg).or_default().push(Pending::Record(rrec));
        }

        self.lead_index.insert(lead, id);
        self.lead_lengths.insert(lead.len());
        for k in 1..lead.len() {
            self.prefixes.entry(lead.prefix(k)).or_default().push(id);
            self.suffixes.entry(lead.suffix(k)).or_default().push(id);
        }

        // Overlaps with every alive rule, including itself.
        let n = lead.len();
        let mut pairs: Vec<(u32, u32, u8)> = Vec::new();
        for k in 1..n {
            if let Some(js) = self.prefixes.get(&lead.suffix(k)) {
                for &j in js {
                    if self.rules[j as usize].alive && self.lead(j).len() > k {
                        pairs.push((id, j, k as u8));
                    }
                }
            }
            if let Some(is) = self.suffixes.get(&lead.prefix(k)) {
                for &i in is {
                    if i != id && self.rules[i as usize].alive && self.lead(i).len() > k {
                        pairs.push((i, id, k as u8));
                    }
                }
            }
        }
        for (i, j, k) in pairs {
            let len = self.lead(i).len() + self.lead(j).len() - k as usize;
            if len <= self.bound {
                self.queue.entry(len).or_default().push(Pending::Pair { i, j, k });
            }
        }
    }

    fn kill(&mut self, r: u32) {
        self.rules[r as usize].alive = false;
        let lead = self.lead(r);
        if self.lead_index.get(&lead) == Some(&r) {
            self.lead_index.remove(&lead);
        }
        if !self.alive_rules().any(|q| self.lead(q).len() == lead.len()) {
            self.lead_lengths.remove(&lead.len());
        }
    }

    /// Lowest degree with pending work.
    pub fn pending_degree(&self) -> Option<usize> {
        self.queue.first_key_value().map(|(&d, _)| d)
    }

    /// Processes pending work of degree at most `through`. Returns `true` if a
    /// limit stopped it first.
    pub fn run(&mut self, through: usize, limits: Limits) -> bool {
        while let Some((&deg, _)) = self.queue.first_key_value() {
            if deg > through {
                return false;
            }
            if limits.deadline.is_some_and(|d| Instant::now() >= d)
                || limits.max_basis.is_some_and(|m| self.rules.iter().filter(|r| r.alive).count() > m)
            {
                return true;
            }
            let batch = self.queue.remove(&deg).unwrap();
            let reduced: Vec<Option<(Terms, Vec<Step>)>> =
                batch.par_iter().map(|p| self.materialize(p).and_then(|c| self.finish(c, Vec::new()))).collect();
            for (terms, steps) in reduced.into_iter().flatten() {
                // Re-reduce against rules added earlier in this batch.
                let cand = Candidate { terms: terms.into_iter().collect(), steps };
                if let Some((t, s)) = self.finish(cand, Vec::new()) {
                    self.insert_rule(t, s);
                }
            }
        }
        false
    }
}
