//! Dehn diagrams over free groups: a planar complex with labeled, oriented
//! edges whose bounded faces read relators. If every bounded face is a
//! relator, the outer boundary word is a consequence of the relators.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::free_algebra::GeneratorId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DehnError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("bad group word `{0}`")]
    Word(String),
    #[error("face {face}: walk is not closed at step {step}")]
    OpenWalk { face: String, step: usize },
    #[error("face {face}: unknown edge {edge}")]
    UnknownEdge { face: String, edge: usize },
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("figure {figure} needs N >= {min}, got {n}")]
    BadN { figure: u32, n: u32, min: u32 },
    #[error("unknown figure `{0}`")]
    UnknownFigure(String),
    #[error("cannot glue: {0}")]
    Glue(String),
}

/// A generator raised to ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: GeneratorId,
    pub exp: i8,
}

impl Letter {
    pub fn pos(gen: GeneratorId) -> Letter {
        Letter { gen: gen.base(), exp: 1 }
    }

    pub fn neg(gen: GeneratorId) -> Letter {
        Letter { gen: gen.base(), exp: -1 }
    }

    pub fn inverse(self) -> Letter {
        Letter { gen: self.gen, exp: -self.exp }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp < 0 {
            write!(f, "{}^-1", self.gen)
        } else {
            write!(f, "{}", self.gen)
        }
    }
}

/// An element of the free group, stored as a letter sequence (not
/// necessarily reduced).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupWord(Vec<Letter>);

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        GroupWord(letters)
    }

    /// The positive word `g_1 g_2 ⋯`.
    pub fn positive(gens: &[GeneratorId]) -> Self {
        GroupWord(gens.iter().map(|&g| Letter::pos(g)).collect())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        GroupWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn mul(&self, other: &GroupWord) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        GroupWord(v)
    }

    /// The relator `lhs · rhs⁻¹` of the relation `lhs = rhs`.
    pub fn relation(lhs: &GroupWord, rhs: &GroupWord) -> Self {
        lhs.mul(&rhs.inverse())
    }

    /// `a b a⁻¹ b⁻¹`.
    pub fn commutator(a: &GroupWord, b: &GroupWord) -> Self {
        Self::relation(&a.mul(b), &b.mul(a))
    }

    pub fn free_reduce(&self) -> Self {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        GroupWord(out)
    }

    /// Free reduction followed by cancelling inverse letters at the two ends.
    pub fn cyclic_reduce(&self) -> Self {
        let r = self.free_reduce().0;
        let (mut i, mut j) = (0, r.len());
        while j - i >= 2 && r[i] == r[j - 1].inverse() {
            i += 1;
            j -= 1;
        }
        GroupWord(r[i..j].to_vec())
    }

    pub fn is_trivial(&self) -> bool {
        self.free_reduce().is_empty()
    }

    /// Lexicographically least rotation of the cyclic reduction.
    pub fn canonical_cyclic(&self) -> Self {
        let r = self.cyclic_reduce().0;
        let n = r.len();
        (0..n.max(1))
            .map(|k| r[k.min(n)..].iter().chain(&r[..k.min(n)]).copied().collect::<Vec<_>>())
            .min()
            .map(GroupWord)
            .unwrap_or_default()
    }

    /// Key identifying the word up to rotation, free reduction and inversion.
    pub fn relator_key(&self) -> Self {
        self.canonical_cyclic().min(self.inverse().canonical_cyclic())
    }

    pub fn same_relator(&self, other: &GroupWord) -> bool {
        self.relator_key() == other.relator_key()
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for GroupWord {
    type Err = DehnError;
    /// Letters separated by whitespace or `.`; `1` is the identity.
    fn from_str(s: &str) -> Result<Self, DehnError> {
        let t = s.trim();
        if t == "1" {
            return Ok(GroupWord::identity());
        }
        let mut v = Vec::new();
        for tok in t.split(|c: char| c.is_whitespace() || c == '.').filter(|x| !x.is_empty()) {
            let g: GeneratorId = tok.parse().map_err(|_| DehnError::Word(s.to_string()))?;
            v.push(if g.inverse { Letter::neg(g) } else { Letter::pos(g) });
        }
        Ok(GroupWord(v))
    }
}

impl Serialize for GroupWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: VertexId,
    pub to: VertexId,
    pub label: GeneratorId,
}

/// An edge traversed along (`forward`) or against its orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub edge: EdgeId,
    pub forward: bool,
}

impl Step {
    pub fn fwd(e: EdgeId) -> Step {
        Step { edge: e, forward: true }
    }

    pub fn back(e: EdgeId) -> Step {
        Step { edge: e, forward: false }
    }

    pub fn flipped(self) -> Step {
        Step { edge: self.edge, forward: !self.forward }
    }
}

/// Reverses a walk.
pub fn reversed(walk: &[Step]) -> Vec<Step> {
    walk.iter().rev().map(|s| s.flipped()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub tag: String,
    pub walk: Vec<Step>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceRef {
    Bounded(usize),
    Outer,
}

impl fmt::Display for FaceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaceRef::Bounded(i) => write!(f, "#{i}"),
            FaceRef::Outer => write!(f, "outer"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DehnDiagram {
    pub name: String,
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
    pub faces: Vec<Face>,
    pub outer: Vec<Step>,
}

impl DehnDiagram {
    pub fn new(name: impl Into<String>) -> Self {
        DehnDiagram { name: name.into(), ..Default::default() }
    }

    pub fn vertex(&mut self, name: impl Into<String>) -> VertexId {
        self.vertices.push(name.into());
        VertexId(self.vertices.len() - 1)
    }

    fn fresh(&mut self) -> VertexId {
        let n = format!("v{}", self.vertices.len());
        self.vertex(n)
    }

    pub fn edge(&mut self, from: VertexId, to: VertexId, label: GeneratorId) -> EdgeId {
        self.edges.push(Edge { from, to, label: label.base() });
        EdgeId(self.edges.len() - 1)
    }

    /// Adds edges spelling `letters` from `from`, ending at `to` (or a fresh
    /// vertex); a `-1` letter becomes an edge pointing backwards.
    pub fn chain(&mut self, from: VertexId, to: Option<VertexId>, letters: &[Letter]) -> (Vec<Step>, VertexId) {
        let mut at = from;
        let mut walk = Vec::with_capacity(letters.len());
        for (i, l) in letters.iter().enumerate() {
            let next = match to {
                Some(t) if i + 1 == letters.len() => t,
                _ => self.fresh(),
            };
            walk.push(if l.exp > 0 {
                Step::fwd(self.edge(at, next, l.gen))
            } else {
                Step::back(self.edge(next, at, l.gen))
            });
            at = next;
        }
        (walk, at)
    }

    pub fn face(&mut self, tag: impl Into<String>, walk: Vec<Step>) {
        self.faces.push(Face { tag: tag.into(), walk });
    }

    /// A face bounded by two walks with common endpoints, read along `upper`
    /// and back along `lower`.
    pub fn face_between(&mut self, tag: impl Into<String>, upper: &[Step], lower: &[Step]) {
        let mut w = upper.to_vec();
        w.extend(reversed(lower));
        self.face(tag, w);
    }

    pub fn walk(&self, f: FaceRef) -> Option<&[Step]> {
        match f {
            FaceRef::Bounded(i) => self.faces.get(i).map(|x| x.walk.as_slice()),
            FaceRef::Outer => Some(&self.outer),
        }
    }

    fn step_ends(&self, s: Step) -> Option<(VertexId, VertexId)> {
        let e = self.edges.get(s.edge.0)?;
        Some(if s.forward { (e.from, e.to) } else { (e.to, e.from) })
    }

    pub fn face_count(&self) -> usize {
        self.faces.len() + 1
    }

    /// Sum of boundary lengths over all faces, the outer one included.
    pub fn boundary_total(&self) -> usize {
        self.faces.iter().map(|f| f.walk.len()).sum::<usize>() + self.outer.len()
    }

    pub fn faces_tagged(&self, tag: &str) -> usize {
        self.faces.iter().filter(|f| f.tag == tag).count()
    }
}

/// The boundary word of a face, inverting labels of edges walked against
/// their orientation.
pub fn face_word(d: &DehnDiagram, face: FaceRef) -> Result<GroupWord, DehnError> {
    let walk = d.walk(face).ok_or_else(|| DehnError::Glue(format!("no face {face}")))?;
    let mut letters = Vec::with_capacity(walk.len());
    let mut ends = Vec::with_capacity(walk.len());
    for s in walk {
        let (a, b) = d.step_ends(*s).ok_or(DehnError::UnknownEdge { face: face.to_string(), edge: s.edge.0 })?;
        ends.push((a, b));
        let g = d.edges[s.edge.0].label;
        letters.push(if s.forward { Letter::pos(g) } else { Letter::neg(g) });
    }
    for i in 0..ends.len() {
        if ends[i].1 != ends[(i + 1) % ends.len()].0 {
            return Err(DehnError::OpenWalk { face: face.to_string(), step: i });
        }
    }
    Ok(GroupWord(letters))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Issue {
    LowDegree { vertex: String, degree: usize },
    EdgeUse { edge: usize, forward: usize, backward: usize },
    Structure { face: String, msg: String },
    NotRelator { face: String, word: GroupWord },
    EmptyWalk { face: String },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::LowDegree { vertex, degree } => write!(f, "vertex {vertex} has degree {degree}"),
            Issue::EdgeUse { edge, forward, backward } => {
                write!(f, "edge {edge} used {forward} times forward and {backward} backward")
            }
            Issue::Structure { msg, .. } => f.write_str(msg),
            Issue::NotRelator { face, word } => write!(f, "face {face}: `{word}` is not a relator"),
            Issue::EmptyWalk { face } => write!(f, "face {face} has an empty boundary"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub diagram: String,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub boundary_total: usize,
    /// Relator index matched by each bounded face.
    pub face_relators: Vec<Option<usize>>,
    /// Outer boundary word in canonical cyclic form.
    pub outer_word: Option<GroupWord>,
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn double_count_holds(&self) -> bool {
        self.boundary_total == 2 * self.edges
    }

    /// `V − E + F`, which is 2 for a connected planar diagram.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.faces as i64
    }
}

/// Checks the structural invariants and that every bounded face reads a
/// relator up to rotation, free reduction and inversion.
pub fn validate(d: &DehnDiagram, relators: &[GroupWord]) -> ValidationReport {
    let mut issues = Vec::new();
    let mut degree = vec![0usize; d.vertices.len()];
    for e in &d.edges {
        for v in [e.from, e.to] {
            if let Some(x) = degree.get_mut(v.0) {
                *x += 1;
            }
        }
    }
    for (v, &k) in degree.iter().enumerate() {
        if k < 2 {
            issues.push(Issue::LowDegree { vertex: d.vertices[v].clone(), degree: k });
        }
    }
    for (i, e) in d.edges.iter().enumerate() {
        if e.from.0 >= d.vertices.len() || e.to.0 >= d.vertices.len() {
            issues.push(Issue::Structure { face: "-".into(), msg: format!("edge {i} has an unknown endpoint") });
        }
    }

    let mut uses = vec![(0usize, 0usize); d.edges.len()];
    let refs = (0..d.faces.len()).map(FaceRef::Bounded).chain([FaceRef::Outer]);
    let mut words = Vec::new();
    for f in refs {
        let walk = d.walk(f).unwrap_or(&[]);
        if walk.is_empty() {
            issues.push(Issue::EmptyWalk { face: f.to_string() });
        }
        for s in walk {
            if let Some(u) = uses.get_mut(s.edge.0) {
                if s.forward {
                    u.0 += 1
                } else {
                    u.1 += 1
                }
            }
        }
        match face_word(d, f) {
            Ok(w) => words.push((f, Some(w))),
            Err(e) => {
                issues.push(Issue::Structure { face: f.to_string(), msg: e.to_string() });
                words.push((f, None));
            }
        }
    }
    for (i, &(a, b)) in uses.iter().enumerate() {
        if (a, b) != (1, 1) {
            issues.push(Issue::EdgeUse { edge: i, forward: a, backward: b });
        }
    }

    let keys: HashMap<GroupWord, usize> =
        relators.iter().enumerate().rev().map(|(i, r)| (r.relator_key(), i)).collect();
    let mut face_relators = Vec::with_capacity(d.faces.len());
    let mut outer_word = None;
    for (f, w) in words {
        match (f, w) {
            (FaceRef::Outer, w) => outer_word = w.map(|w| w.canonical_cyclic()),
            (_, None) => face_relators.push(None),
            (_, Some(w)) => {
                let hit = keys.get(&w.relator_key()).copied();
                if hit.is_none() {
                    issues.push(Issue::NotRelator { face: f.to_string(), word: w });
                }
                face_relators.push(hit);
            }
        }
    }

    ValidationReport {
        diagram: d.name.clone(),
        vertices: d.vertices.len(),
        edges: d.edges.len(),
        faces: d.face_count(),
        boundary_total: d.boundary_total(),
        face_relators,
        outer_word,
        issues,
    }
}

/// Glues `b` onto `a` along a boundary segment: outer steps
/// `a_start..a_start+len` of `a` must retrace outer steps
/// `b_start..b_start+len` of `b` backwards with equal labels. The result's
/// outer walk is the rest of `a`'s outer walk followed by the rest of `b`'s.
pub fn glue(
    a: &DehnDiagram,
    a_start: usize,
    b: &DehnDiagram,
    b_start: usize,
    len: usize,
) -> Result<DehnDiagram, DehnError> {
    let (na, nb) = (a.outer.len(), b.outer.len());
    if len == 0 || len >= na || len >= nb {
        return Err(DehnError::Glue(format!("segment length {len} does not fit")));
    }
    let sa: Vec<Step> = (0..len).map(|i| a.outer[(a_start + i) % na]).collect();
    let sb: Vec<Step> = (0..len).map(|i| b.outer[(b_start + i) % nb]).collect();
    let mut vmap: HashMap<usize, VertexId> = HashMap::new();
    let mut emap: HashMap<usize, EdgeId> = HashMap::new();
    for (i, s) in sa.iter().enumerate() {
        let t = sb[len - 1 - i];
        let (ea, eb) = (&a.edges[s.edge.0], &b.edges[t.edge.0]);
        if ea.label != eb.label {
            return Err(DehnError::Glue(format!("labels {} and {} differ", ea.label, eb.label)));
        }
        if s.forward == t.forward {
            return Err(DehnError::Glue("segments are not traversed oppositely".into()));
        }
        let (a0, a1) = a.step_ends(*s).expect("edge");
        let (b0, b1) = b.step_ends(t).expect("edge");
        for (bv, av) in [(b1, a0), (b0, a1)] {
            if *vmap.entry(bv.0).or_insert(av) != av {
                return Err(DehnError::Glue("segment is not a simple path".into()));
            }
        }
        emap.insert(t.edge.0, s.edge);
    }
    let mut d = a.clone();
    d.name = format!("{}+{}", a.name, b.name);
    for (i, name) in b.vertices.iter().enumerate() {
        vmap.entry(i).or_insert_with(|| d.vertex(format!("{name}'")));
    }
    for (i, e) in b.edges.iter().enumerate() {
        emap.entry(i).or_insert_with(|| d.edge(vmap[&e.from.0], vmap[&e.to.0], e.label));
    }
    // A glued edge keeps its orientation from `a`; flip b's steps when the
    // two copies point opposite ways.
    let map_step = |s: &Step, d: &DehnDiagram| {
        let ne = emap[&s.edge.0];
        let be = &b.edges[s.edge.0];
        let same = vmap[&be.from.0] == d.edges[ne.0].from;
        Step { edge: ne, forward: s.forward == same }
    };
    for f in &b.faces {
        let walk = f.walk.iter().map(|s| map_step(s, &d)).collect();
        d.faces.push(Face { tag: f.tag.clone(), walk });
    }
    let mut outer: Vec<Step> = (len..na).map(|i| a.outer[(a_start + i) % na]).collect();
    outer.extend((len..nb).map(|i| map_step(&b.outer[(b_start + i) % nb], &d)));
    d.outer = outer;
    Ok(d)
}

// ---------------------------------------------------------------------------
// Text format

impl DehnDiagram {
    /// Line format: `name`, `vertex <name>`, `edge <from> <to> <label>`,
    /// `face <i±>... [# tag]`, `outer <i±>...`; edges are numbered from 0 in
    /// order of appearance.
    pub fn to_dsl(&self) -> String {
        let mut s = format!("name {}\n", self.name);
        for v in &self.vertices {
            s.push_str(&format!("vertex {v}\n"));
        }
        for e in &self.edges {
            s.push_str(&format!("edge {} {} {}\n", self.vertices[e.from.0], self.vertices[e.to.0], e.label));
        }
        let walk = |w: &[Step]| {
            w.iter().map(|s| format!("{}{}", s.edge.0, if s.forward { '+' } else { '-' })).collect::<Vec<_>>().join(" ")
        };
        for f in &self.faces {
            s.push_str(&format!("face {}", walk(&f.walk)));
            if !f.tag.is_empty() {
                s.push_str(&format!(" # {}", f.tag));
            }
            s.push('\n');
        }
        s.push_str(&format!("outer {}\n", walk(&self.outer)));
        s
    }

    pub fn from_dsl(text: &str) -> Result<DehnDiagram, DehnError> {
        let mut d = DehnDiagram::default();
        let mut names: HashMap<String, VertexId> = HashMap::new();
        let mut outer = None;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let err = |msg: String| DehnError::Parse { line, msg };
            let (body, tag) = match raw.split_once('#') {
                Some((b, t)) => (b, t.trim()),
                None => (raw, ""),
            };
            let mut toks = body.split_whitespace();
            let Some(kw) = toks.next() else { continue };
            let rest: Vec<&str> = toks.collect();
            match kw {
                "name" => d.name = rest.join(" "),
                "vertex" => {
                    let [v] = rest[..] else { return Err(err("expected `vertex <name>`".into())) };
                    if names.contains_key(v) {
                        return Err(err(format!("duplicate vertex {v}")));
                    }
                    let id = d.vertex(v);
                    names.insert(v.to_string(), id);
                }
                "edge" => {
                    let [a, b, l] = rest[..] else { return Err(err("expected `edge <from> <to> <label>`".into())) };
                    let va = *names.get(a).ok_or_else(|| err(format!("unknown vertex {a}")))?;
                    let vb = *names.get(b).ok_or_else(|| err(format!("unknown vertex {b}")))?;
                    let g: GeneratorId = l.parse().map_err(|_| err(format!("bad label {l}")))?;
                    if g.inverse {
                        return Err(err("edge labels are generators, not inverses".into()));
                    }
                    d.edge(va, vb, g);
                }
                "face" | "outer" => {
                    let mut walk = Vec::with_capacity(rest.len());
                    for t in &rest {
                        let (num, fwd) = match (t.strip_suffix('+'), t.strip_suffix('-')) {
                            (Some(x), _) => (x, true),
                            (_, Some(x)) => (x, false),
                            _ => return Err(err(format!("step `{t}` lacks a sign"))),
                        };
                        let i: usize = num.parse().map_err(|_| err(format!("bad edge `{t}`")))?;
                        if i >= d.edges.len() {
                            return Err(err(format!("edge {i} not declared")));
                        }
                        walk.push(Step { edge: EdgeId(i), forward: fwd });
                    }
                    if kw == "face" {
                        d.face(tag, walk);
                    } else if outer.replace(walk).is_some() {
                        return Err(err("second outer face".into()));
                    }
                }
                other => return Err(err(format!("unknown keyword `{other}`"))),
            }
        }
        d.outer = outer.ok_or(DehnError::Parse { line: text.lines().count(), msg: "missing outer face".into() })?;
        Ok(d)
    }
}

// ---------------------------------------------------------------------------
// Figures

fn g(i: u32) -> GeneratorId {
    GeneratorId::g(i)
}

fn h(i: u32) -> GeneratorId {
    GeneratorId::h(i)
}

fn gs(ix: impl IntoIterator<Item = u32>) -> GroupWord {
    GroupWord::positive(&ix.into_iter().map(g).collect::<Vec<_>>())
}

fn hs(ix: impl IntoIterator<Item = u32>) -> GroupWord {
    GroupWord::positive(&ix.into_iter().map(h).collect::<Vec<_>>())
}

fn down(hi: u32, lo: u32) -> impl Iterator<Item = u32> {
    (lo..=hi).rev()
}

/// `[g_b…, h_b…] = 1` for a block of indices listed in order.
fn block_commutes(ix: &[u32]) -> GroupWord {
    GroupWord::commutator(&gs(ix.iter().copied()), &hs(ix.iter().copied()))
}

/// `g_c⁻¹ h_a g_c h_a⁻¹`.
fn trick(a: u32, c: u32) -> GroupWord {
    GroupWord::new(vec![Letter::neg(g(c)), Letter::pos(h(a)), Letter::pos(g(c)), Letter::neg(h(a))])
}

/// The conclusion `g_N⋯g_1 h_N⋯h_1 = h_N⋯h_1 g_N⋯g_1` as a relator.
pub fn full_commutation(n: u32) -> GroupWord {
    block_commutes(&down(n, 1).collect::<Vec<_>>())
}

/// A builtin figure with the relators of its theorem and the expected outer
/// relation.
#[derive(Debug, Clone)]
pub struct Figure {
    pub id: String,
    pub diagram: DehnDiagram,
    pub relators: Vec<GroupWord>,
    pub conclusion: GroupWord,
}

impl Figure {
    pub fn validate(&self) -> ValidationReport {
        validate(&self.diagram, &self.relators)
    }

    /// Valid, and the outer word is the expected conclusion.
    pub fn certifies(&self) -> bool {
        let r = self.validate();
        r.is_valid() && r.outer_word.is_some_and(|w| w.same_relator(&self.conclusion))
    }
}

/// Relators for the three-index example with `a, b, c, A, B, C` read as
/// `g1, g2, g3, h1, h2, h3`.
pub fn figure_1_relators() -> Vec<GroupWord> {
    vec![
        GroupWord::commutator(&gs([1]), &hs([3])),
        block_commutes(&[2]),
        GroupWord::commutator(&gs([3]), &hs([1])),
        block_commutes(&[2, 1]),
        block_commutes(&[3, 2]),
    ]
}

/// The three-index diagram, drawn as in the original picture: two caps with
/// one rhombus each, two octagons and a central square.
pub fn figure_1() -> DehnDiagram {
    let mut d = DehnDiagram::new("figure_1");
    let [l, r, t, bo, m1, m2, ct, cb] = ["L", "R", "T", "B", "M1", "M2", "CT", "CB"].map(|n| d.vertex(n));
    let p = Letter::pos;
    let (mut top, _) = d.chain(l, Some(t), &[p(g(3)), p(g(2)), p(g(1))]);
    top.extend(d.chain(t, Some(r), &[p(h(3)), p(h(2)), p(h(1))]).0);
    let (mut bot, _) = d.chain(l, Some(bo), &[p(h(3)), p(h(2)), p(h(1))]);
    bot.extend(d.chain(bo, Some(r), &[p(g(3)), p(g(2)), p(g(1))]).0);
    let x2 = d.edges[top[1].edge.0].to;
    let y1 = d.edges[top[3].edge.0].to;
    let z2 = d.edges[bot[1].edge.0].to;
    let w1 = d.edges[bot[3].edge.0].to;
    let i1 = Step::fwd(d.edge(x2, ct, h(3)));
    let i2 = Step::fwd(d.edge(ct, y1, g(1)));
    let i3 = Step::fwd(d.edge(z2, cb, g(3)));
    let i4 = Step::fwd(d.edge(cb, w1, h(1)));
    let s1 = Step::fwd(d.edge(ct, m1, h(2)));
    let s2 = Step::fwd(d.edge(cb, m1, g(2)));
    let s3 = Step::fwd(d.edge(m2, ct, g(2)));
    let s4 = Step::fwd(d.edge(m2, cb, h(2)));
    d.face_between("rhombus", &top[2..4], &[i1, i2]);
    d.face_between("rhombus", &[i3, i4], &bot[2..4]);
    d.face_between("octagon", &[top[0], top[1], i1, s1], &[bot[0], bot[1], i3, s2]);
    d.face_between("square", &[s1.flipped(), s3.flipped()], &[s2.flipped(), s4.flipped()]);
    d.face_between("octagon", &[s3, i2, top[4], top[5]], &[s4, i4, bot[4], bot[5]]);
    let mut outer = bot.clone();
    outer.extend(reversed(&top));
    d.outer = outer;
    d
}

/// Builds a diagram by repeatedly rewriting a segment of a running path; each
/// rewrite adds the face between the old and new segment.
struct Rewriter {
    d: DehnDiagram,
    path: Vec<Step>,
    initial: Vec<Step>,
}

impl Rewriter {
    fn new(name: &str, word: &[Letter]) -> Self {
        let mut d = DehnDiagram::new(name);
        let s = d.vertex("S");
        let t = d.vertex("T");
        let (path, _) = d.chain(s, Some(t), word);
        Rewriter { d, initial: path.clone(), path }
    }

    fn letters(&self) -> Vec<Letter> {
        self.path
            .iter()
            .map(|s| {
                let gen = self.d.edges[s.edge.0].label;
                if s.forward {
                    Letter::pos(gen)
                } else {
                    Letter::neg(gen)
                }
            })
            .collect()
    }

    fn find(&self, pat: &[Letter]) -> Option<usize> {
        self.letters().windows(pat.len()).position(|w| w == pat)
    }

    fn rewrite(&mut self, pos: usize, len: usize, new: &[Letter], tag: &str) {
        let start = self.d.step_ends(self.path[pos]).expect("edge").0;
        let end = self.d.step_ends(self.path[pos + len - 1]).expect("edge").1;
        let (seg, _) = self.d.chain(start, Some(end), new);
        let old: Vec<Step> = self.path[pos..pos + len].to_vec();
        self.d.face_between(tag, &old, &seg);
        self.path.splice(pos..pos + len, seg);
    }

    fn replace(&mut self, pat: &[Letter], new: &[Letter], tag: &str) {
        let pos = self.find(pat).expect("pattern present on the running path");
        self.rewrite(pos, pat.len(), new, tag);
    }

    /// Swaps adjacent `g_a h_c` with `|a − c| ≥ 2` until none remain.
    fn tile_rhombi(&mut self, tag: &str) {
        loop {
            let ls = self.letters();
            let hit = ls.windows(2).position(|w| {
                w[0].exp > 0
                    && w[1].exp > 0
                    && w[0].gen.kind == g(1).kind
                    && w[1].gen.kind == h(1).kind
                    && w[0].gen.index.abs_diff(w[1].gen.index) >= 2
            });
            let Some(i) = hit else { break };
            self.rewrite(i, 2, &[ls[i + 1], ls[i]], tag);
        }
    }

    fn finish(mut self) -> DehnDiagram {
        let mut outer = self.path.clone();
        outer.extend(reversed(&self.initial));
        self.d.outer = outer;
        self.d
    }
}

/// Relators of the pairwise theorem: distant commutation, `g_a h_a = h_a g_a`
/// for `1 < a < N`, and consecutive pairs.
pub fn figure_2_relators(n: u32) -> Vec<GroupWord> {
    let mut out = Vec::new();
    for a in 1..=n {
        for c in 1..=n {
            if a.abs_diff(c) >= 2 {
                out.push(GroupWord::commutator(&gs([a]), &hs([c])));
            }
        }
    }
    out.extend((2..n).map(|a| block_commutes(&[a])));
    out.extend((1..n).map(|a| block_commutes(&[a + 1, a])));
    out
}

/// The pairwise diagram for `N ≥ 3`, caps fully tiled by rhombi.
pub fn figure_2(n: u32) -> Result<DehnDiagram, DehnError> {
    if n < 3 {
        return Err(DehnError::BadN { figure: 2, n, min: 3 });
    }
    let (p, q) = (|i| Letter::pos(g(i)), |i| Letter::pos(h(i)));
    let qi = |i| Letter::neg(h(i));
    let start: Vec<Letter> = down(n, 1).map(p).chain(down(n, 1).map(q)).collect();
    let mut rw = Rewriter::new(&format!("figure_2 N={n}"), &start);
    rw.tile_rhombi("top rhombus");
    rw.replace(&[p(n), p(n - 1), q(n)], &[q(n), q(n - 1), p(n), p(n - 1), qi(n - 1)], "octagon");
    for a in (2..n).rev() {
        rw.replace(&[p(a), qi(a)], &[qi(a), p(a)], "square");
        if a > 2 {
            rw.replace(&[qi(a), p(a), p(a - 1), q(a)], &[q(a - 1), p(a), p(a - 1), qi(a - 1)], "octagon");
        } else {
            rw.replace(&[qi(2), p(2), p(1), q(2), q(1)], &[q(1), p(2), p(1)], "octagon");
        }
    }
    rw.tile_rhombi("bottom rhombus");
    let end: Vec<Letter> = down(n, 1).map(q).chain(down(n, 1).map(p)).collect();
    debug_assert_eq!(rw.letters(), end);
    Ok(rw.finish())
}

/// Relators of the quasi-identity `PQ = pq, RQ = rq, RS = rs`, with
/// `P, Q, R, S` as `g1..g4` and `p, q, r, s` as `h1..h4`.
pub fn figure_3_relators() -> Vec<GroupWord> {
    [(1, 2), (3, 2), (3, 4)].iter().map(|&(x, y)| GroupWord::relation(&gs([x, y]), &hs([x, y]))).collect()
}

pub fn figure_3_conclusion() -> GroupWord {
    GroupWord::relation(&gs([1, 4]), &hs([1, 4]))
}

pub fn figure_3() -> DehnDiagram {
    let mut d = DehnDiagram::new("figure_3");
    let [l, t, b, m1, m2, r] = ["L", "T", "B", "M1", "M2", "R"].map(|n| d.vertex(n));
    let pp = d.edge(l, t, g(1));
    let qq = d.edge(t, m1, g(2));
    let rr = d.edge(m2, t, g(3));
    let ss = d.edge(t, r, g(4));
    let p = d.edge(l, b, h(1));
    let q = d.edge(b, m1, h(2));
    let r_ = d.edge(m2, b, h(3));
    let s = d.edge(b, r, h(4));
    use Step as S;
    d.face("PQ=pq", vec![S::fwd(pp), S::fwd(qq), S::back(q), S::back(p)]);
    d.face("RQ=rq", vec![S::back(qq), S::back(rr), S::fwd(r_), S::fwd(q)]);
    d.face("RS=rs", vec![S::fwd(rr), S::fwd(ss), S::back(s), S::back(r_)]);
    d.outer = vec![S::fwd(p), S::fwd(s), S::back(ss), S::back(pp)];
    d
}

/// Hypotheses of the three-index lemma with `a, b, c = 1, 2, 3`, together with
/// the twisted commutation `h_b⁻¹ g_b · X = X · h_b⁻¹ g_b`.
pub fn figure_4_relators() -> Vec<GroupWord> {
    let mut out: Vec<GroupWord> = [1, 2, 3].iter().map(|&i| block_commutes(&[i])).collect();
    out.extend([[2, 1], [3, 1], [3, 2]].iter().map(|ix| block_commutes(ix)));
    let hg = GroupWord::new(vec![Letter::neg(h(2)), Letter::pos(g(2))]);
    out.push(GroupWord::commutator(&hg, &trick(1, 3)));
    out
}

pub fn figure_4() -> DehnDiagram {
    let mut d = DehnDiagram::new("figure_4");
    let names = [
        "vb0", "va0", "v00", "v10", "v20", "vb1", "v21", "vb2", "va2", "v02", "v12", "v22", "vb3", "va3", "v13", "v23",
        "v04", "v40", "v41", "v42", "vd0", "vd1", "vd2", "vc1",
    ];
    let ids: HashMap<&str, VertexId> = names.iter().map(|&n| (n, d.vertex(n))).collect();
    let (a, b, c) = (1, 2, 3);
    let list: [(&str, &str, GeneratorId); 30] = [
        ("v00", "v10", g(c)),
        ("v20", "v10", h(a)),
        ("va0", "vb0", g(c)),
        ("va0", "v00", h(a)),
        ("v02", "v12", g(c)),
        ("v22", "v12", h(a)),
        ("va2", "vb2", g(c)),
        ("va2", "v02", h(a)),
        ("v23", "v13", h(a)),
        ("va3", "vb3", g(c)),
        ("vb1", "vb0", h(b)),
        ("v21", "v20", h(b)),
        ("vb1", "vb2", g(b)),
        ("v21", "v22", g(b)),
        ("vb3", "vb2", h(c)),
        ("va3", "va2", h(c)),
        ("v12", "v13", g(a)),
        ("v22", "v23", g(a)),
        ("vb3", "v04", g(a)),
        ("v04", "v23", h(c)),
        ("v23", "v42", h(b)),
        ("v42", "v41", h(a)),
        ("v40", "v41", g(a)),
        ("v10", "v40", g(b)),
        ("vd2", "vb3", g(b)),
        ("vd1", "vd2", g(c)),
        ("vd1", "vd0", h(c)),
        ("vd0", "va0", h(b)),
        ("vb2", "vc1", h(b)),
        ("vb0", "vc1", g(b)),
    ];
    for (x, y, l) in list {
        d.edge(ids[x], ids[y], l);
    }
    // Steps by 1-based edge number; negative means against the arrow.
    let w = |ix: &[i32]| -> Vec<Step> {
        ix.iter().map(|&i| Step { edge: EdgeId(i.unsigned_abs() as usize - 1), forward: i > 0 }).collect()
    };
    d.face("twelve-gon", w(&[-7, 8, 5, -6, -14, 12, 2, -1, -4, 3, -11, 13]));
    d.face("square", w(&[-15, -10, 16, 7]));
    d.face("octagon", w(&[19, 20, 9, -17, -5, -8, -16, 10]));
    d.face("square", w(&[17, -9, -18, 6]));
    d.face("square", w(&[30, -29, -13, 11]));
    d.face("octagon", w(&[14, 18, 21, 22, -23, -24, -2, -12]));
    d.face("octagon", w(&[26, 25, 15, 29, -30, -3, -28, -27]));
    d.outer = w(&[27, 28, 4, 1, 24, 23, -22, -21, -20, -19, -25, -26]);
    d
}

/// Hypotheses of the induction step for `N` indices, including the three
/// instances of the statement for fewer indices.
pub fn figure_5_relators(n: u32) -> Vec<GroupWord> {
    let mut out: Vec<GroupWord> = (1..=n).map(|a| block_commutes(&[a])).collect();
    for b in 1..=n {
        for a in 1..b {
            out.push(block_commutes(&[b, a]));
        }
    }
    for c in 1..=n {
        for b in 1..c {
            for a in 1..b {
                out.push(GroupWord::commutator(&gs([b]), &trick(a, c)));
                out.push(GroupWord::commutator(&hs([b]).inverse(), &trick(a, c)));
            }
        }
    }
    out.push(block_commutes(&down(n - 1, 2).collect::<Vec<_>>()));
    out.push(block_commutes(&down(n - 1, 1).collect::<Vec<_>>()));
    out.push(block_commutes(&down(n, 2).collect::<Vec<_>>()));
    out
}

/// The induction-step diagram for `N ≥ 4`: a central stack of `2(N − 2)`
/// rectangles between two columns, closed off by two quadrilaterals, two
/// octagons and two large faces.
pub fn figure_5(n: u32) -> Result<DehnDiagram, DehnError> {
    if n < 4 {
        return Err(DehnError::BadN { figure: 5, n, min: 4 });
    }
    let mut d = DehnDiagram::new(format!("figure_5 N={n}"));
    let top = (2 * n - 3) as usize;
    let mut lv = Vec::new();
    let mut av = Vec::new();
    let mut zv = Vec::new();
    let mut ov = Vec::new();
    let mut rv = Vec::new();
    for y in 0..=top {
        lv.push(d.vertex(format!("L{y}")));
        av.push(d.vertex(format!("A{y}")));
        zv.push(if y < top { Some(d.vertex(format!("Z{y}"))) } else { None });
        ov.push(d.vertex(format!("O{y}")));
        rv.push(d.vertex(format!("R{y}")));
    }
    // Row y, read from L_y to R_y: g_N⁻¹ h_1 g_N h_1⁻¹ (row `top` lacks the middle).
    let mut rows: Vec<[Step; 4]> = Vec::new();
    let mut top_row = [Step::fwd(EdgeId(0)); 2];
    for y in 0..=top {
        let el = d.edge(av[y], lv[y], g(n));
        let er = d.edge(rv[y], ov[y], h(1));
        match zv[y] {
            Some(z) => {
                let ea = d.edge(av[y], z, h(1));
                let eg = d.edge(z, ov[y], g(n));
                rows.push([Step::back(el), Step::fwd(ea), Step::fwd(eg), Step::back(er)]);
            }
            None => top_row = [Step::back(el), Step::back(er)],
        }
    }
    // Column labels between heights y and y+1 (h edges point down, g edges up).
    let col = |y: usize| -> (GeneratorId, bool) {
        let y = y as u32;
        if y + 2 < n {
            (h(y + 2), false)
        } else {
            (g(2 * n - 3 - y), true)
        }
    };
    let mut lcol = Vec::new();
    let mut rcol = Vec::new();
    for y in 0..top - 1 {
        let (l, up) = col(y);
        for (c, out) in [(&lv, &mut lcol), (&rv, &mut rcol)] {
            let e = if up { d.edge(c[y], c[y + 1], l) } else { d.edge(c[y + 1], c[y], l) };
            out.push(Step { edge: e, forward: up });
        }
    }
    let (t1, t0) = (top, top - 1);
    let l_top = Step::back(d.edge(lv[t1], lv[t0], h(n)));
    let a_top = Step::back(d.edge(av[t1], av[t0], h(n)));
    let o_top = Step::fwd(d.edge(ov[t0], ov[t1], g(1)));
    let r_top = Step::fwd(d.edge(rv[t0], rv[t1], g(1)));

    for y in 0..top - 1 {
        let mut w = vec![lcol[y]];
        w.extend(rows[y + 1]);
        w.push(rcol[y].flipped());
        w.extend(reversed(&rows[y]));
        d.face("rectangle", w);
    }
    let [rl, ra, rg, rr] = rows[t0];
    d.face("quadrilateral", vec![l_top, top_row[0], a_top.flipped(), rl.flipped()]);
    d.face("quadrilateral", vec![o_top, top_row[1], r_top.flipped(), rr.flipped()]);
    let (arc, _) = d.chain(lv[t1], Some(rv[t1]), &[Letter::pos(g(1)), Letter::pos(h(n))]);
    d.face_between("octagon", &arc, &[top_row[0], a_top.flipped(), ra, rg, o_top, top_row[1]]);

    let mid = (n - 2) as usize;
    let hs_down: Vec<Letter> = down(n - 1, 2).map(|i| Letter::pos(h(i))).collect();
    let gs_down: Vec<Letter> = down(n - 1, 2).map(|i| Letter::pos(g(i))).collect();
    let cv = d.vertex("C");
    let (c_h, _) = d.chain(lv[t0], Some(cv), &hs_down);
    let (c_g, _) = d.chain(lv[0], Some(cv), &gs_down);
    let mut left_down = reversed(&lcol[mid..]);
    left_down.extend(reversed(&lcol[..mid]));
    let mut w = c_g.clone();
    w.extend(reversed(&c_h));
    w.extend(left_down);
    d.face("octagon", w);

    let dv = d.vertex("D");
    let (d_g, _) = d.chain(dv, Some(lv[t1]), &down(n, 2).map(|i| Letter::pos(g(i))).collect::<Vec<_>>());
    let (d_h, _) = d.chain(dv, Some(av[0]), &down(n, 2).map(|i| Letter::pos(h(i))).collect::<Vec<_>>());
    let mut upper = d_g.clone();
    upper.push(l_top.flipped());
    upper.extend(&c_h);
    let mut lower = d_h.clone();
    lower.push(rows[0][0].flipped());
    lower.extend(&c_g);
    d.face_between("large", &upper, &lower);

    let xv = d.vertex("X");
    let (x_h, _) = d.chain(rv[t1], Some(xv), &down(n - 1, 1).map(|i| Letter::pos(h(i))).collect::<Vec<_>>());
    let (x_g, _) = d.chain(ov[0], Some(xv), &down(n - 1, 1).map(|i| Letter::pos(g(i))).collect::<Vec<_>>());
    let mut upper: Vec<Step> = rcol[mid..].to_vec();
    upper.push(r_top);
    upper.extend(&x_h);
    let mut lower = reversed(&rcol[..mid]);
    lower.push(rows[0][3].flipped());
    lower.extend(&x_g);
    d.face_between("large", &upper, &lower);

    let mut outer = d_h;
    outer.extend([rows[0][1], rows[0][2]]);
    outer.extend(&x_g);
    let mut up = d_g;
    up.extend(&arc);
    up.extend(&x_h);
    outer.extend(reversed(&up));
    d.outer = outer;
    Ok(d)
}

/// Builds a figure by id: `1`, `3`, `4`, or `2:N`, `5:N`.
pub fn figure(id: &str) -> Result<Figure, DehnError> {
    let bad = || DehnError::UnknownFigure(id.to_string());
    let (num, n) = match id.split_once(':') {
        Some((a, b)) => (a, Some(b.trim_start_matches("N=").parse::<u32>().map_err(|_| bad())?)),
        None => (id, None),
    };
    let fig = match (num, n) {
        ("1", None) => Figure {
            id: "1".into(),
            diagram: figure_1(),
            relators: figure_1_relators(),
            conclusion: full_commutation(3),
        },
        ("2", Some(n)) => Figure {
            id: format!("2:{n}"),
            diagram: figure_2(n)?,
            relators: figure_2_relators(n),
            conclusion: full_commutation(n),
        },
        ("3", None) => Figure {
            id: "3".into(),
            diagram: figure_3(),
            relators: figure_3_relators(),
            conclusion: figure_3_conclusion(),
        },
        ("4", None) => Figure {
            id: "4".into(),
            diagram: figure_4(),
            relators: figure_4_relators(),
            conclusion: full_commutation(3),
        },
        ("5", Some(n)) => Figure {
            id: format!("5:{n}"),
            diagram: figure_5(n)?,
            relators: figure_5_relators(n),
            conclusion: full_commutation(n),
        },
        _ => return Err(bad()),
    };
    Ok(fig)
}

/// Ids of the builtin catalog.
pub const BUILTIN_IDS: [&str; 8] = ["1", "2:4", "2:5", "2:6", "3", "4", "5:4", "5:5"];

pub fn builtin_figures() -> Vec<Figure> {
    BUILTIN_IDS.iter().map(|id| figure(id).expect("builtin figure")).collect()
}

/// Deliberately broken variants of the builtin figures, each of which
/// `validate` must reject.
pub fn corrupted_fixtures() -> Vec<(String, Figure)> {
    let mut out = Vec::new();
    let mut f = figure("1").expect("figure");
    f.diagram.edges[0].label = GeneratorId::g(2);
    out.push(("figure 1, edge 0 relabeled".to_string(), f));
    let mut f = figure("2:4").expect("figure");
    let s = &mut f.diagram.faces[0].walk[0];
    *s = s.flipped();
    out.push(("figure 2 N=4, first face step reversed".to_string(), f));
    let mut f = figure("5:4").expect("figure");
    f.diagram.faces.pop();
    out.push(("figure 5 N=4, a face removed".to_string(), f));
    let mut f = figure("4").expect("figure");
    f.relators.pop();
    out.push(("figure 4 without its twisted relator".to_string(), f));
    out
}
