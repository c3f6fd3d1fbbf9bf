//! Ring identities used in the commutation proofs, verified by expansion in
//! the free algebra with formal inverses cancelled.

use std::sync::Arc;

use serde::Serialize;

use crate::free_algebra::{AlgebraError, Alphabet, FreePoly, GeneratorId, Word};
use crate::ncgb::{complete, CompletionOptions, MonomialOrder, NcgbError, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdentityError {
    #[error("unknown identity `{0}`")]
    UnknownTag(String),
    #[error("m = {0} is outside 3..=5")]
    BadM(u32),
    #[error("bound {bound} is below m + 2 = {need}")]
    BoundTooSmall { bound: u32, need: u32 },
    #[error("expression `{text}`: {msg}")]
    Expr { text: String, msg: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Ncgb(#[from] NcgbError),
}

/// A generator and its formal two-sided inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct InversePair {
    pub base: GeneratorId,
    pub inverse: GeneratorId,
}

impl InversePair {
    pub fn new(base: GeneratorId) -> Self {
        let base = base.base();
        InversePair { base, inverse: GeneratorId::inverse_of(base) }
    }

    /// The pairs whose two symbols both occur in `alphabet`.
    pub fn of_alphabet(alphabet: &Alphabet) -> Vec<InversePair> {
        alphabet.inverse_letter_pairs().into_iter().map(|(b, _)| InversePair::new(alphabet.generator(b))).collect()
    }
}

/// Letter partner table: `partner[l] = Some(m)` when `l·m → 1`.
fn partners(alphabet: &Alphabet) -> Vec<Option<u8>> {
    let mut t = vec![None; alphabet.len()];
    for (b, i) in alphabet.inverse_letter_pairs() {
        t[b as usize] = Some(i);
        t[i as usize] = Some(b);
    }
    t
}

/// Cancels adjacent `x·x⁻¹` and `x⁻¹·x` with a stack; since every rule
/// deletes a length-2 factor and overlaps `x·x⁻¹·x` resolve to `x` either
/// way, the result is the unique normal form.
pub fn cancel_word(w: Word, partner: &[Option<u8>]) -> Word {
    let mut stack: Vec<u8> = Vec::with_capacity(w.len());
    for l in w.letters() {
        match stack.last() {
            Some(&top) if partner[top as usize] == Some(l) => {
                stack.pop();
            }
            _ => stack.push(l),
        }
    }
    Word::from_letters(&stack).expect("shorter than input")
}

/// Normal form modulo `base·inverse = inverse·base = 1` for every inverse
/// pair present in the alphabet.
pub fn inverse_normal_form(p: &FreePoly) -> FreePoly {
    let partner = partners(p.alphabet());
    if partner.iter().all(Option::is_none) {
        return p.clone();
    }
    FreePoly::from_terms(p.alphabet(), p.iter().map(|(w, c)| (cancel_word(*w, &partner), c.clone())))
}

/// Checks that every critical pair of the cancellation rules resolves. The
/// only overlaps are `x·x⁻¹·x` and `x⁻¹·x·x⁻¹`.
pub fn cancellation_is_confluent(alphabet: &Alphabet) -> bool {
    let partner = partners(alphabet);
    (0..alphabet.len() as u8).all(|l| match partner[l as usize] {
        None => true,
        Some(m) => {
            // l·m·l: cancel the left pair → l, cancel the right pair → l.
            let w = Word::from_letters(&[l, m, l]).unwrap();
            let left = Word::from_letters(&[l]).unwrap();
            partner[m as usize] == Some(l) && cancel_word(w, &partner) == left
        }
    })
}

// ---------------------------------------------------------------------------
// A small expression language for the identity data:
//   expr   := ['-'] term (('+' | '-') term)*
//   term   := factor+
//   factor := generator | '(' expr ')' | '[' expr ',' expr ']'

#[derive(Debug, Clone)]
enum Expr {
    Gen(GeneratorId),
    Sum(Vec<(bool, Expr)>),
    Prod(Vec<Expr>),
    Comm(Box<Expr>, Box<Expr>),
}

struct ExprParser<'a> {
    text: &'a str,
    s: &'a [u8],
    pos: usize,
}

impl<'a> ExprParser<'a> {
    fn err(&self, msg: &str) -> IdentityError {
        IdentityError::Expr { text: self.text.to_string(), msg: format!("{msg} at byte {}", self.pos) }
    }

    fn ws(&mut self) {
        while self.s.get(self.pos).is_some_and(|c| c.is_ascii_whitespace() || *c == b'.') {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, IdentityError> {
        let mut parts = Vec::new();
        let mut neg = false;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            neg = true;
        }
        loop {
            parts.push((neg, self.term()?));
            match self.peek() {
                Some(b'+') => neg = false,
                Some(b'-') => neg = true,
                _ => break,
            }
            self.pos += 1;
        }
        Ok(Expr::Sum(parts))
    }

    fn term(&mut self) -> Result<Expr, IdentityError> {
        let mut fs = Vec::new();
        while let Some(c) = self.peek() {
            if !(c.is_ascii_lowercase() || c == b'(' || c == b'[') {
                break;
            }
            fs.push(self.factor()?);
        }
        if fs.is_empty() {
            return Err(self.err("expected a factor"));
        }
        Ok(Expr::Prod(fs))
    }

    fn factor(&mut self) -> Result<Expr, IdentityError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'[') => {
                self.pos += 1;
                let a = self.expr()?;
                self.expect(b',')?;
                let b = self.expr()?;
                self.expect(b']')?;
                Ok(Expr::Comm(Box::new(a), Box::new(b)))
            }
            _ => {
                let start = self.pos;
                self.pos += 1;
                while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
                if self.s[self.pos..].starts_with(b"^-1") {
                    self.pos += 3;
                }
                let tok = &self.text[start..self.pos];
                tok.parse().map(Expr::Gen).map_err(|_| self.err(&format!("bad generator `{tok}`")))
            }
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), IdentityError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }
}

fn parse_expr(text: &str) -> Result<Expr, IdentityError> {
    let mut p = ExprParser { text, s: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

fn collect_gens(e: &Expr, out: &mut Vec<GeneratorId>) {
    match e {
        Expr::Gen(g) => {
            out.push(g.base());
            if g.inverse {
                out.push(*g);
            }
        }
        Expr::Sum(v) => v.iter().for_each(|(_, x)| collect_gens(x, out)),
        Expr::Prod(v) => v.iter().for_each(|x| collect_gens(x, out)),
        Expr::Comm(a, b) => {
            collect_gens(a, out);
            collect_gens(b, out);
        }
    }
}

fn eval(e: &Expr, a: &Arc<Alphabet>) -> Result<FreePoly, AlgebraError> {
    Ok(match e {
        Expr::Gen(g) => FreePoly::generator(a, *g)?,
        Expr::Sum(v) => {
            let mut acc = FreePoly::zero(a);
            for (neg, x) in v {
                let t = eval(x, a)?;
                acc = if *neg { acc.try_sub(&t)? } else { acc.try_add(&t)? };
            }
            acc
        }
        Expr::Prod(v) => {
            let mut acc = FreePoly::one(a);
            for x in v {
                acc = acc.try_mul(&eval(x, a)?)?;
            }
            acc
        }
        Expr::Comm(x, y) => eval(x, a)?.try_commutator(&eval(y, a)?)?,
    })
}

/// Evaluates a bracket expression such as `g2 [g1, h2] - [h1, g2] g1`.
pub fn expr_poly(text: &str, alphabet: &Arc<Alphabet>) -> Result<FreePoly, IdentityError> {
    Ok(eval(&parse_expr(text)?, alphabet)?)
}

// ---------------------------------------------------------------------------

/// Identity tags.
pub const TAGS: [&str; 6] =
    ["deg1_super_1", "deg1_super_2", "cba_CBA", "strong_commute", "strong_commute_z", "half_rot_telescope"];

/// Index roles: a = 1, b = 2, c = 3.
const DATA: [(&str, &[&str], &[&str]); 6] = [
    ("deg1_super_1", &["[v1,g2] g1", "-g2 [g1,v2]"], &["[v2+v1, g2 g1]", "-g2 [v1,g1]", "-[v2,g2] g1"]),
    (
        "deg1_super_2",
        &["[v1,g3] g2 g1", "-g3 g2 [g1,v3]"],
        &["[v3+v2+v1, g3 g2 g1]", "-g3 [v2+v1, g2 g1]", "-[v3+v2, g3 g2] g1", "g3 [v2,g2] g1"],
    ),
    (
        "cba_CBA",
        &["[g3 g2 g1, h3 h2 h1]"],
        &[
            "g3 g2 [g1,h3] h2 h1",
            "-h3 h2 [h1,g3] g2 g1",
            "[g3 g2, h3 h2] h2^-1 g1 h2 h1",
            "h3 h2 g3 h2^-1 ([g2 g1, h2 h1] - [g2,h2] h2^-1 g1 h2 h1)",
        ],
    ),
    (
        "strong_commute",
        &["[g3 g2 g1, h3 h2 h1]"],
        &[
            "(g3 g2 [g1,h3] - [h1,g3] g2 g1) h2 h1",
            "-(h3 h2 [h1,g3] - [h1,g3] h2 h1) g2 g1",
            "[h1,g3] [g2 g1, h2 h1]",
            "[g3 g2, h3 h2] h2^-1 g1 h2 h1",
            "h3 h2 g3 h2^-1 ([g2 g1, h2 h1] - [g2,h2] h2^-1 g1 h2 h1)",
        ],
    ),
    (
        "strong_commute_z",
        &["[g3 g2 g1, h3 h2 h1]"],
        &[
            "(g3 g2 [g1,h3] - z1 g2 g1) h2 h1",
            "-(h3 h2 [h1,g3] - z1 h2 h1) g2 g1",
            "z1 [g2 g1, h2 h1]",
            "[g3 g2, h3 h2] h2^-1 g1 h2 h1",
            "h3 h2 g3 h2^-1 ([g2 g1, h2 h1] - [g2,h2] h2^-1 g1 h2 h1)",
        ],
    ),
    (
        "half_rot_telescope",
        &["[v4+v3+v2+v1, g4 g3 g2 g1]"],
        &[
            "[v4+v3+v2, g4 g3 g2] g1",
            "g4 g3 g2 [v4+v3+v2, g1]",
            "[v3+v2+v1, g4] g3 g2 g1",
            "g4 [v3+v2+v1, g3 g2 g1]",
            "-[v3+v2, g4] g3 g2 g1",
            "-g4 [v3+v2, g3 g2] g1",
            "-g4 g3 g2 [v3+v2, g1]",
        ],
    ),
];

/// `Σ left = Σ right` in the free algebra extended by the inverses it uses.
#[derive(Debug, Clone)]
pub struct NamedIdentity {
    pub tag: String,
    pub alphabet: Arc<Alphabet>,
    pub left_text: Vec<String>,
    pub right_text: Vec<String>,
    pub left: Vec<FreePoly>,
    pub right: Vec<FreePoly>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdentityVerdict {
    Zero,
    Residual(FreePoly),
}

impl IdentityVerdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, IdentityVerdict::Zero)
    }

    pub fn residual_terms(&self) -> usize {
        match self {
            IdentityVerdict::Zero => 0,
            IdentityVerdict::Residual(p) => p.num_terms(),
        }
    }
}

impl NamedIdentity {
    pub fn from_text(tag: &str, left: &[&str], right: &[&str]) -> Result<Self, IdentityError> {
        let exprs: Vec<Expr> = left.iter().chain(right).map(|t| parse_expr(t)).collect::<Result<_, _>>()?;
        let mut gens = Vec::new();
        exprs.iter().for_each(|e| collect_gens(e, &mut gens));
        let alphabet = Alphabet::new(gens)?;
        let polys: Vec<FreePoly> = exprs.iter().map(|e| eval(e, &alphabet)).collect::<Result<_, _>>()?;
        let (l, r) = polys.split_at(left.len());
        Ok(NamedIdentity {
            tag: tag.to_string(),
            alphabet,
            left_text: left.iter().map(|s| s.to_string()).collect(),
            right_text: right.iter().map(|s| s.to_string()).collect(),
            left: l.to_vec(),
            right: r.to_vec(),
        })
    }

    /// The atoms the identity is universally quantified over.
    pub fn atoms(&self) -> Vec<GeneratorId> {
        self.alphabet.generators().iter().filter(|g| !g.inverse).copied().collect()
    }

    /// Number of summands that a sign flip can target.
    pub fn summands(&self) -> usize {
        self.left.len() + self.right.len()
    }

    fn difference(&self, flip: Option<usize>) -> FreePoly {
        let mut acc = FreePoly::zero(&self.alphabet);
        for (i, p) in self.left.iter().chain(&self.right).enumerate() {
            let on_left = i < self.left.len();
            let plus = on_left != (flip == Some(i));
            acc = if plus { &acc + p } else { &acc - p };
        }
        acc
    }

    /// Expands `left − right` and cancels inverses.
    pub fn verify(&self) -> IdentityVerdict {
        Self::verdict(inverse_normal_form(&self.difference(None)))
    }

    /// Verification with the sign of summand `i` flipped.
    pub fn verify_perturbed(&self, i: usize) -> IdentityVerdict {
        Self::verdict(inverse_normal_form(&self.difference(Some(i))))
    }

    fn verdict(p: FreePoly) -> IdentityVerdict {
        if p.is_zero() {
            IdentityVerdict::Zero
        } else {
            IdentityVerdict::Residual(p)
        }
    }

    /// Applies a bijection of atoms (inverse symbols follow their bases).
    pub fn renamed(&self, f: impl Fn(GeneratorId) -> GeneratorId) -> Result<NamedIdentity, IdentityError> {
        let map = |g: GeneratorId| {
            let b = f(g.base());
            if g.inverse {
                GeneratorId::inverse_of(b)
            } else {
                b
            }
        };
        let target = Alphabet::new(self.alphabet.generators().iter().map(|&g| map(g)))?;
        if target.len() != self.alphabet.len() {
            return Err(IdentityError::Expr { text: self.tag.clone(), msg: "renaming is not injective".into() });
        }
        let conv = |v: &[FreePoly]| v.iter().map(|p| p.rename(&target, map)).collect::<Result<Vec<_>, _>>();
        Ok(NamedIdentity {
            tag: self.tag.clone(),
            alphabet: target.clone(),
            left_text: self.left_text.clone(),
            right_text: self.right_text.clone(),
            left: conv(&self.left)?,
            right: conv(&self.right)?,
        })
    }
}

/// Looks up an identity by tag.
pub fn identity(tag: &str) -> Result<NamedIdentity, IdentityError> {
    let (t, l, r) = DATA.iter().find(|d| d.0 == tag).ok_or_else(|| IdentityError::UnknownTag(tag.to_string()))?;
    NamedIdentity::from_text(t, l, r)
}

pub fn all_identities() -> Vec<NamedIdentity> {
    TAGS.iter().map(|t| identity(t).expect("built-in identity parses")).collect()
}

pub fn verify(tag: &str) -> Result<IdentityVerdict, IdentityError> {
    Ok(identity(tag)?.verify())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityRecord {
    pub tag: String,
    pub verdict: String,
    pub residual_term_count: usize,
}

/// One record per built-in identity, in tag order.
pub fn verify_all() -> Vec<IdentityRecord> {
    all_identities()
        .iter()
        .map(|id| {
            let v = id.verify();
            IdentityRecord {
                tag: id.tag.clone(),
                verdict: if v.is_zero() { "Zero".into() } else { "Residual".into() },
                residual_term_count: v.residual_terms(),
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------

/// Atoms `g1..gm`, `z1` (for z) and `z2` (for z′), with inverses of `g1`, `gm`.
pub fn l_for_super_alphabet(m: u32) -> Arc<Alphabet> {
    let mut gens: Vec<GeneratorId> = (1..=m).map(GeneratorId::g).collect();
    gens.extend([GeneratorId::aux('z', 1), GeneratorId::aux('z', 2)]);
    gens.extend([1, m].map(|i| GeneratorId::inverse_of(GeneratorId::g(i))));
    Alphabet::new(gens).expect("small alphabet")
}

/// Hypotheses (first: `z g1 − gm z′`, then `z gb g1 − gm gb z′` for
/// `1 < b < m`), inverse relations, and the conclusion
/// `z g_{m−1}⋯g1 − gm⋯g2 z′`.
pub fn l_for_super_system(m: u32, drop_first: bool) -> Result<(Vec<FreePoly>, FreePoly), IdentityError> {
    if !(3..=5).contains(&m) {
        return Err(IdentityError::BadM(m));
    }
    let a = l_for_super_alphabet(m);
    let chain = |from: u32, to: u32| (to..=from).rev().map(|i| format!("g{i}")).collect::<Vec<_>>().join(" ");
    let mut hyps = Vec::new();
    if !drop_first {
        hyps.push(expr_poly(&format!("z1 g1 - g{m} z2"), &a)?);
    }
    for b in 2..m {
        hyps.push(expr_poly(&format!("z1 g{b} g1 - g{m} g{b} z2"), &a)?);
    }
    let one = FreePoly::one(&a);
    for i in [1, m] {
        let g = FreePoly::generator(&a, GeneratorId::g(i))?;
        let gi = FreePoly::generator(&a, GeneratorId::inverse_of(GeneratorId::g(i)))?;
        hyps.push(&(&g * &gi) - &one);
        hyps.push(&(&gi * &g) - &one);
    }
    let goal = expr_poly(&format!("z1 {} - {} z2", chain(m - 1, 1), chain(m, 2)), &a)?;
    Ok((hyps, goal))
}

/// Membership of the conclusion of the lemma in the ideal of its hypotheses
/// plus inverse relations. The ideal is not homogeneous, so a failure to
/// reduce to zero is reported as `Inconclusive`.
pub fn check_l_for_super(m: u32, bound: u32) -> Result<Verdict, IdentityError> {
    check_l_for_super_with(m, bound, false)
}

pub fn check_l_for_super_with(m: u32, bound: u32, drop_first: bool) -> Result<Verdict, IdentityError> {
    if !(3..=5).contains(&m) {
        return Err(IdentityError::BadM(m));
    }
    if bound < m + 2 {
        return Err(IdentityError::BoundTooSmall { bound, need: m + 2 });
    }
    let (hyps, goal) = l_for_super_system(m, drop_first)?;
    let order = MonomialOrder::deglex(goal.alphabet());
    let gb = complete(&hyps, &order, bound, &CompletionOptions::new())?;
    Ok(match gb.membership(&goal)? {
        Verdict::NotMemberUpToBound(b) => Verdict::Inconclusive(b),
        v => v,
    })
}
