use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::AlgebraError;

/// Family tag of a generator. `Aux` carries its printed letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    U,
    V,
    G,
    H,
    Aux(char),
}

impl Kind {
    fn rank(self) -> (u8, char) {
        match self {
            Kind::U => (0, ' '),
            Kind::V => (1, ' '),
            Kind::G => (2, ' '),
            Kind::H => (3, ' '),
            Kind::Aux(c) => (4, c),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Kind::U => 'u',
            Kind::V => 'v',
            Kind::G => 'g',
            Kind::H => 'h',
            Kind::Aux(c) => c,
        }
    }

    pub fn from_letter(c: char) -> Option<Kind> {
        match c {
            'u' => Some(Kind::U),
            'v' => Some(Kind::V),
            'g' => Some(Kind::G),
            'h' => Some(Kind::H),
            c if c.is_ascii_lowercase() => Some(Kind::Aux(c)),
            _ => None,
        }
    }
}

/// A noncommuting generator such as `u3`, `h1`, `z2`, or the formal
/// inverse `g1^-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorId {
    pub kind: Kind,
    pub index: u32,
    pub inverse: bool,
}

impl GeneratorId {
    pub const fn new(kind: Kind, index: u32) -> Self {
        GeneratorId { kind, index, inverse: false }
    }

    pub const fn u(i: u32) -> Self {
        Self::new(Kind::U, i)
    }
    pub const fn v(i: u32) -> Self {
        Self::new(Kind::V, i)
    }
    pub const fn g(i: u32) -> Self {
        Self::new(Kind::G, i)
    }
    pub const fn h(i: u32) -> Self {
        Self::new(Kind::H, i)
    }
    pub const fn aux(c: char, i: u32) -> Self {
        Self::new(Kind::Aux(c), i)
    }

    /// The formal inverse symbol of `self`.
    pub const fn inverse_of(base: GeneratorId) -> Self {
        GeneratorId { kind: base.kind, index: base.index, inverse: !base.inverse }
    }

    /// Base generator of an inverse symbol (identity on ordinary generators).
    pub const fn base(self) -> Self {
        GeneratorId { kind: self.kind, index: self.index, inverse: false }
    }

    /// Canonical precedence key: u's, v's, g's, h's, then aux symbols,
    /// with inverse symbols last.
    fn precedence_key(&self) -> (bool, (u8, char), u32) {
        (self.inverse, self.kind.rank(), self.index)
    }
}

impl PartialOrd for GeneratorId {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders generators by precedence (`u1` first).
impl Ord for GeneratorId {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.precedence_key().cmp(&other.precedence_key())
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.letter(), self.index)?;
        if self.inverse {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

impl FromStr for GeneratorId {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AlgebraError::Parse(format!("invalid generator `{s}`"));
        let t = s.trim();
        let (body, inverse) = match t.strip_suffix("^-1") {
            Some(b) => (b, true),
            None => (t, false),
        };
        let mut chars = body.chars();
        let kind = chars.next().and_then(Kind::from_letter).ok_or_else(bad)?;
        let digits = chars.as_str();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let index = digits.parse().map_err(|_| bad())?;
        Ok(GeneratorId { kind, index, inverse })
    }
}

impl serde::Serialize for GeneratorId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for GeneratorId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Maximum number of generators in one alphabet (letters are packed in 6 bits).
pub const MAX_GENERATORS: usize = 64;

/// An ordered, duplicate-free set of generators. Position in the alphabet is
/// the letter code used inside [`Word`](super::Word); position 0 is the
/// generator of highest precedence.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    gens: Vec<GeneratorId>,
    index: HashMap<GeneratorId, u8>,
}

impl Alphabet {
    /// Builds an alphabet in canonical precedence order.
    pub fn new(gens: impl IntoIterator<Item = GeneratorId>) -> Result<Arc<Self>, AlgebraError> {
        let mut v: Vec<GeneratorId> = gens.into_iter().collect();
        v.sort();
        v.dedup();
        Self::with_order(v)
    }

    /// Builds an alphabet whose precedence is exactly the given order.
    pub fn with_order(gens: Vec<GeneratorId>) -> Result<Arc<Self>, AlgebraError> {
        if gens.len() > MAX_GENERATORS {
            return Err(AlgebraError::AlphabetTooLarge(gens.len()));
        }
        let mut index = HashMap::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            if index.insert(*g, i as u8).is_some() {
                return Err(AlgebraError::Parse(format!("duplicate generator {g}")));
            }
        }
        Ok(Arc::new(Alphabet { gens, index }))
    }

    /// `u1..un, v1..vn`.
    pub fn uv(n: u32) -> Arc<Self> {
        Self::new((1..=n).map(GeneratorId::u).chain((1..=n).map(GeneratorId::v))).expect("alphabet size")
    }

    /// `u1..un`.
    pub fn u(n: u32) -> Arc<Self> {
        Self::new((1..=n).map(GeneratorId::u)).expect("alphabet size")
    }

    /// `g1..gn, h1..hn`.
    pub fn gh(n: u32) -> Arc<Self> {
        Self::new((1..=n).map(GeneratorId::g).chain((1..=n).map(GeneratorId::h))).expect("alphabet size")
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[GeneratorId] {
        &self.gens
    }

    pub fn letter_of(&self, g: GeneratorId) -> Option<u8> {
        self.index.get(&g).copied()
    }

    pub fn generator(&self, letter: u8) -> GeneratorId {
        self.gens[letter as usize]
    }

    pub fn contains(&self, g: GeneratorId) -> bool {
        self.index.contains_key(&g)
    }

    /// Pairs `(base, inverse)` of letters for which both symbols are present.
    pub fn inverse_letter_pairs(&self) -> Vec<(u8, u8)> {
        self.gens
            .iter()
            .enumerate()
            .filter(|(_, g)| g.inverse)
            .filter_map(|(i, g)| self.letter_of(g.base()).map(|b| (b, i as u8)))
            .collect()
    }

    /// A new alphabet with the extra generators added (canonical order).
    pub fn extended(&self, extra: impl IntoIterator<Item = GeneratorId>) -> Result<Arc<Self>, AlgebraError> {
        Self::new(self.gens.iter().copied().chain(extra))
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.gens.iter().map(|g| g.to_string()).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
