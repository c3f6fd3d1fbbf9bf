//! Parser for the canonical text form, e.g. `u1.v1 - 1/2*v1.u1 + 3`.

use std::sync::Arc;

use super::{AlgebraError, Alphabet, FreePoly, GeneratorId, Scalar, Word};

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, what: &str) -> AlgebraError {
        AlgebraError::Parse(format!("{what} at byte {} in `{}`", self.pos, String::from_utf8_lossy(self.s)))
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.s[start..self.pos]).unwrap())
    }

    fn rational(&mut self) -> Result<Option<Scalar>, AlgebraError> {
        let Some(num) = self.digits() else { return Ok(None) };
        let save = self.pos;
        self.skip_ws();
        if self.eat(b'/') {
            self.skip_ws();
            let den = self.digits().ok_or_else(|| self.err("expected denominator"))?;
            let q: Scalar = format!("{num}/{den}").parse().map_err(|_| self.err("zero denominator"))?;
            return Ok(Some(q));
        }
        self.pos = save;
        Ok(Some(num.parse().expect("digits")))
    }

    fn generator(&mut self) -> Result<GeneratorId, AlgebraError> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_lowercase() => self.pos += 1,
            _ => return Err(self.err("expected generator")),
        }
        self.digits().ok_or_else(|| self.err("expected generator index"))?;
        if self.s[self.pos..].starts_with(b"^-1") {
            self.pos += 3;
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse()
    }

    /// `gen(.gen)*`
    fn word(&mut self) -> Result<Vec<GeneratorId>, AlgebraError> {
        let mut gens = vec![self.generator()?];
        loop {
            let save = self.pos;
            self.skip_ws();
            if self.eat(b'.') {
                self.skip_ws();
                gens.push(self.generator()?);
            } else {
                self.pos = save;
                return Ok(gens);
            }
        }
    }

    /// One signed term: `(coef [* word|1]) | word`.
    fn term(&mut self) -> Result<(Scalar, Vec<GeneratorId>), AlgebraError> {
        self.skip_ws();
        if let Some(c) = self.rational()? {
            let save = self.pos;
            self.skip_ws();
            if self.eat(b'*') {
                self.skip_ws();
                if self.peek() == Some(b'1') {
                    self.pos += 1;
                    if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        return Err(self.err("expected word"));
                    }
                    return Ok((c, Vec::new()));
                }
                return Ok((c, self.word()?));
            }
            self.pos = save;
            return Ok((c, Vec::new()));
        }
        Ok((Scalar::one(), self.word()?))
    }
}

fn parse_terms(text: &str) -> Result<Vec<(Scalar, Vec<GeneratorId>)>, AlgebraError> {
    let mut cur = Cursor { s: text.as_bytes(), pos: 0 };
    let mut out = Vec::new();
    cur.skip_ws();
    if cur.peek().is_none() {
        return Err(cur.err("empty polynomial"));
    }
    let mut first = true;
    loop {
        cur.skip_ws();
        let mut sign = Scalar::one();
        if cur.eat(b'-') {
            sign = Scalar::from_int(-1);
        } else if cur.eat(b'+') {
        } else if !first {
            return Err(cur.err("expected `+` or `-`"));
        }
        let (c, gens) = cur.term()?;
        out.push((&sign * &c, gens));
        first = false;
        cur.skip_ws();
        if cur.peek().is_none() {
            return Ok(out);
        }
    }
}

impl FreePoly {
    /// Parses the canonical text form over a given alphabet.
    pub fn parse(text: &str, alphabet: &Arc<Alphabet>) -> Result<FreePoly, AlgebraError> {
        let mut p = FreePoly::zero(alphabet);
        for (c, gens) in parse_terms(text)? {
            let letters = gens
                .iter()
                .map(|g| alphabet.letter_of(*g).ok_or_else(|| AlgebraError::UnknownGenerator(g.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            p.add_term(Word::from_letters(&letters)?, &c);
        }
        Ok(p)
    }

    /// Parses text, building the canonical alphabet of the generators it uses.
    pub fn parse_infer(text: &str) -> Result<FreePoly, AlgebraError> {
        let terms = parse_terms(text)?;
        let alphabet = Alphabet::new(terms.iter().flat_map(|(_, g)| g.iter().copied()))?;
        Self::parse(text, &alphabet)
    }
}

impl std::str::FromStr for FreePoly {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_infer(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_variants() {
        let a = Alphabet::uv(2);
        let p = FreePoly::parse(" 2 * u1.v2 -1/3*v1 + 1 - 1 * 1 + u2", &a).unwrap();
        assert_eq!(p.to_string(), "2*u1.v2 + u2 - 1/3*v1");
        let q = FreePoly::parse("-u1 . u2", &a).unwrap();
        assert_eq!(q.to_string(), "-u1.u2");
        assert!(FreePoly::parse("0", &a).unwrap().is_zero());
    }

    #[test]
    fn errors() {
        let a = Alphabet::uv(1);
        assert!(FreePoly::parse("", &a).is_err());
        assert!(FreePoly::parse("u1 u1", &a).is_err());
        assert!(FreePoly::parse("u3", &a).is_err());
        assert!(FreePoly::parse("1/0*u1", &a).is_err());
        assert!(FreePoly::parse("u1.", &a).is_err());
    }

    #[test]
    fn inverse_symbols_and_inference() {
        let p: FreePoly = "g1.g1^-1 - 1 + z2".parse().unwrap();
        assert_eq!(p.alphabet().to_string(), "{g1,z2,g1^-1}");
        assert_eq!(p.to_string(), "g1.g1^-1 + z2 - 1");
    }

    #[test]
    fn round_trip() {
        let a = Alphabet::gh(3);
        let p = FreePoly::parse("g3.h1.g2 - 7/5*h2.h2 + 11", &a).unwrap();
        assert_eq!(FreePoly::parse(&p.to_string(), &a).unwrap(), p);
    }
}
