use std::cmp::Ordering;
use std::fmt;

use super::{AlgebraError, Alphabet};

const BITS: u32 = 6;
const LETTER_MASK: u128 = (1 << BITS) - 1;

/// Longest representable word.
pub const MAX_WORD_LEN: usize = 21;

/// A monomial: a finite sequence of letters (alphabet positions), packed
/// six bits per letter with the first letter most significant.
///
/// Ordering is degree-lexicographic where letter 0 (the generator of highest
/// precedence in the alphabet) is the largest letter, so `u1v1 > v1u1` over
/// the alphabet `{u1, v1}`. The order is multiplicative.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Word {
    len: u8,
    code: u128,
}

impl Word {
    pub const EMPTY: Word = Word { len: 0, code: 0 };

    pub fn empty() -> Self {
        Self::EMPTY
    }

    pub fn letter(l: u8) -> Self {
        debug_assert!((l as u128) <= LETTER_MASK);
        Word { len: 1, code: l as u128 }
    }

    pub fn from_letters(letters: &[u8]) -> Result<Self, AlgebraError> {
        if letters.len() > MAX_WORD_LEN {
            return Err(AlgebraError::WordTooLong(letters.len()));
        }
        let mut code = 0u128;
        for &l in letters {
            code = (code << BITS) | l as u128;
        }
        Ok(Word { len: letters.len() as u8, code })
    }

    #[inline]
    pub fn len(self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn code(self) -> u128 {
        self.code
    }

    #[inline]
    pub fn letter_at(self, i: usize) -> u8 {
        debug_assert!(i < self.len());
        ((self.code >> (BITS as usize * (self.len() - 1 - i))) & LETTER_MASK) as u8
    }

    pub fn letters(self) -> impl Iterator<Item = u8> {
        (0..self.len()).map(move |i| self.letter_at(i))
    }

    pub fn to_vec(self) -> Vec<u8> {
        self.letters().collect()
    }

    /// Concatenation, or `None` if the result exceeds [`MAX_WORD_LEN`].
    #[inline]
    pub fn concat(self, other: Word) -> Option<Word> {
        if self.len() + other.len() > MAX_WORD_LEN {
            return None;
        }
        Some(self.concat_unchecked(other))
    }

    #[inline]
    pub(crate) fn concat_unchecked(self, other: Word) -> Word {
        let code = if other.len == 0 { self.code } else { (self.code << (BITS * other.len as u32)) | other.code };
        Word { len: self.len + other.len, code }
    }

    /// The factor of length `len` starting at `start`.
    #[inline]
    pub fn subword(self, start: usize, len: usize) -> Word {
        debug_assert!(start + len <= self.len());
        let shift = BITS as usize * (self.len() - start - len);
        let mask = if len == 0 { 0 } else { (1u128 << (BITS as usize * len)) - 1 };
        Word { len: len as u8, code: (self.code >> shift) & mask }
    }

    #[inline]
    pub fn prefix(self, len: usize) -> Word {
        self.subword(0, len)
    }

    #[inline]
    pub fn suffix(self, len: usize) -> Word {
        self.subword(self.len() - len, len)
    }

    /// Position of the first occurrence of `factor` as a contiguous subword.
    pub fn find(self, factor: Word) -> Option<usize> {
        if factor.len() > self.len() {
            return None;
        }
        (0..=self.len() - factor.len()).find(|&i| self.subword(i, factor.len()) == factor)
    }

    pub fn reversed(self) -> Word {
        let mut code = 0u128;
        for i in (0..self.len()).rev() {
            code = (code << BITS) | self.letter_at(i) as u128;
        }
        Word { len: self.len, code }
    }

    /// Rewrites every letter through `map` (letter -> letter).
    pub fn map_letters(self, map: &[u8]) -> Word {
        let mut code = 0u128;
        for l in self.letters() {
            code = (code << BITS) | map[l as usize] as u128;
        }
        Word { len: self.len, code }
    }

    /// Renders the word with generator names, e.g. `u1.v2`; `1` when empty.
    pub fn display(self, alphabet: &Alphabet) -> String {
        if self.is_empty() {
            return "1".to_string();
        }
        self.letters().map(|l| alphabet.generator(l).to_string()).collect::<Vec<_>>().join(".")
    }
}

impl Ord for Word {
    #[inline]
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| other.code.cmp(&self.code))
    }
}

impl PartialOrd for Word {
    #[inline]
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word{:?}", self.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(l: &[u8]) -> Word {
        Word::from_letters(l).unwrap()
    }

    #[test]
    fn deglex_with_first_letter_largest() {
        assert!(w(&[0, 1]) > w(&[1, 0]));
        assert!(w(&[5]) < w(&[0, 0]));
        assert!(Word::empty() < w(&[9]));
    }

    #[test]
    fn concat_and_factors() {
        let a = w(&[1, 2]);
        let b = w(&[3]);
        let ab = a.concat(b).unwrap();
        assert_eq!(ab.to_vec(), vec![1, 2, 3]);
        assert_eq!(ab.prefix(2), a);
        assert_eq!(ab.suffix(1), b);
        assert_eq!(ab.subword(1, 2).to_vec(), vec![2, 3]);
        assert_eq!(ab.find(w(&[2, 3])), Some(1));
        assert_eq!(ab.find(w(&[3, 2])), None);
        assert_eq!(ab.concat(Word::empty()), Some(ab));
        assert_eq!(ab.reversed().to_vec(), vec![3, 2, 1]);
    }

    #[test]
    fn length_limit() {
        let long = w(&[63; MAX_WORD_LEN]);
        assert_eq!(long.letter_at(MAX_WORD_LEN - 1), 63);
        assert!(long.concat(Word::letter(0)).is_none());
        assert!(Word::from_letters(&[0; MAX_WORD_LEN + 1]).is_err());
    }

    #[test]
    fn multiplicative() {
        let x = w(&[2, 0]);
        let y = w(&[1, 3]);
        assert!(x < y);
        let a = w(&[4]);
        let b = w(&[0, 5]);
        assert!(a.concat_unchecked(x).concat_unchecked(b) < a.concat_unchecked(y).concat_unchecked(b));
    }
}
