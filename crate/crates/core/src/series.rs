//! Truncated polynomials in two central variables `x`, `y` with free-algebra
//! coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::free_algebra::{same_alphabet, AlgebraError, Alphabet, FreePoly, GeneratorId, Scalar, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("truncation bounds differ: {0} vs {1}")]
    BoundMismatch(u32, u32),
    #[error("constant term is not 1, series is not invertible in the truncated ring")]
    NotInvertible,
    #[error("bidegree {degree} has total degree above the bound {bound}")]
    DegreeAboveBound { degree: BiDegree, bound: u32 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("series parse error: {0}")]
    Parse(String),
}

/// Exponents of `x` and `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BiDegree {
    pub x: u32,
    pub y: u32,
}

impl BiDegree {
    pub const ZERO: BiDegree = BiDegree { x: 0, y: 0 };

    pub const fn new(x: u32, y: u32) -> Self {
        BiDegree { x, y }
    }

    pub fn total(self) -> u32 {
        self.x + self.y
    }
}

impl std::ops::Add for BiDegree {
    type Output = BiDegree;
    fn add(self, o: BiDegree) -> BiDegree {
        BiDegree { x: self.x + o.x, y: self.y + o.y }
    }
}

impl fmt::Display for BiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Which central variable a series is in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Var {
    X,
    Y,
}

impl Var {
    fn degree(self, k: u32) -> BiDegree {
        match self {
            Var::X => BiDegree::new(k, 0),
            Var::Y => BiDegree::new(0, k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesForm {
    PolynomialList,
    Linear,
    Geometric,
}

/// `1 + Σ_k taps[k-1]·var^k·carrier^k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub variable: Var,
    pub carrier: GeneratorId,
    pub taps: Vec<Scalar>,
    pub form: SeriesForm,
}

impl SeriesSpec {
    pub fn linear(variable: Var, carrier: GeneratorId, alpha: Scalar) -> Self {
        SeriesSpec { variable, carrier, taps: vec![alpha], form: SeriesForm::Linear }
    }

    /// `(1 − c·var·carrier)^{-1}`; taps are filled up to the bound on use.
    pub fn geometric(variable: Var, carrier: GeneratorId, c: Scalar) -> Self {
        SeriesSpec { variable, carrier, taps: vec![c], form: SeriesForm::Geometric }
    }

    pub fn polynomial(variable: Var, carrier: GeneratorId, taps: Vec<Scalar>) -> Self {
        SeriesSpec { variable, carrier, taps, form: SeriesForm::PolynomialList }
    }

    fn tap(&self, k: u32) -> Scalar {
        match self.form {
            SeriesForm::Geometric => self.taps.first().cloned().unwrap_or_default().pow(k),
            _ => self.taps.get(k as usize - 1).cloned().unwrap_or_default(),
        }
    }

    /// Highest power with a nonzero tap, `None` when unbounded.
    fn natural_degree(&self) -> Option<u32> {
        match self.form {
            SeriesForm::Geometric if self.taps.first().is_some_and(|c| !c.is_zero()) => None,
            SeriesForm::Geometric => Some(0),
            _ => Some(self.taps.iter().rposition(|c| !c.is_zero()).map_or(0, |i| i as u32 + 1)),
        }
    }
}

/// A polynomial in central `x`, `y` with `FreePoly` coefficients, truncated
/// above total degree `bound`. `exact` records whether anything has been
/// truncated away while building this value.
#[derive(Clone)]
pub struct CentralPoly {
    alphabet: Arc<Alphabet>,
    bound: u32,
    coeffs: BTreeMap<BiDegree, FreePoly>,
    exact: bool,
}

impl CentralPoly {
    pub fn zero(alphabet: &Arc<Alphabet>, bound: u32) -> Self {
        CentralPoly { alphabet: alphabet.clone(), bound, coeffs: BTreeMap::new(), exact: true }
    }

    pub fn one(alphabet: &Arc<Alphabet>, bound: u32) -> Self {
        Self::constant(FreePoly::one(alphabet), bound)
    }

    /// A series with only a bidegree-(0,0) coefficient (an atom-level element).
    pub fn constant(p: FreePoly, bound: u32) -> Self {
        let mut s = Self::zero(p.alphabet(), bound);
        if !p.is_zero() {
            s.coeffs.insert(BiDegree::ZERO, p);
        }
        s
    }

    /// Builds from explicit components; components above the bound are
    /// dropped and mark the result inexact.
    pub fn from_components(
        alphabet: &Arc<Alphabet>,
        bound: u32,
        comps: impl IntoIterator<Item = (BiDegree, FreePoly)>,
    ) -> Result<Self, SeriesError> {
        let mut s = Self::zero(alphabet, bound);
        for (d, p) in comps {
            let p = p.to_alphabet(alphabet)?;
            if d.total() > bound {
                s.exact &= p.is_zero();
                continue;
            }
            s.add_component(d, &p);
        }
        Ok(s)
    }

    fn add_component(&mut self, d: BiDegree, p: &FreePoly) {
        if p.is_zero() {
            return;
        }
        let sum = match self.coeffs.remove(&d) {
            Some(q) => &q + p,
            None => p.clone(),
        };
        if !sum.is_zero() {
            self.coeffs.insert(d, sum);
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    /// `true` if no nonzero information was dropped by truncation.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Nonzero components in increasing bidegree order.
    pub fn components(&self) -> impl Iterator<Item = (BiDegree, &FreePoly)> {
        self.coeffs.iter().map(|(d, p)| (*d, p))
    }

    /// Largest total degree of a stored component.
    pub fn max_total_degree(&self) -> Option<u32> {
        self.coeffs.keys().map(|d| d.total()).max()
    }

    pub fn coeff(&self, d: BiDegree) -> Result<FreePoly, SeriesError> {
        if d.total() > self.bound {
            return Err(SeriesError::DegreeAboveBound { degree: d, bound: self.bound });
        }
        Ok(self.coeffs.get(&d).cloned().unwrap_or_else(|| FreePoly::zero(&self.alphabet)))
    }

    fn check(&self, o: &CentralPoly) -> Result<(), SeriesError> {
        if self.bound != o.bound {
            return Err(SeriesError::BoundMismatch(self.bound, o.bound));
        }
        if !same_alphabet(&self.alphabet, &o.alphabet) {
            return Err(AlgebraError::AlphabetMismatch {
                left: self.alphabet.to_string(),
                right: o.alphabet.to_string(),
            }
            .into());
        }
        Ok(())
    }

    pub fn try_add(&self, o: &CentralPoly) -> Result<CentralPoly, SeriesError> {
        self.check(o)?;
        let mut s = self.clone();
        s.exact &= o.exact;
        for (d, p) in &o.coeffs {
            s.add_component(*d, p);
        }
        Ok(s)
    }

    pub fn try_sub(&self, o: &CentralPoly) -> Result<CentralPoly, SeriesError> {
        self.try_add(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> CentralPoly {
        let mut s = Self::zero(&self.alphabet, self.bound);
        s.exact = self.exact;
        for (d, p) in &self.coeffs {
            s.add_component(*d, &p.scale(c));
        }
        s
    }

    pub fn try_mul(&self, o: &CentralPoly) -> Result<CentralPoly, SeriesError> {
        self.check(o)?;
        let mut s = Self::zero(&self.alphabet, self.bound);
        s.exact = self.exact && o.exact;
        for (da, a) in &self.coeffs {
            for (db, b) in &o.coeffs {
                let d = *da + *db;
                if d.total() > self.bound {
                    s.exact = false;
                    continue;
                }
                s.add_component(d, &a.try_mul(b)?);
            }
        }
        Ok(s)
    }

    pub fn try_commutator(&self, o: &CentralPoly) -> Result<CentralPoly, SeriesError> {
        self.try_mul(o)?.try_sub(&o.try_mul(self)?)
    }

    /// Inverse of a series with constant term 1, by back-substitution in
    /// increasing total degree.
    pub fn inverse(&self) -> Result<CentralPoly, SeriesError> {
        match self.coeffs.get(&BiDegree::ZERO) {
            Some(c) if *c == FreePoly::one(&self.alphabet) => {}
            _ => return Err(SeriesError::NotInvertible),
        }
        let mut inv: BTreeMap<BiDegree, FreePoly> = BTreeMap::new();
        inv.insert(BiDegree::ZERO, FreePoly::one(&self.alphabet));
        let mut degrees: Vec<BiDegree> =
            (0..=self.bound).flat_map(|t| (0..=t).map(move |x| BiDegree::new(x, t - x))).collect();
        degrees.sort_by_key(|d| (d.total(), d.x));
        for d in degrees.into_iter().skip(1) {
            let mut acc = FreePoly::zero(&self.alphabet);
            for (da, a) in &self.coeffs {
                if *da == BiDegree::ZERO || da.x > d.x || da.y > d.y {
                    continue;
                }
                let rest = BiDegree::new(d.x - da.x, d.y - da.y);
                if let Some(b) = inv.get(&rest) {
                    acc = acc.try_sub(&a.try_mul(b)?)?;
                }
            }
            if !acc.is_zero() {
                inv.insert(d, acc);
            }
        }
        let mut s = Self::zero(&self.alphabet, self.bound);
        s.coeffs = inv;
        // A nonconstant unit always has an infinite inverse.
        s.exact = self.coeffs.len() == 1;
        Ok(s)
    }

    /// Re-truncates at a smaller bound.
    pub fn truncate(&self, bound: u32) -> CentralPoly {
        let mut s = Self::zero(&self.alphabet, bound.min(self.bound));
        s.exact = self.exact && self.coeffs.keys().all(|d| d.total() <= bound);
        s.coeffs = self.coeffs.iter().filter(|(d, _)| d.total() <= bound).map(|(d, p)| (*d, p.clone())).collect();
        s
    }

    /// Parses `x^a y^b * (poly) + …` over an alphabet and bound.
    pub fn parse(text: &str, alphabet: &Arc<Alphabet>, bound: u32) -> Result<CentralPoly, SeriesError> {
        let bad = |m: &str| SeriesError::Parse(format!("{m} in `{text}`"));
        let t = text.trim();
        let mut comps = Vec::new();
        if t == "0" {
            return Ok(Self::zero(alphabet, bound));
        }
        let mut rest = t;
        while !rest.is_empty() {
            let r = rest.trim_start();
            let r = r.strip_prefix("x^").ok_or_else(|| bad("expected `x^`"))?;
            let (a, r) = split_number(r).ok_or_else(|| bad("expected x exponent"))?;
            let r = r.trim_start().strip_prefix("y^").ok_or_else(|| bad("expected `y^`"))?;
            let (b, r) = split_number(r).ok_or_else(|| bad("expected y exponent"))?;
            let r = r.trim_start().strip_prefix('*').ok_or_else(|| bad("expected `*`"))?;
            let r = r.trim_start().strip_prefix('(').ok_or_else(|| bad("expected `(`"))?;
            let close = r.find(')').ok_or_else(|| bad("unclosed `(`"))?;
            let p = FreePoly::parse(&r[..close], alphabet)?;
            comps.push((BiDegree::new(a, b), p));
            let r = r[close + 1..].trim_start();
            rest = match r.strip_prefix('+') {
                Some(more) => {
                    if more.trim().is_empty() {
                        return Err(bad("dangling `+`"));
                    }
                    more
                }
                None if r.is_empty() => r,
                None => return Err(bad("expected `+`")),
            };
        }
        Self::from_components(alphabet, bound, comps)
    }
}

fn split_number(s: &str) -> Option<(u32, &str)> {
    let end = s.find(|c: char| !c.is_ascii_digit()).unwrap_or(s.len());
    if end == 0 {
        return None;
    }
    Some((s[..end].parse().ok()?, &s[end..]))
}

/// Same bound, alphabet, and components (the `exact` flag is metadata).
impl PartialEq for CentralPoly {
    fn eq(&self, o: &Self) -> bool {
        self.bound == o.bound && same_alphabet(&self.alphabet, &o.alphabet) && self.coeffs == o.coeffs
    }
}

impl Eq for CentralPoly {}

impl fmt::Display for CentralPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|(d, p)| format!("x^{} y^{} * ({})", d.x, d.y, p)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for CentralPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CentralPoly[bound {}]({})", self.bound, self)
    }
}

/// Materializes a spec at the given truncation bound.
pub fn series_from_spec(spec: &SeriesSpec, alphabet: &Arc<Alphabet>, bound: u32) -> Result<CentralPoly, SeriesError> {
    let carrier =
        alphabet.letter_of(spec.carrier).ok_or_else(|| AlgebraError::UnknownGenerator(spec.carrier.to_string()))?;
    let mut s = CentralPoly::one(alphabet, bound);
    for k in 1..=bound {
        let c = spec.tap(k);
        if c.is_zero() {
            continue;
        }
        let w = Word::from_letters(&vec![carrier; k as usize])?;
        s.add_component(spec.variable.degree(k), &FreePoly::monomial(alphabet, w, c));
    }
    s.exact = spec.natural_degree().is_some_and(|d| d <= bound);
    Ok(s)
}

/// Free function form of [`CentralPoly::try_mul`].
pub fn series_mul(a: &CentralPoly, b: &CentralPoly) -> Result<CentralPoly, SeriesError> {
    a.try_mul(b)
}

/// Free function form of [`CentralPoly::inverse`].
pub fn series_inverse(a: &CentralPoly) -> Result<CentralPoly, SeriesError> {
    a.inverse()
}

/// Free function form of [`CentralPoly::coeff`].
pub fn coeff(a: &CentralPoly, d: BiDegree) -> Result<FreePoly, SeriesError> {
    a.coeff(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha() -> Arc<Alphabet> {
        Alphabet::uv(2)
    }

    fn lin(var: Var, g: GeneratorId, bound: u32) -> CentralPoly {
        series_from_spec(&SeriesSpec::linear(var, g, Scalar::one()), &alpha(), bound).unwrap()
    }

    fn fp(s: &str) -> FreePoly {
        FreePoly::parse(s, &alpha()).unwrap()
    }

    #[test]
    fn spec_expansion() {
        let l = lin(Var::X, GeneratorId::u(1), 3);
        assert_eq!(l.to_string(), "x^0 y^0 * (1) + x^1 y^0 * (u1)");
        assert!(l.is_exact());
        let g =
            series_from_spec(&SeriesSpec::geometric(Var::X, GeneratorId::u(1), Scalar::one()), &alpha(), 3).unwrap();
        assert_eq!(g.coeff(BiDegree::new(3, 0)).unwrap(), fp("u1.u1.u1"));
        assert!(!g.is_exact());
        let z = series_from_spec(&SeriesSpec::polynomial(Var::Y, GeneratorId::v(1), vec![]), &alpha(), 3).unwrap();
        assert_eq!(z, CentralPoly::one(&alpha(), 3));
    }

    #[test]
    fn products() {
        let g2 = lin(Var::X, GeneratorId::u(2), 2);
        let g1 = lin(Var::X, GeneratorId::u(1), 2);
        let p = g2.try_mul(&g1).unwrap();
        assert_eq!(p.coeff(BiDegree::new(1, 0)).unwrap(), fp("u1 + u2"));
        assert_eq!(p.coeff(BiDegree::new(2, 0)).unwrap(), fp("u2.u1"));
        let one = CentralPoly::one(&alpha(), 2);
        assert_eq!(one.try_mul(&p).unwrap(), p);

        let a = lin(Var::X, GeneratorId::u(1), 2);
        let b = lin(Var::Y, GeneratorId::v(1), 2);
        assert_eq!(a.try_mul(&b).unwrap().coeff(BiDegree::new(1, 1)).unwrap(), fp("u1.v1"));
        assert_eq!(b.try_mul(&a).unwrap().coeff(BiDegree::new(1, 1)).unwrap(), fp("v1.u1"));
    }

    #[test]
    fn inverse_of_linear() {
        let a = lin(Var::X, GeneratorId::u(1), 3);
        let inv = a.inverse().unwrap();
        assert_eq!(inv.coeff(BiDegree::new(1, 0)).unwrap(), fp("-u1"));
        assert_eq!(inv.coeff(BiDegree::new(3, 0)).unwrap(), fp("-u1.u1.u1"));
        assert_eq!(a.try_mul(&inv).unwrap(), CentralPoly::one(&alpha(), 3));
        assert_eq!(CentralPoly::one(&alpha(), 3).inverse().unwrap(), CentralPoly::one(&alpha(), 3));
        assert_eq!(inv.inverse().unwrap(), a);
        let two = CentralPoly::constant(fp("2"), 3);
        assert_eq!(two.inverse().unwrap_err(), SeriesError::NotInvertible);
    }

    #[test]
    fn coeff_above_bound_is_error() {
        let a = lin(Var::X, GeneratorId::u(1), 2);
        assert!(matches!(a.coeff(BiDegree::new(2, 1)), Err(SeriesError::DegreeAboveBound { .. })));
        assert_eq!(a.coeff(BiDegree::ZERO).unwrap(), fp("1"));
    }

    #[test]
    fn mismatched_bounds() {
        let a = lin(Var::X, GeneratorId::u(1), 2);
        let b = lin(Var::X, GeneratorId::u(1), 3);
        assert_eq!(a.try_mul(&b).unwrap_err(), SeriesError::BoundMismatch(2, 3));
    }

    #[test]
    fn text_round_trip() {
        let a = lin(Var::X, GeneratorId::u(1), 4);
        let b = lin(Var::Y, GeneratorId::v(2), 4);
        let p = a.try_commutator(&b).unwrap().try_add(&a).unwrap();
        let back = CentralPoly::parse(&p.to_string(), &alpha(), 4).unwrap();
        assert_eq!(back, p);
        assert!(CentralPoly::parse("x^1 y^0 * (u1) +", &alpha(), 4).is_err());
    }

    #[test]
    fn exactness_tracking() {
        let a = lin(Var::X, GeneratorId::u(1), 2);
        let b = lin(Var::X, GeneratorId::u(2), 2);
        let ab = a.try_mul(&b).unwrap();
        assert!(ab.is_exact());
        assert!(!ab.try_mul(&a).unwrap().is_exact());
    }
}
