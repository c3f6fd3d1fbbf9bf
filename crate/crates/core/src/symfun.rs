//! Noncommutative (super) elementary symmetric functions and ordered subset
//! products.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::free_algebra::{AlgebraError, Alphabet, FreePoly, GeneratorId, Kind};
use crate::series::{CentralPoly, SeriesError};

/// A strictly increasing set of indices `s_1 < … < s_m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub struct IndexSubset(Vec<u32>);

impl IndexSubset {
    pub fn new(members: impl IntoIterator<Item = u32>) -> Self {
        let set: BTreeSet<u32> = members.into_iter().collect();
        IndexSubset(set.into_iter().collect())
    }

    pub fn empty() -> Self {
        IndexSubset(Vec::new())
    }

    /// `{1, …, n}`.
    pub fn full(n: u32) -> Self {
        IndexSubset((1..=n).collect())
    }

    pub fn members(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: u32) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn max(&self) -> Option<u32> {
        self.0.last().copied()
    }

    /// All subsets of `{1..n}`, ordered by size then lexicographically.
    pub fn all_subsets(n: u32) -> Vec<IndexSubset> {
        let mut out: Vec<IndexSubset> =
            (0u32..1 << n).map(|mask| IndexSubset((1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect())).collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.0.cmp(&b.0)));
        out
    }

    /// Subsets of `{1..n}` with cardinality in `lo..=hi`.
    pub fn subsets_with_card(n: u32, lo: usize, hi: usize) -> Vec<IndexSubset> {
        Self::all_subsets(n).into_iter().filter(|s| (lo..=hi).contains(&s.len())).collect()
    }
}

impl fmt::Display for IndexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// The set of barred indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct BarPattern(BTreeSet<u32>);

impl BarPattern {
    pub fn new(barred: impl IntoIterator<Item = u32>) -> Self {
        BarPattern(barred.into_iter().collect())
    }

    pub fn none() -> Self {
        Self::default()
    }

    /// Barring of `{1..n}` whose bit `i-1` in `mask` marks `i`.
    pub fn from_mask(n: u32, mask: u32) -> Self {
        BarPattern((1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect())
    }

    pub fn is_barred(&self, i: u32) -> bool {
        self.0.contains(&i)
    }

    pub fn barred(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }
}

impl fmt::Display for BarPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

fn family_gen(family: Kind, i: u32) -> GeneratorId {
    GeneratorId::new(family, i)
}

/// `e_k(family_S)`: the sum of strictly decreasing `k`-fold products.
pub fn elem(k: i64, s: &IndexSubset, family: Kind, alphabet: &Arc<Alphabet>) -> Result<FreePoly, AlgebraError> {
    super_elem(k, s, &BarPattern::none(), family, alphabet)
}

/// `ē_k(family_S)`: weakly decreasing products, strict at unbarred indices.
///
/// Built by adding the members of `S` in increasing order:
/// unbarred `m` gives `ē_k(S∪m) = x_m·ē_{k-1}(S) + ē_k(S)`, barred `m` gives
/// `ē_k(S∪m) = x_m·ē_{k-1}(S∪m) + ē_k(S)`.
pub fn super_elem(
    k: i64,
    s: &IndexSubset,
    bars: &BarPattern,
    family: Kind,
    alphabet: &Arc<Alphabet>,
) -> Result<FreePoly, AlgebraError> {
    if k < 0 {
        return Ok(FreePoly::zero(alphabet));
    }
    let k = k as usize;
    let mut table: Vec<FreePoly> =
        (0..=k).map(|j| if j == 0 { FreePoly::one(alphabet) } else { FreePoly::zero(alphabet) }).collect();
    for &m in s.members() {
        let x = FreePoly::generator(alphabet, family_gen(family, m))?;
        if bars.is_barred(m) {
            for j in 1..=k {
                let add = x.try_mul(&table[j - 1])?;
                table[j] = table[j].try_add(&add)?;
            }
        } else {
            for j in (1..=k).rev() {
                let add = x.try_mul(&table[j - 1])?;
                table[j] = table[j].try_add(&add)?;
            }
        }
    }
    Ok(table.pop().expect("table has k+1 entries"))
}

/// `g_S = g_{s_m} ⋯ g_{s_1}`, largest index leftmost; `factors[i-1]` is `g_i`.
pub fn product_over_subset(
    factors: &[CentralPoly],
    s: &IndexSubset,
    alphabet: &Arc<Alphabet>,
    bound: u32,
) -> Result<CentralPoly, SeriesError> {
    let mut acc = CentralPoly::one(alphabet, bound);
    for &i in s.members().iter().rev() {
        let f = factors.get(i as usize - 1).ok_or_else(|| AlgebraError::UnknownGenerator(format!("factor {i}")))?;
        acc = acc.try_mul(f)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_algebra::Scalar;
    use crate::series::{series_from_spec, BiDegree, SeriesSpec, Var};

    fn a(n: u32) -> Arc<Alphabet> {
        Alphabet::u(n)
    }

    fn fp(s: &str, n: u32) -> FreePoly {
        FreePoly::parse(s, &a(n)).unwrap()
    }

    #[test]
    fn elem_examples() {
        let s = IndexSubset::new([1, 2, 3]);
        assert_eq!(elem(0, &s, Kind::U, &a(3)).unwrap(), fp("1", 3));
        assert_eq!(elem(2, &s, Kind::U, &a(3)).unwrap(), fp("u3.u2 + u3.u1 + u2.u1", 3));
        assert!(elem(4, &s, Kind::U, &a(3)).unwrap().is_zero());
        assert!(elem(-1, &s, Kind::U, &a(3)).unwrap().is_zero());
        assert_eq!(elem(0, &IndexSubset::empty(), Kind::U, &a(3)).unwrap(), fp("1", 3));
    }

    #[test]
    fn super_examples() {
        let bars = BarPattern::new([1]);
        assert_eq!(super_elem(3, &IndexSubset::new([1]), &bars, Kind::U, &a(2)).unwrap(), fp("u1.u1.u1", 2));
        assert_eq!(super_elem(2, &IndexSubset::new([1, 2]), &bars, Kind::U, &a(2)).unwrap(), fp("u2.u1 + u1.u1", 2));
    }

    /// Direct enumeration of admissible index sequences.
    fn brute_super(k: usize, s: &IndexSubset, bars: &BarPattern, al: &Arc<Alphabet>) -> FreePoly {
        fn go(k: usize, prev: Option<u32>, s: &[u32], bars: &BarPattern, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if acc.len() == k {
                out.push(acc.clone());
                return;
            }
            for &i in s.iter().rev() {
                let ok = match prev {
                    None => true,
                    Some(p) => i < p || (i == p && bars.is_barred(p)),
                };
                if ok {
                    acc.push(i);
                    go(k, Some(i), s, bars, acc, out);
                    acc.pop();
                }
            }
        }
        let mut seqs = Vec::new();
        go(k, None, s.members(), bars, &mut Vec::new(), &mut seqs);
        let mut p = FreePoly::zero(al);
        for seq in seqs {
            let gens: Vec<GeneratorId> = seq.iter().map(|&i| GeneratorId::u(i)).collect();
            p = &p + &FreePoly::word_of(al, &gens).unwrap();
        }
        p
    }

    #[test]
    fn super_matches_enumeration() {
        let al = a(4);
        for mask in 0..16 {
            let bars = BarPattern::from_mask(4, mask);
            for s in IndexSubset::all_subsets(4) {
                for k in 0..=4 {
                    assert_eq!(super_elem(k as i64, &s, &bars, Kind::U, &al).unwrap(), brute_super(k, &s, &bars, &al));
                }
            }
        }
    }

    #[test]
    fn unbarred_super_is_elem_and_counts_are_binomial() {
        let al = a(4);
        for s in IndexSubset::all_subsets(4) {
            for k in 0..=5i64 {
                let e = elem(k, &s, Kind::U, &al).unwrap();
                assert_eq!(super_elem(k, &s, &BarPattern::none(), Kind::U, &al).unwrap(), e);
                let m = s.len() as i64;
                let binom = if k > m { 0 } else { (0..k).fold(1i64, |acc, i| acc * (m - i) / (i + 1)) };
                assert_eq!(e.num_terms() as i64, binom);
            }
        }
    }

    #[test]
    fn subset_product_order() {
        let al = a(3);
        let g: Vec<CentralPoly> = (1..=3)
            .map(|i| series_from_spec(&SeriesSpec::linear(Var::X, GeneratorId::u(i), Scalar::one()), &al, 3).unwrap())
            .collect();
        let p = product_over_subset(&g, &IndexSubset::new([1, 3]), &al, 3).unwrap();
        assert_eq!(p, g[2].try_mul(&g[0]).unwrap());
        assert_eq!(product_over_subset(&g, &IndexSubset::empty(), &al, 3).unwrap(), CentralPoly::one(&al, 3));
        let full = product_over_subset(&g, &IndexSubset::full(3), &al, 3).unwrap();
        assert_eq!(full.coeff(BiDegree::new(2, 0)).unwrap(), elem(2, &IndexSubset::full(3), Kind::U, &al).unwrap());
    }

    #[test]
    fn subsets_enumeration() {
        let all = IndexSubset::all_subsets(3);
        assert_eq!(all.len(), 8);
        assert!(all[0].is_empty());
        assert_eq!(all[1], IndexSubset::new([1]));
        assert_eq!(IndexSubset::subsets_with_card(4, 2, 2).len(), 6);
        assert_eq!(IndexSubset::new([3, 1, 3]).to_string(), "{1,3}");
    }
}
