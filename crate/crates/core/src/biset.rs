//! Ground sets, bisets and their ternary characteristic vectors.
//!
//! A biset is stored as two `u64` membership masks, which caps the ground
//! set at 64 elements. Elements are 0-based; [`Biset::display_one_based`]
//! renders the 1-based form used in reports.

use crate::error::{Error, Result};
use std::fmt;

pub const MAX_GROUND: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGroundSet);
        }
        if n > MAX_GROUND {
            return Err(Error::GroundSetTooLarge(n));
        }
        Ok(Self { n })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Mask with every element of the ground set present.
    #[inline]
    pub fn full_mask(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    /// `3^n`, the number of bisets. Only meaningful for `n <= 40`.
    pub fn biset_count(&self) -> u64 {
        3u64.pow(self.n as u32)
    }

    /// Every biset in canonical-key order, starting from `(∅, N)`.
    pub fn bisets(&self) -> impl Iterator<Item = Biset> + '_ {
        (0..self.biset_count()).map(move |k| Biset::from_key(*self, k as u128))
    }

    pub fn empty_biset(&self) -> Biset {
        Biset { ground: *self, s1: 0, s2: 0 }
    }
}

/// An ordered pair `(S1, S2)` of disjoint subsets of the ground set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Biset {
    ground: GroundSet,
    s1: u64,
    s2: u64,
}

impl Biset {
    pub fn new<A, B>(ground: GroundSet, s1: A, s2: B) -> Result<Self>
    where
        A: IntoIterator<Item = usize>,
        B: IntoIterator<Item = usize>,
    {
        let s1 = mask_of(ground, s1)?;
        let s2 = mask_of(ground, s2)?;
        Self::from_masks(ground, s1, s2)
    }

    pub fn from_masks(ground: GroundSet, s1: u64, s2: u64) -> Result<Self> {
        let full = ground.full_mask();
        if (s1 | s2) & !full != 0 {
            return Err(Error::InvalidBiset(format!(
                "element outside ground set of size {}",
                ground.len()
            )));
        }
        if s1 & s2 != 0 {
            let i = (s1 & s2).trailing_zeros();
            return Err(Error::InvalidBiset(format!("element {i} appears in both S1 and S2")));
        }
        Ok(Self { ground, s1, s2 })
    }

    /// Decodes a canonical key produced by [`Biset::canonical_key`].
    ///
    /// Panics if the key is out of range for the ground set.
    pub fn from_key(ground: GroundSet, mut key: u128) -> Self {
        let (mut s1, mut s2) = (0u64, 0u64);
        for i in 0..ground.len() {
            match key % 3 {
                0 => s2 |= 1 << i,
                2 => s1 |= 1 << i,
                _ => {}
            }
            key /= 3;
        }
        assert_eq!(key, 0, "canonical key out of range");
        Self { ground, s1, s2 }
    }

    #[inline]
    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    #[inline]
    pub fn s1_mask(&self) -> u64 {
        self.s1
    }

    #[inline]
    pub fn s2_mask(&self) -> u64 {
        self.s2
    }

    pub fn s1(&self) -> Vec<usize> {
        mask_elements(self.s1).collect()
    }

    pub fn s2(&self) -> Vec<usize> {
        mask_elements(self.s2).collect()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.s1 == 0 && self.s2 == 0
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        (self.s1 | self.s2) >> i & 1 == 1
    }

    /// `(S1 ∪ {i}, S2)`. Panics if `i` is already used.
    pub fn with_s1(&self, i: usize) -> Self {
        assert!(i < self.ground.len() && !self.contains(i));
        Self { s1: self.s1 | 1 << i, ..*self }
    }

    /// `(S1, S2 ∪ {i})`. Panics if `i` is already used.
    pub fn with_s2(&self, i: usize) -> Self {
        assert!(i < self.ground.len() && !self.contains(i));
        Self { s2: self.s2 | 1 << i, ..*self }
    }

    /// Reduction `(X1 ∩ Y1, X2 ∩ Y2)`.
    pub fn meet(&self, other: &Self) -> Self {
        Self { s1: self.s1 & other.s1, s2: self.s2 & other.s2, ..*self }
    }

    /// `((X1 ∪ Y1) \ (X2 ∪ Y2), (X2 ∪ Y2) \ (X1 ∪ Y1))`.
    pub fn join(&self, other: &Self) -> Self {
        let u1 = self.s1 | other.s1;
        let u2 = self.s2 | other.s2;
        Self { s1: u1 & !u2, s2: u2 & !u1, ..*self }
    }

    /// Base-3 encoding of the ternary vector, little-endian: digit `i` is
    /// `x_i + 1`.
    pub fn canonical_key(&self) -> u128 {
        let mut key = 0u128;
        for i in (0..self.ground.len()).rev() {
            key *= 3;
            if self.s1 >> i & 1 == 1 {
                key += 2;
            } else if self.s2 >> i & 1 == 0 {
                key += 1;
            }
        }
        key
    }

    pub fn to_ternary(&self) -> TernaryVector {
        let entries = (0..self.ground.len())
            .map(|i| {
                if self.s1 >> i & 1 == 1 {
                    1
                } else if self.s2 >> i & 1 == 1 {
                    -1
                } else {
                    0
                }
            })
            .collect();
        TernaryVector { entries }
    }

    pub fn display_one_based(&self) -> OneBased<'_> {
        OneBased(self)
    }
}

impl fmt::Display for Biset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sets(f, self, 0)
    }
}

/// Display adapter printing 1-based element labels.
pub struct OneBased<'a>(&'a Biset);

impl fmt::Display for OneBased<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sets(f, self.0, 1)
    }
}

fn write_sets(f: &mut fmt::Formatter<'_>, b: &Biset, offset: usize) -> fmt::Result {
    let side = |mask: u64| {
        mask_elements(mask)
            .map(|i| (i + offset).to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    write!(f, "({{{}}},{{{}}})", side(b.s1), side(b.s2))
}

/// Characteristic vector `x ∈ {-1, 0, +1}^n` of a biset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TernaryVector {
    entries: Vec<i8>,
}

impl TernaryVector {
    pub fn new(values: &[i64]) -> Result<Self> {
        let entries = values
            .iter()
            .enumerate()
            .map(|(index, &value)| match value {
                -1..=1 => Ok(value as i8),
                _ => Err(Error::InvalidTernary { index, value }),
            })
            .collect::<Result<Vec<_>>>()?;
        GroundSet::new(entries.len())?;
        Ok(Self { entries })
    }

    pub fn zeros(ground: GroundSet) -> Self {
        Self { entries: vec![0; ground.len()] }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    pub fn ground(&self) -> GroundSet {
        GroundSet { n: self.entries.len() }
    }

    pub fn to_biset(&self) -> Biset {
        let (mut s1, mut s2) = (0u64, 0u64);
        for (i, &v) in self.entries.iter().enumerate() {
            match v {
                1 => s1 |= 1 << i,
                -1 => s2 |= 1 << i,
                _ => {}
            }
        }
        Biset { ground: self.ground(), s1, s2 }
    }

    /// Entries converted into the scalar type.
    pub fn to_real<T: crate::Scalar>(&self) -> Vec<T> {
        self.entries.iter().map(|&v| T::lit(f64::from(v))).collect()
    }
}

impl fmt::Display for TernaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|v| match v {
                1 => "+1".to_string(),
                -1 => "-1".to_string(),
                _ => "0".to_string(),
            })
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn biset_to_ternary(b: &Biset) -> TernaryVector {
    b.to_ternary()
}

pub fn ternary_to_biset(x: &TernaryVector) -> Biset {
    x.to_biset()
}

/// Indices of the set bits of `mask`, ascending.
pub fn mask_elements(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

fn mask_of(ground: GroundSet, elems: impl IntoIterator<Item = usize>) -> Result<u64> {
    let mut mask = 0u64;
    for i in elems {
        if i >= ground.len() {
            return Err(Error::InvalidBiset(format!(
                "element {i} outside ground set of size {}",
                ground.len()
            )));
        }
        mask |= 1 << i;
    }
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn g(n: usize) -> GroundSet {
        GroundSet::new(n).unwrap()
    }

    #[test]
    fn biset_to_ternary_examples() {
        let n3 = g(3);
        assert_eq!(n3.empty_biset().to_ternary().entries(), &[0, 0, 0]);
        let b = Biset::new(n3, [0, 2], [1]).unwrap();
        assert_eq!(b.to_ternary().entries(), &[1, -1, 1]);
        let b = Biset::new(n3, [1], [2]).unwrap();
        assert_eq!(b.to_ternary().entries(), &[0, 1, -1]);
    }

    #[test]
    fn ternary_to_biset_examples() {
        let x = TernaryVector::new(&[0, 0, 0]).unwrap();
        assert!(x.to_biset().is_empty());
        let x = TernaryVector::new(&[1, -1, 1]).unwrap();
        assert_eq!(x.to_biset(), Biset::new(g(3), [0, 2], [1]).unwrap());
        let x = TernaryVector::new(&[-1, 0, 0]).unwrap();
        assert_eq!(x.to_biset(), Biset::new(g(3), [], [0]).unwrap());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            TernaryVector::new(&[0, 2, 0]),
            Err(Error::InvalidTernary { index: 1, value: 2 })
        ));
        assert!(Biset::new(g(3), [0, 1], [1]).is_err());
        assert!(Biset::new(g(3), [3], []).is_err());
        assert!(GroundSet::new(0).is_err());
        assert!(GroundSet::new(65).is_err());
    }

    #[test]
    fn round_trip_and_key_injective_exhaustive() {
        for n in 1..=4 {
            let ground = g(n);
            let mut keys = HashSet::new();
            for b in ground.bisets() {
                assert_eq!(b.to_ternary().to_biset(), b);
                assert_eq!(Biset::from_key(ground, b.canonical_key()), b);
                keys.insert(b.canonical_key());
            }
            assert_eq!(keys.len() as u64, ground.biset_count());
        }
    }

    #[test]
    fn meet_and_join() {
        let n = g(3);
        let x = Biset::new(n, [], [0]).unwrap();
        let y = Biset::new(n, [0], []).unwrap();
        assert!(x.meet(&y).is_empty());
        assert!(x.join(&y).is_empty());
        let x = Biset::new(n, [0, 1], [2]).unwrap();
        let y = Biset::new(n, [1], []).unwrap();
        assert_eq!(x.join(&y), x);
        assert_eq!(x.meet(&y), y);
    }

    #[test]
    fn one_based_display() {
        let b = Biset::new(g(3), [1], [2]).unwrap();
        assert_eq!(b.display_one_based().to_string(), "({2},{3})");
        assert_eq!(b.to_string(), "({1},{2})");
    }
}
