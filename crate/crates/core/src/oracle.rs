//! Set-function oracles over `3^N`.

use crate::biset::{mask_elements, Biset, GroundSet};
use crate::error::{Error, Result};
use crate::Scalar;
use rand::Rng;
use std::collections::HashMap;

/// Evaluation interface for a function `f: 3^N -> R`.
///
/// Implementations are expected to satisfy `f(∅, ∅) = 0`; callers that
/// depend on it may assert.
pub trait FunctionOracle<T: Scalar> {
    fn ground(&self) -> GroundSet;

    fn evaluate(&mut self, b: &Biset) -> Result<T>;
}

impl<T: Scalar, O: FunctionOracle<T> + ?Sized> FunctionOracle<T> for &mut O {
    fn ground(&self) -> GroundSet {
        (**self).ground()
    }

    fn evaluate(&mut self, b: &Biset) -> Result<T> {
        (**self).evaluate(b)
    }
}

impl<T: Scalar, O: FunctionOracle<T> + ?Sized> FunctionOracle<T> for Box<O> {
    fn ground(&self) -> GroundSet {
        (**self).ground()
    }

    fn evaluate(&mut self, b: &Biset) -> Result<T> {
        (**self).evaluate(b)
    }
}

pub(crate) fn check_ground(expected: GroundSet, b: &Biset) -> Result<()> {
    if b.ground() != expected {
        return Err(Error::DimensionMismatch { expected: expected.len(), found: b.ground().len() });
    }
    Ok(())
}

/// Memoizing wrapper keyed by the canonical biset encoding.
#[derive(Debug, Clone)]
pub struct Memoized<O, T> {
    inner: O,
    cache: HashMap<u128, T>,
    hits: u64,
    misses: u64,
}

impl<O, T: Scalar> Memoized<O, T>
where
    O: FunctionOracle<T>,
{
    pub fn new(inner: O) -> Self {
        Self { inner, cache: HashMap::new(), hits: 0, misses: 0 }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn into_inner(self) -> O {
        self.inner
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }

    pub fn misses(&self) -> u64 {
        self.misses
    }

    pub fn clear(&mut self) {
        self.cache.clear();
    }
}

impl<O: FunctionOracle<T>, T: Scalar> FunctionOracle<T> for Memoized<O, T> {
    fn ground(&self) -> GroundSet {
        self.inner.ground()
    }

    fn evaluate(&mut self, b: &Biset) -> Result<T> {
        let key = b.canonical_key();
        if let Some(&v) = self.cache.get(&key) {
            self.hits += 1;
            return Ok(v);
        }
        let v = self.inner.evaluate(b)?;
        self.misses += 1;
        self.cache.insert(key, v);
        Ok(v)
    }
}

/// `f(S1, S2) = Σ_{i∈S1} a_i + Σ_{j∈S2} b_j`.
///
/// Bisubmodular iff `a_i + b_i >= 0` for every `i`. [`ModularOracle::signed`]
/// builds the symmetric case `b = -a`, whose greedy vertex is `a` for every
/// order and sign pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularOracle<T> {
    ground: GroundSet,
    first: Vec<T>,
    second: Vec<T>,
}

impl<T: Scalar> ModularOracle<T> {
    pub fn new(first: Vec<T>, second: Vec<T>) -> Result<Self> {
        let ground = GroundSet::new(first.len())?;
        if second.len() != first.len() {
            return Err(Error::DimensionMismatch { expected: first.len(), found: second.len() });
        }
        Ok(Self { ground, first, second })
    }

    pub fn signed(w: Vec<T>) -> Result<Self> {
        let neg = w.iter().map(|&v| -v).collect();
        Self::new(w, neg)
    }
}

impl<T: Scalar> FunctionOracle<T> for ModularOracle<T> {
    fn ground(&self) -> GroundSet {
        self.ground
    }

    fn evaluate(&mut self, b: &Biset) -> Result<T> {
        check_ground(self.ground, b)?;
        let s1: T = mask_elements(b.s1_mask()).map(|i| self.first[i]).sum();
        let s2: T = mask_elements(b.s2_mask()).map(|i| self.second[i]).sum();
        Ok(s1 + s2)
    }
}

/// Explicit value table indexed by canonical key. Limited to `n <= 12`.
#[derive(Debug, Clone, PartialEq)]
pub struct TableOracle<T> {
    ground: GroundSet,
    values: Vec<T>,
}

impl<T: Scalar> TableOracle<T> {
    pub const MAX_N: usize = 12;

    pub fn new(ground: GroundSet, values: Vec<T>) -> Result<Self> {
        if ground.len() > Self::MAX_N {
            return Err(Error::TooLarge { op: "TableOracle", n: ground.len(), max: Self::MAX_N });
        }
        let expected = ground.biset_count() as usize;
        if values.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: values.len() });
        }
        Ok(Self { ground, values })
    }

    /// Tabulates another oracle over all of `3^N`.
    pub fn tabulate<O: FunctionOracle<T> + ?Sized>(oracle: &mut O) -> Result<Self> {
        let ground = oracle.ground();
        if ground.len() > Self::MAX_N {
            return Err(Error::TooLarge { op: "TableOracle", n: ground.len(), max: Self::MAX_N });
        }
        let values = ground.bisets().map(|b| oracle.evaluate(&b)).collect::<Result<_>>()?;
        Ok(Self { ground, values })
    }

    /// i.i.d. uniform values in `[-1, 1]` with `f(∅, ∅) = 0`. Rarely bisubmodular.
    pub fn random<R: Rng + ?Sized>(ground: GroundSet, rng: &mut R) -> Result<Self> {
        let count = ground.biset_count() as usize;
        let mut values: Vec<T> = (0..count).map(|_| T::lit(rng.gen_range(-1.0..=1.0))).collect();
        values[ground.empty_biset().canonical_key() as usize] = T::zero();
        Self::new(ground, values)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn get(&self, b: &Biset) -> T {
        self.values[b.canonical_key() as usize]
    }
}

impl<T: Scalar> FunctionOracle<T> for TableOracle<T> {
    fn ground(&self) -> GroundSet {
        self.ground
    }

    fn evaluate(&mut self, b: &Biset) -> Result<T> {
        check_ground(self.ground, b)?;
        Ok(self.get(b))
    }
}

/// Oracle backed by a closure.
pub struct FnOracle<F> {
    ground: GroundSet,
    f: F,
}

impl<F> FnOracle<F> {
    pub fn new(ground: GroundSet, f: F) -> Self {
        Self { ground, f }
    }
}

impl<T: Scalar, F: FnMut(&Biset) -> T> FunctionOracle<T> for FnOracle<F> {
    fn ground(&self) -> GroundSet {
        self.ground
    }

    fn evaluate(&mut self, b: &Biset) -> Result<T> {
        check_ground(self.ground, b)?;
        Ok((self.f)(b))
    }
}

/// Evaluates `f` at `b`.
pub fn evaluate<T: Scalar, O: FunctionOracle<T> + ?Sized>(oracle: &mut O, b: &Biset) -> Result<T> {
    oracle.evaluate(b)
}
