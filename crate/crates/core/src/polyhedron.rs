//! Extreme points of the bisubmodular polyhedron
//! `P_f = { π : π(S1) - π(S2) <= f(S1, S2) for all (S1, S2) }`
//! and the poly-bimatroid cuts `z >= πᵀx` built from them.

use crate::biset::{Biset, GroundSet};
use crate::error::{Error, Result};
use crate::oracle::FunctionOracle;
use crate::Scalar;

/// A permutation of the ground set together with a `±1` sign per element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderSignPair {
    order: Vec<usize>,
    signs: Vec<i8>,
}

impl OrderSignPair {
    /// `signs[i]` is the sign of element `i` (not of position `i`).
    pub fn new(order: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let n = order.len();
        if signs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: signs.len() });
        }
        let mut seen = vec![false; n];
        for &i in &order {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidParams(format!("order {order:?} is not a permutation")));
            }
        }
        if let Some(index) = signs.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidTernary { index, value: i64::from(signs[index]) });
        }
        Ok(Self { order, signs })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// The biset formed by the first `k` elements of the order, each placed
    /// on the side given by its sign. `prefix(n)` is the full sign vector.
    pub fn prefix(&self, ground: GroundSet, k: usize) -> Biset {
        let mut b = ground.empty_biset();
        for &i in &self.order[..k] {
            b = if self.signs[i] > 0 { b.with_s1(i) } else { b.with_s2(i) };
        }
        b
    }
}

/// A point of `P_f`, with the order/sign pair that generated it when known.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyVertex<T> {
    pub pi: Vec<T>,
    pub origin: Option<OrderSignPair>,
}

impl<T: Scalar> PolyVertex<T> {
    pub fn dot(&self, x: &[T]) -> T {
        dot(&self.pi, x)
    }
}

/// The inequality `z >= πᵀx`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut<T> {
    pub pi: Vec<T>,
}

impl<T: Scalar> Cut<T> {
    pub fn new(pi: Vec<T>) -> Self {
        Self { pi }
    }

    /// `πᵀx`
    pub fn value_at(&self, x: &[T]) -> T {
        dot(&self.pi, x)
    }

    /// `πᵀx - z`; positive when `(x, z)` violates the cut.
    pub fn violation(&self, x: &[T], z: T) -> T {
        self.value_at(x) - z
    }
}

impl<T> From<PolyVertex<T>> for Cut<T> {
    fn from(v: PolyVertex<T>) -> Self {
        Self { pi: v.pi }
    }
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&u, &v)| u * v).sum()
}

/// Signed greedy: walks `order`, adding each element to the side picked by
/// its sign and recording the marginal value. Makes exactly `2n` oracle calls.
pub fn signed_greedy<T, O>(oracle: &mut O, os: &OrderSignPair) -> Result<PolyVertex<T>>
where
    T: Scalar,
    O: FunctionOracle<T> + ?Sized,
{
    let ground = oracle.ground();
    let n = ground.len();
    if os.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: os.len() });
    }
    let mut pi = vec![T::zero(); n];
    let mut current = ground.empty_biset();
    for &i in os.order() {
        let base = oracle.evaluate(&current)?;
        if os.signs()[i] > 0 {
            let next = current.with_s1(i);
            pi[i] = oracle.evaluate(&next)? - base;
            current = next;
        } else {
            let next = current.with_s2(i);
            pi[i] = base - oracle.evaluate(&next)?;
            current = next;
        }
    }
    Ok(PolyVertex { pi, origin: Some(os.clone()) })
}

/// Order and signs used by the generalized greedy for `xbar`: indices by
/// non-increasing `|xbar_i|` (stable, so ties keep ascending index), sign
/// `+1` when `xbar_i >= 0`.
pub fn greedy_order<T: Scalar>(xbar: &[T]) -> Result<OrderSignPair> {
    if let Some(i) = xbar.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let mut order: Vec<usize> = (0..xbar.len()).collect();
    order.sort_by(|&a, &b| xbar[b].abs().partial_cmp(&xbar[a].abs()).expect("finite"));
    let signs = xbar.iter().map(|&v| if v >= T::zero() { 1 } else { -1 }).collect();
    OrderSignPair::new(order, signs)
}

/// Generalized greedy: returns a `π ∈ P_f` maximizing `πᵀ xbar`.
pub fn generalized_greedy<T, O>(oracle: &mut O, xbar: &[T]) -> Result<PolyVertex<T>>
where
    T: Scalar,
    O: FunctionOracle<T> + ?Sized,
{
    let n = oracle.ground().len();
    if xbar.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: xbar.len() });
    }
    let os = greedy_order(xbar)?;
    signed_greedy(oracle, &os)
}

/// Separation: the most violated extremal cut at `(xbar, zbar)`, if its
/// violation exceeds the relative threshold.
pub fn separate<T, O>(oracle: &mut O, xbar: &[T], zbar: T) -> Result<Option<Cut<T>>>
where
    T: Scalar,
    O: FunctionOracle<T> + ?Sized,
{
    let v = generalized_greedy(oracle, xbar)?;
    if v.dot(xbar) > zbar + T::tol_violation(zbar) {
        Ok(Some(v.into()))
    } else {
        Ok(None)
    }
}

pub const MEMBERSHIP_MAX_N: usize = 12;

/// Checks `π ∈ P_f` against all `3^n` defining inequalities.
pub fn membership_bruteforce<T, O>(oracle: &mut O, pi: &[T]) -> Result<bool>
where
    T: Scalar,
    O: FunctionOracle<T> + ?Sized,
{
    let ground = oracle.ground();
    let n = ground.len();
    if n > MEMBERSHIP_MAX_N {
        return Err(Error::TooLarge { op: "membership_bruteforce", n, max: MEMBERSHIP_MAX_N });
    }
    if pi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: pi.len() });
    }
    for b in ground.bisets() {
        let lhs = dot(pi, &b.to_ternary().to_real::<T>());
        if lhs > oracle.evaluate(&b)? + T::tol_feas() {
            return Ok(false);
        }
    }
    Ok(true)
}
