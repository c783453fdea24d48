//! Exhaustive certification tools: bisubmodularity checks, brute-force
//! minimization and vertex enumeration. All of them tabulate `f` over `3^N`
//! once and are exponential in `n`.

use crate::biset::{Biset, GroundSet};
use crate::error::{Error, Result};
use crate::oracle::{FunctionOracle, TableOracle};
use crate::polyhedron::{signed_greedy, OrderSignPair, PolyVertex};
use crate::Scalar;
use itertools::Itertools;
use std::fmt;

pub const CHECK_MAX_N: usize = 8;
pub const BRUTE_MIN_MAX_N: usize = 12;
pub const ENUMERATE_MAX_N: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Direct,
    A1,
    A2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// `f(x) + f(y) >= f(x ⊓ y) + f(x ⊔ y)` fails.
    Pair { x: Biset, y: Biset },
    /// `X ↦ f(X ∩ S, X ∩ T)` is not submodular at `(x, y)` for the partition `(S, N \ S)`.
    Partition { s_mask: u64, x_mask: u64, y_mask: u64 },
    /// `f(S1+i, S2) + f(S1, S2+i) >= 2 f(S1, S2)` fails.
    Exchange { base: Biset, element: usize },
}

/// A violated defining inequality, `lhs < rhs - tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation<T> {
    pub kind: ViolationKind,
    pub witness: Witness,
    pub lhs: T,
    pub rhs: T,
}

impl<T: Scalar> fmt::Display for Violation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            Witness::Pair { x, y } => write!(
                f,
                "direct inequality fails at X={}, Y={}",
                x.display_one_based(),
                y.display_one_based()
            )?,
            Witness::Partition { s_mask, x_mask, y_mask } => {
                write!(f, "A1 fails for partition S={s_mask:#b}: X={x_mask:#b}, Y={y_mask:#b}")?
            }
            Witness::Exchange { base, element } => write!(
                f,
                "A2 fails at {} with element {}",
                base.display_one_based(),
                element + 1
            )?,
        }
        write!(f, " (lhs {} < rhs {})", self.lhs, self.rhs)
    }
}

fn guard(op: &'static str, n: usize, max: usize) -> Result<()> {
    if n > max {
        return Err(Error::TooLarge { op, n, max });
    }
    Ok(())
}

fn violated<T: Scalar>(lhs: T, rhs: T) -> bool {
    lhs < rhs - T::tol_feas()
}

/// Checks the defining inequality over all pairs of bisets. Pairs are
/// visited with `x` ascending in canonical key and `y` above `x`.
pub fn check_direct<T, O>(oracle: &mut O) -> Result<Option<Violation<T>>>
where
    T: Scalar,
    O: FunctionOracle<T> + ?Sized,
{
    let ground = oracle.ground();
    guard("check_direct", ground.len(), CHECK_MAX_N)?;
    let table = TableOracle::tabulate(oracle)?;
    let bisets: Vec<Biset> = ground.bisets().collect();
    for (kx, x) in bisets.iter().enumerate() {
        let fx = table.values()[kx];
        for (ky, y) in bisets.iter().enumerate().skip(kx + 1) {
            let lhs = fx + table.values()[ky];
            let rhs = table.get(&x.meet(y)) + table.get(&x.join(y));
            if violated(lhs, rhs) {
                return Ok(Some(Violation {
                    kind: ViolationKind::Direct,
                    witness: Witness::Pair { x: *x, y: *y },
                    lhs,
                    rhs,
                }));
            }
        }
    }
    Ok(None)
}

/// Checks the Ando conditions: submodularity over every partition (A1),
/// then the single-element exchange inequality (A2).
pub fn check_ando<T, O>(oracle: &mut O) -> Result<Option<Violation<T>>>
where
    T: Scalar,
    O: FunctionOracle<T> + ?Sized,
{
    let ground = oracle.ground();
    let n = ground.len();
    guard("check_ando", n, CHECK_MAX_N)?;
    let table = TableOracle::tabulate(oracle)?;
    let full = ground.full_mask();
    let restricted = |s: u64, x: u64| {
        let b = Biset::from_masks(ground, x & s, x & !s).expect("partition pieces are disjoint");
        table.get(&b)
    };

    for s in 0..=full {
        let values: Vec<T> = (0..=full).map(|x| restricted(s, x)).collect();
        for x in 0..=full {
            for y in 0..x {
                let lhs = values[x as usize] + values[y as usize];
                let rhs = values[(x | y) as usize] + values[(x & y) as usize];
                if violated(lhs, rhs) {
                    return Ok(Some(Violation {
                        kind: ViolationKind::A1,
                        witness: Witness::Partition { s_mask: s, x_mask: x, y_mask: y },
                        lhs,
                        rhs,
                    }));
                }
            }
        }
    }

    for base in ground.bisets() {
        let fb = table.get(&base);
        for i in (0..n).filter(|&i| !base.contains(i)) {
            let lhs = table.get(&base.with_s1(i)) + table.get(&base.with_s2(i));
            let rhs = fb + fb;
            if violated(lhs, rhs) {
                return Ok(Some(Violation {
                    kind: ViolationKind::A2,
                    witness: Witness::Exchange { base, element: i },
                    lhs,
                    rhs,
                }));
            }
        }
    }
    Ok(None)
}

/// Exact minimizer over the bisets accepted by `feasible`; ties go to the
/// smallest canonical key.
pub fn brute_force_min<T, O, P>(oracle: &mut O, mut feasible: P) -> Result<(Biset, T)>
where
    T: Scalar,
    O: FunctionOracle<T> + ?Sized,
    P: FnMut(&Biset) -> bool,
{
    let ground = oracle.ground();
    guard("brute_force_min", ground.len(), BRUTE_MIN_MAX_N)?;
    let mut best: Option<(Biset, T)> = None;
    for b in ground.bisets().filter(|b| feasible(b)) {
        let v = oracle.evaluate(&b)?;
        if best.as_ref().is_none_or(|&(_, bv)| v < bv) {
            best = Some((b, v));
        }
    }
    best.ok_or(Error::NoFeasibleBiset)
}

/// All signed-greedy vertices over every order/sign pair, deduplicated.
pub fn enumerate_vertices<T, O>(oracle: &mut O) -> Result<Vec<PolyVertex<T>>>
where
    T: Scalar,
    O: FunctionOracle<T> + ?Sized,
{
    let ground = oracle.ground();
    let n = ground.len();
    guard("enumerate_vertices", n, ENUMERATE_MAX_N)?;
    let mut table = TableOracle::tabulate(oracle)?;
    let mut out: Vec<PolyVertex<T>> = Vec::new();
    for os in all_order_sign_pairs(ground) {
        let v = signed_greedy(&mut table, &os)?;
        let duplicate = out
            .iter()
            .any(|u| u.pi.iter().zip(&v.pi).all(|(&a, &b)| (a - b).abs() <= T::tol_feas()));
        if !duplicate {
            out.push(v);
        }
    }
    Ok(out)
}

/// Every order/sign pair of a ground set, in a fixed enumeration order.
pub fn all_order_sign_pairs(ground: GroundSet) -> impl Iterator<Item = OrderSignPair> {
    let n = ground.len();
    (0..n).permutations(n).flat_map(move |order| {
        (0u32..1 << n).map(move |bits| {
            let signs = (0..n).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect();
            OrderSignPair::new(order.clone(), signs).expect("valid by construction")
        })
    })
}
