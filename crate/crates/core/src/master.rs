//! Master problem of the cutting-plane loop.
//!
//! ```text
//! min z
//! s.t. z - Σ π_i y1_i + Σ π_i y2_i >= 0     for every cut π
//!      y1_i + y2_i <= 1
//!      Σ y1 >= b1p,  Σ y2 >= b2p
//!      y1_i = y2_i = 0                     for i outside the outer plan
//!      Σ_{i∈S1} y2_i + Σ_{i∈S2} y1_i <= w_cap
//!      y binary, z ∈ [-z_bound, z_bound]
//! ```
//!
//! The ternary vector is recovered as `x = y1 - y2`. Variables are laid out
//! as `y1_0..y1_{n-1}, y2_0..y2_{n-1}, z`.

use crate::biset::{mask_elements, Biset, GroundSet, TernaryVector};
use crate::error::{Error, Result};
use crate::lp::{lp_solve, LpModel, LpSolution, LpSolver, LpStatus, Sense};
use crate::oracle::FunctionOracle;
use crate::polyhedron::Cut;
use crate::Scalar;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, PartialEq)]
pub struct MasterInstance<T> {
    pub ground: GroundSet,
    /// The outer plan `(S1, S2)`.
    pub outer: Biset,
    pub b1p: usize,
    pub b2p: usize,
    pub w_cap: usize,
    pub cuts: Vec<Cut<T>>,
    pub z_bound: T,
}

impl<T: Scalar> MasterInstance<T> {
    pub fn new(outer: Biset, b1p: usize, b2p: usize, w_cap: usize, z_bound: T) -> Result<Self> {
        if z_bound.is_nan() || z_bound <= T::zero() || !z_bound.is_finite() {
            return Err(Error::InvalidParams(format!("z bound must be positive and finite, got {z_bound}")));
        }
        Ok(Self { ground: outer.ground(), outer, b1p, b2p, w_cap, cuts: Vec::new(), z_bound })
    }

    /// No side constraints: every element available, no cardinality floor, unlimited swaps.
    pub fn unconstrained(ground: GroundSet, z_bound: T) -> Result<Self> {
        let outer = Biset::from_masks(ground, ground.full_mask(), 0)?;
        Self::new(outer, 0, 0, ground.len(), z_bound)
    }

    pub fn add_cut(&mut self, cut: Cut<T>) -> Result<()> {
        if cut.pi.len() != self.ground.len() {
            return Err(Error::DimensionMismatch { expected: self.ground.len(), found: cut.pi.len() });
        }
        self.cuts.push(cut);
        Ok(())
    }

    /// Whether `b` satisfies the side constraints as a working-sensor biset.
    pub fn is_feasible(&self, b: &Biset) -> bool {
        let outer = self.outer.s1_mask() | self.outer.s2_mask();
        let used = b.s1_mask() | b.s2_mask();
        used & !outer == 0
            && b.s1_mask().count_ones() as usize >= self.b1p
            && b.s2_mask().count_ones() as usize >= self.b2p
            && ((b.s2_mask() & self.outer.s1_mask()).count_ones() + (b.s1_mask() & self.outer.s2_mask()).count_ones())
                as usize
                <= self.w_cap
    }

    pub fn y1(&self, i: usize) -> usize {
        i
    }

    pub fn y2(&self, i: usize) -> usize {
        self.ground.len() + i
    }

    pub fn z(&self) -> usize {
        2 * self.ground.len()
    }
}

/// `1 + 2n · max_i max(|f({i}, ∅)|, |f(∅, {i})|)`.
pub fn z_bound_for<T, O>(oracle: &mut O) -> Result<T>
where
    T: Scalar,
    O: FunctionOracle<T> + ?Sized,
{
    let ground = oracle.ground();
    let n = ground.len();
    let mut m = T::zero();
    for i in 0..n {
        let e = ground.empty_biset();
        m = m.max(oracle.evaluate(&e.with_s1(i))?.abs());
        m = m.max(oracle.evaluate(&e.with_s2(i))?.abs());
    }
    Ok(T::one() + T::lit(2.0 * n as f64) * m)
}

/// Continuous relaxation of the master problem.
pub fn build_master<T: Scalar>(inst: &MasterInstance<T>) -> LpModel<T> {
    let n = inst.ground.len();
    let outer = inst.outer.s1_mask() | inst.outer.s2_mask();
    let mut lp = LpModel::new();
    for side in 0..2 {
        for i in 0..n {
            let ub = if outer >> i & 1 == 1 { T::one() } else { T::zero() };
            let v = lp.add_var(T::zero(), ub, T::zero());
            debug_assert_eq!(v, side * n + i);
        }
    }
    let z = lp.add_var(-inst.z_bound, inst.z_bound, T::one());

    for cut in &inst.cuts {
        let mut row = Vec::with_capacity(2 * n + 1);
        row.push((z, T::one()));
        for (i, &p) in cut.pi.iter().enumerate() {
            if p != T::zero() {
                row.push((inst.y1(i), -p));
                row.push((inst.y2(i), p));
            }
        }
        lp.add_constraint(row, Sense::Ge, T::zero());
    }
    for i in 0..n {
        lp.add_constraint(vec![(inst.y1(i), T::one()), (inst.y2(i), T::one())], Sense::Le, T::one());
    }
    lp.add_constraint((0..n).map(|i| (inst.y1(i), T::one())).collect(), Sense::Ge, T::lit(inst.b1p as f64));
    lp.add_constraint((0..n).map(|i| (inst.y2(i), T::one())).collect(), Sense::Ge, T::lit(inst.b2p as f64));
    let swap = mask_elements(inst.outer.s1_mask())
        .map(|i| (inst.y2(i), T::one()))
        .chain(mask_elements(inst.outer.s2_mask()).map(|i| (inst.y1(i), T::one())))
        .collect();
    lp.add_constraint(swap, Sense::Le, T::lit(inst.w_cap as f64));
    lp
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MasterPoint<T> {
    pub x: TernaryVector,
    pub y1: Vec<bool>,
    pub y2: Vec<bool>,
    pub z: T,
}

impl<T> MasterPoint<T> {
    pub fn biset(&self) -> Biset {
        self.x.to_biset()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution<T> {
    pub status: MilpStatus,
    pub point: Option<MasterPoint<T>>,
    /// LP relaxations solved, root included.
    pub nodes: u64,
}

/// Branching decisions as masks over the `2n` binary columns.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Fixes {
    zero: u128,
    one: u128,
}

impl Fixes {
    fn with(self, var: usize, up: bool) -> Self {
        let bit = 1u128 << var;
        if up {
            Self { one: self.one | bit, ..self }
        } else {
            Self { zero: self.zero | bit, ..self }
        }
    }

    fn apply<T: Scalar>(self, lower: &mut [T], upper: &mut [T]) {
        for v in mask_elements_u128(self.zero) {
            upper[v] = T::zero();
        }
        for v in mask_elements_u128(self.one) {
            lower[v] = T::one();
        }
    }
}

fn mask_elements_u128(mask: u128) -> impl Iterator<Item = usize> {
    (0..128).filter(move |&v| mask >> v & 1 == 1)
}

#[derive(Debug, Clone)]
struct Node<T> {
    bound: T,
    id: u64,
    fixes: Fixes,
    /// LP optimum under the current pool; `None` for a leaf carried over
    /// from an earlier, smaller pool whose bound may be stale.
    x: Option<Vec<T>>,
    /// Solved tableau, kept for warm-starting the children.
    warm: Option<LpSolver<T>>,
}

/// Tableau entries the open nodes may hold before children fall back to
/// cold solves.
const WARM_BUDGET: usize = 1 << 24;

impl<T: Scalar> PartialEq for Node<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Node<T> {}

impl<T: Scalar> PartialOrd for Node<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Node<T> {
    // max-heap: smallest bound first, then oldest node
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .partial_cmp(&self.bound)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Most fractional `y`; ties go to the lower element index, `y1` before `y2`.
fn branching_var<T: Scalar>(x: &[T], n: usize) -> Option<usize> {
    let half = T::lit(0.5);
    let mut best: Option<(usize, T)> = None;
    for i in 0..n {
        for v in [i, n + i] {
            let frac = x[v] - x[v].floor();
            if frac <= T::tol_int() || frac >= T::one() - T::tol_int() {
                continue;
            }
            let dist = (frac - half).abs();
            if best.is_none_or(|(_, d)| dist < d) {
                best = Some((v, dist));
            }
        }
    }
    best.map(|(v, _)| v)
}

fn integral_point<T: Scalar>(inst: &MasterInstance<T>, x: &[T]) -> MasterPoint<T> {
    let n = inst.ground.len();
    let half = T::lit(0.5);
    let entries: Vec<i64> =
        (0..n).map(|i| i64::from(x[inst.y1(i)] > half) - i64::from(x[inst.y2(i)] > half)).collect();
    point_at(inst, TernaryVector::new(&entries).expect("y1 - y2 is ternary"))
}

/// Master point at `x` with `z` at its smallest value allowed by the cuts.
fn point_at<T: Scalar>(inst: &MasterInstance<T>, x: TernaryVector) -> MasterPoint<T> {
    let y1 = x.entries().iter().map(|&e| e == 1).collect();
    let y2 = x.entries().iter().map(|&e| e == -1).collect();
    let xr = x.to_real::<T>();
    let z = inst
        .cuts
        .iter()
        .map(|c| c.value_at(&xr))
        .fold(-inst.z_bound, |acc, v| acc.max(v));
    MasterPoint { x, y1, y2, z }
}

fn tableau_size<T: Scalar>(solver: &LpSolver<T>) -> usize {
    solver.rows() * solver.cols()
}

/// Branch-and-bound state carried between master solves.
///
/// When the next instance differs from the last one only by appended cuts,
/// the leaves of the previous tree still partition the feasible set and
/// their old LP bounds remain valid lower bounds. The search restarts from
/// those leaves, re-solving each one only when it reaches the front of the
/// queue. Any other change to the instance starts a fresh tree.
#[derive(Debug, Clone)]
pub struct MasterSearch<T> {
    last: Option<MasterInstance<T>>,
    /// Leaves of the last tree, all without LP data.
    leaves: BinaryHeap<Node<T>>,
    next_id: u64,
}

impl<T: Scalar> Default for MasterSearch<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> MasterSearch<T> {
    pub fn new() -> Self {
        Self { last: None, leaves: BinaryHeap::new(), next_id: 0 }
    }

    /// Leaves kept from the last solve.
    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    /// Exact optimum of `inst`, as [`solve_milp_with_hints`].
    pub fn solve(&mut self, inst: &MasterInstance<T>, hints: &[Biset]) -> Result<MilpSolution<T>> {
        let mut inst = inst.clone();
        let mut total_nodes = 0;
        for _ in 0..64 {
            let mut sol = self.branch_and_bound(&inst, hints)?;
            total_nodes += sol.nodes;
            sol.nodes = total_nodes;
            let at_box = sol
                .point
                .as_ref()
                .is_some_and(|p| p.z <= -inst.z_bound + T::tol_int() * inst.z_bound.max(T::one()));
            if inst.cuts.is_empty() || !at_box {
                return Ok(sol);
            }
            inst.z_bound = inst.z_bound + inst.z_bound;
        }
        Err(Error::Internal("z box kept binding after repeated doubling".into()))
    }

    fn extends_last(&self, inst: &MasterInstance<T>) -> bool {
        self.last.as_ref().is_some_and(|last| {
            last.ground == inst.ground
                && last.outer == inst.outer
                && (last.b1p, last.b2p, last.w_cap) == (inst.b1p, inst.b2p, inst.w_cap)
                && last.z_bound == inst.z_bound
                && inst.cuts.starts_with(&last.cuts)
        })
    }

    fn branch_and_bound(&mut self, inst: &MasterInstance<T>, hints: &[Biset]) -> Result<MilpSolution<T>> {
        let n = inst.ground.len();
        let mut heap = if self.extends_last(inst) {
            std::mem::take(&mut self.leaves)
        } else {
            self.next_id = 1;
            BinaryHeap::from(vec![Node { bound: T::neg_infinity(), id: 0, fixes: Fixes::default(), x: None, warm: None }])
        };
        self.last = None;
        self.leaves.clear();

        let mut model = build_master(inst);
        let (root_lower, root_upper) = (model.lower.clone(), model.upper.clone());
        let bounds = |fixes: Fixes| {
            let (mut lower, mut upper) = (root_lower.clone(), root_upper.clone());
            fixes.apply(&mut lower, &mut upper);
            (lower, upper)
        };
        let mut cold = |fixes: Fixes| -> Result<(LpSolution<T>, LpSolver<T>)> {
            let (lower, upper) = bounds(fixes);
            model.lower.copy_from_slice(&lower);
            model.upper.copy_from_slice(&upper);
            let mut solver = LpSolver::new(&model)?;
            Ok((solver.solve()?, solver))
        };

        let mut nodes = 0u64;
        let mut incumbent: Option<MasterPoint<T>> = None;
        for h in hints.iter().filter(|h| h.ground() == inst.ground && inst.is_feasible(h)) {
            let p = point_at(inst, h.to_ternary());
            if incumbent.as_ref().is_none_or(|q| p.z < q.z) {
                incumbent = Some(p);
            }
        }

        let mut next_id = self.next_id;
        let mut kept: Vec<(T, Fixes)> = Vec::new();
        let mut stored = 0usize;
        // root LP of the current pool, the warm start for carried leaves
        let mut root: Option<Option<(LpSolution<T>, LpSolver<T>)>> = None;

        while let Some(node) = heap.pop() {
            if let Some(w) = &node.warm {
                stored -= tableau_size(w);
            }
            let inc = incumbent.as_ref().map_or(T::infinity(), |p| p.z);
            if node.bound >= inc - T::tol_int() {
                kept.push((node.bound, node.fixes));
                break;
            }

            let mut solved: Vec<(Fixes, LpSolution<T>, LpSolver<T>)> = Vec::with_capacity(2);
            match node.x {
                None => {
                    let root = match &mut root {
                        Some(r) => r,
                        None => {
                            nodes += 1;
                            let (sol, solver) = cold(Fixes::default())?;
                            root.insert((sol.status == LpStatus::Optimal).then_some((sol, solver)))
                        }
                    };
                    let Some((root_sol, root)) = root else {
                        // the root LP is infeasible, and so is every leaf
                        heap.clear();
                        break;
                    };
                    if node.fixes == Fixes::default() {
                        solved.push((node.fixes, root_sol.clone(), root.clone()));
                    } else {
                        nodes += 1;
                        let (lower, upper) = bounds(node.fixes);
                        let mut solver = root.clone();
                        for v in 0..2 * n {
                            if lower[v] != root_lower[v] || upper[v] != root_upper[v] {
                                solver.set_bounds(v, lower[v], upper[v]);
                            }
                        }
                        let (sol, solver) = match solver.resolve() {
                            Ok(sol) => (sol, solver),
                            Err(_) => cold(node.fixes)?,
                        };
                        solved.push((node.fixes, sol, solver));
                    }
                }
                Some(x) => {
                    let v = branching_var(&x, n).expect("queued nodes are fractional");
                    for up in [false, true] {
                        nodes += 1;
                        let fixes = node.fixes.with(v, up);
                        let value = if up { T::one() } else { T::zero() };
                        let warm = node.warm.clone().and_then(|mut solver| {
                            solver.set_bounds(v, value, value);
                            solver.resolve().ok().map(|sol| (sol, solver))
                        });
                        let (sol, solver) = match warm {
                            Some(w) => w,
                            None => cold(fixes)?,
                        };
                        solved.push((fixes, sol, solver));
                    }
                }
            }

            for (fixes, sol, solver) in solved {
                if sol.status == LpStatus::Infeasible {
                    continue;
                }
                let inc = incumbent.as_ref().map_or(T::infinity(), |p| p.z);
                if sol.objective >= inc - T::tol_int() {
                    kept.push((sol.objective, fixes));
                    continue;
                }
                if branching_var(&sol.x, n).is_none() {
                    let p = integral_point(inst, &sol.x);
                    if p.z < inc {
                        incumbent = Some(p);
                    }
                    kept.push((sol.objective, fixes));
                    continue;
                }
                let size = tableau_size(&solver);
                let warm = (stored + size <= WARM_BUDGET).then(|| {
                    stored += size;
                    solver
                });
                heap.push(Node { bound: sol.objective, id: next_id, fixes, x: Some(sol.x), warm });
                next_id += 1;
            }
        }
        let mut leaves = heap.into_vec();
        for node in &mut leaves {
            node.x = None;
            node.warm = None;
        }
        for (bound, fixes) in kept {
            leaves.push(Node { bound, id: next_id, fixes, x: None, warm: None });
            next_id += 1;
        }
        self.leaves = BinaryHeap::from(leaves);
        self.next_id = next_id;
        self.last = Some(inst.clone());

        Ok(match incumbent {
            Some(p) => MilpSolution { status: MilpStatus::Optimal, point: Some(p), nodes },
            None => MilpSolution { status: MilpStatus::Infeasible, point: None, nodes },
        })
    }
}

/// Exact optimum over binary `y` by best-first branch-and-bound.
///
/// With a non-empty cut pool, an optimum sitting on the `-z_bound` box means
/// the box was binding; the bound is doubled and the solve repeated.
pub fn solve_milp<T: Scalar>(inst: &MasterInstance<T>) -> Result<MilpSolution<T>> {
    solve_milp_with_hints(inst, &[])
}

/// [`solve_milp`] seeded with known bisets; feasible ones give the starting
/// incumbent. The optimal value is unchanged, but among ties a hint may be
/// returned in place of a point the search would have found.
pub fn solve_milp_with_hints<T: Scalar>(inst: &MasterInstance<T>, hints: &[Biset]) -> Result<MilpSolution<T>> {
    MasterSearch::new().solve(inst, hints)
}

/// LP relaxation value of the master problem.
pub fn lp_relaxation<T: Scalar>(inst: &MasterInstance<T>) -> Result<LpSolution<T>> {
    lp_solve(&build_master(inst))
}
