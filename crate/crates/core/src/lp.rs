//! Bounded-variable simplex on a condensed tableau.
//!
//! Each row `a·x {<=,>=,=} b` gets a logical variable `r = a·x` bounded by
//! `(-∞, b]`, `[b, ∞)` or `[b, b]`. The tableau stores basic variables as
//! linear combinations of the nonbasic ones only, so its width is the number
//! of structural variables regardless of the row count. Phase 1 minimizes the
//! sum of bound infeasibilities of the basic variables, starting from the
//! all-logical basis. Pricing is Dantzig's rule until the degenerate-pivot
//! budget is spent, then Bland's rule for the remainder of the solve.
//!
//! [`LpSolver`] keeps the final tableau so a solved model can be re-optimized
//! after bound changes with the dual simplex, starting from the old basis.

use crate::error::{Error, Result};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<T> {
    pub coeffs: Vec<(usize, T)>,
    pub sense: Sense,
    pub rhs: T,
}

/// `min cᵀx` subject to linear rows and per-variable bounds.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LpModel<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
    pub cost: Vec<T>,
    pub constraints: Vec<Constraint<T>>,
}

impl<T: Scalar> LpModel<T> {
    pub fn new() -> Self {
        Self { lower: Vec::new(), upper: Vec::new(), cost: Vec::new(), constraints: Vec::new() }
    }

    pub fn add_var(&mut self, lower: T, upper: T, cost: T) -> usize {
        self.lower.push(lower);
        self.upper.push(upper);
        self.cost.push(cost);
        self.lower.len() - 1
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, T)>, sense: Sense, rhs: T) {
        self.constraints.push(Constraint { coeffs, sense, rhs });
    }

    pub fn num_vars(&self) -> usize {
        self.lower.len()
    }

    pub fn set_bounds(&mut self, var: usize, lower: T, upper: T) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub x: Vec<T>,
    pub objective: T,
    pub iterations: usize,
}

const MAX_ITERATIONS: usize = 100_000;

/// `value[basic[r]] = Σ_c coef[r·width + c] · value[nonbasic[c]]`.
#[derive(Debug, Clone)]
struct Tableau<T> {
    coef: Vec<T>,
    width: usize,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    lower: Vec<T>,
    upper: Vec<T>,
    value: Vec<T>,
    iterations: usize,
    degenerate: usize,
    degenerate_budget: usize,
}

enum Step {
    Optimal,
    Moved,
}

enum DualStep {
    Feasible,
    Moved,
}

impl<T: Scalar> Tableau<T> {
    fn height(&self) -> usize {
        self.basic.len()
    }

    fn row(&self, r: usize) -> &[T] {
        &self.coef[r * self.width..(r + 1) * self.width]
    }

    fn refresh_basics(&mut self) {
        let active: Vec<(usize, T)> = self
            .nonbasic
            .iter()
            .enumerate()
            .filter(|&(_, &v)| self.value[v] != T::zero())
            .map(|(c, &v)| (c, self.value[v]))
            .collect();
        for r in 0..self.height() {
            let row = self.row(r);
            let v = active.iter().fold(T::zero(), |acc, &(c, x)| acc + row[c] * x);
            self.value[self.basic[r]] = v;
        }
    }

    fn reduced_costs(&self, cost: &[T]) -> Vec<T> {
        let mut d: Vec<T> = self.nonbasic.iter().map(|&v| cost[v]).collect();
        for r in 0..self.height() {
            let cb = cost[self.basic[r]];
            if cb == T::zero() {
                continue;
            }
            for (dj, &a) in d.iter_mut().zip(self.row(r)) {
                *dj = *dj + cb * a;
            }
        }
        d
    }

    /// Swaps `basic[r]` and `nonbasic[c]`.
    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.coef[r * w + c];
        let mut pivot_row: Vec<T> = self.row(r).iter().map(|&a| -a / p).collect();
        pivot_row[c] = T::one() / p;
        for i in 0..self.height() {
            if i == r {
                continue;
            }
            let row = &mut self.coef[i * w..(i + 1) * w];
            let f = row[c];
            if f == T::zero() {
                continue;
            }
            row[c] = T::zero();
            for (a, &pr) in row.iter_mut().zip(&pivot_row) {
                *a = *a + f * pr;
            }
        }
        self.coef[r * w..(r + 1) * w].copy_from_slice(&pivot_row);
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[c]);
    }

    fn bound_violation(&self, v: usize) -> Option<(T, bool)> {
        let x = self.value[v];
        let slack = |bound: T| T::tol_feas() * (T::one() + bound.abs());
        if x < self.lower[v] - slack(self.lower[v]) {
            Some((self.lower[v] - x, true))
        } else if x > self.upper[v] + slack(self.upper[v]) {
            Some((x - self.upper[v], false))
        } else {
            None
        }
    }

    /// Phase 1 costs: the gradient of the total bound infeasibility.
    fn infeasibility_cost(&self) -> Option<Vec<T>> {
        let mut cost = vec![T::zero(); self.value.len()];
        let mut any = false;
        for &b in &self.basic {
            if let Some((_, below)) = self.bound_violation(b) {
                cost[b] = if below { -T::one() } else { T::one() };
                any = true;
            }
        }
        any.then_some(cost)
    }

    /// One primal pivot. Infeasible basic variables stop the step when they
    /// reach their violated bound, so phase 1 never overshoots a breakpoint.
    fn step(&mut self, cost: &[T]) -> Result<Step> {
        let tol = T::tol_lp();
        let reduced = self.reduced_costs(cost);
        let bland = self.degenerate > self.degenerate_budget;

        let mut entering: Option<(usize, T, T)> = None;
        for (c, &v) in self.nonbasic.iter().enumerate() {
            if self.upper[v] - self.lower[v] <= tol {
                continue;
            }
            let d = reduced[c];
            let dir = if d < -tol && self.value[v] < self.upper[v] - tol {
                T::one()
            } else if d > tol && self.value[v] > self.lower[v] + tol {
                -T::one()
            } else {
                continue;
            };
            if bland {
                if entering.is_none_or(|(bc, _, _)| v < self.nonbasic[bc]) {
                    entering = Some((c, d, dir));
                }
            } else if entering.is_none_or(|(_, best, _)| d.abs() > best.abs()) {
                entering = Some((c, d, dir));
            }
        }
        let Some((c, _, dir)) = entering else {
            return Ok(Step::Optimal);
        };
        let e = self.nonbasic[c];

        let mut theta = self.upper[e] - self.lower[e];
        let mut leave: Option<(usize, T, T)> = None;
        for r in 0..self.height() {
            let alpha = self.coef[r * self.width + c] * dir;
            if alpha.abs() <= tol {
                continue;
            }
            let b = self.basic[r];
            let (x, lo, hi) = (self.value[b], self.lower[b], self.upper[b]);
            let violation = self.bound_violation(b);
            let (limit, target) = match (violation, alpha > T::zero()) {
                (Some((_, true)), true) => ((lo - x) / alpha, lo),
                (Some((_, false)), false) => ((x - hi) / -alpha, hi),
                (Some(_), _) => continue,
                (None, true) if hi.is_finite() => ((hi - x) / alpha, hi),
                (None, false) if lo.is_finite() => ((x - lo) / -alpha, lo),
                (None, _) => continue,
            };
            let limit = limit.max(T::zero());
            // ties within tolerance: smallest index under Bland, else largest pivot
            let take = match leave {
                None => limit < theta,
                Some((lr, lalpha, _)) => {
                    limit < theta - tol
                        || (limit <= theta + tol
                            && if bland { b < self.basic[lr] } else { alpha.abs() > lalpha.abs() })
                }
            };
            if take {
                theta = limit;
                leave = Some((r, alpha, target));
            }
        }
        if !theta.is_finite() {
            return Err(Error::Internal("unbounded LP relaxation".into()));
        }

        if theta <= tol {
            self.degenerate += 1;
        }
        self.iterations += 1;
        match leave {
            None => {
                self.value[e] = if dir > T::zero() { self.upper[e] } else { self.lower[e] };
            }
            Some((r, _, target)) => {
                let b = self.basic[r];
                self.value[e] = self.value[e] + dir * theta;
                self.value[b] = target;
                self.pivot(r, c);
            }
        }
        self.refresh_basics();
        Ok(Step::Moved)
    }

    fn run(&mut self, cost: &[T]) -> Result<()> {
        loop {
            if self.iterations >= MAX_ITERATIONS {
                return Err(Error::Internal("simplex iteration limit reached".into()));
            }
            if let Step::Optimal = self.step(cost)? {
                return Ok(());
            }
        }
    }

    /// Phase 1; `false` if the bound infeasibility cannot be removed.
    fn run_phase1(&mut self) -> Result<bool> {
        loop {
            if self.iterations >= MAX_ITERATIONS {
                return Err(Error::Internal("simplex iteration limit reached".into()));
            }
            let Some(cost) = self.infeasibility_cost() else {
                return Ok(true);
            };
            if let Step::Optimal = self.step(&cost)? {
                return Ok(false);
            }
        }
    }

    /// One dual simplex pivot: the most infeasible basic variable leaves at
    /// its violated bound. `None` means no entering column exists.
    fn dual_step(&mut self, cost: &[T]) -> Option<DualStep> {
        let tol = T::tol_lp();
        let mut leave: Option<(usize, bool, T)> = None;
        for (r, &b) in self.basic.iter().enumerate() {
            if let Some((viol, below)) = self.bound_violation(b) {
                if leave.is_none_or(|(_, _, w)| viol > w) {
                    leave = Some((r, below, viol));
                }
            }
        }
        let Some((r, below, _)) = leave else {
            return Some(DualStep::Feasible);
        };
        let reduced = self.reduced_costs(cost);
        let row = self.row(r);

        let mut entering: Option<(usize, T, T)> = None;
        for (c, &v) in self.nonbasic.iter().enumerate() {
            let a = row[c];
            if self.upper[v] - self.lower[v] <= tol || a.abs() <= tol {
                continue;
            }
            // the basic variable moves by a per unit of x_v
            let increase = below == (a > T::zero());
            let movable = if increase { self.value[v] < self.upper[v] - tol } else { self.value[v] > self.lower[v] + tol };
            if !movable {
                continue;
            }
            let d = if increase { reduced[c] } else { -reduced[c] };
            let ratio = d.max(T::zero()) / a.abs();
            let take = entering.is_none_or(|(_, best, best_a)| {
                ratio < best - tol || (ratio <= best + tol && a.abs() > best_a)
            });
            if take {
                entering = Some((c, ratio, a.abs()));
            }
        }
        let (c, _, _) = entering?;

        let b = self.basic[r];
        let e = self.nonbasic[c];
        let target = if below { self.lower[b] } else { self.upper[b] };
        let dx = (target - self.value[b]) / self.row(r)[c];
        self.value[e] = self.value[e] + dx;
        self.value[b] = target;
        self.pivot(r, c);
        self.refresh_basics();
        self.iterations += 1;
        Some(DualStep::Moved)
    }
}

/// Simplex state over a fixed set of rows; bounds may change between solves.
#[derive(Debug, Clone)]
pub struct LpSolver<T> {
    tab: Tableau<T>,
    num_vars: usize,
    cost: Vec<T>,
    /// Whether the tableau holds an optimal basis for the current bounds.
    optimal: bool,
}

impl<T: Scalar> LpSolver<T> {
    pub fn new(model: &LpModel<T>) -> Result<Self> {
        let nv = model.num_vars();
        let m = model.constraints.len();
        for j in 0..nv {
            let (lo, hi) = (model.lower[j], model.upper[j]);
            if lo.is_nan() || hi.is_nan() || (!lo.is_finite() && !hi.is_finite()) {
                return Err(Error::InvalidParams(format!("variable {j} needs at least one finite bound")));
            }
        }

        let inf = T::infinity();
        let mut lower = model.lower.clone();
        let mut upper = model.upper.clone();
        let mut value: Vec<T> =
            (0..nv).map(|j| if model.lower[j].is_finite() { model.lower[j] } else { model.upper[j] }).collect();
        let mut coef = vec![T::zero(); m * nv];
        for (r, c) in model.constraints.iter().enumerate() {
            for &(j, a) in &c.coeffs {
                coef[r * nv + j] = coef[r * nv + j] + a;
            }
            let (lo, hi) = match c.sense {
                Sense::Le => (-inf, c.rhs),
                Sense::Ge => (c.rhs, inf),
                Sense::Eq => (c.rhs, c.rhs),
            };
            lower.push(lo);
            upper.push(hi);
            value.push(T::zero());
        }

        let mut tab = Tableau {
            coef,
            width: nv,
            basic: (nv..nv + m).collect(),
            nonbasic: (0..nv).collect(),
            lower,
            upper,
            value,
            iterations: 0,
            degenerate: 0,
            degenerate_budget: 5 * (nv + m).max(1),
        };
        tab.refresh_basics();
        let mut cost = model.cost.clone();
        cost.resize(nv + m, T::zero());
        Ok(Self { tab, num_vars: nv, cost, optimal: false })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn rows(&self) -> usize {
        self.tab.height()
    }

    /// Width of the condensed tableau (the number of nonbasic columns).
    pub fn cols(&self) -> usize {
        self.tab.width
    }

    /// Changes the bounds of structural variable `var`. A nonbasic variable
    /// is moved onto the new range; the basis is kept.
    pub fn set_bounds(&mut self, var: usize, lower: T, upper: T) {
        assert!(var < self.num_vars, "variable {var} out of range");
        let t = &mut self.tab;
        t.lower[var] = lower;
        t.upper[var] = upper;
        if !t.basic.contains(&var) {
            t.value[var] = t.value[var].max(lower).min(upper);
        }
    }

    fn bounds_conflict(&self) -> bool {
        (0..self.num_vars).any(|j| self.tab.lower[j] > self.tab.upper[j])
    }

    fn infeasible(&self) -> LpSolution<T> {
        LpSolution { status: LpStatus::Infeasible, x: Vec::new(), objective: T::nan(), iterations: self.tab.iterations }
    }

    fn solution(&self) -> LpSolution<T> {
        let t = &self.tab;
        let x: Vec<T> = (0..self.num_vars).map(|j| t.value[j].max(t.lower[j]).min(t.upper[j])).collect();
        let objective = self.cost.iter().zip(&x).map(|(&c, &v)| c * v).sum();
        LpSolution { status: LpStatus::Optimal, x, objective, iterations: t.iterations }
    }

    /// Two-phase primal simplex from the current basis.
    pub fn solve(&mut self) -> Result<LpSolution<T>> {
        self.optimal = false;
        if self.bounds_conflict() {
            return Ok(self.infeasible());
        }
        self.tab.refresh_basics();
        if !self.tab.run_phase1()? {
            return Ok(self.infeasible());
        }
        self.tab.degenerate = 0;
        self.tab.run(&self.cost)?;
        self.optimal = true;
        Ok(self.solution())
    }

    /// Re-optimizes after [`LpSolver::set_bounds`], starting from the last
    /// optimal basis. Falls back to [`LpSolver::solve`] if there is none.
    pub fn resolve(&mut self) -> Result<LpSolution<T>> {
        if !self.optimal {
            return self.solve();
        }
        if self.bounds_conflict() {
            self.optimal = false;
            return Ok(self.infeasible());
        }
        self.tab.refresh_basics();
        let budget = self.tab.iterations + 50 * (self.tab.height() + self.tab.width);
        loop {
            if self.tab.iterations >= budget {
                return Err(Error::Internal("dual simplex iteration limit reached".into()));
            }
            match self.tab.dual_step(&self.cost) {
                Some(DualStep::Feasible) => break,
                Some(DualStep::Moved) => {}
                None => {
                    self.optimal = false;
                    return Ok(self.infeasible());
                }
            }
        }
        self.tab.degenerate = 0;
        self.tab.run(&self.cost)?;
        Ok(self.solution())
    }
}

/// Solves `model` to an optimal basic solution or reports infeasibility.
pub fn lp_solve<T: Scalar>(model: &LpModel<T>) -> Result<LpSolution<T>> {
    LpSolver::new(model)?.solve()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn lower_bound_via_row() {
        // min z s.t. z >= 3
        let mut m = LpModel::<f64>::new();
        let z = m.add_var(-100.0, 100.0, 1.0);
        m.add_constraint(vec![(z, 1.0)], Sense::Ge, 3.0);
        let s = lp_solve(&m).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(close(s.objective, 3.0));
    }

    #[test]
    fn bounded_with_row() {
        // min -y, y in [0,1], y <= 0.5
        let mut m = LpModel::<f64>::new();
        let y = m.add_var(0.0, 1.0, -1.0);
        m.add_constraint(vec![(y, 1.0)], Sense::Le, 0.5);
        let s = lp_solve(&m).unwrap();
        assert!(close(s.objective, -0.5));
        assert!(close(s.x[0], 0.5));
    }

    #[test]
    fn bound_flip_only() {
        let mut m = LpModel::<f64>::new();
        m.add_var(0.0, 1.0, -2.0);
        m.add_var(-1.0, 4.0, 1.0);
        let s = lp_solve(&m).unwrap();
        assert!(close(s.objective, -3.0));
        assert_eq!(s.x, vec![1.0, -1.0]);
    }

    #[test]
    fn detects_infeasibility() {
        let mut m = LpModel::<f64>::new();
        let a = m.add_var(0.0, 1.0, 0.0);
        let b = m.add_var(0.0, 1.0, 0.0);
        m.add_constraint(vec![(a, 1.0), (b, 1.0)], Sense::Ge, 3.0);
        assert_eq!(lp_solve(&m).unwrap().status, LpStatus::Infeasible);
        let mut m = LpModel::<f64>::new();
        m.add_var(1.0, 0.0, 0.0);
        assert_eq!(lp_solve(&m).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn equality_and_mixed_rows() {
        // min x + 2y s.t. x + y = 4, x - y <= 1, x,y in [0,10] -> x=2.5,y=1.5 obj 5.5
        let mut m = LpModel::<f64>::new();
        let x = m.add_var(0.0, 10.0, 1.0);
        let y = m.add_var(0.0, 10.0, 2.0);
        m.add_constraint(vec![(x, 1.0), (y, 1.0)], Sense::Eq, 4.0);
        m.add_constraint(vec![(x, 1.0), (y, -1.0)], Sense::Le, 1.0);
        let s = lp_solve(&m).unwrap();
        assert!(close(s.objective, 5.5), "{s:?}");
        assert!(close(s.x[0], 2.5) && close(s.x[1], 1.5));
    }

    #[test]
    fn unbounded_is_internal_error() {
        let mut m = LpModel::<f64>::new();
        m.add_var(0.0, f64::INFINITY, -1.0);
        assert!(matches!(lp_solve(&m), Err(Error::Internal(_))));
    }

    #[test]
    fn classic_degenerate_problem() {
        // Beale's cycling example (as a minimization), bounded above for the box
        let mut m = LpModel::<f64>::new();
        let x: Vec<usize> = [-0.75, 150.0, -0.02, 6.0].iter().map(|&c| m.add_var(0.0, 1e6, c)).collect();
        m.add_constraint(vec![(x[0], 0.25), (x[1], -60.0), (x[2], -0.04), (x[3], 9.0)], Sense::Le, 0.0);
        m.add_constraint(vec![(x[0], 0.5), (x[1], -90.0), (x[2], -0.02), (x[3], 3.0)], Sense::Le, 0.0);
        m.add_constraint(vec![(x[2], 1.0)], Sense::Le, 1.0);
        let s = lp_solve(&m).unwrap();
        assert!(close(s.objective, -0.05), "{s:?}");
    }

    #[test]
    fn warm_resolve_matches_cold_solve() {
        // min -x - y - 0.5w s.t. x + y + w <= 2.5, x - y <= 0.5, all in [0, 1]
        let mut m = LpModel::<f64>::new();
        let v: Vec<usize> = [-1.0, -1.0, -0.5].iter().map(|&c| m.add_var(0.0, 1.0, c)).collect();
        m.add_constraint(vec![(v[0], 1.0), (v[1], 1.0), (v[2], 1.0)], Sense::Le, 2.5);
        m.add_constraint(vec![(v[0], 1.0), (v[1], -1.0)], Sense::Le, 0.5);
        let mut solver = LpSolver::new(&m).unwrap();
        assert!(close(solver.solve().unwrap().objective, -2.25));
        for (var, lo, hi) in [(2, 1.0, 1.0), (0, 0.0, 0.0), (1, 1.0, 1.0)] {
            solver.set_bounds(var, lo, hi);
            m.set_bounds(var, lo, hi);
            let warm = solver.resolve().unwrap();
            let cold = lp_solve(&m).unwrap();
            assert_eq!(warm.status, cold.status);
            assert!(close(warm.objective, cold.objective), "{warm:?} vs {cold:?}");
        }
    }

    #[test]
    fn warm_resolve_detects_infeasibility() {
        let mut m = LpModel::<f64>::new();
        let a = m.add_var(0.0, 1.0, 1.0);
        let b = m.add_var(0.0, 1.0, 1.0);
        m.add_constraint(vec![(a, 1.0), (b, 1.0)], Sense::Ge, 1.0);
        let mut solver = LpSolver::new(&m).unwrap();
        assert!(close(solver.solve().unwrap().objective, 1.0));
        solver.set_bounds(a, 0.0, 0.0);
        assert!(close(solver.resolve().unwrap().objective, 1.0));
        solver.set_bounds(b, 0.0, 0.0);
        assert_eq!(solver.resolve().unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn works_in_f32() {
        let mut m = LpModel::<f32>::new();
        let x = m.add_var(0.0, 3.0, -1.0);
        let y = m.add_var(0.0, 3.0, -1.0);
        m.add_constraint(vec![(x, 1.0), (y, 2.0)], Sense::Le, 4.0);
        let s = lp_solve(&m).unwrap();
        assert!((s.objective + 3.5).abs() < 1e-5);
    }
}
