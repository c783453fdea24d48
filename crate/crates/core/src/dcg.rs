//! Delayed constraint generation: alternate master solves with greedy
//! separation until the relative bound gap closes.

use crate::biset::Biset;
use crate::error::{Error, Result};
use crate::master::{z_bound_for, MasterInstance, MasterSearch, MilpStatus};
use crate::oracle::FunctionOracle;
use crate::polyhedron::{generalized_greedy, separate, Cut};
use crate::Scalar;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeedPolicy {
    /// One cut from the greedy vertex at `xbar = 0`.
    #[default]
    ZeroVertex,
    /// Start from whatever cuts the instance already holds.
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DcgConfig {
    pub epsilon: f64,
    pub max_iters: usize,
    pub seed_policy: SeedPolicy,
}

impl Default for DcgConfig {
    fn default() -> Self {
        Self { epsilon: 1e-6, max_iters: 10_000, seed_policy: SeedPolicy::ZeroVertex }
    }
}

impl DcgConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        Self { epsilon, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidParams(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParams("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcgStatus {
    Converged,
    /// Stopped at `max_iters`; the incumbent is the best point seen.
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveStats {
    pub wall_time: f64,
    /// Cuts added by separation (seed cuts excluded).
    pub cut_count: usize,
    pub node_count: u64,
    pub iterations: usize,
    pub final_lb: f64,
    pub final_ub: f64,
}

/// Bounds after one master solve.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord<T> {
    pub lb: T,
    pub ub: T,
    pub zbar: T,
    pub fx: T,
    pub x: Biset,
    pub cut: Option<Cut<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DcgOutcome<T> {
    pub status: DcgStatus,
    pub incumbent: Biset,
    pub value: T,
    pub stats: SolveStats,
    pub history: Vec<IterationRecord<T>>,
    /// Final cut pool, seeds included.
    pub cuts: Vec<Cut<T>>,
}

/// Relative gap `(ub - lb) / |ub|`.
///
/// `+∞` while `ub` is infinite, `0` when the bounds coincide, and the
/// absolute difference when `ub = 0`.
pub fn gap(lb: f64, ub: f64) -> f64 {
    if ub == f64::INFINITY || lb == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    if ub == lb {
        return 0.0;
    }
    if ub == 0.0 {
        return ub - lb;
    }
    (ub - lb) / ub.abs()
}

/// Solves `min f(S1, S2)` over the bisets feasible for `inst`.
pub fn dcg_solve<T, O>(oracle: &mut O, inst: &MasterInstance<T>, cfg: &DcgConfig) -> Result<DcgOutcome<T>>
where
    T: Scalar,
    O: FunctionOracle<T> + ?Sized,
{
    cfg.validate()?;
    let start = Instant::now();
    let ground = oracle.ground();
    if inst.ground != ground {
        return Err(Error::DimensionMismatch { expected: ground.len(), found: inst.ground.len() });
    }
    let mut master = inst.clone();
    master.z_bound = master.z_bound.max(z_bound_for(oracle)?);
    if cfg.seed_policy == SeedPolicy::ZeroVertex {
        let seed = generalized_greedy(oracle, &vec![T::zero(); ground.len()])?;
        master.add_cut(seed.into())?;
    }

    let mut lb = T::neg_infinity();
    let mut ub = T::infinity();
    let mut incumbent: Option<Biset> = None;
    let mut history = Vec::new();
    let mut cut_count = 0;
    let mut node_count = 0;
    let mut status = DcgStatus::Converged;
    let mut search = MasterSearch::new();

    while gap(lb.as_f64(), ub.as_f64()) > cfg.epsilon {
        if history.len() >= cfg.max_iters {
            status = DcgStatus::IterationLimit;
            break;
        }
        let visited: Vec<Biset> = history.iter().map(|r: &IterationRecord<T>| r.x).collect();
        let sol = search.solve(&master, &visited)?;
        node_count += sol.nodes;
        if sol.status == MilpStatus::Infeasible {
            return Err(Error::Infeasible);
        }
        let point = sol.point.expect("optimal master carries a point");
        let xbar = point.x.to_real::<T>();
        let zbar = point.z;
        lb = lb.max(zbar);
        let b = point.biset();
        let fx = oracle.evaluate(&b)?;

        let mut added = None;
        if zbar < fx - T::tol_violation(zbar) {
            if let Some(cut) = separate(oracle, &xbar, zbar)? {
                master.add_cut(cut.clone())?;
                cut_count += 1;
                added = Some(cut);
            }
        }
        // exact ties go to the smaller canonical key, as in brute force
        let better_tie = fx == ub && incumbent.is_some_and(|c| b.canonical_key() < c.canonical_key());
        if fx < ub || better_tie {
            ub = fx;
            incumbent = Some(b);
        }
        let stalled = added.is_none();
        history.push(IterationRecord { lb, ub, zbar, fx, x: b, cut: added });
        // no new cut leaves the master unchanged: z̄ is within tolerance of f(x̄)
        if stalled {
            break;
        }
    }

    let incumbent = incumbent.ok_or_else(|| Error::Internal("no master solve completed".into()))?;
    let stats = SolveStats {
        wall_time: start.elapsed().as_secs_f64(),
        cut_count,
        node_count,
        iterations: history.len(),
        final_lb: lb.as_f64(),
        final_ub: ub.as_f64(),
    };
    Ok(DcgOutcome { status, incumbent, value: ub, stats, history, cuts: master.cuts })
}
