//! Randomized benchmark instances for the worst-case entropy subproblem and
//! batch reporting.
//!
//! Each replication draws its own ChaCha8 stream (`stream = replication`)
//! from the configured seed, so replication `k` is identical no matter how
//! many replications run.

use crate::biset::{Biset, GroundSet};
use crate::dcg::{dcg_solve, DcgConfig, DcgStatus};
use crate::entropy::{DiscreteReadings, EntropyOracle};
use crate::error::{Error, Result};
use crate::master::MasterInstance;
use crate::oracle::Memoized;
use crate::verify::{brute_force_min, BRUTE_MIN_MAX_N};
use crate::Scalar;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;

pub const TEMP_BINS: u16 = 3;
pub const HUMID_BINS: u16 = 2;
/// Largest `n` the `--verify` cross-check runs brute force on.
pub const VERIFY_MAX_N: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceParams {
    pub b1: usize,
    pub b2: usize,
    pub b1p: usize,
    pub b2p: usize,
    pub w: usize,
}

/// `B1 = ⌊2n/5⌋, B2 = ⌊n/2⌋, B1' = ⌊4B1/5⌋, B2' = ⌊3B2/5⌋, W = ⌊3(B1+B2)/5⌋`.
pub fn derive_params(n: usize) -> Result<InstanceParams> {
    if n < 3 {
        return Err(Error::InvalidParams(format!(
            "n = {n} is too small: the sizing rule needs n >= 3 (B1 = ⌊2n/5⌋ would be {})",
            2 * n / 5
        )));
    }
    let b1 = 2 * n / 5;
    let b2 = n / 2;
    Ok(InstanceParams { b1, b2, b1p: 4 * b1 / 5, b2p: 3 * b2 / 5, w: 3 * (b1 + b2) / 5 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub t: usize,
    pub replications: usize,
    pub rng_seed: u64,
    pub epsilon: f64,
    pub verify: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.t == 0 || self.replications == 0 {
            return Err(Error::InvalidParams("n, t and replications must all be at least 1".into()));
        }
        Ok(())
    }
}

/// Stream for replication `rep` of cell `(n, t)`.
pub fn replication_rng(seed: u64, n: usize, t: usize, rep: usize) -> ChaCha8Rng {
    let cell = seed ^ ((n as u64) << 32) ^ (t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(cell);
    rng.set_stream(rep as u64);
    rng
}

#[derive(Debug, Clone)]
pub struct GeneratedInstance<T> {
    pub oracle: EntropyOracle<T>,
    pub master: MasterInstance<T>,
    pub params: InstanceParams,
    /// Sampled row indices into the source data.
    pub locations: Vec<usize>,
    pub timesteps: Vec<usize>,
}

/// Samples `n` locations and `t` timesteps without replacement and a random
/// outer plan with `|S1| = B1`, `|S2| = B2`.
pub fn generate_instance<T: Scalar>(
    data: &DiscreteReadings,
    n: usize,
    t: usize,
    rng: &mut ChaCha8Rng,
) -> Result<GeneratedInstance<T>> {
    if data.locations() < n {
        return Err(Error::InsufficientData(format!(
            "need {n} locations, data has {}",
            data.locations()
        )));
    }
    if data.timesteps() < t {
        return Err(Error::InsufficientData(format!(
            "need {t} timesteps, data has {}",
            data.timesteps()
        )));
    }
    let params = derive_params(n)?;
    if params.b1 + params.b2 > n {
        return Err(Error::InvalidParams(format!("B1 + B2 = {} exceeds n = {n}", params.b1 + params.b2)));
    }
    let mut locations = sample(rng, data.locations(), n).into_vec();
    locations.sort_unstable();
    let mut timesteps = sample(rng, data.timesteps(), t).into_vec();
    timesteps.sort_unstable();
    let oracle = EntropyOracle::new(data.subsample(&locations, &timesteps))?;

    let ground = GroundSet::new(n)?;
    let plan = sample(rng, n, params.b1 + params.b2).into_vec();
    let outer = Biset::new(ground, plan[..params.b1].iter().copied(), plan[params.b1..].iter().copied())?;
    let master = MasterInstance::new(outer, params.b1p, params.b2p, params.w, T::one())?;
    Ok(GeneratedInstance { oracle, master, params, locations, timesteps })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetailRow {
    pub n: usize,
    pub t: usize,
    pub rep: usize,
    pub value: f64,
    pub incumbent: String,
    pub time_s: f64,
    pub cuts: usize,
    pub nodes: u64,
    pub iters: usize,
    pub converged: bool,
    /// Brute-force value when verification ran.
    pub verified: Option<f64>,
}

impl DetailRow {
    pub fn mismatch(&self) -> bool {
        self.verified.is_some_and(|v| (v - self.value).abs() > 1e-6 * v.abs().max(1.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub n: usize,
    pub t: usize,
    pub solved: usize,
    pub mean_time_s: f64,
    pub mean_cuts: f64,
    pub mean_nodes: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub n: usize,
    pub t: usize,
    pub rep: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub details: Vec<DetailRow>,
    pub aggregates: Vec<AggregateRow>,
    pub failures: Vec<Failure>,
}

impl Report {
    pub fn mismatches(&self) -> impl Iterator<Item = &DetailRow> {
        self.details.iter().filter(|r| r.mismatch())
    }

    pub fn merge(&mut self, other: Report) {
        self.details.extend(other.details);
        self.aggregates.extend(other.aggregates);
        self.failures.extend(other.failures);
    }

    /// `n,t,rep,value,time_s,cuts,nodes,iters`, one line per replication.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,t,rep,value,time_s,cuts,nodes,iters\n");
        for r in &self.details {
            let _ = writeln!(
                out,
                "{},{},{},{:.9},{:.6},{},{},{}",
                r.n, r.t, r.rep, r.value, r.time_s, r.cuts, r.nodes, r.iters
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:>4} {:>5} {:>6} {:>10} {:>10} {:>10}", "n", "t", "solved", "time (s)", "# cuts", "# nodes");
        for a in &self.aggregates {
            let _ = writeln!(
                out,
                "{:>4} {:>5} {:>6} {:>10.3} {:>10.1} {:>10.1}",
                a.n, a.t, a.solved, a.mean_time_s, a.mean_cuts, a.mean_nodes
            );
        }
        if !self.details.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "{:>4} {:>5} {:>4} {:>10} {:>9} {:>6} {:>7} {:>6}  incumbent",
                "n", "t", "rep", "value", "time (s)", "cuts", "nodes", "iters"
            );
            for r in &self.details {
                let _ = write!(
                    out,
                    "{:>4} {:>5} {:>4} {:>10.6} {:>9.4} {:>6} {:>7} {:>6}  {}",
                    r.n, r.t, r.rep, r.value, r.time_s, r.cuts, r.nodes, r.iters, r.incumbent
                );
                if let Some(v) = r.verified {
                    let _ = write!(out, "  brute={v:.6}{}", if r.mismatch() { " MISMATCH" } else { "" });
                }
                let _ = writeln!(out);
            }
        }
        for f in &self.failures {
            let _ = writeln!(out, "failed n={} t={} rep={}: {}", f.n, f.t, f.rep, f.message);
        }
        out
    }
}

fn aggregate(n: usize, t: usize, rows: &[DetailRow]) -> AggregateRow {
    let k = rows.len().max(1) as f64;
    AggregateRow {
        n,
        t,
        solved: rows.len(),
        mean_time_s: rows.iter().map(|r| r.time_s).sum::<f64>() / k,
        mean_cuts: rows.iter().map(|r| r.cuts as f64).sum::<f64>() / k,
        mean_nodes: rows.iter().map(|r| r.nodes as f64).sum::<f64>() / k,
    }
}

fn run_one(data: &DiscreteReadings, cfg: &ExperimentConfig, rep: usize) -> Result<DetailRow> {
    let mut rng = replication_rng(cfg.rng_seed, cfg.n, cfg.t, rep);
    let inst = generate_instance::<f64>(data, cfg.n, cfg.t, &mut rng)?;
    let mut oracle = Memoized::new(inst.oracle);
    let out = dcg_solve(&mut oracle, &inst.master, &DcgConfig::with_epsilon(cfg.epsilon))?;
    let verified = if cfg.verify && cfg.n <= VERIFY_MAX_N.min(BRUTE_MIN_MAX_N) {
        let (_, v) = brute_force_min(&mut oracle, |b| inst.master.is_feasible(b))?;
        Some(v)
    } else {
        None
    };
    Ok(DetailRow {
        n: cfg.n,
        t: cfg.t,
        rep,
        value: out.value,
        incumbent: out.incumbent.display_one_based().to_string(),
        time_s: out.stats.wall_time,
        cuts: out.stats.cut_count,
        nodes: out.stats.node_count,
        iters: out.stats.iterations,
        converged: out.status == DcgStatus::Converged,
        verified,
    })
}

/// Runs every replication of one `(n, t)` cell. Per-replication failures
/// are collected rather than aborting the batch.
pub fn run_experiments(data: &DiscreteReadings, cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let mut report = Report::default();
    for rep in 0..cfg.replications {
        match run_one(data, cfg, rep) {
            Ok(row) => report.details.push(row),
            Err(e) => report.failures.push(Failure { n: cfg.n, t: cfg.t, rep, message: e.to_string() }),
        }
    }
    report.aggregates.push(aggregate(cfg.n, cfg.t, &report.details));
    Ok(report)
}
