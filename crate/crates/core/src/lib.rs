//! Constrained bisubmodular minimization with poly-bimatroid cutting planes.
//!
//! The solver alternates between a master MILP, whose objective is the
//! piecewise-linear under-estimator `z >= πᵀx` built from extreme points of
//! the bisubmodular polyhedron, and an exact greedy separation oracle.
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! `*F64` aliases below cover the common case.

pub mod biset;
pub mod dcg;
pub mod entropy;
pub mod error;
pub mod experiment;
pub mod lp;
pub mod master;
pub mod oracle;
pub mod polyhedron;
pub mod scalar;
pub mod verify;

pub use biset::{biset_to_ternary, ternary_to_biset, Biset, GroundSet, TernaryVector};
pub use dcg::{dcg_solve, gap, DcgConfig, DcgOutcome, DcgStatus, SeedPolicy, SolveStats};
pub use entropy::{discretize, ingest, DiscreteReadings, EntropyOracle, ReadingTable};
pub use error::{Error, Result};
pub use lp::{lp_solve, LpModel, LpSolver, LpSolution, LpStatus, Sense};
pub use master::{build_master, solve_milp, solve_milp_with_hints, MasterInstance, MasterPoint, MasterSearch, MilpSolution, MilpStatus};
pub use oracle::{evaluate, FnOracle, FunctionOracle, Memoized, ModularOracle, TableOracle};
pub use polyhedron::{
    generalized_greedy, membership_bruteforce, separate, signed_greedy, Cut, OrderSignPair, PolyVertex,
};
pub use scalar::Scalar;
pub use verify::{brute_force_min, check_ando, check_direct, enumerate_vertices, Violation, ViolationKind};

pub type CutF64 = Cut<f64>;
pub type CutF32 = Cut<f32>;
pub type PolyVertexF64 = PolyVertex<f64>;
pub type PolyVertexF32 = PolyVertex<f32>;
pub type EntropyOracleF64 = EntropyOracle<f64>;
pub type EntropyOracleF32 = EntropyOracle<f32>;
pub type MasterInstanceF64 = MasterInstance<f64>;
pub type MasterInstanceF32 = MasterInstance<f32>;
pub type LpModelF64 = LpModel<f64>;
pub type DcgOutcomeF64 = DcgOutcome<f64>;
pub type DcgOutcomeF32 = DcgOutcome<f32>;
