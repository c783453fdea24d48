#![allow(dead_code)]

use bisubmod::entropy::{discretize, synthetic_readings, table1, DiscreteReadings};
use bisubmod::polyhedron::signed_greedy;
use bisubmod::verify::all_order_sign_pairs;
use bisubmod::{Biset, EntropyOracle, FunctionOracle, GroundSet, ModularOracle, TableOracle};
use proptest::test_runner::{Config, RngSeed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn proptest_config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(0x5EED), failure_persistence: None, ..Config::default() }
}

pub fn table1_oracle() -> EntropyOracle<f64> {
    EntropyOracle::new(table1()).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform random bins, `k1 = 3`, `k2 = 2`.
pub fn random_readings(n: usize, t: usize, rng: &mut ChaCha8Rng) -> DiscreteReadings {
    DiscreteReadings {
        location_ids: (1..=n as u64).collect(),
        temp_bins: (0..n).map(|_| (0..t).map(|_| rng.gen_range(0..3)).collect()).collect(),
        humid_bins: (0..n).map(|_| (0..t).map(|_| rng.gen_range(0..2)).collect()).collect(),
        k1: 3,
        k2: 2,
    }
}

pub fn random_entropy_oracle(n: usize, t: usize, rng: &mut ChaCha8Rng) -> EntropyOracle<f64> {
    EntropyOracle::new(random_readings(n, t, rng)).unwrap()
}

/// Discretized synthetic lab data (54 locations × 600 steps).
pub fn lab_data(seed: u64) -> DiscreteReadings {
    discretize(&synthetic_readings(54, 600, seed), 3, 2)
}

/// Entropy plus a bisubmodular signed-modular tilt (`a_i + b_i >= 0`), so
/// minima are negative and non-trivial.
pub fn tilted_entropy(n: usize, t: usize, rng: &mut ChaCha8Rng) -> TableOracle<f64> {
    let mut h = random_entropy_oracle(n, t, rng);
    let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let b: Vec<f64> = a.iter().map(|&ai| -ai + rng.gen_range(0.0..0.5)).collect();
    let mut tilt = ModularOracle::new(a, b).unwrap();
    let ground = h.ground();
    let values = ground
        .bisets()
        .map(|s| h.evaluate(&s).unwrap() + tilt.evaluate(&s).unwrap())
        .collect();
    TableOracle::new(ground, values).unwrap()
}

/// Max of `πᵀ xbar` over every signed-greedy vertex.
pub fn enumerated_max<O: FunctionOracle<f64>>(oracle: &mut O, xbar: &[f64]) -> f64 {
    all_order_sign_pairs(oracle.ground())
        .map(|os| {
            let v = signed_greedy(oracle, &os).unwrap();
            v.pi.iter().zip(xbar).map(|(p, x)| p * x).sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Row rank by Gaussian elimination with partial pivoting.
pub fn rank(mut rows: Vec<Vec<f64>>, tol: f64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).max_by(|&a, &b| rows[a][c].abs().total_cmp(&rows[b][c].abs())) else {
            break;
        };
        if rows[p][c].abs() <= tol {
            continue;
        }
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r {
                let f = rows[i][c] / rows[r][c];
                let pivot = rows[r].clone();
                for (a, p) in rows[i].iter_mut().zip(&pivot).skip(c) {
                    *a -= f * p;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

pub fn biset(g: GroundSet, s1: &[usize], s2: &[usize]) -> Biset {
    Biset::new(g, s1.iter().copied(), s2.iter().copied()).unwrap()
}

pub fn entropy_table(n: usize, t: usize, rng: &mut ChaCha8Rng) -> TableOracle<f64> {
    TableOracle::tabulate(&mut random_entropy_oracle(n, t, rng)).unwrap()
}
