mod common;

use bisubmod::polyhedron::{generalized_greedy, membership_bruteforce, separate, signed_greedy, OrderSignPair};
use bisubmod::verify::{all_order_sign_pairs, enumerate_vertices};
use bisubmod::{FunctionOracle, TableOracle};
use common::*;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn table1_signed_greedy_matches_hand_entropies() {
    let mut f = table1_oracle();
    let os = OrderSignPair::new(vec![0, 1, 2], vec![1, -1, 1]).unwrap();
    let v = signed_greedy(&mut f, &os).unwrap();
    // H({1},∅) from 4/7, 3/7; H({1},{2}) from 2/7,2/7,2/7,1/7; H({1,3},{2}) = 2.2359...
    let expected = [0.9852281360342515, -0.9649839288804954, 0.2857142857142856];
    for (got, want) in v.pi.iter().zip(expected) {
        assert!((got - want).abs() < 1e-12, "{:?}", v.pi);
    }
    assert_eq!(v.origin.as_ref(), Some(&os));
}

#[test]
fn table1_generalized_greedy_beats_all_48_vertices() {
    let mut f = table1_oracle();
    let xbar = [0.9, -0.5, 0.2];
    let v = generalized_greedy(&mut f, &xbar).unwrap();
    assert_eq!(all_order_sign_pairs(f.ground()).count(), 48);
    let best = enumerated_max(&mut f, &xbar);
    assert!((v.dot(&xbar) - best).abs() < 1e-9);
}

#[test]
fn table1_separation_violation_equals_enumerated_gap() {
    let mut f = table1_oracle();
    let mut r = rng(11);
    for _ in 0..20 {
        let xbar: Vec<f64> = (0..3).map(|_| r.gen_range(-1.0..=1.0)).collect();
        let cut = separate(&mut f, &xbar, -10.0).unwrap().expect("z = -10 is always violated");
        let best = enumerated_max(&mut f, &xbar);
        assert!((cut.violation(&xbar, -10.0) - (best + 10.0)).abs() < 1e-9);
    }
}

#[test]
fn zero_vector_is_in_entropy_polyhedron() {
    let mut f = table1_oracle();
    assert!(membership_bruteforce(&mut f, &[0.0; 3]).unwrap());
}

#[test]
fn greedy_optimality_on_tilted_oracles() {
    let mut r = rng(3);
    for n in 1..=4 {
        let mut f = tilted_entropy(n, 12, &mut r);
        for _ in 0..100 {
            let xbar: Vec<f64> = (0..n).map(|_| r.gen_range(-2.0..2.0)).collect();
            let v = generalized_greedy(&mut f, &xbar).unwrap();
            assert!((v.dot(&xbar) - enumerated_max(&mut f, &xbar)).abs() < 1e-9);
        }
    }
}

/// For each vertex with origin (δ, σ): the prefixes σ^1..σ^n and σ lie on
/// `z = πᵀx` and are affinely independent.
#[test]
fn greedy_vertices_support_facets() {
    let mut r = rng(5);
    let mut oracles: Vec<TableOracle<f64>> = vec![TableOracle::tabulate(&mut table1_oracle()).unwrap()];
    for n in 1..=4 {
        oracles.push(tilted_entropy(n, 10, &mut r));
    }
    for f in oracles.iter_mut() {
        let g = f.ground();
        let n = g.len();
        for os in all_order_sign_pairs(g) {
            let v = signed_greedy(f, &os).unwrap();
            let points: Vec<Vec<f64>> = (0..=n)
                .map(|k| {
                    let b = os.prefix(g, k);
                    let x = b.to_ternary().to_real::<f64>();
                    let z = f.evaluate(&b).unwrap();
                    assert!((v.dot(&x) - z).abs() < 1e-12, "prefix {k} not tight");
                    let mut p = x;
                    p.push(z);
                    p
                })
                .collect();
            let diffs: Vec<Vec<f64>> =
                points[1..].iter().map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect()).collect();
            assert_eq!(rank(diffs, 1e-9), n);
        }
    }
}

#[test]
fn every_cut_is_valid_at_all_ternary_points() {
    let mut r = rng(17);
    for n in 1..=4 {
        let mut f = tilted_entropy(n, 15, &mut r);
        let g = f.ground();
        for v in enumerate_vertices(&mut f).unwrap() {
            assert!(membership_bruteforce(&mut f, &v.pi).unwrap());
            for b in g.bisets() {
                let x = b.to_ternary().to_real::<f64>();
                assert!(v.dot(&x) <= f.evaluate(&b).unwrap() + 1e-9);
            }
        }
    }
}

#[test]
fn f32_greedy_tracks_f64() {
    let mut f64_oracle = table1_oracle();
    let mut f32_oracle = bisubmod::EntropyOracleF32::new(bisubmod::entropy::table1()).unwrap();
    let xbar = [0.3f64, 0.7, -0.1];
    let a = generalized_greedy(&mut f64_oracle, &xbar).unwrap();
    let b = generalized_greedy(&mut f32_oracle, &xbar.map(|v| v as f32)).unwrap();
    for (p, q) in a.pi.iter().zip(&b.pi) {
        assert!((p - f64::from(*q)).abs() < 1e-5);
    }
}

proptest! {
    #![proptest_config(proptest_config(64))]

    #[test]
    fn greedy_tight_at_ternary(seed in 0u64..1000, n in 1usize..=4, key in 0u64..81) {
        let mut f = tilted_entropy(n, 9, &mut rng(seed));
        let g = f.ground();
        let b = bisubmod::Biset::from_key(g, u128::from(key % g.biset_count()));
        let x = b.to_ternary().to_real::<f64>();
        let v = generalized_greedy(&mut f, &x).unwrap();
        prop_assert!((v.dot(&x) - f.evaluate(&b).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn signed_greedy_output_is_member(seed in 0u64..1000, n in 1usize..=4, perm_seed in any::<u64>()) {
        let mut f = random_entropy_oracle(n, 20, &mut rng(seed));
        let mut r = rng(perm_seed);
        let mut order: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut r);
        let signs = (0..n).map(|_| if r.gen_bool(0.5) { 1 } else { -1 }).collect();
        let v = signed_greedy(&mut f, &OrderSignPair::new(order, signs).unwrap()).unwrap();
        prop_assert!(membership_bruteforce(&mut f, &v.pi).unwrap());
    }

    #[test]
    fn greedy_is_optimal_for_random_objectives(
        seed in 0u64..1000,
        xbar in proptest::collection::vec(-3.0f64..3.0, 1..=4),
    ) {
        let mut f = tilted_entropy(xbar.len(), 10, &mut rng(seed));
        let v = generalized_greedy(&mut f, &xbar).unwrap();
        prop_assert!((v.dot(&xbar) - enumerated_max(&mut f, &xbar)).abs() < 1e-9);
    }
}
