mod common;

use bisubmod::experiment::{derive_params, generate_instance, replication_rng};
use bisubmod::{brute_force_min, dcg_solve, DcgConfig, DcgStatus, FunctionOracle, MasterInstance, Memoized};
use common::*;

fn worked_example() -> MasterInstance<f64> {
    let g = bisubmod::GroundSet::new(3).unwrap();
    MasterInstance::new(biset(g, &[0, 2], &[1]), 1, 1, 2, 1.0).unwrap()
}

#[test]
fn worked_example_worst_case() {
    let mut f = table1_oracle();
    let out = dcg_solve(&mut f, &worked_example(), &DcgConfig::default()).unwrap();
    assert_eq!(out.status, DcgStatus::Converged);
    assert!((out.value - 1.3787834934861753).abs() < 1e-6);
    assert_eq!(out.incumbent.display_one_based().to_string(), "({2},{3})");
    assert!(worked_example().is_feasible(&out.incumbent));
}

#[test]
fn f32_worked_example() {
    let mut f = bisubmod::EntropyOracleF32::new(bisubmod::entropy::table1()).unwrap();
    let g = f.ground();
    let inst = MasterInstance::<f32>::new(biset(g, &[0, 2], &[1]), 1, 1, 2, 1.0).unwrap();
    let out = dcg_solve(&mut f, &inst, &DcgConfig::with_epsilon(1e-4)).unwrap();
    assert!((f64::from(out.value) - 1.3787834934861753).abs() < 1e-4);
}

#[test]
fn matches_brute_force_on_lab_instances() {
    let data = lab_data(2024);
    for k in 0..20 {
        let n = 3 + k % 4;
        let t = [10, 50, 200][k % 3];
        let mut r = replication_rng(99, n, t, k);
        let inst = generate_instance::<f64>(&data, n, t, &mut r).unwrap();
        assert_eq!(inst.params, derive_params(n).unwrap());
        let mut f = Memoized::new(inst.oracle);
        let out = dcg_solve(&mut f, &inst.master, &DcgConfig::default()).unwrap();
        let (_, best) = brute_force_min(&mut f, |b| inst.master.is_feasible(b)).unwrap();
        assert!((out.value - best).abs() <= 1e-6 * best.abs().max(1.0), "instance {k}: {} vs {best}", out.value);
        assert!(inst.master.is_feasible(&out.incumbent));
    }
}

#[test]
fn bounds_are_monotone_and_cuts_are_violated() {
    let mut r = rng(77);
    for k in 0..15 {
        let n = 2 + k % 4;
        let mut f = tilted_entropy(n, 12, &mut r);
        let inst = MasterInstance::<f64>::unconstrained(f.ground(), 1.0).unwrap();
        let out = dcg_solve(&mut f, &inst, &DcgConfig::default()).unwrap();
        for w in out.history.windows(2) {
            assert!(w[1].lb >= w[0].lb);
            assert!(w[1].ub <= w[0].ub);
        }
        for rec in &out.history {
            if let Some(cut) = &rec.cut {
                let x = rec.x.to_ternary().to_real::<f64>();
                assert!(cut.value_at(&x) > rec.zbar + 1e-6 * rec.zbar.abs().max(1.0));
            }
        }
        assert!(out.stats.cut_count <= out.stats.iterations);
        assert!(out.stats.final_lb <= out.stats.final_ub + 1e-9);
        let (_, best) = brute_force_min(&mut f, |_| true).unwrap();
        assert!((out.value - best).abs() <= 1e-6 * best.abs().max(1.0));
    }
}

#[test]
fn terminates_within_ternary_count() {
    let mut r = rng(78);
    for n in 1..=6 {
        let mut f = tilted_entropy(n.min(5), 10, &mut r);
        let g = f.ground();
        let inst = MasterInstance::<f64>::unconstrained(g, 1.0).unwrap();
        let out = dcg_solve(&mut f, &inst, &DcgConfig::default()).unwrap();
        assert!(out.stats.iterations as u64 <= g.biset_count());
    }
}
