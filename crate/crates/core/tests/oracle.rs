mod common;

use common::*;
use rand::Rng;
use sapd_core::oracle::{
    brute_force, completion_bound, discretize, enumeration_size, naive_enumeration_size, verify_max_power,
    Allocation, ChannelizedInstance, OracleOptions,
};
use sapd_core::{solve, LogBase, Objective, OracleError, SolverOptions};

/// Every way to place at most `levels` units on `channels` channels.
fn placements(channels: usize, levels: u32) -> Vec<Vec<u32>> {
    if channels == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..=levels {
        for mut rest in placements(channels - 1, levels - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Plain exhaustive search with no symmetry reduction or pruning.
fn exhaustive(inst: &ChannelizedInstance, obj: &Objective, fixed: &[[u32; 2]]) -> f64 {
    let k = inst.channels - fixed.len();
    let used = |u: usize| fixed.iter().map(|x| x[u]).sum::<u32>();
    let mut best = f64::NEG_INFINITY;
    for a in placements(k, inst.levels - used(0)) {
        for b in placements(k, inst.levels - used(1)) {
            let mut units = fixed.to_vec();
            units.extend(a.iter().zip(&b).map(|(&x, &y)| [x, y]));
            let caps = Allocation { units }.capacities(inst, obj.base);
            best = best.max(obj.value(caps, inst.weights));
        }
    }
    best
}

#[test]
fn matches_plain_enumeration() {
    let mut r = rng(31);
    for _ in 0..20 {
        let s = random_flat(&mut r);
        let inst = discretize(&s, 3, 4).unwrap();
        for obj in [Objective::sum(), Objective::product()] {
            let o = brute_force(&inst, &obj, &OracleOptions::default()).unwrap();
            let e = exhaustive(&inst, &obj, &[]);
            assert!(rel(o.value, e) <= 1e-12, "{} vs {e}", o.value);
        }
    }
}

#[test]
fn matches_plain_enumeration_on_selective_channel() {
    let mut r = rng(32);
    for _ in 0..10 {
        let s = random_two_band(&mut r, 0.3);
        let inst = discretize(&s, 4, 3).unwrap();
        let o = brute_force(&inst, &Objective::sum(), &OracleOptions::default()).unwrap();
        assert!(rel(o.value, exhaustive(&inst, &Objective::sum(), &[])) <= 1e-12);
        assert!(enumeration_size(&inst) <= naive_enumeration_size(4, 3));
    }
}

#[test]
fn completion_bound_is_admissible() {
    let mut r = rng(33);
    for _ in 0..40 {
        let s = random_flat(&mut r);
        let inst = discretize(&s, 4, 3).unwrap();
        let obj = if r.gen_bool(0.5) { Objective::sum() } else { Objective::product() };
        let from = r.gen_range(0..4);
        let mut fixed = Vec::new();
        let mut left = [3u32, 3];
        for _ in 0..from {
            let u = [r.gen_range(0..=left[0]), r.gen_range(0..=left[1])];
            left = [left[0] - u[0], left[1] - u[1]];
            fixed.push(u);
        }
        let collected = Allocation { units: fixed.clone() }.capacities(&inst, obj.base);
        let bound = completion_bound(&inst, &obj, from, left, collected);
        let best = exhaustive(&inst, &obj, &fixed);
        assert!(bound >= best * (1.0 - 1e-12), "{bound} < {best}");
    }
}

#[test]
fn doubling_levels_never_hurts() {
    let mut r = rng(34);
    for _ in 0..10 {
        let s = random_intermediate_unit(&mut r);
        let obj = Objective::sum();
        let coarse = brute_force(&discretize(&s, 4, 3).unwrap(), &obj, &OracleOptions::default()).unwrap();
        let fine = brute_force(&discretize(&s, 4, 6).unwrap(), &obj, &OracleOptions::default()).unwrap();
        assert!(fine.value >= coarse.value * (1.0 - 1e-12));
    }
}

#[test]
fn hand_enumerated_two_channel_case() {
    // Strong mutual interference: the split allocation wins outright.
    let s = flat(1.0, [10.0, 10.0], [1.0, 1.0], [1.0, 2.0, 2.0, 1.0]);
    let inst = discretize(&s, 2, 4).unwrap();
    let o = brute_force(&inst, &Objective::sum(), &OracleOptions::default()).unwrap();
    assert_eq!(o.allocation.units, vec![[0, 4], [4, 0]]);
    let expect = 2.0 * 0.5 * (1.0f64 + 10.0 / 0.5).log2();
    assert!(rel(o.value, expect) <= 1e-14);
    assert!(verify_max_power(&o.allocation, &inst).passes());
}

#[test]
fn never_exceeds_analytic_optimum() {
    let mut r = rng(35);
    for _ in 0..6 {
        let s = random_intermediate_unit(&mut r);
        let analytic = solve(&s, &Objective::sum(), &SolverOptions::default()).unwrap();
        let o = brute_force(&discretize(&s, 8, 4).unwrap(), &Objective::sum(), &OracleOptions::default()).unwrap();
        assert!(o.value <= analytic.best().objective * (1.0 + 1e-9));
    }
}

#[test]
fn budget_is_enforced() {
    let s = overlap_winner();
    let inst = discretize(&s, 16, 8).unwrap();
    let err = brute_force(&inst, &Objective::sum(), &OracleOptions { budget: 1000 }).unwrap_err();
    assert!(matches!(err, OracleError::BudgetExceeded { estimated: 45_562, budget: 1000 }));
}

#[test]
fn base_changes_scale_only() {
    let s = overlap_winner_both();
    let inst = discretize(&s, 4, 4).unwrap();
    let two = brute_force(&inst, &Objective::sum(), &OracleOptions::default()).unwrap();
    let e = brute_force(&inst, &Objective::sum().with_base(LogBase::E), &OracleOptions::default()).unwrap();
    assert_eq!(two.allocation, e.allocation);
    assert!(rel(two.value * std::f64::consts::LN_2, e.value) <= 1e-14);
}

#[test]
fn misaligned_gain_table_rejected() {
    let s = random_two_band(&mut rng(36), 0.2);
    assert!(matches!(discretize(&s, 3, 4), Err(OracleError::Misaligned { .. })));
    assert!(matches!(discretize(&s, 0, 4), Err(OracleError::Resolution(_))));
}
