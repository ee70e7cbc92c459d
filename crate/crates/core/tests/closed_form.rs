mod common;

use common::*;
use rand::Rng;
use sapd_core::closed_form::{
    fdma_capacity_via_psd, fdma_optimum, full_share_capacity, sigma1_upper_bound, sigma2_upper_bound,
    two_band_power_split, FdmaMethod,
};
use sapd_core::numeric::golden_max;
use sapd_core::{objective_value, LogBase, Objective};

#[test]
fn fdma_fraction_matches_golden_oracle() {
    let mut r = rng(11);
    for _ in 0..200 {
        let s = random_flat(&mut r);
        let sol = fdma_optimum(&s, &Objective::sum()).unwrap();
        assert_eq!(sol.method, FdmaMethod::ClosedForm);
        let y = fdma_golden(&consts(&s));
        assert!((sol.fraction - y).abs() <= 1e-9, "{} vs {y}", sol.fraction);
    }
}

#[test]
fn fdma_total_is_the_merged_single_user_rate() {
    let mut r = rng(12);
    for _ in 0..200 {
        let s = random_flat(&mut r);
        let c = consts(&s);
        let sol = fdma_optimum(&s, &Objective::sum().with_base(LogBase::E)).unwrap();
        let direct = fdma_rate(&c, sol.fraction);
        assert!(rel(sol.total, direct) <= 1e-12);
        let via = fdma_capacity_via_psd(&s, &sol, LogBase::E).unwrap();
        assert!(rel(via[0] + via[1], direct) <= 1e-12);
    }
}

#[test]
fn fdma_densities_exhaust_budgets() {
    let mut r = rng(13);
    for _ in 0..50 {
        let s = random_flat(&mut r);
        let sol = fdma_optimum(&s, &Objective::sum()).unwrap();
        let w = s.width();
        assert!(rel(sol.densities[0] * sol.fraction * w, s.powers()[0]) <= 1e-12);
        assert!(rel(sol.densities[1] * (1.0 - sol.fraction) * w, s.powers()[1]) <= 1e-12);
    }
}

#[test]
fn weighted_fdma_matches_grid_search() {
    let mut r = rng(14);
    for _ in 0..30 {
        let s = random_flat(&mut r)
            .with_weights([r.gen_range(0.2..3.0), r.gen_range(0.2..3.0)])
            .unwrap();
        for obj in [Objective::sum(), Objective::product()] {
            let sol = fdma_optimum(&s, &obj).unwrap();
            let got = objective_value(sol.capacities, s.weights(), &obj);
            let c = consts(&s);
            let best = (1..10_000)
                .map(|i| {
                    let y = i as f64 / 10_000.0;
                    let caps = [
                        c.w * y * obj.base.log1p(c.p[0] * c.h[0][0] / (c.w * y * c.n[0])),
                        c.w * (1.0 - y) * obj.base.log1p(c.p[1] * c.h[1][1] / (c.w * (1.0 - y) * c.n[1])),
                    ];
                    objective_value(caps, s.weights(), &obj)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(got >= best * (1.0 - 1e-12), "{got} < {best}");
        }
    }
}

#[test]
fn full_share_matches_direct_formula() {
    let mut r = rng(15);
    for _ in 0..100 {
        let s = random_flat(&mut r);
        let c = consts(&s);
        let f = full_share_capacity(&s, LogBase::E).unwrap();
        let c1 = c.w * (c.p[0] * c.h[0][0] / (c.p[1] * c.h[1][0] + c.w * c.n[0])).ln_1p();
        let c2 = c.w * (c.p[1] * c.h[1][1] / (c.p[0] * c.h[0][1] + c.w * c.n[1])).ln_1p();
        assert!(rel(f.total, c1 + c2) <= 1e-13);
    }
}

#[test]
fn two_band_split_is_the_numeric_optimum() {
    let mut r = rng(16);
    let mut interior = 0;
    for _ in 0..200 {
        let width = r.gen_range(0.5..5.0);
        let split_at = width * r.gen_range(0.1..0.9);
        let power = log_uniform(&mut r, 0.1, 10.0);
        let gain = log_uniform(&mut r, 0.1, 10.0);
        let lo = log_uniform(&mut r, 0.01, 1.0);
        let hi = lo + log_uniform(&mut r, 0.01, 1.0);
        let s = two_band_power_split(power, gain, lo, hi, split_at, width);
        let rate = |k: f64| {
            let a = split_at * (k * power * gain / (split_at * lo)).ln_1p();
            let b = (width - split_at) * ((1.0 - k) * power * gain / ((width - split_at) * hi)).ln_1p();
            a + b
        };
        let (k, _) = golden_max(rate, 0.0, 1.0, 1e-12);
        assert!((s.fraction - k).abs() <= 1e-6, "{} vs {k}", s.fraction);
        let used = s.densities[0] * split_at + s.densities[1] * (width - split_at);
        assert!(rel(used, power) <= 1e-12);
        assert!(s.densities[0] >= s.densities[1]);
        if !s.clamped {
            interior += 1;
            // equal level: density plus interference over gain
            assert!(rel(s.densities[0] + lo / gain, s.densities[1] + hi / gain) <= 1e-12);
        }
    }
    assert!(interior > 50);
}

#[test]
fn bounds_mirror_under_relabel() {
    let mut r = rng(17);
    for _ in 0..50 {
        let s = random_flat(&mut r);
        assert_eq!(sigma1_upper_bound(&s).unwrap(), sigma2_upper_bound(&s.swapped()).unwrap());
    }
}

#[test]
fn bound_never_below_average_density() {
    let mut r = rng(18);
    for _ in 0..50 {
        let s = random_flat(&mut r);
        let avg = (s.powers()[0] + s.powers()[1]) / s.width();
        assert!(sigma2_upper_bound(&s).unwrap() >= avg);
    }
}

#[test]
fn selective_channel_rejected() {
    let s = random_two_band(&mut rng(19), 0.3);
    assert!(fdma_optimum(&s, &Objective::sum()).is_err());
    assert!(full_share_capacity(&s, LogBase::Two).is_err());
    assert!(sigma2_upper_bound(&s).is_err());
}
