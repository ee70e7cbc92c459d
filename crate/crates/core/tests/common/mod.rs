//! Instance generators and reference computations shared by the
//! integration tests. Nothing here calls into the solver internals.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sapd_core::{ChannelGains, GainBand, Gains, Scenario, UserParams};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn log_uniform(r: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    r.gen_range(lo.ln()..hi.ln()).exp()
}

pub fn flat(w: f64, p: [f64; 2], n: [f64; 2], h: [f64; 4]) -> Scenario {
    Scenario::flat(
        w,
        [UserParams::new(p[0], n[0], 1.0), UserParams::new(p[1], n[1], 1.0)],
        Gains::new(h[0], h[1], h[2], h[3]),
    )
    .unwrap()
}

/// Every parameter log-uniform over `[1e-2, 1e2]`, `W` over `[0.1, 10]`.
pub fn random_flat(r: &mut impl Rng) -> Scenario {
    let mut v = || log_uniform(r, 1e-2, 1e2);
    let (p1, p2, n1, n2) = (v(), v(), v(), v());
    let h = [v(), v(), v(), v()];
    let w = log_uniform(r, 0.1, 10.0);
    flat(w, [p1, p2], [n1, n2], h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    Weak,
    Intermediate,
    Strong,
}

impl Coupling {
    pub const ALL: [Coupling; 3] = [Coupling::Weak, Coupling::Intermediate, Coupling::Strong];

    /// Range of cross gain relative to the larger direct gain.
    fn range(self) -> (f64, f64) {
        match self {
            Coupling::Weak => (1e-3, 1e-2),
            Coupling::Intermediate => (0.05, 0.5),
            Coupling::Strong => (1.0, 10.0),
        }
    }
}

pub fn random_coupled(r: &mut impl Rng, coupling: Coupling) -> Scenario {
    let (lo, hi) = coupling.range();
    let w = log_uniform(r, 0.1, 10.0);
    let p = [log_uniform(r, 1e-2, 1e2), log_uniform(r, 1e-2, 1e2)];
    let n = [log_uniform(r, 1e-2, 1e2), log_uniform(r, 1e-2, 1e2)];
    let h11 = log_uniform(r, 1e-2, 1e2);
    let h22 = log_uniform(r, 1e-2, 1e2);
    let scale = h11.max(h22);
    let h12 = log_uniform(r, lo, hi) * scale;
    let h21 = log_uniform(r, lo, hi) * scale;
    flat(w, p, n, [h11, h12, h21, h22])
}

/// Unit band and noise, moderate powers, cross gains in `[0.05, 0.5]`.
pub fn random_intermediate_unit(r: &mut impl Rng) -> Scenario {
    let p = [log_uniform(r, 1.0, 50.0), log_uniform(r, 1.0, 50.0)];
    let h = [1.0, log_uniform(r, 0.05, 0.5), log_uniform(r, 0.05, 0.5), 1.0];
    flat(1.0, p, [1.0, 1.0], h)
}

/// Two gain bands split at `W/2`, with the users' mean SNRs within a factor of 4.
pub fn random_two_band(r: &mut impl Rng, cross: f64) -> Scenario {
    let mut g = || {
        Gains::new(
            log_uniform(r, 0.3, 3.0),
            cross * log_uniform(r, 0.5, 2.0),
            cross * log_uniform(r, 0.5, 2.0),
            log_uniform(r, 0.3, 3.0),
        )
    };
    let (g1, g2) = (g(), g());
    let mean = |i: usize| 0.5 * (g1.get(i, i) + g2.get(i, i));
    let p1 = log_uniform(r, 0.5, 50.0);
    let p = [p1, p1 * mean(0) / mean(1) * log_uniform(r, 0.25, 4.0)];
    Scenario::new(
        1.0,
        [UserParams::new(p[0], 1.0, 1.0), UserParams::new(p[1], 1.0, 1.0)],
        ChannelGains::Selective(vec![
            GainBand { start: 0.0, end: 0.5, gains: g1 },
            GainBand { start: 0.5, end: 1.0, gains: g2 },
        ]),
    )
    .unwrap()
}

/// Instance where sharing part of the band beats both closed forms by about 2%.
pub fn overlap_winner() -> Scenario {
    flat(1.0, [109.27, 570.96], [1.0, 1.0], [1.0, 0.0261, 0.0506, 1.0])
}

/// Instance whose optimum has both exclusive bands and a shared band.
pub fn overlap_winner_both() -> Scenario {
    flat(1.0, [26.97, 10.26], [1.0, 1.0], [1.0, 0.068, 0.282, 1.0])
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Flat-channel constants read back from a scenario.
#[derive(Debug, Clone, Copy)]
pub struct Consts {
    pub w: f64,
    pub p: [f64; 2],
    pub n: [f64; 2],
    /// `h[from][to]`
    pub h: [[f64; 2]; 2],
}

pub fn consts(s: &Scenario) -> Consts {
    let g = s.flat_gains().unwrap();
    Consts {
        w: s.width(),
        p: s.powers(),
        n: s.noises(),
        h: [[g.get(0, 0), g.get(0, 1)], [g.get(1, 0), g.get(1, 1)]],
    }
}

/// Disjoint-split sum rate in nats as a function of the fraction `y` held by user 1.
pub fn fdma_rate(c: &Consts, y: f64) -> f64 {
    let a = c.p[0] * c.h[0][0] / (c.w * c.n[0]);
    let b = c.p[1] * c.h[1][1] / (c.w * c.n[1]);
    let t = |share: f64, snr: f64| if share <= 0.0 { 0.0 } else { share * (snr / share).ln_1p() };
    c.w * (t(y, a) + t(1.0 - y, b))
}

/// Derivative of `fdma_rate` in `y`, differentiated by hand.
pub fn fdma_rate_slope(c: &Consts, y: f64) -> f64 {
    let a = c.p[0] * c.h[0][0] / (c.w * c.n[0]);
    let b = c.p[1] * c.h[1][1] / (c.w * c.n[1]);
    let z = 1.0 - y;
    c.w * ((a / y).ln_1p() - a / (y + a) - (b / z).ln_1p() + b / (z + b))
}

/// `f(x2) - f(x1)` as the integral of `df` by 8-point Gauss-Legendre.
fn difference(df: &impl Fn(f64) -> f64, x1: f64, x2: f64) -> f64 {
    const NODES: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
    const WEIGHTS: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_26];
    let (m, h) = (0.5 * (x1 + x2), 0.5 * (x2 - x1));
    h * NODES
        .iter()
        .zip(WEIGHTS)
        .map(|(&x, wt)| wt * (df(m + h * x) + df(m - h * x)))
        .sum::<f64>()
}

/// Golden-section maximisation of the disjoint-split rate. Probe values are
/// compared through the integral of the slope between them, so the search
/// keeps resolving `y` after the rate itself stops changing in floating point.
pub fn fdma_golden(c: &Consts) -> f64 {
    let df = |y: f64| fdma_rate_slope(c, y);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    for _ in 0..200 {
        if hi - lo <= 1e-14 {
            break;
        }
        if difference(&df, x1, x2) > 0.0 {
            lo = x1;
            x1 = x2;
            x2 = lo + g * (hi - lo);
        } else {
            hi = x2;
            x2 = x1;
            x1 = hi - g * (hi - lo);
        }
    }
    0.5 * (lo + hi)
}

/// Capacity, in nats, of the slice used for the exclusive/shared balance of
/// `user`: a piece of width `w` of the user's exclusive band and a unit piece
/// of the shared band. The user's slice power is fixed; `q` of it sits in the
/// shared piece and the rest in the exclusive piece, so `q = (1 - k) T` for
/// the split fraction `k` and slice power `T`. Returned as the three log terms.
pub fn slice_terms(c: &Consts, user: usize, sigma: [f64; 2], inc: f64, w: f64, q: f64) -> [f64; 3] {
    let (i, j) = (user, 1 - user);
    let total = w * (inc + sigma[i]) + sigma[i];
    [
        w * ((total - q) * c.h[i][i] / (w * c.n[i])).ln_1p(),
        (q * c.h[i][i] / (sigma[j] * c.h[j][i] + c.n[i])).ln_1p(),
        (sigma[j] * c.h[j][j] / (c.h[i][j] * q + c.n[j])).ln_1p(),
    ]
}

/// Slice power `T`.
pub fn slice_power(user: usize, sigma: [f64; 2], inc: f64, w: f64) -> f64 {
    w * (inc + sigma[user]) + sigma[user]
}

/// `dC/dk` of each slice term at the operating split, where the shared
/// piece holds `q = sigma_user`. Five-point central difference in `q`,
/// mapped to `k` by `dk = -dq / T`. The step is a small fraction of the
/// distance in `q` over which each log term bends.
pub fn slice_slopes(c: &Consts, user: usize, sigma: [f64; 2], inc: f64, w: f64) -> [f64; 3] {
    let (i, j) = (user, 1 - user);
    let q = sigma[i];
    let total = slice_power(user, sigma, inc, w);
    let bend = (total - q + w * c.n[i] / c.h[i][i])
        .min(q + (sigma[j] * c.h[j][i] + c.n[i]) / c.h[i][i])
        .min(q + c.n[j] / c.h[i][j]);
    let h = 1e-3 * bend;
    let f = |x: f64| slice_terms(c, user, sigma, inc, w, x);
    let (a, b, d, e) = (f(q - 2.0 * h), f(q - h), f(q + h), f(q + 2.0 * h));
    [0, 1, 2].map(|t| -total * (a[t] - 8.0 * b[t] + 8.0 * d[t] - e[t]) / (12.0 * h))
}

/// Product of the four denominators that clear the slice derivative.
pub fn slice_denominator(c: &Consts, user: usize, sigma: [f64; 2], inc: f64) -> f64 {
    let (i, j) = (user, 1 - user);
    let e = c.h[i][j] * sigma[i] + c.n[j];
    (c.n[i] + (inc + sigma[i]) * c.h[i][i])
        * (sigma[j] * c.h[j][i] + c.n[i] + sigma[i] * c.h[i][i])
        * e
        * (e + sigma[j] * c.h[j][j])
}
