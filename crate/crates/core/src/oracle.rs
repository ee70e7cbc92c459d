//! Exhaustive optimizer on a discretized band.
//!
//! The band is cut into `k` equal channels and each user's budget into `L`
//! units of `P_i / L`. An allocation gives each channel a pair of unit
//! counts with per-user totals at most `L`. Allocations that leave power
//! unused are kept in the search space so the max-power checks can be
//! falsified.
//!
//! The plain search space holds `C(L + k, k)^2` allocations. Channels with
//! identical gains are interchangeable, so within each run of identical
//! channels only allocations whose pairs are lexicographically
//! nondecreasing are visited; every other allocation is a permutation of
//! one of these with the same value. A branch-and-bound pass then skips
//! subtrees whose interference-free rate bound cannot beat the incumbent.

use serde::{Deserialize, Serialize};

use crate::error::OracleError;
use crate::model::{
    objective_value, Band, ChannelGains, Gains, LogBase, Objective, PiecewisePsd, Scenario,
    BOUNDARY_TOL,
};

/// Default cap on the number of canonical allocations.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// Relative margin a new allocation must clear to replace the incumbent.
const IMPROVE_TOL: f64 = 1e-12;

/// A scenario cut into `channels` equal channels with `levels` power units per user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelizedInstance {
    pub channels: usize,
    pub levels: u32,
    pub width: f64,
    pub gains: Vec<Gains>,
    pub powers: [f64; 2],
    pub noises: [f64; 2],
    pub weights: [f64; 2],
}

impl ChannelizedInstance {
    pub fn channel_width(&self) -> f64 {
        self.width / self.channels as f64
    }

    /// Power of one unit for `user`.
    pub fn unit(&self, user: usize) -> f64 {
        self.powers[user] / f64::from(self.levels)
    }

    /// Rates of both users on `channel` for the given unit counts.
    pub fn channel_rates(&self, channel: usize, units: [u32; 2], base: LogBase) -> [f64; 2] {
        let b = self.channel_width();
        let g = &self.gains[channel];
        let p = [f64::from(units[0]) * self.unit(0), f64::from(units[1]) * self.unit(1)];
        let rate = |i: usize| {
            let j = 1 - i;
            b * base.log1p(p[i] * g.get(i, i) / (p[j] * g.get(j, i) + b * self.noises[i]))
        };
        [rate(0), rate(1)]
    }

    /// Runs of consecutive channels with identical gains, as `(start, len)`.
    pub fn identical_runs(&self) -> Vec<(usize, usize)> {
        let mut runs: Vec<(usize, usize)> = Vec::new();
        for (c, g) in self.gains.iter().enumerate() {
            match runs.last_mut() {
                Some((start, len)) if self.gains[*start] == *g => *len += 1,
                _ => runs.push((c, 1)),
            }
        }
        runs
    }
}

/// Cuts the band into `channels` channels with `levels` power units per user.
pub fn discretize(scenario: &Scenario, channels: usize, levels: u32) -> Result<ChannelizedInstance, OracleError> {
    if channels == 0 {
        return Err(OracleError::Resolution("channel count must be at least 1".into()));
    }
    if levels == 0 {
        return Err(OracleError::Resolution("level count must be at least 1".into()));
    }
    let w = scenario.width();
    let b = w / channels as f64;
    if let ChannelGains::Selective(table) = scenario.channel() {
        for band in &table[..table.len() - 1] {
            let pos = band.end / b;
            if (pos - pos.round()).abs() > BOUNDARY_TOL * channels as f64 {
                return Err(OracleError::Misaligned {
                    boundary: band.end,
                    channels,
                });
            }
        }
    }
    let gains = (0..channels)
        .map(|c| {
            let mid = (c as f64 + 0.5) * b;
            scenario.gains_on(mid, mid)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ChannelizedInstance {
        channels,
        levels,
        width: w,
        gains,
        powers: scenario.powers(),
        noises: scenario.noises(),
        weights: scenario.weights(),
    })
}

/// Unit counts per channel.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Allocation {
    pub units: Vec<[u32; 2]>,
}

impl Allocation {
    pub fn used_units(&self, user: usize) -> u32 {
        self.units.iter().map(|u| u[user]).sum()
    }

    /// The allocation as a piecewise-constant PSD, one band per channel.
    pub fn psd(&self, instance: &ChannelizedInstance) -> Result<PiecewisePsd, OracleError> {
        let b = instance.channel_width();
        let bands = self
            .units
            .iter()
            .enumerate()
            .map(|(c, u)| Band {
                start: c as f64 * b,
                end: if c + 1 == instance.channels { instance.width } else { (c + 1) as f64 * b },
                density: [
                    f64::from(u[0]) * instance.unit(0) / b,
                    f64::from(u[1]) * instance.unit(1) / b,
                ],
            })
            .collect();
        Ok(PiecewisePsd::new(bands, instance.width)?)
    }

    pub fn capacities(&self, instance: &ChannelizedInstance, base: LogBase) -> [f64; 2] {
        self.units.iter().enumerate().fold([0.0; 2], |acc, (c, &u)| {
            let r = instance.channel_rates(c, u, base);
            [acc[0] + r[0], acc[1] + r[1]]
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    /// Largest number of canonical allocations the search may cover.
    pub budget: u128,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSolution {
    pub allocation: Allocation,
    pub capacities: [f64; 2],
    pub value: f64,
    /// Canonical allocations in the search space.
    pub search_space: u128,
    /// Complete allocations actually evaluated after pruning.
    pub evaluated: u64,
}

/// `C(L + k, k)^2`: allocations without symmetry reduction.
pub fn naive_enumeration_size(channels: usize, levels: u32) -> u128 {
    let per_user = binomial(u128::from(levels) + channels as u128, channels as u128);
    per_user.saturating_mul(per_user)
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Number of canonical allocations the search visits without pruning.
pub fn enumeration_size(instance: &ChannelizedInstance) -> u128 {
    let l = instance.levels as usize;
    let side = l + 1;
    // total[s1 * side + s2]: ways to spend s1, s2 units over the runs so far
    let mut total = vec![0u128; side * side];
    total[0] = 1;
    for (_, len) in instance.identical_runs() {
        let run = multiset_counts(len, l);
        let mut next = vec![0u128; side * side];
        for (a, &x) in total.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let (a1, a2) = (a / side, a % side);
            for b1 in 0..side - a1 {
                for b2 in 0..side - a2 {
                    let y = run[b1 * side + b2];
                    if y != 0 {
                        let slot = &mut next[(a1 + b1) * side + a2 + b2];
                        *slot = slot.saturating_add(x.saturating_mul(y));
                    }
                }
            }
        }
        total = next;
    }
    total.into_iter().fold(0u128, u128::saturating_add)
}

/// Multisets of `m` pairs from `{0..=l}^2`, counted by unit totals.
fn multiset_counts(m: usize, l: usize) -> Vec<u128> {
    let side = l + 1;
    // dp[count][s1][s2], adding one pair type at a time with any multiplicity
    let mut dp = vec![0u128; (m + 1) * side * side];
    let idx = |n: usize, s1: usize, s2: usize| (n * side + s1) * side + s2;
    dp[idx(0, 0, 0)] = 1;
    for p1 in 0..side {
        for p2 in 0..side {
            let mut next = dp.clone();
            for n in 0..=m {
                for s1 in 0..side {
                    for s2 in 0..side {
                        let x = dp[idx(n, s1, s2)];
                        if x == 0 {
                            continue;
                        }
                        let mut t = 1;
                        while n + t <= m && s1 + t * p1 < side && s2 + t * p2 < side {
                            let slot = &mut next[idx(n + t, s1 + t * p1, s2 + t * p2)];
                            *slot = slot.saturating_add(x);
                            t += 1;
                        }
                    }
                }
            }
            dp = next;
        }
    }
    dp[m * side * side..].to_vec()
}

struct Search<'a> {
    inst: &'a ChannelizedInstance,
    objective: &'a Objective,
    /// rates[c][a1][a2]
    rates: Vec<Vec<Vec<[f64; 2]>>>,
    /// bound[user][c][u]: best interference-free rate of `user` on channels
    /// `c..` with `u` units
    bound: [Vec<Vec<f64>>; 2],
    run_start: Vec<bool>,
    stack: Vec<[u32; 2]>,
    best: Option<(f64, [f64; 2], Vec<[u32; 2]>)>,
    evaluated: u64,
}

impl<'a> Search<'a> {
    fn new(inst: &'a ChannelizedInstance, objective: &'a Objective) -> Self {
        let k = inst.channels;
        let l = inst.levels;
        let base = objective.base;
        let rates = (0..k)
            .map(|c| {
                (0..=l)
                    .map(|a1| (0..=l).map(|a2| inst.channel_rates(c, [a1, a2], base)).collect())
                    .collect()
            })
            .collect::<Vec<Vec<Vec<_>>>>();
        let bound = [0, 1].map(|user| {
            let mut table = vec![vec![0.0; l as usize + 1]; k + 1];
            for c in (0..k).rev() {
                for u in 0..=l as usize {
                    let mut best = f64::NEG_INFINITY;
                    for a in 0..=u {
                        let mut units = [0u32; 2];
                        units[user] = a as u32;
                        let own = inst.channel_rates(c, units, base)[user];
                        best = best.max(own + table[c + 1][u - a]);
                    }
                    table[c][u] = best;
                }
            }
            table
        });
        let mut run_start = vec![false; k];
        for (start, _) in inst.identical_runs() {
            run_start[start] = true;
        }
        Self {
            inst,
            objective,
            rates,
            bound,
            run_start,
            stack: Vec::with_capacity(k),
            best: None,
            evaluated: 0,
        }
    }

    fn value(&self, caps: [f64; 2]) -> f64 {
        objective_value(caps, self.inst.weights, self.objective)
    }

    fn margin(&self) -> Option<f64> {
        self.best.as_ref().map(|(v, _, _)| v + IMPROVE_TOL * v.abs().max(1.0))
    }

    fn run(&mut self, c: usize, left: [u32; 2], caps: [f64; 2]) {
        let k = self.inst.channels;
        if c == k {
            self.evaluated += 1;
            let v = self.value(caps);
            if self.margin().map_or(true, |m| v > m) {
                self.best = Some((v, caps, self.stack.clone()));
            }
            return;
        }
        if let Some(m) = self.margin() {
            let ub = [
                caps[0] + self.bound[0][c][left[0] as usize],
                caps[1] + self.bound[1][c][left[1] as usize],
            ];
            if self.value(ub) <= m {
                return;
            }
        }
        let floor = if self.run_start[c] { [0, 0] } else { self.stack[c - 1] };
        for a1 in floor[0]..=left[0] {
            let lo2 = if a1 == floor[0] { floor[1] } else { 0 };
            for a2 in lo2..=left[1] {
                let r = self.rates[c][a1 as usize][a2 as usize];
                self.stack.push([a1, a2]);
                self.run(c + 1, [left[0] - a1, left[1] - a2], [caps[0] + r[0], caps[1] + r[1]]);
                self.stack.pop();
            }
        }
    }
}

/// Exact optimum over the discrete grid.
///
/// Among allocations within a relative `1e-12` of the best value the
/// lexicographically smallest canonical one is returned.
pub fn brute_force(
    instance: &ChannelizedInstance,
    objective: &Objective,
    options: &OracleOptions,
) -> Result<OracleSolution, OracleError> {
    let search_space = enumeration_size(instance);
    if search_space > options.budget {
        return Err(OracleError::BudgetExceeded {
            estimated: search_space,
            budget: options.budget,
        });
    }
    let mut s = Search::new(instance, objective);
    let l = instance.levels;
    s.run(0, [l, l], [0.0, 0.0]);
    let (value, capacities, units) = s.best.take().expect("search space is never empty");
    Ok(OracleSolution {
        allocation: Allocation { units },
        capacities,
        value,
        search_space,
        evaluated: s.evaluated,
    })
}

/// Interference-free upper bound on the objective from channel `from` on,
/// given per-user units still to place and capacities already collected.
pub fn completion_bound(
    instance: &ChannelizedInstance,
    objective: &Objective,
    from: usize,
    left: [u32; 2],
    collected: [f64; 2],
) -> f64 {
    let s = Search::new(instance, objective);
    s.value([
        collected[0] + s.bound[0][from][left[0] as usize],
        collected[1] + s.bound[1][from][left[1] as usize],
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxPowerReport {
    pub used_units: [u32; 2],
    /// Used power over budget.
    pub ratio: [f64; 2],
    /// User leaves more than one unit unused.
    pub flagged: [bool; 2],
}

impl MaxPowerReport {
    pub fn passes(&self) -> bool {
        !self.flagged[0] && !self.flagged[1]
    }
}

/// Checks that no user leaves more than one power unit unused.
pub fn verify_max_power(allocation: &Allocation, instance: &ChannelizedInstance) -> MaxPowerReport {
    let used_units = [allocation.used_units(0), allocation.used_units(1)];
    let l = instance.levels;
    MaxPowerReport {
        used_units,
        ratio: used_units.map(|u| f64::from(u) / f64::from(l)),
        flagged: used_units.map(|u| u + 1 < l),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectangularReport {
    /// Channels where both users place more than the threshold.
    pub shared_channels: Vec<usize>,
    /// Largest minus smallest unit count of each user over the shared channels.
    pub spread_units: [u32; 2],
    /// `(max - min) / max` of each user's density over the shared channels.
    pub relative_spread: [f64; 2],
    /// Largest spread accepted, in units.
    pub allowed_units: u32,
}

impl RectangularReport {
    pub fn passes(&self) -> bool {
        self.spread_units.iter().all(|&s| s <= self.allowed_units)
    }
}

/// Grid steps within which shared-channel densities must agree.
pub const RECTANGULAR_STEPS: u32 = 2;

/// Measures how far each user's density varies across the channels both
/// users occupy. Channels where either user's power is at most `tol` are
/// ignored.
pub fn verify_rectangular_structure(allocation: &Allocation, instance: &ChannelizedInstance, tol: f64) -> RectangularReport {
    let shared_channels: Vec<usize> = allocation
        .units
        .iter()
        .enumerate()
        .filter(|(_, u)| {
            f64::from(u[0]) * instance.unit(0) > tol && f64::from(u[1]) * instance.unit(1) > tol
        })
        .map(|(c, _)| c)
        .collect();
    let spread = |user: usize| -> (u32, f64) {
        let vals = shared_channels.iter().map(|&c| allocation.units[c][user]);
        let (Some(lo), Some(hi)) = (vals.clone().min(), vals.max()) else {
            return (0, 0.0);
        };
        (hi - lo, f64::from(hi - lo) / f64::from(hi))
    };
    let (s0, r0) = spread(0);
    let (s1, r1) = spread(1);
    RectangularReport {
        shared_channels,
        spread_units: [s0, s1],
        relative_spread: [r0, r1],
        allowed_units: RECTANGULAR_STEPS,
    }
}
