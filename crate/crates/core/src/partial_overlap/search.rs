//! Curve following over `sigma2`.
//!
//! For each layout the balance equations leave one free variable. Fixing
//! `sigma2`, the remaining unknowns reduce to a scalar equation in `sigma1`
//! whose roots are found by a dense scan plus bisection. Roots at adjacent
//! `sigma2` grid points are linked into branches, and `B` is maximised
//! along each branch.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::equations::{
    capacities_for, exclusive_balance, gamma_first_scaled, gamma_second_scaled, increment_first,
    increment_second, total_power_ratio_residual, widths_for, FlatParams, OverlapPoint, Widths,
};
use super::{
    EquationResiduals, OverlapDiagnostics, OverlapLayout, PartialOverlapSolution, SolverOptions,
};
use crate::closed_form::{sigma1_upper_bound, sigma2_upper_bound};
use crate::error::ModelError;
use crate::model::{LogBase, Scenario};
use crate::numeric::{bisect, golden_max, mixed_grid};

/// Relative floor of the `sigma` sweeps, in units of `(P1 + P2) / W`.
pub const SIGMA_FLOOR: f64 = 1e-9;

/// Distances between roots near zero are measured against this fraction of
/// the `sigma1` range.
const LINK_FLOOR: f64 = 1e-2;

/// Smallest band width kept, relative to `W`.
pub const WIDTH_FLOOR: f64 = 1e-9;

pub(crate) struct Curve {
    pub p: FlatParams,
    pub layout: OverlapLayout,
    pub sigma2_range: (f64, f64),
    sigma1_range: (f64, f64),
    sigma1_grid: Vec<f64>,
}

impl Curve {
    pub fn new(scenario: &Scenario, layout: OverlapLayout, scan_points: usize) -> Result<Self, ModelError> {
        let p = FlatParams::from_scenario(scenario)?;
        let eps = SIGMA_FLOOR * (p.p1 + p.p2) / p.width;
        let bound2 = sigma2_upper_bound(scenario)?;
        let bound1 = sigma1_upper_bound(scenario)?;
        let (sigma2_range, sigma1_range) = match layout {
            OverlapLayout::BothExclusive => ((eps, bound2), (eps, bound1)),
            OverlapLayout::NoFirstExclusive => ((eps, bound2.min(p.p2 / p.width)), (p.p1 / p.width, bound1)),
            OverlapLayout::NoSecondExclusive => ((p.p2 / p.width, bound2), (eps, bound1)),
        };
        let sigma1_grid = mixed_grid(sigma1_range.0, sigma1_range.1, scan_points);
        Ok(Self {
            p,
            layout,
            sigma2_range,
            sigma1_range,
            sigma1_grid,
        })
    }

    pub fn covers(&self, sigma2: f64) -> bool {
        sigma2 >= self.sigma2_range.0 && sigma2 <= self.sigma2_range.1
    }

    /// Scaled residual of the layout's closing equation; NaN where undefined.
    pub fn residual(&self, sigma1: f64, sigma2: f64) -> f64 {
        let p = &self.p;
        match self.layout {
            OverlapLayout::BothExclusive => {
                let (Ok(c1), Ok(c2)) = (increment_first(p, sigma1, sigma2), increment_second(p, sigma1, sigma2)) else {
                    return f64::NAN;
                };
                let (r, scale) = exclusive_balance(p, [sigma1, sigma2], [c1, c2]);
                if scale == 0.0 {
                    0.0
                } else {
                    r / scale
                }
            }
            OverlapLayout::NoFirstExclusive => {
                let Ok(c2) = increment_second(p, sigma1, sigma2) else {
                    return f64::NAN;
                };
                let shared = p.p1 / sigma1;
                let second = p.width - shared;
                let excl = second * (sigma2 + c2);
                let used = excl + shared * sigma2;
                (used - p.p2) / p.p2.max(excl.abs()).max(shared * sigma2)
            }
            OverlapLayout::NoSecondExclusive => {
                let Ok(c1) = increment_first(p, sigma1, sigma2) else {
                    return f64::NAN;
                };
                let shared = p.p2 / sigma2;
                let first = p.width - shared;
                let excl = first * (sigma1 + c1);
                let used = excl + shared * sigma1;
                (used - p.p1) / p.p1.max(excl.abs()).max(shared * sigma1)
            }
        }
    }

    /// All seven variables at `(sigma1, sigma2)`, if the equations are solvable there.
    pub fn reconstruct(&self, sigma1: f64, sigma2: f64) -> Option<OverlapPoint> {
        let p = &self.p;
        let sigma = [sigma1, sigma2];
        match self.layout {
            OverlapLayout::BothExclusive => {
                let c = [increment_first(p, sigma1, sigma2).ok()?, increment_second(p, sigma1, sigma2).ok()?];
                let widths = widths_for(p, sigma, c).ok()?;
                Some(OverlapPoint { widths, sigma, increment: c })
            }
            OverlapLayout::NoFirstExclusive => {
                let c2 = increment_second(p, sigma1, sigma2).ok()?;
                let shared = p.p1 / sigma1;
                Some(OverlapPoint {
                    widths: Widths { first: 0.0, second: p.width - shared, shared },
                    sigma,
                    increment: [0.0, c2],
                })
            }
            OverlapLayout::NoSecondExclusive => {
                let c1 = increment_first(p, sigma1, sigma2).ok()?;
                let shared = p.p2 / sigma2;
                Some(OverlapPoint {
                    widths: Widths { first: p.width - shared, second: 0.0, shared },
                    sigma,
                    increment: [c1, 0.0],
                })
            }
        }
    }

    /// Densities positive, every band of the layout wider than
    /// `WIDTH_FLOOR * W` and exclusive increments positive. Narrower bands
    /// are the FDMA and full-share limits, which the closed forms cover.
    pub fn is_feasible(&self, point: &OverlapPoint) -> bool {
        let w = point.widths;
        let min = WIDTH_FLOOR * self.p.width;
        let base = point.sigma[0] > 0.0 && point.sigma[1] > 0.0 && w.shared > min && w.is_nonnegative();
        base && match self.layout {
            OverlapLayout::BothExclusive => {
                w.first > min && w.second > min && point.increment[0] > 0.0 && point.increment[1] > 0.0
            }
            OverlapLayout::NoFirstExclusive => w.second > min && point.increment[1] > 0.0,
            OverlapLayout::NoSecondExclusive => w.first > min && point.increment[0] > 0.0,
        }
    }

    pub fn residuals(&self, point: &OverlapPoint) -> EquationResiduals {
        let p = &self.p;
        let w = point.widths;
        let [s1, s2] = point.sigma;
        let [c1, c2] = point.increment;
        let power = [
            (w.first * (s1 + c1) + w.shared * s1 - p.p1) / p.p1,
            (w.second * (s2 + c2) + w.shared * s2 - p.p2) / p.p2,
        ];
        let has_first = self.layout != OverlapLayout::NoFirstExclusive;
        let has_second = self.layout != OverlapLayout::NoSecondExclusive;
        let exclusive_balance = (self.layout == OverlapLayout::BothExclusive).then(|| {
            let (r, scale) = exclusive_balance(p, point.sigma, point.increment);
            if scale == 0.0 {
                0.0
            } else {
                r / scale
            }
        });
        EquationResiduals {
            band_sum: (w.first + w.second + w.shared - p.width) / p.width,
            power,
            exclusive_balance,
            stationarity: [
                has_first.then(|| gamma_first_scaled(p, s1, s2, c1)),
                has_second.then(|| gamma_second_scaled(p, s1, s2, c2)),
            ],
        }
    }

    /// Roots in `sigma1` at fixed `sigma2`, ascending.
    pub fn roots(&self, sigma2: f64, root_tol: f64) -> Vec<f64> {
        let f = |x: f64| self.residual(x, sigma2);
        let values: Vec<f64> = self.sigma1_grid.iter().map(|&x| f(x)).collect();
        let mut roots = Vec::new();
        for i in 0..self.sigma1_grid.len() {
            if values[i] == 0.0 {
                roots.push(self.sigma1_grid[i]);
                continue;
            }
            if i + 1 == self.sigma1_grid.len() {
                break;
            }
            let (a, b) = (values[i], values[i + 1]);
            if !(a.is_finite() && b.is_finite()) || b == 0.0 || a.signum() == b.signum() {
                continue;
            }
            if let Some(r) = bisect(f, self.sigma1_grid[i], self.sigma1_grid[i + 1], 0.0) {
                if f(r).abs() <= root_tol {
                    roots.push(r);
                }
            }
        }
        roots
    }

    /// Root in `sigma1` nearest to `seed` at the given `sigma2`.
    pub fn track(&self, sigma2: f64, seed: f64, root_tol: f64) -> Option<f64> {
        let f = |x: f64| self.residual(x, sigma2);
        let f0 = f(seed);
        if f0 == 0.0 {
            return Some(seed);
        }
        if !f0.is_finite() {
            return None;
        }
        let lo_limit = self.sigma1_range.0 * 0.5;
        let mut step = 1e-7 * seed;
        while step < 4.0 * seed {
            for dir in [1.0, -1.0] {
                let x = seed + dir * step;
                if x <= lo_limit {
                    continue;
                }
                let fx = f(x);
                if fx.is_finite() && fx.signum() != f0.signum() {
                    let (a, b) = if x < seed { (x, seed) } else { (seed, x) };
                    let r = bisect(f, a, b, 0.0)?;
                    return (f(r).abs() <= root_tol).then_some(r);
                }
            }
            step *= 2.0;
        }
        None
    }
}

/// One root of the closing equation at a grid value of `sigma2`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RootSample {
    pub sigma1: f64,
    pub point: Option<OverlapPoint>,
    pub feasible: bool,
    pub value: Option<f64>,
}

/// Roots at every grid value, linked into branches.
pub(crate) struct BranchSet {
    pub grid: Vec<f64>,
    pub samples: Vec<Vec<RootSample>>,
    /// Each branch is a list of `(grid index, root index)` with consecutive grid indices.
    pub branches: Vec<Vec<(usize, usize)>>,
}

pub(crate) fn trace(curve: &Curve, grid: &[f64], options: &SolverOptions, base: LogBase) -> BranchSet {
    let sample_at = |&s2: &f64| -> Vec<RootSample> {
        if !curve.covers(s2) {
            return Vec::new();
        }
        curve
            .roots(s2, options.root_tol)
            .into_iter()
            .map(|s1| {
                let point = curve.reconstruct(s1, s2);
                let feasible = point.is_some_and(|pt| curve.is_feasible(&pt));
                let value = point
                    .filter(|_| feasible)
                    .map(|pt| {
                        let c = capacities_for(&curve.p, &pt, base);
                        c[0] + c[1]
                    });
                RootSample { sigma1: s1, point, feasible, value }
            })
            .collect()
    };
    let samples: Vec<Vec<RootSample>> = if options.parallel {
        grid.par_iter().map(sample_at).collect()
    } else {
        grid.iter().map(sample_at).collect()
    };
    let branches = link(&samples, options.link_tol, LINK_FLOOR * curve.sigma1_range.1);
    BranchSet {
        grid: grid.to_vec(),
        samples,
        branches,
    }
}

/// Greedy nearest-neighbour linking of roots between adjacent grid points.
fn link(samples: &[Vec<RootSample>], link_tol: f64, floor: f64) -> Vec<Vec<(usize, usize)>> {
    let mut branches: Vec<Vec<(usize, usize)>> = Vec::new();
    // (branch id, root index at previous grid point)
    let mut active: Vec<(usize, usize)> = Vec::new();
    for (i, roots) in samples.iter().enumerate() {
        let mut pairs = Vec::new();
        if i > 0 {
            for (a, &(_, prev_root)) in active.iter().enumerate() {
                let x = samples[i - 1][prev_root].sigma1;
                for (r, s) in roots.iter().enumerate() {
                    let d = (x - s.sigma1).abs() / x.max(s.sigma1).max(floor);
                    if d <= link_tol {
                        pairs.push((d, a, r));
                    }
                }
            }
        }
        pairs.sort_by(|u, v| u.0.total_cmp(&v.0).then(u.1.cmp(&v.1)).then(u.2.cmp(&v.2)));
        let mut used_active = vec![false; active.len()];
        let mut owner: Vec<Option<usize>> = vec![None; roots.len()];
        for (_, a, r) in pairs {
            if !used_active[a] && owner[r].is_none() {
                used_active[a] = true;
                owner[r] = Some(active[a].0);
            }
        }
        let mut next = Vec::with_capacity(roots.len());
        for (r, o) in owner.into_iter().enumerate() {
            let id = o.unwrap_or_else(|| {
                branches.push(Vec::new());
                branches.len() - 1
            });
            branches[id].push((i, r));
            next.push((id, r));
        }
        active = next;
    }
    branches
}

/// Counters for roots dropped along the way.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchDiagnostics {
    /// Roots of the closing equation found on the grid.
    pub roots: usize,
    /// Roots whose reconstruction had a negative width or density.
    pub infeasible: usize,
    /// Refined candidates rejected for equation residuals above tolerance.
    pub rejected: usize,
    pub branches: usize,
}

impl std::ops::AddAssign for SearchDiagnostics {
    fn add_assign(&mut self, o: Self) {
        self.roots += o.roots;
        self.infeasible += o.infeasible;
        self.rejected += o.rejected;
        self.branches += o.branches;
    }
}

struct Refined {
    sigma: [f64; 2],
    point: OverlapPoint,
    slope: Option<f64>,
}

/// Value of `B` following a branch through `sigma2` from a nearby seed.
fn branch_value(curve: &Curve, sigma2: f64, seed: f64, options: &SolverOptions, base: LogBase) -> Option<(f64, f64)> {
    let s1 = curve.track(sigma2, seed, options.root_tol)?;
    let pt = curve.reconstruct(s1, sigma2)?;
    if !curve.is_feasible(&pt) {
        return None;
    }
    let c = capacities_for(&curve.p, &pt, base);
    Some((c[0] + c[1], s1))
}

/// `sigma2 * dB/dsigma2 / |B|` by central difference along the branch.
fn scaled_slope(curve: &Curve, sigma2: f64, sigma1: f64, options: &SolverOptions, base: LogBase) -> Option<f64> {
    let h = 1e-6 * sigma2;
    let (up, _) = branch_value(curve, sigma2 + h, sigma1, options, base)?;
    let (down, _) = branch_value(curve, sigma2 - h, sigma1, options, base)?;
    let (mid, _) = branch_value(curve, sigma2, sigma1, options, base)?;
    Some((up - down) / (2.0 * h) * sigma2 / mid.abs())
}

/// Maximises `B` along a branch between two grid neighbours of a local maximum.
fn refine(
    curve: &Curve,
    bracket: [(f64, f64); 3],
    options: &SolverOptions,
    base: LogBase,
) -> Option<Refined> {
    let seed_at = |s2: f64| -> f64 {
        let [(a, sa), (b, sb), (c, sc)] = bracket;
        if s2 <= b {
            sa + (sb - sa) * (s2 - a) / (b - a)
        } else {
            sb + (sc - sb) * (s2 - b) / (c - b)
        }
    };
    let slope = |s2: f64| -> Option<f64> {
        let (_, s1) = branch_value(curve, s2, seed_at(s2), options, base)?;
        scaled_slope(curve, s2, s1, options, base)
    };
    let (lo, hi) = (bracket[0].0, bracket[2].0);
    let by_slope = match (slope(lo), slope(hi)) {
        (Some(a), Some(b)) if a > 0.0 && b < 0.0 => bisect(|s2| slope(s2).unwrap_or(f64::NAN), lo, hi, 1e-15),
        _ => None,
    };
    let sigma2 = by_slope.unwrap_or_else(|| {
        golden_max(
            |s2| branch_value(curve, s2, seed_at(s2), options, base).map_or(f64::NEG_INFINITY, |v| v.0),
            lo,
            hi,
            1e-13 * hi,
        )
        .0
    });
    let (_, sigma1) = branch_value(curve, sigma2, seed_at(sigma2), options, base)?;
    let point = curve.reconstruct(sigma1, sigma2)?;
    let slope = scaled_slope(curve, sigma2, sigma1, options, base);
    Some(Refined {
        sigma: [sigma1, sigma2],
        point,
        slope,
    })
}

/// Stationary points and endpoints of `B` on every branch of one layout.
pub(crate) fn layout_candidates(
    scenario: &Scenario,
    layout: OverlapLayout,
    options: &SolverOptions,
    base: LogBase,
) -> Result<(Vec<PartialOverlapSolution>, SearchDiagnostics), ModelError> {
    let curve = Curve::new(scenario, layout, options.scan_points)?;
    let (lo, hi) = curve.sigma2_range;
    let mut diag = SearchDiagnostics::default();
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return Ok((Vec::new(), diag));
    }
    let grid = mixed_grid(lo, hi, options.scan_points);
    let set = trace(&curve, &grid, options, base);
    diag.roots = set.samples.iter().map(Vec::len).sum();
    diag.infeasible = set.samples.iter().flatten().filter(|s| !s.feasible).count();
    diag.branches = set.branches.len();

    let mut out = Vec::new();
    let mut push = |sigma: [f64; 2], point: OverlapPoint, slope: Option<f64>, endpoint: bool, branch: usize, diag: &mut SearchDiagnostics| {
        if !curve.is_feasible(&point) {
            diag.infeasible += 1;
            return;
        }
        let residuals = curve.residuals(&point);
        let worst = residuals.max_abs();
        if worst.is_nan() || worst > options.residual_tol {
            diag.rejected += 1;
            return;
        }
        let capacities = capacities_for(&curve.p, &point, base);
        let total_power_ratio = (layout == OverlapLayout::BothExclusive)
            .then(|| total_power_ratio_residual(&curve.p, &point.widths));
        out.push(PartialOverlapSolution::new(
            layout,
            &point,
            capacities,
            residuals,
            OverlapDiagnostics {
                endpoint,
                slope,
                total_power_ratio,
                branch,
            },
        ));
        debug_assert_eq!(sigma, point.sigma);
    };

    for (b, branch) in set.branches.iter().enumerate() {
        // split into runs of feasible samples
        let mut runs: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut current = Vec::new();
        for &(i, r) in branch {
            if set.samples[i][r].feasible {
                current.push((i, r));
            } else if !current.is_empty() {
                runs.push(std::mem::take(&mut current));
            }
        }
        if !current.is_empty() {
            runs.push(current);
        }
        for run in runs {
            let val = |k: usize| set.samples[run[k].0][run[k].1].value.unwrap_or(f64::NEG_INFINITY);
            let sample = |k: usize| &set.samples[run[k].0][run[k].1];
            let m = run.len();
            let mut endpoint_at = |k: usize, diag: &mut SearchDiagnostics| {
                let s = sample(k);
                let s2 = set.grid[run[k].0];
                if let Some(pt) = s.point {
                    let slope = scaled_slope(&curve, s2, s.sigma1, options, base);
                    push([s.sigma1, s2], pt, slope, true, b, diag);
                }
            };
            if m == 1 {
                endpoint_at(0, &mut diag);
                continue;
            }
            if val(0) > val(1) {
                endpoint_at(0, &mut diag);
            }
            if val(m - 1) > val(m - 2) {
                endpoint_at(m - 1, &mut diag);
            }
            for k in 1..m - 1 {
                let (a, v, c) = (val(k - 1), val(k), val(k + 1));
                if v >= a && v >= c && (v > a || v > c) {
                    let bracket = [
                        (set.grid[run[k - 1].0], sample(k - 1).sigma1),
                        (set.grid[run[k].0], sample(k).sigma1),
                        (set.grid[run[k + 1].0], sample(k + 1).sigma1),
                    ];
                    match refine(&curve, bracket, options, base) {
                        Some(r) => {
                            let endpoint = !r.slope.is_some_and(|x| x.abs() <= options.stationarity_tol);
                            push(r.sigma, r.point, r.slope, endpoint, b, &mut diag);
                        }
                        None => diag.rejected += 1,
                    }
                }
            }
        }
    }
    Ok((out, diag))
}

/// One row of the `B(sigma2)` sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sigma2: f64,
    pub branch: String,
    pub sigma1: f64,
    /// `B` at the reconstructed point, absent when it is infeasible.
    pub value: Option<f64>,
    pub feasible: bool,
}

/// `B` along every branch at `samples` uniformly spaced values of `sigma2`
/// in `(eps, bound]`. Rows are grouped by branch, `sigma2` ascending.
pub fn sweep(
    scenario: &Scenario,
    samples: usize,
    options: &SolverOptions,
    base: LogBase,
) -> Result<Vec<SweepRow>, ModelError> {
    let p = FlatParams::from_scenario(scenario)?;
    let eps = SIGMA_FLOOR * (p.p1 + p.p2) / p.width;
    let bound = sigma2_upper_bound(scenario)?;
    let n = samples.max(1);
    let grid: Vec<f64> = (1..=n).map(|i| eps + (bound - eps) * i as f64 / n as f64).collect();
    let mut rows = Vec::new();
    for layout in OverlapLayout::ALL {
        let curve = Curve::new(scenario, layout, options.scan_points)?;
        let set = trace(&curve, &grid, options, base);
        for (b, branch) in set.branches.iter().enumerate() {
            for &(i, r) in branch {
                let s = &set.samples[i][r];
                rows.push(SweepRow {
                    sigma2: grid[i],
                    branch: format!("{}-{b}", layout.tag()),
                    sigma1: s.sigma1,
                    value: s.value,
                    feasible: s.feasible,
                });
            }
        }
    }
    Ok(rows)
}
