//! Allocations where the users share part of the band.
//!
//! The band is laid out as `S1 | S12 | S2`: user 1 alone on `S1`, both users
//! on `S12`, user 2 alone on `S2`. Either exclusive band may be empty. On
//! the shared band the densities are `sigma1`, `sigma2`; in its exclusive
//! band user `i` runs at `sigma_i + c_i`.

mod equations;
mod search;
mod stationarity_generated;

use serde::{Deserialize, Serialize};

pub use equations::{
    assemble_psd, gamma1, gamma2, objective_b, ratio_residual, solve_c_from_gammas, widths_from_powers,
    OverlapPoint, Widths,
};
pub use search::{sweep, SearchDiagnostics, SweepRow, SIGMA_FLOOR};

use crate::error::SolveError;
use crate::model::{LogBase, Scenario};

/// Which exclusive bands are present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapLayout {
    /// `S1 > 0` and `S2 > 0`.
    BothExclusive,
    /// `S1 = 0`: user 1 only transmits on the shared band.
    NoFirstExclusive,
    /// `S2 = 0`: user 2 only transmits on the shared band.
    NoSecondExclusive,
}

impl OverlapLayout {
    pub const ALL: [OverlapLayout; 3] = [
        OverlapLayout::BothExclusive,
        OverlapLayout::NoFirstExclusive,
        OverlapLayout::NoSecondExclusive,
    ];

    /// Short label used in branch identifiers.
    pub fn tag(self) -> &'static str {
        match self {
            OverlapLayout::BothExclusive => "both",
            OverlapLayout::NoFirstExclusive => "s1zero",
            OverlapLayout::NoSecondExclusive => "s2zero",
        }
    }
}

/// Scaled residuals of the six equations at a solution.
///
/// Widths are scaled by `W`, powers by the budget, the balance and
/// stationarity equations by their largest term. Entries are `None` where
/// the layout drops the equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquationResiduals {
    pub band_sum: f64,
    pub power: [f64; 2],
    pub exclusive_balance: Option<f64>,
    pub stationarity: [Option<f64>; 2],
}

impl EquationResiduals {
    pub fn max_abs(&self) -> f64 {
        [
            Some(self.band_sum),
            Some(self.power[0]),
            Some(self.power[1]),
            self.exclusive_balance,
            self.stationarity[0],
            self.stationarity[1],
        ]
        .into_iter()
        .flatten()
        .map(f64::abs)
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapDiagnostics {
    /// The candidate is a branch endpoint rather than a stationary point.
    pub endpoint: bool,
    /// `sigma2 * dB/dsigma2 / |B|` along the branch, when the branch can be
    /// followed on both sides of the candidate.
    pub slope: Option<f64>,
    /// Scaled residual of the budget-ratio form of the balance equation,
    /// `S1/S2 = N2 P1 h11 / (N1 P2 h22)` with total powers.
    pub total_power_ratio: Option<f64>,
    /// Index of the branch within its layout.
    pub branch: usize,
}

/// A candidate partial-overlap allocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialOverlapSolution {
    pub layout: OverlapLayout,
    pub s1: f64,
    pub s2: f64,
    pub s12: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub c1: f64,
    pub c2: f64,
    pub capacities: [f64; 2],
    /// `B = C1 + C2`.
    pub value: f64,
    pub residuals: EquationResiduals,
    pub diagnostics: OverlapDiagnostics,
}

impl PartialOverlapSolution {
    pub(crate) fn new(
        layout: OverlapLayout,
        point: &OverlapPoint,
        capacities: [f64; 2],
        residuals: EquationResiduals,
        diagnostics: OverlapDiagnostics,
    ) -> Self {
        Self {
            layout,
            s1: point.widths.first,
            s2: point.widths.second,
            s12: point.widths.shared,
            sigma1: point.sigma[0],
            sigma2: point.sigma[1],
            c1: point.increment[0],
            c2: point.increment[1],
            capacities,
            value: capacities[0] + capacities[1],
            residuals,
            diagnostics,
        }
    }

    pub fn point(&self) -> OverlapPoint {
        OverlapPoint {
            widths: Widths {
                first: self.s1,
                second: self.s2,
                shared: self.s12,
            },
            sigma: [self.sigma1, self.sigma2],
            increment: [self.c1, self.c2],
        }
    }
}

/// Search settings for the partial-overlap solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Points per sweep grid, for both `sigma1` and `sigma2`.
    pub scan_points: usize,
    /// Largest scaled residual accepted for a bracketed root.
    pub root_tol: f64,
    /// Largest scaled equation residual accepted for a candidate.
    pub residual_tol: f64,
    /// Largest `|sigma2 dB/dsigma2 / B|` for a stationary point.
    pub stationarity_tol: f64,
    /// Largest relative jump in `sigma1` between linked roots.
    pub link_tol: f64,
    pub parallel: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            scan_points: 1024,
            root_tol: 1e-9,
            residual_tol: 1e-8,
            stationarity_tol: 1e-6,
            link_tol: 0.2,
            parallel: true,
        }
    }
}

/// All candidates found by the search, sorted by layout then `sigma2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialOverlapSearch {
    pub solutions: Vec<PartialOverlapSolution>,
    pub diagnostics: SearchDiagnostics,
}

impl PartialOverlapSearch {
    /// Candidate with the largest `B`.
    pub fn best(&self) -> Option<&PartialOverlapSolution> {
        self.solutions.iter().max_by(|a, b| a.value.total_cmp(&b.value))
    }
}

/// Solves the partial-overlap system on a flat channel, sum objective with
/// equal weights.
pub fn solve_partial_overlap(
    scenario: &Scenario,
    options: &SolverOptions,
    base: LogBase,
) -> Result<PartialOverlapSearch, SolveError> {
    if !scenario.is_flat() {
        return Err(SolveError::Unsupported(
            "partial overlap is only solved for flat channels; use the oracle".into(),
        ));
    }
    let mut solutions = Vec::new();
    let mut diagnostics = SearchDiagnostics::default();
    for layout in OverlapLayout::ALL {
        let (found, d) = search::layout_candidates(scenario, layout, options, base)?;
        solutions.extend(found);
        diagnostics += d;
    }
    solutions.sort_by(|a, b| {
        a.layout
            .cmp(&b.layout)
            .then(a.sigma2.total_cmp(&b.sigma2))
            .then(a.sigma1.total_cmp(&b.sigma1))
    });
    solutions.dedup_by(|a, b| {
        a.layout == b.layout
            && (a.sigma2 - b.sigma2).abs() <= 1e-9 * b.sigma2
            && (a.sigma1 - b.sigma1).abs() <= 1e-9 * b.sigma1
    });
    Ok(PartialOverlapSearch { solutions, diagnostics })
}

/// Roots in `sigma1` of the exclusive-balance equation at fixed `sigma2`,
/// with both exclusive bands present. Roots are returned whether or not the
/// reconstructed widths are feasible.
pub fn sigma1_candidates(sigma2: f64, scenario: &Scenario, options: &SolverOptions) -> Result<Vec<f64>, SolveError> {
    if !scenario.is_flat() {
        return Err(SolveError::Unsupported("flat channel required".into()));
    }
    let curve = search::Curve::new(scenario, OverlapLayout::BothExclusive, options.scan_points)?;
    Ok(curve.roots(sigma2, options.root_tol))
}
