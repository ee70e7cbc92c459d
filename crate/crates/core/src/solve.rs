//! Ranking of the closed-form and partial-overlap candidates.

use serde::{Deserialize, Serialize};

use crate::closed_form::{fdma_optimum, full_share_capacity, FdmaSolution};
use crate::error::SolveError;
use crate::model::{objective_value, Objective, ObjectiveKind, PiecewisePsd, Scenario};
use crate::partial_overlap::{
    assemble_psd, solve_partial_overlap, PartialOverlapSolution, SearchDiagnostics, SolverOptions,
};

/// Relative margin within which two objective values count as tied.
pub const TIE_TOL: f64 = 1e-12;

/// Shape of a candidate allocation. The order is the tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllocationForm {
    Fdma,
    FullShare,
    PartialOverlap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub form: AllocationForm,
    pub objective: f64,
    pub capacities: [f64; 2],
    pub psd: PiecewisePsd,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fdma: Option<FdmaSolution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlap: Option<PartialOverlapSolution>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub objective: Objective,
    /// Index of the winner in `candidates`.
    pub best: usize,
    pub candidates: Vec<Candidate>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchDiagnostics>,
}

impl SolveReport {
    pub fn best(&self) -> &Candidate {
        &self.candidates[self.best]
    }
}

/// Evaluates every analytic candidate on a flat channel and picks the best.
///
/// The partial-overlap search only runs for the sum objective with equal
/// weights; otherwise a note records that it was skipped.
pub fn solve(scenario: &Scenario, objective: &Objective, options: &SolverOptions) -> Result<SolveReport, SolveError> {
    if !scenario.is_flat() {
        return Err(SolveError::Unsupported(
            "frequency-selective gains have no analytic solution; use the oracle".into(),
        ));
    }
    let weights = scenario.weights();
    let width = scenario.width();
    let mut candidates = Vec::new();
    let mut notes = Vec::new();

    let fdma = fdma_optimum(scenario, objective)?;
    candidates.push(Candidate {
        form: AllocationForm::Fdma,
        objective: objective_value(fdma.capacities, weights, objective),
        capacities: fdma.capacities,
        psd: fdma.psd(width)?,
        fdma: Some(fdma),
        overlap: None,
    });

    let full = full_share_capacity(scenario, objective.base)?;
    candidates.push(Candidate {
        form: AllocationForm::FullShare,
        objective: objective_value(full.capacities, weights, objective),
        capacities: full.capacities,
        psd: full.psd,
        fdma: None,
        overlap: None,
    });

    let mut search = None;
    if objective.kind == ObjectiveKind::WeightedSum && weights[0] == weights[1] {
        let found = solve_partial_overlap(scenario, options, objective.base)?;
        search = Some(found.diagnostics);
        match found.best() {
            Some(best) => {
                let psd = assemble_psd(&best.point())?;
                candidates.push(Candidate {
                    form: AllocationForm::PartialOverlap,
                    objective: objective_value(best.capacities, weights, objective),
                    capacities: best.capacities,
                    psd,
                    fdma: None,
                    overlap: Some(best.clone()),
                });
            }
            None => notes.push("no feasible partial-overlap stationary point".into()),
        }
    } else {
        notes.push("analytic partial overlap unavailable for this objective or weighting".into());
    }

    let best = pick_best(&candidates);
    Ok(SolveReport {
        objective: *objective,
        best,
        candidates,
        notes,
        search,
    })
}

fn pick_best(candidates: &[Candidate]) -> usize {
    let top = candidates
        .iter()
        .map(|c| c.objective)
        .fold(f64::NEG_INFINITY, f64::max);
    let margin = TIE_TOL * top.abs().max(1.0);
    candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| c.objective >= top - margin)
        .min_by_key(|(_, c)| c.form)
        .map(|(i, _)| i)
        .unwrap_or(0)
}
