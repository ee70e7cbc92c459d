use sapd_core::oracle::{brute_force, discretize, verify_max_power, verify_rectangular_structure, OracleOptions};
use sapd_core::partial_overlap::sweep;
use sapd_core::{solve, LogBase, Objective, ObjectiveKind, SolverOptions};

use crate::error::CliError;
use crate::report::{sweep_csv, OracleReportFile, SolveReportFile, ToolInfo};
use crate::scenario_file::Loaded;

/// Settings given on the command line. Each one overrides the file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub objective: Option<ObjectiveKind>,
    pub log_base: Option<LogBase>,
    /// Relative tolerance: equation residuals for `solve` and `sweep`, the
    /// shared-channel threshold in power units for `oracle`.
    pub tol: Option<f64>,
    pub channels: Option<usize>,
    pub levels: Option<u32>,
    pub samples: Option<usize>,
}

pub const DEFAULT_SAMPLES: usize = 200;
pub const DEFAULT_ORACLE_TOL: f64 = 1e-9;

fn objective(loaded: &Loaded, o: &Overrides) -> Objective {
    Objective {
        kind: o.objective.or(loaded.objective).unwrap_or_default(),
        base: o.log_base.or(loaded.log_base).unwrap_or_default(),
    }
}

fn solver_options(loaded: &Loaded, o: &Overrides) -> Result<SolverOptions, CliError> {
    let mut opts = loaded.solver;
    if let Some(t) = o.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::Validation(format!("--tol must be positive, got {t}")));
        }
        opts.residual_tol = t;
    }
    Ok(opts)
}

pub fn cmd_solve(loaded: &Loaded, o: &Overrides) -> Result<SolveReportFile, CliError> {
    let obj = objective(loaded, o);
    let report = solve(&loaded.scenario, &obj, &solver_options(loaded, o)?)?;
    Ok(SolveReportFile::new(&loaded.scenario, &report))
}

pub fn cmd_oracle(loaded: &Loaded, o: &Overrides) -> Result<OracleReportFile, CliError> {
    let obj = objective(loaded, o);
    let channels = o.channels.unwrap_or(loaded.oracle.channels);
    let levels = o.levels.unwrap_or(loaded.oracle.levels);
    let tol = o.tol.unwrap_or(DEFAULT_ORACLE_TOL);
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(CliError::Validation(format!("--tol must be nonnegative, got {tol}")));
    }
    let inst = discretize(&loaded.scenario, channels, levels)?;
    let sol = brute_force(&inst, &obj, &OracleOptions { budget: loaded.oracle.budget })?;
    let unit = inst.unit(0).min(inst.unit(1));
    Ok(OracleReportFile {
        tool: ToolInfo::current(),
        command: "oracle".into(),
        log_base: obj.base,
        objective: obj.kind,
        scenario: loaded.scenario.clone(),
        channels,
        levels,
        search_space: u64::try_from(sol.search_space).unwrap_or(u64::MAX),
        evaluated: sol.evaluated,
        bands: sol.allocation.psd(&inst)?.bands().to_vec(),
        max_power: verify_max_power(&sol.allocation, &inst),
        rectangular: verify_rectangular_structure(&sol.allocation, &inst, tol * unit),
        units: sol.allocation.units,
        capacities: sol.capacities,
        value: sol.value,
    })
}

pub fn cmd_sweep(loaded: &Loaded, o: &Overrides) -> Result<String, CliError> {
    let obj = objective(loaded, o);
    if obj.kind != ObjectiveKind::WeightedSum {
        return Err(CliError::Unsupported("the sweep follows the sum objective only".into()));
    }
    let w = loaded.scenario.weights();
    if w[0] != w[1] {
        return Err(CliError::Unsupported("the sweep needs equal user weights".into()));
    }
    let samples = o.samples.unwrap_or(DEFAULT_SAMPLES);
    if samples == 0 {
        return Err(CliError::Validation("--samples must be at least 1".into()));
    }
    let rows = sweep(&loaded.scenario, samples, &solver_options(loaded, o)?, obj.base)?;
    Ok(sweep_csv(&rows))
}
