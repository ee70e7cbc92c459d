//! JSON reports and the sweep CSV.

use std::io;

use sapd_core::closed_form::FdmaSolution;
use sapd_core::oracle::{MaxPowerReport, RectangularReport};
use sapd_core::partial_overlap::{EquationResiduals, OverlapDiagnostics, OverlapLayout, SearchDiagnostics, SweepRow};
use sapd_core::{AllocationForm, Band, Candidate, LogBase, ObjectiveKind, Scenario, SolveReport};
use serde::ser::Serialize;
use serde::Deserialize;
use serde_json::ser::{Formatter, PrettyFormatter};

pub const TOOL_NAME: &str = "sapd";

#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl ToolInfo {
    pub fn current() -> Self {
        Self {
            name: TOOL_NAME.into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

/// The seven unknowns of a partial-overlap allocation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, Deserialize)]
pub struct OverlapVariables {
    pub layout: OverlapLayout,
    pub s1: f64,
    pub s2: f64,
    pub s12: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
pub struct CandidateRecord {
    pub form: AllocationForm,
    pub objective: f64,
    pub capacities: [f64; 2],
    pub bands: Vec<Band>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fdma_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<OverlapVariables>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residuals: Option<EquationResiduals>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<OverlapDiagnostics>,
}

impl CandidateRecord {
    fn from_candidate(c: &Candidate) -> Self {
        let overlap = c.overlap.as_ref();
        Self {
            form: c.form,
            objective: c.objective,
            capacities: c.capacities,
            bands: c.psd.bands().to_vec(),
            fdma_fraction: c.fdma.as_ref().map(|f: &FdmaSolution| f.fraction),
            variables: overlap.map(|o| OverlapVariables {
                layout: o.layout,
                s1: o.s1,
                s2: o.s2,
                s12: o.s12,
                sigma1: o.sigma1,
                sigma2: o.sigma2,
                c1: o.c1,
                c2: o.c2,
            }),
            residuals: overlap.map(|o| o.residuals),
            diagnostics: overlap.map(|o| o.diagnostics),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
pub struct SolveReportFile {
    pub tool: ToolInfo,
    pub command: String,
    pub log_base: LogBase,
    pub objective: ObjectiveKind,
    pub scenario: Scenario,
    /// Index into `candidates`.
    pub best: usize,
    pub best_form: AllocationForm,
    pub best_objective: f64,
    pub candidates: Vec<CandidateRecord>,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchDiagnostics>,
}

impl SolveReportFile {
    pub fn new(scenario: &Scenario, report: &SolveReport) -> Self {
        Self {
            tool: ToolInfo::current(),
            command: "solve".into(),
            log_base: report.objective.base,
            objective: report.objective.kind,
            scenario: scenario.clone(),
            best: report.best,
            best_form: report.best().form,
            best_objective: report.best().objective,
            candidates: report.candidates.iter().map(CandidateRecord::from_candidate).collect(),
            notes: report.notes.clone(),
            search: report.search,
        }
    }

    pub fn best(&self) -> &CandidateRecord {
        &self.candidates[self.best]
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, Deserialize)]
pub struct OracleReportFile {
    pub tool: ToolInfo,
    pub command: String,
    pub log_base: LogBase,
    pub objective: ObjectiveKind,
    pub scenario: Scenario,
    pub channels: usize,
    pub levels: u32,
    /// Canonical allocations covered by the search.
    pub search_space: u64,
    pub evaluated: u64,
    /// Power units `[user1, user2]` on each channel.
    pub units: Vec<[u32; 2]>,
    pub bands: Vec<Band>,
    pub capacities: [f64; 2],
    pub value: f64,
    pub max_power: MaxPowerReport,
    pub rectangular: RectangularReport,
}

/// Serializer formatter that writes every float with 17 significant digits.
pub struct FullPrecision<'a>(PrettyFormatter<'a>);

impl Default for FullPrecision<'_> {
    fn default() -> Self {
        Self(PrettyFormatter::new())
    }
}

fn write_float<W: ?Sized + io::Write>(w: &mut W, v: f64) -> io::Result<()> {
    write!(w, "{v:.16e}")
}

impl Formatter for FullPrecision<'_> {
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write_float(w, f64::from(v))
    }
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write_float(w, v)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with full-precision floats and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision::default());
    value.serialize(&mut ser).expect("report types always serialize");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

pub const SWEEP_HEADER: [&str; 5] = ["sigma2", "branch", "sigma1", "B", "feasible"];

/// Sweep rows as CSV. `B` is empty where the reconstruction is infeasible.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(SWEEP_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            format!("{:.16e}", r.sigma2),
            r.branch.clone(),
            format!("{:.16e}", r.sigma1),
            r.value.map(|v| format!("{v:.16e}")).unwrap_or_default(),
            r.feasible.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV of ASCII fields")
}
