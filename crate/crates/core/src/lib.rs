//! Optimal spectrum sharing between two interfering users on a continuous band.
//!
//! Each user places a power spectral density on `[0, W]` under a total power
//! budget and treats the other user's signal as noise. The crate finds the
//! allocation that maximises a weighted sum or product of the two rates:
//! closed forms for disjoint and fully shared spectrum, a curve-following
//! solver for partial overlap, and a brute-force oracle on a discretized band.

pub mod closed_form;
pub mod error;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod partial_overlap;
pub mod solve;

pub use error::{EquationError, ModelError, OracleError, SolveError};
pub use model::{
    capacity_of, objective_value, total_power, Band, ChannelGains, GainBand, Gains, LogBase, Objective,
    ObjectiveKind, PiecewisePsd, Scenario, UserParams,
};
pub use partial_overlap::SolverOptions;
pub use solve::{solve, AllocationForm, Candidate, SolveReport};
