//! The algebraic pieces of the partial-overlap system.
//!
//! Variables: exclusive widths `S1`, `S2`, shared width `S12`, shared-band
//! densities `sigma1`, `sigma2` and exclusive increments `c1`, `c2` (user `i`
//! runs at `sigma_i + c_i` in its exclusive band). The equations are
//!
//! 1. `S1 + S2 + S12 = W`
//! 2. `S1 (sigma1 + c1) + S12 sigma1 = P1`
//! 3. `S2 (sigma2 + c2) + S12 sigma2 = P2`
//! 4. exclusive-band balance `N1 h22 (sigma2 + c2) = N2 h11 (sigma1 + c1)`
//! 5. `gamma_first(sigma1, sigma2, c1) = 0`
//! 6. `gamma_second(sigma1, sigma2, c2) = 0`
//!
//! Equation 4 is the disjoint-split optimality condition applied to the
//! power actually spent in the exclusive bands; in ratio form it reads
//! `S1/S2 = N2 P1x h11 / (N1 P2x h22)` with `Pix` the exclusive-band powers.

use serde::{Deserialize, Serialize};

use super::stationarity_generated as generated;
use crate::error::{EquationError, ModelError};
use crate::model::{LogBase, PiecewisePsd, Scenario};

/// Flat-channel constants in the form used by the balance polynomials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatParams {
    pub width: f64,
    pub p1: f64,
    pub p2: f64,
    pub n1: f64,
    pub n2: f64,
    pub h11: f64,
    pub h12: f64,
    pub h21: f64,
    pub h22: f64,
}

impl FlatParams {
    pub fn from_scenario(scenario: &Scenario) -> Result<Self, ModelError> {
        let g = scenario.flat_gains()?;
        let [u1, u2] = *scenario.users();
        Ok(Self {
            width: scenario.width(),
            p1: u1.power,
            p2: u2.power,
            n1: u1.noise,
            n2: u2.noise,
            h11: g.get(0, 0),
            h12: g.get(0, 1),
            h21: g.get(1, 0),
            h22: g.get(1, 1),
        })
    }
}

/// Widths of the three sub-bands, laid out as `S1 | S12 | S2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Widths {
    pub first: f64,
    pub second: f64,
    pub shared: f64,
}

impl Widths {
    pub fn is_nonnegative(&self) -> bool {
        self.first >= 0.0 && self.second >= 0.0 && self.shared >= 0.0
    }
}

/// A full assignment of the seven variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapPoint {
    pub widths: Widths,
    /// `[sigma1, sigma2]`
    pub sigma: [f64; 2],
    /// `[c1, c2]`
    pub increment: [f64; 2],
}

impl OverlapPoint {
    pub fn exclusive_density(&self, user: usize) -> f64 {
        self.sigma[user] + self.increment[user]
    }
}

/// `gamma_first` for the given scenario.
pub fn gamma1(sigma1: f64, sigma2: f64, c1: f64, scenario: &Scenario) -> Result<f64, ModelError> {
    let p = FlatParams::from_scenario(scenario)?;
    Ok(gamma_first(&p, sigma1, sigma2, c1))
}

/// `gamma_second` for the given scenario.
pub fn gamma2(sigma1: f64, sigma2: f64, c2: f64, scenario: &Scenario) -> Result<f64, ModelError> {
    let p = FlatParams::from_scenario(scenario)?;
    Ok(gamma_second(&p, sigma1, sigma2, c2))
}

pub(crate) fn gamma_first(p: &FlatParams, sigma1: f64, sigma2: f64, c1: f64) -> f64 {
    let (constant, slope) = generated::gamma_first_affine(p, sigma1, sigma2);
    constant + slope * c1
}

pub(crate) fn gamma_second(p: &FlatParams, sigma1: f64, sigma2: f64, c2: f64) -> f64 {
    let (constant, slope) = generated::gamma_second_affine(p, sigma1, sigma2);
    constant + slope * c2
}

/// `gamma_first` divided by its largest monomial magnitude.
pub(crate) fn gamma_first_scaled(p: &FlatParams, sigma1: f64, sigma2: f64, c1: f64) -> f64 {
    let terms = generated::gamma_first_terms(p, sigma1, sigma2, c1);
    debug_assert_eq!(terms.len(), generated::GAMMA_FIRST_TERMS);
    scaled_sum(&terms)
}

pub(crate) fn gamma_second_scaled(p: &FlatParams, sigma1: f64, sigma2: f64, c2: f64) -> f64 {
    let terms = generated::gamma_second_terms(p, sigma1, sigma2, c2);
    debug_assert_eq!(terms.len(), generated::GAMMA_SECOND_TERMS);
    scaled_sum(&terms)
}

fn scaled_sum(terms: &[f64]) -> f64 {
    let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    if scale == 0.0 {
        0.0
    } else {
        terms.iter().sum::<f64>() / scale
    }
}

/// Increments `[c1, c2]` solving `gamma_first = 0` and `gamma_second = 0`.
///
/// Both polynomials are affine in their increment. Negative values are
/// returned as-is; callers treat them as infeasible.
pub fn solve_c_from_gammas(sigma1: f64, sigma2: f64, scenario: &Scenario) -> Result<[f64; 2], EquationError> {
    let p = FlatParams::from_scenario(scenario)?;
    Ok([increment_first(&p, sigma1, sigma2)?, increment_second(&p, sigma1, sigma2)?])
}

pub(crate) fn increment_first(p: &FlatParams, sigma1: f64, sigma2: f64) -> Result<f64, EquationError> {
    let (constant, slope) = generated::gamma_first_affine(p, sigma1, sigma2);
    if slope == 0.0 || !slope.is_finite() {
        return Err(EquationError::Singular("gamma_first has no c1 term"));
    }
    Ok(-constant / slope)
}

pub(crate) fn increment_second(p: &FlatParams, sigma1: f64, sigma2: f64) -> Result<f64, EquationError> {
    let (constant, slope) = generated::gamma_second_affine(p, sigma1, sigma2);
    if slope == 0.0 || !slope.is_finite() {
        return Err(EquationError::Singular("gamma_second has no c2 term"));
    }
    Ok(-constant / slope)
}

/// Widths from the band-sum and power equations (1)-(3), by Cramer's rule on
///
/// ```text
///  c1 S1 - sigma1 S2 = P1 - W sigma1
/// -sigma2 S1 + c2 S2 = P2 - W sigma2
/// ```
pub fn widths_from_powers(
    sigma: [f64; 2],
    increment: [f64; 2],
    scenario: &Scenario,
) -> Result<Widths, EquationError> {
    let p = FlatParams::from_scenario(scenario)?;
    widths_for(&p, sigma, increment)
}

pub(crate) fn widths_for(p: &FlatParams, sigma: [f64; 2], increment: [f64; 2]) -> Result<Widths, EquationError> {
    let [s1, s2] = sigma;
    let [c1, c2] = increment;
    let det = c1 * c2 - s1 * s2;
    if det == 0.0 || !det.is_finite() {
        return Err(EquationError::Singular("c1 c2 = sigma1 sigma2"));
    }
    let w = p.width;
    let first = (p.p1 * c2 - w * s1 * c2 + p.p2 * s1 - w * s1 * s2) / det;
    let second = (p.p2 * c1 - w * s2 * c1 + p.p1 * s2 - w * s1 * s2) / det;
    Ok(Widths {
        first,
        second,
        shared: w - first - second,
    })
}

/// Exclusive-band balance residual `N1 h22 (sigma2 + c2) - N2 h11 (sigma1 + c1)`
/// with `c1`, `c2` eliminated through the balance polynomials.
pub fn ratio_residual(sigma1: f64, sigma2: f64, scenario: &Scenario) -> Result<f64, EquationError> {
    let p = FlatParams::from_scenario(scenario)?;
    let c = [increment_first(&p, sigma1, sigma2)?, increment_second(&p, sigma1, sigma2)?];
    Ok(exclusive_balance(&p, [sigma1, sigma2], c).0)
}

/// `(raw residual, scale)` of the exclusive-band balance.
pub(crate) fn exclusive_balance(p: &FlatParams, sigma: [f64; 2], increment: [f64; 2]) -> (f64, f64) {
    let lhs = p.n1 * p.h22 * (sigma[1] + increment[1]);
    let rhs = p.n2 * p.h11 * (sigma[0] + increment[0]);
    (lhs - rhs, lhs.abs().max(rhs.abs()))
}

/// Width ratio matched against total budgets, `S1 N1 P2 h22 - S2 N2 P1 h11`,
/// scaled. Reported as a diagnostic only.
pub(crate) fn total_power_ratio_residual(p: &FlatParams, widths: &Widths) -> f64 {
    let lhs = widths.first * p.n1 * p.p2 * p.h22;
    let rhs = widths.second * p.n2 * p.p1 * p.h11;
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs) / scale
    }
}

/// Total capacity of a three-band layout.
pub fn objective_b(point: &OverlapPoint, scenario: &Scenario, base: LogBase) -> Result<f64, ModelError> {
    let p = FlatParams::from_scenario(scenario)?;
    let c = capacities_for(&p, point, base);
    Ok(c[0] + c[1])
}

/// Per-user capacities of a three-band layout.
pub(crate) fn capacities_for(p: &FlatParams, point: &OverlapPoint, base: LogBase) -> [f64; 2] {
    let [s1, s2] = point.sigma;
    let x1 = point.exclusive_density(0);
    let x2 = point.exclusive_density(1);
    let w = point.widths;
    let own = |width: f64, density: f64, h: f64, n: f64| {
        if width > 0.0 && density > 0.0 {
            width * base.log1p(density * h / n)
        } else {
            0.0
        }
    };
    let shared1 = if w.shared > 0.0 && s1 > 0.0 {
        w.shared * base.log1p(s1 * p.h11 / (s2 * p.h21 + p.n1))
    } else {
        0.0
    };
    let shared2 = if w.shared > 0.0 && s2 > 0.0 {
        w.shared * base.log1p(s2 * p.h22 / (s1 * p.h12 + p.n2))
    } else {
        0.0
    };
    [
        own(w.first, x1, p.h11, p.n1) + shared1,
        own(w.second, x2, p.h22, p.n2) + shared2,
    ]
}

/// The PSD pair of a three-band layout, `S1 | S12 | S2`.
pub fn assemble_psd(point: &OverlapPoint) -> Result<PiecewisePsd, ModelError> {
    let w = point.widths;
    PiecewisePsd::from_segments(&[
        (w.first, [point.exclusive_density(0), 0.0]),
        (w.shared, point.sigma),
        (w.second, [0.0, point.exclusive_density(1)]),
    ])
}
