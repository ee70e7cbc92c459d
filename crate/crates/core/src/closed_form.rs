//! Closed-form optima for disjoint (FDMA) and fully shared spectrum, the
//! single-user split between two interference levels, and the search bound
//! on the shared-band density of user 2.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::{
    capacity_of, objective_value, LogBase, Objective, ObjectiveKind, PiecewisePsd, Scenario,
};
use crate::numeric::golden_max;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FdmaMethod {
    /// Ratio formula, valid when both weights are equal.
    ClosedForm,
    /// Golden-section search over the split fraction.
    Numeric,
}

/// Optimal disjoint split: user 1 on `[0, yW]`, user 2 on `(yW, W]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdmaSolution {
    /// Fraction `y` of the band given to user 1.
    pub fraction: f64,
    /// Density of each user inside its own sub-band.
    pub densities: [f64; 2],
    pub capacities: [f64; 2],
    /// `C1 + C2`.
    pub total: f64,
    pub method: FdmaMethod,
}

impl FdmaSolution {
    pub fn psd(&self, width: f64) -> Result<PiecewisePsd, ModelError> {
        let y = self.fraction;
        PiecewisePsd::from_segments(&[
            (y * width, [self.densities[0], 0.0]),
            ((1.0 - y) * width, [0.0, self.densities[1]]),
        ])
    }
}

/// Per-user capacities when user 1 holds the fraction `y` of the band and
/// each user spends its whole budget in its own sub-band.
pub fn fdma_capacities(scenario: &Scenario, y: f64, base: LogBase) -> Result<[f64; 2], ModelError> {
    let g = scenario.flat_gains()?;
    let w = scenario.width();
    let snr = |i: usize, share: f64| -> f64 {
        if share <= 0.0 {
            return 0.0;
        }
        let u = scenario.user(i);
        share * w * base.log1p(u.power * g.get(i, i) / (share * w * u.noise))
    };
    Ok([snr(0, y), snr(1, 1.0 - y)])
}

/// Best disjoint allocation.
///
/// With equal weights under the sum objective the split is the ratio
/// `N2 P1 h11 : N1 P2 h22` and the total is `W log(1 + P1h11/(WN1) + P2h22/(WN2))`.
/// Other weightings and the product objective fall back to a golden-section
/// search over `y`, where the objective is concave (sum) or log-concave
/// (product).
pub fn fdma_optimum(scenario: &Scenario, objective: &Objective) -> Result<FdmaSolution, ModelError> {
    let g = *scenario.flat_gains()?;
    let w = scenario.width();
    let [u1, u2] = *scenario.users();
    let weights = scenario.weights();
    let base = objective.base;

    let closed = objective.kind == ObjectiveKind::WeightedSum && weights[0] == weights[1];
    let (fraction, method) = if closed {
        let a = u2.noise * u1.power * g.get(0, 0);
        let b = u1.noise * u2.power * g.get(1, 1);
        (a / (a + b), FdmaMethod::ClosedForm)
    } else {
        let f = |y: f64| {
            fdma_capacities(scenario, y, base)
                .map(|c| objective_value(c, weights, objective))
                .unwrap_or(f64::NEG_INFINITY)
        };
        let (y, _) = golden_max(f, 0.0, 1.0, 1e-13);
        (y, FdmaMethod::Numeric)
    };

    let capacities = fdma_capacities(scenario, fraction, base)?;
    let total = if closed {
        w * base.log1p(u1.power * g.get(0, 0) / (w * u1.noise) + u2.power * g.get(1, 1) / (w * u2.noise))
    } else {
        capacities[0] + capacities[1]
    };
    let density = |i: usize, share: f64| {
        if share > 0.0 {
            scenario.user(i).power / (share * w)
        } else {
            0.0
        }
    };
    Ok(FdmaSolution {
        fraction,
        densities: [density(0, fraction), density(1, 1.0 - fraction)],
        capacities,
        total,
        method,
    })
}

/// Both users spread their whole budget uniformly over `[0, W]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullShare {
    pub capacities: [f64; 2],
    pub total: f64,
    pub psd: PiecewisePsd,
}

/// Capacity when both users occupy the entire band.
pub fn full_share_capacity(scenario: &Scenario, base: LogBase) -> Result<FullShare, ModelError> {
    let g = scenario.flat_gains()?;
    let w = scenario.width();
    let [u1, u2] = *scenario.users();
    let c1 = w * base.log1p(u1.power * g.get(0, 0) / (u2.power * g.get(1, 0) + w * u1.noise));
    let c2 = w * base.log1p(u2.power * g.get(1, 1) / (u1.power * g.get(0, 1) + w * u2.noise));
    let psd = PiecewisePsd::uniform(w, [u1.power / w, u2.power / w])?;
    Ok(FullShare {
        capacities: [c1, c2],
        total: c1 + c2,
        psd,
    })
}

/// Single-user power split between `[0, w]` and `(w, W]` under constant
/// interference densities `I` and `I'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoBandSplit {
    /// Fraction of the power placed in `[0, w]`.
    pub fraction: f64,
    /// Densities in `[0, w]` and `(w, W]`.
    pub densities: [f64; 2],
    /// The unconstrained optimum fell outside `[0, 1]` and was clamped.
    pub clamped: bool,
}

/// Water-filling between two bands with different interference.
///
/// The unconstrained split is `k = w/W + w (W - w)(I' - I) / (W P h)`, with
/// densities `(P + (W - w)(I' - I)/h) / W` and `(P + w (I - I')/h) / W`.
/// The band with more interference gets the lower density.
pub fn two_band_power_split(
    power: f64,
    gain: f64,
    interference_low: f64,
    interference_high: f64,
    split_at: f64,
    width: f64,
) -> TwoBandSplit {
    debug_assert!(split_at > 0.0 && split_at < width);
    let w = split_at;
    let gap = interference_high - interference_low;
    let k = w / width + w * (width - w) * gap / (width * power * gain);
    if (0.0..=1.0).contains(&k) {
        TwoBandSplit {
            fraction: k,
            densities: [
                (power + (width - w) * gap / gain) / width,
                (power - w * gap / gain) / width,
            ],
            clamped: false,
        }
    } else {
        let k = k.clamp(0.0, 1.0);
        TwoBandSplit {
            fraction: k,
            densities: [k * power / w, (1.0 - k) * power / (width - w)],
            clamped: true,
        }
    }
}

/// Upper bound `gamma (P1 + P2) / W` on user 2's shared-band density, with
/// `gamma = max(1, N2 h11 / (N1 h22))`.
pub fn sigma2_upper_bound(scenario: &Scenario) -> Result<f64, ModelError> {
    let g = scenario.flat_gains()?;
    let [u1, u2] = *scenario.users();
    let gamma = (u2.noise * g.get(0, 0) / (u1.noise * g.get(1, 1))).max(1.0);
    Ok(gamma * (u1.power + u2.power) / scenario.width())
}

/// Mirror of [`sigma2_upper_bound`] for user 1's shared-band density.
pub fn sigma1_upper_bound(scenario: &Scenario) -> Result<f64, ModelError> {
    sigma2_upper_bound(&scenario.swapped())
}

/// Capacity of a single user alone on the band with its full budget.
pub fn single_user_capacity(scenario: &Scenario, user: usize, base: LogBase) -> Result<f64, ModelError> {
    let g = scenario.flat_gains()?;
    let u = scenario.user(user);
    let w = scenario.width();
    Ok(w * base.log1p(u.power * g.get(user, user) / (w * u.noise)))
}

/// Evaluates an FDMA split through the generic capacity routine.
pub fn fdma_capacity_via_psd(
    scenario: &Scenario,
    solution: &FdmaSolution,
    base: LogBase,
) -> Result<[f64; 2], ModelError> {
    capacity_of(scenario, &solution.psd(scenario.width())?, base)
}
