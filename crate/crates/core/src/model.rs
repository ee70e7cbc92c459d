//! Problem instances, piecewise-constant PSDs and exact capacity evaluation.
//!
//! Users are indexed `0` and `1`. Gains follow the sender/receiver
//! convention: `gains.get(i, j)` is the gain from the sender of user `i` to
//! the receiver of user `j`, so the interference density seen by receiver
//! `i` is `p_j * gains.get(j, i)`.

use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

use crate::error::ModelError;

/// Relative tolerance used when comparing band boundaries.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Relative slack on the per-user power budget when validating PSDs.
pub const POWER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum LogBase {
    /// Capacities in bits per second.
    #[default]
    #[serde(rename = "2")]
    Two,
    /// Capacities in nats per second.
    #[serde(rename = "e")]
    E,
}

impl LogBase {
    /// `log(1 + x)` in this base.
    #[inline]
    pub fn log1p(self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.ln_1p() / LN_2,
            LogBase::E => x.ln_1p(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LogBase::Two => "2",
            LogBase::E => "e",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// `w1 C1 + w2 C2`
    #[default]
    WeightedSum,
    /// `C1^w1 C2^w2`, evaluated as `exp(w1 ln C1 + w2 ln C2)`.
    WeightedProduct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct Objective {
    pub kind: ObjectiveKind,
    pub base: LogBase,
}

impl Objective {
    pub fn sum() -> Self {
        Self::default()
    }

    pub fn product() -> Self {
        Self {
            kind: ObjectiveKind::WeightedProduct,
            base: LogBase::Two,
        }
    }

    pub fn with_base(mut self, base: LogBase) -> Self {
        self.base = base;
        self
    }

    /// Scalar objective for the given per-user capacities.
    pub fn value(&self, capacities: [f64; 2], weights: [f64; 2]) -> f64 {
        objective_value(capacities, weights, self)
    }
}

/// Per-user physical parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserParams {
    /// Maximum total power (W).
    pub power: f64,
    /// Noise density at the receiver (W/Hz).
    pub noise: f64,
    /// Objective weight.
    pub weight: f64,
}

impl UserParams {
    pub fn new(power: f64, noise: f64, weight: f64) -> Self {
        Self {
            power,
            noise,
            weight,
        }
    }
}

/// 2x2 gain matrix, `get(i, j)` from sender `i` to receiver `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gains(pub [[f64; 2]; 2]);

impl Gains {
    pub fn new(h11: f64, h12: f64, h21: f64, h22: f64) -> Self {
        Gains([[h11, h12], [h21, h22]])
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.0[from][to]
    }

    /// The same link with user labels exchanged.
    pub fn swapped(&self) -> Self {
        let [[h11, h12], [h21, h22]] = self.0;
        Gains([[h22, h21], [h12, h11]])
    }

    fn validate(&self, context: &str) -> Result<(), ModelError> {
        for i in 0..2 {
            for j in 0..2 {
                let h = self.0[i][j];
                let field = format!("{context}h{}{}", i + 1, j + 1);
                if !h.is_finite() || h < 0.0 {
                    return Err(ModelError::InvalidParameter { field, value: h });
                }
                if i == j && h <= 0.0 {
                    return Err(ModelError::InvalidParameter { field, value: h });
                }
            }
        }
        Ok(())
    }
}

/// Gains that hold on the band `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainBand {
    pub start: f64,
    pub end: f64,
    pub gains: Gains,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelGains {
    Flat(Gains),
    /// Piecewise-constant gain table covering `[0, W]` exactly.
    Selective(Vec<GainBand>),
}

/// A two-user instance on the band `[0, W]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    width: f64,
    users: [UserParams; 2],
    channel: ChannelGains,
}

impl Scenario {
    pub fn new(
        width: f64,
        users: [UserParams; 2],
        channel: ChannelGains,
    ) -> Result<Self, ModelError> {
        let s = Self {
            width,
            users,
            channel,
        };
        s.validate()?;
        Ok(s)
    }

    /// Flat-channel instance.
    pub fn flat(width: f64, users: [UserParams; 2], gains: Gains) -> Result<Self, ModelError> {
        Self::new(width, users, ChannelGains::Flat(gains))
    }

    fn validate(&self) -> Result<(), ModelError> {
        positive("width", self.width)?;
        for (i, u) in self.users.iter().enumerate() {
            positive(&format!("user{}.power", i + 1), u.power)?;
            positive(&format!("user{}.noise", i + 1), u.noise)?;
            positive(&format!("user{}.weight", i + 1), u.weight)?;
        }
        match &self.channel {
            ChannelGains::Flat(g) => g.validate("gains."),
            ChannelGains::Selective(bands) => {
                if bands.is_empty() {
                    return Err(ModelError::GainTable("gain table is empty".into()));
                }
                let tol = BOUNDARY_TOL * self.width;
                let mut cursor = 0.0;
                for (n, band) in bands.iter().enumerate() {
                    band.gains.validate(&format!("gain_bands[{n}]."))?;
                    if (band.start - cursor).abs() > tol {
                        return Err(ModelError::GainTable(format!(
                            "gain band {n} starts at {} but the previous band ends at {cursor}",
                            band.start
                        )));
                    }
                    if band.end <= band.start + tol {
                        return Err(ModelError::GainTable(format!(
                            "gain band {n} has non-positive width"
                        )));
                    }
                    cursor = band.end;
                }
                if (cursor - self.width).abs() > tol {
                    return Err(ModelError::GainTable(format!(
                        "gain table ends at {cursor}, band width is {}",
                        self.width
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn users(&self) -> &[UserParams; 2] {
        &self.users
    }

    pub fn user(&self, i: usize) -> &UserParams {
        &self.users[i]
    }

    pub fn powers(&self) -> [f64; 2] {
        [self.users[0].power, self.users[1].power]
    }

    pub fn noises(&self) -> [f64; 2] {
        [self.users[0].noise, self.users[1].noise]
    }

    pub fn weights(&self) -> [f64; 2] {
        [self.users[0].weight, self.users[1].weight]
    }

    pub fn channel(&self) -> &ChannelGains {
        &self.channel
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.channel, ChannelGains::Flat(_))
    }

    pub fn flat_gains(&self) -> Result<&Gains, ModelError> {
        match &self.channel {
            ChannelGains::Flat(g) => Ok(g),
            ChannelGains::Selective(_) => Err(ModelError::NotFlat),
        }
    }

    /// Gains on `[start, end]`, which must lie inside one gain band.
    pub fn gains_on(&self, start: f64, end: f64) -> Result<Gains, ModelError> {
        match &self.channel {
            ChannelGains::Flat(g) => Ok(*g),
            ChannelGains::Selective(bands) => {
                let tol = BOUNDARY_TOL * self.width;
                bands
                    .iter()
                    .find(|b| start >= b.start - tol && end <= b.end + tol)
                    .map(|b| b.gains)
                    .ok_or(ModelError::BandMisaligned { start, end })
            }
        }
    }

    /// Same instance with the two users relabelled.
    pub fn swapped(&self) -> Self {
        let channel = match &self.channel {
            ChannelGains::Flat(g) => ChannelGains::Flat(g.swapped()),
            ChannelGains::Selective(bands) => ChannelGains::Selective(
                bands
                    .iter()
                    .map(|b| GainBand {
                        gains: b.gains.swapped(),
                        ..*b
                    })
                    .collect(),
            ),
        };
        Self {
            width: self.width,
            users: [self.users[1], self.users[0]],
            channel,
        }
    }

    /// Same instance with the given weights.
    pub fn with_weights(&self, weights: [f64; 2]) -> Result<Self, ModelError> {
        let mut users = self.users;
        users[0].weight = weights[0];
        users[1].weight = weights[1];
        Self::new(self.width, users, self.channel.clone())
    }
}

fn positive(field: &str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            field: field.to_string(),
            value,
        })
    }
}

/// One constant piece of a PSD pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub start: f64,
    pub end: f64,
    /// Power density of each user on this band (W/Hz).
    pub density: [f64; 2],
}

impl Band {
    #[inline]
    pub fn width(&self) -> f64 {
        self.end - self.start
    }
}

/// Piecewise-constant power spectral densities of both users over `[0, W]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePsd {
    bands: Vec<Band>,
}

impl PiecewisePsd {
    /// Bands must be contiguous from `0` to `width`, with nonnegative densities.
    pub fn new(bands: Vec<Band>, width: f64) -> Result<Self, ModelError> {
        if bands.is_empty() {
            return Err(ModelError::InvalidPsd("no bands".into()));
        }
        let tol = BOUNDARY_TOL * width;
        let mut cursor = 0.0;
        for (n, b) in bands.iter().enumerate() {
            if (b.start - cursor).abs() > tol {
                return Err(ModelError::InvalidPsd(format!(
                    "band {n} starts at {} instead of {cursor}",
                    b.start
                )));
            }
            if b.end < b.start - tol {
                return Err(ModelError::InvalidPsd(format!("band {n} has negative width")));
            }
            for (i, &d) in b.density.iter().enumerate() {
                if !d.is_finite() || d < 0.0 {
                    return Err(ModelError::InvalidPsd(format!(
                        "band {n} density of user {} is {d}",
                        i + 1
                    )));
                }
            }
            cursor = b.end;
        }
        if (cursor - width).abs() > tol {
            return Err(ModelError::InvalidPsd(format!(
                "bands end at {cursor}, band width is {width}"
            )));
        }
        Ok(Self { bands })
    }

    /// Builds contiguous bands from `(width, densities)` segments starting at 0.
    /// Zero-width segments are dropped.
    pub fn from_segments(segments: &[(f64, [f64; 2])]) -> Result<Self, ModelError> {
        let mut bands = Vec::with_capacity(segments.len());
        let mut cursor = 0.0;
        for &(w, density) in segments {
            if w < 0.0 || !w.is_finite() {
                return Err(ModelError::InvalidPsd(format!("segment width {w}")));
            }
            if w == 0.0 {
                continue;
            }
            bands.push(Band {
                start: cursor,
                end: cursor + w,
                density,
            });
            cursor += w;
        }
        Self::new(bands, cursor)
    }

    /// Both users spread uniformly over `[0, width]`.
    pub fn uniform(width: f64, density: [f64; 2]) -> Result<Self, ModelError> {
        Self::new(
            vec![Band {
                start: 0.0,
                end: width,
                density,
            }],
            width,
        )
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    pub fn width(&self) -> f64 {
        self.bands.last().map_or(0.0, |b| b.end)
    }

    /// Splits band `index` at absolute frequency `at`, keeping densities.
    pub fn split_band(&self, index: usize, at: f64) -> Result<Self, ModelError> {
        let b = self
            .bands
            .get(index)
            .ok_or_else(|| ModelError::InvalidPsd(format!("no band {index}")))?;
        if !(at > b.start && at < b.end) {
            return Err(ModelError::InvalidPsd(format!(
                "split point {at} outside band {index}"
            )));
        }
        let mut bands = self.bands.clone();
        let right = Band { start: at, ..*b };
        bands[index].end = at;
        bands.insert(index + 1, right);
        Ok(Self { bands })
    }

    /// Checks the PSD against a scenario: same band, budgets respected.
    pub fn validate_for(&self, scenario: &Scenario) -> Result<(), ModelError> {
        let tol = BOUNDARY_TOL * scenario.width();
        if (self.width() - scenario.width()).abs() > tol {
            return Err(ModelError::InvalidPsd(format!(
                "PSD covers [0, {}], scenario band is [0, {}]",
                self.width(),
                scenario.width()
            )));
        }
        for i in 0..2 {
            let used = total_power(self, i);
            let budget = scenario.user(i).power;
            if used > budget * (1.0 + POWER_TOL) {
                return Err(ModelError::PowerExceeded {
                    user: i + 1,
                    used,
                    budget,
                });
            }
        }
        Ok(())
    }
}

/// Total power used by `user`: sum of width times density.
pub fn total_power(psd: &PiecewisePsd, user: usize) -> f64 {
    psd.bands.iter().map(|b| b.width() * b.density[user]).sum()
}

/// Capacity of each user on one constant band, per unit width.
#[inline]
pub fn band_rates(gains: &Gains, noise: [f64; 2], density: [f64; 2], base: LogBase) -> [f64; 2] {
    let mut rates = [0.0; 2];
    for i in 0..2 {
        let j = 1 - i;
        if density[i] > 0.0 {
            let sinr = density[i] * gains.get(i, i) / (density[j] * gains.get(j, i) + noise[i]);
            rates[i] = base.log1p(sinr);
        }
    }
    rates
}

/// Per-user capacities of a piecewise-constant PSD pair (exact, no quadrature).
pub fn capacity_of(
    scenario: &Scenario,
    psd: &PiecewisePsd,
    base: LogBase,
) -> Result<[f64; 2], ModelError> {
    let noise = scenario.noises();
    let mut caps = [0.0; 2];
    for b in psd.bands() {
        let w = b.width();
        if w <= 0.0 {
            continue;
        }
        let gains = scenario.gains_on(b.start, b.end)?;
        let r = band_rates(&gains, noise, b.density, base);
        caps[0] += w * r[0];
        caps[1] += w * r[1];
    }
    Ok(caps)
}

/// Weighted-sum or weighted-product objective. A product with any zero
/// capacity is 0.
pub fn objective_value(capacities: [f64; 2], weights: [f64; 2], objective: &Objective) -> f64 {
    match objective.kind {
        ObjectiveKind::WeightedSum => weights[0] * capacities[0] + weights[1] * capacities[1],
        ObjectiveKind::WeightedProduct => {
            if capacities.iter().any(|&c| c <= 0.0) {
                0.0
            } else {
                (weights[0] * capacities[0].ln() + weights[1] * capacities[1].ln()).exp()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_scenario(h12: f64, h21: f64) -> Scenario {
        Scenario::flat(
            1.0,
            [UserParams::new(1.0, 1.0, 1.0); 2],
            Gains::new(1.0, h12, h21, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn zero_power_has_zero_capacity() {
        let s = unit_scenario(0.5, 0.5);
        let psd = PiecewisePsd::uniform(1.0, [0.0, 0.0]).unwrap();
        assert_eq!(capacity_of(&s, &psd, LogBase::Two).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn single_user_unit_snr_is_one_bit() {
        let s = unit_scenario(0.5, 0.5);
        let psd = PiecewisePsd::uniform(1.0, [1.0, 0.0]).unwrap();
        let c = capacity_of(&s, &psd, LogBase::Two).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-15);
        assert_eq!(c[1], 0.0);
    }

    #[test]
    fn halving_a_band_keeps_capacity() {
        let s = unit_scenario(0.3, 0.7);
        let psd = PiecewisePsd::from_segments(&[(0.4, [2.0, 0.5]), (0.6, [0.1, 1.0])]).unwrap();
        let split = psd.split_band(1, 0.7).unwrap();
        let a = capacity_of(&s, &psd, LogBase::Two).unwrap();
        let b = capacity_of(&s, &split, LogBase::Two).unwrap();
        for i in 0..2 {
            assert!((a[i] - b[i]).abs() <= 1e-14 * a[i]);
        }
    }

    #[test]
    fn total_power_cases() {
        let zero = PiecewisePsd::uniform(2.0, [0.0, 0.0]).unwrap();
        assert_eq!(total_power(&zero, 0), 0.0);
        let flat = PiecewisePsd::uniform(2.0, [1.5, 0.0]).unwrap();
        assert_eq!(total_power(&flat, 0), 3.0);
        let two = PiecewisePsd::from_segments(&[(0.5, [2.0, 0.0]), (1.5, [4.0, 0.0])]).unwrap();
        assert_eq!(total_power(&two, 0), 0.5 * 2.0 + 1.5 * 4.0);
    }

    #[test]
    fn objective_examples() {
        let sum = Objective::sum();
        assert_eq!(objective_value([1.0, 2.0], [1.0, 1.0], &sum), 3.0);
        assert_eq!(objective_value([1.0, 1.0], [2.0, 1.0], &sum), 3.0);
        assert_eq!(objective_value([0.0, 5.0], [1.0, 1.0], &Objective::product()), 0.0);
        let p = objective_value([2.0, 3.0], [1.0, 1.0], &Objective::product());
        assert!((p - 6.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_parameters() {
        let err = Scenario::flat(
            1.0,
            [UserParams::new(1.0, -1.0, 1.0), UserParams::new(1.0, 1.0, 1.0)],
            Gains::new(1.0, 0.0, 0.0, 1.0),
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::InvalidParameter { ref field, .. } if field == "user1.noise"));
        let err = Scenario::flat(
            1.0,
            [UserParams::new(1.0, 1.0, 1.0); 2],
            Gains::new(0.0, 0.0, 0.0, 1.0),
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::InvalidParameter { ref field, .. } if field == "gains.h11"));
    }

    #[test]
    fn gain_table_must_cover_band() {
        let g = Gains::new(1.0, 0.1, 0.1, 1.0);
        let users = [UserParams::new(1.0, 1.0, 1.0); 2];
        let gap = ChannelGains::Selective(vec![
            GainBand { start: 0.0, end: 0.4, gains: g },
            GainBand { start: 0.5, end: 1.0, gains: g },
        ]);
        assert!(matches!(
            Scenario::new(1.0, users, gap),
            Err(ModelError::GainTable(_))
        ));
        let short = ChannelGains::Selective(vec![GainBand { start: 0.0, end: 0.9, gains: g }]);
        assert!(Scenario::new(1.0, users, short).is_err());
    }

    #[test]
    fn psd_straddling_gain_boundary_is_rejected() {
        let users = [UserParams::new(1.0, 1.0, 1.0); 2];
        let s = Scenario::new(
            1.0,
            users,
            ChannelGains::Selective(vec![
                GainBand { start: 0.0, end: 0.5, gains: Gains::new(1.0, 0.1, 0.1, 1.0) },
                GainBand { start: 0.5, end: 1.0, gains: Gains::new(2.0, 0.1, 0.1, 2.0) },
            ]),
        )
        .unwrap();
        let psd = PiecewisePsd::from_segments(&[(0.3, [1.0, 1.0]), (0.7, [1.0, 1.0])]).unwrap();
        assert!(matches!(
            capacity_of(&s, &psd, LogBase::Two),
            Err(ModelError::BandMisaligned { .. })
        ));
        let ok = PiecewisePsd::from_segments(&[(0.5, [1.0, 1.0]), (0.5, [1.0, 1.0])]).unwrap();
        let c = capacity_of(&s, &ok, LogBase::Two).unwrap();
        let expected = 0.5 * (1.0f64 + 1.0 / 1.1).log2() + 0.5 * (1.0f64 + 2.0 / 1.1).log2();
        assert!((c[0] - expected).abs() < 1e-14);
    }

    #[test]
    fn psd_validation() {
        assert!(PiecewisePsd::from_segments(&[(0.5, [-1.0, 0.0])]).is_err());
        let s = unit_scenario(0.1, 0.1);
        let over = PiecewisePsd::uniform(1.0, [1.5, 0.5]).unwrap();
        assert!(matches!(
            over.validate_for(&s),
            Err(ModelError::PowerExceeded { user: 1, .. })
        ));
        let ok = PiecewisePsd::uniform(1.0, [1.0, 0.5]).unwrap();
        ok.validate_for(&s).unwrap();
    }

    #[test]
    fn swap_exchanges_everything() {
        let s = Scenario::flat(
            2.0,
            [UserParams::new(1.0, 2.0, 3.0), UserParams::new(4.0, 5.0, 6.0)],
            Gains::new(1.0, 0.2, 0.3, 0.9),
        )
        .unwrap();
        let t = s.swapped();
        assert_eq!(t.powers(), [4.0, 1.0]);
        assert_eq!(t.flat_gains().unwrap(), &Gains::new(0.9, 0.3, 0.2, 1.0));
        assert_eq!(t.swapped(), s);
    }
}
