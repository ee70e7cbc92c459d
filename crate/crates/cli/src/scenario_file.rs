//! TOML scenario files.
//!
//! ```toml
//! width = 1.0
//! objective = "sum"
//! log_base = "2"
//!
//! [user1]
//! power = 26.97
//! noise = 1.0
//!
//! [user2]
//! power = 10.26
//! noise = 1.0
//!
//! [gains]
//! h11 = 1.0
//! h12 = 0.068
//! h21 = 0.282
//! h22 = 1.0
//! ```
//!
//! A frequency-selective channel replaces `[gains]` with a list of
//! `[[gain_bands]]`, each with `start`, `end` and the four gains.

use std::path::Path;

use sapd_core::oracle::DEFAULT_BUDGET;
use sapd_core::{ChannelGains, GainBand, Gains, LogBase, ObjectiveKind, Scenario, SolverOptions, UserParams};
use serde::Deserialize;
use toml::Spanned;

use crate::error::CliError;

pub const DEFAULT_CHANNELS: usize = 16;
pub const DEFAULT_LEVELS: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveName {
    Sum,
    Product,
}

impl From<ObjectiveName> for ObjectiveKind {
    fn from(o: ObjectiveName) -> Self {
        match o {
            ObjectiveName::Sum => ObjectiveKind::WeightedSum,
            ObjectiveName::Product => ObjectiveKind::WeightedProduct,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub width: Spanned<f64>,
    pub user1: UserBlock,
    pub user2: UserBlock,
    pub gains: Option<GainBlock>,
    pub gain_bands: Option<Spanned<Vec<GainBandBlock>>>,
    pub objective: Option<ObjectiveName>,
    pub log_base: Option<LogBase>,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub oracle: OracleBlock,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserBlock {
    pub power: Spanned<f64>,
    pub noise: Spanned<f64>,
    pub weight: Option<Spanned<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainBlock {
    pub h11: Spanned<f64>,
    pub h12: Spanned<f64>,
    pub h21: Spanned<f64>,
    pub h22: Spanned<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainBandBlock {
    pub start: Spanned<f64>,
    pub end: Spanned<f64>,
    pub h11: Spanned<f64>,
    pub h12: Spanned<f64>,
    pub h21: Spanned<f64>,
    pub h22: Spanned<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverBlock {
    pub scan_points: Option<Spanned<usize>>,
    pub root_tol: Option<Spanned<f64>>,
    pub residual_tol: Option<Spanned<f64>>,
    pub stationarity_tol: Option<Spanned<f64>>,
    pub link_tol: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleBlock {
    pub channels: Option<Spanned<usize>>,
    pub levels: Option<Spanned<u32>>,
    pub budget: Option<Spanned<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSettings {
    pub channels: usize,
    pub levels: u32,
    pub budget: u128,
}

/// A validated scenario with the settings the file chose.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub scenario: Scenario,
    pub objective: Option<ObjectiveKind>,
    pub log_base: Option<LogBase>,
    pub solver: SolverOptions,
    pub oracle: OracleSettings,
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let src = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    parse(&src)
}

pub fn parse(src: &str) -> Result<Loaded, CliError> {
    let file: ScenarioFile = toml::from_str(src).map_err(|e| CliError::Parse(e.to_string()))?;
    Checker { src }.build(file)
}

struct Checker<'a> {
    src: &'a str,
}

impl Checker<'_> {
    fn line<T>(&self, v: &Spanned<T>) -> usize {
        let at = v.span().start.min(self.src.len());
        self.src[..at].bytes().filter(|&b| b == b'\n').count() + 1
    }

    fn fail<T>(&self, key: &str, v: &Spanned<T>, what: &str) -> CliError
    where
        T: std::fmt::Display,
    {
        CliError::Validation(format!(
            "line {}: `{key}` {what}, got {}",
            self.line(v),
            v.get_ref()
        ))
    }

    fn positive(&self, key: &str, v: &Spanned<f64>) -> Result<f64, CliError> {
        let x = *v.get_ref();
        if x.is_finite() && x > 0.0 {
            Ok(x)
        } else {
            Err(self.fail(key, v, "must be positive"))
        }
    }

    fn nonnegative(&self, key: &str, v: &Spanned<f64>) -> Result<f64, CliError> {
        let x = *v.get_ref();
        if x.is_finite() && x >= 0.0 {
            Ok(x)
        } else {
            Err(self.fail(key, v, "must be nonnegative"))
        }
    }

    fn user(&self, name: &str, u: &UserBlock) -> Result<UserParams, CliError> {
        let weight = match &u.weight {
            Some(w) => self.positive(&format!("{name}.weight"), w)?,
            None => 1.0,
        };
        Ok(UserParams::new(
            self.positive(&format!("{name}.power"), &u.power)?,
            self.positive(&format!("{name}.noise"), &u.noise)?,
            weight,
        ))
    }

    fn gains(&self, prefix: &str, h: [&Spanned<f64>; 4]) -> Result<Gains, CliError> {
        Ok(Gains::new(
            self.positive(&format!("{prefix}h11"), h[0])?,
            self.nonnegative(&format!("{prefix}h12"), h[1])?,
            self.nonnegative(&format!("{prefix}h21"), h[2])?,
            self.positive(&format!("{prefix}h22"), h[3])?,
        ))
    }

    fn build(&self, f: ScenarioFile) -> Result<Loaded, CliError> {
        let width = self.positive("width", &f.width)?;
        let users = [self.user("user1", &f.user1)?, self.user("user2", &f.user2)?];
        let channel = match (&f.gains, &f.gain_bands) {
            (Some(g), None) => ChannelGains::Flat(self.gains("gains.", [&g.h11, &g.h12, &g.h21, &g.h22])?),
            (None, Some(bands)) => {
                let mut out = Vec::with_capacity(bands.get_ref().len());
                for (n, b) in bands.get_ref().iter().enumerate() {
                    out.push(GainBand {
                        start: self.nonnegative(&format!("gain_bands[{n}].start"), &b.start)?,
                        end: self.positive(&format!("gain_bands[{n}].end"), &b.end)?,
                        gains: self.gains(&format!("gain_bands[{n}]."), [&b.h11, &b.h12, &b.h21, &b.h22])?,
                    });
                }
                ChannelGains::Selective(out)
            }
            (Some(_), Some(b)) => {
                return Err(CliError::Validation(format!(
                    "line {}: `gain_bands` conflicts with `gains`; give one of them",
                    self.line(b)
                )))
            }
            (None, None) => return Err(CliError::Validation("missing `gains` or `gain_bands`".into())),
        };
        let scenario = Scenario::new(width, users, channel).map_err(|e| {
            let at = f.gain_bands.as_ref().map(|b| format!("line {}: ", self.line(b))).unwrap_or_default();
            CliError::Validation(format!("{at}{e}"))
        })?;

        let mut solver = SolverOptions::default();
        let s = &f.solver;
        if let Some(v) = &s.scan_points {
            if *v.get_ref() < 8 {
                return Err(self.fail("solver.scan_points", v, "must be at least 8"));
            }
            solver.scan_points = *v.get_ref();
        }
        for (key, slot, v) in [
            ("solver.root_tol", &mut solver.root_tol, &s.root_tol),
            ("solver.residual_tol", &mut solver.residual_tol, &s.residual_tol),
            ("solver.stationarity_tol", &mut solver.stationarity_tol, &s.stationarity_tol),
            ("solver.link_tol", &mut solver.link_tol, &s.link_tol),
        ] {
            if let Some(v) = v {
                *slot = self.positive(key, v)?;
            }
        }

        let o = &f.oracle;
        let oracle = OracleSettings {
            channels: o.channels.as_ref().map_or(DEFAULT_CHANNELS, |v| *v.get_ref()),
            levels: o.levels.as_ref().map_or(DEFAULT_LEVELS, |v| *v.get_ref()),
            budget: o.budget.as_ref().map_or(DEFAULT_BUDGET, |v| u128::from(*v.get_ref())),
        };
        if let Some(v) = o.channels.as_ref().filter(|v| *v.get_ref() == 0) {
            return Err(self.fail("oracle.channels", v, "must be at least 1"));
        }
        if let Some(v) = o.levels.as_ref().filter(|v| *v.get_ref() == 0) {
            return Err(self.fail("oracle.levels", v, "must be at least 1"));
        }

        Ok(Loaded {
            scenario,
            objective: f.objective.map(Into::into),
            log_base: f.log_base,
            solver,
            oracle,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
width = 1.0

[user1]
power = 26.97
noise = 1.0

[user2]
power = 10.26
noise = 1.0

[gains]
h11 = 1.0
h12 = 0.068
h21 = 0.282
h22 = 1.0
"#;

    #[test]
    fn parses_flat() {
        let l = parse(BASE).unwrap();
        assert!(l.scenario.is_flat());
        assert_eq!(l.scenario.powers(), [26.97, 10.26]);
        assert_eq!(l.scenario.weights(), [1.0, 1.0]);
        assert_eq!(l.objective, None);
        assert_eq!(l.oracle.channels, DEFAULT_CHANNELS);
        assert_eq!(l.solver, SolverOptions::default());
    }

    #[test]
    fn negative_noise_names_key_and_line() {
        let src = BASE.replace("power = 10.26\nnoise = 1.0", "power = 10.26\nnoise = -1.0");
        let err = parse(&src).unwrap_err();
        let msg = err.to_string();
        assert_eq!(err.exit_code(), 2);
        assert!(msg.contains("user2.noise"), "{msg}");
        assert!(msg.contains("line 10"), "{msg}");
    }

    #[test]
    fn unknown_key_rejected() {
        let src = BASE.replace("[user1]\n", "[user1]\nvolume = 3\n");
        let err = parse(&src).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("volume"), "{msg}");
        assert!(msg.contains("line 5"), "{msg}");
    }

    #[test]
    fn selective_bands() {
        let src = BASE.replace(
            "[gains]\nh11 = 1.0\nh12 = 0.068\nh21 = 0.282\nh22 = 1.0\n",
            "[[gain_bands]]\nstart = 0.0\nend = 0.5\nh11 = 1.0\nh12 = 0.1\nh21 = 0.1\nh22 = 2.0\n\n\
             [[gain_bands]]\nstart = 0.5\nend = 1.0\nh11 = 2.0\nh12 = 0.1\nh21 = 0.1\nh22 = 1.0\n",
        );
        let l = parse(&src).unwrap();
        assert!(!l.scenario.is_flat());
    }

    #[test]
    fn gap_in_gain_table_rejected() {
        let src = BASE.replace(
            "[gains]\nh11 = 1.0\nh12 = 0.068\nh21 = 0.282\nh22 = 1.0\n",
            "[[gain_bands]]\nstart = 0.0\nend = 0.4\nh11 = 1.0\nh12 = 0.1\nh21 = 0.1\nh22 = 2.0\n\n\
             [[gain_bands]]\nstart = 0.5\nend = 1.0\nh11 = 2.0\nh12 = 0.1\nh21 = 0.1\nh22 = 1.0\n",
        );
        assert_eq!(parse(&src).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn options_and_overrides() {
        let src = format!(
            "objective = \"product\"\nlog_base = \"e\"\n{BASE}\n[solver]\nscan_points = 64\n\n[oracle]\nchannels = 4\nlevels = 3\n"
        );
        let l = parse(&src).unwrap();
        assert_eq!(l.objective, Some(ObjectiveKind::WeightedProduct));
        assert_eq!(l.log_base, Some(LogBase::E));
        assert_eq!(l.solver.scan_points, 64);
        assert_eq!((l.oracle.channels, l.oracle.levels), (4, 3));
    }

    #[test]
    fn zero_levels_rejected() {
        let src = format!("{BASE}\n[oracle]\nlevels = 0\n");
        let msg = parse(&src).unwrap_err().to_string();
        assert!(msg.contains("oracle.levels") && msg.contains("line 19"), "{msg}");
    }

    #[test]
    fn missing_gains() {
        let src = BASE.split("[gains]").next().unwrap();
        assert_eq!(parse(src).unwrap_err().exit_code(), 2);
    }
}
