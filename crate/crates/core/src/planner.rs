//! Data budget for a model size: how many hours of transcribed speech
//! supply the recommended number of training tokens.
//!
//! ```text
//! hours = params · tokens_per_param / (words_per_min · tokens_per_word · 60)
//! ```

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PlannerError {
    #[error("planner: {name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("planner: cannot parse {0:?} as a number or a fraction")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingAssumptions {
    /// Words per minute of speech.
    pub wpm: f64,
    /// Tokens per word.
    pub tpw: f64,
    /// Training tokens per model parameter.
    pub tpp: f64,
}

impl Default for ScalingAssumptions {
    fn default() -> Self {
        ScalingAssumptions { wpm: 120.0, tpw: 4.0 / 3.0, tpp: 20.0 }
    }
}

impl ScalingAssumptions {
    pub fn validate(&self) -> Result<(), PlannerError> {
        for (name, value) in [("wpm", self.wpm), ("tpw", self.tpw), ("tpp", self.tpp)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(PlannerError::NonPositive { name, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HoursPlan {
    pub params: u64,
    pub hours: f64,
    /// `hours` rounded to the nearest whole hour.
    pub rounded_hours: u64,
}

pub fn optimal_hours(params: u64, a: &ScalingAssumptions) -> Result<HoursPlan, PlannerError> {
    if params == 0 {
        return Err(PlannerError::NonPositive { name: "params", value: 0.0 });
    }
    a.validate()?;
    let hours = params as f64 * a.tpp / (a.wpm * a.tpw * 60.0);
    Ok(HoursPlan { params, hours, rounded_hours: hours.round() as u64 })
}

/// Parses `"1.5"` or `"4/3"`.
pub fn parse_ratio(s: &str) -> Result<f64, PlannerError> {
    let err = || PlannerError::Parse(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n = f64::from_str(n.trim()).map_err(|_| err())?;
            let d = f64::from_str(d.trim()).map_err(|_| err())?;
            if d == 0.0 {
                return Err(err());
            }
            Ok(n / d)
        }
        None => f64::from_str(s.trim()).map_err(|_| err()),
    }
}
