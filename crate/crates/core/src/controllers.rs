//! The two cascaded controllers.
//!
//! The trailer controller maps the trailer position `x` and heading `alpha`
//! to a desired cab angle `beta'`. The cab controller maps the error
//! `gamma = beta' - beta` to a steering angle `theta` that drives the cab
//! toward that desired angle.

use serde::{Deserialize, Serialize};

use crate::fuzzy::{FuzzyError, LabeledRule, LinguisticVariable, RuleBase};
use crate::plant::PlantState;

pub const DISTANCE_TERMS: [&str; 5] = ["LE", "LC", "CE", "RC", "RI"];
pub const DIRECTION_TERMS: [&str; 7] = ["LB", "LU", "LV", "VE", "RV", "RU", "RB"];
pub const POLARITY_TERMS: [&str; 7] = ["NB", "NM", "NS", "ZE", "PS", "PM", "PB"];

/// Desired cab angle indexed by `[direction][distance]`.
pub const TRAILER_RULES: [[&str; 5]; 7] = [
    ["PS", "PM", "NS", "NM", "NB"],
    ["NS", "PS", "PM", "PB", "PB"],
    ["NS", "NS", "PS", "PM", "PB"],
    ["NM", "NS", "ZE", "PS", "PM"],
    ["NB", "NM", "NS", "PS", "PS"],
    ["NB", "NB", "NM", "NS", "PS"],
    ["PB", "PM", "PS", "NM", "NS"],
];

/// Steering term for each cab-angle error term.
pub const CAB_RULES: [&str; 7] = ["NB", "NM", "NS", "ZE", "PS", "PM", "PB"];

/// Term cores (peaks, and plateau edges for the outer shoulders) of every
/// linguistic variable. Each list is ascending and spans its universe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MembershipDesign {
    pub distance: [f64; 5],
    pub direction: [f64; 7],
    pub cab_angle: [f64; 7],
    pub cab_error: [f64; 7],
    pub steering: [f64; 7],
}

impl Default for MembershipDesign {
    fn default() -> Self {
        Self {
            distance: [-100.0, -20.0, 0.0, 20.0, 100.0],
            direction: [-180.0, -60.0, -15.0, 0.0, 15.0, 60.0, 180.0],
            cab_angle: [-30.0, -20.0, -10.0, 0.0, 10.0, 20.0, 30.0],
            cab_error: [-60.0, -40.0, -20.0, 0.0, 20.0, 40.0, 60.0],
            steering: [-30.0, -20.0, -10.0, 0.0, 10.0, 20.0, 30.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ControlError {
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
    #[error("controller {name} must have {expected} input(s), found {found}")]
    Shape { name: &'static str, expected: usize, found: usize },
    #[error("invalid controller document: {0}")]
    Document(String),
}

/// Controller outputs for one cascade evaluation, in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CascadeOutput {
    pub beta_prime: f64,
    pub gamma: f64,
    pub theta: f64,
    /// Number of controllers that fell back to their universe midpoint.
    #[serde(default)]
    pub fallbacks: u8,
}

/// The trailer controller and the cab controller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawControllers", into = "RawControllers")]
pub struct Controllers {
    trailer: RuleBase,
    cab: RuleBase,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawControllers {
    flc_t: RuleBase,
    flc_c: RuleBase,
}

impl TryFrom<RawControllers> for Controllers {
    type Error = ControlError;

    fn try_from(raw: RawControllers) -> Result<Self, Self::Error> {
        Controllers::new(raw.flc_t, raw.flc_c)
    }
}

impl From<Controllers> for RawControllers {
    fn from(c: Controllers) -> Self {
        RawControllers { flc_t: c.trailer, flc_c: c.cab }
    }
}

impl Default for Controllers {
    fn default() -> Self {
        Self::from_design(&MembershipDesign::default()).expect("default design is valid")
    }
}

impl Controllers {
    pub fn new(trailer: RuleBase, cab: RuleBase) -> Result<Self, ControlError> {
        if trailer.inputs().len() != 2 {
            return Err(ControlError::Shape { name: "flc_t", expected: 2, found: trailer.inputs().len() });
        }
        if cab.inputs().len() != 1 {
            return Err(ControlError::Shape { name: "flc_c", expected: 1, found: cab.inputs().len() });
        }
        Ok(Self { trailer, cab })
    }

    /// Builds both controllers from the fixed rule tables and the given
    /// membership cores.
    pub fn from_design(design: &MembershipDesign) -> Result<Self, ControlError> {
        let distance = LinguisticVariable::from_peaks("x", &DISTANCE_TERMS, &design.distance)?;
        let direction = LinguisticVariable::from_peaks("alpha", &DIRECTION_TERMS, &design.direction)?;
        let cab_angle = LinguisticVariable::from_peaks("beta", &POLARITY_TERMS, &design.cab_angle)?;
        let cab_error = LinguisticVariable::from_peaks("gamma", &POLARITY_TERMS, &design.cab_error)?;
        let steering = LinguisticVariable::from_peaks("theta", &POLARITY_TERMS, &design.steering)?;

        let mut trailer_rules = Vec::with_capacity(35);
        for (dir, row) in DIRECTION_TERMS.iter().zip(TRAILER_RULES.iter()) {
            for (dist, out) in DISTANCE_TERMS.iter().zip(row.iter()) {
                trailer_rules.push(LabeledRule::new(&[dist, dir], out));
            }
        }
        let trailer = RuleBase::new(vec![distance, direction], cab_angle, &trailer_rules)?;

        let cab_rules: Vec<_> = POLARITY_TERMS
            .iter()
            .zip(CAB_RULES.iter())
            .map(|(g, s)| LabeledRule::new(&[g], s))
            .collect();
        let cab = RuleBase::new(vec![cab_error], steering, &cab_rules)?;

        Self::new(trailer, cab)
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("controllers serialize")
    }

    /// Rule base mapping `(x, alpha)` to the desired cab angle.
    pub fn trailer(&self) -> &RuleBase {
        &self.trailer
    }

    /// Rule base mapping the cab-angle error to a steering angle.
    pub fn cab(&self) -> &RuleBase {
        &self.cab
    }

    /// Desired cab angle in degrees for trailer position `x` and heading
    /// `alpha`. Inputs are clamped to their universes.
    pub fn flc_t(&self, x: f64, alpha: f64) -> Result<f64, ControlError> {
        Ok(self.trailer.infer(&[x, alpha])?)
    }

    /// Steering angle in degrees for cab-angle error `gamma`.
    pub fn flc_c(&self, gamma: f64) -> Result<f64, ControlError> {
        Ok(self.cab.infer(&[gamma])?)
    }

    /// Evaluates both controllers for the given plant state.
    pub fn cascade_step(&self, state: &PlantState) -> Result<CascadeOutput, ControlError> {
        let desired = self.trailer.infer_detailed(&[state.x, state.alpha])?;
        let gamma = self.cab.inputs()[0].clamp(desired.value - state.beta);
        if !gamma.is_finite() {
            return Err(FuzzyError::NonFiniteInput { variable: "beta".into(), value: state.beta }.into());
        }
        let steer = self.cab.infer_detailed(&[gamma])?;
        Ok(CascadeOutput {
            beta_prime: desired.value,
            gamma,
            theta: steer.value,
            fallbacks: u8::from(desired.fallback) + u8::from(steer.fallback),
        })
    }
}
