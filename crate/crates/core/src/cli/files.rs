//! JSON input documents: scenario files and sweep grid specs.

use serde::{Deserialize, Serialize};

use crate::plant::{DockTolerance, PlantParams, PlantState, X_BOUND};
use crate::simulation::{GridAxis, ModeSelection, Scenario, SweepGrid};

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialFile {
    pub x: f64,
    pub y: f64,
    pub alpha_deg: f64,
    pub beta_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsFile {
    pub v: f64,
    pub l_c: f64,
    pub l_t: f64,
    pub theta_max_deg: f64,
    pub beta_max_deg: f64,
    pub jackknife_limit_deg: f64,
    pub clamp_beta: bool,
}

impl Default for ParamsFile {
    fn default() -> Self {
        PlantParams::default().into()
    }
}

impl From<PlantParams> for ParamsFile {
    fn from(p: PlantParams) -> Self {
        Self {
            v: p.v,
            l_c: p.l_c,
            l_t: p.l_t,
            theta_max_deg: p.theta_max,
            beta_max_deg: p.beta_max,
            jackknife_limit_deg: p.jackknife_limit,
            clamp_beta: p.clamp_beta,
        }
    }
}

impl From<ParamsFile> for PlantParams {
    fn from(p: ParamsFile) -> Self {
        Self {
            v: p.v,
            l_c: p.l_c,
            l_t: p.l_t,
            theta_max: p.theta_max_deg,
            beta_max: p.beta_max_deg,
            jackknife_limit: p.jackknife_limit_deg,
            clamp_beta: p.clamp_beta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TolerancesFile {
    pub x_tol: f64,
    pub y_tol: f64,
    pub alpha_tol_deg: f64,
}

impl Default for TolerancesFile {
    fn default() -> Self {
        let d = DockTolerance::default();
        Self { x_tol: d.x_tol, y_tol: d.y_tol, alpha_tol_deg: d.alpha_tol }
    }
}

impl From<TolerancesFile> for DockTolerance {
    fn from(t: TolerancesFile) -> Self {
        Self { x_tol: t.x_tol, y_tol: t.y_tol, alpha_tol: t.alpha_tol_deg }
    }
}

fn default_label() -> String {
    "scenario".to_string()
}

fn default_max_steps() -> usize {
    1000
}

/// Scenario document. Only `initial` is required.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default = "default_label")]
    pub label: String,
    pub initial: InitialFile,
    #[serde(default)]
    pub params: ParamsFile,
    #[serde(default)]
    pub tolerances: TolerancesFile,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default)]
    pub mode: ModeSelection,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    /// Checks the operating constraints and builds the scenario.
    pub fn into_scenario(self) -> Result<Scenario, CliError> {
        let params: PlantParams = self.params.into();
        params.validate().map_err(|e| CliError::Invalid(e.to_string()))?;
        let i = self.initial;
        let initial = PlantState::new(i.x, i.y, i.alpha_deg, i.beta_deg);
        check_initial(&initial, &params)?;
        if self.max_steps < 1 {
            return Err(CliError::Invalid("max_steps must be at least 1".into()));
        }
        let tolerances: DockTolerance = self.tolerances.into();
        if ![tolerances.x_tol, tolerances.y_tol, tolerances.alpha_tol]
            .iter()
            .all(|t| t.is_finite() && *t >= 0.0)
        {
            return Err(CliError::Invalid("tolerances must be finite and non-negative".into()));
        }
        Ok(Scenario {
            label: self.label,
            initial,
            params,
            tolerances,
            max_steps: self.max_steps,
            mode: self.mode,
        })
    }
}

/// Operating constraints on a starting configuration.
pub fn check_initial(s: &PlantState, params: &PlantParams) -> Result<(), CliError> {
    let fail = |m: String| Err(CliError::Invalid(m));
    if !s.is_finite() {
        return fail("initial state must be finite".into());
    }
    if s.y < 0.0 {
        return fail(format!("initial y = {} violates the constraint y >= 0", s.y));
    }
    if s.x.abs() > X_BOUND {
        return fail(format!("initial x = {} violates the constraint -{X_BOUND} <= x <= {X_BOUND}", s.x));
    }
    if s.alpha.abs() > 180.0 {
        return fail(format!("initial alpha_deg = {} violates -180 <= alpha <= 180", s.alpha));
    }
    if s.beta.abs() > params.jackknife_limit {
        return fail(format!(
            "initial beta_deg = {} exceeds the jackknife limit of {} deg",
            s.beta, params.jackknife_limit
        ));
    }
    Ok(())
}

/// Sweep document: one axis per state variable plus optional run settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub x: GridAxis,
    pub y: GridAxis,
    pub alpha_deg: GridAxis,
    pub beta_deg: GridAxis,
    #[serde(default)]
    pub params: ParamsFile,
    #[serde(default)]
    pub tolerances: TolerancesFile,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

impl SweepFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn grid(&self) -> SweepGrid {
        SweepGrid { x: self.x, y: self.y, alpha_deg: self.alpha_deg, beta_deg: self.beta_deg }
    }

    /// Template scenario whose initial state each cell replaces.
    pub fn template(&self) -> Result<Scenario, CliError> {
        let params: PlantParams = self.params.into();
        params.validate().map_err(|e| CliError::Invalid(e.to_string()))?;
        if self.max_steps < 1 {
            return Err(CliError::Invalid("max_steps must be at least 1".into()));
        }
        Ok(Scenario {
            label: "sweep".into(),
            initial: PlantState::new(0.0, 0.0, 0.0, 0.0),
            params,
            tolerances: self.tolerances.into(),
            max_steps: self.max_steps,
            mode: ModeSelection::Cascade,
        })
    }
}
