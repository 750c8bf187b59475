//! Discrete-time kinematics of the cab and trailer while backing.
//!
//! The state is the center rear of the trailer `(x, y)`, the trailer heading
//! `alpha` measured from the y-axis and the cab angle `beta` relative to the
//! trailer. Every step the cab moves back by `v * cos(theta)`, where `theta`
//! is the steering angle. All angles at this interface are degrees.

use serde::{Deserialize, Serialize};

/// Half-width of the lateral operating range; `x` beyond three times this is
/// out of bounds.
pub const X_BOUND: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantState {
    pub x: f64,
    pub y: f64,
    /// Trailer heading from the y-axis, degrees in (-180, 180].
    pub alpha: f64,
    /// Cab angle relative to the trailer, degrees.
    pub beta: f64,
}

impl PlantState {
    pub fn new(x: f64, y: f64, alpha: f64, beta: f64) -> Self {
        Self { x, y, alpha, beta }
    }

    /// Reflection through the y-axis.
    pub fn mirrored(&self) -> Self {
        Self { x: -self.x, y: self.y, alpha: -self.alpha, beta: -self.beta }
    }

    pub fn is_finite(&self) -> bool {
        [self.x, self.y, self.alpha, self.beta].iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantParams {
    /// Distance the cab travels per step.
    pub v: f64,
    pub l_c: f64,
    pub l_t: f64,
    pub theta_max: f64,
    /// Operating limit for the cab angle.
    pub beta_max: f64,
    pub jackknife_limit: f64,
    /// Clamp the cab angle to `beta_max` after every step.
    pub clamp_beta: bool,
}

impl Default for PlantParams {
    fn default() -> Self {
        Self {
            v: 1.0,
            l_c: 2.0,
            l_t: 8.0,
            theta_max: 30.0,
            beta_max: 30.0,
            jackknife_limit: 90.0,
            clamp_beta: true,
        }
    }
}

impl PlantParams {
    pub fn validate(&self) -> Result<(), PlantError> {
        let bad = |what: &str| Err(PlantError::InvalidParams(what.to_string()));
        let all = [self.v, self.l_c, self.l_t, self.theta_max, self.beta_max, self.jackknife_limit];
        if !all.iter().all(|v| v.is_finite()) {
            return bad("parameters must be finite");
        }
        if self.v <= 0.0 {
            return bad("v must be positive");
        }
        if self.l_c <= 0.0 || self.l_t <= 0.0 {
            return bad("cab and trailer lengths must be positive");
        }
        if !(self.theta_max > 0.0 && self.theta_max <= 90.0) {
            return bad("theta_max must lie in (0, 90]");
        }
        if !(self.beta_max > 0.0 && self.beta_max <= self.jackknife_limit) {
            return bad("beta_max must lie in (0, jackknife_limit]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DockTolerance {
    pub x_tol: f64,
    pub y_tol: f64,
    pub alpha_tol: f64,
}

impl Default for DockTolerance {
    fn default() -> Self {
        Self { x_tol: 2.0, y_tol: 1.0, alpha_tol: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlantError {
    #[error("steering angle {theta} deg exceeds the limit of {limit} deg")]
    SteeringOutOfRange { theta: f64, limit: f64 },
    #[error("cab angle command {beta} deg exceeds the limit of {limit} deg")]
    BetaCommandOutOfRange { beta: f64, limit: f64 },
    #[error("non-finite plant state or input")]
    NonFinite,
    #[error("invalid plant parameters: {0}")]
    InvalidParams(String),
}

/// Result of one kinematic update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub state: PlantState,
    /// Signed cab displacement (negative while backing).
    pub d_c: f64,
    /// Signed trailer displacement.
    pub d_t: f64,
    /// Cab angle before the operating clamp.
    pub raw_beta: f64,
    /// An arcsine argument had to be clamped into [-1, 1].
    pub asin_clamped: bool,
}

/// Wraps an angle in degrees to (-180, 180], leaving in-range values untouched.
pub fn wrap_degrees(a: f64) -> f64 {
    if a > -180.0 && a <= 180.0 {
        return a;
    }
    let r = a.rem_euclid(360.0);
    if r > 180.0 {
        r - 360.0
    } else {
        r
    }
}

fn asin_deg(arg: f64) -> (f64, bool) {
    let clamped = arg.clamp(-1.0, 1.0);
    (clamped.asin().to_degrees(), clamped != arg)
}

/// Advances the trailer and returns the pieces shared by both step modes.
fn advance(state: &PlantState, theta: f64, params: &PlantParams) -> (f64, f64, f64, f64, f64, bool) {
    let alpha = state.alpha.to_radians();
    let beta = state.beta.to_radians();
    let d_c = -params.v * theta.to_radians().cos();
    let d_t = d_c * beta.cos();
    let x = state.x + d_t * alpha.sin();
    let y = state.y + d_t * alpha.cos();
    let (turn, clamped) = asin_deg(d_c * beta.sin() / params.l_t);
    let new_alpha = wrap_degrees(state.alpha - turn);
    (d_c, d_t, x, y, new_alpha, clamped)
}

fn check_state(state: &PlantState, input: f64) -> Result<(), PlantError> {
    if state.is_finite() && input.is_finite() {
        Ok(())
    } else {
        Err(PlantError::NonFinite)
    }
}

/// One step of the cab-trailer kinematics under steering angle `theta`.
pub fn step_detailed(state: &PlantState, theta: f64, params: &PlantParams) -> Result<Transition, PlantError> {
    check_state(state, theta)?;
    if theta.abs() > params.theta_max {
        return Err(PlantError::SteeringOutOfRange { theta, limit: params.theta_max });
    }
    let (d_c, d_t, x, y, alpha, clamped_alpha) = advance(state, theta, params);
    let (turn, clamped_beta) = asin_deg(-params.v * theta.to_radians().sin() / params.l_c);
    let raw_beta = state.beta - turn;
    let beta = if params.clamp_beta {
        raw_beta.clamp(-params.beta_max, params.beta_max)
    } else {
        raw_beta
    };
    Ok(Transition {
        state: PlantState { x, y, alpha, beta },
        d_c,
        d_t,
        raw_beta,
        asin_clamped: clamped_alpha || clamped_beta,
    })
}

pub fn step(state: &PlantState, theta: f64, params: &PlantParams) -> Result<PlantState, PlantError> {
    step_detailed(state, theta, params).map(|t| t.state)
}

/// Idealized step where the cab angle is set directly to `beta_command`
/// instead of being steered there; the trailer moves as in [`step`] with no
/// steering.
pub fn step_reference_detailed(
    state: &PlantState,
    beta_command: f64,
    params: &PlantParams,
) -> Result<Transition, PlantError> {
    check_state(state, beta_command)?;
    if beta_command.abs() > params.beta_max {
        return Err(PlantError::BetaCommandOutOfRange { beta: beta_command, limit: params.beta_max });
    }
    let (d_c, d_t, x, y, alpha, asin_clamped) = advance(state, 0.0, params);
    Ok(Transition {
        state: PlantState { x, y, alpha, beta: beta_command },
        d_c,
        d_t,
        raw_beta: beta_command,
        asin_clamped,
    })
}

pub fn step_reference(state: &PlantState, beta_command: f64, params: &PlantParams) -> Result<PlantState, PlantError> {
    step_reference_detailed(state, beta_command, params).map(|t| t.state)
}

pub fn dock_check(state: &PlantState, tol: &DockTolerance) -> bool {
    state.x.abs() <= tol.x_tol && state.y <= tol.y_tol && state.alpha.abs() <= tol.alpha_tol
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeKind {
    Docked,
    OutOfBounds,
    Jackknifed,
    Timeout,
    InsufficientSpace,
    /// A controller or plant error aborted the run.
    Error,
}

impl OutcomeKind {
    pub const ALL: [OutcomeKind; 6] = [
        Self::Docked,
        Self::OutOfBounds,
        Self::Jackknifed,
        Self::Timeout,
        Self::InsufficientSpace,
        Self::Error,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Docked => "docked",
            Self::OutOfBounds => "out-of-bounds",
            Self::Jackknifed => "jackknifed",
            Self::Timeout => "timeout",
            Self::InsufficientSpace => "insufficient-space",
            Self::Error => "error",
        }
    }
}

impl std::fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub kind: OutcomeKind,
    pub final_state: PlantState,
    pub steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub tolerance: DockTolerance,
    pub jackknife_limit: f64,
    pub max_steps: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self { tolerance: DockTolerance::default(), jackknife_limit: 90.0, max_steps: 1000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Live,
    Terminal(OutcomeKind),
}

/// Terminal-condition check, in priority order: docked, jackknifed,
/// insufficient space, out of bounds, timeout.
///
/// `raw_beta` is the cab angle before the operating clamp, when known.
pub fn classify(state: &PlantState, raw_beta: Option<f64>, step_count: usize, limits: &Limits) -> Status {
    let beta = raw_beta.unwrap_or(state.beta);
    if dock_check(state, &limits.tolerance) {
        Status::Terminal(OutcomeKind::Docked)
    } else if beta.abs() > limits.jackknife_limit || state.beta.abs() > limits.jackknife_limit {
        Status::Terminal(OutcomeKind::Jackknifed)
    } else if state.y <= 0.0 {
        Status::Terminal(OutcomeKind::InsufficientSpace)
    } else if state.x.abs() > 3.0 * X_BOUND {
        Status::Terminal(OutcomeKind::OutOfBounds)
    } else if step_count >= limits.max_steps {
        Status::Terminal(OutcomeKind::Timeout)
    } else {
        Status::Live
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn default_params() -> PlantParams {
        PlantParams::default()
    }

    #[test]
    fn straight_backing_moves_one_unit() {
        let next = step(&PlantState::new(0.0, 10.0, 0.0, 0.0), 0.0, &default_params()).unwrap();
        assert_eq!(next, PlantState::new(0.0, 9.0, 0.0, 0.0));
    }

    #[test]
    fn full_lock_steering_turns_cab() {
        let next = step(&PlantState::new(0.0, 10.0, 0.0, 0.0), 30.0, &default_params()).unwrap();
        // asin(sin 30 / 2) = asin(0.25)
        assert_abs_diff_eq!(next.beta, 14.477_512_185_929_925, epsilon = 1e-9);
        assert_abs_diff_eq!(next.beta, 0.25f64.asin().to_degrees(), epsilon = 1e-12);
        assert_eq!(next.x, 0.0);
        assert_eq!(next.alpha, 0.0);
        // d_c = -cos 30, beta = 0 so d_t = d_c
        assert_abs_diff_eq!(next.y, 10.0 - 30f64.to_radians().cos(), epsilon = 1e-12);
    }

    #[test]
    fn cab_angle_turns_trailer() {
        let next = step(&PlantState::new(0.0, 100.0, 0.0, 30.0), 0.0, &default_params()).unwrap();
        assert_abs_diff_eq!(next.alpha, 3.583_321_698_471_973, epsilon = 1e-9);
        assert_abs_diff_eq!(next.y, 100.0 - 0.75f64.sqrt(), epsilon = 1e-12);
        assert_eq!(next.x, 0.0);
        assert_eq!(next.beta, 30.0);
    }

    #[test]
    fn steering_limit_is_enforced() {
        let s = PlantState::new(0.0, 10.0, 0.0, 0.0);
        assert!(matches!(step(&s, 30.5, &default_params()), Err(PlantError::SteeringOutOfRange { .. })));
        assert!(matches!(step(&s, f64::NAN, &default_params()), Err(PlantError::NonFinite)));
        let bad = PlantState::new(f64::INFINITY, 10.0, 0.0, 0.0);
        assert!(matches!(step(&bad, 0.0, &default_params()), Err(PlantError::NonFinite)));
    }

    #[test]
    fn beta_is_clamped_to_operating_range() {
        let s = PlantState::new(0.0, 50.0, 0.0, 25.0);
        let t = step_detailed(&s, 30.0, &default_params()).unwrap();
        assert!(t.raw_beta > 30.0);
        assert_eq!(t.state.beta, 30.0);

        let free = PlantParams { clamp_beta: false, ..default_params() };
        assert_eq!(step(&s, 30.0, &free).unwrap().beta, t.raw_beta);
    }

    #[test]
    fn reference_step_assigns_command() {
        let s = PlantState::new(3.0, 40.0, 12.0, 7.0);
        let same = step_reference(&s, 7.0, &default_params()).unwrap();
        assert_eq!(same, step(&s, 0.0, &default_params()).unwrap());
        let next = step_reference(&s, -22.5, &default_params()).unwrap();
        assert_eq!(next.beta, -22.5);
        assert_eq!(
            step_reference(&PlantState::new(0.0, 10.0, 0.0, 0.0), 0.0, &default_params()).unwrap(),
            PlantState::new(0.0, 9.0, 0.0, 0.0)
        );
        assert!(step_reference(&s, 31.0, &default_params()).is_err());
    }

    #[test]
    fn asin_clamp_fires_only_for_short_vehicles() {
        let s = PlantState::new(0.0, 50.0, 0.0, 20.0);
        assert!(!step_detailed(&s, 30.0, &default_params()).unwrap().asin_clamped);
        let stubby = PlantParams { v: 5.0, l_c: 1.0, ..default_params() };
        assert!(step_detailed(&s, 30.0, &stubby).unwrap().asin_clamped);
    }

    #[test]
    fn wraps_heading() {
        assert_eq!(wrap_degrees(180.0), 180.0);
        assert_eq!(wrap_degrees(-180.0), 180.0);
        assert_eq!(wrap_degrees(190.0), -170.0);
        assert_eq!(wrap_degrees(-190.0), 170.0);
        assert_eq!(wrap_degrees(725.0), 5.0);
        assert_eq!(wrap_degrees(12.25), 12.25);
    }

    #[test]
    fn dock_tolerances() {
        let tol = DockTolerance::default();
        assert!(dock_check(&PlantState::new(0.0, 0.0, 0.0, 0.0), &tol));
        assert!(!dock_check(&PlantState::new(5.0, 0.0, 0.0, 0.0), &tol));
        assert!(dock_check(&PlantState::new(1.9, 0.5, -9.0, 0.0), &tol));
        assert!(!dock_check(&PlantState::new(0.0, 1.5, 0.0, 0.0), &tol));
        assert!(!dock_check(&PlantState::new(0.0, 0.5, 11.0, 0.0), &tol));
    }

    #[test]
    fn classification_priority() {
        let limits = Limits::default();
        let classify_at = |s: PlantState, n| classify(&s, None, n, &limits);
        assert_eq!(
            classify_at(PlantState::new(40.0, -0.3, 50.0, 0.0), 10),
            Status::Terminal(OutcomeKind::InsufficientSpace)
        );
        assert_eq!(
            classify_at(PlantState::new(0.0, 80.0, 0.0, 0.0), 1000),
            Status::Terminal(OutcomeKind::Timeout)
        );
        assert_eq!(
            classify_at(PlantState::new(0.5, 0.2, 2.0, 0.0), 1000),
            Status::Terminal(OutcomeKind::Docked)
        );
        assert_eq!(
            classify_at(PlantState::new(301.0, 50.0, 0.0, 0.0), 3),
            Status::Terminal(OutcomeKind::OutOfBounds)
        );
        assert_eq!(
            classify_at(PlantState::new(301.0, -1.0, 0.0, 95.0), 3),
            Status::Terminal(OutcomeKind::Jackknifed)
        );
        assert_eq!(
            classify(&PlantState::new(0.0, 50.0, 0.0, 30.0), Some(91.0), 3, &limits),
            Status::Terminal(OutcomeKind::Jackknifed)
        );
        assert_eq!(classify_at(PlantState::new(10.0, 50.0, 0.0, 0.0), 3), Status::Live);
    }

    #[test]
    fn params_validation() {
        assert!(default_params().validate().is_ok());
        assert!(PlantParams { v: 0.0, ..default_params() }.validate().is_err());
        assert!(PlantParams { l_t: -1.0, ..default_params() }.validate().is_err());
        assert!(PlantParams { theta_max: 95.0, ..default_params() }.validate().is_err());
        assert!(PlantParams { beta_max: 100.0, ..default_params() }.validate().is_err());
    }
}
