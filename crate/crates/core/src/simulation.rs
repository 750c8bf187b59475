//! Closed-loop runs, trajectory comparison and initial-condition sweeps.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::controllers::Controllers;
use crate::plant::{
    classify, step_detailed, step_reference_detailed, DockTolerance, Limits, Outcome, OutcomeKind,
    PlantParams, PlantState, Status, Transition,
};

/// Which loop a trajectory was produced by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    /// Both controllers; the cab is steered toward the desired angle.
    Cascade,
    /// Trailer controller only; the cab angle is set to the desired angle.
    Reference,
}

impl RunMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Cascade => "cascade",
            Self::Reference => "reference",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeSelection {
    #[default]
    Cascade,
    Reference,
    Both,
}

impl ModeSelection {
    pub fn modes(&self) -> &'static [RunMode] {
        match self {
            Self::Cascade => &[RunMode::Cascade],
            Self::Reference => &[RunMode::Reference],
            Self::Both => &[RunMode::Cascade, RunMode::Reference],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub initial: PlantState,
    pub params: PlantParams,
    pub tolerances: DockTolerance,
    pub max_steps: usize,
    pub mode: ModeSelection,
}

impl Scenario {
    /// Scenario with default vehicle, tolerances and step budget.
    pub fn new(label: impl Into<String>, initial: PlantState) -> Self {
        Self {
            label: label.into(),
            initial,
            params: PlantParams::default(),
            tolerances: DockTolerance::default(),
            max_steps: 1000,
            mode: ModeSelection::Cascade,
        }
    }

    pub fn with_mode(mut self, mode: ModeSelection) -> Self {
        self.mode = mode;
        self
    }

    pub fn limits(&self) -> Limits {
        Limits {
            tolerance: self.tolerances,
            jackknife_limit: self.params.jackknife_limit,
            max_steps: self.max_steps,
        }
    }

    pub fn mirrored(&self) -> Self {
        Self { initial: self.initial.mirrored(), ..self.clone() }
    }
}

/// Motion applied between a sample and the next one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Motion {
    pub d_c: f64,
    pub d_t: f64,
    pub asin_clamped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub step: usize,
    pub state: PlantState,
    /// Controller outputs evaluated at `state`. On the terminal sample they
    /// are reported but not applied; NaN if evaluation failed.
    pub beta_prime: f64,
    pub gamma: f64,
    /// Steering angle; absent in reference mode, which does not steer.
    pub theta: Option<f64>,
    /// `None` on the terminal sample.
    pub motion: Option<Motion>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub mode: RunMode,
    pub samples: Vec<Sample>,
    pub outcome: Outcome,
    /// Controller evaluations that hit the all-zero firing fallback.
    pub fallbacks: usize,
}

impl Trajectory {
    pub fn positions(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples.iter().map(|s| (s.state.x, s.state.y))
    }

    pub fn docked(&self) -> bool {
        self.outcome.kind == OutcomeKind::Docked
    }
}

struct Control {
    beta_prime: f64,
    gamma: f64,
    theta: Option<f64>,
    fallbacks: usize,
}

fn evaluate(controllers: &Controllers, mode: RunMode, state: &PlantState) -> Result<Control, String> {
    match mode {
        RunMode::Cascade => {
            let out = controllers.cascade_step(state).map_err(|e| e.to_string())?;
            Ok(Control {
                beta_prime: out.beta_prime,
                gamma: out.gamma,
                theta: Some(out.theta),
                fallbacks: out.fallbacks as usize,
            })
        }
        RunMode::Reference => {
            let detailed = controllers
                .trailer()
                .infer_detailed(&[state.x, state.alpha])
                .map_err(|e| e.to_string())?;
            Ok(Control {
                beta_prime: detailed.value,
                gamma: detailed.value - state.beta,
                theta: None,
                fallbacks: usize::from(detailed.fallback),
            })
        }
    }
}

fn apply(mode: RunMode, state: &PlantState, control: &Control, params: &PlantParams) -> Result<Transition, String> {
    let result = match (mode, control.theta) {
        (RunMode::Cascade, Some(theta)) => step_detailed(state, theta, params),
        _ => step_reference_detailed(state, control.beta_prime, params),
    };
    result.map_err(|e| e.to_string())
}

/// Runs one closed loop until a terminal condition.
pub fn run_mode(scenario: &Scenario, controllers: &Controllers, mode: RunMode) -> Trajectory {
    let limits = scenario.limits();
    let mut samples: Vec<Sample> = Vec::new();
    let mut fallbacks = 0;
    let mut state = scenario.initial;
    let mut raw_beta = None;

    let finish = |samples: Vec<Sample>, kind: OutcomeKind, message: Option<String>, fallbacks| {
        let last = samples.last().expect("at least one sample");
        let outcome = Outcome { kind, final_state: last.state, steps: samples.len() - 1, message };
        Trajectory { mode, samples, outcome, fallbacks }
    };

    if let Err(e) = scenario.params.validate() {
        samples.push(Sample {
            step: 0,
            state,
            beta_prime: f64::NAN,
            gamma: f64::NAN,
            theta: None,
            motion: None,
        });
        return finish(samples, OutcomeKind::Error, Some(e.to_string()), 0);
    }

    loop {
        let step = samples.len();
        let status = classify(&state, raw_beta, step, &limits);
        let control = evaluate(controllers, mode, &state);

        let (beta_prime, gamma, theta) = match &control {
            Ok(c) => (c.beta_prime, c.gamma, c.theta),
            Err(_) => (f64::NAN, f64::NAN, None),
        };
        samples.push(Sample { step, state, beta_prime, gamma, theta, motion: None });

        if let Status::Terminal(kind) = status {
            return finish(samples, kind, None, fallbacks);
        }
        let control = match control {
            Ok(c) => c,
            Err(message) => return finish(samples, OutcomeKind::Error, Some(message), fallbacks),
        };
        fallbacks += control.fallbacks;

        match apply(mode, &state, &control, &scenario.params) {
            Ok(t) => {
                samples.last_mut().expect("just pushed").motion =
                    Some(Motion { d_c: t.d_c, d_t: t.d_t, asin_clamped: t.asin_clamped });
                state = t.state;
                raw_beta = Some(t.raw_beta);
            }
            Err(message) => return finish(samples, OutcomeKind::Error, Some(message), fallbacks),
        }
    }
}

/// Runs every mode the scenario selects, cascade first.
pub fn run(scenario: &Scenario, controllers: &Controllers) -> Vec<Trajectory> {
    scenario.mode.modes().iter().map(|&m| run_mode(scenario, controllers, m)).collect()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompareError {
    #[error("cannot compare an empty trajectory")]
    Empty,
    #[error("trajectories start from different states")]
    DifferentStart,
}

/// Per-step planar distance between two runs from the same start.
#[derive(Debug, Clone, PartialEq)]
pub struct Convergence {
    pub distances: Vec<f64>,
    /// Mean of the last 10 distances (or all of them if fewer).
    pub tail_mean: f64,
}

impl Convergence {
    fn window(&self, fraction: f64) -> usize {
        ((self.distances.len() as f64 * fraction).floor() as usize).max(1)
    }

    /// Mean over the trailing `fraction` of the sequence.
    pub fn tail_fraction_mean(&self, fraction: f64) -> f64 {
        let k = self.window(fraction).min(self.distances.len());
        let tail = &self.distances[self.distances.len() - k..];
        tail.iter().sum::<f64>() / k as f64
    }

    /// Maximum over a `fraction`-sized window starting at index `skip`.
    pub fn head_fraction_max(&self, fraction: f64, skip: usize) -> f64 {
        let k = self.window(fraction);
        let start = skip.min(self.distances.len().saturating_sub(1));
        let end = (start + k).min(self.distances.len());
        self.distances[start..end].iter().copied().fold(0.0, f64::max)
    }
}

pub fn convergence_metric(a: &Trajectory, b: &Trajectory) -> Result<Convergence, CompareError> {
    let (first_a, first_b) = match (a.samples.first(), b.samples.first()) {
        (Some(fa), Some(fb)) => (fa, fb),
        _ => return Err(CompareError::Empty),
    };
    if first_a.state != first_b.state {
        return Err(CompareError::DifferentStart);
    }
    let distances: Vec<f64> = a
        .positions()
        .zip(b.positions())
        .map(|((xa, ya), (xb, yb))| (xa - xb).hypot(ya - yb))
        .collect();
    let k = distances.len().min(10);
    let tail_mean = distances[distances.len() - k..].iter().sum::<f64>() / k as f64;
    Ok(Convergence { distances, tail_mean })
}

/// Evenly spaced values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn single(value: f64) -> Self {
        Self { min: value, max: value, count: 1 }
    }

    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.min],
            n => {
                let step = (self.max - self.min) / (n - 1) as f64;
                (0..n)
                    .map(|i| if i == n - 1 { self.max } else { self.min + step * i as f64 })
                    .collect()
            }
        }
    }

    pub fn mirrored(&self) -> Self {
        Self { min: -self.max, max: -self.min, count: self.count }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub x: GridAxis,
    pub y: GridAxis,
    pub alpha_deg: GridAxis,
    pub beta_deg: GridAxis,
}

impl SweepGrid {
    pub fn len(&self) -> usize {
        self.x.count * self.y.count * self.alpha_deg.count * self.beta_deg.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Initial states in x-major, then y, alpha, beta order.
    pub fn states(&self) -> Vec<PlantState> {
        let (xs, ys, als, bes) =
            (self.x.values(), self.y.values(), self.alpha_deg.values(), self.beta_deg.values());
        let mut out = Vec::with_capacity(self.len());
        for &x in &xs {
            for &y in &ys {
                for &a in &als {
                    for &b in &bes {
                        out.push(PlantState::new(x, y, a, b));
                    }
                }
            }
        }
        out
    }

    /// Grid reflected through the y-axis (x, alpha and beta negated).
    pub fn mirrored(&self) -> Self {
        Self {
            x: self.x.mirrored(),
            y: self.y,
            alpha_deg: self.alpha_deg.mirrored(),
            beta_deg: self.beta_deg.mirrored(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub initial: PlantState,
    pub outcome: OutcomeKind,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub grid: SweepGrid,
    pub cells: Vec<SweepCell>,
    pub counts: BTreeMap<OutcomeKind, usize>,
    pub success_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SweepError {
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error("sweep grid axis has a non-finite bound")]
    NonFinite,
}

/// Runs the cascade from every grid point. Cells are independent and run in
/// parallel; the report keeps grid order.
pub fn sweep(grid: &SweepGrid, template: &Scenario, controllers: &Controllers) -> Result<SweepReport, SweepError> {
    if grid.is_empty() {
        return Err(SweepError::EmptyGrid);
    }
    let axes = [grid.x, grid.y, grid.alpha_deg, grid.beta_deg];
    if !axes.iter().all(|a| a.min.is_finite() && a.max.is_finite()) {
        return Err(SweepError::NonFinite);
    }
    let cells: Vec<SweepCell> = grid
        .states()
        .into_par_iter()
        .map(|initial| {
            let scenario = Scenario { initial, ..template.clone() };
            let t = run_mode(&scenario, controllers, RunMode::Cascade);
            SweepCell { initial, outcome: t.outcome.kind, steps: t.outcome.steps }
        })
        .collect();

    let mut counts = BTreeMap::new();
    for cell in &cells {
        *counts.entry(cell.outcome).or_insert(0) += 1;
    }
    let docked = counts.get(&OutcomeKind::Docked).copied().unwrap_or(0);
    let success_ratio = docked as f64 / cells.len() as f64;
    Ok(SweepReport { grid: *grid, cells, counts, success_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aligned() -> Scenario {
        Scenario::new("aligned", PlantState::new(0.0, 50.0, 0.0, 0.0)).with_mode(ModeSelection::Both)
    }

    #[test]
    fn aligned_start_backs_straight_in() {
        let c = Controllers::default();
        for t in run(&aligned(), &c) {
            assert_eq!(t.outcome.kind, OutcomeKind::Docked, "{:?}", t.mode);
            assert_eq!(t.outcome.steps, 49);
            assert_eq!(t.outcome.final_state, PlantState::new(0.0, 1.0, 0.0, 0.0));
            assert!(t.samples.iter().all(|s| s.state.x == 0.0 && s.state.alpha == 0.0));
            assert_eq!(t.samples.len(), t.outcome.steps + 1);
        }
    }

    #[test]
    fn identical_runs_have_zero_distance() {
        let c = Controllers::default();
        let runs = run(&aligned(), &c);
        let m = convergence_metric(&runs[0], &runs[1]).unwrap();
        assert!(m.distances.iter().all(|&d| d == 0.0));
        assert_eq!(m.tail_mean, 0.0);
        let same = convergence_metric(&runs[0], &runs[0]).unwrap();
        assert!(same.distances.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn comparison_needs_shared_nonempty_start() {
        let c = Controllers::default();
        let a = run_mode(&aligned(), &c, RunMode::Cascade);
        let other = Scenario::new("o", PlantState::new(1.0, 50.0, 0.0, 0.0));
        let b = run_mode(&other, &c, RunMode::Cascade);
        assert_eq!(convergence_metric(&a, &b), Err(CompareError::DifferentStart));
        let empty = Trajectory { samples: Vec::new(), ..a.clone() };
        assert_eq!(convergence_metric(&empty, &a), Err(CompareError::Empty));
    }

    #[test]
    fn invalid_params_give_error_outcome() {
        let mut s = aligned();
        s.params.v = -1.0;
        let t = run_mode(&s, &Controllers::default(), RunMode::Cascade);
        assert_eq!(t.outcome.kind, OutcomeKind::Error);
        assert!(t.outcome.message.unwrap().contains("v must be positive"));
    }

    #[test]
    fn start_on_dock_line_is_classified_without_stepping() {
        let s = Scenario::new("crossed", PlantState::new(30.0, 0.0, 20.0, 0.0));
        let t = run_mode(&s, &Controllers::default(), RunMode::Cascade);
        assert_eq!(t.outcome.kind, OutcomeKind::InsufficientSpace);
        assert_eq!(t.outcome.steps, 0);
        let jk = Scenario::new("jk", PlantState::new(30.0, 40.0, 20.0, 120.0));
        assert_eq!(run_mode(&jk, &Controllers::default(), RunMode::Cascade).outcome.kind, OutcomeKind::Jackknifed);
    }

    #[test]
    fn max_steps_bounds_the_run() {
        let mut s = Scenario::new("short", PlantState::new(0.0, 50.0, 0.0, 0.0));
        s.max_steps = 5;
        let t = run_mode(&s, &Controllers::default(), RunMode::Cascade);
        assert_eq!(t.outcome.kind, OutcomeKind::Timeout);
        assert_eq!(t.outcome.steps, 5);
    }

    #[test]
    fn grid_axes() {
        assert_eq!(GridAxis { min: 0.0, max: 1.0, count: 3 }.values(), vec![0.0, 0.5, 1.0]);
        assert_eq!(GridAxis::single(4.0).values(), vec![4.0]);
        assert!(GridAxis { min: 0.0, max: 1.0, count: 0 }.values().is_empty());
    }

    #[test]
    fn empty_grid_is_rejected() {
        let grid = SweepGrid {
            x: GridAxis { min: 0.0, max: 1.0, count: 0 },
            y: GridAxis::single(50.0),
            alpha_deg: GridAxis::single(0.0),
            beta_deg: GridAxis::single(0.0),
        };
        let template = Scenario::new("t", PlantState::new(0.0, 0.0, 0.0, 0.0));
        assert_eq!(sweep(&grid, &template, &Controllers::default()), Err(SweepError::EmptyGrid));
    }

    #[test]
    fn no_room_means_no_success() {
        let grid = SweepGrid {
            x: GridAxis { min: -60.0, max: 60.0, count: 3 },
            y: GridAxis::single(0.0),
            alpha_deg: GridAxis { min: -40.0, max: 40.0, count: 3 },
            beta_deg: GridAxis::single(0.0),
        };
        let template = Scenario::new("t", PlantState::new(0.0, 0.0, 0.0, 0.0));
        let report = sweep(&grid, &template, &Controllers::default()).unwrap();
        assert_eq!(report.cells.len(), 9);
        // only the aligned centre cell counts as docked
        assert_eq!(report.counts.get(&OutcomeKind::Docked), Some(&1));
        assert_eq!(report.counts.get(&OutcomeKind::InsufficientSpace), Some(&8));
    }
}
