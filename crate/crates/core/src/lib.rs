//! Cascaded fuzzy control for backing a truck and trailer up to a loading
//! dock.
//!
//! A trailer controller picks the cab angle that best lines the trailer up
//! with the dock; a cab controller steers the cab toward that angle. The
//! crate contains the fuzzy inference engine, both controllers, the
//! discrete-time kinematics, a closed-loop simulator and the command-line
//! front end.

pub mod cli;
pub mod controllers;
pub mod fuzzy;
pub mod plant;
pub mod simulation;

pub use controllers::{CascadeOutput, Controllers, MembershipDesign};
pub use plant::{DockTolerance, Outcome, OutcomeKind, PlantParams, PlantState};
pub use simulation::{run, run_mode, sweep, ModeSelection, RunMode, Scenario, Trajectory};
