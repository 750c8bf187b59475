//! Generic single-output fuzzy inference.

mod inference;
mod membership;
mod rules;
mod variable;

pub use inference::{Defuzzified, FiringVector};
pub use membership::MembershipFunction;
pub use rules::{LabeledRule, Rule, RuleBase};
pub use variable::{LinguisticVariable, Term};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FuzzyError {
    #[error("invalid membership function: {0}")]
    InvalidMembership(String),
    #[error("invalid linguistic variable {name:?}: {reason}")]
    InvalidVariable { name: String, reason: String },
    #[error("variable {variable:?} has no term {label:?}")]
    UnknownLabel { variable: String, label: String },
    #[error("invalid rule base: {0}")]
    InvalidRuleBase(String),
    #[error("expected {expected} values, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("non-finite input {value} for variable {variable:?}")]
    NonFiniteInput { variable: String, value: f64 },
}
