use serde::{Deserialize, Serialize};

use super::{FuzzyError, MembershipFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub label: String,
    pub membership: MembershipFunction,
}

/// A named universe of discourse with an ordered set of linguistic terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVariable", into = "RawVariable")]
pub struct LinguisticVariable {
    name: String,
    lo: f64,
    hi: f64,
    terms: Vec<Term>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariable {
    name: String,
    universe: [f64; 2],
    terms: Vec<Term>,
}

impl TryFrom<RawVariable> for LinguisticVariable {
    type Error = FuzzyError;

    fn try_from(raw: RawVariable) -> Result<Self, Self::Error> {
        LinguisticVariable::new(raw.name, raw.universe[0], raw.universe[1], raw.terms)
    }
}

impl From<LinguisticVariable> for RawVariable {
    fn from(v: LinguisticVariable) -> Self {
        RawVariable { name: v.name, universe: [v.lo, v.hi], terms: v.terms }
    }
}

impl LinguisticVariable {
    pub fn new(
        name: impl Into<String>,
        lo: f64,
        hi: f64,
        terms: Vec<Term>,
    ) -> Result<Self, FuzzyError> {
        let name = name.into();
        let invalid = |reason: String| FuzzyError::InvalidVariable { name: name.clone(), reason };
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid(format!("universe [{lo}, {hi}] is not a finite interval")));
        }
        if terms.is_empty() {
            return Err(invalid("no terms".into()));
        }
        for (i, term) in terms.iter().enumerate() {
            term.membership.validated()?;
            if terms[..i].iter().any(|t| t.label == term.label) {
                return Err(invalid(format!("duplicate term label {:?}", term.label)));
            }
            let (s0, s1) = term.membership.support_within(lo, hi);
            let bp = term.membership.breakpoints();
            let inside = |p: f64| (lo..=hi).contains(&p);
            if !(inside(s0) && inside(s1) && bp.iter().copied().all(inside)) {
                return Err(invalid(format!(
                    "term {:?} has support outside [{lo}, {hi}]",
                    term.label
                )));
            }
            if term.membership.area_centroid(lo, hi).is_none() {
                return Err(invalid(format!("term {:?} has zero area", term.label)));
            }
        }
        Ok(Self { name, lo, hi, terms })
    }

    /// Uniform-overlap partition from ordered core points.
    ///
    /// The first and last terms become shoulders; each interior term is a
    /// triangle whose feet sit on its neighbours' cores, so adjacent degrees
    /// always sum to one. The outer cores must coincide with the universe
    /// bounds.
    pub fn from_peaks(name: impl Into<String>, labels: &[&str], peaks: &[f64]) -> Result<Self, FuzzyError> {
        let name = name.into();
        if labels.len() != peaks.len() || peaks.len() < 2 {
            return Err(FuzzyError::InvalidVariable {
                name,
                reason: format!("{} labels for {} peaks", labels.len(), peaks.len()),
            });
        }
        let n = peaks.len();
        let mut terms = Vec::with_capacity(n);
        for (i, label) in labels.iter().enumerate() {
            let membership = if i == 0 {
                MembershipFunction::left_shoulder(peaks[0], peaks[1])?
            } else if i == n - 1 {
                MembershipFunction::right_shoulder(peaks[n - 2], peaks[n - 1])?
            } else {
                MembershipFunction::triangular(peaks[i - 1], peaks[i], peaks[i + 1])?
            };
            terms.push(Term { label: label.to_string(), membership });
        }
        Self::new(name, peaks[0], peaks[n - 1], terms)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn term_index(&self, label: &str) -> Option<usize> {
        self.terms.iter().position(|t| t.label == label)
    }

    pub fn clamp(&self, u: f64) -> f64 {
        u.clamp(self.lo, self.hi)
    }

    /// Degrees of every term at `u` after clamping it into the universe,
    /// index-aligned with [`terms`](Self::terms).
    pub fn fuzzify(&self, u: f64) -> Result<Vec<f64>, FuzzyError> {
        if !u.is_finite() {
            return Err(FuzzyError::NonFiniteInput { variable: self.name.clone(), value: u });
        }
        let u = self.clamp(u);
        Ok(self.terms.iter().map(|t| t.membership.eval(u)).collect())
    }

    /// Same as [`fuzzify`](Self::fuzzify) but keyed by label.
    pub fn fuzzify_labeled(&self, u: f64) -> Result<Vec<(&str, f64)>, FuzzyError> {
        let degrees = self.fuzzify(u)?;
        Ok(self.terms.iter().map(|t| t.label.as_str()).zip(degrees).collect())
    }

    /// Largest deviation of the summed degrees from one over `samples`
    /// uniformly spaced points spanning the universe.
    pub fn partition_error(&self, samples: usize) -> f64 {
        let samples = samples.max(2);
        let step = (self.hi - self.lo) / (samples - 1) as f64;
        (0..samples)
            .map(|i| {
                let u = if i == samples - 1 { self.hi } else { self.lo + step * i as f64 };
                let sum: f64 = self.terms.iter().map(|t| t.membership.eval(u)).sum();
                (sum - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}
