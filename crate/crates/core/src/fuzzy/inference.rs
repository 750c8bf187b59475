//! Mamdani-style inference with product conjunction, additive aggregation
//! and centroid defuzzification.

use super::{FuzzyError, RuleBase};

/// Per-rule activation weights, index-aligned with [`RuleBase::rules`].
#[derive(Debug, Clone, PartialEq)]
pub struct FiringVector(pub Vec<f64>);

impl FiringVector {
    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn is_silent(&self) -> bool {
        self.0.iter().all(|&w| w == 0.0)
    }
}

/// Crisp controller output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Defuzzified {
    pub value: f64,
    /// Set when no rule fired and `value` is the output universe midpoint.
    pub fallback: bool,
}

impl RuleBase {
    /// Rule weights as the product of each rule's antecedent degrees.
    pub fn fire(&self, inputs: &[f64]) -> Result<FiringVector, FuzzyError> {
        if inputs.len() != self.inputs().len() {
            return Err(FuzzyError::Arity { expected: self.inputs().len(), got: inputs.len() });
        }
        let degrees = self
            .inputs()
            .iter()
            .zip(inputs)
            .map(|(var, &u)| var.fuzzify(u))
            .collect::<Result<Vec<_>, _>>()?;

        let weights = self
            .rules()
            .iter()
            .map(|rule| {
                rule.antecedents
                    .iter()
                    .zip(&degrees)
                    .map(|(&term, d)| d[term])
                    .product()
            })
            .collect();
        Ok(FiringVector(weights))
    }

    /// Centroid of the weighted sum of consequent shapes.
    ///
    /// Each rule contributes its consequent scaled by its weight, so the
    /// aggregate centroid reduces to an area-weighted mean of the term
    /// centroids. A silent firing vector yields the universe midpoint.
    pub fn defuzzify(&self, firing: &FiringVector) -> Result<Defuzzified, FuzzyError> {
        if firing.0.len() != self.len() {
            return Err(FuzzyError::Arity { expected: self.len(), got: firing.0.len() });
        }
        let moments = self.consequent_moments();
        let (num, den) = self.rules().iter().zip(&firing.0).fold(
            (0.0, 0.0),
            |(num, den), (rule, &w)| {
                let (area, centroid) = moments[rule.consequent];
                (num + w * area * centroid, den + w * area)
            },
        );
        if den > 0.0 {
            let (lo, hi) = self.output().universe();
            Ok(Defuzzified { value: (num / den).clamp(lo, hi), fallback: false })
        } else {
            Ok(Defuzzified { value: self.output().midpoint(), fallback: true })
        }
    }

    pub fn infer_detailed(&self, inputs: &[f64]) -> Result<Defuzzified, FuzzyError> {
        let firing = self.fire(inputs)?;
        self.defuzzify(&firing)
    }

    pub fn infer(&self, inputs: &[f64]) -> Result<f64, FuzzyError> {
        self.infer_detailed(inputs).map(|d| d.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::{LabeledRule, LinguisticVariable};

    const POLARITY: [&str; 7] = ["NB", "NM", "NS", "ZE", "PS", "PM", "PB"];

    fn polarity(name: &str, scale: f64) -> LinguisticVariable {
        let peaks: Vec<f64> = (-3..=3).map(|k| k as f64 * scale).collect();
        LinguisticVariable::from_peaks(name, &POLARITY, &peaks).unwrap()
    }

    fn identity() -> RuleBase {
        let rules: Vec<_> = POLARITY.iter().map(|l| LabeledRule::new(&[l], l)).collect();
        RuleBase::new(vec![polarity("g", 20.0)], polarity("s", 10.0), &rules).unwrap()
    }

    #[test]
    fn arity_is_checked() {
        let rb = identity();
        assert!(matches!(rb.fire(&[1.0, 2.0]), Err(FuzzyError::Arity { expected: 1, got: 2 })));
        assert!(rb.defuzzify(&FiringVector(vec![1.0])).is_err());
    }

    #[test]
    fn single_symmetric_consequent_gives_zero() {
        let rb = identity();
        let mut w = vec![0.0; 7];
        w[3] = 1.0;
        let out = rb.defuzzify(&FiringVector(w)).unwrap();
        assert_eq!(out, Defuzzified { value: 0.0, fallback: false });
    }

    #[test]
    fn mirrored_pair_cancels() {
        let rb = identity();
        let mut w = vec![0.0; 7];
        w[2] = 0.4;
        w[4] = 0.4;
        assert_eq!(rb.defuzzify(&FiringVector(w)).unwrap().value, 0.0);
    }

    #[test]
    fn silent_firing_falls_back_to_midpoint() {
        let rb = identity();
        let out = rb.defuzzify(&FiringVector(vec![0.0; 7])).unwrap();
        assert!(out.fallback);
        assert_eq!(out.value, 0.0);
    }

    #[test]
    fn zero_degree_annihilates_rule() {
        let rb = identity();
        let fv = rb.fire(&[20.0]).unwrap();
        assert_eq!(fv.weights(), &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(!fv.is_silent());
    }

    #[test]
    fn edge_of_universe_hits_shoulder_centroid() {
        let rb = identity();
        // PB is a half triangle over [20, 30]; its centroid is (20 + 2 * 30) / 3.
        let out = rb.infer(&[60.0]).unwrap();
        assert!((out - 80.0 / 3.0).abs() < 1e-12);
    }
}
