use serde::{Deserialize, Serialize};

use super::{FuzzyError, LinguisticVariable};

/// One `IF a1 AND a2 ... THEN c` rule, stored as term indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub antecedents: Vec<usize>,
    pub consequent: usize,
}

/// Rule as written in controller documents: term labels instead of indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledRule {
    #[serde(rename = "if")]
    pub antecedents: Vec<String>,
    #[serde(rename = "then")]
    pub consequent: String,
}

impl LabeledRule {
    pub fn new(antecedents: &[&str], consequent: &str) -> Self {
        Self {
            antecedents: antecedents.iter().map(|s| s.to_string()).collect(),
            consequent: consequent.to_string(),
        }
    }
}

/// A total single-output rule base: exactly one rule per combination of
/// antecedent terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRuleBase", into = "RawRuleBase")]
pub struct RuleBase {
    inputs: Vec<LinguisticVariable>,
    output: LinguisticVariable,
    rules: Vec<Rule>,
    /// Area and centroid of each output term over the output universe.
    consequent_moments: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRuleBase {
    inputs: Vec<LinguisticVariable>,
    output: LinguisticVariable,
    rules: Vec<LabeledRule>,
}

impl TryFrom<RawRuleBase> for RuleBase {
    type Error = FuzzyError;

    fn try_from(raw: RawRuleBase) -> Result<Self, Self::Error> {
        RuleBase::new(raw.inputs, raw.output, &raw.rules)
    }
}

impl From<RuleBase> for RawRuleBase {
    fn from(rb: RuleBase) -> Self {
        let rules = rb.labeled_rules();
        RawRuleBase { inputs: rb.inputs, output: rb.output, rules }
    }
}

impl RuleBase {
    pub fn new(
        inputs: Vec<LinguisticVariable>,
        output: LinguisticVariable,
        rules: &[LabeledRule],
    ) -> Result<Self, FuzzyError> {
        if inputs.is_empty() {
            return Err(FuzzyError::InvalidRuleBase("no antecedent variables".into()));
        }
        let expected: usize = inputs.iter().map(|v| v.terms().len()).product();
        let mut seen = vec![false; expected];
        let mut indexed = Vec::with_capacity(rules.len());

        for rule in rules {
            if rule.antecedents.len() != inputs.len() {
                return Err(FuzzyError::InvalidRuleBase(format!(
                    "rule {:?} has {} antecedents, expected {}",
                    rule.antecedents,
                    rule.antecedents.len(),
                    inputs.len()
                )));
            }
            let antecedents = rule
                .antecedents
                .iter()
                .zip(&inputs)
                .map(|(label, var)| lookup(var, label))
                .collect::<Result<Vec<_>, _>>()?;
            let consequent = lookup(&output, &rule.consequent)?;

            let slot = flat_index(&inputs, &antecedents);
            if std::mem::replace(&mut seen[slot], true) {
                return Err(FuzzyError::InvalidRuleBase(format!(
                    "duplicate rule for {:?}",
                    rule.antecedents
                )));
            }
            indexed.push(Rule { antecedents, consequent });
        }
        if indexed.len() != expected {
            return Err(FuzzyError::InvalidRuleBase(format!(
                "rule base is not total: {} of {} antecedent combinations covered",
                indexed.len(),
                expected
            )));
        }

        let (lo, hi) = output.universe();
        let consequent_moments = output
            .terms()
            .iter()
            .map(|t| t.membership.area_centroid(lo, hi).expect("validated non-zero area"))
            .collect();

        Ok(Self { inputs, output, rules: indexed, consequent_moments })
    }

    /// Builds a two-input rule base from a table whose rows follow the
    /// first input's terms and columns the second's.
    pub fn from_table(
        row_var: LinguisticVariable,
        col_var: LinguisticVariable,
        output: LinguisticVariable,
        table: &[&[&str]],
    ) -> Result<Self, FuzzyError> {
        let mut rules = Vec::new();
        for (row, cells) in row_var.terms().iter().zip(table) {
            if cells.len() != col_var.terms().len() {
                return Err(FuzzyError::InvalidRuleBase(format!(
                    "row {:?} has {} cells, expected {}",
                    row.label,
                    cells.len(),
                    col_var.terms().len()
                )));
            }
            for (col, cell) in col_var.terms().iter().zip(cells.iter()) {
                rules.push(LabeledRule::new(&[&row.label, &col.label], cell));
            }
        }
        Self::new(vec![row_var, col_var], output, &rules)
    }

    pub fn inputs(&self) -> &[LinguisticVariable] {
        &self.inputs
    }

    pub fn output(&self) -> &LinguisticVariable {
        &self.output
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// `(area, centroid)` of every output term, index-aligned with its terms.
    pub fn consequent_moments(&self) -> &[(f64, f64)] {
        &self.consequent_moments
    }

    pub fn labeled_rules(&self) -> Vec<LabeledRule> {
        self.rules
            .iter()
            .map(|r| LabeledRule {
                antecedents: r
                    .antecedents
                    .iter()
                    .zip(&self.inputs)
                    .map(|(&i, v)| v.terms()[i].label.clone())
                    .collect(),
                consequent: self.output.terms()[r.consequent].label.clone(),
            })
            .collect()
    }

    /// Consequent label for the given antecedent labels.
    pub fn consequent_of(&self, antecedents: &[&str]) -> Option<&str> {
        if antecedents.len() != self.inputs.len() {
            return None;
        }
        let idx: Vec<usize> = antecedents
            .iter()
            .zip(&self.inputs)
            .map(|(l, v)| v.term_index(l))
            .collect::<Option<_>>()?;
        self.rules
            .iter()
            .find(|r| r.antecedents == idx)
            .map(|r| self.output.terms()[r.consequent].label.as_str())
    }
}

fn lookup(var: &LinguisticVariable, label: &str) -> Result<usize, FuzzyError> {
    var.term_index(label).ok_or_else(|| FuzzyError::UnknownLabel {
        variable: var.name().to_string(),
        label: label.to_string(),
    })
}

fn flat_index(inputs: &[LinguisticVariable], idx: &[usize]) -> usize {
    idx.iter().zip(inputs).fold(0, |acc, (&i, v)| acc * v.terms().len() + i)
}
