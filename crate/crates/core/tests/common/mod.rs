//! Test-only brute-force oracle and shared fixtures.
//!
//! The oracle reads controller definitions from their JSON document and
//! evaluates everything itself: piecewise-linear memberships, product
//! firing, the weighted-sum aggregate sampled on a 1e-3 grid, and a
//! trapezoid-rule centroid. It shares no code path with the engine beyond
//! the serialized document.

#![allow(dead_code)]

use serde_json::Value;
use trailer_backer::{Controllers, PlantState, Scenario};

pub const GRID_STEP: f64 = 1e-3;

/// Membership as a list of `(u, degree)` vertices, flat beyond the ends.
#[derive(Debug, Clone)]
pub struct Shape {
    vertices: Vec<(f64, f64)>,
}

impl Shape {
    fn from_json(v: &Value, lo: f64, hi: f64) -> Shape {
        let f = |k: &str| v[k].as_f64().unwrap_or_else(|| panic!("missing {k} in {v}"));
        let vertices = match v["kind"].as_str().unwrap() {
            "triangular" => vec![(f("a"), 0.0), (f("b"), 1.0), (f("c"), 0.0)],
            "left_shoulder" => vec![(lo.min(f("edge")), 1.0), (f("edge"), 1.0), (f("foot"), 0.0)],
            "right_shoulder" => vec![(f("foot"), 0.0), (f("edge"), 1.0), (hi.max(f("edge")), 1.0)],
            other => panic!("unknown kind {other}"),
        };
        Shape { vertices }
    }

    pub fn eval(&self, u: f64) -> f64 {
        let v = &self.vertices;
        if u <= v[0].0 {
            return v[0].1;
        }
        if u >= v[v.len() - 1].0 {
            return v[v.len() - 1].1;
        }
        for w in v.windows(2) {
            let ((u0, f0), (u1, f1)) = (w[0], w[1]);
            if u >= u0 && u <= u1 {
                if u1 == u0 {
                    return f1;
                }
                return f0 + (f1 - f0) * (u - u0) / (u1 - u0);
            }
        }
        unreachable!()
    }

    fn support(&self) -> (f64, f64) {
        let v = &self.vertices;
        let first = v.iter().position(|p| p.1 > 0.0).unwrap();
        let last = v.iter().rposition(|p| p.1 > 0.0).unwrap();
        let lo = if first > 0 { v[first - 1].0 } else { f64::NEG_INFINITY };
        let hi = if last + 1 < v.len() { v[last + 1].0 } else { f64::INFINITY };
        (lo, hi)
    }
}

#[derive(Debug, Clone)]
pub struct OracleVariable {
    pub lo: f64,
    pub hi: f64,
    pub labels: Vec<String>,
    pub shapes: Vec<Shape>,
}

impl OracleVariable {
    fn from_json(v: &Value) -> Self {
        let lo = v["universe"][0].as_f64().unwrap();
        let hi = v["universe"][1].as_f64().unwrap();
        let terms = v["terms"].as_array().unwrap();
        OracleVariable {
            lo,
            hi,
            labels: terms.iter().map(|t| t["label"].as_str().unwrap().to_string()).collect(),
            shapes: terms.iter().map(|t| Shape::from_json(&t["membership"], lo, hi)).collect(),
        }
    }

    pub fn degree(&self, label: &str, u: f64) -> f64 {
        let u = u.max(self.lo).min(self.hi);
        let i = self.labels.iter().position(|l| l == label).unwrap();
        self.shapes[i].eval(u)
    }
}

#[derive(Debug, Clone)]
pub struct OracleController {
    pub inputs: Vec<OracleVariable>,
    pub output: OracleVariable,
    pub rules: Vec<(Vec<String>, String)>,
}

impl OracleController {
    fn from_json(v: &Value) -> Self {
        OracleController {
            inputs: v["inputs"].as_array().unwrap().iter().map(OracleVariable::from_json).collect(),
            output: OracleVariable::from_json(&v["output"]),
            rules: v["rules"]
                .as_array()
                .unwrap()
                .iter()
                .map(|r| {
                    let ants = r["if"].as_array().unwrap().iter().map(|a| a.as_str().unwrap().to_string()).collect();
                    (ants, r["then"].as_str().unwrap().to_string())
                })
                .collect(),
        }
    }

    /// Per-output-term accumulated rule weight.
    fn term_weights(&self, inputs: &[f64]) -> Vec<f64> {
        let mut w = vec![0.0; self.output.labels.len()];
        for (ants, cons) in &self.rules {
            let weight: f64 = ants
                .iter()
                .zip(&self.inputs)
                .zip(inputs)
                .map(|((label, var), &u)| var.degree(label, u))
                .product();
            let k = self.output.labels.iter().position(|l| l == cons).unwrap();
            w[k] += weight;
        }
        w
    }

    /// Centroid of the weighted-sum aggregate, integrated on a uniform grid.
    pub fn infer(&self, inputs: &[f64]) -> f64 {
        let weights = self.term_weights(inputs);
        let active: Vec<(f64, &Shape)> = weights
            .iter()
            .zip(&self.output.shapes)
            .filter(|(w, _)| **w > 0.0)
            .map(|(w, s)| (*w, s))
            .collect();
        if active.is_empty() {
            return 0.5 * (self.output.lo + self.output.hi);
        }
        // Integrate only where the aggregate can be non-zero, snapped to the grid.
        let (mut a, mut b) = (f64::INFINITY, f64::NEG_INFINITY);
        for (_, s) in &active {
            let (s0, s1) = s.support();
            a = a.min(s0.max(self.output.lo));
            b = b.max(s1.min(self.output.hi));
        }
        let i0 = ((a - self.output.lo) / GRID_STEP).floor() as i64;
        let i1 = ((b - self.output.lo) / GRID_STEP).ceil() as i64;
        let (mut area, mut moment) = (0.0, 0.0);
        let mut prev: Option<(f64, f64)> = None;
        for i in i0..=i1 {
            let u = (self.output.lo + i as f64 * GRID_STEP).min(self.output.hi);
            let m: f64 = active.iter().map(|(w, s)| w * s.eval(u)).sum();
            if let Some((pu, pm)) = prev {
                let du = u - pu;
                area += 0.5 * du * (pm + m);
                moment += 0.5 * du * (pm * pu + m * u);
            }
            prev = Some((u, m));
        }
        moment / area
    }
}

pub struct Oracle {
    pub trailer: OracleController,
    pub cab: OracleController,
}

impl Oracle {
    pub fn new(c: &Controllers) -> Self {
        let doc: Value = serde_json::from_str(&c.to_json()).unwrap();
        Oracle {
            trailer: OracleController::from_json(&doc["flc_t"]),
            cab: OracleController::from_json(&doc["flc_c"]),
        }
    }
}

/// `|a - b| <= tol * max(|b|, 1)`.
pub fn close_rel(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

pub const STANDARD_SCENARIOS: [(&str, [f64; 4]); 3] = [
    ("wide_right", [80.0, 180.0, 60.0, 30.0]),
    ("high_left", [-40.0, 170.0, 20.0, 15.0]),
    ("low_left", [-60.0, 120.0, 30.0, 0.0]),
];

pub fn standard_scenario(label: &str, s: [f64; 4]) -> Scenario {
    Scenario::new(label, PlantState::new(s[0], s[1], s[2], s[3]))
}
