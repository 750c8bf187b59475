//! Piecewise-linear membership shapes.

use serde::{Deserialize, Serialize};

use super::FuzzyError;

/// Shape of a membership function over a scalar universe.
///
/// Breakpoints are stored in increasing order:
/// - `Triangular { a, b, c }`: feet at `a` and `c`, peak at `b`.
/// - `LeftShoulder { edge, foot }`: 1 for `u <= edge`, falling to 0 at `foot`.
/// - `RightShoulder { foot, edge }`: 0 for `u <= foot`, rising to 1 at `edge`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MembershipFunction {
    Triangular { a: f64, b: f64, c: f64 },
    LeftShoulder { edge: f64, foot: f64 },
    RightShoulder { foot: f64, edge: f64 },
}

impl MembershipFunction {
    pub fn triangular(a: f64, b: f64, c: f64) -> Result<Self, FuzzyError> {
        Self::Triangular { a, b, c }.validated()
    }

    pub fn left_shoulder(edge: f64, foot: f64) -> Result<Self, FuzzyError> {
        Self::LeftShoulder { edge, foot }.validated()
    }

    pub fn right_shoulder(foot: f64, edge: f64) -> Result<Self, FuzzyError> {
        Self::RightShoulder { foot, edge }.validated()
    }

    /// Checks that the breakpoints are finite and strictly increasing.
    pub fn validated(self) -> Result<Self, FuzzyError> {
        let points = self.breakpoints();
        let finite = points.iter().all(|p| p.is_finite());
        let increasing = points.windows(2).all(|w| w[0] < w[1]);
        if finite && increasing {
            Ok(self)
        } else {
            Err(FuzzyError::InvalidMembership(format!(
                "breakpoints must be finite and strictly increasing, got {points:?}"
            )))
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Self::Triangular { a, b, c } => vec![a, b, c],
            Self::LeftShoulder { edge, foot } => vec![edge, foot],
            Self::RightShoulder { foot, edge } => vec![foot, edge],
        }
    }

    /// Degree of membership of `u`, always in `[0, 1]`.
    pub fn eval(&self, u: f64) -> f64 {
        let degree = match *self {
            Self::Triangular { a, b, c } => {
                if u <= a || u >= c {
                    0.0
                } else if u == b {
                    1.0
                } else if u < b {
                    (u - a) / (b - a)
                } else {
                    (c - u) / (c - b)
                }
            }
            Self::LeftShoulder { edge, foot } => {
                if u <= edge {
                    1.0
                } else if u >= foot {
                    0.0
                } else {
                    (foot - u) / (foot - edge)
                }
            }
            Self::RightShoulder { foot, edge } => {
                if u >= edge {
                    1.0
                } else if u <= foot {
                    0.0
                } else {
                    (u - foot) / (edge - foot)
                }
            }
        };
        degree.clamp(0.0, 1.0)
    }

    /// Point where the membership reaches 1 nearest the term's center: the
    /// peak for triangles, the plateau edge for shoulders.
    pub fn core(&self) -> f64 {
        match *self {
            Self::Triangular { b, .. } => b,
            Self::LeftShoulder { edge, .. } | Self::RightShoulder { edge, .. } => edge,
        }
    }

    /// Interval outside which the degree is 0, with shoulders extended to the
    /// given universe bounds.
    pub fn support_within(&self, lo: f64, hi: f64) -> (f64, f64) {
        match *self {
            Self::Triangular { a, c, .. } => (a, c),
            Self::LeftShoulder { foot, .. } => (lo, foot),
            Self::RightShoulder { foot, .. } => (foot, hi),
        }
    }

    /// Vertices of the membership polygon restricted to `[lo, hi]`.
    fn polygon(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let raw = match *self {
            Self::Triangular { a, b, c } => vec![(a, 0.0), (b, 1.0), (c, 0.0)],
            Self::LeftShoulder { edge, foot } => vec![(lo.min(edge), 1.0), (edge, 1.0), (foot, 0.0)],
            Self::RightShoulder { foot, edge } => vec![(foot, 0.0), (edge, 1.0), (hi.max(edge), 1.0)],
        };
        let mut clipped: Vec<(f64, f64)> = Vec::with_capacity(raw.len() + 2);
        for w in raw.windows(2) {
            let (u0, f0) = w[0];
            let (u1, f1) = w[1];
            let s0 = u0.max(lo);
            let s1 = u1.min(hi);
            if s1 <= s0 {
                continue;
            }
            let lerp = |u: f64| f0 + (f1 - f0) * (u - u0) / (u1 - u0);
            if clipped.last().is_none_or(|&(u, _)| u != s0) {
                clipped.push((s0, lerp(s0)));
            }
            clipped.push((s1, lerp(s1)));
        }
        clipped
    }

    /// Exact area and centroid of the shape restricted to `[lo, hi]`.
    ///
    /// Returns `None` when the restricted area is zero.
    pub fn area_centroid(&self, lo: f64, hi: f64) -> Option<(f64, f64)> {
        let mut area = 0.0;
        let mut moment = 0.0;
        for w in self.polygon(lo, hi).windows(2) {
            let (u0, f0) = w[0];
            let (u1, f1) = w[1];
            let du = u1 - u0;
            area += du * (f0 + f1) / 2.0;
            moment += du * (f0 * (2.0 * u0 + u1) + f1 * (u0 + 2.0 * u1)) / 6.0;
        }
        (area > 0.0).then(|| (area, moment / area))
    }
}
