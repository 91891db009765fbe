use serde::{Deserialize, Serialize};

use super::orbit::{kneading_of, Kneading};
use super::{LinearPiece, PiecewiseLinear};
use crate::error::{Error, Result};

/// Tolerance for values slightly outside `[0, 1]` produced by composition.
const RANGE_SLACK: f64 = 1e-12;

/// Continuous piecewise linear unimodal self-map of `[0, 1]`, given by its
/// graph at the breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PlGraph", into = "PlGraph")]
pub struct PlUnimodalMap {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    turning: usize,
    min_slope: f64,
}

#[derive(Serialize, Deserialize)]
struct PlGraph {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<PlGraph> for PlUnimodalMap {
    type Error = Error;

    fn try_from(g: PlGraph) -> Result<Self> {
        PlUnimodalMap::new(g.breakpoints, g.values)
    }
}

impl From<PlUnimodalMap> for PlGraph {
    fn from(m: PlUnimodalMap) -> Self {
        PlGraph {
            breakpoints: m.breakpoints,
            values: m.values,
        }
    }
}

impl PlUnimodalMap {
    /// Validates continuity data, unimodality and expansion (`min |slope| > 1`).
    pub fn new(breakpoints: Vec<f64>, mut values: Vec<f64>) -> Result<Self> {
        let n = breakpoints.len();
        if n != values.len() {
            return Err(Error::InvalidMap(format!(
                "{n} breakpoints but {} values",
                values.len()
            )));
        }
        if n < 3 {
            return Err(Error::InvalidMap("need at least three breakpoints".into()));
        }
        if breakpoints[0] != 0.0 || breakpoints[n - 1] != 1.0 {
            return Err(Error::InvalidMap(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidMap(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        for v in values.iter_mut() {
            if !(*v >= -RANGE_SLACK && *v <= 1.0 + RANGE_SLACK) {
                return Err(Error::InvalidMap(format!("value {v} outside [0, 1]")));
            }
            *v = v.clamp(0.0, 1.0);
        }
        let turning = (0..n)
            .max_by(|&i, &j| values[i].total_cmp(&values[j]))
            .unwrap();
        if turning == 0 || turning == n - 1 {
            return Err(Error::InvalidMap(
                "maximum must be at an interior breakpoint".into(),
            ));
        }
        let up = values[..=turning].windows(2).all(|w| w[1] > w[0]);
        let down = values[turning..].windows(2).all(|w| w[1] < w[0]);
        if !(up && down) {
            return Err(Error::InvalidMap("values are not unimodal".into()));
        }
        let min_slope = breakpoints
            .windows(2)
            .zip(values.windows(2))
            .map(|(x, y)| ((y[1] - y[0]) / (x[1] - x[0])).abs())
            .fold(f64::INFINITY, f64::min);
        if !(min_slope > 1.0) {
            return Err(Error::InvalidMap(format!(
                "not piecewise expanding: minimal slope magnitude {min_slope}"
            )));
        }
        Ok(PlUnimodalMap {
            breakpoints,
            values,
            turning,
            min_slope,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::DomainError {
                what: "x must lie in [0, 1]",
                value: x,
            });
        }
        Ok(self.apply(x))
    }

    /// Itinerary of the critical value, limit taken from below.
    pub fn kneading(&self, n: usize) -> Kneading {
        kneading_of(self, n.max(1))
    }

    /// Signed slopes of the pieces, left to right.
    pub fn slopes(&self) -> Vec<f64> {
        self.pieces().iter().map(LinearPiece::slope).collect()
    }

    fn piece_index(&self, x: f64) -> usize {
        // index i with breakpoints[i] <= x < breakpoints[i + 1]
        let i = self.breakpoints.partition_point(|&b| b <= x);
        i.saturating_sub(1).min(self.breakpoints.len() - 2)
    }
}

impl PiecewiseLinear for PlUnimodalMap {
    fn pieces(&self) -> Vec<LinearPiece> {
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, y)| LinearPiece {
                x0: x[0],
                x1: x[1],
                y0: y[0],
                y1: y[1],
            })
            .collect()
    }

    fn turning_point(&self) -> f64 {
        self.breakpoints[self.turning]
    }

    fn critical_value(&self) -> f64 {
        self.values[self.turning]
    }

    fn apply(&self, x: f64) -> f64 {
        let i = self.piece_index(x);
        let (x0, x1) = (self.breakpoints[i], self.breakpoints[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        (y0 + (y1 - y0) * ((x - x0) / (x1 - x0))).clamp(0.0, 1.0)
    }

    fn min_abs_slope(&self) -> f64 {
        self.min_slope
    }

    fn one_sided_slope(&self, x: f64, orient: f64) -> f64 {
        let mut i = self.piece_index(x);
        if orient < 0.0 && i > 0 && x == self.breakpoints[i] {
            i -= 1;
        }
        (self.values[i + 1] - self.values[i]) / (self.breakpoints[i + 1] - self.breakpoints[i])
    }
}
