//! Skew tent maps, general piecewise linear unimodal maps, and their
//! symbolic dynamics.
//!
//! All maps act on `[0, 1]` and follow one normalization: increasing on the
//! left lap, decreasing on the right lap, the turning point `c` is sent to the
//! maximum, and `1` is sent to `0` for skew tent maps.

mod exact;
mod orbit;
mod pl;
mod skew;

pub use orbit::{Kneading, OrbitRecord, Periodicity};
pub use pl::PlUnimodalMap;
pub use skew::{Classification, SkewTentMap};

pub(crate) use exact::exact_kneading_signs;
pub use exact::ExactForm;
pub(crate) use orbit::{kneading_of, one_sided_orbit};

use std::fmt;

/// Distance below which an orbit point is taken to sit exactly on the
/// turning point (or on an earlier orbit point, for cycle detection).
pub const HIT_TOL: f64 = 1e-13;

/// Branch label of a point relative to the turning point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    L,
    R,
}

impl Symbol {
    /// `+1` for the increasing lap, `-1` for the decreasing one.
    pub fn sign(self) -> f64 {
        match self {
            Symbol::L => 1.0,
            Symbol::R => -1.0,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::L => f.write_str("L"),
            Symbol::R => f.write_str("R"),
        }
    }
}

/// An affine piece `[x0, x1] -> [y0, y1]` of a piecewise linear map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPiece {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl LinearPiece {
    pub fn slope(&self) -> f64 {
        (self.y1 - self.y0) / (self.x1 - self.x0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.y0 + self.slope() * (x - self.x0)
    }

    pub fn len(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn is_empty(&self) -> bool {
        self.x1 <= self.x0
    }

    /// Preimage of `y` inside the piece, if `y` lies in its image.
    pub fn preimage(&self, y: f64) -> Option<f64> {
        let (lo, hi) = if self.y0 <= self.y1 {
            (self.y0, self.y1)
        } else {
            (self.y1, self.y0)
        };
        if y < lo || y > hi {
            return None;
        }
        let x = self.x0 + (y - self.y0) / self.slope();
        Some(x.clamp(self.x0, self.x1))
    }
}

/// Continuous piecewise linear unimodal self-maps of `[0, 1]`.
///
/// Implementors provide the ordered list of affine pieces; generic code
/// (orbits, kneading, lap counts, Ulam matrices) works off that list.
pub trait PiecewiseLinear {
    /// Affine pieces ordered left to right, covering `[0, 1]`.
    fn pieces(&self) -> Vec<LinearPiece>;

    /// Abscissa of the maximum.
    fn turning_point(&self) -> f64;

    /// Value at the turning point.
    fn critical_value(&self) -> f64;

    /// Evaluate without domain checks; the result is clamped to `[0, 1]`.
    fn apply(&self, x: f64) -> f64;

    /// Smallest absolute slope over all pieces.
    fn min_abs_slope(&self) -> f64 {
        self.pieces()
            .iter()
            .map(|p| p.slope().abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Slope used when leaving `x` in the direction `orient` (`+1` right, `-1` left).
    fn one_sided_slope(&self, x: f64, orient: f64) -> f64;

    /// The same map over exact dyadic rationals.
    fn exact_form(&self) -> ExactForm {
        let pieces = self.pieces();
        let mut xs: Vec<f64> = pieces.iter().map(|p| p.x0).collect();
        let mut ys: Vec<f64> = pieces.iter().map(|p| p.y0).collect();
        let last = pieces.last().expect("at least one piece");
        xs.push(last.x1);
        ys.push(last.y1);
        ExactForm::from_graph(&xs, &ys, self.turning_point())
    }
}

/// Either kind of map, as accepted and produced by the solvers. Serializes to
/// the JSON of the wrapped map.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(untagged)]
pub enum UnimodalMap {
    Skew(SkewTentMap),
    Pl(PlUnimodalMap),
}

impl UnimodalMap {
    /// Piecewise linear form with explicit breakpoints.
    pub fn to_pl(&self) -> PlUnimodalMap {
        match self {
            UnimodalMap::Skew(m) => m.to_pl(),
            UnimodalMap::Pl(m) => m.clone(),
        }
    }

    pub fn kneading(&self, n: usize) -> Kneading {
        match self {
            UnimodalMap::Skew(m) => m.kneading(n),
            UnimodalMap::Pl(m) => m.kneading(n),
        }
    }
}

impl From<SkewTentMap> for UnimodalMap {
    fn from(m: SkewTentMap) -> Self {
        UnimodalMap::Skew(m)
    }
}

impl From<PlUnimodalMap> for UnimodalMap {
    fn from(m: PlUnimodalMap) -> Self {
        UnimodalMap::Pl(m)
    }
}

impl PiecewiseLinear for UnimodalMap {
    fn pieces(&self) -> Vec<LinearPiece> {
        match self {
            UnimodalMap::Skew(m) => m.pieces(),
            UnimodalMap::Pl(m) => m.pieces(),
        }
    }

    fn turning_point(&self) -> f64 {
        match self {
            UnimodalMap::Skew(m) => m.turning_point(),
            UnimodalMap::Pl(m) => m.turning_point(),
        }
    }

    fn critical_value(&self) -> f64 {
        match self {
            UnimodalMap::Skew(m) => m.critical_value(),
            UnimodalMap::Pl(m) => m.critical_value(),
        }
    }

    fn apply(&self, x: f64) -> f64 {
        match self {
            UnimodalMap::Skew(m) => m.apply(x),
            UnimodalMap::Pl(m) => m.apply(x),
        }
    }

    fn min_abs_slope(&self) -> f64 {
        match self {
            UnimodalMap::Skew(m) => m.min_abs_slope(),
            UnimodalMap::Pl(m) => m.min_abs_slope(),
        }
    }

    fn one_sided_slope(&self, x: f64, orient: f64) -> f64 {
        match self {
            UnimodalMap::Skew(m) => m.one_sided_slope(x, orient),
            UnimodalMap::Pl(m) => m.one_sided_slope(x, orient),
        }
    }

    fn exact_form(&self) -> ExactForm {
        match self {
            UnimodalMap::Skew(m) => m.exact_form(),
            UnimodalMap::Pl(m) => m.exact_form(),
        }
    }
}
