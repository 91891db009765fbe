use serde::{Deserialize, Serialize};

use super::orbit::{kneading_of, one_sided_orbit, Kneading, OrbitRecord};
use super::{ExactForm, LinearPiece, PiecewiseLinear, HIT_TOL};
use crate::error::{Error, Result};
use crate::roots;

/// Slack allowed on `1/s + 1/t >= 1` so that maps on the full-family
/// boundary survive rounding in their construction.
const SELF_MAP_SLACK: f64 = 1e-12;

/// Relative width of the band around `s t^2 = s + t` that counts as the
/// mixing boundary.
const MIXING_BOUNDARY_RTOL: f64 = 1e-12;

/// Piecewise expanding skew tent map with left slope `s` and right slope `-t`,
/// normalized so that `f(c) = 1` and `f(1) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SlopePair", into = "SlopePair")]
pub struct SkewTentMap {
    s: f64,
    t: f64,
    c: f64,
    xstar: f64,
}

#[derive(Serialize, Deserialize)]
struct SlopePair {
    s: f64,
    t: f64,
}

impl TryFrom<SlopePair> for SkewTentMap {
    type Error = Error;

    fn try_from(p: SlopePair) -> Result<Self> {
        SkewTentMap::new(p.s, p.t)
    }
}

impl From<SkewTentMap> for SlopePair {
    fn from(m: SkewTentMap) -> Self {
        SlopePair { s: m.s, t: m.t }
    }
}

/// Membership and mixing data for a skew tent map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub in_y: bool,
    pub mixing: bool,
    /// `s t^2 = s + t` up to rounding: `f(0)` is the fixed point.
    pub boundary: bool,
    /// The `m` of the kneading prefix `R L R^m L`, for mixing maps.
    pub class_n: Option<usize>,
}

impl SkewTentMap {
    pub fn new(s: f64, t: f64) -> Result<Self> {
        if !(s > 1.0 && t > 1.0) || !s.is_finite() || !t.is_finite() {
            return Err(Error::SlopeOutOfRange { s, t });
        }
        let sum = 1.0 / s + 1.0 / t;
        if sum < 1.0 - SELF_MAP_SLACK {
            return Err(Error::NotSelfMap { sum });
        }
        Ok(SkewTentMap {
            s,
            t,
            c: (t - 1.0) / t,
            xstar: t / (t + 1.0),
        })
    }

    /// Equal-slope tent map with entropy `log s`.
    pub fn tent(s: f64) -> Result<Self> {
        Self::new(s, s)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Turning point `(t - 1) / t`.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Fixed point `t / (t + 1)` on the right lap.
    pub fn fixed_point(&self) -> f64 {
        self.xstar
    }

    /// `f(0) = 1 - s (t - 1) / t`.
    pub fn value_at_zero(&self) -> f64 {
        (1.0 - self.s * self.c).max(0.0)
    }

    pub fn min_slope(&self) -> f64 {
        self.s.min(self.t)
    }

    /// `s t^2 - s - t`; positive exactly for mixing maps.
    pub fn mixing_excess(&self) -> f64 {
        self.s * self.t * self.t - self.s - self.t
    }

    fn on_mixing_boundary(&self) -> bool {
        self.mixing_excess().abs() <= MIXING_BOUNDARY_RTOL * self.s * self.t * self.t
    }

    pub fn is_mixing(&self) -> bool {
        self.mixing_excess() > 0.0 && !self.on_mixing_boundary()
    }

    /// Checked evaluation.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::DomainError {
                what: "x must lie in [0, 1]",
                value: x,
            });
        }
        Ok(self.apply(x))
    }

    pub fn classify(&self) -> Classification {
        let boundary = self.on_mixing_boundary();
        let mixing = self.is_mixing();
        let class_n = if mixing {
            self.kneading(KNEADING_CLASS_LEN).class_m
        } else {
            None
        };
        Classification {
            in_y: true,
            mixing,
            boundary,
            class_n,
        }
    }

    /// Orbit of `x0` with signed derivative products `(f^k)'(x0)`.
    ///
    /// A point landing on `c` takes the slope `-t` when the accumulated
    /// derivative is positive and `s` when it is negative, i.e. the
    /// derivative is the limit from the right of `x0`.
    pub fn orbit_with_derivatives(&self, x0: f64, n: usize) -> Result<OrbitRecord> {
        if !(0.0..=1.0).contains(&x0) {
            return Err(Error::DomainError {
                what: "x0 must lie in [0, 1]",
                value: x0,
            });
        }
        let orbit = one_sided_orbit(self, x0, 1.0, n, false);
        Ok(orbit.into_record(n))
    }

    /// Itinerary of `1` of length `n`, taken as the limit from the left.
    pub fn kneading(&self, n: usize) -> Kneading {
        kneading_of(self, n.max(1))
    }

    /// Slopes `(t^2, s t)` of the map linearly conjugate to `f^2` on its
    /// invariant interval. Accepts maps on the mixing boundary.
    pub fn renormalize(&self) -> Result<SkewTentMap> {
        if self.is_mixing() {
            return Err(Error::NotRenormalizable {
                excess: self.mixing_excess(),
            });
        }
        SkewTentMap::new(self.t * self.t, self.s * self.t)
    }

    /// Skew tent map with `f(0) = a` whose turning point lies on a periodic
    /// orbit of period `2n + 3` with kneading `R L R^{2n} C`.
    pub fn stefan(a: f64, n: usize) -> Result<SkewTentMap> {
        if !(a > 0.0 && a < 0.5) {
            return Err(Error::DomainError {
                what: "f(0) must lie in (0, 1/2)",
                value: a,
            });
        }
        let p = (2 * n + 1) as i32;
        let closure = |t: f64| (t - a * (t + 1.0)) * t.powi(p) - 1.0;
        let lo = 1.0 + 1e-12;
        let hi = (1.0 / (1.0 - 2.0 * a)).powf(1.0 / p as f64) + 1.0;
        let increasing = closure(lo) < 0.0 && closure(hi) > 0.0;
        let root = if increasing {
            roots::bisect(closure, lo, hi, 0.0)
        } else {
            roots::scan_and_bisect(closure, lo, hi, 4096, 0.0)
        }
        .map_err(|e| Error::NoRoot(format!("closure equation for a = {a}, n = {n}: {e}")))?;
        let t = root.root;
        let s = t * (1.0 - a) / (t - 1.0);
        let map = SkewTentMap::new(s, t)?;
        map.verify_stefan(a, n)?;
        Ok(map)
    }

    fn verify_stefan(&self, a: f64, n: usize) -> Result<()> {
        let f0 = self.value_at_zero();
        if (f0 - a).abs() > 1e-12 {
            return Err(Error::VerificationFailed(format!(
                "f(0) = {f0}, expected {a}"
            )));
        }
        let mut x = a;
        for k in 0..2 * n {
            if x < self.c {
                return Err(Error::VerificationFailed(format!(
                    "f^{k}(a) = {x} lies left of c = {}",
                    self.c
                )));
            }
            x = self.apply(x);
        }
        // the error of f^{2n}(a) grows like t^{2n} times rounding
        let tol = 1e-9;
        if (x - self.c).abs() > tol {
            return Err(Error::VerificationFailed(format!(
                "f^{}(a) = {x} does not close on c = {}",
                2 * n,
                self.c
            )));
        }
        Ok(())
    }

    /// Skew tent map with right slope `t` whose turning point is periodic with
    /// `f^steps(0) = c`, the left slope being located by bisection inside
    /// `s_bracket`.
    pub fn with_critical_return(
        t: f64,
        steps: usize,
        s_bracket: (f64, f64),
    ) -> Result<SkewTentMap> {
        let c = (t - 1.0) / t;
        let g = |s: f64| match SkewTentMap::new(s, t) {
            Ok(m) => {
                let mut x = 0.0;
                for _ in 0..steps {
                    x = m.apply(x);
                }
                x - c
            }
            Err(_) => f64::NAN,
        };
        let root = roots::bisect(g, s_bracket.0, s_bracket.1, 0.0)?;
        let map = SkewTentMap::new(root.root, t)?;
        let mut x = 0.0;
        for _ in 0..steps {
            x = map.apply(x);
        }
        if (x - c).abs() > 1e-9 {
            return Err(Error::VerificationFailed(format!(
                "f^{steps}(0) = {x} does not return to c = {c}"
            )));
        }
        Ok(map)
    }

    /// The map as a three-breakpoint [`PlUnimodalMap`](super::PlUnimodalMap).
    pub fn to_pl(&self) -> super::PlUnimodalMap {
        super::PlUnimodalMap::new(vec![0.0, self.c, 1.0], vec![self.value_at_zero(), 1.0, 0.0])
            .expect("skew tent maps are valid piecewise linear unimodal maps")
    }
}

/// Kneading length used to read off the class index `m`.
const KNEADING_CLASS_LEN: usize = 4096;

impl PiecewiseLinear for SkewTentMap {
    fn pieces(&self) -> Vec<LinearPiece> {
        vec![
            LinearPiece {
                x0: 0.0,
                x1: self.c,
                y0: self.value_at_zero(),
                y1: 1.0,
            },
            LinearPiece {
                x0: self.c,
                x1: 1.0,
                y0: 1.0,
                y1: 0.0,
            },
        ]
    }

    fn turning_point(&self) -> f64 {
        self.c
    }

    fn critical_value(&self) -> f64 {
        1.0
    }

    #[inline]
    fn apply(&self, x: f64) -> f64 {
        let y = if x <= self.c {
            1.0 - self.s * (self.c - x)
        } else {
            self.t * (1.0 - x)
        };
        y.clamp(0.0, 1.0)
    }

    fn min_abs_slope(&self) -> f64 {
        self.min_slope()
    }

    #[inline]
    fn one_sided_slope(&self, x: f64, orient: f64) -> f64 {
        if x < self.c || (x == self.c && orient < 0.0) {
            self.s
        } else {
            -self.t
        }
    }

    /// Exact in `s` and `t`. Maps within the construction slack of
    /// `1/s + 1/t = 1` are taken on the full family, with `f(0) = 0`.
    fn exact_form(&self) -> ExactForm {
        let full = (1.0 / self.s + 1.0 / self.t - 1.0).abs() <= SELF_MAP_SLACK;
        ExactForm::skew_tent(self.s, self.t, full)
    }
}

/// `|x - c| <= HIT_TOL` for the turning point of `map`.
pub(crate) fn hits_turning<M: PiecewiseLinear + ?Sized>(map: &M, x: f64) -> bool {
    (x - map.turning_point()).abs() <= HIT_TOL
}
