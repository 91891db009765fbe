use std::collections::BTreeMap;

use serde::Serialize;

use super::skew::hits_turning;
use super::{PiecewiseLinear, Symbol, HIT_TOL};

/// Eventual periodicity of an orbit: state `preperiod + period` equals state
/// `preperiod`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Periodicity {
    pub preperiod: usize,
    pub period: usize,
}

/// Orbit of a point with the signed derivatives `(f^k)'(x0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRecord {
    /// `x0, f(x0), ..., f^N(x0)`.
    pub points: Vec<f64>,
    /// `(f^k)'(x0)` for `k = 0..=N`, with `derivs[0] = 1`.
    pub derivs: Vec<f64>,
    /// Branch of `f^k(x0)` for `k = 0..N`.
    pub symbols: Vec<Symbol>,
    /// First `k` with `f^k(x0) = c`.
    pub hit_turning_at: Option<usize>,
}

/// Kneading sequence: itinerary of the critical value under the left-limit
/// convention, never containing `C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kneading {
    pub word: Vec<Symbol>,
    pub periodic: Option<Periodicity>,
    /// `m` such that the word starts with `R L R^m L`.
    pub class_m: Option<usize>,
}

impl Kneading {
    /// Products `theta_k = eps_0 ... eps_{k-1}` with `eps = +1` for `L` and
    /// `-1` for `R`; `theta_0 = 1`.
    pub fn signs(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.word.len() + 1);
        let mut theta = 1.0;
        out.push(theta);
        for sym in &self.word {
            theta *= sym.sign();
            out.push(theta);
        }
        out
    }
}

impl std::fmt::Display for Kneading {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for s in &self.word {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Orbit followed along one side: `orient` is the side (`+1` right, `-1`
/// left) from which the current point is approached.
#[derive(Debug, Clone)]
pub(crate) struct OneSidedOrbit {
    pub points: Vec<f64>,
    /// Slope taken at `points[k]`; one fewer than `points` unless a cycle
    /// closed.
    pub slopes: Vec<f64>,
    pub symbols: Vec<Symbol>,
    pub cycle: Option<Periodicity>,
    pub first_hit: Option<usize>,
}

impl OneSidedOrbit {
    pub fn into_record(self, n: usize) -> OrbitRecord {
        let mut derivs = Vec::with_capacity(n + 1);
        let mut d = 1.0;
        derivs.push(d);
        for &sl in self.slopes.iter().take(n) {
            d *= sl;
            derivs.push(d);
        }
        OrbitRecord {
            points: self.points,
            derivs,
            symbols: self.symbols,
            hit_turning_at: self.first_hit,
        }
    }
}

fn state_key(x: f64) -> u64 {
    // order-preserving for non-negative floats once -0.0 is folded into 0.0
    (x + 0.0).to_bits()
}

/// Follow `n` steps of the orbit of `x0` approached from side `orient0`.
///
/// Points within [`HIT_TOL`] of the turning point are snapped onto it and
/// continue along the lap selected by the current orientation. With
/// `detect_cycle`, the walk stops at the first state (point and orientation)
/// repeating an earlier one within [`HIT_TOL`].
pub(crate) fn one_sided_orbit<M: PiecewiseLinear + ?Sized>(
    map: &M,
    x0: f64,
    orient0: f64,
    n: usize,
    detect_cycle: bool,
) -> OneSidedOrbit {
    let c = map.turning_point();
    let mut points = Vec::with_capacity(n + 1);
    let mut slopes = Vec::with_capacity(n);
    let mut symbols = Vec::with_capacity(n);
    let mut seen: [BTreeMap<u64, usize>; 2] = [BTreeMap::new(), BTreeMap::new()];
    let mut cycle = None;
    let mut first_hit = None;

    let mut x = x0;
    let mut orient = orient0;
    for k in 0..=n {
        if hits_turning(map, x) {
            x = c;
        }
        if detect_cycle {
            let side = usize::from(orient > 0.0);
            let lo = state_key((x - HIT_TOL).max(0.0));
            let hi = state_key(x + HIT_TOL);
            if let Some((_, &j)) = seen[side].range(lo..=hi).next() {
                cycle = Some(Periodicity {
                    preperiod: j,
                    period: k - j,
                });
                break;
            }
            seen[side].insert(state_key(x), k);
        }
        points.push(x);
        if k == n {
            break;
        }
        if x == c && first_hit.is_none() {
            first_hit = Some(k);
        }
        let slope = map.one_sided_slope(x, orient);
        symbols.push(if x < c || (x == c && orient < 0.0) {
            Symbol::L
        } else {
            Symbol::R
        });
        slopes.push(slope);
        x = if x == c {
            map.critical_value()
        } else {
            map.apply(x)
        };
        orient *= slope.signum();
    }
    OneSidedOrbit {
        points,
        slopes,
        symbols,
        cycle,
        first_hit,
    }
}

pub(crate) fn kneading_of<M: PiecewiseLinear + ?Sized>(map: &M, n: usize) -> Kneading {
    let orbit = one_sided_orbit(map, map.critical_value(), -1.0, n, true);
    let mut word = orbit.symbols;
    if let Some(p) = orbit.cycle {
        while word.len() < n {
            let sym = word[word.len() - p.period];
            word.push(sym);
        }
    }
    word.truncate(n);
    let class_m = class_index(&word);
    Kneading {
        word,
        periodic: orbit.cycle,
        class_m,
    }
}

fn class_index(word: &[Symbol]) -> Option<usize> {
    if word.len() < 3 || word[0] != Symbol::R || word[1] != Symbol::L {
        return None;
    }
    word[2..].iter().position(|&s| s == Symbol::L)
}
