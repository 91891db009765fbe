//! Construction of maps with prescribed topological entropy `a` and metric
//! entropy `b` of the absolutely continuous invariant measure.
//!
//! For `a > log(2)/2` the map is a mixing skew tent map found on the
//! isentrope `{(s, t) : h_top = a}`: at `t = e^a` the map is the symmetric
//! tent and `h_mu = a`, and `h_mu` drops towards `0` as `t -> 1`, so a sign
//! change of `h_mu - b` is bracketed and bisected. Smaller `a` are reached by
//! solving for `2^n a` and taking `n` rectangular roots, each of which halves
//! both entropies.

use serde::Serialize;

use crate::density::{series_density, DEFAULT_TOL};
use crate::entropy::{
    entropy_report, metric_entropy, topological_entropy, topological_entropy_certified,
    EntropyReport, MetricMethod,
};
use crate::error::{Error, Result};
use crate::maps::{PiecewiseLinear, PlUnimodalMap, SkewTentMap, UnimodalMap};
use crate::ulam::metric_entropy_ulam;

const LN2: f64 = std::f64::consts::LN_2;
/// Slack on the target region boundaries.
const TARGET_SLACK: f64 = 1e-12;
/// Bracket width for the parameter bisections.
pub const PARAM_TOL: f64 = 1e-12;
/// Allowed gap between `h_top` and the target on the isentrope.
pub const ISENTROPE_TOL: f64 = 1e-9;
/// Certificate tolerance of [`solve_skew`].
pub const SKEW_CERT_TOL: f64 = 1e-6;
/// Certificate tolerances `(h_top, h_mu)` of [`solve_unimodal`].
pub const UNIMODAL_CERT_TOL: (f64, f64) = (1e-4, 1e-2);
/// Bins of the Ulam matrix used for piecewise linear certificates.
pub const ULAM_BINS: usize = 8192;
/// Nudges of `t` in relative steps of `1e-12` tried on each side before the
/// coarser ones.
const SETTLE_TRIES: usize = 16;

/// `log(16/15) / 4`, the lower bound on `h_mu` for the second-level construction.
pub fn double_renormalization_floor() -> f64 {
    (16.0f64 / 15.0).ln() / 4.0
}

/// Closest float to the isentrope at a fixed `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct IsentropePoint {
    s: f64,
    /// `|h_top(s, t) - a|`.
    gap: f64,
    /// The final bracket consists of two adjacent floats.
    adjacent: bool,
}

fn isentrope_point(a: f64, t: f64) -> Result<IsentropePoint> {
    if !(a > 0.5 * LN2 && a <= LN2 + TARGET_SLACK) {
        return Err(Error::DomainError {
            what: "isentrope level must lie in (log(2)/2, log(2)]",
            value: a,
        });
    }
    if !(t > 1.0 && t <= a.exp() * (1.0 + TARGET_SLACK)) {
        return Err(Error::DomainError {
            what: "t must lie in (1, exp(a)]",
            value: t,
        });
    }
    let s_hi = t / (t - 1.0);
    if a >= LN2 - TARGET_SLACK {
        return Ok(IsentropePoint {
            s: s_hi,
            gap: 0.0,
            adjacent: false,
        });
    }
    let s_lo = (t / (t * t - 1.0)).max(1.0 + 1e-9);
    let h = |s: f64| SkewTentMap::new(s, t).and_then(|m| topological_entropy(&m));

    let (mut lo, mut hi) = (s_lo, s_hi);
    let mut h_lo = h(lo)?;
    let mut h_hi = h(hi)?;
    if h_lo > a {
        return Err(Error::BracketFailure(format!(
            "h_top({s_lo}, {t}) = {h_lo} already exceeds {a}"
        )));
    }
    if h_hi < a {
        return Err(Error::BracketFailure(format!(
            "h_top({s_hi}, {t}) = {h_hi} is below {a}"
        )));
    }
    // h_top(., t) is monotone but far from Lipschitz, so the bracket is
    // closed down to adjacent floats rather than to a fixed width
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let hm = h(mid)?;
        if hm < h_lo - ISENTROPE_TOL || hm > h_hi + ISENTROPE_TOL {
            return Err(Error::NotMonotone(format!(
                "h_top(s, {t}) at s = {lo}, {mid}, {hi} is {h_lo}, {hm}, {h_hi}"
            )));
        }
        if hm < a {
            lo = mid;
            h_lo = hm;
        } else {
            hi = mid;
            h_hi = hm;
        }
    }
    let (s, gap) = if a - h_lo < h_hi - a {
        (lo, a - h_lo)
    } else {
        (hi, h_hi - a)
    };
    Ok(IsentropePoint {
        s,
        gap,
        adjacent: f64::from_bits(lo.to_bits() + 1) >= hi,
    })
}

/// Left slope on the isentrope `h_top(s, t) = a`, by bisection between the
/// mixing boundary and the full family `s = t / (t - 1)`.
///
/// The result is within [`ISENTROPE_TOL`] of the level unless `h_top`
/// jumps by more than that between two adjacent floats around the level, in
/// which case the closer float is returned if it is within [`SKEW_CERT_TOL`].
pub fn isentrope_s(a: f64, t: f64) -> Result<f64> {
    let p = isentrope_point(a, t)?;
    let tol = if p.adjacent {
        SKEW_CERT_TOL
    } else {
        ISENTROPE_TOL
    };
    if p.gap > tol {
        return Err(Error::VerificationFailed(format!(
            "isentrope point ({}, {t}) misses h_top = {a} by {}",
            p.s, p.gap
        )));
    }
    Ok(p.s)
}

/// Near `t`, the float pair `(s, t')` closest to the isentrope.
///
/// When the kneading sequence depends on the last bits of `s`, `h_top` moves
/// in steps between adjacent floats and the nearest `s` at this exact `t` can
/// miss the level. Relative nudges of `t` up to `1e-9` shift those steps while
/// moving the metric entropy by far less than the certificate tolerance.
fn settle_on_isentrope(a: f64, t: f64) -> Result<SkewTentMap> {
    let mut best = (t, isentrope_point(a, t)?);
    let nudges = (1..=SETTLE_TRIES)
        .map(|k| k as f64 * 1e-12)
        .chain(
            [1e-11, 1e-10, 1e-9]
                .iter()
                .flat_map(|&e| [e, 2.0 * e, 5.0 * e]),
        )
        .filter(|&d| d <= 1e-9);
    for delta in nudges {
        if best.1.gap <= ISENTROPE_TOL {
            break;
        }
        for sign in [1.0, -1.0] {
            let t2 = t * (1.0 + sign * delta);
            if let Ok(p) = isentrope_point(a, t2) {
                if p.gap < best.1.gap {
                    best = (t2, p);
                }
            }
        }
    }
    SkewTentMap::new(best.1.s, best.0)
}

/// Targets requested from a solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Targets {
    pub a: f64,
    pub b: f64,
}

/// A constructed map with its independently recomputed entropies.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "SolveResultJson")]
pub struct SolveResult {
    pub map: UnimodalMap,
    pub report: EntropyReport,
    pub targets: Targets,
    /// Number of entropy evaluations spent by the outer search.
    pub iterations: usize,
    /// Number of rectangular roots applied to the inner skew tent solution.
    pub roots: usize,
}

#[derive(Serialize)]
struct SolveResultJson {
    map: UnimodalMap,
    h_top: f64,
    h_mu: f64,
    targets: Targets,
    iterations: usize,
}

impl From<SolveResult> for SolveResultJson {
    fn from(r: SolveResult) -> Self {
        SolveResultJson {
            map: r.map,
            h_top: r.report.h_top,
            h_mu: r.report.h_mu,
            targets: r.targets,
            iterations: r.iterations,
        }
    }
}

fn check_targets(a: f64, b: f64, a_min: f64) -> Result<()> {
    let reason = if !(a > a_min && a <= LN2 + TARGET_SLACK) {
        Some(format!("a must lie in ({a_min}, log 2]"))
    } else if !(b > 0.0 && b <= a + TARGET_SLACK) {
        Some("b must lie in (0, a]".to_string())
    } else {
        None
    };
    match reason {
        Some(reason) => Err(Error::InvalidTarget { a, b, reason }),
        None => Ok(()),
    }
}

fn skew_metric_entropy(map: &SkewTentMap) -> Result<f64> {
    metric_entropy(map, &series_density(map, DEFAULT_TOL)?)
}

/// Mixing skew tent map with `h_top = a` and `h_mu = b`, for
/// `log(2)/2 < a <= log(2)` and `0 < b <= a`.
pub fn solve_skew(a: f64, b: f64) -> Result<SolveResult> {
    check_targets(a, b, 0.5 * LN2)?;
    let a = a.min(LN2);
    let b = b.min(a);
    let mut iterations = 0;
    let map = if a - b <= TARGET_SLACK {
        SkewTentMap::tent(a.exp())?
    } else {
        let mut eval = |t: f64| -> Result<f64> {
            iterations += 1;
            skew_metric_entropy(&SkewTentMap::new(isentrope_point(a, t)?.s, t)?)
        };
        // h_mu = a > b at the symmetric tent; walk towards t = 1
        let t_top = a.exp().min(2.0);
        let mut hi = (t_top, a);
        let mut lo = loop {
            let t = 1.0 + 0.5 * (hi.0 - 1.0);
            if t - 1.0 < 1e-9 {
                return Err(Error::BracketFailure(format!(
                    "h_mu stays above {b} along the isentrope h_top = {a}"
                )));
            }
            let h = eval(t)?;
            if h < b {
                break (t, h);
            }
            hi = (t, h);
        };
        // sign-change bisection; h_mu is continuous along the isentrope but
        // not assumed monotone
        loop {
            let t = 0.5 * (lo.0 + hi.0);
            if hi.0 - lo.0 <= PARAM_TOL || t <= lo.0 || t >= hi.0 {
                break;
            }
            let h = eval(t)?;
            if h < b {
                lo = (t, h);
            } else {
                hi = (t, h);
            }
        }
        settle_on_isentrope(a, if b - lo.1 < hi.1 - b { lo.0 } else { hi.0 })?
    };
    let report = entropy_report(&map)?;
    if (report.h_top - a).abs() > SKEW_CERT_TOL || (report.h_mu - b).abs() > SKEW_CERT_TOL {
        return Err(Error::VerificationFailed(format!(
            "({}, {}) has h_top = {}, h_mu = {}; targets ({a}, {b})",
            map.s(),
            map.t(),
            report.h_top,
            report.h_mu
        )));
    }
    Ok(SolveResult {
        map: map.into(),
        report,
        targets: Targets { a, b },
        iterations,
        roots: 0,
    })
}

/// Largest admissible `eps` for [`rect_root`] applied to `g`.
pub fn rect_root_eps_max<M: PiecewiseLinear + ?Sized>(g: &M) -> f64 {
    let slope = g.min_abs_slope();
    if g.apply(0.0) > TARGET_SLACK {
        (slope - 1.0).min(1.0)
    } else {
        (slope - 1.0) / (slope + 1.0)
    }
}

/// Rectangular root: a piecewise linear unimodal map `G` on `[0, 1]` whose
/// second iterate restricted to an invariant interval is conjugate to `g`,
/// so that `h_top(G) = h_top(g) / 2`.
///
/// With `g(0) > 0` the left part of `G` is a reversed copy of `g` on
/// `[0, (1 + eps)/3]`, followed by a linear middle piece and a linear
/// piece on `[2/3, 1]`. With `g(0) = 0` the middle piece is dropped and the
/// copy occupies `[0, (1 + eps)/2]`. `eps` defaults to half its maximum.
pub fn rect_root<M: PiecewiseLinear + ?Sized>(g: &M, eps: Option<f64>) -> Result<PlUnimodalMap> {
    let pieces = g.pieces();
    let (last, top) = (pieces.last().unwrap(), g.critical_value());
    if (top - 1.0).abs() > TARGET_SLACK || last.y1.abs() > TARGET_SLACK {
        return Err(Error::InvalidMap(format!(
            "rectangular root needs g(c) = 1 and g(1) = 0, got {top} and {}",
            last.y1
        )));
    }
    let eps_max = rect_root_eps_max(g);
    let eps = eps.unwrap_or(0.5 * eps_max);
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::DomainError {
            what: "eps must lie in (0, 1)",
            value: eps,
        });
    }
    let mut graph: Vec<(f64, f64)> = pieces
        .iter()
        .map(|p| (p.x0, p.y0))
        .chain(std::iter::once((last.x1, last.y1)))
        .collect();
    graph.reverse();
    let g0 = pieces[0].y0;

    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    if g0 > TARGET_SLACK {
        for &(b, v) in &graph {
            xs.push((1.0 + eps) * (1.0 - b) / 3.0);
            ys.push((2.0 + v) / 3.0);
        }
        xs.push(2.0 / 3.0);
        ys.push((1.0 + eps) / 3.0);
    } else {
        for &(b, v) in &graph {
            xs.push((1.0 + eps) * (1.0 - b) / 2.0);
            ys.push((1.0 + eps) / 2.0 + (1.0 - eps) / 2.0 * v);
        }
    }
    xs.push(1.0);
    ys.push(0.0);
    // exact endpoints regardless of rounding in the affine images
    xs[0] = 0.0;

    let min_slope = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| ((y[1] - y[0]) / (x[1] - x[0])).abs())
        .fold(f64::INFINITY, f64::min);
    if !(min_slope > 1.0) {
        return Err(Error::NotExpanding(min_slope));
    }
    PlUnimodalMap::new(xs, ys)
}

/// Piecewise expanding unimodal map with `h_top = a` and `h_mu = b`, for
/// `0 < a <= log(2)` and `0 < b <= a`.
pub fn solve_unimodal(a: f64, b: f64) -> Result<SolveResult> {
    check_targets(a, b, 0.0)?;
    if a > 0.5 * LN2 {
        return solve_skew(a, b);
    }
    let mut n = 1;
    while (1u64 << n) as f64 * a <= 0.5 * LN2 {
        n += 1;
    }
    let scale = (1u64 << n) as f64;
    let inner = solve_skew(scale * a, scale * b)?;
    let mut map = inner.map.to_pl();
    for _ in 0..n {
        map = rect_root(&map, None)?;
    }
    let top = topological_entropy_certified(&map)?;
    let h_mu = metric_entropy_ulam(&map, ULAM_BINS)?;
    let (tol_top, tol_mu) = UNIMODAL_CERT_TOL;
    if (top.h - a).abs() > tol_top || (h_mu - b).abs() > tol_mu {
        return Err(Error::VerificationFailed(format!(
            "after {n} rectangular roots h_top = {}, h_mu = {h_mu}; targets ({a}, {b})",
            top.h
        )));
    }
    Ok(SolveResult {
        map: map.into(),
        report: EntropyReport::new(top, h_mu, MetricMethod::Ulam(ULAM_BINS)),
        targets: Targets { a, b },
        iterations: inner.iterations,
        roots: n,
    })
}

/// Data of the skew tent map that renormalizes twice onto the full family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoubleRenormalization {
    pub s: f64,
    pub t: f64,
    /// `s^2 t^3 - s - t`.
    pub residual: f64,
    /// Slopes `(s^2 t^2, s t^3)` after two renormalizations.
    pub renormalized: (f64, f64),
    pub h_top: f64,
    /// `h_mu` of the twice renormalized map divided by four.
    pub h_mu: f64,
    /// `h_mu` from the series density of the map itself.
    pub h_mu_direct: f64,
}

/// For `t` in `(1, 2)`, takes `s` with `s + t = s^2 t^3`, so that the map
/// renormalizes onto the mixing boundary and then onto the full family.
/// Checks `h_top = log(2)/4`, `max(s, t) < 2` and `h_mu > log(16/15)/4`.
pub fn double_renormalization_check(t: f64) -> Result<DoubleRenormalization> {
    if !(t > 1.0 && t < 2.0) {
        return Err(Error::DomainError {
            what: "t must lie in (1, 2)",
            value: t,
        });
    }
    let t3 = t * t * t;
    let s = (1.0 + (1.0 + 4.0 * t3 * t).sqrt()) / (2.0 * t3);
    if !(s > 1.0) {
        return Err(Error::NoRoot(format!("s = {s} <= 1 for t = {t}")));
    }
    let map = SkewTentMap::new(s, t)?;
    let residual = s * s * t3 - s - t;

    let (s2, t2) = (s * s * t * t, s * t3);
    let full = SkewTentMap::new(s2, t2)?;
    let h_full = skew_metric_entropy(&full)?;
    let h_mu = 0.25 * h_full;
    let h_mu_direct = skew_metric_entropy(&map)?;
    let h_top = topological_entropy(&map)?;

    let report = DoubleRenormalization {
        s,
        t,
        residual,
        renormalized: (s2, t2),
        h_top,
        h_mu,
        h_mu_direct,
    };
    if (h_top - 0.25 * LN2).abs() > 1e-4 {
        return Err(Error::VerificationFailed(format!(
            "h_top = {h_top} differs from log(2)/4"
        )));
    }
    if !(s.max(t) < 2.0) {
        return Err(Error::VerificationFailed(format!(
            "max slope {} >= 2",
            s.max(t)
        )));
    }
    if !(h_mu > double_renormalization_floor()) {
        return Err(Error::VerificationFailed(format!(
            "h_mu = {h_mu} not above log(16/15)/4"
        )));
    }
    Ok(report)
}
