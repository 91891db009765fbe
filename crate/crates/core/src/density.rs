//! Piecewise constant densities on `[0, 1]` and the explicit invariant
//! density of a skew tent map.
//!
//! For a skew tent map `f` the series
//!
//! ```text
//! rho_hat = sum_k 1 / (f^k)'(0) * 1_[f^k(0), 1]
//! ```
//!
//! is the density of an absolutely continuous invariant measure. Each term is
//! a step, so truncations are exact step functions; when the orbit of `0` is
//! periodic the tail is a geometric series and is summed in closed form.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::{one_sided_orbit, SkewTentMap};

/// Cuts closer than this are merged.
pub const CUT_DEDUP: f64 = 1e-14;

/// Default truncation tolerance for [`series_density_raw`].
pub const DEFAULT_TOL: f64 = 1e-10;

/// Right-continuous step function on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepDensity {
    cuts: Vec<f64>,
    heights: Vec<f64>,
}

impl StepDensity {
    /// `cuts` must run from `0` to `1`, increasing; one height per piece.
    /// Pieces shorter than [`CUT_DEDUP`] are dropped.
    pub fn new(cuts: Vec<f64>, heights: Vec<f64>) -> Result<Self> {
        if cuts.len() < 2 || heights.len() + 1 != cuts.len() {
            return Err(Error::InvalidDensity(format!(
                "{} cuts for {} heights",
                cuts.len(),
                heights.len()
            )));
        }
        if cuts[0] != 0.0 || cuts[cuts.len() - 1] != 1.0 {
            return Err(Error::InvalidDensity(
                "cuts must start at 0 and end at 1".into(),
            ));
        }
        if cuts.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidDensity("cuts must be increasing".into()));
        }
        if let Some(h) = heights.iter().find(|h| !(h.is_finite() && **h >= 0.0)) {
            return Err(Error::InvalidDensity(format!(
                "height {h} is not a finite non-negative value"
            )));
        }
        let mut out_cuts = Vec::with_capacity(cuts.len());
        let mut out_heights = Vec::with_capacity(heights.len());
        out_cuts.push(0.0);
        for (i, &h) in heights.iter().enumerate() {
            let right = cuts[i + 1];
            if right - out_cuts[out_cuts.len() - 1] <= CUT_DEDUP && i + 1 < heights.len() {
                // zero-width piece: the next height takes over from this cut
                continue;
            }
            if right - out_cuts[out_cuts.len() - 1] <= CUT_DEDUP && !out_heights.is_empty() {
                // trailing sliver at 1
                *out_cuts.last_mut().unwrap() = 1.0;
                continue;
            }
            out_heights.push(h);
            out_cuts.push(right);
        }
        Ok(StepDensity {
            cuts: out_cuts,
            heights: out_heights,
        })
    }

    /// Constant function on `[0, 1]`.
    pub fn constant(value: f64) -> Result<Self> {
        Self::new(vec![0.0, 1.0], vec![value])
    }

    /// Heights on `m` uniform bins.
    pub fn uniform_bins(heights: Vec<f64>) -> Result<Self> {
        let m = heights.len();
        let cuts = (0..=m).map(|i| i as f64 / m as f64).collect();
        Self::new(cuts, heights)
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.cuts
            .windows(2)
            .zip(&self.heights)
            .map(|(w, &h)| (w[0], w[1], h))
    }

    /// Value at `x`, taking the right limit at cuts and the last height at `1`.
    pub fn at(&self, x: f64) -> f64 {
        let i = self.cuts.partition_point(|&c| c <= x);
        self.heights[i.saturating_sub(1).min(self.heights.len() - 1)]
    }

    pub fn integral(&self) -> f64 {
        self.pieces().map(|(a, b, h)| (b - a) * h).sum()
    }

    /// Exact integral over `[lo, hi]`.
    pub fn integrate(&self, lo: f64, hi: f64) -> Result<f64> {
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(Error::DomainError {
                what: "integration bounds must satisfy 0 <= lo <= hi <= 1",
                value: if lo < 0.0 || lo > hi { lo } else { hi },
            });
        }
        Ok(self
            .pieces()
            .map(|(a, b, h)| (b.min(hi) - a.max(lo)).max(0.0) * h)
            .sum())
    }

    pub fn normalize(&self) -> Result<StepDensity> {
        let mass = self.integral();
        if !(mass > 0.0) {
            return Err(Error::ZeroMass(mass));
        }
        Ok(StepDensity {
            cuts: self.cuts.clone(),
            heights: self.heights.iter().map(|h| h / mass).collect(),
        })
    }

    /// Sum of the absolute jumps at interior cuts.
    pub fn variation(&self) -> f64 {
        self.heights.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }

    pub fn max(&self) -> f64 {
        self.heights
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.heights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `sup |rho - value|`.
    pub fn sup_distance_to(&self, value: f64) -> f64 {
        self.heights
            .iter()
            .map(|h| (h - value).abs())
            .fold(0.0, f64::max)
    }

    /// Exact L1 distance, computed on the merged cut list.
    pub fn l1_distance(&self, other: &StepDensity) -> f64 {
        let (mut i, mut j) = (0, 0);
        let mut left = 0.0;
        let mut total = 0.0;
        while i < self.heights.len() && j < other.heights.len() {
            let right = self.cuts[i + 1].min(other.cuts[j + 1]);
            total += (right - left) * (self.heights[i] - other.heights[j]).abs();
            left = right;
            if self.cuts[i + 1] - right <= CUT_DEDUP {
                i += 1;
            }
            if other.cuts[j + 1] - right <= CUT_DEDUP {
                j += 1;
            }
        }
        total
    }

    /// CSV with header `x_left,x_right,rho`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x_left,x_right,rho\n");
        for (a, b, h) in self.pieces() {
            let _ = writeln!(out, "{},{},{}", fmt17(a), fmt17(b), fmt17(h));
        }
        out
    }
}

/// Round-trip formatting with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Number of series terms `l` with `1 / (T^l (T - 1)) <= tol`.
pub fn terms_for_tail(min_slope: f64, tol: f64) -> usize {
    let l = (1.0 / (tol * (min_slope - 1.0))).ln() / min_slope.ln();
    if l.is_finite() {
        l.ceil().max(0.0) as usize
    } else {
        0
    }
}

/// `sum_{k > l} T^-k = 1 / (T^l (T - 1))`.
pub fn geometric_tail(min_slope: f64, l: usize) -> f64 {
    1.0 / (min_slope.powf(l as f64) * (min_slope - 1.0))
}

/// Jumps `(f^k(0), 1 / (f^k)'(0))` of the invariant density series, with a
/// periodic orbit of `0` resummed exactly.
fn series_jumps(map: &SkewTentMap, tol: f64) -> Vec<(f64, f64)> {
    let l = terms_for_tail(map.min_slope(), tol);
    let orbit = one_sided_orbit(map, 0.0, 1.0, l, true);
    let mut jumps = Vec::with_capacity(orbit.points.len());
    let mut d = 1.0;
    for (k, &x) in orbit.points.iter().enumerate() {
        jumps.push((x, 1.0 / d));
        if let Some(&sl) = orbit.slopes.get(k) {
            d *= sl;
        }
    }
    if let Some(p) = orbit.cycle {
        // d is now (f^{j+p})'(0); the cycle multiplies the tail by 1/(f^p)'
        let cycle_deriv: f64 = orbit.slopes[p.preperiod..p.preperiod + p.period]
            .iter()
            .product();
        let factor = 1.0 / (1.0 - 1.0 / cycle_deriv);
        for jump in &mut jumps[p.preperiod..] {
            jump.1 *= factor;
        }
    }
    jumps
}

/// Unnormalized invariant density `rho_hat` of a skew tent map, truncated so
/// that the neglected tail is at most `tol` in sup norm.
pub fn series_density_raw(map: &SkewTentMap, tol: f64) -> Result<StepDensity> {
    let slope = map.min_slope();
    if !(slope > 1.0) {
        return Err(Error::SlopeTooSmall(slope));
    }
    if !(tol > 0.0) {
        return Err(Error::DomainError {
            what: "tolerance must be positive",
            value: tol,
        });
    }
    let mut jumps = series_jumps(map, tol);
    jumps.retain(|&(x, _)| x < 1.0);
    jumps.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut cuts = vec![0.0];
    let mut heights = Vec::new();
    let mut level = 0.0;
    let mut i = 0;
    while i < jumps.len() {
        let x = jumps[i].0;
        let mut w = 0.0;
        while i < jumps.len() && jumps[i].0 - x <= CUT_DEDUP {
            w += jumps[i].1;
            i += 1;
        }
        if x > CUT_DEDUP {
            heights.push(level);
            cuts.push(x);
        }
        level += w;
    }
    heights.push(level);
    cuts.push(1.0);

    // truncation may leave rounding-level negatives where the density vanishes
    let floor = 10.0 * tol + 1e-12;
    for h in &mut heights {
        if *h < 0.0 && *h >= -floor {
            *h = 0.0;
        }
    }
    StepDensity::new(cuts, heights)
}

/// Normalized invariant density of the absolutely continuous invariant
/// probability measure.
pub fn series_density(map: &SkewTentMap, tol: f64) -> Result<StepDensity> {
    series_density_raw(map, tol)?.normalize()
}

/// Frobenius-Perron operator of `map` applied to `rho`, evaluated at `y`:
/// the sum of `rho(x) / |f'(x)|` over the preimages `x` of `y`.
pub fn transfer_operator(map: &SkewTentMap, rho: &StepDensity, y: f64) -> f64 {
    let right = 1.0 - y / map.t();
    let mut total = rho.at(right) / map.t();
    let left = map.c() - (1.0 - y) / map.s();
    if left >= 0.0 {
        total += rho.at(left) / map.s();
    }
    total
}

/// Limit of the normalized invariant densities of the Štefan family with
/// `f(0) = a` as the period grows.
///
/// The unnormalized limit is `1/(1-a)` on `[a, 1-a]` and
/// `1/(2(1-a)) + (1-2a)/(4(1-a)) / |x - 1/2|` outside, symmetric about `1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitDensity {
    a: f64,
    z: f64,
}

impl LimitDensity {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a < 0.5) {
            return Err(Error::DomainError {
                what: "a must lie in (0, 1/2)",
                value: a,
            });
        }
        let z = 1.0 - (1.0 - 2.0 * a) * (1.0 - 2.0 * a).ln() / (2.0 - 2.0 * a);
        Ok(LimitDensity { a, z })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Integral of the unnormalized limit density.
    pub fn normalization(&self) -> f64 {
        self.z
    }

    /// Constant `A` of the outer branches `A + B / |x - 1/2|`, normalized.
    fn outer_constant(&self) -> f64 {
        1.0 / (2.0 * (1.0 - self.a) * self.z)
    }

    /// Coefficient `B` of the outer branches, normalized.
    fn outer_coefficient(&self) -> f64 {
        (1.0 - 2.0 * self.a) / (4.0 * (1.0 - self.a) * self.z)
    }

    /// Value on `[a, 1 - a]`.
    pub fn plateau(&self) -> f64 {
        1.0 / ((1.0 - self.a) * self.z)
    }

    fn value(&self, x: f64) -> f64 {
        if x < self.a || x > 1.0 - self.a {
            self.outer_constant() + self.outer_coefficient() / (x - 0.5).abs()
        } else {
            self.plateau()
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::DomainError {
                what: "x must lie in [0, 1]",
                value: x,
            });
        }
        Ok(self.value(x))
    }

    /// Exact integral of the normalized limit density over `[p, q]`, where
    /// `[p, q]` lies inside one of the three branches.
    fn branch_integral(&self, p: f64, q: f64) -> f64 {
        let mid = 0.5 * (p + q);
        let (aa, bb) = (self.outer_constant(), self.outer_coefficient());
        if mid < self.a {
            aa * (q - p) + bb * ((0.5 - p) / (0.5 - q)).ln()
        } else if mid > 1.0 - self.a {
            aa * (q - p) + bb * ((q - 0.5) / (p - 0.5)).ln()
        } else {
            self.plateau() * (q - p)
        }
    }

    /// Exact L1 distance to a step density. On each piece the outer branches
    /// are monotone, so `|h - rho|` changes sign at most once and is
    /// integrated in closed form on either side of the crossing.
    pub fn l1_distance(&self, d: &StepDensity) -> f64 {
        let (aa, bb) = (self.outer_constant(), self.outer_coefficient());
        let splits = [self.a, 1.0 - self.a];
        let mut total = 0.0;
        for (u, v, h) in d.pieces() {
            let mut edges = vec![u];
            edges.extend(splits.iter().copied().filter(|&x| x > u && x < v));
            edges.push(v);
            for w in edges.windows(2) {
                let (p, q) = (w[0], w[1]);
                if q <= p {
                    continue;
                }
                let mid = 0.5 * (p + q);
                let crossing = if h > aa && (mid < self.a || mid > 1.0 - self.a) {
                    let off = bb / (h - aa);
                    let x = if mid < self.a { 0.5 - off } else { 0.5 + off };
                    (x > p && x < q).then_some(x)
                } else {
                    None
                };
                let parts: &[(f64, f64)] = match crossing {
                    Some(x) => &[(p, x), (x, q)],
                    None => &[(p, q)],
                };
                for &(lo, hi) in parts {
                    total += (h * (hi - lo) - self.branch_integral(lo, hi)).abs();
                }
            }
        }
        total
    }
}

/// Builds the Štefan map with `f(0) = a` and period `2n + 3`, and returns the
/// L1 distance between its normalized invariant density and the limit density
/// for the same `a`.
pub fn stefan_limit_check(a: f64, n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::DomainError {
            what: "n must be at least 1",
            value: n as f64,
        });
    }
    let limit = LimitDensity::new(a)?;
    let map = SkewTentMap::stefan(a, n)?;
    let rho = series_density(&map, DEFAULT_TOL)?;
    Ok(limit.l1_distance(&rho))
}

/// Value of the density at one grid point of the density sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepEntry {
    pub s: f64,
    pub t: f64,
    pub max_density: f64,
}

/// Maximum of the normalized invariant density over a grid of mixing maps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub grid: usize,
    pub bound: f64,
    pub global_max: f64,
    pub argmax: SweepEntry,
    /// Grid points whose density exceeds `bound`.
    pub flagged: Vec<SweepEntry>,
    pub entries: Vec<SweepEntry>,
}

/// Range of `t` covered by the sweep grid.
pub const SWEEP_T_RANGE: (f64, f64) = (1.01, 4.0);
/// Smallest left slope on the sweep grid.
pub const SWEEP_S_FLOOR: f64 = 1.001;

/// `k x k` grid of mixing maps, log-uniform in `t` over [`SWEEP_T_RANGE`] and,
/// for each `t`, log-uniform in `s` between the mixing boundary
/// `t / (t^2 - 1)` (or [`SWEEP_S_FLOOR`]) and the full-family boundary
/// `t / (t - 1)`. Cell centers keep every point off both boundaries.
pub fn sweep_grid(k: usize) -> Vec<(f64, f64)> {
    let (t_lo, t_hi) = (SWEEP_T_RANGE.0.ln(), SWEEP_T_RANGE.1.ln());
    let mut out = Vec::with_capacity(k * k);
    for i in 0..k {
        let t = (t_lo + (i as f64 + 0.5) / k as f64 * (t_hi - t_lo)).exp();
        let s_lo = (t / (t * t - 1.0)).max(SWEEP_S_FLOOR).ln();
        let s_hi = (t / (t - 1.0)).ln();
        for j in 0..k {
            let s = (s_lo + (j as f64 + 0.5) / k as f64 * (s_hi - s_lo)).exp();
            out.push((s, t));
        }
    }
    out
}

/// Records the maximum of the normalized density on every grid point and
/// flags values above 2. Flags are findings, not failures.
pub fn density_sweep(k: usize) -> Result<SweepReport> {
    if k == 0 {
        return Err(Error::DomainError {
            what: "grid size must be positive",
            value: 0.0,
        });
    }
    let entries = sweep_grid(k)
        .into_par_iter()
        .map(|(s, t)| {
            let map = SkewTentMap::new(s, t)?;
            let rho = series_density(&map, DEFAULT_TOL)?;
            Ok(SweepEntry {
                s,
                t,
                max_density: rho.max(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let bound = 2.0;
    let argmax = *entries
        .iter()
        .max_by(|a, b| a.max_density.total_cmp(&b.max_density))
        .unwrap();
    let flagged = entries
        .iter()
        .filter(|e| e.max_density > bound)
        .copied()
        .collect();
    Ok(SweepReport {
        grid: k,
        bound,
        global_max: argmax.max_density,
        argmax,
        flagged,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const PHI: f64 = 1.618_033_988_749_895;

    fn golden() -> SkewTentMap {
        SkewTentMap::tent(PHI).unwrap()
    }

    #[test]
    fn full_tent_density_is_two() {
        let d = series_density_raw(&SkewTentMap::tent(2.0).unwrap(), 1e-6).unwrap();
        assert_eq!(d.heights().len(), 1);
        assert!((d.heights()[0] - 2.0).abs() < 1e-15);
        assert!((d.normalize().unwrap().heights()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn full_family_density_is_constant() {
        let d = series_density_raw(&SkewTentMap::new(3.0, 1.5).unwrap(), DEFAULT_TOL).unwrap();
        assert!(d.sup_distance_to(1.5) < 1e-12, "{d:?}");
    }

    #[test]
    fn golden_density_has_two_pieces() {
        let f = golden();
        let d = series_density_raw(&f, DEFAULT_TOL).unwrap();
        assert_eq!(d.cuts().len(), 3);
        assert!((d.cuts()[1] - f.c()).abs() < 1e-15);
        let ratio = d.heights()[1] / d.heights()[0];
        assert!((ratio - PHI).abs() < 1e-13);

        let rho = d.normalize().unwrap();
        assert!((rho.heights()[0] - 1.0 / (3.0 - PHI)).abs() < 1e-13);
        assert!((rho.heights()[1] - PHI / (3.0 - PHI)).abs() < 1e-13);
        assert!((rho.heights()[0] - 0.72361).abs() < 1e-5);
        assert!((rho.heights()[1] - 1.17082).abs() < 1e-5);
        assert!((rho.variation() - (PHI - 1.0) / (3.0 - PHI)).abs() < 1e-13);
        assert!((rho.variation() - 0.44721).abs() < 1e-5);
        let head = rho.integrate(0.0, f.c()).unwrap();
        assert!((head - (2.0 - PHI) / (3.0 - PHI)).abs() < 1e-13);
        assert!((head - 0.27639).abs() < 1e-5);
    }

    #[test]
    fn golden_density_is_transfer_fixed_point() {
        let f = golden();
        let rho = series_density(&f, DEFAULT_TOL).unwrap();
        for i in 0..200 {
            let y = (i as f64 + 0.37) / 200.0;
            assert!((transfer_operator(&f, &rho, y) - rho.at(y)).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_and_integrate() {
        let d = StepDensity::new(vec![0.0, 0.2, 0.7, 1.0], vec![1.0, 3.0, 0.5]).unwrap();
        let rho = d.normalize().unwrap();
        assert!((rho.integral() - 1.0).abs() < 1e-12);
        assert!((d.integrate(0.0, 1.0).unwrap() - d.integral()).abs() < 1e-15);
        assert!((d.integrate(0.1, 0.3).unwrap() - 0.4).abs() < 1e-15);
        let one = StepDensity::constant(1.0).unwrap();
        assert!((one.integrate(0.0, 0.3).unwrap() - 0.3).abs() < 1e-15);
        assert!(one.integrate(0.5, 0.2).is_err());
        assert!(one.integrate(0.0, 1.2).is_err());
        assert!(matches!(
            StepDensity::constant(0.0).unwrap().normalize(),
            Err(Error::ZeroMass(_))
        ));
    }

    #[test]
    fn l1_distance_examples() {
        let one = StepDensity::constant(1.0).unwrap();
        let two = StepDensity::constant(2.0).unwrap();
        assert_eq!(one.l1_distance(&one), 0.0);
        assert!((one.l1_distance(&two) - 1.0).abs() < 1e-15);
        let a = StepDensity::new(vec![0.0, 0.25, 1.0], vec![2.0, 0.0]).unwrap();
        let b = StepDensity::new(vec![0.0, 0.5, 1.0], vec![0.0, 1.0]).unwrap();
        // |2-0|*0.25 + |0-0|*0.25 + |0-1|*0.5
        assert!((a.l1_distance(&b) - 1.0).abs() < 1e-15);
        assert!((b.l1_distance(&a) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn point_evaluation_is_right_continuous() {
        let d = StepDensity::new(vec![0.0, 0.5, 1.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(d.at(0.0), 1.0);
        assert_eq!(d.at(0.5), 2.0);
        assert_eq!(d.at(1.0), 2.0);
    }

    #[test]
    fn rejects_bad_step_data() {
        assert!(StepDensity::new(vec![0.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(StepDensity::new(vec![0.0, 0.6, 0.5, 1.0], vec![1.0; 3]).is_err());
        assert!(StepDensity::new(vec![0.0, 0.5, 1.0], vec![1.0, -0.1]).is_err());
        assert!(StepDensity::new(vec![0.1, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn slivers_are_merged() {
        let d = StepDensity::new(vec![0.0, 0.5, 0.5 + 1e-16, 1.0], vec![1.0, 7.0, 2.0]).unwrap();
        assert_eq!(d.cuts().len(), 3);
        assert_eq!(d.heights(), &[1.0, 2.0]);
    }

    #[test]
    fn csv_export() {
        let d = StepDensity::new(vec![0.0, 0.5, 1.0], vec![1.0, 2.0]).unwrap();
        let csv = d.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x_left,x_right,rho"));
        let row: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        assert_eq!(row, vec![0.0, 0.5, 1.0]);
        assert_eq!(fmt17(0.1).parse::<f64>().unwrap(), 0.1);
    }

    /// Direct substitution into the three-branch formula.
    fn limit_oracle(a: f64, x: f64) -> f64 {
        let z = 1.0 - (1.0 - 2.0 * a) * (1.0 - 2.0 * a).ln() / (2.0 - 2.0 * a);
        let raw = if x < a {
            1.0 / (2.0 * (1.0 - a)) + (1.0 - 2.0 * a) / (4.0 * (1.0 - a)) / (0.5 - x)
        } else if x <= 1.0 - a {
            1.0 / (1.0 - a)
        } else {
            1.0 / (2.0 * (1.0 - a)) + (1.0 - 2.0 * a) / (4.0 * (1.0 - a)) / (x - 0.5)
        };
        raw / z
    }

    #[test]
    fn limit_density_values() {
        let ld = LimitDensity::new(0.4).unwrap();
        assert!((ld.normalization() - 1.268_24).abs() < 1e-5);
        assert!((ld.eval(0.5).unwrap() - 1.314_157_5).abs() < 1e-6);
        let v = ld.eval(0.2).unwrap();
        assert!((v - limit_oracle(0.4, 0.2)).abs() < 1e-15);
        assert!((v - 0.876_105).abs() < 1e-6);
        assert!((ld.eval(0.8).unwrap() - v).abs() < 1e-14);
        assert!(ld.eval(1.1).is_err());

        let ld = LimitDensity::new(0.49).unwrap();
        assert!((ld.eval(0.5).unwrap() - 1.821_094_8).abs() < 1e-6);
        assert!(LimitDensity::new(0.5).is_err());
    }

    #[test]
    fn limit_density_integrates_to_one() {
        for a in [0.1, 0.25, 0.4, 0.49] {
            let ld = LimitDensity::new(a).unwrap();
            let zero = StepDensity::constant(0.0).unwrap();
            assert!((ld.l1_distance(&zero) - 1.0).abs() < 1e-13, "a = {a}");
        }
    }

    #[test]
    fn limit_l1_matches_fine_quadrature() {
        let ld = LimitDensity::new(0.4).unwrap();
        let d =
            StepDensity::new(vec![0.0, 0.3, 0.45, 0.9, 1.0], vec![0.7, 1.1, 1.4, 0.95]).unwrap();
        let n = 400_000;
        let quad: f64 = (0..n)
            .map(|i| {
                let x = (i as f64 + 0.5) / n as f64;
                (d.at(x) - limit_oracle(0.4, x)).abs() / n as f64
            })
            .sum();
        assert!((ld.l1_distance(&d) - quad).abs() < 1e-8);
    }

    #[test]
    fn sweep_grid_is_mixing_and_deterministic() {
        let g = sweep_grid(7);
        assert_eq!(g.len(), 49);
        for &(s, t) in &g {
            let f = SkewTentMap::new(s, t).unwrap();
            assert!(f.is_mixing(), "({s}, {t})");
        }
        assert_eq!(g, sweep_grid(7));
    }

    #[test]
    fn small_sweep_reports_max() {
        let r = density_sweep(4).unwrap();
        assert_eq!(r.entries.len(), 16);
        assert!(r.global_max >= 1.0);
        assert!(r.entries.iter().all(|e| e.max_density <= r.global_max));
    }
}
