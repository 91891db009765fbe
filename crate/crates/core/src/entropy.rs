//! Metric entropy of the absolutely continuous invariant measure, topological
//! entropy from the kneading determinant, lap counts, and the series
//! identities satisfied by `sum_k 1 / (f^k)'(x)`.

use serde::Serialize;

use crate::density::{geometric_tail, series_density, terms_for_tail, StepDensity, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::maps::{exact_kneading_signs, ExactForm, PiecewiseLinear, SkewTentMap, HIT_TOL};
use crate::roots;

/// Target size of the truncation tail of the kneading determinant.
pub const DETERMINANT_TOL: f64 = 1e-12;
/// Upper limit on the number of determinant terms.
pub const MAX_DETERMINANT_TERMS: usize = 10_000;
/// Lap counts above this abort with [`Error::Overflow`].
pub const LAP_CAP: usize = 2_000_000;

const SCAN_STEP: f64 = 1e-3;
const INITIAL_KNEADING_LEN: usize = 256;

/// `int log|f'| rho` over the pieces of `map`, for a normalized `rho`.
pub fn rohlin_entropy<M: PiecewiseLinear + ?Sized>(map: &M, rho: &StepDensity) -> Result<f64> {
    let mass = rho.integral();
    if (mass - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(mass));
    }
    let mut h = 0.0;
    for piece in map.pieces() {
        h += piece.slope().abs().ln() * rho.integrate(piece.x0, piece.x1)?;
    }
    Ok(h)
}

/// `log(s) mu[0, c] + log(t) mu[c, 1]` for the measure with density `rho`.
pub fn metric_entropy(map: &SkewTentMap, rho: &StepDensity) -> Result<f64> {
    rohlin_entropy(map, rho)
}

/// Truncated kneading determinant with the bound on the neglected terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Determinant {
    pub value: f64,
    /// `z^(N+1) / (1 - z)`.
    pub tail: f64,
    pub terms: usize,
}

/// Number of terms `N` with `z^(N+1) / (1 - z) <= tol`, at most
/// [`MAX_DETERMINANT_TERMS`].
pub fn determinant_terms(z: f64, tol: f64) -> usize {
    let n = (tol * (1.0 - z)).ln() / z.ln();
    if n.is_finite() && n > 0.0 {
        (n.ceil() as usize).min(MAX_DETERMINANT_TERMS)
    } else if n.is_finite() {
        0
    } else {
        MAX_DETERMINANT_TERMS
    }
}

fn check_z(z: f64) -> Result<()> {
    if z > 0.0 && z < 1.0 {
        Ok(())
    } else {
        Err(Error::DomainError {
            what: "z must lie in (0, 1)",
            value: z,
        })
    }
}

fn horner(signs: &[f64], z: f64, n: usize) -> f64 {
    signs[..=n].iter().rev().fold(0.0, |acc, &th| acc * z + th)
}

/// `D(z) = sum_{k=0}^{N} theta_k z^k` with `theta_k` the sign products of the
/// kneading sequence. `terms = None` picks `N` so the tail is at most
/// [`DETERMINANT_TOL`].
pub fn kneading_determinant<M: PiecewiseLinear + ?Sized>(
    map: &M,
    z: f64,
    terms: Option<usize>,
) -> Result<Determinant> {
    check_z(z)?;
    let n = terms.unwrap_or_else(|| determinant_terms(z, DETERMINANT_TOL));
    let signs = exact_kneading_signs(map, &map.exact_form(), n.max(1));
    Ok(Determinant {
        value: horner(&signs, z, n),
        tail: z.powf(n as f64 + 1.0) / (1.0 - z),
        terms: n,
    })
}

/// Kneading sign products, extended on demand.
struct SignTable<'a, M: ?Sized> {
    map: &'a M,
    form: ExactForm,
    signs: Vec<f64>,
}

impl<'a, M: PiecewiseLinear + ?Sized> SignTable<'a, M> {
    fn new(map: &'a M) -> Self {
        let form = map.exact_form();
        let signs = exact_kneading_signs(map, &form, INITIAL_KNEADING_LEN);
        SignTable { map, form, signs }
    }

    fn eval(&mut self, z: f64, n: usize) -> f64 {
        if n >= self.signs.len() {
            let mut len = self.signs.len() - 1;
            while len < n {
                len = (len * 4).min(MAX_DETERMINANT_TERMS);
            }
            self.signs = exact_kneading_signs(self.map, &self.form, len);
        }
        horner(&self.signs, z, n)
    }
}

/// Topological entropy with the data certifying it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TopologicalEntropy {
    pub h: f64,
    /// Smallest zero of the kneading determinant, `exp(-h)`.
    pub z: f64,
    /// Tail bound of the determinant at `z`.
    pub tail_bound: f64,
    /// Width of the final bisection bracket in `z`.
    pub bracket: f64,
}

/// `-log z*` for the smallest zero `z*` of the kneading determinant in (0, 1).
pub fn topological_entropy<M: PiecewiseLinear + ?Sized>(map: &M) -> Result<f64> {
    Ok(topological_entropy_certified(map)?.h)
}

/// Scans `(0, 1)` for the first sign change of the determinant at points
/// where it exceeds twice its tail bound, then bisects with the number of
/// terms fixed at the value required by the upper end of the bracket.
pub fn topological_entropy_certified<M: PiecewiseLinear + ?Sized>(
    map: &M,
) -> Result<TopologicalEntropy> {
    let mut table = SignTable::new(map);
    let steps = (1.0 / SCAN_STEP).round() as usize;
    let mut last: Option<(f64, f64)> = None;
    let mut bracket = None;
    for i in 1..steps {
        let z = i as f64 * SCAN_STEP;
        let n = determinant_terms(z, DETERMINANT_TOL);
        let tail = z.powf(n as f64 + 1.0) / (1.0 - z);
        let d = table.eval(z, n);
        if d.abs() <= 2.0 * tail {
            continue;
        }
        if let Some((z0, d0)) = last {
            if d0.signum() != d.signum() {
                bracket = Some((z0, z, n));
                break;
            }
        }
        last = Some((z, d));
    }
    let (lo, hi, n) = bracket.ok_or(Error::NoRootInUnitInterval)?;
    let signs = &table.signs;
    let root = roots::bisect(|z| horner(signs, z, n), lo, hi, 0.0)?;
    let z = root.root;
    Ok(TopologicalEntropy {
        h: -z.ln(),
        z,
        tail_bound: z.powf(n as f64 + 1.0) / (1.0 - z),
        bracket: root.width(),
    })
}

fn is_interior(x: f64) -> bool {
    x > HIT_TOL && x < 1.0 - HIT_TOL
}

/// Number of maximal monotone laps of `f^n`, counted as one plus the number
/// of interior points of `f^-k(c)` for `k < n`.
///
/// Preimages are taken branch by branch on half-open pieces, so a point on a
/// breakpoint is found once. A preimage landing back on `c` is not pulled
/// back further, since its preimages were already counted one level up.
pub fn lap_count<M: PiecewiseLinear + ?Sized>(map: &M, n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::DomainError {
            what: "lap count needs n >= 1",
            value: 0.0,
        });
    }
    let c = map.turning_point();
    let pieces = map.pieces();
    let last = pieces.len() - 1;
    let mut laps = 2;
    let mut level = vec![c];
    for _ in 1..n {
        let mut next = Vec::with_capacity(level.len() * 2);
        for &y in &level {
            for (i, piece) in pieces.iter().enumerate() {
                let Some(x) = piece.preimage(y) else { continue };
                if x >= piece.x1 && i != last {
                    continue;
                }
                if (x - c).abs() <= HIT_TOL {
                    continue;
                }
                if is_interior(x) {
                    laps += 1;
                    if laps > LAP_CAP {
                        return Err(Error::Overflow { cap: LAP_CAP });
                    }
                }
                next.push(x);
            }
        }
        level = next;
    }
    Ok(laps)
}

/// Partial sums `S_k = sum_{j<=k} 1 / (f^j)'(1)`, `k = 0..=n`. They tend to
/// `0` with `|S_k| <= 1 / (T^k (T - 1))`.
pub fn identity_partial_sums(map: &SkewTentMap, n: usize) -> Vec<f64> {
    series_partial_sums(map, 1.0, n).expect("1 lies in the domain")
}

fn series_partial_sums(map: &SkewTentMap, x: f64, n: usize) -> Result<Vec<f64>> {
    let orbit = map.orbit_with_derivatives(x, n)?;
    let mut acc = 0.0;
    Ok(orbit
        .derivs
        .iter()
        .map(|d| {
            acc += 1.0 / d;
            acc
        })
        .collect())
}

/// Residual of `x = 1 - (1/t) sum_{k<=n} 1 / (f^k)'(x)`; for `x > c` also of
/// `f(x) = sum_{k<=n} 1 / (f^k)'(x)`, returning the larger of the two.
pub fn f_expansion_residual(map: &SkewTentMap, x: f64, n: usize) -> Result<f64> {
    let sum = *series_partial_sums(map, x, n)?.last().unwrap();
    let mut r = (x - (1.0 - sum / map.t())).abs();
    if x > map.c() {
        r = r.max((map.evaluate(x)? - sum).abs());
    }
    Ok(r)
}

/// Number of terms for which the identity series tail is below `tol`.
pub fn identity_terms(map: &SkewTentMap, tol: f64) -> usize {
    terms_for_tail(map.min_slope(), tol)
}

/// Bound on the terms of the identity series beyond `n`.
pub fn identity_tail(map: &SkewTentMap, n: usize) -> f64 {
    geometric_tail(map.min_slope(), n)
}

/// How the metric entropy in a report was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MetricMethod {
    /// Rohlin integral against the explicit series density.
    Series,
    /// Rohlin integral against the Ulam stationary density with this many bins.
    Ulam(usize),
}

/// Topological and metric entropy of one map, with the certificate data of
/// the topological entropy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyReport {
    pub h_top: f64,
    pub h_mu: f64,
    /// Tail bound of the kneading determinant at `exp(-h_top)`.
    pub tail_bound: f64,
    /// Width of the root bracket in `z`.
    pub bracket: f64,
    #[serde(skip)]
    pub method: MetricMethod,
}

impl EntropyReport {
    pub fn new(top: TopologicalEntropy, h_mu: f64, method: MetricMethod) -> Self {
        EntropyReport {
            h_top: top.h,
            h_mu,
            tail_bound: top.tail_bound,
            bracket: top.bracket,
            method,
        }
    }
}

/// Both entropies of a skew tent map, the metric one from the series density.
pub fn entropy_report(map: &SkewTentMap) -> Result<EntropyReport> {
    let top = topological_entropy_certified(map)?;
    let rho = series_density(map, DEFAULT_TOL)?;
    let h_mu = metric_entropy(map, &rho)?;
    Ok(EntropyReport::new(top, h_mu, MetricMethod::Series))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::PlUnimodalMap;

    const PHI: f64 = 1.618_033_988_749_895;
    const LN2: f64 = std::f64::consts::LN_2;

    fn map(s: f64, t: f64) -> SkewTentMap {
        SkewTentMap::new(s, t).unwrap()
    }

    #[test]
    fn rohlin_examples() {
        let one = StepDensity::constant(1.0).unwrap();
        assert!((metric_entropy(&map(2.0, 2.0), &one).unwrap() - LN2).abs() < 1e-15);
        let h = metric_entropy(&map(3.0, 1.5), &one).unwrap();
        let exact = 3f64.ln() / 3.0 + 2.0 / 3.0 * 1.5f64.ln();
        assert!((h - exact).abs() < 1e-15);
        assert!((h - 0.63651).abs() < 1e-5);

        let golden = SkewTentMap::tent(PHI).unwrap();
        let rho = series_density(&golden, DEFAULT_TOL).unwrap();
        assert!((metric_entropy(&golden, &rho).unwrap() - PHI.ln()).abs() < 1e-14);

        let two = StepDensity::constant(2.0).unwrap();
        assert!(matches!(
            metric_entropy(&golden, &two),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn determinant_of_full_tent() {
        let f = map(2.0, 2.0);
        for z in [0.1, 0.3, 0.5, 0.7] {
            let d = kneading_determinant(&f, z, None).unwrap();
            assert!(d.tail <= DETERMINANT_TOL);
            assert!((d.value - (1.0 - 2.0 * z) / (1.0 - z)).abs() <= d.tail + 1e-15);
        }
        assert!(kneading_determinant(&f, 0.5, None).unwrap().value.abs() < 1e-12);
        assert!(kneading_determinant(&f, 1.0, None).is_err());
        assert!(kneading_determinant(&f, 0.0, None).is_err());
    }

    #[test]
    fn determinant_of_golden_tent() {
        let f = SkewTentMap::tent(PHI).unwrap();
        let z = 0.4;
        let d = kneading_determinant(&f, z, None).unwrap();
        assert!((d.value - (1.0 - z - z * z) / (1.0 - z.powi(3))).abs() < 1e-12);
        let at_root = kneading_determinant(&f, 1.0 / PHI, None).unwrap();
        assert!(at_root.value.abs() <= at_root.tail + 1e-14);
    }

    #[test]
    fn topological_entropy_examples() {
        let full = topological_entropy_certified(&map(2.0, 2.0)).unwrap();
        assert!((full.h - LN2).abs() < 1e-12);
        assert!(full.bracket <= 1e-12);
        let r2 = 2f64.sqrt();
        assert!((topological_entropy(&map(r2, r2)).unwrap() - 0.5 * LN2).abs() < 1e-9);
        assert!((topological_entropy(&map(3.0, 1.5)).unwrap() - LN2).abs() < 1e-9);
        for s in [1.2, 1.5, PHI, 1.9, 1.01 * r2] {
            let h = topological_entropy(&map(s, s)).unwrap();
            assert!((h - s.ln()).abs() < 1e-9, "s = {s}");
        }
    }

    #[test]
    fn topological_entropy_of_pl_map() {
        let g = PlUnimodalMap::new(vec![0.0, 0.3, 0.6, 1.0], vec![0.6, 1.0, 0.6, 0.0]).unwrap();
        assert!((topological_entropy(&g).unwrap() - 0.5 * LN2).abs() < 1e-9);
    }

    #[test]
    fn lap_counts() {
        assert_eq!(lap_count(&map(2.0, 2.0), 10).unwrap(), 1024);
        assert_eq!(lap_count(&map(3.0, 1.5), 8).unwrap(), 256);
        assert_eq!(lap_count(&map(2.3, 1.7), 1).unwrap(), 2);
        let r2 = 2f64.sqrt();
        let laps = lap_count(&map(r2, r2), 10).unwrap();
        let est = (laps as f64).ln() / 10.0;
        assert!((0.5 * LN2..=0.5 * LN2 + 0.12).contains(&est), "{laps}");
        assert!(matches!(
            lap_count(&map(2.0, 2.0), 30),
            Err(Error::Overflow { .. })
        ));
        assert!(lap_count(&map(2.0, 2.0), 0).is_err());
    }

    #[test]
    fn lap_growth_tracks_entropy() {
        for (s, t) in [(1.8, 1.6), (PHI, PHI), (2.5, 1.5)] {
            let f = map(s, t);
            let h = topological_entropy(&f).unwrap();
            let laps = lap_count(&f, 18).unwrap();
            assert!(((laps as f64).ln() / 18.0 - h).abs() <= 0.12, "({s}, {t})");
        }
    }

    #[test]
    fn partial_sums_vanish() {
        let s = identity_partial_sums(&map(2.0, 2.0), 20);
        assert_eq!(s.len(), 21);
        for (k, v) in s.iter().enumerate() {
            assert!((v - 0.5f64.powi(k as i32)).abs() < 1e-15, "k = {k}");
        }
        let f = map(3.0, 1.5);
        let n = identity_terms(&f, 1e-10);
        assert!(identity_tail(&f, n) <= 1e-10);
        assert!(identity_partial_sums(&f, n).last().unwrap().abs() <= 2e-10);
    }

    #[test]
    fn expansion_residuals() {
        let f = map(2.0, 2.0);
        let n = identity_terms(&f, 1e-10);
        assert!(f_expansion_residual(&f, 0.3, n).unwrap() <= 1e-9);
        assert!(f_expansion_residual(&f, 1.0, n).unwrap() <= 1e-9);
        let g = map(3.0, 1.5);
        let n = identity_terms(&g, 1e-10);
        assert!(f_expansion_residual(&g, 0.9, n).unwrap() <= 1e-9);
        assert!(f_expansion_residual(&g, 1.5, n).is_err());
    }

    #[test]
    fn report_json_shape() {
        let r = entropy_report(&map(2.0, 2.0)).unwrap();
        assert!((r.h_top - LN2).abs() < 1e-9 && (r.h_mu - LN2).abs() < 1e-9);
        let v: serde_json::Value = serde_json::to_value(r).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["bracket", "h_mu", "h_top", "tail_bound"]);
    }
}
