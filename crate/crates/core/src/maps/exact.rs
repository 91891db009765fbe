//! Critical orbits in exact rational arithmetic.
//!
//! A map with floating point parameters is a map with dyadic rational
//! parameters, so its critical orbit can be followed without rounding. For
//! strongly skewed maps the double precision orbit loses all accuracy after a
//! few dozen steps, while the kneading determinant needs more symbols than
//! that; entropy computations use the exact sequence.
//!
//! Points within [`HIT_TOL`] of the turning point are snapped onto it, as in
//! the rounded orbit. Such a point differs from a true hit by far less than
//! one unit of the parameters, so the result is the one-sided kneading of a
//! map indistinguishable from the given one.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{kneading_of, PiecewiseLinear, HIT_TOL};

/// `num / den` with `den > 0`, not reduced beyond common powers of two.
#[derive(Debug, Clone)]
struct Frac {
    num: BigInt,
    den: BigInt,
}

impl Frac {
    fn from_f64(x: f64) -> Frac {
        assert!(x.is_finite(), "exact form of a non-finite value");
        if x == 0.0 {
            return Frac::int(0);
        }
        let bits = x.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        let mut num = BigInt::from(mant);
        if x < 0.0 {
            num = -num;
        }
        let mut f = if e >= 0 {
            Frac {
                num: num << e as usize,
                den: BigInt::one(),
            }
        } else {
            Frac {
                num,
                den: BigInt::one() << (-e) as usize,
            }
        };
        f.reduce();
        f
    }

    fn int(n: i64) -> Frac {
        Frac {
            num: BigInt::from(n),
            den: BigInt::one(),
        }
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = BigInt::one();
            return;
        }
        let k = self
            .num
            .trailing_zeros()
            .unwrap_or(0)
            .min(self.den.trailing_zeros().unwrap_or(0));
        if k > 0 {
            self.num >>= k as usize;
            self.den >>= k as usize;
        }
    }

    fn add(&self, o: &Frac) -> Frac {
        let mut f = Frac {
            num: &self.num * &o.den + &o.num * &self.den,
            den: &self.den * &o.den,
        };
        f.reduce();
        f
    }

    fn neg(&self) -> Frac {
        Frac {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    fn sub(&self, o: &Frac) -> Frac {
        self.add(&o.neg())
    }

    fn mul(&self, o: &Frac) -> Frac {
        let mut f = Frac {
            num: &self.num * &o.num,
            den: &self.den * &o.den,
        };
        f.reduce();
        f
    }

    fn div(&self, o: &Frac) -> Frac {
        assert!(!o.num.is_zero(), "division by zero");
        let mut f = Frac {
            num: &self.num * &o.den,
            den: &self.den * &o.num,
        };
        if f.den.is_negative() {
            f.num = -f.num;
            f.den = -f.den;
        }
        f.reduce();
        f
    }

    fn cmp(&self, o: &Frac) -> std::cmp::Ordering {
        (&self.num * &o.den).cmp(&(&o.num * &self.den))
    }
}

/// Affine branch `y = (p x + r) / d` on the interval left of `end`.
#[derive(Debug, Clone)]
struct Branch {
    end: Frac,
    p: BigInt,
    r: BigInt,
    d: BigInt,
    increasing: bool,
}

impl Branch {
    fn new(end: Frac, slope: &Frac, intercept: &Frac) -> Branch {
        let mut d = &slope.den * &intercept.den;
        let mut p = &slope.num * &intercept.den;
        let mut r = &intercept.num * &slope.den;
        let k = [&p, &r, &d]
            .iter()
            .filter(|v| !v.is_zero())
            .map(|v| v.trailing_zeros().unwrap_or(0))
            .min()
            .unwrap_or(0);
        if k > 0 {
            p >>= k as usize;
            r >>= k as usize;
            d >>= k as usize;
        }
        Branch {
            end,
            increasing: slope.num.is_positive(),
            p,
            r,
            d,
        }
    }

    fn apply(&self, x: &Frac) -> Frac {
        let mut y = Frac {
            num: &self.p * &x.num + &self.r * &x.den,
            den: &self.d * &x.den,
        };
        y.reduce();
        y
    }
}

/// Exact rational description of a piecewise linear unimodal map.
#[derive(Debug, Clone)]
pub struct ExactForm {
    /// Branches left to right; the last one ends at `1`.
    branches: Vec<Branch>,
    turning: Frac,
    critical: Frac,
    hit_tol: Frac,
}

impl ExactForm {
    /// From the graph through `(x_i, y_i)`, all taken as exact dyadic values.
    pub(crate) fn from_graph(xs: &[f64], ys: &[f64], turning: f64) -> ExactForm {
        let xs: Vec<Frac> = xs.iter().map(|&x| Frac::from_f64(x)).collect();
        let ys: Vec<Frac> = ys.iter().map(|&y| Frac::from_f64(y)).collect();
        let branches = (0..xs.len() - 1)
            .map(|i| {
                let slope = ys[i + 1].sub(&ys[i]).div(&xs[i + 1].sub(&xs[i]));
                let intercept = ys[i].sub(&slope.mul(&xs[i]));
                Branch::new(xs[i + 1].clone(), &slope, &intercept)
            })
            .collect();
        let turning = Frac::from_f64(turning);
        let critical = ys[xs.iter().position(|x| x.cmp(&turning).is_eq()).unwrap_or(0)].clone();
        ExactForm {
            branches,
            turning,
            critical,
            hit_tol: Frac::from_f64(HIT_TOL),
        }
    }

    /// Skew tent map `1 - s (c - x)`, `t (1 - x)` with `c = (t - 1) / t`.
    /// With `full_family`, the left branch is `s x`, fixing `0`.
    pub(crate) fn skew_tent(s: f64, t: f64, full_family: bool) -> ExactForm {
        let (s, t) = (Frac::from_f64(s), Frac::from_f64(t));
        let one = Frac::int(1);
        let c = t.sub(&one).div(&t);
        let left_intercept = if full_family {
            Frac::int(0)
        } else {
            one.sub(&s.mul(&c))
        };
        ExactForm {
            branches: vec![
                Branch::new(c.clone(), &s, &left_intercept),
                Branch::new(one.clone(), &t.neg(), &t),
            ],
            turning: c,
            critical: one,
            hit_tol: Frac::from_f64(HIT_TOL),
        }
    }

    /// Branch index for `x`, with the turning point resolved by `orient`.
    fn branch_of(&self, x: &Frac, orient: f64) -> usize {
        let last = self.branches.len() - 1;
        for (i, b) in self.branches[..last].iter().enumerate() {
            match x.cmp(&b.end) {
                std::cmp::Ordering::Less => return i,
                std::cmp::Ordering::Equal if orient < 0.0 => return i,
                _ => {}
            }
        }
        last
    }

    fn hits_turning(&self, x: &Frac) -> bool {
        let gap = x.sub(&self.turning);
        let gap = if gap.num.is_negative() {
            gap.neg()
        } else {
            gap
        };
        gap.cmp(&self.hit_tol).is_le()
    }

    fn clamp(mut y: Frac) -> Frac {
        if y.num.is_negative() {
            y = Frac::int(0);
        } else if y.num > y.den {
            y = Frac::int(1);
        }
        y
    }
}

/// Orbit states `(x, orient)` of the critical value, step by step.
struct CriticalOrbit<'a> {
    form: &'a ExactForm,
    x: Frac,
    orient: f64,
}

impl CriticalOrbit<'_> {
    /// Sign of the branch taken at the current point (`+1` for `L`), then advance.
    fn step(&mut self) -> f64 {
        let form = self.form;
        let at_turning = form.hits_turning(&self.x);
        if at_turning {
            self.x = form.turning.clone();
        }
        let i = form.branch_of(&self.x, self.orient);
        let branch = &form.branches[i];
        let sign = if branch.increasing { 1.0 } else { -1.0 };
        self.x = if at_turning {
            form.critical.clone()
        } else {
            ExactForm::clamp(branch.apply(&self.x))
        };
        self.orient *= sign;
        sign
    }
}

/// Kneading signs `theta_0 = 1, ..., theta_n` of `map` from its exact orbit.
///
/// When the rounded orbit closes a cycle that the exact orbit confirms, the
/// sequence is continued periodically instead of iterated.
pub(crate) fn exact_kneading_signs<M: PiecewiseLinear + ?Sized>(
    map: &M,
    form: &ExactForm,
    n: usize,
) -> Vec<f64> {
    let candidate = kneading_of(map, n).periodic;
    let mut orbit = CriticalOrbit {
        form,
        x: form.critical.clone(),
        orient: -1.0,
    };
    let mut eps: Vec<f64> = Vec::with_capacity(n);
    let mut marked: Option<(Frac, f64)> = None;
    let mut period = None;
    while eps.len() < n {
        if let Some(p) = candidate {
            let k = eps.len();
            if k == p.preperiod {
                marked = Some((orbit.x.clone(), orbit.orient));
            } else if k == p.preperiod + p.period {
                let (x, o) = marked.take().expect("state recorded at the preperiod");
                if x.cmp(&orbit.x).is_eq() && o == orbit.orient {
                    period = Some(p.period);
                    break;
                }
            }
        }
        eps.push(orbit.step());
    }
    if let Some(p) = period {
        while eps.len() < n {
            eps.push(eps[eps.len() - p]);
        }
    }
    let mut out = Vec::with_capacity(n + 1);
    let mut theta = 1.0;
    out.push(theta);
    for e in eps {
        theta *= e;
        out.push(theta);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{PlUnimodalMap, SkewTentMap};

    #[test]
    fn dyadic_conversion_is_exact() {
        let f = Frac::from_f64(0.375);
        assert_eq!((f.num, f.den), (BigInt::from(3), BigInt::from(8)));
        let f = Frac::from_f64(-5e-324);
        assert_eq!((f.num, f.den), (BigInt::from(-1), BigInt::one() << 1074));
        for x in [1.0 / 3.0, 112.558, 1e300] {
            let f = Frac::from_f64(x);
            let back = f.num.to_string().parse::<f64>().unwrap()
                / f.den.to_string().parse::<f64>().unwrap();
            assert_eq!(back, x);
        }
    }

    #[test]
    fn agrees_with_rounded_orbit_on_tame_maps() {
        for (s, t) in [(2.3, 1.7), (1.9, 1.4), (4.0, 1.2)] {
            let f = SkewTentMap::new(s, t).unwrap();
            let exact = exact_kneading_signs(&f, &f.exact_form(), 30);
            assert_eq!(exact, f.kneading(30).signs());
        }
        let g = PlUnimodalMap::new(vec![0.0, 0.3, 0.6, 1.0], vec![0.6, 1.0, 0.6, 0.0]).unwrap();
        assert_eq!(
            exact_kneading_signs(&g, &g.exact_form(), 30),
            g.kneading(30).signs()
        );
    }

    #[test]
    fn exact_cycles_are_continued() {
        // 1 -> 0 -> 0 for the full family, exact in binary for (3, 1.5)
        let f = SkewTentMap::new(3.0, 1.5).unwrap();
        let signs = exact_kneading_signs(&f, &f.exact_form(), 2000);
        assert_eq!(signs.len(), 2001);
        assert!(signs.iter().skip(1).all(|&th| th == -1.0));
    }

    #[test]
    fn full_family_band_fixes_zero() {
        let t = 1.0088842934473539;
        let f = SkewTentMap::new(t / (t - 1.0), t).unwrap();
        let signs = exact_kneading_signs(&f, &f.exact_form(), 500);
        assert!(signs.iter().skip(1).all(|&th| th == -1.0));
    }
}
