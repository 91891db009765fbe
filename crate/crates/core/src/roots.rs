//! Bracketing root finders shared by the constructors and solvers.

use crate::error::{Error, Result};

/// Result of a bisection: the midpoint of the final bracket and its width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracketed {
    pub root: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Bracketed {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Bisection on a sign change of `f` over `[lo, hi]`.
///
/// Stops when the bracket is narrower than `xtol` or can no longer be split
/// in floating point. An exact zero at a probe point ends the search early.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<Bracketed>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = (lo.min(hi), lo.max(hi));
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(Bracketed {
            root: lo,
            lo,
            hi: lo,
        });
    }
    if fhi == 0.0 {
        return Ok(Bracketed {
            root: hi,
            lo: hi,
            hi,
        });
    }
    if flo.is_nan() || fhi.is_nan() || flo.signum() == fhi.signum() {
        return Err(Error::NoRoot(format!(
            "no sign change on [{lo}, {hi}] (f = {flo}, {fhi})"
        )));
    }
    // 2^-1074 bounds the number of useful halvings
    for _ in 0..1100 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(Bracketed {
                root: mid,
                lo: mid,
                hi: mid,
            });
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(Bracketed {
        root: 0.5 * (lo + hi),
        lo,
        hi,
    })
}

/// Scan `[lo, hi]` in `steps` equal pieces for the first sign change of `f`,
/// then bisect inside it.
pub fn scan_and_bisect<F>(mut f: F, lo: f64, hi: f64, steps: usize, xtol: f64) -> Result<Bracketed>
where
    F: FnMut(f64) -> f64,
{
    let h = (hi - lo) / steps as f64;
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=steps {
        let b = if i == steps { hi } else { lo + h * i as f64 };
        let fb = f(b);
        if fa == 0.0 || fb == 0.0 || fa.signum() != fb.signum() {
            return bisect(&mut f, a, b, xtol);
        }
        a = b;
        fa = fb;
    }
    Err(Error::NoRoot(format!(
        "no sign change found scanning [{lo}, {hi}]"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r.root - 2f64.sqrt()).abs() < 1e-14);
        assert!(r.width() <= 1e-14);
    }

    #[test]
    fn bisect_runs_to_machine_precision() {
        let r = bisect(|x| x - 0.3, 0.0, 1.0, 0.0).unwrap();
        assert!(r.width() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn bisect_rejects_no_sign_change() {
        assert!(matches!(
            bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(Error::NoRoot(_))
        ));
    }

    #[test]
    fn scan_finds_first_root() {
        // roots at 0.25 and 0.75; the scan must return the first
        let r = scan_and_bisect(|x| (x - 0.25) * (x - 0.75), 0.0, 1.0, 100, 1e-13).unwrap();
        assert!((r.root - 0.25).abs() < 1e-12);
    }
}
