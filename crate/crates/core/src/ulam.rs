//! Ulam discretization of the transfer operator on `m` uniform bins.
//!
//! Entry `(i, j)` is the fraction of bin `j` mapped into bin `i`, computed
//! exactly from the affine pieces. The stationary vector of the resulting
//! column-stochastic matrix approximates the invariant density.

use rayon::prelude::*;

use crate::density::StepDensity;
use crate::entropy::rohlin_entropy;
use crate::error::{Error, Result};
use crate::maps::{LinearPiece, PiecewiseLinear};

/// Default stopping tolerance (L1 change between iterates).
pub const DEFAULT_TOL: f64 = 1e-10;
/// Iteration cap of [`stationary_density`].
pub const MAX_ITERATIONS: usize = 100_000;

/// Sparse column-stochastic Ulam matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UlamMatrix {
    m: usize,
    /// `columns[j]` lists `(i, P_ij)` with `i` increasing.
    columns: Vec<Vec<(usize, f64)>>,
}

impl UlamMatrix {
    pub fn bins(&self) -> usize {
        self.m
    }

    pub fn column(&self, j: usize) -> &[(usize, f64)] {
        &self.columns[j]
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.columns[j]
            .iter()
            .find(|&&(r, _)| r == i)
            .map_or(0.0, |&(_, p)| p)
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// `P v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for (col, &vj) in self.columns.iter().zip(v) {
            if vj == 0.0 {
                continue;
            }
            for &(i, p) in col {
                out[i] += p * vj;
            }
        }
        out
    }
}

fn column(pieces: &[LinearPiece], m: usize, j: usize) -> Vec<(usize, f64)> {
    let w = 1.0 / m as f64;
    let (a, b) = (j as f64 * w, (j + 1) as f64 * w);
    let mut col: Vec<(usize, f64)> = Vec::new();
    for piece in pieces {
        let (u, v) = (a.max(piece.x0), b.min(piece.x1));
        if v <= u {
            continue;
        }
        let slope = piece.slope().abs();
        let (y0, y1) = (piece.eval(u), piece.eval(v));
        let (lo, hi) = (y0.min(y1).clamp(0.0, 1.0), y0.max(y1).clamp(0.0, 1.0));
        let first = ((lo * m as f64).floor() as usize).min(m - 1);
        let last = ((hi * m as f64).ceil() as usize).clamp(first + 1, m);
        for i in first..last {
            let overlap = (hi.min((i + 1) as f64 * w) - lo.max(i as f64 * w)).max(0.0);
            if overlap > 0.0 {
                col.push((i, overlap / slope * m as f64));
            }
        }
    }
    col.sort_by_key(|&(i, _)| i);
    col.dedup_by(|next, prev| {
        if next.0 == prev.0 {
            prev.1 += next.1;
            true
        } else {
            false
        }
    });
    col
}

/// Exact Ulam matrix of `map` on `m >= 2` uniform bins.
pub fn build_matrix<M: PiecewiseLinear + Sync + ?Sized>(map: &M, m: usize) -> Result<UlamMatrix> {
    if m < 2 {
        return Err(Error::DomainError {
            what: "need at least two bins",
            value: m as f64,
        });
    }
    let pieces = map.pieces();
    let columns = (0..m)
        .into_par_iter()
        .map(|j| column(&pieces, m, j))
        .collect();
    Ok(UlamMatrix { m, columns })
}

/// Stationary density of `mat`, by the damped iteration `v <- (v + P v) / 2`
/// from the uniform vector until the L1 change is at most `tol`.
///
/// Damping leaves the fixed vectors unchanged and converges also when the
/// chain is periodic, as it is for the rectangular roots.
pub fn stationary_density(mat: &UlamMatrix, tol: f64) -> Result<StepDensity> {
    if !(tol > 0.0) {
        return Err(Error::DomainError {
            what: "tolerance must be positive",
            value: tol,
        });
    }
    let m = mat.m;
    let mut v = vec![1.0 / m as f64; m];
    let mut change = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        let pv = mat.apply(&v);
        change = 0.0;
        for (vi, pi) in v.iter_mut().zip(&pv) {
            let next = 0.5 * (*vi + pi);
            change += (next - *vi).abs();
            *vi = next;
        }
        if change <= tol {
            let mass: f64 = v.iter().sum();
            let heights = v.iter().map(|x| (x / mass * m as f64).max(0.0)).collect();
            return StepDensity::uniform_bins(heights);
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        change,
    })
}

/// Rohlin integral of `log|f'|` against the Ulam density on `m >= 64` bins.
pub fn metric_entropy_ulam<M: PiecewiseLinear + Sync + ?Sized>(map: &M, m: usize) -> Result<f64> {
    if m < 64 {
        return Err(Error::DomainError {
            what: "Ulam entropy needs at least 64 bins",
            value: m as f64,
        });
    }
    let rho = stationary_density(&build_matrix(map, m)?, DEFAULT_TOL)?;
    rohlin_entropy(map, &rho)
}
