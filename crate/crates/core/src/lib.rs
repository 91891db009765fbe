//! Invariant densities, metric entropy and topological entropy of piecewise
//! expanding skew tent maps and piecewise linear unimodal maps, together with
//! solvers that construct maps with prescribed topological and metric entropy.
//!
//! The main entry points:
//!
//! * [`SkewTentMap`] and [`PlUnimodalMap`] with orbits, kneading sequences and
//!   renormalization ([`maps`]);
//! * the explicit invariant density series and step-function arithmetic
//!   ([`density`]);
//! * Rohlin metric entropy and kneading-determinant topological entropy
//!   ([`entropy`]);
//! * an Ulam discretization used as an independent check ([`ulam`]);
//! * the entropy-flexibility solvers ([`flex`]).

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod entropy;
pub mod error;
pub mod flex;
pub mod maps;
pub mod roots;
pub mod ulam;

pub use density::{LimitDensity, StepDensity};
pub use entropy::EntropyReport;
pub use error::{Error, Result};
pub use flex::SolveResult;
pub use maps::{
    Kneading, OrbitRecord, PiecewiseLinear, PlUnimodalMap, SkewTentMap, Symbol, UnimodalMap,
};
