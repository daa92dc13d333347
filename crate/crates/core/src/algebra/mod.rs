//! Complex matrices, truncated matrix Laurent series and their residue calculus.
//!
//! Series at infinity use the local variable `ζ = 1/z`; the residue there is
//! minus the coefficient of `1/z`, so residues of a rational function sum to zero.

mod matrix;
mod rational;
mod series;

use thiserror::Error;

pub use matrix::{commutator_of, mat_inverse, trace_of, SquareMatrix, MAX_CONDITION};
pub use rational::{PolePart, RationalMatrix};
pub use series::{
    residue_at, series_add, series_differentiate, series_inverse, series_mul, ExponentData, MatrixSeries, SeriesPoint,
};

pub type ComplexScalar = num_complex::Complex64;

/// Shorthand constructor for a complex scalar.
pub fn c64(re: f64, im: f64) -> ComplexScalar {
    ComplexScalar::new(re, im)
}

/// Distance from `z` to the straight segment `a → b`.
pub fn segment_distance(a: ComplexScalar, b: ComplexScalar, z: ComplexScalar) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let u = ((z - a) * d.conj()).re / len2;
    (a + d * u.clamp(0.0, 1.0) - z).norm()
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("series expanded at different points")]
    PointMismatch,
    #[error("matrix is singular or ill-conditioned (condition {condition:e})")]
    Singular { condition: f64 },
    #[error("exponent {exponent} lies beyond the truncation order {order}")]
    OutsideWindow { exponent: i32, order: i32 },
    #[error("requested order {requested} exceeds the available order {available}")]
    OrderUnavailable { requested: i32, available: i32 },
    #[error("matrix has no rows")]
    EmptyMatrix,
    #[error("matrix is not square ({rows} rows, a row of length {cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("exponent data must be diagonal")]
    NotDiagonal,
    #[error("polar exponent {0} must be negative")]
    NonNegativePolarExponent(i32),
    #[error("evaluation at a pole")]
    AtPole,
    #[error("non-finite entry")]
    NonFinite,
}
