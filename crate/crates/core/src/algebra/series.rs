use serde::{Deserialize, Serialize};

use super::{AlgebraError, ComplexScalar, SquareMatrix};

/// Expansion point of a series: `ζ = z − a` at a finite point, `ζ = 1/z` at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SeriesPoint {
    Finite(ComplexScalar),
    Infinity,
}

impl SeriesPoint {
    pub fn is_infinite(&self) -> bool {
        matches!(self, SeriesPoint::Infinity)
    }

    /// Exponent of `ζ` whose coefficient carries the residue.
    pub fn residue_exponent(&self) -> i32 {
        match self {
            SeriesPoint::Finite(_) => -1,
            SeriesPoint::Infinity => 1,
        }
    }
}

/// Truncated matrix Laurent series `Σ_k coeffs[k] ζ^(start + k)`.
///
/// Every coefficient up to [`MatrixSeries::order`] is known; nothing beyond it is.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixSeries {
    point: SeriesPoint,
    dim: usize,
    start: i32,
    coeffs: Vec<SquareMatrix>,
}

impl MatrixSeries {
    pub fn new(point: SeriesPoint, dim: usize, start: i32, coeffs: Vec<SquareMatrix>) -> Result<Self, AlgebraError> {
        if let Some(bad) = coeffs.iter().find(|c| c.dim() != dim) {
            return Err(AlgebraError::DimMismatch {
                left: dim,
                right: bad.dim(),
            });
        }
        Ok(Self {
            point,
            dim,
            start,
            coeffs,
        })
    }

    /// Zero series known through `order`.
    pub fn zero(point: SeriesPoint, dim: usize, order: i32) -> Self {
        Self {
            point,
            dim,
            start: 0,
            coeffs: vec![SquareMatrix::zeros(dim); (order + 1).max(0) as usize],
        }
    }

    /// Constant series known exactly through `order`.
    pub fn constant(point: SeriesPoint, m: SquareMatrix, order: i32) -> Self {
        let dim = m.dim();
        let mut s = Self::zero(point, dim, order.max(0));
        s.coeffs[0] = m;
        s
    }

    pub fn point(&self) -> SeriesPoint {
        self.point
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn start(&self) -> i32 {
        self.start
    }

    pub fn coeffs(&self) -> &[SquareMatrix] {
        &self.coeffs
    }

    /// Highest exponent whose coefficient is known.
    pub fn order(&self) -> i32 {
        self.start + self.coeffs.len() as i32 - 1
    }

    /// Coefficient of `ζ^k`; zero below the start, an error above the truncation order.
    pub fn coeff(&self, k: i32) -> Result<SquareMatrix, AlgebraError> {
        if k > self.order() {
            return Err(AlgebraError::OutsideWindow {
                exponent: k,
                order: self.order(),
            });
        }
        if k < self.start {
            return Ok(SquareMatrix::zeros(self.dim));
        }
        Ok(self.coeffs[(k - self.start) as usize].clone())
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: i32) -> Self {
        let keep = (order - self.start + 1).clamp(0, self.coeffs.len() as i32) as usize;
        Self {
            coeffs: self.coeffs[..keep].to_vec(),
            ..self.clone()
        }
    }

    /// Declares coefficients between the current order and `order` to be exactly zero.
    pub fn extend_exact(&self, order: i32) -> Self {
        let mut out = self.clone();
        while out.order() < order {
            out.coeffs.push(SquareMatrix::zeros(self.dim));
        }
        out
    }

    /// Largest coefficient norm over the known window.
    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().map(SquareMatrix::max_norm).fold(0.0, f64::max)
    }

    fn check_compatible(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.point != other.point {
            return Err(AlgebraError::PointMismatch);
        }
        if self.dim != other.dim {
            return Err(AlgebraError::DimMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self, AlgebraError> {
        self.check_compatible(other)?;
        let start = self.start.min(other.start);
        let order = self.order().min(other.order());
        let coeffs = (start..=order)
            .map(|k| {
                let a = self.coeff(k)?;
                let b = other.coeff(k)?;
                Ok(a + b * sign)
            })
            .collect::<Result<Vec<_>, AlgebraError>>()?;
        Self::new(self.point, self.dim, start, coeffs)
    }

    /// Cauchy product, known through `min(order_a + start_b, order_b + start_a)`.
    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_compatible(other)?;
        let start = self.start + other.start;
        let order = (self.order() + other.start).min(other.order() + self.start);
        let len = (order - start + 1).max(0) as usize;
        let mut coeffs = vec![SquareMatrix::zeros(self.dim); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                let slot = i + j;
                if slot < len {
                    coeffs[slot] += &(a * b);
                }
            }
        }
        Self::new(self.point, self.dim, start, coeffs)
    }

    pub fn left_mul(&self, m: &SquareMatrix) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| m * c).collect(),
            ..self.clone()
        }
    }

    pub fn right_mul(&self, m: &SquareMatrix) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * m).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, s: ComplexScalar) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect(),
            ..self.clone()
        }
    }

    /// Multiplicative inverse known through `order`.
    pub fn inverse(&self, order: i32) -> Result<Self, AlgebraError> {
        let lead = self.coeffs.first().ok_or(AlgebraError::OutsideWindow {
            exponent: self.start,
            order: self.order(),
        })?;
        let lead_inv = lead.inverse()?;
        let start = -self.start;
        if order < start {
            return Self::new(self.point, self.dim, start, Vec::new());
        }
        let needed = (order - start) as usize;
        let available = self.coeffs.len() - 1;
        if needed > available {
            return Err(AlgebraError::OrderUnavailable {
                requested: order,
                available: start + available as i32,
            });
        }
        let mut out: Vec<SquareMatrix> = Vec::with_capacity(needed + 1);
        out.push(lead_inv.clone());
        for n in 1..=needed {
            let mut acc = SquareMatrix::zeros(self.dim);
            for j in 1..=n {
                acc += &(&self.coeffs[j] * &out[n - j]);
            }
            out.push(-(&lead_inv * &acc));
        }
        Self::new(self.point, self.dim, start, out)
    }

    /// Termwise `d/dz`.
    pub fn differentiate(&self) -> Self {
        match self.point {
            SeriesPoint::Finite(_) => {
                let coeffs = self
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * f64::from(self.start + i as i32))
                    .collect();
                Self {
                    start: self.start - 1,
                    coeffs,
                    ..self.clone()
                }
            }
            SeriesPoint::Infinity => {
                let coeffs = self
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * -f64::from(self.start + i as i32))
                    .collect();
                Self {
                    start: self.start + 1,
                    coeffs,
                    ..self.clone()
                }
            }
        }
    }

    /// Residue; at infinity this is minus the coefficient of `1/z`.
    pub fn residue(&self) -> Result<SquareMatrix, AlgebraError> {
        let c = self.coeff(self.point.residue_exponent())?;
        Ok(match self.point {
            SeriesPoint::Finite(_) => c,
            SeriesPoint::Infinity => -c,
        })
    }
}

pub fn series_add(a: &MatrixSeries, b: &MatrixSeries) -> Result<MatrixSeries, AlgebraError> {
    a.add(b)
}

pub fn series_mul(a: &MatrixSeries, b: &MatrixSeries) -> Result<MatrixSeries, AlgebraError> {
    a.mul(b)
}

pub fn series_inverse(a: &MatrixSeries, order: i32) -> Result<MatrixSeries, AlgebraError> {
    a.inverse(order)
}

pub fn series_differentiate(a: &MatrixSeries) -> MatrixSeries {
    a.differentiate()
}

pub fn residue_at(a: &MatrixSeries) -> Result<SquareMatrix, AlgebraError> {
    a.residue()
}

/// Diagonal exponent `Σ_{k<0} c_k ζ^k + L ln ζ` of a formal local solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentData {
    polar: Vec<(i32, SquareMatrix)>,
    log: SquareMatrix,
}

impl ExponentData {
    pub fn new(polar: Vec<(i32, SquareMatrix)>, log: SquareMatrix) -> Result<Self, AlgebraError> {
        let dim = log.dim();
        for (k, c) in &polar {
            if *k >= 0 {
                return Err(AlgebraError::NonNegativePolarExponent(*k));
            }
            if c.dim() != dim {
                return Err(AlgebraError::DimMismatch {
                    left: dim,
                    right: c.dim(),
                });
            }
            if !c.is_diagonal(0.0) {
                return Err(AlgebraError::NotDiagonal);
            }
        }
        if !log.is_diagonal(0.0) {
            return Err(AlgebraError::NotDiagonal);
        }
        let mut polar = polar;
        polar.sort_by_key(|(k, _)| *k);
        Ok(Self { polar, log })
    }

    pub fn logarithmic(log: SquareMatrix) -> Self {
        Self { polar: Vec::new(), log }
    }

    pub fn polar(&self) -> &[(i32, SquareMatrix)] {
        &self.polar
    }

    pub fn log_coeff(&self) -> &SquareMatrix {
        &self.log
    }

    pub fn dim(&self) -> usize {
        self.log.dim()
    }

    /// Poincaré rank of the point: the largest pole order of the polar part.
    pub fn poincare_rank(&self) -> u32 {
        self.polar.iter().map(|(k, _)| k.unsigned_abs()).max().unwrap_or(0)
    }

    /// `d/dz` of the exponent, exact through `order`.
    pub fn derivative_series(&self, point: SeriesPoint, order: i32) -> MatrixSeries {
        let dim = self.dim();
        let mut terms: Vec<(i32, SquareMatrix)> = Vec::new();
        match point {
            SeriesPoint::Finite(_) => {
                for (k, c) in &self.polar {
                    terms.push((k - 1, c * f64::from(*k)));
                }
                terms.push((-1, self.log.clone()));
            }
            SeriesPoint::Infinity => {
                for (k, c) in &self.polar {
                    terms.push((k + 1, c * -f64::from(*k)));
                }
                terms.push((1, -&self.log));
            }
        }
        let start = terms.iter().map(|(k, _)| *k).min().unwrap_or(0);
        let top = order.max(start);
        let mut coeffs = vec![SquareMatrix::zeros(dim); (top - start + 1) as usize];
        for (k, c) in terms {
            if k <= top {
                coeffs[(k - start) as usize] += &c;
            }
        }
        MatrixSeries {
            point,
            dim,
            start,
            coeffs,
        }
    }
    /// Polar part `Σ c_k ζ^k` as a series exact through `order`; `None` when a log term is present.
    pub fn polar_series(&self, point: SeriesPoint, order: i32) -> Option<MatrixSeries> {
        if !self.log.is_diagonal(0.0) || self.log.max_norm() != 0.0 {
            return None;
        }
        let dim = self.dim();
        let start = self.polar.first().map(|(k, _)| *k).unwrap_or(0);
        let top = order.max(start);
        let mut coeffs = vec![SquareMatrix::zeros(dim); (top - start + 1) as usize];
        for (k, c) in &self.polar {
            coeffs[(k - start) as usize] += c;
        }
        Some(MatrixSeries {
            point,
            dim,
            start,
            coeffs,
        })
    }
}
