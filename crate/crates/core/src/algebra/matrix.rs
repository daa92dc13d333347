use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{AlgebraError, ComplexScalar};

/// Condition-number ceiling above which [`SquareMatrix::inverse`] refuses to invert.
pub const MAX_CONDITION: f64 = 1e12;

/// Dense complex square matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareMatrix {
    dim: usize,
    entries: Vec<ComplexScalar>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            entries: vec![ComplexScalar::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ComplexScalar::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<ComplexScalar>>) -> Result<Self, AlgebraError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(AlgebraError::EmptyMatrix);
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(AlgebraError::NotSquare {
                    rows: dim,
                    cols: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(Self { dim, entries })
    }

    /// `[[a, b], [c, d]]`.
    pub fn from_2x2(a: ComplexScalar, b: ComplexScalar, c: ComplexScalar, d: ComplexScalar) -> Self {
        Self {
            dim: 2,
            entries: vec![a, b, c, d],
        }
    }

    pub fn diagonal(values: &[ComplexScalar]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// `diag(1, -1)`.
    pub fn sigma3() -> Self {
        Self::diagonal(&[ComplexScalar::new(1.0, 0.0), ComplexScalar::new(-1.0, 0.0)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[ComplexScalar] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<ComplexScalar>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn ensure_finite(&self) -> Result<(), AlgebraError> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(AlgebraError::NonFinite)
        }
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self[(i, j)].norm() <= tol))
    }

    pub fn diagonal_part(&self) -> Self {
        Self::diagonal(&self.diagonal_entries())
    }

    pub fn diagonal_entries(&self) -> Vec<ComplexScalar> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> ComplexScalar {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scale(&self, s: ComplexScalar) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self * other - other * self
    }

    fn check_dim(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(AlgebraError::DimMismatch {
                left: self.dim,
                right: other.dim,
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_dim(other)?;
        Ok(self + other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_dim(other)?;
        Ok(self * other)
    }

    /// Gauss-Jordan inverse with partial pivoting.
    ///
    /// Fails when the one-norm condition estimate exceeds [`MAX_CONDITION`].
    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        self.inverse_with_limit(MAX_CONDITION)
    }

    pub fn inverse_with_limit(&self, max_condition: f64) -> Result<Self, AlgebraError> {
        let n = self.dim;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
                .unwrap_or(col);
            let pv = a[(pivot, col)];
            if pv.norm() == 0.0 || !pv.norm().is_finite() {
                return Err(AlgebraError::Singular {
                    condition: f64::INFINITY,
                });
            }
            if pivot != col {
                for j in 0..n {
                    a.entries.swap(pivot * n + j, col * n + j);
                    inv.entries.swap(pivot * n + j, col * n + j);
                }
            }
            let r = pv.inv();
            for j in 0..n {
                a[(col, j)] *= r;
                inv[(col, j)] *= r;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[(i, col)];
                if f.norm() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let (x, y) = (a[(col, j)], inv[(col, j)]);
                    a[(i, j)] -= f * x;
                    inv[(i, j)] -= f * y;
                }
            }
        }
        let condition = self.norm_one() * inv.norm_one();
        if !condition.is_finite() || condition > max_condition {
            return Err(AlgebraError::Singular { condition });
        }
        Ok(inv)
    }

    /// One-norm condition number, infinite when singular.
    pub fn condition(&self) -> f64 {
        match self.inverse_with_limit(f64::INFINITY) {
            Ok(inv) => self.norm_one() * inv.norm_one(),
            Err(_) => f64::INFINITY,
        }
    }

    fn to_nalgebra(&self) -> DMatrix<ComplexScalar> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }

    /// Eigenvalues sorted by real part, then imaginary part.
    pub fn eigenvalues(&self) -> Vec<ComplexScalar> {
        let mut ev: Vec<ComplexScalar> = if self.dim == 2 {
            let tr = self.trace() * 0.5;
            let det = self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)];
            let disc = (tr * tr - det).sqrt();
            vec![tr + disc, tr - disc]
        } else {
            self.to_nalgebra()
                .schur()
                .eigenvalues()
                .expect("complex Schur form is triangular")
                .iter()
                .copied()
                .collect()
        };
        ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        ev
    }

    /// Unit vector spanning the numerical kernel of `self - lambda·I`.
    pub fn kernel_vector(&self, lambda: ComplexScalar) -> Vec<ComplexScalar> {
        let shifted = self - &Self::identity(self.dim).scale(lambda);
        let svd = shifted.to_nalgebra().svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors requested");
        let (idx, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty spectrum");
        v_t.row(idx).iter().map(|z| z.conj()).collect()
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = ComplexScalar;
    fn index(&self, (i, j): (usize, usize)) -> &ComplexScalar {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ComplexScalar {
        &mut self.entries[i * self.dim + j]
    }
}

impl Add for &SquareMatrix {
    type Output = SquareMatrix;
    fn add(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        SquareMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &SquareMatrix {
    type Output = SquareMatrix;
    fn sub(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        SquareMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Neg for &SquareMatrix {
    type Output = SquareMatrix;
    fn neg(self) -> SquareMatrix {
        self.scale(ComplexScalar::new(-1.0, 0.0))
    }
}

impl Mul<ComplexScalar> for &SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: ComplexScalar) -> SquareMatrix {
        self.scale(rhs)
    }
}

impl Mul<f64> for &SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: f64) -> SquareMatrix {
        self.scale(ComplexScalar::new(rhs, 0.0))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<SquareMatrix> for SquareMatrix {
            type Output = SquareMatrix;
            fn $m(self, rhs: SquareMatrix) -> SquareMatrix {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&SquareMatrix> for SquareMatrix {
            type Output = SquareMatrix;
            fn $m(self, rhs: &SquareMatrix) -> SquareMatrix {
                (&self).$m(rhs)
            }
        }
        impl $tr<SquareMatrix> for &SquareMatrix {
            type Output = SquareMatrix;
            fn $m(self, rhs: SquareMatrix) -> SquareMatrix {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for SquareMatrix {
    type Output = SquareMatrix;
    fn neg(self) -> SquareMatrix {
        -&self
    }
}

impl Mul<ComplexScalar> for SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: ComplexScalar) -> SquareMatrix {
        self.scale(rhs)
    }
}

impl Mul<f64> for SquareMatrix {
    type Output = SquareMatrix;
    fn mul(self, rhs: f64) -> SquareMatrix {
        &self * rhs
    }
}

impl AddAssign<&SquareMatrix> for SquareMatrix {
    fn add_assign(&mut self, rhs: &SquareMatrix) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, b) in self.entries.iter_mut().zip(&rhs.entries) {
            *a += b;
        }
    }
}

impl SubAssign<&SquareMatrix> for SquareMatrix {
    fn sub_assign(&mut self, rhs: &SquareMatrix) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, b) in self.entries.iter_mut().zip(&rhs.entries) {
            *a -= b;
        }
    }
}

pub fn trace_of(m: &SquareMatrix) -> ComplexScalar {
    m.trace()
}

pub fn commutator_of(a: &SquareMatrix, b: &SquareMatrix) -> Result<SquareMatrix, AlgebraError> {
    a.check_dim(b)?;
    Ok(a.commutator(b))
}

pub fn mat_inverse(m: &SquareMatrix) -> Result<SquareMatrix, AlgebraError> {
    m.inverse()
}
