use serde::{Deserialize, Serialize};

use super::{AlgebraError, ComplexScalar, MatrixSeries, SeriesPoint, SquareMatrix};

/// Principal part at one finite pole: `Σ_m coeffs[m-1] (z − at)^(−m)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolePart {
    pub at: ComplexScalar,
    pub coeffs: Vec<SquareMatrix>,
}

/// Matrix-valued rational function in partial-fraction form: a polynomial part plus finite poles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalMatrix {
    dim: usize,
    poly: Vec<SquareMatrix>,
    poles: Vec<PolePart>,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

impl RationalMatrix {
    /// `poly[j]` multiplies `z^j`.
    pub fn new(dim: usize, poly: Vec<SquareMatrix>, poles: Vec<PolePart>) -> Result<Self, AlgebraError> {
        let dims = poly
            .iter()
            .chain(poles.iter().flat_map(|p| p.coeffs.iter()))
            .map(SquareMatrix::dim);
        for d in dims {
            if d != dim {
                return Err(AlgebraError::DimMismatch { left: dim, right: d });
            }
        }
        Ok(Self { dim, poly, poles })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn poly(&self) -> &[SquareMatrix] {
        &self.poly
    }

    pub fn poles(&self) -> &[PolePart] {
        &self.poles
    }

    pub fn eval(&self, z: ComplexScalar) -> Result<SquareMatrix, AlgebraError> {
        let mut out = SquareMatrix::zeros(self.dim);
        let mut zp = ComplexScalar::new(1.0, 0.0);
        for c in &self.poly {
            out += &c.scale(zp);
            zp *= z;
        }
        for pole in &self.poles {
            let d = z - pole.at;
            if d.norm() == 0.0 {
                return Err(AlgebraError::AtPole);
            }
            let r = d.inv();
            let mut rp = r;
            for c in &pole.coeffs {
                out += &c.scale(rp);
                rp *= r;
            }
        }
        Ok(out)
    }

    /// Exact `d/dz`.
    pub fn eval_dz(&self, z: ComplexScalar) -> Result<SquareMatrix, AlgebraError> {
        let mut out = SquareMatrix::zeros(self.dim);
        let mut zp = ComplexScalar::new(1.0, 0.0);
        for (j, c) in self.poly.iter().enumerate().skip(1) {
            out += &c.scale(zp * j as f64);
            zp *= z;
        }
        for pole in &self.poles {
            let d = z - pole.at;
            if d.norm() == 0.0 {
                return Err(AlgebraError::AtPole);
            }
            let r = d.inv();
            let mut rp = r * r;
            for (m, c) in pole.coeffs.iter().enumerate() {
                out -= &c.scale(rp * (m + 1) as f64);
                rp *= r;
            }
        }
        Ok(out)
    }

    /// Laurent expansion at `point`, exact through `order`.
    pub fn expand_at(&self, point: SeriesPoint, order: i32) -> MatrixSeries {
        let dim = self.dim;
        let start = match point {
            SeriesPoint::Infinity => -(self.poly.len() as i32 - 1).max(0),
            SeriesPoint::Finite(b) => -self
                .poles
                .iter()
                .filter(|p| p.at == b)
                .map(|p| p.coeffs.len() as i32)
                .max()
                .unwrap_or(0),
        };
        let top = order.max(start);
        let len = (top - start + 1) as usize;
        let mut coeffs = vec![SquareMatrix::zeros(dim); len];
        let mut put = |k: i32, m: SquareMatrix| {
            if k <= top {
                coeffs[(k - start) as usize] += &m;
            }
        };
        match point {
            SeriesPoint::Infinity => {
                for (j, c) in self.poly.iter().enumerate() {
                    put(-(j as i32), c.clone());
                }
                for pole in &self.poles {
                    for (mi, c) in pole.coeffs.iter().enumerate() {
                        let m = mi as u32 + 1;
                        let mut ap = ComplexScalar::new(1.0, 0.0);
                        for j in 0..=(top - m as i32).max(-1) {
                            let w = ap * binomial(m + j as u32 - 1, j as u32);
                            put(m as i32 + j, c.scale(w));
                            ap *= pole.at;
                        }
                    }
                }
            }
            SeriesPoint::Finite(b) => {
                for (j, c) in self.poly.iter().enumerate() {
                    let mut bp = ComplexScalar::new(1.0, 0.0);
                    for i in (0..=j).rev() {
                        put(i as i32, c.scale(bp * binomial(j as u32, i as u32)));
                        bp *= b;
                    }
                }
                for pole in &self.poles {
                    if pole.at == b {
                        for (mi, c) in pole.coeffs.iter().enumerate() {
                            put(-(mi as i32 + 1), c.clone());
                        }
                        continue;
                    }
                    let r = (b - pole.at).inv();
                    for (mi, c) in pole.coeffs.iter().enumerate() {
                        let m = mi as u32 + 1;
                        let mut rp = r.powu(m);
                        for j in 0..=top.max(-1) {
                            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                            let w = rp * (sign * binomial(m + j as u32 - 1, j as u32));
                            put(j, c.scale(w));
                            rp *= r;
                        }
                    }
                }
            }
        }
        MatrixSeries::new(point, dim, start, coeffs).expect("coefficients share one dimension")
    }

    /// Residue at each finite pole followed by the residue at infinity.
    pub fn residues(&self) -> (Vec<(ComplexScalar, SquareMatrix)>, SquareMatrix) {
        let finite: Vec<_> = self
            .poles
            .iter()
            .map(|p| {
                let r = p
                    .coeffs
                    .first()
                    .cloned()
                    .unwrap_or_else(|| SquareMatrix::zeros(self.dim));
                (p.at, r)
            })
            .collect();
        let at_inf = self
            .expand_at(SeriesPoint::Infinity, 1)
            .residue()
            .expect("expansion reaches the residue exponent");
        (finite, at_inf)
    }
}
