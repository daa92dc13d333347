//! The N×N Schlesinger system in matrix Darboux coordinates.
//!
//! Residues are factored as `A_ν = Q_ν P_ν` with `Q_ν = G_ν Θ_ν`, `P_ν = G_ν⁻¹`.
//! The flow in the direction of the pole `a_ν` is Hamiltonian with
//! `H_ν = Σ_{μ≠ν} Tr(A_μ A_ν)/(a_ν − a_μ)`; the derivative with respect to the
//! entry `(j, k)` of `P_μ` gives the rate of the entry `(k, j)` of `Q_μ`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{segment_distance, AlgebraError, ComplexScalar, SquareMatrix};

/// Minimum separation between poles.
pub const POLE_GUARD: f64 = 1e-8;
/// Largest admissible condition number of a gauge matrix.
pub const GAUGE_CONDITION_LIMIT: f64 = 1e8;
/// Tolerance for spectra and the residue at infinity.
pub const SPECTRUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchlesingerError {
    #[error("poles {i} and {j} are closer than the guard radius ({distance:e})")]
    CoincidentPoles { i: usize, j: usize, distance: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("exponents of pole {0} are not distinct and non-resonant")]
    Resonant(usize),
    #[error("gauge matrix {index} is ill-conditioned (condition {condition:e})")]
    IllConditioned { index: usize, condition: f64 },
    #[error("residue {index} has spectrum off its exponents by {deviation:e}")]
    Spectrum { index: usize, deviation: f64 },
    #[error("residue at infinity deviates from its exponents by {0:e}")]
    ResidueAtInfinity(f64),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchlesingerModel {
    pub mat_dim: usize,
    pub pole_count: usize,
    /// Diagonal of `Θ_ν` for each finite pole.
    pub thetas: Vec<Vec<ComplexScalar>>,
    /// Diagonal of `Θ_∞`.
    pub theta_inf: Vec<ComplexScalar>,
}

impl SchlesingerModel {
    pub fn new(thetas: Vec<Vec<ComplexScalar>>, theta_inf: Vec<ComplexScalar>) -> Result<Self, SchlesingerError> {
        let model = Self {
            mat_dim: theta_inf.len(),
            pole_count: thetas.len(),
            thetas,
            theta_inf,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), SchlesingerError> {
        if self.mat_dim < 2 || self.pole_count < 2 {
            return Err(SchlesingerError::Shape(format!(
                "need N ≥ 2 and n ≥ 2, got N = {}, n = {}",
                self.mat_dim, self.pole_count
            )));
        }
        if self.thetas.len() != self.pole_count || self.theta_inf.len() != self.mat_dim {
            return Err(SchlesingerError::Shape("exponent list sizes".into()));
        }
        for (nu, th) in self.thetas.iter().enumerate() {
            if th.len() != self.mat_dim {
                return Err(SchlesingerError::Shape(format!("exponents of pole {nu}")));
            }
            for a in 0..th.len() {
                for b in a + 1..th.len() {
                    let d = th[a] - th[b];
                    let resonant = (d.re - d.re.round()).abs() < 1e-8 && d.im.abs() < 1e-8;
                    if resonant {
                        return Err(SchlesingerError::Resonant(nu));
                    }
                }
            }
        }
        Ok(())
    }

    /// `|Σ_ν Tr Θ_ν + Tr Θ_∞|`.
    pub fn trace_defect(&self) -> f64 {
        let total: ComplexScalar = self.thetas.iter().flatten().chain(self.theta_inf.iter()).sum();
        total.norm()
    }

    pub fn theta_matrix(&self, nu: usize) -> SquareMatrix {
        SquareMatrix::diagonal(&self.thetas[nu])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchlesingerState {
    pub poles: Vec<ComplexScalar>,
    pub q_mats: Vec<SquareMatrix>,
    pub p_mats: Vec<SquareMatrix>,
}

/// Rates of `(Q_μ, P_μ)` along one pole direction.
#[derive(Clone, Debug, PartialEq)]
pub struct SchlesingerTangent {
    pub dq: Vec<SquareMatrix>,
    pub dp: Vec<SquareMatrix>,
}

/// Closest pairing of two spectra: the largest distance after greedy matching.
pub fn spectrum_distance(a: &[ComplexScalar], b: &[ComplexScalar]) -> f64 {
    let mut pool: Vec<ComplexScalar> = b.to_vec();
    let mut worst: f64 = 0.0;
    for x in a {
        let Some((idx, d)) = pool
            .iter()
            .enumerate()
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|l, r| l.1.total_cmp(&r.1))
        else {
            return f64::INFINITY;
        };
        worst = worst.max(d);
        pool.swap_remove(idx);
    }
    worst
}

impl SchlesingerState {
    /// `Q_ν = G_ν Θ_ν`, `P_ν = G_ν⁻¹`.
    pub fn from_gauges(
        model: &SchlesingerModel,
        poles: Vec<ComplexScalar>,
        gauges: &[SquareMatrix],
    ) -> Result<Self, SchlesingerError> {
        model.validate()?;
        if poles.len() != model.pole_count || gauges.len() != model.pole_count {
            return Err(SchlesingerError::Shape("one pole and one gauge per residue".into()));
        }
        let mut q_mats = Vec::with_capacity(gauges.len());
        let mut p_mats = Vec::with_capacity(gauges.len());
        for (nu, g) in gauges.iter().enumerate() {
            if g.dim() != model.mat_dim {
                return Err(SchlesingerError::Shape(format!("gauge {nu} dimension")));
            }
            let condition = g.condition();
            if !(condition <= GAUGE_CONDITION_LIMIT) {
                return Err(SchlesingerError::IllConditioned { index: nu, condition });
            }
            q_mats.push(g * &model.theta_matrix(nu));
            p_mats.push(g.inverse()?);
        }
        let state = Self { poles, q_mats, p_mats };
        state.check_poles()?;
        Ok(state)
    }

    pub fn pole_count(&self) -> usize {
        self.poles.len()
    }

    pub fn check_poles(&self) -> Result<(), SchlesingerError> {
        min_separation(&self.poles, POLE_GUARD)
    }

    pub fn residues(&self) -> Vec<SquareMatrix> {
        self.q_mats.iter().zip(&self.p_mats).map(|(q, p)| q * p).collect()
    }

    pub fn residue_sum(&self) -> SquareMatrix {
        let res = self.residues();
        let mut total = SquareMatrix::zeros(res[0].dim());
        for a in &res {
            total += a;
        }
        total
    }

    /// Spectra match the model, and `−Σ A_ν = Θ_∞`.
    pub fn validate(&self, model: &SchlesingerModel) -> Result<(), SchlesingerError> {
        self.check_poles()?;
        for (nu, a) in self.residues().iter().enumerate() {
            let deviation = spectrum_distance(&a.eigenvalues(), &model.thetas[nu]);
            if !(deviation <= SPECTRUM_TOLERANCE) {
                return Err(SchlesingerError::Spectrum { index: nu, deviation });
            }
        }
        let at_inf = -self.residue_sum();
        let deviation = (&at_inf - &SquareMatrix::diagonal(&model.theta_inf)).max_norm();
        if !(deviation <= SPECTRUM_TOLERANCE) {
            return Err(SchlesingerError::ResidueAtInfinity(deviation));
        }
        Ok(())
    }
}

/// Fails when two poles are within `radius` of each other.
pub fn min_separation(poles: &[ComplexScalar], radius: f64) -> Result<(), SchlesingerError> {
    for i in 0..poles.len() {
        for j in i + 1..poles.len() {
            let distance = (poles[i] - poles[j]).norm();
            if !(distance > radius) {
                return Err(SchlesingerError::CoincidentPoles { i, j, distance });
            }
        }
    }
    Ok(())
}

/// Fails when two poles come within `radius` of each other anywhere on the
/// straight segment from `from` to `to`.
pub fn segment_separation(from: &[ComplexScalar], to: &[ComplexScalar], radius: f64) -> Result<(), SchlesingerError> {
    if from.len() != to.len() {
        return Err(SchlesingerError::Shape("waypoint lengths differ".into()));
    }
    let zero = ComplexScalar::new(0.0, 0.0);
    for i in 0..from.len() {
        for j in i + 1..from.len() {
            // Pairwise differences move linearly along the segment.
            let distance = segment_distance(from[i] - from[j], to[i] - to[j], zero);
            if !(distance > radius) {
                return Err(SchlesingerError::CoincidentPoles { i, j, distance });
            }
        }
    }
    Ok(())
}

pub fn schlesinger_hamiltonians(
    _model: &SchlesingerModel,
    state: &SchlesingerState,
) -> Result<Vec<ComplexScalar>, SchlesingerError> {
    state.check_poles()?;
    let res = state.residues();
    let n = res.len();
    Ok((0..n)
        .map(|nu| {
            (0..n)
                .filter(|&mu| mu != nu)
                .map(|mu| (&res[mu] * &res[nu]).trace() / (state.poles[nu] - state.poles[mu]))
                .sum()
        })
        .collect())
}

/// Hamiltonian rates of `(Q, P)` along the pole `a_ν`.
pub fn schlesinger_vector_field(
    _model: &SchlesingerModel,
    state: &SchlesingerState,
    direction: usize,
) -> Result<SchlesingerTangent, SchlesingerError> {
    state.check_poles()?;
    let n = state.pole_count();
    if direction >= n {
        return Err(SchlesingerError::Shape(format!("direction {direction} out of range")));
    }
    let res = state.residues();
    let nu = direction;
    let dim = res[0].dim();
    let mut dq = Vec::with_capacity(n);
    let mut dp = Vec::with_capacity(n);
    for mu in 0..n {
        if mu == nu {
            let mut left = SquareMatrix::zeros(dim);
            for (lam, a) in res.iter().enumerate().filter(|(lam, _)| *lam != nu) {
                left += &a.scale((state.poles[nu] - state.poles[lam]).inv());
            }
            dq.push(&left * &state.q_mats[nu]);
            dp.push(-(&state.p_mats[nu] * &left));
        } else {
            let w = (state.poles[nu] - state.poles[mu]).inv();
            dq.push((&res[nu] * &state.q_mats[mu]).scale(w));
            dp.push(-(&state.p_mats[mu] * &res[nu]).scale(w));
        }
    }
    Ok(SchlesingerTangent { dq, dp })
}

/// `dA_μ/da_ν` from the commutator form of the equations.
pub fn residue_rates(state: &SchlesingerState, direction: usize) -> Result<Vec<SquareMatrix>, SchlesingerError> {
    state.check_poles()?;
    let res = state.residues();
    let nu = direction;
    let n = res.len();
    let mut out: Vec<SquareMatrix> = (0..n)
        .map(|mu| {
            if mu == nu {
                SquareMatrix::zeros(res[0].dim())
            } else {
                res[mu]
                    .commutator(&res[nu])
                    .scale((state.poles[mu] - state.poles[nu]).inv())
            }
        })
        .collect();
    let mut diag = SquareMatrix::zeros(res[0].dim());
    for (mu, rate) in out.iter().enumerate() {
        if mu != nu {
            diag -= rate;
        }
    }
    out[nu] = diag;
    Ok(out)
}

/// `dA_μ = dQ_μ P_μ + Q_μ dP_μ`.
pub fn residue_rates_from_tangent(state: &SchlesingerState, tangent: &SchlesingerTangent) -> Vec<SquareMatrix> {
    (0..state.pole_count())
        .map(|mu| &tangent.dq[mu] * &state.p_mats[mu] + &state.q_mats[mu] * &tangent.dp[mu])
        .collect()
}

/// Per-direction densities of `ln τ` and of the classical action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchlesingerDensities {
    /// `H_ν`.
    pub tau: Vec<ComplexScalar>,
    /// `Σ_μ Tr(P_μ ∂Q_μ/∂a_ν) − H_ν`.
    pub action: Vec<ComplexScalar>,
}

pub fn schlesinger_tau_density(
    model: &SchlesingerModel,
    state: &SchlesingerState,
) -> Result<SchlesingerDensities, SchlesingerError> {
    let tau = schlesinger_hamiltonians(model, state)?;
    let mut action = Vec::with_capacity(tau.len());
    for (nu, h) in tau.iter().enumerate() {
        let field = schlesinger_vector_field(model, state, nu)?;
        let kinetic: ComplexScalar = state.p_mats.iter().zip(&field.dq).map(|(p, dq)| (p * dq).trace()).sum();
        action.push(kinetic - h);
    }
    Ok(SchlesingerDensities { tau, action })
}

/// Number of complex entries in the packed `(Q, P)` vector.
pub fn packed_len(model: &SchlesingerModel) -> usize {
    2 * model.pole_count * model.mat_dim * model.mat_dim
}

pub fn pack(state: &SchlesingerState) -> Vec<ComplexScalar> {
    state
        .q_mats
        .iter()
        .chain(&state.p_mats)
        .flat_map(|m| m.entries().iter().copied())
        .collect()
}

pub fn unpack(
    model: &SchlesingerModel,
    y: &[ComplexScalar],
    poles: &[ComplexScalar],
) -> Result<SchlesingerState, SchlesingerError> {
    let d = model.mat_dim;
    let n = model.pole_count;
    if y.len() < packed_len(model) || poles.len() != n {
        return Err(SchlesingerError::Shape("packed state length".into()));
    }
    let mats: Vec<SquareMatrix> = y[..packed_len(model)]
        .chunks(d * d)
        .map(|c| SquareMatrix::from_rows(c.chunks(d).map(|r| r.to_vec()).collect()).expect("square chunk"))
        .collect();
    let (q, p) = mats.split_at(n);
    Ok(SchlesingerState {
        poles: poles.to_vec(),
        q_mats: q.to_vec(),
        p_mats: p.to_vec(),
    })
}

/// Random admissible state for given exponents at the poles `0..n−1`, with
/// the last residue fixed by the residue at infinity.
///
/// `sample` draws complex numbers; the returned model carries the exponents
/// of the last residue as computed from its spectrum.
pub fn random_admissible_state(
    mat_dim: usize,
    poles: Vec<ComplexScalar>,
    mut sample: impl FnMut() -> ComplexScalar,
    attempts: usize,
) -> Option<(SchlesingerModel, SchlesingerState)> {
    let n = poles.len();
    if n < 2 || mat_dim < 2 {
        return None;
    }
    for _ in 0..attempts {
        let mut traceless = |scale: f64| -> Vec<ComplexScalar> {
            let mut v: Vec<ComplexScalar> = (0..mat_dim).map(|_| sample() * scale).collect();
            let mean = v.iter().sum::<ComplexScalar>() / mat_dim as f64;
            v.iter_mut().for_each(|x| *x -= mean);
            v
        };
        let mut thetas: Vec<Vec<ComplexScalar>> = (0..n - 1).map(|_| traceless(0.5)).collect();
        let theta_inf = traceless(0.5);
        let mut gauges: Vec<SquareMatrix> = (0..n - 1)
            .map(|_| {
                let mut g = SquareMatrix::identity(mat_dim);
                for i in 0..mat_dim {
                    for j in 0..mat_dim {
                        g[(i, j)] += sample() * 0.5;
                    }
                }
                g
            })
            .collect();
        if gauges.iter().any(|g| g.condition() > 1e3) {
            continue;
        }
        let mut last = -SquareMatrix::diagonal(&theta_inf);
        for (g, th) in gauges.iter().zip(&thetas) {
            let a = g * &SquareMatrix::diagonal(th) * g.inverse().ok()?;
            last -= &a;
        }
        let spectrum = last.eigenvalues();
        let spread = (0..mat_dim)
            .flat_map(|i| (i + 1..mat_dim).map(move |j| (i, j)))
            .map(|(i, j)| (spectrum[i] - spectrum[j]).norm())
            .fold(f64::INFINITY, f64::min);
        if spread < 0.1 {
            continue;
        }
        let columns: Vec<Vec<ComplexScalar>> = spectrum.iter().map(|&l| last.kernel_vector(l)).collect();
        let rows: Vec<Vec<ComplexScalar>> = (0..mat_dim).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
        let Ok(g_last) = SquareMatrix::from_rows(rows) else {
            continue;
        };
        if g_last.condition() > 1e3 {
            continue;
        }
        thetas.push(spectrum);
        gauges.push(g_last);
        let Ok(model) = SchlesingerModel::new(thetas, theta_inf) else {
            continue;
        };
        let Ok(state) = SchlesingerState::from_gauges(&model, poles.clone(), &gauges) else {
            continue;
        };
        if state.validate(&model).is_ok() {
            return Some((model, state));
        }
    }
    None
}

/// Straight segments between pole-position vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiTimePath {
    pub waypoints: Vec<Vec<ComplexScalar>>,
}

impl MultiTimePath {
    pub fn new(waypoints: Vec<Vec<ComplexScalar>>) -> Self {
        Self { waypoints }
    }

    /// Closed rectangle moving poles `i` and `j`: `a_i += side`, then `a_j += side`, then back.
    pub fn rectangle(base: &[ComplexScalar], i: usize, j: usize, side: f64) -> Self {
        let mut corners = vec![base.to_vec(); 5];
        corners[1][i] += side;
        corners[2][i] += side;
        corners[2][j] += side;
        corners[3][j] += side;
        Self { waypoints: corners }
    }

    pub fn is_closed(&self) -> bool {
        match (self.waypoints.first(), self.waypoints.last()) {
            (Some(a), Some(b)) if self.waypoints.len() > 1 => {
                a.iter().zip(b).all(|(x, y)| (x - y).norm() <= 1e-14 * (1.0 + x.norm()))
            }
            _ => false,
        }
    }

    /// Pole collisions anywhere along the path.
    pub fn check(&self, radius: f64) -> Result<(), SchlesingerError> {
        for pair in self.waypoints.windows(2) {
            segment_separation(&pair[0], &pair[1], radius)?;
        }
        Ok(())
    }
}
