//! The six Painlevé isomonodromic systems behind one interface.
//!
//! Each equation supplies its Hamiltonian, the extended vector field on
//! `(q, p)` plus logarithmic gauge slots, the tau-density correction, the
//! boundary function `G`, the Lax matrices `A(z)`, `B(z)` and closed-form
//! coefficients of the formal solutions at its singular points.

mod p1;
mod p2;
mod p3;
mod p4;
mod p5;
mod p6;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    c64, segment_distance, AlgebraError, ComplexScalar, ExponentData, RationalMatrix, SeriesPoint, SquareMatrix,
};

pub use p6::{pvi_residue_params, PviResidueParams};

/// Denominators smaller than this in modulus are rejected.
pub const GUARD_RADIUS: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SystemError {
    #[error("{what} is within the guard radius (|value| = {modulus:e})")]
    Guard { what: &'static str, modulus: f64 },
    #[error("frame order {requested} exceeds the {available} closed-form coefficients")]
    OrderUnavailable { requested: usize, available: usize },
    #[error("residue parametrization constraint {name} violated (relative residual {residual:e})")]
    Constraint { name: &'static str, residual: f64 },
    #[error("state slice has {got} entries, expected {expected}")]
    Layout { expected: usize, got: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub(crate) fn nonzero(value: ComplexScalar, what: &'static str) -> Result<ComplexScalar, SystemError> {
    let modulus = value.norm();
    if modulus < GUARD_RADIUS || !modulus.is_finite() {
        Err(SystemError::Guard { what, modulus })
    } else {
        Ok(value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PainleveKind {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
}

impl PainleveKind {
    pub const ALL: [PainleveKind; 6] = [
        PainleveKind::P1,
        PainleveKind::P2,
        PainleveKind::P3,
        PainleveKind::P4,
        PainleveKind::P5,
        PainleveKind::P6,
    ];

    /// Number of logarithmic gauge slots carried next to `(q, p)`.
    pub fn log_slots(self) -> usize {
        match self {
            PainleveKind::P1 => 0,
            PainleveKind::P2 => 1,
            PainleveKind::P3 | PainleveKind::P4 => 2,
            PainleveKind::P5 => 3,
            PainleveKind::P6 => 4,
        }
    }

    pub fn state_len(self) -> usize {
        2 + self.log_slots()
    }
}

impl fmt::Display for PainleveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PainleveKind::P1 => "P1",
            PainleveKind::P2 => "P2",
            PainleveKind::P3 => "P3",
            PainleveKind::P4 => "P4",
            PainleveKind::P5 => "P5",
            PainleveKind::P6 => "P6",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown Painlevé kind `{0}`")]
pub struct UnknownKind(pub String);

impl FromStr for PainleveKind {
    type Err = UnknownKind;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "P1" | "PI" => Ok(PainleveKind::P1),
            "P2" | "PII" => Ok(PainleveKind::P2),
            "P3" | "PIII" => Ok(PainleveKind::P3),
            "P4" | "PIV" => Ok(PainleveKind::P4),
            "P5" | "PV" => Ok(PainleveKind::P5),
            "P6" | "PVI" => Ok(PainleveKind::P6),
            _ => Err(UnknownKind(s.to_string())),
        }
    }
}

/// Static description of one equation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SystemSpec {
    pub kind: PainleveKind,
    /// Ratio between the tau form and the classical action form.
    pub gamma: u32,
    pub state_layout: &'static [&'static str],
    pub param_names: &'static [&'static str],
    /// Values of `t` where the system is singular.
    pub singular_times: Vec<ComplexScalar>,
}

impl SystemSpec {
    pub fn new(kind: PainleveKind) -> Self {
        let (layout, params, singular): (&'static [&'static str], &'static [&'static str], Vec<_>) = match kind {
            PainleveKind::P1 => (&["q", "p"], &[], vec![]),
            PainleveKind::P2 => (&["q", "p", "log_k"], &["theta_inf"], vec![]),
            PainleveKind::P3 => (
                &["q", "p", "log_k", "log_a"],
                &["theta0", "theta_inf"],
                vec![c64(0.0, 0.0)],
            ),
            PainleveKind::P4 => (&["q", "p", "log_k", "log_a"], &["theta0", "theta_inf"], vec![]),
            PainleveKind::P5 => (
                &["q", "p", "log_k", "log_a", "log_b"],
                &["theta0", "theta1", "theta_inf"],
                vec![c64(0.0, 0.0)],
            ),
            PainleveKind::P6 => (
                &["q", "p", "log_k", "log_a", "log_b", "log_c"],
                &["theta0", "theta1", "theta_t", "theta_inf"],
                vec![c64(0.0, 0.0), c64(1.0, 0.0)],
            ),
        };
        Self {
            kind,
            gamma: if kind == PainleveKind::P1 { 2 } else { 1 },
            state_layout: layout,
            param_names: params,
            singular_times: singular,
        }
    }

    /// Distance from `t` to the nearest singular time.
    pub fn singular_distance(&self, t: ComplexScalar) -> f64 {
        self.singular_times
            .iter()
            .map(|s| (t - s).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance from the segment `a → b` to the nearest singular time.
    pub fn segment_singular_distance(&self, a: ComplexScalar, b: ComplexScalar) -> f64 {
        self.singular_times
            .iter()
            .map(|&s| segment_distance(a, b, s))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn check_time(&self, t: ComplexScalar, radius: f64) -> Result<(), SystemError> {
        let d = self.singular_distance(t);
        if d < radius.max(GUARD_RADIUS) || !t.re.is_finite() || !t.im.is_finite() {
            Err(SystemError::Guard {
                what: "t near a singular time",
                modulus: d,
            })
        } else {
            Ok(())
        }
    }
}

/// Formal monodromy exponents. Painlevé II uses only `theta_inf` (its single `θ`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ThetaParams {
    pub theta0: ComplexScalar,
    pub theta1: ComplexScalar,
    pub theta_t: ComplexScalar,
    pub theta_inf: ComplexScalar,
}

/// Which exponent is conjugate to which log-gauge slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaSlot {
    Zero,
    One,
    T,
    Inf,
}

impl ThetaParams {
    pub fn get(&self, slot: ThetaSlot) -> ComplexScalar {
        match slot {
            ThetaSlot::Zero => self.theta0,
            ThetaSlot::One => self.theta1,
            ThetaSlot::T => self.theta_t,
            ThetaSlot::Inf => self.theta_inf,
        }
    }

    pub fn with(&self, slot: ThetaSlot, value: ComplexScalar) -> Self {
        let mut out = *self;
        match slot {
            ThetaSlot::Zero => out.theta0 = value,
            ThetaSlot::One => out.theta1 = value,
            ThetaSlot::T => out.theta_t = value,
            ThetaSlot::Inf => out.theta_inf = value,
        }
        out
    }
}

/// Log-gauge slot index (into the slot vector) paired with its exponent.
pub fn canonical_theta_pairs(kind: PainleveKind) -> &'static [(usize, ThetaSlot)] {
    match kind {
        PainleveKind::P1 => &[],
        PainleveKind::P2 => &[(2, ThetaSlot::Inf)],
        PainleveKind::P3 | PainleveKind::P4 => &[(2, ThetaSlot::Inf), (3, ThetaSlot::Zero)],
        PainleveKind::P5 => &[(2, ThetaSlot::Inf), (3, ThetaSlot::Zero), (4, ThetaSlot::One)],
        PainleveKind::P6 => &[
            (2, ThetaSlot::Inf),
            (3, ThetaSlot::Zero),
            (4, ThetaSlot::One),
            (5, ThetaSlot::T),
        ],
    }
}

/// Phase point of an extended flow; unused log slots stay zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExtendedState {
    pub q: ComplexScalar,
    pub p: ComplexScalar,
    pub log_k: ComplexScalar,
    pub log_a: ComplexScalar,
    pub log_b: ComplexScalar,
    pub log_c: ComplexScalar,
}

impl ExtendedState {
    pub fn new(q: ComplexScalar, p: ComplexScalar) -> Self {
        Self {
            q,
            p,
            ..Default::default()
        }
    }

    pub fn to_slots(&self, kind: PainleveKind) -> Vec<ComplexScalar> {
        let all = [self.q, self.p, self.log_k, self.log_a, self.log_b, self.log_c];
        all[..kind.state_len()].to_vec()
    }

    pub fn from_slots(kind: PainleveKind, slots: &[ComplexScalar]) -> Result<Self, SystemError> {
        if slots.len() != kind.state_len() {
            return Err(SystemError::Layout {
                expected: kind.state_len(),
                got: slots.len(),
            });
        }
        let mut all = [ComplexScalar::default(); 6];
        all[..slots.len()].copy_from_slice(slots);
        Ok(Self {
            q: all[0],
            p: all[1],
            log_k: all[2],
            log_a: all[3],
            log_b: all[4],
            log_c: all[5],
        })
    }

    /// `self + h·tangent`, slotwise.
    pub fn advanced(&self, tangent: &ExtendedState, h: ComplexScalar) -> Self {
        Self {
            q: self.q + tangent.q * h,
            p: self.p + tangent.p * h,
            log_k: self.log_k + tangent.log_k * h,
            log_a: self.log_a + tangent.log_a * h,
            log_b: self.log_b + tangent.log_b * h,
            log_c: self.log_c + tangent.log_c * h,
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.q, self.p, self.log_k, self.log_a, self.log_b, self.log_c]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// The integrands at one phase point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityBreakdown {
    pub hamiltonian: ComplexScalar,
    /// Tau density minus the Hamiltonian.
    pub tau_correction: ComplexScalar,
    /// `d ln τ / dt`.
    pub tau_density: ComplexScalar,
    /// `p·q̇ − H`.
    pub action_density: ComplexScalar,
    pub g_value: ComplexScalar,
}

/// Formal solution data `gauge·(I + Σ g_k ζ^k)·exp(Θ)` at one singular point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalFrame {
    pub location: SeriesPoint,
    pub gauge: SquareMatrix,
    pub series_coeffs: Vec<SquareMatrix>,
    pub exponent: ExponentData,
    /// `∂Θ/∂t`, including the motion of the point itself when it depends on `t`.
    pub exponent_dt: ExponentData,
}

pub fn hamiltonian(
    spec: &SystemSpec,
    theta: &ThetaParams,
    state: &ExtendedState,
    t: ComplexScalar,
) -> Result<ComplexScalar, SystemError> {
    spec.check_time(t, GUARD_RADIUS)?;
    let h = match spec.kind {
        PainleveKind::P1 => p1::hamiltonian(state, t),
        PainleveKind::P2 => p2::hamiltonian(theta, state, t),
        PainleveKind::P3 => p3::hamiltonian(theta, state, t)?,
        PainleveKind::P4 => p4::hamiltonian(theta, state, t)?,
        PainleveKind::P5 => p5::hamiltonian(theta, state, t)?,
        PainleveKind::P6 => p6::hamiltonian(theta, state, t)?,
    };
    finite(h, "hamiltonian")
}

/// Time derivatives of every slot; the log slots hold `d(ln k)/dt` and so on.
pub fn vector_field(
    spec: &SystemSpec,
    theta: &ThetaParams,
    state: &ExtendedState,
    t: ComplexScalar,
) -> Result<ExtendedState, SystemError> {
    spec.check_time(t, GUARD_RADIUS)?;
    let v = match spec.kind {
        PainleveKind::P1 => p1::vector_field(state, t),
        PainleveKind::P2 => p2::vector_field(theta, state, t),
        PainleveKind::P3 => p3::vector_field(theta, state, t)?,
        PainleveKind::P4 => p4::vector_field(theta, state, t)?,
        PainleveKind::P5 => p5::vector_field(theta, state, t)?,
        PainleveKind::P6 => p6::vector_field(theta, state, t)?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(SystemError::NonFinite("vector field"))
    }
}

pub fn density_breakdown(
    spec: &SystemSpec,
    theta: &ThetaParams,
    state: &ExtendedState,
    t: ComplexScalar,
) -> Result<DensityBreakdown, SystemError> {
    let h = hamiltonian(spec, theta, state, t)?;
    let v = vector_field(spec, theta, state, t)?;
    let tau_correction = match spec.kind {
        PainleveKind::P1 => h,
        PainleveKind::P2 | PainleveKind::P5 => c64(0.0, 0.0),
        PainleveKind::P3 => p3::tau_correction(state, t),
        PainleveKind::P4 => p4::tau_correction(state),
        PainleveKind::P6 => p6::tau_correction(theta, state, t),
    };
    let g_value = boundary_value(spec.kind, theta, state, t, h);
    let out = DensityBreakdown {
        hamiltonian: h,
        tau_correction,
        tau_density: h + tau_correction,
        action_density: state.p * v.q - h,
        g_value,
    };
    for z in [out.tau_density, out.action_density, out.g_value] {
        finite(z, "density")?;
    }
    Ok(out)
}

fn boundary_value(
    kind: PainleveKind,
    th: &ThetaParams,
    s: &ExtendedState,
    t: ComplexScalar,
    h: ComplexScalar,
) -> ComplexScalar {
    let (q, p) = (s.q, s.p);
    match kind {
        PainleveKind::P1 => (h * t * 4.0 - p * q * 2.0) * 0.4,
        PainleveKind::P2 => h * t * (2.0 / 3.0) - q * p / 3.0 - th.theta_inf * s.log_k,
        PainleveKind::P3 => h * t - th.theta_inf * s.log_k - th.theta0 * s.log_a - t * t * 0.5,
        PainleveKind::P4 => {
            h * t * 0.5 - p * q * 0.5 - th.theta_inf * s.log_k - th.theta0 * s.log_a
                + th.theta0 * th.theta0 * 0.5
                + th.theta_inf * 0.5
                - th.theta_inf * th.theta_inf * 0.5
        }
        PainleveKind::P5 => {
            h * t - th.theta_inf * s.log_k - th.theta0 * s.log_a - th.theta1 * s.log_b + th.theta0 + th.theta1
        }
        PainleveKind::P6 => {
            th.theta_inf - th.theta0 * s.log_a - th.theta1 * s.log_b - th.theta_t * s.log_c - th.theta_inf * s.log_k
        }
    }
}

/// `A(z)` as a rational matrix in partial-fraction form.
pub fn a_rational(
    spec: &SystemSpec,
    theta: &ThetaParams,
    state: &ExtendedState,
    t: ComplexScalar,
) -> Result<RationalMatrix, SystemError> {
    spec.check_time(t, GUARD_RADIUS)?;
    match spec.kind {
        PainleveKind::P1 => Ok(p1::a_rational(state, t)),
        PainleveKind::P2 => Ok(p2::a_rational(theta, state, t)),
        PainleveKind::P3 => Ok(p3::a_rational(theta, state, t)),
        PainleveKind::P4 => p4::a_rational(theta, state, t),
        PainleveKind::P5 => Ok(p5::a_rational(theta, state, t)),
        PainleveKind::P6 => p6::a_rational(theta, state, t),
    }
}

/// `B(z)` as a rational matrix in partial-fraction form.
pub fn b_rational(
    spec: &SystemSpec,
    theta: &ThetaParams,
    state: &ExtendedState,
    t: ComplexScalar,
) -> Result<RationalMatrix, SystemError> {
    spec.check_time(t, GUARD_RADIUS)?;
    match spec.kind {
        PainleveKind::P1 => Ok(p1::b_rational(state)),
        PainleveKind::P2 => Ok(p2::b_rational(state)),
        PainleveKind::P3 => Ok(p3::b_rational(theta, state, t)),
        PainleveKind::P4 => p4::b_rational(theta, state, t),
        PainleveKind::P5 => Ok(p5::b_rational(theta, state, t)),
        PainleveKind::P6 => p6::b_rational(theta, state, t),
    }
}

fn eval_away_from_poles(r: &RationalMatrix, z: ComplexScalar) -> Result<SquareMatrix, SystemError> {
    for pole in r.poles() {
        nonzero(z - pole.at, "z near a pole")?;
    }
    Ok(r.eval(z)?)
}

pub fn a_matrix(
    spec: &SystemSpec,
    theta: &ThetaParams,
    state: &ExtendedState,
    t: ComplexScalar,
    z: ComplexScalar,
) -> Result<SquareMatrix, SystemError> {
    eval_away_from_poles(&a_rational(spec, theta, state, t)?, z)
}

pub fn b_matrix(
    spec: &SystemSpec,
    theta: &ThetaParams,
    state: &ExtendedState,
    t: ComplexScalar,
    z: ComplexScalar,
) -> Result<SquareMatrix, SystemError> {
    eval_away_from_poles(&b_rational(spec, theta, state, t)?, z)
}

/// Largest number of closed-form series coefficients available at any point.
pub fn max_frame_order(kind: PainleveKind) -> usize {
    match kind {
        PainleveKind::P1 => 5,
        PainleveKind::P2 => 3,
        PainleveKind::P3 => 1,
        PainleveKind::P4 => 2,
        PainleveKind::P5 | PainleveKind::P6 => 1,
    }
}

/// Local frames at every singular point carrying closed-form data, with at most
/// `order` series coefficients each.
pub fn local_frames(
    spec: &SystemSpec,
    theta: &ThetaParams,
    state: &ExtendedState,
    t: ComplexScalar,
    order: usize,
) -> Result<Vec<LocalFrame>, SystemError> {
    let available = max_frame_order(spec.kind);
    if order > available {
        return Err(SystemError::OrderUnavailable {
            requested: order,
            available,
        });
    }
    let h = hamiltonian(spec, theta, state, t)?;
    let mut frames = match spec.kind {
        PainleveKind::P1 => p1::frames(state, t, h),
        PainleveKind::P2 => p2::frames(theta, state, t, h),
        PainleveKind::P3 => p3::frames(theta, state, t, h)?,
        PainleveKind::P4 => p4::frames(theta, state, t, h)?,
        PainleveKind::P5 => p5::frames(theta, state, t, h)?,
        PainleveKind::P6 => p6::frames(theta, state, t, h)?,
    };
    for f in &mut frames {
        f.series_coeffs.truncate(order);
        f.gauge.ensure_finite()?;
    }
    Ok(frames)
}

/// Left side minus right side of the scalar second-order equation for `q(t)`.
pub fn painleve_residual(
    spec: &SystemSpec,
    theta: &ThetaParams,
    q: ComplexScalar,
    q_dot: ComplexScalar,
    q_ddot: ComplexScalar,
    t: ComplexScalar,
) -> Result<ComplexScalar, SystemError> {
    spec.check_time(t, GUARD_RADIUS)?;
    let r = match spec.kind {
        PainleveKind::P1 => q_ddot - (q * q * 6.0 + t),
        PainleveKind::P2 => {
            let alpha = 0.5 - theta.theta_inf;
            q_ddot - (t * q + q * q * q * 2.0 + alpha)
        }
        PainleveKind::P3 => p3::scalar_residual(theta, q, q_dot, q_ddot, t)?,
        PainleveKind::P4 => p4::scalar_residual(theta, q, q_dot, q_ddot, t)?,
        PainleveKind::P5 => p5::scalar_residual(theta, q, q_dot, q_ddot, t)?,
        PainleveKind::P6 => p6::scalar_residual(theta, q, q_dot, q_ddot, t)?,
    };
    finite(r, "scalar residual")
}

fn finite(z: ComplexScalar, what: &'static str) -> Result<ComplexScalar, SystemError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(SystemError::NonFinite(what))
    }
}

/// `x^(−σ3/2)` written through `ln x`.
pub(crate) fn half_power_gauge(log_x: ComplexScalar) -> SquareMatrix {
    let h = (log_x * -0.5).exp();
    SquareMatrix::diagonal(&[h, h.inv()])
}

pub(crate) fn s3(c: ComplexScalar) -> SquareMatrix {
    SquareMatrix::diagonal(&[c, -c])
}

pub(crate) fn m2(a: ComplexScalar, b: ComplexScalar, c: ComplexScalar, d: ComplexScalar) -> SquareMatrix {
    SquareMatrix::from_2x2(a, b, c, d)
}

pub(crate) fn zero() -> ComplexScalar {
    c64(0.0, 0.0)
}

pub(crate) fn one() -> ComplexScalar {
    c64(1.0, 0.0)
}

/// Frame at a Fuchsian point `at` with exponent `θσ3 ln ζ` and no series data.
pub(crate) fn fuchsian_frame(at: ComplexScalar, gauge: SquareMatrix, theta: ComplexScalar) -> LocalFrame {
    LocalFrame {
        location: SeriesPoint::Finite(at),
        gauge,
        series_coeffs: Vec::new(),
        exponent: ExponentData::logarithmic(s3(theta)),
        exponent_dt: ExponentData::logarithmic(s3(zero())),
    }
}
