use crate::algebra::{c64, ComplexScalar, MatrixSeries, RationalMatrix, SeriesPoint, SquareMatrix};
use crate::systems::{
    a_rational, b_rational, canonical_theta_pairs, hamiltonian, local_frames, max_frame_order, vector_field,
    ExtendedState, LocalFrame, SystemSpec, ThetaParams,
};

use super::{ReportContext, ResidualReport, VerifyError, HAMILTON_THRESHOLD, LAX_THRESHOLD, SERIES_THRESHOLD};

/// Finite-difference step used along the flow in the Lax check.
pub const LAX_FD_STEP: f64 = 1e-6;

/// Knobs of the Lax check; the defaults give the honest check.
#[derive(Clone, Debug)]
pub struct LaxProbe {
    pub fd_step: f64,
    /// Reverse the sign of `ṗ` in the finite-difference advance.
    pub flip_p_dot: bool,
    /// Exponents used when evaluating `B`; `None` means the same as for `A`.
    pub theta_for_b: Option<ThetaParams>,
}

impl Default for LaxProbe {
    fn default() -> Self {
        Self {
            fd_step: LAX_FD_STEP,
            flip_p_dot: false,
            theta_for_b: None,
        }
    }
}

/// `max ‖∂A/∂t − ∂B/∂z − [B, A]‖` over the given spectral points.
pub fn lax_residual(
    spec: &SystemSpec,
    theta: &ThetaParams,
    state: &ExtendedState,
    t: ComplexScalar,
    z_samples: &[ComplexScalar],
    probe: &LaxProbe,
) -> Result<f64, VerifyError> {
    let mut tangent = vector_field(spec, theta, state, t)?;
    if probe.flip_p_dot {
        tangent.p = -tangent.p;
    }
    let h = c64(probe.fd_step, 0.0);
    let a_plus = a_rational(spec, theta, &state.advanced(&tangent, h), t + h)?;
    let a_minus = a_rational(spec, theta, &state.advanced(&tangent, -h), t - h)?;
    let a_now = a_rational(spec, theta, state, t)?;
    let b = b_rational(spec, probe.theta_for_b.as_ref().unwrap_or(theta), state, t)?;
    let mut worst: f64 = 0.0;
    for &z in z_samples {
        let da = (a_plus.eval(z)? - a_minus.eval(z)?) * (0.5 / probe.fd_step);
        let bz = b.eval(z)?;
        let r = da - b.eval_dz(z)? - bz.commutator(&a_now.eval(z)?);
        worst = worst.max(r.max_norm());
    }
    Ok(worst)
}

pub fn check_lax_compatibility(
    spec: &SystemSpec,
    theta: &ThetaParams,
    state: &ExtendedState,
    t: ComplexScalar,
    z_samples: &[ComplexScalar],
) -> Result<ResidualReport, VerifyError> {
    let r = lax_residual(spec, theta, state, t, z_samples, &LaxProbe::default())?;
    Ok(ResidualReport::new(
        "lax_compatibility",
        r,
        LAX_THRESHOLD,
        ReportContext::painleve(spec.kind, theta, t),
    ))
}

/// Extra terms added to the Hamiltonian before differentiation.
#[derive(Clone, Debug, Default)]
pub struct HamiltonProbe {
    /// Coefficient of an extra `q` term.
    pub extra_q: ComplexScalar,
}

fn central_difference(
    f: impl Fn(ComplexScalar) -> Result<ComplexScalar, VerifyError>,
    at: ComplexScalar,
) -> Result<ComplexScalar, VerifyError> {
    let h = 1e-6 * at.norm().max(1.0);
    Ok((f(at + h)? - f(at - h)?) / (2.0 * h))
}

/// Largest mismatch between the vector field and the finite-difference
/// gradient of the (optionally corrupted) Hamiltonian over all canonical pairs.
pub fn hamilton_residual(
    spec: &SystemSpec,
    theta: &ThetaParams,
    state: &ExtendedState,
    t: ComplexScalar,
    probe: &HamiltonProbe,
) -> Result<f64, VerifyError> {
    let field = vector_field(spec, theta, state, t)?;
    let h = |th: &ThetaParams, s: &ExtendedState| -> Result<ComplexScalar, VerifyError> {
        Ok(hamiltonian(spec, th, s, t)? + probe.extra_q * s.q)
    };
    let dh_dp = central_difference(|x| h(theta, &ExtendedState { p: x, ..*state }), state.p)?;
    let dh_dq = central_difference(|x| h(theta, &ExtendedState { q: x, ..*state }), state.q)?;
    let mut worst = (field.q - dh_dp).norm().max((field.p + dh_dq).norm());
    let rates = field.to_slots(spec.kind);
    for &(slot, which) in canonical_theta_pairs(spec.kind) {
        let dh = central_difference(|x| h(&theta.with(which, x), state), theta.get(which))?;
        worst = worst.max((rates[slot] + dh).norm());
    }
    Ok(worst)
}

pub fn check_hamilton_equations(
    spec: &SystemSpec,
    theta: &ThetaParams,
    state: &ExtendedState,
    t: ComplexScalar,
) -> Result<ResidualReport, VerifyError> {
    let r = hamilton_residual(spec, theta, state, t, &HamiltonProbe::default())?;
    Ok(ResidualReport::new(
        "hamilton_equations",
        r,
        HAMILTON_THRESHOLD,
        ReportContext::painleve(spec.kind, theta, t),
    ))
}

/// Largest coefficient of `A·G − G′ − G·Θ′`, reduced by the gauge, over the
/// orders fixed by the available coefficients.
///
/// At an irregular point one further order is checked on the diagonal only,
/// since its off-diagonal part involves the next, unknown coefficient.
pub fn series_recursion_residual(a: &RationalMatrix, frame: &LocalFrame) -> Result<f64, VerifyError> {
    let point = frame.location;
    let dim = a.dim();
    let count = frame.series_coeffs.len() as i32;
    let gauge_inv = frame.gauge.inverse()?;
    let lead = -a.expand_at(point, 0).start().min(0);
    let depth = count + lead + 4;
    let reduced = a.expand_at(point, depth).left_mul(&gauge_inv).right_mul(&frame.gauge);
    let start_a = reduced.start();

    let mut coeffs = vec![SquareMatrix::identity(dim)];
    coeffs.extend(frame.series_coeffs.iter().cloned());
    let g = MatrixSeries::new(point, dim, 0, coeffs)?;
    let irregular = frame.exponent.poincare_rank() >= 1;
    let g = if irregular { g.extend_exact(count + 1) } else { g };
    let theta_prime = frame.exponent.derivative_series(point, depth);

    let r = reduced.mul(&g)?.sub(&g.differentiate())?.sub(&g.mul(&theta_prime)?)?;
    let full_top = count + start_a;
    let mut worst: f64 = 0.0;
    for k in r.start()..=full_top {
        worst = worst.max(r.coeff(k)?.max_norm());
    }
    if irregular {
        let extra = r.coeff(full_top + 1)?;
        let diag = extra.diagonal_entries().iter().map(|z| z.norm()).fold(0.0, f64::max);
        worst = worst.max(diag);
    }
    Ok(worst)
}

fn same_point(a: SeriesPoint, b: SeriesPoint) -> bool {
    match (a, b) {
        (SeriesPoint::Infinity, SeriesPoint::Infinity) => true,
        (SeriesPoint::Finite(x), SeriesPoint::Finite(y)) => (x - y).norm() <= 1e-12 * (1.0 + x.norm()),
        _ => false,
    }
}

pub fn check_series_recursion(
    spec: &SystemSpec,
    theta: &ThetaParams,
    state: &ExtendedState,
    t: ComplexScalar,
    location: SeriesPoint,
) -> Result<ResidualReport, VerifyError> {
    let frames = local_frames(spec, theta, state, t, max_frame_order(spec.kind))?;
    let frame = frames
        .iter()
        .find(|f| same_point(f.location, location))
        .ok_or(VerifyError::NoFrame)?;
    let a = a_rational(spec, theta, state, t)?;
    let r = series_recursion_residual(&a, frame)?;
    let where_ = match location {
        SeriesPoint::Infinity => "infinity".to_string(),
        SeriesPoint::Finite(z) => format!("{z}"),
    };
    Ok(ResidualReport::new(
        "series_recursion",
        r,
        SERIES_THRESHOLD,
        ReportContext::painleve(spec.kind, theta, t).with_note(format!("point {where_}")),
    ))
}

/// Tau density assembled from the formal solutions: `−Σ res Tr(G⁻¹ G′ ∂Θ/∂t)`.
pub fn frames_tau_density(frames: &[LocalFrame]) -> Result<ComplexScalar, VerifyError> {
    let mut total = c64(0.0, 0.0);
    for frame in frames {
        let count = frame.series_coeffs.len() as i32;
        let Some(dt) = frame.exponent_dt.polar_series(frame.location, count + 2) else {
            return Err(VerifyError::Invalid(
                "logarithmic time dependence of an exponent".into(),
            ));
        };
        if frame.exponent_dt.polar().is_empty() {
            continue;
        }
        let dim = frame.gauge.dim();
        let mut coeffs = vec![SquareMatrix::identity(dim)];
        coeffs.extend(frame.series_coeffs.iter().cloned());
        let g = MatrixSeries::new(frame.location, dim, 0, coeffs)?;
        let log_derivative = g.inverse(count)?.mul(&g.differentiate())?;
        total -= log_derivative.mul(&dt)?.residue()?.trace();
    }
    Ok(total)
}
