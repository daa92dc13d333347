use super::{
    fuchsian_frame, half_power_gauge, m2, nonzero, one, s3, zero, ExtendedState, LocalFrame, SystemError, ThetaParams,
};
use crate::algebra::c64;
use crate::algebra::{ComplexScalar, ExponentData, PolePart, RationalMatrix, SeriesPoint, SquareMatrix};

pub(super) fn hamiltonian(th: &ThetaParams, s: &ExtendedState, t: ComplexScalar) -> Result<ComplexScalar, SystemError> {
    let q = nonzero(s.q, "q")?;
    let (p, ti, t0) = (s.p, th.theta_inf, th.theta0);
    Ok(
        p * p * q * 2.0 - q * q * q / 8.0 - t * q * q * 0.5 + (ti * 2.0 - 1.0 - t * t) * q * 0.5 + ti * t * 2.0
            - t0 * t0 * 2.0 / q,
    )
}

pub(super) fn vector_field(
    th: &ThetaParams,
    s: &ExtendedState,
    t: ComplexScalar,
) -> Result<ExtendedState, SystemError> {
    let q = nonzero(s.q, "q")?;
    let (p, ti, t0) = (s.p, th.theta_inf, th.theta0);
    Ok(ExtendedState {
        q: p * q * 4.0,
        p: -p * p * 2.0 + q * q * 0.375 + q * t + t * t * 0.5 - ti + 0.5 - t0 * t0 * 2.0 / (q * q),
        log_k: -(q + t * 2.0),
        log_a: t0 * 4.0 / q,
        ..Default::default()
    })
}

pub(super) fn tau_correction(s: &ExtendedState) -> ComplexScalar {
    s.q * 0.5
}

fn w(s: &ExtendedState, t: ComplexScalar) -> ComplexScalar {
    s.q * (s.p * 4.0 - s.q - t * 2.0)
}

fn off_diagonal(th: &ThetaParams, s: &ExtendedState, t: ComplexScalar) -> SquareMatrix {
    let k = s.log_k.exp();
    m2(zero(), k, -(w(s, t) + th.theta_inf * 4.0) / (k * 2.0), zero())
}

pub(super) fn a_rational(th: &ThetaParams, s: &ExtendedState, t: ComplexScalar) -> Result<RationalMatrix, SystemError> {
    let q = nonzero(s.q, "q")?;
    let k = s.log_k.exp();
    let w = w(s, t);
    let a0 = off_diagonal(th, s, t) + s3(t);
    let am1 = m2(
        w * 0.5,
        -k * q,
        (w * w - th.theta0 * th.theta0 * 16.0) / (k * q * 4.0),
        -w * 0.5,
    ) * 0.5;
    Ok(RationalMatrix::new(
        2,
        vec![a0, s3(one())],
        vec![PolePart {
            at: zero(),
            coeffs: vec![am1],
        }],
    )?)
}

pub(super) fn b_rational(th: &ThetaParams, s: &ExtendedState, t: ComplexScalar) -> Result<RationalMatrix, SystemError> {
    Ok(RationalMatrix::new(2, vec![off_diagonal(th, s, t), s3(one())], vec![])?)
}

pub(super) fn frames(
    th: &ThetaParams,
    s: &ExtendedState,
    t: ComplexScalar,
    h: ComplexScalar,
) -> Result<Vec<LocalFrame>, SystemError> {
    let q = nonzero(s.q, "q")?;
    let t0 = nonzero(th.theta0, "theta0")?;
    let ti = th.theta_inf;
    let k = s.log_k.exp();
    let w = w(s, t);

    let d1 = -(h * 2.0 + q) * 0.5;
    let g1 = m2(d1, -k, -(w + ti * 4.0) / (k * 2.0), -d1) * 0.5;
    let sq = (h * 2.0 + q + t * 2.0).powu(2) - t * t * 4.0;
    let shift = ti * ti * 8.0 - t0 * t0 * 8.0;
    let g2 = m2(
        (sq + shift) * 0.25,
        -k * (h * 2.0 - q - t * 4.0),
        ((h * 2.0 - q) * (w + ti * 4.0 + 4.0) + q * 8.0) / (k * 2.0),
        (sq - shift) * 0.25,
    ) * 0.125;

    let norm = nonzero(k * q * t0, "k q theta0")?.sqrt() * 2.0;
    let gauge0 =
        m2(-k * q, -k * q, -(w - t0 * 4.0) * 0.5, -(w + t0 * 4.0) * 0.5) * norm.inv() * half_power_gauge(s.log_a);

    Ok(vec![
        LocalFrame {
            location: SeriesPoint::Infinity,
            gauge: SquareMatrix::identity(2),
            series_coeffs: vec![g1, g2],
            exponent: ExponentData::new(vec![(-2, s3(c64(0.5, 0.0))), (-1, s3(t))], s3(ti))?,
            exponent_dt: ExponentData::new(vec![(-1, s3(one()))], s3(zero()))?,
        },
        fuchsian_frame(zero(), gauge0, t0),
    ])
}

pub(super) fn scalar_residual(
    th: &ThetaParams,
    q: ComplexScalar,
    q1: ComplexScalar,
    q2: ComplexScalar,
    t: ComplexScalar,
) -> Result<ComplexScalar, SystemError> {
    let q = nonzero(q, "q")?;
    let alpha = th.theta_inf * 2.0 - 1.0;
    let beta = th.theta0 * th.theta0 * -8.0;
    let rhs = q1 * q1 / (q * 2.0) + q * q * q * 1.5 + t * q * q * 4.0 + (t * t - alpha) * q * 2.0 + beta / q;
    Ok(q2 - rhs)
}
