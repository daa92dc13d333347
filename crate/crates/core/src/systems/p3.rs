use super::{half_power_gauge, m2, nonzero, s3, zero, ExtendedState, LocalFrame, SystemError, ThetaParams};
use crate::algebra::{c64, ComplexScalar, ExponentData, PolePart, RationalMatrix, SeriesPoint, SquareMatrix};

pub(super) fn hamiltonian(th: &ThetaParams, s: &ExtendedState, t: ComplexScalar) -> Result<ComplexScalar, SystemError> {
    let t = nonzero(t, "t")?;
    let (q, p, ti, t0) = (s.q, s.p, th.theta_inf, th.theta0);
    let num = p * p * q * q * 2.0 + p * (t * 2.0 - t * q * q * 2.0 + (ti * 4.0 - 1.0) * q) - t * q * (t0 + ti) * 2.0
        + ti * ti
        - t0 * t0;
    Ok(num / t)
}

pub(super) fn vector_field(
    th: &ThetaParams,
    s: &ExtendedState,
    t: ComplexScalar,
) -> Result<ExtendedState, SystemError> {
    let t = nonzero(t, "t")?;
    let (q, p, ti, t0) = (s.q, s.p, th.theta_inf, th.theta0);
    Ok(ExtendedState {
        q: p * q * q * 4.0 / t - q * q * 2.0 + q * (ti * 4.0 - 1.0) / t + 2.0,
        p: -p * p * q * 4.0 / t + p * (t * q * 4.0 - ti * 4.0 + 1.0) / t + t0 * 2.0 + ti * 2.0,
        log_k: -p * q * 4.0 / t + q * 2.0 - ti * 2.0 / t,
        log_a: q * 2.0 + t0 * 2.0 / t,
        ..Default::default()
    })
}

pub(super) fn tau_correction(s: &ExtendedState, t: ComplexScalar) -> ComplexScalar {
    s.p * s.q / t - t
}

fn lower_left(th: &ThetaParams, s: &ExtendedState, t: ComplexScalar, k: ComplexScalar) -> ComplexScalar {
    let (q, p, ti, t0) = (s.q, s.p, th.theta_inf, th.theta0);
    p * q * (t - p) / (k * t) + (t0 + ti) / k - ti * p * 2.0 / (k * t)
}

pub(super) fn a_rational(th: &ThetaParams, s: &ExtendedState, t: ComplexScalar) -> RationalMatrix {
    let (q, p, ti) = (s.q, s.p, th.theta_inf);
    let k = s.log_k.exp();
    let am1 = m2(-ti, -q * k * t, lower_left(th, s, t, k), ti);
    let am2 = m2(p - t * 0.5, -k * t, p * (p - t) / (k * t), -p + t * 0.5);
    RationalMatrix::new(
        2,
        vec![s3(t * 0.5)],
        vec![PolePart {
            at: zero(),
            coeffs: vec![am1, am2],
        }],
    )
    .expect("2x2 blocks")
}

pub(super) fn b_rational(th: &ThetaParams, s: &ExtendedState, t: ComplexScalar) -> RationalMatrix {
    let (q, p) = (s.q, s.p);
    let k = s.log_k.exp();
    let b0 = m2(zero(), -q * k, lower_left(th, s, t, k) / t, zero());
    let bm1 = m2(
        (t - p * 2.0) / (t * 2.0),
        k,
        p * (t - p) / (k * t * t),
        (p * 2.0 - t) / (t * 2.0),
    );
    RationalMatrix::new(
        2,
        vec![b0, s3(c64(0.5, 0.0))],
        vec![PolePart {
            at: zero(),
            coeffs: vec![bm1],
        }],
    )
    .expect("2x2 blocks")
}

/// Irregular frames at infinity and at zero, one coefficient each.
pub(super) fn frames(
    th: &ThetaParams,
    s: &ExtendedState,
    t: ComplexScalar,
    h: ComplexScalar,
) -> Result<Vec<LocalFrame>, SystemError> {
    let t = nonzero(t, "t")?;
    let (q, p, ti, t0) = (s.q, s.p, th.theta_inf, th.theta0);
    let k = s.log_k.exp();
    let a = s.log_a.exp();
    let shift = (ti * ti - t0 * t0) / (t * 2.0);

    let d_inf = -h * 0.5 - p * q / (t * 2.0) + shift + t * 0.5;
    let g_inf = m2(d_inf, k * q, lower_left(th, s, t, k) / t, -d_inf);

    let d0 = -h * 0.5 - p * q / (t * 2.0) - shift + t * 0.5;
    let g0 = m2(
        d0,
        a * q * (p - t) / t + a * (ti - t0) / t,
        -(p * q + t0 + ti) / (t * a),
        -d0,
    );
    let gauge0 = m2(k, -k, p / t, (t - p) / t) * (s.log_k * -0.5).exp() * half_power_gauge(s.log_a);

    let half_s3 = s3(c64(0.5, 0.0));
    Ok(vec![
        LocalFrame {
            location: SeriesPoint::Infinity,
            gauge: SquareMatrix::identity(2),
            series_coeffs: vec![g_inf],
            exponent: ExponentData::new(vec![(-1, s3(t * 0.5))], s3(ti))?,
            exponent_dt: ExponentData::new(vec![(-1, half_s3.clone())], s3(zero()))?,
        },
        LocalFrame {
            location: SeriesPoint::Finite(zero()),
            gauge: gauge0,
            series_coeffs: vec![g0],
            exponent: ExponentData::new(vec![(-1, s3(t * 0.5))], s3(t0))?,
            exponent_dt: ExponentData::new(vec![(-1, half_s3)], s3(zero()))?,
        },
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
    let t = nonzero(t, "t")?;
    let alpha = th.theta0 * 8.0;
    let beta = 4.0 - th.theta_inf * 8.0;
    let rhs = q1 * q1 / q - q1 / t + (alpha * q * q + beta) / t + q * q * q * 4.0 - 4.0 / q;
    Ok(q2 - rhs)
}
