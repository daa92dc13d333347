use super::{
    fuchsian_frame, half_power_gauge, m2, nonzero, one, s3, zero, ExtendedState, LocalFrame, SystemError, ThetaParams,
};
use crate::algebra::{c64, ComplexScalar, ExponentData, PolePart, RationalMatrix, SeriesPoint, SquareMatrix};

pub(super) fn hamiltonian(th: &ThetaParams, s: &ExtendedState, t: ComplexScalar) -> Result<ComplexScalar, SystemError> {
    let t = nonzero(t, "t")?;
    let (q, p) = (s.q, s.p);
    let (t0, t1, ti) = (th.theta0, th.theta1, th.theta_inf);
    let qm = q - 1.0;
    Ok(p * p * qm * qm * q / t
        + p * (q * q / t * (t0 + t1 * 3.0 + ti) + q / t * (t - ti * 2.0 - t1 * 4.0) + (ti + t1 - t0) / t)
        + q * t1 * 2.0 / t * (ti + t1 + t0)
        + (t0 * t0 - t1 * t1 - ti * ti + t1 * t - t1 * ti * 2.0) / t)
}

pub(super) fn vector_field(
    th: &ThetaParams,
    s: &ExtendedState,
    t: ComplexScalar,
) -> Result<ExtendedState, SystemError> {
    let t = nonzero(t, "t")?;
    let (q, p) = (s.q, s.p);
    let (t0, t1, ti) = (th.theta0, th.theta1, th.theta_inf);
    let qm = q - 1.0;
    let quad = t0 + t1 * 3.0 + ti;
    let lin = t - ti * 2.0 - t1 * 4.0;
    Ok(ExtendedState {
        q: p * q * qm * qm * 2.0 / t + q * q / t * quad + q / t * lin + (ti + t1 - t0) / t,
        p: -p * p / t * (q * q * 3.0 - q * 4.0 + 1.0)
            - p * (q * 2.0 / t * quad + lin / t)
            - t1 * 2.0 / t * (ti + t1 + t0),
        log_k: -(p * q * q - p * q * 2.0 + p + t1 * q * 2.0 - ti * 2.0 - t1 * 2.0) / t,
        log_a: (p - p * q * q - t1 * q * 2.0 - t0 * 2.0) / t,
        log_b: -(p * q * q * 3.0 + p - p * q * 4.0 + ti * q * 2.0 + t1 * q * 4.0 + t0 * q * 2.0 - ti * 2.0 - t1 * 2.0
            + t)
            / t,
        ..Default::default()
    })
}

fn residues(th: &ThetaParams, s: &ExtendedState) -> (SquareMatrix, SquareMatrix) {
    let (q, p) = (s.q, s.p);
    let (t0, t1, ti) = (th.theta0, th.theta1, th.theta_inf);
    let k = s.log_k.exp();
    let pq = p * q;
    let a0 = m2(
        -pq - ti - t1,
        k * (pq + ti + t1 - t0),
        -(pq + ti + t1 + t0) / k,
        pq + ti + t1,
    );
    let a1 = m2(pq + t1, -k * q * (pq + t1 * 2.0), p / k, -pq - t1);
    (a0, a1)
}

pub(super) fn a_rational(th: &ThetaParams, s: &ExtendedState, t: ComplexScalar) -> RationalMatrix {
    let (a0, a1) = residues(th, s);
    RationalMatrix::new(
        2,
        vec![s3(t * 0.5)],
        vec![
            PolePart {
                at: zero(),
                coeffs: vec![a0],
            },
            PolePart {
                at: one(),
                coeffs: vec![a1],
            },
        ],
    )
    .expect("2x2 blocks")
}

fn off_diagonal(th: &ThetaParams, s: &ExtendedState, t: ComplexScalar) -> SquareMatrix {
    let (q, p) = (s.q, s.p);
    let (t0, t1, ti) = (th.theta0, th.theta1, th.theta_inf);
    let k = s.log_k.exp();
    m2(
        zero(),
        k / t * (-p * q * q + p * q - t1 * q * 2.0 + ti + t1 - t0),
        -(p * q + ti - p + t1 + t0) / (t * k),
        zero(),
    )
}

pub(super) fn b_rational(th: &ThetaParams, s: &ExtendedState, t: ComplexScalar) -> RationalMatrix {
    RationalMatrix::new(2, vec![off_diagonal(th, s, t), s3(c64(0.5, 0.0))], vec![]).expect("2x2 blocks")
}

pub(super) fn frames(
    th: &ThetaParams,
    s: &ExtendedState,
    t: ComplexScalar,
    h: ComplexScalar,
) -> Result<Vec<LocalFrame>, SystemError> {
    let t = nonzero(t, "t")?;
    let (q, p) = (s.q, s.p);
    let t0 = nonzero(th.theta0, "theta0")?;
    let t1 = nonzero(th.theta1, "theta1")?;
    let ti = th.theta_inf;
    let k = s.log_k.exp();
    let pq = p * q;

    let g1 = m2(
        -h,
        k * (pq * q - pq + t1 * q * 2.0 - ti - t1 + t0) / t,
        -(pq - p + ti + t1 + t0) / (t * k),
        h,
    );
    let n0 = (k * t0 * -4.0).sqrt();
    let gauge0 =
        m2(k * (pq + ti + t1 - t0) * 2.0, k, (pq + ti + t1 + t0) * 2.0, one()) * n0.inv() * half_power_gauge(s.log_a);
    let n1 = (k * t1 * 2.0).sqrt();
    let gauge1 = m2(k * (pq + t1 * 2.0), k * q, p, one()) * n1.inv() * half_power_gauge(s.log_b);

    Ok(vec![
        LocalFrame {
            location: SeriesPoint::Infinity,
            gauge: SquareMatrix::identity(2),
            series_coeffs: vec![g1],
            exponent: ExponentData::new(vec![(-1, s3(t * 0.5))], s3(ti))?,
            exponent_dt: ExponentData::new(vec![(-1, s3(c64(0.5, 0.0)))], s3(zero()))?,
        },
        fuchsian_frame(zero(), gauge0, t0),
        fuchsian_frame(one(), gauge1, t1),
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
    let qm = nonzero(q - 1.0, "q - 1")?;
    let t = nonzero(t, "t")?;
    let (t0, t1, ti) = (th.theta0, th.theta1, th.theta_inf);
    let alpha = (t0 - t1 + ti).powu(2) * 0.5;
    let beta = (t0 - t1 - ti).powu(2) * -0.5;
    let gamma = 1.0 - t0 * 2.0 - t1 * 2.0;
    let delta = -0.5;
    let rhs = (0.5 / q + 1.0 / qm) * q1 * q1 - q1 / t
        + qm * qm / (t * t) * (alpha * q + beta / q)
        + gamma * q / t
        + delta * q * (q + 1.0) / qm;
    Ok(q2 - rhs)
}
