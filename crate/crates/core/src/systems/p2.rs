use super::{m2, one, s3, zero, ExtendedState, LocalFrame, ThetaParams};
use crate::algebra::{c64, ComplexScalar, ExponentData, RationalMatrix, SeriesPoint, SquareMatrix};

pub(super) fn hamiltonian(th: &ThetaParams, s: &ExtendedState, t: ComplexScalar) -> ComplexScalar {
    let (q, p) = (s.q, s.p);
    p * p * 0.5 + p * q * q + p * t * 0.5 + q * th.theta_inf
}

pub(super) fn vector_field(th: &ThetaParams, s: &ExtendedState, t: ComplexScalar) -> ExtendedState {
    let (q, p) = (s.q, s.p);
    ExtendedState {
        log_k: -q,
        ..ExtendedState::new(p + q * q + t * 0.5, p * q * -2.0 - th.theta_inf)
    }
}

fn linear_block(s: &ExtendedState) -> SquareMatrix {
    let k = s.log_k.exp();
    m2(zero(), k, s.p * -2.0 / k, zero())
}

pub(super) fn a_rational(th: &ThetaParams, s: &ExtendedState, t: ComplexScalar) -> RationalMatrix {
    let (q, p) = (s.q, s.p);
    let k = s.log_k.exp();
    let a0 = m2(p + t * 0.5, -k * q, (th.theta_inf + p * q) * -2.0 / k, -p - t * 0.5);
    RationalMatrix::new(2, vec![a0, linear_block(s), s3(one())], vec![]).expect("2x2 blocks")
}

pub(super) fn b_rational(s: &ExtendedState) -> RationalMatrix {
    RationalMatrix::new(2, vec![linear_block(s) * 0.5, s3(c64(0.5, 0.0))], vec![]).expect("2x2 blocks")
}

pub(super) fn frames(th: &ThetaParams, s: &ExtendedState, t: ComplexScalar, h: ComplexScalar) -> Vec<LocalFrame> {
    let (q, p, th) = (s.q, s.p, th.theta_inf);
    let k = s.log_k.exp();
    let g1 = m2(-h, -k * 0.5, -p / k, h);
    let g2 = m2(
        h * h * 0.5 + p * 0.25 - t * th * 0.25,
        -k * h * 0.5 + k * q * 0.5,
        p * h / k - p * q / k - th / k,
        h * h * 0.5 + p * 0.25 + t * th * 0.25,
    );
    let g3 = m2(
        -h.powu(3) / 6.0 - h * p * 0.25 + h * t / 6.0 + h * t * th * 0.25 + p * q / 6.0 + th * th / 6.0 + th / 3.0,
        -k * h * h * 0.25 + k * q * h * 0.5 + k * p / 8.0 + k * t * 0.25 - k * t * th / 8.0,
        -p * h * h / (k * 2.0)
            + h * p * q / k
            + h * th / k
            + p * p / (k * 4.0)
            + p * t * th / (k * 4.0)
            + p * t / (k * 2.0),
        h.powu(3) / 6.0 + h * p * 0.25 - h * t / 6.0 + h * t * th * 0.25 - p * q / 6.0 - th * th / 6.0 + th / 6.0,
    );
    let exponent =
        ExponentData::new(vec![(-3, s3(c64(1.0 / 3.0, 0.0))), (-1, s3(t * 0.5))], s3(th)).expect("diagonal exponent");
    let exponent_dt = ExponentData::new(vec![(-1, s3(c64(0.5, 0.0)))], s3(zero())).expect("diagonal exponent");
    vec![LocalFrame {
        location: SeriesPoint::Infinity,
        gauge: SquareMatrix::identity(2),
        series_coeffs: vec![g1, g2, g3],
        exponent,
        exponent_dt,
    }]
}
