use super::{m2, one, s3, zero, ExtendedState, LocalFrame};
use crate::algebra::{c64, ComplexScalar, ExponentData, PolePart, RationalMatrix, SeriesPoint, SquareMatrix};

pub(super) fn hamiltonian(s: &ExtendedState, t: ComplexScalar) -> ComplexScalar {
    let (q, p) = (s.q, s.p);
    p * p * 0.5 - q * q * q * 2.0 - t * q
}

pub(super) fn vector_field(s: &ExtendedState, t: ComplexScalar) -> ExtendedState {
    ExtendedState::new(s.p, s.q * s.q * 6.0 + t)
}

pub(super) fn a_rational(s: &ExtendedState, t: ComplexScalar) -> RationalMatrix {
    let (q, p) = (s.q, s.p);
    let c = q * q * 2.0 + t;
    let a0 = m2(c, -c, c, -c);
    let a1 = m2(zero(), p * -2.0, p * -2.0, zero());
    let a2 = m2(zero(), q * -4.0, q * 4.0, zero());
    let a4 = s3(c64(4.0, 0.0));
    let half = c64(-0.5, 0.0);
    RationalMatrix::new(
        2,
        vec![a0, a1, a2, SquareMatrix::zeros(2), a4],
        vec![PolePart {
            at: zero(),
            coeffs: vec![m2(zero(), half, half, zero())],
        }],
    )
    .expect("2x2 blocks")
}

pub(super) fn b_rational(s: &ExtendedState) -> RationalMatrix {
    let q = s.q;
    RationalMatrix::new(
        2,
        vec![SquareMatrix::zeros(2), s3(one())],
        vec![PolePart {
            at: zero(),
            coeffs: vec![m2(q, -q, q, -q)],
        }],
    )
    .expect("2x2 blocks")
}

/// Frame at infinity with five coefficients. The Fuchsian point `z = 0` is resonant and carries none.
pub(super) fn frames(s: &ExtendedState, t: ComplexScalar, h: ComplexScalar) -> Vec<LocalFrame> {
    let (q, p) = (s.q, s.p);
    let big_p = p * 2.0 - t * t;
    let g1 = s3(-h);
    let g2 = m2(h * h * 0.5, q * 0.5, q * 0.5, h * h * 0.5);
    let d3 = -h.powu(3) / 6.0 - big_p / 24.0;
    let o3 = q * h * 0.5 + p * 0.25;
    let g3 = m2(d3, o3, -o3, -d3);
    let d4 = h.powu(4) / 24.0 + big_p / 24.0 * h + q * q / 8.0;
    let o4 = q * h * h * 0.25 + p * h * 0.25 + (q * q * 2.0 + t) / 8.0;
    let g4 = m2(d4, o4, o4, d4);
    let d5 =
        -h.powu(5) / 120.0 - big_p / 48.0 * h * h - (q * q * 5.0 - t * 2.0) / 40.0 * h - (p * q * 4.0 + 1.0) / 160.0;
    let o5 = q * h.powu(3) / 12.0 + p * h * h / 8.0 + (q * q * 2.0 + t) / 8.0 * h + big_p / 48.0 * q + 1.0 / 16.0;
    let g5 = m2(d5, o5, -o5, -d5);
    let exponent =
        ExponentData::new(vec![(-5, s3(c64(0.8, 0.0))), (-1, s3(t))], s3(zero())).expect("diagonal exponent");
    let exponent_dt = ExponentData::new(vec![(-1, s3(one()))], s3(zero())).expect("diagonal exponent");
    vec![LocalFrame {
        location: SeriesPoint::Infinity,
        gauge: SquareMatrix::identity(2),
        series_coeffs: vec![g1, g2, g3, g4, g5],
        exponent,
        exponent_dt,
    }]
}
