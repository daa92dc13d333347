use serde::{Deserialize, Serialize};

use super::{half_power_gauge, m2, nonzero, one, s3, zero, ExtendedState, LocalFrame, SystemError, ThetaParams};
use crate::algebra::{ComplexScalar, ExponentData, PolePart, RationalMatrix, SeriesPoint, SquareMatrix};

/// Relative tolerance for the residue parametrization constraints.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-10;

/// Entries of the three residues `A_j = [[x_j+θ_j, −u_j x_j], [(x_j+2θ_j)/u_j, −x_j−θ_j]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PviResidueParams {
    pub x0: ComplexScalar,
    pub x1: ComplexScalar,
    pub xt: ComplexScalar,
    pub u: ComplexScalar,
    pub v: ComplexScalar,
    pub w: ComplexScalar,
    pub k: ComplexScalar,
}

struct Guarded {
    q: ComplexScalar,
    qm: ComplexScalar,
    qt: ComplexScalar,
    t: ComplexScalar,
    tm: ComplexScalar,
    d: ComplexScalar,
}

fn guarded(s: &ExtendedState, t: ComplexScalar) -> Result<Guarded, SystemError> {
    let t = nonzero(t, "t")?;
    let tm = nonzero(t - 1.0, "t - 1")?;
    Ok(Guarded {
        q: nonzero(s.q, "q")?,
        qm: nonzero(s.q - 1.0, "q - 1")?,
        qt: nonzero(s.q - t, "q - t")?,
        t,
        tm,
        d: t * tm,
    })
}

pub(super) fn hamiltonian(th: &ThetaParams, s: &ExtendedState, t: ComplexScalar) -> Result<ComplexScalar, SystemError> {
    let Guarded { q, qm, qt, t, d, .. } = guarded(s, t)?;
    let p = s.p;
    let (t0, t1, tt, ti) = (th.theta0, th.theta1, th.theta_t, th.theta_inf);
    Ok(
        p * p * q * qm * qt / d + p * q * qm / d + ti * (1.0 - ti) * qt / d + t0 * t0 * qt / (q * d)
            - t1 * t1 * qt / (qm * d)
            + tt * tt * (t * t - q * (t * 2.0 - 1.0)) / (qt * d),
    )
}

pub(super) fn vector_field(
    th: &ThetaParams,
    s: &ExtendedState,
    t: ComplexScalar,
) -> Result<ExtendedState, SystemError> {
    let Guarded { q, qm, qt, t, tm, d } = guarded(s, t)?;
    let p = s.p;
    let (t0, t1, tt, ti) = (th.theta0, th.theta1, th.theta_t, th.theta_inf);
    Ok(ExtendedState {
        q: p * q * qm * qt * 2.0 / d + q * qm / d,
        p: (p * p * 4.0 * (t * q * 2.0 - q * q * 3.0 - t + q * 2.0)
            + p * 4.0 * (1.0 - q * 2.0)
            + ti * (ti - 1.0) * 4.0)
            / (d * 4.0)
            - t0 * t0 / (q * q * tm)
            + t1 * t1 / (t * qm * qm)
            - tt * tt / (qt * qt),
        log_k: (ti * 2.0 - 1.0) * qt / d,
        log_a: -t0 * 2.0 * qt / (q * d),
        log_b: t1 * 2.0 * qt / (d * qm),
        log_c: tt * 2.0 * (q * (t * 2.0 - 1.0) - t * t) / (qt * d),
    })
}

pub(super) fn tau_correction(th: &ThetaParams, s: &ExtendedState, t: ComplexScalar) -> ComplexScalar {
    let d = t * (t - 1.0);
    -s.p * s.q * (s.q - 1.0) / d - th.theta_inf * (s.q - t) / d
}

/// Residue parameters in closed form, with the linear constraints asserted.
pub fn pvi_residue_params(
    th: &ThetaParams,
    s: &ExtendedState,
    t: ComplexScalar,
) -> Result<PviResidueParams, SystemError> {
    let Guarded { q, qm, qt, t, tm, d } = guarded(s, t)?;
    let ti2 = nonzero(th.theta_inf * 2.0, "2 theta_inf")?;
    let p = s.p;
    let (t0, t1, tt, ti) = (th.theta0, th.theta1, th.theta_t, th.theta_inf);
    let k = s.log_k.exp();
    let tq = -qt;

    let x0 = p * p * q * q * qm * qt / (t * ti2)
        + p * q * qm * qt / t
        + ti * q * (qt - 1.0) / (t * 2.0)
        + t1 * t1 * tm / (t * ti2 * qm)
        - tt * tt * d / (ti2 * qt)
        + t1 * t1 * tm / (t * ti2)
        - tt * tt * tm / ti2
        - t0
        - t0 * t0 / ti2;
    let x1 = p * p * q * qm * qm * tq / (tm * ti2) + p * q * qm * tq / tm + ti * qm * (tq - 1.0) / (tm * 2.0)
        - t0 * t0 * t / (q * ti2 * tm)
        + tt * tt * d / (ti2 * qt)
        + t0 * t0 * t / (tm * ti2)
        + tt * tt * t / ti2
        - t1
        - t1 * t1 / ti2;
    let xt = p * p * q * qm * tq * tq / (d * ti2)
        + p * q * qm * qt / d
        + ti * qt * (q + t - 1.0) / (d * 2.0)
        + t0 * t0 * t / (q * ti2 * tm)
        - t1 * t1 * tm / (ti2 * t * qm)
        - t0 * t0 / (tm * ti2)
        + t1 * t1 / (t * ti2)
        - tt
        - tt * tt / ti2;

    let x0 = nonzero(x0, "x0")?;
    let x1 = nonzero(x1, "x1")?;
    let xt = nonzero(xt, "xt")?;
    let u = nonzero(k * q / (x0 * t), "u")?;
    let v = nonzero(k * qm / (x1 * (1.0 - t)), "v")?;
    let w = nonzero(k * tq / (xt * d * -1.0), "w")?;
    let params = PviResidueParams { x0, x1, xt, u, v, w, k };

    let rel = |terms: &[ComplexScalar]| {
        let sum: ComplexScalar = terms.iter().sum();
        let scale = terms.iter().map(|z| z.norm()).sum::<f64>().max(1.0);
        sum.norm() / scale
    };
    let checks = [
        ("sum of diagonal entries", rel(&[x0, t0, x1, t1, xt, tt, ti])),
        ("sum of upper-right entries", rel(&[u * x0, v * x1, w * xt])),
        (
            "sum of lower-left entries",
            rel(&[(x0 + t0 * 2.0) / u, (x1 + t1 * 2.0) / v, (xt + tt * 2.0) / w]),
        ),
        ("apparent singularity", rel(&[u * x0 * t, -k * q])),
    ];
    for (name, residual) in checks {
        if !(residual <= CONSTRAINT_TOLERANCE) {
            return Err(SystemError::Constraint { name, residual });
        }
    }
    Ok(params)
}

fn residue(x: ComplexScalar, theta: ComplexScalar, u: ComplexScalar) -> SquareMatrix {
    m2(x + theta, -u * x, (x + theta * 2.0) / u, -x - theta)
}

fn residues(
    th: &ThetaParams,
    s: &ExtendedState,
    t: ComplexScalar,
) -> Result<(SquareMatrix, SquareMatrix, SquareMatrix, PviResidueParams), SystemError> {
    let pr = pvi_residue_params(th, s, t)?;
    Ok((
        residue(pr.x0, th.theta0, pr.u),
        residue(pr.x1, th.theta1, pr.v),
        residue(pr.xt, th.theta_t, pr.w),
        pr,
    ))
}

pub(super) fn a_rational(th: &ThetaParams, s: &ExtendedState, t: ComplexScalar) -> Result<RationalMatrix, SystemError> {
    let (a0, a1, at, _) = residues(th, s, t)?;
    Ok(RationalMatrix::new(
        2,
        vec![],
        vec![
            PolePart {
                at: zero(),
                coeffs: vec![a0],
            },
            PolePart {
                at: one(),
                coeffs: vec![a1],
            },
            PolePart {
                at: t,
                coeffs: vec![at],
            },
        ],
    )?)
}

pub(super) fn b_rational(th: &ThetaParams, s: &ExtendedState, t: ComplexScalar) -> Result<RationalMatrix, SystemError> {
    let (_, _, at, _) = residues(th, s, t)?;
    Ok(RationalMatrix::new(
        2,
        vec![],
        vec![PolePart {
            at: t,
            coeffs: vec![-at],
        }],
    )?)
}

fn fuchsian_gauge(
    scale: ComplexScalar,
    u: ComplexScalar,
    x: ComplexScalar,
    theta: ComplexScalar,
    log_gauge: ComplexScalar,
) -> SquareMatrix {
    m2(one(), one(), u.inv(), (x + theta * 2.0) / (u * x)) * scale.sqrt() * half_power_gauge(log_gauge)
}

pub(super) fn frames(
    th: &ThetaParams,
    s: &ExtendedState,
    t: ComplexScalar,
    h: ComplexScalar,
) -> Result<Vec<LocalFrame>, SystemError> {
    let (_, _, _, pr) = residues(th, s, t)?;
    let Guarded { q, qm, qt, t, tm, d } = guarded(s, t)?;
    let p = s.p;
    let (t0, t1, tt, ti) = (th.theta0, th.theta1, th.theta_t, th.theta_inf);
    let tt2 = nonzero(tt * 2.0, "2 theta_t")?;
    let minus = nonzero(1.0 - tt2, "1 - 2 theta_t")?;
    let plus = nonzero(1.0 + tt2, "1 + 2 theta_t")?;
    let c = s.log_c.exp();

    let x = p * q * qm / (tt2 * d) + ti * qt / (tt2 * d);
    let y = tt * (q * t * 2.0 - t * t - q) / (d * qt);
    let g11 = h / tt2 - x;
    let g1 = m2(
        g11,
        c * (h / (tt2 * minus) - x + y / minus),
        (-h / (tt2 * plus) + x - y / plus) / c,
        -g11,
    );

    let gauge0 = fuchsian_gauge(pr.k * q / t, pr.u, pr.x0, t0, s.log_a);
    let gauge1 = fuchsian_gauge(pr.k * qm / (1.0 - t), pr.v, pr.x1, t1, s.log_b);
    let gauge_t = fuchsian_gauge(pr.k * -qt / (t * -tm), pr.w, pr.xt, tt, s.log_c);

    Ok(vec![
        super::fuchsian_frame(zero(), gauge0, t0),
        super::fuchsian_frame(one(), gauge1, t1),
        LocalFrame {
            location: SeriesPoint::Finite(t),
            gauge: gauge_t,
            series_coeffs: vec![g1],
            exponent: ExponentData::logarithmic(s3(tt)),
            exponent_dt: ExponentData::new(vec![(-1, s3(-tt))], s3(zero()))?,
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
    let probe = ExtendedState::new(q, zero());
    let Guarded { q, qm, qt, t, tm, .. } = guarded(&probe, t)?;
    let (t0, t1, tt, ti) = (th.theta0, th.theta1, th.theta_t, th.theta_inf);
    let alpha = (ti * 2.0 - 1.0).powu(2) * 0.5;
    let beta = t0 * t0 * -2.0;
    let gamma = t1 * t1 * 2.0;
    let delta = (1.0 - tt * tt * 4.0) * 0.5;
    let rhs = (q.inv() + qm.inv() + qt.inv()) * q1 * q1 * 0.5 - (t.inv() + tm.inv() + qt.inv()) * q1
        + q * qm * qt / (t * t * tm * tm)
            * (alpha + beta * t / (q * q) + gamma * tm / (qm * qm) + delta * t * tm / (qt * qt));
    Ok(q2 - rhs)
}
