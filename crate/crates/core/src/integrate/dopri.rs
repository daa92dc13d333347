//! Dormand–Prince 5(4) with its quartic dense output.

use crate::algebra::{c64, ComplexScalar};

use super::{Flow, IntegrationError, IntegrationResult, Sample, MAX_STEPS};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

/// Quartic interpolant over one accepted step, in monomial form in
/// `θ = (s − s0)/h`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseStep {
    pub s0: f64,
    pub h: f64,
    pub coeffs: [Vec<ComplexScalar>; 5],
}

impl DenseStep {
    fn constant(s0: f64, y: &[ComplexScalar]) -> Self {
        let zero = vec![c64(0.0, 0.0); y.len()];
        Self {
            s0,
            h: 1.0,
            coeffs: [y.to_vec(), zero.clone(), zero.clone(), zero.clone(), zero],
        }
    }

    /// From the Hairer form `y0 + θ(r1 + (1−θ)(r2 + θ(r3 + (1−θ) r4)))`.
    fn from_hairer(s0: f64, h: f64, r: [Vec<ComplexScalar>; 5]) -> Self {
        let n = r[0].len();
        let mut m: [Vec<ComplexScalar>; 5] = Default::default();
        for c in m.iter_mut() {
            c.reserve(n);
        }
        for i in 0..n {
            m[0].push(r[0][i]);
            m[1].push(r[1][i] + r[2][i]);
            m[2].push(r[3][i] + r[4][i] - r[2][i]);
            m[3].push(-(r[3][i] + r[4][i] * 2.0));
            m[4].push(r[4][i]);
        }
        Self { s0, h, coeffs: m }
    }

    fn theta(&self, s: f64) -> f64 {
        ((s - self.s0) / self.h).clamp(0.0, 1.0)
    }

    pub fn value(&self, s: f64) -> Vec<ComplexScalar> {
        let th = self.theta(s);
        let m = &self.coeffs;
        (0..m[0].len())
            .map(|i| m[0][i] + th * (m[1][i] + th * (m[2][i] + th * (m[3][i] + th * m[4][i]))))
            .collect()
    }

    pub fn derivative(&self, s: f64) -> Vec<ComplexScalar> {
        let th = self.theta(s);
        let m = &self.coeffs;
        (0..m[0].len())
            .map(|i| (m[1][i] + th * (m[2][i] * 2.0 + th * (m[3][i] * 3.0 + th * m[4][i] * 4.0))) / self.h)
            .collect()
    }

    pub fn second_derivative(&self, s: f64) -> Vec<ComplexScalar> {
        let th = self.theta(s);
        let m = &self.coeffs;
        (0..m[0].len())
            .map(|i| (m[2][i] * 2.0 + th * (m[3][i] * 6.0 + th * m[4][i] * 12.0)) / (self.h * self.h))
            .collect()
    }

    pub(super) fn endpoint_values(&self, len: usize) -> impl Iterator<Item = f64> + '_ {
        let end = self.value(self.s0 + self.h);
        let start = self.coeffs[0][..len].iter().map(|z| z.norm()).collect::<Vec<_>>();
        start.into_iter().chain(end.into_iter().take(len).map(|z| z.norm()))
    }
}

struct Rhs<'a, F: Flow> {
    flow: &'a F,
    velocity: Vec<ComplexScalar>,
    start: &'a [ComplexScalar],
    end: &'a [ComplexScalar],
    seg_s0: f64,
    guard: f64,
    state_len: usize,
    evaluations: usize,
}

enum EvalFailure {
    Guard(IntegrationError),
    Soft(String),
}

impl<F: Flow> Rhs<'_, F> {
    fn times(&self, s: f64) -> Vec<ComplexScalar> {
        let u = s - self.seg_s0;
        if u >= 1.0 {
            return self.end.to_vec();
        }
        self.start.iter().zip(self.end).map(|(a, b)| a + (b - a) * u).collect()
    }

    fn eval(&mut self, s: f64, y: &[ComplexScalar]) -> Result<Vec<ComplexScalar>, EvalFailure> {
        self.evaluations += 1;
        if y.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(EvalFailure::Soft("non-finite stage".into()));
        }
        let times = self.times(s);
        self.flow.check_times(&times, self.guard).map_err(EvalFailure::Guard)?;
        let mut dy = vec![c64(0.0, 0.0); y.len()];
        let (tau, action) = self
            .flow
            .rates(y, &times, &self.velocity, &mut dy[..self.state_len])
            .map_err(|e| EvalFailure::Soft(e.to_string()))?;
        dy[self.state_len] = tau;
        dy[self.state_len + 1] = action;
        if dy.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(EvalFailure::Soft("non-finite rate".into()));
        }
        Ok(dy)
    }
}

fn error_norm(y0: &[ComplexScalar], y1: &[ComplexScalar], err: &[ComplexScalar], rel: f64, abs: f64) -> f64 {
    let sum: f64 = (0..y0.len())
        .map(|i| {
            let sk = abs + rel * y0[i].norm().max(y1[i].norm());
            (err[i].norm() / sk).powi(2)
        })
        .sum();
    (sum / y0.len() as f64).sqrt()
}

fn axpy(y: &[ComplexScalar], h: f64, terms: &[(f64, &[ComplexScalar])]) -> Vec<ComplexScalar> {
    let mut out = y.to_vec();
    for &(w, k) in terms {
        if w == 0.0 {
            continue;
        }
        for (o, v) in out.iter_mut().zip(k) {
            *o += v * (h * w);
        }
    }
    out
}

fn initial_step<F: Flow>(
    rhs: &mut Rhs<'_, F>,
    s: f64,
    y: &[ComplexScalar],
    f0: &[ComplexScalar],
    tol: &super::Tolerances,
) -> f64 {
    let sk: Vec<f64> = y.iter().map(|z| tol.abs_tol + tol.rel_tol * z.norm()).collect();
    let rms = |v: &[ComplexScalar]| -> f64 {
        (v.iter().zip(&sk).map(|(z, s)| (z.norm() / s).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
    };
    let d0 = rms(y);
    let d1 = rms(f0);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(tol.max_step);
    let y1 = axpy(y, h0, &[(1.0, f0)]);
    let Ok(f1) = rhs.eval(s + h0, &y1) else { return h0 };
    let diff: Vec<ComplexScalar> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms(&diff) / h0;
    let big = d1.max(d2);
    let h1 = if big <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / big).powf(0.2)
    };
    (100.0 * h0).min(h1).min(tol.max_step)
}

/// Integrates every segment from `first` on, appending to `out`.
pub(super) fn run_segments<F: Flow>(
    flow: &F,
    out: &mut IntegrationResult<F::State>,
    first: usize,
    mut y: Vec<ComplexScalar>,
    tol: &super::Tolerances,
) -> Result<(), IntegrationError> {
    let state_len = out.state_len;
    let path = out.path.clone();
    let mut h_carry: Option<f64> = None;
    let mut attempts = 0usize;
    for seg in first..path.segment_count() {
        let seg_s0 = seg as f64;
        let seg_s1 = seg_s0 + 1.0;
        let velocity = path.velocity(seg);
        let end_times = path.waypoints[seg + 1].clone();
        if velocity.iter().all(|v| *v == c64(0.0, 0.0)) {
            out.dense.push(DenseStep::constant(seg_s0, &y));
            out.samples.push(Sample {
                s: seg_s1,
                state: flow.unpack(&y, &end_times)?,
                ln_tau: y[state_len],
                action: y[state_len + 1],
                times: end_times,
            });
            continue;
        }
        let mut rhs = Rhs {
            flow,
            velocity,
            start: &path.waypoints[seg],
            end: &path.waypoints[seg + 1],
            seg_s0,
            guard: path.guard_radius,
            state_len,
            evaluations: 0,
        };
        let mut s = seg_s0;
        let last_times = |s: f64| path.times_at(s);
        let mut k1 = match rhs.eval(s, &y) {
            Ok(k) => k,
            Err(EvalFailure::Guard(e)) => return Err(e),
            Err(EvalFailure::Soft(cause)) => {
                return Err(IntegrationError::StepUnderflow {
                    last_s: s,
                    last_times: last_times(s),
                    min_step: tol.min_step,
                    cause: Some(cause),
                })
            }
        };
        let mut h = match h_carry {
            Some(h) => h,
            None => initial_step(&mut rhs, s, &y, &k1, tol),
        };
        let mut rejected_last = false;
        while s < seg_s1 {
            attempts += 1;
            if attempts > MAX_STEPS {
                out.stats.evaluations += rhs.evaluations;
                return Err(IntegrationError::TooManySteps {
                    last_s: s,
                    last_times: last_times(s),
                });
            }
            if h < tol.min_step {
                out.stats.evaluations += rhs.evaluations;
                return Err(IntegrationError::StepUnderflow {
                    last_s: s,
                    last_times: last_times(s),
                    min_step: tol.min_step,
                    cause: None,
                });
            }
            let finishing = s + h >= seg_s1 - 1e-13;
            let h_try = if finishing { seg_s1 - s } else { h };
            match attempt(&mut rhs, s, &y, &k1, h_try) {
                Ok(step) => {
                    let err = error_norm(&y, &step.y1, &step.err, tol.rel_tol, tol.abs_tol);
                    if err <= 1.0 {
                        if step.y1.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                            return Err(IntegrationError::NonFinite {
                                last_s: s,
                                last_times: last_times(s),
                            });
                        }
                        out.stats.accepted += 1;
                        let s_new = if finishing { seg_s1 } else { s + h_try };
                        out.dense.push(step.dense(s, h_try, &y));
                        y = step.y1;
                        k1 = step.k7;
                        s = s_new;
                        let times = if finishing { end_times.clone() } else { last_times(s) };
                        out.samples.push(Sample {
                            s,
                            state: flow.unpack(&y, &times)?,
                            ln_tau: y[state_len],
                            action: y[state_len + 1],
                            times,
                        });
                        let mut fac = if err == 0.0 {
                            FAC_MAX
                        } else {
                            (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
                        };
                        if rejected_last {
                            fac = fac.min(1.0);
                        }
                        rejected_last = false;
                        if !finishing || h_try >= h {
                            h = (h_try * fac).min(tol.max_step);
                        }
                    } else {
                        out.stats.rejected += 1;
                        rejected_last = true;
                        h = h_try * (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0);
                    }
                }
                Err(EvalFailure::Guard(e)) => {
                    out.stats.evaluations += rhs.evaluations;
                    return Err(e);
                }
                Err(EvalFailure::Soft(cause)) => {
                    out.stats.rejected += 1;
                    rejected_last = true;
                    h = h_try * 0.25;
                    if h < tol.min_step {
                        out.stats.evaluations += rhs.evaluations;
                        return Err(IntegrationError::StepUnderflow {
                            last_s: s,
                            last_times: last_times(s),
                            min_step: tol.min_step,
                            cause: Some(cause),
                        });
                    }
                }
            }
        }
        h_carry = Some(h);
        out.stats.evaluations += rhs.evaluations;
    }
    let last = out.samples.last().expect("start sample");
    out.delta_ln_tau = y[state_len];
    out.delta_action = y[state_len + 1];
    out.g_end = flow.boundary(&y, &last.times)?;
    Ok(())
}

struct Attempt {
    y1: Vec<ComplexScalar>,
    err: Vec<ComplexScalar>,
    k: Vec<Vec<ComplexScalar>>,
    k7: Vec<ComplexScalar>,
}

impl Attempt {
    fn dense(&self, s0: f64, h: f64, y0: &[ComplexScalar]) -> DenseStep {
        let n = y0.len();
        let mut r: [Vec<ComplexScalar>; 5] = Default::default();
        for i in 0..n {
            let r1 = self.y1[i] - y0[i];
            let r2 = self.k[0][i] * h - r1;
            let r3 = r1 - self.k7[i] * h - r2;
            let mut r4 = self.k7[i] * D[6];
            for (j, kj) in self.k.iter().enumerate() {
                r4 += kj[i] * D[j];
            }
            r[0].push(y0[i]);
            r[1].push(r1);
            r[2].push(r2);
            r[3].push(r3);
            r[4].push(r4 * h);
        }
        DenseStep::from_hairer(s0, h, r)
    }
}

fn attempt<F: Flow>(
    rhs: &mut Rhs<'_, F>,
    s: f64,
    y: &[ComplexScalar],
    k1: &[ComplexScalar],
    h: f64,
) -> Result<Attempt, EvalFailure> {
    let mut k: Vec<Vec<ComplexScalar>> = vec![k1.to_vec()];
    for stage in 1..6 {
        let terms: Vec<(f64, &[ComplexScalar])> = (0..stage).map(|j| (A[stage][j], k[j].as_slice())).collect();
        let ys = axpy(y, h, &terms);
        let kn = rhs.eval(s + C[stage] * h, &ys)?;
        k.push(kn);
    }
    let terms: Vec<(f64, &[ComplexScalar])> = (0..6).map(|j| (A[6][j], k[j].as_slice())).collect();
    let y1 = axpy(y, h, &terms);
    let k7 = rhs.eval(s + h, &y1)?;
    let err: Vec<ComplexScalar> = (0..y.len())
        .map(|i| {
            let mut e = k7[i] * E[6];
            for (j, kj) in k.iter().enumerate() {
                e += kj[i] * E[j];
            }
            e * h
        })
        .collect();
    Ok(Attempt { y1, err, k, k7 })
}
