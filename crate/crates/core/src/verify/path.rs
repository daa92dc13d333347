use crate::algebra::{c64, ComplexScalar};
use crate::integrate::{integrate_path, Flow, IntegrationResult, PainleveFlow, PathSpec, Tolerances};
use crate::systems::{
    density_breakdown, painleve_residual, vector_field, ExtendedState, PainleveKind, SystemSpec, ThetaParams,
};

use super::{
    ReportContext, ResidualReport, VerifyError, ACTION_THRESHOLD, CONCATENATION_THRESHOLD, REVERSAL_THRESHOLD,
    SCALAR_EQUATION_THRESHOLD, TAU_DENSITY_THRESHOLD, TAU_REMARK_THRESHOLD, VARIATIONAL_THRESHOLD,
};

/// Step-halving passes when the endpoint moves by less than this many
/// requested tolerances.
pub const STEP_HALVING_FACTOR: f64 = 10.0;

fn context(spec: &SystemSpec, theta: &ThetaParams, path: &PathSpec) -> ReportContext {
    ReportContext::painleve(spec.kind, theta, path.waypoints[0][0])
}

fn run(
    spec: &SystemSpec,
    theta: &ThetaParams,
    initial: &ExtendedState,
    path: &PathSpec,
    tol: &Tolerances,
) -> Result<IntegrationResult<ExtendedState>, VerifyError> {
    Ok(integrate_path(
        &PainleveFlow::new(spec.clone(), *theta),
        initial,
        path,
        tol,
    )?)
}

#[derive(Clone, Debug, Default)]
pub struct ActionOptions {
    /// Replaces the ratio between the tau and action forms.
    pub gamma_override: Option<f64>,
}

/// `|Δ ln τ − γ ΔS − (G_end − G_start)|` from one run.
pub fn check_action_identity(
    spec: &SystemSpec,
    theta: &ThetaParams,
    initial: &ExtendedState,
    path: &PathSpec,
    tol: &Tolerances,
    options: &ActionOptions,
) -> Result<ResidualReport, VerifyError> {
    let r = run(spec, theta, initial, path, tol)?;
    let gamma = options.gamma_override.unwrap_or(r.gamma);
    let residual = (r.delta_ln_tau - r.delta_action * gamma - (r.g_end - r.g_start)).norm();
    let mut ctx = context(spec, theta, path);
    if options.gamma_override.is_some() {
        ctx = ctx.with_note(format!("gamma = {gamma}"));
    }
    Ok(ResidualReport::new("action_identity", residual, ACTION_THRESHOLD, ctx))
}

#[derive(Clone, Debug)]
pub struct VariationalOptions {
    pub h: f64,
    /// Leave the variation of `G` out of the boundary term.
    pub omit_boundary_g: bool,
    pub tol: Tolerances,
}

impl Default for VariationalOptions {
    fn default() -> Self {
        Self {
            h: 1e-5,
            omit_boundary_g: false,
            tol: Tolerances {
                rel_tol: 1e-13,
                abs_tol: 1e-15,
                ..Tolerances::default()
            },
        }
    }
}

/// Central difference of `Δ ln τ` across `±h·direction` in the initial data
/// against `[γ p δq + δG]` taken between the two ends of the path.
pub fn check_variational_identity(
    spec: &SystemSpec,
    theta: &ThetaParams,
    initial: &ExtendedState,
    path: &PathSpec,
    direction: &ExtendedState,
    options: &VariationalOptions,
) -> Result<ResidualReport, VerifyError> {
    if !(options.h >= 1e-9) {
        return Err(VerifyError::StepTooSmall(options.h));
    }
    let scale = 1.0 + initial.q.norm().max(initial.p.norm());
    let h = options.h * scale;
    let plus = run(
        spec,
        theta,
        &initial.advanced(direction, c64(h, 0.0)),
        path,
        &options.tol,
    )?;
    let minus = run(
        spec,
        theta,
        &initial.advanced(direction, c64(-h, 0.0)),
        path,
        &options.tol,
    )?;
    let gamma = plus.gamma;
    let lhs = (plus.delta_ln_tau - minus.delta_ln_tau) / (2.0 * h);
    let boundary = |pick: fn(&IntegrationResult<ExtendedState>) -> (ExtendedState, ComplexScalar)| {
        let (sp, gp) = pick(&plus);
        let (sm, gm) = pick(&minus);
        let p_mean = (sp.p + sm.p) * 0.5;
        let dq = (sp.q - sm.q) / (2.0 * h);
        let dg = if options.omit_boundary_g {
            c64(0.0, 0.0)
        } else {
            (gp - gm) / (2.0 * h)
        };
        p_mean * dq * gamma + dg
    };
    let at_end = boundary(|r| (*r.final_state(), r.g_end));
    let at_start = boundary(|r| (*r.initial_state(), r.g_start));
    let residual = (lhs - (at_end - at_start)).norm();
    let mut ctx = context(spec, theta, path);
    if options.omit_boundary_g {
        ctx = ctx.with_note("boundary G omitted");
    }
    Ok(ResidualReport::new(
        "variational_identity",
        residual,
        VARIATIONAL_THRESHOLD,
        ctx,
    ))
}

#[derive(Clone, Debug)]
pub struct TauOptions {
    /// Interior sample points, uniform in the path parameter.
    pub samples: usize,
    /// Compare with the Hamiltonian alone instead of the full density.
    pub drop_correction: bool,
}

impl Default for TauOptions {
    fn default() -> Self {
        Self {
            samples: 50,
            drop_correction: false,
        }
    }
}

fn interior_points(r: &IntegrationResult<ExtendedState>, count: usize) -> Vec<f64> {
    let end = r.s_end();
    (0..count)
        .map(|k| end * (k as f64 + 0.5) / count as f64)
        .filter(|&s| r.velocity_at(s).iter().any(|v| v.norm() > 0.0))
        .collect()
}

/// Differentiated `ln τ` accumulator against the tau density along the
/// trajectory. For Painlevé III a second report compares `pq/t` with the
/// gauge logarithms.
pub fn check_tau_log_derivative(
    spec: &SystemSpec,
    theta: &ThetaParams,
    initial: &ExtendedState,
    path: &PathSpec,
    tol: &Tolerances,
    options: &TauOptions,
) -> Result<Vec<ResidualReport>, VerifyError> {
    let r = run(spec, theta, initial, path, tol)?;
    let kind = spec.kind;
    let n = kind.state_len();
    let mut worst: f64 = 0.0;
    let mut remark: f64 = 0.0;
    for s in interior_points(&r, options.samples) {
        let y = r.vector_at(s)?;
        let dy = r.derivative_at(s)?;
        let v = r.velocity_at(s)[0];
        let t = r.path.times_at(s)[0];
        let state = ExtendedState::from_slots(kind, &y[..n])?;
        let dens = density_breakdown(spec, theta, &state, t)?;
        let expected = if options.drop_correction {
            dens.hamiltonian
        } else {
            dens.tau_density
        };
        worst = worst.max((dy[n] / v - expected).norm());
        if kind == PainleveKind::P3 {
            let d_logs = (dy[3] - dy[2]) / v;
            let r3 = state.p * state.q / t - d_logs * 0.25 + (theta.theta0 + theta.theta_inf) / (t * 2.0);
            remark = remark.max(r3.norm());
        }
    }
    let ctx = context(spec, theta, path);
    let mut reports = vec![ResidualReport::new(
        "tau_log_derivative",
        worst,
        TAU_DENSITY_THRESHOLD,
        if options.drop_correction {
            ctx.clone().with_note("density correction dropped")
        } else {
            ctx.clone()
        },
    )];
    if kind == PainleveKind::P3 {
        reports.push(ResidualReport::new("tau_remark", remark, TAU_REMARK_THRESHOLD, ctx));
    }
    Ok(reports)
}

/// Relative step of the central difference taken along the trajectory.
pub const SCALAR_EQUATION_FD_STEP: f64 = 1e-6;

/// The second-order scalar equation along the trajectory.
///
/// `q` and the velocities `q̇`, `ṗ` come from the dense output; `q̈` is the
/// rate of the `q` component of the vector field along that velocity, by a
/// central difference.
pub fn check_scalar_equation(
    spec: &SystemSpec,
    theta: &ThetaParams,
    initial: &ExtendedState,
    path: &PathSpec,
    tol: &Tolerances,
    samples: usize,
) -> Result<ResidualReport, VerifyError> {
    let r = run(spec, theta, initial, path, tol)?;
    let kind = spec.kind;
    let n = kind.state_len();
    let mut worst: f64 = 0.0;
    for s in interior_points(&r, samples) {
        let v = r.velocity_at(s)[0];
        let t = r.path.times_at(s)[0];
        let state = ExtendedState::from_slots(kind, &r.vector_at(s)?[..n])?;
        let dy = r.derivative_at(s)?;
        let velocity = ExtendedState::from_slots(kind, &dy[..n].iter().map(|d| d / v).collect::<Vec<_>>())?;
        let h = SCALAR_EQUATION_FD_STEP * t.norm().max(1.0);
        let q_rate = |sign: f64| -> Result<ComplexScalar, VerifyError> {
            let shifted = state.advanced(&velocity, c64(h * sign, 0.0));
            Ok(vector_field(spec, theta, &shifted, t + h * sign)?.q)
        };
        let q_ddot = (q_rate(1.0)? - q_rate(-1.0)?) / (2.0 * h);
        worst = worst.max(painleve_residual(spec, theta, state.q, velocity.q, q_ddot, t)?.norm());
    }
    Ok(ResidualReport::new(
        "scalar_equation",
        worst,
        SCALAR_EQUATION_THRESHOLD,
        context(spec, theta, path),
    ))
}

fn full_vector<F: Flow>(flow: &F, r: &IntegrationResult<F::State>) -> Result<Vec<ComplexScalar>, VerifyError> {
    let last = r.samples.last().ok_or(VerifyError::Invalid("empty run".into()))?;
    let mut y = flow.pack(&last.state, &last.times)?;
    y.push(last.ln_tau);
    y.push(last.action);
    Ok(y)
}

fn path_context(path: &PathSpec) -> ReportContext {
    ReportContext {
        t: path.waypoints.first().and_then(|w| w.first().copied()),
        ..Default::default()
    }
}

/// Endpoint change when both tolerances are halved, in units of the
/// requested tolerance.
pub fn check_integrator_step_halving<F: Flow>(
    flow: &F,
    initial: &F::State,
    path: &PathSpec,
    tol: &Tolerances,
) -> Result<ResidualReport, VerifyError> {
    let coarse = full_vector(flow, &integrate_path(flow, initial, path, tol)?)?;
    let fine = full_vector(flow, &integrate_path(flow, initial, path, &tol.scaled(0.5))?)?;
    let residual = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).norm() / (tol.abs_tol + tol.rel_tol * b.norm()))
        .fold(0.0, f64::max);
    Ok(ResidualReport::new(
        "integrator_step_halving",
        residual,
        STEP_HALVING_FACTOR,
        path_context(path),
    ))
}

/// `A→B` followed by `B→C` against the straight run `A→C`; the triangle
/// spanned by the three points must be free of singularities.
pub fn check_integrator_concatenation<F: Flow>(
    flow: &F,
    initial: &F::State,
    a: &[ComplexScalar],
    b: &[ComplexScalar],
    c: &[ComplexScalar],
    tol: &Tolerances,
) -> Result<ResidualReport, VerifyError> {
    let first = integrate_path(flow, initial, &PathSpec::new(vec![a.to_vec(), b.to_vec()]), tol)?;
    let second = integrate_path(
        flow,
        first.final_state(),
        &PathSpec::new(vec![b.to_vec(), c.to_vec()]),
        tol,
    )?;
    let direct_path = PathSpec::new(vec![a.to_vec(), c.to_vec()]);
    let direct = integrate_path(flow, initial, &direct_path, tol)?;
    let tau = (first.delta_ln_tau + second.delta_ln_tau - direct.delta_ln_tau).norm();
    let action = (first.delta_action + second.delta_action - direct.delta_action).norm();
    Ok(ResidualReport::new(
        "integrator_concatenation",
        tau.max(action),
        CONCATENATION_THRESHOLD,
        path_context(&direct_path),
    ))
}

/// `A→B→A` must restore the initial state and cancel both accumulators.
pub fn check_integrator_reversal<F: Flow>(
    flow: &F,
    initial: &F::State,
    a: &[ComplexScalar],
    b: &[ComplexScalar],
    tol: &Tolerances,
) -> Result<ResidualReport, VerifyError> {
    let path = PathSpec::new(vec![a.to_vec(), b.to_vec(), a.to_vec()]);
    let r = integrate_path(flow, initial, &path, tol)?;
    let start = flow.pack(initial, a)?;
    let end = flow.pack(r.final_state(), a)?;
    let drift = start.iter().zip(&end).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let residual = drift.max(r.delta_ln_tau.norm()).max(r.delta_action.norm());
    Ok(ResidualReport::new(
        "integrator_reversal",
        residual,
        REVERSAL_THRESHOLD,
        path_context(&path),
    ))
}
