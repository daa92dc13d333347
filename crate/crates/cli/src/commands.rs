use painleve_tau::algebra::{c64, ComplexScalar, SeriesPoint};
use painleve_tau::integrate::{integrate_path, Flow, IntegrationError, PainleveFlow, PathSpec, SchlesingerFlow};
use painleve_tau::schlesinger::{MultiTimePath, SchlesingerModel, SchlesingerState};
use painleve_tau::systems::{
    a_rational, local_frames, max_frame_order, ExtendedState, LocalFrame, SystemSpec, ThetaParams,
};
use painleve_tau::verify::random::{random_z_samples, rng_from_seed};
use painleve_tau::verify::{
    check_action_identity, check_hamilton_equations, check_integrator_concatenation, check_integrator_reversal,
    check_integrator_step_halving, check_lax_compatibility, check_scalar_equation, check_schlesinger_suite,
    check_tau_log_derivative, check_variational_identity, hamilton_residual, lax_residual, series_recursion_residual,
    ActionOptions, HamiltonProbe, LaxProbe, ReportContext, ResidualReport, SchlesingerOptions, TauOptions,
    VariationalOptions, VerifyError, HAMILTON_THRESHOLD, LAX_THRESHOLD, SERIES_THRESHOLD,
};

use crate::config::{Check, Format, Job, Problem};
use crate::output::{self, Artifact, FrameOut, Row, SeriesOut, Summary, Trajectory};
use crate::CliError;

/// Lax probe points per check.
const LAX_Z_SAMPLES: usize = 8;
/// Trajectory points probed by the scalar-equation check.
const SCALAR_EQUATION_SAMPLES: usize = 50;
/// Tolerance factor for the scalar-equation run; `q̇` from the dense output
/// carries an error proportional to the step tolerance.
const SCALAR_EQUATION_TOL_FACTOR: f64 = 1e-2;

pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub passed: bool,
}

fn integration_error(e: IntegrationError) -> CliError {
    match e {
        IntegrationError::InvalidPath(_)
        | IntegrationError::InvalidTolerances(_)
        | IntegrationError::InvalidState(_) => CliError::Config(e.to_string()),
        other => CliError::Abort(other.to_string()),
    }
}

fn verify_error(e: VerifyError) -> CliError {
    match e {
        VerifyError::Integration(inner) => integration_error(inner),
        VerifyError::StepTooSmall(_) | VerifyError::Invalid(_) | VerifyError::NoFrame => {
            CliError::Config(e.to_string())
        }
        other => CliError::Abort(other.to_string()),
    }
}

fn require_path(path: &Option<PathSpec>) -> Result<&PathSpec, CliError> {
    path.as_ref()
        .ok_or_else(|| CliError::Config("this command needs a `path`".into()))
}

pub fn integrate(job: &Job) -> Result<Outcome, CliError> {
    let artifacts = match &job.problem {
        Problem::Painleve {
            spec,
            theta,
            state,
            path,
            ..
        } => {
            let flow = PainleveFlow::new(spec.clone(), *theta);
            let labels = (
                vec!["t".to_string()],
                spec.state_layout.iter().map(|s| s.to_string()).collect(),
            );
            trajectory(&flow, state, require_path(path)?, job, labels, &spec.kind.to_string())?
        }
        Problem::Schlesinger { model, state, path } => {
            let mut flow = SchlesingerFlow::new(model.clone());
            flow.flip_p_equation = job.faults.flip_p_equation;
            trajectory(&flow, state, path, job, schlesinger_labels(model), "schlesinger")?
        }
    };
    Ok(Outcome {
        artifacts,
        passed: true,
    })
}

/// Pole times `a0, a1, …` and packed entries `q{ν}_{ij}`, then `p{ν}_{ij}`.
fn schlesinger_labels(model: &SchlesingerModel) -> (Vec<String>, Vec<String>) {
    let times = (0..model.pole_count).map(|nu| format!("a{nu}")).collect();
    let mut slots = Vec::new();
    for letter in ["q", "p"] {
        for nu in 0..model.pole_count {
            for i in 0..model.mat_dim {
                for j in 0..model.mat_dim {
                    slots.push(format!("{letter}{nu}_{i}{j}"));
                }
            }
        }
    }
    (times, slots)
}

fn trajectory<F: Flow>(
    flow: &F,
    initial: &F::State,
    path: &PathSpec,
    job: &Job,
    (time_labels, slot_labels): (Vec<String>, Vec<String>),
    system: &str,
) -> Result<Vec<Artifact>, CliError> {
    let run = integrate_path(flow, initial, path, &job.tol).map_err(integration_error)?;
    let samples = run.resample(flow, job.samples).map_err(integration_error)?;
    let rows = samples
        .into_iter()
        .map(|s| {
            Ok(Row {
                slots: flow.pack(&s.state, &s.times)?,
                s: s.s,
                times: s.times,
                ln_tau: s.ln_tau,
                action: s.action,
            })
        })
        .collect::<Result<Vec<_>, IntegrationError>>()
        .map_err(integration_error)?;
    let table = Trajectory {
        time_labels,
        slot_labels,
        rows,
    };
    let data = match job.format {
        Format::Csv => Artifact {
            name: "trajectory.csv".into(),
            bytes: table.to_csv().into_bytes(),
        },
        Format::Json => table.to_json(),
    };
    let summary = Summary {
        system: system.to_string(),
        samples: table.rows.len(),
        s_end: run.s_end(),
        gamma: run.gamma,
        start_times: path.waypoints[0].iter().map(|&z| z.into()).collect(),
        end_times: path.waypoints[path.waypoints.len() - 1]
            .iter()
            .map(|&z| z.into())
            .collect(),
        delta_ln_tau: run.delta_ln_tau.into(),
        delta_action: run.delta_action.into(),
        g_start: run.g_start.into(),
        g_end: run.g_end.into(),
        step_stats: run.stats,
    };
    Ok(vec![data, Artifact::json("summary.json", &summary)])
}

pub fn verify(job: &Job) -> Result<Outcome, CliError> {
    let mut entries: Vec<(String, ResidualReport)> = Vec::new();
    for (name, check) in &job.checks {
        let reports = match &job.problem {
            Problem::Painleve {
                spec,
                theta,
                state,
                t,
                path,
            } => painleve_check(job, *check, spec, theta, state, *t, path)?,
            Problem::Schlesinger { model, state, path } => schlesinger_check(job, *check, model, state, path)?,
        };
        entries.extend(reports.into_iter().map(|mut r| {
            if job.drawn {
                r.context.seed = Some(job.seed);
            }
            (name.clone(), r)
        }));
    }
    let passed = entries.iter().all(|(_, r)| r.passed);
    Ok(Outcome {
        artifacts: vec![output::reports(&entries)],
        passed,
    })
}

/// Endpoints for the concatenation check: the first three waypoints, or the
/// two ends with their midpoint.
fn triangle(path: &PathSpec) -> [Vec<ComplexScalar>; 3] {
    let w = &path.waypoints;
    if w.len() >= 3 {
        [w[0].clone(), w[1].clone(), w[2].clone()]
    } else {
        let mid = w[0].iter().zip(&w[1]).map(|(a, b)| (a + b) * 0.5).collect();
        [w[0].clone(), mid, w[1].clone()]
    }
}

fn integrator_check<F: Flow>(
    check: Check,
    flow: &F,
    initial: &F::State,
    path: &PathSpec,
    job: &Job,
) -> Result<ResidualReport, VerifyError> {
    match check {
        Check::StepHalving => check_integrator_step_halving(flow, initial, path, &job.tol),
        Check::Concatenation => {
            let [a, b, c] = triangle(path);
            check_integrator_concatenation(flow, initial, &a, &b, &c, &job.tol)
        }
        Check::Reversal => check_integrator_reversal(flow, initial, &path.waypoints[0], &path.waypoints[1], &job.tol),
        other => Err(VerifyError::Invalid(format!("{other:?} is not an integrator check"))),
    }
}

fn painleve_check(
    job: &Job,
    check: Check,
    spec: &SystemSpec,
    theta: &ThetaParams,
    state: &ExtendedState,
    t: ComplexScalar,
    path: &Option<PathSpec>,
) -> Result<Vec<ResidualReport>, CliError> {
    let faults = &job.faults;
    let ctx = || ReportContext::painleve(spec.kind, theta, t).with_note("fault injected");
    let reports = match check {
        Check::Lax => {
            let z = random_z_samples(spec.kind, t, LAX_Z_SAMPLES, &mut rng_from_seed(job.seed));
            if faults.flip_p_dot || faults.theta_for_b.is_some() {
                let probe = LaxProbe {
                    flip_p_dot: faults.flip_p_dot,
                    theta_for_b: faults.theta_for_b.map(Into::into),
                    ..Default::default()
                };
                let r = lax_residual(spec, theta, state, t, &z, &probe).map_err(verify_error)?;
                vec![ResidualReport::new("lax_compatibility", r, LAX_THRESHOLD, ctx())]
            } else {
                vec![check_lax_compatibility(spec, theta, state, t, &z).map_err(verify_error)?]
            }
        }
        Check::Hamilton => match faults.hamilton_extra_q {
            Some(extra) => {
                let probe = HamiltonProbe { extra_q: extra.into() };
                let r = hamilton_residual(spec, theta, state, t, &probe).map_err(verify_error)?;
                vec![ResidualReport::new("hamilton_equations", r, HAMILTON_THRESHOLD, ctx())]
            }
            None => vec![check_hamilton_equations(spec, theta, state, t).map_err(verify_error)?],
        },
        Check::Series => series_frames(spec, theta, state, t, faults.series_shift)?
            .into_iter()
            .map(|(frame, residual)| {
                let mut note = match frame.location {
                    SeriesPoint::Infinity => "point infinity".to_string(),
                    SeriesPoint::Finite(z) => format!("point {z}"),
                };
                if faults.series_shift.is_some() {
                    note.push_str(", fault injected");
                }
                let context = ReportContext::painleve(spec.kind, theta, t).with_note(note);
                ResidualReport::new("series_recursion", residual, SERIES_THRESHOLD, context)
            })
            .collect(),
        Check::ActionIdentity => {
            let options = ActionOptions {
                gamma_override: faults.gamma_override,
            };
            vec![
                check_action_identity(spec, theta, state, require_path(path)?, &job.tol, &options)
                    .map_err(verify_error)?,
            ]
        }
        Check::VariationalIdentity => {
            let options = VariationalOptions {
                omit_boundary_g: faults.omit_boundary_g,
                ..Default::default()
            };
            vec![
                check_variational_identity(spec, theta, state, require_path(path)?, &job.direction, &options)
                    .map_err(verify_error)?,
            ]
        }
        Check::TauLogDerivative => {
            let options = TauOptions {
                drop_correction: faults.drop_correction,
                ..Default::default()
            };
            check_tau_log_derivative(spec, theta, state, require_path(path)?, &job.tol, &options)
                .map_err(verify_error)?
        }
        Check::ScalarEquation => {
            let tol = job.tol.scaled(SCALAR_EQUATION_TOL_FACTOR);
            vec![
                check_scalar_equation(spec, theta, state, require_path(path)?, &tol, SCALAR_EQUATION_SAMPLES)
                    .map_err(verify_error)?,
            ]
        }
        Check::StepHalving | Check::Concatenation | Check::Reversal => {
            let flow = PainleveFlow::new(spec.clone(), *theta);
            vec![integrator_check(check, &flow, state, require_path(path)?, job).map_err(verify_error)?]
        }
        Check::SchlesingerSuite => return Err(CliError::Config("schlesinger_suite needs a Schlesinger model".into())),
    };
    Ok(reports)
}

fn schlesinger_check(
    job: &Job,
    check: Check,
    model: &SchlesingerModel,
    state: &SchlesingerState,
    path: &PathSpec,
) -> Result<Vec<ResidualReport>, CliError> {
    let mut flow = SchlesingerFlow::new(model.clone());
    flow.flip_p_equation = job.faults.flip_p_equation;
    match check {
        Check::SchlesingerSuite => {
            let options = SchlesingerOptions {
                tol: job.tol,
                flip_p_equation: job.faults.flip_p_equation,
                ..Default::default()
            };
            check_schlesinger_suite(model, state, &MultiTimePath::new(path.waypoints.clone()), &options)
                .map_err(verify_error)
        }
        other => Ok(vec![
            integrator_check(other, &flow, state, path, job).map_err(verify_error)?
        ]),
    }
}

/// Local frames at the closed-form order with their recursion residuals;
/// `shift` is added to one off-diagonal series entry of every frame.
fn series_frames(
    spec: &SystemSpec,
    theta: &ThetaParams,
    state: &ExtendedState,
    t: ComplexScalar,
    shift: Option<f64>,
) -> Result<Vec<(LocalFrame, f64)>, CliError> {
    let a = a_rational(spec, theta, state, t).map_err(|e| CliError::Abort(e.to_string()))?;
    let frames =
        local_frames(spec, theta, state, t, max_frame_order(spec.kind)).map_err(|e| CliError::Abort(e.to_string()))?;
    frames
        .into_iter()
        .map(|mut frame| {
            if let Some(delta) = shift {
                let k = (frame.series_coeffs.len().min(2)).saturating_sub(1);
                if let Some(g) = frame.series_coeffs.get_mut(k) {
                    g[(0, 1)] += c64(delta, 0.0);
                }
            }
            let residual = series_recursion_residual(&a, &frame).map_err(verify_error)?;
            Ok((frame, residual))
        })
        .collect()
}

pub fn series(job: &Job) -> Result<Outcome, CliError> {
    let Problem::Painleve {
        spec, theta, state, t, ..
    } = &job.problem
    else {
        return Err(CliError::Config("series applies to the Painlevé systems only".into()));
    };
    let frames: Vec<FrameOut> = series_frames(spec, theta, state, *t, job.faults.series_shift)?
        .into_iter()
        .map(|(frame, residual)| FrameOut {
            location: frame.location.into(),
            gauge: output::matrix_rows(&frame.gauge),
            coefficients: frame.series_coeffs.iter().map(output::matrix_rows).collect(),
            recursion_residual: residual,
            threshold: SERIES_THRESHOLD,
            passed: residual <= SERIES_THRESHOLD,
        })
        .collect();
    let passed = frames.iter().all(|f| f.passed);
    let out = SeriesOut {
        system: spec.kind.to_string(),
        t: (*t).into(),
        frames,
    };
    Ok(Outcome {
        artifacts: vec![Artifact::json("series.json", &out)],
        passed,
    })
}

/// Integration of a Schlesinger model, followed by its checks when any are listed.
pub fn schlesinger(job: &Job) -> Result<Outcome, CliError> {
    if !matches!(job.problem, Problem::Schlesinger { .. }) {
        return Err(CliError::Config(
            "the schlesinger command needs `\"system\": \"schlesinger\"`".into(),
        ));
    }
    let mut outcome = integrate(job)?;
    if !job.checks.is_empty() {
        let checked = verify(job)?;
        outcome.artifacts.extend(checked.artifacts);
        outcome.passed = checked.passed;
    }
    Ok(outcome)
}
