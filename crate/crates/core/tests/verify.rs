use painleve_tau::algebra::{c64, ComplexScalar, SeriesPoint};
use painleve_tau::integrate::{PainleveFlow, PathSpec, Tolerances};
use painleve_tau::schlesinger::MultiTimePath;
use painleve_tau::systems::{a_rational, local_frames, ExtendedState, PainleveKind, ThetaParams};
use painleve_tau::verify::random::{
    random_case, random_schlesinger_case, random_trajectory_case, random_z_samples, rng_from_seed, PainleveCase,
    TrajectoryCase,
};
use painleve_tau::verify::{
    check_action_identity, check_hamilton_equations, check_integrator_step_halving, check_lax_compatibility,
    check_schlesinger_suite, check_series_recursion, check_tau_log_derivative, check_variational_identity,
    hamilton_residual, lax_residual, series_recursion_residual, ActionOptions, HamiltonProbe, LaxProbe, ReportContext,
    ResidualReport, SchlesingerOptions, TauOptions, VariationalOptions, VerifyError,
};

fn re(x: f64) -> ComplexScalar {
    c64(x, 0.0)
}

fn trajectory(kind: PainleveKind, seed: u64) -> TrajectoryCase {
    random_trajectory_case(kind, seed, 1.0, &Tolerances::default()).unwrap()
}

fn z_samples(c: &PainleveCase) -> Vec<ComplexScalar> {
    random_z_samples(c.spec.kind, c.t, 8, &mut rng_from_seed(c.seed))
}

/// Residual grows at least five-fold when the injected perturbation grows ten-fold.
fn assert_linear_response(small: f64, large: f64) {
    assert!(large >= 5.0 * small, "residual went from {small:e} to {large:e}");
}

#[test]
fn reports_pass_exactly_up_to_the_threshold() {
    let ctx = ReportContext::default();
    assert!(ResidualReport::new("x", 1e-6, 1e-6, ctx.clone()).passed);
    assert!(!ResidualReport::new("x", 2e-6, 1e-6, ctx.clone()).passed);
    assert!(!ResidualReport::new("x", f64::NAN, 1e-6, ctx).passed);
}

#[test]
fn lax_check_and_its_controls() {
    let c = random_case(PainleveKind::P2, 21);
    let z = z_samples(&c);
    let honest = check_lax_compatibility(&c.spec, &c.theta, &c.state, c.t, &z).unwrap();
    assert!(honest.passed && honest.residual < 1e-6, "{:e}", honest.residual);
    assert_eq!(honest.context.kind.as_deref(), Some("P2"));

    let flipped = LaxProbe {
        flip_p_dot: true,
        ..Default::default()
    };
    assert!(lax_residual(&c.spec, &c.theta, &c.state, c.t, &z, &flipped).unwrap() > 1e-2);

    // The P2 deformation matrix does not read the exponents; the P6 one does.
    let c = random_case(PainleveKind::P6, 21);
    let z = z_samples(&c);
    let shifted = |delta: f64| {
        let probe = LaxProbe {
            theta_for_b: Some(ThetaParams {
                theta_inf: c.theta.theta_inf + delta,
                ..c.theta
            }),
            ..Default::default()
        };
        lax_residual(&c.spec, &c.theta, &c.state, c.t, &z, &probe).unwrap()
    };
    assert_linear_response(shifted(1e-4), shifted(1e-3));
    assert!(shifted(1e-3) > 1e-4);
}

#[test]
fn hamilton_check_and_its_control() {
    for kind in [PainleveKind::P2, PainleveKind::P6] {
        let c = random_case(kind, 31);
        let honest = check_hamilton_equations(&c.spec, &c.theta, &c.state, c.t).unwrap();
        assert!(honest.passed, "{kind}: {:e}", honest.residual);
    }
    let c = random_case(PainleveKind::P2, 31);
    let corrupted = |extra: f64| {
        let probe = HamiltonProbe { extra_q: re(extra) };
        hamilton_residual(&c.spec, &c.theta, &c.state, c.t, &probe).unwrap()
    };
    assert!((corrupted(1.0) - 1.0).abs() < 1e-6);
    assert_linear_response(corrupted(1e-3), corrupted(1e-2));
}

#[test]
fn series_check_and_its_control() {
    for (kind, order) in [(PainleveKind::P2, 3), (PainleveKind::P1, 5)] {
        let c = random_case(kind, 41);
        let report = check_series_recursion(&c.spec, &c.theta, &c.state, c.t, SeriesPoint::Infinity).unwrap();
        assert!(report.residual < 1e-9, "{kind}: {:e}", report.residual);
        let frames = local_frames(&c.spec, &c.theta, &c.state, c.t, order).unwrap();
        assert_eq!(frames[0].series_coeffs.len(), order);
    }

    let c = random_case(PainleveKind::P2, 41);
    let a = a_rational(&c.spec, &c.theta, &c.state, c.t).unwrap();
    let perturbed = |delta: f64| {
        let mut frame = local_frames(&c.spec, &c.theta, &c.state, c.t, 3).unwrap().remove(0);
        frame.series_coeffs[1][(0, 1)] += delta;
        series_recursion_residual(&a, &frame).unwrap()
    };
    assert!(perturbed(1e-3) >= 1e-4);
    assert_linear_response(perturbed(1e-4), perturbed(1e-3));

    let missing = check_series_recursion(&c.spec, &c.theta, &c.state, c.t, SeriesPoint::Finite(re(0.0)));
    assert!(matches!(missing, Err(VerifyError::NoFrame)));
}

#[test]
fn action_identity_on_a_zero_length_path() {
    let c = random_case(PainleveKind::P5, 3);
    let path = PathSpec::scalar(&[c.t, c.t]);
    let r = check_action_identity(
        &c.spec,
        &c.theta,
        &c.state,
        &path,
        &Tolerances::default(),
        &ActionOptions::default(),
    )
    .unwrap();
    assert_eq!(r.residual, 0.0);
}

#[test]
fn action_identity_needs_the_right_ratio() {
    let tc = trajectory(PainleveKind::P1, 51);
    let c = &tc.case;
    let tol = Tolerances::default();
    let run = |gamma: Option<f64>| {
        check_action_identity(
            &c.spec,
            &c.theta,
            &c.state,
            &tc.path,
            &tol,
            &ActionOptions { gamma_override: gamma },
        )
        .unwrap()
    };
    let honest = run(None);
    assert!(honest.residual < 1e-8, "{:e}", honest.residual);
    assert!(run(Some(1.0)).residual > 1e-3);
    assert_linear_response(run(Some(2.0 + 1e-4)).residual, run(Some(2.0 + 1e-3)).residual);
    assert_eq!(run(Some(1.0)).context.note.as_deref(), Some("gamma = 1"));
}

#[test]
fn variational_identity_and_its_controls() {
    let tc = trajectory(PainleveKind::P2, 61);
    let c = &tc.case;
    let direction = ExtendedState::new(re(0.6), c64(-0.3, 0.8));
    let options = VariationalOptions::default();
    let honest = check_variational_identity(&c.spec, &c.theta, &c.state, &tc.path, &direction, &options).unwrap();
    assert!(honest.residual < 1e-5, "{:e}", honest.residual);

    let zero = check_variational_identity(
        &c.spec,
        &c.theta,
        &c.state,
        &tc.path,
        &ExtendedState::default(),
        &options,
    )
    .unwrap();
    assert_eq!(zero.residual, 0.0);

    // Moving the gauge logarithm changes G but not the trajectory of (q, p).
    let gauge_only = ExtendedState {
        log_k: re(1.0),
        ..direction
    };
    let omit = VariationalOptions {
        omit_boundary_g: true,
        ..options.clone()
    };
    let without_g = check_variational_identity(&c.spec, &c.theta, &c.state, &tc.path, &gauge_only, &omit).unwrap();
    assert!(without_g.residual > 1e-3, "{:e}", without_g.residual);

    let tiny = VariationalOptions { h: 1e-12, ..options };
    assert!(matches!(
        check_variational_identity(&c.spec, &c.theta, &c.state, &tc.path, &direction, &tiny),
        Err(VerifyError::StepTooSmall(_))
    ));
}

#[test]
fn tau_density_and_its_control() {
    let tol = Tolerances::default();
    let tc = trajectory(PainleveKind::P4, 71);
    let c = &tc.case;
    let honest = check_tau_log_derivative(&c.spec, &c.theta, &c.state, &tc.path, &tol, &TauOptions::default()).unwrap();
    assert_eq!(honest.len(), 1);
    assert!(honest[0].residual < 1e-7, "{:e}", honest[0].residual);

    let dropped = TauOptions {
        drop_correction: true,
        ..Default::default()
    };
    let corrupted = check_tau_log_derivative(&c.spec, &c.theta, &c.state, &tc.path, &tol, &dropped).unwrap();
    let run = painleve_tau::integrate::integrate_painleve(&c.spec, &c.theta, &c.state, &tc.path, &tol).unwrap();
    let max_half_q = run.samples.iter().map(|s| s.state.q.norm() / 2.0).fold(0.0, f64::max);
    assert!(!corrupted[0].passed);
    assert!(corrupted[0].residual <= max_half_q * 1.001);
    assert!(corrupted[0].residual >= 0.5 * max_half_q);

    let tc = trajectory(PainleveKind::P3, 71);
    let c = &tc.case;
    let p3 = check_tau_log_derivative(&c.spec, &c.theta, &c.state, &tc.path, &tol, &TauOptions::default()).unwrap();
    assert_eq!(p3.len(), 2);
    assert_eq!(p3[1].name, "tau_remark");
    assert!(p3.iter().all(|r| r.passed));
}

#[test]
fn step_halving_report() {
    let tc = trajectory(PainleveKind::P2, 81);
    let c = &tc.case;
    let flow = PainleveFlow::new(c.spec.clone(), c.theta);
    let r = check_integrator_step_halving(&flow, &c.state, &tc.path, &Tolerances::default()).unwrap();
    assert!(r.passed, "{:e}", r.residual);
}

#[test]
fn schlesinger_suite_and_its_control() {
    let (model, state) = random_schlesinger_case(2, 3, 91).unwrap();
    let path = MultiTimePath::rectangle(&state.poles, 0, 1, 0.1);
    let honest = check_schlesinger_suite(&model, &state, &path, &SchlesingerOptions::default()).unwrap();
    let names: Vec<_> = honest.iter().map(|r| r.name.as_str()).collect();
    assert_eq!(
        names,
        [
            "isospectrality",
            "residue_sum_conservation",
            "loop_closedness",
            "commutator_agreement",
            "mixed_partials",
            "schlesinger_action_identity"
        ]
    );
    assert!(honest.iter().all(|r| r.passed));

    let flipped = SchlesingerOptions {
        flip_p_equation: true,
        ..Default::default()
    };
    let corrupted = check_schlesinger_suite(&model, &state, &path, &flipped).unwrap();
    let commutator = corrupted.iter().find(|r| r.name == "commutator_agreement").unwrap();
    assert!(!commutator.passed && commutator.residual > 1e-2);

    let open = MultiTimePath::new(vec![state.poles.clone(), state.poles.iter().map(|a| a * 1.1).collect()]);
    let reports = check_schlesinger_suite(&model, &state, &open, &SchlesingerOptions::default()).unwrap();
    assert!(reports.iter().all(|r| r.name != "loop_closedness"));
}

#[test]
fn checks_are_deterministic() {
    let tc = trajectory(PainleveKind::P6, 5);
    let c = &tc.case;
    let run = || {
        check_tau_log_derivative(
            &c.spec,
            &c.theta,
            &c.state,
            &tc.path,
            &Tolerances::default(),
            &TauOptions::default(),
        )
        .unwrap()
    };
    assert_eq!(run(), run());
    assert_eq!(trajectory(PainleveKind::P6, 5).path, tc.path);
}
