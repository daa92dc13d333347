use painleve_tau::algebra::{c64, ComplexScalar};
use painleve_tau::integrate::{
    continue_to_waypoint, integrate_painleve, integrate_path, Flow, IntegrationError, PainleveFlow, PathSpec,
    Tolerances,
};
use painleve_tau::systems::{hamiltonian, ExtendedState, PainleveKind, SystemSpec, ThetaParams};
use painleve_tau::verify::random::{random_case, random_trajectory_case};
use painleve_tau::verify::{check_integrator_concatenation, check_integrator_reversal};
use proptest::prelude::*;

fn re(x: f64) -> ComplexScalar {
    c64(x, 0.0)
}

fn max_diff(a: &[ComplexScalar], b: &[ComplexScalar]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn zero_length_path_changes_nothing() {
    let c = random_case(PainleveKind::P4, 1);
    let path = PathSpec::scalar(&[c.t, c.t]);
    let r = integrate_painleve(&c.spec, &c.theta, &c.state, &path, &Tolerances::default()).unwrap();
    assert_eq!(r.delta_ln_tau, re(0.0));
    assert_eq!(r.delta_action, re(0.0));
    assert_eq!(r.g_end, r.g_start);
    assert_eq!(*r.final_state(), c.state);
}

#[test]
fn runs_are_deterministic() {
    let tc = random_trajectory_case(PainleveKind::P5, 3, 1.0, &Tolerances::default()).unwrap();
    let c = &tc.case;
    let a = integrate_painleve(&c.spec, &c.theta, &c.state, &tc.path, &Tolerances::default()).unwrap();
    let b = integrate_painleve(&c.spec, &c.theta, &c.state, &tc.path, &Tolerances::default()).unwrap();
    assert_eq!(a.samples, b.samples);
    assert_eq!(a.stats, b.stats);
    assert_eq!(a.delta_ln_tau, b.delta_ln_tau);
}

#[test]
fn samples_follow_the_path_parameter() {
    let tc = random_trajectory_case(PainleveKind::P3, 9, 1.0, &Tolerances::default()).unwrap();
    let c = &tc.case;
    let r = integrate_painleve(&c.spec, &c.theta, &c.state, &tc.path, &Tolerances::default()).unwrap();
    assert_eq!(r.samples.len(), r.stats.accepted + 1);
    assert!(r.samples.windows(2).all(|w| w[0].s < w[1].s));
    assert_eq!(r.samples.last().unwrap().s, r.s_end());
    let last = r.samples.last().unwrap();
    assert_eq!((last.ln_tau, last.action), (r.delta_ln_tau, r.delta_action));
}

#[test]
fn resampling_contract() {
    let tc = random_trajectory_case(PainleveKind::P2, 4, 1.0, &Tolerances::default()).unwrap();
    let c = &tc.case;
    let flow = PainleveFlow::new(c.spec.clone(), c.theta);
    let r = integrate_path(&flow, &c.state, &tc.path, &Tolerances::default()).unwrap();

    let ends = r.resample(&flow, 2).unwrap();
    assert_eq!(ends.len(), 2);
    assert_eq!(ends[0], r.samples[0]);
    assert_eq!(&ends[1], r.samples.last().unwrap());

    assert_eq!(r.resample(&flow, r.samples.len()).unwrap(), r.samples);
    assert!(matches!(r.resample(&flow, 0), Err(IntegrationError::EmptyResult)));

    let many = r.resample(&flow, 17).unwrap();
    assert!(many.windows(2).all(|w| w[0].s < w[1].s));
}

#[test]
fn resampled_points_match_a_reintegration() {
    let tol = Tolerances::default();
    for seed in 0..3 {
        let tc = random_trajectory_case(PainleveKind::P4, 40 + seed, 1.0, &tol).unwrap();
        let c = &tc.case;
        let flow = PainleveFlow::new(c.spec.clone(), c.theta);
        let r = integrate_path(&flow, &c.state, &tc.path, &tol).unwrap();
        for sample in r.resample(&flow, 7).unwrap() {
            if sample.s == 0.0 {
                continue;
            }
            let partial = PathSpec::scalar(&[c.t, sample.times[0]]);
            let direct = integrate_path(&flow, &c.state, &partial, &tol).unwrap();
            let n = c.spec.kind.state_len();
            let d = max_diff(
                &sample.state.to_slots(c.spec.kind),
                &direct.final_state().to_slots(c.spec.kind),
            );
            assert!(d < 1e-8, "seed {seed} s {}: {d:e}", sample.s);
            assert!((sample.ln_tau - direct.delta_ln_tau).norm() < 1e-8);
            assert_eq!(n, r.state_len());
        }
    }
}

#[test]
fn dense_output_matches_the_vector_field_at_step_ends() {
    let tc = random_trajectory_case(PainleveKind::P6, 2, 1.0, &Tolerances::default()).unwrap();
    let c = &tc.case;
    let flow = PainleveFlow::new(c.spec.clone(), c.theta);
    let r = integrate_path(&flow, &c.state, &tc.path, &Tolerances::default()).unwrap();
    let n = r.state_len();
    for sample in &r.samples[..r.samples.len() - 1] {
        let y = r.vector_at(sample.s).unwrap();
        let expected = flow.pack(&sample.state, &sample.times).unwrap();
        assert!(max_diff(&y[..n], &expected) < 1e-14 * (1.0 + r.max_state_modulus()));
        let mut dy = vec![re(0.0); n];
        let (tau, action) = flow
            .rates(&y, &sample.times, &r.velocity_at(sample.s), &mut dy)
            .unwrap();
        dy.extend([tau, action]);
        let got = r.derivative_at(sample.s).unwrap();
        let scale = 1.0 + dy.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(max_diff(&got, &dy) < 1e-12 * scale, "s = {}", sample.s);
    }
}

fn gauss_legendre_5() -> [(f64, f64); 5] {
    let a = (5.0 - 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
    let b = (5.0 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
    let wa = (322.0 + 13.0 * 70.0f64.sqrt()) / 900.0;
    let wb = (322.0 - 13.0 * 70.0f64.sqrt()) / 900.0;
    [(0.0, 128.0 / 225.0), (a, wa), (-a, wa), (b, wb), (-b, wb)]
}

#[test]
fn p1_tau_increment_is_the_quadrature_of_twice_the_hamiltonian() {
    let tol = Tolerances::default();
    let nodes = gauss_legendre_5();
    for seed in 0..4 {
        let tc = random_trajectory_case(PainleveKind::P1, 60 + seed, 0.5, &tol).unwrap();
        let c = &tc.case;
        let r = integrate_painleve(&c.spec, &c.theta, &c.state, &tc.path, &tol).unwrap();
        let v = r.velocity_at(0.0)[0];
        let panels = 200;
        let mut total = re(0.0);
        for k in 0..panels {
            let (lo, hi) = (k as f64 / panels as f64, (k + 1) as f64 / panels as f64);
            for &(x, w) in &nodes {
                let s = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x;
                let y = r.vector_at(s).unwrap();
                let state = ExtendedState::new(y[0], y[1]);
                let t = r.path.times_at(s)[0];
                let h = hamiltonian(&c.spec, &c.theta, &state, t).unwrap();
                total += h * 2.0 * v * (0.5 * (hi - lo) * w);
            }
        }
        let d = (total - r.delta_ln_tau).norm();
        assert!(d < 1e-8, "seed {seed}: {d:e}");
    }
}

#[test]
fn halving_the_tolerance_barely_moves_the_endpoint() {
    let spec = SystemSpec::new(PainleveKind::P2);
    let theta = ThetaParams::default();
    let c = random_case(PainleveKind::P2, 77);
    let path = PathSpec::scalar(&[re(1.0), re(2.0)]);
    let tol = Tolerances::default();
    let a = integrate_painleve(&spec, &theta, &c.state, &path, &tol).unwrap();
    let b = integrate_painleve(&spec, &theta, &c.state, &path, &tol.scaled(0.5)).unwrap();
    let d = max_diff(
        &a.final_state().to_slots(spec.kind),
        &b.final_state().to_slots(spec.kind),
    );
    assert!(d < 1e-8, "{d:e}");
}

#[test]
fn extending_a_run_matches_a_two_segment_run() {
    let tol = Tolerances::default();
    let tc = random_trajectory_case(PainleveKind::P2, 8, 0.5, &tol).unwrap();
    let c = &tc.case;
    let flow = PainleveFlow::new(c.spec.clone(), c.theta);
    let end = tc.path.waypoints[1][0];
    let back = c.t + (end - c.t) * c64(0.0, 1.0);
    let first = integrate_path(&flow, &c.state, &tc.path, &tol).unwrap();
    let extended = continue_to_waypoint(&flow, &first, vec![back], &tol).unwrap();
    let direct = integrate_path(&flow, &c.state, &PathSpec::scalar(&[c.t, end, back]), &tol).unwrap();
    assert_eq!(extended.path, direct.path);
    assert!((extended.delta_ln_tau - direct.delta_ln_tau).norm() < 1e-9);
    assert!((extended.delta_action - direct.delta_action).norm() < 1e-9);
    assert!(extended.samples.windows(2).all(|w| w[0].s < w[1].s));
}

#[test]
fn invalid_inputs_are_rejected_up_front() {
    let c = random_case(PainleveKind::P3, 2);
    let tol = Tolerances::default();
    let short = PathSpec::scalar(&[c.t]);
    assert!(matches!(
        integrate_painleve(&c.spec, &c.theta, &c.state, &short, &tol),
        Err(IntegrationError::InvalidPath(_))
    ));
    // The segment from -1 to 1 runs through the singular time 0.
    let through = PathSpec::scalar(&[re(-1.0), re(1.0)]);
    assert!(matches!(
        integrate_painleve(&c.spec, &c.theta, &c.state, &through, &tol),
        Err(IntegrationError::InvalidPath(_))
    ));
    let bad_tol = Tolerances { rel_tol: -1.0, ..tol };
    let path = PathSpec::scalar(&[c.t, c.t + 0.1]);
    assert!(matches!(
        integrate_painleve(&c.spec, &c.theta, &c.state, &path, &bad_tol),
        Err(IntegrationError::InvalidTolerances(_))
    ));
}

#[test]
fn movable_poles_abort_the_run() {
    let spec = SystemSpec::new(PainleveKind::P1);
    // Large data blows up well before t = 2.
    let state = ExtendedState::new(re(10.0), re(30.0));
    let path = PathSpec::scalar(&[re(0.0), re(2.0)]);
    let err = integrate_painleve(&spec, &ThetaParams::default(), &state, &path, &Tolerances::default()).unwrap_err();
    assert!(err.is_runtime_abort(), "{err}");
    match err {
        IntegrationError::StepUnderflow { last_s, .. }
        | IntegrationError::NonFinite { last_s, .. }
        | IntegrationError::TooManySteps { last_s, .. } => {
            assert!(last_s > 0.0 && last_s < 1.0)
        }
        other => panic!("unexpected {other}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn concatenation_and_reversal(kind_idx in 0..6usize, seed in 0..100_000u64) {
        let kind = PainleveKind::ALL[kind_idx];
        let tol = Tolerances::default();
        let tc = random_trajectory_case(kind, seed, 0.5, &tol).unwrap();
        let c = &tc.case;
        let flow = PainleveFlow::new(c.spec.clone(), c.theta);
        let end = tc.path.waypoints[1][0];
        let mid = (c.t + end) * 0.5;
        let split = check_integrator_concatenation(&flow, &c.state, &[c.t], &[mid], &[end], &tol).unwrap();
        prop_assert!(split.passed, "{} seed {}: {:e}", kind, seed, split.residual);
        let there_and_back = check_integrator_reversal(&flow, &c.state, &[c.t], &[end], &tol).unwrap();
        prop_assert!(there_and_back.passed, "{} seed {}: {:e}", kind, seed, there_and_back.residual);
    }
}
