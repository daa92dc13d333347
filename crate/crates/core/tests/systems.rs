use painleve_tau::algebra::{c64, ComplexScalar, SeriesPoint, SquareMatrix};
use painleve_tau::schlesinger::spectrum_distance;
use painleve_tau::systems::{
    a_matrix, a_rational, density_breakdown, hamiltonian, local_frames, max_frame_order, painleve_residual,
    pvi_residue_params, vector_field, ExtendedState, PainleveKind, SystemError, SystemSpec, ThetaParams,
};
use painleve_tau::verify::hamilton_residual;
use painleve_tau::verify::random::{random_case, random_z_samples, rng_from_seed};
use painleve_tau::verify::HamiltonProbe;
use proptest::prelude::*;

fn re(x: f64) -> ComplexScalar {
    c64(x, 0.0)
}

fn state(q: f64, p: f64) -> ExtendedState {
    ExtendedState::new(re(q), re(p))
}

fn theta_inf(x: f64) -> ThetaParams {
    ThetaParams {
        theta_inf: re(x),
        ..Default::default()
    }
}

#[test]
fn hamiltonian_examples() {
    let p1 = SystemSpec::new(PainleveKind::P1);
    let p2 = SystemSpec::new(PainleveKind::P2);
    let th = ThetaParams::default();
    assert_eq!(
        hamiltonian(&p2, &theta_inf(0.7), &state(0.0, 0.0), re(0.3)).unwrap(),
        re(0.0)
    );
    assert_eq!(hamiltonian(&p1, &th, &state(1.0, 2.0), re(3.0)).unwrap(), re(-3.0));
    assert_eq!(
        hamiltonian(&p2, &theta_inf(3.0), &state(1.0, 2.0), re(0.0)).unwrap(),
        re(7.0)
    );
}

#[test]
fn vector_field_examples() {
    let p1 = SystemSpec::new(PainleveKind::P1);
    let p2 = SystemSpec::new(PainleveKind::P2);
    let v = vector_field(&p2, &theta_inf(1.0), &state(0.0, 0.0), re(0.0)).unwrap();
    assert_eq!((v.q, v.p, v.log_k), (re(0.0), re(-1.0), re(0.0)));
    let v = vector_field(&p1, &ThetaParams::default(), &state(0.0, 0.0), re(0.0)).unwrap();
    assert_eq!((v.q, v.p), (re(0.0), re(0.0)));
    let v = vector_field(&p2, &theta_inf(0.0), &state(1.0, 0.0), re(2.0)).unwrap();
    assert_eq!((v.q, v.p, v.log_k), (re(2.0), re(0.0), re(-1.0)));
}

#[test]
fn density_examples() {
    let p4 = SystemSpec::new(PainleveKind::P4);
    let d = density_breakdown(&p4, &ThetaParams::default(), &state(2.0, 0.0), re(0.0)).unwrap();
    assert_eq!(d.hamiltonian, re(-2.0));
    assert_eq!(d.tau_density, re(-1.0));

    let p1 = SystemSpec::new(PainleveKind::P1);
    let d = density_breakdown(&p1, &ThetaParams::default(), &state(1.0, 2.0), re(3.0)).unwrap();
    assert_eq!(d.tau_density, re(-6.0));

    let p2 = SystemSpec::new(PainleveKind::P2);
    let d = density_breakdown(&p2, &theta_inf(0.37), &state(0.0, 0.0), re(0.0)).unwrap();
    assert_eq!(d.g_value, re(0.0));
}

#[test]
fn gamma_is_two_only_for_the_first_equation() {
    for kind in PainleveKind::ALL {
        let expected = if kind == PainleveKind::P1 { 2 } else { 1 };
        assert_eq!(SystemSpec::new(kind).gamma, expected);
        assert_eq!(SystemSpec::new(kind).state_layout.len(), kind.state_len());
    }
    assert_eq!("P4".parse::<PainleveKind>().unwrap(), PainleveKind::P4);
    assert!("P7".parse::<PainleveKind>().is_err());
}

#[test]
fn singular_times_and_points_are_guarded() {
    let th = ThetaParams {
        theta0: re(0.3),
        theta1: re(0.2),
        theta_t: re(0.1),
        theta_inf: re(0.4),
    };
    let p3 = SystemSpec::new(PainleveKind::P3);
    assert!(matches!(
        hamiltonian(&p3, &th, &state(0.5, 0.5), re(0.0)),
        Err(SystemError::Guard { .. })
    ));
    let p6 = SystemSpec::new(PainleveKind::P6);
    assert!(matches!(
        hamiltonian(&p6, &th, &state(0.5, 0.5), re(1.0)),
        Err(SystemError::Guard { .. })
    ));
    let t = c64(0.4, 0.6);
    let at_t = ExtendedState::new(t, re(0.5));
    assert!(vector_field(&p6, &th, &at_t, t).is_err());
    let p4 = SystemSpec::new(PainleveKind::P4);
    assert!(vector_field(&p4, &th, &state(0.0, 0.5), re(0.3)).is_err());
}

#[test]
fn p2_leading_coefficient_is_sigma3() {
    let c = random_case(PainleveKind::P2, 11);
    let a = a_rational(&c.spec, &c.theta, &c.state, c.t).unwrap();
    let lead = a.poly().last().unwrap();
    assert_eq!(a.poly().len(), 3);
    assert!((lead - &SquareMatrix::sigma3()).max_norm() < 1e-15);
}

#[test]
fn p6_upper_right_entry() {
    for seed in 0..5 {
        let c = random_case(PainleveKind::P6, 40 + seed);
        let k = c.state.log_k.exp();
        let mut rng = rng_from_seed(seed);
        for z in random_z_samples(PainleveKind::P6, c.t, 4, &mut rng) {
            let a = a_matrix(&c.spec, &c.theta, &c.state, c.t, z).unwrap();
            let expected = k * (z - c.state.q) / (z * (z - 1.0) * (z - c.t));
            assert!((a[(0, 1)] - expected).norm() < 1e-12 * (1.0 + expected.norm()));
        }
    }
}

#[test]
fn frame_examples() {
    let c = random_case(PainleveKind::P2, 5);
    let h = hamiltonian(&c.spec, &c.theta, &c.state, c.t).unwrap();
    let frames = local_frames(&c.spec, &c.theta, &c.state, c.t, 3).unwrap();
    assert_eq!(frames.len(), 1);
    assert_eq!(frames[0].series_coeffs.len(), 3);
    assert!((frames[0].series_coeffs[0][(0, 0)] + h).norm() < 1e-13);

    let c = random_case(PainleveKind::P1, 5);
    let frames = local_frames(&c.spec, &c.theta, &c.state, c.t, 5).unwrap();
    let g1 = &frames[0].series_coeffs[0];
    assert_eq!(frames[0].series_coeffs.len(), 5);
    assert_eq!((g1[(0, 1)], g1[(1, 0)]), (re(0.0), re(0.0)));

    let c = random_case(PainleveKind::P3, 5);
    let frames = local_frames(&c.spec, &c.theta, &c.state, c.t, 1).unwrap();
    let at_zero = frames
        .iter()
        .find(|f| f.location == SeriesPoint::Finite(re(0.0)))
        .unwrap();
    let a = a_rational(&c.spec, &c.theta, &c.state, c.t).unwrap();
    let a_minus_2 = a.expand_at(SeriesPoint::Finite(re(0.0)), 0).coeff(-2).unwrap();
    let half = c.t * 0.5;
    let conj = &(&at_zero.gauge * &SquareMatrix::diagonal(&[-half, half])) * &at_zero.gauge.inverse().unwrap();
    assert!((&conj - &a_minus_2).max_norm() < 1e-12);
}

#[test]
fn frame_orders_are_bounded() {
    for kind in PainleveKind::ALL {
        let c = random_case(kind, 3);
        let max = max_frame_order(kind);
        assert!(local_frames(&c.spec, &c.theta, &c.state, c.t, max).is_ok());
        assert!(matches!(
            local_frames(&c.spec, &c.theta, &c.state, c.t, max + 1),
            Err(SystemError::OrderUnavailable { .. })
        ));
    }
    let c = random_case(PainleveKind::P6, 3);
    assert_eq!(local_frames(&c.spec, &c.theta, &c.state, c.t, 1).unwrap().len(), 3);
}

#[test]
fn scalar_residual_examples() {
    let p2 = SystemSpec::new(PainleveKind::P2);
    let alpha = 0.3;
    let r = painleve_residual(&p2, &theta_inf(0.5 - alpha), re(0.0), re(1.7), re(alpha), re(0.0)).unwrap();
    assert_eq!(r, re(0.0));
    let p1 = SystemSpec::new(PainleveKind::P1);
    let t = c64(0.3, -0.8);
    assert_eq!(
        painleve_residual(&p1, &ThetaParams::default(), re(0.0), re(2.0), t, t).unwrap(),
        re(0.0)
    );
}

#[test]
fn p2_scalar_equation_follows_from_the_system() {
    let spec = SystemSpec::new(PainleveKind::P2);
    for seed in 0..20 {
        let c = random_case(PainleveKind::P2, 900 + seed);
        let v = vector_field(&spec, &c.theta, &c.state, c.t).unwrap();
        // q̇ = p + q² + t/2 differentiated once.
        let q_ddot = v.p + c.state.q * v.q * 2.0 + 0.5;
        let r = painleve_residual(&spec, &c.theta, c.state.q, v.q, q_ddot, c.t).unwrap();
        assert!(r.norm() < 1e-10, "seed {seed}: {:e}", r.norm());
    }
}

#[test]
fn p6_residue_parameters_satisfy_their_constraints() {
    for seed in 0..20 {
        let c = random_case(PainleveKind::P6, 300 + seed);
        let th = c.theta;
        let x = pvi_residue_params(&th, &c.state, c.t).unwrap();
        let scale = 1.0
            + [x.x0, x.x1, x.xt, x.u, x.v, x.w]
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
        let e1 = x.x0 + th.theta0 + x.x1 + th.theta1 + x.xt + th.theta_t + th.theta_inf;
        let e2 = x.u * x.x0 + x.v * x.x1 + x.w * x.xt;
        let e3 = (x.x0 + th.theta0 * 2.0) / x.u + (x.x1 + th.theta1 * 2.0) / x.v + (x.xt + th.theta_t * 2.0) / x.w;
        let e4 = x.u * x.x0 * c.t - x.k * c.state.q;
        for (name, e) in [("e1", e1), ("e2", e2), ("e3", e3), ("e4", e4)] {
            assert!(e.norm() < 1e-10 * scale * scale, "seed {seed} {name}: {:e}", e.norm());
        }
    }
}

fn max_eig_deviation(m: &SquareMatrix, expected: ComplexScalar) -> f64 {
    spectrum_distance(&m.eigenvalues(), &[expected, -expected])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn hamilton_consistency(kind_idx in 0..6usize, seed in 0..u64::MAX / 2) {
        let kind = PainleveKind::ALL[kind_idx];
        let c = random_case(kind, seed);
        let r = hamilton_residual(&c.spec, &c.theta, &c.state, c.t, &HamiltonProbe::default()).unwrap();
        prop_assert!(r < 1e-6, "{} seed {}: {:e}", kind, seed, r);
    }

    #[test]
    fn lax_matrices_are_traceless(kind_idx in 0..6usize, seed in 0..u64::MAX / 2) {
        let kind = PainleveKind::ALL[kind_idx];
        let c = random_case(kind, seed);
        let mut rng = rng_from_seed(seed);
        for z in random_z_samples(kind, c.t, 4, &mut rng) {
            let a = a_matrix(&c.spec, &c.theta, &c.state, c.t, z).unwrap();
            prop_assert!(a.trace().norm() < 1e-12 * (1.0 + a.max_norm()));
        }
    }

    #[test]
    fn density_breakdown_adds_up(kind_idx in 0..6usize, seed in 0..u64::MAX / 2) {
        let kind = PainleveKind::ALL[kind_idx];
        let c = random_case(kind, seed);
        let d = density_breakdown(&c.spec, &c.theta, &c.state, c.t).unwrap();
        prop_assert_eq!(d.tau_density, d.hamiltonian + d.tau_correction);
    }

    #[test]
    fn p6_residues_sum_to_the_exponent_at_infinity(seed in 0..u64::MAX / 2) {
        let c = random_case(PainleveKind::P6, seed);
        let a = a_rational(&c.spec, &c.theta, &c.state, c.t).unwrap();
        let (finite, _) = a.residues();
        prop_assert_eq!(finite.len(), 3);
        let mut total = SquareMatrix::zeros(2);
        for (_, r) in &finite {
            total += r;
        }
        let expected = SquareMatrix::sigma3().scale(-c.theta.theta_inf);
        prop_assert!((&total - &expected).max_norm() < 1e-10);
    }

    #[test]
    fn designated_residues_have_their_exponents(kind_idx in 2..6usize, seed in 0..u64::MAX / 2) {
        let kind = PainleveKind::ALL[kind_idx];
        let c = random_case(kind, seed);
        let th = c.theta;
        let a = a_rational(&c.spec, &c.theta, &c.state, c.t).unwrap();
        let coeff = |at: f64, k: i32| a.expand_at(SeriesPoint::Finite(re(at)), 0).coeff(k).unwrap();
        let checks: Vec<(SquareMatrix, ComplexScalar)> = match kind {
            PainleveKind::P3 => vec![(coeff(0.0, -2), c.t * 0.5)],
            PainleveKind::P4 => vec![(coeff(0.0, -1), th.theta0)],
            PainleveKind::P5 => vec![(coeff(0.0, -1), th.theta0), (coeff(1.0, -1), th.theta1)],
            _ => {
                let at_t = a.expand_at(SeriesPoint::Finite(c.t), 0).coeff(-1).unwrap();
                vec![(coeff(0.0, -1), th.theta0), (coeff(1.0, -1), th.theta1), (at_t, th.theta_t)]
            }
        };
        for (m, expected) in checks {
            let dev = max_eig_deviation(&m, expected);
            prop_assert!(dev < 1e-9, "{} seed {}: {:e}", kind, seed, dev);
        }
    }
}
