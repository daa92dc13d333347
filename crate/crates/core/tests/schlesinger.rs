use painleve_tau::algebra::{c64, ComplexScalar, SquareMatrix};
use painleve_tau::integrate::{integrate_schlesinger, PathSpec, Tolerances};
use painleve_tau::schlesinger::{
    min_separation, pack, residue_rates, residue_rates_from_tangent, schlesinger_hamiltonians, schlesinger_tau_density,
    schlesinger_vector_field, unpack, MultiTimePath, SchlesingerError, SchlesingerModel, SchlesingerState,
};
use painleve_tau::verify::random::random_schlesinger_case;
use painleve_tau::verify::{check_schlesinger_suite, commutator_agreement, SchlesingerOptions};
use proptest::prelude::*;

fn re(x: f64) -> ComplexScalar {
    c64(x, 0.0)
}

/// A state given directly by its residues, with `Q = A`, `P = I`.
fn from_residues(poles: &[f64], residues: Vec<SquareMatrix>) -> SchlesingerState {
    SchlesingerState {
        poles: poles.iter().map(|&a| re(a)).collect(),
        p_mats: vec![SquareMatrix::identity(residues[0].dim()); residues.len()],
        q_mats: residues,
    }
}

fn antidiag() -> SquareMatrix {
    SquareMatrix::from_2x2(re(0.0), re(1.0), re(1.0), re(0.0))
}

/// Diagonal residues `c_ν σ3`; they commute, so nothing moves.
fn commuting_case(poles: &[f64], scales: &[f64]) -> (SchlesingerModel, SchlesingerState) {
    let total: f64 = scales.iter().sum();
    let model = SchlesingerModel::new(
        scales.iter().map(|&c| vec![re(c), re(-c)]).collect(),
        vec![re(-total), re(total)],
    )
    .unwrap();
    let residues = scales.iter().map(|&c| SquareMatrix::sigma3().scale(re(c))).collect();
    (model, from_residues(poles, residues))
}

#[test]
fn hamiltonian_examples() {
    // The Hamiltonians read only the state.
    let model = SchlesingerModel {
        mat_dim: 2,
        pole_count: 2,
        thetas: vec![vec![re(1.0), re(-1.0)]; 2],
        theta_inf: vec![re(-2.0), re(2.0)],
    };
    let state = from_residues(&[0.0, 1.0], vec![SquareMatrix::sigma3(), SquareMatrix::sigma3()]);
    let h = schlesinger_hamiltonians(&model, &state).unwrap();
    assert_eq!(h[0], re(-2.0));
    assert_eq!(h[1], re(2.0));
    let d = schlesinger_tau_density(&model, &state).unwrap();
    assert_eq!(d.tau, h);

    let state = from_residues(&[0.0, 1.0], vec![SquareMatrix::sigma3(), antidiag()]);
    let h = schlesinger_hamiltonians(&model, &state).unwrap();
    assert_eq!(h[0], re(0.0));
}

#[test]
fn two_pole_hamiltonians_are_antisymmetric() {
    let (model, state) = random_schlesinger_case(3, 2, 17).unwrap();
    let h = schlesinger_hamiltonians(&model, &state).unwrap();
    assert!((h[0] + h[1]).norm() < 1e-13 * (1.0 + h[0].norm()));
}

#[test]
fn commuting_residues_are_frozen() {
    let (model, state) = commuting_case(&[0.0, 1.0, -1.5], &[0.3, 0.2, -0.1]);
    for nu in 0..3 {
        let tangent = schlesinger_vector_field(&model, &state, nu).unwrap();
        for rate in residue_rates_from_tangent(&state, &tangent) {
            assert!(rate.max_norm() < 1e-15);
        }
    }
    let path = MultiTimePath::rectangle(&state.poles, 0, 1, 0.1);
    let reports = check_schlesinger_suite(&model, &state, &path, &SchlesingerOptions::default()).unwrap();
    assert_eq!(reports.len(), 6);
    for r in reports {
        assert!(r.residual < 1e-10, "{}: {:e}", r.name, r.residual);
    }

    // Along an open path the densities are the initial residues evaluated at the moved poles.
    let moved = vec![re(0.2), re(1.1), c64(-1.5, 0.4)];
    let open = PathSpec::new(vec![state.poles.clone(), moved.clone()]);
    let run = integrate_schlesinger(&model, &state, &open, &Tolerances::default()).unwrap();
    let end = run.final_state();
    for (a, b) in end.residues().iter().zip(state.residues()) {
        assert!((a - &b).max_norm() < 1e-10);
    }
    let frozen = SchlesingerState {
        poles: moved,
        ..state.clone()
    };
    let expected = schlesinger_tau_density(&model, &frozen).unwrap().tau;
    let got = schlesinger_tau_density(&model, end).unwrap().tau;
    for (x, y) in got.iter().zip(&expected) {
        assert!((x - y).norm() < 1e-10);
    }
}

#[test]
fn two_pole_rates_cancel() {
    let (model, state) = random_schlesinger_case(2, 2, 5).unwrap();
    let rates = residue_rates(&state, 0).unwrap();
    assert!((&rates[0] + &rates[1]).max_norm() < 1e-13);
    let from_flow = residue_rates_from_tangent(&state, &schlesinger_vector_field(&model, &state, 0).unwrap());
    assert!((&from_flow[0] + &from_flow[1]).max_norm() < 1e-12);
}

#[test]
fn flipped_p_equation_breaks_commutator_agreement() {
    let (model, state) = random_schlesinger_case(2, 3, 8).unwrap();
    assert!(commutator_agreement(&model, &state, false).unwrap() < 1e-12);
    assert!(commutator_agreement(&model, &state, true).unwrap() > 1e-2);
}

#[test]
fn gauges_build_valid_states() {
    let model = SchlesingerModel::new(
        vec![vec![re(0.3), re(-0.3)], vec![re(0.2), re(-0.2)]],
        vec![re(0.1), re(-0.1)],
    )
    .unwrap();
    let g = SquareMatrix::from_2x2(re(1.0), re(0.5), re(0.0), re(1.0));
    let state = SchlesingerState::from_gauges(&model, vec![re(0.0), re(1.0)], &[g.clone(), g.clone()]).unwrap();
    for (a, th) in state.residues().iter().zip(&model.thetas) {
        let mut eig = a.eigenvalues();
        eig.sort_by(|x, y| x.re.total_cmp(&y.re));
        assert!((eig[0] - th[1]).norm() < 1e-12 && (eig[1] - th[0]).norm() < 1e-12);
    }

    let singular = SquareMatrix::from_2x2(re(1.0), re(1.0), re(1.0), re(1.0 + 1e-10));
    assert!(matches!(
        SchlesingerState::from_gauges(&model, vec![re(0.0), re(1.0)], &[g.clone(), singular]),
        Err(SchlesingerError::IllConditioned { index: 1, .. })
    ));
    assert!(matches!(
        SchlesingerState::from_gauges(&model, vec![re(0.0), re(1e-9)], &[g.clone(), g.clone()]),
        Err(SchlesingerError::CoincidentPoles { .. })
    ));
    assert!(matches!(
        SchlesingerState::from_gauges(&model, vec![re(0.0)], &[g]),
        Err(SchlesingerError::Shape(_))
    ));
}

#[test]
fn models_reject_resonant_exponents() {
    let resonant = SchlesingerModel::new(
        vec![vec![re(0.5), re(-0.5)], vec![re(0.2), re(-0.2)]],
        vec![re(0.0), re(0.0)],
    );
    assert!(matches!(resonant, Err(SchlesingerError::Resonant(0))));
    let equal = SchlesingerModel::new(
        vec![vec![re(0.2), re(0.2)], vec![re(0.1), re(-0.1)]],
        vec![re(0.0), re(0.0)],
    );
    assert!(matches!(equal, Err(SchlesingerError::Resonant(0))));
    let small = SchlesingerModel::new(vec![vec![re(0.2), re(-0.2)]], vec![re(0.0), re(0.0)]);
    assert!(matches!(small, Err(SchlesingerError::Shape(_))));
}

#[test]
fn pack_round_trips() {
    let (model, state) = random_schlesinger_case(3, 3, 2).unwrap();
    let y = pack(&state);
    let back = unpack(&model, &y, &state.poles).unwrap();
    assert_eq!(back, state);
    assert!(min_separation(&[re(0.0), re(0.5), re(0.5)], 1e-8).is_err());
}

#[test]
fn rectangles_close() {
    let base = vec![re(0.0), re(1.0), re(2.0)];
    let path = MultiTimePath::rectangle(&base, 0, 2, 0.1);
    assert_eq!(path.waypoints.len(), 5);
    assert!(path.is_closed());
    assert!(path.check(1e-3).is_ok());
    let collapsing = MultiTimePath::new(vec![vec![re(0.0), re(1.0)], vec![re(1.0), re(0.0)]]);
    assert!(collapsing.check(1e-3).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hamiltonian_flow_matches_the_commutator_form(dim in 2..4usize, poles in 2..5usize, seed in 0..10_000u64) {
        let (model, state) = random_schlesinger_case(dim, poles, seed).unwrap();
        let r = commutator_agreement(&model, &state, false).unwrap();
        prop_assert!(r < 1e-9, "{}x{}, n={}: {:e}", dim, dim, poles, r);
    }

    #[test]
    fn residue_rates_sum_to_zero(dim in 2..4usize, poles in 2..5usize, seed in 0..10_000u64) {
        let (_, state) = random_schlesinger_case(dim, poles, seed).unwrap();
        for nu in 0..poles {
            let mut total = SquareMatrix::zeros(dim);
            for r in residue_rates(&state, nu).unwrap() {
                total += &r;
            }
            prop_assert!(total.max_norm() < 1e-12);
        }
    }
}
