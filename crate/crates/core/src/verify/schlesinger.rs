use crate::algebra::{c64, ComplexScalar, SquareMatrix};
use crate::integrate::{integrate_path, Flow, PathSpec, SchlesingerFlow, Tolerances};
use crate::schlesinger::{
    residue_rates, residue_rates_from_tangent, schlesinger_hamiltonians, schlesinger_vector_field, spectrum_distance,
    MultiTimePath, SchlesingerModel, SchlesingerState,
};

use super::{
    ReportContext, ResidualReport, VerifyError, CLOSEDNESS_THRESHOLD, COMMUTATOR_THRESHOLD, ISOSPECTRAL_THRESHOLD,
    MIXED_PARTIALS_THRESHOLD, RESIDUE_SUM_THRESHOLD, SCHLESINGER_ACTION_THRESHOLD,
};

#[derive(Clone, Debug)]
pub struct SchlesingerOptions {
    pub tol: Tolerances,
    /// Reverse the sign of the `P` equations, both in the flow and in the
    /// commutator comparison.
    pub flip_p_equation: bool,
    /// Number of trajectory points probed by the pointwise checks.
    pub probes: usize,
}

impl Default for SchlesingerOptions {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            flip_p_equation: false,
            probes: 8,
        }
    }
}

/// Largest mismatch between `dA/da_ν` rebuilt from the Hamiltonian rates of
/// `(Q, P)` and the commutator form, over all directions.
pub fn commutator_agreement(
    model: &SchlesingerModel,
    state: &SchlesingerState,
    flip_p_equation: bool,
) -> Result<f64, VerifyError> {
    let mut worst: f64 = 0.0;
    for nu in 0..state.pole_count() {
        let mut tangent = schlesinger_vector_field(model, state, nu)?;
        if flip_p_equation {
            tangent.dp.iter_mut().for_each(|m| *m = -m.clone());
        }
        let from_flow = residue_rates_from_tangent(state, &tangent);
        let expected = residue_rates(state, nu)?;
        for (x, y) in from_flow.iter().zip(&expected) {
            worst = worst.max((x - y).max_norm());
        }
    }
    Ok(worst)
}

/// `max |∂H_μ/∂a_ν − ∂H_ν/∂a_μ|` by central differences along the flow.
pub fn mixed_partials(model: &SchlesingerModel, state: &SchlesingerState) -> Result<f64, VerifyError> {
    let n = state.pole_count();
    let scale = state.poles.iter().map(|a| a.norm()).fold(1.0, f64::max);
    let h = 1e-5 * scale;
    let mut partial = vec![vec![c64(0.0, 0.0); n]; n];
    for nu in 0..n {
        let field = schlesinger_vector_field(model, state, nu)?;
        let shifted = |sign: f64| -> SchlesingerState {
            let mut s = state.clone();
            s.poles[nu] += h * sign;
            for mu in 0..n {
                s.q_mats[mu] += &field.dq[mu].scale(c64(h * sign, 0.0));
                s.p_mats[mu] += &field.dp[mu].scale(c64(h * sign, 0.0));
            }
            s
        };
        let plus = schlesinger_hamiltonians(model, &shifted(1.0))?;
        let minus = schlesinger_hamiltonians(model, &shifted(-1.0))?;
        for mu in 0..n {
            partial[mu][nu] = (plus[mu] - minus[mu]) / (2.0 * h);
        }
    }
    let mut worst: f64 = 0.0;
    for mu in 0..n {
        for nu in mu + 1..n {
            worst = worst.max((partial[mu][nu] - partial[nu][mu]).norm());
        }
    }
    Ok(worst)
}

fn residue_sum(state: &SchlesingerState) -> SquareMatrix {
    state.residue_sum()
}

/// Isospectrality, conservation of `Σ A_ν`, closedness of `Σ H_ν da_ν` on a
/// closed loop, commutator agreement, mixed partials and the action identity
/// with `G ≡ 0`.
pub fn check_schlesinger_suite(
    model: &SchlesingerModel,
    initial: &SchlesingerState,
    path: &MultiTimePath,
    options: &SchlesingerOptions,
) -> Result<Vec<ResidualReport>, VerifyError> {
    initial.validate(model)?;
    let mut flow = SchlesingerFlow::new(model.clone());
    flow.flip_p_equation = options.flip_p_equation;
    let spec = PathSpec::from(path.clone());
    let r = integrate_path(&flow, initial, &spec, &options.tol)?;

    let spectra0: Vec<Vec<ComplexScalar>> = initial.residues().iter().map(|a| a.eigenvalues()).collect();
    let sum0 = residue_sum(initial);
    let mut iso: f64 = 0.0;
    let mut sum_drift: f64 = 0.0;
    for sample in &r.samples {
        for (a, s0) in sample.state.residues().iter().zip(&spectra0) {
            iso = iso.max(spectrum_distance(&a.eigenvalues(), s0));
        }
        let sum = residue_sum(&sample.state);
        let off_diagonal = (&sum - &sum.diagonal_part()).max_norm();
        sum_drift = sum_drift.max((&sum - &sum0).max_norm()).max(off_diagonal);
    }

    let mut commutator: f64 = 0.0;
    let mut mixed: f64 = 0.0;
    let probes = options.probes.max(1);
    for k in 0..probes {
        let s = r.s_end() * k as f64 / probes as f64;
        let times = r.path.times_at(s);
        let state = flow.unpack(&r.vector_at(s)?, &times)?;
        commutator = commutator.max(commutator_agreement(model, &state, options.flip_p_equation)?);
        mixed = mixed.max(mixed_partials(model, &state)?);
    }

    let ctx = ReportContext {
        note: Some(format!("N = {}, n = {}", model.mat_dim, model.pole_count)),
        ..Default::default()
    };
    let mut reports = vec![
        ResidualReport::new("isospectrality", iso, ISOSPECTRAL_THRESHOLD, ctx.clone()),
        ResidualReport::new(
            "residue_sum_conservation",
            sum_drift,
            RESIDUE_SUM_THRESHOLD,
            ctx.clone(),
        ),
    ];
    if path.is_closed() {
        reports.push(ResidualReport::new(
            "loop_closedness",
            r.delta_ln_tau.norm(),
            CLOSEDNESS_THRESHOLD,
            ctx.clone(),
        ));
    }
    reports.push(ResidualReport::new(
        "commutator_agreement",
        commutator,
        COMMUTATOR_THRESHOLD,
        ctx.clone(),
    ));
    reports.push(ResidualReport::new(
        "mixed_partials",
        mixed,
        MIXED_PARTIALS_THRESHOLD,
        ctx.clone(),
    ));
    let action = (r.delta_ln_tau - r.delta_action - (r.g_end - r.g_start)).norm();
    reports.push(ResidualReport::new(
        "schlesinger_action_identity",
        action,
        SCHLESINGER_ACTION_THRESHOLD,
        ctx,
    ));
    Ok(reports)
}
