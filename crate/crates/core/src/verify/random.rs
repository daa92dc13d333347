//! Seeded generators of admissible inputs.
//!
//! Everything is drawn uniformly from bounded boxes and rejected when it
//! lands too close to a guard, so a seed fixes the whole case.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{c64, ComplexScalar};
use crate::integrate::{integrate_path, PainleveFlow, PathSpec, Tolerances};
use crate::schlesinger::{random_admissible_state, SchlesingerModel, SchlesingerState};
use crate::systems::{
    a_rational, density_breakdown, local_frames, max_frame_order, pvi_residue_params, ExtendedState, PainleveKind,
    SystemSpec, ThetaParams,
};

use super::VerifyError;

/// Smallest distance kept between `q` and the finite singular points.
pub const STATE_MARGIN: f64 = 0.1;
/// Smallest distance kept between the path and the singular times.
pub const PATH_MARGIN: f64 = 0.25;
/// Trajectories whose `|q|` or `|p|` exceed this are treated as hitting a pole.
pub const POLE_FREE_BOUND: f64 = 10.0;
/// Smallest distance between `q` and the finite singular points along a trajectory.
pub const TRAJECTORY_MARGIN: f64 = 0.02;
/// Largest admissible entry of any residue of `A(z)`, including the one at infinity.
pub const RESIDUE_BOUND: f64 = 25.0;
const ATTEMPTS: usize = 10_000;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn in_box(rng: &mut impl Rng, half_width: f64) -> ComplexScalar {
    c64(
        rng.gen_range(-half_width..half_width),
        rng.gen_range(-half_width..half_width),
    )
}

/// Exponents with modulus below one, away from the values where frames degenerate.
pub fn random_theta(kind: PainleveKind, rng: &mut impl Rng) -> ThetaParams {
    loop {
        let th = ThetaParams {
            theta0: in_box(rng, 0.7),
            theta1: in_box(rng, 0.7),
            theta_t: in_box(rng, 0.7),
            theta_inf: in_box(rng, 0.7),
        };
        let far = |z: ComplexScalar| z.norm() >= 0.1;
        let ok = match kind {
            PainleveKind::P1 | PainleveKind::P2 | PainleveKind::P3 => true,
            PainleveKind::P4 => far(th.theta0),
            PainleveKind::P5 => far(th.theta0) && far(th.theta1),
            PainleveKind::P6 => far(th.theta_inf) && far(th.theta_t * 2.0 - 1.0) && far(th.theta_t * 2.0 + 1.0),
        };
        if ok {
            return th;
        }
    }
}

/// A time in a box kept away from the singular times.
pub fn random_time(kind: PainleveKind, rng: &mut impl Rng) -> ComplexScalar {
    match kind {
        PainleveKind::P1 | PainleveKind::P2 | PainleveKind::P4 => in_box(rng, 1.0),
        PainleveKind::P3 | PainleveKind::P5 => c64(rng.gen_range(0.5..1.5), rng.gen_range(-1.0..1.0)),
        PainleveKind::P6 => c64(rng.gen_range(0.2..0.8), rng.gen_range(0.4..1.0)),
    }
}

fn finite_points(kind: PainleveKind, t: ComplexScalar) -> Vec<ComplexScalar> {
    match kind {
        PainleveKind::P1 | PainleveKind::P2 => vec![],
        PainleveKind::P3 | PainleveKind::P4 => vec![c64(0.0, 0.0)],
        PainleveKind::P5 => vec![c64(0.0, 0.0), c64(1.0, 0.0)],
        PainleveKind::P6 => vec![c64(0.0, 0.0), c64(1.0, 0.0), t],
    }
}

/// Whether every quantity the checks evaluate is well away from its guards.
pub fn is_admissible(spec: &SystemSpec, theta: &ThetaParams, state: &ExtendedState, t: ComplexScalar) -> bool {
    let kind = spec.kind;
    if finite_points(kind, t)
        .iter()
        .any(|z| (state.q - z).norm() < STATE_MARGIN)
    {
        return false;
    }
    if kind == PainleveKind::P6 {
        match pvi_residue_params(theta, state, t) {
            Ok(x) => {
                if [x.x0, x.x1, x.xt].iter().any(|z| z.norm() < STATE_MARGIN) {
                    return false;
                }
            }
            Err(_) => return false,
        }
    }
    let Ok(frames) = local_frames(spec, theta, state, t, max_frame_order(kind)) else {
        return false;
    };
    let tame = frames.iter().all(|f| {
        f.gauge.max_norm() < 1e3 && f.gauge.condition() < 1e6 && f.series_coeffs.iter().all(|g| g.max_norm() < 1e4)
    });
    if !tame || density_breakdown(spec, theta, state, t).is_err() {
        return false;
    }
    let Ok(a) = a_rational(spec, theta, state, t) else {
        return false;
    };
    let (finite, at_infinity) = a.residues();
    finite
        .iter()
        .map(|(_, m)| m.max_norm())
        .chain([at_infinity.max_norm()])
        .all(|n| n <= RESIDUE_BOUND)
}

/// `|q|, |p| ≤ 2` and gauge logarithms of modulus below one half.
pub fn random_state(spec: &SystemSpec, theta: &ThetaParams, t: ComplexScalar, rng: &mut impl Rng) -> ExtendedState {
    loop {
        let state = ExtendedState {
            q: in_box(rng, 1.4),
            p: in_box(rng, 1.4),
            log_k: in_box(rng, 0.35),
            log_a: in_box(rng, 0.35),
            log_b: in_box(rng, 0.35),
            log_c: in_box(rng, 0.35),
        };
        // Slots the equation does not carry stay zero.
        let state = ExtendedState::from_slots(spec.kind, &state.to_slots(spec.kind)).expect("matching layout");
        if is_admissible(spec, theta, &state, t) {
            return state;
        }
    }
}

/// Spectral points in `|Re z|, |Im z| ≤ 2`, at least 0.2 from the finite poles of `A`.
pub fn random_z_samples(kind: PainleveKind, t: ComplexScalar, count: usize, rng: &mut impl Rng) -> Vec<ComplexScalar> {
    let poles = finite_points(kind, t);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = in_box(rng, 2.0);
        if poles.iter().all(|p| (z - p).norm() >= 0.2) {
            out.push(z);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct PainleveCase {
    pub spec: SystemSpec,
    pub theta: ThetaParams,
    pub state: ExtendedState,
    pub t: ComplexScalar,
    pub seed: u64,
}

pub fn random_case(kind: PainleveKind, seed: u64) -> PainleveCase {
    let mut rng = rng_from_seed(seed);
    let spec = SystemSpec::new(kind);
    let theta = random_theta(kind, &mut rng);
    let t = random_time(kind, &mut rng);
    let state = random_state(&spec, &theta, t, &mut rng);
    PainleveCase {
        spec,
        theta,
        state,
        t,
        seed,
    }
}

#[derive(Clone, Debug)]
pub struct TrajectoryCase {
    pub case: PainleveCase,
    pub path: PathSpec,
}

/// A case with a straight path of the given length along which the solution
/// stays pole-free: the run completes, `|q|, |p|` stay below the bound and
/// `q` keeps clear of the finite singular points.
pub fn random_trajectory_case(
    kind: PainleveKind,
    seed: u64,
    length: f64,
    tol: &Tolerances,
) -> Result<TrajectoryCase, VerifyError> {
    let mut rng = rng_from_seed(seed);
    let spec = SystemSpec::new(kind);
    for _ in 0..ATTEMPTS {
        let theta = random_theta(kind, &mut rng);
        let t0 = random_time(kind, &mut rng);
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let t1 = t0 + c64(angle.cos(), angle.sin()) * length;
        if spec.segment_singular_distance(t0, t1) < PATH_MARGIN {
            continue;
        }
        let state = random_state(&spec, &theta, t0, &mut rng);
        let path = PathSpec::scalar(&[t0, t1]);
        let Ok(run) = integrate_path(&PainleveFlow::new(spec.clone(), theta), &state, &path, tol) else {
            continue;
        };
        let bounded = run
            .samples
            .iter()
            .all(|s| s.state.q.norm() < POLE_FREE_BOUND && s.state.p.norm() < POLE_FREE_BOUND);
        let clear = run.samples.iter().all(|s| {
            finite_points(kind, s.times[0])
                .iter()
                .all(|z| (s.state.q - z).norm() > TRAJECTORY_MARGIN)
        });
        if bounded && clear {
            return Ok(TrajectoryCase {
                case: PainleveCase {
                    spec,
                    theta,
                    state,
                    t: t0,
                    seed,
                },
                path,
            });
        }
    }
    Err(VerifyError::Invalid(format!(
        "no pole-free trajectory found for {kind} with seed {seed}"
    )))
}

/// A random `N×N` Schlesinger model with `n` poles and a state satisfying all
/// of its invariants. Poles are spread on a unit-scale circle.
pub fn random_schlesinger_case(
    mat_dim: usize,
    pole_count: usize,
    seed: u64,
) -> Result<(SchlesingerModel, SchlesingerState), VerifyError> {
    let mut rng = rng_from_seed(seed);
    let poles: Vec<ComplexScalar> = (0..pole_count)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / pole_count as f64 + rng.gen_range(-0.3..0.3);
            c64(angle.cos(), angle.sin()) * 1.5
        })
        .collect();
    random_admissible_state(mat_dim, poles, || in_box(&mut rng, 1.0), 1000)
        .ok_or_else(|| VerifyError::Invalid("no admissible Schlesinger state".into()))
}
