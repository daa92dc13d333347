use crate::algebra::{c64, ComplexScalar};
use crate::schlesinger::{
    min_separation, pack, packed_len, schlesinger_hamiltonians, schlesinger_vector_field, segment_separation, unpack,
    SchlesingerModel, SchlesingerState, POLE_GUARD,
};
use crate::systems::{density_breakdown, vector_field, ExtendedState, SystemSpec, ThetaParams, GUARD_RADIUS};

use super::IntegrationError;

/// A multi-time Hamiltonian flow with tau and action densities.
///
/// The integrator works with a packed complex vector; `times` holds the
/// current values of the deformation times.
pub trait Flow {
    type State: Clone;

    fn time_dim(&self) -> usize;
    fn state_len(&self) -> usize;
    /// Ratio between the tau form and the action form.
    fn gamma(&self) -> f64;
    fn pack(&self, state: &Self::State, times: &[ComplexScalar]) -> Result<Vec<ComplexScalar>, IntegrationError>;
    fn unpack(&self, y: &[ComplexScalar], times: &[ComplexScalar]) -> Result<Self::State, IntegrationError>;
    fn check_times(&self, times: &[ComplexScalar], radius: f64) -> Result<(), IntegrationError>;
    /// Guard check for the whole straight segment between two waypoints.
    fn check_segment(&self, from: &[ComplexScalar], to: &[ComplexScalar], radius: f64) -> Result<(), IntegrationError>;
    /// Writes `dy` for the time velocity `velocity` and returns the tau and
    /// action rates along it.
    fn rates(
        &self,
        y: &[ComplexScalar],
        times: &[ComplexScalar],
        velocity: &[ComplexScalar],
        dy: &mut [ComplexScalar],
    ) -> Result<(ComplexScalar, ComplexScalar), IntegrationError>;
    /// The boundary function `G`.
    fn boundary(&self, y: &[ComplexScalar], times: &[ComplexScalar]) -> Result<ComplexScalar, IntegrationError>;
}

/// One Painlevé equation in extended Hamiltonian form.
#[derive(Clone, Debug)]
pub struct PainleveFlow {
    pub spec: SystemSpec,
    pub theta: ThetaParams,
}

impl PainleveFlow {
    pub fn new(spec: SystemSpec, theta: ThetaParams) -> Self {
        Self { spec, theta }
    }

    fn state(&self, y: &[ComplexScalar]) -> Result<ExtendedState, IntegrationError> {
        Ok(ExtendedState::from_slots(self.spec.kind, &y[..self.state_len()])?)
    }
}

impl Flow for PainleveFlow {
    type State = ExtendedState;

    fn time_dim(&self) -> usize {
        1
    }

    fn state_len(&self) -> usize {
        self.spec.kind.state_len()
    }

    fn gamma(&self) -> f64 {
        f64::from(self.spec.gamma)
    }

    fn pack(&self, state: &ExtendedState, _times: &[ComplexScalar]) -> Result<Vec<ComplexScalar>, IntegrationError> {
        if !state.is_finite() {
            return Err(IntegrationError::InvalidState("non-finite initial state".into()));
        }
        Ok(state.to_slots(self.spec.kind))
    }

    fn unpack(&self, y: &[ComplexScalar], _times: &[ComplexScalar]) -> Result<ExtendedState, IntegrationError> {
        self.state(y)
    }

    fn check_times(&self, times: &[ComplexScalar], radius: f64) -> Result<(), IntegrationError> {
        self.spec
            .check_time(times[0], radius)
            .map_err(|_| IntegrationError::Guard {
                reason: format!("t = {} is within {radius:e} of a singular time", times[0]),
            })
    }

    fn check_segment(&self, from: &[ComplexScalar], to: &[ComplexScalar], radius: f64) -> Result<(), IntegrationError> {
        let distance = self.spec.segment_singular_distance(from[0], to[0]);
        if distance < radius.max(GUARD_RADIUS) {
            return Err(IntegrationError::Guard {
                reason: format!(
                    "segment {} -> {} passes within {distance:e} of a singular time",
                    from[0], to[0]
                ),
            });
        }
        Ok(())
    }

    fn rates(
        &self,
        y: &[ComplexScalar],
        times: &[ComplexScalar],
        velocity: &[ComplexScalar],
        dy: &mut [ComplexScalar],
    ) -> Result<(ComplexScalar, ComplexScalar), IntegrationError> {
        let state = self.state(y)?;
        let t = times[0];
        let v = velocity[0];
        let field = vector_field(&self.spec, &self.theta, &state, t)?.to_slots(self.spec.kind);
        for (d, f) in dy.iter_mut().zip(field) {
            *d = f * v;
        }
        let dens = density_breakdown(&self.spec, &self.theta, &state, t)?;
        Ok((dens.tau_density * v, dens.action_density * v))
    }

    fn boundary(&self, y: &[ComplexScalar], times: &[ComplexScalar]) -> Result<ComplexScalar, IntegrationError> {
        let state = self.state(y)?;
        Ok(density_breakdown(&self.spec, &self.theta, &state, times[0])?.g_value)
    }
}

/// The Schlesinger system with the pole positions as times.
#[derive(Clone, Debug)]
pub struct SchlesingerFlow {
    pub model: SchlesingerModel,
    /// Reverse the sign of every `dP` rate.
    pub flip_p_equation: bool,
}

impl SchlesingerFlow {
    pub fn new(model: SchlesingerModel) -> Self {
        Self {
            model,
            flip_p_equation: false,
        }
    }
}

impl Flow for SchlesingerFlow {
    type State = SchlesingerState;

    fn time_dim(&self) -> usize {
        self.model.pole_count
    }

    fn state_len(&self) -> usize {
        packed_len(&self.model)
    }

    fn gamma(&self) -> f64 {
        1.0
    }

    fn pack(&self, state: &SchlesingerState, times: &[ComplexScalar]) -> Result<Vec<ComplexScalar>, IntegrationError> {
        let mismatch = state.poles.len() != times.len()
            || state
                .poles
                .iter()
                .zip(times)
                .any(|(a, b)| (a - b).norm() > 1e-12 * (1.0 + a.norm()));
        if mismatch {
            return Err(IntegrationError::InvalidState(
                "pole positions differ from the first waypoint".into(),
            ));
        }
        let y = pack(state);
        if y.len() != self.state_len() {
            return Err(IntegrationError::InvalidState("state does not match the model".into()));
        }
        Ok(y)
    }

    fn unpack(&self, y: &[ComplexScalar], times: &[ComplexScalar]) -> Result<SchlesingerState, IntegrationError> {
        Ok(unpack(&self.model, y, times)?)
    }

    fn check_times(&self, times: &[ComplexScalar], radius: f64) -> Result<(), IntegrationError> {
        min_separation(times, radius.max(POLE_GUARD)).map_err(|e| IntegrationError::Guard { reason: e.to_string() })
    }

    fn check_segment(&self, from: &[ComplexScalar], to: &[ComplexScalar], radius: f64) -> Result<(), IntegrationError> {
        segment_separation(from, to, radius.max(POLE_GUARD)).map_err(|e| IntegrationError::Guard {
            reason: format!("segment {from:?} -> {to:?}: {e}"),
        })
    }

    fn rates(
        &self,
        y: &[ComplexScalar],
        times: &[ComplexScalar],
        velocity: &[ComplexScalar],
        dy: &mut [ComplexScalar],
    ) -> Result<(ComplexScalar, ComplexScalar), IntegrationError> {
        let state = self.unpack(y, times)?;
        let hams = schlesinger_hamiltonians(&self.model, &state)?;
        dy.iter_mut().for_each(|d| *d = c64(0.0, 0.0));
        let d2 = self.model.mat_dim * self.model.mat_dim;
        let n = self.model.pole_count;
        let p_sign = if self.flip_p_equation { -1.0 } else { 1.0 };
        let mut tau = c64(0.0, 0.0);
        let mut kinetic = c64(0.0, 0.0);
        for (nu, &v) in velocity.iter().enumerate() {
            if v == c64(0.0, 0.0) {
                continue;
            }
            tau += hams[nu] * v;
            let field = schlesinger_vector_field(&self.model, &state, nu)?;
            for mu in 0..n {
                kinetic += (&state.p_mats[mu] * &field.dq[mu]).trace() * v;
                let dq = &mut dy[mu * d2..(mu + 1) * d2];
                for (d, f) in dq.iter_mut().zip(field.dq[mu].entries()) {
                    *d += f * v;
                }
                let dp = &mut dy[(n + mu) * d2..(n + mu + 1) * d2];
                for (d, f) in dp.iter_mut().zip(field.dp[mu].entries()) {
                    *d += f * v * p_sign;
                }
            }
        }
        Ok((tau, kinetic - tau))
    }

    fn boundary(&self, _y: &[ComplexScalar], _times: &[ComplexScalar]) -> Result<ComplexScalar, IntegrationError> {
        Ok(c64(0.0, 0.0))
    }
}
