//! Adaptive integration along piecewise-linear paths in complex time.
//!
//! The path parameter `s` runs over `[i, i + 1]` on segment `i`; every rate is
//! multiplied by the segment velocity. The packed state carries two extra
//! slots accumulating `ln τ` and the classical action, so the error control
//! covers them too.

mod dopri;
mod flows;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{c64, ComplexScalar};
use crate::schlesinger::{MultiTimePath, SchlesingerError, SchlesingerModel, SchlesingerState};
use crate::systems::{ExtendedState, SystemError, SystemSpec, ThetaParams};

pub use dopri::DenseStep;
pub use flows::{Flow, PainleveFlow, SchlesingerFlow};

pub const DEFAULT_GUARD_RADIUS: f64 = 1e-3;
/// Hard cap on attempted steps per run.
pub const MAX_STEPS: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrationError {
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid tolerances: {0}")]
    InvalidTolerances(String),
    #[error("invalid initial state: {0}")]
    InvalidState(String),
    #[error("guard violation: {reason}")]
    Guard { reason: String },
    #[error("step size fell below {min_step:e} at s = {last_s} (t = {last_times:?}){}", cause.as_ref().map(|c| format!(": {c}")).unwrap_or_default())]
    StepUnderflow {
        last_s: f64,
        last_times: Vec<ComplexScalar>,
        min_step: f64,
        cause: Option<String>,
    },
    #[error("non-finite state after s = {last_s} (t = {last_times:?})")]
    NonFinite {
        last_s: f64,
        last_times: Vec<ComplexScalar>,
    },
    #[error("step limit reached at s = {last_s}")]
    TooManySteps {
        last_s: f64,
        last_times: Vec<ComplexScalar>,
    },
    #[error("the integration result holds no samples")]
    EmptyResult,
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Schlesinger(#[from] SchlesingerError),
}

impl IntegrationError {
    /// Aborts during the run, as opposed to invalid inputs.
    pub fn is_runtime_abort(&self) -> bool {
        matches!(
            self,
            Self::StepUnderflow { .. } | Self::NonFinite { .. } | Self::TooManySteps { .. } | Self::Guard { .. }
        )
    }
}

/// Piecewise-linear path through the deformation times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub waypoints: Vec<Vec<ComplexScalar>>,
    pub guard_radius: f64,
}

impl PathSpec {
    pub fn new(waypoints: Vec<Vec<ComplexScalar>>) -> Self {
        Self {
            waypoints,
            guard_radius: DEFAULT_GUARD_RADIUS,
        }
    }

    /// Path through single complex times.
    pub fn scalar(times: &[ComplexScalar]) -> Self {
        Self::new(times.iter().map(|&t| vec![t]).collect())
    }

    pub fn with_guard(mut self, radius: f64) -> Self {
        self.guard_radius = radius;
        self
    }

    pub fn segment_count(&self) -> usize {
        self.waypoints.len().saturating_sub(1)
    }

    pub fn s_end(&self) -> f64 {
        self.segment_count() as f64
    }

    pub fn velocity(&self, segment: usize) -> Vec<ComplexScalar> {
        let (a, b) = (&self.waypoints[segment], &self.waypoints[segment + 1]);
        a.iter().zip(b).map(|(x, y)| y - x).collect()
    }

    pub fn times_at(&self, s: f64) -> Vec<ComplexScalar> {
        let last = self.segment_count();
        let s = s.clamp(0.0, last as f64);
        let i = (s.floor() as usize).min(last.saturating_sub(1));
        let u = s - i as f64;
        if u == 0.0 {
            return self.waypoints[i].clone();
        }
        if u == 1.0 {
            return self.waypoints[i + 1].clone();
        }
        let (a, b) = (&self.waypoints[i], &self.waypoints[i + 1]);
        a.iter().zip(b).map(|(x, y)| x + (y - x) * u).collect()
    }

    pub fn validate<F: Flow>(&self, flow: &F) -> Result<(), IntegrationError> {
        if self.waypoints.len() < 2 {
            return Err(IntegrationError::InvalidPath(
                "at least two waypoints are required".into(),
            ));
        }
        if !(self.guard_radius >= 0.0) {
            return Err(IntegrationError::InvalidPath(
                "guard radius must be non-negative".into(),
            ));
        }
        for w in &self.waypoints {
            if w.len() != flow.time_dim() {
                return Err(IntegrationError::InvalidPath(format!(
                    "waypoint has {} times, the system has {}",
                    w.len(),
                    flow.time_dim()
                )));
            }
            if w.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(IntegrationError::InvalidPath("non-finite waypoint".into()));
            }
            flow.check_times(w, self.guard_radius)
                .map_err(|e| IntegrationError::InvalidPath(e.to_string()))?;
        }
        for pair in self.waypoints.windows(2) {
            flow.check_segment(&pair[0], &pair[1], self.guard_radius)
                .map_err(|e| IntegrationError::InvalidPath(e.to_string()))?;
        }
        Ok(())
    }
}

impl From<MultiTimePath> for PathSpec {
    fn from(path: MultiTimePath) -> Self {
        Self::new(path.waypoints)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest step in the path parameter (one unit per segment).
    pub max_step: f64,
    pub min_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.25,
            min_step: 1e-14,
        }
    }
}

impl Tolerances {
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..self
        }
    }

    pub fn with_max_step(self, max_step: f64) -> Self {
        Self { max_step, ..self }
    }

    pub fn validate(&self) -> Result<(), IntegrationError> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.min_step > 0.0
            && self.min_step < self.max_step
            && self.max_step.is_finite();
        if ok {
            Ok(())
        } else {
            Err(IntegrationError::InvalidTolerances(format!("{self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample<S> {
    pub s: f64,
    pub times: Vec<ComplexScalar>,
    pub state: S,
    /// `ln τ` relative to the start of the path.
    pub ln_tau: ComplexScalar,
    /// Classical action relative to the start of the path.
    pub action: ComplexScalar,
}

#[derive(Clone, Debug)]
pub struct IntegrationResult<S> {
    /// The start point and the end of every accepted step.
    pub samples: Vec<Sample<S>>,
    pub delta_ln_tau: ComplexScalar,
    pub delta_action: ComplexScalar,
    pub g_start: ComplexScalar,
    pub g_end: ComplexScalar,
    pub stats: StepStats,
    pub gamma: f64,
    pub path: PathSpec,
    pub dense: Vec<DenseStep>,
    state_len: usize,
}

impl<S: Clone> IntegrationResult<S> {
    pub fn s_end(&self) -> f64 {
        self.path.s_end()
    }

    pub fn state_len(&self) -> usize {
        self.state_len
    }

    pub fn final_state(&self) -> &S {
        &self
            .samples
            .last()
            .expect("a result always holds its start sample")
            .state
    }

    pub fn initial_state(&self) -> &S {
        &self.samples[0].state
    }

    fn step_at(&self, s: f64) -> Result<&DenseStep, IntegrationError> {
        if self.dense.is_empty() {
            return Err(IntegrationError::EmptyResult);
        }
        let idx = self.dense.partition_point(|d| d.s0 <= s);
        Ok(&self.dense[idx.saturating_sub(1)])
    }

    /// Interpolated packed vector, including the two accumulator slots.
    pub fn vector_at(&self, s: f64) -> Result<Vec<ComplexScalar>, IntegrationError> {
        Ok(self.step_at(s)?.value(s))
    }

    /// Derivative of the packed vector with respect to the path parameter.
    pub fn derivative_at(&self, s: f64) -> Result<Vec<ComplexScalar>, IntegrationError> {
        Ok(self.step_at(s)?.derivative(s))
    }

    pub fn second_derivative_at(&self, s: f64) -> Result<Vec<ComplexScalar>, IntegrationError> {
        Ok(self.step_at(s)?.second_derivative(s))
    }

    /// Segment velocity `dt/ds` at `s`.
    pub fn velocity_at(&self, s: f64) -> Vec<ComplexScalar> {
        let last = self.path.segment_count().saturating_sub(1);
        let seg = (s.max(0.0).floor() as usize).min(last);
        self.path.velocity(seg)
    }

    /// Largest modulus of any state slot over the accepted steps.
    pub fn max_state_modulus(&self) -> f64 {
        self.dense
            .iter()
            .flat_map(|d| d.endpoint_values(self.state_len))
            .fold(0.0, f64::max)
    }

    /// `count` points uniform in the path parameter, by dense interpolation.
    /// When `count` equals the number of stored samples those are returned.
    pub fn resample<F: Flow<State = S>>(&self, flow: &F, count: usize) -> Result<Vec<Sample<S>>, IntegrationError> {
        if count == 0 || self.samples.is_empty() {
            return Err(IntegrationError::EmptyResult);
        }
        if count == self.samples.len() {
            return Ok(self.samples.clone());
        }
        if count == 1 {
            return Ok(vec![self.samples[0].clone()]);
        }
        let end = self.s_end();
        (0..count)
            .map(|k| {
                let s = if k + 1 == count {
                    end
                } else {
                    end * k as f64 / (count - 1) as f64
                };
                let y = if k == 0 {
                    return Ok(self.samples[0].clone());
                } else if k + 1 == count {
                    return Ok(self.samples.last().expect("non-empty").clone());
                } else {
                    self.vector_at(s)?
                };
                let times = self.path.times_at(s);
                Ok(Sample {
                    s,
                    state: flow.unpack(&y, &times)?,
                    ln_tau: y[self.state_len],
                    action: y[self.state_len + 1],
                    times,
                })
            })
            .collect()
    }
}

/// Integrates `flow` from `initial` along `path`.
pub fn integrate_path<F: Flow>(
    flow: &F,
    initial: &F::State,
    path: &PathSpec,
    tol: &Tolerances,
) -> Result<IntegrationResult<F::State>, IntegrationError> {
    tol.validate()?;
    path.validate(flow)?;
    let mut y = flow.pack(initial, &path.waypoints[0])?;
    let state_len = y.len();
    y.push(c64(0.0, 0.0));
    y.push(c64(0.0, 0.0));
    let g_start = flow.boundary(&y, &path.waypoints[0])?;
    let mut result = IntegrationResult {
        samples: vec![Sample {
            s: 0.0,
            times: path.waypoints[0].clone(),
            state: initial.clone(),
            ln_tau: c64(0.0, 0.0),
            action: c64(0.0, 0.0),
        }],
        delta_ln_tau: c64(0.0, 0.0),
        delta_action: c64(0.0, 0.0),
        g_start,
        g_end: g_start,
        stats: StepStats::default(),
        gamma: flow.gamma(),
        path: path.clone(),
        dense: Vec::new(),
        state_len,
    };
    dopri::run_segments(flow, &mut result, 0, y, tol)?;
    Ok(result)
}

/// Extends a finished run by one more straight segment.
pub fn continue_to_waypoint<F: Flow>(
    flow: &F,
    result: &IntegrationResult<F::State>,
    waypoint: Vec<ComplexScalar>,
    tol: &Tolerances,
) -> Result<IntegrationResult<F::State>, IntegrationError> {
    tol.validate()?;
    let mut extended = result.clone();
    extended.path.waypoints.push(waypoint);
    extended.path.validate(flow)?;
    let last = result.samples.last().ok_or(IntegrationError::EmptyResult)?;
    let mut y = flow.pack(&last.state, &last.times)?;
    y.push(last.ln_tau);
    y.push(last.action);
    let segment = result.path.segment_count();
    dopri::run_segments(flow, &mut extended, segment, y, tol)?;
    Ok(extended)
}

pub fn integrate_painleve(
    spec: &SystemSpec,
    theta: &ThetaParams,
    initial: &ExtendedState,
    path: &PathSpec,
    tol: &Tolerances,
) -> Result<IntegrationResult<ExtendedState>, IntegrationError> {
    integrate_path(&PainleveFlow::new(spec.clone(), *theta), initial, path, tol)
}

pub fn integrate_schlesinger(
    model: &SchlesingerModel,
    initial: &SchlesingerState,
    path: &PathSpec,
    tol: &Tolerances,
) -> Result<IntegrationResult<SchlesingerState>, IntegrationError> {
    integrate_path(&SchlesingerFlow::new(model.clone()), initial, path, tol)
}
