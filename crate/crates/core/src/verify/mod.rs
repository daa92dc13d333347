//! Quantified checks of every identity relating the tau function, the
//! classical action and the boundary function, plus the Lax, Hamilton,
//! formal-series and Schlesinger structure they rest on.
//!
//! Each check returns a [`ResidualReport`]; thresholds are fixed per check.

mod local;
mod path;
pub mod random;
mod schlesinger;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, ComplexScalar};
use crate::integrate::IntegrationError;
use crate::schlesinger::SchlesingerError;
use crate::systems::{PainleveKind, SystemError, ThetaParams};

pub use local::{
    check_hamilton_equations, check_lax_compatibility, check_series_recursion, frames_tau_density, hamilton_residual,
    lax_residual, series_recursion_residual, HamiltonProbe, LaxProbe,
};
pub use path::{
    check_action_identity, check_integrator_concatenation, check_integrator_reversal, check_integrator_step_halving,
    check_scalar_equation, check_tau_log_derivative, check_variational_identity, ActionOptions, TauOptions,
    VariationalOptions, SCALAR_EQUATION_FD_STEP, STEP_HALVING_FACTOR,
};
pub use schlesinger::{check_schlesinger_suite, commutator_agreement, mixed_partials, SchlesingerOptions};

pub const LAX_THRESHOLD: f64 = 1e-5;
pub const HAMILTON_THRESHOLD: f64 = 1e-5;
pub const SERIES_THRESHOLD: f64 = 1e-9;
pub const ACTION_THRESHOLD: f64 = 1e-7;
pub const TAU_DENSITY_THRESHOLD: f64 = 1e-6;
pub const TAU_REMARK_THRESHOLD: f64 = 1e-6;
pub const VARIATIONAL_THRESHOLD: f64 = 1e-4;
pub const SCALAR_EQUATION_THRESHOLD: f64 = 1e-5;
pub const ISOSPECTRAL_THRESHOLD: f64 = 1e-9;
pub const RESIDUE_SUM_THRESHOLD: f64 = 1e-9;
pub const CLOSEDNESS_THRESHOLD: f64 = 1e-8;
pub const COMMUTATOR_THRESHOLD: f64 = 1e-8;
pub const SCHLESINGER_ACTION_THRESHOLD: f64 = 1e-8;
pub const MIXED_PARTIALS_THRESHOLD: f64 = 1e-6;
pub const CONCATENATION_THRESHOLD: f64 = 1e-9;
pub const REVERSAL_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error(transparent)]
    Schlesinger(#[from] SchlesingerError),
    #[error("no local frame at the requested point")]
    NoFrame,
    #[error("finite-difference step {0:e} is below the noise floor")]
    StepTooSmall(f64),
    #[error("{0}")]
    Invalid(String),
}

/// Inputs that identify a check run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportContext {
    pub kind: Option<String>,
    pub theta: Option<ThetaParams>,
    pub t: Option<ComplexScalar>,
    pub seed: Option<u64>,
    pub note: Option<String>,
}

impl ReportContext {
    pub fn painleve(kind: PainleveKind, theta: &ThetaParams, t: ComplexScalar) -> Self {
        Self {
            kind: Some(kind.to_string()),
            theta: Some(*theta),
            t: Some(t),
            ..Default::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
    pub context: ReportContext,
}

impl ResidualReport {
    /// A non-finite residual never passes.
    pub fn new(name: impl Into<String>, residual: f64, threshold: f64, context: ReportContext) -> Self {
        Self {
            name: name.into(),
            residual,
            threshold,
            passed: residual <= threshold,
            context,
        }
    }
}
