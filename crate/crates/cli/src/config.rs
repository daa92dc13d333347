//! JSON run configuration and its resolution into a validated job.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use painleve_tau::algebra::{c64, ComplexScalar, SquareMatrix};
use painleve_tau::integrate::{Flow, PainleveFlow, PathSpec, SchlesingerFlow, Tolerances};
use painleve_tau::schlesinger::{MultiTimePath, SchlesingerModel, SchlesingerState};
use painleve_tau::systems::{hamiltonian, ExtendedState, PainleveKind, SystemSpec, ThetaParams};
use painleve_tau::verify::random::{random_schlesinger_case, random_trajectory_case};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Complex number as it appears in configs and outputs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Complex {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<Complex> for ComplexScalar {
    fn from(z: Complex) -> Self {
        c64(z.re, z.im)
    }
}

impl From<ComplexScalar> for Complex {
    fn from(z: ComplexScalar) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// A waypoint is a single time for the Painlevé systems and one time per pole
/// for Schlesinger.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Waypoint {
    Scalar(Complex),
    Multi(Vec<Complex>),
}

impl Waypoint {
    fn times(&self) -> Vec<ComplexScalar> {
        match self {
            Waypoint::Scalar(z) => vec![(*z).into()],
            Waypoint::Multi(zs) => zs.iter().map(|&z| z.into()).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThetaConfig {
    pub theta0: Complex,
    pub theta1: Complex,
    pub theta_t: Complex,
    pub theta_inf: Complex,
}

impl From<ThetaConfig> for ThetaParams {
    fn from(t: ThetaConfig) -> Self {
        Self {
            theta0: t.theta0.into(),
            theta1: t.theta1.into(),
            theta_t: t.theta_t.into(),
            theta_inf: t.theta_inf.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StateConfig {
    pub q: Complex,
    pub p: Complex,
    pub log_k: Complex,
    pub log_a: Complex,
    pub log_b: Complex,
    pub log_c: Complex,
}

impl StateConfig {
    fn resolve(&self, kind: PainleveKind, what: &str) -> Result<ExtendedState, CliError> {
        let all = [self.q, self.p, self.log_k, self.log_a, self.log_b, self.log_c];
        let n = kind.state_len();
        if let Some(extra) = all[n..].iter().position(|z| *z != Complex::default()) {
            let name = ["q", "p", "log_k", "log_a", "log_b", "log_c"][n + extra];
            return Err(CliError::Config(format!("{what}: {kind} has no slot `{name}`")));
        }
        let slots: Vec<ComplexScalar> = all[..n].iter().map(|&z| z.into()).collect();
        let state = ExtendedState::from_slots(kind, &slots).map_err(|e| CliError::Config(format!("{what}: {e}")))?;
        if !state.is_finite() {
            return Err(CliError::Config(format!("{what}: non-finite entry")));
        }
        Ok(state)
    }
}

type MatrixConfig = Vec<Vec<Complex>>;

fn matrix(rows: &MatrixConfig, what: &str) -> Result<SquareMatrix, CliError> {
    let rows = rows.iter().map(|r| r.iter().map(|&z| z.into()).collect()).collect();
    SquareMatrix::from_rows(rows).map_err(|e| CliError::Config(format!("{what}: {e}")))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// Eigenvalues of each residue.
    pub thetas: Vec<Vec<Complex>>,
    pub theta_inf: Vec<Complex>,
}

/// Schlesinger initial data: either gauges `G_ν` (then `Q = GΘ`, `P = G⁻¹`)
/// or the canonical matrices themselves.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchlesingerStateConfig {
    pub poles: Vec<Complex>,
    #[serde(default)]
    pub gauges: Option<Vec<MatrixConfig>>,
    #[serde(default)]
    pub q: Option<Vec<MatrixConfig>>,
    #[serde(default)]
    pub p: Option<Vec<MatrixConfig>>,
}

/// Size of a seeded random Schlesinger case.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeConfig {
    pub mat_dim: usize,
    pub pole_count: usize,
}

impl Default for ShapeConfig {
    fn default() -> Self {
        Self {
            mat_dim: 2,
            pole_count: 3,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_step: Option<f64>,
    pub min_step: Option<f64>,
}

impl From<ToleranceConfig> for Tolerances {
    fn from(c: ToleranceConfig) -> Self {
        let d = Tolerances::default();
        Self {
            rel_tol: c.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: c.abs_tol.unwrap_or(d.abs_tol),
            max_step: c.max_step.unwrap_or(d.max_step),
            min_step: c.min_step.unwrap_or(d.min_step),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Deliberate corruptions, used to confirm that a check can fail.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FaultConfig {
    /// Lax check: reverse `ṗ` in the finite-difference advance.
    pub flip_p_dot: bool,
    /// Lax check: exponents used for `B` only.
    pub theta_for_b: Option<ThetaConfig>,
    /// Hamilton check: added to `q̇`.
    pub hamilton_extra_q: Option<Complex>,
    /// Series output and check: added to entry (0, 1) of the second series
    /// coefficient (the first when only one is known).
    pub series_shift: Option<f64>,
    /// Action identity: ratio used in place of the system's own.
    pub gamma_override: Option<f64>,
    /// Variational identity: leave `δG` out of the boundary term.
    pub omit_boundary_g: bool,
    /// Tau check: compare with the Hamiltonian alone.
    pub drop_correction: bool,
    /// Schlesinger: reverse the `P` equations.
    pub flip_p_equation: bool,
}

impl FaultConfig {
    fn has_painleve_faults(&self) -> bool {
        self.flip_p_dot
            || self.theta_for_b.is_some()
            || self.hamilton_extra_q.is_some()
            || self.series_shift.is_some()
            || self.gamma_override.is_some()
            || self.omit_boundary_g
            || self.drop_correction
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// `P1` … `P6` or `schlesinger`.
    pub system: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub theta: Option<ThetaConfig>,
    #[serde(default)]
    pub model: Option<ModelConfig>,
    /// Painlevé: a state object. Schlesinger: poles with gauges or `q`/`p`.
    #[serde(default)]
    pub initial: Option<serde_json::Value>,
    /// Evaluation time for the pointwise checks and the series dump.
    #[serde(default)]
    pub t: Option<Complex>,
    #[serde(default)]
    pub path: Option<Vec<Waypoint>>,
    #[serde(default)]
    pub shape: Option<ShapeConfig>,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub checks: Vec<String>,
    /// Variation direction for the variational identity.
    #[serde(default)]
    pub direction: Option<StateConfig>,
    #[serde(default)]
    pub faults: FaultConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_samples() -> usize {
    101
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Lax,
    Hamilton,
    Series,
    ActionIdentity,
    VariationalIdentity,
    TauLogDerivative,
    ScalarEquation,
    StepHalving,
    Concatenation,
    Reversal,
    SchlesingerSuite,
}

impl Check {
    fn painleve_only(self) -> bool {
        !matches!(
            self,
            Check::StepHalving | Check::Concatenation | Check::Reversal | Check::SchlesingerSuite
        )
    }
}

impl FromStr for Check {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "lax" => Check::Lax,
            "hamilton" => Check::Hamilton,
            "series" => Check::Series,
            "action_identity" => Check::ActionIdentity,
            "variational_identity" => Check::VariationalIdentity,
            "tau_log_derivative" => Check::TauLogDerivative,
            "scalar_equation" => Check::ScalarEquation,
            "step_halving" => Check::StepHalving,
            "concatenation" => Check::Concatenation,
            "reversal" => Check::Reversal,
            "schlesinger_suite" => Check::SchlesingerSuite,
            other => return Err(CliError::Config(format!("unknown check `{other}`"))),
        })
    }
}

#[derive(Clone, Debug)]
pub enum Problem {
    Painleve {
        spec: SystemSpec,
        theta: ThetaParams,
        state: ExtendedState,
        t: ComplexScalar,
        path: Option<PathSpec>,
    },
    Schlesinger {
        model: SchlesingerModel,
        state: SchlesingerState,
        path: PathSpec,
    },
}

/// Everything a command needs, validated.
#[derive(Clone, Debug)]
pub struct Job {
    pub problem: Problem,
    pub tol: Tolerances,
    pub samples: usize,
    pub checks: Vec<(String, Check)>,
    pub direction: ExtendedState,
    pub faults: FaultConfig,
    pub seed: u64,
    /// Set when the initial data came from the seeded generator.
    pub drawn: bool,
    pub out_dir: PathBuf,
    pub format: Format,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
}

pub fn load(path: &Path, overrides: &Overrides) -> Result<Job, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let config: RunConfig = serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
    resolve(config, overrides)
}

fn path_spec(path: &Option<Vec<Waypoint>>) -> Option<PathSpec> {
    path.as_ref()
        .map(|w| PathSpec::new(w.iter().map(Waypoint::times).collect()))
}

fn validate_path<F: Flow>(path: &PathSpec, flow: &F) -> Result<(), CliError> {
    path.validate(flow).map_err(|e| CliError::Config(e.to_string()))
}

pub fn resolve(config: RunConfig, overrides: &Overrides) -> Result<Job, CliError> {
    let seed = overrides.seed.or(config.seed).unwrap_or(0);
    let tol = Tolerances::from(config.tolerances);
    tol.validate().map_err(|e| CliError::Config(e.to_string()))?;
    if config.samples == 0 {
        return Err(CliError::Config("samples must be at least 1".into()));
    }

    let schlesinger = config.system.eq_ignore_ascii_case("schlesinger");
    let mut checks = Vec::with_capacity(config.checks.len());
    for name in &config.checks {
        let check: Check = name.parse()?;
        let fits = if schlesinger {
            !check.painleve_only()
        } else {
            check != Check::SchlesingerSuite
        };
        if !fits {
            return Err(CliError::Config(format!(
                "check `{name}` does not apply to {}",
                config.system
            )));
        }
        checks.push((name.clone(), check));
    }

    let (problem, drawn) = if schlesinger {
        resolve_schlesinger(&config, seed)?
    } else {
        resolve_painleve(&config, seed, &tol)?
    };
    let direction = match (&problem, &config.direction) {
        (Problem::Painleve { spec, .. }, Some(d)) => d.resolve(spec.kind, "direction")?,
        (Problem::Painleve { .. }, None) => ExtendedState::new(c64(1.0, 0.0), c64(0.0, 0.5)),
        (Problem::Schlesinger { .. }, Some(_)) => {
            return Err(CliError::Config(
                "direction applies to the Painlevé systems only".into(),
            ))
        }
        (Problem::Schlesinger { .. }, None) => ExtendedState::default(),
    };

    Ok(Job {
        problem,
        tol,
        samples: config.samples,
        checks,
        direction,
        faults: config.faults,
        seed,
        drawn,
        out_dir: overrides
            .out
            .clone()
            .or(config.output.dir)
            .unwrap_or_else(|| PathBuf::from(".")),
        format: overrides.format.or(config.output.format).unwrap_or_default(),
    })
}

fn resolve_painleve(config: &RunConfig, seed: u64, tol: &Tolerances) -> Result<(Problem, bool), CliError> {
    let kind: PainleveKind = config.system.parse().map_err(|e| CliError::Config(format!("{e}")))?;
    if config.model.is_some() || config.shape.is_some() {
        return Err(CliError::Config("`model` and `shape` apply to schlesinger only".into()));
    }
    if config.faults.flip_p_equation {
        return Err(CliError::Config(
            "fault `flip_p_equation` applies to schlesinger only".into(),
        ));
    }
    let spec = SystemSpec::new(kind);
    let mut path = path_spec(&config.path);

    let (theta, state, t, drawn) = match &config.initial {
        Some(value) => {
            let theta: ThetaParams = config.theta.unwrap_or_default().into();
            let raw: StateConfig =
                serde_json::from_value(value.clone()).map_err(|e| CliError::Config(format!("initial: {e}")))?;
            let state = raw.resolve(kind, "initial")?;
            let t = match (config.t, &path) {
                (Some(t), _) => t.into(),
                (None, Some(p)) if !p.waypoints.is_empty() && !p.waypoints[0].is_empty() => p.waypoints[0][0],
                _ => {
                    return Err(CliError::Config(
                        "give `t` or a `path` for an explicit initial state".into(),
                    ))
                }
            };
            (theta, state, t, false)
        }
        None => {
            if config.theta.is_some() || config.t.is_some() || config.path.is_some() {
                return Err(CliError::Config(
                    "`theta`, `t` and `path` need an explicit `initial` state".into(),
                ));
            }
            let case = random_trajectory_case(kind, seed, 1.0, tol).map_err(|e| CliError::Config(e.to_string()))?;
            path.get_or_insert(case.path);
            (case.case.theta, case.case.state, case.case.t, true)
        }
    };

    spec.check_time(t, 0.0)
        .map_err(|e| CliError::Config(format!("t: {e}")))?;
    hamiltonian(&spec, &theta, &state, t).map_err(|e| CliError::Config(format!("initial: {e}")))?;
    if let Some(p) = &path {
        validate_path(p, &PainleveFlow::new(spec.clone(), theta))?;
        if p.waypoints[0] != vec![t] {
            return Err(CliError::Config("`t` differs from the first waypoint".into()));
        }
    }
    Ok((
        Problem::Painleve {
            spec,
            theta,
            state,
            t,
            path,
        },
        drawn,
    ))
}

fn resolve_schlesinger(config: &RunConfig, seed: u64) -> Result<(Problem, bool), CliError> {
    if config.theta.is_some() || config.t.is_some() {
        return Err(CliError::Config(
            "`theta` and `t` apply to the Painlevé systems only".into(),
        ));
    }
    if config.faults.has_painleve_faults() {
        return Err(CliError::Config("only `flip_p_equation` applies to schlesinger".into()));
    }
    let (model, state, drawn) = match (&config.model, &config.initial) {
        (Some(m), Some(value)) => {
            if config.shape.is_some() {
                return Err(CliError::Config("`shape` is only used for seeded cases".into()));
            }
            let model = SchlesingerModel::new(
                m.thetas
                    .iter()
                    .map(|th| th.iter().map(|&z| z.into()).collect())
                    .collect(),
                m.theta_inf.iter().map(|&z| z.into()).collect(),
            )
            .map_err(|e| CliError::Config(format!("model: {e}")))?;
            let raw: SchlesingerStateConfig =
                serde_json::from_value(value.clone()).map_err(|e| CliError::Config(format!("initial: {e}")))?;
            (model.clone(), schlesinger_state(&model, &raw)?, false)
        }
        (None, None) => {
            let shape = config.shape.unwrap_or_default();
            let (model, state) = random_schlesinger_case(shape.mat_dim, shape.pole_count, seed)
                .map_err(|e| CliError::Config(e.to_string()))?;
            (model, state, true)
        }
        _ => return Err(CliError::Config("give both `model` and `initial`, or neither".into())),
    };
    let path = match path_spec(&config.path) {
        Some(p) => p,
        None if state.pole_count() >= 2 => MultiTimePath::rectangle(&state.poles, 0, 1, 0.1).into(),
        None => return Err(CliError::Config("`path` is required".into())),
    };
    if path.waypoints.first() != Some(&state.poles) {
        return Err(CliError::Config("the path must start at the initial poles".into()));
    }
    validate_path(&path, &SchlesingerFlow::new(model.clone()))?;
    Ok((Problem::Schlesinger { model, state, path }, drawn))
}

fn schlesinger_state(model: &SchlesingerModel, raw: &SchlesingerStateConfig) -> Result<SchlesingerState, CliError> {
    let poles: Vec<ComplexScalar> = raw.poles.iter().map(|&z| z.into()).collect();
    let list = |ms: &Vec<MatrixConfig>, what: &str| -> Result<Vec<SquareMatrix>, CliError> {
        ms.iter()
            .enumerate()
            .map(|(i, m)| matrix(m, &format!("{what}[{i}]")))
            .collect()
    };
    let state = match (&raw.gauges, &raw.q, &raw.p) {
        (Some(g), None, None) => SchlesingerState::from_gauges(model, poles, &list(g, "gauges")?)
            .map_err(|e| CliError::Config(format!("initial: {e}")))?,
        (None, Some(q), Some(p)) => SchlesingerState {
            poles,
            q_mats: list(q, "q")?,
            p_mats: list(p, "p")?,
        },
        _ => return Err(CliError::Config("initial: give `gauges`, or both `q` and `p`".into())),
    };
    state
        .validate(model)
        .map_err(|e| CliError::Config(format!("initial: {e}")))?;
    Ok(state)
}
