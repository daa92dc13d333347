//! Serialized forms of trajectories, summaries, reports and frames.

use std::fmt::Write as _;

use painleve_tau::algebra::{ComplexScalar, SeriesPoint, SquareMatrix};
use painleve_tau::integrate::StepStats;
use painleve_tau::systems::ThetaParams;
use painleve_tau::verify::{ReportContext, ResidualReport};
use serde::Serialize;

use crate::config::Complex;

/// One output file, held in memory until every computation has succeeded.
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn json<T: Serialize>(name: &str, value: &T) -> Self {
        let mut text = serde_json::to_string_pretty(value).expect("output types serialize");
        text.push('\n');
        Self {
            name: name.to_string(),
            bytes: text.into_bytes(),
        }
    }
}

fn complex_list(zs: &[ComplexScalar]) -> Vec<Complex> {
    zs.iter().map(|&z| z.into()).collect()
}

pub struct Row {
    pub s: f64,
    pub times: Vec<ComplexScalar>,
    pub slots: Vec<ComplexScalar>,
    pub ln_tau: ComplexScalar,
    pub action: ComplexScalar,
}

pub struct Trajectory {
    pub time_labels: Vec<String>,
    pub slot_labels: Vec<String>,
    pub rows: Vec<Row>,
}

fn push_complex(line: &mut String, z: ComplexScalar) {
    write!(line, ",{:e},{:e}", z.re, z.im).expect("writing to a String");
}

impl Trajectory {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s");
        for label in self.time_labels.iter().chain(&self.slot_labels) {
            write!(out, ",re_{label},im_{label}").expect("writing to a String");
        }
        out.push_str(",re_ln_tau,im_ln_tau,re_action,im_action\n");
        for row in &self.rows {
            let mut line = format!("{:e}", row.s);
            for &z in row.times.iter().chain(&row.slots) {
                push_complex(&mut line, z);
            }
            push_complex(&mut line, row.ln_tau);
            push_complex(&mut line, row.action);
            line.push('\n');
            out.push_str(&line);
        }
        out
    }

    pub fn to_json(&self) -> Artifact {
        #[derive(Serialize)]
        #[serde(rename_all = "camelCase")]
        struct RowOut {
            s: f64,
            times: Vec<Complex>,
            state: Vec<Complex>,
            ln_tau: Complex,
            action: Complex,
        }
        #[derive(Serialize)]
        #[serde(rename_all = "camelCase")]
        struct Out<'a> {
            time_labels: &'a [String],
            state_labels: &'a [String],
            rows: Vec<RowOut>,
        }
        let rows = self
            .rows
            .iter()
            .map(|r| RowOut {
                s: r.s,
                times: complex_list(&r.times),
                state: complex_list(&r.slots),
                ln_tau: r.ln_tau.into(),
                action: r.action.into(),
            })
            .collect();
        Artifact::json(
            "trajectory.json",
            &Out {
                time_labels: &self.time_labels,
                state_labels: &self.slot_labels,
                rows,
            },
        )
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Summary {
    pub system: String,
    pub samples: usize,
    pub s_end: f64,
    pub gamma: f64,
    pub start_times: Vec<Complex>,
    pub end_times: Vec<Complex>,
    pub delta_ln_tau: Complex,
    pub delta_action: Complex,
    pub g_start: Complex,
    pub g_end: Complex,
    pub step_stats: StepStats,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ThetaOut {
    theta0: Complex,
    theta1: Complex,
    theta_t: Complex,
    theta_inf: Complex,
}

impl From<&ThetaParams> for ThetaOut {
    fn from(t: &ThetaParams) -> Self {
        Self {
            theta0: t.theta0.into(),
            theta1: t.theta1.into(),
            theta_t: t.theta_t.into(),
            theta_inf: t.theta_inf.into(),
        }
    }
}

#[derive(Serialize)]
struct ContextOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<ThetaOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<Complex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

impl From<&ReportContext> for ContextOut {
    fn from(c: &ReportContext) -> Self {
        Self {
            kind: c.kind.clone(),
            theta: c.theta.as_ref().map(ThetaOut::from),
            t: c.t.map(Into::into),
            seed: c.seed,
            note: c.note.clone(),
        }
    }
}

#[derive(Serialize)]
struct ReportOut {
    /// Name of the requested check that produced this report.
    check: String,
    name: String,
    residual: f64,
    threshold: f64,
    passed: bool,
    context: ContextOut,
}

pub fn reports(entries: &[(String, ResidualReport)]) -> Artifact {
    let out: Vec<ReportOut> = entries
        .iter()
        .map(|(check, r)| ReportOut {
            check: check.clone(),
            name: r.name.clone(),
            residual: r.residual,
            threshold: r.threshold,
            passed: r.passed,
            context: (&r.context).into(),
        })
        .collect();
    Artifact::json("reports.json", &out)
}

#[derive(Serialize)]
#[serde(untagged)]
pub enum LocationOut {
    Named(&'static str),
    Finite(Complex),
}

impl From<SeriesPoint> for LocationOut {
    fn from(p: SeriesPoint) -> Self {
        match p {
            SeriesPoint::Infinity => LocationOut::Named("infinity"),
            SeriesPoint::Finite(z) => LocationOut::Finite(z.into()),
        }
    }
}

pub fn matrix_rows(m: &SquareMatrix) -> Vec<Vec<Complex>> {
    m.rows().iter().map(|r| complex_list(r)).collect()
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FrameOut {
    pub location: LocationOut,
    pub gauge: Vec<Vec<Complex>>,
    /// `g_1, g_2, …` in order.
    pub coefficients: Vec<Vec<Vec<Complex>>>,
    pub recursion_residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SeriesOut {
    pub system: String,
    pub t: Complex,
    pub frames: Vec<FrameOut>,
}
