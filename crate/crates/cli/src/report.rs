//! Report document written as `report.toml`.

use serde::Serialize;
use zhs_core::{Ansatz, EventRecord, PairMode, ResidualReport, StepLog, SymmetryReport, Trajectory};

use crate::config::RunConfig;
use crate::run::Status;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub mode: String,
    pub status: Status,
    pub config_sha256: String,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integration: Option<IntegrationSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conservation: Option<ConservationSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weak: Option<ResidualReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ode: Option<ResidualReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetryReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<ClosedFormSummary>,
    pub settings: RunConfig,
}

impl Report {
    pub fn new(config: &RunConfig, hash: &str) -> Self {
        Self {
            mode: config.mode.name().into(),
            status: Status::Pass,
            config_sha256: hash.into(),
            notes: Vec::new(),
            integration: None,
            conservation: None,
            weak: None,
            ode: None,
            symmetry: None,
            closed_form: None,
            settings: config.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegrationSummary {
    pub samples: usize,
    pub t_start: f64,
    pub t_final: f64,
    pub steps: StepLog,
    pub events: Vec<EventRecord>,
    pub final_u_amplitudes: Vec<f64>,
    pub final_u_positions: Vec<f64>,
    pub final_v_amplitudes: Vec<f64>,
    pub final_v_positions: Vec<f64>,
}

impl IntegrationSummary {
    pub fn of<S: Ansatz>(trajectory: &Trajectory<S>) -> Self {
        let last = &trajectory.last().state;
        Self {
            samples: trajectory.len(),
            t_start: trajectory.first().t,
            t_final: trajectory.last().t,
            steps: *trajectory.steps(),
            events: trajectory.events().to_vec(),
            final_u_amplitudes: last.u().amplitudes().to_vec(),
            final_u_positions: last.u().positions().to_vec(),
            final_v_amplitudes: last.v().amplitudes().to_vec(),
            final_v_positions: last.v().positions().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConservationSummary {
    pub kappa: f64,
    pub relative_drift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormSummary {
    pub solution: String,
    /// Max abs difference between the integrated trajectory and the closed form.
    pub oracle_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub velocity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile_notation_velocity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairSummary>,
}

/// Both readings of the translating kink pair speed, each checked against the ODE.
#[derive(Debug, Clone, Serialize)]
pub struct PairSummary {
    pub mode: PairMode,
    pub mismatch: f64,
    pub as_printed_speed: f64,
    pub ode_consistent_speed: f64,
    pub as_printed_ode_residual: f64,
    pub ode_consistent_ode_residual: f64,
}
