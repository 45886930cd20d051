//! Run configuration: a single TOML document with a versioned `schema` key.
//! The full schema is documented in `docs/config.md`.

use serde::{Deserialize, Serialize};
use zhs_core::{
    Checker, CoincidentBranch, Family, IntegratorConfig, KinkState, PairMode, PeakonState, SampleGrid,
    SymmetryKind, Train, VerifyConfig,
};

use crate::RunError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    SimulatePeakon,
    SimulateKink,
    Verify,
    Symmetry,
    ClosedForm,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::SimulatePeakon => "simulate-peakon",
            Mode::SimulateKink => "simulate-kink",
            Mode::Verify => "verify",
            Mode::Symmetry => "symmetry",
            Mode::ClosedForm => "closed-form",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainBlock {
    pub amplitudes: Vec<f64>,
    pub positions: Vec<f64>,
}

impl TrainBlock {
    fn train(&self) -> Result<Train, RunError> {
        Train::new(self.amplitudes.clone(), self.positions.clone())
            .map_err(|e| RunError::Config(e.to_string()))
    }
}

/// Initial parameters. For kinks the amplitudes are the constant heights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialBlock {
    pub family: Family,
    pub u: TrainBlock,
    pub v: TrainBlock,
}

/// Existing trajectory to verify instead of integrating `[initial]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputBlock {
    /// Relative paths resolve against the directory holding the config file.
    pub trajectory: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetryBlock {
    pub kind: SymmetryKind,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "default_checker")]
    pub checker: Checker,
}

fn default_checker() -> Checker {
    Checker::Weak
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solution", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ClosedFormBlock {
    CoincidentPeakon {
        c: f64,
        #[serde(default)]
        q0: f64,
        #[serde(default = "default_branch")]
        branch: CoincidentBranch,
        #[serde(default = "default_oracle_tolerance")]
        tolerance: f64,
    },
    StationaryKink {
        c: f64,
        ctilde: f64,
        #[serde(default)]
        k: f64,
        #[serde(default = "default_oracle_tolerance")]
        tolerance: f64,
    },
    TranslatingKinkPair {
        a1: f64,
        a2: f64,
        x0: f64,
        #[serde(default = "default_pair_mode")]
        mode: PairMode,
        #[serde(default = "default_oracle_tolerance")]
        tolerance: f64,
    },
}

fn default_branch() -> CoincidentBranch {
    CoincidentBranch::Symmetric
}

fn default_pair_mode() -> PairMode {
    PairMode::OdeConsistent
}

fn default_oracle_tolerance() -> f64 {
    1e-8
}

impl ClosedFormBlock {
    pub fn tolerance(&self) -> f64 {
        match *self {
            ClosedFormBlock::CoincidentPeakon { tolerance, .. }
            | ClosedFormBlock::StationaryKink { tolerance, .. }
            | ClosedFormBlock::TranslatingKinkPair { tolerance, .. } => tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "default_trajectory_name")]
    pub trajectory: String,
    #[serde(default = "default_report_name")]
    pub report: String,
    #[serde(default = "default_fields_name")]
    pub fields: String,
    /// Spatial grid for the field table; no field table without it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<SampleGrid>,
    /// Field table times; the nearest trajectory sample is used for each.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub field_times: Vec<f64>,
}

fn default_trajectory_name() -> String {
    "trajectory.csv".into()
}

fn default_report_name() -> String {
    "report.toml".into()
}

fn default_fields_name() -> String {
    "fields.csv".into()
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            trajectory: default_trajectory_name(),
            report: default_report_name(),
            fields: default_fields_name(),
            grid: None,
            field_times: Vec::new(),
        }
    }
}

/// Document as written by the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema: u32,
    #[serde(default)]
    mode: Option<Mode>,
    b: i64,
    #[serde(default)]
    initial: Option<InitialBlock>,
    #[serde(default)]
    integrator: Option<IntegratorConfig>,
    #[serde(default)]
    input: Option<InputBlock>,
    #[serde(default)]
    verify: Option<VerifyConfig>,
    #[serde(default)]
    symmetry: Option<SymmetryBlock>,
    #[serde(default)]
    closed_form: Option<ClosedFormBlock>,
    #[serde(default)]
    output: Option<OutputBlock>,
}

/// Validated configuration for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub schema: u32,
    pub mode: Mode,
    pub b: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<InputBlock>,
    pub integrator: IntegratorConfig,
    pub verify: VerifyConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetryBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<ClosedFormBlock>,
    pub output: OutputBlock,
}

fn config_err(msg: impl Into<String>) -> RunError {
    RunError::Config(msg.into())
}

impl RunConfig {
    /// Parse and validate a document for the given subcommand.
    pub fn parse(text: &str, mode: Mode, seed_override: Option<u64>) -> Result<Self, RunError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| config_err(e.message().replace('\n', " ")))?;
        if raw.schema != SCHEMA_VERSION {
            return Err(config_err(format!(
                "unsupported schema {} (expected {SCHEMA_VERSION})",
                raw.schema
            )));
        }
        if let Some(m) = raw.mode {
            if m != mode {
                return Err(config_err(format!(
                    "config is for mode {} but {} was requested",
                    m.name(),
                    mode.name()
                )));
            }
        }
        if raw.b < 1 || raw.b > i64::from(u32::MAX) {
            return Err(config_err("b must be a positive integer"));
        }
        let mut verify = raw.verify.unwrap_or_default();
        if let Some(seed) = seed_override {
            verify.seed = seed;
        }
        let integrator = raw
            .integrator
            .ok_or_else(|| config_err("missing [integrator] block"))?;
        integrator.validate().map_err(|e| config_err(e.to_string()))?;
        let config = Self {
            schema: raw.schema,
            mode,
            b: raw.b as u32,
            initial: raw.initial,
            input: raw.input,
            integrator,
            verify,
            symmetry: raw.symmetry,
            closed_form: raw.closed_form,
            output: raw.output.unwrap_or_default(),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), RunError> {
        if self.input.is_some() && self.mode != Mode::Verify {
            return Err(config_err("[input] is only accepted by verify"));
        }
        match self.mode {
            Mode::ClosedForm => {
                if self.initial.is_some() {
                    return Err(config_err(
                        "closed-form runs take their initial state from [closed_form]",
                    ));
                }
                if self.closed_form.is_none() {
                    return Err(config_err("missing [closed_form] block"));
                }
            }
            Mode::Verify if self.input.is_some() => {
                if self.initial.is_some() {
                    return Err(config_err("give either [initial] or [input], not both"));
                }
            }
            _ => {
                let init = self.initial()?;
                let required = match self.mode {
                    Mode::SimulatePeakon => Some(Family::Peakon),
                    Mode::SimulateKink => Some(Family::Kink),
                    _ => None,
                };
                if let Some(f) = required {
                    if init.family != f {
                        return Err(config_err(format!(
                            "{} needs an initial state of family {f:?}",
                            self.mode.name()
                        )));
                    }
                }
                match init.family {
                    Family::Peakon => drop(self.peakon_state()?),
                    Family::Kink => drop(self.kink_state()?),
                }
            }
        }
        if self.mode == Mode::Symmetry && self.symmetry.is_none() {
            return Err(config_err("missing [symmetry] block"));
        }
        if let Some(grid) = &self.output.grid {
            grid.validate().map_err(|e| config_err(e.to_string()))?;
        }
        if !self.output.field_times.iter().all(|t| t.is_finite()) {
            return Err(config_err("field_times must be finite"));
        }
        let v = &self.verify;
        if !(v.weak_tolerance > 0.0) || !(v.ode_tolerance > 0.0) {
            return Err(config_err("verify tolerances must be positive"));
        }
        if v.battery_size == 0 {
            return Err(config_err("battery_size must be positive"));
        }
        Ok(())
    }

    fn initial(&self) -> Result<&InitialBlock, RunError> {
        self.initial
            .as_ref()
            .ok_or_else(|| config_err("missing [initial] block"))
    }

    pub fn peakon_state(&self) -> Result<PeakonState, RunError> {
        let init = self.initial()?;
        PeakonState::new(self.b, init.u.train()?, init.v.train()?).map_err(|e| config_err(e.to_string()))
    }

    pub fn kink_state(&self) -> Result<KinkState, RunError> {
        let init = self.initial()?;
        KinkState::new(self.b, init.u.train()?, init.v.train()?).map_err(|e| config_err(e.to_string()))
    }

    /// Canonical serialization used for the config hash.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }
}
