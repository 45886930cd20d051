//! Point symmetries of the system acting on parameter trajectories.
//!
//! Continuous: translations in `x` and `t`, the scaling
//! `(x, t, u, v) ↦ (x, e^{-εb} t, e^ε u, e^ε v)`, and for `b = 1` the boost
//! `(x, t, u, v) ↦ (x - εt, t, u + ε, v + ε)`. Discrete: `(x,t) ↦ (-x,-t)`,
//! `u ↔ v`, `(u,v) ↦ (-u,-v)` for even `b`, and `(t,u,v) ↦ (-t,-u,-v)` for
//! odd `b`. Both ansatz families are closed under all of these; the boost
//! additionally needs a [`FieldOffset`].

use serde::{Deserialize, Serialize};

use crate::ansatz::{Ansatz, Family, FieldOffset, Train};
use crate::ansatz::{KinkState, PeakonState};
use crate::dynamics::{Dynamics, EventRecord, Sample, StepLog, Trajectory};
use crate::error::{Error, Result};
use crate::verify::{ode_residual, weak_residual, Equations, ResidualReport, TestBattery, VerifyConfig};

pub use crate::verify::Checker;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryKind {
    TranslateX,
    TranslateT,
    #[serde(alias = "scale-db")]
    Scale,
    #[serde(alias = "boost-x3")]
    Boost,
    ReflectXt,
    SwapUv,
    NegateUv,
    NegateTuv,
}

impl SymmetryKind {
    pub fn is_discrete(self) -> bool {
        matches!(
            self,
            Self::ReflectXt | Self::SwapUv | Self::NegateUv | Self::NegateTuv
        )
    }

    fn reverses_time(self) -> bool {
        matches!(self, Self::ReflectXt | Self::NegateTuv)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryTransform {
    kind: SymmetryKind,
    epsilon: f64,
    b: u32,
}

impl SymmetryTransform {
    pub fn new(kind: SymmetryKind, epsilon: f64, b: u32) -> Result<Self> {
        if b == 0 {
            return Err(Error::InvalidExponent);
        }
        if !epsilon.is_finite() {
            return Err(Error::TransformNotAdmitted(
                "group parameter must be finite".into(),
            ));
        }
        match kind {
            SymmetryKind::Boost if b != 1 => {
                return Err(Error::TransformNotAdmitted(format!(
                    "the boost needs b = 1, got b = {b}"
                )))
            }
            SymmetryKind::NegateUv if b % 2 == 1 => {
                return Err(Error::TransformNotAdmitted(format!(
                    "negating u and v needs even b, got b = {b}"
                )))
            }
            SymmetryKind::NegateTuv if b.is_multiple_of(2) => {
                return Err(Error::TransformNotAdmitted(format!(
                    "negating t, u and v needs odd b, got b = {b}"
                )))
            }
            _ => {}
        }
        let epsilon = if kind.is_discrete() { 0.0 } else { epsilon };
        Ok(Self { kind, epsilon, b })
    }

    pub fn discrete(kind: SymmetryKind, b: u32) -> Result<Self> {
        Self::new(kind, 0.0, b)
    }

    pub fn kind(&self) -> SymmetryKind {
        self.kind
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Image of a sample time.
    fn map_time(&self, t: f64) -> f64 {
        match self.kind {
            SymmetryKind::TranslateT => t + self.epsilon,
            SymmetryKind::Scale => (-self.epsilon * f64::from(self.b)).exp() * t,
            SymmetryKind::ReflectXt | SymmetryKind::NegateTuv => -t,
            _ => t,
        }
    }

    fn map_offset(&self, o: FieldOffset) -> FieldOffset {
        match self.kind {
            SymmetryKind::Scale => {
                let f = self.epsilon.exp();
                FieldOffset {
                    du: f * o.du,
                    dv: f * o.dv,
                }
            }
            SymmetryKind::Boost => FieldOffset {
                du: o.du + self.epsilon,
                dv: o.dv + self.epsilon,
            },
            SymmetryKind::SwapUv => FieldOffset { du: o.dv, dv: o.du },
            SymmetryKind::NegateUv | SymmetryKind::NegateTuv => FieldOffset { du: -o.du, dv: -o.dv },
            _ => o,
        }
    }

    /// Image of one state sampled at the original time `t`.
    fn map_state<S: Ansatz>(&self, state: &S, t: f64) -> Result<S> {
        let b = state.exponent();
        let map_train = |train: &Train, amp: &dyn Fn(f64) -> f64, pos: &dyn Fn(f64) -> f64| {
            Train::from_parts_unchecked(
                train.amplitudes().iter().map(|&a| amp(a)).collect(),
                train.positions().iter().map(|&x| pos(x)).collect(),
            )
        };
        let both = |amp: &dyn Fn(f64) -> f64, pos: &dyn Fn(f64) -> f64| {
            S::from_trains(b, map_train(state.u(), amp, pos), map_train(state.v(), amp, pos))
        };
        let eps = self.epsilon;
        match self.kind {
            SymmetryKind::TranslateX => both(&|a| a, &|x| x + eps),
            SymmetryKind::TranslateT => Ok(state.clone()),
            SymmetryKind::Scale => {
                let f = eps.exp();
                both(&|a| f * a, &|x| x)
            }
            // x - ε t at the transformed time, which equals the original time
            SymmetryKind::Boost => both(&|a| a, &|x| x - eps * t),
            // a kink profile is odd about its centre, so reflection flips its height
            SymmetryKind::ReflectXt => match S::FAMILY {
                Family::Peakon => both(&|a| a, &|x| -x),
                Family::Kink => both(&|a| -a, &|x| -x),
            },
            SymmetryKind::SwapUv => S::from_trains(b, state.v().clone(), state.u().clone()),
            SymmetryKind::NegateUv | SymmetryKind::NegateTuv => both(&|a| -a, &|x| x),
        }
    }

    fn map_event(&self, e: &EventRecord) -> EventRecord {
        let mut out = EventRecord {
            t: self.map_time(e.t),
            ..*e
        };
        if self.kind == SymmetryKind::SwapUv {
            out.u_index = e.v_index;
            out.v_index = e.u_index;
        }
        out
    }

    fn map_steps(&self, s: &StepLog) -> StepLog {
        match self.kind {
            SymmetryKind::Scale => {
                let f = (-self.epsilon * f64::from(self.b)).exp();
                StepLog {
                    nominal_dt: f * s.nominal_dt,
                    min_dt: f * s.min_dt,
                    max_dt: f * s.max_dt,
                    ..*s
                }
            }
            _ => *s,
        }
    }
}

/// Apply a symmetry to a trajectory of either family.
pub fn apply<S: Ansatz>(transform: &SymmetryTransform, trajectory: &Trajectory<S>) -> Result<Trajectory<S>> {
    if trajectory.exponent() != transform.b {
        return Err(Error::TransformNotAdmitted(format!(
            "transform built for b = {} applied to a b = {} trajectory",
            transform.b,
            trajectory.exponent()
        )));
    }
    let mut samples = trajectory
        .samples()
        .iter()
        .map(|s| {
            Ok(Sample {
                t: transform.map_time(s.t),
                state: transform.map_state(&s.state, s.t)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut events: Vec<EventRecord> = trajectory
        .events()
        .iter()
        .map(|e| transform.map_event(e))
        .collect();
    if transform.kind.reverses_time() {
        samples.reverse();
        events.reverse();
    }
    Trajectory::assemble(
        samples,
        transform.map_offset(trajectory.offset()),
        Some(transform.map_steps(trajectory.steps())),
        events,
    )
}

pub fn apply_to_peakon(
    transform: &SymmetryTransform,
    trajectory: &Trajectory<PeakonState>,
) -> Result<Trajectory<PeakonState>> {
    apply(transform, trajectory)
}

pub fn apply_to_kink(
    transform: &SymmetryTransform,
    trajectory: &Trajectory<KinkState>,
) -> Result<Trajectory<KinkState>> {
    apply(transform, trajectory)
}

/// Residuals before and after a symmetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub transform: SymmetryTransform,
    pub checker: Checker,
    pub baseline: ResidualReport,
    pub transformed: ResidualReport,
    /// Ratio of normalised residuals, transformed over baseline.
    pub ratio: f64,
    pub passed: bool,
}

/// Allowed growth of the normalised residual under a symmetry.
pub const RESIDUAL_GROWTH: f64 = 10.0;
/// Normalised residuals below this are treated as zero when forming the ratio.
pub const RESIDUAL_FLOOR: f64 = 1e-14;

/// Transform a trajectory and check that the image still solves the system.
///
/// Residuals are compared after division by the magnitude of the nonlinear
/// term, since absolute residuals pick up a factor `e^{ε(b+1)}` under the
/// scaling. The image must also pass the checker's absolute tolerance.
pub fn verify_symmetry<S: Dynamics>(
    transform: &SymmetryTransform,
    trajectory: &Trajectory<S>,
    checker: Checker,
    config: &VerifyConfig,
) -> Result<SymmetryReport> {
    let baseline_ode = ode_residual(trajectory, config)?;
    if !baseline_ode.passed {
        return Err(Error::Precondition(format!(
            "trajectory does not satisfy its ODE: residual {} > {}",
            baseline_ode.max, baseline_ode.tolerance
        )));
    }
    let image = apply(transform, trajectory)?;
    let (baseline, transformed) = match checker {
        Checker::Ode => {
            if !image.offset().is_zero() {
                return Err(Error::TransformNotAdmitted(
                    "fields with a constant offset are checked by the weak residual only".into(),
                ));
            }
            (baseline_ode, ode_residual(&image, config)?)
        }
        Checker::Weak => {
            let run = |t: &Trajectory<S>| -> Result<ResidualReport> {
                let battery = TestBattery::for_trajectory(t, config.seed, config.battery_size)?;
                weak_residual(t, &battery, Equations::Both, config)
            };
            (run(trajectory)?, run(&image)?)
        }
    };
    let before = baseline.normalized_max().max(RESIDUAL_FLOOR);
    let after = transformed.normalized_max();
    let ratio = after / before;
    let passed = transformed.passed && after <= RESIDUAL_GROWTH * before;
    Ok(SymmetryReport {
        transform: *transform,
        checker,
        baseline,
        transformed,
        ratio,
        passed,
    })
}
