//! One invocation: load config, run the requested mode, write outputs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use zhs_core::{
    coincident_peakon, compare_to_oracle, conservation_drift, integrate, kappa, kink_rhs, ode_residual,
    stationary_kink, translating_kink_pair, verify_symmetry, weak_residual, Ansatz, Dynamics, Error,
    ExactFlow, Family, KinkPairParams, PairMode, PeakonState, ResidualReport, SymmetryTransform, TestBattery,
    Trajectory, TranslatingKinkPair,
};

use crate::config::{ClosedFormBlock, Mode, RunConfig};
use crate::output::{
    fields_csv, parse_trajectory, report_toml, trajectory_csv, write_file, LoadedTrajectory,
};
use crate::report::{ClosedFormSummary, ConservationSummary, IntegrationSummary, PairSummary, Report};
use crate::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub report: Report,
    pub files: Vec<PathBuf>,
}

pub fn config_hash(config: &RunConfig) -> String {
    hex::encode(Sha256::digest(config.canonical().as_bytes()))
}

/// Read `config_path`, run `mode` and write outputs under `out_dir`.
pub fn execute(
    mode: Mode,
    config_path: &Path,
    out_dir: &Path,
    seed: Option<u64>,
) -> Result<Outcome, RunError> {
    let text = fs::read_to_string(config_path).map_err(|e| RunError::Io {
        path: config_path.display().to_string(),
        message: e.to_string(),
    })?;
    let config = RunConfig::parse(&text, mode, seed)?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    run(&config, base, out_dir)
}

/// Run a parsed config. Relative input paths resolve against `base`.
pub fn run(config: &RunConfig, base: &Path, out_dir: &Path) -> Result<Outcome, RunError> {
    let hash = config_hash(config);
    let mut job = Job {
        config,
        hash: &hash,
        report: Report::new(config, &hash),
        files: Vec::new(),
        out_dir,
    };
    fs::create_dir_all(out_dir).map_err(|e| RunError::Io {
        path: out_dir.display().to_string(),
        message: e.to_string(),
    })?;
    match config.mode {
        Mode::SimulatePeakon => job.simulate(&config.peakon_state()?)?,
        Mode::SimulateKink => job.simulate(&config.kink_state()?)?,
        Mode::Verify => match &config.input {
            Some(input) => {
                let path = base.join(&input.trajectory);
                let text = fs::read_to_string(&path).map_err(|e| RunError::Io {
                    path: path.display().to_string(),
                    message: e.to_string(),
                })?;
                match parse_trajectory(&text)? {
                    LoadedTrajectory::Peakon(t) => job.verify(&t)?,
                    LoadedTrajectory::Kink(t) => job.verify(&t)?,
                }
            }
            None => match config.initial.as_ref().map(|i| i.family) {
                Some(Family::Peakon) => {
                    let t = integrate(&config.peakon_state()?, &config.integrator)?;
                    job.verify(&t)?
                }
                _ => {
                    let t = integrate(&config.kink_state()?, &config.integrator)?;
                    job.verify(&t)?
                }
            },
        },
        Mode::Symmetry => match config.initial.as_ref().map(|i| i.family) {
            Some(Family::Peakon) => job.symmetry(&config.peakon_state()?)?,
            _ => job.symmetry(&config.kink_state()?)?,
        },
        Mode::ClosedForm => job.closed_form()?,
    }
    let report_path = out_dir.join(&config.output.report);
    write_file(&report_path, &report_toml(&job.report, &hash))?;
    job.files.push(report_path);
    Ok(Outcome {
        status: job.report.status,
        report: job.report,
        files: job.files,
    })
}

struct Job<'a> {
    config: &'a RunConfig,
    hash: &'a str,
    report: Report,
    files: Vec<PathBuf>,
    out_dir: &'a Path,
}

impl Job<'_> {
    fn fail_unless(&mut self, ok: bool) {
        if !ok {
            self.report.status = Status::Fail;
        }
    }

    fn note(&mut self, note: impl Into<String>) {
        self.report.notes.push(note.into());
    }

    fn write_trajectory<S: Dynamics>(&mut self, trajectory: &Trajectory<S>) -> Result<(), RunError> {
        let path = self.out_dir.join(&self.config.output.trajectory);
        write_file(&path, &trajectory_csv(trajectory, self.hash))?;
        self.files.push(path);
        if let Some(grid) = &self.config.output.grid {
            let path = self.out_dir.join(&self.config.output.fields);
            write_file(
                &path,
                &fields_csv(trajectory, grid, &self.config.output.field_times, self.hash),
            )?;
            self.files.push(path);
        }
        self.report.integration = Some(IntegrationSummary::of(trajectory));
        Ok(())
    }

    /// Drift of `p^b + P^b` for 1+1 peakon trajectories; skipped otherwise.
    fn conservation<S: Dynamics + 'static>(&mut self, trajectory: &Trajectory<S>) {
        let Some(peakons) = as_peakons(trajectory) else {
            return;
        };
        let first = &peakons.first().state;
        if first.u().len() != 1 || first.v().len() != 1 {
            return;
        }
        match (kappa(first), conservation_drift(peakons)) {
            (Ok(k), Ok(drift)) => {
                self.report.conservation = Some(ConservationSummary {
                    kappa: k.kappa,
                    relative_drift: drift,
                })
            }
            (_, Err(e)) | (Err(e), _) => self.note(format!("conservation not checked: {e}")),
        }
    }

    fn simulate<S: Dynamics + 'static>(&mut self, initial: &S) -> Result<(), RunError> {
        let trajectory = integrate(initial, &self.config.integrator)?;
        self.write_trajectory(&trajectory)?;
        self.conservation(&trajectory);
        if let Some(e) = trajectory.events().first() {
            self.note(format!(
                "crossing of u[{}] and v[{}] at t = {:?}",
                e.u_index, e.v_index, e.t
            ));
        }
        Ok(())
    }

    fn weak(&self, trajectory: &Trajectory<impl Dynamics>) -> Result<ResidualReport, RunError> {
        let v = &self.config.verify;
        let battery = TestBattery::for_trajectory(trajectory, v.seed, v.battery_size)?;
        Ok(weak_residual(trajectory, &battery, v.equations, v)?)
    }

    /// ODE residual where it applies; events inside a stencil or a constant
    /// offset leave only the weak check.
    fn ode(&mut self, trajectory: &Trajectory<impl Dynamics>) -> Result<Option<ResidualReport>, RunError> {
        match ode_residual(trajectory, &self.config.verify) {
            Ok(r) => Ok(Some(r)),
            Err(e @ (Error::StencilCrossesEvent { .. } | Error::Precondition(_))) => {
                self.note(format!("ode residual not checked: {e}"));
                Ok(None)
            }
            Err(e) => Err(e.into()),
        }
    }

    fn verify<S: Dynamics + 'static>(&mut self, trajectory: &Trajectory<S>) -> Result<(), RunError> {
        let weak = self.weak(trajectory)?;
        let ode = self.ode(trajectory)?;
        self.fail_unless(weak.passed && ode.as_ref().is_none_or(|r| r.passed));
        self.report.weak = Some(weak);
        self.report.ode = ode;
        self.conservation(trajectory);
        self.report.integration = Some(IntegrationSummary::of(trajectory));
        Ok(())
    }

    fn symmetry<S: Dynamics>(&mut self, initial: &S) -> Result<(), RunError> {
        let block = self.config.symmetry.expect("validated");
        let transform = SymmetryTransform::new(block.kind, block.epsilon, self.config.b)?;
        let trajectory = integrate(initial, &self.config.integrator)?;
        let report = verify_symmetry(&transform, &trajectory, block.checker, &self.config.verify)?;
        let image = zhs_core::symmetry::apply(&transform, &trajectory)?;
        self.write_trajectory(&image)?;
        self.fail_unless(report.passed);
        self.report.symmetry = Some(report);
        Ok(())
    }

    fn closed_form(&mut self) -> Result<(), RunError> {
        let b = self.config.b;
        let block = self.config.closed_form.expect("validated");
        let tolerance = block.tolerance();
        match block {
            ClosedFormBlock::CoincidentPeakon { c, q0, branch, .. } => {
                let flow = coincident_peakon(b, c, q0, branch)?;
                let (trajectory, oracle_error) = self.against_oracle(&flow)?;
                let drift = trajectory.last().state.u().positions()[0] - q0;
                let elapsed = trajectory.last().t - trajectory.first().t;
                self.note(format!(
                    "peaks move with velocity -P^b = {:?}; writing the profile as exp(-|x - ct + x0|) \
                     suggests +c = {:?}; integrated displacement {:?} over t = {:?}",
                    flow.velocity(),
                    flow.profile_notation_velocity(),
                    drift,
                    elapsed
                ));
                self.report.closed_form = Some(ClosedFormSummary {
                    solution: "coincident-peakon".into(),
                    oracle_error,
                    tolerance,
                    passed: oracle_error <= tolerance,
                    velocity: Some(flow.velocity()),
                    profile_notation_velocity: Some(flow.profile_notation_velocity()),
                    pair: None,
                });
            }
            ClosedFormBlock::StationaryKink { c, ctilde, k, .. } => {
                let state = stationary_kink(b, c, ctilde, k)?;
                let rhs = kink_rhs(&state);
                let at_rest = rhs.u_positions.iter().chain(&rhs.v_positions).all(|&x| x == 0.0);
                if !at_rest {
                    self.note(format!("kink flow is not zero at rest: {:?}", rhs));
                }
                let (_, oracle_error) = self.against_oracle(&state)?;
                self.report.closed_form = Some(ClosedFormSummary {
                    solution: "stationary-kink".into(),
                    oracle_error,
                    tolerance,
                    passed: at_rest && oracle_error <= tolerance,
                    velocity: Some(0.0),
                    profile_notation_velocity: None,
                    pair: None,
                });
            }
            ClosedFormBlock::TranslatingKinkPair { a1, a2, x0, mode, .. } => {
                let params = KinkPairParams::new(b, a1, a2, x0)?;
                let flow = translating_kink_pair(params, mode)?;
                let printed = translating_kink_pair(params, PairMode::AsPrinted)?;
                let consistent = translating_kink_pair(params, PairMode::OdeConsistent)?;
                let dt = self.config.integrator.dt;
                let t_end = self.config.integrator.t_end;
                let exact_residual = |f: &TranslatingKinkPair| -> Result<f64, RunError> {
                    Ok(ode_residual(&f.sample(dt, t_end)?, &self.config.verify)?.max)
                };
                let pair = PairSummary {
                    mode,
                    mismatch: params.mismatch(),
                    as_printed_speed: printed.speed(),
                    ode_consistent_speed: consistent.speed(),
                    as_printed_ode_residual: exact_residual(&printed)?,
                    ode_consistent_ode_residual: exact_residual(&consistent)?,
                };
                if b % 2 == 1 {
                    self.note(format!(
                        "odd b: as-printed speed {:?}, ode-consistent speed {:?}; the two agree whenever a1^b = (-1)^b a2^b",
                        pair.as_printed_speed, pair.ode_consistent_speed
                    ));
                }
                let chosen_residual = match mode {
                    PairMode::AsPrinted => pair.as_printed_ode_residual,
                    PairMode::OdeConsistent => pair.ode_consistent_ode_residual,
                };
                let (_, oracle_error) = self.against_oracle(&flow)?;
                self.report.closed_form = Some(ClosedFormSummary {
                    solution: "translating-kink-pair".into(),
                    oracle_error,
                    tolerance,
                    passed: oracle_error <= tolerance && chosen_residual <= self.config.verify.ode_tolerance,
                    velocity: Some(flow.speed()),
                    profile_notation_velocity: None,
                    pair: Some(pair),
                });
            }
        }
        let passed = self.report.closed_form.as_ref().is_some_and(|c| c.passed);
        self.fail_unless(passed);
        Ok(())
    }

    /// Integrate from the flow's initial state, write it, and run the weak check.
    fn against_oracle<S: Dynamics>(
        &mut self,
        flow: &impl ExactFlow<S>,
    ) -> Result<(Trajectory<S>, f64), RunError> {
        let trajectory = integrate(&flow.state_at(0.0), &self.config.integrator)?;
        let error = compare_to_oracle(&trajectory, flow)?;
        self.write_trajectory(&trajectory)?;
        let weak = self.weak(&trajectory)?;
        self.fail_unless(weak.passed);
        self.report.weak = Some(weak);
        Ok((trajectory, error))
    }
}

fn as_peakons<S: Dynamics + 'static>(trajectory: &Trajectory<S>) -> Option<&Trajectory<PeakonState>> {
    (trajectory as &dyn std::any::Any).downcast_ref::<Trajectory<PeakonState>>()
}
