//! Finite-dimensional flows of the peakon and kink parameters, and a
//! deterministic Runge-Kutta integrator with position-crossing events.

use serde::{Deserialize, Serialize};

use crate::ansatz::{Ansatz, FieldOffset, KinkState, PeakonState, Train};
use crate::error::{Error, Result};
use crate::math::{ipow, sgn};

/// Time derivative of a state, laid out like the state.
///
/// For kinks the amplitude slots are identically zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDerivative {
    pub u_amplitudes: Vec<f64>,
    pub u_positions: Vec<f64>,
    pub v_amplitudes: Vec<f64>,
    pub v_positions: Vec<f64>,
}

/// Amplitude and position velocities of `own` driven by `other`.
///
/// Both blocks of the peakon system go through this one function, so
/// swapping the components swaps the derivative bit for bit.
fn peakon_block(own: &Train, other: &Train, b: u32) -> (Vec<f64>, Vec<f64>) {
    let bf = f64::from(b);
    own.amplitudes()
        .iter()
        .zip(own.positions())
        .map(|(&a, &x)| {
            let mut field = 0.0;
            let mut signed = 0.0;
            for (&oa, &ox) in other.amplitudes().iter().zip(other.positions()) {
                let e = (-(x - ox).abs()).exp();
                field += oa * e;
                signed += oa * sgn(x - ox) * e;
            }
            (bf * a * ipow(field, b - 1) * signed, -ipow(field, b))
        })
        .unzip()
}

/// Right-hand side of the multipeakon system.
pub fn peakon_rhs(state: &PeakonState) -> StateDerivative {
    let b = state.exponent();
    let (u_amplitudes, u_positions) = peakon_block(state.u(), state.v(), b);
    let (v_amplitudes, v_positions) = peakon_block(state.v(), state.u(), b);
    StateDerivative {
        u_amplitudes,
        u_positions,
        v_amplitudes,
        v_positions,
    }
}

fn kink_block(own: &Train, other: &Train, b: u32) -> Vec<f64> {
    own.positions()
        .iter()
        .map(|&p| -ipow(other.kink_value(p), b))
        .collect()
}

/// Right-hand side of the multikink system. Heights are constants.
pub fn kink_rhs(state: &KinkState) -> StateDerivative {
    let b = state.exponent();
    StateDerivative {
        u_amplitudes: vec![0.0; state.u().len()],
        u_positions: kink_block(state.u(), state.v(), b),
        v_amplitudes: vec![0.0; state.v().len()],
        v_positions: kink_block(state.v(), state.u(), b),
    }
}

/// States that evolve under one of the two flows.
pub trait Dynamics: Ansatz {
    fn rhs(&self) -> StateDerivative;

    /// Evolving coordinates as a flat vector.
    fn coords(&self) -> Vec<f64>;

    /// Same structure with new coordinates. Constant data is copied unchanged.
    fn with_coords(&self, coords: &[f64]) -> Self;

    /// `rhs` in the layout of `coords`.
    fn coord_velocity(&self) -> Vec<f64>;
}

impl Dynamics for PeakonState {
    fn rhs(&self) -> StateDerivative {
        peakon_rhs(self)
    }

    fn coords(&self) -> Vec<f64> {
        [
            self.u().amplitudes(),
            self.u().positions(),
            self.v().amplitudes(),
            self.v().positions(),
        ]
        .concat()
    }

    fn with_coords(&self, coords: &[f64]) -> Self {
        let (n, m) = (self.u().len(), self.v().len());
        debug_assert_eq!(coords.len(), 2 * (n + m));
        let u = Train::from_parts_unchecked(coords[..n].to_vec(), coords[n..2 * n].to_vec());
        let v = Train::from_parts_unchecked(coords[2 * n..2 * n + m].to_vec(), coords[2 * n + m..].to_vec());
        PeakonState::from_parts_unchecked(self.exponent(), u, v)
    }

    fn coord_velocity(&self) -> Vec<f64> {
        let d = peakon_rhs(self);
        [d.u_amplitudes, d.u_positions, d.v_amplitudes, d.v_positions].concat()
    }
}

impl Dynamics for KinkState {
    fn rhs(&self) -> StateDerivative {
        kink_rhs(self)
    }

    fn coords(&self) -> Vec<f64> {
        [self.u().positions(), self.v().positions()].concat()
    }

    fn with_coords(&self, coords: &[f64]) -> Self {
        let n = self.u().len();
        let u = Train::from_parts_unchecked(self.u().amplitudes().to_vec(), coords[..n].to_vec());
        let v = Train::from_parts_unchecked(self.v().amplitudes().to_vec(), coords[n..].to_vec());
        KinkState::from_parts_unchecked(self.exponent(), u, v)
    }

    fn coord_velocity(&self) -> Vec<f64> {
        let b = self.exponent();
        [
            kink_block(self.u(), self.v(), b),
            kink_block(self.v(), self.u(), b),
        ]
        .concat()
    }
}

/// Pairwise separations `xᵢ(u) - xⱼ(v)`, row-major in `(i, j)`.
pub fn separations<S: Ansatz>(state: &S) -> Vec<f64> {
    let v = state.v().positions();
    state
        .u()
        .positions()
        .iter()
        .flat_map(|&x| v.iter().map(move |&y| x - y))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Classical fourth-order Runge-Kutta with fixed step.
    Rk4,
    /// Fourth-order Runge-Kutta with step-doubling error control.
    AdaptiveRk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventPolicy {
    Halt,
    CrossAndContinue,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Fixed step, or the initial step for the adaptive method.
    pub dt: f64,
    /// Local error tolerance of the adaptive method.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Integration horizon; the run covers `[0, t_end]`.
    pub t_end: f64,
    #[serde(default = "default_policy")]
    pub events: EventPolicy,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn default_tolerance() -> f64 {
    1e-10
}

fn default_policy() -> EventPolicy {
    EventPolicy::Halt
}

fn default_max_steps() -> usize {
    100_000_000
}

impl IntegratorConfig {
    pub fn rk4(dt: f64, t_end: f64) -> Self {
        Self {
            method: Method::Rk4,
            dt,
            tolerance: default_tolerance(),
            t_end,
            events: EventPolicy::Halt,
            max_steps: default_max_steps(),
        }
    }

    pub fn adaptive(dt: f64, tolerance: f64, t_end: f64) -> Self {
        Self {
            method: Method::AdaptiveRk4,
            tolerance,
            ..Self::rk4(dt, t_end)
        }
    }

    pub fn with_events(mut self, events: EventPolicy) -> Self {
        self.events = events;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::ConfigInvalid("dt must be positive".into()));
        }
        if !(self.tolerance > 0.0) || !self.tolerance.is_finite() {
            return Err(Error::ConfigInvalid("tolerance must be positive".into()));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::ConfigInvalid("t_end must be positive and finite".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::ConfigInvalid("max_steps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    Crossing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventAction {
    Halted,
    Continued,
}

/// A located sign change of `xᵢ(u) - xⱼ(v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub t: f64,
    pub kind: EventKind,
    pub action: EventAction,
    pub u_index: usize,
    pub v_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepLog {
    pub method: Method,
    pub nominal_dt: f64,
    pub min_dt: f64,
    pub max_dt: f64,
    pub accepted: usize,
    pub rejected: usize,
}

impl StepLog {
    fn new(method: Method, dt: f64) -> Self {
        Self {
            method,
            nominal_dt: dt,
            min_dt: f64::INFINITY,
            max_dt: 0.0,
            accepted: 0,
            rejected: 0,
        }
    }

    fn record(&mut self, h: f64) {
        self.accepted += 1;
        self.min_dt = self.min_dt.min(h);
        self.max_dt = self.max_dt.max(h);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample<S> {
    pub t: f64,
    pub state: S,
}

/// Time-ordered samples of a state, with step metadata and the event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<S> {
    samples: Vec<Sample<S>>,
    offset: FieldOffset,
    steps: StepLog,
    events: Vec<EventRecord>,
}

impl<S: Ansatz> Trajectory<S> {
    /// Build a trajectory from explicit samples (exact flows, loaded files).
    pub fn from_samples(samples: Vec<Sample<S>>, offset: FieldOffset) -> Result<Self> {
        Self::assemble(samples, offset, None, Vec::new())
    }

    pub(crate) fn assemble(
        samples: Vec<Sample<S>>,
        offset: FieldOffset,
        steps: Option<StepLog>,
        events: Vec<EventRecord>,
    ) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::Shape("a trajectory needs at least one sample".into()))?;
        let (n, m, b) = (
            first.state.u().len(),
            first.state.v().len(),
            first.state.exponent(),
        );
        for w in samples.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(Error::Shape(format!(
                    "sample times not increasing at t = {}",
                    w[1].t
                )));
            }
        }
        if samples
            .iter()
            .any(|s| s.state.u().len() != n || s.state.v().len() != m || s.state.exponent() != b)
        {
            return Err(Error::Shape("samples differ in structure".into()));
        }
        let steps = steps.unwrap_or_else(|| {
            let mut log = StepLog::new(Method::Rk4, 0.0);
            for w in samples.windows(2) {
                log.record(w[1].t - w[0].t);
            }
            log.nominal_dt = if samples.len() > 1 { log.max_dt } else { 0.0 };
            log
        });
        Ok(Self {
            samples,
            offset,
            steps,
            events,
        })
    }

    pub fn samples(&self) -> &[Sample<S>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> &Sample<S> {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample<S> {
        &self.samples[self.samples.len() - 1]
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }

    pub fn offset(&self) -> FieldOffset {
        self.offset
    }

    pub fn steps(&self) -> &StepLog {
        &self.steps
    }

    pub fn events(&self) -> &[EventRecord] {
        &self.events
    }

    pub fn exponent(&self) -> u32 {
        self.first().state.exponent()
    }

    /// Common spacing if all samples are uniformly spaced (relative 1e-9).
    pub fn uniform_step(&self) -> Result<f64> {
        if self.samples.len() < 2 {
            return Err(Error::InsufficientSamples {
                needed: 2,
                got: self.samples.len(),
            });
        }
        let h = (self.last().t - self.first().t) / (self.samples.len() - 1) as f64;
        for w in self.samples.windows(2) {
            if ((w[1].t - w[0].t) - h).abs() > 1e-9 * h {
                return Err(Error::NonUniformSamples { t: w[0].t });
            }
        }
        Ok(h)
    }

    /// Smallest and largest position over all samples.
    pub fn spatial_hull(&self) -> (f64, f64) {
        self.samples
            .iter()
            .flat_map(|s| s.state.u().positions().iter().chain(s.state.v().positions()))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            })
    }

    /// Time of the first crossing event, if any.
    pub fn first_event_time(&self) -> Option<f64> {
        self.events.first().map(|e| e.t)
    }
}

fn axpy(y: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    y.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

/// One classical RK4 step of size `h`.
pub fn rk4_step<S: Dynamics>(state: &S, h: f64) -> S {
    let y = state.coords();
    let k1 = state.coord_velocity();
    let k2 = state.with_coords(&axpy(&y, 0.5 * h, &k1)).coord_velocity();
    let k3 = state.with_coords(&axpy(&y, 0.5 * h, &k2)).coord_velocity();
    let k4 = state.with_coords(&axpy(&y, h, &k3)).coord_velocity();
    let sixth = h / 6.0;
    let next: Vec<f64> = (0..y.len())
        .map(|i| y[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    state.with_coords(&next)
}

const EVENT_TIME_TOL: f64 = 1e-10;
const MIN_STEP: f64 = 1e-14;

struct CrossingTracker {
    last_sign: Vec<f64>,
    v_len: usize,
}

impl CrossingTracker {
    fn new<S: Ansatz>(state: &S) -> Self {
        Self {
            last_sign: separations(state).into_iter().map(sgn).collect(),
            v_len: state.v().len(),
        }
    }

    /// Earliest crossing between two consecutive states, located by bisection
    /// on the linear interpolant of each separation.
    fn earliest(&self, g0: &[f64], g1: &[f64], t0: f64, h: f64) -> Option<(f64, usize, f64)> {
        let mut best: Option<(f64, usize, f64)> = None;
        for (k, (&a, &b)) in g0.iter().zip(g1).enumerate() {
            let prev = self.last_sign[k];
            let now = sgn(b);
            if prev == 0.0 || now == 0.0 || now == prev {
                continue;
            }
            let te = if sgn(a) != prev {
                t0
            } else {
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                while (hi - lo) * h > EVENT_TIME_TOL {
                    let mid = 0.5 * (lo + hi);
                    let g = (1.0 - mid) * a + mid * b;
                    if sgn(g) == prev {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                t0 + 0.5 * (lo + hi) * h
            };
            if best.is_none_or(|(bt, _, _)| te < bt) {
                best = Some((te, k, now));
            }
        }
        best
    }

    fn update(&mut self, g: &[f64]) {
        for (s, &x) in self.last_sign.iter_mut().zip(g) {
            if x != 0.0 {
                *s = sgn(x);
            }
        }
    }

    fn indices(&self, k: usize) -> (usize, usize) {
        (k / self.v_len, k % self.v_len)
    }
}

enum Proposal<S> {
    Accept(S, f64),
    Retry(f64),
}

/// Integrate from `t = 0` to `config.t_end`.
pub fn integrate<S: Dynamics>(initial: &S, config: &IntegratorConfig) -> Result<Trajectory<S>> {
    config.validate()?;
    let mut steps = StepLog::new(config.method, config.dt);
    let mut events = Vec::new();
    let mut samples = vec![Sample {
        t: 0.0,
        state: initial.clone(),
    }];
    let mut tracker = CrossingTracker::new(initial);

    let mut state = initial.clone();
    let mut t = 0.0;
    // fixed-step times are segment_start + k dt, restarted after each event
    let mut segment_start = 0.0;
    let mut k_in_segment: usize = 0;
    let mut h_adaptive = config.dt;
    let end = config.t_end;

    while t < end {
        if steps.accepted + steps.rejected >= config.max_steps {
            return Err(Error::ConfigInvalid(format!(
                "step limit {} reached at t = {t}",
                config.max_steps
            )));
        }
        let proposal = match config.method {
            Method::Rk4 => {
                let mut t_next = segment_start + config.dt * (k_in_segment + 1) as f64;
                if t_next > end || (end - t_next) < 1e-9 * config.dt {
                    t_next = end;
                }
                let h = t_next - t;
                Proposal::Accept(rk4_step(&state, h), t_next)
            }
            Method::AdaptiveRk4 => {
                let h = h_adaptive.min(end - t);
                if h < MIN_STEP {
                    return Err(Error::StepSizeUnderflow { t, dt: h });
                }
                let full = rk4_step(&state, h);
                let half = rk4_step(&rk4_step(&state, 0.5 * h), 0.5 * h);
                let err = full
                    .coords()
                    .iter()
                    .zip(half.coords())
                    .map(|(a, b)| (a - b).abs() / (1.0 + b.abs()))
                    .fold(0.0, f64::max)
                    / 15.0;
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * (config.tolerance / err).powf(0.2)).clamp(0.2, 5.0)
                };
                if err <= config.tolerance {
                    h_adaptive = h * factor;
                    let t_next = if end - (t + h) < MIN_STEP { end } else { t + h };
                    Proposal::Accept(half, t_next)
                } else {
                    steps.rejected += 1;
                    Proposal::Retry(h * factor)
                }
            }
        };
        let (next, t_next) = match proposal {
            Proposal::Accept(s, tn) => (s, tn),
            Proposal::Retry(h) => {
                if h < MIN_STEP {
                    return Err(Error::StepSizeUnderflow { t, dt: h });
                }
                h_adaptive = h;
                continue;
            }
        };
        if !next.coords().iter().all(|x| x.is_finite()) {
            return Err(Error::StepSizeUnderflow { t, dt: t_next - t });
        }

        let g0 = separations(&state);
        let g1 = separations(&next);
        if let Some((te, k, new_sign)) = tracker.earliest(&g0, &g1, t, t_next - t) {
            let (u_index, v_index) = tracker.indices(k);
            match config.events {
                EventPolicy::Halt => {
                    events.push(EventRecord {
                        t: te,
                        kind: EventKind::Crossing,
                        action: EventAction::Halted,
                        u_index,
                        v_index,
                    });
                    break;
                }
                EventPolicy::CrossAndContinue => {
                    events.push(EventRecord {
                        t: te,
                        kind: EventKind::Crossing,
                        action: EventAction::Continued,
                        u_index,
                        v_index,
                    });
                    tracker.last_sign[k] = new_sign;
                    let h = te - t;
                    if h > 1e-12 * t.abs().max(1.0) {
                        state = rk4_step(&state, h);
                        steps.record(h);
                        t = te;
                        tracker.update(&separations(&state));
                        tracker.last_sign[k] = new_sign;
                        samples.push(Sample {
                            t,
                            state: state.clone(),
                        });
                    }
                    segment_start = t;
                    k_in_segment = 0;
                    continue;
                }
            }
        }

        steps.record(t_next - t);
        tracker.update(&g1);
        state = next;
        t = t_next;
        k_in_segment += 1;
        samples.push(Sample {
            t,
            state: state.clone(),
        });
    }

    Trajectory::assemble(samples, FieldOffset::default(), Some(steps), events)
}
