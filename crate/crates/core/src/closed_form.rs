//! Exact solutions and relations of the one-peakon and one-kink reductions.
//!
//! These serve as oracles for the integrator and the residual checkers.

use serde::{Deserialize, Serialize};

use crate::ansatz::{Ansatz, FieldOffset, KinkState, PeakonState, Train};
use crate::dynamics::{Sample, Trajectory};
use crate::error::{Error, Result};
use crate::math::{ipow, kink_shape, neg_one_pow, real_root, sgn};

/// A solution known in closed form, sampled on demand.
pub trait ExactFlow<S: Ansatz> {
    fn state_at(&self, t: f64) -> S;

    /// Sample `[0, t_end]` at spacing `dt` (last step shortened if needed).
    fn sample(&self, dt: f64, t_end: f64) -> Result<Trajectory<S>> {
        if !(dt > 0.0) || !(t_end > 0.0) {
            return Err(Error::ConfigInvalid("dt and t_end must be positive".into()));
        }
        let n = ((t_end / dt) - 1e-9).ceil() as usize;
        let samples = (0..=n)
            .map(|k| {
                let t = if k == n { t_end } else { dt * k as f64 };
                Sample {
                    t,
                    state: self.state_at(t),
                }
            })
            .collect();
        Trajectory::from_samples(samples, FieldOffset::default())
    }
}

/// `p^b + P^b`, conserved by the 1+1 peakon flow while `q ≠ Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedQuantity {
    pub b: u32,
    pub kappa: f64,
}

impl ConservedQuantity {
    /// The conservation law is only claimed while the positions stay apart.
    pub fn is_valid_for(&self, state: &PeakonState) -> bool {
        sgn(state.u().positions()[0] - state.v().positions()[0]) != 0.0
    }

    pub fn value_of(&self, state: &PeakonState) -> f64 {
        ipow(state.u().amplitudes()[0], self.b) + ipow(state.v().amplitudes()[0], self.b)
    }
}

pub fn kappa(state: &PeakonState) -> Result<ConservedQuantity> {
    if state.u().len() != 1 || state.v().len() != 1 {
        return Err(Error::Shape(format!(
            "conserved quantity needs a 1+1 peakon state, got {}+{}",
            state.u().len(),
            state.v().len()
        )));
    }
    let b = state.exponent();
    let q = ConservedQuantity { b, kappa: 0.0 };
    Ok(ConservedQuantity {
        kappa: q.value_of(state),
        ..q
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoincidentBranch {
    /// `u = v`.
    Symmetric,
    /// `u = -v`, even `b` only.
    Antisymmetric,
}

/// Two coincident peakons travelling together with constant amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoincidentPeakon {
    pub b: u32,
    pub c: f64,
    pub u_amplitude: f64,
    pub v_amplitude: f64,
    pub q0: f64,
}

/// Amplitudes `±c^{1/b}` at a common position `q0`.
pub fn coincident_peakon(b: u32, c: f64, q0: f64, branch: CoincidentBranch) -> Result<CoincidentPeakon> {
    if b == 0 {
        return Err(Error::InvalidExponent);
    }
    let root = real_root(c, b).ok_or(Error::Domain { value: c, b })?;
    let v_amplitude = match branch {
        CoincidentBranch::Symmetric => root,
        CoincidentBranch::Antisymmetric if b.is_multiple_of(2) => -root,
        CoincidentBranch::Antisymmetric => {
            return Err(Error::HypothesisViolated("the u = -v branch needs even b".into()))
        }
    };
    Ok(CoincidentPeakon {
        b,
        c,
        u_amplitude: root,
        v_amplitude,
        q0,
    })
}

impl CoincidentPeakon {
    /// Common velocity `-P^b` of both peaks.
    pub fn velocity(&self) -> f64 {
        -ipow(self.v_amplitude, self.b)
    }

    /// Velocity `+c` suggested by writing the profile as `e^{-|x - ct + x0|}`.
    /// It has the opposite sign to [`velocity`](Self::velocity).
    pub fn profile_notation_velocity(&self) -> f64 {
        self.c
    }
}

impl ExactFlow<PeakonState> for CoincidentPeakon {
    fn state_at(&self, t: f64) -> PeakonState {
        let x = self.q0 + self.velocity() * t;
        PeakonState::from_parts_unchecked(
            self.b,
            Train::from_parts_unchecked(vec![self.u_amplitude], vec![x]),
            Train::from_parts_unchecked(vec![self.v_amplitude], vec![x]),
        )
    }
}

/// Both components kinked at the same point `k`. The kink flow vanishes there.
pub fn stationary_kink(b: u32, c: f64, ctilde: f64, k: f64) -> Result<KinkState> {
    KinkState::pair(b, c, k, ctilde, k)
}

impl ExactFlow<KinkState> for KinkState {
    fn state_at(&self, _t: f64) -> KinkState {
        self.clone()
    }
}

/// Heights and initial separation of a 1+1 kink state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinkPairParams {
    pub b: u32,
    pub a1: f64,
    pub a2: f64,
    pub x0: f64,
}

impl KinkPairParams {
    pub fn new(b: u32, a1: f64, a2: f64, x0: f64) -> Result<Self> {
        if b == 0 {
            return Err(Error::InvalidExponent);
        }
        if a1 * a2 == 0.0 || !(a1 * a2).is_finite() || !x0.is_finite() {
            return Err(Error::InvalidState(
                "kink heights must be finite and non-zero".into(),
            ));
        }
        Ok(Self { b, a1, a2, x0 })
    }

    /// `A_b = ((-1)^b a2^b - a1^b) / a1^b`.
    pub fn mismatch(&self) -> f64 {
        let a1b = ipow(self.a1, self.b);
        (neg_one_pow(self.b) * ipow(self.a2, self.b) - a1b) / a1b
    }

    /// `a1^b = (-1)^b a2^b`, up to rounding.
    pub fn moves_rigidly(&self) -> bool {
        let lhs = ipow(self.a1, self.b);
        let rhs = neg_one_pow(self.b) * ipow(self.a2, self.b);
        (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs())
    }
}

/// `(p - q)'` of the 1+1 kink flow as a function of `delta = p - q`.
pub fn relative_kink_velocity(params: &KinkPairParams, delta: f64) -> f64 {
    let b = params.b;
    neg_one_pow(b + 1)
        * ipow(params.a1, b)
        * params.mismatch()
        * ipow(sgn(delta), b)
        * ipow((-delta.abs()).exp() - 1.0, b)
}

/// How the common speed of the rigidly translating kink pair is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairMode {
    /// `-a2^b (sgn(x0)(e^{-|x0|} - 1))^b`, read off the `p` equation.
    AsPrinted,
    /// `-(-1)^b a1^b (sgn(x0)(e^{-|x0|} - 1))^b`, read off the `q` equation.
    OdeConsistent,
}

/// A 1+1 kink pair with `a1^b = (-1)^b a2^b`, translating rigidly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TranslatingKinkPair {
    pub params: KinkPairParams,
    pub mode: PairMode,
}

pub fn translating_kink_pair(params: KinkPairParams, mode: PairMode) -> Result<TranslatingKinkPair> {
    if !params.moves_rigidly() {
        return Err(Error::HypothesisViolated(format!(
            "a1^b = {} but (-1)^b a2^b = {}",
            ipow(params.a1, params.b),
            neg_one_pow(params.b) * ipow(params.a2, params.b)
        )));
    }
    Ok(TranslatingKinkPair { params, mode })
}

impl TranslatingKinkPair {
    pub fn speed(&self) -> f64 {
        let KinkPairParams { b, a1, a2, x0 } = self.params;
        let shape = ipow(kink_shape(x0), b);
        match self.mode {
            PairMode::AsPrinted => -ipow(a2, b) * shape,
            PairMode::OdeConsistent => -neg_one_pow(b) * ipow(a1, b) * shape,
        }
    }

    pub fn positions_at(&self, t: f64) -> (f64, f64) {
        let drift = self.speed() * t;
        (drift + self.params.x0, drift)
    }

    /// `(u, v)` of the translating pair at `(x, t)`.
    pub fn fields_at(&self, x: f64, t: f64) -> (f64, f64) {
        let (p, q) = self.positions_at(t);
        (
            self.params.a1 * kink_shape(x - p),
            self.params.a2 * kink_shape(x - q),
        )
    }
}

impl ExactFlow<KinkState> for TranslatingKinkPair {
    fn state_at(&self, t: f64) -> KinkState {
        let (p, q) = self.positions_at(t);
        KinkState::from_parts_unchecked(
            self.params.b,
            Train::from_parts_unchecked(vec![self.params.a1], vec![p]),
            Train::from_parts_unchecked(vec![self.params.a2], vec![q]),
        )
    }
}
